//! Signed measures on finite spaces: Jordan decomposition and the
//! independence notions built on it.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::independence::{
    check_probabilistic_independence, IndependenceError, IndependenceVerdict,
};
use crate::measure::{AtomMeasure, EventProbability, MeasureError};
use crate::space::{EventSet, FiniteSpace, SigmaAlgebra};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignedError {
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("the measures live on different sample spaces")]
    SpaceMismatch,
    #[error("the zero measure has no normalized parts to check")]
    ZeroMeasure,
    #[error(transparent)]
    Independence(#[from] IndependenceError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// A finite signed measure, one rational weight of either sign per
/// outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedMeasure {
    space: FiniteSpace,
    weights: Vec<BigRational>,
}

impl SignedMeasure {
    pub fn new(space: FiniteSpace, weights: Vec<BigRational>) -> Result<Self, SignedError> {
        if weights.len() != space.atom_count() {
            return Err(SignedError::WeightCount {
                expected: space.atom_count(),
                got: weights.len(),
            });
        }
        Ok(SignedMeasure { space, weights })
    }

    /// The difference `a - b` of two nonnegative measures.
    pub fn from_difference(a: &AtomMeasure, b: &AtomMeasure) -> Result<Self, SignedError> {
        if !a.space().same_space(b.space()) {
            return Err(SignedError::SpaceMismatch);
        }
        let weights = a
            .weights()
            .iter()
            .zip(b.weights())
            .map(|(x, y)| x - y)
            .collect();
        Ok(SignedMeasure { space: a.space().clone(), weights })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn weight(&self, atom: usize) -> &BigRational {
        &self.weights[atom]
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// Signed value of an event.
    pub fn event_value(&self, event: &EventSet) -> Result<BigRational, SignedError> {
        if !event.space().same_space(&self.space) {
            return Err(SignedError::SpaceMismatch);
        }
        Ok(event.atom_indices().map(|i| &self.weights[i]).sum())
    }

    pub fn total_variation(&self) -> BigRational {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| w.is_zero())
    }
}

/// The Jordan decomposition of a signed measure into mutually singular
/// nonnegative parts, together with a positive set of the splitting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanPair {
    pub positive: AtomMeasure,
    pub negative: AtomMeasure,
    /// A set carrying all positive mass whose complement carries all
    /// negative mass. Zero-weight outcomes are kept on the positive side,
    /// which makes the choice canonical.
    pub hahn_positive_set: EventSet,
}

/// Splits a signed measure into its positive and negative parts.
///
/// On a finite space the split is atom-by-atom, which makes the parts
/// minimal: any other decomposition into nonnegative measures exceeds
/// these on every outcome.
pub fn jordan_decompose(mu: &SignedMeasure) -> JordanPair {
    let space = mu.space().clone();
    let zero = BigRational::zero();
    let pos: Vec<BigRational> = mu
        .weights()
        .iter()
        .map(|w| if w > &zero { w.clone() } else { zero.clone() })
        .collect();
    let neg: Vec<BigRational> = mu
        .weights()
        .iter()
        .map(|w| if w < &zero { -w.clone() } else { zero.clone() })
        .collect();
    let hahn = space
        .event_from_indices(
            (0..space.atom_count()).filter(|&i| mu.weight(i) >= &zero),
        )
        .expect("indices come from the space");
    JordanPair {
        positive: AtomMeasure::new(space.clone(), pos).expect("positive parts are nonnegative"),
        negative: AtomMeasure::new(space, neg).expect("negative parts are nonnegative"),
        hahn_positive_set: hahn,
    }
}

/// What happened to one Jordan part during a signed independence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartOutcome {
    /// The part vanishes; it imposes no constraint.
    ZeroMass,
    /// The part was normalized to a probability and checked.
    Checked(IndependenceVerdict),
}

impl PartOutcome {
    pub fn passed(&self) -> bool {
        match self {
            PartOutcome::ZeroMass => true,
            PartOutcome::Checked(v) => v.independent,
        }
    }
}

/// Outcome of a signed independence check: the verdicts for both Jordan
/// parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedIndependence {
    pub independent: bool,
    pub positive: PartOutcome,
    pub negative: PartOutcome,
}

/// The algebras are independent under a signed measure when they are
/// independent under both of its Jordan parts.
///
/// A part with mass other than 1 is judged through its normalization, so
/// independence is scale-free; a vanishing part is vacuously fine. The
/// zero measure is rejected since neither part can be normalized.
pub fn check_independence_signed(
    algebras: &[SigmaAlgebra],
    mu: &SignedMeasure,
) -> Result<SignedIndependence, SignedError> {
    let jordan = jordan_decompose(mu);
    if jordan.positive.is_zero() && jordan.negative.is_zero() {
        return Err(SignedError::ZeroMeasure);
    }
    let check_part = |part: &AtomMeasure| -> Result<PartOutcome, SignedError> {
        if part.is_zero() {
            return Ok(PartOutcome::ZeroMass);
        }
        let normalized = part.normalized()?;
        Ok(PartOutcome::Checked(check_probabilistic_independence(
            algebras,
            &normalized,
        )?))
    };
    let positive = check_part(&jordan.positive)?;
    let negative = check_part(&jordan.negative)?;
    Ok(SignedIndependence {
        independent: positive.passed() && negative.passed(),
        positive,
        negative,
    })
}

/// Outcome of a uniform independence check over a list of probabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformIndependence {
    pub independent: bool,
    /// Verdict under each measure, in input order.
    pub verdicts: Vec<IndependenceVerdict>,
    /// First measure whose verdict failed, with that verdict.
    pub failing: Option<(usize, IndependenceVerdict)>,
}

/// The algebras are uniformly independent over `measures` when they are
/// independent under every one of them. An empty list holds vacuously.
pub fn check_uniform_independence(
    algebras: &[SigmaAlgebra],
    measures: &[AtomMeasure],
) -> Result<UniformIndependence, SignedError> {
    let mut verdicts = Vec::with_capacity(measures.len());
    let mut failing = None;
    for (i, m) in measures.iter().enumerate() {
        let v = check_probabilistic_independence(algebras, m)?;
        if !v.independent && failing.is_none() {
            failing = Some((i, v.clone()));
        }
        verdicts.push(v);
    }
    Ok(UniformIndependence { independent: failing.is_none(), verdicts, failing })
}
