//! Nonnegative measures with exact rational atom weights.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::space::{EventSet, FiniteSpace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("measure lives on a different sample space")]
    SpaceMismatch,
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight of outcome {atom} is negative")]
    NegativeWeight { atom: usize },
    #[error("weights sum to {total}, not 1")]
    NotAProbability { total: BigRational },
    #[error("total mass is zero; nothing to normalize")]
    ZeroMass,
    #[error("event is not measurable for this measure")]
    NotMeasurable,
}

/// Anything that can price events of a fixed finite space exactly.
pub trait EventProbability {
    fn space(&self) -> &FiniteSpace;

    /// Exact measure of the event. Errors when the event belongs to a
    /// different space or is not measurable for this measure.
    fn event_prob(&self, event: &EventSet) -> Result<BigRational, MeasureError>;

    fn total(&self) -> BigRational {
        self.event_prob(&self.space().full_event())
            .expect("the whole space is always measurable")
    }
}

/// A measure given by one nonnegative rational weight per outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomMeasure {
    space: FiniteSpace,
    weights: Vec<BigRational>,
}

impl AtomMeasure {
    pub fn new(space: FiniteSpace, weights: Vec<BigRational>) -> Result<Self, MeasureError> {
        if weights.len() != space.atom_count() {
            return Err(MeasureError::WeightCount {
                expected: space.atom_count(),
                got: weights.len(),
            });
        }
        if let Some(atom) = weights.iter().position(|w| w < &BigRational::zero()) {
            return Err(MeasureError::NegativeWeight { atom });
        }
        Ok(AtomMeasure { space, weights })
    }

    /// Like [`new`](Self::new) but additionally requires total mass 1.
    pub fn probability(
        space: FiniteSpace,
        weights: Vec<BigRational>,
    ) -> Result<Self, MeasureError> {
        let m = Self::new(space, weights)?;
        if !m.is_probability() {
            return Err(MeasureError::NotAProbability { total: m.total_mass() });
        }
        Ok(m)
    }

    pub fn point_mass(space: FiniteSpace, atom: usize) -> Self {
        let mut weights = vec![BigRational::zero(); space.atom_count()];
        weights[atom] = BigRational::one();
        AtomMeasure { space, weights }
    }

    pub fn uniform(space: FiniteSpace) -> Self {
        let w = BigRational::new(1.into(), (space.atom_count() as i64).into());
        let weights = vec![w; space.atom_count()];
        AtomMeasure { space, weights }
    }

    pub fn weight(&self, atom: usize) -> &BigRational {
        &self.weights[atom]
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn total_mass(&self) -> BigRational {
        self.weights.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| w.is_zero())
    }

    pub fn is_probability(&self) -> bool {
        self.total_mass().is_one()
    }

    /// Scale to total mass 1; errors on the zero measure.
    pub fn normalized(&self) -> Result<AtomMeasure, MeasureError> {
        let total = self.total_mass();
        if total.is_zero() {
            return Err(MeasureError::ZeroMass);
        }
        Ok(AtomMeasure {
            space: self.space.clone(),
            weights: self.weights.iter().map(|w| w / &total).collect(),
        })
    }
}

impl EventProbability for AtomMeasure {
    fn space(&self) -> &FiniteSpace {
        &self.space
    }

    fn event_prob(&self, event: &EventSet) -> Result<BigRational, MeasureError> {
        if !event.space().same_space(&self.space) {
            return Err(MeasureError::SpaceMismatch);
        }
        Ok(event.atom_indices().map(|i| &self.weights[i]).sum())
    }

    fn total(&self) -> BigRational {
        self.total_mass()
    }
}

/// Shorthand for an exact rational from an integer pair.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin() -> FiniteSpace {
        FiniteSpace::new(["HH", "HT", "TH", "TT"]).unwrap()
    }

    #[test]
    fn atom_measure_prices_events_by_summing() {
        let s = coin();
        let p = AtomMeasure::probability(
            s.clone(),
            vec![ratio(3, 16), ratio(1, 16), ratio(9, 16), ratio(3, 16)],
        )
        .unwrap();
        let heads_first = s.event_from_labels(["HH", "HT"]).unwrap();
        assert_eq!(p.event_prob(&heads_first).unwrap(), ratio(1, 4));
        assert_eq!(p.event_prob(&s.full_event()).unwrap(), ratio(1, 1));
        assert_eq!(p.event_prob(&s.empty_event()).unwrap(), ratio(0, 1));
        assert!(p.is_probability());
    }

    #[test]
    fn validation_errors() {
        let s = coin();
        assert_eq!(
            AtomMeasure::new(s.clone(), vec![ratio(1, 2)]).unwrap_err(),
            MeasureError::WeightCount { expected: 4, got: 1 }
        );
        assert_eq!(
            AtomMeasure::new(
                s.clone(),
                vec![ratio(1, 2), ratio(-1, 2), ratio(1, 2), ratio(1, 2)]
            )
            .unwrap_err(),
            MeasureError::NegativeWeight { atom: 1 }
        );
        assert_eq!(
            AtomMeasure::probability(s.clone(), vec![ratio(1, 2); 4]).unwrap_err(),
            MeasureError::NotAProbability { total: ratio(2, 1) }
        );
        let other = FiniteSpace::new(["x", "y"]).unwrap();
        let p = AtomMeasure::uniform(s);
        assert_eq!(
            p.event_prob(&other.full_event()).unwrap_err(),
            MeasureError::SpaceMismatch
        );
    }

    #[test]
    fn point_mass_and_normalization() {
        let s = coin();
        let d = AtomMeasure::point_mass(s.clone(), 2);
        assert!(d.is_probability());
        assert_eq!(
            d.event_prob(&s.event_from_labels(["TH"]).unwrap()).unwrap(),
            ratio(1, 1)
        );
        let m = AtomMeasure::new(s.clone(), vec![ratio(1, 2); 4]).unwrap();
        assert!(!m.is_probability());
        assert!(m.normalized().unwrap().is_probability());
        let zero = AtomMeasure::new(s, vec![ratio(0, 1); 4]).unwrap();
        assert_eq!(zero.normalized().unwrap_err(), MeasureError::ZeroMass);
        assert!(zero.is_zero());
    }
}
