//! Independence checks for families of finite sigma-algebras.
//!
//! A family is logically independent when every choice of one nontrivial
//! member per algebra has nonempty intersection. On finite spaces this
//! reduces to block choices: each block is itself a nontrivial member,
//! every nontrivial member contains at least one block, and intersections
//! only grow when a set is replaced by a superset. The reduction is not
//! taken on faith; `check_logical_independence_bruteforce` walks the full
//! member tuples and the two are compared over randomized families in the
//! test suites.

use num_rational::BigRational;
use num_traits::One;

use crate::measure::EventProbability;
use crate::space::{EventSet, SigmaAlgebra};

/// Ceiling on member-tuple count accepted by the brute-force walk.
pub const DEFAULT_CHOICE_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndependenceError {
    #[error("independence needs at least two sigma-algebras")]
    FewerThanTwo,
    #[error("sigma-algebra {index} is trivial; independence checks need nontrivial algebras")]
    TrivialAlgebra { index: usize },
    #[error("the sigma-algebras live on different sample spaces")]
    SpaceMismatch,
    #[error("{choices} member choices exceed the budget of {budget}")]
    TooLarge { choices: u128, budget: u64 },
    #[error("the measure lives on a different space than the algebras")]
    MeasureMismatch,
    #[error("the measure has total mass {total}, not 1")]
    NotAProbability { total: BigRational },
}

/// How a particular choice of members violates independence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The chosen members have empty intersection.
    EmptyIntersection,
    /// The joint probability of the choice differs from the product of
    /// the member probabilities.
    ProductRule { joint: BigRational, product: BigRational },
}

/// A concrete violating choice: `(algebra index, chosen member)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub choice: Vec<(usize, EventSet)>,
    pub violation: Violation,
}

/// Outcome of an independence check. `witness` is present exactly when
/// `independent` is false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceVerdict {
    pub independent: bool,
    pub witness: Option<Witness>,
}

impl IndependenceVerdict {
    fn holds() -> Self {
        IndependenceVerdict { independent: true, witness: None }
    }

    fn fails(witness: Witness) -> Self {
        IndependenceVerdict { independent: false, witness: Some(witness) }
    }
}

fn validate_family(algebras: &[SigmaAlgebra]) -> Result<(), IndependenceError> {
    if algebras.len() < 2 {
        return Err(IndependenceError::FewerThanTwo);
    }
    let space = algebras[0].space();
    for (index, a) in algebras.iter().enumerate() {
        if !a.space().same_space(space) {
            return Err(IndependenceError::SpaceMismatch);
        }
        if !a.is_nontrivial() {
            return Err(IndependenceError::TrivialAlgebra { index });
        }
    }
    Ok(())
}

/// Walks tuples `(t_0, .., t_{k-1})` with `t_i < radix(i)` in
/// lexicographic order, leftmost position most significant.
struct Odometer {
    digits: Vec<usize>,
    radixes: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(radixes: Vec<usize>) -> Self {
        let done = radixes.iter().any(|&r| r == 0);
        Odometer { digits: vec![0; radixes.len()], radixes, done }
    }

    fn current(&self) -> Option<&[usize]> {
        if self.done {
            None
        } else {
            Some(&self.digits)
        }
    }

    fn advance(&mut self) {
        for pos in (0..self.digits.len()).rev() {
            self.digits[pos] += 1;
            if self.digits[pos] < self.radixes[pos] {
                return;
            }
            self.digits[pos] = 0;
        }
        self.done = true;
    }
}

/// Decides logical independence by intersecting block choices.
///
/// On failure the witness is the lexicographically first violating block
/// choice, ordered by block index per algebra.
pub fn check_logical_independence(
    algebras: &[SigmaAlgebra],
) -> Result<IndependenceVerdict, IndependenceError> {
    validate_family(algebras)?;
    let mut odo = Odometer::new(algebras.iter().map(|a| a.block_count()).collect());
    while let Some(tuple) = odo.current() {
        let mut meet = algebras[0].blocks()[tuple[0]].clone();
        for (i, &t) in tuple.iter().enumerate().skip(1) {
            meet = meet.intersection(&algebras[i].blocks()[t]);
            if meet.is_empty() {
                break;
            }
        }
        if meet.is_empty() {
            let choice = tuple
                .iter()
                .enumerate()
                .map(|(i, &t)| (i, algebras[i].blocks()[t].clone()))
                .collect();
            return Ok(IndependenceVerdict::fails(Witness {
                choice,
                violation: Violation::EmptyIntersection,
            }));
        }
        odo.advance();
    }
    Ok(IndependenceVerdict::holds())
}

/// Decides logical independence by walking every choice of one
/// nontrivial member per algebra, without the block reduction. Intended
/// as an oracle for small instances; refuses families whose choice count
/// exceeds [`DEFAULT_CHOICE_BUDGET`].
pub fn check_logical_independence_bruteforce(
    algebras: &[SigmaAlgebra],
) -> Result<IndependenceVerdict, IndependenceError> {
    check_logical_independence_bruteforce_with_budget(algebras, DEFAULT_CHOICE_BUDGET)
}

pub fn check_logical_independence_bruteforce_with_budget(
    algebras: &[SigmaAlgebra],
    budget: u64,
) -> Result<IndependenceVerdict, IndependenceError> {
    validate_family(algebras)?;
    let mut choices: u128 = 1;
    for a in algebras {
        // 2^blocks members minus the two trivial ones.
        let per_algebra = if a.block_count() >= 64 {
            u128::MAX
        } else {
            (1u128 << a.block_count()) - 2
        };
        choices = choices.saturating_mul(per_algebra);
    }
    if choices > budget as u128 {
        return Err(IndependenceError::TooLarge { choices, budget });
    }
    // Within budget, so every block count fits the member iterator.
    let members: Vec<Vec<EventSet>> = algebras
        .iter()
        .map(|a| {
            a.members_with_limit(63)
                .expect("block count fits the member budget")
                .filter(EventSet::is_nontrivial)
                .collect()
        })
        .collect();
    let mut odo = Odometer::new(members.iter().map(Vec::len).collect());
    while let Some(tuple) = odo.current() {
        let mut meet = members[0][tuple[0]].clone();
        for (i, &t) in tuple.iter().enumerate().skip(1) {
            meet = meet.intersection(&members[i][t]);
        }
        if meet.is_empty() {
            let choice = tuple
                .iter()
                .enumerate()
                .map(|(i, &t)| (i, members[i][t].clone()))
                .collect();
            return Ok(IndependenceVerdict::fails(Witness {
                choice,
                violation: Violation::EmptyIntersection,
            }));
        }
        odo.advance();
    }
    Ok(IndependenceVerdict::holds())
}

/// Countable-choice independence. A choice still selects one member per
/// algebra, so for a finite family the available choices are exactly the
/// finite ones and the verdict coincides with
/// [`check_logical_independence`].
pub fn check_sigma_logical_independence(
    algebras: &[SigmaAlgebra],
) -> Result<IndependenceVerdict, IndependenceError> {
    check_logical_independence(algebras)
}

/// Subsets of `0..k` with at least `min` elements, ordered by size and
/// then lexicographically on the index list.
fn subfamilies(k: usize, min: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in min..=k {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.clone());
            // Next combination in lexicographic order.
            let mut pos = size;
            while pos > 0 && idx[pos - 1] == k - (size - pos) - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            for j in pos..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// Decides whether the algebras are independent under `measure`.
///
/// The product rule is verified on block choices over every subfamily of
/// size two or more, smallest subfamilies first. That suffices: every
/// member is a disjoint union of blocks, so additivity propagates the
/// block product rule to arbitrary member choices, and subfamilies cover
/// choices that pick the whole space from some algebras.
pub fn check_probabilistic_independence(
    algebras: &[SigmaAlgebra],
    measure: &dyn EventProbability,
) -> Result<IndependenceVerdict, IndependenceError> {
    validate_family(algebras)?;
    if !measure.space().same_space(algebras[0].space()) {
        return Err(IndependenceError::MeasureMismatch);
    }
    let total = measure.total();
    if !total.is_one() {
        return Err(IndependenceError::NotAProbability { total });
    }
    let price = |e: &EventSet| {
        measure
            .event_prob(e)
            .map_err(|_| IndependenceError::MeasureMismatch)
    };
    for subfamily in subfamilies(algebras.len(), 2) {
        let mut odo =
            Odometer::new(subfamily.iter().map(|&i| algebras[i].block_count()).collect());
        while let Some(tuple) = odo.current() {
            let blocks: Vec<(usize, &EventSet)> = subfamily
                .iter()
                .zip(tuple)
                .map(|(&i, &t)| (i, &algebras[i].blocks()[t]))
                .collect();
            let mut meet = blocks[0].1.clone();
            for (_, b) in &blocks[1..] {
                meet = meet.intersection(b);
            }
            let joint = price(&meet)?;
            let mut product = BigRational::one();
            for (_, b) in &blocks {
                product *= price(b)?;
            }
            if joint != product {
                let choice = blocks.into_iter().map(|(i, b)| (i, b.clone())).collect();
                return Ok(IndependenceVerdict::fails(Witness {
                    choice,
                    violation: Violation::ProductRule { joint, product },
                }));
            }
            odo.advance();
        }
    }
    Ok(IndependenceVerdict::holds())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{ratio, AtomMeasure};
    use crate::space::FiniteSpace;

    fn coin() -> (FiniteSpace, SigmaAlgebra, SigmaAlgebra) {
        let s = FiniteSpace::new(["HH", "HT", "TH", "TT"]).unwrap();
        let a = s.event_from_labels(["HH", "HT"]).unwrap();
        let b = s.event_from_labels(["HH", "TH"]).unwrap();
        let fa = SigmaAlgebra::generated_by(&s, &[a]).unwrap();
        let fb = SigmaAlgebra::generated_by(&s, &[b]).unwrap();
        (s, fa, fb)
    }

    #[test]
    fn coin_margins_are_logically_independent() {
        let (_, fa, fb) = coin();
        let v = check_logical_independence(&[fa, fb]).unwrap();
        assert!(v.independent);
        assert!(v.witness.is_none());
    }

    #[test]
    fn an_algebra_is_not_independent_of_itself() {
        let (s, fa, _) = coin();
        let v = check_logical_independence(&[fa.clone(), fa.clone()]).unwrap();
        assert!(!v.independent);
        let w = v.witness.unwrap();
        assert_eq!(w.violation, Violation::EmptyIntersection);
        // First block against the complementary block, in block order.
        let a = s.event_from_labels(["HH", "HT"]).unwrap();
        assert_eq!(w.choice, vec![(0, a.clone()), (1, a.complement())]);
        let meet = w.choice[0].1.intersection(&w.choice[1].1);
        assert!(meet.is_empty());
    }

    #[test]
    fn three_coordinates_of_a_product_space() {
        let labels: Vec<String> = (0..8)
            .map(|i| {
                (0..3)
                    .map(|c| if i >> c & 1 == 0 { 'H' } else { 'T' })
                    .collect()
            })
            .collect();
        let s = FiniteSpace::new(labels).unwrap();
        let coords: Vec<SigmaAlgebra> = (0..3)
            .map(|c| {
                let heads = s
                    .event_from_indices((0..8).filter(|i| i >> c & 1 == 0))
                    .unwrap();
                SigmaAlgebra::generated_by(&s, &[heads]).unwrap()
            })
            .collect();
        assert!(check_logical_independence(&coords).unwrap().independent);
        assert!(check_logical_independence_bruteforce(&coords)
            .unwrap()
            .independent);
        // Dropping to any two coordinates keeps independence.
        for i in 0..3 {
            for j in 0..3 {
                if i < j {
                    let pair = [coords[i].clone(), coords[j].clone()];
                    assert!(check_logical_independence(&pair).unwrap().independent);
                }
            }
        }
    }

    #[test]
    fn family_validation() {
        let (s, fa, _) = coin();
        assert_eq!(
            check_logical_independence(&[fa.clone()]).unwrap_err(),
            IndependenceError::FewerThanTwo
        );
        assert_eq!(
            check_logical_independence(&[fa.clone(), SigmaAlgebra::trivial(&s)]).unwrap_err(),
            IndependenceError::TrivialAlgebra { index: 1 }
        );
        let other = FiniteSpace::new(["x", "y"]).unwrap();
        let g = other.event_from_labels(["x"]).unwrap();
        let fo = SigmaAlgebra::generated_by(&other, &[g]).unwrap();
        assert_eq!(
            check_logical_independence(&[fa, fo]).unwrap_err(),
            IndependenceError::SpaceMismatch
        );
    }

    #[test]
    fn bruteforce_agrees_on_the_coin() {
        let (_, fa, fb) = coin();
        assert!(check_logical_independence_bruteforce(&[fa.clone(), fb])
            .unwrap()
            .independent);
        let v = check_logical_independence_bruteforce(&[fa.clone(), fa]).unwrap();
        assert!(!v.independent);
    }

    #[test]
    fn bruteforce_respects_its_budget() {
        let (_, fa, fb) = coin();
        assert_eq!(
            check_logical_independence_bruteforce_with_budget(&[fa, fb], 3).unwrap_err(),
            IndependenceError::TooLarge { choices: 4, budget: 3 }
        );
    }

    #[test]
    fn sigma_variant_matches_on_finite_families() {
        let (_, fa, fb) = coin();
        assert_eq!(
            check_sigma_logical_independence(&[fa.clone(), fb.clone()]).unwrap(),
            check_logical_independence(&[fa.clone(), fb]).unwrap()
        );
        assert_eq!(
            check_sigma_logical_independence(&[fa.clone(), fa.clone()]).unwrap(),
            check_logical_independence(&[fa.clone(), fa]).unwrap()
        );
    }

    #[test]
    fn subfamily_enumeration_order() {
        assert_eq!(
            subfamilies(3, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2],
            ]
        );
        assert_eq!(subfamilies(2, 2), vec![vec![0, 1]]);
    }

    #[test]
    fn product_measure_is_probabilistically_independent() {
        let (s, fa, fb) = coin();
        // First coin lands heads with probability 1/4, second with 3/4,
        // independently.
        let p = AtomMeasure::probability(
            s,
            vec![ratio(3, 16), ratio(1, 16), ratio(9, 16), ratio(3, 16)],
        )
        .unwrap();
        let v = check_probabilistic_independence(&[fa, fb], &p).unwrap();
        assert!(v.independent);
    }

    #[test]
    fn mixture_breaks_probabilistic_independence() {
        let (s, fa, fb) = coin();
        // Even mixture of the 1/4-3/4 table and its coordinate swap. The
        // margins become fair, but the joint cell keeps mass 3/16.
        let p = AtomMeasure::probability(
            s.clone(),
            vec![ratio(3, 16), ratio(5, 16), ratio(5, 16), ratio(3, 16)],
        )
        .unwrap();
        let v = check_probabilistic_independence(&[fa, fb], &p).unwrap();
        assert!(!v.independent);
        let w = v.witness.unwrap();
        assert_eq!(
            w.violation,
            Violation::ProductRule { joint: ratio(3, 16), product: ratio(1, 4) }
        );
        let a = s.event_from_labels(["HH", "HT"]).unwrap();
        let b = s.event_from_labels(["HH", "TH"]).unwrap();
        assert_eq!(w.choice, vec![(0, a), (1, b)]);
    }

    #[test]
    fn point_mass_makes_duplicates_independent() {
        let (s, fa, _) = coin();
        let p = AtomMeasure::point_mass(s, 0);
        let v = check_probabilistic_independence(&[fa.clone(), fa], &p).unwrap();
        assert!(v.independent);
    }

    #[test]
    fn probabilistic_checker_validates_the_measure() {
        let (s, fa, fb) = coin();
        let not_prob = AtomMeasure::new(s.clone(), vec![ratio(1, 2); 4]).unwrap();
        assert_eq!(
            check_probabilistic_independence(&[fa.clone(), fb.clone()], &not_prob)
                .unwrap_err(),
            IndependenceError::NotAProbability { total: ratio(2, 1) }
        );
        let other = FiniteSpace::new(["x", "y"]).unwrap();
        let q = AtomMeasure::uniform(other);
        assert_eq!(
            check_probabilistic_independence(&[fa, fb], &q).unwrap_err(),
            IndependenceError::MeasureMismatch
        );
    }
}
