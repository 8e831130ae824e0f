//! Deterministic generators for randomized tests: spaces, partitions,
//! families with and without guaranteed independence, measures, and
//! cylinder decompositions. Everything is driven by a tiny seeded
//! generator so failures replay exactly.

use num_rational::BigRational;

use crate::extension::{CylinderEvent, FactorMeasure, IndependentFamily};
use crate::measure::AtomMeasure;
use crate::signed::SignedMeasure;
use crate::space::{EventSet, FiniteSpace, SigmaAlgebra};

/// Sequential splitmix generator. Not for production randomness; its
/// job is cheap, reproducible test inputs.
#[derive(Debug, Clone)]
pub struct DetRng {
    state: u64,
}

impl DetRng {
    pub fn new(seed: u64) -> Self {
        DetRng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw in `0..n`. Requires `n > 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) is meaningless");
        self.next_u64() % n
    }

    /// True with probability roughly `num/den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }

    /// A permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, self.below(i as u64 + 1) as usize);
        }
        perm
    }
}

/// A fresh space with `count` atoms labeled `w0..`.
pub fn space_with(count: usize) -> FiniteSpace {
    FiniteSpace::new((0..count).map(|i| format!("w{i}"))).expect("valid test space")
}

/// A random partition algebra with between 2 and `max_blocks` blocks
/// (clamped to the atom count). Requires at least 2 atoms.
pub fn random_partition(rng: &mut DetRng, space: &FiniteSpace, max_blocks: usize) -> SigmaAlgebra {
    let m = space.atom_count();
    assert!(m >= 2, "cannot build a nontrivial partition of one atom");
    let bmax = max_blocks.clamp(2, m);
    let b = 2 + rng.below(bmax as u64 - 1) as usize;
    let perm = rng.permutation(m);
    let mut assignment = vec![0usize; m];
    for (slot, &atom) in perm.iter().enumerate() {
        // The first b atoms in permuted order pin every block nonempty.
        assignment[atom] = if slot < b { slot } else { rng.below(b as u64) as usize };
    }
    let blocks: Vec<EventSet> = (0..b)
        .map(|j| {
            space
                .event_from_indices(
                    assignment
                        .iter()
                        .enumerate()
                        .filter(|&(_, &a)| a == j)
                        .map(|(i, _)| i),
                )
                .expect("indices in range")
        })
        .collect();
    SigmaAlgebra::generated_by(space, &blocks).expect("same space")
}

/// A random instance for cross-checking independence routines: a space
/// of 2..=16 atoms and 2..=4 partition algebras of 2..=4 blocks each.
/// Roughly a third of the instances are built on a product grid so the
/// generator emits a healthy share of independent families, not just
/// failures.
pub fn random_family(rng: &mut DetRng) -> (FiniteSpace, Vec<SigmaAlgebra>) {
    if rng.chance(1, 3) {
        let shapes: &[&[usize]] = &[&[2, 2], &[2, 3], &[3, 2], &[2, 4], &[4, 2], &[3, 4], &[2, 2, 2], &[2, 2, 4], &[2, 2, 2, 2]];
        let sizes = *rng.pick(shapes);
        let space = product_space(sizes);
        let mut algebras: Vec<SigmaAlgebra> = (0..sizes.len())
            .map(|t| coordinate_partition(&space, sizes, t))
            .collect();
        // Sometimes adjoin an unrelated partition, which may or may not
        // destroy independence.
        if rng.chance(1, 2) && algebras.len() < 4 {
            algebras.push(random_partition(rng, &space, 4));
        }
        (space, algebras)
    } else {
        let m = 2 + rng.below(15) as usize;
        let space = space_with(m);
        let count = 2 + rng.below(3) as usize;
        let algebras = (0..count)
            .map(|_| random_partition(rng, &space, 4.min(m)))
            .collect();
        (space, algebras)
    }
}

/// The grid space whose atoms are the tuples of a mixed-radix counter
/// over `sizes`, labeled by their digit strings.
pub fn product_space(sizes: &[usize]) -> FiniteSpace {
    assert!(!sizes.is_empty());
    let total: usize = sizes.iter().product();
    let labels = (0..total).map(|mut idx| {
        let mut digits = vec![0usize; sizes.len()];
        for (t, &s) in sizes.iter().enumerate().rev() {
            digits[t] = idx % s;
            idx /= s;
        }
        digits
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(".")
    });
    FiniteSpace::new(labels).expect("valid grid space")
}

/// The partition of a grid space by the value of coordinate `coord`.
pub fn coordinate_partition(space: &FiniteSpace, sizes: &[usize], coord: usize) -> SigmaAlgebra {
    let total: usize = sizes.iter().product();
    assert_eq!(space.atom_count(), total);
    let suffix: usize = sizes[coord + 1..].iter().product();
    let blocks: Vec<EventSet> = (0..sizes[coord])
        .map(|v| {
            space
                .event_from_indices((0..total).filter(|i| (i / suffix) % sizes[coord] == v))
                .expect("indices in range")
        })
        .collect();
    SigmaAlgebra::generated_by(space, &blocks).expect("same space")
}

/// A family that is logically independent by construction: coordinate
/// partitions of a random grid space, each possibly coarsened by
/// merging digit values. Coarsening a coordinate partition keeps every
/// block a union of fibers, so all block-tuple meets stay nonempty.
pub fn random_independent_family(rng: &mut DetRng) -> (FiniteSpace, Vec<SigmaAlgebra>) {
    let shapes: &[&[usize]] = &[
        &[2, 2],
        &[2, 3],
        &[3, 3],
        &[2, 4],
        &[4, 4],
        &[2, 2, 2],
        &[2, 2, 3],
        &[2, 2, 4],
        &[3, 2, 2],
        &[2, 2, 2, 2],
    ];
    let sizes = *rng.pick(shapes);
    let space = product_space(sizes);
    let algebras = (0..sizes.len())
        .map(|t| {
            let full = coordinate_partition(&space, sizes, t);
            if sizes[t] >= 3 && rng.chance(1, 3) {
                coarsen(rng, &space, &full)
            } else {
                full
            }
        })
        .collect();
    (space, algebras)
}

/// Merges the blocks of a partition into fewer (but at least 2) groups.
fn coarsen(rng: &mut DetRng, space: &FiniteSpace, algebra: &SigmaAlgebra) -> SigmaAlgebra {
    let b = algebra.block_count();
    let groups = 2 + rng.below(b as u64 - 1) as usize;
    let perm = rng.permutation(b);
    let mut group_of = vec![0usize; b];
    for (slot, &block) in perm.iter().enumerate() {
        group_of[block] = if slot < groups { slot } else { rng.below(groups as u64) as usize };
    }
    let merged: Vec<EventSet> = (0..groups)
        .map(|g| {
            algebra
                .blocks()
                .iter()
                .enumerate()
                .filter(|&(j, _)| group_of[j] == g)
                .map(|(_, e)| e.clone())
                .reduce(|a, b| a.union(&b))
                .expect("every group is pinned nonempty")
        })
        .collect();
    SigmaAlgebra::generated_by(space, &merged).expect("same space")
}

/// Random small rationals `k/denom` with `k` in `0..=max_num`, summing
/// to 1 after normalization.
fn random_simplex(rng: &mut DetRng, len: usize, strictly_positive: bool) -> Vec<BigRational> {
    let mut numerators: Vec<i64> = (0..len)
        .map(|_| {
            if strictly_positive {
                1 + rng.below(8) as i64
            } else {
                rng.below(9) as i64
            }
        })
        .collect();
    if numerators.iter().all(|&x| x == 0) {
        numerators[rng.below(len as u64) as usize] = 1;
    }
    let total: i64 = numerators.iter().sum();
    numerators
        .into_iter()
        .map(|x| BigRational::new(x.into(), total.into()))
        .collect()
}

/// A random probability table on an algebra's blocks. With
/// `strictly_positive` every block carries mass.
pub fn random_factor_measure(
    rng: &mut DetRng,
    algebra: &SigmaAlgebra,
    strictly_positive: bool,
) -> FactorMeasure {
    let probs = random_simplex(rng, algebra.block_count(), strictly_positive);
    FactorMeasure::new(algebra.clone(), probs).expect("simplex weights are valid")
}

/// A random probability measure on the atoms of a space.
pub fn random_probability(
    rng: &mut DetRng,
    space: &FiniteSpace,
    strictly_positive: bool,
) -> AtomMeasure {
    let weights = random_simplex(rng, space.atom_count(), strictly_positive);
    AtomMeasure::probability(space.clone(), weights).expect("simplex weights are valid")
}

/// A random signed measure with small rational weights of either sign.
pub fn random_signed(rng: &mut DetRng, space: &FiniteSpace) -> SignedMeasure {
    let weights = (0..space.atom_count())
        .map(|_| {
            let num = rng.below(17) as i64 - 8;
            let den = 1 + rng.below(6) as i64;
            BigRational::new(num.into(), den.into())
        })
        .collect();
    SignedMeasure::new(space.clone(), weights).expect("weight count matches")
}

/// A random cylinder over the family: each factor independently
/// contributes a member (a union of a nonempty set of its blocks) with
/// probability 1/2. Occasionally the empty cylinder.
pub fn random_cylinder(rng: &mut DetRng, family: &IndependentFamily) -> CylinderEvent {
    if rng.chance(1, 12) {
        return CylinderEvent::Empty;
    }
    let mut entries = Vec::new();
    for (h, algebra) in family.algebras().iter().enumerate() {
        if rng.chance(1, 2) {
            entries.push((h, random_member(rng, algebra)));
        }
    }
    CylinderEvent::of(entries)
}

/// A random member of a partition algebra: the union of a uniformly
/// chosen nonempty subset of blocks (possibly all of them).
pub fn random_member(rng: &mut DetRng, algebra: &SigmaAlgebra) -> EventSet {
    let b = algebra.block_count();
    assert!(b < 64, "too many blocks for a mask draw");
    let mask = 1 + rng.below((1u64 << b) - 1);
    algebra
        .blocks()
        .iter()
        .enumerate()
        .filter(|&(j, _)| mask >> j & 1 == 1)
        .map(|(_, e)| e.clone())
        .reduce(|a, b| a.union(&b))
        .expect("mask is nonempty")
}

/// Pairwise disjoint cylinders whose union is itself a cylinder, built
/// by repeatedly splitting a part along one factor. Splitting replaces
/// a part's entry (a union of blocks) by two disjoint nonempty halves,
/// which preserves both disjointness and the overall union. Up to
/// `splits` splits are attempted; fewer happen if no part has an entry
/// with two or more blocks left to divide.
pub fn random_disjoint_cylinder_parts(
    rng: &mut DetRng,
    family: &IndependentFamily,
    splits: usize,
) -> Vec<CylinderEvent> {
    let start = loop {
        let c = random_cylinder(rng, family);
        if !c.is_empty_set() {
            break c;
        }
    };
    let mut parts = vec![start];
    'split: for _ in 0..splits {
        let order = rng.permutation(parts.len());
        for &p in &order {
            let entries = parts[p].entries().expect("parts are never the empty cylinder");
            let factor_order = rng.permutation(family.len());
            for h in factor_order {
                let algebra = &family.algebras()[h];
                let block_ids: Vec<usize> = match entries.get(&h) {
                    Some(e) => algebra
                        .blocks()
                        .iter()
                        .enumerate()
                        .filter(|&(_, b)| b.is_subset(e))
                        .map(|(j, _)| j)
                        .collect(),
                    None => (0..algebra.block_count()).collect(),
                };
                if block_ids.len() < 2 {
                    continue;
                }
                let cut = 1 + rng.below(block_ids.len() as u64 - 1) as usize;
                let perm = rng.permutation(block_ids.len());
                let half_event = |ids: &[usize]| {
                    ids.iter()
                        .map(|&j| algebra.blocks()[j].clone())
                        .reduce(|a, b| a.union(&b))
                        .expect("halves are nonempty")
                };
                let left: Vec<usize> = perm[..cut].iter().map(|&i| block_ids[i]).collect();
                let right: Vec<usize> = perm[cut..].iter().map(|&i| block_ids[i]).collect();
                let mut base: Vec<(usize, EventSet)> =
                    entries.iter().map(|(&k, v)| (k, v.clone())).collect();
                base.retain(|&(k, _)| k != h);
                let mut with_left = base.clone();
                with_left.push((h, half_event(&left)));
                let mut with_right = base;
                with_right.push((h, half_event(&right)));
                parts.swap_remove(p);
                parts.push(CylinderEvent::of(with_left));
                parts.push(CylinderEvent::of(with_right));
                continue 'split;
            }
        }
        break;
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::independence::check_logical_independence;
    use num_traits::Zero;

    #[test]
    fn rng_is_reproducible() {
        let mut a = DetRng::new(5);
        let mut b = DetRng::new(5);
        let xs: Vec<u64> = (0..50).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..50).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        let mut c = DetRng::new(6);
        assert_ne!(xs[0], c.next_u64());
    }

    #[test]
    fn permutations_are_permutations() {
        let mut rng = DetRng::new(1);
        for n in 1..20 {
            let mut p = rng.permutation(n);
            p.sort_unstable();
            assert_eq!(p, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn random_partitions_are_nontrivial_and_cover() {
        let mut rng = DetRng::new(2);
        for _ in 0..100 {
            let m = 2 + rng.below(15) as usize;
            let space = space_with(m);
            let a = random_partition(&mut rng, &space, 4);
            assert!(a.block_count() >= 2 && a.block_count() <= 4.min(m));
            let union = a
                .blocks()
                .iter()
                .cloned()
                .reduce(|x, y| x.union(&y))
                .unwrap();
            assert!(union.is_full());
            for (i, x) in a.blocks().iter().enumerate() {
                assert!(!x.is_empty());
                for y in &a.blocks()[i + 1..] {
                    assert!(x.is_disjoint(y));
                }
            }
        }
    }

    #[test]
    fn coordinate_partitions_are_independent() {
        let mut rng = DetRng::new(3);
        for _ in 0..50 {
            let (_, algebras) = random_independent_family(&mut rng);
            let verdict = check_logical_independence(&algebras).unwrap();
            assert!(verdict.independent, "witness: {:?}", verdict.witness);
        }
    }

    #[test]
    fn random_families_cover_both_verdicts() {
        let mut rng = DetRng::new(4);
        let mut seen_true = 0;
        let mut seen_false = 0;
        for _ in 0..120 {
            let (_, algebras) = random_family(&mut rng);
            match check_logical_independence(&algebras) {
                Ok(v) if v.independent => seen_true += 1,
                Ok(_) => seen_false += 1,
                Err(e) => panic!("generator produced an invalid family: {e}"),
            }
        }
        assert!(seen_true >= 10, "only {seen_true} independent instances");
        assert!(seen_false >= 10, "only {seen_false} dependent instances");
    }

    #[test]
    fn simplex_weights_sum_to_one() {
        let mut rng = DetRng::new(7);
        let space = space_with(6);
        for _ in 0..50 {
            let p = random_probability(&mut rng, &space, false);
            assert!(p.is_probability());
            let q = random_probability(&mut rng, &space, true);
            assert!(q.weights().iter().all(|w| w > &BigRational::zero()));
        }
    }

    #[test]
    fn disjoint_parts_have_cylinder_union() {
        let mut rng = DetRng::new(8);
        for _ in 0..60 {
            let (_, algebras) = random_independent_family(&mut rng);
            let family = IndependentFamily::new(algebras).unwrap();
            let parts = random_disjoint_cylinder_parts(&mut rng, &family, 3);
            assert!(!parts.is_empty());
            let realized: Vec<_> = parts
                .iter()
                .map(|p| family.realize(p).unwrap())
                .collect();
            for (i, x) in realized.iter().enumerate() {
                assert!(!x.is_empty(), "split produced an empty part");
                for y in &realized[i + 1..] {
                    assert!(x.is_disjoint(y));
                }
            }
            let report = family.verify_union_representation(&parts).unwrap();
            assert!(report.is_cylinder, "union of split parts must stay a cylinder");
        }
    }
}
