//! Finite sample spaces, events, and finite sigma-algebras.
//!
//! A sigma-algebra on a finite space is stored by its partition into atoms
//! of the algebra, called blocks here. Every member is a union of blocks,
//! so set operations, membership tests, and joins reduce to block algebra.

use std::collections::HashMap;
use std::sync::Arc;

use crate::bits::{AtomBits, MAX_ATOMS};

/// Default ceiling on the block count when enumerating all members of an
/// algebra; `2^20` sets is the most `members` will agree to produce.
pub const DEFAULT_MEMBER_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("a sample space needs at least one outcome")]
    EmptySpace,
    #[error("duplicate outcome label {0:?}")]
    DuplicateLabel(String),
    #[error("{count} outcomes exceed the supported maximum of {max} (enable the `wide` feature)")]
    TooManyAtoms { count: usize, max: usize },
    #[error("unknown outcome label {0:?}")]
    UnknownLabel(String),
    #[error("outcome index {index} out of range for a space of {count} outcomes")]
    AtomOutOfRange { index: usize, count: usize },
    #[error("operands belong to different sample spaces")]
    SpaceMismatch,
    #[error("expected at least one sigma-algebra")]
    EmptyFamily,
    #[error("algebra with {blocks} blocks has more than 2^{limit} members; raise the limit to enumerate")]
    TooLarge { blocks: usize, limit: usize },
}

struct SpaceInner {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

/// A finite sample space: an ordered list of distinct outcome labels.
///
/// Cloning is cheap and clones compare equal; two independently built
/// spaces compare equal when their label lists agree.
#[derive(Clone)]
pub struct FiniteSpace {
    inner: Arc<SpaceInner>,
}

impl FiniteSpace {
    pub fn new<I, S>(atoms: I) -> Result<Self, SpaceError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(SpaceError::EmptySpace);
        }
        if let Some(max) = MAX_ATOMS {
            if labels.len() > max {
                return Err(SpaceError::TooManyAtoms { count: labels.len(), max });
            }
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(SpaceError::DuplicateLabel(label.clone()));
            }
        }
        Ok(FiniteSpace { inner: Arc::new(SpaceInner { labels, index }) })
    }

    pub fn atom_count(&self) -> usize {
        self.inner.labels.len()
    }

    pub fn atom_label(&self, index: usize) -> &str {
        &self.inner.labels[index]
    }

    pub fn atom_labels(&self) -> impl Iterator<Item = &str> {
        self.inner.labels.iter().map(String::as_str)
    }

    pub fn atom_index(&self, label: &str) -> Option<usize> {
        self.inner.index.get(label).copied()
    }

    /// Identity with a pointer fast path: clones of one space are always
    /// the same space, and structural equality covers rebuilt copies.
    pub fn same_space(&self, other: &FiniteSpace) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.labels == other.inner.labels
    }

    pub fn empty_event(&self) -> EventSet {
        EventSet { space: self.clone(), bits: AtomBits::empty(self.atom_count()) }
    }

    pub fn full_event(&self) -> EventSet {
        EventSet { space: self.clone(), bits: AtomBits::full(self.atom_count()) }
    }

    pub fn event_from_indices<I: IntoIterator<Item = usize>>(
        &self,
        indices: I,
    ) -> Result<EventSet, SpaceError> {
        let mut bits = AtomBits::empty(self.atom_count());
        for i in indices {
            if i >= self.atom_count() {
                return Err(SpaceError::AtomOutOfRange { index: i, count: self.atom_count() });
            }
            bits.insert(i);
        }
        Ok(EventSet { space: self.clone(), bits })
    }

    pub fn event_from_labels<'a, I: IntoIterator<Item = &'a str>>(
        &self,
        labels: I,
    ) -> Result<EventSet, SpaceError> {
        let mut bits = AtomBits::empty(self.atom_count());
        for label in labels {
            let i = self
                .atom_index(label)
                .ok_or_else(|| SpaceError::UnknownLabel(label.to_string()))?;
            bits.insert(i);
        }
        Ok(EventSet { space: self.clone(), bits })
    }
}

impl PartialEq for FiniteSpace {
    fn eq(&self, other: &Self) -> bool {
        self.same_space(other)
    }
}

impl Eq for FiniteSpace {}

impl std::fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("FiniteSpace").field(&self.inner.labels).finish()
    }
}

/// A subset of a finite sample space.
#[derive(Clone)]
pub struct EventSet {
    space: FiniteSpace,
    bits: AtomBits,
}

impl EventSet {
    pub(crate) fn from_bits(space: FiniteSpace, bits: AtomBits) -> Self {
        EventSet { space, bits }
    }

    pub(crate) fn bits(&self) -> &AtomBits {
        &self.bits
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.bits.count() == self.space.atom_count()
    }

    /// Neither empty nor the whole space.
    pub fn is_nontrivial(&self) -> bool {
        !self.is_empty() && !self.is_full()
    }

    pub fn contains_atom(&self, index: usize) -> bool {
        self.bits.contains(index)
    }

    pub fn atom_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.indices()
    }

    pub fn atom_labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.bits.indices().map(|i| self.space.atom_label(i))
    }

    fn assert_same_space(&self, other: &EventSet) {
        assert!(
            self.space.same_space(&other.space),
            "events from different sample spaces"
        );
    }

    pub fn union(&self, other: &EventSet) -> EventSet {
        self.assert_same_space(other);
        EventSet { space: self.space.clone(), bits: self.bits.union(&other.bits) }
    }

    pub fn intersection(&self, other: &EventSet) -> EventSet {
        self.assert_same_space(other);
        EventSet { space: self.space.clone(), bits: self.bits.intersection(&other.bits) }
    }

    pub fn difference(&self, other: &EventSet) -> EventSet {
        self.assert_same_space(other);
        EventSet { space: self.space.clone(), bits: self.bits.difference(&other.bits) }
    }

    pub fn complement(&self) -> EventSet {
        EventSet {
            space: self.space.clone(),
            bits: self.bits.complement(self.space.atom_count()),
        }
    }

    pub fn is_subset(&self, other: &EventSet) -> bool {
        self.assert_same_space(other);
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &EventSet) -> bool {
        self.assert_same_space(other);
        self.bits.is_disjoint(&other.bits)
    }
}

impl PartialEq for EventSet {
    fn eq(&self, other: &Self) -> bool {
        self.space.same_space(&other.space) && self.bits == other.bits
    }
}

impl Eq for EventSet {}

impl std::hash::Hash for EventSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        // Events only meet in one space per container, so the space does
        // not feed the hash; equality still checks it.
        self.bits.hash(state);
    }
}

impl std::fmt::Debug for EventSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.atom_labels()).finish()
    }
}

impl std::fmt::Display for EventSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, label) in self.atom_labels().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{label}")?;
        }
        write!(f, "}}")
    }
}

/// A sigma-algebra on a finite space, held as its partition into blocks.
///
/// Blocks are ordered by least atom index, which makes the representation
/// canonical: two algebras are equal exactly when their block lists agree.
#[derive(Clone, PartialEq, Eq)]
pub struct SigmaAlgebra {
    space: FiniteSpace,
    blocks: Vec<EventSet>,
    atom_block: Vec<usize>,
}

impl SigmaAlgebra {
    /// The trivial algebra `{∅, Ω}`.
    pub fn trivial(space: &FiniteSpace) -> SigmaAlgebra {
        SigmaAlgebra {
            space: space.clone(),
            blocks: vec![space.full_event()],
            atom_block: vec![0; space.atom_count()],
        }
    }

    /// Smallest sigma-algebra containing every generator.
    ///
    /// Atoms are grouped by their membership pattern across the
    /// generators; each group is one block. No generators yield the
    /// trivial algebra.
    pub fn generated_by(
        space: &FiniteSpace,
        generators: &[EventSet],
    ) -> Result<SigmaAlgebra, SpaceError> {
        for g in generators {
            if !g.space().same_space(space) {
                return Err(SpaceError::SpaceMismatch);
            }
        }
        let signature =
            |atom: usize| -> Vec<bool> { generators.iter().map(|g| g.contains_atom(atom)).collect() };
        Ok(Self::from_signatures(space, signature))
    }

    /// Smallest common refinement of the given algebras.
    pub fn join(algebras: &[SigmaAlgebra]) -> Result<SigmaAlgebra, SpaceError> {
        let first = algebras.first().ok_or(SpaceError::EmptyFamily)?;
        for a in algebras {
            if !a.space.same_space(&first.space) {
                return Err(SpaceError::SpaceMismatch);
            }
        }
        let signature = |atom: usize| -> Vec<usize> {
            algebras.iter().map(|a| a.atom_block[atom]).collect()
        };
        Ok(Self::from_signatures(&first.space, signature))
    }

    fn from_signatures<S: Eq + std::hash::Hash>(
        space: &FiniteSpace,
        signature: impl Fn(usize) -> S,
    ) -> SigmaAlgebra {
        let m = space.atom_count();
        let mut groups: HashMap<S, AtomBits> = HashMap::new();
        for atom in 0..m {
            groups
                .entry(signature(atom))
                .or_insert_with(|| AtomBits::empty(m))
                .insert(atom);
        }
        let mut blocks: Vec<AtomBits> = groups.into_values().collect();
        blocks.sort_by_key(|b| b.min_index().expect("group blocks are nonempty"));
        let mut atom_block = vec![0; m];
        for (k, b) in blocks.iter().enumerate() {
            for atom in b.indices() {
                atom_block[atom] = k;
            }
        }
        SigmaAlgebra {
            space: space.clone(),
            blocks: blocks
                .into_iter()
                .map(|bits| EventSet::from_bits(space.clone(), bits))
                .collect(),
            atom_block,
        }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn blocks(&self) -> &[EventSet] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// At least two blocks, i.e. the algebra has a member other than
    /// `∅` and `Ω`.
    pub fn is_nontrivial(&self) -> bool {
        self.blocks.len() >= 2
    }

    pub fn block_of_atom(&self, atom: usize) -> usize {
        self.atom_block[atom]
    }

    /// Membership test: a set belongs to the algebra exactly when it is
    /// saturated, i.e. it never cuts a block in two.
    pub fn contains(&self, event: &EventSet) -> bool {
        if !event.space().same_space(&self.space) {
            return false;
        }
        self.blocks.iter().all(|b| {
            b.bits().is_disjoint(event.bits()) || b.bits().is_subset(event.bits())
        })
    }

    /// Coarser-or-equal: every member of `self` is a member of `other`,
    /// which for partitions reduces to every block of `self` being a
    /// union of blocks of `other`.
    pub fn is_coarsening_of(&self, other: &SigmaAlgebra) -> bool {
        other.space.same_space(&self.space)
            && self.blocks.iter().all(|b| other.contains(b))
    }

    /// All members, in block-subset order; see [`members_with_limit`].
    ///
    /// [`members_with_limit`]: Self::members_with_limit
    pub fn members(&self) -> Result<MemberIter<'_>, SpaceError> {
        self.members_with_limit(DEFAULT_MEMBER_LIMIT)
    }

    /// All `2^blocks` members, smallest block subsets first. Refuses block
    /// counts above `limit` rather than attempt an enormous enumeration.
    pub fn members_with_limit(&self, limit: usize) -> Result<MemberIter<'_>, SpaceError> {
        // 63 keeps the subset mask inside a u64 no matter the caller.
        let limit = limit.min(63);
        if self.blocks.len() > limit {
            return Err(SpaceError::TooLarge { blocks: self.blocks.len(), limit });
        }
        Ok(MemberIter { algebra: self, next: 0, total: 1u64 << self.blocks.len() })
    }
}

impl std::fmt::Debug for SigmaAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("SigmaAlgebra").field(&self.blocks).finish()
    }
}

/// Iterator over every member of a finite sigma-algebra.
#[derive(Debug)]
pub struct MemberIter<'a> {
    algebra: &'a SigmaAlgebra,
    next: u64,
    total: u64,
}

impl Iterator for MemberIter<'_> {
    type Item = EventSet;

    fn next(&mut self) -> Option<EventSet> {
        if self.next == self.total {
            return None;
        }
        let mask = self.next;
        self.next += 1;
        let m = self.algebra.space.atom_count();
        let mut bits = AtomBits::empty(m);
        for (k, block) in self.algebra.blocks.iter().enumerate() {
            if mask >> k & 1 == 1 {
                bits = bits.union(block.bits());
            }
        }
        Some(EventSet::from_bits(self.algebra.space.clone(), bits))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for MemberIter<'_> {}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin_space() -> FiniteSpace {
        FiniteSpace::new(["HH", "HT", "TH", "TT"]).unwrap()
    }

    #[test]
    fn space_construction() {
        let s = coin_space();
        assert_eq!(s.atom_count(), 4);
        assert_eq!(s.atom_index("TH"), Some(2));
        assert_eq!(s.atom_label(3), "TT");
        assert!(FiniteSpace::new(["x"]).is_ok());
        assert_eq!(
            FiniteSpace::new(Vec::<String>::new()),
            Err(SpaceError::EmptySpace)
        );
        assert_eq!(
            FiniteSpace::new(["a", "b", "a"]),
            Err(SpaceError::DuplicateLabel("a".into()))
        );
    }

    #[cfg(not(feature = "wide"))]
    #[test]
    fn narrow_backing_caps_at_64() {
        let labels: Vec<String> = (0..65).map(|i| format!("w{i}")).collect();
        assert_eq!(
            FiniteSpace::new(labels),
            Err(SpaceError::TooManyAtoms { count: 65, max: 64 })
        );
    }

    #[cfg(feature = "wide")]
    #[test]
    fn wide_backing_goes_past_64() {
        let labels: Vec<String> = (0..80).map(|i| format!("w{i}")).collect();
        let s = FiniteSpace::new(labels).unwrap();
        assert_eq!(s.atom_count(), 80);
        let e = s.event_from_indices([0, 70]).unwrap();
        assert!(e.complement().len() == 78);
    }

    #[test]
    fn rebuilt_space_is_same_space() {
        let a = coin_space();
        let b = coin_space();
        assert!(a.same_space(&b));
        let c = FiniteSpace::new(["HH", "HT", "TH"]).unwrap();
        assert!(!a.same_space(&c));
    }

    #[test]
    fn event_algebra() {
        let s = coin_space();
        let heads_first = s.event_from_labels(["HH", "HT"]).unwrap();
        let heads_second = s.event_from_labels(["HH", "TH"]).unwrap();
        assert_eq!(
            heads_first.intersection(&heads_second),
            s.event_from_labels(["HH"]).unwrap()
        );
        assert_eq!(
            heads_first.union(&heads_second).complement(),
            s.event_from_labels(["TT"]).unwrap()
        );
        assert!(heads_first.is_nontrivial());
        assert!(!s.full_event().is_nontrivial());
        assert!(!s.empty_event().is_nontrivial());
        assert_eq!(
            s.event_from_labels(["HX"]),
            Err(SpaceError::UnknownLabel("HX".into()))
        );
    }

    #[test]
    #[should_panic(expected = "different sample spaces")]
    fn event_ops_panic_across_spaces() {
        let a = coin_space().full_event();
        let b = FiniteSpace::new(["x", "y"]).unwrap().full_event();
        let _ = a.union(&b);
    }

    #[test]
    fn generated_by_one_event() {
        let s = coin_space();
        let a = s.event_from_labels(["HH", "HT"]).unwrap();
        let alg = SigmaAlgebra::generated_by(&s, &[a.clone()]).unwrap();
        assert_eq!(alg.blocks(), &[a.clone(), a.complement()]);
        assert!(alg.is_nontrivial());
    }

    #[test]
    fn generated_by_nothing_is_trivial() {
        let s = coin_space();
        let alg = SigmaAlgebra::generated_by(&s, &[]).unwrap();
        assert_eq!(alg, SigmaAlgebra::trivial(&s));
        assert!(!alg.is_nontrivial());
        assert_eq!(alg.block_count(), 1);
    }

    #[test]
    fn generated_by_two_events_splits_to_singletons() {
        let s = coin_space();
        let a = s.event_from_labels(["HH", "HT"]).unwrap();
        let b = s.event_from_labels(["HH", "TH"]).unwrap();
        let alg = SigmaAlgebra::generated_by(&s, &[a, b]).unwrap();
        assert_eq!(alg.block_count(), 4);
        for (i, block) in alg.blocks().iter().enumerate() {
            assert_eq!(block.atom_indices().collect::<Vec<_>>(), vec![i]);
        }
    }

    #[test]
    fn generators_must_share_the_space() {
        let s = coin_space();
        let other = FiniteSpace::new(["x", "y"]).unwrap();
        let g = other.event_from_labels(["x"]).unwrap();
        assert_eq!(
            SigmaAlgebra::generated_by(&s, &[g]).unwrap_err(),
            SpaceError::SpaceMismatch
        );
    }

    #[test]
    fn join_of_coin_margins() {
        let s = coin_space();
        let a = s.event_from_labels(["HH", "HT"]).unwrap();
        let b = s.event_from_labels(["HH", "TH"]).unwrap();
        let fa = SigmaAlgebra::generated_by(&s, &[a]).unwrap();
        let fb = SigmaAlgebra::generated_by(&s, &[b]).unwrap();
        let joined = SigmaAlgebra::join(&[fa.clone(), fb.clone()]).unwrap();
        assert_eq!(joined.block_count(), 4);
        assert_eq!(SigmaAlgebra::join(&[fa.clone()]).unwrap(), fa);
        let with_trivial =
            SigmaAlgebra::join(&[fa.clone(), SigmaAlgebra::trivial(&s)]).unwrap();
        assert_eq!(with_trivial, fa);
        assert_eq!(SigmaAlgebra::join(&[]).unwrap_err(), SpaceError::EmptyFamily);
    }

    #[test]
    fn join_refines_every_input() {
        let s = FiniteSpace::new(["a", "b", "c", "d", "e", "f"]).unwrap();
        let g1 = s.event_from_labels(["a", "b", "c"]).unwrap();
        let g2 = s.event_from_labels(["b", "c", "d"]).unwrap();
        let f1 = SigmaAlgebra::generated_by(&s, &[g1]).unwrap();
        let f2 = SigmaAlgebra::generated_by(&s, &[g2]).unwrap();
        let j = SigmaAlgebra::join(&[f1.clone(), f2.clone()]).unwrap();
        assert!(f1.is_coarsening_of(&j));
        assert!(f2.is_coarsening_of(&j));
        for block in j.blocks() {
            assert!(!block.is_empty());
        }
    }

    #[test]
    fn membership_is_block_saturation() {
        let s = coin_space();
        let a = s.event_from_labels(["HH", "HT"]).unwrap();
        let alg = SigmaAlgebra::generated_by(&s, &[a.clone()]).unwrap();
        assert!(alg.contains(&a));
        assert!(alg.contains(&a.complement()));
        assert!(alg.contains(&s.empty_event()));
        assert!(alg.contains(&s.full_event()));
        assert!(!alg.contains(&s.event_from_labels(["HH"]).unwrap()));
        assert!(!alg.contains(&s.event_from_labels(["HH", "TH"]).unwrap()));
    }

    #[test]
    fn members_of_trivial_algebra() {
        let s = coin_space();
        let members: Vec<EventSet> =
            SigmaAlgebra::trivial(&s).members().unwrap().collect();
        assert_eq!(members, vec![s.empty_event(), s.full_event()]);
    }

    #[test]
    fn members_enumerates_the_powerset_of_blocks() {
        let s = FiniteSpace::new(["a", "b", "c", "d", "e", "f"]).unwrap();
        let g1 = s.event_from_labels(["a", "b"]).unwrap();
        let g2 = s.event_from_labels(["c"]).unwrap();
        let alg = SigmaAlgebra::generated_by(&s, &[g1, g2]).unwrap();
        assert_eq!(alg.block_count(), 3);
        let members: Vec<EventSet> = alg.members().unwrap().collect();
        assert_eq!(members.len(), 8);
        for m in &members {
            assert!(alg.contains(m));
        }
        // Every pairwise union stays inside the enumeration.
        for x in &members {
            for y in &members {
                assert!(members.contains(&x.union(y)));
            }
        }
    }

    #[test]
    fn members_refuses_oversized_enumerations() {
        let labels: Vec<String> = (0..25).map(|i| format!("w{i}")).collect();
        let s = FiniteSpace::new(labels).unwrap();
        let singletons: Vec<EventSet> = (0..25)
            .map(|i| s.event_from_indices([i]).unwrap())
            .collect();
        let alg = SigmaAlgebra::generated_by(&s, &singletons).unwrap();
        assert_eq!(
            alg.members().unwrap_err(),
            SpaceError::TooLarge { blocks: 25, limit: 20 }
        );
        assert!(alg.members_with_limit(25).is_ok());
    }
}
