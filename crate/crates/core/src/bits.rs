//! Atom sets as bit masks.
//!
//! The default backing is a single `u64`, which caps a space at 64 atoms.
//! The `wide` feature swaps in a word vector and removes the cap; every
//! operation keeps the same observable behaviour.

/// Maximum number of atoms a space may have, if the backing imposes one.
#[cfg(not(feature = "wide"))]
pub const MAX_ATOMS: Option<usize> = Some(64);
#[cfg(feature = "wide")]
pub const MAX_ATOMS: Option<usize> = None;

/// A set of atom indices drawn from `0..m` for some fixed small `m`.
///
/// All sets participating in a binary operation must come from the same
/// space, hence have the same word width; this is upheld by the callers
/// in `space` and not rechecked here beyond debug assertions.
#[cfg(not(feature = "wide"))]
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomBits(u64);

#[cfg(feature = "wide")]
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomBits(Vec<u64>);

#[cfg(not(feature = "wide"))]
impl AtomBits {
    pub fn empty(m: usize) -> Self {
        assert!(m <= 64, "atom count {m} exceeds the 64-atom backing");
        AtomBits(0)
    }

    pub fn full(m: usize) -> Self {
        assert!(m <= 64, "atom count {m} exceeds the 64-atom backing");
        if m == 64 {
            AtomBits(u64::MAX)
        } else {
            AtomBits((1u64 << m) - 1)
        }
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < 64);
        self.0 |= 1 << i;
    }

    pub fn contains(&self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn union(&self, other: &Self) -> Self {
        AtomBits(self.0 | other.0)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        AtomBits(self.0 & other.0)
    }

    pub fn difference(&self, other: &Self) -> Self {
        AtomBits(self.0 & !other.0)
    }

    pub fn complement(&self, m: usize) -> Self {
        Self::full(m).difference(self)
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn count(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Least atom index in the set, used as the canonical block key.
    pub fn min_index(&self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }
}

#[cfg(feature = "wide")]
impl AtomBits {
    fn words_for(m: usize) -> usize {
        m.div_ceil(64).max(1)
    }

    pub fn empty(m: usize) -> Self {
        AtomBits(vec![0; Self::words_for(m)])
    }

    pub fn full(m: usize) -> Self {
        let mut words = vec![u64::MAX; Self::words_for(m)];
        let spare = Self::words_for(m) * 64 - m;
        if spare > 0 {
            let last = words.last_mut().unwrap();
            *last = if m % 64 == 0 { 0 } else { (1u64 << (m % 64)) - 1 };
        }
        if m == 0 {
            words[0] = 0;
        }
        AtomBits(words)
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i / 64 < self.0.len());
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.0.len(), other.0.len());
        AtomBits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        debug_assert_eq!(self.0.len(), other.0.len());
        AtomBits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    pub fn difference(&self, other: &Self) -> Self {
        debug_assert_eq!(self.0.len(), other.0.len());
        AtomBits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    pub fn complement(&self, m: usize) -> Self {
        Self::full(m).difference(self)
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == 0)
    }

    /// Least atom index in the set, used as the canonical block key.
    pub fn min_index(&self) -> Option<usize> {
        self.0
            .iter()
            .position(|w| *w != 0)
            .map(|k| k * 64 + self.0[k].trailing_zeros() as usize)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, w)| {
            let mut rest = *w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let i = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(k * 64 + i)
                }
            })
        })
    }
}

impl std::fmt::Debug for AtomBits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_full() {
        let e = AtomBits::empty(5);
        let f = AtomBits::full(5);
        assert!(e.is_empty());
        assert_eq!(e.count(), 0);
        assert_eq!(f.count(), 5);
        assert!(e.is_subset(&f));
        assert_eq!(f.complement(5), e);
        assert_eq!(e.complement(5), f);
    }

    #[test]
    fn full_at_word_boundary() {
        let f = AtomBits::full(64);
        assert_eq!(f.count(), 64);
        assert!(f.contains(63));
        assert!(!f.contains(64));
        assert!(f.complement(64).is_empty());
    }

    #[test]
    fn set_algebra() {
        let mut a = AtomBits::empty(8);
        a.insert(1);
        a.insert(3);
        let mut b = AtomBits::empty(8);
        b.insert(3);
        b.insert(5);
        assert_eq!(a.union(&b).indices().collect::<Vec<_>>(), vec![1, 3, 5]);
        assert_eq!(a.intersection(&b).indices().collect::<Vec<_>>(), vec![3]);
        assert_eq!(a.difference(&b).indices().collect::<Vec<_>>(), vec![1]);
        assert!(!a.is_disjoint(&b));
        assert!(a.difference(&b).is_disjoint(&b));
        assert_eq!(a.min_index(), Some(1));
        assert_eq!(AtomBits::empty(8).min_index(), None);
    }

    #[test]
    fn subset_and_contains() {
        let mut a = AtomBits::empty(10);
        a.insert(2);
        a.insert(7);
        assert!(a.contains(2));
        assert!(!a.contains(4));
        assert!(a.is_subset(&AtomBits::full(10)));
        let mut b = a.clone();
        b.insert(9);
        assert!(a.is_subset(&b));
        assert!(!b.is_subset(&a));
    }

    #[cfg(feature = "wide")]
    #[test]
    fn wide_spaces_cross_word_boundaries() {
        let m = 130;
        let mut a = AtomBits::empty(m);
        a.insert(0);
        a.insert(64);
        a.insert(129);
        assert_eq!(a.count(), 3);
        assert_eq!(a.indices().collect::<Vec<_>>(), vec![0, 64, 129]);
        let c = a.complement(m);
        assert_eq!(c.count(), m - 3);
        assert!(c.is_disjoint(&a));
        assert_eq!(c.union(&a), AtomBits::full(m));
        assert_eq!(a.min_index(), Some(0));
    }
}
