use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A set of vertex labels stored as a bit vector.
///
/// Sets over the same label universe always have the same word length, so
/// equality and hashing compare contents directly. For graphs with at most
/// 64 vertices the whole set is one `u64`, which is what keys the exact
/// likelihood memo.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    words: Vec<u64>,
}

#[inline]
pub(crate) fn word_count(universe: usize) -> usize {
    universe.div_ceil(64).max(1)
}

impl VertexSet {
    /// Empty set over labels `0..universe`.
    pub fn empty(universe: usize) -> Self {
        Self {
            words: vec![0; word_count(universe)],
        }
    }

    /// All labels `0..universe`.
    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for v in 0..universe {
            set.insert(v);
        }
        set
    }

    pub(crate) fn from_words(words: Vec<u64>) -> Self {
        Self { words }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The set as a single bitmask, if every label is below 64.
    pub fn as_mask(&self) -> Option<u64> {
        match self.words.as_slice() {
            [w] => Some(*w),
            ws if ws[1..].iter().all(|&w| w == 0) => Some(ws[0]),
            _ => None,
        }
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.words.get(v / 64).is_some_and(|w| w & (1u64 << (v % 64)) != 0)
    }

    /// Inserts `v`. Panics if `v` is outside the universe.
    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.words[v / 64] |= 1u64 << (v % 64);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        if let Some(w) = self.words.get_mut(v / 64) {
            *w &= !(1u64 << (v % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter().chain(core::iter::repeat(&0)))
            .all(|(a, b)| a & !b == 0)
    }

    /// Labels in ascending order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * 64 + bit);
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

/// Iterates the set bits of a word slice.
pub(crate) fn iter_words(words: &[u64]) -> Iter<'_> {
    Iter {
        words,
        index: 0,
        current: words.first().copied().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_remove_iterate() {
        let mut s = VertexSet::empty(130);
        for v in [0, 5, 63, 64, 129] {
            s.insert(v);
        }
        assert_eq!(s.to_vec(), vec![0, 5, 63, 64, 129]);
        assert_eq!(s.len(), 5);
        s.remove(64);
        assert!(!s.contains(64));
        assert!(s.contains(129));
        assert_eq!(s.as_mask(), None);
    }

    #[test]
    fn mask_for_small_universe() {
        let s = VertexSet::full(3);
        assert_eq!(s.as_mask(), Some(0b111));
        assert!(VertexSet::empty(3).is_subset(&s));
        assert!(!s.is_subset(&VertexSet::empty(3)));
    }
}
