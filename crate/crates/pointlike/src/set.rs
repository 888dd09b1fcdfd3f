//! Bit sets over monoid elements.

use std::fmt;

/// A subset of `{0, .., capacity-1}` stored as packed words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElemSet {
    words: Vec<u64>,
}

impl ElemSet {
    pub fn empty(capacity: usize) -> Self {
        ElemSet { words: vec![0; capacity.div_ceil(64).max(1)] }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = Self::empty(capacity);
        for i in 0..capacity {
            s.insert(i);
        }
        s
    }

    pub fn singleton(capacity: usize, x: usize) -> Self {
        let mut s = Self::empty(capacity);
        s.insert(x);
        s
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(capacity: usize, it: I) -> Self {
        let mut s = Self::empty(capacity);
        for x in it {
            s.insert(x);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, x: usize) -> bool {
        let (w, b) = (x / 64, x % 64);
        let old = self.words[w];
        self.words[w] |= 1 << b;
        old != self.words[w]
    }

    #[inline]
    pub fn remove(&mut self, x: usize) {
        self.words[x / 64] &= !(1u64 << (x % 64));
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.words.get(x / 64).is_some_and(|w| w >> (x % 64) & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &ElemSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &ElemSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &ElemSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union(&self, other: &ElemSet) -> ElemSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &ElemSet) -> ElemSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A family of sets kept as a ⊆-antichain of maximal members.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Antichain {
    sets: Vec<ElemSet>,
}

impl Antichain {
    pub fn new() -> Self {
        Antichain { sets: Vec::new() }
    }

    /// Inserts `s` unless some member already contains it. Members contained
    /// in `s` are dropped. Returns whether `s` was added.
    pub fn insert(&mut self, s: ElemSet) -> bool {
        if self.dominates(&s) {
            return false;
        }
        self.sets.retain(|t| !t.is_subset(&s));
        self.sets.push(s);
        true
    }

    pub fn dominates(&self, s: &ElemSet) -> bool {
        self.sets.iter().any(|t| s.is_subset(t))
    }

    pub fn contains_exact(&self, s: &ElemSet) -> bool {
        self.sets.iter().any(|t| t == s)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ElemSet> {
        self.sets.iter()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Sorted copy of the members, by element lists.
    pub fn sorted(&self) -> Vec<ElemSet> {
        let mut v = self.sets.clone();
        v.sort_by_key(|a| a.to_vec());
        v
    }

    pub fn into_sorted(self) -> Vec<ElemSet> {
        let mut v = self.sets;
        v.sort_by_key(|a| a.to_vec());
        v
    }
}
