//! Finite multisets with union, limited difference and scalar product.

use std::collections::BTreeMap;
use std::fmt;

/// A finite multiset: a map from elements to nonzero multiplicities.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset<T: Ord> {
    counts: BTreeMap<T, u32>,
}

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset {
            counts: BTreeMap::new(),
        }
    }
}

impl<T: Ord + Clone> Multiset<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(x: T) -> Self {
        let mut m = Self::new();
        m.insert(x, 1);
        m
    }

    pub fn insert(&mut self, x: T, n: u32) {
        if n > 0 {
            *self.counts.entry(x).or_insert(0) += n;
        }
    }

    /// Removes up to `n` copies of `x`.
    pub fn remove(&mut self, x: &T, n: u32) {
        if let Some(c) = self.counts.get_mut(x) {
            if *c > n {
                *c -= n;
            } else {
                self.counts.remove(x);
            }
        }
    }

    pub fn count(&self, x: &T) -> u32 {
        self.counts.get(x).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total number of elements, counting multiplicity.
    pub fn size(&self) -> u32 {
        self.counts.values().sum()
    }

    /// The support `dom(m)`.
    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.counts.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, u32)> {
        self.counts.iter().map(|(k, v)| (k, *v))
    }

    /// Iterates elements with repetition.
    pub fn elements(&self) -> impl Iterator<Item = &T> {
        self.counts
            .iter()
            .flat_map(|(k, v)| std::iter::repeat(k).take(*v as usize))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (k, v) in other.iter() {
            m.insert(k.clone(), v);
        }
        m
    }

    /// Limited difference: multiplicities never drop below zero.
    pub fn difference(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (k, v) in other.iter() {
            m.remove(k, v);
        }
        m
    }

    pub fn scale(&self, j: u32) -> Self {
        let mut m = Self::new();
        if j > 0 {
            for (k, v) in self.iter() {
                m.insert(k.clone(), v * j);
            }
        }
        m
    }

    /// `self ⊆ other`, i.e. pointwise `self(s) <= other(s)`.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|(k, v)| other.count(k) >= v)
    }

    pub fn map<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> U) -> Multiset<U> {
        let mut m = Multiset::new();
        for (k, v) in self.iter() {
            m.insert(f(k), v);
        }
        m
    }
}

impl<T: Ord + Clone> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for x in iter {
            m.insert(x, 1);
        }
        m
    }
}

impl<T: Ord + Clone> FromIterator<(T, u32)> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = (T, u32)>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for (x, n) in iter {
            m.insert(x, n);
        }
        m
    }
}

impl<T: Ord + fmt::Debug> fmt::Debug for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.counts.iter()).finish()
    }
}

impl<T: Ord + fmt::Display> fmt::Display for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *v > 1 {
                write!(f, "{v} ")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}
