//! Finite sets of positive integers, stored in strictly increasing order.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SetError {
    #[error("elements must be positive")]
    ZeroElement,
    #[error("element {0} repeats or breaks strictly increasing order")]
    NotIncreasing(u64),
}

/// A finite set of positive integers. The element list is always strictly
/// increasing, so equality and ordering are the usual set comparisons.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct FiniteSet {
    elems: Vec<u64>,
}

impl FiniteSet {
    /// Builds a set from an already strictly increasing list.
    pub fn new(elems: Vec<u64>) -> Result<Self, SetError> {
        if elems.first().is_some_and(|&e| e == 0) {
            return Err(SetError::ZeroElement);
        }
        for w in elems.windows(2) {
            if w[1] <= w[0] {
                return Err(SetError::NotIncreasing(w[1]));
            }
        }
        Ok(FiniteSet { elems })
    }

    /// Builds a set from arbitrary elements, sorting and removing duplicates.
    pub fn from_unsorted(mut elems: Vec<u64>) -> Result<Self, SetError> {
        if elems.contains(&0) {
            return Err(SetError::ZeroElement);
        }
        elems.sort_unstable();
        elems.dedup();
        Ok(FiniteSet { elems })
    }

    pub fn empty() -> Self {
        FiniteSet { elems: Vec::new() }
    }

    pub fn singleton(x: u64) -> Self {
        assert!(x >= 1, "set elements are positive");
        FiniteSet { elems: vec![x] }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[u64] {
        &self.elems
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = u64> + '_ {
        self.elems.iter().copied()
    }

    pub fn min_elem(&self) -> Option<u64> {
        self.elems.first().copied()
    }

    pub fn max_elem(&self) -> Option<u64> {
        self.elems.last().copied()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    /// Position of `x` in the element list, if present.
    pub fn position(&self, x: u64) -> Option<usize> {
        self.elems.binary_search(&x).ok()
    }

    pub fn is_subset_of(&self, other: &FiniteSet) -> bool {
        let mut it = other.elems.iter();
        'outer: for &e in &self.elems {
            for &o in it.by_ref() {
                if o == e {
                    continue 'outer;
                }
                if o > e {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// True when every element of `self` is smaller than every element of
    /// `other`. Both sets must be nonempty.
    pub fn is_below(&self, other: &FiniteSet) -> bool {
        match (self.max_elem(), other.min_elem()) {
            (Some(a), Some(b)) => a < b,
            _ => false,
        }
    }

    pub fn union(&self, other: &FiniteSet) -> FiniteSet {
        let mut elems = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.elems.len() && j < other.elems.len() {
            match self.elems[i].cmp(&other.elems[j]) {
                std::cmp::Ordering::Less => {
                    elems.push(self.elems[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    elems.push(other.elems[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    elems.push(self.elems[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        elems.extend_from_slice(&self.elems[i..]);
        elems.extend_from_slice(&other.elems[j..]);
        FiniteSet { elems }
    }

    pub fn difference(&self, other: &FiniteSet) -> FiniteSet {
        let elems = self
            .elems
            .iter()
            .copied()
            .filter(|e| !other.contains(*e))
            .collect();
        FiniteSet { elems }
    }
}

impl TryFrom<Vec<u64>> for FiniteSet {
    type Error = SetError;

    fn try_from(elems: Vec<u64>) -> Result<Self, SetError> {
        FiniteSet::new(elems)
    }
}

impl From<FiniteSet> for Vec<u64> {
    fn from(set: FiniteSet) -> Vec<u64> {
        set.elems
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

#[macro_export]
macro_rules! fset {
    ($($x:expr),* $(,)?) => {
        $crate::set::FiniteSet::new(vec![$($x),*]).expect("strictly increasing elements")
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_and_disorder() {
        assert_eq!(FiniteSet::new(vec![0, 1]), Err(SetError::ZeroElement));
        assert_eq!(FiniteSet::new(vec![2, 2]), Err(SetError::NotIncreasing(2)));
        assert_eq!(FiniteSet::new(vec![3, 1]), Err(SetError::NotIncreasing(1)));
    }

    #[test]
    fn union_difference_subset() {
        let a = fset![1, 2, 5];
        let b = fset![2, 3];
        assert_eq!(a.union(&b), fset![1, 2, 3, 5]);
        assert_eq!(a.difference(&b), fset![1, 5]);
        assert!(fset![2, 5].is_subset_of(&a));
        assert!(!fset![2, 4].is_subset_of(&a));
        assert!(fset![1, 2].is_below(&fset![3]));
        assert!(!fset![1, 3].is_below(&fset![3]));
    }

    #[test]
    fn from_unsorted_dedups() {
        let s = FiniteSet::from_unsorted(vec![5, 1, 5, 3]).unwrap();
        assert_eq!(s, fset![1, 3, 5]);
    }
}
