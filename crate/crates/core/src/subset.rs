//! Subsets of a ground set of at most 64 elements, stored as membership masks.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_GROUND: usize = 64;

/// A subset of `{0, .., n-1}` for some `n <= 64`.
///
/// Ordering is lexicographic over the ascending element sequence, so that
/// `{} < {0} < {0,1} < {0,2} < {1} < {1,2} < {2}`. This is the preorder of the
/// lexicographical tree, where the parent of a set is the set without its
/// largest element.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_mask(mask: u64) -> Self {
        Subset(mask)
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    /// The whole ground set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_GROUND, "ground set of {n} elements exceeds {MAX_GROUND}");
        if n == MAX_GROUND {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> Self {
        assert!(x < MAX_GROUND);
        Subset(1u64 << x)
    }

    /// Builds a subset from element indices; duplicates are merged.
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Result<Self> {
        let mut mask = 0u64;
        for x in elements {
            if x >= MAX_GROUND {
                return Err(Error::ElementOutOfRange { element: x, n: MAX_GROUND });
            }
            mask |= 1u64 << x;
        }
        Ok(Subset(mask))
    }

    #[inline]
    pub fn contains(self, x: usize) -> bool {
        x < MAX_GROUND && self.0 >> x & 1 == 1
    }

    #[inline]
    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[must_use]
    pub fn with(self, x: usize) -> Self {
        Subset(self.0 | 1u64 << x)
    }

    #[must_use]
    pub fn without(self, x: usize) -> Self {
        Subset(self.0 & !(1u64 << x))
    }

    #[must_use]
    pub fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn max_element(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    /// True when every element is below `n`.
    pub fn fits(self, n: usize) -> bool {
        n >= MAX_GROUND || self.0 >> n == 0
    }

    /// The elements in ascending order.
    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    /// All subsets of `self`, including `self` and the empty set.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur | !full).wrapping_add(1) & full) };
            Some(Subset(cur))
        })
    }
}

/// Ascending iterator over the elements of a [`Subset`].
#[derive(Clone)]
pub struct Elements(u64);

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let x = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(x)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl DoubleEndedIterator for Elements {
    fn next_back(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let x = 63 - self.0.leading_zeros() as usize;
        self.0 &= !(1u64 << x);
        Some(x)
    }
}

impl ExactSizeIterator for Elements {}

impl IntoIterator for Subset {
    type Item = usize;
    type IntoIter = Elements;

    fn into_iter(self) -> Elements {
        self.iter()
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        // Both sets agree below the first differing element `e`.
        let e = diff.trailing_zeros();
        let self_has = self.0 >> e & 1 == 1;
        let lacks = if self_has { other.0 } else { self.0 };
        // The set lacking `e` is a prefix of the other iff it has nothing above `e`.
        let lacks_is_prefix = lacks >> e == 0;
        match (self_has, lacks_is_prefix) {
            (true, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Less,
            (false, false) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    /// Comma-separated ascending indices, or `.` for the empty set.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str(".");
        }
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl FromStr for Subset {
    type Err = Error;

    /// Parses the comma form produced by `Display`. Elements must be strictly
    /// ascending.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "." {
            return Ok(Subset::EMPTY);
        }
        if s.is_empty() {
            return Err(Error::BadSubset(s.to_string()));
        }
        let mut mask = 0u64;
        let mut last: Option<usize> = None;
        for tok in s.split(',') {
            let x: usize = tok.trim().parse().map_err(|_| Error::BadSubset(s.to_string()))?;
            if x >= MAX_GROUND {
                return Err(Error::ElementOutOfRange { element: x, n: MAX_GROUND });
            }
            if last.is_some_and(|l| l >= x) {
                return Err(Error::BadSubset(s.to_string()));
            }
            last = Some(x);
            mask |= 1u64 << x;
        }
        Ok(Subset(mask))
    }
}
