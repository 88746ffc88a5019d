use std::fmt;

/// A subset `u` of the variable indices `{0, …, n-1}`, stored as a bitmask.
///
/// Indices are 0-based; `max_one_based` gives the `max{j ∈ u}` used by the
/// weight scheme, which counts variables from 1. At most 64 variables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u64) -> Self {
        Self(bits)
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        Self(indices.iter().fold(0, |acc, &j| {
            assert!(j < 64, "subset index {j} exceeds 63");
            acc | (1 << j)
        }))
    }

    /// `[i] = {0, …, i-1}`; `first(0)` is empty.
    pub fn first(i: usize) -> Self {
        assert!(i <= 64);
        if i == 64 {
            Self(u64::MAX)
        } else {
            Self((1u64 << i) - 1)
        }
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, j: usize) -> bool {
        j < 64 && self.0 & (1 << j) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Largest member as a 0-based index.
    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn max_one_based(self) -> Option<usize> {
        self.max().map(|j| j + 1)
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&j| self.0 & (1 << j) != 0)
    }

    /// All subsets of `self`, including the empty set and `self`, in
    /// increasing bitmask order (so every subset precedes its supersets).
    pub fn subsets(self) -> Vec<Subset> {
        let mut out = Vec::with_capacity(1 << self.len());
        let mut s = 0u64;
        loop {
            out.push(Subset(s));
            if s == self.0 {
                break;
            }
            s = (s.wrapping_sub(self.0)) & self.0;
        }
        out.sort();
        out
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members()).finish()
    }
}
