//! Subsets of `Z/NZ` as bit masks, and the induced set maps.
//!
//! A subset `A` stands for the union of the subintervals `I_a = [a/N,
//! (a+1)/N)`, `a ∈ A`. `spread` gives the indices covered by `f` of that
//! union for `f(x) = mx mod 1`, and `image` the indices covered by one step
//! of `σ∘f` (or of the two-branch subshift map).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Largest ground set representable by [`Subset`].
pub const MAX_SET_SIZE: usize = 64;

/// A subset of `{0, .., N-1}`; bit `i` set iff `i` is a member.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_SET_SIZE);
        if n == MAX_SET_SIZE {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(items: I) -> Self {
        Subset(items.into_iter().fold(0, |acc, i| {
            assert!(i < MAX_SET_SIZE, "index {i} out of range");
            acc | (1 << i)
        }))
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < MAX_SET_SIZE && self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Which interval map acts on the `N` equal subintervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FamilyKind {
    /// `x ↦ mx mod 1`.
    MultiplyMod1 { m: usize },
    /// `x ↦ 2x` on `[0, 1/2)` and `x ↦ x − 1/2` on `[1/2, 1)`, with `N = 2ℓ`.
    SubshiftExample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFamily {
    pub kind: FamilyKind,
    pub n: usize,
}

impl MapFamily {
    pub fn multiply(m: usize, n: usize) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::InvalidParameter(format!(
                "need m >= 2 and N >= 2, got m = {m}, N = {n}"
            )));
        }
        Ok(Self {
            kind: FamilyKind::MultiplyMod1 { m },
            n,
        })
    }

    /// The subshift map on `N = 2ℓ` subintervals.
    pub fn subshift(ell: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidParameter("need ell >= 1".into()));
        }
        Ok(Self {
            kind: FamilyKind::SubshiftExample,
            n: 2 * ell,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// `⋃_{d<m} (mA + d) mod N`.
pub fn spread(a: Subset, m: usize, n: usize) -> Subset {
    assert!(n <= MAX_SET_SIZE, "ground set of size {n} exceeds {MAX_SET_SIZE}");
    let mut out = Subset::EMPTY;
    for i in a.iter() {
        for d in 0..m {
            out.insert((m * i + d) % n);
        }
    }
    out
}

/// Indices covered after one step of the map in `family` followed by `σ`.
pub fn image(a: Subset, sigma: &Permutation, family: &MapFamily) -> Result<Subset> {
    let n = family.n;
    if sigma.n() != n {
        return Err(Error::DegreeMismatch {
            expected: n,
            found: sigma.n(),
        });
    }
    if n > MAX_SET_SIZE {
        return Err(Error::TooLarge {
            what: "N",
            value: n,
            cap: MAX_SET_SIZE,
        });
    }
    Ok(image_unchecked(a, sigma.images(), family))
}

#[inline]
pub(crate) fn image_unchecked(a: Subset, sigma: &[usize], family: &MapFamily) -> Subset {
    let n = family.n;
    let mut out = Subset::EMPTY;
    match family.kind {
        FamilyKind::MultiplyMod1 { m } => {
            for i in a.iter() {
                for d in 0..m {
                    out.insert(sigma[(m * i + d) % n]);
                }
            }
        }
        FamilyKind::SubshiftExample => {
            let ell = n / 2;
            for j in a.iter() {
                if j < ell {
                    out.insert(sigma[2 * j]);
                    out.insert(sigma[2 * j + 1]);
                } else {
                    out.insert(sigma[j - ell]);
                }
            }
        }
    }
    out
}

/// Whether `a` is a union of cosets of `ℓZ/NZ`.
pub fn is_coset_union(a: Subset, ell: usize, n: usize) -> bool {
    a.iter().all(|i| a.contains((i + ell) % n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(items: &[usize]) -> Subset {
        Subset::from_indices(items.iter().copied())
    }

    #[test]
    fn spread_examples() {
        assert_eq!(spread(s(&[0]), 2, 6), s(&[0, 1]));
        assert_eq!(spread(s(&[0, 3]), 2, 6), s(&[0, 1]));
        assert_eq!(spread(s(&[0, 1, 2, 3, 4]), 3, 5), Subset::full(5));
        assert_eq!(spread(Subset::EMPTY, 3, 5), Subset::EMPTY);
    }

    #[test]
    fn image_examples() {
        let id4 = Permutation::identity(4);
        let fam = MapFamily::multiply(2, 4).unwrap();
        assert_eq!(image(s(&[1]), &id4, &fam).unwrap(), s(&[2, 3]));
        let sub = MapFamily::subshift(2).unwrap();
        assert_eq!(image(s(&[0, 2, 3]), &id4, &sub).unwrap(), s(&[0, 1]));
        // σ(j − ℓ) = j pins {j}
        let sigma = Permutation::new(vec![2, 0, 1, 3]).unwrap();
        assert_eq!(image(s(&[2]), &sigma, &sub).unwrap(), s(&[2]));
        assert!(image(s(&[0]), &Permutation::identity(3), &sub).is_err());
    }

    #[test]
    fn subset_helpers() {
        let a = s(&[1, 4, 9]);
        assert_eq!(a.len(), 3);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![1, 4, 9]);
        assert_eq!(a.to_string(), "{1,4,9}");
        assert!(s(&[4]).is_subset_of(a));
        assert_eq!(Subset::full(64).len(), 64);
        assert!(is_coset_union(s(&[0, 3]), 3, 6));
        assert!(!is_coset_union(s(&[0, 1]), 3, 6));
    }
}
