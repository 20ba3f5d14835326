//! Permutations of `{0, .., n-1}` in one-line (image) form, plus a
//! lexicographic generator that can be split into independent chunks for
//! parallel sweeps over the whole symmetric group.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection of `{0, .., n-1}`; `images[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::InvalidPermutation("degree must be positive".into()));
        }
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[v] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "degree must be positive");
        Self {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation of degree `n` from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPermutation("degree must be positive".into()));
        }
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= n || touched[a] {
                    return Err(Error::InvalidPermutation(format!(
                        "cycles {cycles:?} are not disjoint cycles on 0..{n}"
                    )));
                }
                touched[a] = true;
                images[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Self { images })
    }

    /// Parses either the one-line form `[0,2,1,3]` or the cycle form
    /// `(0 1 2)(3 4)`. The cycle form needs the degree; fixed points may be
    /// omitted. An empty cycle form `()` is the identity.
    pub fn parse(literal: &str, degree: Option<usize>) -> Result<Self> {
        let s = literal.trim();
        if s.starts_with('[') {
            let p: Self = s.parse()?;
            if let Some(n) = degree {
                if p.n() != n {
                    return Err(Error::DegreeMismatch {
                        expected: n,
                        found: p.n(),
                    });
                }
            }
            return Ok(p);
        }
        if !s.starts_with('(') {
            return Err(Error::InvalidPermutation(format!(
                "expected '[..]' or '(..)', got {literal:?}"
            )));
        }
        let n = degree.ok_or_else(|| {
            Error::InvalidPermutation("cycle notation needs the degree N".into())
        })?;
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::InvalidPermutation(format!("bad cycle list {literal:?}")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::InvalidPermutation(format!("unclosed cycle in {literal:?}")))?;
            let body = &open[..close];
            let cycle = body
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::InvalidPermutation(format!("bad entry {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = open[close + 1..].trim_start();
        }
        Self::from_cycles(n, &cycles)
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DegreeMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(Self {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// The permutation of lexicographic rank `rank` in `S_n`.
    pub fn unrank(n: usize, rank: u64) -> Self {
        let mut pool: Vec<usize> = (0..n).collect();
        let mut images = Vec::with_capacity(n);
        let mut r = rank;
        for k in (0..n).rev() {
            let f = factorial_u64(k);
            let idx = (r / f) as usize;
            r %= f;
            images.push(pool.remove(idx));
        }
        Self { images }
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        Self::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::InvalidPermutation(format!("expected [..], got {s:?}")))?;
        let images = body
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidPermutation(format!("bad entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(images)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

pub(crate) fn factorial_u64(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Advances `p` to the next permutation in lexicographic order. Returns
/// `false` (leaving `p` untouched) when `p` is the last one.
pub fn next_lexicographic(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Number of permutations handed to one worker. Fixed so that chunking (and
/// hence merge order) does not depend on the size of the thread pool.
const CHUNK: u64 = 5040;

/// Folds `visit` over every permutation of `S_n` in lexicographic order,
/// split into fixed-size chunks that are processed in parallel and merged
/// in chunk order with `merge`.
pub fn sweep<T, I, V, M>(n: usize, init: I, visit: V, merge: M) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    V: Fn(&mut T, &[usize]) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    assert!((1..=20).contains(&n), "sweep degree out of range");
    let total = factorial_u64(n);
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let len = CHUNK.min(total - start);
            let mut acc = init();
            let mut p = Permutation::unrank(n, start).images;
            for k in 0..len {
                visit(&mut acc, &p);
                if k + 1 < len {
                    next_lexicographic(&mut p);
                }
            }
            acc
        })
        .reduce_with(&merge)
        .unwrap_or_else(init)
}

/// Counts permutations in `S_n` satisfying `pred`.
pub fn count_where<P>(n: usize, pred: P) -> u64
where
    P: Fn(&[usize]) -> bool + Sync + Send,
{
    sweep(
        n,
        || 0u64,
        |acc, p| {
            if pred(p) {
                *acc += 1;
            }
        },
        |a, b| a + b,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::new(vec![]).is_err());
    }

    #[test]
    fn parses_both_literal_forms() {
        let a = Permutation::parse("[0,2,1,3]", Some(4)).unwrap();
        let b = Permutation::parse("(1 2)", Some(4)).unwrap();
        assert_eq!(a, b);
        let c = Permutation::parse("(0 1 2)", Some(3)).unwrap();
        assert_eq!(c.images(), &[1, 2, 0]);
        assert_eq!(Permutation::parse("()", Some(3)).unwrap(), Permutation::identity(3));
        assert!(Permutation::parse("(0 1)(1 2)", Some(3)).is_err());
        assert!(Permutation::parse("(0 1)", None).is_err());
        assert!(Permutation::parse("[0,1]", Some(3)).is_err());
    }

    #[test]
    fn display_round_trips() {
        let p = Permutation::new(vec![3, 0, 2, 1]).unwrap();
        assert_eq!(p.to_string(), "[3,0,2,1]");
        assert_eq!(p.to_string().parse::<Permutation>().unwrap(), p);
    }

    #[test]
    fn compose_and_inverse() {
        let p = Permutation::new(vec![1, 2, 0]).unwrap();
        let q = Permutation::new(vec![0, 2, 1]).unwrap();
        // p(q(1)) = p(2) = 0
        assert_eq!(p.compose(&q).unwrap().apply(1), 0);
        assert!(p.compose(&p.inverse()).unwrap().is_identity());
    }

    #[test]
    fn unrank_matches_generator_order() {
        let mut p: Vec<usize> = (0..5).collect();
        let mut rank = 0;
        loop {
            assert_eq!(Permutation::unrank(5, rank).images(), &p[..]);
            rank += 1;
            if !next_lexicographic(&mut p) {
                break;
            }
        }
        assert_eq!(rank, 120);
    }

    #[test]
    fn sweep_visits_every_permutation_once() {
        let n = 8;
        let seen = sweep(
            n,
            Vec::new,
            |acc: &mut Vec<u64>, p| {
                // encode as a base-8 integer
                acc.push(p.iter().fold(0u64, |a, &d| a * 8 + d as u64));
            },
            |mut a, b| {
                a.extend(b);
                a
            },
        );
        assert_eq!(seen.len(), 40320);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn counts_derangements() {
        // D_6 = 265
        let d = count_where(6, |p| p.iter().enumerate().all(|(i, &v)| i != v));
        assert_eq!(d, 265);
    }
}
