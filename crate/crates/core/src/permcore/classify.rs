//! Deciding whether `σ∘f` is mixing.
//!
//! Two independent routes. [`classify_fast`] looks for a nontrivial block
//! decomposition of `Z/NZ` into unions of cosets of `ℓZ/NZ` that `σ∘δ`
//! permutes. [`classify_oracle`] follows the set map of every proper subset
//! and asks whether some orbit never covers the whole circle.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::blocks::BlockDecomposition;
use super::sets::{image_unchecked, FamilyKind, MapFamily, Subset, MAX_SET_SIZE};
use crate::bigcomb::{binomial, factorial};
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Default bound on `N` for subset enumeration.
pub const DEFAULT_ORACLE_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixingStatus {
    Mixing,
    NonMixing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingVerdict {
    pub status: MixingStatus,
    pub witness: Option<BlockDecomposition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ergodic: Option<bool>,
}

impl MixingVerdict {
    fn mixing() -> Self {
        Self {
            status: MixingStatus::Mixing,
            witness: None,
            ergodic: None,
        }
    }

    fn non_mixing(witness: BlockDecomposition) -> Self {
        Self {
            status: MixingStatus::NonMixing,
            witness: Some(witness),
            ergodic: None,
        }
    }

    pub fn is_mixing(&self) -> bool {
        self.status == MixingStatus::Mixing
    }
}

/// Whether `I_k ⊆ f([j/N, (j+1)/N))` for `f(x) = mx mod 1`.
///
/// `f` maps the subinterval onto `[mj/N, m(j+1)/N)` taken mod 1, so `I_k`
/// is covered iff `mj ≤ k + tN` and `k + 1 + tN ≤ m(j+1)` for some integer
/// `t ≥ 0`.
fn image_covers(m: usize, n: usize, j: usize, k: usize) -> bool {
    let (lo, hi) = (m * j, m * (j + 1));
    (0..=hi / n).any(|t| lo <= k + t * n && k + 1 + t * n <= hi)
}

/// The permutation `δ` with `f(I_j) ⊇ I_{δ(j)}`: for `i = j + cℓ` with
/// `0 ≤ c < m`, `0 ≤ j < ℓ`, `δ(i) = mj + c`.
pub fn delta(m: usize, n: usize) -> Result<Permutation> {
    if m < 2 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need m >= 2 and N >= 1, got m = {m}, N = {n}"
        )));
    }
    if n % m != 0 {
        return Err(Error::NotMultiple { m, n });
    }
    let ell = n / m;
    let images: Vec<usize> = (0..n).map(|i| m * (i % ell) + i / ell).collect();
    let d = Permutation::new(images)?;
    if let Some(j) = (0..n).find(|&j| !image_covers(m, n, j, d.apply(j))) {
        return Err(Error::InvalidParameter(format!(
            "interval check failed for delta at {j}"
        )));
    }
    Ok(d)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Labels of the finest partition of `Z/NZ` into unions of cosets of
/// `ℓZ/NZ` whose blocks `π` permutes.
fn stable_coarsening(pi: &[usize], ell: usize) -> Vec<usize> {
    let n = pi.len();
    let mut parent: Vec<usize> = (0..ell).collect();
    loop {
        let mut changed = false;
        // for every current block, all of π(block) must lie in one block
        let mut first_target: Vec<Option<usize>> = vec![None; ell];
        for i in 0..n {
            let src = find(&mut parent, i % ell);
            let dst = find(&mut parent, pi[i] % ell);
            match first_target[src] {
                None => first_target[src] = Some(dst),
                Some(t) => {
                    let t = find(&mut parent, t);
                    if t != dst {
                        parent[dst] = t;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    (0..n).map(|i| find(&mut parent, i % ell)).collect()
}

/// Mixing verdict for `σ∘f`, `f(x) = mx mod 1`, on `N = σ.n()` subintervals.
pub fn classify_fast(sigma: &Permutation, m: usize, n: usize) -> Result<MixingVerdict> {
    if sigma.n() != n {
        return Err(Error::DegreeMismatch {
            expected: n,
            found: sigma.n(),
        });
    }
    if m < 2 {
        return Err(Error::InvalidParameter(format!("need m >= 2, got {m}")));
    }
    if n % m != 0 {
        return Ok(MixingVerdict::mixing());
    }
    let d = delta(m, n)?;
    let pi = sigma.compose(&d)?;
    let labels = stable_coarsening(pi.images(), n / m);
    let b = BlockDecomposition::from_labels(&labels);
    if b.trivial() {
        Ok(MixingVerdict::mixing())
    } else {
        debug_assert!(b.ell_stable(n / m) && b.is_stabilized_by(&pi));
        Ok(MixingVerdict::non_mixing(b))
    }
}

/// Allocation-free mixing test for sweeps; `scratch` must have length
/// `N` and `delta` must be `delta(m, N)`.
pub(crate) fn is_mixing_images(sigma: &[usize], delta: &[usize], ell: usize, scratch: &mut [usize]) -> bool {
    for (i, s) in scratch.iter_mut().enumerate() {
        *s = sigma[delta[i]];
    }
    let labels = stable_coarsening(scratch, ell);
    labels.iter().all(|&l| l == labels[0])
}

const UNKNOWN: u8 = 0;
const REACHES_FULL: u8 = 1;
const NEVER: u8 = 2;
const ON_PATH: u8 = 3;

/// Mixing verdict by exhaustive subset dynamics: the map is mixing iff every
/// nonempty union of subintervals is eventually mapped onto all of them.
/// `cap` bounds `N` (the memo table has `2^N` entries).
pub fn classify_oracle(sigma: &Permutation, family: &MapFamily, cap: usize) -> Result<MixingVerdict> {
    let n = family.n;
    if sigma.n() != n {
        return Err(Error::DegreeMismatch {
            expected: n,
            found: sigma.n(),
        });
    }
    let cap = cap.min(MAX_SET_SIZE - 1);
    if n > cap {
        return Err(Error::TooLarge {
            what: "N for subset enumeration",
            value: n,
            cap,
        });
    }
    let full = Subset::full(n);
    let mut state = vec![UNKNOWN; 1usize << n];
    state[full.0 as usize] = REACHES_FULL;
    state[0] = NEVER;
    let mut path: Vec<u64> = Vec::new();
    let mut stuck: Option<u64> = None;
    for start in 1..full.0 {
        if state[start as usize] != UNKNOWN {
            continue;
        }
        path.clear();
        let mut cur = start;
        let outcome = loop {
            match state[cur as usize] {
                UNKNOWN => {
                    state[cur as usize] = ON_PATH;
                    path.push(cur);
                    cur = image_unchecked(Subset(cur), sigma.images(), family).0;
                }
                ON_PATH => {
                    stuck.get_or_insert(cur);
                    break NEVER;
                }
                s => break s,
            }
        };
        for &p in &path {
            state[p as usize] = outcome;
        }
    }
    let Some(cycle_start) = stuck else {
        return Ok(MixingVerdict::mixing());
    };
    // the sets on the stuck cycle generate a partition permuted by the map
    let mut cycle = vec![cycle_start];
    loop {
        let next = image_unchecked(Subset(*cycle.last().unwrap()), sigma.images(), family).0;
        if next == cycle_start {
            break;
        }
        cycle.push(next);
    }
    let mut signatures: Vec<Vec<bool>> = Vec::new();
    let labels: Vec<usize> = (0..n)
        .map(|i| {
            let sig: Vec<bool> = cycle.iter().map(|&s| s >> i & 1 == 1).collect();
            signatures.iter().position(|t| *t == sig).unwrap_or_else(|| {
                signatures.push(sig);
                signatures.len() - 1
            })
        })
        .collect();
    let witness = BlockDecomposition::from_labels(&labels);
    if let FamilyKind::MultiplyMod1 { m } = family.kind {
        debug_assert!(n % m != 0 || witness.ell_stable(n / m));
    }
    Ok(MixingVerdict::non_mixing(witness))
}

/// Proportion of `σ ∈ S_{2ℓ}` with `σ(j − ℓ) = j` for at least one `j ≥ ℓ`,
/// by inclusion–exclusion: `Σ_{k=1}^{ℓ} (−1)^{k−1} C(ℓ,k) (2ℓ−k)!/(2ℓ)!`.
pub fn subshift_witness_proportion(ell: usize) -> Result<BigRational> {
    if ell == 0 {
        return Err(Error::InvalidParameter("need ell >= 1".into()));
    }
    let total = factorial(2 * ell);
    let mut num = BigInt::from(0);
    for k in 1..=ell {
        let term = binomial(ell, k) * factorial(2 * ell - k);
        if k % 2 == 1 {
            num += term;
        } else {
            num -= term;
        }
    }
    Ok(BigRational::new(num, total))
}

/// Whether `σ` pins a subinterval of the right half: `σ(j − ℓ) = j`.
pub fn has_subshift_witness(sigma: &[usize]) -> bool {
    let ell = sigma.len() / 2;
    (ell..2 * ell).any(|j| sigma[j - ell] == j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permcore::sets::Subset;

    #[test]
    fn delta_values() {
        assert_eq!(delta(2, 4).unwrap().images(), &[0, 2, 1, 3]);
        assert_eq!(delta(2, 6).unwrap().images(), &[0, 2, 4, 1, 3, 5]);
        assert_eq!(delta(3, 3).unwrap().images(), &[0, 1, 2]);
        assert!(matches!(delta(2, 5), Err(Error::NotMultiple { .. })));
    }

    #[test]
    fn fast_examples() {
        let sigma = delta(2, 4).unwrap().inverse();
        let v = classify_fast(&sigma, 2, 4).unwrap();
        assert_eq!(v.status, MixingStatus::NonMixing);
        assert_eq!(v.witness.unwrap().blocks(), &[vec![0, 2], vec![1, 3]]);
        assert!(classify_fast(&Permutation::identity(4), 2, 4).unwrap().is_mixing());
        assert!(classify_fast(&Permutation::new(vec![1, 0, 2]).unwrap(), 2, 3).unwrap().is_mixing());
        assert!(classify_fast(&Permutation::identity(3), 2, 4).is_err());
        // ℓ = 1: a single coset, always mixing
        assert!(classify_fast(&Permutation::new(vec![2, 0, 1]).unwrap(), 3, 3).unwrap().is_mixing());
    }

    #[test]
    fn oracle_examples() {
        let fam = MapFamily::multiply(2, 3).unwrap();
        let swap = Permutation::new(vec![0, 2, 1]).unwrap();
        assert!(classify_oracle(&swap, &fam, 20).unwrap().is_mixing());
        let fam = MapFamily::multiply(2, 2).unwrap();
        assert!(classify_oracle(&Permutation::identity(2), &fam, 20).unwrap().is_mixing());
        let sub = MapFamily::subshift(2).unwrap();
        let pin = Permutation::new(vec![2, 0, 1, 3]).unwrap();
        let v = classify_oracle(&pin, &sub, 20).unwrap();
        assert_eq!(v.status, MixingStatus::NonMixing);
        assert!(!v.witness.unwrap().trivial());
        let big = MapFamily::multiply(2, 22).unwrap();
        assert!(classify_oracle(&Permutation::identity(22), &big, 20).is_err());
    }

    #[test]
    fn oracle_witness_for_non_mixing() {
        let sigma = delta(2, 4).unwrap().inverse();
        let fam = MapFamily::multiply(2, 4).unwrap();
        let v = classify_oracle(&sigma, &fam, 20).unwrap();
        let w = v.witness.unwrap();
        assert!(w.ell_stable(2));
        assert!(w.is_stabilized_by(&sigma.compose(&delta(2, 4).unwrap()).unwrap()));
    }

    #[test]
    fn identity_doubling_is_mixing_by_brute_force() {
        // every proper nonempty subset of Z/4Z eventually covers everything
        let id = Permutation::identity(4);
        let fam = MapFamily::multiply(2, 4).unwrap();
        for a in 1u64..15 {
            let mut s = Subset(a);
            for _ in 0..16 {
                s = image_unchecked(s, id.images(), &fam);
            }
            assert_eq!(s, Subset::full(4));
        }
    }

    #[test]
    fn witness_proportions() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(subshift_witness_proportion(1).unwrap(), half);
        assert_eq!(subshift_witness_proportion(2).unwrap(), BigRational::new(5.into(), 12.into()));
    }
}
