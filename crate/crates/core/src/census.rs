//! Counting non-mixing and slowly mixing permutations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bigcomb::{binomial, factorial, multinomial};
use crate::error::{Error, Result};
use crate::exact::ratio_to_f64;
use crate::perm::{sweep, Permutation};
use crate::permcore::classify::is_mixing_images;
use crate::permcore::{classify_oracle, delta, has_subshift_witness, subshift_witness_proportion, MapFamily};
use crate::specmat::rate::rate_only;

/// Largest `N` swept exhaustively by default.
pub const SWEEP_CAP: usize = 10;
/// Largest `N` swept exhaustively when long runs are allowed.
pub const LONG_RUN_SWEEP_CAP: usize = 12;
/// Largest `N` for which every `Λ_σ` is computed by default.
pub const RATE_SWEEP_CAP: usize = 8;
/// Largest `N` for rate sweeps when long runs are allowed.
pub const LONG_RUN_RATE_SWEEP_CAP: usize = 10;
/// Name of the generator behind [`mc_slowdown`].
pub const PRNG_NAME: &str = "ChaCha8 (rand_chacha 0.9), stream = block index";
/// Samples drawn from one generator stream.
const MC_BLOCK: usize = 256;

mod decimal {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => s.serialize_str(&x.to_string()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| t.parse().map_err(D::Error::custom))
                .transpose()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountMethod {
    Exhaustive,
    ClosedForm,
    MonteCarlo,
}

/// Counts over `S_N` for `σ∘f`, `f(x) = mx mod 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    #[serde(with = "decimal")]
    pub total: BigInt,
    #[serde(with = "decimal::opt", default)]
    pub nonmixing_count: Option<BigInt>,
    /// Permutations with `Λ_σ > 1/m + tol`.
    #[serde(with = "decimal::opt", default)]
    pub slow_count: Option<BigInt>,
    pub method: CountMethod,
}

impl CensusRow {
    pub fn nonmixing_proportion(&self) -> Option<BigRational> {
        self.nonmixing_count
            .as_ref()
            .map(|c| BigRational::new(c.clone(), self.total.clone()))
    }

    pub fn slow_proportion(&self) -> Option<BigRational> {
        self.slow_count
            .as_ref()
            .map(|c| BigRational::new(c.clone(), self.total.clone()))
    }
}

/// Sampled proportion of slowly mixing permutations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub hits: usize,
    pub proportion: f64,
    pub std_error: f64,
    pub seed: u64,
    pub prng: String,
}

fn sweep_cap(long_run: bool) -> usize {
    if long_run {
        LONG_RUN_SWEEP_CAP
    } else {
        SWEEP_CAP
    }
}

fn check_cap(what: &'static str, value: usize, cap: usize) -> Result<()> {
    if value > cap {
        return Err(Error::TooLarge { what, value, cap });
    }
    Ok(())
}

/// Number of `σ ∈ S_N` for which `σ∘f` is not mixing, `m | N`.
fn nonmixing_count(m: usize, n: usize) -> Result<u64> {
    let d = delta(m, n)?;
    let ell = n / m;
    Ok(sweep(
        n,
        || (0u64, vec![0usize; n]),
        |acc, p| {
            if !is_mixing_images(p, d.images(), ell, &mut acc.1) {
                acc.0 += 1;
            }
        },
        |a, b| (a.0 + b.0, a.1),
    )
    .0)
}

/// `p(ℓ,m)`, the proportion of `σ ∈ S_{mℓ}` with `σ∘f` not mixing, by
/// exhaustive sweep.
pub fn p_exact_bruteforce(ell: usize, m: usize, long_run: bool) -> Result<BigRational> {
    if ell == 0 || m < 2 {
        return Err(Error::InvalidParameter(format!("need ell >= 1 and m >= 2, got {ell}, {m}")));
    }
    let n = ell * m;
    check_cap("N = m*ell", n, sweep_cap(long_run))?;
    let count = nonmixing_count(m, n)?;
    Ok(BigRational::new(BigInt::from(count), factorial(n)))
}

/// `p(ℓ,m)` in closed form for `ℓ ≤ 4`.
pub fn p_closed_form(ell: usize, m: usize) -> Result<BigRational> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("need m >= 2, got {m}")));
    }
    let one = BigInt::one();
    Ok(match ell {
        1 => BigRational::zero(),
        2 => BigRational::new(one, binomial(2 * m - 1, m)),
        3 => BigRational::new(one, binomial(3 * m - 1, 2 * m)),
        4 => {
            let c2 = binomial(2 * m, m);
            let num = BigInt::from(4) * multinomial(&[m, m, m]) + BigInt::from(6) * &c2 * &c2
                - BigInt::from(12) * &c2;
            let mf = factorial(m);
            let mf2 = &mf * &mf;
            BigRational::new(num * &mf2 * &mf2, factorial(4 * m))
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "closed form known for ell in 1..=4, got {ell}"
            )))
        }
    })
}

/// Integer partitions of `total` into exactly `parts` parts, each listed
/// in nondecreasing order.
pub fn partitions_into(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, parts: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut r = min;
        while r * parts <= rest {
            cur.push(r);
            rec(rest - r, parts - 1, r, cur, out);
            cur.pop();
            r += 1;
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(total, parts, 1, &mut Vec::new(), &mut out);
    }
    out
}

/// `b_j(ℓ) = Σ multinom(ℓ; r) / multinom(mℓ; m·r)` over partitions `r` of
/// `ℓ` into `j` parts: the share of `S_{mℓ}` taken by the stabilizers of
/// `ℓ`-stable block decompositions with `j` blocks.
pub fn b_j_exact(ell: usize, m: usize, j: usize) -> Result<BigRational> {
    if ell == 0 || ell > 40 {
        return Err(Error::InvalidParameter(format!("need 1 <= ell <= 40, got {ell}")));
    }
    let mut sum = BigRational::zero();
    for r in partitions_into(ell, j) {
        let scaled: Vec<usize> = r.iter().map(|x| x * m).collect();
        sum += BigRational::new(multinomial(&r), multinomial(&scaled));
    }
    Ok(sum)
}

/// `Σ_{j=2}^{ℓ} b_j(ℓ)`, an upper bound for `p(ℓ,m)`.
pub fn p_upper_bound_sum(ell: usize, m: usize) -> Result<BigRational> {
    let mut sum = BigRational::zero();
    for j in 2..=ell {
        sum += b_j_exact(ell, m, j)?;
    }
    Ok(sum)
}

/// `11·(2e/ℓ)^{m−1}`, valid as a bound on `p(ℓ,m)` for `ℓ ≥ 6`.
pub fn asymp_bound(ell: usize, m: usize) -> Result<f64> {
    if ell < 6 {
        return Err(Error::InvalidParameter(format!("bound holds for ell >= 6, got {ell}")));
    }
    Ok(11.0 * (2.0 * std::f64::consts::E / ell as f64).powi(m as i32 - 1))
}

/// Leading large-`m` behaviour of `p(ℓ,m)` for fixed `ℓ ≥ 2`:
/// `sqrt(2π(ℓ−1)ℓm)·((ℓ−1)^{ℓ−1}/ℓ^ℓ)^m`, from the block decompositions
/// with block sizes `m` and `(ℓ−1)m`.
pub fn asymp_large_m(ell: usize, m: usize) -> Result<f64> {
    if ell < 2 {
        return Err(Error::InvalidParameter(format!("need ell >= 2, got {ell}")));
    }
    let (l, mf) = (ell as f64, m as f64);
    let log_base = (l - 1.0) * (l - 1.0).ln() - l * l.ln();
    Ok((2.0 * std::f64::consts::PI * (l - 1.0) * l * mf).sqrt() * (mf * log_base).exp())
}

/// Exhaustive counts of non-mixing and slowly mixing `σ ∈ S_N`.
pub fn slowdown_census(m: usize, n: usize, tol: f64, long_run: bool) -> Result<CensusRow> {
    if m < 2 || n < 2 {
        return Err(Error::InvalidParameter(format!("need m >= 2 and N >= 2, got {m}, {n}")));
    }
    let cap = if long_run { LONG_RUN_RATE_SWEEP_CAP } else { RATE_SWEEP_CAP };
    check_cap("N", n, cap)?;
    let inv_m = 1.0 / m as f64;
    let (slow, err) = sweep(
        n,
        || (0u64, None::<Error>),
        |acc, p| match rate_only(p, m, tol) {
            Ok(l) if l > inv_m + tol => acc.0 += 1,
            Ok(_) => {}
            Err(e) => {
                acc.1.get_or_insert(e);
            }
        },
        |a, b| (a.0 + b.0, a.1.or(b.1)),
    );
    if let Some(e) = err {
        return Err(e);
    }
    let nonmixing = if n % m == 0 { nonmixing_count(m, n)? } else { 0 };
    Ok(CensusRow {
        n,
        m,
        total: factorial(n),
        nonmixing_count: Some(BigInt::from(nonmixing)),
        slow_count: Some(BigInt::from(slow)),
        method: CountMethod::Exhaustive,
    })
}

/// Seeded Monte Carlo estimate of the proportion of `σ ∈ S_N` with
/// `Λ_σ > 1/m + tol`.
///
/// Samples are drawn in blocks of 256; block `b` uses a ChaCha8 generator
/// seeded with `seed` on stream `b` and produces permutations by
/// Fisher–Yates shuffles, so the result does not depend on the number of
/// worker threads.
pub fn mc_slowdown(m: usize, n: usize, samples: usize, seed: u64, tol: f64) -> Result<MCEstimate> {
    if samples < 100 {
        return Err(Error::InvalidParameter(format!("need at least 100 samples, got {samples}")));
    }
    if m < 2 || n < 2 {
        return Err(Error::InvalidParameter(format!("need m >= 2 and N >= 2, got {m}, {n}")));
    }
    let blocks = samples.div_ceil(MC_BLOCK);
    let inv_m = 1.0 / m as f64;
    let hits = (0..blocks)
        .into_par_iter()
        .map(|b| -> Result<usize> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = MC_BLOCK.min(samples - b * MC_BLOCK);
            let mut p: Vec<usize> = (0..n).collect();
            let mut hits = 0;
            for _ in 0..len {
                p.shuffle(&mut rng);
                if rate_only(&p, m, tol)? > inv_m + tol {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    let proportion = hits as f64 / samples as f64;
    Ok(MCEstimate {
        n,
        m,
        samples,
        hits,
        proportion,
        std_error: (proportion * (1.0 - proportion) / samples as f64).sqrt(),
        seed,
        prng: PRNG_NAME.to_string(),
    })
}

/// Non-mixing census of the subshift family over `S_{2ℓ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubshiftCensus {
    pub ell: usize,
    #[serde(with = "decimal")]
    pub total: BigInt,
    /// Exhaustive count via subset dynamics.
    #[serde(with = "decimal")]
    pub nonmixing_count: BigInt,
    /// Permutations with `σ(j − ℓ) = j` for some `j ≥ ℓ`, counted directly.
    #[serde(with = "decimal")]
    pub witness_count: BigInt,
    /// Inclusion–exclusion value of the witness proportion, as `p/q`.
    pub witness_proportion: String,
    pub method: CountMethod,
}

impl SubshiftCensus {
    pub fn nonmixing_proportion(&self) -> BigRational {
        BigRational::new(self.nonmixing_count.clone(), self.total.clone())
    }

    pub fn witness_proportion_value(&self) -> BigRational {
        self.witness_proportion.parse().expect("stored as a valid ratio")
    }
}

pub fn subshift_census(ell: usize) -> Result<SubshiftCensus> {
    let family = MapFamily::subshift(ell)?;
    let n = family.n();
    check_cap("2*ell", n, SWEEP_CAP)?;
    let (nonmixing, witness, err) = sweep(
        n,
        || (0u64, 0u64, None::<Error>),
        |acc, p| {
            let sigma = Permutation::new(p.to_vec()).expect("generator yields permutations");
            match classify_oracle(&sigma, &family, SWEEP_CAP) {
                Ok(v) if !v.is_mixing() => acc.0 += 1,
                Ok(_) => {}
                Err(e) => {
                    acc.2.get_or_insert(e);
                }
            }
            if has_subshift_witness(p) {
                acc.1 += 1;
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1, a.2.or(b.2)),
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(SubshiftCensus {
        ell,
        total: factorial(n),
        nonmixing_count: BigInt::from(nonmixing),
        witness_count: BigInt::from(witness),
        witness_proportion: subshift_witness_proportion(ell)?.to_string(),
        method: CountMethod::Exhaustive,
    })
}

/// Lower bound on `e` as an exact rational (`e > 2.718281828459045`).
pub fn e_lower() -> BigRational {
    BigRational::new(BigInt::from(2_718_281_828_459_045u64), BigInt::from(10u64).pow(15))
}

/// A rational strictly below `(2e/ℓ)^k`.
pub fn two_e_over_ell_pow_lower(ell: usize, k: usize) -> BigRational {
    let base = e_lower() * BigInt::from(2) / BigInt::from(ell);
    let mut out = BigRational::one();
    for _ in 0..k {
        out *= &base;
    }
    out
}

/// `p` as `f64` (for display and real-valued comparisons).
pub fn to_f64(p: &BigRational) -> f64 {
    ratio_to_f64(p)
}
