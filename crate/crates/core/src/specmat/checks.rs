//! Exact algebraic checks on the transition matrices.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::eigen::{eigen_spectrum, spectra_match, DEFAULT_TOL};
use super::matrices::{build_ap, build_b, build_bq};
use crate::error::{Error, Result};
use crate::exact;
use crate::perm::Permutation;
use crate::permcore::classify_fast;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicReport {
    /// Characteristic polynomial of `A·P(σ)`, lowest degree first.
    pub charpoly: Vec<String>,
    pub monic: bool,
    pub multiplicity_of_m: usize,
    /// Constant term of the charpoly divided by `(x − m)`.
    pub quotient_constant: String,
    pub passes: bool,
}

/// For `gcd(m,N) = 1`: `A·P(σ)` has integer monic characteristic
/// polynomial with `m` a simple root, and the remaining roots multiply to
/// `±1`.
pub fn algebraic_eigenvalue_check(sigma: &Permutation, m: usize) -> Result<AlgebraicReport> {
    let n = sigma.n();
    if m.gcd(&n) != 1 {
        return Err(Error::InvalidParameter(format!("gcd(m, N) must be 1, got m = {m}, N = {n}")));
    }
    let poly = exact::charpoly(&build_ap(sigma, m)?);
    let root = BigInt::from(m);
    let monic = poly.last().is_some_and(One::is_one);
    let multiplicity_of_m = exact::root_multiplicity(&poly, &root);
    let (quotient, _) = exact::divide_by_linear(&poly, &root);
    let constant = quotient.first().cloned().unwrap_or_else(BigInt::one);
    let passes = monic && multiplicity_of_m == 1 && constant.abs().is_one();
    Ok(AlgebraicReport {
        charpoly: poly.iter().map(ToString::to_string).collect(),
        monic,
        multiplicity_of_m,
        quotient_constant: constant.to_string(),
        passes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShrinkReport {
    pub m: usize,
    pub n: usize,
    /// Algebraic multiplicity of 0 in `B·Q(σ)` (exact).
    pub zero_multiplicity_large: usize,
    /// Algebraic multiplicity of 0 in `A·P(σ)` (exact).
    pub zero_multiplicity_small: usize,
    /// The remaining eigenvalues of both matrices pair up within the
    /// threshold.
    pub nonzero_match: bool,
}

impl ShrinkReport {
    /// The extra zeros of the `Nm`-dimensional matrix number `N(m−1)`.
    pub fn zero_count_ok(&self) -> bool {
        self.zero_multiplicity_large == self.n * (self.m - 1) + self.zero_multiplicity_small
    }
}

fn drop_smallest(mut values: Vec<Complex64>, k: usize) -> Vec<Complex64> {
    values.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    values.split_off(k.min(values.len()))
}

/// Compares the spectrum of `B(m,N)·Q(σ)` with that of `A(m,N)·P(σ)`.
/// Zero eigenvalues are counted exactly from the characteristic
/// polynomials; the rest are matched numerically within `threshold`.
pub fn shrink_check(sigma: &Permutation, m: usize, threshold: f64) -> Result<ShrinkReport> {
    let n = sigma.n();
    let large = build_bq(sigma, m)?;
    let small = build_ap(sigma, m)?;
    let zl = exact::zero_multiplicity(&exact::charpoly(&large));
    let zs = exact::zero_multiplicity(&exact::charpoly(&small));
    let el = drop_smallest(eigen_spectrum(&large.to_f64(), DEFAULT_TOL)?.values(), zl);
    let es = drop_smallest(eigen_spectrum(&small.to_f64(), DEFAULT_TOL)?.values(), zs);
    Ok(ShrinkReport {
        m,
        n,
        zero_multiplicity_large: zl,
        zero_multiplicity_small: zs,
        nonzero_match: spectra_match(&el, &es, threshold),
    })
}

/// Exact test of `Λ_σ > 1/m` for mixing `σ∘f`.
///
/// Strip the simple root `m` and the zero roots from the characteristic
/// polynomial of `A·P(σ)`. The rest is monic with integer coefficients and
/// nonzero constant term, so all its roots lie in the closed unit disc iff
/// they are all roots of unity.
pub fn decelerates_exact(sigma: &Permutation, m: usize) -> Result<bool> {
    let n = sigma.n();
    if !classify_fast(sigma, m, n)?.is_mixing() {
        return Err(Error::NotMixing(format!("{sigma} with m = {m}")));
    }
    let poly = exact::charpoly(&build_ap(sigma, m)?);
    let zeros = exact::zero_multiplicity(&poly);
    let (rest, _) = exact::divide_by_linear(&poly[zeros..], &BigInt::from(m));
    Ok(rest.len() > 1 && !exact::roots_are_roots_of_unity(&rest))
}

/// `(geometric, algebraic)` multiplicity of the eigenvalue 0 of `B(m,N)`.
pub fn zero_multiplicities_of_b(m: usize, n: usize) -> Result<(usize, usize)> {
    let b = build_b(m, n)?;
    let geometric = b.dim() - exact::rank(&b);
    let algebraic = exact::zero_multiplicity(&exact::charpoly(&b));
    Ok((geometric, algebraic))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_on_thirds() {
        let r = algebraic_eigenvalue_check(&Permutation::identity(3), 2).unwrap();
        // (x − 2)(x − 1)(x + 1) = x³ − 2x² − x + 2
        assert_eq!(r.charpoly, vec!["2", "-1", "-2", "1"]);
        assert!(r.passes);
        assert_eq!(r.quotient_constant, "-1");
        assert!(algebraic_eigenvalue_check(&Permutation::identity(4), 2).is_err());
    }

    #[test]
    fn shrink_small_cases() {
        for (images, m) in [(vec![1, 2, 0], 2), (vec![0, 2, 1, 3], 2), (vec![3, 1, 0, 2], 3)] {
            let r = shrink_check(&Permutation::new(images).unwrap(), m, 1e-8).unwrap();
            assert!(r.nonzero_match);
            assert!(r.zero_count_ok());
        }
        // B(2,3) has a three-dimensional kernel
        let r = shrink_check(&Permutation::identity(3), 2, 1e-8).unwrap();
        assert_eq!(r.zero_multiplicity_large, 3);
    }

    #[test]
    fn exact_deceleration() {
        // identity on three cells keeps the rate; the worst permutation for
        // (2,5) has rate 0.809
        assert!(!decelerates_exact(&Permutation::identity(3), 2).unwrap());
        assert!(decelerates_exact(&Permutation::new(vec![0, 3, 1, 4, 2]).unwrap(), 2).unwrap());
        let split = Permutation::new(vec![0, 2, 1, 3]).unwrap();
        assert!(matches!(decelerates_exact(&split, 2), Err(Error::NotMixing(_))));
    }

    #[test]
    fn b_is_defective_when_not_coprime() {
        for (m, n) in [(2, 4), (2, 6), (3, 6)] {
            let (g, a) = zero_multiplicities_of_b(m, n).unwrap();
            assert!(g < a, "({m},{n}): geometric {g}, algebraic {a}");
        }
        let (g, a) = zero_multiplicities_of_b(2, 3).unwrap();
        assert_eq!(g, a);
    }
}
