//! Mixing rates `Λ_σ` and the worst-case permutation.

use nalgebra::DMatrix;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::eigen::{eigen_spectrum, Spectrum};
use super::matrices::build_ap;
use crate::error::{Error, Result};
use crate::exact;
use crate::perm::Permutation;

/// Spectral summary of `σ∘f` for `f(x) = mx mod 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    /// Largest eigenvalue modulus strictly inside the unit circle.
    pub lambda_sigma: f64,
    /// The only unit-modulus eigenvalue is a simple 1.
    pub spectral_mixing: bool,
    pub r_ess: f64,
    /// Exact dimension of the kernel of `mI − A·P(σ)`.
    pub eigenvalue_1_multiplicity: usize,
    #[serde(flatten)]
    pub spectrum: Spectrum,
}

/// `m⁻¹·A(m,N)·P(σ)` in floating point.
pub fn normalized_transfer(sigma: &Permutation, m: usize) -> Result<DMatrix<f64>> {
    Ok(build_ap(sigma, m)?.to_f64_scaled(m as f64))
}

/// Full rate report for `σ∘f`.
pub fn lambda_sigma(sigma: &Permutation, m: usize, tol: f64) -> Result<RateReport> {
    let ap = build_ap(sigma, m)?;
    let spectrum = eigen_spectrum(&ap.to_f64_scaled(m as f64), tol)?;
    let eigenvalue_1_multiplicity = ap.dim() - exact::rank(&ap.shifted_neg(m as i64));
    let spectral_mixing = spectrum.unit_circle_count == 1 && eigenvalue_1_multiplicity == 1;
    Ok(RateReport {
        lambda_sigma: spectrum.subunit_radius(),
        spectral_mixing,
        r_ess: 1.0 / m as f64,
        eigenvalue_1_multiplicity,
        spectrum,
    })
}

/// `Λ_σ` alone, for sweeps over many permutations.
pub fn rate_only(images: &[usize], m: usize, tol: f64) -> Result<f64> {
    let sigma = Permutation::new(images.to_vec())?;
    Ok(eigen_spectrum(&normalized_transfer(&sigma, m)?, tol)?.subunit_radius())
}

fn require_coprime(m: usize, n: usize) -> Result<()> {
    if m < 2 || n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need m >= 2 and N >= 2, got m = {m}, N = {n}"
        )));
    }
    if m.gcd(&n) != 1 {
        return Err(Error::InvalidParameter(format!(
            "gcd(m, N) must be 1, got gcd({m}, {n}) = {}",
            m.gcd(&n)
        )));
    }
    Ok(())
}

/// The permutation `w(i) = m⁻¹·i mod N`, for which `P(w)·A(m,N) = C(m,N)`:
/// row `i` of `P(w)·A` is row `w(i)` of `A`, whose run of ones starts at
/// `m·w(i) ≡ i`. `A·P(w)` is then conjugate to `C(m,N)` and `Λ_w` is the
/// largest possible rate.
pub fn worst_permutation(m: usize, n: usize) -> Result<Permutation> {
    require_coprime(m, n)?;
    let inv = (1..n).find(|&k| (k * m) % n == 1).unwrap_or(1);
    let w = Permutation::new((0..n).map(|i| (i * inv) % n).collect())?;
    Ok(w)
}

/// `|sin(πm/N) / (m·sin(π/N))|`, the maximum of `Λ_σ` over `S_N` when
/// `gcd(m,N) = 1` and `N > m`.
pub fn worst_rate_bound(m: usize, n: usize) -> Result<f64> {
    require_coprime(m, n)?;
    if n <= m {
        return Err(Error::InvalidParameter(format!("need N > m, got m = {m}, N = {n}")));
    }
    let (mf, nf) = (m as f64, n as f64);
    let pi = std::f64::consts::PI;
    Ok(((pi * mf / nf).sin() / (mf * (pi / nf).sin())).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specmat::matrices::{build_a, build_c, build_p};

    #[test]
    fn identity_on_m_cells_is_exact_in_one_step() {
        for m in 2..6 {
            let r = lambda_sigma(&Permutation::identity(m), m, 1e-9).unwrap();
            assert!(r.lambda_sigma < 1e-12);
            assert!(r.spectral_mixing);
            let zeros: usize = r
                .spectrum
                .eigenvalues
                .iter()
                .filter(|e| e.modulus() < 1e-9)
                .map(|e| e.mult)
                .sum();
            assert_eq!(zeros, m - 1);
        }
    }

    #[test]
    fn worst_permutation_values() {
        assert_eq!(worst_permutation(2, 5).unwrap().images(), &[0, 3, 1, 4, 2]);
        assert_eq!(worst_permutation(3, 5).unwrap().images(), &[0, 2, 4, 1, 3]);
        assert_eq!(worst_permutation(2, 3).unwrap().images(), &[0, 2, 1]);
        assert!(worst_permutation(2, 4).is_err());
        for (m, n) in [(2, 5), (3, 5), (2, 3), (3, 8), (4, 7)] {
            let w = worst_permutation(m, n).unwrap();
            let pa = build_p(&w).unwrap().mul(&build_a(m, n).unwrap());
            assert_eq!(pa, build_c(m, n).unwrap());
        }
    }

    #[test]
    fn worst_rate_for_2_5() {
        let w = worst_permutation(2, 5).unwrap();
        let r = lambda_sigma(&w, 2, 1e-9).unwrap();
        let want = (std::f64::consts::PI / 5.0).cos();
        assert!((r.lambda_sigma - want).abs() < 1e-12);
        assert!((worst_rate_bound(2, 5).unwrap() - want).abs() < 1e-15);
        assert!((worst_rate_bound(2, 3).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn non_mixing_has_extra_unit_eigenvalue() {
        let s = Permutation::new(vec![0, 2, 1, 3]).unwrap();
        let r = lambda_sigma(&s, 2, 1e-9).unwrap();
        assert!(!r.spectral_mixing);
        assert!(r.spectrum.unit_circle_count >= 2);
    }
}
