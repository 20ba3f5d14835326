//! Closed-form spectrum of the circulant `C(m,N)` and the spectral bound
//! for column-stochastic matrices composed with permutations.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::PI;

use super::eigen::eigenvalues;
use crate::error::{Error, Result};

/// `λ_j = Σ_{t<m} ω_j^t` with `ω_j = exp(2πij/N)`, for `j = 0..N-1`.
pub fn circulant_eigs(m: usize, n: usize) -> Result<Vec<Complex64>> {
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "circulant needs 1 <= m <= N, got m = {m}, N = {n}"
        )));
    }
    Ok((0..n)
        .map(|j| {
            (0..m)
                .map(|t| Complex64::from_polar(1.0, 2.0 * PI * ((j * t) % n) as f64 / n as f64))
                .sum()
        })
        .collect())
}

/// `|sin(mjπ/N) / sin(jπ/N)|` for `1 ≤ j < N`.
pub fn circulant_modulus(m: usize, n: usize, j: usize) -> f64 {
    // reduce the angles mod 2π exactly before calling sin
    let angle = |k: usize| ((k % (2 * n)) as f64 * PI / n as f64).sin();
    (angle(m * j) / angle(j)).abs()
}

/// The largest `|λ_j|` over `j ≠ 0`, attained at `j = 1`:
/// `|sin(mπ/N) / sin(π/N)|`.
pub fn circulant_max_modulus(m: usize, n: usize) -> Result<f64> {
    if m < 2 || m >= n {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= m < N, got m = {m}, N = {n}"
        )));
    }
    Ok(circulant_modulus(m, n, 1))
}

/// Orthonormal basis of the sum-zero subspace as the columns of an
/// `n × (n-1)` matrix (Helmert basis).
pub fn sum_zero_basis(n: usize) -> DMatrix<f64> {
    let mut u = DMatrix::zeros(n, n.saturating_sub(1));
    for k in 1..n {
        let norm = ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            u[(i, k - 1)] = 1.0 / norm;
        }
        u[(k, k - 1)] = -(k as f64) / norm;
    }
    u
}

/// Largest eigenvalue of `BᵀB` restricted to the sum-zero subspace, for a
/// column-stochastic `B`. Every eigenvalue of `B·P` on that subspace, for
/// any permutation matrix `P`, has modulus at most its square root.
pub fn stochastic_eta(b: &DMatrix<f64>) -> Result<f64> {
    let n = b.nrows();
    if n != b.ncols() || n == 0 {
        return Err(Error::InvalidParameter("need a nonempty square matrix".into()));
    }
    let deviation = b
        .column_iter()
        .map(|c| (c.sum() - 1.0).abs())
        .fold(0.0, f64::max);
    if deviation > 1e-12 || b.iter().any(|&v| v < 0.0) {
        return Err(Error::NotColumnStochastic { deviation });
    }
    if n == 1 {
        return Ok(0.0);
    }
    let u = sum_zero_basis(n);
    let bu = b * &u;
    let gram = bu.transpose() * &bu;
    let eig = SymmetricEigen::new(gram);
    Ok(eig.eigenvalues.iter().copied().fold(0.0, f64::max).max(0.0))
}

/// Eigenvalues of `M` restricted to the sum-zero subspace, which `M` must
/// leave invariant (true for column-stochastic `M`).
pub fn sum_zero_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let u = sum_zero_basis(m.nrows());
    eigenvalues(&(u.transpose() * m * &u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::specmat::eigen::spectra_match;
    use crate::specmat::matrices::build_c;

    #[test]
    fn closed_form_matches_solver() {
        for (m, n) in [(2, 5), (3, 5), (2, 4), (3, 8), (5, 12)] {
            let c = build_c(m, n).unwrap().to_f64();
            let want = circulant_eigs(m, n).unwrap();
            assert!(spectra_match(&eigenvalues(&c).unwrap(), &want, 1e-9));
            for (j, l) in want.iter().enumerate().skip(1) {
                assert!((l.norm() - circulant_modulus(m, n, j)).abs() < 1e-12);
            }
            assert!((want[0].re - m as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn examples() {
        let e = circulant_eigs(2, 4).unwrap();
        assert!(e[2].norm() < 1e-12);
        let golden = 2.0 * (PI / 5.0).cos();
        assert!((circulant_eigs(2, 5).unwrap()[1].norm() - golden).abs() < 1e-12);
        assert!((circulant_max_modulus(2, 5).unwrap() - golden).abs() < 1e-12);
        assert!((circulant_max_modulus(2, 3).unwrap() - 1.0).abs() < 1e-12);
        assert!((circulant_max_modulus(3, 8).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(exact::det(&build_c(3, 5).unwrap()).magnitude().to_string(), "3");
    }

    #[test]
    fn eta_examples() {
        let avg = DMatrix::from_element(4, 4, 0.25);
        assert!(stochastic_eta(&avg).unwrap().abs() < 1e-14);
        let p = DMatrix::from_fn(4, 4, |i, j| if j == (i + 1) % 4 { 1.0 } else { 0.0 });
        assert!((stochastic_eta(&p).unwrap() - 1.0).abs() < 1e-14);
        let bad = DMatrix::from_element(2, 2, 0.4);
        assert!(matches!(stochastic_eta(&bad), Err(Error::NotColumnStochastic { .. })));
        for (m, n) in [(2, 5), (3, 7), (2, 9)] {
            let b = build_c(m, n).unwrap().to_f64_scaled(m as f64);
            let want = (circulant_max_modulus(m, n).unwrap() / m as f64).powi(2);
            assert!((stochastic_eta(&b).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn helmert_basis_is_orthonormal() {
        let u = sum_zero_basis(6);
        let g = u.transpose() * &u;
        assert!((g - DMatrix::identity(5, 5)).norm() < 1e-14);
        assert!(u.column_iter().all(|c| c.sum().abs() < 1e-14));
    }
}
