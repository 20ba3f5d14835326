//! Fredholm matrices of piecewise linear Markov maps.
//!
//! On a Markov partition `I_0, .., I_{q-1}` with constant slope `s_i` on
//! `I_i` and 0/1 transition matrix `T` (`T_ij = 1` iff `I_j ⊆ f(I_i)`), the
//! transfer operator acts on step functions through `Φ(z)_ij = z·T_ij/|s_i|`.
//! A row vector `v` of cell values is pushed forward to `v·Φ(1)`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eigen::{eigen_spectrum, DEFAULT_TOL};
use super::matrices::build_bq;
use crate::error::{Error, Result};
use crate::exact::{self, IntMatrix};
use crate::perm::Permutation;
use crate::permcore::classify_fast;

#[derive(Clone, Debug, PartialEq)]
pub struct FredholmModel {
    slopes: Vec<BigRational>,
    lengths: Vec<BigRational>,
    transition: IntMatrix,
}

impl FredholmModel {
    pub fn new(slopes: Vec<BigRational>, lengths: Vec<BigRational>, transition: IntMatrix) -> Result<Self> {
        let q = transition.dim();
        if q == 0 || slopes.len() != q || lengths.len() != q {
            return Err(Error::InvalidParameter(format!(
                "partition of size {q} needs {q} slopes and lengths, got {} and {}",
                slopes.len(),
                lengths.len()
            )));
        }
        if slopes.iter().any(Zero::is_zero) {
            return Err(Error::InvalidParameter("slopes must be nonzero".into()));
        }
        if lengths.iter().any(|l| !l.is_positive()) || lengths.iter().sum::<BigRational>() != BigRational::one() {
            return Err(Error::InvalidParameter("cell lengths must be positive and sum to 1".into()));
        }
        for (i, row) in transition.rows().iter().enumerate() {
            if row.iter().any(|&v| v != 0 && v != 1) {
                return Err(Error::InvalidParameter("transition matrix must be 0/1".into()));
            }
            if row.iter().all(|&v| v == 0) {
                return Err(Error::InvalidParameter(format!("transition row {i} is empty")));
            }
        }
        Ok(Self {
            slopes,
            lengths,
            transition,
        })
    }

    /// `x ↦ 2x` on `[0, 1/2)`, `x ↦ x − 1/2` on `[1/2, 1)`.
    pub fn subshift() -> Self {
        let half = BigRational::new(1.into(), 2.into());
        Self {
            slopes: vec![BigRational::from_integer(2.into()), BigRational::one()],
            lengths: vec![half.clone(), half],
            transition: IntMatrix::from_rows(&[vec![1, 1], vec![1, 0]]),
        }
    }

    /// `σ∘f` with `f(x) = mx mod 1` on `Nm` equal cells; `N = σ.n()` may
    /// be 1.
    pub fn multiply(sigma: &Permutation, m: usize) -> Result<Self> {
        let transition = build_bq(sigma, m)?;
        let q = transition.dim();
        let cell = BigRational::new(BigInt::one(), BigInt::from(q));
        Ok(Self {
            slopes: vec![BigRational::from_integer(BigInt::from(m)); q],
            lengths: vec![cell; q],
            transition,
        })
    }

    pub fn partition_size(&self) -> usize {
        self.transition.dim()
    }

    pub fn slopes(&self) -> &[BigRational] {
        &self.slopes
    }

    pub fn lengths(&self) -> &[BigRational] {
        &self.lengths
    }

    pub fn transition(&self) -> &IntMatrix {
        &self.transition
    }

    /// `Φ(1)` with exact entries.
    pub fn unit_matrix_exact(&self) -> Vec<Vec<BigRational>> {
        let q = self.partition_size();
        (0..q)
            .map(|i| {
                let w = self.slopes[i].abs().recip();
                (0..q)
                    .map(|j| w.clone() * BigInt::from(self.transition.get(i, j)))
                    .collect()
            })
            .collect()
    }

    /// `Φ(1)` in floating point.
    pub fn unit_matrix(&self) -> DMatrix<f64> {
        let q = self.partition_size();
        let w: Vec<f64> = self.slopes.iter().map(|s| exact::ratio_to_f64(&s.abs().recip())).collect();
        DMatrix::from_fn(q, q, |i, j| w[i] * self.transition.get(i, j) as f64)
    }
}

/// `Φ(z)`.
pub fn fredholm_matrix(model: &FredholmModel, z: Complex64) -> DMatrix<Complex64> {
    model.unit_matrix().map(|v| z * v)
}

/// `D(z) = det(I − Φ(z))` by complex LU.
pub fn fredholm_determinant(model: &FredholmModel, z: Complex64) -> Complex64 {
    let q = model.partition_size();
    (DMatrix::<Complex64>::identity(q, q) - fredholm_matrix(model, z)).determinant()
}

/// `D(z)` exactly, for rational `z`.
pub fn fredholm_determinant_exact(model: &FredholmModel, z: &BigRational) -> BigRational {
    let phi = model.unit_matrix_exact();
    let m: Vec<Vec<BigRational>> = phi
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, v)| {
                    let id = if i == j { BigRational::one() } else { BigRational::zero() };
                    id - z * v
                })
                .collect()
        })
        .collect();
    exact::rational_det(&m)
}

/// Zeros of `D`, i.e. reciprocals of the nonzero eigenvalues of `Φ(1)`,
/// ordered by increasing modulus.
pub fn fredholm_zeros(model: &FredholmModel) -> Result<Vec<Complex64>> {
    let spectrum = eigen_spectrum(&model.unit_matrix(), DEFAULT_TOL)?;
    let mut zeros: Vec<Complex64> = spectrum
        .values()
        .into_iter()
        .filter(|l| l.norm() > 1e-12)
        .map(|l| l.inv())
        .collect();
    zeros.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(b.re.total_cmp(&a.re)));
    Ok(zeros)
}

/// Cell values of the invariant density: the left fixed vector of `Φ(1)`
/// normalized to `Σ v_i |I_i| = 1`. Fails if the fixed space is not
/// one-dimensional.
pub fn invariant_density(model: &FredholmModel) -> Result<Vec<BigRational>> {
    let phi = model.unit_matrix_exact();
    let q = phi.len();
    // (Φᵀ − I) vᵀ = 0
    let system: Vec<Vec<BigRational>> = (0..q)
        .map(|i| {
            (0..q)
                .map(|j| {
                    let id = if i == j { BigRational::one() } else { BigRational::zero() };
                    phi[j][i].clone() - id
                })
                .collect()
        })
        .collect();
    let kernel = exact::rational_kernel(&system);
    if kernel.len() != 1 {
        return Err(Error::NotErgodic {
            multiplicity: kernel.len(),
        });
    }
    let v = &kernel[0];
    let mass: BigRational = v.iter().zip(&model.lengths).map(|(a, l)| a * l).sum();
    if mass.is_zero() {
        return Err(Error::NotErgodic { multiplicity: 1 });
    }
    Ok(v.iter().map(|a| a / &mass).collect())
}

/// `(r_ess, h)`: `r_ess = exp(−∫ log|f′| ρ)` and `h` the log of the
/// spectral radius of the transition matrix.
pub fn r_ess_and_entropy(model: &FredholmModel) -> Result<(f64, f64)> {
    let rho = invariant_density(model)?;
    let xi: f64 = rho
        .iter()
        .zip(&model.lengths)
        .zip(&model.slopes)
        .map(|((r, l), s)| exact::ratio_to_f64(&(r * l)) * exact::ratio_to_f64(&s.abs()).ln())
        .sum();
    let radius = eigen_spectrum(&model.transition.to_f64(), DEFAULT_TOL)?.spectral_radius();
    Ok(((-xi).exp(), radius.ln()))
}

/// `|log D(z) + Σ_{n=1}^{K} zⁿ tr(Φ(1)ⁿ)/n|`, with the imaginary part of the
/// logarithm reduced to `(−π, π]`.
pub fn zeta_identity_check(model: &FredholmModel, z: Complex64, order: usize) -> Result<f64> {
    if order == 0 {
        return Err(Error::InvalidParameter("truncation order must be positive".into()));
    }
    let phi = model.unit_matrix();
    let radius = eigen_spectrum(&phi, DEFAULT_TOL)?.spectral_radius();
    if z.norm() * radius >= 1.0 {
        return Err(Error::OutsideConvergence {
            z: z.norm(),
            radius: 1.0 / radius,
        });
    }
    let mut power = phi.clone();
    let mut zn = z;
    let mut series = Complex64::zero();
    for n in 1..=order {
        series += zn * power.trace() / n as f64;
        power = &power * &phi;
        zn *= z;
    }
    let d = fredholm_determinant(model, z);
    let mut r = d.ln() + series;
    let tau = 2.0 * std::f64::consts::PI;
    r.im -= tau * (r.im / tau).round();
    Ok(r.norm())
}

/// A single step that shrinks the deviation by more than this factor has
/// annihilated it; what is left is rounding noise.
const COLLAPSE_RATIO: f64 = 1e-8;

/// Fitted exponential decay factor of `‖v_k − ρ‖₁` for `v_{k+1} = v_k·Φ(1)`
/// on the `Nm`-cell refinement (`ρ ≡ 1`), started from a random density
/// drawn with `seed`.
///
/// The deviation `e_k = v_k − ρ` obeys `e_{k+1} = e_k·Φ(1)`, so it is
/// iterated directly: each step removes its mean (the `ρ` direction, which
/// only rounding can feed) and rescales it to unit norm, accumulating
/// `log‖e_k‖`. Without the rescaling the residual reaches the rounding
/// floor within a few dozen steps. Iteration stops early if the deviation
/// vanishes. The first fifth of the recorded points is discarded as
/// transient and a least-squares line is fitted to the rest; returns 0 when
/// fewer than two points remain.
pub fn density_evolution_rate(sigma: &Permutation, m: usize, steps: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = sigma.n() * m;
    let v: Vec<f64> = (0..q).map(|_| rng.random_range(0.0..1.0)).collect();
    density_evolution_rate_from(sigma, m, steps, v)
}

/// [`density_evolution_rate`] from a given nonnegative starting vector.
pub fn density_evolution_rate_from(sigma: &Permutation, m: usize, steps: usize, v: Vec<f64>) -> Result<f64> {
    if steps < 10 {
        return Err(Error::InvalidParameter(format!("need at least 10 steps, got {steps}")));
    }
    if !classify_fast(sigma, m, sigma.n())?.is_mixing() {
        return Err(Error::NotMixing(format!("{sigma} with m = {m}")));
    }
    let bq = build_bq(sigma, m)?;
    let q = bq.dim();
    if v.len() != q || v.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "starting vector must have {q} nonnegative entries"
        )));
    }
    let mass: f64 = v.iter().sum::<f64>() / q as f64;
    if mass == 0.0 {
        return Err(Error::InvalidParameter("starting vector is zero".into()));
    }
    let mut e: Vec<f64> = v.iter().map(|x| x / mass - 1.0).collect();
    let targets: Vec<Vec<usize>> = bq
        .rows()
        .iter()
        .map(|r| r.iter().enumerate().filter(|(_, &x)| x != 0).map(|(j, _)| j).collect())
        .collect();
    let norm = |x: &[f64]| x.iter().map(|a| a.abs()).sum::<f64>() / q as f64;
    let inv_m = 1.0 / m as f64;
    let mut log_residuals = Vec::with_capacity(steps + 1);
    let mut current = norm(&e);
    let mut log_scale = 0.0;
    let mut next = vec![0.0; q];
    for _ in 0..=steps {
        if current == 0.0 {
            return Ok(0.0);
        }
        log_scale += current.ln();
        log_residuals.push(log_scale);
        e.iter_mut().for_each(|x| *x /= current);
        next.iter_mut().for_each(|x| *x = 0.0);
        for (i, ts) in targets.iter().enumerate() {
            for &j in ts {
                next[j] += e[i] * inv_m;
            }
        }
        let mean = next.iter().sum::<f64>() / q as f64;
        next.iter_mut().for_each(|x| *x -= mean);
        std::mem::swap(&mut e, &mut next);
        current = norm(&e);
        if current < COLLAPSE_RATIO {
            // the deviation died out (nilpotent part only)
            return Ok(0.0);
        }
    }
    let end = log_residuals.len();
    let pts: Vec<(f64, f64)> = log_residuals
        .iter()
        .enumerate()
        .skip(end / 5)
        .map(|(k, &r)| (k as f64, r))
        .collect();
    if pts.len() < 2 {
        return Ok(0.0);
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx).powi(2)));
    Ok((sxy / sxx).exp())
}
