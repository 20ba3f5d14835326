//! Dense nonsymmetric eigenvalues.
//!
//! Diagonal balancing, Householder reduction to upper Hessenberg form and
//! the Francis double-shift QR iteration with Wilkinson and MATLAB-style
//! exceptional shifts (after EISPACK `balanc`/`orthes`/`hqr`). Only
//! eigenvalues are computed.
//!
//! Defective eigenvalues (nontrivial Jordan blocks, which do occur for these
//! transition matrices, e.g. at roots of unity) come back from any
//! backward-stable solver as a ring of radius about `eps^(1/k)` around the
//! true value, while the mean of the ring is accurate to working precision.
//! [`eigen_spectrum`] therefore groups nearby eigenvalues into clusters and
//! reports each cluster once, at its centroid, with the cluster size as its
//! multiplicity.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default accuracy target for eigenvalue-modulus decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Radius (relative to `max(1, ‖M‖∞)`) within which computed eigenvalues
/// are treated as one cluster. Generous enough to swallow the split of a
/// Jordan block of size four, `(2.2e-16)^(1/4) ≈ 1.2e-4`.
pub const CLUSTER_RADIUS: f64 = 2e-4;

/// Largest dimension accepted by the solver.
pub const MAX_DIM: usize = 4096;

/// Cap on QR sweeps spent deflating one eigenvalue (or pair) is
/// `SWEEPS_PER_DIM · max(10, n)`.
const SWEEPS_PER_DIM: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
    pub mult: usize,
}

impl Eigenvalue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn modulus(&self) -> f64 {
        self.value().norm()
    }
}

/// Eigenvalue multiset of a real matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<Eigenvalue>,
    pub tolerance: f64,
    /// Number of eigenvalues (with multiplicity) with `||λ| − 1| < tolerance`.
    pub unit_circle_count: usize,
}

impl Spectrum {
    /// Total multiplicity, i.e. the matrix dimension.
    pub fn dim(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.mult).sum()
    }

    /// Every eigenvalue repeated according to its multiplicity.
    pub fn values(&self) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value(), e.mult))
            .collect()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(Eigenvalue::modulus).fold(0.0, f64::max)
    }

    /// Largest modulus strictly inside the unit circle (by `tolerance`);
    /// zero if there is none.
    pub fn subunit_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(Eigenvalue::modulus)
            .filter(|&r| r < 1.0 - self.tolerance)
            .fold(0.0, f64::max)
    }
}

/// Raw eigenvalues of a square real matrix, in no particular order.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::InvalidParameter(format!(
            "eigenvalues need a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if n > MAX_DIM {
        return Err(Error::TooLarge {
            what: "matrix dimension",
            value: n,
            cap: MAX_DIM,
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let mut h: Vec<f64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            h.push(m[(i, j)]);
        }
    }
    balance(&mut h, n);
    hessenberg(&mut h, n);
    hqr(&mut h, n)
}

/// Full spectrum with clustered multiplicities and unit-circle count.
pub fn eigen_spectrum(m: &DMatrix<f64>, tol: f64) -> Result<Spectrum> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::InvalidParameter(format!(
            "eigen tolerance must lie in (0, 1e-6], got {tol}"
        )));
    }
    let raw = eigenvalues(m)?;
    let scale = m
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(1.0, f64::max);
    let eigenvalues = cluster(&raw, CLUSTER_RADIUS * scale);
    let unit_circle_count = eigenvalues
        .iter()
        .filter(|e| (e.modulus() - 1.0).abs() < tol)
        .map(|e| e.mult)
        .sum();
    Ok(Spectrum {
        eigenvalues,
        tolerance: tol,
        unit_circle_count,
    })
}

/// Single-linkage clustering; each cluster is reported at its centroid.
/// Output is sorted by decreasing modulus, then by argument.
fn cluster(values: &[Complex64], radius: f64) -> Vec<Eigenvalue> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push((Complex64::new(0.0, 0.0), 0));
        }
        let g = &mut groups[slot[r]];
        g.0 += values[i];
        g.1 += 1;
    }
    let mut out: Vec<Eigenvalue> = groups
        .into_iter()
        .map(|(sum, k)| {
            let c = sum / k as f64;
            // conjugate-symmetric clusters on the real axis are real
            let im = if c.im.abs() <= 1e-14 * c.norm().max(1.0) { 0.0 } else { c.im };
            Eigenvalue {
                re: c.re,
                im,
                mult: k,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.modulus()
            .total_cmp(&a.modulus())
            .then(b.im.total_cmp(&a.im))
            .then(b.re.total_cmp(&a.re))
    });
    out
}

fn balance(a: &mut [f64], n: usize) {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].abs();
                    r += a[i * n + j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= SQRDX;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= SQRDX;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[i * n + j] *= g;
                    }
                    for j in 0..n {
                        a[j * n + i] *= f;
                    }
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form, in place.
fn hessenberg(h: &mut [f64], n: usize) {
    if n < 3 {
        return;
    }
    let mut ort = vec![0.0; n];
    for m in 1..n - 1 {
        let scale: f64 = (m..n).map(|i| h[i * n + m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..n).rev() {
            ort[i] = h[i * n + m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let f: f64 = (m..n).rev().map(|i| ort[i] * h[i * n + j]).sum::<f64>() / hh;
            for i in m..n {
                h[i * n + j] -= f * ort[i];
            }
        }
        for i in 0..n {
            let f: f64 = (m..n).rev().map(|j| ort[j] * h[i * n + j]).sum::<f64>() / hh;
            for j in m..n {
                h[i * n + j] -= f * ort[j];
            }
        }
        h[m * n + m - 1] = scale * g;
        for i in m + 1..n {
            h[i * n + m - 1] = 0.0;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift
/// QR algorithm.
fn hqr(h: &mut [f64], nn: usize) -> Result<Vec<Complex64>> {
    let at = |i: usize, j: usize| i * nn + j;
    let eps = f64::EPSILON;
    let mut wr = vec![0.0; nn];
    let mut wi = vec![0.0; nn];
    if nn == 0 {
        return Ok(Vec::new());
    }
    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[at(i, j)].abs();
        }
    }
    let mut n = nn as isize - 1;
    let mut exshift = 0.0;
    let mut iter = 0usize;
    let mut total = 0usize;
    let (mut p, mut q, mut r, mut s, mut z);
    let (mut w, mut x, mut y);
    while n >= 0 {
        let nu = n as usize;
        // look for a single small subdiagonal element
        let mut l = nu;
        while l > 0 {
            // relative to the neighbouring diagonal, floored at eps·‖H‖ so
            // that blocks of negligible size still deflate
            s = (h[at(l - 1, l - 1)].abs() + h[at(l, l)].abs()).max(eps * norm);
            if h[at(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }
        if l == nu {
            // one root
            wr[nu] = h[at(nu, nu)] + exshift;
            wi[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            // two roots
            w = h[at(nu, nu - 1)] * h[at(nu - 1, nu)];
            p = (h[at(nu - 1, nu - 1)] - h[at(nu, nu)]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            x = h[at(nu, nu)] + exshift;
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                wr[nu - 1] = x + z;
                wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                wi[nu - 1] = 0.0;
                wi[nu] = 0.0;
            } else {
                wr[nu - 1] = x + p;
                wr[nu] = x + p;
                wi[nu - 1] = z;
                wi[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[at(nu, nu)];
            y = h[at(nu - 1, nu - 1)];
            w = h[at(nu, nu - 1)] * h[at(nu - 1, nu)];
            if iter > 0 && iter % 20 == 10 {
                // Wilkinson's ad hoc shift
                exshift += x;
                for i in 0..=nu {
                    h[at(i, i)] -= x;
                }
                s = h[at(nu, nu - 1)].abs() + h[at(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter > 0 && iter % 20 == 0 {
                // MATLAB's ad hoc shift
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[at(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            total += 1;
            if iter > SWEEPS_PER_DIM * nn.max(10) {
                return Err(Error::NoConvergence {
                    dim: nn,
                    iterations: total,
                });
            }
            // look for two consecutive small subdiagonal elements
            let mut m = nu - 2;
            loop {
                z = h[at(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[at(m + 1, m)] + h[at(m, m + 1)];
                q = h[at(m + 1, m + 1)] - z - r - s;
                r = h[at(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[at(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[at(m - 1, m - 1)].abs() + z.abs() + h[at(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[at(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[at(i, i - 3)] = 0.0;
                }
            }
            // double QR step on rows l..=n, columns m..=n
            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[at(k, k - 1)];
                    q = h[at(k + 1, k - 1)];
                    r = if notlast { h[at(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                } else {
                    x = 0.0;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s == 0.0 {
                    continue;
                }
                if k != m {
                    h[at(k, k - 1)] = -s * x;
                } else if l != m {
                    h[at(k, k - 1)] = -h[at(k, k - 1)];
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;
                for j in k..nn {
                    let mut t = h[at(k, j)] + q * h[at(k + 1, j)];
                    if notlast {
                        t += r * h[at(k + 2, j)];
                        h[at(k + 2, j)] -= t * z;
                    }
                    h[at(k, j)] -= t * x;
                    h[at(k + 1, j)] -= t * y;
                }
                for i in 0..=nu.min(k + 3) {
                    let mut t = x * h[at(i, k)] + y * h[at(i, k + 1)];
                    if notlast {
                        t += z * h[at(i, k + 2)];
                        h[at(i, k + 2)] -= t * r;
                    }
                    h[at(i, k)] -= t;
                    h[at(i, k + 1)] -= t * q;
                }
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect())
}

/// Whether two eigenvalue multisets can be paired off so that every pair is
/// within `threshold` (a perfect bipartite matching in the threshold graph).
pub fn spectra_match(a: &[Complex64], b: &[Complex64], threshold: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    let adj: Vec<Vec<usize>> = a
        .iter()
        .map(|x| (0..n).filter(|&j| (x - b[j]).norm() <= threshold).collect())
        .collect();
    let mut owner = vec![usize::MAX; n];
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [usize]) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if owner[v] == usize::MAX || augment(owner[v], adj, seen, owner) {
                    owner[v] = u;
                    return true;
                }
            }
        }
        false
    }
    for u in 0..n {
        let mut seen = vec![false; n];
        if !augment(u, &adj, &mut seen, &mut owner) {
            return false;
        }
    }
    true
}
