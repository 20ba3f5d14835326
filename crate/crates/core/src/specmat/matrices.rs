//! Integer transition matrices of `σ∘f` for `f(x) = mx mod 1`.
//!
//! With `N` equal subintervals, `A(m,N)` records which subintervals the
//! image of each subinterval covers. On the refined partition into `Nm`
//! pieces, `B(m,N)` is the (0/1) Markov transition matrix of `f`, and
//! `Q(σ)` is the interval exchange acting on that refinement. `C(m,N)` is
//! the circulant with `m` consecutive ones per row.

use crate::error::{Error, Result};
use crate::exact::IntMatrix;
use crate::perm::Permutation;

/// Default cap on the dimension of any built matrix.
pub const DEFAULT_DIM_CAP: usize = 4096;

fn check_dim(what: &'static str, value: usize) -> Result<()> {
    if value > DEFAULT_DIM_CAP {
        return Err(Error::TooLarge {
            what,
            value,
            cap: DEFAULT_DIM_CAP,
        });
    }
    Ok(())
}

fn check_params(m: usize, n: usize) -> Result<()> {
    if m < 2 || n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need m >= 2 and N >= 2, got m = {m}, N = {n}"
        )));
    }
    Ok(())
}

/// `A(m,N)_ij` = number of `d ∈ [0,m)` with `j ≡ mi + d (mod N)`.
///
/// For `m ≤ N` this is the usual 0/1 matrix. For `m > N` some image
/// subintervals are covered more than once and the entry counts the
/// covers, which keeps every row and column sum equal to `m`.
pub fn build_a(m: usize, n: usize) -> Result<IntMatrix> {
    check_params(m, n)?;
    check_dim("N", n)?;
    let mut a = IntMatrix::zeros(n);
    for i in 0..n {
        for d in 0..m {
            a.add_at(i, (m * i + d) % n, 1);
        }
    }
    Ok(a)
}

/// `B(m,N)_ij = 1` iff `j ≡ mi + d (mod Nm)` for some `d ∈ [0,m)`.
pub fn build_b(m: usize, n: usize) -> Result<IntMatrix> {
    check_params(m, n)?;
    let dim = n.checked_mul(m).unwrap_or(usize::MAX);
    check_dim("Nm", dim)?;
    let mut b = IntMatrix::zeros(dim);
    for i in 0..dim {
        for d in 0..m {
            b.set(i, (m * i + d) % dim, 1);
        }
    }
    Ok(b)
}

/// `C(m,N)_ij = 1` iff `j ≡ i + r (mod N)` for some `r ∈ [0,m)`.
pub fn build_c(m: usize, n: usize) -> Result<IntMatrix> {
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "circulant needs 1 <= m <= N, got m = {m}, N = {n}"
        )));
    }
    check_dim("N", n)?;
    let mut c = IntMatrix::zeros(n);
    for i in 0..n {
        for r in 0..m {
            c.set(i, (i + r) % n, 1);
        }
    }
    Ok(c)
}

/// `P(σ)_ij = 1` iff `j = σ(i)`.
pub fn build_p(sigma: &Permutation) -> Result<IntMatrix> {
    check_dim("N", sigma.n())?;
    let mut p = IntMatrix::zeros(sigma.n());
    for i in 0..sigma.n() {
        p.set(i, sigma.apply(i), 1);
    }
    Ok(p)
}

/// `P(σ)` with every entry replaced by an `m×m` block (identity or zero).
pub fn build_q(sigma: &Permutation, m: usize) -> Result<IntMatrix> {
    if m == 0 {
        return Err(Error::InvalidParameter("block size must be positive".into()));
    }
    let dim = sigma.n().checked_mul(m).unwrap_or(usize::MAX);
    check_dim("Nm", dim)?;
    let mut q = IntMatrix::zeros(dim);
    for i in 0..sigma.n() {
        let j = sigma.apply(i);
        for k in 0..m {
            q.set(m * i + k, m * j + k, 1);
        }
    }
    Ok(q)
}

/// `A(m,N)·P(σ)`, built directly: row `i` carries the multiset
/// `σ(mi + d mod N)`, `d ∈ [0,m)`.
pub fn build_ap(sigma: &Permutation, m: usize) -> Result<IntMatrix> {
    let n = sigma.n();
    check_params(m, n)?;
    check_dim("N", n)?;
    let mut ap = IntMatrix::zeros(n);
    for i in 0..n {
        for d in 0..m {
            ap.add_at(i, sigma.apply((m * i + d) % n), 1);
        }
    }
    Ok(ap)
}

/// `B(m,N)·Q(σ)`, the transition matrix of `σ∘f` on the `Nm`-piece
/// refinement. Unlike the other builders this accepts `N = 1`.
pub fn build_bq(sigma: &Permutation, m: usize) -> Result<IntMatrix> {
    let n = sigma.n();
    if m < 2 {
        return Err(Error::InvalidParameter(format!("need m >= 2, got {m}")));
    }
    let dim = n.checked_mul(m).unwrap_or(usize::MAX);
    check_dim("Nm", dim)?;
    let mut bq = IntMatrix::zeros(dim);
    for i in 0..dim {
        for d in 0..m {
            let j = (m * i + d) % dim;
            bq.set(i, m * sigma.apply(j / m) + j % m, 1);
        }
    }
    Ok(bq)
}
