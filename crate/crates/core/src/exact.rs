//! Exact linear algebra over the integers and the rationals.
//!
//! Characteristic polynomials and determinants of integer matrices are
//! computed modulo enough 31-bit primes to cover a Hadamard-type bound on
//! the result, then lifted with the Chinese remainder theorem. Ranks use
//! fraction-free (Bareiss) elimination, first in `i128` and on overflow in
//! `BigInt`. Kernels of rational matrices use plain Gauss-Jordan elimination
//! over `BigRational`.

use std::fmt::Write as _;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Square matrix with `i64` entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| i64::from(i == j))
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds from nested rows. Panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows must form a square matrix");
        Self {
            dim,
            data: rows.concat(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub(crate) fn add_at(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.dim + j] += v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.dim.max(1)).map(<[i64]>::to_vec).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    /// `c·I − self`.
    pub fn shifted_neg(&self, c: i64) -> Self {
        Self::from_fn(self.dim, |i, j| i64::from(i == j) * c - self.get(i, j))
    }

    pub fn row_sums(&self) -> Vec<i64> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j)).sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<i64> {
        (0..self.dim).map(|j| (0..self.dim).map(|i| self.get(i, j)).sum()).collect()
    }

    pub fn trace(&self) -> i64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j) as f64)
    }

    /// `self / denom` as a floating-point matrix.
    pub fn to_f64_scaled(&self, denom: f64) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j) as f64 / denom)
    }

    pub fn to_rational(&self) -> Vec<Vec<BigRational>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| BigRational::from_integer(BigInt::from(self.get(i, j))))
                    .collect()
            })
            .collect()
    }

    /// Comma-separated rows, one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", self.get(i, j));
            }
            out.push('\n');
        }
        out
    }

    /// log2 of `∏ (1 + ‖row_i‖₂)`, which bounds every coefficient of the
    /// characteristic polynomial (sum of principal minors, Hadamard).
    fn log2_coefficient_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                let s: f64 = (0..self.dim).map(|j| (self.get(i, j) as f64).powi(2)).sum();
                (1.0 + s.sqrt()).log2()
            })
            .sum()
    }
}

// ---------------------------------------------------------------------------
// modular arithmetic

fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let is_prime = |n: u64| {
            if n % 2 == 0 {
                return false;
            }
            let mut d = 3;
            while d * d <= n {
                if n % d == 0 {
                    return false;
                }
                d += 2;
            }
            true
        };
        let mut out = Vec::with_capacity(64);
        let mut c = (1u64 << 31) - 1;
        while out.len() < 64 {
            if is_prime(c) {
                out.push(c);
            }
            c -= 2;
        }
        out
    })
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

#[inline]
fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn reduce(m: &IntMatrix, p: u64) -> Vec<u64> {
    m.data.iter().map(|&v| v.rem_euclid(p as i64) as u64).collect()
}

/// Characteristic polynomial `det(xI − A)` modulo `p`, low degree first,
/// via reduction to Hessenberg form.
fn charpoly_mod(a: &IntMatrix, p: u64) -> Vec<u64> {
    let n = a.dim;
    let mut h = reduce(a, p);
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[i * n + j] != 0) else {
            continue;
        };
        if piv != j + 1 {
            for k in 0..n {
                h.swap(piv * n + k, (j + 1) * n + k);
            }
            for k in 0..n {
                h.swap(k * n + piv, k * n + j + 1);
            }
        }
        let inv = inv_mod(h[(j + 1) * n + j], p);
        for i in j + 2..n {
            let u = h[i * n + j] * inv % p;
            if u == 0 {
                continue;
            }
            for k in 0..n {
                let t = u * h[(j + 1) * n + k] % p;
                h[i * n + k] = (h[i * n + k] + p - t) % p;
            }
            for k in 0..n {
                h[k * n + j + 1] = (h[k * n + j + 1] + u * h[k * n + i]) % p;
            }
        }
    }
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 0..n {
        let prev = &polys[k];
        let mut next = vec![0u64; k + 2];
        let hkk = h[k * n + k];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] = (next[d + 1] + c) % p;
            next[d] = (next[d] + p - hkk * c % p) % p;
        }
        let mut prod = 1u64;
        for i in (0..k).rev() {
            prod = prod * h[(i + 1) * n + i] % p;
            if prod == 0 {
                break;
            }
            let c = h[i * n + k] * prod % p;
            if c == 0 {
                continue;
            }
            for (d, &q) in polys[i].iter().enumerate() {
                next[d] = (next[d] + p - c * q % p) % p;
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

fn det_mod(a: &IntMatrix, p: u64) -> u64 {
    let n = a.dim;
    let mut m = reduce(a, p);
    let mut det = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| m[r * n + c] != 0) else {
            return 0;
        };
        if piv != c {
            for k in 0..n {
                m.swap(piv * n + k, c * n + k);
            }
            det = (p - det) % p;
        }
        let d = m[c * n + c];
        det = det * d % p;
        let inv = inv_mod(d, p);
        for r in c + 1..n {
            let u = m[r * n + c] * inv % p;
            if u == 0 {
                continue;
            }
            for k in c..n {
                let t = u * m[c * n + k] % p;
                m[r * n + k] = (m[r * n + k] + p - t) % p;
            }
        }
    }
    det
}

/// Symmetric CRT lift of `residues[i] mod primes[i]`.
fn crt_symmetric(residues: &[u64], moduli: &[u64]) -> BigInt {
    let mut x = BigInt::from(residues[0]);
    let mut modulus = BigInt::from(moduli[0]);
    for (&r, &p) in residues.iter().zip(moduli).skip(1) {
        let pb = BigInt::from(p);
        let x_mod = x.mod_floor(&pb).to_u64().unwrap();
        let m_mod = modulus.mod_floor(&pb).to_u64().unwrap();
        let t = (r + p - x_mod) % p * inv_mod(m_mod, p) % p;
        x += &modulus * BigInt::from(t);
        modulus *= pb;
    }
    let half = &modulus >> 1;
    if x > half {
        x -= &modulus;
    }
    x
}

fn primes_for_bits(bits: f64) -> &'static [u64] {
    // each prime contributes just under 31 bits; +2 covers the sign
    let k = ((bits + 2.0) / 30.9).ceil().max(1.0) as usize;
    let ps = primes();
    assert!(k <= ps.len(), "coefficient bound too large for the prime table");
    &ps[..k]
}

/// Characteristic polynomial `det(xI − A)` with exact integer coefficients,
/// lowest degree first (the last entry is the leading coefficient 1).
pub fn charpoly(a: &IntMatrix) -> Vec<BigInt> {
    let n = a.dim;
    if n == 0 {
        return vec![BigInt::one()];
    }
    let ps = primes_for_bits(a.log2_coefficient_bound());
    let residues: Vec<Vec<u64>> = ps.iter().map(|&p| charpoly_mod(a, p)).collect();
    (0..=n)
        .map(|d| {
            let r: Vec<u64> = residues.iter().map(|c| c[d]).collect();
            crt_symmetric(&r, ps)
        })
        .collect()
}

/// Exact determinant.
pub fn det(a: &IntMatrix) -> BigInt {
    if a.dim == 0 {
        return BigInt::one();
    }
    let ps = primes_for_bits(a.log2_coefficient_bound());
    let r: Vec<u64> = ps.iter().map(|&p| det_mod(a, p)).collect();
    crt_symmetric(&r, ps)
}

/// Algebraic multiplicity of the eigenvalue 0: the number of vanishing
/// low-order coefficients of the characteristic polynomial.
pub fn zero_multiplicity(charpoly: &[BigInt]) -> usize {
    charpoly.iter().take_while(|c| c.is_zero()).count()
}

/// Synthetic division of `poly` (lowest degree first) by `x − root`.
/// Returns the quotient and the remainder.
pub fn divide_by_linear(poly: &[BigInt], root: &BigInt) -> (Vec<BigInt>, BigInt) {
    let deg = poly.len() - 1;
    let mut q = vec![BigInt::zero(); deg];
    let mut carry = BigInt::zero();
    for d in (0..=deg).rev() {
        let v = &poly[d] + &carry * root;
        if d == 0 {
            return (q, v);
        }
        q[d - 1] = v.clone();
        carry = v;
    }
    unreachable!()
}

/// Whether every root of the monic integer polynomial `poly` (lowest
/// degree first, nonzero constant term) is a root of unity.
///
/// Graeffe root squaring: if some root has modulus above 1 the
/// coefficients eventually exceed the binomial bounds that hold for roots
/// in the closed unit disc; otherwise (Kronecker) all roots are roots of
/// unity, the squared polynomials range over a finite set, and the
/// sequence repeats.
pub fn roots_are_roots_of_unity(poly: &[BigInt]) -> bool {
    let deg = poly.len() - 1;
    assert!(poly[deg].is_one(), "polynomial must be monic");
    assert!(!poly[0].is_zero(), "constant term must be nonzero");
    let bounds: Vec<BigInt> = (0..=deg).map(|i| crate::bigcomb::binomial(deg, i)).collect();
    let mut seen = std::collections::HashSet::new();
    let mut p = poly.to_vec();
    loop {
        if p.iter().zip(&bounds).any(|(c, b)| c.magnitude() > b.magnitude()) {
            return false;
        }
        if !seen.insert(p.clone()) {
            return true;
        }
        p = graeffe(&p);
    }
}

/// The monic polynomial whose roots are the squares of the roots of `p`.
fn graeffe(p: &[BigInt]) -> Vec<BigInt> {
    let deg = p.len() - 1;
    // p(x) = e(x²) + x·o(x²); roots squared: e(y)² − y·o(y)², up to sign
    let even: Vec<BigInt> = p.iter().step_by(2).cloned().collect();
    let odd: Vec<BigInt> = p.iter().skip(1).step_by(2).cloned().collect();
    let mut out = vec![BigInt::zero(); deg + 1];
    for (i, a) in even.iter().enumerate() {
        for (j, b) in even.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    for (i, a) in odd.iter().enumerate() {
        for (j, b) in odd.iter().enumerate() {
            out[i + j + 1] -= a * b;
        }
    }
    if deg % 2 == 1 {
        out.iter_mut().for_each(|c| *c = -c.clone());
    }
    out
}

/// Multiplicity of `root` as a root of `poly`.
pub fn root_multiplicity(poly: &[BigInt], root: &BigInt) -> usize {
    let mut p = poly.to_vec();
    let mut k = 0;
    while p.len() > 1 {
        let (q, r) = divide_by_linear(&p, root);
        if !r.is_zero() {
            break;
        }
        p = q;
        k += 1;
    }
    k
}

// ---------------------------------------------------------------------------
// Bareiss rank

trait BareissScalar: Clone + PartialEq {
    fn nil() -> Self;
    fn vanishes(&self) -> bool;
    /// `(a·b − c·d) / e`, exact by Sylvester's identity.
    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, e: &Self) -> Option<Self>;
}

impl BareissScalar for i128 {
    fn nil() -> Self {
        0
    }

    fn vanishes(&self) -> bool {
        *self == 0
    }

    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, e: &Self) -> Option<Self> {
        let num = a.checked_mul(*b)?.checked_sub(c.checked_mul(*d)?)?;
        Some(num / e)
    }
}

impl BareissScalar for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }

    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }

    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, e: &Self) -> Option<Self> {
        Some((a * b - c * d) / e)
    }
}

fn bareiss_rank<T: BareissScalar>(rows: usize, cols: usize, mut a: Vec<T>, one: T) -> Option<usize> {
    let mut prev = one;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i * cols + c].vanishes()) else {
            continue;
        };
        if piv != r {
            for k in 0..cols {
                a.swap(piv * cols + k, r * cols + k);
            }
        }
        let pivot = a[r * cols + c].clone();
        for i in r + 1..rows {
            let lead = a[i * cols + c].clone();
            for j in c + 1..cols {
                a[i * cols + j] =
                    T::cross_div(&a[i * cols + j], &pivot, &lead, &a[r * cols + j], &prev)?;
            }
            a[i * cols + c] = T::nil();
        }
        prev = pivot;
        r += 1;
    }
    Some(r)
}

/// Exact rank over the rationals of an integer matrix given as rows.
pub fn rank_of_rows(rows: &[Vec<i64>]) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let small: Vec<i128> = rows.iter().flatten().map(|&v| i128::from(v)).collect();
    if let Some(r) = bareiss_rank(nrows, ncols, small, 1i128) {
        return r;
    }
    let big: Vec<BigInt> = rows.iter().flatten().map(|&v| BigInt::from(v)).collect();
    bareiss_rank(nrows, ncols, big, BigInt::one()).expect("BigInt arithmetic cannot overflow")
}

pub fn rank(a: &IntMatrix) -> usize {
    rank_of_rows(&a.rows())
}

// ---------------------------------------------------------------------------
// rational elimination

/// Basis of the right kernel `{x : M x = 0}` of a rational matrix.
pub fn rational_kernel(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(piv, r);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![BigRational::zero(); cols];
            v[fc] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][fc].clone();
            }
            v
        })
        .collect()
}

/// Determinant of a square rational matrix.
pub fn rational_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        let p = a[c][c].clone();
        det *= &p;
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &p;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Best-effort conversion for display and bound comparisons.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    // fall back to scaling by bit lengths
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    let scaled = if shift >= 0 {
        BigRational::new(n.clone(), d << (shift as u64))
    } else {
        BigRational::new(n << ((-shift) as u64), d.clone())
    };
    let m = scaled.to_f64().unwrap_or(0.0);
    let v = m * 2f64.powi(shift as i32);
    if r.is_negative() {
        -v.abs()
    } else {
        v.abs()
    }
}
