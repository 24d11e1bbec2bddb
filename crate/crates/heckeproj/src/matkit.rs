//! Dense complex linear algebra sized for small tensor cubes (up to ~256x256).
//!
//! Everything is plain row-major `Vec<Complex64>` storage with textbook
//! kernels: Kronecker products, partial traces, a cyclic Jacobi eigensolver
//! for Hermitian matrices, singular values through `A* A`, and an LU-based
//! inverse. All operations are pure; `CMatrix` values are immutable once
//! built and safe to share across threads.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default relative tolerance for numerical rank decisions.
pub const RANK_REL_TOL: f64 = 1e-8;
/// Default tolerance for merging eigenvalue clusters.
pub const CLUSTER_TOL: f64 = 1e-7;

/// Dense complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Matrix unit E_ab (0-based indices): 1 at (a, b), zero elsewhere.
    pub fn unit(n: usize, a: usize, b: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(a, b)] = C64::new(1.0, 0.0);
        m
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged row lengths".into()));
        }
        let data: Vec<C64> = rows.into_iter().flatten().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BadDimension("non-finite matrix entry".into()));
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Plain transpose, no conjugation.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate, no transpose.
    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ||A - A*||_F, the distance from the Hermitian cone.
    pub fn hermitian_defect(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Hermitian part (A + A*)/2.
    pub fn hermitize(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        // ikj order keeps the inner loop contiguous in both operands.
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d += a * s;
                }
            }
        }
        out
    }

    /// tr(A B) without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut s = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += self[(i, j)] * other[(j, i)];
            }
        }
        s
    }

    /// Maximum absolute entrywise difference.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, other: &CMatrix) -> CMatrix {
        self.matmul(other)
    }
}

// CMatrix serializes as row-major nested arrays with [re, im] entries.
impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| [self[(i, j)].re, self[(i, j)].im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let converted: Vec<Vec<C64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        CMatrix::from_rows(converted).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Kronecker product: (a (x) b)[(i*rb + k), (j*cb + l)] = a[i,j] * b[k,l].
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = CMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij.re == 0.0 && aij.im == 0.0 {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Conjugate transpose of `a`.
pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

/// Partial trace over one tensor factor of a matrix on (C^n)^(x legs).
///
/// `traced_leg` is 1-based; legs are ordered most-significant first, matching
/// the Kronecker product convention used throughout.
pub fn partial_trace(a: &CMatrix, n: usize, legs: usize, traced_leg: usize) -> Result<CMatrix> {
    let dim = n.checked_pow(legs as u32).ok_or_else(|| {
        Error::DimensionMismatch(format!("n^legs overflows for n={n}, legs={legs}"))
    })?;
    if a.rows() != dim || a.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "expected {dim}x{dim} for n={n}, legs={legs}, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if traced_leg == 0 || traced_leg > legs {
        return Err(Error::DimensionMismatch(format!(
            "traced_leg {traced_leg} out of range 1..={legs}"
        )));
    }
    // Split an index into (high, mid, low) around the traced leg.
    let low = n.pow((legs - traced_leg) as u32);
    let out_dim = dim / n;
    let mut out = CMatrix::zeros(out_dim, out_dim);
    for ih in 0..out_dim / low {
        for il in 0..low {
            for jh in 0..out_dim / low {
                for jl in 0..low {
                    let mut s = C64::new(0.0, 0.0);
                    for t in 0..n {
                        let row = (ih * n + t) * low + il;
                        let col = (jh * n + t) * low + jl;
                        s += a[(row, col)];
                    }
                    out[(ih * low + il, jh * low + jl)] = s;
                }
            }
        }
    }
    Ok(out)
}

fn check_hermitian(a: &CMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::BadDimension(format!("expected square, got {}x{}", a.rows(), a.cols())));
    }
    let defect = a.hermitian_defect();
    let tol = 1e-10 * (1.0 + a.frobenius_norm());
    if defect > tol {
        return Err(Error::NotHermitian { defect, tol });
    }
    Ok(())
}

/// Full Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching unitary of
/// eigenvectors as columns. Convergence: off-diagonal Frobenius mass below
/// 1e-13 * ||a||_F within a budget of 100 sweeps.
pub fn eigh(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(a)?;
    let n = a.rows();
    if n == 0 {
        return Ok((vec![], CMatrix::zeros(0, 0)));
    }
    let mut m = a.hermitize();
    let mut v = CMatrix::identity(n);
    let anorm = m.frobenius_norm();
    if anorm == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let target = 1e-13 * anorm;
    let skip = 1e-17 * anorm;
    const MAX_SWEEPS: usize = 100;

    let mut converged = false;
    let mut off = 0.0;
    for _ in 0..MAX_SWEEPS {
        off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * m[(i, j)].norm_sqr();
            }
        }
        off = off.sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let g = m[(p, q)];
                let h = g.norm();
                if h <= skip {
                    continue;
                }
                let phase = g / h;
                let alpha = m[(p, p)].re;
                let beta = m[(q, q)].re;
                let delta = alpha - beta;
                let t = if delta == 0.0 {
                    1.0
                } else {
                    2.0 * h / (delta + delta.signum() * (delta * delta + 4.0 * h * h).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J differs from the identity only in the (p, q) plane:
                // J[p,p] = c, J[p,q] = -s, J[q,p] = s*conj(phase), J[q,q] = c*conj(phase).
                let jqp = C64::new(s, 0.0) * phase.conj();
                let jqq = C64::new(c, 0.0) * phase.conj();
                // Column update: A <- A J, V <- V J.
                for i in 0..n {
                    let aip = m[(i, p)];
                    let aiq = m[(i, q)];
                    m[(i, p)] = aip * c + aiq * jqp;
                    m[(i, q)] = aip * (-s) + aiq * jqq;
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c + viq * jqp;
                    v[(i, q)] = vip * (-s) + viq * jqq;
                }
                // Row update: A <- J* A.
                for j in 0..n {
                    let apj = m[(p, j)];
                    let aqj = m[(q, j)];
                    m[(p, j)] = apj * c + aqj * jqp.conj();
                    m[(q, j)] = apj * (-s) + aqj * jqq.conj();
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS, off });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let vecs = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((vals, vecs))
}

/// Merge sorted values into clusters of nearby points.
///
/// Values within `cluster_tol` of the running cluster are merged; the cluster
/// value is the mean of its members.
pub fn cluster_values(sorted: &[f64], cluster_tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        let mut sum = sorted[i];
        while j < sorted.len() && sorted[j] - sorted[j - 1] <= cluster_tol {
            sum += sorted[j];
            j += 1;
        }
        out.push((sum / (j - i) as f64, j - i));
        i = j;
    }
    out
}

/// Clustered spectrum of a Hermitian matrix, ascending.
pub fn eig_hermitian(a: &CMatrix, cluster_tol: f64) -> Result<Vec<(f64, usize)>> {
    let (vals, _) = eigh(a)?;
    Ok(cluster_values(&vals, cluster_tol))
}

/// Singular values in descending order.
///
/// For a Hermitian input this is |eig(A)|, which equals sqrt(eig(A* A))
/// but resolves small singular values down to machine precision instead of
/// the sqrt(eps) floor of the squared route. Non-Hermitian inputs go through
/// eig(A* A).
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    let mut sv: Vec<f64> =
        if a.is_square() && a.hermitian_defect() <= 1e-12 * (1.0 + a.frobenius_norm()) {
            let (vals, _) = eigh(a)?;
            vals.iter().map(|v| v.abs()).collect()
        } else {
            let gram = a.adjoint().matmul(a);
            let (vals, _) = eigh(&gram)?;
            vals.iter().map(|&v| v.max(0.0).sqrt()).collect()
        };
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(sv)
}

/// Number of singular values above rel_tol times the largest one.
pub fn rank_eps(a: &CMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(a).expect("Gram matrix A*A is Hermitian by construction");
    match sv.first() {
        None => 0,
        Some(&smax) if smax == 0.0 => 0,
        Some(&smax) => sv.iter().take_while(|&&s| s > rel_tol * smax).count(),
    }
}

/// (trace norm, Frobenius norm).
pub fn norms(a: &CMatrix) -> (f64, f64) {
    let trace_norm = singular_values(a)
        .expect("Gram matrix A*A is Hermitian by construction")
        .iter()
        .sum();
    (trace_norm, a.frobenius_norm())
}

/// LU decomposition with partial pivoting; returns (LU packed, pivots, sign).
fn lu_decompose(a: &CMatrix) -> Result<(CMatrix, Vec<usize>, f64)> {
    if !a.is_square() {
        return Err(Error::BadDimension("inverse of non-square matrix".into()));
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for k in 0..n {
        let (pmax, vmax) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if vmax == 0.0 {
            return Err(Error::Singular);
        }
        if pmax != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pmax, j)];
                lu[(pmax, j)] = tmp;
            }
            piv.swap(k, pmax);
            sign = -sign;
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            for j in (k + 1)..n {
                let sub = factor * lu[(k, j)];
                lu[(i, j)] -= sub;
            }
        }
    }
    Ok((lu, piv, sign))
}

pub fn det(a: &CMatrix) -> C64 {
    match lu_decompose(a) {
        Err(_) => C64::new(0.0, 0.0),
        Ok((lu, _, sign)) => {
            let mut d = C64::new(sign, 0.0);
            for i in 0..lu.rows() {
                d *= lu[(i, i)];
            }
            d
        }
    }
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    let (lu, piv, _) = lu_decompose(a)?;
    let n = a.rows();
    let mut inv = CMatrix::zeros(n, n);
    for col in 0..n {
        // Solve A x = e_col using the pivoted LU factors.
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (i, &p) in piv.iter().enumerate() {
            x[i] = if p == col { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        }
        for i in 1..n {
            for k in 0..i {
                let sub = lu[(i, k)] * x[k];
                x[i] -= sub;
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let sub = lu[(i, k)] * x[k];
                x[i] -= sub;
            }
            x[i] /= lu[(i, i)];
        }
        for i in 0..n {
            inv[(i, col)] = x[i];
        }
    }
    Ok(inv)
}

/// Orthonormalize the columns of `a` by modified Gram-Schmidt with a
/// re-orthogonalization pass. The implied R factor has a real positive
/// diagonal, so the output is deterministic in the input.
pub fn orthonormal_columns(a: &CMatrix) -> Result<CMatrix> {
    let (n, r) = (a.rows(), a.cols());
    if r > n {
        return Err(Error::BadDimension(format!("cannot orthonormalize {r} columns in C^{n}")));
    }
    let mut q = a.clone();
    for j in 0..r {
        // Two MGS passes keep orthogonality near machine precision.
        for _ in 0..2 {
            for k in 0..j {
                let mut dot = C64::new(0.0, 0.0);
                for i in 0..n {
                    dot += q[(i, k)].conj() * q[(i, j)];
                }
                for i in 0..n {
                    let sub = dot * q[(i, k)];
                    q[(i, j)] -= sub;
                }
            }
        }
        let norm: f64 = (0..n).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::RankDeficientFamily { rank: j, r });
        }
        for i in 0..n {
            q[(i, j)] = q[(i, j)] / norm;
        }
    }
    Ok(q)
}
