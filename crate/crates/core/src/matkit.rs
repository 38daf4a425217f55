//! Dense real and complex linear algebra for the small (g ≤ 6, blocks up to
//! 12×12) matrices used by the geometry layer.
//!
//! Everything here is a pure function of its inputs. Matrices are row-major
//! and never sparse.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerances shared by the linear-algebra routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute symmetry gap accepted by [`SpdMatrix::new`].
    pub spd_symmetry: f64,
    /// Symmetry gap (relative to `max(1, max|a_ij|)`) accepted by [`eigen_sym`].
    pub sym_input: f64,
    /// Jacobi stops once the off-diagonal Frobenius norm drops below this
    /// fraction of the full Frobenius norm.
    pub jacobi_off_diagonal: f64,
    pub jacobi_max_sweeps: usize,
    /// Shifted QR is allowed `qr_iterations_per_dim * n` iterations in total.
    pub qr_iterations_per_dim: usize,
    /// Inverses refuse matrices whose determinant modulus is below this.
    pub singular_det: f64,
}

pub const TOL: Tolerances = Tolerances {
    spd_symmetry: 1e-12,
    sym_input: 1e-9,
    jacobi_off_diagonal: 1e-13,
    jacobi_max_sweeps: 100,
    qr_iterations_per_dim: 30,
    singular_det: 1e-300,
};

// ---------------------------------------------------------------------------
// RealMatrix

#[derive(Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(
                "matrix dimensions must be positive".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest `|a_ij - a_ji|` together with its position.
    pub fn asymmetry(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let gap = (self[(i, j)] - self[(j, i)]).abs();
                if gap > worst.2 {
                    worst = (i, j, gap);
                }
            }
        }
        worst
    }

    /// `(M + M^T) / 2`.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self[(i, j)] + self[(j, i)])
        })
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_parts(self, &Self::zeros(self.rows, self.cols))
    }

    /// Copy of the `size×size` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn det(&self) -> Result<f64> {
        Ok(det_complex(&self.to_complex())?.re)
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RealMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| format!("{:.6e}", self[(i, j)]))
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// ComplexMatrix

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(
                "matrix dimensions must be positive".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(i) = data
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// `re + i·im`.
    pub fn from_parts(re: &RealMatrix, im: &RealMatrix) -> Self {
        assert_eq!((re.rows, re.cols), (im.rows, im.cols), "shape mismatch");
        Self::from_fn(re.rows, re.cols, |i, j| C64::new(re[(i, j)], im[(i, j)]))
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

    pub fn re(&self) -> RealMatrix {
        RealMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].re)
    }

    pub fn im(&self) -> RealMatrix {
        RealMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].im)
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| format!("{:.6e}{:+.6e}i", self[(i, j)].re, self[(i, j)].im))
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// Determinants and inverses

/// LU factorisation with partial pivoting. Returns the packed factors, the
/// row permutation parity, and `None` as soon as a zero pivot shows up.
fn lu(m: &ComplexMatrix) -> (ComplexMatrix, bool, bool) {
    let n = m.rows;
    let mut a = m.clone();
    let mut odd = false;
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, a[(i, k)].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == 0.0 {
            return (a, odd, false);
        }
        if p != k {
            for j in 0..n {
                a.data.swap(k * n + j, p * n + j);
            }
            odd = !odd;
        }
        let pivot = a[(k, k)];
        for i in (k + 1)..n {
            let f = a[(i, k)] / pivot;
            a[(i, k)] = f;
            for j in (k + 1)..n {
                let v = a[(k, j)];
                a[(i, j)] -= f * v;
            }
        }
    }
    (a, odd, true)
}

fn require_square(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    Ok(())
}

/// Determinant by pivoted elimination.
pub fn det_complex(m: &ComplexMatrix) -> Result<C64> {
    require_square(m)?;
    let (a, odd, regular) = lu(m);
    if !regular {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut d = (0..m.rows).fold(C64::new(1.0, 0.0), |acc, i| acc * a[(i, i)]);
    if odd {
        d = -d;
    }
    Ok(d)
}

/// Principal-branch sum `ln|det| + i·arg` accumulated pivot by pivot, so
/// that large determinants never overflow. The imaginary part is the total
/// phase (not reduced modulo 2π).
pub fn log_det_complex(m: &ComplexMatrix) -> Result<C64> {
    require_square(m)?;
    let (a, odd, regular) = lu(m);
    if !regular {
        return Err(Error::Singular { det_abs: 0.0 });
    }
    let mut acc = C64::new(0.0, if odd { std::f64::consts::PI } else { 0.0 });
    for i in 0..m.rows {
        acc += a[(i, i)].ln();
    }
    Ok(acc)
}

/// Gauss–Jordan inverse with partial pivoting.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(m)?;
    let n = m.rows;
    let det = det_complex(m)?;
    if det.norm() <= TOL.singular_det {
        return Err(Error::Singular {
            det_abs: det.norm(),
        });
    }
    let mut a = m.clone();
    let mut inv = ComplexMatrix::identity(n);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
            .unwrap_or(k);
        if a[(p, k)].norm() == 0.0 {
            return Err(Error::Singular {
                det_abs: det.norm(),
            });
        }
        if p != k {
            for j in 0..n {
                a.data.swap(k * n + j, p * n + j);
                inv.data.swap(k * n + j, p * n + j);
            }
        }
        let pivot_inv = a[(k, k)].inv();
        for j in 0..n {
            a[(k, j)] *= pivot_inv;
            inv[(k, j)] *= pivot_inv;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = a[(i, k)];
            if f.norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                let (ak, ik) = (a[(k, j)], inv[(k, j)]);
                a[(i, j)] -= f * ak;
                inv[(i, j)] -= f * ik;
            }
        }
    }
    Ok(inv)
}

// ---------------------------------------------------------------------------
// Symmetric eigenproblem

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: RealMatrix,
}

impl SymEigen {
    /// `Q f(Λ) Q^T`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> RealMatrix {
        let n = self.values.len();
        let q = &self.vectors;
        RealMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| q[(i, k)] * f(self.values[k]) * q[(j, k)])
                .sum()
        })
        .symmetrized()
    }
}

/// Cyclic Jacobi rotations.
pub fn eigen_sym(m: &RealMatrix) -> Result<SymEigen> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let (ai, aj, gap) = m.asymmetry();
    if gap > TOL.sym_input * m.max_abs().max(1.0) {
        return Err(Error::Asymmetric {
            row: ai,
            col: aj,
            gap,
        });
    }
    let n = m.rows;
    let mut a = m.symmetrized();
    let mut q = RealMatrix::identity(n);
    let norm = a.frobenius();
    let off = |a: &RealMatrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > TOL.jacobi_off_diagonal * norm {
        if sweeps == TOL.jacobi_max_sweeps {
            return Err(Error::NoConvergence {
                what: "Jacobi eigensolver",
                iterations: sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akr) = (a[(k, p)], a[(k, r)]);
                    a[(k, p)] = c * akp - s * akr;
                    a[(k, r)] = s * akp + c * akr;
                }
                for k in 0..n {
                    let (apk, ark) = (a[(p, k)], a[(r, k)]);
                    a[(p, k)] = c * apk - s * ark;
                    a[(r, k)] = s * apk + c * ark;
                }
                for k in 0..n {
                    let (qkp, qkr) = (q[(k, p)], q[(k, r)]);
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = RealMatrix::from_fn(n, n, |i, j| q[(i, order[j])]);
    Ok(SymEigen { values, vectors })
}

// ---------------------------------------------------------------------------
// Symmetric positive definite matrices

/// A real symmetric positive definite matrix, validated on construction.
#[derive(Clone, PartialEq)]
pub struct SpdMatrix {
    m: RealMatrix,
    eig: Vec<f64>,
}

impl SpdMatrix {
    pub fn new(m: RealMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "expected a square matrix, got {}x{}",
                m.rows, m.cols
            )));
        }
        let (row, col, gap) = m.asymmetry();
        if gap > TOL.spd_symmetry {
            return Err(Error::Asymmetric { row, col, gap });
        }
        let m = m.symmetrized();
        let eig = eigen_sym(&m)?.values;
        if eig[0] <= 0.0 {
            return Err(Error::NotPositiveDefinite { eigenvalue: eig[0] });
        }
        Ok(Self { m, eig })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: RealMatrix::identity(n),
            eig: vec![1.0; n],
        }
    }

    pub fn as_matrix(&self) -> &RealMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.rows
    }

    /// Ascending eigenvalues computed at construction.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig
    }

    pub fn det(&self) -> f64 {
        self.eig.iter().product()
    }

    pub fn ln_det(&self) -> f64 {
        self.eig.iter().map(|v| v.ln()).sum()
    }

    fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let e = eigen_sym(&self.m)?;
        Self::new(e.reconstruct_with(f))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.spectral_map(|v| 1.0 / v)
    }

    pub fn inv_sqrt(&self) -> Result<Self> {
        self.spectral_map(|v| 1.0 / v.sqrt())
    }
}

impl fmt::Debug for SpdMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Spd{:?}", self.m)
    }
}

/// The unique SPD square root.
pub fn spd_sqrt(m: &SpdMatrix) -> Result<SpdMatrix> {
    m.spectral_map(f64::sqrt)
}

// ---------------------------------------------------------------------------
// General complex spectrum

fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows;
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<C64> = (0..len).map(|i| h[(k + 1 + i, k)]).collect();
        let xnorm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let mut v = x.clone();
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for c in &mut v {
            *c /= vnorm;
        }
        // H <- (I - 2 v v^H) H
        for j in 0..n {
            let s: C64 = (0..len).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..len {
                h[(k + 1 + i, j)] -= v[i] * s * 2.0;
            }
        }
        // H <- H (I - 2 v v^H)
        for i in 0..n {
            let s: C64 = (0..len).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..len {
                h[(i, k + 1 + j)] -= s * v[j].conj() * 2.0;
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    h
}

/// Eigenvalues of a square complex matrix: Householder reduction to
/// Hessenberg form followed by single-shift QR with Wilkinson shifts.
pub fn eigenvalues_complex(m: &ComplexMatrix) -> Result<Vec<C64>> {
    require_square(m)?;
    let n = m.rows;
    let mut h = hessenberg(m);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let cap = TOL.qr_iterations_per_dim * n;
    let zero = C64::new(0.0, 0.0);

    let mut eig = vec![zero; n];
    let mut hi = n - 1;
    let mut total = 0;
    let mut since_deflation = 0;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            let reference = if diag == 0.0 { scale } else { diag };
            if sub <= eps * reference {
                h[(l, l - 1)] = zero;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if total == cap {
            return Err(Error::NoConvergence {
                what: "shifted QR eigenvalue iteration",
                iterations: total,
            });
        }
        total += 1;
        since_deflation += 1;

        let (a, b) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)]);
        let (c, d) = (h[(hi, hi - 1)], h[(hi, hi)]);
        let mu = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            d + C64::new(h[(hi, hi - 1)].norm(), 0.0) * 0.75
        } else {
            let delta = (a - d) * 0.5;
            let disc = (delta * delta + b * c).sqrt();
            let den = if (delta + disc).norm() >= (delta - disc).norm() {
                delta + disc
            } else {
                delta - disc
            };
            if den.norm() == 0.0 {
                d
            } else {
                d - b * c / den
            }
        };

        for i in l..=hi {
            h[(i, i)] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - l);
        for i in l..hi {
            let x = h[(i, i)];
            let y = h[(i + 1, i)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            if r == 0.0 {
                rotations.push(None);
                continue;
            }
            let (cs, sn) = (x / r, y / r);
            for j in i..=hi {
                let (u, v) = (h[(i, j)], h[(i + 1, j)]);
                h[(i, j)] = cs.conj() * u + sn.conj() * v;
                h[(i + 1, j)] = -sn * u + cs * v;
            }
            rotations.push(Some((cs, sn)));
        }
        for (offset, rot) in rotations.into_iter().enumerate() {
            let i = l + offset;
            if let Some((cs, sn)) = rot {
                for r in l..=(i + 1).min(hi) {
                    let (u, v) = (h[(r, i)], h[(r, i + 1)]);
                    h[(r, i)] = u * cs + v * sn;
                    h[(r, i + 1)] = -u * sn.conj() + v * cs.conj();
                }
            }
        }
        for i in l..=hi {
            h[(i, i)] += mu;
        }
    }
    eig[0] = h[(0, 0)];
    Ok(eig)
}
