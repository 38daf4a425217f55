//! Integer symplectic matrices, Minkowski reduction of positive definite
//! forms, Siegel reduction of points, and the parabolic families Γ_∞^j.

use std::fmt;

use crate::error::{Error, Result};
use crate::matkit::{RealMatrix, SpdMatrix};
use crate::siegel::{act, SiegelPoint, SymplecticReal};

/// Iteration cap for [`minkowski_reduce`].
pub const MINKOWSKI_MAX_ITER: usize = 1000;
/// Property (i) of the Siegel domain is accepted down to `1 - SIEGEL_DET_TOL`.
pub const SIEGEL_DET_TOL: f64 = 1e-9;
/// Property (iii) is accepted up to `1/2 + SIEGEL_X_TOL`.
pub const SIEGEL_X_TOL: f64 = 1e-12;
/// Relative slack for the successive-minimum inequalities.
const MINKOWSKI_REL_TOL: f64 = 1e-10;

/// A `2g×2g` integer matrix with `M^T J M = J` (checked exactly).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymplecticInt {
    g: usize,
    m: Vec<i64>,
}

fn to_i64(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Parameter(format!("integer entry {v} overflows i64")))
}

/// Accepts `entries` (row-major, `n×n`) iff `M^T J M = J` exactly.
pub fn certify_symplectic(n: usize, entries: Vec<i64>) -> Result<SymplecticInt> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::Dimension(format!(
            "symplectic size must be even and positive, got {n}"
        )));
    }
    if entries.len() != n * n {
        return Err(Error::Dimension(format!(
            "{} entries for a {n}x{n} matrix",
            entries.len()
        )));
    }
    let g = n / 2;
    let at = |i: usize, j: usize| entries[i * n + j] as i128;
    // (J M)[r][c] = -M[r+g][c] for r < g, M[r-g][c] otherwise
    let jm = |r: usize, c: usize| if r < g { -at(r + g, c) } else { at(r - g, c) };
    for row in 0..n {
        for col in 0..n {
            let v: i128 = (0..n).map(|k| at(k, row) * jm(k, col)).sum();
            let target = if row < g && col == row + g {
                -1
            } else if row >= g && col + g == row {
                1
            } else {
                0
            };
            if v != target {
                return Err(Error::NotSymplectic {
                    row,
                    col,
                    residual: (v - target) as f64,
                });
            }
        }
    }
    Ok(SymplecticInt { g, m: entries })
}

impl SymplecticInt {
    pub fn identity(g: usize) -> Self {
        let n = 2 * g;
        let m = (0..n * n).map(|i| i64::from(i / n == i % n)).collect();
        Self { g, m }
    }

    /// `J = (0 -Id; Id 0)`.
    pub fn j(g: usize) -> Self {
        let n = 2 * g;
        let mut m = vec![0; n * n];
        for i in 0..g {
            m[i * n + i + g] = -1;
            m[(i + g) * n + i] = 1;
        }
        Self { g, m }
    }

    /// `(Id S; 0 Id)` for a symmetric integer `S` given row-major.
    pub fn translation(g: usize, s: &[i64]) -> Result<Self> {
        if s.len() != g * g {
            return Err(Error::Dimension(format!("S needs {} entries", g * g)));
        }
        let mut t = Self::identity(g);
        for i in 0..g {
            for j in 0..g {
                if s[i * g + j] != s[j * g + i] {
                    return Err(Error::Parameter(
                        "translation matrix S must be symmetric".into(),
                    ));
                }
                t.m[i * 2 * g + g + j] = s[i * g + j];
            }
        }
        Ok(t)
    }

    /// `(A 0; 0 A^{-T})` for a unimodular `A`.
    pub fn block_diagonal(a: &IntMatrix) -> Result<Self> {
        let g = a.n;
        let a_inv_t = a.inverse_unimodular()?.transpose();
        let n = 2 * g;
        let mut m = vec![0; n * n];
        for i in 0..g {
            for j in 0..g {
                m[i * n + j] = a.at(i, j);
                m[(i + g) * n + g + j] = a_inv_t.at(i, j);
            }
        }
        certify_symplectic(n, m)
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn entries(&self) -> &[i64] {
        &self.m
    }

    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.m[i * 2 * self.g + j]
    }

    /// Block 0..4 = A, B, C, D as a `g×g` row-major vector.
    pub fn block(&self, which: usize) -> Vec<i64> {
        let g = self.g;
        let (r0, c0) = ((which / 2) * g, (which % 2) * g);
        (0..g * g)
            .map(|k| self.at(r0 + k / g, c0 + k % g))
            .collect()
    }

    /// Entries in block order A, B, C, D, each block row-major.
    pub fn block_order_entries(&self) -> Vec<i64> {
        (0..4).flat_map(|b| self.block(b)).collect()
    }

    /// Inverse of [`Self::block_order_entries`], with certification.
    pub fn from_block_order(g: usize, entries: &[i64]) -> Result<Self> {
        if entries.len() != 4 * g * g {
            return Err(Error::Dimension(format!("expected {} entries", 4 * g * g)));
        }
        let n = 2 * g;
        let mut m = vec![0; n * n];
        for (b, chunk) in entries.chunks(g * g).enumerate() {
            let (r0, c0) = ((b / 2) * g, (b % 2) * g);
            for (k, &v) in chunk.iter().enumerate() {
                m[(r0 + k / g) * n + c0 + k % g] = v;
            }
        }
        certify_symplectic(n, m)
    }

    /// Exact product; errors only on `i64` overflow.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.g, other.g, "genus mismatch");
        let n = 2 * self.g;
        let mut m = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let v: i128 = (0..n)
                    .map(|k| self.at(i, k) as i128 * other.at(k, j) as i128)
                    .sum();
                m.push(to_i64(v)?);
            }
        }
        Ok(Self { g: self.g, m })
    }

    /// `(D^T, -B^T; -C^T, A^T)`.
    pub fn inverse(&self) -> Self {
        let g = self.g;
        let n = 2 * g;
        let mut m = vec![0; n * n];
        for i in 0..g {
            for j in 0..g {
                m[i * n + j] = self.at(g + j, g + i);
                m[i * n + g + j] = -self.at(j, g + i);
                m[(g + i) * n + j] = -self.at(g + j, i);
                m[(g + i) * n + g + j] = self.at(j, i);
            }
        }
        Self { g, m }
    }

    pub fn neg(&self) -> Self {
        Self {
            g: self.g,
            m: self.m.iter().map(|v| -v).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.g)
    }

    pub fn is_minus_identity(&self) -> bool {
        self.neg().is_identity()
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.m.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn to_real(&self) -> SymplecticReal {
        let g = self.g;
        let blk = |b: usize| {
            let v = self.block(b);
            RealMatrix::from_fn(g, g, |i, j| v[i * g + j] as f64)
        };
        SymplecticReal::from_blocks_unchecked(blk(0), blk(1), blk(2), blk(3))
    }

    /// Structural membership in Γ_∞ = ⋃_j Γ_∞^j: `C = 0`, `A` of the shape
    /// `(Id_j 0; L Id_{g-j})`, `D = A^{-T}` and `S = A^{-1}B` symmetric with a
    /// vanishing leading `j×j` block (no condition for `j = 0`, where `A = Id`).
    pub fn in_gamma_infinity(&self) -> bool {
        let g = self.g;
        let (a, b, c, d) = (self.block(0), self.block(1), self.block(2), self.block(3));
        if c.iter().any(|&v| v != 0) {
            return false;
        }
        let am = IntMatrix::new(g, a);
        (0..g).any(|j| {
            if !am.is_shear(j) {
                return false;
            }
            let a_inv = am.shear_inverse(j);
            if a_inv.transpose().data != d {
                return false;
            }
            let s = a_inv.mul(&IntMatrix::new(g, b.clone()));
            let symmetric = (0..g).all(|r| (0..g).all(|k| s.at(r, k) == s.at(k, r)));
            symmetric && (0..j).all(|r| (0..j).all(|k| s.at(r, k) == 0))
        })
    }
}

impl fmt::Debug for SymplecticInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SymplecticInt(g={}, {:?})",
            self.g,
            self.block_order_entries()
        )
    }
}

/// A small square integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(n: usize, data: Vec<i64>) -> Self {
        assert_eq!(data.len(), n * n, "IntMatrix size");
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, (0..n * n).map(|i| i64::from(i / n == i % n)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        Self::new(n, (0..n * n).map(|k| self.at(k % n, k / n)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        Self::new(
            n,
            (0..n * n)
                .map(|k| (0..n).map(|t| self.at(k / n, t) * other.at(t, k % n)).sum())
                .collect(),
        )
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix::from_fn(self.n, self.n, |i, j| self.at(i, j) as f64)
    }

    /// Exact determinant by Laplace expansion (sizes ≤ 4 here).
    pub fn det(&self) -> i128 {
        fn rec(m: &[i128], n: usize) -> i128 {
            if n == 1 {
                return m[0];
            }
            let mut total = 0;
            for j in 0..n {
                let minor: Vec<i128> = (1..n)
                    .flat_map(|r| (0..n).filter(move |&c| c != j).map(move |c| (r, c)))
                    .map(|(r, c)| m[r * n + c])
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                total += sign * m[j] * rec(&minor, n - 1);
            }
            total
        }
        let m: Vec<i128> = self.data.iter().map(|&v| v as i128).collect();
        rec(&m, self.n)
    }

    /// Inverse of a matrix with determinant ±1, via the adjugate.
    pub fn inverse_unimodular(&self) -> Result<Self> {
        let n = self.n;
        let det = self.det();
        if det.abs() != 1 {
            return Err(Error::Parameter(format!(
                "matrix is not unimodular (det = {det})"
            )));
        }
        if n == 1 {
            return Ok(Self::new(1, vec![det as i64]));
        }
        let mut inv = Self::new(n, vec![0; n * n]);
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<i64> = (0..n)
                    .filter(|&r| r != i)
                    .flat_map(|r| (0..n).filter(move |&c| c != j).map(move |c| (r, c)))
                    .map(|(r, c)| self.at(r, c))
                    .collect();
                let cof =
                    IntMatrix::new(n - 1, minor).det() * if (i + j) % 2 == 0 { 1 } else { -1 };
                inv.set(j, i, to_i64(cof * det)?);
            }
        }
        Ok(inv)
    }

    /// `A = (Id_j 0; L Id_{g-j})` (with `j = 0` meaning `A = Id`).
    fn is_shear(&self, j: usize) -> bool {
        let n = self.n;
        (0..n).all(|r| {
            (0..n).all(|c| {
                let v = self.at(r, c);
                if r == c {
                    v == 1
                } else if r >= j && c < j {
                    true
                } else {
                    v == 0
                }
            })
        })
    }

    /// Inverse of a shear: `(Id 0; -L Id)`.
    fn shear_inverse(&self, j: usize) -> Self {
        let n = self.n;
        let mut inv = Self::identity(n);
        for r in j..n {
            for c in 0..j {
                inv.set(r, c, -self.at(r, c));
            }
        }
        inv
    }
}

// ---------------------------------------------------------------------------
// Minkowski reduction

/// Which primitivity condition the scan used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primitivity {
    /// `h` is admissible for index `k` iff `gcd(h_k, …, h_g) = 1`.
    TailGcd,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MinkowskiViolation {
    /// `y_{k,k+1} < 0` (1-based `k`).
    SuperDiagonal { k: usize, value: f64 },
    /// `h^t Y h < y_{k,k}` for an admissible `h` (1-based `k`).
    ShortVector {
        h: Vec<i64>,
        k: usize,
        value: f64,
        diagonal: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiCertificate {
    pub reduced: bool,
    pub violations: Vec<MinkowskiViolation>,
    pub scan_bound: i64,
    pub convention: Primitivity,
}

/// Scan bound used when none is given: 2 for g ≤ 3, 3 for g = 4.
pub fn default_scan_bound(g: usize) -> i64 {
    if g >= 4 {
        3
    } else {
        2
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn quad_form(y: &RealMatrix, h: &[i64]) -> f64 {
    let g = h.len();
    let mut s = 0.0;
    for i in 0..g {
        for j in 0..g {
            s += h[i] as f64 * y[(i, j)] * h[j] as f64;
        }
    }
    s
}

/// Every integer vector in `[-bound, bound]^g`, in odometer order.
fn box_vectors(g: usize, bound: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * bound + 1) as usize;
    let total = side.pow(g as u32);
    (0..total).map(move |mut idx| {
        let mut h = vec![0; g];
        for slot in h.iter_mut() {
            *slot = (idx % side) as i64 - bound;
            idx /= side;
        }
        h
    })
}

pub fn is_minkowski_reduced(y: &SpdMatrix, scan_bound: i64) -> MinkowskiCertificate {
    let g = y.dim();
    let ym = y.as_matrix();
    let mut violations = Vec::new();
    for k in 0..g.saturating_sub(1) {
        if ym[(k, k + 1)] < 0.0 {
            violations.push(MinkowskiViolation::SuperDiagonal {
                k: k + 1,
                value: ym[(k, k + 1)],
            });
        }
    }
    for h in box_vectors(g, scan_bound.max(1)) {
        let value = quad_form(ym, &h);
        let mut tail = 0;
        for k in (0..g).rev() {
            tail = gcd(tail, h[k]);
            if tail != 1 {
                continue;
            }
            let diagonal = ym[(k, k)];
            if value < diagonal * (1.0 - MINKOWSKI_REL_TOL) {
                violations.push(MinkowskiViolation::ShortVector {
                    h: h.clone(),
                    k: k + 1,
                    value,
                    diagonal,
                });
            }
        }
    }
    MinkowskiCertificate {
        reduced: violations.is_empty(),
        violations,
        scan_bound,
        convention: Primitivity::TailGcd,
    }
}

/// `U` unimodular and `Y' = U^T Y U`.
#[derive(Debug, Clone)]
pub struct MinkowskiReduction {
    pub u: IntMatrix,
    pub y: SpdMatrix,
}

fn gram(y: &RealMatrix, u: &IntMatrix) -> RealMatrix {
    let uf = u.to_real();
    uf.transpose().matmul(y).matmul(&uf).symmetrized()
}

fn column(u: &IntMatrix, j: usize) -> Vec<i64> {
    (0..u.n).map(|i| u.at(i, j)).collect()
}

fn set_column(u: &mut IntMatrix, j: usize, v: &[i64]) {
    for (i, &x) in v.iter().enumerate() {
        u.set(i, j, x);
    }
}

/// Integer coefficients `x` minimising `|b_k − Σ x_i b_i|` over the first `k`
/// basis vectors: Babai rounding of the Gram solve, then an exhaustive ±2
/// search around it.
fn closest_combination(gm: &RealMatrix, k: usize) -> Vec<i64> {
    let sub = gm.block(0, 0, k, k).to_complex();
    let rhs: Vec<f64> = (0..k).map(|i| gm[(i, k)]).collect();
    let babai: Vec<i64> = match crate::matkit::inverse(&sub) {
        Ok(inv) => (0..k)
            .map(|i| (0..k).map(|j| inv[(i, j)].re * rhs[j]).sum::<f64>().round() as i64)
            .collect(),
        Err(_) => vec![0; k],
    };
    let cost = |x: &[i64]| {
        // |b_k - Σ x_i b_i|² expanded in the Gram matrix
        let mut c = gm[(k, k)];
        for i in 0..k {
            c -= 2.0 * x[i] as f64 * gm[(i, k)];
            for j in 0..k {
                c += x[i] as f64 * x[j] as f64 * gm[(i, j)];
            }
        }
        c
    };
    let mut best = babai.clone();
    let mut best_cost = cost(&best);
    for delta in box_vectors(k, 2) {
        let x: Vec<i64> = babai.iter().zip(&delta).map(|(a, d)| a + d).collect();
        let c = cost(&x);
        if c < best_cost {
            best_cost = c;
            best = x;
        }
    }
    best
}

/// Greedy reduction: keep the basis sorted by length and replace each vector
/// by its distance to the lattice spanned by the shorter ones, until nothing
/// changes; then fix the signs of the superdiagonal.
pub fn minkowski_reduce(y: &SpdMatrix) -> Result<MinkowskiReduction> {
    let g = y.dim();
    let ym = y.as_matrix();
    let mut u = IntMatrix::identity(g);
    let mut iterations = 0;
    let mut k = 1;
    let sort = |u: &mut IntMatrix| {
        let gm = gram(ym, u);
        let mut order: Vec<usize> = (0..g).collect();
        order.sort_by(|&a, &b| gm[(a, a)].total_cmp(&gm[(b, b)]));
        let cols: Vec<Vec<i64>> = order.iter().map(|&j| column(u, j)).collect();
        for (j, c) in cols.iter().enumerate() {
            set_column(u, j, c);
        }
    };
    sort(&mut u);
    while k < g {
        iterations += 1;
        if iterations > MINKOWSKI_MAX_ITER {
            return Err(Error::NoConvergence {
                what: "Minkowski reduction",
                iterations: MINKOWSKI_MAX_ITER,
            });
        }
        let gm = gram(ym, &u);
        let x = closest_combination(&gm, k);
        if x.iter().all(|&v| v == 0) {
            k += 1;
            continue;
        }
        let mut bk = column(&u, k);
        for (i, &xi) in x.iter().enumerate() {
            let bi = column(&u, i);
            for (t, v) in bk.iter_mut().enumerate() {
                *v -= xi * bi[t];
            }
        }
        let old = gm[(k, k)];
        set_column(&mut u, k, &bk);
        let new = gram(ym, &u)[(k, k)];
        if new >= old * (1.0 - 1e-15) {
            // no strict improvement: undo and move on
            let mut back = bk.clone();
            for (i, &xi) in x.iter().enumerate() {
                let bi = column(&u, i);
                for (t, v) in back.iter_mut().enumerate() {
                    *v += xi * bi[t];
                }
            }
            set_column(&mut u, k, &back);
            k += 1;
            continue;
        }
        if (0..k).any(|i| gram(ym, &u)[(i, i)] > new) {
            sort(&mut u);
            k = 1;
        } else {
            k += 1;
        }
    }
    for k in 0..g.saturating_sub(1) {
        if gram(ym, &u)[(k, k + 1)] < 0.0 {
            let c: Vec<i64> = column(&u, k + 1).iter().map(|v| -v).collect();
            set_column(&mut u, k + 1, &c);
        }
    }
    let y_red = SpdMatrix::new(gram(ym, &u))?;
    Ok(MinkowskiReduction { u, y: y_red })
}

// ---------------------------------------------------------------------------
// Siegel reduction

#[derive(Debug, Clone, PartialEq)]
pub struct SiegelDiagnostics {
    pub reduced: bool,
    /// First cached element (index, |det(CZ+D)|) violating property (i).
    pub det_witness: Option<(usize, f64)>,
    pub minkowski: MinkowskiCertificate,
    /// First entry `(i, j, x_ij)` violating property (iii).
    pub x_witness: Option<(usize, usize, f64)>,
    /// Property (i) is only checked against the supplied candidates.
    pub relative_to_candidates: bool,
}

fn det_abs(gamma: &SymplecticInt, z: &SiegelPoint) -> Result<f64> {
    Ok(gamma.to_real().automorphy_det(z)?.norm())
}

pub fn is_siegel_reduced(
    z: &SiegelPoint,
    candidates: &[SymplecticInt],
) -> Result<SiegelDiagnostics> {
    let g = z.g();
    let mut det_witness = None;
    for (idx, gamma) in candidates.iter().enumerate() {
        if gamma.g() != g {
            return Err(Error::Dimension(format!(
                "candidate genus {} vs point genus {g}",
                gamma.g()
            )));
        }
        let v = det_abs(gamma, z)?;
        if v < 1.0 - SIEGEL_DET_TOL {
            det_witness = Some((idx, v));
            break;
        }
    }
    let minkowski = is_minkowski_reduced(z.y(), default_scan_bound(g));
    let mut x_witness = None;
    'outer: for i in 0..g {
        for j in 0..g {
            if z.x()[(i, j)].abs() > 0.5 + SIEGEL_X_TOL {
                x_witness = Some((i, j, z.x()[(i, j)]));
                break 'outer;
            }
        }
    }
    Ok(SiegelDiagnostics {
        reduced: det_witness.is_none() && minkowski.reduced && x_witness.is_none(),
        det_witness,
        minkowski,
        x_witness,
        relative_to_candidates: true,
    })
}

#[derive(Debug, Clone)]
pub struct SiegelReduction {
    pub gamma: SymplecticInt,
    pub z: SiegelPoint,
    pub iterations: usize,
    /// False when `max_iter` ran out while property (i) was still violated.
    pub complete: bool,
}

/// Alternates a Minkowski step on `Y`, an integer translation of `X`, and
/// the cached element with the smallest `|det(CZ+D)| < 1`.
pub fn siegel_reduce(
    z: &SiegelPoint,
    candidates: &[SymplecticInt],
    max_iter: usize,
) -> Result<SiegelReduction> {
    if candidates.is_empty() {
        return Err(Error::Parameter("candidate set is empty".into()));
    }
    if max_iter == 0 {
        return Err(Error::Parameter("max_iter must be at least 1".into()));
    }
    let g = z.g();
    let mut gamma = SymplecticInt::identity(g);
    let mut cur = z.clone();
    let apply =
        |step: &SymplecticInt, gamma: &mut SymplecticInt, cur: &mut SiegelPoint| -> Result<()> {
            *cur = act(&step.to_real(), cur)?;
            *gamma = step.mul(gamma)?;
            Ok(())
        };
    for iteration in 1..=max_iter {
        let red = minkowski_reduce(cur.y())?;
        if red.u != IntMatrix::identity(g) {
            // γ = (U^T 0; 0 U^{-1}) sends Z to U^T Z U
            let step = SymplecticInt::block_diagonal(&red.u.transpose())?;
            apply(&step, &mut gamma, &mut cur)?;
        }
        let shift: Vec<i64> = (0..g * g)
            .map(|k| -(cur.x()[(k / g, k % g)].round() as i64))
            .collect();
        if shift.iter().any(|&v| v != 0) {
            apply(
                &SymplecticInt::translation(g, &shift)?,
                &mut gamma,
                &mut cur,
            )?;
        }
        let mut best: Option<(f64, &SymplecticInt)> = None;
        for cand in candidates {
            let v = det_abs(cand, &cur)?;
            if v < 1.0 - SIEGEL_DET_TOL && best.map_or(true, |(b, _)| v < b) {
                best = Some((v, cand));
            }
        }
        match best {
            None => {
                return Ok(SiegelReduction {
                    gamma,
                    z: cur,
                    iterations: iteration,
                    complete: true,
                })
            }
            Some((_, cand)) if iteration < max_iter => apply(cand, &mut gamma, &mut cur)?,
            Some(_) => {}
        }
    }
    Ok(SiegelReduction {
        gamma,
        z: cur,
        iterations: max_iter,
        complete: false,
    })
}

// ---------------------------------------------------------------------------
// Γ_∞ families

/// Stratum `j` of Γ_∞ with free integer parameters bounded by `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GammaInfFamily {
    pub g: usize,
    pub j: usize,
    pub bound: i64,
}

impl GammaInfFamily {
    /// Number of free integer parameters.
    pub fn parameter_count(&self) -> usize {
        let (g, j) = (self.g, self.j);
        if j == 0 {
            g * (g + 1) / 2
        } else {
            let m = g - j;
            2 * m * j + m * (m + 1) / 2
        }
    }
}

/// Streams every non-identity element of the family, in odometer order over
/// the free parameters.
pub fn gamma_inf_stream(family: GammaInfFamily) -> Result<GammaInfStream> {
    if family.g == 0 || family.j >= family.g.max(1) {
        return Err(Error::Parameter(format!(
            "stratum j={} out of range for g={}",
            family.j, family.g
        )));
    }
    if family.bound < 0 {
        return Err(Error::Parameter("bound must be nonnegative".into()));
    }
    let p = family.parameter_count();
    Ok(GammaInfStream {
        family,
        params: vec![-family.bound; p],
        done: false,
    })
}

pub struct GammaInfStream {
    family: GammaInfFamily,
    params: Vec<i64>,
    done: bool,
}

impl GammaInfStream {
    fn advance(&mut self) {
        let b = self.family.bound;
        for v in self.params.iter_mut() {
            if *v < b {
                *v += 1;
                return;
            }
            *v = -b;
        }
        self.done = true;
    }

    fn build(&self) -> SymplecticInt {
        let GammaInfFamily { g, j, .. } = self.family;
        let mut it = self.params.iter().copied();
        let mut a = IntMatrix::identity(g);
        let mut s = IntMatrix::new(g, vec![0; g * g]);
        if j == 0 {
            for r in 0..g {
                for c in r..g {
                    let v = it.next().unwrap_or(0);
                    s.set(r, c, v);
                    s.set(c, r, v);
                }
            }
        } else {
            for r in j..g {
                for c in 0..j {
                    a.set(r, c, it.next().unwrap_or(0));
                }
            }
            for r in j..g {
                for c in 0..j {
                    let h = it.next().unwrap_or(0);
                    s.set(r, c, h);
                    s.set(c, r, h);
                }
            }
            for r in j..g {
                for c in r..g {
                    let v = it.next().unwrap_or(0);
                    s.set(r, c, v);
                    s.set(c, r, v);
                }
            }
        }
        let as_ = a.mul(&s);
        let a_inv_t = a.shear_inverse(j).transpose();
        let n = 2 * g;
        let mut m = vec![0; n * n];
        for r in 0..g {
            for c in 0..g {
                m[r * n + c] = a.at(r, c);
                m[r * n + g + c] = as_.at(r, c);
                m[(g + r) * n + g + c] = a_inv_t.at(r, c);
            }
        }
        SymplecticInt { g, m }
    }
}

impl Iterator for GammaInfStream {
    type Item = SymplecticInt;

    fn next(&mut self) -> Option<SymplecticInt> {
        while !self.done {
            let zero = self.params.iter().all(|&v| v == 0);
            let out = (!zero).then(|| self.build());
            self.advance();
            if out.is_some() {
                return out;
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::RealMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spd(rows: &[Vec<f64>]) -> SpdMatrix {
        SpdMatrix::new(RealMatrix::from_rows(rows).unwrap()).unwrap()
    }

    fn random_spd(g: usize, rng: &mut ChaCha8Rng) -> SpdMatrix {
        let a = RealMatrix::from_fn(g, g, |_, _| rng.gen_range(-2.0..2.0));
        SpdMatrix::new(
            a.transpose()
                .matmul(&a)
                .add(&RealMatrix::identity(g).scale(0.05)),
        )
        .unwrap()
    }

    // Brute-force definition check with a wider box than the production scan.
    fn brute_minkowski(y: &RealMatrix, bound: i64) -> bool {
        let g = y.rows();
        if (0..g - 1).any(|k| y[(k, k + 1)] < 0.0) {
            return false;
        }
        box_vectors(g, bound).all(|h| {
            let v = quad_form(y, &h);
            (0..g).all(|k| {
                let tail = h[k..].iter().fold(0, |a, &b| gcd(a, b));
                tail != 1 || v >= y[(k, k)] * (1.0 - 1e-9)
            })
        })
    }

    #[test]
    fn certify_examples() {
        let id: Vec<i64> = SymplecticInt::identity(2).entries().to_vec();
        assert!(certify_symplectic(4, id.clone()).is_ok());
        assert!(certify_symplectic(4, SymplecticInt::j(2).entries().to_vec()).is_ok());
        let mut broken = id;
        broken[1] = 1; // A = [[1,1],[0,1]] without the matching D
        match certify_symplectic(4, broken) {
            Err(Error::NotSymplectic { row, col, .. }) => assert!(row < 4 && col < 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            certify_symplectic(3, vec![0; 9]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn products_and_inverses_stay_symplectic() {
        let j = SymplecticInt::j(2);
        let t = SymplecticInt::translation(2, &[1, 2, 2, -1]).unwrap();
        let p = j.mul(&t).unwrap().mul(&j).unwrap();
        assert!(certify_symplectic(4, p.entries().to_vec()).is_ok());
        assert!(p.mul(&p.inverse()).unwrap().is_identity());
        assert!(j.mul(&j).unwrap().is_minus_identity());
    }

    #[test]
    fn block_order_round_trip() {
        let t = SymplecticInt::translation(2, &[1, 2, 2, -1]).unwrap();
        let e = t.block_order_entries();
        assert_eq!(e, vec![1, 0, 0, 1, 1, 2, 2, -1, 0, 0, 0, 0, 1, 0, 0, 1]);
        assert_eq!(SymplecticInt::from_block_order(2, &e).unwrap(), t);
    }

    #[test]
    fn minkowski_check_examples() {
        assert!(is_minkowski_reduced(&spd(&[vec![1.0, 0.0], vec![0.0, 2.0]]), 2).reduced);

        let c = is_minkowski_reduced(&spd(&[vec![2.0, 0.0], vec![0.0, 1.0]]), 2);
        assert!(!c.reduced);
        assert!(c.violations.contains(&MinkowskiViolation::ShortVector {
            h: vec![0, 1],
            k: 1,
            value: 1.0,
            diagonal: 2.0
        }));

        let c = is_minkowski_reduced(&spd(&[vec![1.0, -0.4], vec![-0.4, 1.0]]), 2);
        assert!(!c.reduced);
        assert!(matches!(
            c.violations[0],
            MinkowskiViolation::SuperDiagonal { k: 1, .. }
        ));
        assert_eq!(c.convention, Primitivity::TailGcd);
    }

    #[test]
    fn minkowski_reduce_examples() {
        let r = minkowski_reduce(&spd(&[vec![2.0, 0.0], vec![0.0, 1.0]])).unwrap();
        assert_eq!(r.u, IntMatrix::new(2, vec![0, 1, 1, 0]));
        assert_eq!(r.y.as_matrix(), &RealMatrix::from_diag(&[1.0, 2.0]));

        let reduced = spd(&[vec![1.0, 0.3], vec![0.3, 1.5]]);
        assert_eq!(
            minkowski_reduce(&reduced).unwrap().u,
            IntMatrix::identity(2)
        );
    }

    #[test]
    fn minkowski_reduce_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for g in [2, 3, 4] {
            for _ in 0..100 {
                let y = random_spd(g, &mut rng);
                let r = minkowski_reduce(&y).unwrap();
                assert_eq!(r.u.det().abs(), 1);
                assert!((r.y.det() - y.det()).abs() <= 1e-12 * y.det() * 10.0);
                if g <= 3 {
                    let cert = is_minkowski_reduced(&r.y, 2);
                    assert!(cert.reduced, "{:?}", cert.violations);
                    assert!(brute_minkowski(r.y.as_matrix(), 3));
                }
            }
        }
    }

    #[test]
    fn siegel_check_examples() {
        let cands = vec![
            SymplecticInt::identity(2),
            SymplecticInt::j(2),
            SymplecticInt::j(2).neg(),
        ];
        let d = is_siegel_reduced(&SiegelPoint::i_identity(2), &cands).unwrap();
        assert!(d.reduced);

        let small = SiegelPoint::imaginary_diag(&[0.9, 0.9]).unwrap();
        let d = is_siegel_reduced(&small, &cands).unwrap();
        assert!(!d.reduced);
        let (idx, v) = d.det_witness.unwrap();
        assert_eq!(cands[idx], SymplecticInt::j(2));
        assert!((v - 0.81).abs() < 1e-12);

        let x = RealMatrix::from_rows(&[vec![0.7, 0.0], vec![0.0, 0.0]]).unwrap();
        let p = SiegelPoint::new(x, RealMatrix::identity(2)).unwrap();
        let d = is_siegel_reduced(&p, &cands).unwrap();
        assert_eq!(d.x_witness, Some((0, 0, 0.7)));
    }

    #[test]
    fn siegel_reduce_examples() {
        let cands = vec![
            SymplecticInt::identity(2),
            SymplecticInt::j(2),
            SymplecticInt::j(2).neg(),
        ];
        let id = SiegelPoint::i_identity(2);
        let r = siegel_reduce(&id, &cands, 10).unwrap();
        assert!(r.gamma.is_identity() && r.complete);

        let x = RealMatrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let shifted = SiegelPoint::new(x, RealMatrix::identity(2)).unwrap();
        let r = siegel_reduce(&shifted, &cands, 10).unwrap();
        assert_eq!(
            r.gamma,
            SymplecticInt::translation(2, &[-3, 0, 0, 0]).unwrap()
        );
        assert!(r.z.z().sub(&id.z()).max_abs() < 1e-15);

        let half = SiegelPoint::imaginary_diag(&[0.5, 0.5]).unwrap();
        let r = siegel_reduce(&half, &cands, 10).unwrap();
        assert!(r.complete);
        assert!(r.z.y().det() >= half.y().det());
        let again = siegel_reduce(&r.z, &cands, 10).unwrap();
        assert!(again.gamma.is_identity());
    }

    #[test]
    fn gamma_inf_counts() {
        let s: Vec<_> = gamma_inf_stream(GammaInfFamily {
            g: 2,
            j: 0,
            bound: 1,
        })
        .unwrap()
        .collect();
        assert_eq!(s.len(), 26);
        assert_eq!(
            gamma_inf_stream(GammaInfFamily {
                g: 2,
                j: 1,
                bound: 0
            })
            .unwrap()
            .count(),
            0
        );
        for (g, b) in [(2, 2), (3, 1)] {
            let n = gamma_inf_stream(GammaInfFamily { g, j: 0, bound: b })
                .unwrap()
                .count();
            assert_eq!(n, (2 * b as usize + 1).pow((g * (g + 1) / 2) as u32) - 1);
        }
    }

    #[test]
    fn gamma_inf_elements_are_parabolic() {
        for (g, j) in [(2, 0), (2, 1), (3, 1), (3, 2)] {
            for m in gamma_inf_stream(GammaInfFamily { g, j, bound: 1 }).unwrap() {
                assert!(certify_symplectic(2 * g, m.entries().to_vec()).is_ok());
                assert!(m.in_gamma_infinity(), "{m:?}");
                assert!(!m.is_identity());
            }
        }
        assert!(!SymplecticInt::j(2).in_gamma_infinity());
        assert!(!SymplecticInt::j(2)
            .mul(&SymplecticInt::j(2))
            .unwrap()
            .in_gamma_infinity());
    }

    #[test]
    fn translations_act_exactly() {
        let z = SiegelPoint::new(
            RealMatrix::from_rows(&[vec![0.25, 0.125], vec![0.125, -0.5]]).unwrap(),
            RealMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap(),
        )
        .unwrap();
        for m in gamma_inf_stream(GammaInfFamily {
            g: 2,
            j: 0,
            bound: 1,
        })
        .unwrap()
        {
            let moved = act(&m.to_real(), &z).unwrap();
            let s = m.block(1);
            for i in 0..2 {
                for k in 0..2 {
                    assert_eq!(moved.x()[(i, k)], z.x()[(i, k)] + s[i * 2 + k] as f64);
                    assert_eq!(moved.y().as_matrix()[(i, k)], z.y().as_matrix()[(i, k)]);
                }
            }
        }
    }
}
