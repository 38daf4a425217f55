//! Points of the Siegel upper half space, the symplectic action, cross-ratio
//! spectra and the invariant distance.

use crate::error::{Error, Result};
use crate::matkit::{
    det_complex, eigenvalues_complex, inverse, spd_sqrt, ComplexMatrix, RealMatrix, SpdMatrix, C64,
};

/// Asymmetry (relative to `max(1, max|entry|)`) repaired silently when
/// building a point; anything larger is rejected.
pub const SYMMETRY_REPAIR: f64 = 1e-9;
/// Symplectic relation residual accepted for real matrices, relative to
/// `max(1, max|entry|^2)`.
pub const SYMPLECTIC_TOL: f64 = 1e-9;
/// Cross-ratio eigenvalues in `[-SPECTRUM_CLAMP, 0)` are set to zero.
pub const SPECTRUM_CLAMP: f64 = 1e-9;
/// Largest imaginary part tolerated on a cross-ratio eigenvalue.
pub const SPECTRUM_IMAG: f64 = 1e-7;
/// Below this every eigenvalue counts as zero and the distance is exactly 0.
pub const COINCIDENT_RHO: f64 = 1e-18;

fn check_dim(m: &RealMatrix, g: usize, name: &str) -> Result<()> {
    if m.rows() != g || m.cols() != g {
        return Err(Error::Dimension(format!(
            "{name} is {}x{}, expected {g}x{g}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn repair_symmetry(m: &RealMatrix) -> Result<RealMatrix> {
    let (row, col, gap) = m.asymmetry();
    if gap > SYMMETRY_REPAIR * m.max_abs().max(1.0) {
        return Err(Error::Asymmetric { row, col, gap });
    }
    Ok(m.symmetrized())
}

/// `Z = X + iY` with `X` symmetric and `Y` positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    x: RealMatrix,
    y: SpdMatrix,
}

impl SiegelPoint {
    pub fn new(x: RealMatrix, y: RealMatrix) -> Result<Self> {
        let g = x.rows();
        check_dim(&x, g, "X")?;
        check_dim(&y, g, "Y")?;
        let x = repair_symmetry(&x)?;
        let y = SpdMatrix::new(repair_symmetry(&y)?)?;
        Ok(Self { x, y })
    }

    pub fn from_z(z: &ComplexMatrix) -> Result<Self> {
        Self::new(z.re(), z.im())
    }

    /// `i·Id_g`.
    pub fn i_identity(g: usize) -> Self {
        Self {
            x: RealMatrix::zeros(g, g),
            y: SpdMatrix::identity(g),
        }
    }

    /// `i·diag(ys)`.
    pub fn imaginary_diag(ys: &[f64]) -> Result<Self> {
        Self::new(
            RealMatrix::zeros(ys.len(), ys.len()),
            RealMatrix::from_diag(ys),
        )
    }

    pub fn g(&self) -> usize {
        self.x.rows()
    }

    pub fn x(&self) -> &RealMatrix {
        &self.x
    }

    pub fn y(&self) -> &SpdMatrix {
        &self.y
    }

    pub fn z(&self) -> ComplexMatrix {
        ComplexMatrix::from_parts(&self.x, self.y.as_matrix())
    }

    /// `Z + S` for a real symmetric `S`.
    pub fn translate(&self, s: &RealMatrix) -> Result<Self> {
        Self::new(self.x.add(s), self.y.as_matrix().clone())
    }
}

/// The standard alternating form `J = (0 -Id; Id 0)` as a `2g×2g` matrix.
pub fn j_form(g: usize) -> RealMatrix {
    RealMatrix::from_fn(2 * g, 2 * g, |i, j| {
        if i < g && j == i + g {
            -1.0
        } else if i >= g && j + g == i {
            1.0
        } else {
            0.0
        }
    })
}

/// Largest entry of `M^T J M - J` with its position.
pub fn symplectic_residual(m: &RealMatrix) -> (usize, usize, f64) {
    let n = m.rows();
    let j = j_form(n / 2);
    let r = m.transpose().matmul(&j).matmul(m).sub(&j);
    let mut worst = (0, 0, 0.0f64);
    for a in 0..n {
        for b in 0..n {
            if r[(a, b)].abs() > worst.2.abs() {
                worst = (a, b, r[(a, b)]);
            }
        }
    }
    worst
}

/// A real symplectic matrix `(A B; C D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticReal {
    a: RealMatrix,
    b: RealMatrix,
    c: RealMatrix,
    d: RealMatrix,
}

impl SymplecticReal {
    pub fn from_blocks(a: RealMatrix, b: RealMatrix, c: RealMatrix, d: RealMatrix) -> Result<Self> {
        let g = a.rows();
        for (m, name) in [(&a, "A"), (&b, "B"), (&c, "C"), (&d, "D")] {
            check_dim(m, g, name)?;
        }
        let s = Self { a, b, c, d };
        let full = s.full();
        let (row, col, residual) = symplectic_residual(&full);
        let scale = full.max_abs().max(1.0);
        if residual.abs() > SYMPLECTIC_TOL * scale * scale {
            return Err(Error::NotSymplectic { row, col, residual });
        }
        Ok(s)
    }

    pub fn from_full(m: &RealMatrix) -> Result<Self> {
        if !m.is_square() || m.rows() % 2 != 0 {
            return Err(Error::Dimension(format!(
                "symplectic matrices are square of even size, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let g = m.rows() / 2;
        Self::from_blocks(
            m.block(0, 0, g, g),
            m.block(0, g, g, g),
            m.block(g, 0, g, g),
            m.block(g, g, g, g),
        )
    }

    /// Used for matrices that are symplectic by construction (exact integer
    /// matrices converted to floating point).
    pub(crate) fn from_blocks_unchecked(
        a: RealMatrix,
        b: RealMatrix,
        c: RealMatrix,
        d: RealMatrix,
    ) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity(g: usize) -> Self {
        let (id, z) = (RealMatrix::identity(g), RealMatrix::zeros(g, g));
        Self::from_blocks_unchecked(id.clone(), z.clone(), z, id)
    }

    pub fn j(g: usize) -> Self {
        let (id, z) = (RealMatrix::identity(g), RealMatrix::zeros(g, g));
        Self::from_blocks_unchecked(z.clone(), id.scale(-1.0), id, z)
    }

    /// `(Id S; 0 Id)` for symmetric `S`.
    pub fn translation(s: &RealMatrix) -> Result<Self> {
        let g = s.rows();
        let (id, z) = (RealMatrix::identity(g), RealMatrix::zeros(g, g));
        Self::from_blocks(id.clone(), s.clone(), z, id)
    }

    pub fn g(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &RealMatrix {
        &self.a
    }
    pub fn b(&self) -> &RealMatrix {
        &self.b
    }
    pub fn c(&self) -> &RealMatrix {
        &self.c
    }
    pub fn d(&self) -> &RealMatrix {
        &self.d
    }

    pub fn full(&self) -> RealMatrix {
        let g = self.g();
        RealMatrix::from_fn(2 * g, 2 * g, |i, j| {
            let blk = match (i < g, j < g) {
                (true, true) => &self.a,
                (true, false) => &self.b,
                (false, true) => &self.c,
                (false, false) => &self.d,
            };
            blk[(i % g, j % g)]
        })
    }

    pub fn compose(&self, other: &Self) -> Self {
        let m = self.full().matmul(&other.full());
        let g = self.g();
        Self::from_blocks_unchecked(
            m.block(0, 0, g, g),
            m.block(0, g, g, g),
            m.block(g, 0, g, g),
            m.block(g, g, g, g),
        )
    }

    /// `M^{-1} = (D^T, -B^T; -C^T, A^T)`.
    pub fn inverse(&self) -> Self {
        Self::from_blocks_unchecked(
            self.d.transpose(),
            self.b.transpose().scale(-1.0),
            self.c.transpose().scale(-1.0),
            self.a.transpose(),
        )
    }

    /// `det(CZ + D)`.
    pub fn automorphy_det(&self, z: &SiegelPoint) -> Result<C64> {
        check_same_g(self.g(), z.g())?;
        let zc = z.z();
        det_complex(&self.c.to_complex().matmul(&zc).add(&self.d.to_complex()))
    }
}

fn check_same_g(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("genus mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// `γZ = (AZ + B)(CZ + D)^{-1}`.
pub fn act(gamma: &SymplecticReal, z: &SiegelPoint) -> Result<SiegelPoint> {
    check_same_g(gamma.g(), z.g())?;
    let zc = z.z();
    let num = gamma.a.to_complex().matmul(&zc).add(&gamma.b.to_complex());
    let den = gamma.c.to_complex().matmul(&zc).add(&gamma.d.to_complex());
    SiegelPoint::from_z(&num.matmul(&inverse(&den)?))
}

/// `σ = (Y^{-1/2}, -Y^{-1/2}X; 0, Y^{1/2})`, which sends `Z` to `i·Id`.
pub fn sigma_normalizer(z: &SiegelPoint) -> Result<SymplecticReal> {
    let g = z.g();
    let root = spd_sqrt(z.y())?;
    let inv_root = z.y().inv_sqrt()?;
    let a = inv_root.as_matrix().clone();
    let b = a.matmul(z.x()).scale(-1.0);
    SymplecticReal::from_blocks(a, b, RealMatrix::zeros(g, g), root.as_matrix().clone())
}

/// `ρ(Z,W) = (Z−W)(Z̄−W)^{-1}(Z̄−W̄)(Z−W̄)^{-1}`.
pub fn cross_ratio(z: &SiegelPoint, w: &SiegelPoint) -> Result<ComplexMatrix> {
    check_same_g(z.g(), w.g())?;
    let (zc, wc) = (z.z(), w.z());
    let (zb, wb) = (zc.conj(), wc.conj());
    let f1 = zc.sub(&wc);
    let f2 = inverse(&zb.sub(&wc))?;
    let f3 = zb.sub(&wb);
    let f4 = inverse(&zc.sub(&wb))?;
    Ok(f1.matmul(&f2).matmul(&f3).matmul(&f4))
}

/// Eigenvalues `ρ_j ∈ [0,1)` of the cross-ratio matrix (ascending) and the
/// radii `r_j = atanh(√ρ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossRatioSpectrum {
    pub rho: Vec<f64>,
    pub radii: Vec<f64>,
}

impl CrossRatioSpectrum {
    /// Validates and clamps raw eigenvalues.
    pub fn from_eigenvalues(eig: &[C64]) -> Result<Self> {
        let mut rho = Vec::with_capacity(eig.len());
        for e in eig {
            if e.im.abs() >= SPECTRUM_IMAG
                || e.re >= 1.0
                || e.re < -SPECTRUM_CLAMP
                || !e.re.is_finite()
            {
                return Err(Error::SpectralValidity { re: e.re, im: e.im });
            }
            rho.push(e.re.max(0.0));
        }
        rho.sort_by(f64::total_cmp);
        let radii = rho.iter().map(|p| p.sqrt().atanh()).collect();
        Ok(Self { rho, radii })
    }

    /// `√(8 Σ r_j²)`, or exactly zero when every `ρ_j` is below
    /// [`COINCIDENT_RHO`].
    pub fn distance(&self) -> f64 {
        if self.rho.iter().all(|&p| p < COINCIDENT_RHO) {
            return 0.0;
        }
        (8.0 * self.radii.iter().map(|r| r * r).sum::<f64>()).sqrt()
    }

    /// `∏ (1 − ρ_j) = ∏ cosh^{-2}(r_j)`.
    pub fn cosh_product_inv_sq(&self) -> f64 {
        self.rho.iter().map(|p| 1.0 - p).product()
    }

    /// `Σ ln(1 − ρ_j)`.
    pub fn ln_one_minus_rho(&self) -> f64 {
        self.rho.iter().map(|p| (-p).ln_1p()).sum()
    }
}

pub fn spectrum(z: &SiegelPoint, w: &SiegelPoint) -> Result<CrossRatioSpectrum> {
    let rho = cross_ratio(z, w)?;
    CrossRatioSpectrum::from_eigenvalues(&eigenvalues_complex(&rho)?)
}

pub fn distance(z: &SiegelPoint, w: &SiegelPoint) -> Result<f64> {
    Ok(spectrum(z, w)?.distance())
}

/// `det(Y)^{-(g+1)}`.
pub fn volume_density(z: &SiegelPoint) -> f64 {
    z.y().det().powi(-(z.g() as i32 + 1))
}

/// `det(Y)^{weight}`.
pub fn petersson_factor(z: &SiegelPoint, weight: u32) -> f64 {
    (weight as f64 * z.y().ln_det()).exp()
}

/// Relative gap between `det(4YV)/|det(Z − W̄)|²` and `∏(1 − ρ_j)`.
pub fn identity_residual(z: &SiegelPoint, w: &SiegelPoint) -> Result<f64> {
    let spec = spectrum(z, w)?;
    let g = z.g() as f64;
    let dzw = det_complex(&z.z().sub(&w.z().conj()))?;
    let lhs = 4f64.powf(g) * z.y().det() * w.y().det() / dzw.norm_sqr();
    let rhs = spec.cosh_product_inv_sq();
    Ok((lhs - rhs).abs() / rhs)
}

/// The three members of `cosh x ≤ ∏ cosh x_j ≤ cosh^g(x/√g)` with
/// `x = |x⃗|`, all as natural logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoshProduct {
    pub ln_lower: f64,
    pub ln_product: f64,
    pub ln_upper: f64,
}

impl CoshProduct {
    pub fn holds(&self) -> bool {
        self.ln_lower <= self.ln_product && self.ln_product <= self.ln_upper
    }
}

/// `ln cosh x` without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

pub fn cosh_product(xs: &[f64]) -> CoshProduct {
    let g = xs.len() as f64;
    let norm = xs.iter().map(|v| v * v).sum::<f64>().sqrt();
    CoshProduct {
        ln_lower: ln_cosh(norm),
        ln_product: xs.iter().map(|&v| ln_cosh(v)).sum(),
        ln_upper: g * ln_cosh(norm / g.sqrt()),
    }
}
