//! Radial volumes in polar coordinates: the polar density, polydisk and
//! ball volumes, the genus-two closed form and the shape bounds, plus the
//! special functions used by the cusp estimates.

pub mod quadrature;
pub mod special;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub use quadrature::{
    compensated_sum, gauss_legendre, gauss_legendre_on, tensor_integral, QuadratureSpec,
};
pub use special::{hua_asymptotic_ratio, hua_beta, ln_hua_beta, log_gamma};

/// Largest genus handled by the tensor-product path.
pub const MAX_TENSOR_GENUS: usize = 4;
/// Monte Carlo samples drawn per independently seeded batch.
pub const MC_BATCH: usize = 10_000;

/// `∏ sinh²(r_j) ∏_{j<k} sinh²((r_j − r_k)/2) sinh²((r_j + r_k)/2)`.
pub fn polar_density(r: &[f64]) -> f64 {
    let mut v: f64 = r.iter().map(|x| x.sinh().powi(2)).product();
    for j in 0..r.len() {
        for k in (j + 1)..r.len() {
            v *= (0.5 * (r[j] - r[k])).sinh().powi(2) * (0.5 * (r[j] + r[k])).sinh().powi(2);
        }
    }
    v
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Parameter(format!(
            "radius must be finite and positive, got {r}"
        )));
    }
    Ok(())
}

/// `2^g ∫_{[0,r]^g} density`, converged by node doubling.
pub fn polydisk_volume_with<F>(g: usize, r: f64, quad: &QuadratureSpec, density: &F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_radius(r)?;
    if g == 0 || g > MAX_TENSOR_GENUS {
        return Err(Error::Parameter(format!(
            "tensor quadrature supports 1 ≤ g ≤ {MAX_TENSOR_GENUS}, got {g}"
        )));
    }
    Ok(2f64.powi(g as i32) * tensor_integral(g, r, quad, density)?)
}

/// Volume of the polydisk `{|r_j| ≤ r}` under the polar density.
pub fn polydisk_volume(g: usize, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    polydisk_volume_with(g, r, quad, &polar_density)
}

/// The genus-two pieces: `I1 = I2 = (∫ sinh² cosh²)(∫ sinh²)`,
/// `I3 = (∫ sinh² cosh)²`, all over `[0, r]`, and `I1 + I2 − 2 I3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vol2ClosedForm {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub total: f64,
}

pub fn closed_form_vol2(r: f64) -> Result<Vol2ClosedForm> {
    check_radius(r)?;
    let (s, c) = (r.sinh(), r.cosh());
    let i1 = (s * c - r) * (6.0 * s.powi(3) * c + 3.0 * s * c - 3.0 * r) / 48.0;
    let i3 = s.powi(6) / 9.0;
    Ok(Vol2ClosedForm {
        i1,
        i2: i1,
        i3,
        total: 2.0 * i1 - 2.0 * i3,
    })
}

/// `32 cosh² r sinh⁴ r`.
pub fn genus2_volume_bound(r: f64) -> f64 {
    32.0 * r.cosh().powi(2) * r.sinh().powi(4)
}

/// `cosh^{g²−2} r · sinh^{g+2} r`.
pub fn volume_shape(g: usize, r: f64) -> f64 {
    let g = g as i32;
    r.cosh().powi(g * g - 2) * r.sinh().powi(g + 2)
}

/// Derivative in `r` of [`volume_shape`].
pub fn volume_shape_derivative(g: usize, r: f64) -> f64 {
    let (a, b) = ((g * g) as i32 - 2, g as i32 + 2);
    let (s, c) = (r.sinh(), r.cosh());
    a as f64 * c.powi(a - 1) * s.powi(b + 1) + b as f64 * c.powi(a + 1) * s.powi(b - 1)
}

/// `cosh^{g²−1} r · sinh^{g+1} r`, the majorant shape of that derivative.
pub fn derivative_shape(g: usize, r: f64) -> f64 {
    let g = g as i32;
    r.cosh().powi(g * g - 1) * r.sinh().powi(g + 1)
}

/// `sup` of the ratios, the fitted constant of a shape bound.
pub fn fitted_constant(ratios: &[f64]) -> f64 {
    ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub hits: u64,
    pub samples: u64,
}

/// Volume of the geodesic ball `{√(8 Σ r_j²) < r}` under the polar density,
/// by uniform sampling of the box `[0, r/2√2]^g` (folded by `2^g`). Batch `b`
/// uses the stream seeded with `seed + b`, so results do not depend on the
/// thread count.
pub fn ball_volume(g: usize, r: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    check_radius(r)?;
    if g == 0 {
        return Err(Error::Parameter("g must be positive".into()));
    }
    if samples < 10_000 {
        return Err(Error::Parameter(format!(
            "at least 10^4 samples required, got {samples}"
        )));
    }
    let a = r / (2.0 * 2f64.sqrt());
    let r2 = r * r;
    let batches = samples.div_ceil(MC_BATCH as u64);
    let sums: Vec<(f64, f64, u64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let n = (samples - b * MC_BATCH as u64).min(MC_BATCH as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(b));
            let mut point = vec![0.0; g];
            let (mut s1, mut s2, mut hits) = (0.0, 0.0, 0);
            for _ in 0..n {
                for p in point.iter_mut() {
                    *p = rng.gen::<f64>() * a;
                }
                if 8.0 * point.iter().map(|v| v * v).sum::<f64>() < r2 {
                    let f = polar_density(&point);
                    s1 += f;
                    s2 += f * f;
                    hits += 1;
                }
            }
            (s1, s2, hits)
        })
        .collect();
    let s1 = compensated_sum(sums.iter().map(|t| t.0));
    let s2 = compensated_sum(sums.iter().map(|t| t.1));
    let hits: u64 = sums.iter().map(|t| t.2).sum();
    if hits == 0 {
        return Err(Error::Degenerate(format!(
            "no sample landed in the ball of radius {r}"
        )));
    }
    let n = samples as f64;
    let scale = 2f64.powi(g as i32) * a.powi(g as i32);
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0);
    Ok(McEstimate {
        value: scale * mean,
        stderr: scale * (var / n).sqrt(),
        hits,
        samples,
    })
}

/// `e_k(x_1, …, x_m)` by the one-pass recurrence.
pub fn elem_sym(values: &[f64], k: usize) -> Result<f64> {
    if k > values.len() {
        return Err(Error::Parameter(format!(
            "k = {k} exceeds the {} variables",
            values.len()
        )));
    }
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &x in values {
        for j in (1..=k).rev() {
            e[j] += x * e[j - 1];
        }
    }
    Ok(e[k])
}

/// `∫_0^r sinh² t cosh^{2k} t dt` together with whether
/// `2·∫ ≤ sinh³ r cosh^{2k−1} r + sinh r cosh r` holds.
pub fn sinh2_cosh2k_integral(r: f64, k: u32) -> Result<(f64, bool)> {
    check_radius(r)?;
    let spec = QuadratureSpec::default();
    let f = |p: &[f64]| p[0].sinh().powi(2) * p[0].cosh().powi(2 * k as i32);
    let value = tensor_integral(1, r, &spec, &f)?;
    let (s, c) = (r.sinh(), r.cosh());
    let bound = s.powi(3) * c.powi(2 * k as i32 - 1) + s * c;
    Ok((value, 2.0 * value <= bound))
}
