//! Bergman-kernel series terms, truncated Petersson norms, the cosh-product
//! majorant, and the right-hand sides of the decay and cusp estimates.

use rayon::prelude::*;

use crate::arithmetic::{gamma_inf_stream, GammaInfFamily, SymplecticInt};
use crate::enumeration::GroupCache;
use crate::error::{Error, Result};
use crate::matkit::{log_det_complex, C64};
use crate::siegel::{act, distance, ln_cosh, spectrum, SiegelPoint};
use crate::volumes::{compensated_sum, polydisk_volume, QuadratureSpec};

/// Largest exponent accepted before a value is declared out of range.
const MAX_LN: f64 = 709.0;

/// Tensor power `k`, genus `g`, and the series normalisation constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub g: usize,
    pub k: u32,
    pub normalization: f64,
}

impl KernelParams {
    pub fn new(g: usize, k: u32) -> Result<Self> {
        if g < 2 {
            return Err(Error::Parameter(format!(
                "kernel numerics need g ≥ 2, got {g}"
            )));
        }
        if k == 0 {
            return Err(Error::Parameter("tensor power k must be at least 1".into()));
        }
        Ok(Self {
            g,
            k,
            normalization: 1.0,
        })
    }

    pub fn with_normalization(self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Parameter(format!(
                "normalization must be positive, got {c}"
            )));
        }
        Ok(Self {
            normalization: c,
            ..self
        })
    }

    /// `k(g+1)`.
    pub fn weight(&self) -> u32 {
        self.k * (self.g as u32 + 1)
    }

    fn check_point(&self, z: &SiegelPoint) -> Result<()> {
        if z.g() != self.g {
            return Err(Error::Dimension(format!(
                "point genus {} vs kernel genus {}",
                z.g(),
                self.g
            )));
        }
        Ok(())
    }
}

fn exp_checked(ln: C64) -> Result<C64> {
    if ln.re > MAX_LN {
        return Err(Error::Range { exponent: ln.re });
    }
    Ok(ln.exp())
}

/// Complex log of the `γ`-term
/// `C·4^{gw/2} / (det(Z − conj(γW))^w · det(C W̄ + D)^w)`.
fn ln_series_term(
    params: &KernelParams,
    z: &SiegelPoint,
    w: &SiegelPoint,
    gamma: &SymplecticInt,
) -> Result<C64> {
    params.check_point(z)?;
    params.check_point(w)?;
    let wt = params.weight() as f64;
    let gw = act(&gamma.to_real(), w)?;
    let diff = z.z().sub(&gw.z().conj());
    let real = gamma.to_real();
    let factor = real
        .c()
        .to_complex()
        .matmul(&w.z().conj())
        .add(&real.d().to_complex());
    let ln = C64::new(
        params.normalization.ln() + 0.5 * params.g as f64 * wt * 4f64.ln(),
        0.0,
    ) - log_det_complex(&diff)? * wt
        - log_det_complex(&factor)? * wt;
    Ok(ln)
}

/// The `γ`-term of the kernel series, evaluated through log-determinants.
pub fn series_term(
    params: &KernelParams,
    z: &SiegelPoint,
    w: &SiegelPoint,
    gamma: &SymplecticInt,
) -> Result<C64> {
    exp_checked(ln_series_term(params, z, w, gamma)?)
}

/// `det(YV)^{w/2}` times the `γ`-term; its modulus is
/// `C·∏ cosh^{-w}(r_j(Z, γW))`.
pub fn petersson_term(
    params: &KernelParams,
    z: &SiegelPoint,
    w: &SiegelPoint,
    gamma: &SymplecticInt,
) -> Result<C64> {
    let half = 0.5 * params.weight() as f64;
    let scale = half * (z.y().ln_det() + w.y().ln_det());
    exp_checked(ln_series_term(params, z, w, gamma)? + scale)
}

/// How the complex terms are added up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summation {
    /// Compensated (Neumaier) accumulation in cache order.
    Compensated,
    /// Balanced pairwise tree over cache order.
    Pairwise,
}

fn kahan_complex(terms: &[C64]) -> C64 {
    C64::new(
        compensated_sum(terms.iter().map(|t| t.re)),
        compensated_sum(terms.iter().map(|t| t.im)),
    )
}

fn pairwise_complex(terms: &[C64]) -> C64 {
    match terms.len() {
        0 => C64::new(0.0, 0.0),
        1 => terms[0],
        n => pairwise_complex(&terms[..n / 2]) + pairwise_complex(&terms[n / 2..]),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedNorm {
    /// `det(YV)^{w/2} |Σ_γ term(γ)|`.
    pub value: f64,
    /// Petersson-scaled terms in cache order.
    pub terms: Vec<C64>,
}

impl TruncatedNorm {
    /// Moduli of the scaled terms.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.norm()).collect()
    }
}

pub fn truncated_norm(
    params: &KernelParams,
    z: &SiegelPoint,
    w: &SiegelPoint,
    cache: &GroupCache,
) -> Result<TruncatedNorm> {
    truncated_norm_with(params, z, w, cache, Summation::Compensated)
}

pub fn truncated_norm_with(
    params: &KernelParams,
    z: &SiegelPoint,
    w: &SiegelPoint,
    cache: &GroupCache,
    mode: Summation,
) -> Result<TruncatedNorm> {
    let terms: Vec<C64> = cache
        .elements()
        .par_iter()
        .map(|gamma| petersson_term(params, z, w, gamma))
        .collect::<Result<_>>()?;
    let sum = match mode {
        Summation::Compensated => kahan_complex(&terms),
        Summation::Pairwise => pairwise_complex(&terms),
    };
    Ok(TruncatedNorm {
        value: sum.norm(),
        terms,
    })
}

/// `C · ∏_j cosh^{-w}(r_j(Z, γW)) = C · ∏_j (1 − ρ_j)^{w/2}`, from the
/// cross-ratio spectrum.
pub fn majorant_term(
    params: &KernelParams,
    z: &SiegelPoint,
    w: &SiegelPoint,
    gamma: &SymplecticInt,
) -> Result<f64> {
    params.check_point(z)?;
    params.check_point(w)?;
    let gw = act(&gamma.to_real(), w)?;
    let spec = spectrum(z, &gw)?;
    Ok(params.normalization * (0.5 * params.weight() as f64 * spec.ln_one_minus_rho()).exp())
}

/// Majorant terms for each element of `gammas`, in order.
pub fn majorant_terms(
    params: &KernelParams,
    z: &SiegelPoint,
    w: &SiegelPoint,
    gammas: &[SymplecticInt],
) -> Result<Vec<f64>> {
    gammas
        .par_iter()
        .map(|gamma| majorant_term(params, z, w, gamma))
        .collect()
}

/// `Σ_γ C·∏_j cosh^{-w}(r_j(Z, γW))` over the cache, compensated, in cache
/// order.
pub fn majorant_sum(
    params: &KernelParams,
    z: &SiegelPoint,
    w: &SiegelPoint,
    cache: &GroupCache,
) -> Result<f64> {
    Ok(compensated_sum(majorant_terms(
        params,
        z,
        w,
        cache.elements(),
    )?))
}

/// Sum of majorant terms over the non-identity translations `(Id S; 0 Id)`
/// with entries of `S` in `[-bound, bound]`.
pub fn gamma_inf0_majorant(
    params: &KernelParams,
    z: &SiegelPoint,
    w: &SiegelPoint,
    bound: i64,
) -> Result<f64> {
    let family = GammaInfFamily {
        g: params.g,
        j: 0,
        bound,
    };
    let gammas: Vec<SymplecticInt> = gamma_inf_stream(family)?.collect();
    Ok(compensated_sum(majorant_terms(params, z, w, &gammas)?))
}

/// `k^{g(g+1)/2} / cosh^{w − g² − g}(d / 2√2)`.
pub fn decay_bound(params: &KernelParams, d: f64) -> Result<f64> {
    let g = params.g as i32;
    let e = params.weight() as i32 - g * g - g;
    if e <= 0 {
        return Err(Error::Parameter(format!(
            "decay exponent k(g+1) − g² − g = {e} must be positive"
        )));
    }
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::Parameter(format!(
            "distance must be finite and nonnegative, got {d}"
        )));
    }
    let lead = (params.k as f64).powi(g * (g + 1) / 2);
    Ok(lead * (-(e as f64) * ln_cosh(d / (2.0 * 2f64.sqrt()))).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspBound {
    /// `k^{g(g+1)/4} (det 4Y)^{w/2} / (det V)^{(w−g−1)/2}`.
    pub cusp_term: f64,
    /// [`decay_bound`] at `d_S(Z, W)`.
    pub decay_term: f64,
    pub total: f64,
}

/// Requires `det V > det Y`; see [`order_for_cusp_bound`].
pub fn cusp_bound(params: &KernelParams, z: &SiegelPoint, w: &SiegelPoint) -> Result<CuspBound> {
    params.check_point(z)?;
    params.check_point(w)?;
    let (ln_dy, ln_dv) = (z.y().ln_det(), w.y().ln_det());
    if ln_dv <= ln_dy {
        return Err(Error::Precondition(format!(
            "the cusp estimate needs det(Im W) > det(Im Z), got {:e} ≤ {:e}",
            ln_dv.exp(),
            ln_dy.exp()
        )));
    }
    let (g, wt) = (params.g as f64, params.weight() as f64);
    let ln_cusp = g * (g + 1.0) / 4.0 * (params.k as f64).ln() + 0.5 * wt * (g * 4f64.ln() + ln_dy)
        - 0.5 * (wt - g - 1.0) * ln_dv;
    let cusp_term = exp_checked(C64::new(ln_cusp, 0.0))?.re;
    let decay_term = decay_bound(params, distance(z, w)?)?;
    Ok(CuspBound {
        cusp_term,
        decay_term,
        total: cusp_term + decay_term,
    })
}

/// `(Z, W)` ordered so that `det Im W ≥ det Im Z`.
pub fn order_for_cusp_bound(z: SiegelPoint, w: SiegelPoint) -> (SiegelPoint, SiegelPoint) {
    if w.y().det() < z.y().det() {
        (w, z)
    } else {
        (z, w)
    }
}

/// One comparison of a computed quantity against a bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub d_s: f64,
    pub det_y: f64,
    pub det_v: f64,
    pub params: KernelParams,
}

impl BoundReport {
    pub fn new(
        params: &KernelParams,
        z: &SiegelPoint,
        w: &SiegelPoint,
        lhs: f64,
        rhs: f64,
    ) -> Result<Self> {
        Ok(Self {
            lhs,
            rhs,
            ratio: lhs / rhs,
            d_s: distance(z, w)?,
            det_y: z.y().det(),
            det_v: w.y().det(),
            params: *params,
        })
    }
}

/// Supremum of the report ratios.
pub fn fitted_implied_constant(reports: &[BoundReport]) -> f64 {
    reports
        .iter()
        .map(|r| r.ratio)
        .fold(f64::NEG_INFINITY, f64::max)
}

// ---------------------------------------------------------------------------
// Orbit-sum bound via counting and volumes

/// Inputs of the three-term orbit-sum bound with `f(ρ) = cosh^{-K}(ρ/2√2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSumConfig {
    pub f_exponent: f64,
    pub rho0: f64,
    pub r_gamma: f64,
    pub vol_ball: f64,
    /// The genus constant multiplying the tail integral.
    pub c_g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSumBound {
    /// `Σ f(d)` over the supplied orbit distances `d < ρ0`.
    pub near_term: f64,
    /// `f(ρ0) · Vol(D(ρ0/2√2)) / vol_ball`.
    pub volume_term: f64,
    /// `c_g / vol_ball · ∫_{ρ0}^∞ f(ρ) cosh^{g²−1} sinh^{g+1}((ρ+r)/2√2) dρ`.
    pub tail_term: f64,
    pub total: f64,
}

fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
}

/// `f(ρ) = cosh^{-K}(ρ/2√2)`.
pub fn orbit_weight(k_exponent: f64, rho: f64) -> f64 {
    (-k_exponent * ln_cosh(rho / (2.0 * 2f64.sqrt()))).exp()
}

/// `∫_{ρ0}^∞ f(ρ) cosh^{g²−1}((ρ+r)/2√2) sinh^{g+1}((ρ+r)/2√2) dρ`, summed
/// panel by panel until a panel adds less than `1e-16` of the total.
pub fn orbit_tail_integral(g: usize, k_exponent: f64, rho0: f64, r_gamma: f64) -> Result<f64> {
    let gf = g as f64;
    if k_exponent <= gf * gf + gf {
        return Err(Error::Parameter(format!(
            "f exponent K = {k_exponent} must exceed g² + g = {} for the tail to converge",
            gf * gf + gf
        )));
    }
    let s = 2.0 * 2f64.sqrt();
    let integrand = |rho: f64| {
        let u = (rho + r_gamma) / s;
        (-k_exponent * ln_cosh(rho / s) + (gf * gf - 1.0) * ln_cosh(u) + (gf + 1.0) * ln_sinh(u))
            .exp()
    };
    simple_tail(rho0, &integrand)
}

/// `∫_{ρ0}^∞ sinh((ρ+r)/2√2) / cosh^{m+1}(ρ/2√2) dρ` with `m = K − g² − g`,
/// the simplified tail integrand.
pub fn simplified_tail_integral(g: usize, k_exponent: f64, rho0: f64, r_gamma: f64) -> Result<f64> {
    let gf = g as f64;
    let m = k_exponent - gf * gf - gf;
    if m <= 0.0 {
        return Err(Error::Parameter(format!(
            "K − g² − g = {m} must be positive"
        )));
    }
    let s = 2.0 * 2f64.sqrt();
    let integrand = |rho: f64| (ln_sinh((rho + r_gamma) / s) - (m + 1.0) * ln_cosh(rho / s)).exp();
    simple_tail(rho0, &integrand)
}

/// `1 / ((m+2) cosh^{m+2}(ρ0/2√2))`, the antiderivative shape used to
/// compare tail integrals across `K`.
pub fn tail_closed_form(g: usize, k_exponent: f64, rho0: f64) -> f64 {
    let gf = g as f64;
    let m = k_exponent - gf * gf - gf;
    (-(m + 2.0) * ln_cosh(rho0 / (2.0 * 2f64.sqrt()))).exp() / (m + 2.0)
}

fn simple_tail(rho0: f64, f: &dyn Fn(f64) -> f64) -> Result<f64> {
    const PANEL: f64 = 0.25;
    const MAX_PANELS: usize = 100_000;
    let (x, w) = crate::volumes::gauss_legendre_on(16, 0.0, PANEL);
    let mut acc = Vec::new();
    let mut total = 0.0;
    for p in 0..MAX_PANELS {
        let a = rho0 + p as f64 * PANEL;
        let v: f64 = x.iter().zip(&w).map(|(t, wt)| wt * f(a + t)).sum();
        if !v.is_finite() {
            return Err(Error::Range { exponent: a });
        }
        acc.push(v);
        total += v;
        if v <= 1e-16 * total && p > 0 {
            return Ok(compensated_sum(acc));
        }
    }
    Err(Error::NoConvergence {
        what: "tail integral truncation",
        iterations: MAX_PANELS,
    })
}

/// The three-term bound for `Σ f(d_S(Z, γW))` over the admissible orbit.
/// `near_distances` are the admissible orbit distances; those below `ρ0`
/// form the first term.
pub fn orbit_sum_bound(
    params: &KernelParams,
    cfg: &OrbitSumConfig,
    near_distances: &[f64],
    quad: &QuadratureSpec,
) -> Result<OrbitSumBound> {
    if cfg.rho0 <= cfg.r_gamma {
        return Err(Error::Parameter(format!(
            "ρ0 = {} must exceed the injectivity radius {}",
            cfg.rho0, cfg.r_gamma
        )));
    }
    if !(cfg.vol_ball > 0.0) {
        return Err(Error::Parameter("ball volume must be positive".into()));
    }
    let g = params.g;
    let near_term = compensated_sum(
        near_distances
            .iter()
            .filter(|&&d| d < cfg.rho0)
            .map(|&d| orbit_weight(cfg.f_exponent, d)),
    );
    let vol_d = polydisk_volume(g, cfg.rho0 / (2.0 * 2f64.sqrt()), quad)?;
    let volume_term = orbit_weight(cfg.f_exponent, cfg.rho0) * vol_d / cfg.vol_ball;
    let tail_term =
        cfg.c_g / cfg.vol_ball * orbit_tail_integral(g, cfg.f_exponent, cfg.rho0, cfg.r_gamma)?;
    Ok(OrbitSumBound {
        near_term,
        volume_term,
        tail_term,
        total: near_term + volume_term + tail_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::standard_cache;
    use crate::matkit::RealMatrix;

    fn params(k: u32) -> KernelParams {
        KernelParams::new(2, k).unwrap()
    }

    #[test]
    fn weight_and_validation() {
        assert_eq!(params(10).weight(), 30);
        assert!(KernelParams::new(1, 3).is_err());
        assert!(KernelParams::new(2, 0).is_err());
    }

    #[test]
    fn identity_term_by_hand() {
        // weight 3 needs k(g+1) = 3, i.e. g = 2, k = 1
        let z = SiegelPoint::i_identity(2);
        let t = series_term(&params(1), &z, &z, &SymplecticInt::identity(2)).unwrap();
        assert!((t - C64::new(-1.0, 0.0)).norm() < 1e-12, "{t}");
    }

    #[test]
    fn petersson_term_matches_cosh_product() {
        let p = params(2);
        let z = SiegelPoint::new(
            RealMatrix::from_rows(&[vec![0.1, 0.2], vec![0.2, -0.3]]).unwrap(),
            RealMatrix::from_rows(&[vec![1.2, 0.1], vec![0.1, 0.8]]).unwrap(),
        )
        .unwrap();
        let w = SiegelPoint::imaginary_diag(&[1.5, 0.7]).unwrap();
        for gamma in standard_cache(2, 2).unwrap().elements() {
            let lhs = petersson_term(&p, &z, &w, gamma).unwrap().norm();
            let rhs = majorant_term(&p, &z, &w, gamma).unwrap();
            assert!((lhs - rhs).abs() <= 1e-9 * rhs, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn translation_term_depends_on_shifted_difference() {
        let p = params(1);
        let z = SiegelPoint::i_identity(2);
        let w = SiegelPoint::imaginary_diag(&[2.0, 2.0]).unwrap();
        let s = [1, 0, 0, -1];
        let t = SymplecticInt::translation(2, &s).unwrap();
        let direct = series_term(&p, &z, &w, &t).unwrap();
        // same as the identity term for W + S
        let ws = w
            .translate(&RealMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap())
            .unwrap();
        let shifted = series_term(&p, &z, &ws, &SymplecticInt::identity(2)).unwrap();
        assert!((direct - shifted).norm() < 1e-12 * shifted.norm());
    }

    #[test]
    fn identity_cache_norm() {
        let z = SiegelPoint::i_identity(2);
        let only_id = standard_cache(2, 0).unwrap();
        let n = truncated_norm(&params(1), &z, &z, &only_id).unwrap();
        assert!((n.value - 1.0).abs() < 1e-12);

        let w = SiegelPoint::imaginary_diag(&[2.0, 2.0]).unwrap();
        let m = majorant_sum(&params(1), &z, &w, &only_id).unwrap();
        assert!((m - (8.0f64 / 9.0).powi(3)).abs() < 1e-12);
        assert!((m - 0.70233).abs() < 1e-5);
    }

    #[test]
    fn norm_below_majorant_and_summations_agree() {
        let p = params(5);
        let z = SiegelPoint::new(
            RealMatrix::from_rows(&[vec![0.1, 0.2], vec![0.2, -0.3]]).unwrap(),
            RealMatrix::from_rows(&[vec![1.2, 0.1], vec![0.1, 0.8]]).unwrap(),
        )
        .unwrap();
        let w = SiegelPoint::imaginary_diag(&[0.9, 1.1]).unwrap();
        let cache = standard_cache(2, 3).unwrap();
        let a = truncated_norm_with(&p, &z, &w, &cache, Summation::Compensated).unwrap();
        let b = truncated_norm_with(&p, &z, &w, &cache, Summation::Pairwise).unwrap();
        assert!((a.value - b.value).abs() <= 1e-12 * a.value);
        let m = majorant_sum(&p, &z, &w, &cache).unwrap();
        assert!(a.value <= m * (1.0 + 1e-9));
    }

    #[test]
    fn decay_bound_examples() {
        let p = params(10);
        assert_eq!(decay_bound(&p, 0.0).unwrap(), 1000.0);
        let d = 2.0 * 2f64.sqrt() * 2f64.acosh();
        let v = decay_bound(&p, d).unwrap();
        let expect = 1000.0 / 2f64.powi(24);
        assert!((v - expect).abs() < 1e-12 * expect);
        assert!(decay_bound(&p, 1.0).unwrap() > decay_bound(&p, 1.1).unwrap());
        assert!(matches!(
            decay_bound(&params(2), 1.0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn cusp_bound_examples() {
        let p = params(10);
        let z = SiegelPoint::i_identity(2);
        let e2 = 1f64.exp().powi(2);
        let w = SiegelPoint::imaginary_diag(&[e2, e2]).unwrap();
        let r = cusp_bound(&p, &z, &w).unwrap();
        // ln: 1.5 ln 10 + 15 ln 16 − 13.5 · 4
        let expect = (1.5 * 10f64.ln() + 15.0 * 16f64.ln() - 54.0).exp();
        assert!((r.cusp_term - expect).abs() < 1e-10 * expect);
        assert!(r.total.is_finite() && r.total > 0.0);
        assert!(matches!(
            cusp_bound(&p, &w, &z),
            Err(Error::Precondition(_))
        ));
        let (a, b) = order_for_cusp_bound(w.clone(), z.clone());
        assert_eq!((a, b), (z.clone(), w));

        let mut prev = f64::INFINITY;
        for s in [2.0, 4.0, 8.0, 16.0] {
            let far = SiegelPoint::imaginary_diag(&[s, s]).unwrap();
            let c = cusp_bound(&p, &z, &far).unwrap().cusp_term;
            assert!(c < prev);
            prev = c;
        }
    }

    #[test]
    fn tail_integrals() {
        let t200 = orbit_tail_integral(2, 200.0, 3.0, 0.5).unwrap();
        let t400 = orbit_tail_integral(2, 400.0, 3.0, 0.5).unwrap();
        assert!(t200 > 0.0 && t400 / t200 < 1e-3);
        assert!(orbit_tail_integral(2, 6.0, 3.0, 0.5).is_err());

        // with r = 0 the simplified tail has the antiderivative 2√2/(m cosh^m)
        let (m, rho0) = (20.0, 2.0);
        let exact = 2.0 * 2f64.sqrt() / (m * (rho0 / (2.0 * 2f64.sqrt())).cosh().powf(m));
        let q = simplified_tail_integral(2, m + 6.0, rho0, 0.0).unwrap();
        assert!((q - exact).abs() < 1e-10 * exact, "{q} vs {exact}");
    }

    #[test]
    fn orbit_sum_bound_terms() {
        let p = params(10);
        let cfg = OrbitSumConfig {
            f_exponent: 30.0,
            rho0: 2.0,
            r_gamma: 0.5,
            vol_ball: 1e-3,
            c_g: 6.0,
        };
        let b = orbit_sum_bound(&p, &cfg, &[0.1, 1.0, 3.0], &QuadratureSpec::default()).unwrap();
        assert!((b.near_term - (orbit_weight(30.0, 0.1) + orbit_weight(30.0, 1.0))).abs() < 1e-15);
        assert!(b.volume_term > 0.0 && b.tail_term > 0.0);
        assert!(orbit_sum_bound(
            &p,
            &OrbitSumConfig { rho0: 0.4, ..cfg },
            &[],
            &QuadratureSpec::default()
        )
        .is_err());
    }
}
