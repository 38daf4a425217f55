//! Log-Gamma and the Hua matrix beta integral.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7, nine terms).
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Parameter(format!(
            "log_gamma needs a finite positive argument, got {x}"
        )));
    }
    if x < 0.5 {
        return Ok(log_gamma(x + 1.0)? - x.ln());
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    Ok(0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln())
}

fn checked_log_gamma(x: f64, factor: &str) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Parameter(format!(
            "Gamma argument of {factor} is {x}, must be positive"
        )));
    }
    log_gamma(x)
}

/// Natural log of
/// `π^{g(g+1)/4} Γ(w/2 − g/2)/Γ(w/2) ∏_{j=1}^{g−1} Γ(w − (g+j)/2)/Γ(w − j)`
/// with `w = k(g+1)`.
pub fn ln_hua_beta(g: usize, k: u32) -> Result<f64> {
    if g == 0 || k == 0 {
        return Err(Error::Parameter("g and k must be positive".into()));
    }
    let gf = g as f64;
    let w = k as f64 * (gf + 1.0);
    let mut acc = gf * (gf + 1.0) / 4.0 * PI.ln();
    acc += checked_log_gamma(w / 2.0 - gf / 2.0, "Γ(w/2 − g/2)")?;
    acc -= checked_log_gamma(w / 2.0, "Γ(w/2)")?;
    for j in 1..g {
        let jf = j as f64;
        acc += checked_log_gamma(w - (gf + jf) / 2.0, &format!("Γ(w − (g+{j})/2)"))?;
        acc -= checked_log_gamma(w - jf, &format!("Γ(w − {j})"))?;
    }
    Ok(acc)
}

/// `∫ det(T² + Id)^{-k(g+1)/2} dT` over real symmetric `g×g` matrices.
pub fn hua_beta(g: usize, k: u32) -> Result<f64> {
    Ok(ln_hua_beta(g, k)?.exp())
}

/// `hua_beta(g, k) · k^{g(g+1)/4}` for each `k`.
pub fn hua_asymptotic_ratio(g: usize, ks: &[u32]) -> Result<Vec<f64>> {
    if ks.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::Parameter(
            "k values must be strictly increasing".into(),
        ));
    }
    let e = (g * (g + 1)) as f64 / 4.0;
    ks.iter()
        .map(|&k| Ok((ln_hua_beta(g, k)? + e * (k as f64).ln()).exp()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volumes::quadrature::gauss_legendre_on;

    #[test]
    fn classical_values() {
        assert!((log_gamma(0.5).unwrap().exp() - PI.sqrt()).abs() < 1e-13);
        assert!((log_gamma(5.0).unwrap().exp() - 24.0).abs() < 1e-11);
        assert!(log_gamma(1.0).unwrap().abs() < 1e-15);
        assert!(matches!(log_gamma(0.0), Err(Error::Parameter(_))));
        assert!(matches!(log_gamma(-1.5), Err(Error::Parameter(_))));
    }

    #[test]
    fn recurrence() {
        let mut x = 0.05;
        while x < 60.0 {
            let lhs = log_gamma(x + 1.0).unwrap();
            let rhs = log_gamma(x).unwrap() + x.ln();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "x={x}");
            x += 0.37;
        }
    }

    // ∫_R (1+t²)^{-k} dt via t = tan θ: ∫_{-π/2}^{π/2} cos^{2k-2} θ dθ
    fn one_dim(k: u32) -> f64 {
        let (x, w) = gauss_legendre_on(200, -PI / 2.0, PI / 2.0);
        x.iter()
            .zip(&w)
            .map(|(t, v)| v * t.cos().powi(2 * k as i32 - 2))
            .sum()
    }

    #[test]
    fn genus_one_matches_quadrature() {
        assert!((hua_beta(1, 1).unwrap() - PI).abs() < 1e-12);
        for k in [2, 3, 5] {
            let h = hua_beta(1, k).unwrap();
            assert!((h - one_dim(k)).abs() < 1e-8 * h, "k={k}");
        }
    }

    #[test]
    fn genus_one_collapses() {
        for k in 1..40u32 {
            let kf = k as f64;
            let v = hua_beta(1, k).unwrap()
                * (log_gamma(kf).unwrap() - log_gamma(kf - 0.5).unwrap()).exp();
            assert!((v - PI.sqrt()).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn genus_two_closed_form() {
        // π^{3/2} Γ(2)/Γ(3) · Γ(4.5)/Γ(5)
        let expect = PI.powf(1.5) * 0.5 * (log_gamma(4.5).unwrap().exp() / 24.0);
        assert!((hua_beta(2, 2).unwrap() - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn ratio_tends_to_root_pi() {
        let r = hua_asymptotic_ratio(1, &[20, 40, 80, 160, 320]).unwrap();
        assert!((r[4] - PI.sqrt()).abs() < 0.01 * PI.sqrt());
        assert!(r.iter().all(|&v| v > 0.0));
        assert!(hua_asymptotic_ratio(1, &[5, 5]).is_err());
    }
}
