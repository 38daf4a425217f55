//! Gauss–Legendre rules and tensor-product integration over boxes.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Node count, tolerance and doubling budget for tensor quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub nodes: usize,
    pub rel_tol: f64,
    pub max_doublings: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes: 64,
            rel_tol: 1e-8,
            max_doublings: 3,
        }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(nodes: usize) -> Self {
        Self {
            nodes,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 8 {
            return Err(Error::Parameter(format!(
                "at least 8 nodes per axis required, got {}",
                self.nodes
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::Parameter(
                "quadrature tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let step = pn / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

/// Neumaier-compensated sum, in iteration order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// One tensor-product rule over `[0, r]^dim`. The outermost axis is split
/// across threads; partial sums are combined in axis order, so the result
/// does not depend on the thread count.
pub fn tensor_rule<F>(dim: usize, r: f64, n: usize, f: &F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let (x, w) = gauss_legendre_on(n, 0.0, r);
    let partial: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i0| {
            let mut point = vec![0.0; dim];
            point[0] = x[i0];
            let inner = n.pow(dim as u32 - 1);
            let mut acc = Vec::with_capacity(inner);
            for mut idx in 0..inner {
                let mut weight = w[i0];
                for slot in point.iter_mut().skip(1) {
                    let k = idx % n;
                    idx /= n;
                    *slot = x[k];
                    weight *= w[k];
                }
                acc.push(weight * f(&point));
            }
            compensated_sum(acc)
        })
        .collect();
    compensated_sum(partial)
}

/// Tensor rule with node doubling until two successive values agree to
/// `spec.rel_tol`.
pub fn tensor_integral<F>(dim: usize, r: f64, spec: &QuadratureSpec, f: &F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    spec.validate()?;
    if dim == 0 {
        return Err(Error::Parameter(
            "integration dimension must be positive".into(),
        ));
    }
    let mut n = spec.nodes;
    let mut prev = tensor_rule(dim, r, n, f);
    let mut older = prev;
    for _ in 0..spec.max_doublings {
        n *= 2;
        let next = tensor_rule(dim, r, n, f);
        if (next - prev).abs() <= spec.rel_tol * next.abs() {
            return Ok(next);
        }
        older = prev;
        prev = next;
    }
    Err(Error::QuadratureNoConvergence {
        previous: older,
        last: prev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 8, 17] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(t, v)| v * t.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn nodes_are_sorted_and_inside() {
        let (x, _) = gauss_legendre(64);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        assert!(x[0] > -1.0 && x[63] < 1.0);
    }

    #[test]
    fn tensor_rule_separable() {
        let f = |p: &[f64]| p.iter().map(|t| t.exp()).product::<f64>();
        let v = tensor_integral(3, 1.0, &QuadratureSpec::with_nodes(8), &f).unwrap();
        assert!((v - (1f64.exp() - 1.0).powi(3)).abs() < 1e-13);
    }

    #[test]
    fn doubling_failure_is_reported() {
        // |x - 1/3|^0.5 has a kink GL cannot resolve to 1e-15
        let spec = QuadratureSpec {
            nodes: 8,
            rel_tol: 1e-15,
            max_doublings: 1,
        };
        let f = |p: &[f64]| (p[0] - 1.0 / 3.0).abs().sqrt();
        assert!(matches!(
            tensor_integral(1, 1.0, &spec, &f),
            Err(Error::QuadratureNoConvergence { .. })
        ));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = compensated_sum([1e16, 1.0, -1e16, 1.0]);
        assert_eq!(v, 2.0);
    }
}
