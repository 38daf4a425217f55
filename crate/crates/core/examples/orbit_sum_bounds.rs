//! Orbit sums of cosh^(-K)(d/2√2) against the three-term bound built from
//! windowed counts, polydisk volumes and a ball volume.

use siegel_lab::enumeration::{
    injectivity_radius_estimate, orbit_distances, standard_cache, CountMode,
};
use siegel_lab::kernel::{
    orbit_sum_bound, orbit_weight, simplified_tail_integral, tail_closed_form, KernelParams,
    OrbitSumConfig,
};
use siegel_lab::sampling::{random_point, rng};
use siegel_lab::verify::TAIL_CONSTANT_G2;
use siegel_lab::volumes::{ball_volume, QuadratureSpec};

fn main() -> siegel_lab::Result<()> {
    let cache = standard_cache(2, 3)?.projective();
    let mut r = rng(42);
    let (z, w) = (random_point(2, &mut r), random_point(2, &mut r));
    let r_hat =
        injectivity_radius_estimate(&cache, std::slice::from_ref(&w), CountMode::Cocompact)?.radius;
    let d = orbit_distances(&cache, &z, &w)?;
    let vol = ball_volume(2, r_hat, 200_000, 42)?.value;
    println!("injectivity radius estimate {r_hat:.4}, ball volume {vol:.4e}");

    for k in [20.0, 50.0, 100.0, 200.0] {
        let cfg = OrbitSumConfig {
            f_exponent: k,
            rho0: 2.0 * r_hat,
            r_gamma: r_hat,
            vol_ball: vol,
            c_g: TAIL_CONSTANT_G2,
        };
        let lhs: f64 = d.iter().map(|&x| orbit_weight(k, x)).sum();
        let b = orbit_sum_bound(
            &KernelParams::new(2, 10)?,
            &cfg,
            &d,
            &QuadratureSpec::default(),
        )?;
        let shape =
            simplified_tail_integral(2, k, cfg.rho0, r_hat)? / tail_closed_form(2, k, cfg.rho0);
        println!(
            "K={k}: sum {lhs:.4e} <= {:.4e} (near {:.2e}, volume {:.2e}, tail {:.2e}); tail/closed form {shape:.4}",
            b.total, b.near_term, b.volume_term, b.tail_term
        );
    }
    Ok(())
}
