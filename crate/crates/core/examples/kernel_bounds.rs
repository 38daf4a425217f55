//! Truncated kernel norms against the cosh-product majorant, the decay
//! bound along a diagonal ray, and the cusp bound.

use siegel_lab::enumeration::standard_cache;
use siegel_lab::kernel::{
    cusp_bound, decay_bound, majorant_sum, order_for_cusp_bound, truncated_norm, KernelParams,
};
use siegel_lab::sampling::{random_point, rng};
use siegel_lab::siegel::{distance, SiegelPoint};
use siegel_lab::verify::diagonal_ray_point;

fn main() -> siegel_lab::Result<()> {
    let p = KernelParams::new(2, 10)?;
    let cache = standard_cache(2, 3)?;
    let mut r = rng(42);
    for _ in 0..3 {
        let (z, w) = (random_point(2, &mut r), random_point(2, &mut r));
        let n = truncated_norm(&p, &z, &w, &cache)?.value;
        let m = majorant_sum(&p, &z, &w, &cache)?;
        let (a, b) = order_for_cusp_bound(z, w);
        let t2 = cusp_bound(&p, &a, &b)?;
        println!(
            "norm {n:.4e} <= majorant {m:.4e}; cusp bound {:.3e} + {:.3e}",
            t2.cusp_term, t2.decay_term
        );
    }

    let z = SiegelPoint::i_identity(2);
    println!("d, majorant, decay bound");
    for d in [0.0, 2.0, 3.0, 4.0, 5.0, 6.0] {
        let w = diagonal_ray_point(2, d)?;
        let m = majorant_sum(&p, &z, &w, &cache)?;
        println!(
            "  {:.2}  {m:.4e}  {:.4e}",
            distance(&z, &w)?,
            decay_bound(&p, d)?
        );
    }
    Ok(())
}
