//! Polydisk volumes by tensor quadrature against the genus-two closed form
//! and the shape bounds, plus Monte Carlo geodesic-ball volumes.

use siegel_lab::volumes::{
    ball_volume, closed_form_vol2, genus2_volume_bound, polydisk_volume, volume_shape,
    QuadratureSpec,
};

fn main() -> siegel_lab::Result<()> {
    let q = QuadratureSpec::default();
    println!("g=2: r, quadrature, closed form, 32 cosh^2 sinh^4");
    for r in [0.25, 0.5, 1.0, 2.0] {
        println!(
            "  {r:4}  {:.10e}  {:.10e}  {:.4e}",
            polydisk_volume(2, r, &q)?,
            closed_form_vol2(r)?.total,
            genus2_volume_bound(r)
        );
    }
    println!("g=3: r, volume / cosh^7 sinh^5");
    for r in [0.5, 1.0, 1.5, 2.0, 2.5] {
        println!(
            "  {r:4}  {:.4e}",
            polydisk_volume(3, r, &q)? / volume_shape(3, r)
        );
    }
    for r in [0.5, 1.0, 2.0] {
        let b = ball_volume(2, r, 200_000, 42)?;
        println!("ball g=2 r={r}: {:.5e} ± {:.1e}", b.value, b.stderr);
    }
    Ok(())
}
