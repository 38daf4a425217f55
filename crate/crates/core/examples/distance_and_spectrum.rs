//! Distance, cross-ratio spectrum and the determinant identity for a few
//! pairs, including a check that a generator word leaves them unchanged.

use siegel_lab::sampling::{random_point, random_word, rng};
use siegel_lab::siegel::{act, identity_residual, spectrum, SiegelPoint};

fn main() -> siegel_lab::Result<()> {
    let z = SiegelPoint::i_identity(2);
    let w = SiegelPoint::imaginary_diag(&[2.0, 2.0])?;
    let s = spectrum(&z, &w)?;
    println!(
        "(i Id, 2i Id): d = {:.12}, rho = {:?}, r = {:?}",
        s.distance(),
        s.rho,
        s.radii
    );
    println!(
        "  prod(1 - rho) = {:.15} (64/81 = {:.15})",
        s.cosh_product_inv_sq(),
        64.0 / 81.0
    );

    let mut r = rng(1);
    for g in [2, 3] {
        let (z, w) = (random_point(g, &mut r), random_point(g, &mut r));
        let gamma = random_word(g, 5, &mut r);
        let moved = spectrum(&act(&gamma.to_real(), &z)?, &act(&gamma.to_real(), &w)?)?;
        let s = spectrum(&z, &w)?;
        println!(
            "g={g}: d = {:.10}, after gamma d = {:.10}, identity residual {:.1e}",
            s.distance(),
            moved.distance(),
            identity_residual(&z, &w)?
        );
    }
    Ok(())
}
