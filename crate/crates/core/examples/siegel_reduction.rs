//! Minkowski reduction of a Gram matrix and reduction of points towards the
//! Siegel fundamental domain using an enumerated candidate set.

use siegel_lab::arithmetic::{is_siegel_reduced, minkowski_reduce, siegel_reduce};
use siegel_lab::enumeration::standard_cache;
use siegel_lab::matkit::{RealMatrix, SpdMatrix};
use siegel_lab::sampling::{random_point, random_word, rng};
use siegel_lab::siegel::{act, SiegelPoint};

fn main() -> siegel_lab::Result<()> {
    let y = SpdMatrix::new(RealMatrix::from_rows(&[vec![5.0, 3.0], vec![3.0, 2.0]])?)?;
    let red = minkowski_reduce(&y)?;
    println!(
        "Minkowski: U = {:?}, reduced Y diagonal = ({:.3}, {:.3})",
        red.u.data(),
        red.y.as_matrix()[(0, 0)],
        red.y.as_matrix()[(1, 1)]
    );

    let cache = standard_cache(2, 2)?;
    let mut r = rng(7);
    let start = SiegelPoint::i_identity(2);
    let scrambled = act(
        &random_word(2, 6, &mut r).to_real(),
        &random_point(2, &mut r),
    )?;
    for (name, z) in [("i Id", start), ("scrambled", scrambled)] {
        let out = siegel_reduce(&z, cache.elements(), 200)?;
        let diag = is_siegel_reduced(&out.z, cache.elements())?;
        println!(
            "{name}: det Im {:.4} -> {:.4} in {} steps, reduced = {}",
            z.y().det(),
            out.z.y().det(),
            out.iterations,
            diag.reduced
        );
    }
    Ok(())
}
