//! Breadth-first enumeration of Sp(4, Z), the cache file format, and
//! windowed orbit counts.

use siegel_lab::enumeration::{
    count_gamma, decode_cache, encode_cache, injectivity_radius_estimate, standard_cache,
    CountMode, CountQuery,
};
use siegel_lab::sampling::{random_point, rng};

fn main() -> siegel_lab::Result<()> {
    for l in 0..=4 {
        println!("L={l}: {} elements", standard_cache(2, l)?.len());
    }
    let cache = standard_cache(2, 3)?;
    let text = encode_cache(&cache);
    println!(
        "cache file: {} bytes, header {:?}",
        text.len(),
        text.lines().next().unwrap_or("")
    );
    assert_eq!(decode_cache(&text)?.elements(), cache.elements());

    let mut r = rng(3);
    let (z, w) = (random_point(2, &mut r), random_point(2, &mut r));
    for radius in [1.0, 2.0, 3.0, 4.0] {
        let q = CountQuery {
            z: z.clone(),
            w: w.clone(),
            radius,
            mode: CountMode::Cocompact,
        };
        println!("N({radius}) = {}", count_gamma(&cache, &q)?);
    }
    let inj = injectivity_radius_estimate(&cache, &[z], CountMode::Cocompact)?;
    println!(
        "injectivity radius estimate {:.4} (element #{})",
        inj.radius, inj.witness_index
    );
    Ok(())
}
