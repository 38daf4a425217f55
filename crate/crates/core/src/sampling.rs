//! Seeded random points, group elements and vectors for checks and sweeps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arithmetic::SymplecticInt;
use crate::enumeration::standard_generators;
use crate::matkit::{RealMatrix, SpdMatrix};
use crate::siegel::SiegelPoint;

pub const DEFAULT_SEED: u64 = 42;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `X` symmetric with entries uniform in `[-1, 1]`, `Y = AᵀA + Id/2` with
/// `A` uniform in `[-1, 1]`.
pub fn random_point<R: Rng>(g: usize, rng: &mut R) -> SiegelPoint {
    let x = random_symmetric(g, 1.0, rng);
    let a = RealMatrix::from_fn(g, g, |_, _| rng.gen_range(-1.0..=1.0));
    let y = a
        .transpose()
        .matmul(&a)
        .add(&RealMatrix::identity(g).scale(0.5));
    SiegelPoint::new(x, y).expect("random point lies in the half space")
}

/// Random point with prescribed imaginary part.
pub fn random_point_with_y<R: Rng>(y: &SpdMatrix, spread: f64, rng: &mut R) -> SiegelPoint {
    let g = y.dim();
    let x = random_symmetric(g, spread, rng);
    SiegelPoint::new(x, y.as_matrix().clone()).expect("symmetric real part")
}

/// Symmetric matrix with upper entries uniform in `[-spread, spread]`.
pub fn random_symmetric<R: Rng>(g: usize, spread: f64, rng: &mut R) -> RealMatrix {
    let mut v = vec![0.0; g * g];
    for i in 0..g {
        for j in i..g {
            let e = rng.gen_range(-spread..=spread);
            v[i * g + j] = e;
            v[j * g + i] = e;
        }
    }
    RealMatrix::from_fn(g, g, |i, j| v[i * g + j])
}

/// Product of `len` standard generators chosen uniformly.
pub fn random_word<R: Rng>(g: usize, len: usize, rng: &mut R) -> SymplecticInt {
    let gens = standard_generators(g);
    let mut m = SymplecticInt::identity(g);
    for _ in 0..len {
        let s = gens.choose(rng).expect("generator set is nonempty");
        m = m.mul(s).expect("generator words stay within i64");
    }
    m
}

/// Vector with entries uniform in `(0, scale]`.
pub fn random_positive<R: Rng>(g: usize, scale: f64, rng: &mut R) -> Vec<f64> {
    (0..g).map(|_| scale * (1.0 - rng.gen::<f64>())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let a = random_point(3, &mut rng(7));
        let b = random_point(3, &mut rng(7));
        assert_eq!(a, b);
        assert!(a.y().eigenvalues()[0] >= 0.5 - 1e-12);
        let w = random_word(2, 5, &mut rng(1));
        assert_eq!(w, random_word(2, 5, &mut rng(1)));
    }
}
