use proptest::prelude::*;
use siegel_lab::arithmetic::{is_minkowski_reduced, minkowski_reduce, siegel_reduce};
use siegel_lab::enumeration::standard_cache;
use siegel_lab::kernel::{
    decay_bound, majorant_sum, majorant_term, truncated_norm, truncated_norm_with, KernelParams,
    Summation,
};
use siegel_lab::matkit::{RealMatrix, SpdMatrix};
use siegel_lab::sampling::{random_point, random_word, rng};
use siegel_lab::siegel::{act, cosh_product, distance, identity_residual, spectrum, SiegelPoint};

fn sym(g: usize, v: &[f64]) -> RealMatrix {
    let mut k = 0;
    let mut m = vec![0.0; g * g];
    for i in 0..g {
        for j in i..g {
            m[i * g + j] = v[k];
            m[j * g + i] = v[k];
            k += 1;
        }
    }
    RealMatrix::new(g, g, m).unwrap()
}

/// `X` symmetric from `[-2, 2]`, `Y = AᵀA + 0.3·Id`.
fn point(g: usize) -> impl Strategy<Value = SiegelPoint> {
    (
        prop::collection::vec(-2.0..2.0f64, g * (g + 1) / 2),
        prop::collection::vec(-1.5..1.5f64, g * g),
    )
        .prop_map(move |(xs, a)| {
            let a = RealMatrix::new(g, g, a).unwrap();
            let y = a
                .transpose()
                .matmul(&a)
                .add(&RealMatrix::identity(g).scale(0.3));
            SiegelPoint::new(sym(g, &xs), y).unwrap()
        })
}

fn genus() -> impl Strategy<Value = usize> {
    2usize..=3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_a_metric((a, b, c) in genus().prop_flat_map(|g| (point(g), point(g), point(g)))) {
        let (ab, ba) = (distance(&a, &b).unwrap(), distance(&b, &a).unwrap());
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() <= 1e-10 * (1.0 + ab));
        let (bc, ac) = (distance(&b, &c).unwrap(), distance(&a, &c).unwrap());
        prop_assert!(ac <= ab + bc + 1e-8);
        prop_assert_eq!(distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn spectrum_is_invariant_under_the_group(
        (z, w) in genus().prop_flat_map(|g| (point(g), point(g))),
        seed in any::<u64>(),
        len in 1usize..6,
    ) {
        let gamma = random_word(z.g(), len, &mut rng(seed)).to_real();
        let s0 = spectrum(&z, &w).unwrap();
        let s1 = spectrum(&act(&gamma, &z).unwrap(), &act(&gamma, &w).unwrap()).unwrap();
        for (a, b) in s0.rho.iter().zip(&s1.rho) {
            prop_assert!((a - b).abs() < 1e-8, "{:?} vs {:?}", s0.rho, s1.rho);
        }
    }

    #[test]
    fn determinant_identity_holds((z, w) in genus().prop_flat_map(|g| (point(g), point(g)))) {
        prop_assert!(identity_residual(&z, &w).unwrap() < 1e-9);
        let s = spectrum(&z, &w).unwrap();
        prop_assert!(s.rho.iter().all(|&p| (0.0..1.0).contains(&p)));
    }

    #[test]
    fn det_im_transforms_by_automorphy((z, seed) in (point(2), any::<u64>())) {
        let gamma = random_word(2, 4, &mut rng(seed)).to_real();
        let gz = act(&gamma, &z).unwrap();
        let j = gamma.automorphy_det(&z).unwrap().norm_sqr();
        let expect = z.y().det() / j;
        prop_assert!((gz.y().det() - expect).abs() <= 1e-9 * expect);
    }

    #[test]
    fn cosh_product_sandwich(xs in prop::collection::vec(1e-3..8.0f64, 2..=4)) {
        prop_assert!(cosh_product(&xs).holds());
    }

    #[test]
    fn minkowski_output_is_certified(a in prop::collection::vec(-2.0..2.0f64, 9)) {
        let a = RealMatrix::new(3, 3, a).unwrap();
        let y = SpdMatrix::new(a.transpose().matmul(&a).add(&RealMatrix::identity(3).scale(0.1))).unwrap();
        let red = minkowski_reduce(&y).unwrap();
        prop_assert!(is_minkowski_reduced(&red.y, 2).reduced);
        prop_assert_eq!(red.u.det().abs(), 1);
        prop_assert!((red.y.det() - y.det()).abs() <= 1e-9 * y.det());
    }

    #[test]
    fn siegel_reduction_normalises_x_and_raises_det_im(z in point(2)) {
        let cache = standard_cache(2, 2).unwrap();
        let red = siegel_reduce(&z, cache.elements(), 100).unwrap();
        prop_assert!(red.z.y().det() >= z.y().det() * (1.0 - 1e-9));
        let x = red.z.x();
        prop_assert!((0..2).all(|i| (0..2).all(|j| x[(i, j)].abs() <= 0.5 + 1e-9)));
        // the recorded element reproduces the reduced point
        let again = act(&red.gamma.to_real(), &z).unwrap();
        prop_assert!(distance(&again, &red.z).unwrap() < 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_chain((z, w) in (point(2), point(2)), k in 3u32..=10) {
        let p = KernelParams::new(2, k).unwrap();
        let small = standard_cache(2, 2).unwrap();
        let large = standard_cache(2, 3).unwrap();

        let n2 = truncated_norm(&p, &z, &w, &small).unwrap();
        let n3 = truncated_norm(&p, &z, &w, &large).unwrap();
        let m2 = majorant_sum(&p, &z, &w, &small).unwrap();
        let m3 = majorant_sum(&p, &z, &w, &large).unwrap();
        prop_assert!(n3.value <= m3 * (1.0 + 1e-9));
        // new cache levels move the norm by at most the mass they add
        prop_assert!((n3.value - n2.value).abs() <= (m3 - m2) * (1.0 + 1e-9) + 1e-15 * m3);

        let pw = truncated_norm_with(&p, &z, &w, &large, Summation::Pairwise).unwrap();
        prop_assert!((pw.value - n3.value).abs() <= 1e-12 * m3);
    }

    #[test]
    fn each_term_below_single_cosh((z, w, seed) in (point(2), point(2), any::<u64>())) {
        let p = KernelParams::new(2, 6).unwrap();
        let gamma = random_word(2, 3, &mut rng(seed));
        let gw = act(&gamma.to_real(), &w).unwrap();
        let d = distance(&z, &gw).unwrap();
        let term = majorant_term(&p, &z, &w, &gamma).unwrap();
        let single = (-(p.weight() as f64) * siegel_lab::siegel::ln_cosh(d / (2.0 * 2f64.sqrt()))).exp();
        prop_assert!(term <= single * (1.0 + 1e-9));
    }

    #[test]
    fn decay_bound_decreases(d in 0.0..20.0f64, step in 1e-3..5.0f64) {
        let p = KernelParams::new(2, 10).unwrap();
        prop_assert!(decay_bound(&p, d + step).unwrap() < decay_bound(&p, d).unwrap());
    }
}

#[test]
fn random_points_from_sampler_are_generic() {
    let mut r = rng(3);
    let z = random_point(3, &mut r);
    assert!(z.y().eigenvalues()[0] >= 0.5 - 1e-12);
}
