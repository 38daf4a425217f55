use siegel_lab::enumeration::{
    count_gamma, injectivity_radius_estimate, load_cache, save_cache, standard_cache, CountMode,
    CountQuery,
};
use siegel_lab::kernel::{
    gamma_inf0_majorant, orbit_sum_bound, orbit_weight, KernelParams, OrbitSumConfig,
};
use siegel_lab::sampling::{random_point, rng};
use siegel_lab::siegel::{distance, SiegelPoint};
use siegel_lab::volumes::{ball_volume, closed_form_vol2, polydisk_volume, QuadratureSpec};
use siegel_lab::Error;

#[test]
fn saved_cache_counts_like_a_fresh_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g2L3.spgz");
    let fresh = standard_cache(2, 3).unwrap();
    save_cache(&fresh, &path).unwrap();
    let loaded = load_cache(&path).unwrap();
    assert_eq!(loaded.elements(), fresh.elements());

    let mut r = rng(11);
    let q = CountQuery {
        z: random_point(2, &mut r),
        w: random_point(2, &mut r),
        radius: 3.0,
        mode: CountMode::Arithmetic,
    };
    assert_eq!(
        count_gamma(&loaded, &q).unwrap(),
        count_gamma(&fresh, &q).unwrap()
    );
}

#[test]
fn corrupted_cache_reports_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.spgz");
    save_cache(&standard_cache(2, 1).unwrap(), &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    // row 3 holds J; doubling one entry breaks the symplectic relation
    lines[2] = lines[2].replacen(" 1 ", " 2 ", 1);
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    match load_cache(&path) {
        Err(Error::Format { row, .. }) => assert_eq!(row, 3),
        other => panic!("expected a format error, got {other:?}"),
    }
}

#[test]
fn counting_starts_at_the_shortest_displacement() {
    let z = SiegelPoint::i_identity(2);
    let cache = standard_cache(2, 2).unwrap();
    let shortest = cache
        .elements()
        .iter()
        .filter(|e| !e.is_identity())
        .map(|e| distance(&z, &siegel_lab::siegel::act(&e.to_real(), &z).unwrap()).unwrap())
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let q = CountQuery {
        z: z.clone(),
        w: z.clone(),
        radius: 0.999 * shortest,
        mode: CountMode::Cocompact,
    };
    // elements fixing i·Id (J, −Id, …) sit at distance 0
    let fixed = cache
        .elements()
        .iter()
        .filter(|e| !e.is_identity())
        .filter(|e| {
            distance(&z, &siegel_lab::siegel::act(&e.to_real(), &z).unwrap()).unwrap() == 0.0
        })
        .count();
    assert_eq!(count_gamma(&cache, &q).unwrap(), fixed);
}

#[test]
fn orbit_sum_bound_pipeline() {
    let g = 2;
    let cache = standard_cache(g, 2).unwrap().projective();
    let mut r = rng(5);
    let (z, w) = (random_point(g, &mut r), random_point(g, &mut r));
    let est = injectivity_radius_estimate(&cache, std::slice::from_ref(&w), CountMode::Cocompact)
        .unwrap();
    assert!(est.radius > 0.0 && est.windowed);

    let vol = ball_volume(g, est.radius, 100_000, 9).unwrap();
    let cfg = OrbitSumConfig {
        f_exponent: 60.0,
        rho0: 2.0 * est.radius,
        r_gamma: est.radius,
        vol_ball: vol.value,
        c_g: 192.0,
    };
    let d = siegel_lab::enumeration::orbit_distances(&cache, &z, &w).unwrap();
    let lhs: f64 = d.iter().map(|&x| orbit_weight(cfg.f_exponent, x)).sum();
    let b = orbit_sum_bound(
        &KernelParams::new(g, 10).unwrap(),
        &cfg,
        &d,
        &QuadratureSpec::default(),
    )
    .unwrap();
    assert!(lhs <= b.total);
    assert!(b.near_term <= lhs + 1e-300);
}

#[test]
fn genus_two_volume_worked_value() {
    let v = polydisk_volume(2, 1.0, &QuadratureSpec::default()).unwrap();
    let cf = closed_form_vol2(1.0).unwrap();
    assert!((v - cf.total).abs() < 1e-8 * cf.total);
    assert!((cf.i3 - 1f64.sinh().powi(6) / 9.0).abs() < 1e-15);
    assert!((cf.i3 - 0.2927).abs() < 1e-4);
}

#[test]
fn translation_tail_grows_and_settles() {
    let p = KernelParams::new(2, 10).unwrap();
    let z = SiegelPoint::i_identity(2);
    let w = SiegelPoint::imaginary_diag(&[1.5, 1.5]).unwrap();
    let s: Vec<f64> = (1..=4)
        .map(|b| gamma_inf0_majorant(&p, &z, &w, b).unwrap())
        .collect();
    assert!(s.windows(2).all(|p| p[1] >= p[0]));
    assert!((s[3] - s[2]) / s[3] < 1e-4);
}
