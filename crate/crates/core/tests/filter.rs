use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use revlab::filter::*;
use revlab::models::states::random_state;
use revlab::models::*;
use revlab::spectral::dense::Eigensystem;
use revlab::Error;

/// Closed forms: cos(n acos x) inside, ±cosh(n acosh |x|) outside.
fn chebyshev_oracle(n: u32, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        (n as f64 * x.acos()).cos()
    } else {
        let s = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        s * (n as f64 * x.abs().acosh()).cosh()
    }
}

#[test]
fn low_degree_polynomials() {
    for &x in &[-3.0, -1.0, -0.3, 0.0, 0.7, 1.0, 2.5] {
        assert_eq!(chebyshev_t(0, x), 1.0);
        assert!((chebyshev_t(1, x) - x).abs() < 1e-15);
        assert!((chebyshev_t(2, x) - (2.0 * x * x - 1.0)).abs() < 1e-12);
        assert!((chebyshev_t(3, x) - (4.0 * x * x * x - 3.0 * x)).abs() < 1e-12);
    }
}

#[test]
fn growth_bounds_hold_for_small_degrees() {
    for n in 1..=20 {
        let r = verify_cheby_bounds(n, 2000, 10.0);
        assert_eq!(r.violations, 0, "{r:?}");
    }
}

#[test]
fn trivial_filter_is_identity() {
    let p = FilterParams::new(0, 2, 1.0, 4, 1.0).unwrap();
    assert!(p.is_trivial());
    assert_eq!(eval_filter(&p, 3.0), 1.0);
}

#[test]
fn invalid_parameters_rejected() {
    assert!(matches!(FilterParams::new(2, 2, 0.0, 4, 1.0), Err(Error::InvalidArgument(_))));
    assert!(matches!(FilterParams::new(2, 2, 1.0, 4, -1.0), Err(Error::Gapless(_))));
    assert!(FilterParams::new(2, 0, 1.0, 4, 1.0).is_err());
}

#[test]
fn depth_term_matters() {
    let good = FilterParams::new(4, 2, 1.0, 4, 0.5).unwrap();
    let bad = FilterParams::new_without_depth_term(4, 2, 1.0, 4, 0.5).unwrap();
    assert_eq!(good.n0, bad.n0);
    assert!(bad.e_c < good.e_c);
}

#[test]
fn vector_recurrence_matches_spectral_oracle() {
    let spec = build_transverse_ising(6, 1.0, 1.5, Boundary::Periodic).unwrap();
    let eig = Eigensystem::new(&spec).unwrap();
    let e0 = eig.values[0];
    let shifted = spec.shifted(e0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let psi = random_state(6, &mut rng).unwrap();
    for q in 1..=3 {
        let p = FilterParams::new(q, spec.k(), spec.g(), 2, eig.values[1] - e0).unwrap();
        let got = apply_filter(&p, &shifted, &psi).unwrap();
        let want = eig.apply_function(&psi, |e| eval_filter(&p, e - e0)).unwrap();
        let scale = want.norm().max(1.0);
        assert!(got.distance(&want).unwrap() < 1e-8 * scale, "q={q}");
    }
}

#[test]
fn filter_projects_ground_component_exactly() {
    let spec = build_transverse_ising(6, 1.0, 2.0, Boundary::Periodic).unwrap();
    let eig = Eigensystem::new(&spec).unwrap();
    let e0 = eig.values[0];
    let gs = eig.vector(0).unwrap();
    let p = FilterParams::new(2, spec.k(), spec.g(), 2, eig.values[1] - e0).unwrap();
    let out = apply_filter(&p, &spec.shifted(e0), &gs).unwrap();
    assert!(out.distance(&gs).unwrap() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn chebyshev_matches_closed_form(n in 0u32..30, x in -4.0f64..4.0) {
        let a = chebyshev_t(n, x);
        let b = chebyshev_oracle(n, x);
        prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        let c = chebyshev_t_recurrence(n, x);
        prop_assert!((a - c).abs() <= 1e-9 * c.abs().max(1.0));
    }

    #[test]
    fn filter_is_normalized_and_small_on_window(
        q in 1usize..=16, k in 1usize..=4, g in 0.25f64..4.0, l in 1usize..=8,
        de in 0.05f64..2.0, t in 0.0f64..=1.0,
    ) {
        let p = FilterParams::new(q, k, g, l, de).unwrap();
        prop_assert!((eval_filter(&p, 0.0) - 1.0).abs() < 1e-12);
        let (a, b) = p.window();
        let x = a + t * (b - a);
        prop_assert!(eval_filter(&p, x).abs() <= p.window_cap() * (1.0 + 1e-9));
        prop_assert!(p.is_trivial() || p.window_cap() < 2.0);
    }

    #[test]
    fn growth_bound_dominates_above_window(
        q in 1usize..=12, k in 1usize..=3, g in 0.25f64..2.0, l in 1usize..=6,
        de in 0.1f64..1.5, s in 1.0f64..4.0,
    ) {
        let p = FilterParams::new(q, k, g, l, de).unwrap();
        let x = p.window().1 * s;
        let f = eval_filter(&p, x).abs();
        prop_assert!(f <= high_range_bound(&p, x) * (1.0 + 1e-9), "{f} > {}", high_range_bound(&p, x));
    }
}
