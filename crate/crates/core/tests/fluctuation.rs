use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use revlab::fluctuation::*;
use revlab::models::states::{random_site_state, random_state};
use revlab::models::*;
use revlab::operator::{to_dense, Letter, StateVector};
use revlab::spectral::{ground_state, GroundOptions};

fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn plus(n: usize) -> StateVector {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::product(&vec![[Complex64::new(r, 0.0); 2]; n]).unwrap()
}

#[test]
fn tail_norm_matches_dense_projector() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let psi = random_state(6, &mut rng).unwrap();
    let a = AdditiveOperator::random(6, &[0, 2, 3, 5], &mut rng).unwrap();
    let m = additive_measure(&a, &psi).unwrap();
    let eig = SymmetricEigen::new(to_dense(&a.to_local_operator().unwrap()).unwrap());
    let coeffs = eig.eigenvectors.ad_mul(&DVector::from_column_slice(psi.amplitudes()));
    for &x in m.values.iter().chain([m.median + 0.3, -10.0, 10.0].iter()) {
        for dir in [TailDirection::AtLeast, TailDirection::AtMost] {
            let direct: f64 = eig
                .eigenvalues
                .iter()
                .zip(coeffs.iter())
                .filter(|(e, _)| match dir {
                    TailDirection::AtLeast => **e >= x - 1e-9,
                    TailDirection::AtMost => **e <= x + 1e-9,
                })
                .map(|(_, c)| c.norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!((tail_norm(&m, x, dir) - direct).abs() < 1e-10, "x={x} {dir:?}");
        }
    }
}

#[test]
fn product_ground_state_is_a_point_mass() {
    let z = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let spec = build_product_state_hamiltonian(&[z; 6]).unwrap();
    let sol = ground_state(&spec, &GroundOptions::default()).unwrap();
    let a = AdditiveOperator::pauli_sum(6, &all(6), Letter::Z).unwrap();
    let p = ground_tail_profile(&sol, &a).unwrap();
    assert_eq!(p.points.len(), 1);
    assert!((p.points[0].tail - 1.0).abs() < 1e-12);
    assert!(p.fitted_rate.is_none());
    let t = gap_variance_tradeoff(&spec, &sol, &a).unwrap();
    assert!((t.delta_e - 1.0).abs() < 1e-9 && t.variance < 1e-12);
}

#[test]
fn product_tradeoff_variance_is_at_most_l() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sites: Vec<_> = (0..7).map(|_| random_site_state(&mut rng)).collect();
    let spec = build_product_state_hamiltonian(&sites).unwrap();
    let sol = ground_state(&spec, &GroundOptions::default()).unwrap();
    for _ in 0..5 {
        let a = AdditiveOperator::random(7, &[1, 2, 4, 6], &mut rng).unwrap();
        let t = gap_variance_tradeoff(&spec, &sol, &a).unwrap();
        assert!((t.delta_e - 1.0).abs() < 1e-9);
        assert!(t.variance <= 4.0 + 1e-9);
    }
}

#[test]
fn ising_ground_state_tail_decays() {
    let spec = build_transverse_ising(12, 1.0, 2.0, Boundary::Periodic).unwrap();
    let sol = ground_state(&spec, &GroundOptions::default()).unwrap();
    let a = AdditiveOperator::pauli_sum(12, &all(12), Letter::Z).unwrap();
    let p = ground_tail_profile(&sol, &a).unwrap();
    let rate = p.fitted_rate.expect("fit window populated");
    assert!(rate > 0.0, "{rate}");
    assert!(p.reference_rate > 0.0);
    for w in p.points.windows(2) {
        assert!(w[1].tail <= w[0].tail + 1e-12);
    }
}

#[test]
fn independent_coins_have_gaussian_tail() {
    let a = AdditiveOperator::pauli_sum(12, &all(12), Letter::Z).unwrap();
    let m = additive_measure(&a, &plus(12)).unwrap();
    // exact binomial tail: P(A ≥ 12 − 2k) = Σ_{j≤k} C(12,j)/2^12
    let mut cum = 0.0;
    let mut binom = 1.0;
    for k in 0..=12usize {
        cum += binom / 4096.0;
        let v = 12.0 - 2.0 * k as f64;
        let t = tail_norm(&m, v, TailDirection::AtLeast);
        assert!((t * t - cum).abs() < 1e-12);
        binom = binom * (12 - k) as f64 / (k + 1) as f64;
    }
    // log-tail is close to linear in h², not in h
    let (h2, h1, lt): (Vec<f64>, Vec<f64>, Vec<f64>) = (1..6)
        .map(|k| {
            let h = 2.0 * k as f64;
            (h * h, h, (tail_norm(&m, h, TailDirection::AtLeast)).ln())
        })
        .fold((vec![], vec![], vec![]), |mut acc, (a, b, c)| {
            acc.0.push(a);
            acc.1.push(b);
            acc.2.push(c);
            acc
        });
    let quad = revlab::fit::fit_line(&h2, &lt).unwrap();
    let lin = revlab::fit::fit_line(&h1, &lt).unwrap();
    assert!(quad.r2 > 0.99 && quad.r2 > lin.r2, "{} vs {}", quad.r2, lin.r2);
    assert!(quad.slope < 0.0);
}

#[test]
fn ising_tradeoff_constant_across_fields() {
    let a = AdditiveOperator::pauli_sum(12, &all(12), Letter::Z).unwrap();
    let mut ratios = Vec::new();
    for h in [1.5, 2.0, 4.0] {
        let spec = build_transverse_ising(12, 1.0, h, Boundary::Periodic).unwrap();
        let sol = ground_state(&spec, &GroundOptions::default()).unwrap();
        let t = gap_variance_tradeoff(&spec, &sol, &a).unwrap();
        assert!(t.ratio.is_finite() && t.ratio > 0.0);
        ratios.push(t.ratio);
    }
    // empirical constant: max ≈ 7.9 at h = 4
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(max < 10.0, "{ratios:?}");
}

#[test]
fn extensive_fluctuations_in_gapped_chain() {
    let mut per_site = Vec::new();
    for n in [8, 10, 12] {
        let spec = build_transverse_ising(n, 1.0, 2.0, Boundary::Periodic).unwrap();
        let sol = ground_state(&spec, &GroundOptions::default()).unwrap();
        let a = AdditiveOperator::pauli_sum(n, &all(n), Letter::Z).unwrap();
        let (_, var) = additive_moments(&a, sol.ground()).unwrap();
        per_site.push(var / n as f64);
    }
    let (lo, hi) = per_site
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    assert!(hi / lo < 1.05, "{per_site:?}");
}

#[test]
fn lmg_tradeoff_is_finite_at_criticality() {
    let spec = build_lmg_sector(512, 1.0, 0.0, 1.0).unwrap();
    let sol = ground_state(&spec, &GroundOptions::default()).unwrap();
    let mx = AdditiveOperator::pauli_sum(512, &all(512), Letter::X).unwrap();
    let t = gap_variance_tradeoff(&spec, &sol, &mx).unwrap();
    assert!(t.ratio.is_finite() && t.ratio > 0.0 && t.ratio < 10.0, "{}", t.ratio);
}

#[test]
fn lmg_gapped_phase_controls() {
    let s = lmg_scaling_fit(&[128, 256, 512, 1024], 0.5, 0.0, 1.0).unwrap();
    assert!(s.gap_fit.slope.abs() < 0.05, "{}", s.gap_fit.slope);
    assert!((s.variance_fit.slope - 1.0).abs() < 0.05, "{}", s.variance_fit.slope);
}

#[test]
fn lmg_sector_matches_full_space() {
    let n = 8;
    let sector = build_lmg_sector(n, 1.0, 0.0, 1.0).unwrap();
    let full = build_lmg_pauli(n, 1.0, 0.0, 1.0).unwrap();
    let s1 = ground_state(&sector, &GroundOptions::default()).unwrap();
    let s2 = ground_state(&full, &GroundOptions::default()).unwrap();
    let mx = AdditiveOperator::pauli_sum(n, &all(n), Letter::X).unwrap();
    let (_, v1) = additive_moments(&mx, s1.ground()).unwrap();
    let (_, v2) = additive_moments(&mx, s2.ground()).unwrap();
    assert!((v1 - v2).abs() < 1e-8, "{v1} vs {v2}");
}

#[test]
fn fisher_contrast() {
    let g = revlab::models::make_special_state(&SpecialState::Ghz(8)).unwrap();
    let r = fisher_neff(&g, None, &FisherOptions::default()).unwrap();
    assert!(r.lower >= 8.0 - 1e-6 && r.lower <= r.upper + 1e-9);
    let spec = build_transverse_ising(12, 1.0, 2.0, Boundary::Periodic).unwrap();
    let sol = ground_state(&spec, &GroundOptions::default()).unwrap();
    let r = fisher_neff(sol.ground(), None, &FisherOptions::default()).unwrap();
    assert!(r.upper <= 3.0, "{}", r.upper);
    assert!(r.lower <= r.upper + 1e-9);
    // the optimizer's vectors realize its bound
    let a = AdditiveOperator::from_bloch(12, &all(12), &r.best_bloch).unwrap();
    let (_, var) = additive_moments(&a, sol.ground()).unwrap();
    assert!((var / 12.0 - r.lower).abs() < 1e-9);
}

#[test]
fn projector_locality_negative_control() {
    // a single flip moves ΣZ by exactly 2
    let a = AdditiveOperator::pauli_sum(4, &all(4), Letter::Z).unwrap();
    assert!(!projector_locality_check(&a, 1, 2.0).unwrap().holds());
    assert!(projector_locality_check(&a, 1, 2.5).unwrap().holds());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, .. ProptestConfig::default() })]

    #[test]
    fn measure_consistent_with_operator(seed in 0u64..10_000, mask in 1u8..32) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(5, &mut rng).unwrap();
        let sites: Vec<usize> = (0..5).filter(|i| mask >> i & 1 == 1).collect();
        let a = AdditiveOperator::random(5, &sites, &mut rng).unwrap();
        let m = additive_measure(&a, &psi).unwrap();
        prop_assert!((m.total() - 1.0).abs() < 1e-9);
        prop_assert!(m.cdf(m.median) >= 0.5 - 1e-12);
        prop_assert!(tail_norm(&m, m.median, TailDirection::AtLeast).powi(2) >= 0.5 - 1e-12);
        let op = a.to_local_operator().unwrap();
        let mean = op.expectation(&psi).unwrap().re;
        let sq = op.apply(&psi).unwrap().norm_sqr();
        prop_assert!((m.mean - mean).abs() < 1e-10);
        prop_assert!((m.variance - (sq - mean * mean)).abs() < 1e-8);
    }

    #[test]
    fn fisher_bracket_is_ordered(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(4, &mut rng).unwrap();
        let a = AdditiveOperator::random(4, &all(4), &mut rng).unwrap();
        let r = fisher_neff(&psi, Some(&a), &FisherOptions { restarts: 4, ..Default::default() }).unwrap();
        prop_assert!(r.lower <= r.upper + 1e-9);
        prop_assert!(r.neff_of_a.unwrap() <= r.upper + 1e-9);
    }

    #[test]
    fn projector_locality(seed in 0u64..10_000, q in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = AdditiveOperator::random(5, &all(5), &mut rng).unwrap();
        let h = 2.0 * q as f64 + 1e-6;
        let r = projector_locality_check(&a, q, h).unwrap();
        prop_assert!(r.holds(), "max block {}", r.max_block_norm);
    }
}
