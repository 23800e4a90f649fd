use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use revlab::meanfield::*;
use revlab::models::states::{random_site_state, random_state};
use revlab::models::*;
use revlab::spectral::{ground_state, GroundOptions};

#[test]
fn product_marginals_factorize() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let sites: Vec<_> = (0..6).map(|_| random_site_state(&mut rng)).collect();
    let psi = make_special_state(&SpecialState::Product(sites)).unwrap();
    let r2 = reduced_density(&psi, &[4, 1]).unwrap();
    let p = product_density(&reduced_density(&psi, &[4]).unwrap(), &reduced_density(&psi, &[1]).unwrap());
    assert!((r2.matrix - p.matrix).norm() < 1e-12);
    let d = mf_deviation_sum(&psi, 0, &[1, 2, 3, 4, 5], Some(1.0)).unwrap();
    assert!(d.sum < 1e-12);
    let rep = projector_decomposition_check(&psi, 2, 5).unwrap();
    assert!(rep.lhs < 1e-12 && rep.rhs < 1e-12);
}

#[test]
fn ghz_deviation_is_linear_in_l() {
    let g4 = make_special_state(&SpecialState::Ghz(4)).unwrap();
    let r0 = reduced_density(&g4, &[0]).unwrap();
    assert!((r0.matrix[(0, 0)].re - 0.5).abs() < 1e-12 && (r0.matrix[(1, 1)].re - 0.5).abs() < 1e-12);
    assert!(r0.matrix[(0, 1)].norm() < 1e-12);
    // ρ_0j − I/4 = diag(1, −1, −1, 1)/4
    let g8 = make_special_state(&SpecialState::Ghz(8)).unwrap();
    let d = mf_deviation_sum(&g8, 0, &(1..8).collect::<Vec<_>>(), None).unwrap();
    for t in &d.terms {
        assert!((t.norm - 0.25).abs() < 1e-12);
        assert!((t.trace_norm - 1.0).abs() < 1e-12);
    }
    assert!((d.sum - 7.0 / 4.0).abs() < 1e-12);
}

#[test]
fn hybrid_state_saturates_square_root() {
    let (rows, fit) = hybrid_deviation_scaling(&(4..=14).collect::<Vec<_>>()).unwrap();
    assert_eq!(rows.len(), 11);
    assert!((fit.slope - 0.5).abs() < 0.1, "{}", fit.slope);
}

#[test]
fn energy_error_vanishes_without_correlations() {
    let z = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let spec = build_product_state_hamiltonian(&[z; 4]).unwrap();
    let sol = ground_state(&spec, &GroundOptions::default()).unwrap();
    let e = energy_density_mf_error(&spec, sol.ground(), 1, Some(sol.gap)).unwrap();
    assert_eq!(e.mean_abs_error, 0.0);
    // two-body model with a product ground state
    let spec = build_transverse_ising(6, 0.0, 1.0, Boundary::Periodic).unwrap();
    let sol = ground_state(&spec, &GroundOptions::default()).unwrap();
    let e = energy_density_mf_error(&spec, sol.ground(), 2, Some(sol.gap)).unwrap();
    assert!(e.mean_abs_error < 1e-12);
}

#[test]
fn ising_ring_energy_error_below_scale() {
    let spec = build_transverse_ising(12, 1.0, 2.0, Boundary::Periodic).unwrap();
    let sol = ground_state(&spec, &GroundOptions::default()).unwrap();
    let e = energy_density_mf_error(&spec, sol.ground(), 0, Some(sol.gap)).unwrap();
    assert_eq!(e.coordination, 2);
    let scale = e.scale.unwrap();
    // empirical constant error·√(ZδE)
    assert!(e.mean_abs_error > 0.0 && e.mean_abs_error < scale, "{} vs {}", e.mean_abs_error, scale);
}

#[test]
fn energy_error_non_increasing_in_coordination() {
    let rows = bipartite_coordination_sweep(10, &[2, 4, 8], 1.0, 2.0).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].mean_abs_error <= w[0].mean_abs_error + 1e-12, "{rows:?}");
    }
}

#[test]
fn deviation_sum_bounded_across_models() {
    // single cross-model constant C in Σ ≤ C √(|L|/δE)
    let models = [
        build_transverse_ising(10, 1.0, 2.0, Boundary::Periodic).unwrap(),
        build_transverse_ising(10, 1.0, 4.0, Boundary::Open).unwrap(),
        build_graph_state_hamiltonian(&Graph::ring(8).unwrap()).unwrap(),
    ];
    let mut worst = 0.0f64;
    for spec in &models {
        let sol = ground_state(spec, &GroundOptions::default()).unwrap();
        let n = spec.n_sites();
        let d = mf_deviation_sum(sol.require_unique().unwrap(), 0, &(1..n).collect::<Vec<_>>(), Some(sol.gap)).unwrap();
        worst = worst.max(d.sum / d.scale.unwrap());
    }
    assert!(worst < 1.0, "{worst}");
}

#[test]
fn non_two_body_rejected() {
    let c = build_cluster_chain(6, ClusterBoundary::FixedIdentity).unwrap();
    let sol = ground_state(&c.spec, &GroundOptions::default()).unwrap();
    assert!(energy_density_mf_error(&c.spec, sol.ground(), 0, None).is_err());
}

/// The four-projector form drops the `σ^y` part of the off-diagonal block and
/// fails on a few percent of random marginals; the six-projector form never does.
#[test]
fn four_projector_decomposition_has_counterexamples() {
    let mut four = 0;
    for seed in 0..400u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(6, &mut rng).unwrap();
        let r = projector_decomposition_check(&psi, 0, 1).unwrap();
        assert!(r.holds_spanning, "seed {seed}: {} > {}", r.lhs, r.rhs_spanning);
        if !r.holds {
            four += 1;
        }
    }
    assert!(four > 0 && four < 80, "{four}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, .. ProptestConfig::default() })]

    #[test]
    fn decomposition_inequality(seed in 0u64..100_000, i in 0usize..6, dj in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(6, &mut rng).unwrap();
        let j = (i + dj) % 6;
        let r = projector_decomposition_check(&psi, i, j).unwrap();
        prop_assert!(r.holds_spanning, "{} > {}", r.lhs, r.rhs_spanning);
        let rij = reduced_density(&psi, &[i, j]).unwrap();
        prop_assert!(rij.is_valid());
        let ri = reduced_density(&psi, &[i]).unwrap();
        prop_assert!((rij.trace_out(j).unwrap().matrix - ri.matrix).norm() < 1e-10);
    }
}
