//! Self-check suite. Every check records the inequality it asserts and its
//! margin (positive = satisfied with room to spare).

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::filter::{filter_report, high_range_product_check, verify_cheby_bounds, FilterParams};
use crate::fluctuation::{
    critical_exponent_inequality, fisher_neff, projector_locality_check, lmg_scaling_fit, AdditiveOperator,
    CriticalExponents, FisherOptions,
};
use crate::meanfield::{hybrid_deviation_scaling, mf_deviation_sum, projector_decomposition_check};
use crate::models::random::random_two_local;
use crate::models::states::{random_site_state, random_state};
use crate::models::*;
use crate::operator::{Letter, LocalOperator, PauliString, StateVector};
use crate::reversibility::{
    basis_projector, chebyshev_reverse_with, energy_tail_check, max_overlap_pauli, max_overlap_projector,
    optimal_local_reverse, topo_indistinguishability_check, DisturbanceSpec, LsqOptions,
};
use crate::spectral::{ground_state, GroundOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub pass: bool,
    pub margin: f64,
    pub detail: String,
}

impl Check {
    fn new(criterion: u8, name: impl Into<String>, margin: f64, detail: impl Into<String>) -> Check {
        Check {
            criterion,
            name: name.into(),
            pass: margin >= 0.0,
            margin,
            detail: detail.into(),
        }
    }

    /// A failed computation is a failed check, not an abort.
    fn from_result(criterion: u8, name: &str, r: Result<Vec<Check>>) -> Vec<Check> {
        r.unwrap_or_else(|e| {
            vec![Check {
                criterion,
                name: name.to_string(),
                pass: false,
                margin: f64::NEG_INFINITY,
                detail: format!("error: {e}"),
            }]
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub mutate_ec: bool,
    pub checks: Vec<Check>,
    pub elapsed_seconds: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Ground-state instances of the reverse-operator matrix.
pub fn theorem_instances(level: Level) -> Result<Vec<HamiltonianSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sites: Vec<_> = (0..8).map(|_| random_site_state(&mut rng)).collect();
    let mut v = vec![
        build_product_state_hamiltonian(&sites)?,
        build_graph_state_hamiltonian(&Graph::ring(8)?)?,
        build_transverse_ising(10, 1.0, 2.0, Boundary::Periodic)?,
    ];
    if level == Level::Full {
        v.push(build_transverse_ising(12, 1.0, 1.5, Boundary::Periodic)?);
    }
    Ok(v)
}

pub const THEOREM_QS: [usize; 4] = [2, 4, 6, 8];

/// Residual ≤ RHS over the q grid for a 4-site projector and a 3-site Pauli
/// disturbance (criterion 1), and optimal ≤ Chebyshev on the same runs
/// (criterion 5).
pub fn check_theorem_instance(spec: &HamiltonianSpec, mutate_ec: bool) -> Result<Vec<Check>> {
    let sol = ground_state(spec, &GroundOptions::default())?;
    let omega = sol.require_unique()?;
    let n = spec.n_sites();
    let (proj, _) = max_overlap_projector(omega, &[0, 1, 2, 3])?;
    let pauli = LocalOperator::from_pauli(Complex64::new(1.0, 0.0), max_overlap_pauli(omega, &[0, 1, 2])?);
    let mut out = Vec::new();
    for (label, op, region) in [("projector4", proj, vec![0, 1, 2, 3]), ("pauli3", pauli, vec![0, 1, 2])] {
        let dist = DisturbanceSpec::new(op, Some(region), omega)?;
        let phi = dist.op.apply(omega)?;
        let rows = THEOREM_QS
            .par_iter()
            .map(|&q| -> Result<(f64, f64, f64)> {
                let cheb = if mutate_ec {
                    chebyshev_reverse_with(spec, &sol, &dist, q, FilterParams::new_without_depth_term)?
                } else {
                    chebyshev_reverse_with(spec, &sol, &dist, q, FilterParams::new)?
                };
                let opt = optimal_local_reverse(omega, &phi, q, &LsqOptions::default())?;
                Ok((cheb.residual, cheb.rhs_bound.unwrap_or(f64::NAN), opt.residual))
            })
            .collect::<Result<Vec<_>>>()?;
        let tag = format!("{} n={n} gamma={label}", spec.name());
        let theorem = rows.iter().map(|r| r.1 - r.0).fold(f64::INFINITY, f64::min);
        let worst = THEOREM_QS
            .iter()
            .zip(&rows)
            .map(|(q, r)| format!("q={q}: {:.3e}<={:.3e}", r.0, r.1))
            .collect::<Vec<_>>()
            .join(", ");
        out.push(Check::new(1, format!("residual<=rhs {tag}"), theorem, worst));
        let dom = rows.iter().map(|r| r.0 - r.2 + 1e-12).fold(f64::INFINITY, f64::min);
        out.push(Check::new(5, format!("optimal<=chebyshev {tag}"), dom, ""));
    }
    // the proof's damped bound above the window, for the same parameters
    let l_size = 4;
    let mut worst = f64::NEG_INFINITY;
    for &q in &THEOREM_QS {
        let make = if mutate_ec { FilterParams::new_without_depth_term } else { FilterParams::new };
        let p = make(q, spec.k(), spec.g(), l_size, sol.gap)?;
        if p.is_trivial() {
            continue;
        }
        let edge = p.window().1;
        let grid: Vec<f64> = (0..200).map(|i| edge * (1.0 + 3.0 * i as f64 / 199.0)).collect();
        let r = high_range_product_check(&p, &grid)?;
        worst = worst.max(r.points.iter().map(|pt| pt.g_two).fold(f64::NEG_INFINITY, f64::max));
    }
    out.push(Check::new(
        1,
        format!("damped exponent G<=0 above window {} n={n}", spec.name()),
        -worst,
        format!("max G = {worst:.3e}"),
    ));
    Ok(out)
}

/// `F_R(0) = 1` and `sup |F_R| ≤ 2e^{−2n0/ξ}` on the window.
pub fn check_filter_bounds(n_params: usize, samples: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_zero = 0.0f64;
    let mut worst_sup = f64::INFINITY;
    let mut bad = 0;
    for _ in 0..n_params {
        let p = FilterParams::new(
            rng.random_range(1..=16),
            rng.random_range(1..=4),
            rng.random_range(0.25..4.0),
            rng.random_range(1..=8),
            rng.random_range(0.05..2.0),
        );
        let Ok(p) = p else {
            bad += 1;
            continue;
        };
        let r = filter_report(&p, samples);
        worst_zero = worst_zero.max((r.f_at_zero - 1.0).abs());
        worst_sup = worst_sup.min(r.window_cap - r.window_sup);
    }
    vec![
        Check::new(2, "F_R(0)=1", 1e-10 - worst_zero - bad as f64, format!("max |F_R(0)-1| = {worst_zero:.3e}")),
        Check::new(2, "window sup <= 2exp(-2n0/xi)", worst_sup, format!("{n_params} params x {samples} points")),
    ]
}

/// Chebyshev growth bounds for `n = 1..=20`.
pub fn check_chebyshev_growth(samples: usize) -> Vec<Check> {
    (1..=20u32)
        .map(|n| {
            let r = verify_cheby_bounds(n, samples, 10.0);
            // relative slack of the tightest of the three bounds
            let margin = 1e-12 - r.worst_inner.max(r.worst_upper).max(r.worst_lower);
            let mut c = Check::new(3, format!("chebyshev bounds n={n}"), margin, format!("{} violations", r.violations));
            c.pass = r.violations == 0;
            c
        })
        .collect()
}

/// Energy-tail bound on seeded random 2-local chains with a random
/// one- or two-site disturbance.
pub fn check_energy_tail(instances: usize, n: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < instances {
        let spec = random_two_local(n, n + 2, &mut rng)?;
        let sol = ground_state(&spec, &GroundOptions::default())?;
        let Ok(omega) = sol.require_unique() else { continue };
        let w = rng.random_range(1..=2usize);
        let mut sites: Vec<usize> = Vec::new();
        while sites.len() < w {
            let s = rng.random_range(0..n);
            if !sites.contains(&s) {
                sites.push(s);
            }
        }
        let mut terms = vec![(rng.random_range(0.5..1.5), PauliString::identity(n)?)];
        for _ in 0..3 {
            let letters: Vec<_> = sites
                .iter()
                .map(|&s| (s, Letter::NON_IDENTITY[rng.random_range(0..3)]))
                .collect();
            terms.push((rng.random_range(-1.0..1.0), PauliString::from_letters(n, &letters)?));
        }
        let op = LocalOperator::from_real_terms(n, terms)?;
        let dist = DisturbanceSpec::new(op, Some(sites.clone()), omega)?;
        let r = energy_tail_check(&spec, omega, &dist)?;
        let margin = if r.holds() { r.worst_margin.max(0.0) } else { -(r.violations as f64) };
        out.push(Check::new(
            4,
            format!("energy tail instance {done} sites={sites:?}"),
            margin,
            format!("g={:.3} violations={}", r.g, r.violations),
        ));
        done += 1;
    }
    Ok(out)
}

/// GHZ(8) split by `|0…0⟩⟨0…0|` cannot be reversed below full weight.
pub fn check_ghz_certificate() -> Result<Vec<Check>> {
    let g = make_special_state(&SpecialState::Ghz(8))?;
    let p = basis_projector(8, &(0..8).collect::<Vec<_>>(), &[false; 8])?;
    let phi = p.apply(&g)?;
    (0..=7)
        .into_par_iter()
        .map(|q| {
            let r = optimal_local_reverse(&g, &phi, q, &LsqOptions::default())?;
            Ok(Check::new(
                5,
                format!("ghz8 residual>=1/sqrt2 q={q}"),
                r.residual - (FRAC_1_SQRT_2 - 1e-9),
                format!("residual {:.12}", r.residual),
            ))
        })
        .collect()
}

pub const LMG_NS: [usize; 5] = [256, 512, 1024, 2048, 4096];

pub fn check_lmg_scaling() -> Result<Vec<Check>> {
    let s = lmg_scaling_fit(&LMG_NS, 1.0, 0.0, 1.0)?;
    let (a, b) = (s.gap_fit.slope, s.variance_fit.slope);
    Ok(vec![
        Check::new(6, "deltaE exponent -1/3 +- 0.05", 0.05 - (a + 1.0 / 3.0).abs(), format!("{a:.4}")),
        Check::new(6, "variance exponent 4/3 +- 0.05", 0.05 - (b - 4.0 / 3.0).abs(), format!("{b:.4}")),
    ])
}

pub fn check_exponent_arithmetic() -> Vec<Check> {
    let c = critical_exponent_inequality(&CriticalExponents {
        z: 1.0,
        eta: 0.25,
        gamma: 1.75,
        nu: 1.0,
        d: 1.0,
    });
    vec![
        Check::new(7, "p = 7/4", if c.p == 1.75 { 0.0 } else { -(c.p - 1.75).abs() }, format!("p = {}", c.p)),
        Check::new(7, "z >= 1 - eta/2", c.lhs_z - c.rhs_eta, format!("{} >= {}", c.lhs_z, c.rhs_eta)),
    ]
}

/// `‖Π_{≥m+h} O Π_{≤m}‖ = 0` for q-local `O`, `q < h/2`, on `n = 5`.
pub fn check_projector_locality(trials: usize, seed: u64) -> Result<Vec<Check>> {
    let results = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            let a = AdditiveOperator::random(5, &[0, 1, 2, 3, 4], &mut rng)?;
            let q = rng.random_range(0..=2usize);
            let h = 2.0 * q as f64 + rng.random_range(1e-6..1.0);
            Ok((q, h, projector_locality_check(&a, q, h)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let violations: usize = results.iter().map(|r| r.2.violations).sum();
    let worst = results.iter().map(|r| r.2.max_block_norm).fold(0.0, f64::max);
    let strings: usize = results.iter().map(|r| r.2.strings_checked).sum();
    Ok(vec![Check::new(
        8,
        format!("projector locality n=5 x {trials} trials"),
        if violations == 0 { 0.0 } else { -(violations as f64) },
        format!("{strings} strings, max block norm {worst:.2e}"),
    )])
}

pub fn check_meanfield(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut dec, mut dec6, mut violations) = (f64::INFINITY, f64::INFINITY, 0);
    for _ in 0..50 {
        let psi = random_state(6, &mut rng)?;
        let i = rng.random_range(0..6);
        let j = (i + rng.random_range(1..6)) % 6;
        let r = projector_decomposition_check(&psi, i, j)?;
        dec = dec.min(r.rhs - r.lhs);
        dec6 = dec6.min(r.rhs_spanning - r.lhs);
        violations += usize::from(!r.holds);
    }
    let (_, fit) = hybrid_deviation_scaling(&(4..=14).collect::<Vec<_>>())?;
    let sites: Vec<_> = (0..8).map(|_| random_site_state(&mut rng)).collect();
    let prod = StateVector::product(&sites)?;
    let sum = mf_deviation_sum(&prod, 0, &(1..8).collect::<Vec<_>>(), None)?.sum;
    Ok(vec![
        Check::new(
            9,
            "four-projector decomposition x 50",
            dec + 1e-12,
            format!("{violations} violations"),
        ),
        Check::new(9, "six-projector decomposition x 50", dec6 + 1e-12, ""),
        Check::new(9, "hybrid exponent 0.5 +- 0.1", 0.1 - (fit.slope - 0.5).abs(), format!("{:.4}", fit.slope)),
        Check::new(9, "product deviation sum < 1e-10", 1e-10 - sum, format!("{sum:.3e}")),
    ])
}

pub fn check_macroscopicity(level: Level, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = FisherOptions::default();
    let sites: Vec<_> = (0..8).map(|_| random_site_state(&mut rng)).collect();
    let prod = fisher_neff(&StateVector::product(&sites)?, None, &opts)?;
    let ghz = fisher_neff(&make_special_state(&SpecialState::Ghz(8))?, None, &opts)?;
    let mut out = vec![
        Check::new(10, "product N_eff upper <= 1", 1.0 + 1e-9 - prod.upper, format!("{:.12}", prod.upper)),
        Check::new(10, "ghz8 N_eff lower >= 8", ghz.lower - (8.0 - 1e-6), format!("{:.12}", ghz.lower)),
    ];
    if level == Level::Full {
        let spec = build_transverse_ising(12, 1.0, 2.0, Boundary::Periodic)?;
        let sol = ground_state(&spec, &GroundOptions::default())?;
        let r = fisher_neff(sol.require_unique()?, None, &opts)?;
        out.push(Check::new(10, "tfi12 h=2 N_eff upper <= 3", 3.0 - r.upper, format!("{:.6}", r.upper)));
    }
    Ok(out)
}

pub fn check_toric() -> Result<Vec<Check>> {
    let t = build_toric_code(2, 2, Topology::Torus)?;
    let sol = ground_state(&t, &GroundOptions::default())?;
    let planar = ground_state(&build_toric_code(2, 2, Topology::Planar)?, &GroundOptions::default())?;
    let gs = toric_ground_space(&t)?;
    let topo = topo_indistinguishability_check(&gs, 1, None, None, 0)?;
    let mut out = vec![
        Check::new(11, "torus 2x2 degeneracy 4", -(sol.degeneracy.abs_diff(4) as f64), sol.degeneracy.to_string()),
        Check::new(11, "planar degeneracy 1", -(planar.degeneracy.abs_diff(1) as f64), planar.degeneracy.to_string()),
        Check::new(
            11,
            "indistinguishable at cutoff 1",
            if topo.holds() { 1e-8 - topo.max_offdiag.max(topo.max_diag_spread) } else { -(topo.violations as f64) },
            format!("{} strings", topo.strings_checked),
        ),
    ];
    let r2 = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut omega = gs[0].clone().scaled(r2);
    omega.axpy(r2, &gs[1])?;
    let tl = toric_logical_loop(&t, LoopDirection::X)?;
    let n = t.n_sites();
    let p_l = LocalOperator::identity(n)?
        .scaled(Complex64::new(0.5, 0.0))
        .add(&LocalOperator::from_pauli(Complex64::new(-0.5, 0.0), tl.clone()))?;
    let phi = p_l.apply(&omega)?;
    for q in 0..2 {
        let o = LsqOptions {
            region: Some(tl.support()),
            ..Default::default()
        };
        let r = optimal_local_reverse(&omega, &phi, q, &o)?;
        out.push(Check::new(
            11,
            format!("loop-restricted residual >= 0.4 q={q}"),
            r.residual - 0.4,
            format!("{:.12}", r.residual),
        ));
    }
    Ok(out)
}

/// Runs every check for `level`, in criterion order.
pub fn verify_suite(level: Level, mutate_ec: bool) -> VerifyReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    match theorem_instances(level) {
        Ok(specs) => {
            for s in &specs {
                checks.extend(Check::from_result(1, &format!("theorem {}", s.name()), check_theorem_instance(s, mutate_ec)));
            }
        }
        Err(e) => checks.extend(Check::from_result(1, "theorem instances", Err(e))),
    }
    checks.extend(check_filter_bounds(50, 10_000, 2));
    checks.extend(check_chebyshev_growth(10_000));
    checks.extend(Check::from_result(4, "energy tail", check_energy_tail(20, 8, 4)));
    checks.extend(Check::from_result(5, "ghz certificate", check_ghz_certificate()));
    if level == Level::Full {
        checks.extend(Check::from_result(6, "lmg scaling", check_lmg_scaling()));
    }
    checks.extend(check_exponent_arithmetic());
    checks.extend(Check::from_result(8, "projector locality", check_projector_locality(100, 8)));
    checks.extend(Check::from_result(9, "mean field", check_meanfield(9)));
    checks.extend(Check::from_result(10, "macroscopicity", check_macroscopicity(level, 10)));
    checks.extend(Check::from_result(11, "toric code", check_toric()));
    checks.sort_by_key(|c| c.criterion);
    VerifyReport {
        level,
        mutate_ec,
        checks,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    }
}
