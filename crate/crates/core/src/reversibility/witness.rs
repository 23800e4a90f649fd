//! Macroscopic-superposition witnesses and local indistinguishability.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::lsq::{least_squares_reverse, LsqOptions};
use super::ReverseMethod;
use crate::error::{invalid, Error, Result};
use crate::filter::{apply_filter, FilterParams};
use crate::models::HamiltonianSpec;
use crate::operator::{apply_pauli, enumerate_q_local_basis, LocalOperator, PauliString, StateVector};
use crate::spectral::GroundSolution;

/// Tolerance on `P² = P` and `P = P†`.
const PROJECTOR_TOL: f64 = 1e-10;
/// Smallest branch weight accepted in `ψ = αψ_a + βψ_b`.
const BRANCH_FLOOR: f64 = 1e-6;
/// Off-diagonal and spread tolerance for indistinguishability.
const TOPO_TOL: f64 = 1e-8;

pub enum WitnessMethod<'a> {
    /// `R = F_R(H)/α²`; `ψ` must be the unique ground state.
    Chebyshev {
        spec: &'a HamiltonianSpec,
        ground: &'a GroundSolution,
    },
    /// Least-squares optimal q-local `R`.
    Optimal(LsqOptions),
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub q: usize,
    pub method: ReverseMethod,
    pub alpha: f64,
    pub beta: f64,
    /// `‖R P_L ψ − ψ‖`.
    pub reverse_residual: f64,
    /// `‖O ψ_a − ψ_b‖` with `O = α(R − I)/β`.
    pub delta_norm: f64,
    pub delta_sq: f64,
    pub n0: Option<usize>,
    /// `f/(α²β)` with `f = 6e^{−2n0/ξ}`, compared against `‖δ‖²`.
    pub delta_sq_bound: Option<f64>,
    /// `6e^{−2n0/ξ}/(α²β)`, a proven bound on `‖δ‖`.
    pub rigorous_bound: Option<f64>,
}

impl WitnessReport {
    /// Whether `‖δ‖` respects the proven bound (Chebyshev only).
    pub fn within_bound(&self) -> Option<bool> {
        self.rigorous_bound.map(|b| self.delta_norm <= b)
    }
}

fn check_projector(p: &LocalOperator) -> Result<()> {
    let sq = p.compose(p)?;
    let diff = sq.add(&p.scaled(Complex64::new(-1.0, 0.0)))?;
    let worst = diff.terms().iter().map(|(c, _)| c.norm()).fold(0.0, f64::max);
    if worst > PROJECTOR_TOL || !p.is_hermitian(PROJECTOR_TOL) {
        return Err(Error::NotAProjector(worst));
    }
    Ok(())
}

/// Splits `ψ` along `P_L`, reverses the `P_L` branch and reports how well
/// the q-local `O = α(R − I)/β` maps one branch onto the other.
pub fn macroscopicity_witness(
    psi: &StateVector,
    p_l: &LocalOperator,
    q: usize,
    method: &WitnessMethod<'_>,
) -> Result<WitnessReport> {
    check_projector(p_l)?;
    let pa = p_l.apply(psi)?;
    let pb = psi.sub(&pa)?;
    let (alpha, beta) = (pa.norm(), pb.norm());
    if alpha <= BRANCH_FLOOR || beta <= BRANCH_FLOOR {
        return Err(Error::DegenerateDecomposition { alpha, beta });
    }
    let (restored, n0, sq_bound, rigorous, m) = match method {
        WitnessMethod::Chebyshev { spec, ground } => {
            let omega = ground.require_unique()?;
            let fid = omega.inner(psi)?.norm();
            if fid < 1.0 - 1e-8 {
                return Err(invalid("Chebyshev witness needs ψ to be the ground state"));
            }
            let l = p_l.support().len().max(1);
            let params = FilterParams::new(q, spec.k(), spec.g(), l, ground.gap)?;
            let shifted = ground.shifted(spec);
            let r = apply_filter(&params, &shifted, &pa)?.scaled(Complex64::new(1.0 / (alpha * alpha), 0.0));
            let f = 6.0 * (-2.0 * params.n0 as f64 / params.xi).exp();
            let b = f / (alpha * alpha * beta);
            (r, Some(params.n0), Some(b), Some(b), ReverseMethod::Chebyshev)
        }
        WitnessMethod::Optimal(opts) => {
            let o = least_squares_reverse(psi, &pa, q, opts)?;
            (o.fitted, None, None, None, ReverseMethod::OptimalLsq)
        }
    };
    let reverse_residual = restored.distance(psi)?;
    // O ψ_a − ψ_b = (R P_L ψ − P_L ψ)/β − (I − P_L)ψ/β
    let mut delta = restored.sub(&pa)?;
    delta.axpy(Complex64::new(-1.0, 0.0), &pb)?;
    let delta_norm = delta.norm() / beta;
    Ok(WitnessReport {
        q,
        method: m,
        alpha,
        beta,
        reverse_residual,
        delta_norm,
        delta_sq: delta_norm * delta_norm,
        n0,
        delta_sq_bound: sq_bound,
        rigorous_bound: rigorous,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TopoReport {
    pub strings_checked: usize,
    /// `max |⟨Ω_α|o|Ω_α⟩ − ⟨Ω_0|o|Ω_0⟩|`.
    pub max_diag_spread: f64,
    /// `max_{α≠β} |⟨Ω_α|o|Ω_β⟩|`.
    pub max_offdiag: f64,
    pub violations: usize,
    /// A few offending strings.
    pub examples: Vec<String>,
}

impl TopoReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Checks that no Pauli string of weight `≤ support_cutoff` distinguishes
/// the given orthonormal states. All strings are used unless `samples`
/// asks for fewer.
pub fn topo_indistinguishability_check(
    states: &[StateVector],
    support_cutoff: usize,
    samples: Option<usize>,
    symmetry: Option<&[PauliString]>,
    seed: u64,
) -> Result<TopoReport> {
    if states.len() < 2 {
        return Err(invalid("indistinguishability needs at least two states"));
    }
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            if (a.inner(b)? - Complex64::new(want, 0.0)).norm() > 1e-8 {
                return Err(invalid("states are not orthonormal"));
            }
        }
    }
    let n = states[0].n_sites();
    let mut strings = enumerate_q_local_basis(n, support_cutoff.min(n), None, symmetry)?;
    strings.retain(|p| !p.is_identity());
    if let Some(s) = samples {
        if s < strings.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = sample(&mut rng, strings.len(), s).into_vec();
            idx.sort_unstable();
            strings = idx.into_iter().map(|i| strings[i].clone()).collect();
        }
    }
    let mut report = TopoReport {
        strings_checked: strings.len(),
        max_diag_spread: 0.0,
        max_offdiag: 0.0,
        violations: 0,
        examples: Vec::new(),
    };
    for p in &strings {
        let images = states.iter().map(|s| apply_pauli(p, s)).collect::<Result<Vec<_>>>()?;
        let d0 = states[0].inner(&images[0])?;
        let mut spread = 0.0f64;
        let mut off = 0.0f64;
        for (a, sa) in states.iter().enumerate() {
            for (b, ib) in images.iter().enumerate() {
                let m = sa.inner(ib)?;
                if a == b {
                    spread = spread.max((m - d0).norm());
                } else {
                    off = off.max(m.norm());
                }
            }
        }
        report.max_diag_spread = report.max_diag_spread.max(spread);
        report.max_offdiag = report.max_offdiag.max(off);
        if spread > TOPO_TOL || off > TOPO_TOL {
            report.violations += 1;
            if report.examples.len() < 10 {
                report.examples.push(p.to_string());
            }
        }
    }
    Ok(report)
}
