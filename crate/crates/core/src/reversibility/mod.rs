//! Reverse operators for locally disturbed ground states.
//!
//! `chebyshev_reverse` realizes the explicit construction `F_R(H)/⟨Γ⟩`;
//! `optimal_local_reverse` finds the best q-local reverse by least squares,
//! which is what certifies that a state is *not* locally reversible.

pub mod lsq;
pub mod witness;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::filter::{apply_filter, FilterParams};
use crate::models::HamiltonianSpec;
use crate::operator::dense::NORM_LIMIT;
use crate::operator::{operator_norm, LocalOperator, NormMode, PauliString, StateVector};
use crate::spectral::{energy_distribution_from, tail_weight, Eigensystem, GroundSolution};

pub use lsq::{least_squares_reverse, LsqOptions, LsqOutcome, LsqRoute};
pub use witness::{
    macroscopicity_witness, topo_indistinguishability_check, TopoReport, WitnessMethod, WitnessReport,
};

/// Below this `|⟨Ω|Γ|Ω⟩|` the theorem's bound is useless.
pub const OVERLAP_FLOOR: f64 = 1e-8;

/// A disturbance `Γ_L` together with its region and the data the bound needs.
#[derive(Clone, Debug)]
pub struct DisturbanceSpec {
    pub op: LocalOperator,
    /// Sorted, distinct; contains the support of `op`.
    pub region: Vec<usize>,
    pub norm: f64,
    /// Whether `norm` is the exact operator norm (else a triangle bound).
    pub norm_exact: bool,
    pub overlap: Complex64,
}

impl DisturbanceSpec {
    /// `region` defaults to the support of `op`.
    pub fn new(op: LocalOperator, region: Option<Vec<usize>>, omega: &StateVector) -> Result<DisturbanceSpec> {
        let mut region = region.unwrap_or_else(|| op.support());
        region.sort_unstable();
        region.dedup();
        if region.is_empty() {
            return Err(invalid("disturbance region must contain at least one site"));
        }
        if region.iter().any(|&s| s >= op.n_sites()) {
            return Err(invalid("disturbance region site out of range"));
        }
        let rmask = region.iter().fold(0u64, |m, &s| m | 1 << s);
        if op.support_mask() & !rmask != 0 {
            return Err(invalid("disturbance acts outside its region"));
        }
        let norm_exact = op.support().len() <= NORM_LIMIT;
        let norm = operator_norm(&op, if norm_exact { NormMode::Exact } else { NormMode::Triangle })?;
        let overlap = op.expectation(omega)?;
        Ok(DisturbanceSpec {
            op,
            region,
            norm,
            norm_exact,
            overlap,
        })
    }

    pub fn l_size(&self) -> usize {
        self.region.len()
    }
}

/// `|0…0⟩⟨0…0|`-type projector: `Π (I ± Z_s)/2` with `bits[j]` selecting
/// the outcome on `sites[j]`.
pub fn basis_projector(n: usize, sites: &[usize], bits: &[bool]) -> Result<LocalOperator> {
    if sites.len() != bits.len() {
        return Err(Error::DimensionMismatch {
            expected: sites.len(),
            found: bits.len(),
        });
    }
    let mut op = LocalOperator::identity(n)?;
    for (&s, &b) in sites.iter().zip(bits) {
        let z = LocalOperator::term(n, if b { -0.5 } else { 0.5 }, &[(s, crate::operator::Letter::Z)])?;
        let half = LocalOperator::identity(n)?.scaled(Complex64::new(0.5, 0.0));
        op = op.compose(&half.add(&z)?)?;
    }
    Ok(op)
}

/// The basis projector on `sites` with the largest weight in `omega`
/// (first in bit order on ties).
pub fn max_overlap_projector(omega: &StateVector, sites: &[usize]) -> Result<(LocalOperator, Vec<bool>)> {
    if sites.is_empty() || sites.len() > 16 {
        return Err(invalid("projector selection needs 1..=16 sites"));
    }
    let n = omega.n_sites();
    let mut best: Option<(f64, Vec<bool>)> = None;
    for pattern in 0..1usize << sites.len() {
        let bits: Vec<bool> = (0..sites.len()).map(|j| pattern >> j & 1 == 1).collect();
        let w = basis_projector(n, sites, &bits)?.expectation(omega)?.re;
        if best.as_ref().is_none_or(|b| w > b.0 + 1e-12) {
            best = Some((w, bits));
        }
    }
    let bits = best.expect("at least one pattern").1;
    Ok((basis_projector(n, sites, &bits)?, bits))
}

/// The Pauli string acting nontrivially on every site of `sites` with the
/// largest `|⟨P⟩|` in `omega` (first in enumeration order on ties).
pub fn max_overlap_pauli(omega: &StateVector, sites: &[usize]) -> Result<PauliString> {
    use crate::operator::Letter;
    if sites.is_empty() || sites.len() > 10 {
        return Err(invalid("Pauli selection needs 1..=10 sites"));
    }
    let n = omega.n_sites();
    let mut best: Option<(f64, PauliString)> = None;
    for code in 0..3usize.pow(sites.len() as u32) {
        let letters: Vec<(usize, Letter)> = sites
            .iter()
            .enumerate()
            .map(|(j, &s)| (s, Letter::NON_IDENTITY[code / 3usize.pow(j as u32) % 3]))
            .collect();
        let p = PauliString::from_letters(n, &letters)?;
        let w = LocalOperator::from_pauli(Complex64::new(1.0, 0.0), p.clone())
            .expectation(omega)?
            .norm();
        if best.as_ref().is_none_or(|b| w > b.0 + 1e-12) {
            best = Some((w, p));
        }
    }
    Ok(best.expect("at least one string").1)
}

/// `6‖Γ‖/|⟨Γ⟩| · e^{−2n0/ξ}`.
pub fn theorem_bound_rhs(params: &FilterParams, norm: f64, overlap: Complex64) -> Result<f64> {
    let ov = overlap.norm();
    if !(ov > OVERLAP_FLOOR) {
        return Err(Error::VacuousBound {
            overlap: ov,
            floor: OVERLAP_FLOOR,
        });
    }
    Ok(6.0 * norm / ov * (-2.0 * params.n0 as f64 / params.xi).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReverseMethod {
    Chebyshev,
    OptimalLsq,
}

impl ReverseMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ReverseMethod::Chebyshev => "chebyshev",
            ReverseMethod::OptimalLsq => "optimal_lsq",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReverseResult {
    pub q: usize,
    /// Filter degree (Chebyshev only).
    pub n0: Option<usize>,
    pub residual: f64,
    /// Theorem RHS (Chebyshev only).
    pub rhs_bound: Option<f64>,
    pub method: ReverseMethod,
    pub params: Option<FilterParams>,
    /// `R Γ|Ω⟩` (Chebyshev) or the best `R|φ⟩` (least squares).
    pub restored: StateVector,
    pub coefficients: Option<Vec<(PauliString, Complex64)>>,
    pub route: Option<LsqRoute>,
}

impl ReverseResult {
    /// `rhs − residual`; negative means the inequality failed.
    pub fn margin(&self) -> Option<f64> {
        self.rhs_bound.map(|r| r - self.residual)
    }
}

/// `‖F_R(H) Γ|Ω⟩/⟨Γ⟩ − |Ω⟩‖` against the theorem's bound.
pub fn chebyshev_reverse(
    spec: &HamiltonianSpec,
    ground: &GroundSolution,
    dist: &DisturbanceSpec,
    q: usize,
) -> Result<ReverseResult> {
    chebyshev_reverse_with(spec, ground, dist, q, FilterParams::new)
}

/// As [`chebyshev_reverse`] with a caller-chosen parameter constructor
/// (used to show the checks catch a broken window).
pub fn chebyshev_reverse_with(
    spec: &HamiltonianSpec,
    ground: &GroundSolution,
    dist: &DisturbanceSpec,
    q: usize,
    make: impl Fn(usize, usize, f64, usize, f64) -> Result<FilterParams>,
) -> Result<ReverseResult> {
    let omega = ground.require_unique()?;
    let params = make(q, spec.k(), spec.g(), dist.l_size(), ground.gap)?;
    let rhs = theorem_bound_rhs(&params, dist.norm, dist.overlap)?;
    let shifted = ground.shifted(spec);
    let phi = dist.op.apply(omega)?;
    let restored = apply_filter(&params, &shifted, &phi)?.scaled(dist.overlap.inv());
    let residual = restored.distance(omega)?;
    Ok(ReverseResult {
        q,
        n0: Some(params.n0),
        residual,
        rhs_bound: Some(rhs),
        method: ReverseMethod::Chebyshev,
        params: Some(params),
        restored,
        coefficients: None,
        route: None,
    })
}

/// Best q-local `R` minimizing `‖R|φ⟩ − |Ω⟩‖`; the residual is the global
/// minimum over the (optionally filtered) Pauli span.
pub fn optimal_local_reverse(
    target: &StateVector,
    input: &StateVector,
    q: usize,
    opts: &LsqOptions,
) -> Result<ReverseResult> {
    let o = least_squares_reverse(target, input, q, opts)?;
    Ok(ReverseResult {
        q,
        n0: None,
        residual: o.residual,
        rhs_bound: None,
        method: ReverseMethod::OptimalLsq,
        params: None,
        restored: o.fitted,
        coefficients: o.coefficients,
        route: Some(o.route),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TailPoint {
    pub energy: f64,
    pub weight: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailReport {
    pub points: Vec<TailPoint>,
    pub norm: f64,
    pub g: f64,
    pub k: usize,
    pub l_size: usize,
    /// `min(bound − weight)` over all points.
    pub worst_margin: f64,
    pub violations: usize,
}

impl TailReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Slack for rounding in the eigen-decomposition.
const TAIL_SLACK: f64 = 1e-12;

/// `‖Π_{≥E} Γ|Ω⟩‖² ≤ ‖Γ‖² e^{−(E − 2g|L|)/(4gk)}` at every eigenvalue `E`.
pub fn energy_tail_check(spec: &HamiltonianSpec, omega: &StateVector, dist: &DisturbanceSpec) -> Result<TailReport> {
    let eig = Eigensystem::new(spec)?;
    let e0 = eig.values[0];
    let excess = spec.energy(omega)? - e0;
    if excess > 1e-8 * spec.triangle_norm().max(1.0) {
        return Err(invalid(format!("state is not a ground state (excess energy {excess:e})")));
    }
    let phi = dist.op.apply(omega)?;
    let d = energy_distribution_from(&eig, &phi)?;
    let (g, k, l) = (spec.g(), spec.k(), dist.l_size());
    let n2 = dist.norm * dist.norm;
    let mut points = Vec::with_capacity(d.entries.len());
    let mut worst = f64::INFINITY;
    let mut violations = 0;
    for &(e, _) in &d.entries {
        let weight = tail_weight(&d, e);
        let bound = n2 * (-(e - 2.0 * g * l as f64) / (4.0 * g * k as f64)).exp();
        worst = worst.min(bound - weight);
        if weight > bound + TAIL_SLACK * n2.max(1.0) {
            violations += 1;
        }
        points.push(TailPoint { energy: e, weight, bound });
    }
    Ok(TailReport {
        points,
        norm: dist.norm,
        g,
        k,
        l_size: l,
        worst_margin: worst,
        violations,
    })
}

/// One experiment CSV row.
#[derive(Clone, Debug, Serialize)]
pub struct ReverseRow {
    pub model: String,
    pub n: usize,
    pub q: usize,
    pub k: usize,
    pub g: f64,
    pub l_size: usize,
    pub delta_e: f64,
    pub n0: usize,
    pub xi: f64,
    pub method: String,
    pub residual: f64,
    pub rhs_bound: f64,
    pub margin: f64,
    pub overlap_abs: f64,
}

impl ReverseRow {
    pub const HEADER: [&'static str; 14] = [
        "model", "n", "q", "k", "g", "L_size", "deltaE", "n0", "xi", "method", "residual", "rhs_bound", "margin",
        "overlap_abs",
    ];

    /// Row for a result; the least-squares rows borrow the filter data of
    /// the matching Chebyshev run when given.
    pub fn new(spec: &HamiltonianSpec, dist: &DisturbanceSpec, r: &ReverseResult, params: Option<&FilterParams>) -> ReverseRow {
        let p = r.params.as_ref().or(params);
        let rhs = r.rhs_bound.unwrap_or(f64::NAN);
        ReverseRow {
            model: spec.name().to_string(),
            n: spec.n_sites(),
            q: r.q,
            k: spec.k(),
            g: spec.g(),
            l_size: dist.l_size(),
            delta_e: p.map_or(f64::NAN, |p| p.delta_e),
            n0: p.map_or(0, |p| p.n0),
            xi: p.map_or(f64::NAN, |p| p.xi),
            method: r.method.as_str().to_string(),
            residual: r.residual,
            rhs_bound: rhs,
            margin: rhs - r.residual,
            overlap_abs: dist.overlap.norm(),
        }
    }

    pub fn record(&self) -> Vec<String> {
        let f = |x: f64| format!("{x:.16e}");
        vec![
            self.model.clone(),
            self.n.to_string(),
            self.q.to_string(),
            self.k.to_string(),
            f(self.g),
            self.l_size.to_string(),
            f(self.delta_e),
            self.n0.to_string(),
            f(self.xi),
            self.method.clone(),
            f(self.residual),
            f(self.rhs_bound),
            f(self.margin),
            f(self.overlap_abs),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_transverse_ising, Boundary};
    use crate::spectral::{ground_state, GroundOptions};

    #[test]
    fn rhs_trivial_cases() {
        let p = FilterParams::new(4, 2, 1.0, 1, 1.0).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let r = theorem_bound_rhs(&p, 1.0, one).unwrap();
        assert!((r - 6.0 * (-2.0 * 2.0 / p.xi).exp()).abs() < 1e-15);
        let p0 = FilterParams::new(1, 2, 1.0, 1, 1.0).unwrap();
        assert_eq!(theorem_bound_rhs(&p0, 2.0, Complex64::new(0.5, 0.0)).unwrap(), 24.0);
        assert!(matches!(
            theorem_bound_rhs(&p, 1.0, Complex64::new(1e-9, 0.0)),
            Err(Error::VacuousBound { .. })
        ));
    }

    #[test]
    fn projector_is_idempotent() {
        let p = basis_projector(5, &[0, 2, 3], &[false, true, false]).unwrap();
        let p2 = p.compose(&p).unwrap();
        let diff = p2.add(&p.scaled(Complex64::new(-1.0, 0.0))).unwrap();
        assert!(diff.is_zero());
        assert!((operator_norm(&p, NormMode::Exact).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_disturbance_is_restored() {
        let spec = build_transverse_ising(6, 1.0, 2.0, Boundary::Periodic).unwrap();
        let sol = ground_state(&spec, &GroundOptions::default()).unwrap();
        let id = LocalOperator::identity(6).unwrap();
        let d = DisturbanceSpec::new(id, Some(vec![0]), sol.ground()).unwrap();
        for q in [0, 2, 6] {
            let r = chebyshev_reverse(&spec, &sol, &d, q).unwrap();
            assert!(r.residual < 1e-9, "q={q}: {}", r.residual);
            assert!(r.residual <= r.rhs_bound.unwrap());
        }
    }

    #[test]
    fn region_must_cover_support() {
        let psi = StateVector::basis(3, 0).unwrap();
        let op = LocalOperator::term(3, 1.0, &[(2, crate::operator::Letter::X)]).unwrap();
        assert!(DisturbanceSpec::new(op, Some(vec![0, 1]), &psi).is_err());
    }
}
