//! Lipkin–Meshkov–Glick model
//! `H = −(λ/N) Σ_{i<j} (X_i X_j + γ Y_i Y_j) + h Σ_i Z_i`.
//!
//! The field is along Z so that `λ = |h|` is the critical point. In the
//! maximal-spin sector, with `Σ_{i<j} X_i X_j = 2 S_x² − N/2`,
//! the Hamiltonian is pentadiagonal in the `S_z` basis and couples only
//! `m` and `m ± 2`.

use crate::error::{invalid, Result};
use crate::operator::{Letter, LocalOperator, PauliString};

use super::spec::{BandedSector, HamiltonianSpec, ModelMeta};

fn check(n: usize, gamma: f64) -> Result<()> {
    if n < 2 {
        return Err(invalid("LMG needs N >= 2"));
    }
    if gamma.abs() > 1.0 {
        return Err(invalid("LMG needs |gamma| <= 1"));
    }
    Ok(())
}

fn meta(n: usize, lambda: f64, gamma: f64, h: f64) -> ModelMeta {
    ModelMeta::new("lmg")
        .param("N", n as f64)
        .param("lambda", lambda)
        .param("gamma", gamma)
        .param("h", h)
}

/// Interaction strength of the defining Pauli form.
pub fn lmg_strength(n: usize, lambda: f64, gamma: f64, h: f64) -> f64 {
    (n as f64 - 1.0) * lambda.abs() * (1.0 + gamma.abs()) / n as f64 + h.abs()
}

/// Ladder factor `√(S(S+1) − m(m+1))` of `S_+ |m>`.
pub fn ladder(s: f64, m: f64) -> f64 {
    (s * (s + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

pub fn build_lmg_sector(n: usize, lambda: f64, gamma: f64, h: f64) -> Result<HamiltonianSpec> {
    check(n, gamma)?;
    let nf = n as f64;
    let s = nf / 2.0;
    let dim = n + 1;
    let c = lambda / nf;
    let mut diag = Vec::with_capacity(dim);
    let mut off2 = vec![0.0; dim.saturating_sub(2)];
    for j in 0..dim {
        let m = j as f64 - s;
        let quad = (1.0 + gamma) * (s * (s + 1.0) - m * m) - nf * (1.0 + gamma) / 2.0;
        diag.push(-c * quad + 2.0 * h * m);
        if j + 2 < dim {
            off2[j] = -c * (1.0 - gamma) / 2.0 * ladder(s, m) * ladder(s, m + 1.0);
        }
    }
    let sector = BandedSector {
        diag,
        off1: vec![0.0; dim - 1],
        off2,
    };
    let k = if lambda != 0.0 { 2 } else { 1 };
    Ok(HamiltonianSpec::collective(
        n,
        sector,
        k,
        lmg_strength(n, lambda, gamma, h),
        meta(n, lambda, gamma, h),
    ))
}

/// Same model on the full `2^N` space, for cross-checks.
pub fn build_lmg_pauli(n: usize, lambda: f64, gamma: f64, h: f64) -> Result<HamiltonianSpec> {
    check(n, gamma)?;
    let c = lambda / n as f64;
    let mut terms = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            terms.push((-c, PauliString::from_letters(n, &[(i, Letter::X), (j, Letter::X)])?));
            terms.push((
                -c * gamma,
                PauliString::from_letters(n, &[(i, Letter::Y), (j, Letter::Y)])?,
            ));
        }
        terms.push((h, PauliString::single(n, i, Letter::Z)?));
    }
    let op = LocalOperator::from_real_terms(n, terms)?;
    HamiltonianSpec::from_operator(op, meta(n, lambda, gamma, h))
}
