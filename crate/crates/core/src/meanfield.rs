//! One- and two-site marginals, their deviation from a product, and the
//! mean-field error of bond energies.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fit::{power_law, LineFit};
use crate::models::{build_ising_graph, make_special_state, Graph, HamiltonianSpec, SpecialState};
use crate::operator::dense::restricted_matrix;
use crate::operator::{Representation, StateVector};
use crate::spectral::{ground_state, GroundOptions};

const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// Marginal on one or two sites; bit `k` of the local index is `sites[k]`.
#[derive(Clone, Debug)]
pub struct ReducedDensity {
    pub sites: Vec<usize>,
    pub matrix: DMatrix<Complex64>,
}

impl ReducedDensity {
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.matrix.clone()).eigenvalues.min()
    }

    pub fn is_valid(&self) -> bool {
        (self.trace() - 1.0).abs() <= TRACE_TOL && self.min_eigenvalue() >= -PSD_TOL
    }

    /// Traces out `site`, keeping the other one.
    pub fn trace_out(&self, site: usize) -> Result<ReducedDensity> {
        let k = self
            .sites
            .iter()
            .position(|&s| s == site)
            .ok_or_else(|| invalid(format!("site {site} not in the marginal")))?;
        if self.sites.len() != 2 {
            return Err(invalid("only two-site marginals can be reduced"));
        }
        let keep = self.sites[1 - k];
        let mut m = DMatrix::zeros(2, 2);
        for a in 0..2 {
            for b in 0..2 {
                for e in 0..2 {
                    let (r, c) = if k == 0 { (e | a << 1, e | b << 1) } else { (a | e << 1, b | e << 1) };
                    m[(a, b)] += self.matrix[(r, c)];
                }
            }
        }
        Ok(ReducedDensity {
            sites: vec![keep],
            matrix: m,
        })
    }
}

/// `ρ_i ⊗ ρ_j` in the ordering of a two-site marginal on `[i, j]`.
pub fn product_density(ri: &ReducedDensity, rj: &ReducedDensity) -> ReducedDensity {
    let m = DMatrix::from_fn(4, 4, |r, c| ri.matrix[(r & 1, c & 1)] * rj.matrix[(r >> 1, c >> 1)]);
    ReducedDensity {
        sites: vec![ri.sites[0], rj.sites[0]],
        matrix: m,
    }
}

pub fn reduced_density(psi: &StateVector, sites: &[usize]) -> Result<ReducedDensity> {
    if let Representation::CollectiveSpin { .. } = psi.representation() {
        return Err(Error::UnsupportedRepresentation("collective-spin"));
    }
    let n = psi.n_sites();
    if sites.is_empty() || sites.len() > 2 {
        return Err(invalid("marginals are limited to one or two sites"));
    }
    if sites.iter().any(|&s| s >= n) || (sites.len() == 2 && sites[0] == sites[1]) {
        return Err(invalid("marginal sites must be distinct and in range"));
    }
    let k = sites.len();
    let dk = 1usize << k;
    let mask: usize = sites.iter().map(|&s| 1usize << s).sum();
    let amps = psi.amplitudes();
    let mut m = DMatrix::<Complex64>::zeros(dk, dk);
    let mut buf = vec![Complex64::new(0.0, 0.0); dk];
    // enumerate environment configurations as basis states with the marginal bits cleared
    for env in (0..amps.len()).filter(|b| b & mask == 0) {
        for (l, slot) in buf.iter_mut().enumerate() {
            let b = env | sites.iter().enumerate().map(|(j, &s)| ((l >> j) & 1) << s).sum::<usize>();
            *slot = amps[b];
        }
        for r in 0..dk {
            for c in 0..dk {
                m[(r, c)] += buf[r] * buf[c].conj();
            }
        }
    }
    let tr = m.trace().re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(invalid(format!("state norm² = {tr}, expected 1")));
    }
    Ok(ReducedDensity {
        sites: sites.to_vec(),
        matrix: m,
    })
}

/// Largest singular value of a Hermitian matrix.
fn hermitian_norm(m: &DMatrix<Complex64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.amax()
}

fn trace_norm(m: &DMatrix<Complex64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().map(|e| e.abs()).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct DeviationTerm {
    pub j: usize,
    /// `‖ρ_ij − ρ_i ⊗ ρ_j‖` (operator norm).
    pub norm: f64,
    /// Trace-norm diagnostic; not used in any bound.
    pub trace_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MfDeviation {
    pub i: usize,
    pub terms: Vec<DeviationTerm>,
    pub sum: f64,
    /// `√(|L|/δE)` when a gap is supplied.
    pub scale: Option<f64>,
}

/// `Σ_{j∈L} ‖ρ_ij − ρ_i ⊗ ρ_j‖` for a spin `i` outside `L`.
pub fn mf_deviation_sum(psi: &StateVector, i: usize, l: &[usize], delta_e: Option<f64>) -> Result<MfDeviation> {
    if l.contains(&i) {
        return Err(invalid(format!("site {i} must lie outside L")));
    }
    let ri = reduced_density(psi, &[i])?;
    let terms = l
        .par_iter()
        .map(|&j| -> Result<DeviationTerm> {
            let rj = reduced_density(psi, &[j])?;
            let rij = reduced_density(psi, &[i, j])?;
            let d = &rij.matrix - product_density(&ri, &rj).matrix;
            Ok(DeviationTerm {
                j,
                norm: hermitian_norm(&d),
                trace_norm: trace_norm(&d),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sum = terms.iter().map(|t| t.norm).sum();
    Ok(MfDeviation {
        i,
        terms,
        sum,
        scale: delta_e.map(|g| (l.len() as f64 / g).sqrt()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub i: usize,
    pub j: usize,
    /// `‖δρ_ij‖`.
    pub lhs: f64,
    /// `Σ_m ‖P_i^(m) δρ_ij P_i^(m)‖` over `{|0⟩,|1⟩,|+⟩,|−⟩}` on site `i`.
    pub rhs: f64,
    pub holds: bool,
    /// `‖P_0 δρ P_0‖ + ‖P_1 δρ P_1‖ + ½ Σ_{±,±i} ‖P δρ P‖`. The four
    /// projectors above miss the `σ^y` part of the off-diagonal block; adding
    /// `|±i⟩` gives a bound that always holds.
    pub rhs_spanning: f64,
    pub holds_spanning: bool,
}

/// Checks `‖δρ‖ ≤ Σ_m ‖P^(m) δρ P^(m)‖` for the deviation `δρ = ρ_ij − ρ_i⊗ρ_j`.
pub fn projector_decomposition_check(psi: &StateVector, i: usize, j: usize) -> Result<DecompositionReport> {
    let ri = reduced_density(psi, &[i])?;
    let rj = reduced_density(psi, &[j])?;
    let rij = reduced_density(psi, &[i, j])?;
    let d = &rij.matrix - product_density(&ri, &rj).matrix;
    let (lhs, rhs) = deviation_decomposition(&d);
    let rhs_spanning = deviation_decomposition_spanning(&d);
    Ok(DecompositionReport {
        i,
        j,
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
        rhs_spanning,
        holds_spanning: lhs <= rhs_spanning + 1e-12,
    })
}

/// `‖(|v⟩⟨v| ⊗ I) d (|v⟩⟨v| ⊗ I)‖` with site i the low bit.
fn sandwiched_norm(d: &DMatrix<Complex64>, v: [Complex64; 2]) -> f64 {
    let p = DMatrix::from_fn(4, 4, |r, c| {
        if r >> 1 == c >> 1 {
            v[r & 1] * v[c & 1].conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    hermitian_norm(&(&p * d * &p))
}

/// `(‖d‖, Σ_m ‖P^(m) d P^(m)‖)` for a 4×4 matrix on `[i, j]`, projectors on `i`.
pub fn deviation_decomposition(d: &DMatrix<Complex64>) -> (f64, f64) {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let rhs = [[o, z], [z, o], [h, h], [h, -h]]
        .into_iter()
        .map(|v| sandwiched_norm(d, v))
        .sum();
    (hermitian_norm(d), rhs)
}

/// The always-valid six-projector bound; see [`DecompositionReport::rhs_spanning`].
pub fn deviation_decomposition_spanning(d: &DMatrix<Complex64>) -> f64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let (r, im) = (Complex64::new(h, 0.0), Complex64::new(0.0, h));
    let diag = sandwiched_norm(d, [o, z]) + sandwiched_norm(d, [z, o]);
    let off: f64 = [[r, r], [r, -r], [r, im], [r, -im]]
        .into_iter()
        .map(|v| sandwiched_norm(d, v))
        .sum();
    diag + 0.5 * off
}

#[derive(Clone, Debug, Serialize)]
pub struct BondError {
    pub j: usize,
    pub exact: f64,
    pub mean_field: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MfEnergyError {
    pub i: usize,
    pub coordination: usize,
    pub bonds: Vec<BondError>,
    /// Mean of `|⟨h_ij⟩_MF − ⟨h_ij⟩|` over the neighbors of `i`.
    pub mean_abs_error: f64,
    /// `1/√(Z δE)` when a gap is supplied.
    pub scale: Option<f64>,
}

/// Bond energies around site `i` against their product-marginal estimates.
pub fn energy_density_mf_error(
    spec: &HamiltonianSpec,
    omega: &StateVector,
    i: usize,
    delta_e: Option<f64>,
) -> Result<MfEnergyError> {
    if spec.k() > 2 {
        return Err(invalid("mean-field bond energies need a two-body Hamiltonian"));
    }
    let bonds = spec.bonds()?;
    let ri = reduced_density(omega, &[i])?;
    let mut out = Vec::new();
    for (&(a, b), h) in &bonds {
        if a != i && b != i {
            continue;
        }
        let j = if a == i { b } else { a };
        let hm = restricted_matrix(h, &[i, j])?;
        let rij = reduced_density(omega, &[i, j])?;
        let rj = reduced_density(omega, &[j])?;
        let mf = product_density(&ri, &rj);
        out.push(BondError {
            j,
            exact: (&rij.matrix * &hm).trace().re,
            mean_field: (&mf.matrix * &hm).trace().re,
        });
    }
    // a site without bonds has nothing to approximate
    let z = out.len();
    let mean_abs_error = if z == 0 {
        0.0
    } else {
        out.iter().map(|b| (b.mean_field - b.exact).abs()).sum::<f64>() / z as f64
    };
    Ok(MfEnergyError {
        i,
        coordination: z,
        bonds: out,
        mean_abs_error,
        scale: delta_e.filter(|_| z > 0).map(|g| 1.0 / (z as f64 * g).sqrt()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoordinationRow {
    #[serde(rename = "Z")]
    pub z: usize,
    pub gap: f64,
    pub mean_abs_error: f64,
    pub scale: f64,
}

/// Transverse Ising model `−(J/Z) Σ Z_iZ_j − h Σ X_i` on `K_{n−Z, Z}`;
/// site 0 has exactly `Z` neighbors.
pub fn bipartite_coordination_sweep(n: usize, z_list: &[usize], j: f64, h: f64) -> Result<Vec<CoordinationRow>> {
    z_list
        .iter()
        .map(|&z| {
            if z == 0 || z >= n {
                return Err(invalid(format!("coordination {z} impossible with n = {n}")));
            }
            let g = Graph::complete_bipartite(n - z, z)?;
            let spec = build_ising_graph(n, &g.edges, j, h, z as f64)?;
            let sol = ground_state(&spec, &GroundOptions::default())?;
            let omega = sol.require_unique()?;
            let e = energy_density_mf_error(&spec, omega, 0, Some(sol.gap))?;
            Ok(CoordinationRow {
                z,
                gap: sol.gap,
                mean_abs_error: e.mean_abs_error,
                scale: e.scale.unwrap_or(f64::NAN),
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HybridRow {
    pub l_size: usize,
    pub sum: f64,
}

/// Deviation sums of `(|0⟩|0…0⟩ + |1⟩|W⟩)/√2` on `|L| + 1` sites, `i = 0`,
/// `L` = the rest, with the fitted exponent of `sum ∝ |L|^p`.
pub fn hybrid_deviation_scaling(l_sizes: &[usize]) -> Result<(Vec<HybridRow>, LineFit)> {
    let rows = l_sizes
        .iter()
        .map(|&l| {
            let psi = make_special_state(&SpecialState::GhzWHybrid(l + 1))?;
            let sites: Vec<usize> = (1..=l).collect();
            let d = mf_deviation_sum(&psi, 0, &sites, None)?;
            Ok(HybridRow { l_size: l, sum: d.sum })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.l_size as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.sum).collect();
    let fit = power_law(&xs, &ys)?;
    Ok((rows, fit))
}
