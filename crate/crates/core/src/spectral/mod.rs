//! Ground states, gaps, spectra and energy-resolved weights.

pub mod dense;
pub mod lanczos;
pub mod tridiag;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::{BandedSector, HamiltonianForm, HamiltonianSpec};
use crate::operator::StateVector;

pub use dense::Eigensystem;
use lanczos::{lowest_eigenpair, LanczosOptions};

/// Largest site count for the matrix-free iterative solver.
pub const ITERATIVE_LIMIT: usize = 24;
/// Largest collective-spin sector dimension.
pub const SECTOR_LIMIT: usize = 1 << 16;
/// Bin width for merging equal eigenvalues.
pub const ENERGY_BIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Dense,
    Iterative,
    Banded,
}

#[derive(Clone, Debug)]
pub struct GroundOptions {
    /// Defaults to `1e-8 · max(1, ‖H‖_triangle)`.
    pub degeneracy_tol: Option<f64>,
    pub max_dense_sites: usize,
    pub seed: u64,
    /// Cap on the number of levels resolved by the iterative solver.
    pub max_levels: usize,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions {
            degeneracy_tol: None,
            max_dense_sites: 10,
            seed: 0x5eed,
            max_levels: 24,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundSolution {
    /// Ground energy of the spec as given (its offset included).
    pub energy_shift: f64,
    pub ground_states: Vec<StateVector>,
    pub gap: f64,
    pub degeneracy: usize,
    pub solver: Solver,
}

impl GroundSolution {
    pub fn ground(&self) -> &StateVector {
        &self.ground_states[0]
    }

    /// The spec shifted so that its ground energy is 0.
    pub fn shifted(&self, spec: &HamiltonianSpec) -> HamiltonianSpec {
        spec.shifted(self.energy_shift)
    }

    pub fn require_unique(&self) -> Result<&StateVector> {
        if self.degeneracy != 1 {
            return Err(Error::DegenerateGroundState(self.degeneracy));
        }
        Ok(&self.ground_states[0])
    }
}

fn default_tol(spec: &HamiltonianSpec, opts: &GroundOptions) -> f64 {
    opts.degeneracy_tol
        .unwrap_or(1e-8 * spec.triangle_norm().max(1.0))
}

pub fn ground_state(spec: &HamiltonianSpec, opts: &GroundOptions) -> Result<GroundSolution> {
    let tol = default_tol(spec, opts);
    match spec.form() {
        HamiltonianForm::CollectiveSpin(b) => {
            if b.dim() > SECTOR_LIMIT {
                return Err(Error::DimensionLimit {
                    what: "collective-spin sector dimension",
                    requested: b.dim(),
                    limit: SECTOR_LIMIT,
                });
            }
            if b.off1.iter().all(|&x| x == 0.0) {
                banded_ground(spec, b, tol)
            } else if b.dim() <= 2048 {
                dense_ground(spec, tol)
            } else {
                Err(Error::DimensionLimit {
                    what: "general bandwidth-2 sector dimension",
                    requested: b.dim(),
                    limit: 2048,
                })
            }
        }
        HamiltonianForm::Pauli(_) => {
            let n = spec.n_sites();
            if n <= opts.max_dense_sites.min(crate::operator::dense::DENSE_LIMIT) {
                dense_ground(spec, tol)
            } else if n <= ITERATIVE_LIMIT {
                iterative_ground(spec, tol, opts)
            } else {
                Err(Error::DimensionLimit {
                    what: "iterative solver sites",
                    requested: n,
                    limit: ITERATIVE_LIMIT,
                })
            }
        }
    }
}

fn group(values: &[f64], tol: f64) -> (usize, f64) {
    let e0 = values[0];
    let deg = values.iter().take_while(|&&v| v - e0 <= tol).count();
    let gap = values.get(deg).map(|&v| v - e0).unwrap_or(0.0);
    (deg, gap)
}

fn dense_ground(spec: &HamiltonianSpec, tol: f64) -> Result<GroundSolution> {
    let eig = Eigensystem::new(spec)?;
    let (deg, gap) = group(&eig.values, tol);
    let states = (0..deg).map(|k| eig.vector(k)).collect::<Result<Vec<_>>>()?;
    Ok(GroundSolution {
        energy_shift: eig.values[0] + spec.offset(),
        ground_states: states,
        gap,
        degeneracy: deg,
        solver: Solver::Dense,
    })
}

fn iterative_ground(spec: &HamiltonianSpec, tol: f64, opts: &GroundOptions) -> Result<GroundSolution> {
    let dim = spec.dim();
    let apply = |x: &[Complex64], y: &mut [Complex64]| spec.apply_raw(x, y);
    let lopts = LanczosOptions {
        krylov_dim: 120,
        max_restarts: 60,
        tol: 1e-10 * spec.triangle_norm().max(1.0),
        seed: opts.seed,
    };
    let mut found: Vec<Vec<Complex64>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    loop {
        if found.len() >= opts.max_levels.min(dim) {
            if found.len() == dim {
                break;
            }
            return Err(Error::NotConverged(format!(
                "ground level not separated after {} levels",
                found.len()
            )));
        }
        let (theta, x, _) = lowest_eigenpair(&apply, dim, &found, &lopts)?;
        values.push(theta);
        found.push(x);
        let e0 = values.iter().copied().fold(f64::INFINITY, f64::min);
        if theta - e0 > tol {
            break;
        }
    }
    // order by energy; a later pass can land marginally below an earlier one
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let (deg, gap) = group(&sorted, tol);
    let states = order[..deg]
        .iter()
        .map(|&i| StateVector::from_amplitudes(spec.n_sites(), found[i].clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundSolution {
        energy_shift: sorted[0] + spec.offset(),
        ground_states: states,
        gap,
        degeneracy: deg,
        solver: Solver::Iterative,
    })
}

/// Splits the pentadiagonal `off2`-only sector into its two parity chains.
fn parity_chains(b: &BandedSector) -> [(Vec<usize>, Vec<f64>, Vec<f64>); 2] {
    let mk = |p: usize| {
        let idx: Vec<usize> = (p..b.dim()).step_by(2).collect();
        let d: Vec<f64> = idx.iter().map(|&j| b.diag[j]).collect();
        let e: Vec<f64> = idx.windows(2).map(|w| b.off2[w[0]]).collect();
        (idx, d, e)
    };
    [mk(0), mk(1)]
}

fn banded_ground(spec: &HamiltonianSpec, b: &BandedSector, tol: f64) -> Result<GroundSolution> {
    let chains = parity_chains(b);
    // a few lowest levels of each chain
    let mut levels: Vec<(f64, usize, usize)> = Vec::new();
    for (c, (idx, d, e)) in chains.iter().enumerate() {
        for k in 0..idx.len().min(4) {
            levels.push((tridiag::kth_eigenvalue(d, e, k) - spec.offset(), c, k));
        }
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    let values: Vec<f64> = levels.iter().map(|l| l.0).collect();
    let (deg, gap) = group(&values, tol);
    if deg >= values.len() {
        return Err(Error::NotConverged("collective sector degeneracy exceeds resolved levels".into()));
    }
    let mut states = Vec::with_capacity(deg);
    for &(ev, c, _) in &levels[..deg] {
        let (idx, d, e) = &chains[c];
        let v = tridiag::eigenvector(d, e, ev + spec.offset());
        let mut amps = vec![Complex64::new(0.0, 0.0); b.dim()];
        for (&j, &x) in idx.iter().zip(&v) {
            amps[j] = Complex64::new(x, 0.0);
        }
        states.push(StateVector::collective(spec.n_sites(), amps)?);
    }
    Ok(GroundSolution {
        energy_shift: values[0] + spec.offset(),
        ground_states: states,
        gap,
        degeneracy: deg,
        solver: Solver::Banded,
    })
}

/// All eigenvalues, shifted so the minimum is 0.
pub fn full_spectrum(spec: &HamiltonianSpec) -> Result<Vec<f64>> {
    let eig = Eigensystem::new(spec)?;
    let e0 = eig.values[0];
    Ok(eig.values.iter().map(|v| v - e0).collect())
}

pub fn apply_hamiltonian(spec: &HamiltonianSpec, psi: &StateVector) -> Result<StateVector> {
    spec.apply(psi)
}

/// `(E_k, |c(E_k)|²)` with equal energies merged, energies measured from
/// the lowest eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyDistribution {
    pub entries: Vec<(f64, f64)>,
}

impl EnergyDistribution {
    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }
}

pub fn energy_distribution_from(eig: &Eigensystem, phi: &StateVector) -> Result<EnergyDistribution> {
    let c = eig.coefficients(phi)?;
    let e0 = eig.values[0];
    let mut entries: Vec<(f64, f64)> = Vec::new();
    for (k, ck) in c.iter().enumerate() {
        let e = (eig.values[k] - e0).max(0.0);
        match entries.last_mut() {
            Some(last) if (e - last.0).abs() <= ENERGY_BIN => last.1 += ck.norm_sqr(),
            _ => entries.push((e, ck.norm_sqr())),
        }
    }
    Ok(EnergyDistribution { entries })
}

pub fn energy_distribution(spec: &HamiltonianSpec, phi: &StateVector) -> Result<EnergyDistribution> {
    energy_distribution_from(&Eigensystem::new(spec)?, phi)
}

/// `Σ_{E_k ≥ E} |c(E_k)|²`; a bin counts as `≥ E` when within the bin width.
pub fn tail_weight(dist: &EnergyDistribution, e: f64) -> f64 {
    dist.entries
        .iter()
        .filter(|(ek, _)| *ek >= e - ENERGY_BIN)
        .map(|(_, w)| w)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_transverse_ising, Boundary, Graph};

    #[test]
    fn classical_ising_pair() {
        let s = build_transverse_ising(2, 1.0, 0.0, Boundary::Open).unwrap();
        let spec = full_spectrum(&s).unwrap();
        let want = [0.0, 0.0, 2.0, 2.0];
        for (a, b) in spec.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn graph_path_spectrum() {
        let g = Graph::path(2).unwrap();
        let s = crate::models::build_graph_state_hamiltonian(&g).unwrap();
        let spec = full_spectrum(&s).unwrap();
        for (a, b) in spec.iter().zip([0.0, 1.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_weight_edges() {
        let d = EnergyDistribution {
            entries: vec![(0.0, 0.25), (1.0, 0.5), (3.0, 0.25)],
        };
        assert_eq!(tail_weight(&d, 0.0), 1.0);
        assert_eq!(tail_weight(&d, 1.0), 0.75);
        assert_eq!(tail_weight(&d, 4.0), 0.0);
    }
}
