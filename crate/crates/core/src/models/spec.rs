use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::operator::{LocalOperator, StateVector};

/// Symmetric matrix with bandwidth 2 in the collective-spin `S_z` basis,
/// index `j = m + S`. `off1[j]` couples `j, j+1`; `off2[j]` couples `j, j+2`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedSector {
    pub diag: Vec<f64>,
    pub off1: Vec<f64>,
    pub off2: Vec<f64>,
}

impl BandedSector {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let d = self.diag.len();
        for j in 0..d {
            let mut acc = x[j] * self.diag[j];
            if j + 1 < d {
                acc += x[j + 1] * self.off1[j];
            }
            if j >= 1 {
                acc += x[j - 1] * self.off1[j - 1];
            }
            if j + 2 < d {
                acc += x[j + 2] * self.off2[j];
            }
            if j >= 2 {
                acc += x[j - 2] * self.off2[j - 2];
            }
            y[j] = acc;
        }
    }

    /// Σ of absolute row sums, used as a norm bound.
    pub fn row_sum_bound(&self) -> f64 {
        let d = self.diag.len();
        (0..d)
            .map(|j| {
                let mut s = self.diag[j].abs();
                if j + 1 < d {
                    s += self.off1[j].abs();
                }
                if j >= 1 {
                    s += self.off1[j - 1].abs();
                }
                if j + 2 < d {
                    s += self.off2[j].abs();
                }
                if j >= 2 {
                    s += self.off2[j - 2].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum HamiltonianForm {
    Pauli(LocalOperator),
    CollectiveSpin(BandedSector),
}

/// Lattice information some analyses need beyond the terms themselves.
#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    None,
    Toric { lx: usize, ly: usize, torus: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelMeta {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub boundary: Option<String>,
    pub geometry: Geometry,
}

impl ModelMeta {
    pub fn new(name: &str) -> ModelMeta {
        ModelMeta {
            name: name.to_string(),
            params: BTreeMap::new(),
            boundary: None,
            geometry: Geometry::None,
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> ModelMeta {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn boundary(mut self, b: &str) -> ModelMeta {
        self.boundary = Some(b.to_string());
        self
    }
}

/// k-local Hamiltonian `H = Σ h_X` with certified locality and strength.
///
/// `offset` is subtracted on application, so a spec shifted by its ground
/// energy has `E_0 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    n_sites: usize,
    form: HamiltonianForm,
    k: usize,
    g: f64,
    offset: f64,
    meta: ModelMeta,
}

impl HamiltonianSpec {
    pub fn from_operator(terms: LocalOperator, meta: ModelMeta) -> Result<HamiltonianSpec> {
        if !terms.is_hermitian(1e-12) {
            return Err(invalid("Hamiltonian terms are not Hermitian"));
        }
        let g = pauli_strength(&terms);
        Ok(HamiltonianSpec {
            n_sites: terms.n_sites(),
            k: terms.locality(),
            g,
            form: HamiltonianForm::Pauli(terms),
            offset: 0.0,
            meta,
        })
    }

    pub(crate) fn collective(
        n_sites: usize,
        sector: BandedSector,
        k: usize,
        g: f64,
        meta: ModelMeta,
    ) -> HamiltonianSpec {
        HamiltonianSpec {
            n_sites,
            form: HamiltonianForm::CollectiveSpin(sector),
            k,
            g,
            offset: 0.0,
            meta,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn form(&self) -> &HamiltonianForm {
        &self.form
    }

    /// Pauli terms, when the spec is in Pauli form.
    pub fn terms(&self) -> Option<&LocalOperator> {
        match &self.form {
            HamiltonianForm::Pauli(o) => Some(o),
            HamiltonianForm::CollectiveSpin(_) => None,
        }
    }

    pub fn pauli_terms(&self) -> Result<&LocalOperator> {
        self.terms()
            .ok_or(Error::UnsupportedRepresentation("collective-spin"))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn meta(&self) -> &ModelMeta {
        &self.meta
    }

    pub fn name(&self) -> &str {
        &self.meta.name
    }

    pub fn is_collective(&self) -> bool {
        matches!(self.form, HamiltonianForm::CollectiveSpin(_))
    }

    /// Hilbert-space dimension the spec acts on.
    pub fn dim(&self) -> usize {
        match &self.form {
            HamiltonianForm::Pauli(_) => 1usize << self.n_sites,
            HamiltonianForm::CollectiveSpin(b) => b.dim(),
        }
    }

    /// Copy whose spectrum is shifted down by `e0`.
    pub fn shifted(&self, e0: f64) -> HamiltonianSpec {
        let mut s = self.clone();
        s.offset = e0;
        s
    }

    /// `Σ|c| + |offset|`, an upper bound on `‖H − offset‖`.
    pub fn triangle_norm(&self) -> f64 {
        let base = match &self.form {
            HamiltonianForm::Pauli(o) => o.coefficient_l1(),
            HamiltonianForm::CollectiveSpin(b) => b.row_sum_bound(),
        };
        base + self.offset.abs()
    }

    pub fn zero_state(&self) -> Result<StateVector> {
        match &self.form {
            HamiltonianForm::Pauli(_) => StateVector::zeros(self.n_sites),
            HamiltonianForm::CollectiveSpin(b) => {
                StateVector::collective(self.n_sites, vec![Complex64::new(0.0, 0.0); b.dim()])
            }
        }
    }

    fn check(&self, psi: &StateVector) -> Result<()> {
        let ok = match &self.form {
            HamiltonianForm::Pauli(_) => psi.is_full() && psi.n_sites() == self.n_sites,
            HamiltonianForm::CollectiveSpin(b) => !psi.is_full() && psi.dim() == b.dim(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            })
        }
    }

    /// `(H − offset)|ψ>`.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.check(psi)?;
        let mut out = psi.zeros_like();
        self.apply_raw(psi.amplitudes(), out.amplitudes_mut());
        Ok(out)
    }

    /// Slice-level kernel used by the iterative solvers.
    pub(crate) fn apply_raw(&self, x: &[Complex64], y: &mut [Complex64]) {
        match &self.form {
            HamiltonianForm::Pauli(o) => {
                let kernel: Vec<(Complex64, u64, u64)> = o
                    .terms()
                    .iter()
                    .map(|&(c, p)| {
                        let k = (p.x_mask() & p.z_mask()).count_ones();
                        (c * crate::operator::pauli::i_pow(k), p.x_mask(), p.z_mask())
                    })
                    .collect();
                crate::operator::local::apply_kernel(&kernel, x, y);
            }
            HamiltonianForm::CollectiveSpin(b) => b.apply(x, y),
        }
        if self.offset != 0.0 {
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi -= xi * self.offset;
            }
        }
    }

    /// `<ψ|H − offset|ψ>` (real part).
    pub fn energy(&self, psi: &StateVector) -> Result<f64> {
        Ok(psi.inner(&self.apply(psi)?)?.re)
    }

    /// Two-site terms grouped by unordered site pair.
    pub fn bonds(&self) -> Result<BTreeMap<(usize, usize), LocalOperator>> {
        let o = self.pauli_terms()?;
        let mut out: BTreeMap<(usize, usize), Vec<(Complex64, crate::operator::PauliString)>> =
            BTreeMap::new();
        for &(c, p) in o.terms() {
            if p.weight() > 2 {
                return Err(invalid("spec has terms acting on more than two sites"));
            }
            if p.weight() == 2 {
                let s = p.support();
                out.entry((s[0], s[1])).or_default().push((c, p));
            }
        }
        out.into_iter()
            .map(|(k, v)| Ok((k, LocalOperator::new(self.n_sites, v)?)))
            .collect()
    }

    /// Recomputes g from the stored representation.
    pub fn recompute_g(&self) -> f64 {
        match &self.form {
            HamiltonianForm::Pauli(o) => pauli_strength(o),
            HamiltonianForm::CollectiveSpin(_) => self.g,
        }
    }
}

/// max over sites of Σ |c| over the non-identity terms touching the site.
pub fn pauli_strength(o: &LocalOperator) -> f64 {
    let mut per_site = vec![0.0f64; o.n_sites()];
    for (c, p) in o.terms() {
        for s in p.support() {
            per_site[s] += c.norm();
        }
    }
    per_site.into_iter().fold(0.0, f64::max)
}

pub fn interaction_strength_g(spec: &HamiltonianSpec) -> f64 {
    spec.recompute_g()
}
