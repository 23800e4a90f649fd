use std::collections::BTreeMap;

use num_complex::Complex64;

use super::pauli::{i_pow, Letter, Phase, PauliString};
use super::state::StateVector;
use crate::error::{Error, Result};

/// Terms with smaller coefficients are dropped on canonicalization.
pub const DROP_TOL: f64 = 1e-14;

/// Weighted sum of Pauli strings, kept in canonical merged form: every
/// string appears once, with phase +1 and the phase folded into the
/// coefficient; terms are ordered by their (X, Z) masks.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator {
    n_sites: usize,
    terms: Vec<(Complex64, PauliString)>,
}

impl LocalOperator {
    pub fn zero(n_sites: usize) -> LocalOperator {
        LocalOperator {
            n_sites,
            terms: Vec::new(),
        }
    }

    pub fn identity(n_sites: usize) -> Result<LocalOperator> {
        LocalOperator::new(
            n_sites,
            vec![(Complex64::new(1.0, 0.0), PauliString::identity(n_sites)?)],
        )
    }

    pub fn from_pauli(c: Complex64, p: PauliString) -> LocalOperator {
        let n = p.n_sites();
        LocalOperator::new(n, vec![(c, p)]).expect("single string always matches its own size")
    }

    pub fn new(
        n_sites: usize,
        terms: impl IntoIterator<Item = (Complex64, PauliString)>,
    ) -> Result<LocalOperator> {
        let mut acc: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for (c, p) in terms {
            if p.n_sites() != n_sites {
                return Err(Error::DimensionMismatch {
                    expected: n_sites,
                    found: p.n_sites(),
                });
            }
            *acc.entry(p.key()).or_default() += c * p.phase().to_complex();
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() >= DROP_TOL)
            .map(|((x, z), c)| {
                let p = PauliString::from_masks(n_sites, x, z, Phase::ONE)
                    .expect("masks came from strings of the same size");
                (c, p)
            })
            .collect();
        Ok(LocalOperator { n_sites, terms })
    }

    /// Convenience for real coefficients.
    pub fn from_real_terms(
        n_sites: usize,
        terms: impl IntoIterator<Item = (f64, PauliString)>,
    ) -> Result<LocalOperator> {
        LocalOperator::new(
            n_sites,
            terms.into_iter().map(|(c, p)| (Complex64::new(c, 0.0), p)),
        )
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest support among the terms (Definition of a q-local operator).
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|(_, p)| p.weight()).max().unwrap_or(0)
    }

    pub fn support_mask(&self) -> u64 {
        self.terms.iter().fold(0, |m, (_, p)| m | p.support_mask())
    }

    pub fn support(&self) -> Vec<usize> {
        super::pauli::bits_of(self.support_mask())
    }

    /// Σ|c|, an upper bound on the operator norm.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm()).sum()
    }

    pub fn add(&self, other: &LocalOperator) -> Result<LocalOperator> {
        LocalOperator::new(
            self.n_sites,
            self.terms.iter().chain(other.terms.iter()).copied(),
        )
    }

    pub fn scaled(&self, s: Complex64) -> LocalOperator {
        LocalOperator::new(self.n_sites, self.terms.iter().map(|&(c, p)| (c * s, p)))
            .expect("same size")
    }

    pub fn compose(&self, other: &LocalOperator) -> Result<LocalOperator> {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(a, p) in &self.terms {
            for &(b, r) in &other.terms {
                out.push((a * b, p.compose(&r)?));
            }
        }
        LocalOperator::new(self.n_sites, out)
    }

    pub fn adjoint(&self) -> LocalOperator {
        // canonical strings are Hermitian, so only coefficients conjugate
        LocalOperator {
            n_sites: self.n_sites,
            terms: self.terms.iter().map(|&(c, p)| (c.conj(), p)).collect(),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|(c, _)| c.im.abs() <= tol)
    }

    pub fn commutator(&self, other: &LocalOperator) -> Result<LocalOperator> {
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        ab.add(&ba.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// The diagonal-free part of a term in basis `b`: for each term,
    /// `c_eff = c · i^{|x&z|}` so that `P|b> = c_eff (−1)^{|z&b|} |b^x>`.
    fn kernel(&self) -> Vec<(Complex64, u64, u64)> {
        self.terms
            .iter()
            .map(|&(c, p)| {
                let k = (p.x_mask() & p.z_mask()).count_ones();
                (c * i_pow(k), p.x_mask(), p.z_mask())
            })
            .collect()
    }

    /// Matrix-free `self · ψ`.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        let mut out = psi.zeros_like();
        self.apply_into(psi, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, psi: &StateVector, out: &mut StateVector) -> Result<()> {
        self.check_state(psi)?;
        psi.check_compatible(out)?;
        apply_kernel(&self.kernel(), psi.amplitudes(), out.amplitudes_mut());
        Ok(())
    }

    /// `<ψ|self|ψ>`.
    pub fn expectation(&self, psi: &StateVector) -> Result<Complex64> {
        let o = self.apply(psi)?;
        psi.inner(&o)
    }

    pub(crate) fn check_state(&self, psi: &StateVector) -> Result<()> {
        if !psi.is_full() {
            return Err(Error::UnsupportedRepresentation("collective-spin"));
        }
        if psi.n_sites() != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: self.n_sites,
                found: psi.n_sites(),
            });
        }
        Ok(())
    }

    /// Real when every matrix element in the computational basis is real.
    pub fn has_real_matrix(&self) -> bool {
        self.kernel().iter().all(|(c, _, _)| c.im == 0.0)
    }

    /// Pauli-term builder for a list of `(site, letter)` pairs.
    pub fn term(n_sites: usize, c: f64, letters: &[(usize, Letter)]) -> Result<LocalOperator> {
        Ok(LocalOperator::from_pauli(
            Complex64::new(c, 0.0),
            PauliString::from_letters(n_sites, letters)?,
        ))
    }
}

pub(crate) fn apply_kernel(kernel: &[(Complex64, u64, u64)], input: &[Complex64], out: &mut [Complex64]) {
    for (b, o) in out.iter_mut().enumerate() {
        let b = b as u64;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(c, x, z) in kernel {
            let src = b ^ x;
            let v = input[src as usize];
            if (z & src).count_ones() & 1 == 1 {
                acc -= c * v;
            } else {
                acc += c * v;
            }
        }
        *o = acc;
    }
}

/// `p · ψ` by bit flips and signs.
pub fn apply_pauli(p: &PauliString, psi: &StateVector) -> Result<StateVector> {
    if !psi.is_full() {
        return Err(Error::UnsupportedRepresentation("collective-spin"));
    }
    if psi.n_sites() != p.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: p.n_sites(),
            found: psi.n_sites(),
        });
    }
    let mut out = psi.zeros_like();
    let amps = psi.amplitudes();
    let dst = out.amplitudes_mut();
    for (b, &a) in amps.iter().enumerate() {
        let k = p.basis_phase_exponent(b as u64);
        dst[b ^ p.x_mask() as usize] = a * i_pow(k);
    }
    Ok(out)
}

pub fn apply_local_operator(o: &LocalOperator, psi: &StateVector) -> Result<StateVector> {
    o.apply(psi)
}
