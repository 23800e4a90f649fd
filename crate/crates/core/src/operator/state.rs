use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// How the amplitude array is indexed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    /// Computational basis over `2^n` bit strings, site 0 = lowest bit.
    Full,
    /// Maximal-spin sector of a collective spin, indexed by `m + S`.
    CollectiveSpin { sector_dim: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<Complex64>,
    repr: Representation,
}

/// Largest number of sites for which a full state vector is allocated.
pub const MAX_FULL_SITES: usize = 26;

impl StateVector {
    pub fn zeros(n_sites: usize) -> Result<StateVector> {
        if n_sites == 0 || n_sites > MAX_FULL_SITES {
            return Err(Error::DimensionLimit {
                what: "full state vector sites",
                requested: n_sites,
                limit: MAX_FULL_SITES,
            });
        }
        Ok(StateVector {
            n_sites,
            amps: vec![ZERO; 1usize << n_sites],
            repr: Representation::Full,
        })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_sites: usize, index: usize) -> Result<StateVector> {
        let mut s = StateVector::zeros(n_sites)?;
        if index >= s.amps.len() {
            return Err(invalid(format!("basis index {index} out of range")));
        }
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(n_sites: usize, amps: Vec<Complex64>) -> Result<StateVector> {
        if n_sites == 0 || n_sites > MAX_FULL_SITES {
            return Err(Error::DimensionLimit {
                what: "full state vector sites",
                requested: n_sites,
                limit: MAX_FULL_SITES,
            });
        }
        if amps.len() != 1usize << n_sites {
            return Err(Error::DimensionMismatch {
                expected: 1usize << n_sites,
                found: amps.len(),
            });
        }
        Ok(StateVector {
            n_sites,
            amps,
            repr: Representation::Full,
        })
    }

    pub fn from_real(n_sites: usize, amps: &[f64]) -> Result<StateVector> {
        StateVector::from_amplitudes(n_sites, amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// State in the `(n_sites + 1)`-dimensional collective-spin sector.
    pub fn collective(n_sites: usize, amps: Vec<Complex64>) -> Result<StateVector> {
        if amps.len() != n_sites + 1 {
            return Err(Error::DimensionMismatch {
                expected: n_sites + 1,
                found: amps.len(),
            });
        }
        Ok(StateVector {
            n_sites,
            repr: Representation::CollectiveSpin {
                sector_dim: amps.len(),
            },
            amps,
        })
    }

    /// Tensor product of single-site states, site 0 first.
    pub fn product(sites: &[[Complex64; 2]]) -> Result<StateVector> {
        let n = sites.len();
        let mut s = StateVector::zeros(n)?;
        for (b, a) in s.amps.iter_mut().enumerate() {
            let mut v = Complex64::new(1.0, 0.0);
            for (j, site) in sites.iter().enumerate() {
                v *= site[(b >> j) & 1];
            }
            *a = v;
        }
        Ok(s)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn is_full(&self) -> bool {
        self.repr == Representation::Full
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// Same shape, new amplitudes.
    pub fn with_amplitudes(&self, amps: Vec<Complex64>) -> Result<StateVector> {
        if amps.len() != self.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                found: amps.len(),
            });
        }
        Ok(StateVector {
            n_sites: self.n_sites,
            amps,
            repr: self.repr,
        })
    }

    pub fn zeros_like(&self) -> StateVector {
        StateVector {
            n_sites: self.n_sites,
            amps: vec![ZERO; self.amps.len()],
            repr: self.repr,
        }
    }

    pub fn check_compatible(&self, other: &StateVector) -> Result<()> {
        if self.repr != other.repr || self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                found: other.amps.len(),
            });
        }
        Ok(())
    }

    /// `<self|other>`, conjugating the first argument.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok(dot(&self.amps, &other.amps))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Returns the norm before normalization.
    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        let inv = 1.0 / n;
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(n)
    }

    pub fn normalized(mut self) -> Result<StateVector> {
        self.normalize()?;
        Ok(self)
    }

    pub fn scale(&mut self, c: Complex64) {
        for a in &mut self.amps {
            *a *= c;
        }
    }

    pub fn scaled(mut self, c: Complex64) -> StateVector {
        self.scale(c);
        self
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: Complex64, other: &StateVector) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &StateVector) -> Result<StateVector> {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other)?;
        Ok(out)
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// True when every amplitude is real after removing one global phase.
    pub fn real_up_to_phase(&self, tol: f64) -> Option<Complex64> {
        let (_, pivot) = self
            .amps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))?;
        if pivot.norm() == 0.0 {
            return Some(Complex64::new(1.0, 0.0));
        }
        let ph = pivot / pivot.norm();
        let scale = self.norm().max(1e-300);
        let ok = self
            .amps
            .iter()
            .all(|a| (a * ph.conj()).im.abs() <= tol * scale);
        ok.then_some(ph)
    }
}

pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut s = ZERO;
    for (x, y) in a.iter().zip(b) {
        s += x.conj() * y;
    }
    s
}

pub fn inner(psi: &StateVector, phi: &StateVector) -> Result<Complex64> {
    psi.inner(phi)
}
