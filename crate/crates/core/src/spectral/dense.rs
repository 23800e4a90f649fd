use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::{HamiltonianForm, HamiltonianSpec};
use crate::operator::dense::DENSE_LIMIT;
use crate::operator::{to_dense, to_dense_real, StateVector};

#[derive(Clone, Debug)]
enum Vectors {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

/// Full eigendecomposition of `H − offset`, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    vectors: Vectors,
    n_sites: usize,
    collective: bool,
}

fn check_dim(spec: &HamiltonianSpec) -> Result<()> {
    if spec.dim() > 1usize << DENSE_LIMIT {
        return Err(Error::DimensionLimit {
            what: "dense eigensolver dimension",
            requested: spec.dim(),
            limit: 1usize << DENSE_LIMIT,
        });
    }
    Ok(())
}

fn collective_dense(b: &crate::models::BandedSector) -> DMatrix<f64> {
    let d = b.dim();
    let mut m = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        m[(j, j)] = b.diag[j];
        if j + 1 < d {
            m[(j, j + 1)] = b.off1[j];
            m[(j + 1, j)] = b.off1[j];
        }
        if j + 2 < d {
            m[(j, j + 2)] = b.off2[j];
            m[(j + 2, j)] = b.off2[j];
        }
    }
    m
}

/// Real dense matrix of `H − offset` when it has one.
pub fn dense_real_matrix(spec: &HamiltonianSpec) -> Result<Option<DMatrix<f64>>> {
    check_dim(spec)?;
    let mut m = match spec.form() {
        HamiltonianForm::Pauli(o) => match to_dense_real(o)? {
            Some(m) => m,
            None => return Ok(None),
        },
        HamiltonianForm::CollectiveSpin(b) => collective_dense(b),
    };
    for i in 0..m.nrows() {
        m[(i, i)] -= spec.offset();
    }
    Ok(Some(m))
}

pub fn dense_matrix(spec: &HamiltonianSpec) -> Result<DMatrix<Complex64>> {
    check_dim(spec)?;
    let mut m = match spec.form() {
        HamiltonianForm::Pauli(o) => to_dense(o)?,
        HamiltonianForm::CollectiveSpin(b) => collective_dense(b).map(|x| Complex64::new(x, 0.0)),
    };
    for i in 0..m.nrows() {
        m[(i, i)] -= Complex64::new(spec.offset(), 0.0);
    }
    Ok(m)
}

fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx
}

impl Eigensystem {
    pub fn new(spec: &HamiltonianSpec) -> Result<Eigensystem> {
        let collective = spec.is_collective();
        if let Some(m) = dense_real_matrix(spec)? {
            let e = SymmetricEigen::new(m);
            let vals: Vec<f64> = e.eigenvalues.iter().copied().collect();
            let order = sorted_order(&vals);
            let vecs = e.eigenvectors.select_columns(&order);
            return Ok(Eigensystem {
                values: order.iter().map(|&i| vals[i]).collect(),
                vectors: Vectors::Real(vecs),
                n_sites: spec.n_sites(),
                collective,
            });
        }
        let m = dense_matrix(spec)?;
        let e = SymmetricEigen::new(m);
        let vals: Vec<f64> = e.eigenvalues.iter().copied().collect();
        let order = sorted_order(&vals);
        let vecs = e.eigenvectors.select_columns(&order);
        Ok(Eigensystem {
            values: order.iter().map(|&i| vals[i]).collect(),
            vectors: Vectors::Complex(vecs),
            n_sites: spec.n_sites(),
            collective,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Result<StateVector> {
        let amps: Vec<Complex64> = match &self.vectors {
            Vectors::Real(v) => v.column(k).iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Vectors::Complex(v) => v.column(k).iter().copied().collect(),
        };
        if self.collective {
            StateVector::collective(self.n_sites, amps)
        } else {
            StateVector::from_amplitudes(self.n_sites, amps)
        }
    }

    /// Expansion coefficients `<E_k|φ>`.
    pub fn coefficients(&self, phi: &StateVector) -> Result<Vec<Complex64>> {
        if phi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: phi.dim(),
            });
        }
        let a = phi.amplitudes();
        let d = self.dim();
        Ok(match &self.vectors {
            Vectors::Real(v) => (0..d)
                .map(|k| {
                    let col = v.column(k);
                    let mut s = Complex64::new(0.0, 0.0);
                    for (x, y) in col.iter().zip(a) {
                        s += y * *x;
                    }
                    s
                })
                .collect(),
            Vectors::Complex(v) => (0..d)
                .map(|k| crate::operator::state::dot(v.column(k).as_slice(), a))
                .collect(),
        })
    }

    /// `Σ_k f(E_k) c_k |E_k>`.
    pub fn apply_function(&self, phi: &StateVector, f: impl Fn(f64) -> f64) -> Result<StateVector> {
        let c = self.coefficients(phi)?;
        let mut out = phi.zeros_like();
        let dst = out.amplitudes_mut();
        for (k, ck) in c.iter().enumerate() {
            let w = ck * f(self.values[k]);
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            match &self.vectors {
                Vectors::Real(v) => {
                    for (o, x) in dst.iter_mut().zip(v.column(k).iter()) {
                        *o += w * *x;
                    }
                }
                Vectors::Complex(v) => {
                    for (o, x) in dst.iter_mut().zip(v.column(k).iter()) {
                        *o += w * x;
                    }
                }
            }
        }
        Ok(out)
    }
}
