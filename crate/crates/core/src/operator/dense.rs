use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::local::LocalOperator;
use super::pauli::{gather, i_pow, scatter};
use super::state::StateVector;
use crate::error::{Error, Result};

/// Hard cap on sites for any dense matrix.
pub const DENSE_LIMIT: usize = 14;
/// Cap for exact operator norms of a restricted support.
pub const NORM_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMode {
    Exact,
    Triangle,
}

fn check_dense(n: usize, limit: usize, what: &'static str) -> Result<()> {
    if n > limit {
        return Err(Error::DimensionLimit {
            what,
            requested: n,
            limit,
        });
    }
    Ok(())
}

/// Dense matrix of `o` restricted to the ordered `sites` (bit `j` of the
/// local index is `sites[j]`).
pub fn restricted_matrix(o: &LocalOperator, sites: &[usize]) -> Result<DMatrix<Complex64>> {
    check_dense(sites.len(), DENSE_LIMIT, "dense matrix sites")?;
    let dim = 1usize << sites.len();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (c, p) in o.terms() {
        let mut covered = 0u64;
        for &s in sites {
            covered |= 1 << s;
        }
        if p.support_mask() & !covered != 0 {
            return Err(crate::error::invalid("operator acts outside the requested sites"));
        }
        for col in 0..dim {
            let b = scatter(col as u64, sites);
            let k = p.basis_phase_exponent(b);
            let row = gather(b ^ p.x_mask(), sites) as usize;
            m[(row, col)] += c * i_pow(k);
        }
    }
    Ok(m)
}

/// Full `2^n × 2^n` matrix in the computational basis.
pub fn to_dense(o: &LocalOperator) -> Result<DMatrix<Complex64>> {
    let sites: Vec<usize> = (0..o.n_sites()).collect();
    restricted_matrix(o, &sites)
}

/// Real dense matrix; `None` when some element has an imaginary part.
pub fn to_dense_real(o: &LocalOperator) -> Result<Option<DMatrix<f64>>> {
    if !o.has_real_matrix() {
        return Ok(None);
    }
    let m = to_dense(o)?;
    Ok(Some(m.map(|c| c.re)))
}

pub fn operator_norm(o: &LocalOperator, mode: NormMode) -> Result<f64> {
    match mode {
        NormMode::Triangle => Ok(o.coefficient_l1()),
        NormMode::Exact => {
            if o.terms().len() == 1 {
                return Ok(o.terms()[0].0.norm());
            }
            let sites = o.support();
            check_dense(sites.len(), NORM_LIMIT, "exact norm support")?;
            let m = restricted_matrix(o, &sites)?;
            Ok(spectral_norm(m))
        }
    }
}

/// Largest singular value.
pub fn spectral_norm(m: DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let h = m.adjoint() * &m;
    let e = nalgebra::SymmetricEigen::new(h);
    e.eigenvalues.iter().cloned().fold(0.0f64, f64::max).max(0.0).sqrt()
}

pub fn state_to_dvector(psi: &StateVector) -> DVector<Complex64> {
    DVector::from_column_slice(psi.amplitudes())
}
