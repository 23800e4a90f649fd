//! Deflated Lanczos with full reorthogonalization.
//!
//! Eigenpairs are found one at a time; every Krylov vector is kept
//! orthogonal to the pairs already converged, so exactly degenerate
//! levels (stabilizer models) are resolved one copy per pass.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::models::states::gaussian;
use crate::operator::state::dot;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub struct LanczosOptions {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Convergence on `‖Hx − θx‖`, absolute.
    pub tol: f64,
    pub seed: u64,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            if c != ZERO {
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
    }
}

/// Lowest eigenpair of `apply` restricted to the orthogonal complement of
/// `deflate`. Returns `(θ, x, residual)`.
pub fn lowest_eigenpair(
    apply: &dyn Fn(&[Complex64], &mut [Complex64]),
    dim: usize,
    deflate: &[Vec<Complex64>],
    opts: &LanczosOptions,
) -> Result<(f64, Vec<Complex64>, f64)> {
    if deflate.len() >= dim {
        return Err(Error::NotConverged("deflation space fills the whole space".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(deflate.len() as u64);
    let mut start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(gaussian(&mut rng), gaussian(&mut rng)))
        .collect();
    let m_max = opts.krylov_dim.min(dim - deflate.len()).max(1);
    let mut last_res = f64::INFINITY;
    let mut hx = vec![ZERO; dim];
    for _restart in 0..=opts.max_restarts {
        project_out(&mut start, deflate);
        let n0 = norm(&start);
        if !(n0 > 0.0) {
            return Err(Error::NotConverged("start vector vanished after deflation".into()));
        }
        let mut v: Vec<Vec<Complex64>> = Vec::with_capacity(m_max);
        v.push(start.iter().map(|a| a / n0).collect());
        let mut alpha = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        let mut w = vec![ZERO; dim];
        loop {
            let j = v.len() - 1;
            apply(&v[j], &mut w);
            let a = dot(&v[j], &w).re;
            alpha.push(a);
            project_out(&mut w, deflate);
            project_out(&mut w, &v);
            let b = norm(&w);
            let exhausted = b <= 1e-13 * (a.abs() + 1.0);
            if v.len() >= m_max || exhausted {
                beta.push(b);
                break;
            }
            beta.push(b);
            v.push(w.iter().map(|x| x / b).collect());
        }
        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let e = SymmetricEigen::new(t);
        let (imin, _) = e
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        let s = e.eigenvectors.column(imin);
        let mut x = vec![ZERO; dim];
        for (k, vk) in v.iter().enumerate() {
            let c = s[k];
            for (xi, vi) in x.iter_mut().zip(vk) {
                *xi += vi * c;
            }
        }
        project_out(&mut x, deflate);
        let nx = norm(&x);
        for xi in &mut x {
            *xi /= nx;
        }
        apply(&x, &mut hx);
        let theta = dot(&x, &hx).re;
        let res = hx
            .iter()
            .zip(&x)
            .map(|(h, xi)| (h - xi * theta).norm_sqr())
            .sum::<f64>()
            .sqrt();
        last_res = res;
        if res <= opts.tol {
            return Ok((theta, x, res));
        }
        start = x;
    }
    Err(Error::NotConverged(format!(
        "Lanczos residual {last_res:e} above {:e} after {} restarts",
        opts.tol, opts.max_restarts
    )))
}
