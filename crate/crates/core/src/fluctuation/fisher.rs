//! Fisher information `F(ψ, A) = 4(ΔA)²` and a certified bracket on the
//! effective size `N_eff = max_A F/(4N)` over additive `A`.
//!
//! For `a_i = a0 I + v_i·σ` the variance is `vᵀ C v` with `C` the connected
//! correlation matrix of the `3N` Pauli operators and `|v_i| ≤ 1`. Any
//! feasible `v` gives a lower bound; `λ_max(C)` is an upper bound because
//! `|v|² ≤ N`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{additive_moments, AdditiveOperator};
use crate::error::{Error, Result};
use crate::models::states::random_unit3;
use crate::operator::{apply_pauli, Letter, PauliString, Representation, StateVector};

#[derive(Clone, Debug)]
pub struct FisherOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for FisherOptions {
    fn default() -> Self {
        FisherOptions {
            restarts: 16,
            max_iter: 2000,
            seed: 0xf15e,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FisherReport {
    pub n: usize,
    /// `F(ψ, A)` for the supplied `A`.
    pub fisher: Option<f64>,
    /// `F(ψ, A)/(4N)` for the supplied `A`.
    pub neff_of_a: Option<f64>,
    /// Best `F/(4N)` found by ascent.
    pub lower: f64,
    /// `λ_max(C)`.
    pub upper: f64,
    /// Bloch vectors achieving `lower`.
    pub best_bloch: Vec<[f64; 3]>,
}

/// Connected correlation matrix `C[(i,a),(j,b)] = Re⟨σ_i^a σ_j^b⟩ − ⟨σ_i^a⟩⟨σ_j^b⟩`.
pub fn correlation_matrix(psi: &StateVector) -> Result<DMatrix<f64>> {
    if let Representation::CollectiveSpin { .. } = psi.representation() {
        return Err(Error::UnsupportedRepresentation("collective-spin"));
    }
    let n = psi.n_sites();
    let d = psi.dim();
    let mut images = DMatrix::<Complex64>::zeros(d, 3 * n);
    let mut r = DVector::<f64>::zeros(3 * n);
    let base = DVector::from_column_slice(psi.amplitudes());
    for i in 0..n {
        for (a, l) in [Letter::X, Letter::Y, Letter::Z].into_iter().enumerate() {
            let img = apply_pauli(&PauliString::single(n, i, l)?, psi)?;
            let col = 3 * i + a;
            images.column_mut(col).copy_from_slice(img.amplitudes());
            r[col] = base.dotc(&images.column(col)).re;
        }
    }
    let g = images.ad_mul(&images);
    Ok(DMatrix::from_fn(3 * n, 3 * n, |p, q| g[(p, q)].re - r[p] * r[q]))
}

fn quad(c: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    v.dot(&(c * v))
}

/// Minorize–maximize ascent of the convex `vᵀCv` over products of unit
/// balls: each step maximizes the linearization, `v_i ← (Cv)_i/|(Cv)_i|`,
/// which never decreases the objective.
fn ascend(c: &DMatrix<f64>, mut v: DVector<f64>, max_iter: usize) -> (f64, DVector<f64>) {
    let n = v.len() / 3;
    let mut f = quad(c, &v);
    for _ in 0..max_iter {
        let w = c * &v;
        let mut next = v.clone();
        for i in 0..n {
            let b = w.rows(3 * i, 3);
            let nb = b.norm();
            if nb > 1e-14 {
                next.rows_mut(3 * i, 3).copy_from(&(b / nb));
            }
        }
        let fn_ = quad(c, &next);
        let improved = fn_ - f;
        if fn_ >= f {
            v = next;
            f = fn_;
        }
        if improved <= 1e-13 * f.abs().max(1.0) {
            break;
        }
    }
    (f, v)
}

fn normalize_blocks(v: &mut DVector<f64>, rng: &mut ChaCha8Rng) {
    for i in 0..v.len() / 3 {
        let nb = v.rows(3 * i, 3).norm();
        if nb > 1e-12 {
            let b = v.rows(3 * i, 3) / nb;
            v.rows_mut(3 * i, 3).copy_from(&b);
        } else {
            let u = random_unit3(rng);
            v.rows_mut(3 * i, 3).copy_from_slice(&u);
        }
    }
}

pub fn fisher_neff(psi: &StateVector, a: Option<&AdditiveOperator>, opts: &FisherOptions) -> Result<FisherReport> {
    let n = psi.n_sites();
    let (fisher, neff_of_a) = match a {
        Some(a) => {
            let (_, var) = additive_moments(a, psi)?;
            (Some(4.0 * var), Some(var / n as f64))
        }
        None => (None, None),
    };
    let c = correlation_matrix(psi)?;
    let eig = SymmetricEigen::new(c.clone());
    let top = eig.eigenvalues.imax();
    let upper = eig.eigenvalues[top];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = Vec::with_capacity(opts.restarts + 1);
    let mut v0 = eig.eigenvectors.column(top).clone_owned();
    normalize_blocks(&mut v0, &mut rng);
    starts.push(v0);
    for _ in 0..opts.restarts {
        let mut v = DVector::zeros(3 * n);
        normalize_blocks(&mut v, &mut rng);
        starts.push(v);
    }
    let (best_f, best_v) = starts
        .into_iter()
        .map(|v| ascend(&c, v, opts.max_iter))
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .expect("at least one start");
    Ok(FisherReport {
        n,
        fisher,
        neff_of_a,
        lower: best_f / n as f64,
        upper,
        best_bloch: (0..n)
            .map(|i| [best_v[3 * i], best_v[3 * i + 1], best_v[3 * i + 2]])
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_special_state, SpecialState};

    #[test]
    fn ghz_reaches_n() {
        let g = make_special_state(&SpecialState::Ghz(6)).unwrap();
        let a = AdditiveOperator::pauli_sum(6, &(0..6).collect::<Vec<_>>(), Letter::Z).unwrap();
        let r = fisher_neff(&g, Some(&a), &FisherOptions::default()).unwrap();
        assert!((r.fisher.unwrap() - 144.0).abs() < 1e-9);
        assert!((r.neff_of_a.unwrap() - 6.0).abs() < 1e-9);
        assert!(r.lower >= 6.0 - 1e-9 && r.upper <= 6.0 + 1e-9);
    }

    #[test]
    fn product_state_is_size_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sites: Vec<_> = (0..5).map(|_| crate::models::states::random_site_state(&mut rng)).collect();
        let p = StateVector::product(&sites).unwrap();
        let r = fisher_neff(&p, None, &FisherOptions::default()).unwrap();
        assert!(r.upper <= 1.0 + 1e-9, "{}", r.upper);
        assert!((r.lower - 1.0).abs() < 1e-9, "{}", r.lower);
    }
}
