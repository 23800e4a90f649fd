use rand::Rng;

use crate::error::Result;
use crate::operator::{Letter, LocalOperator, PauliString};

use super::spec::{HamiltonianSpec, ModelMeta};
use super::states::gaussian;

/// Random 2-local Hamiltonian: every single-site string and every two-site
/// string on `n_bonds` random site pairs gets a Gaussian coefficient.
pub fn random_two_local<R: Rng>(n: usize, n_bonds: usize, rng: &mut R) -> Result<HamiltonianSpec> {
    let mut terms = Vec::new();
    for i in 0..n {
        for l in Letter::NON_IDENTITY {
            terms.push((0.5 * gaussian(rng), PauliString::single(n, i, l)?));
        }
    }
    for _ in 0..n_bonds {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        for la in Letter::NON_IDENTITY {
            for lb in Letter::NON_IDENTITY {
                let p = PauliString::from_letters(n, &[(a, la), (b, lb)])?;
                terms.push((0.5 * gaussian(rng), p));
            }
        }
    }
    let op = LocalOperator::from_real_terms(n, terms)?;
    HamiltonianSpec::from_operator(op, ModelMeta::new("random_two_local").param("bonds", n_bonds as f64))
}
