use crate::error::{invalid, Result};
use crate::operator::{Letter, LocalOperator, PauliString};

use super::spec::{HamiltonianSpec, ModelMeta};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

impl Boundary {
    pub fn label(self) -> &'static str {
        match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        }
    }
}

/// `H = −J Σ Z_i Z_{i+1} − h Σ X_i`.
pub fn build_transverse_ising(n: usize, j: f64, h: f64, boundary: Boundary) -> Result<HamiltonianSpec> {
    if n < 2 {
        return Err(invalid("transverse Ising chain needs n >= 2"));
    }
    let mut terms = Vec::new();
    let bonds = match boundary {
        Boundary::Open => n - 1,
        Boundary::Periodic => n,
    };
    for i in 0..bonds {
        let p = PauliString::from_letters(n, &[(i, Letter::Z), ((i + 1) % n, Letter::Z)])?;
        terms.push((-j, p));
    }
    for i in 0..n {
        terms.push((-h, PauliString::single(n, i, Letter::X)?));
    }
    let op = LocalOperator::from_real_terms(n, terms)?;
    let meta = ModelMeta::new("transverse_ising")
        .param("J", j)
        .param("h", h)
        .boundary(boundary.label());
    HamiltonianSpec::from_operator(op, meta)
}

/// Two-body Hamiltonian on an arbitrary edge list:
/// `H = −(J/Z) Σ_{(i,j)} Z_i Z_j − h Σ X_i`, with `Z` the given coordination.
pub fn build_ising_graph(
    n: usize,
    edges: &[(usize, usize)],
    j: f64,
    h: f64,
    coordination: f64,
) -> Result<HamiltonianSpec> {
    if coordination <= 0.0 {
        return Err(invalid("coordination must be positive"));
    }
    let mut terms = Vec::new();
    for &(a, b) in edges {
        if a == b || a >= n || b >= n {
            return Err(invalid(format!("bad edge ({a}, {b})")));
        }
        let p = PauliString::from_letters(n, &[(a, Letter::Z), (b, Letter::Z)])?;
        terms.push((-j / coordination, p));
    }
    for i in 0..n {
        terms.push((-h, PauliString::single(n, i, Letter::X)?));
    }
    let op = LocalOperator::from_real_terms(n, terms)?;
    let meta = ModelMeta::new("ising_graph")
        .param("J", j)
        .param("h", h)
        .param("Z", coordination);
    HamiltonianSpec::from_operator(op, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strength_of_periodic_chain() {
        let s = build_transverse_ising(8, 1.0, 2.0, Boundary::Periodic).unwrap();
        assert_eq!(s.k(), 2);
        assert!((s.g() - 4.0).abs() < 1e-12);
        let s = build_transverse_ising(4, 1.0, 1.0, Boundary::Periodic).unwrap();
        assert!((s.g() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn short_chain_rejected() {
        assert!(build_transverse_ising(1, 1.0, 1.0, Boundary::Open).is_err());
    }
}
