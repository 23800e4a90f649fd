//! Commuting-stabilizer Hamiltonians `Σ (I − g_i)/2`: gap 1, energies count
//! violated stabilizers.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::operator::{apply_pauli, Letter, LocalOperator, PauliString, StateVector};

use super::spec::{Geometry, HamiltonianSpec, ModelMeta};

/// Simple undirected graph on `n` vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Graph> {
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(invalid(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(invalid(format!("edge ({a}, {b}) out of range")));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(Graph { n, edges: norm })
    }

    pub fn path(n: usize) -> Result<Graph> {
        Graph::new(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect())
    }

    pub fn ring(n: usize) -> Result<Graph> {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
    }

    /// Complete bipartite graph: vertices `0..a` on one side, `a..a+b` on the other.
    pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph> {
        let mut e = Vec::new();
        for i in 0..a {
            for j in a..a + b {
                e.push((i, j));
            }
        }
        Graph::new(a + b, e)
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }
}

fn stabilizer_hamiltonian(n: usize, gens: &[PauliString], meta: ModelMeta) -> Result<HamiltonianSpec> {
    let mut terms = Vec::with_capacity(gens.len() + 1);
    terms.push((gens.len() as f64 / 2.0, PauliString::identity(n)?));
    for g in gens {
        let sign = if g.phase() == crate::operator::Phase::MINUS_ONE { -1.0 } else { 1.0 };
        terms.push((-0.5 * sign, g.unsigned()));
    }
    HamiltonianSpec::from_operator(LocalOperator::from_real_terms(n, terms)?, meta)
}

/// Graph-state stabilizers `g_i = X_i Π_{j∈N(i)} Z_j`.
pub fn graph_stabilizers(graph: &Graph) -> Result<Vec<PauliString>> {
    (0..graph.n)
        .map(|i| {
            let mut letters = vec![(i, Letter::X)];
            letters.extend(graph.neighbors(i).into_iter().map(|j| (j, Letter::Z)));
            PauliString::from_letters(graph.n, &letters)
        })
        .collect()
}

pub fn build_graph_state_hamiltonian(graph: &Graph) -> Result<HamiltonianSpec> {
    let gens = graph_stabilizers(graph)?;
    let meta = ModelMeta::new("graph_state").param("edges", graph.edges.len() as f64);
    stabilizer_hamiltonian(graph.n, &gens, meta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClusterBoundary {
    /// Boundary letters replaced by identity: unique gapped ground state.
    FixedIdentity,
    /// Boundary stabilizers dropped: four-fold degenerate ground space.
    OpenDegenerate,
}

#[derive(Clone, Debug)]
pub struct ClusterChain {
    pub spec: HamiltonianSpec,
    /// Products of Z over the even and the odd sublattice.
    pub symmetries: Vec<PauliString>,
}

/// Cluster chain with terms `X_{i−1} Z_i X_{i+1}`, shifted so `E_0 = 0`.
pub fn build_cluster_chain(n: usize, boundary: ClusterBoundary) -> Result<ClusterChain> {
    if n < 3 {
        return Err(invalid("cluster chain needs n >= 3"));
    }
    let mut gens = Vec::new();
    if boundary == ClusterBoundary::FixedIdentity {
        gens.push(PauliString::from_letters(n, &[(0, Letter::Z), (1, Letter::X)])?);
    }
    for i in 1..n - 1 {
        gens.push(PauliString::from_letters(
            n,
            &[(i - 1, Letter::X), (i, Letter::Z), (i + 1, Letter::X)],
        )?);
    }
    if boundary == ClusterBoundary::FixedIdentity {
        gens.push(PauliString::from_letters(n, &[(n - 2, Letter::X), (n - 1, Letter::Z)])?);
    }
    let label = match boundary {
        ClusterBoundary::FixedIdentity => "fixed_identity",
        ClusterBoundary::OpenDegenerate => "open_degenerate",
    };
    let spec = stabilizer_hamiltonian(n, &gens, ModelMeta::new("cluster_chain").boundary(label))?;
    let sub = |parity: usize| -> Result<PauliString> {
        let letters: Vec<(usize, Letter)> =
            (parity..n).step_by(2).map(|s| (s, Letter::Z)).collect();
        PauliString::from_letters(n, &letters)
    };
    Ok(ClusterChain {
        spec,
        symmetries: vec![sub(0)?, sub(1)?],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    Torus,
    Planar,
}

/// Direction a logical loop winds around the torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopDirection {
    X,
    Y,
}

/// Edge numbering shared by the star/plaquette builders and the loops.
#[derive(Clone, Copy, Debug)]
struct ToricLattice {
    lx: usize,
    ly: usize,
    torus: bool,
}

impl ToricLattice {
    fn n_qubits(&self) -> usize {
        if self.torus {
            2 * self.lx * self.ly
        } else {
            self.lx * (self.ly + 1) + (self.lx + 1) * self.ly
        }
    }

    /// Horizontal edge from vertex (x, y) to (x+1, y).
    fn h(&self, x: usize, y: usize) -> usize {
        if self.torus {
            (y % self.ly) * self.lx + (x % self.lx)
        } else {
            y * self.lx + x
        }
    }

    /// Vertical edge from vertex (x, y) to (x, y+1).
    fn v(&self, x: usize, y: usize) -> usize {
        if self.torus {
            self.lx * self.ly + (y % self.ly) * self.lx + (x % self.lx)
        } else {
            self.lx * (self.ly + 1) + y * (self.lx + 1) + x
        }
    }

    fn stars(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if self.torus {
            for y in 0..self.ly {
                for x in 0..self.lx {
                    out.push(vec![
                        self.h(x, y),
                        self.h(x + self.lx - 1, y),
                        self.v(x, y),
                        self.v(x, y + self.ly - 1),
                    ]);
                }
            }
        } else {
            for y in 0..=self.ly {
                for x in 0..=self.lx {
                    let mut e = Vec::new();
                    if x < self.lx {
                        e.push(self.h(x, y));
                    }
                    if x > 0 {
                        e.push(self.h(x - 1, y));
                    }
                    if y < self.ly {
                        e.push(self.v(x, y));
                    }
                    if y > 0 {
                        e.push(self.v(x, y - 1));
                    }
                    out.push(e);
                }
            }
        }
        out
    }

    fn plaquettes(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for y in 0..self.ly {
            for x in 0..self.lx {
                out.push(vec![self.h(x, y), self.h(x, y + 1), self.v(x, y), self.v(x + 1, y)]);
            }
        }
        out
    }
}

fn lattice_of(spec: &HamiltonianSpec) -> Result<ToricLattice> {
    match spec.meta().geometry {
        Geometry::Toric { lx, ly, torus } => Ok(ToricLattice { lx, ly, torus }),
        Geometry::None => Err(invalid("spec is not a toric code")),
    }
}

fn uniform_string(n: usize, sites: &[usize], l: Letter) -> Result<PauliString> {
    let mut s = sites.to_vec();
    s.sort_unstable();
    s.dedup();
    let letters: Vec<(usize, Letter)> = s.into_iter().map(|q| (q, l)).collect();
    PauliString::from_letters(n, &letters)
}

/// Maximum number of qubits accepted for the toric code.
pub const TORIC_MAX_QUBITS: usize = 24;

pub fn build_toric_code(lx: usize, ly: usize, topology: Topology) -> Result<HamiltonianSpec> {
    if lx < 2 || ly < 2 {
        return Err(invalid("toric code needs Lx, Ly >= 2"));
    }
    let lat = ToricLattice {
        lx,
        ly,
        torus: topology == Topology::Torus,
    };
    let n = lat.n_qubits();
    if n > TORIC_MAX_QUBITS {
        return Err(Error::DimensionLimit {
            what: "toric code qubits",
            requested: n,
            limit: TORIC_MAX_QUBITS,
        });
    }
    let mut gens = Vec::new();
    for s in lat.stars() {
        gens.push(uniform_string(n, &s, Letter::X)?);
    }
    for p in lat.plaquettes() {
        gens.push(uniform_string(n, &p, Letter::Z)?);
    }
    let mut meta = ModelMeta::new("toric_code")
        .param("Lx", lx as f64)
        .param("Ly", ly as f64)
        .boundary(if lat.torus { "torus" } else { "planar" });
    meta.geometry = Geometry::Toric {
        lx,
        ly,
        torus: lat.torus,
    };
    stabilizer_hamiltonian(n, &gens, meta)
}

/// Star operators, in builder order.
pub fn toric_stars(spec: &HamiltonianSpec) -> Result<Vec<PauliString>> {
    let lat = lattice_of(spec)?;
    lat.stars()
        .iter()
        .map(|s| uniform_string(lat.n_qubits(), s, Letter::X))
        .collect()
}

/// Non-contractible Z loop `T_L` winding in `direction`.
pub fn toric_logical_loop(spec: &HamiltonianSpec, direction: LoopDirection) -> Result<PauliString> {
    let lat = lattice_of(spec)?;
    if !lat.torus {
        return Err(Error::NoLogical);
    }
    let sites: Vec<usize> = match direction {
        LoopDirection::X => (0..lat.lx).map(|x| lat.h(x, 0)).collect(),
        LoopDirection::Y => (0..lat.ly).map(|y| lat.v(0, y)).collect(),
    };
    uniform_string(lat.n_qubits(), &sites, Letter::Z)
}

/// X loop on the dual lattice anticommuting with the Z loop of the same
/// direction and commuting with the other one.
pub fn toric_conjugate_loop(spec: &HamiltonianSpec, direction: LoopDirection) -> Result<PauliString> {
    let lat = lattice_of(spec)?;
    if !lat.torus {
        return Err(Error::NoLogical);
    }
    let sites: Vec<usize> = match direction {
        LoopDirection::X => (0..lat.ly).map(|y| lat.h(0, y)).collect(),
        LoopDirection::Y => (0..lat.lx).map(|x| lat.v(x, 0)).collect(),
    };
    uniform_string(lat.n_qubits(), &sites, Letter::X)
}

/// Orthonormal ground space built from `Π_s (I + A_s)/2 |0…0>` and its
/// images under the conjugate X loops. Returns 4 states on the torus,
/// 1 on the planar patch. The first state has `T_L = +1` for both loops.
pub fn toric_ground_space(spec: &HamiltonianSpec) -> Result<Vec<StateVector>> {
    let lat = lattice_of(spec)?;
    let n = lat.n_qubits();
    let mut psi = StateVector::basis(n, 0)?;
    let half = Complex64::new(0.5, 0.0);
    for s in toric_stars(spec)? {
        let a = apply_pauli(&s, &psi)?;
        psi.axpy(Complex64::new(1.0, 0.0), &a)?;
        psi.scale(half);
    }
    let g00 = psi.normalized()?;
    if !lat.torus {
        return Ok(vec![g00]);
    }
    let xa = toric_conjugate_loop(spec, LoopDirection::X)?;
    let xb = toric_conjugate_loop(spec, LoopDirection::Y)?;
    let g10 = apply_pauli(&xa, &g00)?;
    let g01 = apply_pauli(&xb, &g00)?;
    let g11 = apply_pauli(&xb, &g10)?;
    Ok(vec![g00, g10, g01, g11])
}

/// `Σ_i (I − |ψ_i><ψ_i|)` written as `Σ (I − r_i·σ_i)/2`.
pub fn build_product_state_hamiltonian(states: &[[Complex64; 2]]) -> Result<HamiltonianSpec> {
    let n = states.len();
    if n == 0 {
        return Err(invalid("need at least one site"));
    }
    let mut terms = vec![(n as f64 / 2.0, PauliString::identity(n)?)];
    for (i, [a, b]) in states.iter().enumerate() {
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("site {i} state has norm² {norm}")));
        }
        let ab = a.conj() * b;
        let r = [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()];
        for (l, c) in Letter::NON_IDENTITY.iter().zip(r) {
            terms.push((-0.5 * c, PauliString::single(n, i, *l)?));
        }
    }
    let op = LocalOperator::from_real_terms(n, terms)?;
    HamiltonianSpec::from_operator(op, ModelMeta::new("product"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_path_stabilizers() {
        let g = Graph::path(2).unwrap();
        let s = graph_stabilizers(&g).unwrap();
        assert_eq!(s[0].to_string(), "X0 Z1");
        assert_eq!(s[1].to_string(), "Z0 X1");
    }

    #[test]
    fn self_loop_rejected() {
        assert!(Graph::new(3, vec![(1, 1)]).is_err());
    }

    #[test]
    fn stabilizer_support_is_degree_plus_one() {
        let g = Graph::new(5, vec![(0, 1), (0, 2), (0, 3), (3, 4)]).unwrap();
        let max = graph_stabilizers(&g).unwrap().iter().map(|p| p.weight()).max();
        assert_eq!(max, Some(4));
        let spec = build_graph_state_hamiltonian(&g).unwrap();
        assert_eq!(spec.k(), 4);
    }

    #[test]
    fn toric_terms_commute_and_loop_has_lattice_length() {
        let spec = build_toric_code(2, 2, Topology::Torus).unwrap();
        assert_eq!(spec.n_sites(), 8);
        assert_eq!(spec.k(), 4);
        assert!((spec.g() - 2.0).abs() < 1e-12);
        let terms = spec.terms().unwrap().terms();
        for (_, a) in terms {
            for (_, b) in terms {
                assert!(a.commutes_with(b));
            }
        }
        let t = toric_logical_loop(&spec, LoopDirection::X).unwrap();
        assert_eq!(t.weight(), 2);
        let x = toric_conjugate_loop(&spec, LoopDirection::X).unwrap();
        assert!(!t.commutes_with(&x));
        for (_, p) in terms {
            assert!(t.commutes_with(p) && x.commutes_with(p));
        }
    }

    #[test]
    fn planar_patch_has_no_logical() {
        let spec = build_toric_code(2, 2, Topology::Planar).unwrap();
        assert_eq!(spec.n_sites(), 12);
        assert!(matches!(
            toric_logical_loop(&spec, LoopDirection::X),
            Err(Error::NoLogical)
        ));
    }

    #[test]
    fn cluster_symmetries_commute_in_open_chain() {
        let c = build_cluster_chain(6, ClusterBoundary::OpenDegenerate).unwrap();
        for (_, p) in c.spec.terms().unwrap().terms() {
            for s in &c.symmetries {
                assert!(s.commutes_with(p));
            }
        }
    }

    #[test]
    fn unnormalized_site_state_rejected() {
        let bad = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(build_product_state_hamiltonian(&[bad]).is_err());
    }
}
