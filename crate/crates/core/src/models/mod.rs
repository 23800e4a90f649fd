//! Hamiltonians and special states with certified locality `k` and
//! interaction strength `g`.

pub mod ising;
pub mod lmg;
pub mod random;
pub mod spec;
pub mod stabilizer;
pub mod states;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use ising::{build_ising_graph, build_transverse_ising, Boundary};
pub use lmg::{build_lmg_pauli, build_lmg_sector};
pub use spec::{
    interaction_strength_g, BandedSector, Geometry, HamiltonianForm, HamiltonianSpec, ModelMeta,
};
pub use stabilizer::{
    build_cluster_chain, build_graph_state_hamiltonian, build_product_state_hamiltonian,
    build_toric_code, toric_conjugate_loop, toric_ground_space, toric_logical_loop,
    ClusterBoundary, ClusterChain, Graph, LoopDirection, Topology,
};
pub use states::{make_special_state, SpecialState};

/// Catalog row. The expected fields are documentation for tests only.
#[derive(Clone, Debug, Serialize)]
pub struct ModelCatalogEntry {
    pub builder: &'static str,
    pub params: &'static [&'static str],
    pub expected_degeneracy: Option<usize>,
    pub expected_gap: Option<f64>,
}

pub fn catalog() -> Vec<ModelCatalogEntry> {
    vec![
        ModelCatalogEntry {
            builder: "transverse_ising",
            params: &["J", "h"],
            expected_degeneracy: None,
            expected_gap: None,
        },
        ModelCatalogEntry {
            builder: "graph_state",
            params: &["graph", "a"],
            expected_degeneracy: Some(1),
            expected_gap: Some(1.0),
        },
        ModelCatalogEntry {
            builder: "cluster_chain",
            params: &[],
            expected_degeneracy: None,
            expected_gap: Some(1.0),
        },
        ModelCatalogEntry {
            builder: "toric_code",
            params: &["Lx", "Ly"],
            expected_degeneracy: None,
            expected_gap: Some(1.0),
        },
        ModelCatalogEntry {
            builder: "lmg",
            params: &["lambda", "gamma", "h"],
            expected_degeneracy: None,
            expected_gap: None,
        },
        ModelCatalogEntry {
            builder: "lmg_pauli",
            params: &["lambda", "gamma", "h"],
            expected_degeneracy: None,
            expected_gap: None,
        },
        ModelCatalogEntry {
            builder: "product",
            params: &["state", "seed"],
            expected_degeneracy: Some(1),
            expected_gap: Some(1.0),
        },
        ModelCatalogEntry {
            builder: "random_two_local",
            params: &["bonds", "seed"],
            expected_degeneracy: None,
            expected_gap: None,
        },
        ModelCatalogEntry {
            builder: "ising_bipartite",
            params: &["a", "J", "h"],
            expected_degeneracy: None,
            expected_gap: None,
        },
    ]
}

/// `{"model": name, "params": {...}, "n": int, "boundary": string}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub boundary: Option<String>,
}

fn cfg(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ModelConfig {
    fn num(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.params.get(key) {
            Some(v) => v
                .as_f64()
                .ok_or_else(|| cfg(format!("params.{key} must be a number"))),
            None => default.ok_or_else(|| cfg(format!("params.{key} is required"))),
        }
    }

    fn text(&self, key: &str, default: &str) -> Result<String> {
        match self.params.get(key) {
            Some(v) => v
                .as_str()
                .map(str::to_string)
                .ok_or_else(|| cfg(format!("params.{key} must be a string"))),
            None => Ok(default.to_string()),
        }
    }

    fn n(&self) -> Result<usize> {
        self.n.ok_or_else(|| cfg("n is required"))
    }

    fn only(&self, allowed: &[&str]) -> Result<()> {
        for k in self.params.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(cfg(format!("params.{k} is not a parameter of model '{}'", self.model)));
            }
        }
        Ok(())
    }

    fn boundary_or<'a>(&'a self, default: &'a str) -> &'a str {
        self.boundary.as_deref().unwrap_or(default)
    }

    /// Validates without building; catches schema errors before any output.
    pub fn validate(&self) -> Result<()> {
        self.build().map(|_| ())
    }

    pub fn build(&self) -> Result<HamiltonianSpec> {
        let e = |err: Error| match err {
            Error::InvalidArgument(m) => cfg(m),
            other => other,
        };
        match self.model.as_str() {
            "transverse_ising" => {
                self.only(&["J", "h"])?;
                let b = match self.boundary_or("periodic") {
                    "open" => Boundary::Open,
                    "periodic" => Boundary::Periodic,
                    other => return Err(cfg(format!("boundary '{other}' is not open|periodic"))),
                };
                build_transverse_ising(self.n()?, self.num("J", Some(1.0))?, self.num("h", None)?, b)
                    .map_err(e)
            }
            "graph_state" => {
                self.only(&["graph", "a"])?;
                let n = self.n()?;
                let g = match self.text("graph", "ring")?.as_str() {
                    "ring" => Graph::ring(n),
                    "path" => Graph::path(n),
                    "complete_bipartite" => {
                        let a = self.num("a", None)? as usize;
                        Graph::complete_bipartite(a, n.saturating_sub(a))
                    }
                    other => return Err(cfg(format!("params.graph '{other}' is not ring|path|complete_bipartite"))),
                }
                .map_err(e)?;
                build_graph_state_hamiltonian(&g).map_err(e)
            }
            "cluster_chain" => {
                self.only(&[])?;
                let b = match self.boundary_or("fixed_identity") {
                    "fixed_identity" => ClusterBoundary::FixedIdentity,
                    "open_degenerate" => ClusterBoundary::OpenDegenerate,
                    other => {
                        return Err(cfg(format!(
                            "boundary '{other}' is not fixed_identity|open_degenerate"
                        )))
                    }
                };
                Ok(build_cluster_chain(self.n()?, b).map_err(e)?.spec)
            }
            "toric_code" => {
                self.only(&["Lx", "Ly"])?;
                let t = match self.boundary_or("torus") {
                    "torus" => Topology::Torus,
                    "planar" => Topology::Planar,
                    other => return Err(cfg(format!("boundary '{other}' is not torus|planar"))),
                };
                build_toric_code(self.num("Lx", Some(2.0))? as usize, self.num("Ly", Some(2.0))? as usize, t)
                    .map_err(e)
            }
            "lmg" | "lmg_pauli" => {
                self.only(&["lambda", "gamma", "h"])?;
                let n = self.n()?;
                let (l, g, h) = (
                    self.num("lambda", Some(1.0))?,
                    self.num("gamma", Some(0.0))?,
                    self.num("h", Some(1.0))?,
                );
                if self.model == "lmg" {
                    build_lmg_sector(n, l, g, h).map_err(e)
                } else {
                    build_lmg_pauli(n, l, g, h).map_err(e)
                }
            }
            "product" => {
                self.only(&["state", "seed"])?;
                let n = self.n()?;
                let zero = [num_complex::Complex64::new(1.0, 0.0), num_complex::Complex64::new(0.0, 0.0)];
                let r = std::f64::consts::FRAC_1_SQRT_2;
                let plus = [num_complex::Complex64::new(r, 0.0), num_complex::Complex64::new(r, 0.0)];
                let sites = match self.text("state", "zero")?.as_str() {
                    "zero" => vec![zero; n],
                    "plus" => vec![plus; n],
                    "random" => {
                        let mut rng = ChaCha8Rng::seed_from_u64(self.num("seed", Some(0.0))? as u64);
                        (0..n).map(|_| states::random_site_state(&mut rng)).collect()
                    }
                    other => return Err(cfg(format!("params.state '{other}' is not zero|plus|random"))),
                };
                build_product_state_hamiltonian(&sites).map_err(e)
            }
            "ising_bipartite" => {
                self.only(&["a", "J", "h"])?;
                let n = self.n()?;
                let a = self.num("a", None)? as usize;
                let g = Graph::complete_bipartite(a, n.saturating_sub(a)).map_err(e)?;
                let z = a.max(n - a) as f64;
                build_ising_graph(n, &g.edges, self.num("J", Some(1.0))?, self.num("h", Some(2.0))?, z)
                    .map_err(e)
            }
            "random_two_local" => {
                self.only(&["bonds", "seed"])?;
                let n = self.n()?;
                let bonds = self.num("bonds", Some(n as f64))? as usize;
                let mut rng = ChaCha8Rng::seed_from_u64(self.num("seed", Some(0.0))? as u64);
                random::random_two_local(n, bonds, &mut rng).map_err(e)
            }
            other => Err(cfg(format!("unknown model '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> ModelConfig {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn builds_ising_from_config() {
        let c = parse(r#"{"model":"transverse_ising","params":{"J":1,"h":2},"n":8,"boundary":"periodic"}"#);
        let s = c.build().unwrap();
        assert!((s.g() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_model_and_key_are_config_errors() {
        let c = parse(r#"{"model":"nope","n":4}"#);
        assert!(matches!(c.build(), Err(Error::Config(_))));
        let c = parse(r#"{"model":"transverse_ising","params":{"h":1,"k":3},"n":4}"#);
        let msg = c.build().unwrap_err().to_string();
        assert!(msg.contains("params.k"), "{msg}");
    }

    #[test]
    fn catalog_lists_every_buildable_model() {
        for e in catalog() {
            let c = ModelConfig {
                model: e.builder.to_string(),
                params: BTreeMap::new(),
                n: Some(6),
                boundary: None,
            };
            match c.build() {
                Ok(_) => {}
                Err(Error::Config(m)) => assert!(m.contains("required"), "{m}"),
                Err(other) => panic!("{other}"),
            }
        }
    }
}
