//! Experiment manifests. Unknown keys are rejected so typos surface as
//! configuration errors naming the key.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::states::random_state;
use crate::models::{make_special_state, ModelConfig, SpecialState};
use crate::operator::{parse_operator, parse_pauli, LocalOperator, StateVector};
use crate::reversibility::{basis_projector, max_overlap_pauli, max_overlap_projector, DisturbanceSpec};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    pub output: OutputConfig,
    #[serde(default)]
    pub tool_version: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    #[serde(default = "default_stem")]
    pub stem: String,
}

fn default_stem() -> String {
    "run".into()
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn default_points() -> usize {
    401
}

fn default_methods() -> Vec<MethodConfig> {
    vec![MethodConfig::Chebyshev]
}

fn default_witness_method() -> MethodConfig {
    MethodConfig::Optimal
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    Reverse {
        model: ModelConfig,
        q: Vec<usize>,
        disturbance: DisturbanceConfig,
        #[serde(default = "default_methods")]
        methods: Vec<MethodConfig>,
    },
    Tail {
        model: ModelConfig,
        disturbance: DisturbanceConfig,
    },
    Fluctuation {
        state: StateConfig,
        #[serde(default)]
        additive: AdditiveConfig,
        #[serde(default = "yes")]
        fisher: bool,
    },
    LmgScaling {
        n_list: Vec<usize>,
        #[serde(default = "one")]
        lambda: f64,
        #[serde(default)]
        gamma: f64,
        #[serde(default = "one")]
        h: f64,
    },
    Meanfield {
        state: StateConfig,
        #[serde(default)]
        i: usize,
        /// Defaults to every site except `i`.
        #[serde(default)]
        l: Option<Vec<usize>>,
        /// Optional `δE` used to scale the deviation sum.
        #[serde(default)]
        delta_e: Option<f64>,
    },
    Macroscopicity {
        state: StateConfig,
        projector: DisturbanceConfig,
        q: Vec<usize>,
        #[serde(default = "default_witness_method")]
        method: MethodConfig,
    },
    FilterProfile {
        model: ModelConfig,
        q: usize,
        l_size: usize,
        #[serde(default = "default_points")]
        points: usize,
        /// Upper end of the `x` range; defaults to `1.25 (2E_c + δE)`.
        #[serde(default)]
        x_max: Option<f64>,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Reverse { .. } => "reverse",
            Experiment::Tail { .. } => "tail",
            Experiment::Fluctuation { .. } => "fluctuation",
            Experiment::LmgScaling { .. } => "lmg_scaling",
            Experiment::Meanfield { .. } => "meanfield",
            Experiment::Macroscopicity { .. } => "macroscopicity",
            Experiment::FilterProfile { .. } => "filter_profile",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodConfig {
    Chebyshev,
    Optimal,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DisturbanceConfig {
    /// Basis projector on `sites`; `bits` default to the outcome with the
    /// largest weight in the state.
    Projector {
        sites: Vec<usize>,
        #[serde(default)]
        bits: Option<Vec<u8>>,
    },
    /// Pauli string on `sites`; `string` defaults to the full-weight string
    /// with the largest `|⟨P⟩|`.
    Pauli {
        sites: Vec<usize>,
        #[serde(default)]
        string: Option<String>,
    },
    /// Any operator in text form, e.g. `"0.5 X0 Z1 + I"`.
    Operator {
        text: String,
        #[serde(default)]
        region: Option<Vec<usize>>,
    },
}

impl DisturbanceConfig {
    pub fn operator(&self, omega: &StateVector) -> Result<(LocalOperator, Option<Vec<usize>>)> {
        let n = omega.n_sites();
        Ok(match self {
            DisturbanceConfig::Projector { sites, bits } => {
                let op = match bits {
                    Some(b) => {
                        if b.len() != sites.len() {
                            return Err(Error::Config("projector bits must match sites".into()));
                        }
                        let b: Vec<bool> = b.iter().map(|&x| x != 0).collect();
                        basis_projector(n, sites, &b)?
                    }
                    None => max_overlap_projector(omega, sites)?.0,
                };
                (op, Some(sites.clone()))
            }
            DisturbanceConfig::Pauli { sites, string } => {
                let p = match string {
                    Some(s) => parse_pauli(n, s)?,
                    None => max_overlap_pauli(omega, sites)?,
                };
                (LocalOperator::from_pauli(Complex64::new(1.0, 0.0), p), Some(sites.clone()))
            }
            DisturbanceConfig::Operator { text, region } => (parse_operator(n, text)?, region.clone()),
        })
    }

    pub fn build(&self, omega: &StateVector) -> Result<DisturbanceSpec> {
        let (op, region) = self.operator(omega)?;
        DisturbanceSpec::new(op, region, omega)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialKind {
    Ghz,
    W,
    Hybrid,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    /// Unique ground state of a model.
    Ground { model: ModelConfig },
    Special { state: SpecialKind, n: usize },
    /// Haar-random state drawn from the manifest seed.
    Random { n: usize },
}

/// A state together with its parent Hamiltonian, when it is a ground state.
pub struct PreparedState {
    pub label: String,
    pub psi: StateVector,
    pub model: Option<(crate::models::HamiltonianSpec, crate::spectral::GroundSolution)>,
}

impl StateConfig {
    pub fn prepare(&self, seed: u64) -> Result<PreparedState> {
        match self {
            StateConfig::Ground { model } => {
                let spec = model.build()?;
                let sol = crate::spectral::ground_state(&spec, &Default::default())?;
                let psi = sol.require_unique()?.clone();
                Ok(PreparedState {
                    label: spec.name().to_string(),
                    psi,
                    model: Some((spec, sol)),
                })
            }
            StateConfig::Special { state, n } => {
                let (kind, label) = match state {
                    SpecialKind::Ghz => (SpecialState::Ghz(*n), "ghz"),
                    SpecialKind::W => (SpecialState::W(*n), "w"),
                    SpecialKind::Hybrid => (SpecialState::GhzWHybrid(*n), "hybrid"),
                };
                Ok(PreparedState {
                    label: label.into(),
                    psi: make_special_state(&kind)?,
                    model: None,
                })
            }
            StateConfig::Random { n } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(PreparedState {
                    label: "random".into(),
                    psi: random_state(*n, &mut rng)?,
                    model: None,
                })
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdditiveConfig {
    /// One of `X`, `Y`, `Z`.
    #[serde(default = "default_letter")]
    pub letter: char,
    /// Defaults to every site.
    #[serde(default)]
    pub sites: Option<Vec<usize>>,
}

fn default_letter() -> char {
    'Z'
}

impl Default for AdditiveConfig {
    fn default() -> Self {
        AdditiveConfig {
            letter: default_letter(),
            sites: None,
        }
    }
}

fn config_error(e: serde_json::Error) -> Error {
    Error::Config(e.to_string())
}

pub fn parse_manifest(text: &str) -> Result<Manifest> {
    serde_json::from_str(text).map_err(config_error)
}

pub fn parse_model(text: &str) -> Result<ModelConfig> {
    serde_json::from_str(text).map_err(config_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_named() {
        let text = r#"{"experiment":{"kind":"tail","model":{"model":"product","n":4},
            "disturbance":{"type":"pauli","sites":[0]},"bogus":1},"output":{"dir":"x"}}"#;
        let msg = parse_manifest(text).unwrap_err().to_string();
        assert!(msg.contains("bogus"), "{msg}");
    }

    #[test]
    fn defaults_resolve() {
        let text = r#"{"experiment":{"kind":"reverse","model":{"model":"product","n":4},"q":[2],
            "disturbance":{"type":"projector","sites":[0,1]}},"output":{"dir":"x"}}"#;
        let m = parse_manifest(text).unwrap();
        assert_eq!(m.seed, 0);
        assert_eq!(m.output.stem, "run");
        match m.experiment {
            Experiment::Reverse { methods, .. } => assert_eq!(methods, vec![MethodConfig::Chebyshev]),
            _ => unreachable!(),
        }
    }
}
