use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::clinr::RestartPolicy;
use crate::engine::EngineKind;
use crate::error::{Error, Result};
use crate::noise::{NoiseModelKind, NoiseParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSelection {
    Direct,
    MonoClinr,
    DistClinr,
    All,
}

impl ModeSelection {
    pub fn direct(self) -> bool {
        matches!(self, Self::Direct | Self::All)
    }

    pub fn mono(self) -> bool {
        matches!(self, Self::MonoClinr | Self::All)
    }

    pub fn dist(self) -> bool {
        matches!(self, Self::DistClinr | Self::All)
    }
}

/// Sweep description. Read from a flat `key = value` file; every key has a
/// default except `n_values`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "defaults::mode")]
    pub mode: ModeSelection,
    pub n_values: Vec<usize>,
    #[serde(default = "defaults::tau_e_values")]
    pub tau_e_values: Vec<u32>,
    #[serde(default = "defaults::p")]
    pub p: f64,
    #[serde(default = "defaults::noise_model")]
    pub noise_model: NoiseModelKind,
    #[serde(default = "defaults::t")]
    pub t: usize,
    #[serde(default = "defaults::r")]
    pub r: usize,
    #[serde(default = "defaults::num_circuits")]
    pub num_circuits: usize,
    #[serde(default = "defaults::shots_per_circuit")]
    pub shots_per_circuit: usize,
    /// Gates per circuit; `n²` when absent.
    #[serde(default)]
    pub circuit_size: Option<usize>,
    #[serde(default = "defaults::engine")]
    pub engine: EngineKind,
    #[serde(default = "defaults::restart_policy")]
    pub restart_policy: RestartPolicy,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "defaults::links")]
    pub links: usize,
    #[serde(default = "defaults::layer_cap")]
    pub layer_cap: u64,
    #[serde(default = "defaults::output")]
    pub output: PathBuf,
}

mod defaults {
    use super::*;

    pub fn mode() -> ModeSelection {
        ModeSelection::All
    }
    pub fn tau_e_values() -> Vec<u32> {
        vec![1]
    }
    pub fn p() -> f64 {
        1e-4
    }
    pub fn noise_model() -> NoiseModelKind {
        NoiseModelKind::CircuitLevel
    }
    pub fn t() -> usize {
        3
    }
    pub fn r() -> usize {
        3
    }
    pub fn num_circuits() -> usize {
        20
    }
    pub fn shots_per_circuit() -> usize {
        200
    }
    pub fn engine() -> EngineKind {
        EngineKind::PauliFrame
    }
    pub fn restart_policy() -> RestartPolicy {
        RestartPolicy::Immediate
    }
    pub fn links() -> usize {
        1
    }
    pub fn layer_cap() -> u64 {
        crate::arch::DEFAULT_LAYER_CAP
    }
    pub fn output() -> PathBuf {
        PathBuf::from("out")
    }
}

impl ExperimentConfig {
    /// Defaults with the given qubit counts.
    pub fn with_n(n_values: Vec<usize>) -> Self {
        toml::from_str::<Self>(&format!("n_values = {n_values:?}")).expect("defaults parse")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn noise(&self) -> Result<NoiseParams> {
        NoiseParams::new(self.noise_model, self.p)
    }

    pub fn circuit_size(&self, n: usize) -> usize {
        self.circuit_size.unwrap_or(n * n)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_values", self.n_values.len()),
            ("tau_e_values", self.tau_e_values.len()),
            ("t", self.t),
            ("num_circuits", self.num_circuits),
            ("shots_per_circuit", self.shots_per_circuit),
            ("links", self.links),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("n = {n} is below 2")));
        }
        for &n in &self.n_values {
            let size = self.circuit_size(n);
            if (self.mode.mono() || self.mode.dist()) && size < self.t {
                return Err(Error::Config(format!(
                    "{size} gates on {n} qubits cannot fill {} blocks",
                    self.t
                )));
            }
        }
        self.noise().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}
