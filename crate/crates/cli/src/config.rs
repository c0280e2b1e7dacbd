//! JSON run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use pedc_core::csa::{make_params, AlphaPolicy, CsaError, SystemParams};
use pedc_core::sim::RunInputs;
use serde::{Deserialize, Serialize};

/// Contents of a `--config` file.
///
/// Only `q`, `users`, `servers` and `colluders` are required. Inputs left
/// out are sampled from the seed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub q: u64,
    #[serde(alias = "K")]
    pub users: usize,
    #[serde(alias = "N")]
    pub servers: usize,
    #[serde(alias = "E")]
    pub colluders: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub messages: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user_noises: Option<Vec<Vec<Vec<u64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collector_noise: Option<Vec<Vec<u64>>>,
    /// Transcript path used by `run` when `--out` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    pub fn params(&self) -> Result<SystemParams, CsaError> {
        let policy = match &self.alphas {
            Some(a) => AlphaPolicy::Explicit(a.clone()),
            None => AlphaPolicy::SmallestValid,
        };
        make_params(self.q, self.users, self.servers, self.colluders, policy)
    }

    pub fn run_inputs(&self) -> RunInputs {
        RunInputs {
            messages: self.messages.clone(),
            coefficients: self.coefficients.clone(),
            user_noises: self.user_noises.clone(),
            collector_noise: self.collector_noise.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_aliases() {
        let c: Config =
            serde_json::from_str(r#"{"q":7,"K":2,"N":3,"E":1,"master_seed":5}"#).unwrap();
        assert_eq!((c.users, c.servers, c.colluders), (2, 3, 1));
        assert_eq!(c.params().unwrap().message_len(), 1);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<Config>(r#"{"q":7,"K":2,"N":3,"E":1,"seed":5}"#).is_err());
    }

    #[test]
    fn infeasible_surfaces_as_params_error() {
        let c: Config = serde_json::from_str(r#"{"q":7,"K":2,"N":3,"E":2}"#).unwrap();
        assert!(matches!(c.params(), Err(CsaError::Infeasible { .. })));
    }
}
