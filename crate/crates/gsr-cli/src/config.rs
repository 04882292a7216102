//! Experiment configurations. Flags fill these structs; a JSON config file,
//! when given, overrides whatever it mentions.

use gsr_core::Result;
use serde::{Deserialize, Serialize};

/// Growing random graph: start from a random tree, add links in fixed-size
/// steps, rerun the general construction at every step.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig6Config {
    pub n: usize,
    pub trials: u32,
    pub seed: u64,
    pub link_step: usize,
    pub budget_factor: f64,
}

impl Default for Fig6Config {
    fn default() -> Self {
        Fig6Config { n: 1000, trials: 100, seed: 1, link_step: 25, budget_factor: 2.0 }
    }
}

/// Preferential-attachment graphs of doubling size, one series per
/// out-degree m.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig7Config {
    pub n_list: Vec<usize>,
    pub m_list: Vec<usize>,
    pub m0: usize,
    pub trials: u32,
    pub seed: u64,
    pub budget_factor: f64,
}

impl Default for Fig7Config {
    fn default() -> Self {
        Fig7Config {
            n_list: vec![64, 128, 256, 512, 1024],
            m_list: vec![1, 2, 3],
            m0: 10,
            trials: 100,
            seed: 1,
            budget_factor: 2.0,
        }
    }
}

/// Recovery under hub errors on one preferential-attachment instance:
/// half-size random row blocks for the two big groups, direct rows for the
/// tail, then the plain and error-aware decoders side by side.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig8Config {
    pub n: usize,
    pub ba_m: usize,
    pub m0: usize,
    /// Seed of the graph instance (the default yields groups 375/122/2/1).
    pub graph_seed: u64,
    pub k_list: Vec<usize>,
    pub trials: u32,
    pub seed: u64,
    pub noise_norm: f64,
    /// Tolerance for the error-aware decoder on clean data (the accuracy
    /// claim is about this arm).
    pub tol_clean: f64,
    /// Tolerance for the noisy arms and for the plain decoder, whose errors
    /// sit far above solver precision either way.
    pub tol_noisy: f64,
}

impl Default for Fig8Config {
    fn default() -> Self {
        Fig8Config {
            n: 500,
            ba_m: 3,
            m0: 10,
            graph_seed: 9,
            k_list: vec![1, 5, 10, 15, 20, 25],
            trials: 100,
            seed: 1,
            noise_norm: 2.0,
            tol_clean: 1e-9,
            tol_noisy: 1e-5,
        }
    }
}

/// Re-parse a config from JSON text over the current values: keys present in
/// the file win, everything else keeps the flag/default value.
pub fn override_from_json<T: Serialize + for<'de> Deserialize<'de>>(
    current: &T,
    json_text: &str,
) -> Result<T> {
    let mut base = serde_json::to_value(current)?;
    let overrides: serde_json::Value = serde_json::from_str(json_text)?;
    if let (Some(base_map), Some(over_map)) = (base.as_object_mut(), overrides.as_object()) {
        for (key, value) in over_map {
            base_map.insert(key.clone(), value.clone());
        }
    }
    Ok(serde_json::from_value(base)?)
}
