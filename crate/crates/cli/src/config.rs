use std::fs;
use std::path::Path;

use serde::Deserialize;

/// Keys accepted in a `--config` TOML file. Command-line flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<String>,
    pub format: Option<String>,
    pub seed: Option<u64>,
    pub n: Option<u64>,
    pub q: Option<f64>,
    pub delta: Option<f64>,
    pub s0: Option<f64>,
    pub eps: Option<f64>,
    pub eps_cor: Option<f64>,
    pub f_ec: Option<f64>,
    pub l_syn: Option<u64>,
    pub p_est: Option<f64>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub steps: Option<usize>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub runs: Option<usize>,
    pub strategy: Option<String>,
    pub p: Option<f64>,
    pub alpha_angle: Option<f64>,
    pub beta_angle: Option<f64>,
    pub delta_s: Option<f64>,
    pub key_length: Option<u64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Flag, then file, then default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
