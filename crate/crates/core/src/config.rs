//! Run configuration: a single JSON document with nested blocks.
//! Unknown keys are rejected with the offending key named and the
//! nearest valid key suggested.

use crate::coupling::{
    Configuration, Dim, Disk, PairingMode, DEFAULT_QUAD_ORDER, GAMMA_HAT_DEFAULT,
};
use crate::error::{Error, Result};
use crate::material::{K0Convention, Material};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub material: Material,
    pub geometry: GeometryBlock,
    pub solver: SolverBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub disks: Vec<DiskSpec>,
    pub delta: f64,
    #[serde(default = "default_dim")]
    pub dim: u8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    pub k: f64,
    #[serde(default = "default_gamma_hat")]
    pub gamma_hat: f64,
    #[serde(default = "default_quadrature_order")]
    pub quadrature_order: usize,
    #[serde(default = "default_muller_tol")]
    pub muller_tol: f64,
    #[serde(default = "default_muller_max_iter")]
    pub muller_max_iter: usize,
    #[serde(default)]
    pub k0_convention: K0Convention,
    #[serde(default)]
    pub pairing_mode: PairingMode,
    /// Initial Muller guesses as [re, im] pairs; empty means derive them
    /// from the coupling structure.
    #[serde(default)]
    pub initial_guesses: Vec<[f64; 2]>,
    /// Frequency at which delta*k0 is frozen; null means the material's
    /// reference sqrt(beta + eta k^2).
    #[serde(default)]
    pub reference_omega: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

fn default_dim() -> u8 {
    2
}
fn default_gamma_hat() -> f64 {
    GAMMA_HAT_DEFAULT
}
fn default_quadrature_order() -> usize {
    DEFAULT_QUAD_ORDER
}
fn default_muller_tol() -> f64 {
    1e-10
}
fn default_muller_max_iter() -> usize {
    100
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let msg = decorate_serde_error(&e.inner().to_string());
            if path == "." {
                Error::Config(msg)
            } else {
                Error::Config(format!("at key \"{path}\": {msg}"))
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        self.configuration()?.validate()?;
        if self.solver.gamma_hat.is_nan() || self.solver.gamma_hat <= 0.0 {
            return Err(Error::Config(format!(
                "solver.gamma_hat = {} must be > 0",
                self.solver.gamma_hat
            )));
        }
        if self.solver.quadrature_order < 2 {
            return Err(Error::Config("solver.quadrature_order must be >= 2".into()));
        }
        if self.solver.muller_tol.is_nan() || self.solver.muller_tol <= 0.0 {
            return Err(Error::Config("solver.muller_tol must be > 0".into()));
        }
        if !self.solver.k.is_finite() {
            return Err(Error::Config("solver.k must be finite".into()));
        }
        Ok(())
    }

    pub fn configuration(&self) -> Result<Configuration> {
        let dim = Dim::try_from(self.geometry.dim).map_err(Error::Config)?;
        let disks = self
            .geometry
            .disks
            .iter()
            .map(|d| Disk::new(d.center, d.radius))
            .collect::<Result<Vec<_>>>()?;
        let cfg = Configuration {
            disks,
            delta: self.geometry.delta,
            dim,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn coupling_opts(&self) -> crate::coupling::CouplingOpts {
        crate::coupling::CouplingOpts {
            gamma_hat: self.solver.gamma_hat,
            order: self.solver.quadrature_order,
            mode: self.solver.pairing_mode,
            k0_convention: self.solver.k0_convention,
            reference_omega: self.solver.reference_omega,
        }
    }

    pub fn muller_opts(&self) -> crate::spectrum::MullerOpts {
        crate::spectrum::MullerOpts {
            tol: self.solver.muller_tol,
            max_iter: self.solver.muller_max_iter,
        }
    }

    /// Canonical re-serialisation with every default filled in.
    pub fn normalized_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

/// Append a nearest-key suggestion to serde's unknown-field message.
fn decorate_serde_error(msg: &str) -> String {
    if let Some(rest) = msg.strip_prefix("unknown field `").or_else(|| {
        msg.find("unknown field `")
            .map(|i| &msg[i + "unknown field `".len()..])
    }) {
        if let Some(end) = rest.find('`') {
            let unknown = &rest[..end];
            if let Some(expected) = rest.find("expected one of ").map(|i| &rest[i + 16..]) {
                let candidates: Vec<String> = expected
                    .split(&[',', '`'][..])
                    .map(|s| s.trim().trim_matches('`').to_string())
                    .filter(|s| !s.is_empty() && s != "or" && !s.contains(' '))
                    .collect();
                if let Some(best) = nearest(unknown, &candidates) {
                    return format!("{msg}; unknown key \"{unknown}\", did you mean \"{best}\"?");
                }
            }
            return format!("{msg}; unknown key \"{unknown}\"");
        }
    }
    msg.to_string()
}

fn nearest(word: &str, candidates: &[String]) -> Option<String> {
    candidates
        .iter()
        .map(|c| (levenshtein(word, c), c))
        .min_by_key(|(d, _)| *d)
        .filter(|(d, _)| *d <= word.len().max(3))
        .map(|(_, c)| c.clone())
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// JSON Schema describing the config document; shipped alongside the
/// sample configs and pinned by tests.
pub const CONFIG_SCHEMA_JSON: &str = include_str!("../schema/config.schema.json");
