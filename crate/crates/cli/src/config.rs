//! The run configuration read by every subcommand.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;

use defrisk::config::{MeasureSpec, RegulatoryConfig};
use defrisk::space::{LoadedSpace, SpaceDocument};
use defrisk::DefaultRiskMeasure;

pub const DEFAULT_ALPHAS: [f64; 5] = [0.01, 0.05, 0.1, 0.25, 0.5];

fn default_alphas() -> Vec<f64> {
    DEFAULT_ALPHAS.to_vec()
}

fn default_corpus_size() -> usize {
    50
}

fn default_samples() -> usize {
    4
}

/// Suites run by `check`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Axioms,
    Invariance,
    Equivalence,
    Var,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Axioms, Suite::Invariance, Suite::Equivalence, Suite::Var];
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractionConfig {
    pub measure: String,
    /// Variable names; all indicators of the space when omitted.
    #[serde(default)]
    pub customers: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub space: Option<SpaceDocument>,
    /// Path to a space document, relative to the config file.
    #[serde(default)]
    pub space_file: Option<PathBuf>,
    #[serde(default)]
    pub measures: BTreeMap<String, MeasureSpec>,
    #[serde(default)]
    pub suites: Option<Vec<Suite>>,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    /// Seeded random variables added to the named ones for `check`.
    #[serde(default = "default_corpus_size")]
    pub corpus_size: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub regulatory: RegulatoryConfig,
    #[serde(default)]
    pub extraction: Option<ExtractionConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config is valid")
    }
}

/// A config with its space loaded and measures built.
pub struct Loaded {
    pub space: LoadedSpace,
    pub measures: Vec<(String, DefaultRiskMeasure)>,
}

impl RunConfig {
    pub fn read(path: &Path) -> anyhow::Result<(Self, PathBuf)> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    pub fn load(&self, base: &Path) -> anyhow::Result<Loaded> {
        let doc = match (&self.space, &self.space_file) {
            (Some(doc), None) => doc.clone(),
            (None, Some(file)) => {
                let path = base.join(file);
                let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                SpaceDocument::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            (Some(_), Some(_)) => bail!("give either `space` or `space_file`, not both"),
            (None, None) => bail!("this command needs a `space` or `space_file`"),
        };
        let space = doc.load().context("loading the space")?;
        let measures = self
            .measures
            .iter()
            .map(|(name, spec)| {
                let rho = spec
                    .build(&space.measure)
                    .with_context(|| format!("building measure `{name}`"))?;
                Ok((name.clone(), rho))
            })
            .collect::<anyhow::Result<_>>()?;
        for &a in &self.alphas {
            if !(a > 0.0 && a < 1.0) {
                bail!("alpha {a} is not in (0,1)");
            }
        }
        Ok(Loaded { space, measures })
    }

    pub fn suites(&self) -> Vec<Suite> {
        let mut s = self.suites.clone().unwrap_or_else(|| Suite::ALL.to_vec());
        s.sort();
        s.dedup();
        s
    }
}
