//! Central configuration: resource paths, retrieval thresholds, and scoring
//! parameters. Precedence is command-line flags over the config file
//! (`--config` or `$LOGDOC_CONFIG`) over built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use logdoc_core::chart::{FilterMode, ScoreConfig};
use logdoc_core::retrieval::VDConfig;
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub paths: PathsSection,
    #[serde(default)]
    pub thresholds: ThresholdsSection,
    #[serde(default)]
    pub scoring: ScoringSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsSection {
    pub kb: Option<PathBuf>,
    pub grammar: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub postulates: Option<PathBuf>,
    pub specs: Option<PathBuf>,
    pub isa: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdsSection {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub o: Option<usize>,
    pub escalate_in_band: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoringSection {
    pub rew: Option<f64>,
    pub pen: Option<f64>,
    pub default_lex_value: Option<f64>,
    /// 0 disables pruning.
    pub n_best: Option<usize>,
    pub filter: Option<String>,
    pub cluster_threshold: Option<f64>,
    pub within_pct: Option<f64>,
    pub first_n: Option<usize>,
}

impl ConfigFile {
    /// Loads `--config` if given, else `$LOGDOC_CONFIG`, else defaults.
    pub fn load(explicit: Option<&Path>) -> Result<ConfigFile> {
        let path = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os("LOGDOC_CONFIG").map(PathBuf::from),
        };
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn vd_config(&self, m: Option<usize>, n: Option<usize>, o: Option<usize>, band: bool) -> Result<VDConfig> {
        let defaults = VDConfig::default();
        let vd = VDConfig {
            m: m.or(self.thresholds.m).unwrap_or(defaults.m),
            n: n.or(self.thresholds.n).unwrap_or(defaults.n),
            o: o.or(self.thresholds.o).unwrap_or(defaults.o),
            escalate_in_band: band
                || self.thresholds.escalate_in_band.unwrap_or(defaults.escalate_in_band),
        };
        vd.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(vd)
    }

    pub fn score_config(&self, n_best: Option<usize>, no_prune: bool) -> Result<ScoreConfig> {
        let mut cfg = ScoreConfig::default();
        let s = &self.scoring;
        if let Some(v) = s.rew {
            cfg.rew = v;
        }
        if let Some(v) = s.pen {
            cfg.pen = v;
        }
        if let Some(v) = s.default_lex_value {
            cfg.default_lex_value = v;
        }
        if let Some(v) = s.n_best {
            cfg.n_best = if v == 0 { None } else { Some(v) };
        }
        if let Some(f) = &s.filter {
            cfg.filter = match f.as_str() {
                "first_n" => FilterMode::FirstN,
                "within_pct" => FilterMode::WithinPct,
                "cluster" => FilterMode::Cluster,
                other => anyhow::bail!("unknown filter mode `{other}`"),
            };
        }
        if let Some(v) = s.cluster_threshold {
            cfg.cluster_threshold = v;
        }
        if let Some(v) = s.within_pct {
            cfg.within_pct = v;
        }
        if let Some(v) = s.first_n {
            cfg.first_n = v;
        }
        if let Some(v) = n_best {
            cfg.n_best = if v == 0 { None } else { Some(v) };
        }
        if no_prune {
            cfg.n_best = None;
        }
        cfg.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_file() {
        let cfg: ConfigFile =
            toml::from_str("[thresholds]\nm = 30\nn = 20\no = 10\n").unwrap();
        let vd = cfg.vd_config(Some(24), None, None, false).unwrap();
        assert_eq!((vd.m, vd.n, vd.o), (24, 20, 10));
    }

    #[test]
    fn invalid_thresholds_are_rejected() {
        let cfg = ConfigFile::default();
        assert!(cfg.vd_config(Some(5), Some(10), Some(1), false).is_err());
    }

    #[test]
    fn scoring_validation_applies() {
        let cfg: ConfigFile = toml::from_str("[scoring]\nrew = 0.5\n").unwrap();
        assert!(cfg.score_config(None, false).is_err());
    }
}
