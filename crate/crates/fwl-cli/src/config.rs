//! Run configuration: one JSON file per run; command-line flags only
//! override individual fields, so the manifest's copy of the config plus
//! the code version pins the run completely.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum GroupSpec {
    /// k generator pairs on symmetrically placed disks; `gap` is the
    /// angular gap between adjacent disks
    #[serde(rename = "schottky")]
    Schottky { k: usize, gap: f64 },
    /// regular-octagon Fuchsian system, optionally bent out of the plane
    #[serde(rename = "octagon")]
    Octagon { theta: f64 },
    /// model cylinder with one primitive geodesic of length ell
    #[serde(rename = "cylinder")]
    Cylinder { ell: f64 },
    /// synthetic zero heights with counting exponent alpha (no geometry)
    #[serde(rename = "planted")]
    Planted { alpha: f64, t_max: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum TGrid {
    /// explicit window centers
    List(Vec<f64>),
    /// geometric grid start, start*factor, ... capped at max
    Geometric { start: f64, factor: f64, max: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScaleSpec {
    pub eps_min: f64,
    pub eps_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FlowStart {
    pub r: f64,
    #[serde(default)]
    pub y: f64,
    pub zeta: f64,
    pub eta: f64,
}

fn default_t_total() -> f64 {
    10.0
}
fn default_dt() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub starts: Vec<FlowStart>,
    #[serde(default = "default_t_total")]
    pub t_total: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_grid_n() -> usize {
    25
}
fn default_check_t_max() -> f64 {
    12.0
}
fn default_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_check_t_max")]
    pub t_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for CheckSpec {
    fn default() -> Self {
        CheckSpec {
            grid_n: default_grid_n(),
            t_max: default_check_t_max(),
            samples: default_samples(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    /// reduced-word cutoff for sampling and spectra
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word_length: Option<usize>,
    /// number of zeta lines k = 0..k_max
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSpec>,
    /// counting window half-width
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_values: Option<TGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scales: Option<ScaleSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

pub const DEFAULT_WORD_LENGTH: usize = 8;
pub const DEFAULT_K_MAX: u32 = 4;
pub const DEFAULT_RADIUS: f64 = 1.6;
pub const DEFAULT_SCALES: ScaleSpec = ScaleSpec {
    eps_min: 1e-3,
    eps_max: 1e-1,
    n: 12,
};

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Field-path range checks shared by every command; presence of the
    /// fields a command needs is checked at dispatch.
    pub fn validate(&self) -> Result<(), CliError> {
        match &self.group {
            Some(GroupSpec::Schottky { k, gap }) => {
                if *k < 1 {
                    return Err(CliError::Config("group.k: must be >= 1".into()));
                }
                if !(*gap > 0.0) {
                    return Err(CliError::Config(format!(
                        "group.gap: must be > 0, got {gap}"
                    )));
                }
            }
            Some(GroupSpec::Cylinder { ell }) => {
                if !(*ell > 0.0) {
                    return Err(CliError::Config(format!(
                        "group.ell: must be > 0, got {ell}"
                    )));
                }
            }
            Some(GroupSpec::Planted { alpha, t_max }) => {
                if !(*alpha >= 0.0) {
                    return Err(CliError::Config(format!(
                        "group.alpha: must be >= 0, got {alpha}"
                    )));
                }
                if !(*t_max > 0.0) {
                    return Err(CliError::Config(format!(
                        "group.t_max: must be > 0, got {t_max}"
                    )));
                }
            }
            Some(GroupSpec::Octagon { .. }) | None => {}
        }
        if let Some(wl) = self.word_length {
            if wl < 1 {
                return Err(CliError::Config("word_length: must be >= 1".into()));
            }
        }
        if let Some(r) = self.region {
            if !(r.re_min < r.re_max) || !(r.im_min < r.im_max) {
                return Err(CliError::Config(format!(
                    "region: needs re_min < re_max and im_min < im_max, got \
                     [{}, {}] x [{}, {}]",
                    r.re_min, r.re_max, r.im_min, r.im_max
                )));
            }
        }
        if let Some(rad) = self.radius {
            if !(rad > 0.0 && rad.is_finite()) {
                return Err(CliError::Config(format!(
                    "radius: must be positive and finite, got {rad}"
                )));
            }
        }
        if let Some(s) = self.scales {
            if !(s.eps_min > 0.0 && s.eps_min < s.eps_max) {
                return Err(CliError::Config(format!(
                    "scales: needs 0 < eps_min < eps_max, got [{}, {}]",
                    s.eps_min, s.eps_max
                )));
            }
            if s.n < 3 {
                return Err(CliError::Config("scales.n: must be >= 3".into()));
            }
        }
        if let Some(TGrid::Geometric { start, factor, max }) = &self.t_values {
            if !(*start > 0.0 && *factor > 1.0 && *max >= *start) {
                return Err(CliError::Config(format!(
                    "t_values: needs start > 0, factor > 1, max >= start, \
                     got start={start}, factor={factor}, max={max}"
                )));
            }
        }
        if let Some(f) = &self.flow {
            if f.starts.is_empty() {
                return Err(CliError::Config("flow.starts: must be non-empty".into()));
            }
            if !(f.dt > 0.0) {
                return Err(CliError::Config(format!(
                    "flow.dt: must be > 0, got {}",
                    f.dt
                )));
            }
            if !(f.t_total != 0.0 && f.t_total.is_finite()) {
                return Err(CliError::Config(format!(
                    "flow.t_total: must be nonzero and finite, got {}",
                    f.t_total
                )));
            }
            if f.t_total.abs() / f.dt >= 1e8 {
                return Err(CliError::Config(
                    "flow: |t_total|/dt must stay below 1e8".into(),
                ));
            }
        }
        if let Some(c) = &self.check {
            if c.grid_n < 2 {
                return Err(CliError::Config("check.grid_n: must be >= 2".into()));
            }
            if !(c.t_max > 0.0) {
                return Err(CliError::Config(format!(
                    "check.t_max: must be > 0, got {}",
                    c.t_max
                )));
            }
        }
        if let Some(t) = self.threads {
            if t < 1 {
                return Err(CliError::Config("threads: must be >= 1".into()));
            }
        }
        Ok(())
    }

    pub fn group_required(&self) -> Result<&GroupSpec, CliError> {
        self.group
            .as_ref()
            .ok_or_else(|| CliError::Config("group: required for this command".into()))
    }

    pub fn region_required(&self) -> Result<RegionSpec, CliError> {
        self.region
            .ok_or_else(|| CliError::Config("region: required for this command".into()))
    }

    pub fn flow_required(&self) -> Result<&FlowSpec, CliError> {
        self.flow
            .as_ref()
            .ok_or_else(|| CliError::Config("flow: required for this command".into()))
    }

    pub fn word_length_or_default(&self) -> usize {
        self.word_length.unwrap_or(DEFAULT_WORD_LENGTH)
    }

    pub fn k_max_or_default(&self) -> u32 {
        self.k_max.unwrap_or(DEFAULT_K_MAX)
    }

    pub fn radius_or_default(&self) -> f64 {
        self.radius.unwrap_or(DEFAULT_RADIUS)
    }

    pub fn scales_or_default(&self) -> ScaleSpec {
        self.scales.unwrap_or(DEFAULT_SCALES)
    }
}
