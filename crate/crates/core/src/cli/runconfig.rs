// Copyright 2026 The hevsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Run configuration file.
//!
//! ```toml
//! schema_version = 1
//! controller = "lqt"                  # ecms-tan | ecms-log | lqt
//! map = "fixture_map.toml"            # relative to this file
//! scenario = "scenarios/varying.csv"
//! out = "out"
//! initial_soc = 0.65
//!
//! [noise]
//! seed = 0
//! beta = 0.002
//!
//! [soc]
//! min = 0.15
//! max = 0.90
//! epsilon = 0.005
//!
//! [controller_params]
//! sample_time = 0.02                  # s
//! q_p = 0.24                          # g/s
//! q_soc = 15.0                        # g/s
//! k_p1 = 1.95                         # mg/kJ
//! k_p2 = 37.8                         # mg/kJ
//! s_b = 50.1537                       # mg/kJ
//! ```
//!
//! Every key is optional; missing keys take the values shown.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{ControllerConfig, EcmsConfig, LqtConfig, SocBounds, MG_PER_KJ};
use crate::control::Controller;
use crate::fixture::INITIAL_SOC;

pub const RUN_CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub seed: u64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SocSection {
    pub min: f64,
    pub max: f64,
    pub epsilon: f64,
}

/// Controller parameters in the units of the reference parameter table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsSection {
    pub sample_time: f64,
    pub q_p: f64,
    pub q_soc: f64,
    pub k_p1: f64,
    pub k_p2: f64,
    pub s_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub schema_version: u32,
    pub controller: String,
    pub map: Option<PathBuf>,
    pub scenario: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub initial_soc: f64,
    pub noise: NoiseSection,
    pub soc: SocSection,
    pub controller_params: ParamsSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = ControllerConfig::default();
        Self {
            schema_version: RUN_CONFIG_SCHEMA_VERSION,
            controller: Controller::Lqt.name().into(),
            map: None,
            scenario: None,
            out: None,
            initial_soc: INITIAL_SOC,
            noise: NoiseSection::default(),
            soc: SocSection {
                min: c.soc.min,
                max: c.soc.max,
                epsilon: c.epsilon,
            },
            controller_params: ParamsSection {
                sample_time: c.sample_time,
                q_p: c.lqt.q_p,
                q_soc: c.lqt.q_soc,
                k_p1: c.ecms.gain_tangent / MG_PER_KJ,
                k_p2: c.ecms.gain_log / MG_PER_KJ,
                s_b: c.ecms.reference_equivalent_factor / MG_PER_KJ,
            },
        }
    }
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            seed: 0,
            beta: 0.002,
        }
    }
}

impl Default for SocSection {
    fn default() -> Self {
        RunConfig::default().soc
    }
}

impl Default for ParamsSection {
    fn default() -> Self {
        RunConfig::default().controller_params
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        let cfg: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        if cfg.schema_version != RUN_CONFIG_SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema_version {} (expected {RUN_CONFIG_SCHEMA_VERSION})",
                cfg.schema_version
            ));
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run configuration serialises to TOML")
    }

    /// Reads a file and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut cfg = Self::from_toml_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.map, &mut cfg.scenario, &mut cfg.out]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn controller_config(&self) -> Result<ControllerConfig, String> {
        let p = &self.controller_params;
        let cfg = ControllerConfig {
            soc: SocBounds::new(self.soc.min, self.soc.max).map_err(|e| e.to_string())?,
            epsilon: self.soc.epsilon,
            sample_time: p.sample_time,
            ecms: EcmsConfig {
                reference_equivalent_factor: p.s_b * MG_PER_KJ,
                gain_tangent: p.k_p1 * MG_PER_KJ,
                gain_log: p.k_p2 * MG_PER_KJ,
            },
            lqt: LqtConfig {
                q_soc: p.q_soc,
                q_p: p.q_p,
            },
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    /// Checks values not covered by [`ControllerConfig::validate`]. The
    /// robustness margin `epsilon >= 2·beta` is enforced unless
    /// `allow_unsafe_epsilon` is set.
    pub fn validate(&self, allow_unsafe_epsilon: bool) -> Result<ControllerConfig, String> {
        let cfg = self.controller_config()?;
        self.controller
            .parse::<Controller>()
            .map_err(|e| e.to_string())?;
        if !(self.noise.beta >= 0.0 && self.noise.beta < 1.0) {
            return Err(format!(
                "noise beta must lie in [0, 1), got {}",
                self.noise.beta
            ));
        }
        if !allow_unsafe_epsilon && self.soc.epsilon < 2.0 * self.noise.beta {
            return Err(format!(
                "epsilon = {} is below 2·beta = {}; the SOC bounds are not guaranteed \
                 (pass --allow-unsafe-epsilon to run anyway)",
                self.soc.epsilon,
                2.0 * self.noise.beta
            ));
        }
        if !(cfg.soc.min..=cfg.soc.max).contains(&self.initial_soc) {
            return Err(format!(
                "initial_soc = {} outside [{}, {}]",
                self.initial_soc, cfg.soc.min, cfg.soc.max
            ));
        }
        Ok(cfg)
    }
}
