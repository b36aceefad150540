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

//! Simulation traces and summary metrics.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::arbitration::PowerLimit;
use crate::config::ControllerConfig;

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

/// One simulated step. Column names of the CSV export are given by the
/// serde renames, in field order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    #[serde(rename = "time_s")]
    pub time: f64,
    #[serde(rename = "speed_rad_s")]
    pub speed: f64,
    #[serde(rename = "demand_nm")]
    pub demand: f64,
    #[serde(rename = "deliverable_nm")]
    pub deliverable: f64,
    pub soc_ref: f64,
    pub saturated_soc_ref: f64,
    pub true_soc: f64,
    pub measured_soc: f64,
    #[serde(rename = "u_min_w")]
    pub u_min: f64,
    #[serde(rename = "u_max_w")]
    pub u_max: f64,
    #[serde(rename = "u_unconstrained_w")]
    pub u_unconstrained: f64,
    #[serde(rename = "u_w")]
    pub u: f64,
    #[serde(rename = "engine_nm")]
    pub engine: f64,
    #[serde(rename = "em_nm")]
    pub em: f64,
    #[serde(rename = "additional_brake_nm")]
    pub additional_brake: f64,
    #[serde(rename = "service_brake_nm")]
    pub service_brake: f64,
    #[serde(rename = "fuel_g_s")]
    pub fuel_rate: f64,
    #[serde(rename = "undelivered_nm")]
    pub undelivered: f64,
    #[serde(rename = "equivalent_factor_g_j")]
    pub equivalent_factor: Option<f64>,
    #[serde(rename = "feedback_gain_w")]
    pub feedback_gain: Option<f64>,
    pub u_min_limit: PowerLimit,
    pub u_max_limit: PowerLimit,
}

/// Per-step records of one run plus the SOC after the last step.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub controller: String,
    pub records: Vec<TraceRecord>,
    pub final_soc: f64,
}

/// Aggregate results of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryMetrics {
    pub controller: String,
    pub steps: usize,
    pub duration_s: f64,
    /// `100·(1 - Σ|M_dem - delivered| / Σ|M_dem|)` over steps with nonzero
    /// demand.
    pub delivered_torque_pct: f64,
    pub average_fuel_g_s: f64,
    pub total_fuel_g: f64,
    /// Samples of the true SOC, including the final one, outside the hard
    /// bounds.
    pub soc_violations: usize,
    pub initial_soc: f64,
    pub final_soc: f64,
    pub min_soc: f64,
    pub max_soc: f64,
    /// Chemical energy drawn from the battery (J).
    pub battery_energy_j: f64,
    pub service_brake_steps: usize,
}

/// Summary file holding one entry per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryFile {
    pub schema_version: u32,
    pub runs: Vec<SummaryMetrics>,
}

impl SummaryFile {
    pub fn new(runs: Vec<SummaryMetrics>) -> Self {
        Self {
            schema_version: SUMMARY_SCHEMA_VERSION,
            runs,
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("summary serialises to TOML")
    }

    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        let file: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        if file.schema_version != SUMMARY_SCHEMA_VERSION {
            return Err(format!(
                "unsupported summary schema_version {} (expected {SUMMARY_SCHEMA_VERSION})",
                file.schema_version
            ));
        }
        Ok(file)
    }
}

impl SimulationTrace {
    pub fn summary(&self, cfg: &ControllerConfig) -> SummaryMetrics {
        let n = self.records.len();
        let inside = |x: f64| x >= cfg.soc.min && x <= cfg.soc.max;
        let (mut demand, mut shortfall) = (0.0, 0.0);
        let (mut fuel, mut energy) = (0.0, 0.0);
        let (mut min_soc, mut max_soc) = (self.final_soc, self.final_soc);
        let mut violations = usize::from(!inside(self.final_soc));
        let mut service = 0;
        for r in &self.records {
            if r.demand != 0.0 {
                demand += r.demand.abs();
                shortfall += r.undelivered.abs();
            }
            fuel += r.fuel_rate;
            energy += r.u * cfg.sample_time;
            min_soc = min_soc.min(r.true_soc);
            max_soc = max_soc.max(r.true_soc);
            violations += usize::from(!inside(r.true_soc));
            service += usize::from(r.service_brake != 0.0);
        }
        SummaryMetrics {
            controller: self.controller.clone(),
            steps: n,
            duration_s: n as f64 * cfg.sample_time,
            delivered_torque_pct: if demand > 0.0 {
                100.0 * (1.0 - shortfall / demand)
            } else {
                100.0
            },
            average_fuel_g_s: if n > 0 { fuel / n as f64 } else { 0.0 },
            total_fuel_g: fuel * cfg.sample_time,
            soc_violations: violations,
            initial_soc: self.records.first().map_or(self.final_soc, |r| r.true_soc),
            final_soc: self.final_soc,
            min_soc,
            max_soc,
            battery_energy_j: energy,
            service_brake_steps: service,
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_records<R: Read>(reader: R) -> csv::Result<Vec<TraceRecord>> {
        csv::Reader::from_reader(reader).deserialize().collect()
    }
}
