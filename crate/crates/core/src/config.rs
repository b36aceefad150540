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

//! Controller parameters.

use crate::error::{Error, Result};

/// 1 mg/kJ expressed in g/J.
pub const MG_PER_KJ: f64 = 1e-6;

/// Hard state-of-charge limits, as fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocBounds {
    pub min: f64,
    pub max: f64,
}

impl SocBounds {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&min) || !(0.0..=1.0).contains(&max) || min >= max {
            return Err(Error::Config(format!(
                "SOC bounds must satisfy 0 <= min < max <= 1, got [{min}, {max}]"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    /// Clamps a requested SOC reference into `[min + ε, max - ε]`.
    pub fn saturate(&self, soc_ref: f64, epsilon: f64) -> Result<f64> {
        let lo = self.min + epsilon;
        let hi = self.max - epsilon;
        if !(epsilon >= 0.0) || lo >= hi {
            return Err(Error::Config(format!(
                "degenerate SOC reference interval [{lo}, {hi}] for epsilon = {epsilon}"
            )));
        }
        Ok(soc_ref.min(hi).max(lo))
    }
}

/// Interior-point penalty used to adapt the equivalent factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PenaltyKind {
    Tangent,
    Logarithm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcmsConfig {
    /// Default reference equivalent factor (g/J), used when the scenario
    /// does not supply one.
    pub reference_equivalent_factor: f64,
    /// Gain of the tangent penalty (g/J).
    pub gain_tangent: f64,
    /// Gain of the logarithmic penalty (g/J).
    pub gain_log: f64,
}

impl EcmsConfig {
    pub fn gain(&self, kind: PenaltyKind) -> f64 {
        match kind {
            PenaltyKind::Tangent => self.gain_tangent,
            PenaltyKind::Logarithm => self.gain_log,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqtConfig {
    /// SOC tracking weight (g/s).
    pub q_soc: f64,
    /// Barrier weight (g/s).
    pub q_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub soc: SocBounds,
    /// SOC margin kept from the hard bounds.
    pub epsilon: f64,
    /// Sampling time (s).
    pub sample_time: f64,
    pub ecms: EcmsConfig,
    pub lqt: LqtConfig,
}

impl Default for ControllerConfig {
    /// Reference parameter set: SOC in [15 %, 90 %], ε = 0.5 %, Ts = 20 ms,
    /// q_p = 0.24 g/s, q_SOC = 15 g/s, K_p1 = 1.95 mg/kJ, K_p2 = 37.8 mg/kJ
    /// and a reference equivalent factor of 50.1537 mg/kJ.
    fn default() -> Self {
        Self {
            soc: SocBounds {
                min: 0.15,
                max: 0.90,
            },
            epsilon: 0.005,
            sample_time: 0.02,
            ecms: EcmsConfig {
                reference_equivalent_factor: 50.1537 * MG_PER_KJ,
                gain_tangent: 1.95 * MG_PER_KJ,
                gain_log: 37.8 * MG_PER_KJ,
            },
            lqt: LqtConfig {
                q_soc: 15.0,
                q_p: 0.24,
            },
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        SocBounds::new(self.soc.min, self.soc.max)?;
        self.soc.saturate(0.5, self.epsilon)?;
        let positive = [
            ("sample_time", self.sample_time),
            ("gain_tangent", self.ecms.gain_tangent),
            ("gain_log", self.ecms.gain_log),
            ("q_p", self.lqt.q_p),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let nonneg = [
            (
                "reference_equivalent_factor",
                self.ecms.reference_equivalent_factor,
            ),
            ("q_soc", self.lqt.q_soc),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}
