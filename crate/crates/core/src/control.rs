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

//! One control step: arbitration, controller law and torque split.

use std::fmt;
use std::str::FromStr;

use crate::arbitration::{
    compute_bounds, split_torques, ActuatorTorques, ControlBounds, OperatingPoint,
};
use crate::config::{ControllerConfig, PenaltyKind};
use crate::ecms::{ecms_unconstrained, quadratise_fuel, EcmsPenalty};
use crate::error::{Error, Result};
use crate::lqt::{build_lq_problem, feedback_gain, lqt_unconstrained, solve_riccati};
use crate::powertrain::SpeedSlice;

/// Power-split strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Controller {
    /// Adaptive ECMS with the given SOC penalty.
    Ecms(PenaltyKind),
    /// Linear-quadratic SOC tracking.
    Lqt,
    /// Keeps the chemical battery power as close to zero as the bounds allow.
    BatteryNeutral,
}

impl Controller {
    pub const ALL: [Controller; 4] = [
        Controller::Ecms(PenaltyKind::Tangent),
        Controller::Ecms(PenaltyKind::Logarithm),
        Controller::Lqt,
        Controller::BatteryNeutral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ecms(PenaltyKind::Tangent) => "ecms-tan",
            Self::Ecms(PenaltyKind::Logarithm) => "ecms-log",
            Self::Lqt => "lqt",
            Self::BatteryNeutral => "battery-neutral",
        }
    }
}

impl fmt::Display for Controller {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Controller {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown controller `{s}`")))
    }
}

/// Outcome of one control step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlDecision {
    pub bounds: ControlBounds,
    /// SOC reference after saturation into `[x_min + ε, x_max - ε]`.
    pub soc_ref: f64,
    /// Controller output before clamping (W).
    pub unconstrained: f64,
    /// Applied chemical battery power (W).
    pub control: f64,
    pub torques: ActuatorTorques,
    /// Engine fuel rate (g/s).
    pub fuel_rate: f64,
    /// Adapted equivalent factor (g/J), ECMS only.
    pub equivalent_factor: Option<f64>,
    /// Feedback gain (W per unit SOC), LQT only.
    pub feedback_gain: Option<f64>,
}

/// Runs one controller step at an operating point.
///
/// `soc_ref` is saturated before use. `reference_factor` overrides the
/// configured reference equivalent factor. For ECMS a measured SOC at or
/// below the lower bound yields an infinite equivalent factor and one above
/// the upper bound yields zero, so the controller saturates instead of
/// failing on measurement noise.
pub fn decide(
    controller: Controller,
    slice: &SpeedSlice,
    op: &OperatingPoint,
    soc_ref: f64,
    reference_factor: Option<f64>,
    cfg: &ControllerConfig,
) -> Result<ControlDecision> {
    let x_ref = cfg.soc.saturate(soc_ref, cfg.epsilon)?;
    let bounds = compute_bounds(op, slice, cfg)?;
    let x_m = op.measured_soc;

    let mut equivalent_factor = None;
    let mut gain = None;
    let unconstrained = match controller {
        Controller::Ecms(kind) => {
            let reference = reference_factor.unwrap_or(cfg.ecms.reference_equivalent_factor);
            let penalty = EcmsPenalty::new(kind, &cfg.ecms, reference, cfg.soc, x_ref)?;
            let s_b = if x_m <= cfg.soc.min {
                f64::INFINITY
            } else if x_m > cfg.soc.max {
                0.0
            } else {
                penalty.equivalent_factor(x_m)?
            };
            equivalent_factor = Some(s_b);
            ecms_unconstrained(&quadratise_fuel(slice, &bounds)?, s_b)
        }
        Controller::Lqt => {
            let model = quadratise_fuel(slice, &bounds)?;
            let p = build_lq_problem(
                &cfg.lqt,
                &model,
                &cfg.soc,
                cfg.sample_time,
                slice.battery.e_bmax,
                x_ref,
            )?;
            let p_bar = solve_riccati(&p)?;
            gain = Some(feedback_gain(&p, p_bar));
            lqt_unconstrained(&p, p_bar, x_m)
        }
        Controller::BatteryNeutral => 0.0,
    };
    let control = bounds.clamp(unconstrained);
    let torques = split_torques(control, slice, &bounds)?;
    let fuel_rate = slice.ice.fuel_rate(torques.engine)?;
    Ok(ControlDecision {
        bounds,
        soc_ref: x_ref,
        unconstrained,
        control,
        torques,
        fuel_rate,
        equivalent_factor,
        feedback_gain: gain,
    })
}
