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

//! Linear-quadratic tracking (LQT) of the SOC reference.
//!
//! The fuel model from [`crate::ecms::quadratise_fuel`] and a second-order
//! expansion of a logarithmic SOC barrier about the reference turn each
//! step into a scalar LQ problem with state `x`, input `u` and dynamics
//! `x' = x + B·u`. The stationary Riccati equation has a closed-form
//! positive root, so the feedback gain is recomputed every step at no cost.

use crate::arbitration::ControlBounds;
use crate::config::{LqtConfig, SocBounds};
use crate::ecms::QuadraticFuelModel;
use crate::error::{Error, Result};

/// Floor for the input weight when the fuel model has no curvature
/// (g·s/J²).
pub const R_MIN: f64 = 1e-12;

/// Logarithmic SOC barrier (g/s), zero with zero slope at `soc_ref` and
/// unbounded at both SOC limits.
pub fn lqt_barrier(cfg: &LqtConfig, soc: &SocBounds, soc_ref: f64, x: f64) -> Result<f64> {
    check_reference(soc, soc_ref)?;
    if !(x > soc.min && x < soc.max) {
        return Err(Error::BarrierDomain {
            soc: x,
            min: soc.min,
            max: soc.max,
        });
    }
    let upper = soc.max - soc_ref;
    let lower = soc_ref - soc.min;
    Ok(-cfg.q_p * (upper * ((soc.max - x) / upper).ln() + lower * ((x - soc.min) / lower).ln()))
}

fn check_reference(soc: &SocBounds, soc_ref: f64) -> Result<()> {
    if soc_ref > soc.min && soc_ref < soc.max {
        Ok(())
    } else {
        Err(Error::Contract(format!(
            "SOC reference {soc_ref} must lie strictly inside ({}, {})",
            soc.min, soc.max
        )))
    }
}

/// Scalar LQ tracking problem `min Σ Q·(x - x̌)² + R·(u - ǔ)²`,
/// `x' = x + B·u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqProblem {
    /// State weight (g/s).
    pub q: f64,
    /// Input weight (g·s/J²).
    pub r: f64,
    /// Input gain `-Ts/E` (1/J).
    pub b: f64,
    /// Saturated SOC reference.
    pub x_check: f64,
    /// Input that minimises the fuel model (W).
    pub u_check: f64,
}

impl LqProblem {
    pub fn new(q: f64, r: f64, b: f64, x_check: f64, u_check: f64) -> Self {
        Self {
            q,
            r,
            b,
            x_check,
            u_check,
        }
    }
}

/// Builds the LQ problem for one sampling instant.
pub fn build_lq_problem(
    cfg: &LqtConfig,
    model: &QuadraticFuelModel,
    soc: &SocBounds,
    sample_time: f64,
    energy_capacity: f64,
    soc_ref: f64,
) -> Result<LqProblem> {
    check_reference(soc, soc_ref)?;
    if model.a2 < 0.0 {
        return Err(Error::Contract(format!(
            "fuel model curvature must be >= 0, got {}",
            model.a2
        )));
    }
    let curvature = soc.width() / ((soc.max - soc_ref) * (soc_ref - soc.min));
    let q = 2.0 * cfg.q_soc + cfg.q_p * curvature;
    let u_check = if model.a2 > 0.0 {
        model.u0 - model.a1 / (2.0 * model.a2)
    } else {
        model.u0
    };
    Ok(LqProblem {
        q,
        r: (2.0 * model.a2).max(R_MIN),
        b: -sample_time / energy_capacity,
        x_check: soc_ref,
        u_check,
    })
}

/// Positive root of the stationary Riccati equation
/// `P² - Q·P - Q·R/B² = 0`.
pub fn solve_riccati(p: &LqProblem) -> Result<f64> {
    let undefined = || Error::RiccatiUndefined {
        q: p.q,
        r: p.r,
        b: p.b,
    };
    if !(p.q > 0.0 && p.r > 0.0 && p.b != 0.0)
        || !(p.q.is_finite() && p.r.is_finite() && p.b.is_finite())
    {
        return Err(undefined());
    }
    let c = p.q * p.r / (p.b * p.b);
    let root = 0.5 * (p.q + (p.q * p.q + 4.0 * c).sqrt());
    if root.is_finite() {
        Ok(root)
    } else {
        Err(undefined())
    }
}

/// State feedback gain `B·P̄/(R + B²·P̄)` (W per unit SOC).
pub fn feedback_gain(p: &LqProblem, p_bar: f64) -> f64 {
    p.b * p_bar / (p.r + p.b * p.b * p_bar)
}

/// Stationary feedforward term `P̄·x̌ - (R/B)·ǔ` of the tracking solution.
/// It does not enter [`lqt_control`].
pub fn steady_state_feedforward(p: &LqProblem, p_bar: f64) -> f64 {
    p_bar * p.x_check - p.r / p.b * p.u_check
}

/// Unconstrained LQT input at measured SOC `x`.
pub fn lqt_unconstrained(p: &LqProblem, p_bar: f64, x: f64) -> f64 {
    feedback_gain(p, p_bar) * (p.x_check - x)
}

/// LQT input at measured SOC `x`, clamped into the admissible interval.
pub fn lqt_control(p: &LqProblem, p_bar: f64, x: f64, bounds: &ControlBounds) -> f64 {
    bounds.clamp(lqt_unconstrained(p, p_bar, x))
}
