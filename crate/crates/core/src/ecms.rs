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

//! Adaptive equivalent consumption minimisation (ECMS).
//!
//! The fuel rate is expanded to second order in chemical battery power and
//! the Hamiltonian `μ(u) + s_B·u` is minimised in closed form over the
//! admissible interval. The equivalent factor `s_B` is adapted with a
//! penalty on the measured SOC that grows without bound near the lower
//! SOC limit and vanishes near the upper one.

use std::f64::consts::FRAC_PI_2;

use crate::arbitration::{em_torque_at, ControlBounds};
use crate::config::{EcmsConfig, PenaltyKind, SocBounds};
use crate::error::{Error, Result};
use crate::powertrain::SpeedSlice;

/// Proportional SOC penalty producing the equivalent factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcmsPenalty {
    pub kind: PenaltyKind,
    /// Penalty gain (g/J).
    pub gain: f64,
    /// Equivalent factor at the reference SOC (g/J).
    pub reference_factor: f64,
    pub soc: SocBounds,
    /// Saturated SOC reference.
    pub soc_ref: f64,
}

impl EcmsPenalty {
    pub fn new(
        kind: PenaltyKind,
        cfg: &EcmsConfig,
        reference_factor: f64,
        soc: SocBounds,
        soc_ref: f64,
    ) -> Result<Self> {
        if !(soc_ref > soc.min && soc_ref < soc.max) {
            return Err(Error::Contract(format!(
                "SOC reference {soc_ref} must lie strictly inside ({}, {})",
                soc.min, soc.max
            )));
        }
        if !(reference_factor >= 0.0 && reference_factor.is_finite()) {
            return Err(Error::Contract(format!(
                "reference equivalent factor must be finite and >= 0, got {reference_factor}"
            )));
        }
        Ok(Self {
            kind,
            gain: cfg.gain(kind),
            reference_factor,
            soc,
            soc_ref,
        })
    }

    /// Penalty shape at `x`, without gain and reference offset.
    fn shape(&self, x: f64) -> f64 {
        let (lo, hi) = (self.soc.min, self.soc.max);
        match self.kind {
            PenaltyKind::Tangent => (FRAC_PI_2 * (hi + lo - 2.0 * x) / (hi - lo)).tan(),
            PenaltyKind::Logarithm => {
                (hi - self.soc_ref) * ((hi - x) / (hi - self.soc_ref)).ln()
                    - (self.soc_ref - lo) * ((x - lo) / (self.soc_ref - lo)).ln()
            }
        }
    }

    /// Equivalent factor (g/J) at measured SOC `x_m`, defined on
    /// `(soc.min, soc.max]`.
    pub fn equivalent_factor(&self, x_m: f64) -> Result<f64> {
        if !(x_m > self.soc.min && x_m <= self.soc.max) {
            return Err(Error::BarrierDomain {
                soc: x_m,
                min: self.soc.min,
                max: self.soc.max,
            });
        }
        let s = self.reference_factor + self.gain * (self.shape(x_m) - self.shape(self.soc_ref));
        Ok(s.max(0.0))
    }
}

/// Convenience wrapper around [`EcmsPenalty::equivalent_factor`].
pub fn adapt_equivalent_factor(
    kind: PenaltyKind,
    cfg: &EcmsConfig,
    reference_factor: f64,
    soc: SocBounds,
    soc_ref: f64,
    x_m: f64,
) -> Result<f64> {
    EcmsPenalty::new(kind, cfg, reference_factor, soc, soc_ref)?.equivalent_factor(x_m)
}

/// Second-order model `a0 + a1·(u - u0) + a2·(u - u0)²` of the fuel rate.
///
/// When `fuel_free_above` is set the engine reaches its minimum torque at
/// `u0` and burns no fuel for larger battery powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFuelModel {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub u0: f64,
    pub fuel_free_above: bool,
}

impl QuadraticFuelModel {
    pub fn eval(&self, u: f64) -> f64 {
        if self.fuel_free_above && u >= self.u0 {
            return self.a0;
        }
        let d = u - self.u0;
        self.a0 + d * (self.a1 + self.a2 * d)
    }
}

/// Expands the fuel rate around the largest battery power at which the
/// engine still runs above its minimum torque, capped at `u_max`.
pub fn quadratise_fuel(slice: &SpeedSlice, bounds: &ControlBounds) -> Result<QuadraticFuelModel> {
    let em = &slice.em;
    let ice = &slice.ice;
    let batt = &slice.battery;
    let dem = bounds.deliverable_demand;

    // battery power at which the engine hits its minimum torque
    let kink_torque = dem - ice.m_min;
    let kink = if kink_torque < em.min_power_torque() {
        f64::NEG_INFINITY
    } else {
        let p_bel = em.power(kink_torque) + batt.p_aux;
        if p_bel > batt.max_electrical_power() {
            f64::INFINITY
        } else {
            batt.chemical_power(p_bel)?
        }
    };

    if kink <= bounds.u_min {
        return Ok(QuadraticFuelModel {
            a0: 0.0,
            a1: 0.0,
            a2: 0.0,
            u0: bounds.u_max,
            fuel_free_above: false,
        });
    }
    let fuel_free_above = kink < bounds.u_max;
    let u0 = if fuel_free_above { kink } else { bounds.u_max };

    let m_em = em_torque_at(slice, u0)?;
    let slope = em.power_slope(m_em);
    if !(slope > 0.0) {
        return Err(Error::Contract(format!(
            "fuel rate is not differentiable at u0 = {u0} W: EM at its minimum-power torque"
        )));
    }
    let m_engine = dem - m_em;

    let pb1 = batt.electrical_power_slope(u0);
    let pb2 = -2.0 * batt.r_b / (batt.u_oc * batt.u_oc);
    let mp1 = 1.0 / slope;
    let mp2 = -2.0 * em.d2 / (slope * slope * slope);
    let mm1 = mp1 * pb1;
    let mm2 = mp2 * pb1 * pb1 + mp1 * pb2;
    let fuel_slope = ice.fuel_slope(m_engine);

    Ok(QuadraticFuelModel {
        a0: if fuel_free_above {
            0.0
        } else {
            ice.fuel(m_engine)
        },
        a1: -fuel_slope * mm1,
        a2: ice.a2 * mm1 * mm1 - 0.5 * fuel_slope * mm2,
        u0,
        fuel_free_above,
    })
}

/// Minimiser of `model(u) + s_b·u` ignoring the battery-power interval.
/// It is infinite when the model is linear.
pub fn ecms_unconstrained(model: &QuadraticFuelModel, s_b: f64) -> f64 {
    let u = if model.a2 > 0.0 {
        model.u0 - (model.a1 + s_b) / (2.0 * model.a2)
    } else if model.a1 + s_b > 0.0 {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    if model.fuel_free_above && s_b > 0.0 {
        u.min(model.u0)
    } else {
        u
    }
}

/// Minimiser of `model(u) + s_b·u` over `[u_min, u_max]`.
///
/// With `s_b = 0` the upper bound is returned, as is any tie of a flat
/// objective.
pub fn ecms_control(model: &QuadraticFuelModel, s_b: f64, bounds: &ControlBounds) -> f64 {
    bounds.clamp(ecms_unconstrained(model, s_b))
}

/// Equivalent factor (g/J) above which the battery is no longer discharged
/// beyond the auxiliary load when the torque demand is positive.
pub fn s_b_threshold(slice: &SpeedSlice, bounds: &ControlBounds) -> Result<f64> {
    let em = &slice.em;
    let ice = &slice.ice;
    let disc = em.d1 * em.d1 - 4.0 * em.d2 * (em.d0 + slice.battery.p_aux);
    if !(disc > 0.0) {
        return Err(Error::ThresholdUndefined(disc));
    }
    let engine = ice
        .m_min
        .max(bounds.deliverable_demand - bounds.equilibrium_em_torque);
    Ok(ice.fuel_slope(engine) / disc.sqrt())
}
