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

//! Deliverable-torque arbitration.
//!
//! For one operating point this module derives the admissible interval of
//! chemical battery power `[u_min, u_max]`, the torque the powertrain can
//! actually deliver, and the split of that torque over engine, EM,
//! additional brake and service brake for a chosen battery power.
//!
//! The interval intersects four families of limits: the battery power
//! limits, the implicit battery limit `U²/(2R)`, the SOC margins, and the
//! EM torque window reflected through the engine limits. The SOC terms are
//! clipped into the power range the EM can actually absorb or produce, so
//! the interval is never empty and every point in it maps to a feasible EM
//! torque.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::ControllerConfig;
use crate::error::{Error, Result};
use crate::powertrain::{EmPoint, SpeedSlice};

/// Relative tolerance for accepting a control marginally outside its bounds.
const BOUND_TOL: f64 = 1e-9;
/// Relative size below which torque residuals are treated as rounding noise.
const RESIDUAL_TOL: f64 = 1e-12;

/// Demand and measurement at one sampling instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Shaft speed (rad/s).
    pub speed: f64,
    /// Driver torque demand (Nm), negative when braking.
    pub demanded_torque: f64,
    /// Measured state of charge.
    pub measured_soc: f64,
}

impl OperatingPoint {
    pub fn new(speed: f64, demanded_torque: f64, measured_soc: f64) -> Result<Self> {
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::Contract(format!(
                "speed must be positive, got {speed}"
            )));
        }
        if !demanded_torque.is_finite() {
            return Err(Error::Contract(format!(
                "torque demand must be finite, got {demanded_torque}"
            )));
        }
        if !(0.0..=1.0).contains(&measured_soc) {
            return Err(Error::Contract(format!(
                "measured SOC must lie in [0, 1], got {measured_soc}"
            )));
        }
        Ok(Self {
            speed,
            demanded_torque,
            measured_soc,
        })
    }
}

/// Which limit is active on a bound of the battery-power interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerLimit {
    /// Lower battery power limit `P_bmin`.
    BatteryMin,
    /// Upper battery power limit `P_bmax`.
    BatteryMax,
    /// Implicit limit `U²/(2R)`.
    Implicit,
    /// SOC close to its upper bound; charging is limited.
    SocUpper,
    /// SOC close to its lower bound; discharging is limited.
    SocLower,
    /// EM torque window reflected through the engine limits.
    EmReflected,
    /// Upper bound pinned to the lower bound.
    Collapsed,
}

impl PowerLimit {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::BatteryMin => "battery_min",
            Self::BatteryMax => "battery_max",
            Self::Implicit => "implicit",
            Self::SocUpper => "soc_upper",
            Self::SocLower => "soc_lower",
            Self::EmReflected => "em_reflected",
            Self::Collapsed => "collapsed",
        }
    }
}

impl fmt::Display for PowerLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Admissible battery-power interval and the derived torque quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlBounds {
    /// Lower bound of chemical battery power (W).
    pub u_min: f64,
    /// Upper bound of chemical battery power (W).
    pub u_max: f64,
    pub u_min_limit: PowerLimit,
    pub u_max_limit: PowerLimit,
    /// EM torque window after reflecting the engine limits (Nm).
    pub reflected_em_min: f64,
    pub reflected_em_max: f64,
    /// EM torque at which the battery supplies exactly the auxiliaries.
    pub equilibrium_em_torque: f64,
    /// EM torque reachable at `u_max` (Nm).
    pub max_em_torque: f64,
    /// Demand clipped to what engine and EM can deliver (Nm).
    pub deliverable_demand: f64,
}

impl ControlBounds {
    /// Clamps a battery power into the interval.
    pub fn clamp(&self, u: f64) -> f64 {
        u.min(self.u_max).max(self.u_min)
    }

    fn tolerance(&self) -> f64 {
        BOUND_TOL * self.u_min.abs().max(self.u_max.abs()).max(1.0)
    }
}

/// Torques of the four actuators (Nm). Their sum equals the deliverable
/// demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorTorques {
    pub engine: f64,
    pub em: f64,
    pub additional_brake: f64,
    pub service_brake: f64,
}

impl ActuatorTorques {
    pub fn total(&self) -> f64 {
        self.engine + self.em + self.additional_brake + self.service_brake
    }
}

/// EM torque at which the battery delivers no power beyond the auxiliary
/// load, i.e. the EM electrical power equals `-P_aux`.
pub fn equilibrium_em_torque(slice: &SpeedSlice) -> Result<f64> {
    let em = &slice.em;
    let disc = em.d1 * em.d1 - 4.0 * em.d2 * (em.d0 + slice.battery.p_aux);
    if disc < 0.0 {
        return Err(Error::AuxiliariesUndeliverable { speed: slice.speed });
    }
    let den = em.d1 + disc.sqrt();
    if den > 0.0 {
        Ok(-2.0 * (em.d0 + slice.battery.p_aux) / den)
    } else {
        Ok((-em.d1 + disc.sqrt()) / (2.0 * em.d2))
    }
}

/// Chemical battery power needed to run the EM at `torque` while feeding the
/// auxiliaries, or `+∞` when it exceeds what the battery can supply.
fn chemical_power_at(slice: &SpeedSlice, torque: f64) -> f64 {
    let p_bel = slice.em.power(torque) + slice.battery.p_aux;
    if p_bel > slice.battery.max_electrical_power() {
        return f64::INFINITY;
    }
    slice.battery.chemical_power(p_bel).unwrap_or(f64::INFINITY)
}

fn pick_min(candidates: &[(f64, PowerLimit)]) -> (f64, PowerLimit) {
    candidates
        .iter()
        .copied()
        .fold((f64::INFINITY, PowerLimit::Implicit), |acc, c| {
            if c.0 < acc.0 {
                c
            } else {
                acc
            }
        })
}

fn pick_max(candidates: &[(f64, PowerLimit)]) -> (f64, PowerLimit) {
    candidates
        .iter()
        .copied()
        .fold((f64::NEG_INFINITY, PowerLimit::BatteryMin), |acc, c| {
            if c.0 > acc.0 {
                c
            } else {
                acc
            }
        })
}

fn lowest_em_torque(em: &EmPoint) -> f64 {
    em.min_power_torque().max(em.m_min)
}

/// Computes the admissible battery-power interval at an operating point.
pub fn compute_bounds(
    op: &OperatingPoint,
    slice: &SpeedSlice,
    cfg: &ControllerConfig,
) -> Result<ControlBounds> {
    let em = &slice.em;
    let ice = &slice.ice;
    let batt = &slice.battery;
    let dem = op.demanded_torque;

    let m_eq = equilibrium_em_torque(slice)?;
    let floor = lowest_em_torque(em);
    if floor > em.m_max {
        return Err(Error::Arbitration {
            speed: slice.speed,
            reason: "EM torque window lies below the minimum-power torque",
        });
    }

    let reflected_min = floor.max(em.m_max.min(dem - ice.m_max));
    let reflected_max = em.m_max.min(reflected_min.max(dem - ice.m_min));

    let cap = batt.max_chemical_power();
    let lo = batt.p_bmin.max(chemical_power_at(slice, floor));
    let hi = batt.p_bmax.min(cap).min(chemical_power_at(slice, em.m_max));
    if !(lo <= hi) {
        return Err(Error::Arbitration {
            speed: slice.speed,
            reason: "battery power limits and EM power window do not overlap",
        });
    }

    let scale = batt.e_bmax / cfg.sample_time;
    let soc_lower = ((op.measured_soc - cfg.soc.min - cfg.epsilon) * scale).clamp(lo, hi);
    let soc_upper = ((op.measured_soc - cfg.soc.max + cfg.epsilon) * scale).clamp(lo, hi);

    let inner = pick_min(&[
        (cap, PowerLimit::Implicit),
        (batt.p_bmax, PowerLimit::BatteryMax),
        (soc_lower, PowerLimit::SocLower),
        (
            chemical_power_at(slice, reflected_min),
            PowerLimit::EmReflected,
        ),
    ]);
    let (u_min, u_min_limit) = pick_max(&[
        (batt.p_bmin, PowerLimit::BatteryMin),
        (soc_upper, PowerLimit::SocUpper),
        inner,
    ]);

    let reflected = pick_max(&[
        (u_min, PowerLimit::Collapsed),
        (
            chemical_power_at(slice, reflected_max),
            PowerLimit::EmReflected,
        ),
    ]);
    let (u_max, u_max_limit) = pick_min(&[
        (cap, PowerLimit::Implicit),
        (batt.p_bmax, PowerLimit::BatteryMax),
        (soc_lower, PowerLimit::SocLower),
        reflected,
    ]);

    let max_em_torque = em_torque_at(slice, u_max)?;
    let deliverable_demand = dem.min(ice.m_max + max_em_torque);

    Ok(ControlBounds {
        u_min,
        u_max,
        u_min_limit,
        u_max_limit,
        reflected_em_min: reflected_min,
        reflected_em_max: reflected_max,
        equilibrium_em_torque: m_eq,
        max_em_torque,
        deliverable_demand,
    })
}

/// EM torque produced when the battery delivers chemical power `u` and the
/// auxiliaries are served first.
pub fn em_torque_at(slice: &SpeedSlice, u: f64) -> Result<f64> {
    let p_bel = slice.battery.electrical_power(u)?;
    slice
        .em
        .torque_from_power(p_bel - slice.battery.p_aux)
        .map_err(|_| Error::AuxiliariesUndeliverable { speed: slice.speed })
}

/// Torque the powertrain can deliver at this operating point.
pub fn saturate_demand(
    op: &OperatingPoint,
    slice: &SpeedSlice,
    cfg: &ControllerConfig,
) -> Result<f64> {
    Ok(compute_bounds(op, slice, cfg)?.deliverable_demand)
}

/// Splits the deliverable demand over the actuators for battery power
/// `u_star`.
///
/// The EM takes whatever `u_star` affords, the engine covers the rest down
/// to its minimum torque, then the additional brake, and the service brake
/// takes any remainder.
pub fn split_torques(
    u_star: f64,
    slice: &SpeedSlice,
    bounds: &ControlBounds,
) -> Result<ActuatorTorques> {
    let tol = bounds.tolerance();
    if !(u_star >= bounds.u_min - tol && u_star <= bounds.u_max + tol) {
        return Err(Error::Contract(format!(
            "battery power {u_star} W outside [{}, {}] W",
            bounds.u_min, bounds.u_max
        )));
    }
    let u = bounds.clamp(u_star);
    let ice = &slice.ice;
    let dem = bounds.deliverable_demand;

    let em = em_torque_at(slice, u)?;
    let mut engine = ice.m_min.max(dem - em);
    let scale = RESIDUAL_TOL * dem.abs().max(em.abs()).max(1.0);

    let rest = dem - em - engine;
    if rest.abs() <= scale {
        engine += rest;
        return Ok(ActuatorTorques {
            engine,
            em,
            additional_brake: 0.0,
            service_brake: 0.0,
        });
    }
    let mut additional_brake = ice.m_abrk_min.max(rest);
    let mut service_brake = rest - additional_brake;
    if service_brake.abs() <= scale {
        additional_brake += service_brake;
        service_brake = 0.0;
    }
    Ok(ActuatorTorques {
        engine,
        em,
        additional_brake,
        service_brake,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powertrain::{BatteryParams, IcePoint};

    fn slice() -> SpeedSlice {
        SpeedSlice {
            speed: 200.0,
            em: EmPoint {
                d0: 500.0,
                d1: 200.0,
                d2: 0.1,
                m_min: -500.0,
                m_max: 500.0,
            },
            ice: IcePoint {
                a0: 0.5,
                a1: 0.01,
                a2: 1e-6,
                m_min: -50.0,
                m_max: 2000.0,
                m_abrk_min: -1000.0,
            },
            battery: BatteryParams::new(600.0, 0.2509, 36e6, -150e3, 150e3, 2500.0).unwrap(),
        }
    }

    #[test]
    fn equilibrium_torque_cancels_auxiliaries() {
        let s = slice();
        let m = equilibrium_em_torque(&s).unwrap();
        assert!((s.em.power(m) + 2500.0).abs() < 1e-8);
        assert!((m + 15.1143).abs() < 1e-4);
    }

    #[test]
    fn auxiliaries_undeliverable() {
        let mut s = slice();
        s.em.d0 = 200_000.0;
        assert!(matches!(
            equilibrium_em_torque(&s),
            Err(Error::AuxiliariesUndeliverable { .. })
        ));
    }

    #[test]
    fn interval_is_ordered_and_demand_split() {
        let s = slice();
        let cfg = ControllerConfig::default();
        for dem in [-3000.0, -400.0, 0.0, 300.0, 2400.0, 5000.0] {
            let op = OperatingPoint::new(s.speed, dem, 0.6).unwrap();
            let b = compute_bounds(&op, &s, &cfg).unwrap();
            assert!(b.u_min <= b.u_max);
            for u in [b.u_min, 0.5 * (b.u_min + b.u_max), b.u_max] {
                let t = split_torques(u, &s, &b).unwrap();
                assert!((t.total() - b.deliverable_demand).abs() < 1e-9 * dem.abs().max(1.0));
            }
        }
    }

    #[test]
    fn soc_margin_activates_upper_bound() {
        let s = slice();
        let cfg = ControllerConfig::default();
        let x = cfg.soc.min + cfg.epsilon;
        let op = OperatingPoint::new(s.speed, 1500.0, x).unwrap();
        let b = compute_bounds(&op, &s, &cfg).unwrap();
        assert_eq!(b.u_max_limit, PowerLimit::SocLower);
        assert!(b.u_max.abs() < 1e-6);
    }

    #[test]
    fn out_of_range_control_is_rejected() {
        let s = slice();
        let cfg = ControllerConfig::default();
        let op = OperatingPoint::new(s.speed, 100.0, 0.6).unwrap();
        let b = compute_bounds(&op, &s, &cfg).unwrap();
        assert!(split_torques(b.u_max + 1.0, &s, &b).is_err());
    }
}
