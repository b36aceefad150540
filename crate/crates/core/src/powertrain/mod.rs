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

//! Component models of the parallel powertrain.
//!
//! The electric machine (EM) draws `d0 + d1·M + d2·M²` watts of electrical
//! power at torque `M`, the engine burns `a0 + a1·M + a2·M²` grams of fuel
//! per second, and the battery delivers `u - R·u²/U²` electrical watts for a
//! chemical power `u`. Coefficients and torque limits are stored on a speed
//! grid and linearly interpolated; queries outside the grid are clamped to
//! the nearest grid point.
//!
//! Units are fixed throughout the crate: W, J, Nm, rad/s, g/s and SOC as a
//! fraction in `[0, 1]`.

mod fit;
mod mapfile;

pub use fit::{fit_em_map, fit_ice_map, MapSample};
pub use mapfile::MAP_SCHEMA_VERSION;

use thiserror::Error;

use crate::error::{Error, Result};

/// Relative slack applied when a discriminant is marginally negative.
const DISCRIMINANT_TOL: f64 = 1e-9;
/// Relative slack applied to torque and power limit checks.
const LIMIT_TOL: f64 = 1e-9;
/// Largest admissible fuel rate at minimum engine torque.
const ZERO_FUEL_TOL: f64 = 1e-9;

/// Validation failures for maps, battery parameters and map files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("speed grid: {0}")]
    Grid(String),

    /// `row` is 1-based and counts grid points.
    #[error("{table} row {row}, column {column}: {reason}")]
    Invalid {
        table: &'static str,
        row: usize,
        column: &'static str,
        reason: String,
    },

    #[error("{table}: {rows} rows for a speed grid of {grid} points")]
    RowCount {
        table: &'static str,
        rows: usize,
        grid: usize,
    },

    #[error("battery {field}: {reason}")]
    Battery { field: &'static str, reason: String },

    #[error("fit at {speed} rad/s: {reason}")]
    Fit { speed: f64, reason: String },

    #[error("map file: {0}")]
    Parse(String),

    #[error("map file schema: {0}")]
    Schema(String),
}

/// Ascending shaft speeds (rad/s) at which coefficients are tabulated.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedGrid {
    speeds: Vec<f64>,
}

impl SpeedGrid {
    pub fn new(speeds: Vec<f64>) -> Result<Self, MapError> {
        if speeds.len() < 2 {
            return Err(MapError::Grid(format!(
                "need at least 2 speeds, got {}",
                speeds.len()
            )));
        }
        for (i, &w) in speeds.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(MapError::Grid(format!(
                    "speed {} (entry {}) must be finite and positive",
                    w,
                    i + 1
                )));
            }
            if i > 0 && w <= speeds[i - 1] {
                return Err(MapError::Grid(format!(
                    "speeds must be strictly increasing (entry {} = {} after {})",
                    i + 1,
                    w,
                    speeds[i - 1]
                )));
            }
        }
        Ok(Self { speeds })
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn len(&self) -> usize {
        self.speeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speeds.is_empty()
    }

    /// Index of the lower bracketing point and the weight of the upper one.
    /// Speeds outside the grid clamp to the end points.
    fn locate(&self, speed: f64) -> (usize, f64) {
        let s = &self.speeds;
        let last = s.len() - 1;
        if !(speed > s[0]) {
            return (0, 0.0);
        }
        if speed >= s[last] {
            return (last - 1, 1.0);
        }
        // first index with s[i] > speed
        let hi = s.partition_point(|&w| w <= speed);
        let lo = hi - 1;
        (lo, (speed - s[lo]) / (s[hi] - s[lo]))
    }
}

/// A row of a gridded map: coefficients and limits at one speed.
pub trait MapPoint: Copy + std::fmt::Debug {
    const TABLE: &'static str;
    const COLUMNS: &'static [&'static str];

    fn lerp(a: &Self, b: &Self, t: f64) -> Self;

    /// Returns the offending column and reason on failure.
    fn check(&self) -> std::result::Result<(), (&'static str, String)>;

    fn to_row(&self) -> Vec<f64>;

    fn from_row(row: &[f64]) -> Self;
}

/// Speed-gridded table of [`MapPoint`]s with clamped linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct GriddedMap<P> {
    grid: SpeedGrid,
    points: Vec<P>,
}

impl<P: MapPoint> GriddedMap<P> {
    /// Validates every row; the first violation is reported with its row
    /// and column.
    pub fn new(grid: SpeedGrid, points: Vec<P>) -> Result<Self, MapError> {
        if points.len() != grid.len() {
            return Err(MapError::RowCount {
                table: P::TABLE,
                rows: points.len(),
                grid: grid.len(),
            });
        }
        for (i, p) in points.iter().enumerate() {
            for (col, v) in P::COLUMNS.iter().zip(p.to_row()) {
                if !v.is_finite() {
                    return Err(MapError::Invalid {
                        table: P::TABLE,
                        row: i + 1,
                        column: col,
                        reason: format!("value {v} is not finite"),
                    });
                }
            }
            p.check().map_err(|(column, reason)| MapError::Invalid {
                table: P::TABLE,
                row: i + 1,
                column,
                reason,
            })?;
        }
        Ok(Self { grid, points })
    }

    pub fn grid(&self) -> &SpeedGrid {
        &self.grid
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    /// Coefficients and limits at `speed`. Grid speeds return the stored
    /// row unchanged; speeds outside the grid clamp.
    pub fn at(&self, speed: f64) -> P {
        let (lo, t) = self.grid.locate(speed);
        if t == 0.0 {
            self.points[lo]
        } else if t == 1.0 {
            self.points[lo + 1]
        } else {
            P::lerp(&self.points[lo], &self.points[lo + 1], t)
        }
    }
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

fn within_limits(value: f64, lower: f64, upper: f64, quantity: &'static str) -> Result<()> {
    let tol = |x: f64| LIMIT_TOL * x.abs().max(1.0);
    if value < lower - tol(lower) {
        return Err(Error::Domain {
            quantity,
            value,
            bound: "lower torque limit",
            limit: lower,
        });
    }
    if value > upper + tol(upper) {
        return Err(Error::Domain {
            quantity,
            value,
            bound: "upper torque limit",
            limit: upper,
        });
    }
    Ok(())
}

/// Electric-machine coefficients and torque limits at one speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmPoint {
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    pub m_min: f64,
    pub m_max: f64,
}

impl EmPoint {
    /// `d0 + d1·M + d2·M²` without limit checks.
    #[inline]
    pub fn power(&self, torque: f64) -> f64 {
        self.d0 + torque * (self.d1 + self.d2 * torque)
    }

    /// Electrical power drawn (positive) or recuperated (negative) at a
    /// torque within the machine limits.
    pub fn electrical_power(&self, torque: f64) -> Result<f64> {
        within_limits(torque, self.m_min, self.m_max, "EM torque")?;
        Ok(self.power(torque))
    }

    /// Torque at which electrical power is smallest, `-d1/(2·d2)`. It is an
    /// implicit lower torque limit.
    pub fn min_power_torque(&self) -> f64 {
        -self.d1 / (2.0 * self.d2)
    }

    /// Smallest electrical power the machine can produce, `d0 - d1²/(4·d2)`.
    pub fn min_power(&self) -> f64 {
        self.d0 - self.d1 * self.d1 / (4.0 * self.d2)
    }

    /// Inverse of [`EmPoint::power`] on the increasing branch
    /// `M >= -d1/(2·d2)`.
    pub fn torque_from_power(&self, power: f64) -> Result<f64> {
        let disc = self.d1 * self.d1 - 4.0 * self.d2 * (self.d0 - power);
        if disc < -DISCRIMINANT_TOL * (self.d1 * self.d1).max(f64::MIN_POSITIVE) {
            return Err(Error::InfeasiblePower {
                quantity: "EM electrical power",
                value: power,
                limit: self.min_power(),
            });
        }
        let root = disc.max(0.0).sqrt();
        let den = self.d1 + root;
        if den > 0.0 {
            // rationalised form, no cancellation for small torques
            Ok(2.0 * (power - self.d0) / den)
        } else {
            Ok(self.min_power_torque())
        }
    }

    /// Slope `d1 + 2·d2·M`, equal to the square root of the discriminant on
    /// the increasing branch.
    pub fn power_slope(&self, torque: f64) -> f64 {
        self.d1 + 2.0 * self.d2 * torque
    }
}

impl MapPoint for EmPoint {
    const TABLE: &'static str = "em";
    const COLUMNS: &'static [&'static str] = &["d0", "d1", "d2", "m_min", "m_max"];

    fn lerp(a: &Self, b: &Self, t: f64) -> Self {
        Self {
            d0: lerp(a.d0, b.d0, t),
            d1: lerp(a.d1, b.d1, t),
            d2: lerp(a.d2, b.d2, t),
            m_min: lerp(a.m_min, b.m_min, t),
            m_max: lerp(a.m_max, b.m_max, t),
        }
    }

    fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.d0 < 0.0 {
            return Err(("d0", format!("{} must be >= 0", self.d0)));
        }
        if self.d1 < 0.0 {
            return Err(("d1", format!("{} must be >= 0", self.d1)));
        }
        if self.d2 <= 0.0 {
            return Err(("d2", format!("{} must be > 0", self.d2)));
        }
        if self.m_min > self.m_max {
            return Err((
                "m_min",
                format!("{} exceeds m_max = {}", self.m_min, self.m_max),
            ));
        }
        let floor = self.min_power_torque();
        if self.m_min < floor {
            return Err((
                "m_min",
                format!(
                    "{} is below the minimum-power torque -d1/(2 d2) = {floor}",
                    self.m_min
                ),
            ));
        }
        Ok(())
    }

    fn to_row(&self) -> Vec<f64> {
        vec![self.d0, self.d1, self.d2, self.m_min, self.m_max]
    }

    fn from_row(r: &[f64]) -> Self {
        Self {
            d0: r[0],
            d1: r[1],
            d2: r[2],
            m_min: r[3],
            m_max: r[4],
        }
    }
}

/// Engine fuel coefficients and torque limits at one speed, including the
/// lower limit of the additional (retarder / engine) brake.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcePoint {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub m_min: f64,
    pub m_max: f64,
    pub m_abrk_min: f64,
}

impl IcePoint {
    /// `a0 + a1·M + a2·M²` without limit checks.
    #[inline]
    pub fn fuel(&self, torque: f64) -> f64 {
        self.a0 + torque * (self.a1 + self.a2 * torque)
    }

    /// Fuel mass flow (g/s) at an engine torque within the limits.
    pub fn fuel_rate(&self, torque: f64) -> Result<f64> {
        within_limits(torque, self.m_min, self.m_max, "engine torque")?;
        Ok(self.fuel(torque))
    }

    /// Marginal fuel rate `a1 + 2·a2·M` (g/(s·Nm)).
    pub fn fuel_slope(&self, torque: f64) -> f64 {
        self.a1 + 2.0 * self.a2 * torque
    }
}

impl MapPoint for IcePoint {
    const TABLE: &'static str = "ice";
    const COLUMNS: &'static [&'static str] = &["a0", "a1", "a2", "m_min", "m_max", "m_abrk_min"];

    fn lerp(a: &Self, b: &Self, t: f64) -> Self {
        Self {
            a0: lerp(a.a0, b.a0, t),
            a1: lerp(a.a1, b.a1, t),
            a2: lerp(a.a2, b.a2, t),
            m_min: lerp(a.m_min, b.m_min, t),
            m_max: lerp(a.m_max, b.m_max, t),
            m_abrk_min: lerp(a.m_abrk_min, b.m_abrk_min, t),
        }
    }

    fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.a0 < 0.0 {
            return Err(("a0", format!("{} must be >= 0", self.a0)));
        }
        if self.a1 <= 0.0 {
            return Err(("a1", format!("{} must be > 0", self.a1)));
        }
        if self.a2 < 0.0 {
            return Err(("a2", format!("{} must be >= 0", self.a2)));
        }
        if self.m_min > 0.0 {
            return Err(("m_min", format!("{} must be <= 0", self.m_min)));
        }
        if self.m_max < 0.0 {
            return Err(("m_max", format!("{} must be >= 0", self.m_max)));
        }
        if self.m_abrk_min > 0.0 {
            return Err(("m_abrk_min", format!("{} must be <= 0", self.m_abrk_min)));
        }
        let idle = self.fuel(self.m_min);
        if idle.abs() > ZERO_FUEL_TOL {
            return Err((
                "a0",
                format!("fuel rate at m_min is {idle} g/s, expected 0"),
            ));
        }
        // fuel must increase with torque over the whole range
        if self.fuel_slope(self.m_min) <= 0.0 {
            return Err((
                "a2",
                format!(
                    "fuel rate decreases at m_min (a1 + 2 a2 m_min = {})",
                    self.fuel_slope(self.m_min)
                ),
            ));
        }
        Ok(())
    }

    fn to_row(&self) -> Vec<f64> {
        vec![
            self.a0,
            self.a1,
            self.a2,
            self.m_min,
            self.m_max,
            self.m_abrk_min,
        ]
    }

    fn from_row(r: &[f64]) -> Self {
        Self {
            a0: r[0],
            a1: r[1],
            a2: r[2],
            m_min: r[3],
            m_max: r[4],
            m_abrk_min: r[5],
        }
    }
}

pub type EmMap = GriddedMap<EmPoint>;
pub type IceMap = GriddedMap<IcePoint>;

/// Battery equivalent circuit with constant open-circuit voltage and
/// internal resistance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryParams {
    /// Open-circuit voltage (V).
    pub u_oc: f64,
    /// Internal resistance (Ω).
    pub r_b: f64,
    /// Energy capacity (J).
    pub e_bmax: f64,
    /// Chemical power bounds (W).
    pub p_bmin: f64,
    pub p_bmax: f64,
    /// Auxiliary electrical load (W).
    pub p_aux: f64,
}

impl BatteryParams {
    pub fn new(
        u_oc: f64,
        r_b: f64,
        e_bmax: f64,
        p_bmin: f64,
        p_bmax: f64,
        p_aux: f64,
    ) -> Result<Self, MapError> {
        let b = Self {
            u_oc,
            r_b,
            e_bmax,
            p_bmin,
            p_bmax,
            p_aux,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), MapError> {
        let bad = |field, reason: String| Err(MapError::Battery { field, reason });
        for (field, v) in [
            ("u_oc", self.u_oc),
            ("r_b", self.r_b),
            ("e_bmax", self.e_bmax),
            ("p_bmin", self.p_bmin),
            ("p_bmax", self.p_bmax),
            ("p_aux", self.p_aux),
        ] {
            if !v.is_finite() {
                return bad(field, format!("{v} is not finite"));
            }
        }
        if self.u_oc <= 0.0 {
            return bad("u_oc", format!("{} must be > 0", self.u_oc));
        }
        if self.r_b <= 0.0 {
            return bad("r_b", format!("{} must be > 0", self.r_b));
        }
        if self.e_bmax <= 0.0 {
            return bad("e_bmax", format!("{} must be > 0", self.e_bmax));
        }
        if self.p_bmin > 0.0 {
            return bad("p_bmin", format!("{} must be <= 0", self.p_bmin));
        }
        if self.p_bmax < 0.0 {
            return bad("p_bmax", format!("{} must be >= 0", self.p_bmax));
        }
        if self.p_bmax > self.max_chemical_power() {
            return bad(
                "p_bmax",
                format!(
                    "{} exceeds u_oc^2/(2 r_b) = {}",
                    self.p_bmax,
                    self.max_chemical_power()
                ),
            );
        }
        if self.p_aux < 0.0 {
            return bad("p_aux", format!("{} must be >= 0", self.p_aux));
        }
        Ok(())
    }

    /// Implicit chemical power limit `U²/(2R)`, where electrical power peaks.
    pub fn max_chemical_power(&self) -> f64 {
        self.u_oc * self.u_oc / (2.0 * self.r_b)
    }

    /// Peak electrical power `U²/(4R)`.
    pub fn max_electrical_power(&self) -> f64 {
        self.u_oc * self.u_oc / (4.0 * self.r_b)
    }

    /// Electrical terminal power for chemical power `u`: `u - R·u²/U²`.
    pub fn electrical_power(&self, u: f64) -> Result<f64> {
        let cap = self.max_chemical_power();
        if u > cap * (1.0 + LIMIT_TOL) {
            return Err(Error::Domain {
                quantity: "battery chemical power",
                value: u,
                bound: "u_oc^2/(2 r_b)",
                limit: cap,
            });
        }
        Ok(self.electrical_power_unchecked(u))
    }

    #[inline]
    pub(crate) fn electrical_power_unchecked(&self, u: f64) -> f64 {
        u - self.r_b * u * u / (self.u_oc * self.u_oc)
    }

    /// Derivative of the electrical power with respect to chemical power.
    pub fn electrical_power_slope(&self, u: f64) -> f64 {
        1.0 - 2.0 * self.r_b * u / (self.u_oc * self.u_oc)
    }

    /// Chemical power needed for electrical terminal power `p_bel`, on the
    /// increasing branch `u <= U²/(2R)`.
    pub fn chemical_power(&self, p_bel: f64) -> Result<f64> {
        let u2 = self.u_oc * self.u_oc;
        let disc = u2 - 4.0 * self.r_b * p_bel;
        if disc < -DISCRIMINANT_TOL * u2 {
            return Err(Error::InfeasiblePower {
                quantity: "battery electrical power",
                value: p_bel,
                limit: self.max_electrical_power(),
            });
        }
        let root = disc.max(0.0).sqrt();
        Ok(2.0 * self.u_oc * p_bel / (self.u_oc + root))
    }
}

/// EM and engine maps together with the battery.
#[derive(Debug, Clone, PartialEq)]
pub struct Powertrain {
    pub em: EmMap,
    pub ice: IceMap,
    pub battery: BatteryParams,
}

/// Map values interpolated at a single shaft speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedSlice {
    pub speed: f64,
    pub em: EmPoint,
    pub ice: IcePoint,
    pub battery: BatteryParams,
}

impl Powertrain {
    pub fn at(&self, speed: f64) -> SpeedSlice {
        SpeedSlice {
            speed,
            em: self.em.at(speed),
            ice: self.ice.at(speed),
            battery: self.battery,
        }
    }
}
