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

//! Synthetic heavy-duty powertrain and reference scenarios.
//!
//! The map is a plausible long-haul truck: a 350 kW diesel engine with a
//! 2500 Nm torque plateau, a 100 kW electric machine on the same shaft and
//! a 10 kWh battery. It satisfies every map invariant and is meant for
//! demonstrations and tests, not for quantitative studies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::MG_PER_KJ;
use crate::powertrain::{BatteryParams, EmPoint, GriddedMap, IcePoint, Powertrain, SpeedGrid};
use crate::sim::{Scenario, ScenarioStep};

/// Shaft speed of the constant-speed scenarios, 1974 rpm (rad/s).
pub const CRUISE_SPEED: f64 = 1974.0 * std::f64::consts::PI / 30.0;
/// Initial SOC of the reference scenarios.
pub const INITIAL_SOC: f64 = 0.65;
/// Reference equivalent factors for the positive-demand scenario (g/J).
pub const LOW_REFERENCE_FACTOR: f64 = 50.1537 * MG_PER_KJ;
pub const HIGH_REFERENCE_FACTOR: f64 = 52.9651 * MG_PER_KJ;
/// Start and end of the high-load window of the constant-speed scenarios (s).
pub const WINDOW: (f64, f64) = (235.0, 630.0);
/// Length of the constant-speed scenarios (s).
pub const WINDOW_SCENARIO_END: f64 = 800.0;
/// Torque demand outside and inside the window of the positive scenario.
pub const POSITIVE_DEMAND: (f64, f64) = (1000.0, 1920.0);
/// Torque demand outside and inside the window of the braking scenario.
pub const NEGATIVE_DEMAND: (f64, f64) = (-60.0, -420.0);
/// Initial SOC for [`adversarial_scenario`].
pub const ADVERSARIAL_INITIAL_SOC: f64 = 0.2;
/// Energy capacity of [`adversarial_powertrain`] (J).
pub const ADVERSARIAL_CAPACITY: f64 = 0.5e6;

const SPEEDS: [f64; 10] = [
    60.0, 80.0, 100.0, 120.0, 140.0, 160.0, 180.0, 200.0, 220.0, 240.0,
];
const ENGINE_MIN_TORQUE: f64 = -150.0;
const ENGINE_POWER: f64 = 350e3;
const EM_POWER: f64 = 100e3;
const EM_TORQUE: f64 = 1000.0;
/// Marginal fuel rate per unit of engine power at low torque (g/J).
const FUEL_PER_JOULE: f64 = 4.6e-5;
const FUEL_CURVATURE: f64 = 6e-7;

fn engine_max_torque(speed: f64) -> f64 {
    if speed <= 80.0 {
        1600.0 + (speed - 60.0) * 30.0
    } else if speed <= 100.0 {
        2200.0 + (speed - 80.0) * 15.0
    } else {
        2500.0_f64.min(ENGINE_POWER / speed)
    }
}

/// The synthetic powertrain.
pub fn powertrain() -> Powertrain {
    let grid = SpeedGrid::new(SPEEDS.to_vec()).expect("fixture grid is valid");
    let em = SPEEDS
        .iter()
        .map(|&w| {
            let m = EM_TORQUE.min(EM_POWER / w);
            EmPoint {
                d0: 300.0 + 4.0 * w,
                d1: w,
                d2: 0.008,
                m_min: -m,
                m_max: m,
            }
        })
        .collect();
    let ice = SPEEDS
        .iter()
        .map(|&w| {
            let a1 = FUEL_PER_JOULE * w;
            let a2 = FUEL_CURVATURE;
            IcePoint {
                a0: -(a1 * ENGINE_MIN_TORQUE + a2 * ENGINE_MIN_TORQUE * ENGINE_MIN_TORQUE),
                a1,
                a2,
                m_min: ENGINE_MIN_TORQUE,
                m_max: engine_max_torque(w),
                m_abrk_min: -(400.0 + 5.0 * w),
            }
        })
        .collect();
    Powertrain {
        em: GriddedMap::new(grid.clone(), em).expect("fixture EM map is valid"),
        ice: GriddedMap::new(grid, ice).expect("fixture engine map is valid"),
        battery: BatteryParams::new(600.0, 0.2509, 36e6, -150e3, 150e3, 2500.0)
            .expect("fixture battery is valid"),
    }
}

/// The synthetic powertrain with a 0.5 MJ buffer battery. At full EM power
/// one sampling period moves its SOC by a few tenths of a percent, the same
/// order as the measurement noise.
pub fn adversarial_powertrain() -> Powertrain {
    let mut pt = powertrain();
    pt.battery.e_bmax = ADVERSARIAL_CAPACITY;
    pt
}

fn step(time: f64, speed: f64, torque: f64, soc_ref: f64) -> ScenarioStep {
    ScenarioStep {
        time,
        speed_ref: speed,
        torque_ref: torque,
        soc_ref,
        equivalent_factor_ref: None,
    }
}

fn window_scenario(demand: (f64, f64), soc_ref: f64) -> Scenario {
    let steps = vec![
        step(0.0, CRUISE_SPEED, demand.0, soc_ref),
        step(WINDOW.0, CRUISE_SPEED, demand.1, soc_ref),
        step(WINDOW.1, CRUISE_SPEED, demand.0, soc_ref),
        step(WINDOW_SCENARIO_END, CRUISE_SPEED, demand.0, soc_ref),
    ];
    Scenario::new(steps).expect("fixture scenario is valid")
}

/// Constant speed with a long window of demand above the engine limit and
/// a SOC reference of 0.75.
pub fn positive_window_scenario() -> Scenario {
    window_scenario(POSITIVE_DEMAND, 0.75)
}

/// Constant speed with a long deep-braking window and a SOC reference of
/// 0.55.
pub fn negative_window_scenario() -> Scenario {
    window_scenario(NEGATIVE_DEMAND, 0.55)
}

/// Mixed driving: accelerations, cruising, climbs above the engine limit
/// and braking, with a SOC reference that is lowered late in the run.
pub fn varying_scenario() -> Scenario {
    #[rustfmt::skip]
    let rows: [(f64, f64, f64, f64); 24] = [
        (0.0, 90.0, 1800.0, 0.65),
        (30.0, 130.0, 1500.0, 0.65),
        (70.0, 170.0, 900.0, 0.65),
        (120.0, 190.0, 600.0, 0.65),
        (180.0, 200.0, -300.0, 0.65),
        (220.0, 190.0, 1100.0, 0.65),
        (280.0, 206.0, 2000.0, 0.65),
        (330.0, 206.0, 1200.0, 0.65),
        (400.0, 180.0, -900.0, 0.65),
        (430.0, 150.0, -1800.0, 0.65),
        (450.0, 120.0, 400.0, 0.65),
        (500.0, 160.0, 1400.0, 0.65),
        (560.0, 200.0, 800.0, 0.60),
        (620.0, 210.0, 2100.0, 0.60),
        (660.0, 210.0, 700.0, 0.55),
        (720.0, 190.0, -200.0, 0.50),
        (760.0, 170.0, -1200.0, 0.45),
        (790.0, 140.0, 300.0, 0.40),
        (830.0, 180.0, 1300.0, 0.35),
        (880.0, 205.0, 1000.0, 0.30),
        (930.0, 205.0, 2300.0, 0.30),
        (960.0, 180.0, -500.0, 0.30),
        (990.0, 120.0, 100.0, 0.30),
        (1000.0, 120.0, 100.0, 0.30),
    ];
    Scenario::new(rows.iter().map(|&(t, w, m, x)| step(t, w, m, x)).collect())
        .expect("fixture scenario is valid")
}

/// Piecewise-constant random scenario of about two minutes.
pub fn random_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 0.0;
    let mut steps = Vec::new();
    while t < 120.0 {
        steps.push(step(
            t,
            rng.random_range(70.0..235.0),
            rng.random_range(-2500.0..2600.0),
            rng.random_range(0.15..0.90),
        ));
        t += rng.random_range(2.0..10.0_f64).round();
    }
    steps.push(ScenarioStep {
        time: t,
        ..steps[steps.len() - 1]
    });
    Scenario::new(steps).expect("random scenario is valid")
}

/// One minute of demand far above the engine limit with a low SOC
/// reference. Started from [`ADVERSARIAL_INITIAL_SOC`] on
/// [`adversarial_powertrain`] it drives the SOC to its lower margin and
/// keeps it there.
pub fn adversarial_scenario() -> Scenario {
    let steps = vec![
        step(0.0, CRUISE_SPEED, 2400.0, 0.2),
        step(60.0, CRUISE_SPEED, 2400.0, 0.2),
    ];
    Scenario::new(steps).expect("fixture scenario is valid")
}
