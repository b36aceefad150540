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

//! Battery-power bounds, deliverable torque and the actuator split over a
//! sweep of torque demands, from deep braking to beyond the engine limit.
//!
//! cargo run --example arbitration

use hevsplit::arbitration::{compute_bounds, split_torques, OperatingPoint};
use hevsplit::config::ControllerConfig;
use hevsplit::fixture;

fn main() -> hevsplit::Result<()> {
    let cfg = ControllerConfig::default();
    let slice = fixture::powertrain().at(fixture::CRUISE_SPEED);
    println!(
        "{:>7} {:>10} {:>12} {:>12} {:>13} | split at u_min: {:>8} {:>8} {:>8} {:>8}",
        "demand", "deliver", "u_min W", "u_max W", "limits", "engine", "em", "retard", "service"
    );
    for demand in [-3500.0, -1500.0, -420.0, -60.0, 0.0, 1000.0, 1900.0, 2500.0] {
        let op = OperatingPoint::new(slice.speed, demand, 0.6)?;
        let b = compute_bounds(&op, &slice, &cfg)?;
        let t = split_torques(b.u_min, &slice, &b)?;
        println!(
            "{demand:>7.0} {:>10.1} {:>12.0} {:>12.0} {:>6}/{:<6} | {:>24.1} {:>8.1} {:>8.1} {:>8.1}",
            b.deliverable_demand,
            b.u_min,
            b.u_max,
            short(b.u_min_limit.as_str()),
            short(b.u_max_limit.as_str()),
            t.engine,
            t.em,
            t.additional_brake,
            t.service_brake,
        );
    }

    // near the lower SOC margin discharging is no longer allowed
    let x = cfg.soc.min + cfg.epsilon;
    let op = OperatingPoint::new(slice.speed, 1500.0, x)?;
    let b = compute_bounds(&op, &slice, &cfg)?;
    println!(
        "\nat SOC {x}: u_max = {:.1} W ({})",
        b.u_max + 0.0,
        b.u_max_limit
    );
    Ok(())
}

fn short(s: &str) -> &str {
    &s[..s.len().min(6)]
}
