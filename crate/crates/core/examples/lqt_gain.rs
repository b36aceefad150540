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

//! LQT: state weight, Riccati root and feedback gain as the SOC reference
//! approaches the bounds, and the control for a few tracking errors.
//!
//! cargo run --example lqt_gain

use hevsplit::arbitration::{compute_bounds, OperatingPoint};
use hevsplit::config::ControllerConfig;
use hevsplit::ecms::quadratise_fuel;
use hevsplit::fixture;
use hevsplit::lqt::{build_lq_problem, feedback_gain, lqt_control, solve_riccati};

fn main() -> hevsplit::Result<()> {
    let cfg = ControllerConfig::default();
    let pt = fixture::powertrain();
    let slice = pt.at(fixture::CRUISE_SPEED);
    let op = OperatingPoint::new(slice.speed, 1000.0, 0.6)?;
    let bounds = compute_bounds(&op, &slice, &cfg)?;
    let model = quadratise_fuel(&slice, &bounds)?;

    println!(
        "{:>6} {:>10} {:>12} {:>14}",
        "x_ref", "Q g/s", "P", "gain W"
    );
    for x_ref in [0.155, 0.3, 0.5, 0.65, 0.8, 0.895] {
        let p = build_lq_problem(
            &cfg.lqt,
            &model,
            &cfg.soc,
            cfg.sample_time,
            slice.battery.e_bmax,
            x_ref,
        )?;
        let p_bar = solve_riccati(&p)?;
        println!(
            "{x_ref:>6.3} {:>10.3} {p_bar:>12.4e} {:>14.4e}",
            p.q,
            feedback_gain(&p, p_bar)
        );
    }

    let x_ref = 0.65;
    let p = build_lq_problem(
        &cfg.lqt,
        &model,
        &cfg.soc,
        cfg.sample_time,
        slice.battery.e_bmax,
        x_ref,
    )?;
    let p_bar = solve_riccati(&p)?;
    println!(
        "\ncontrol at reference {x_ref}, bounds [{:.0}, {:.0}] W",
        bounds.u_min, bounds.u_max
    );
    for x in [0.5, 0.6, 0.64, 0.65, 0.66, 0.7, 0.8] {
        println!(
            "  SOC {x:.2}: u* = {:>10.1} W",
            lqt_control(&p, p_bar, x, &bounds) + 0.0
        );
    }
    Ok(())
}
