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

//! Adaptive ECMS: the two SOC penalties, the quadratic fuel model and the
//! resulting battery power for a range of equivalent factors, compared with
//! the switching threshold.
//!
//! cargo run --example ecms_penalty

use hevsplit::arbitration::{compute_bounds, OperatingPoint};
use hevsplit::config::{ControllerConfig, PenaltyKind, MG_PER_KJ};
use hevsplit::ecms::{ecms_control, quadratise_fuel, s_b_threshold, EcmsPenalty};
use hevsplit::fixture;

fn main() -> hevsplit::Result<()> {
    let cfg = ControllerConfig::default();
    let reference = cfg.ecms.reference_equivalent_factor;
    let x_ref = 0.65;
    let tan = EcmsPenalty::new(PenaltyKind::Tangent, &cfg.ecms, reference, cfg.soc, x_ref)?;
    let log = EcmsPenalty::new(PenaltyKind::Logarithm, &cfg.ecms, reference, cfg.soc, x_ref)?;
    println!("equivalent factor (mg/kJ) around SOC reference {x_ref}");
    for x in [0.16, 0.2, 0.3, 0.5, 0.65, 0.8, 0.89, 0.9] {
        println!(
            "  SOC {x:.2}: tangent {:>9.3}  logarithm {:>9.3}",
            tan.equivalent_factor(x)? / MG_PER_KJ,
            log.equivalent_factor(x)? / MG_PER_KJ
        );
    }

    let slice = fixture::powertrain().at(fixture::CRUISE_SPEED);
    let op = OperatingPoint::new(slice.speed, 1000.0, 0.6)?;
    let bounds = compute_bounds(&op, &slice, &cfg)?;
    let model = quadratise_fuel(&slice, &bounds)?;
    let threshold = s_b_threshold(&slice, &bounds)?;
    println!(
        "\nfuel model at u0 = {:.0} W: a0 = {:.4} g/s, a1 = {:.4e} g/J, a2 = {:.4e} g·s/J²",
        model.u0, model.a0, model.a1, model.a2
    );
    println!("threshold s_B0 = {:.4} mg/kJ", threshold / MG_PER_KJ);
    for s_b in [0.0, 45.0, 50.0, 51.0, 52.0, 55.0, 80.0] {
        let u = ecms_control(&model, s_b * MG_PER_KJ, &bounds);
        println!("  s_B {s_b:>5.1} mg/kJ -> u* = {u:>10.0} W");
    }
    Ok(())
}
