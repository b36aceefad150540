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

//! Closed-loop runs on the constant-speed scenarios: a long window of
//! demand above the engine limit, and a long deep-braking window.
//!
//! cargo run --release --example closed_loop

use hevsplit::config::{ControllerConfig, PenaltyKind, MG_PER_KJ};
use hevsplit::control::Controller;
use hevsplit::fixture;
use hevsplit::sim::{run, NoiseModel, Scenario, SimulationTrace};

fn soc_at(trace: &SimulationTrace, t: f64) -> f64 {
    trace
        .records
        .iter()
        .take_while(|r| r.time <= t)
        .last()
        .map_or(f64::NAN, |r| r.true_soc)
}

fn report(name: &str, scenario: &Scenario, controller: Controller, cfg: &ControllerConfig) {
    let pt = fixture::powertrain();
    let noise = NoiseModel::new(0.002, 1).expect("valid noise bound");
    let (trace, m) =
        run(scenario, controller, &pt, cfg, fixture::INITIAL_SOC, &noise).expect("run succeeds");
    println!(
        "{name:<28} delivered {:>8.3} %  fuel {:>7.4} g/s  SOC {:.3} -> {:.3} (window) -> {:.3}  min {:.3}  service-brake steps {}",
        m.delivered_torque_pct,
        m.average_fuel_g_s,
        soc_at(&trace, fixture::WINDOW.0),
        soc_at(&trace, fixture::WINDOW.1),
        m.final_soc,
        m.min_soc,
        m.service_brake_steps,
    );
}

fn main() {
    let base = ControllerConfig::default();
    let ecms = Controller::Ecms(PenaltyKind::Tangent);

    println!(
        "positive window: {:.0} Nm, {:.0} Nm from {} s to {} s",
        fixture::POSITIVE_DEMAND.0,
        fixture::POSITIVE_DEMAND.1,
        fixture::WINDOW.0,
        fixture::WINDOW.1
    );
    let scenario = fixture::positive_window_scenario();
    report("lqt", &scenario, Controller::Lqt, &base);
    for factor in [
        fixture::LOW_REFERENCE_FACTOR,
        fixture::HIGH_REFERENCE_FACTOR,
    ] {
        let mut cfg = base;
        cfg.ecms.reference_equivalent_factor = factor;
        report(
            &format!("ecms-tan s_B = {:.4} mg/kJ", factor / MG_PER_KJ),
            &scenario,
            ecms,
            &cfg,
        );
    }

    println!(
        "\nbraking window: {:.0} Nm, {:.0} Nm from {} s to {} s",
        fixture::NEGATIVE_DEMAND.0,
        fixture::NEGATIVE_DEMAND.1,
        fixture::WINDOW.0,
        fixture::WINDOW.1
    );
    let scenario = fixture::negative_window_scenario();
    report("lqt", &scenario, Controller::Lqt, &base);
    report("ecms-tan", &scenario, ecms, &base);
    report(
        "battery-neutral",
        &scenario,
        Controller::BatteryNeutral,
        &base,
    );
}
