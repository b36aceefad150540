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

//! Bounded SOC measurement noise: with a margin of at least twice the noise
//! bound the SOC never leaves its hard limits; with a smaller margin it can.
//!
//! cargo run --release --example robustness

use hevsplit::config::{ControllerConfig, PenaltyKind};
use hevsplit::control::Controller;
use hevsplit::fixture;
use hevsplit::sim::{run, NoiseModel};

fn main() {
    let beta = 0.002;
    let pt = fixture::powertrain();
    let cfg = ControllerConfig::default();
    let mut violations = 0;
    let mut lowest = f64::INFINITY;
    for seed in 0..100 {
        let scenario = fixture::random_scenario(seed);
        let noise = NoiseModel::new(beta, seed).expect("valid noise bound");
        for controller in [Controller::Lqt, Controller::Ecms(PenaltyKind::Tangent)] {
            let (_, m) = run(&scenario, controller, &pt, &cfg, 0.5, &noise).expect("run succeeds");
            violations += m.soc_violations;
            lowest = lowest.min(m.min_soc);
        }
    }
    println!("100 random scenarios, beta = {beta}, epsilon = {}: {violations} violations, lowest SOC {lowest:.5}", cfg.epsilon);

    let small = fixture::adversarial_powertrain();
    for epsilon in [0.005, 0.001] {
        let cfg = ControllerConfig { epsilon, ..cfg };
        let noise = NoiseModel::new(beta, 0).expect("valid noise bound");
        let (_, m) = run(
            &fixture::adversarial_scenario(),
            Controller::Lqt,
            &small,
            &cfg,
            fixture::ADVERSARIAL_INITIAL_SOC,
            &noise,
        )
        .expect("run succeeds");
        println!(
            "adversarial scenario, epsilon = {epsilon}: {} violations, lowest SOC {:.5}",
            m.soc_violations, m.min_soc
        );
    }
}
