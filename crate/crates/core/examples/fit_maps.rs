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

//! Fitting quadratic EM and engine maps to sampled measurements.
//!
//! cargo run --example fit_maps

use hevsplit::powertrain::{fit_em_map, fit_ice_map, MapSample};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let speeds = [100.0, 150.0, 200.0];
    let mut em = Vec::new();
    let mut ice = Vec::new();
    for &w in &speeds {
        for i in 0..=10 {
            let torque = -400.0 + 80.0 * i as f64;
            // measured electrical power with a small ripple
            let p = 600.0 + w * torque + 0.01 * torque * torque + 5.0 * (i as f64).sin();
            em.push(MapSample {
                speed: w,
                torque,
                value: p,
            });
            let engine_torque = -120.0 + 200.0 * i as f64;
            let fuel = 4.5e-5 * w * (engine_torque + 120.0)
                + 5e-7 * (engine_torque * engine_torque - 14_400.0);
            ice.push(MapSample {
                speed: w,
                torque: engine_torque,
                value: fuel,
            });
        }
    }
    let em_map = fit_em_map(&em)?;
    let ice_map = fit_ice_map(&ice, |w| -(400.0 + 5.0 * w))?;
    for (w, (e, f)) in speeds
        .iter()
        .zip(em_map.points().iter().zip(ice_map.points()))
    {
        println!(
            "{w:>5.0} rad/s  EM d = ({:.2}, {:.4}, {:.5})  engine a = ({:.4}, {:.4e}, {:.3e})  fuel at minimum torque {:.1e}",
            e.d0,
            e.d1,
            e.d2,
            f.a0,
            f.a1,
            f.a2,
            f.fuel(f.m_min)
        );
    }
    Ok(())
}
