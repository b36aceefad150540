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

//! Component models of the fixture powertrain at cruising speed: EM power
//! and its inverse, battery terminal power and its inverse, and fuel rate.
//!
//! cargo run --example inversions

use hevsplit::fixture;

fn main() -> hevsplit::Result<()> {
    let slice = fixture::powertrain().at(fixture::CRUISE_SPEED);
    let (em, ice, battery) = (slice.em, slice.ice, slice.battery);

    println!("speed {:.2} rad/s", slice.speed);
    println!("EM torque window [{:.1}, {:.1}] Nm", em.m_min, em.m_max);
    println!("{:>10} {:>14} {:>14}", "torque Nm", "P_el W", "inverse Nm");
    for torque in [em.m_min, -200.0, 0.0, 200.0, em.m_max] {
        let p = em.electrical_power(torque)?;
        println!(
            "{torque:>10.1} {p:>14.1} {:>14.6}",
            em.torque_from_power(p)?
        );
    }

    println!(
        "\nbattery: implicit limit {:.0} W chemical",
        battery.max_chemical_power()
    );
    println!(
        "{:>12} {:>14} {:>14}",
        "chemical W", "terminal W", "inverse W"
    );
    for u in [-150e3, -50e3, 0.0, 50e3, 150e3] {
        let p = battery.electrical_power(u)?;
        println!("{u:>12.0} {p:>14.2} {:>14.4}", battery.chemical_power(p)?);
    }

    println!(
        "\nengine torque window [{:.0}, {:.1}] Nm",
        ice.m_min, ice.m_max
    );
    for torque in [ice.m_min, 0.0, 800.0, ice.m_max] {
        println!(
            "fuel rate at {torque:>7.1} Nm: {:.4} g/s",
            ice.fuel_rate(torque)?
        );
    }
    Ok(())
}
