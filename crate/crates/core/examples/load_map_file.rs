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

//! Loading a powertrain from a map file, and writing one back.
//!
//! cargo run --example load_map_file [path/to/map.toml]

use hevsplit::powertrain::Powertrain;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixture_map.toml").to_string()
    });
    let pt = Powertrain::from_toml_str(&std::fs::read_to_string(&path)?)?;
    println!(
        "{path}: {} speeds, battery {:.1} MJ",
        pt.em.grid().len(),
        pt.battery.e_bmax / 1e6
    );
    for speed in [100.0, 150.0, 206.7] {
        let s = pt.at(speed);
        println!(
            "  {speed:>6.1} rad/s: engine up to {:>7.1} Nm, EM [{:.1}, {:.1}] Nm",
            s.ice.m_max, s.em.m_min, s.em.m_max
        );
    }

    // a bad value is reported with its table, row and column
    let broken = std::fs::read_to_string(&path)?.replacen("0.008,", "-0.008,", 1);
    if let Err(e) = Powertrain::from_toml_str(&broken) {
        println!("rejected edited map: {e}");
    }
    Ok(())
}
