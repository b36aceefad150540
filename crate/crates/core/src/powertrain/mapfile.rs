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

//! TOML map file.
//!
//! ```toml
//! schema_version = 1
//! speed_grid = [60.0, 80.0, 100.0]          # rad/s, strictly increasing
//!
//! [battery]
//! open_circuit_voltage = 600.0              # V
//! internal_resistance = 0.2509              # ohm
//! energy_capacity = 36.0e6                  # J
//! power_min = -150.0e3                      # W, chemical
//! power_max = 150.0e3                       # W, chemical
//! auxiliary_power = 2500.0                  # W
//!
//! [em]
//! columns = ["d0", "d1", "d2", "m_min", "m_max"]
//! rows = [[540.0, 60.0, 0.008, -1000.0, 1000.0], ...]   # one per speed
//!
//! [ice]
//! columns = ["a0", "a1", "a2", "m_min", "m_max", "m_abrk_min"]
//! rows = [[...], ...]
//! ```
//!
//! `columns` is optional on input; when present it must match the order
//! above. Validation errors name the table, the 1-based row and the column.

use serde::{Deserialize, Serialize};

use super::{BatteryParams, GriddedMap, MapError, MapPoint, Powertrain, SpeedGrid};

pub const MAP_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    schema_version: u32,
    speed_grid: Vec<f64>,
    battery: BatteryBlock,
    em: Table,
    ice: Table,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatteryBlock {
    open_circuit_voltage: f64,
    internal_resistance: f64,
    energy_capacity: f64,
    power_min: f64,
    power_max: f64,
    auxiliary_power: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Table {
    #[serde(default)]
    columns: Option<Vec<String>>,
    rows: Vec<Vec<f64>>,
}

fn table_to_map<P: MapPoint>(grid: &SpeedGrid, t: &Table) -> Result<GriddedMap<P>, MapError> {
    if let Some(cols) = &t.columns {
        if cols
            .iter()
            .map(String::as_str)
            .ne(P::COLUMNS.iter().copied())
        {
            return Err(MapError::Schema(format!(
                "[{}] columns {:?} do not match {:?}",
                P::TABLE,
                cols,
                P::COLUMNS
            )));
        }
    }
    let mut points = Vec::with_capacity(t.rows.len());
    for (i, row) in t.rows.iter().enumerate() {
        if row.len() != P::COLUMNS.len() {
            return Err(MapError::Schema(format!(
                "[{}] row {}: expected {} values, got {}",
                P::TABLE,
                i + 1,
                P::COLUMNS.len(),
                row.len()
            )));
        }
        points.push(P::from_row(row));
    }
    GriddedMap::new(grid.clone(), points)
}

/// Writes a map table with one row per line.
fn write_table<P: MapPoint>(out: &mut String, map: &GriddedMap<P>) {
    let fmt_row = |row: &[f64]| {
        let cells: Vec<String> = row
            .iter()
            .map(|v| toml::Value::Float(*v).to_string())
            .collect();
        format!("[{}]", cells.join(", "))
    };
    let cols: Vec<String> = P::COLUMNS.iter().map(|c| format!("\"{c}\"")).collect();
    out.push_str(&format!(
        "\n[{}]\ncolumns = [{}]\nrows = [\n",
        P::TABLE,
        cols.join(", ")
    ));
    for p in map.points() {
        out.push_str(&format!("    {},\n", fmt_row(&p.to_row())));
    }
    out.push_str("]\n");
}

#[derive(Serialize)]
struct Header<'a> {
    schema_version: u32,
    speed_grid: &'a [f64],
    battery: BatteryBlock,
}

impl Powertrain {
    /// Parses and validates a map file.
    pub fn from_toml_str(text: &str) -> Result<Self, MapError> {
        let file: MapFile = toml::from_str(text).map_err(|e| MapError::Parse(e.to_string()))?;
        if file.schema_version != MAP_SCHEMA_VERSION {
            return Err(MapError::Schema(format!(
                "unsupported schema_version {} (expected {})",
                file.schema_version, MAP_SCHEMA_VERSION
            )));
        }
        let grid = SpeedGrid::new(file.speed_grid)?;
        let b = &file.battery;
        let battery = BatteryParams::new(
            b.open_circuit_voltage,
            b.internal_resistance,
            b.energy_capacity,
            b.power_min,
            b.power_max,
            b.auxiliary_power,
        )?;
        Ok(Self {
            em: table_to_map(&grid, &file.em)?,
            ice: table_to_map(&grid, &file.ice)?,
            battery,
        })
    }

    /// Serialises to the map file format. EM and engine maps must share
    /// one speed grid.
    pub fn to_toml_string(&self) -> Result<String, MapError> {
        if self.em.grid() != self.ice.grid() {
            return Err(MapError::Schema(
                "em and ice maps must share one speed grid".into(),
            ));
        }
        let b = &self.battery;
        let header = Header {
            schema_version: MAP_SCHEMA_VERSION,
            speed_grid: self.em.grid().speeds(),
            battery: BatteryBlock {
                open_circuit_voltage: b.u_oc,
                internal_resistance: b.r_b,
                energy_capacity: b.e_bmax,
                power_min: b.p_bmin,
                power_max: b.p_bmax,
                auxiliary_power: b.p_aux,
            },
        };
        let mut out = toml::to_string(&header).map_err(|e| MapError::Parse(e.to_string()))?;
        write_table(&mut out, &self.em);
        write_table(&mut out, &self.ice);
        Ok(out)
    }
}
