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

//! Drive scenarios: speed, torque demand and SOC reference over time.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Scenario validation or parse failure. `line` is the 1-based line in the
/// source file when known.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}{reason}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ScenarioError {
    pub line: Option<usize>,
    pub reason: String,
}

impl ScenarioError {
    fn at(line: usize, reason: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            reason: reason.into(),
        }
    }
}

/// Reference values at one time instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioStep {
    #[serde(rename = "time_s")]
    pub time: f64,
    #[serde(rename = "speed_rad_s")]
    pub speed_ref: f64,
    #[serde(rename = "torque_nm")]
    pub torque_ref: f64,
    pub soc_ref: f64,
    /// Reference equivalent factor (g/J) for ECMS; the configured value is
    /// used when absent.
    #[serde(rename = "equivalent_factor_g_j", default)]
    pub equivalent_factor_ref: Option<f64>,
}

/// Time-ordered reference samples. Between samples the references are held
/// constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    steps: Vec<ScenarioStep>,
}

impl Scenario {
    pub fn new(steps: Vec<ScenarioStep>) -> Result<Self, ScenarioError> {
        if steps.is_empty() {
            return Err(ScenarioError {
                line: None,
                reason: "scenario has no rows".into(),
            });
        }
        for (i, s) in steps.iter().enumerate() {
            // header occupies line 1
            let line = i + 2;
            if !(s.time.is_finite() && s.torque_ref.is_finite()) {
                return Err(ScenarioError::at(line, "time and torque must be finite"));
            }
            if !(s.speed_ref > 0.0 && s.speed_ref.is_finite()) {
                return Err(ScenarioError::at(
                    line,
                    format!("speed must be positive, got {}", s.speed_ref),
                ));
            }
            if !(0.0..=1.0).contains(&s.soc_ref) {
                return Err(ScenarioError::at(
                    line,
                    format!("SOC reference must lie in [0, 1], got {}", s.soc_ref),
                ));
            }
            if let Some(f) = s.equivalent_factor_ref {
                if !(f >= 0.0 && f.is_finite()) {
                    return Err(ScenarioError::at(
                        line,
                        format!("equivalent factor must be finite and >= 0, got {f}"),
                    ));
                }
            }
            if i > 0 && !(s.time > steps[i - 1].time) {
                return Err(ScenarioError::at(line, "time must be strictly increasing"));
            }
        }
        Ok(Self { steps })
    }

    pub fn steps(&self) -> &[ScenarioStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// True when consecutive samples are `sample_time` apart.
    pub fn is_uniform(&self, sample_time: f64) -> bool {
        self.steps
            .windows(2)
            .all(|w| ((w[1].time - w[0].time) - sample_time).abs() <= 1e-9 * sample_time)
    }

    /// Zero-order-hold resampling onto `t0 + k·sample_time` up to and
    /// including the last sample time.
    pub fn resample(&self, sample_time: f64) -> Self {
        let t0 = self.steps[0].time;
        let t_end = self.steps[self.steps.len() - 1].time;
        let n = ((t_end - t0) / sample_time + 1e-9).floor() as usize;
        let mut src = 0;
        let steps = (0..=n)
            .map(|k| {
                let t = t0 + k as f64 * sample_time;
                while src + 1 < self.steps.len()
                    && self.steps[src + 1].time <= t + 1e-9 * sample_time
                {
                    src += 1;
                }
                ScenarioStep {
                    time: t,
                    ..self.steps[src]
                }
            })
            .collect();
        Self { steps }
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, ScenarioError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut steps = Vec::new();
        for row in rdr.deserialize::<ScenarioStep>() {
            steps.push(row.map_err(csv_error)?);
        }
        Self::new(steps)
    }

    pub fn from_csv_str(text: &str) -> Result<Self, ScenarioError> {
        Self::from_csv_reader(text.as_bytes())
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), ScenarioError> {
        let mut w = csv::Writer::from_writer(writer);
        for s in &self.steps {
            w.serialize(s).map_err(csv_error)?;
        }
        w.flush().map_err(|e| ScenarioError {
            line: None,
            reason: e.to_string(),
        })
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

fn csv_error(e: csv::Error) -> ScenarioError {
    ScenarioError {
        line: e.position().map(|p| p.line() as usize),
        reason: match e.kind() {
            csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
            _ => e.to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "time_s,speed_rad_s,torque_nm,soc_ref,equivalent_factor_g_j\n\
                        0,200,100,0.65,\n\
                        0.05,200,-50,0.6,5e-5\n\
                        0.1,210,0,0.6,\n";

    #[test]
    fn parse_and_resample() {
        let s = Scenario::from_csv_str(TEXT).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.steps()[1].equivalent_factor_ref, Some(5e-5));
        assert!(!s.is_uniform(0.02));
        let r = s.resample(0.02);
        assert_eq!(r.len(), 6);
        let torques: Vec<f64> = r.steps().iter().map(|x| x.torque_ref).collect();
        assert_eq!(torques, [100.0, 100.0, 100.0, -50.0, -50.0, 0.0]);
        assert!(r.is_uniform(0.02));
    }

    #[test]
    fn round_trip() {
        let s = Scenario::from_csv_str(TEXT).unwrap();
        assert_eq!(Scenario::from_csv_str(&s.to_csv_string()).unwrap(), s);
    }

    #[test]
    fn errors_name_lines() {
        let bad = "time_s,speed_rad_s,torque_nm,soc_ref\n0,200,1,0.5\n0,200,1,0.5\n";
        let e = Scenario::from_csv_str(bad).unwrap_err();
        assert_eq!(e.line, Some(3));
        let bad = "time_s,speed_rad_s,torque_nm,soc_ref\n0,abc,1,0.5\n";
        assert_eq!(Scenario::from_csv_str(bad).unwrap_err().line, Some(2));
    }
}
