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

//! Discrete-time closed-loop simulation.
//!
//! Each step measures the SOC with bounded noise, runs the controller and
//! integrates `x' = x - Ts·u/E`. Runs are sequential and deterministic for a
//! given seed; independent runs can be executed in parallel.

mod scenario;
mod trace;

pub use scenario::{Scenario, ScenarioError, ScenarioStep};
pub use trace::{
    SimulationTrace, SummaryFile, SummaryMetrics, TraceRecord, SUMMARY_SCHEMA_VERSION,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arbitration::OperatingPoint;
use crate::config::{ControllerConfig, SocBounds};
use crate::control::{decide, Controller};
use crate::error::{Error, Result};
use crate::powertrain::Powertrain;

/// Clamps a SOC reference into `[x_min + ε, x_max - ε]`.
pub fn saturate_soc_ref(soc_ref: f64, soc: &SocBounds, epsilon: f64) -> Result<f64> {
    soc.saturate(soc_ref, epsilon)
}

/// SOC measurement error, uniform on `[-beta, beta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub beta: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(beta: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::Config(format!(
                "noise bound must lie in [0, 1), got {beta}"
            )));
        }
        Ok(Self { beta, seed })
    }

    pub fn noiseless() -> Self {
        Self { beta: 0.0, seed: 0 }
    }

    pub fn sampler(&self) -> NoiseSampler {
        NoiseSampler {
            beta: self.beta,
            rng: ChaCha8Rng::seed_from_u64(self.seed),
        }
    }
}

/// Stream of measurement errors drawn from a [`NoiseModel`].
#[derive(Debug, Clone)]
pub struct NoiseSampler {
    beta: f64,
    rng: ChaCha8Rng,
}

impl NoiseSampler {
    pub fn draw(&mut self) -> f64 {
        if self.beta == 0.0 {
            0.0
        } else {
            self.rng.random_range(-self.beta..=self.beta)
        }
    }
}

/// A step error together with where it happened.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("step {step} (t = {time} s): {source}")]
pub struct SimError {
    pub step: usize,
    pub time: f64,
    pub source: Error,
}

/// Advances the true SOC `x_t` by one sampling period.
pub fn step(
    x_t: f64,
    reference: &ScenarioStep,
    controller: Controller,
    powertrain: &Powertrain,
    cfg: &ControllerConfig,
    noise: &mut NoiseSampler,
) -> Result<(f64, TraceRecord)> {
    let x_m = (x_t + noise.draw()).clamp(0.0, 1.0);
    let slice = powertrain.at(reference.speed_ref);
    let op = OperatingPoint::new(reference.speed_ref, reference.torque_ref, x_m)?;
    let d = decide(
        controller,
        &slice,
        &op,
        reference.soc_ref,
        reference.equivalent_factor_ref,
        cfg,
    )?;
    let next = x_t - cfg.sample_time * d.control / slice.battery.e_bmax;
    let t = d.torques;
    let record = TraceRecord {
        time: reference.time,
        speed: reference.speed_ref,
        demand: reference.torque_ref,
        deliverable: d.bounds.deliverable_demand,
        soc_ref: reference.soc_ref,
        saturated_soc_ref: d.soc_ref,
        true_soc: x_t,
        measured_soc: x_m,
        u_min: d.bounds.u_min,
        u_max: d.bounds.u_max,
        u_unconstrained: d.unconstrained,
        u: d.control,
        engine: t.engine,
        em: t.em,
        additional_brake: t.additional_brake,
        service_brake: t.service_brake,
        fuel_rate: d.fuel_rate,
        undelivered: reference.torque_ref - t.total(),
        equivalent_factor: d.equivalent_factor,
        feedback_gain: d.feedback_gain,
        u_min_limit: d.bounds.u_min_limit,
        u_max_limit: d.bounds.u_max_limit,
    };
    Ok((next, record))
}

/// Simulates a whole scenario from `initial_soc`.
///
/// Scenarios not sampled at `cfg.sample_time` are resampled with a
/// zero-order hold first.
pub fn run(
    scenario: &Scenario,
    controller: Controller,
    powertrain: &Powertrain,
    cfg: &ControllerConfig,
    initial_soc: f64,
    noise: &NoiseModel,
) -> std::result::Result<(SimulationTrace, SummaryMetrics), SimError> {
    let fail = |step: usize, time: f64| move |source: Error| SimError { step, time, source };
    let t0 = scenario.steps()[0].time;
    cfg.validate().map_err(fail(0, t0))?;
    if !(cfg.soc.min..=cfg.soc.max).contains(&initial_soc) {
        return Err(fail(0, t0)(Error::Contract(format!(
            "initial SOC {initial_soc} outside [{}, {}]",
            cfg.soc.min, cfg.soc.max
        ))));
    }

    let resampled;
    let scenario = if scenario.is_uniform(cfg.sample_time) {
        scenario
    } else {
        resampled = scenario.resample(cfg.sample_time);
        &resampled
    };

    let mut sampler = noise.sampler();
    let mut x = initial_soc;
    let mut records = Vec::with_capacity(scenario.len());
    for (k, reference) in scenario.steps().iter().enumerate() {
        let (next, rec) = step(x, reference, controller, powertrain, cfg, &mut sampler)
            .map_err(fail(k, reference.time))?;
        records.push(rec);
        x = next;
    }
    let trace = SimulationTrace {
        controller: controller.name().to_string(),
        records,
        final_soc: x,
    };
    let summary = trace.summary(cfg);
    Ok((trace, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_is_bounded_and_seeded() {
        let model = NoiseModel::new(0.002, 7).unwrap();
        let a: Vec<f64> = {
            let mut s = model.sampler();
            (0..1000).map(|_| s.draw()).collect()
        };
        let mut s = model.sampler();
        let b: Vec<f64> = (0..1000).map(|_| s.draw()).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|e| e.abs() <= 0.002));
        assert!(a.iter().any(|e| *e != a[0]));
        assert_eq!(NoiseModel::noiseless().sampler().draw(), 0.0);
    }

    #[test]
    fn saturation() {
        let soc = ControllerConfig::default().soc;
        assert!((saturate_soc_ref(0.95, &soc, 0.005).unwrap() - 0.895).abs() < 1e-15);
    }
}
