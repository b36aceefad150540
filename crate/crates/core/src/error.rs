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

//! Error types shared by the control path.

use thiserror::Error;

/// Errors raised while evaluating the powertrain model or a controller.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the validity range of a model function.
    #[error("{quantity} = {value} violates {bound} = {limit}")]
    Domain {
        quantity: &'static str,
        value: f64,
        bound: &'static str,
        limit: f64,
    },

    /// A requested power cannot be produced by the component.
    #[error("infeasible {quantity}: {value} W is outside the reachable range (limit {limit} W)")]
    InfeasiblePower {
        quantity: &'static str,
        value: f64,
        limit: f64,
    },

    /// The EM cannot supply the auxiliary load at this speed.
    #[error("auxiliary load cannot be covered by the electric machine at {speed} rad/s")]
    AuxiliariesUndeliverable { speed: f64 },

    /// The map and battery parameters leave no admissible battery power.
    #[error("arbitration failed at {speed} rad/s: {reason}")]
    Arbitration { speed: f64, reason: &'static str },

    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A state of charge fell outside the open domain of a penalty function.
    #[error("state of charge {soc} outside barrier domain ({min}, {max})")]
    BarrierDomain { soc: f64, min: f64, max: f64 },

    /// The scalar Riccati equation has no positive root.
    #[error("Riccati equation undefined for Q = {q}, R = {r}, B = {b}")]
    RiccatiUndefined { q: f64, r: f64, b: f64 },

    /// The switching threshold of the equivalent factor is undefined.
    #[error("equivalent-factor threshold undefined: EM discriminant {0} is not positive")]
    ThresholdUndefined(f64),

    /// Invalid configuration values.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
