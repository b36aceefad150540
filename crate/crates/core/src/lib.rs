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

//! Optimal power-split control for parallel hybrid electric powertrains.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arbitration;
pub mod cli;
pub mod config;
pub mod control;
pub mod ecms;
pub mod error;
pub mod fixture;
pub mod lqt;
pub mod powertrain;
pub mod sim;

pub use error::{Error, Result};
