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

//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

use hevsplit::arbitration::{compute_bounds, ControlBounds, OperatingPoint};
use hevsplit::config::ControllerConfig;
use hevsplit::powertrain::{BatteryParams, EmPoint, IcePoint, SpeedSlice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bisection for an increasing function on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn em_power(em: &EmPoint, m: f64) -> f64 {
    em.d0 + em.d1 * m + em.d2 * m * m
}

/// EM torque for electrical power `p` on the increasing branch.
pub fn em_torque(em: &EmPoint, p: f64) -> f64 {
    let vertex = -em.d1 / (2.0 * em.d2);
    let mut hi = vertex.abs().max(1.0);
    while em_power(em, vertex + hi) < p {
        hi *= 2.0;
    }
    bisect(|m| em_power(em, m), p, vertex, vertex + hi)
}

pub fn battery_electrical(b: &BatteryParams, u: f64) -> f64 {
    u - b.r_b * u * u / (b.u_oc * b.u_oc)
}

/// Chemical power for electrical power `p` on the increasing branch.
pub fn battery_chemical(b: &BatteryParams, p: f64) -> f64 {
    let cap = b.u_oc * b.u_oc / (2.0 * b.r_b);
    let mut lo = -1.0;
    while battery_electrical(b, lo) > p {
        lo *= 2.0;
    }
    bisect(|u| battery_electrical(b, u), p, lo, cap)
}

pub fn fuel(ice: &IcePoint, m: f64) -> f64 {
    ice.a0 + ice.a1 * m + ice.a2 * m * m
}

/// Exact fuel rate at chemical battery power `u` for deliverable demand
/// `dem`.
pub fn exact_fuel(s: &SpeedSlice, dem: f64, u: f64) -> f64 {
    let m_em = em_torque(&s.em, battery_electrical(&s.battery, u) - s.battery.p_aux);
    fuel(&s.ice, s.ice.m_min.max(dem - m_em))
}

/// Same as [`exact_fuel`] with the closed-form inversions, for sweeps where
/// bisection is too slow.
pub fn exact_fuel_closed(s: &SpeedSlice, dem: f64, u: f64) -> f64 {
    let b = &s.battery;
    let p = battery_electrical(b, u) - b.p_aux;
    let em = &s.em;
    let disc = (em.d1 * em.d1 - 4.0 * em.d2 * (em.d0 - p)).max(0.0);
    let m_em = (-em.d1 + disc.sqrt()) / (2.0 * em.d2);
    fuel(&s.ice, s.ice.m_min.max(dem - m_em))
}

/// Minimum of `f` on an `n`-point uniform grid over `[lo, hi]`.
pub fn grid_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    (0..n)
        .map(|i| {
            let u = if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            };
            (u, f(u))
        })
        .fold((lo, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
}

/// Finite-horizon Riccati recursion `P <- P/(1 + N·P) + Q`, `N = B²/R`,
/// iterated from `P = Q` until successive values agree to `tol`.
/// Returns the limit and the number of iterations.
pub fn riccati_iterate(q: f64, r: f64, b: f64, tol: f64, max_iter: usize) -> (f64, usize) {
    let n = b * b / r;
    let mut p = q;
    for k in 1..=max_iter {
        let next = p / (1.0 + n * p) + q;
        if (next - p).abs() <= tol * next {
            return (next, k);
        }
        p = next;
    }
    (p, max_iter)
}

/// Least squares for `y ≈ c0 + c1·x + c2·x²` via the normal equations and
/// Cramer's rule.
pub fn quadratic_fit(xs: &[f64], ys: &[f64]) -> [f64; 3] {
    let mut s = [0.0; 5];
    let mut t = [0.0; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let mut p = 1.0;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += p;
            if k < 3 {
                t[k] += p * y;
            }
            p *= x;
        }
    }
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(m);
    let mut c = [0.0; 3];
    for (j, cj) in c.iter_mut().enumerate() {
        let mut mj = m;
        for i in 0..3 {
            mj[i][j] = t[i];
        }
        *cj = det3(mj) / d;
    }
    c
}

/// Equilibrium EM torque from the electrical balance `P_mel = -P_aux`,
/// found by bisection.
pub fn equilibrium_torque(s: &SpeedSlice) -> f64 {
    em_torque(&s.em, -s.battery.p_aux)
}

/// Random operating point on a powertrain.
pub struct Sample {
    pub slice: SpeedSlice,
    pub op: OperatingPoint,
    pub bounds: ControlBounds,
}

pub fn sample_points(
    pt: &hevsplit::powertrain::Powertrain,
    cfg: &ControllerConfig,
    n: usize,
    seed: u64,
) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let speeds = pt.em.grid().speeds();
    let (w_lo, w_hi) = (speeds[0], speeds[speeds.len() - 1]);
    (0..n)
        .map(|_| {
            let w = rng.random_range(w_lo..w_hi);
            let slice = pt.at(w);
            let dem = rng.random_range(-3000.0..3000.0);
            let x = rng.random_range(cfg.soc.min..cfg.soc.max);
            let op = OperatingPoint::new(w, dem, x).unwrap();
            let bounds = compute_bounds(&op, &slice, cfg).unwrap();
            Sample { slice, op, bounds }
        })
        .collect()
}

/// Operating points with demand inside `[M_Emin + M_Meq, M_Emax + M_Meq]`
/// and SOC between the margins.
pub fn sample_window_points(
    pt: &hevsplit::powertrain::Powertrain,
    cfg: &ControllerConfig,
    n: usize,
    seed: u64,
) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let speeds = pt.em.grid().speeds();
    let (w_lo, w_hi) = (speeds[0], speeds[speeds.len() - 1]);
    (0..n)
        .map(|_| {
            let w = rng.random_range(w_lo..w_hi);
            let slice = pt.at(w);
            let m_eq = equilibrium_torque(&slice);
            let dem = rng.random_range(slice.ice.m_min + m_eq..slice.ice.m_max + m_eq);
            let x = rng
                .random_range(cfg.soc.min + cfg.epsilon + 0.01..cfg.soc.max - cfg.epsilon - 0.01);
            let op = OperatingPoint::new(w, dem, x).unwrap();
            let bounds = compute_bounds(&op, &slice, cfg).unwrap();
            Sample { slice, op, bounds }
        })
        .collect()
}
