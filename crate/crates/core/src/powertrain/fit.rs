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

//! Per-speed least-squares fitting of quadratic torque maps.

use nalgebra::{DMatrix, DVector};

use super::{EmMap, EmPoint, IceMap, IcePoint, MapError, SpeedGrid};

/// One measured operating point: electrical power (W) for an EM sample,
/// fuel rate (g/s) for an engine sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSample {
    pub speed: f64,
    pub torque: f64,
    pub value: f64,
}

/// Groups samples by exact speed, ascending.
fn group_by_speed(samples: &[MapSample]) -> Vec<(f64, Vec<(f64, f64)>)> {
    let mut sorted: Vec<_> = samples.to_vec();
    sorted.sort_by(|a, b| a.speed.total_cmp(&b.speed));
    let mut groups: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for s in sorted {
        match groups.last_mut() {
            Some((w, g)) if *w == s.speed => g.push((s.torque, s.value)),
            _ => groups.push((s.speed, vec![(s.torque, s.value)])),
        }
    }
    groups
}

fn distinct_torques(points: &[(f64, f64)]) -> usize {
    let mut t: Vec<f64> = points.iter().map(|p| p.0).collect();
    t.sort_by(f64::total_cmp);
    t.dedup();
    t.len()
}

/// Solves `min |A x - b|` by SVD; `None` when `A` is rank deficient.
fn least_squares(a: DMatrix<f64>, b: DVector<f64>) -> Option<DVector<f64>> {
    let cols = a.ncols();
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let eps = 1e-10 * smax.max(f64::MIN_POSITIVE);
    if svd.rank(eps) < cols {
        return None;
    }
    svd.solve(&b, eps).ok()
}

fn torque_scale(points: &[(f64, f64)]) -> f64 {
    points
        .iter()
        .map(|p| p.0.abs())
        .fold(0.0, f64::max)
        .max(1.0)
}

fn check_samples(groups: &[(f64, Vec<(f64, f64)>)]) -> Result<(), MapError> {
    for (speed, pts) in groups {
        if pts.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(MapError::Fit {
                speed: *speed,
                reason: "non-finite sample".into(),
            });
        }
        let n = distinct_torques(pts);
        if n < 3 {
            return Err(MapError::Fit {
                speed: *speed,
                reason: format!("rank deficient: {n} distinct torques, need 3"),
            });
        }
    }
    Ok(())
}

/// Fits `d0 + d1·M + d2·M²` at every sampled speed. Torque limits are the
/// sampled torque range at each speed. The result is validated like any
/// other map, so fits with `d2 <= 0` are rejected.
pub fn fit_em_map(samples: &[MapSample]) -> Result<EmMap, MapError> {
    let groups = group_by_speed(samples);
    check_samples(&groups)?;
    let mut points = Vec::with_capacity(groups.len());
    for (speed, pts) in &groups {
        let s = torque_scale(pts);
        let a = DMatrix::from_fn(pts.len(), 3, |i, j| (pts[i].0 / s).powi(j as i32));
        let b = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
        let c = least_squares(a, b).ok_or_else(|| MapError::Fit {
            speed: *speed,
            reason: "rank deficient design matrix".into(),
        })?;
        let (lo, hi) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.0), hi.max(p.0))
            });
        points.push(EmPoint {
            d0: c[0],
            d1: c[1] / s,
            d2: c[2] / (s * s),
            m_min: lo,
            m_max: hi,
        });
    }
    let grid = SpeedGrid::new(groups.iter().map(|g| g.0).collect())?;
    EmMap::new(grid, points)
}

/// Fits `a0 + a1·M + a2·M²` at every sampled speed with the fuel rate
/// pinned to zero at the smallest sampled torque, which becomes `m_min`.
/// `additional_brake_min` supplies the retarder limit for each speed.
pub fn fit_ice_map(
    samples: &[MapSample],
    additional_brake_min: impl Fn(f64) -> f64,
) -> Result<IceMap, MapError> {
    let groups = group_by_speed(samples);
    check_samples(&groups)?;
    let mut points = Vec::with_capacity(groups.len());
    for (speed, pts) in &groups {
        let s = torque_scale(pts);
        let (lo, hi) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.0), hi.max(p.0))
            });
        // basis vanishing at m_min: (M - m_min), (M² - m_min²)
        let a = DMatrix::from_fn(pts.len(), 2, |i, j| {
            let m = pts[i].0 / s;
            let m0 = lo / s;
            if j == 0 {
                m - m0
            } else {
                m * m - m0 * m0
            }
        });
        let b = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
        let c = least_squares(a, b).ok_or_else(|| MapError::Fit {
            speed: *speed,
            reason: "rank deficient design matrix".into(),
        })?;
        let a1 = c[0] / s;
        let a2 = c[1] / (s * s);
        points.push(IcePoint {
            a0: -(a1 * lo + a2 * lo * lo),
            a1,
            a2,
            m_min: lo,
            m_max: hi,
            m_abrk_min: additional_brake_min(*speed),
        });
    }
    let grid = SpeedGrid::new(groups.iter().map(|g| g.0).collect())?;
    IceMap::new(grid, points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn em_samples(speeds: &[f64], d: (f64, f64, f64)) -> Vec<MapSample> {
        let mut out = Vec::new();
        for &w in speeds {
            for i in 0..11 {
                let m = -300.0 + 60.0 * i as f64;
                out.push(MapSample {
                    speed: w,
                    torque: m,
                    value: d.0 + d.1 * m + d.2 * m * m,
                });
            }
        }
        out
    }

    #[test]
    fn exact_quadratic_is_recovered() {
        let map = fit_em_map(&em_samples(&[100.0, 200.0], (500.0, 200.0, 0.1))).unwrap();
        for p in map.points() {
            assert!((p.d0 - 500.0).abs() <= 1e-6 * 500.0);
            assert!((p.d1 - 200.0).abs() <= 1e-6 * 200.0);
            assert!((p.d2 - 0.1).abs() <= 1e-6 * 0.1);
            assert_eq!((p.m_min, p.m_max), (-300.0, 300.0));
        }
        assert_eq!(map.grid().speeds(), &[100.0, 200.0]);
    }

    #[test]
    fn negative_curvature_is_a_map_error() {
        let err = fit_em_map(&em_samples(&[100.0, 200.0], (500.0, 200.0, -0.1))).unwrap_err();
        assert!(
            matches!(err, MapError::Invalid { column: "d2", .. }),
            "{err:?}"
        );
    }

    #[test]
    fn too_few_torques_is_a_fit_error() {
        let s: Vec<_> = [0.0, 10.0, 10.0, 0.0]
            .iter()
            .map(|&m| MapSample {
                speed: 100.0,
                torque: m,
                value: 1.0 + m,
            })
            .collect();
        assert!(matches!(fit_em_map(&s), Err(MapError::Fit { .. })));
    }

    #[test]
    fn engine_fit_pins_zero_fuel_at_minimum_torque() {
        let (a1, a2, m0) = (0.01, 1e-6, -150.0);
        let a0 = -(a1 * m0 + a2 * m0 * m0);
        let samples: Vec<_> = [100.0, 150.0]
            .iter()
            .flat_map(|&w| {
                (0..20).map(move |i| {
                    let m = m0 + 100.0 * i as f64;
                    MapSample {
                        speed: w,
                        torque: m,
                        value: a0 + a1 * m + a2 * m * m,
                    }
                })
            })
            .collect();
        let map = fit_ice_map(&samples, |w| -4.0 * w).unwrap();
        let p = map.points()[1];
        assert!((p.a1 - a1).abs() < 1e-9 * a1);
        assert!((p.a2 - a2).abs() < 1e-9);
        assert!(p.fuel(p.m_min).abs() < 1e-12);
        assert_eq!(p.m_abrk_min, -600.0);
    }
}
