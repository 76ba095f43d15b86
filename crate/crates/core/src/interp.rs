//! Periodic piecewise-cubic Hermite interpolation on a uniform grid, with an
//! optional monotonicity-preserving slope limiter and a safeguarded Newton
//! inverse.
//!
//! Knot slopes come from the fourth-order centered difference. In monotone
//! mode they are clipped to `[0, 3 min(secant_left, secant_right)]`, which
//! keeps every cubic piece increasing and leaves the slopes of smooth,
//! well-resolved data untouched.

use crate::error::{Error, Result};
use crate::field::Grid1D;

/// Newton stops once the step in `x` falls below this.
pub const INVERSE_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct PeriodicCubic {
    x0: f64,
    h: f64,
    period: f64,
    /// Increase of the data over one period, `f(x + L) = f(x) + drift`.
    drift: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl PeriodicCubic {
    /// Interpolant of `values` sampled at the grid points.
    pub fn new(grid: Grid1D, values: Vec<f64>, drift: f64) -> Result<Self> {
        Self::build(grid, values, drift, false)
    }

    /// Strictly increasing interpolant; fails unless the samples (continued
    /// with `drift`) strictly increase.
    pub fn monotone(grid: Grid1D, values: Vec<f64>, drift: f64) -> Result<Self> {
        Self::build(grid, values, drift, true)
    }

    fn build(grid: Grid1D, values: Vec<f64>, drift: f64, monotone: bool) -> Result<Self> {
        let n = grid.n();
        if values.len() != n {
            return Err(Error::Shape(format!(
                "{} samples for {n} grid points",
                values.len()
            )));
        }
        let h = grid.spacing();
        let at = |j: isize| -> f64 {
            let w = j.rem_euclid(n as isize) as usize;
            values[w] + j.div_euclid(n as isize) as f64 * drift
        };
        let mut slopes = Vec::with_capacity(n);
        for j in 0..n as isize {
            let s = (-at(j + 2) + 8.0 * at(j + 1) - 8.0 * at(j - 1) + at(j - 2)) / (12.0 * h);
            if monotone {
                let left = (at(j) - at(j - 1)) / h;
                let right = (at(j + 1) - at(j)) / h;
                if !(left > 0.0 && right > 0.0) {
                    return Err(Error::NotDiffeomorphism(format!(
                        "samples not strictly increasing near index {j}"
                    )));
                }
                slopes.push(s.clamp(0.0, 3.0 * left.min(right)));
            } else {
                slopes.push(s);
            }
        }
        Ok(Self {
            x0: grid.point(0),
            h,
            period: grid.length(),
            drift,
            values,
            slopes,
        })
    }

    fn locate(&self, x: f64) -> (usize, f64, f64) {
        let n = self.values.len() as isize;
        let xi = (x - self.x0) / self.h;
        let cell = xi.floor();
        let tau = xi - cell;
        let cell = cell as isize;
        let periods = cell.div_euclid(n);
        (cell.rem_euclid(n) as usize, tau, periods as f64)
    }

    fn knot(&self, i: usize) -> (f64, f64) {
        let n = self.values.len();
        if i == n {
            (self.values[0] + self.drift, self.slopes[0])
        } else {
            (self.values[i], self.slopes[i])
        }
    }

    fn piece(&self, i: usize, tau: f64) -> (f64, f64) {
        let (v0, s0) = self.knot(i);
        let (v1, s1) = self.knot(i + 1);
        let h = self.h;
        let t2 = tau * tau;
        let t3 = t2 * tau;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * v0
            + (t3 - 2.0 * t2 + tau) * h * s0
            + (-2.0 * t3 + 3.0 * t2) * v1
            + (t3 - t2) * h * s1;
        let slope = ((6.0 * t2 - 6.0 * tau) * v0 + (-6.0 * t2 + 6.0 * tau) * v1) / h
            + (3.0 * t2 - 4.0 * tau + 1.0) * s0
            + (3.0 * t2 - 2.0 * tau) * s1;
        (value, slope)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (i, tau, periods) = self.locate(x);
        self.piece(i, tau).0 + periods * self.drift
    }

    pub fn eval_deriv(&self, x: f64) -> f64 {
        let (i, tau, _) = self.locate(x);
        self.piece(i, tau).1
    }

    /// Solve `eval(x) = target` for a monotone interpolant with positive drift.
    pub fn invert(&self, target: f64) -> Result<f64> {
        if !(self.drift > 0.0) || !target.is_finite() {
            return Err(Error::InvalidParameter(
                "inverse needs an increasing interpolant and a finite target".into(),
            ));
        }
        let n = self.values.len();
        let base = self.values[0];
        let periods = ((target - base) / self.drift).floor();
        let y = target - periods * self.drift;
        // knots v_0 < v_1 < ... < v_n = v_0 + drift; find v_i <= y < v_{i+1}
        let i = match self.values.partition_point(|&v| v <= y) {
            0 => 0,
            p => (p - 1).min(n - 1),
        };
        let (v0, _) = self.knot(i);
        let (v1, _) = self.knot(i + 1);
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut tau = ((y - v0) / (v1 - v0)).clamp(0.0, 1.0);
        for _ in 0..100 {
            let (value, slope) = self.piece(i, tau);
            let residual = value - y;
            if residual == 0.0 {
                break;
            }
            if residual > 0.0 {
                hi = tau;
            } else {
                lo = tau;
            }
            let mut next = if slope > 0.0 {
                tau - residual / (slope * self.h)
            } else {
                f64::NAN
            };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - tau).abs() * self.h;
            tau = next;
            if step < INVERSE_TOLERANCE {
                break;
            }
        }
        Ok(self.x0 + (i as f64 + tau) * self.h + periods * self.period)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid1D {
        Grid1D::new(64, 2.0 * PI).unwrap()
    }

    #[test]
    fn reproduces_knots_and_periodicity() {
        let g = grid();
        let vals: Vec<f64> = g.points().iter().map(|x| x.sin()).collect();
        let c = PeriodicCubic::new(g, vals.clone(), 0.0).unwrap();
        for (j, v) in vals.iter().enumerate() {
            assert!((c.eval(g.point(j)) - v).abs() < 1e-15);
            assert!((c.eval(g.point(j) + g.length()) - v).abs() < 1e-14);
        }
    }

    #[test]
    fn fourth_order_accuracy() {
        let err = |n: usize| {
            let g = Grid1D::new(n, 2.0 * PI).unwrap();
            let vals = g.points().iter().map(|x| x.sin()).collect();
            let c = PeriodicCubic::new(g, vals, 0.0).unwrap();
            (0..200)
                .map(|i| -3.0 + 0.0317 * i as f64)
                .map(|x| (c.eval(x) - x.sin()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(64) / err(128);
        assert!(ratio > 14.0, "{ratio}");
    }

    #[test]
    fn monotone_inverse_round_trips() {
        let g = grid();
        let gamma: Vec<f64> = g
            .points()
            .iter()
            .map(|x| x + 0.3 * (x - 0.2).sin())
            .collect();
        let c = PeriodicCubic::monotone(g, gamma, g.length()).unwrap();
        for i in 0..100 {
            let x = -7.0 + 0.14 * i as f64;
            let y = c.invert(x).unwrap();
            assert!((c.eval(y) - x).abs() < 1e-12, "x={x} y={y} f={}", c.eval(y));
        }
    }

    #[test]
    fn monotone_rejects_decreasing_data() {
        let g = grid();
        let gamma: Vec<f64> = g.points().iter().map(|x| x + 1.5 * x.sin()).collect();
        assert!(matches!(
            PeriodicCubic::monotone(g, gamma, g.length()),
            Err(Error::NotDiffeomorphism(_))
        ));
    }

    #[test]
    fn limiter_inactive_on_smooth_near_identity_data() {
        let g = grid();
        let gamma: Vec<f64> = g.points().iter().map(|x| x + 0.05 * x.sin()).collect();
        let plain = PeriodicCubic::new(g, gamma.clone(), g.length()).unwrap();
        let mono = PeriodicCubic::monotone(g, gamma, g.length()).unwrap();
        assert_eq!(plain.slopes, mono.slopes);
    }
}
