//! Multipeakon dynamics for the Camassa-Holm equation with `kappa = 0`.
//!
//! The ansatz `u(x, t) = sum_i p_i(t) exp(-|x - q_i(t)|)` is a weak solution
//! exactly when `(q, p)` follow the canonical equations of
//!
//! ```text
//! H = 1/2 sum_i sum_j p_i p_j exp(-|q_i - q_j|)
//! ```
//!
//! i.e. `q_i' = sum_j p_j e^{-|q_i - q_j|}` and
//! `p_i' = sum_j p_i p_j sgn(q_i - q_j) e^{-|q_i - q_j|}`, with `sgn(0) = 0`.
//! `H` equals the kinetic energy `1/2 int (u^2 + u_x^2) dx` of the ansatz on
//! the line, and the total momentum `P = sum_i p_i` is conserved as well.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::field::{Field, Grid1D, Spectral};
use crate::integrate::{rk4_step, step_plan};
use crate::output::TrajectoryLog;

/// Gap below which an approaching peakon/antipeakon pair counts as collided.
pub const COLLISION_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakonEnsemble {
    q: Vec<f64>,
    p: Vec<f64>,
    t: f64,
}

impl PeakonEnsemble {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        Self::at_time(q, p, 0.0)
    }

    pub fn at_time(q: Vec<f64>, p: Vec<f64>, t: f64) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidParameter(
                "an ensemble needs at least one peakon".into(),
            ));
        }
        if q.len() != p.len() {
            return Err(Error::Shape(format!(
                "{} positions but {} momenta",
                q.len(),
                p.len()
            )));
        }
        check_finite(&q, "peakon positions")?;
        check_finite(&p, "peakon momenta")?;
        check_finite(&[t], "peakon time")?;
        Ok(Self { q, p, t })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Peakon speeds `q_i'`.
    pub fn velocities(&self) -> Vec<f64> {
        ode_rhs(self).0
    }

    fn packed(&self) -> Vec<f64> {
        let mut y = self.q.clone();
        y.extend_from_slice(&self.p);
        y
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn rhs_packed(y: &[f64]) -> Vec<f64> {
    let n = y.len() / 2;
    let (q, p) = y.split_at(n);
    let mut out = vec![0.0; 2 * n];
    for i in 0..n {
        let mut qd = 0.0;
        let mut pd = 0.0;
        for j in 0..n {
            let d = q[i] - q[j];
            let e = (-d.abs()).exp();
            qd += p[j] * e;
            pd += p[i] * p[j] * sgn(d) * e;
        }
        out[i] = qd;
        out[n + i] = pd;
    }
    out
}

/// `(q', p')` of the peakon system.
pub fn ode_rhs(ens: &PeakonEnsemble) -> (Vec<f64>, Vec<f64>) {
    let mut out = rhs_packed(&ens.packed());
    let pdot = out.split_off(ens.len());
    (out, pdot)
}

pub fn hamiltonian(ens: &PeakonEnsemble) -> f64 {
    hamiltonian_of(&ens.q, &ens.p)
}

pub(crate) fn hamiltonian_of(q: &[f64], p: &[f64]) -> f64 {
    let mut h = 0.0;
    for i in 0..q.len() {
        for j in 0..q.len() {
            h += p[i] * p[j] * (-(q[i] - q[j]).abs()).exp();
        }
    }
    0.5 * h
}

/// Total momentum `sum_i p_i`.
pub fn momentum(ens: &PeakonEnsemble) -> f64 {
    ens.p.iter().sum()
}

/// Opposite-sign pairs closer than [`COLLISION_GAP`], or pairs whose order
/// flipped between `before` and `after`.
fn detect_collision(before: &[f64], after: Option<&[f64]>, t: f64) -> Option<Error> {
    let n = before.len() / 2;
    let (q, p) = before.split_at(n);
    let rates = rhs_packed(before);
    for i in 0..n {
        for j in (i + 1)..n {
            if p[i] * p[j] >= 0.0 {
                continue;
            }
            let gap = q[j] - q[i];
            let flipped = after.is_some_and(|a| {
                let g = a[j] - a[i];
                !g.is_finite() || g * gap < 0.0
            });
            if gap.abs() < COLLISION_GAP || flipped {
                // closing speed of |gap|; near collision the gap shrinks
                // quadratically in the remaining time
                let closing = -sgn(gap) * (rates[j] - rates[i]);
                let t_collision = if closing > 0.0 {
                    t + 2.0 * gap.abs() / closing
                } else {
                    t
                };
                return Some(Error::PeakonCollision {
                    i,
                    j,
                    t,
                    gap: gap.abs(),
                    t_collision,
                });
            }
        }
    }
    None
}

/// Integrate with RK4 up to `ens.t + t_end`, step at most `dt`.
pub fn evolve(ens: &PeakonEnsemble, dt: f64, t_end: f64) -> Result<PeakonEnsemble> {
    evolve_observed(ens, dt, t_end, |_, _| {})
}

/// As [`evolve`], calling `observe(step, state)` after every step.
pub fn evolve_observed(
    ens: &PeakonEnsemble,
    dt: f64,
    t_end: f64,
    mut observe: impl FnMut(usize, &PeakonEnsemble),
) -> Result<PeakonEnsemble> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_end must be >= 0, got {t_end}"
        )));
    }
    let n = ens.len();
    let (steps, h) = step_plan(dt, t_end);
    let t0 = ens.t;
    let mut y = ens.packed();
    for k in 1..=steps {
        let t = t0 + (k - 1) as f64 * h;
        if let Some(err) = detect_collision(&y, None, t) {
            return Err(err);
        }
        let next = rk4_step(&y, h, |s| Ok(rhs_packed(s)))?;
        if let Some(err) = detect_collision(&y, Some(&next), t) {
            return Err(err);
        }
        check_finite(&next, "peakon state")?;
        y = next;
        let state = PeakonEnsemble {
            q: y[..n].to_vec(),
            p: y[n..].to_vec(),
            t: t0 + k as f64 * h,
        };
        observe(k, &state);
    }
    PeakonEnsemble::at_time(y[..n].to_vec(), y[n..].to_vec(), t0 + steps as f64 * h)
}

/// Evolve and record `t,q*,p*,H,P` every `every` steps (and at both ends).
pub fn evolve_logged(
    ens: &PeakonEnsemble,
    dt: f64,
    t_end: f64,
    every: usize,
) -> Result<(PeakonEnsemble, TrajectoryLog)> {
    let every = every.max(1);
    let (steps, _) = step_plan(dt, t_end);
    let mut log = TrajectoryLog::new(ens.len());
    log.push(ens.t, &ens.q, &ens.p, hamiltonian(ens), momentum(ens));
    let end = evolve_observed(ens, dt, t_end, |k, s| {
        if k % every == 0 || k == steps {
            log.push(s.t, &s.q, &s.p, hamiltonian(s), momentum(s));
        }
    })?;
    Ok((end, log))
}

/// How `exp(-|x|)` is made periodic on a finite grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodicKernel {
    /// Wrapped distance plus the two nearest images; error below `exp(-L/2)`.
    #[default]
    ImageSum,
    /// Full image sum `cosh(L/2 - d) / sinh(L/2)`.
    Exact,
}

pub fn sample_field(ens: &PeakonEnsemble, grid: Grid1D) -> Result<Field> {
    sample_field_with(ens, grid, PeriodicKernel::ImageSum)
}

pub fn sample_field_with(
    ens: &PeakonEnsemble,
    grid: Grid1D,
    kernel: PeriodicKernel,
) -> Result<Field> {
    let l = grid.length();
    let profile = |d: f64| -> f64 {
        match kernel {
            PeriodicKernel::ImageSum => (-d).exp() + (-(l - d)).exp() + (-(l + d)).exp(),
            PeriodicKernel::Exact => ((-d).exp() + (d - l).exp()) / (1.0 - (-l).exp()),
        }
    };
    Field::from_fn(grid, |x| {
        ens.q
            .iter()
            .zip(&ens.p)
            .map(|(&q, &p)| p * profile(grid.wrap(x - q).abs()))
            .sum()
    })
}

/// Band-limited peakon train: the Fourier series of the periodic kernel,
/// `2 p / (L (1 + k^2)) e^{-i k q}`, truncated below the Nyquist mode.
pub fn mollified_field(ens: &PeakonEnsemble, grid: Grid1D) -> Result<Field> {
    let spectral = Spectral::new(grid);
    let n = grid.n();
    let l = grid.length();
    let x0 = grid.point(0);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (j, c) in coeffs.iter_mut().enumerate() {
        if j == n / 2 {
            continue;
        }
        let k = grid.wavenumber(j);
        let weight = 2.0 / (l * (1.0 + k * k));
        for (&q, &p) in ens.q.iter().zip(&ens.p) {
            // sample at x_j = x0 + j h, so fold e^{i k x0} into the coefficient
            *c += p * weight * Complex64::from_polar(1.0, k * (x0 - q));
        }
        // undo the 1/n normalisation of the inverse transform
        *c *= n as f64;
    }
    Field::new(grid, spectral.inverse(coeffs))
}
