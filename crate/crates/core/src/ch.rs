//! Method-of-lines solver for the Camassa-Holm equation
//!
//! ```text
//! u_t + 2 kappa u_x + 3 u u_x - u_txx = 2 u_x u_xx + u u_xxx
//! ```
//!
//! on a periodic grid, with pseudospectral derivatives and classical RK4.
//!
//! Two algebraically equivalent right-hand sides are provided. The *local*
//! form is the literal transcription,
//!
//! ```text
//! u_t = (1 - d_xx)^-1 [ -2 kappa u_x - 3 u u_x + 2 u_x u_xx + u u_xxx ]
//! ```
//!
//! and the *nonlocal* form is
//!
//! ```text
//! u_t = -u u_x - d_x (1 - d_xx)^-1 ( u^2 + u_x^2 / 2 + 2 kappa u ).
//! ```
//!
//! Applying `(1 - d_xx)` to the nonlocal form and expanding
//! `(u u_x)_xx = 3 u_x u_xx + u u_xxx` and `d_x(u^2 + u_x^2/2) = 2 u u_x + u_x u_xx`
//! gives back the local form term by term. The nonlocal form is evaluated as
//! a single spectral derivative, `-d_x [ u^2/2 + (1 - d_xx)^-1 (...) ]`, so the
//! mean of `u` is conserved to rounding.
//!
//! With dealiasing on, every quadratic product is formed on a zero-padded
//! `3n/2` grid and transformed back, which is free of aliasing for all modes
//! below Nyquist (the 3/2 padding equivalent of the 2/3 rule). The Nyquist
//! mode is dropped, and [`ChSolver::prepare`] removes it from initial data.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Grid1D, Spectral};
use crate::integrate::{rk4_step, step_plan};

/// Default wave-breaking ceiling on `max |u_x|`.
pub const DEFAULT_SLOPE_CEILING: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsForm {
    Local,
    #[default]
    Nonlocal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChParams {
    pub kappa: f64,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    /// Exponential filter on the top third of the spectrum after each stage.
    pub filter: bool,
    /// Halt once `max |u_x|` exceeds this.
    pub slope_ceiling: f64,
}

impl ChParams {
    pub fn new(kappa: f64, dt: f64, t_end: f64) -> Result<Self> {
        let p = Self {
            kappa,
            dt,
            t_end,
            dealias: true,
            filter: false,
            slope_ceiling: DEFAULT_SLOPE_CEILING,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be >= 0, got {}",
                self.kappa
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        if !(self.slope_ceiling > 0.0) {
            return Err(Error::InvalidParameter(
                "slope ceiling must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChState {
    pub u: Field,
    pub t: f64,
}

/// The three conserved functionals
/// `H0 = int u`, `H1 = 1/2 int (u^2 + u_x^2)`, `H2 = 1/2 int (u^3 + u u_x^2 + 2 kappa u^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    pub h0: f64,
    pub h1: f64,
    pub h2: f64,
}

impl Invariants {
    pub fn as_array(&self) -> [f64; 3] {
        [self.h0, self.h1, self.h2]
    }

    /// Componentwise `|H(t) - H(0)| / |H(0)|`, falling back to the absolute
    /// change when `H(0) == 0`.
    pub fn relative_drift(&self, initial: &Invariants) -> [f64; 3] {
        let now = self.as_array();
        let then = initial.as_array();
        let mut out = [0.0; 3];
        for i in 0..3 {
            let d = (now[i] - then[i]).abs();
            out[i] = if then[i] != 0.0 { d / then[i].abs() } else { d };
        }
        out
    }
}

pub fn invariants(u: &Field, kappa: f64) -> Result<Invariants> {
    invariants_with(&Spectral::new(u.grid()), u, kappa)
}

/// Trapezoid sums on the `3n/2` padded grid, which integrate the quadratic
/// and cubic densities of a field without Nyquist content exactly.
pub fn invariants_with(spectral: &Spectral, u: &Field, kappa: f64) -> Result<Invariants> {
    let hat = spectral.forward(u.samples());
    let v = spectral.to_padded(&hat);
    let d = spectral.to_padded(&derivative(spectral, &hat, 1));
    let h = u.grid().length() / v.len() as f64;
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for (&v, &d) in v.iter().zip(&d) {
        s0 += v;
        s1 += v * v + d * d;
        s2 += v * v * v + v * d * d + 2.0 * kappa * v * v;
    }
    Ok(Invariants {
        h0: h * s0,
        h1: 0.5 * h * s1,
        h2: 0.5 * h * s2,
    })
}

/// Local-form right-hand side.
pub fn rhs_local(spectral: &Spectral, u: &Field, kappa: f64, dealias: bool) -> Result<Field> {
    let out = local_raw(spectral, u.samples(), kappa, dealias);
    Field::new(u.grid(), out)
}

/// Nonlocal-form right-hand side.
pub fn rhs_nonlocal(spectral: &Spectral, u: &Field, kappa: f64, dealias: bool) -> Result<Field> {
    let out = nonlocal_raw(spectral, u.samples(), kappa, dealias);
    Field::new(u.grid(), out)
}

/// Samples used for pointwise products: the padded grid when dealiasing.
fn physical(spectral: &Spectral, hat: &[Complex64], dealias: bool) -> Vec<f64> {
    if dealias {
        spectral.to_padded(hat)
    } else {
        spectral.inverse(hat.to_vec())
    }
}

fn spectrum(spectral: &Spectral, values: &[f64], dealias: bool) -> Vec<Complex64> {
    if dealias {
        spectral.from_padded(values)
    } else {
        spectral.forward(values)
    }
}

fn derivative(spectral: &Spectral, hat: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut d = hat.to_vec();
    spectral.apply_deriv(&mut d, order);
    d
}

fn local_raw(spectral: &Spectral, u: &[f64], kappa: f64, dealias: bool) -> Vec<f64> {
    let hat = spectral.forward(u);
    let ud = physical(spectral, &hat, dealias);
    let ux = physical(spectral, &derivative(spectral, &hat, 1), dealias);
    let uxx = physical(spectral, &derivative(spectral, &hat, 2), dealias);
    let uxxx = physical(spectral, &derivative(spectral, &hat, 3), dealias);
    let products: Vec<f64> = (0..ud.len())
        .map(|i| -3.0 * ud[i] * ux[i] + 2.0 * ux[i] * uxx[i] + ud[i] * uxxx[i])
        .collect();
    let mut rhs = spectrum(spectral, &products, dealias);
    let linear = derivative(spectral, &hat, 1);
    for (r, l) in rhs.iter_mut().zip(&linear) {
        *r -= 2.0 * kappa * l;
    }
    spectral.apply_helmholtz_inv(&mut rhs);
    spectral.inverse(rhs)
}

fn nonlocal_raw(spectral: &Spectral, u: &[f64], kappa: f64, dealias: bool) -> Vec<f64> {
    let hat = spectral.forward(u);
    let ud = physical(spectral, &hat, dealias);
    let ux = physical(spectral, &derivative(spectral, &hat, 1), dealias);
    let sq: Vec<f64> = ud.iter().map(|v| v * v).collect();
    let slope_sq: Vec<f64> = ux.iter().map(|v| v * v).collect();
    let sq_hat = spectrum(spectral, &sq, dealias);
    let slope_hat = spectrum(spectral, &slope_sq, dealias);
    // potential = u^2/2 + (1 - d_xx)^-1 (u^2 + u_x^2/2 + 2 kappa u)
    let mut source: Vec<Complex64> = sq_hat
        .iter()
        .zip(&slope_hat)
        .zip(&hat)
        .map(|((a, b), h)| a + 0.5 * b + 2.0 * kappa * h)
        .collect();
    spectral.apply_helmholtz_inv(&mut source);
    let mut potential: Vec<Complex64> = sq_hat
        .iter()
        .zip(&source)
        .map(|(a, s)| 0.5 * a + s)
        .collect();
    spectral.apply_deriv(&mut potential, 1);
    spectral.inverse(potential.into_iter().map(|c| -c).collect())
}

/// RK4 integrator with its own transform plans.
#[derive(Debug, Clone)]
pub struct ChSolver {
    spectral: Spectral,
    params: ChParams,
    form: RhsForm,
}

impl ChSolver {
    pub fn new(grid: Grid1D, params: ChParams, form: RhsForm) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            spectral: Spectral::new(grid),
            params,
            form,
        })
    }

    pub fn params(&self) -> &ChParams {
        &self.params
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    /// Initial state at `t = 0`; with dealiasing the Nyquist mode is removed.
    pub fn prepare(&self, u: Field) -> Result<ChState> {
        let u = if self.params.dealias {
            let mut hat = self.spectral.forward(u.samples());
            hat[u.grid().n() / 2] = Complex64::new(0.0, 0.0);
            Field::new(u.grid(), self.spectral.inverse(hat))?
        } else {
            u
        };
        Ok(ChState { u, t: 0.0 })
    }

    pub fn rhs(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = match self.form {
            RhsForm::Local => local_raw(&self.spectral, u, self.params.kappa, self.params.dealias),
            RhsForm::Nonlocal => {
                nonlocal_raw(&self.spectral, u, self.params.kappa, self.params.dealias)
            }
        };
        if self.params.filter {
            let mut hat = self.spectral.forward(&out);
            self.spectral.apply_exponential_filter(&mut hat);
            out = self.spectral.inverse(hat);
        }
        crate::error::check_finite(&out, "CH right-hand side")?;
        Ok(out)
    }

    pub fn max_slope(&self, u: &Field) -> Result<f64> {
        Ok(self.spectral.deriv(u, 1)?.max_abs())
    }

    pub fn invariants(&self, u: &Field) -> Result<Invariants> {
        invariants_with(&self.spectral, u, self.params.kappa)
    }

    /// Advance by `dt`, then check the breaking ceiling.
    pub fn step_by(&self, state: &ChState, dt: f64) -> Result<ChState> {
        let next = rk4_step(state.u.samples(), dt, |y| self.rhs(y))?;
        let t = state.t + dt;
        let u = Field::new(state.u.grid(), next)?;
        let max_slope = self.max_slope(&u)?;
        if max_slope > self.params.slope_ceiling {
            return Err(Error::WaveBreaking {
                t,
                max_slope,
                ceiling: self.params.slope_ceiling,
            });
        }
        Ok(ChState { u, t })
    }

    pub fn step(&self, state: &ChState) -> Result<ChState> {
        self.step_by(state, self.params.dt)
    }

    /// Integrate from `state.t` up to `state.t + t_end` with uniform steps no
    /// larger than `dt`. `observe` sees the state after each step together
    /// with the step index (starting at 1).
    pub fn run(
        &self,
        state: ChState,
        mut observe: impl FnMut(usize, &ChState) -> Result<()>,
    ) -> Result<ChState> {
        let (steps, h) = step_plan(self.params.dt, self.params.t_end);
        let t0 = state.t;
        let mut s = state;
        for k in 1..=steps {
            s = self.step_by(&s, h)?;
            s.t = t0 + k as f64 * h;
            observe(k, &s)?;
        }
        Ok(s)
    }
}

/// One RK4 step with a freshly built solver.
pub fn step_rk4(state: &ChState, params: &ChParams, form: RhsForm) -> Result<ChState> {
    ChSolver::new(state.u.grid(), *params, form)?.step(state)
}

/// Crest of the Fourier mode `m`, read from the phase of its coefficient.
/// For `u = A cos(k (x - xc)) + ...` returns `xc` wrapped into one period
/// `[-L/(2m), L/(2m))` around 0.
pub fn mode_crest(u: &Field, m: usize) -> Result<f64> {
    let grid = u.grid();
    if m == 0 || m >= grid.n() / 2 {
        return Err(Error::InvalidParameter(format!("mode {m} has no crest")));
    }
    let spectral = Spectral::new(grid);
    let hat = spectral.forward(u.samples());
    let k = 2.0 * PI * m as f64 / grid.length();
    let period = grid.length() / m as f64;
    let raw = -hat[m].arg() / k - 0.5 * grid.length();
    Ok((raw + 0.5 * period).rem_euclid(period) - 0.5 * period)
}

/// Location of the maximum sample, refined by a parabola through the three
/// neighbouring samples (periodic).
pub fn peak_position(u: &Field) -> f64 {
    let s = u.samples();
    let n = s.len();
    let (j, _) = s
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bj, bv), (j, &v)| {
            if v > bv {
                (j, v)
            } else {
                (bj, bv)
            }
        });
    let left = s[(j + n - 1) % n];
    let right = s[(j + 1) % n];
    let centre = s[j];
    let denom = left - 2.0 * centre + right;
    let offset = if denom.abs() > 0.0 {
        0.5 * (left - right) / denom
    } else {
        0.0
    };
    u.grid()
        .wrap(u.grid().point(j) + offset * u.grid().spacing())
}
