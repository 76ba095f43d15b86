//! Periodic grid, sampled scalar fields and the Fourier operators built on them.
//!
//! The domain is `[-L/2, L/2)` with `n` equispaced points. Every spectral
//! operator works on the discrete Fourier coefficients of the samples, so it is
//! exact for band-limited data. Mode index `m` maps to the physical wavenumber
//! `k = 2*pi*m/L`; the Nyquist mode `m = n/2` is dropped by odd derivatives.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};

/// Smallest admissible point count.
pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    n: usize,
    length: f64,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < MIN_POINTS || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "point count must be even and >= {MIN_POINTS}, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "domain length must be positive and finite, got {length}"
            )));
        }
        Ok(Self { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// `x_j = -L/2 + j*h`.
    pub fn point(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Signed Fourier mode index of FFT slot `j`. The Nyquist slot reports `+n/2`.
    pub fn mode(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Physical wavenumber of FFT slot `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * PI * self.mode(j) as f64 / self.length
    }

    /// Highest mode kept by the 2/3 dealiasing rule: quadratic products of
    /// modes `|m| <= cutoff` alias only onto discarded modes.
    pub fn dealias_cutoff(&self) -> usize {
        (self.n - 1) / 3
    }

    /// Wrap `x` into `[-L/2, L/2)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let l = self.length;
        (x + 0.5 * l).rem_euclid(l) - 0.5 * l
    }
}

/// Scalar samples on a [`Grid1D`]. All samples are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    samples: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid1D, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::Shape(format!(
                "field has {} samples but the grid has {} points",
                samples.len(),
                grid.n()
            )));
        }
        check_finite(&samples, "field samples")?;
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            samples: vec![0.0; grid.n()],
        }
    }

    pub fn constant(grid: Grid1D, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.n()])
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.points().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// L-infinity distance to another field on the same grid.
    pub fn linf_distance(&self, other: &Field) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Field> {
        Field::new(self.grid, self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.check_same_grid(other)?;
        Field::new(
            self.grid,
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// Periodic trapezoid rule, `h * sum(samples)`.
    pub fn integrate(&self) -> f64 {
        self.grid.spacing() * self.samples.iter().sum::<f64>()
    }

    /// Spectral derivative of order 1, 2 or 3. Builds a one-off transform;
    /// hot loops should hold a [`Spectral`] instead.
    pub fn deriv(&self, order: usize) -> Result<Field> {
        Spectral::new(self.grid).deriv(self, order)
    }

    /// Solve `(1 - d^2/dx^2) w = self` for `w`.
    pub fn helmholtz_inv(&self) -> Result<Field> {
        Spectral::new(self.grid).helmholtz_inv(self)
    }

    pub(crate) fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Shape(format!(
                "grids differ: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }
}

/// Cached FFT plans and wavenumbers for one grid.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid1D,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Plans on the `3n/2` grid used for alias-free products.
    padded_forward: Arc<dyn Fft<f64>>,
    padded_inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl fmt::Debug for Spectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectral")
            .field("grid", &self.grid)
            .finish()
    }
}

impl Spectral {
    pub fn new(grid: Grid1D) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n());
        let inverse = planner.plan_fft_inverse(grid.n());
        let padded_forward = planner.plan_fft_forward(padded_len(grid.n()));
        let padded_inverse = planner.plan_fft_inverse(padded_len(grid.n()));
        let wavenumbers = (0..grid.n()).map(|j| grid.wavenumber(j)).collect();
        Self {
            grid,
            forward,
            inverse,
            padded_forward,
            padded_inverse,
            wavenumbers,
        }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    /// Wavenumber of each FFT slot (Nyquist slot holds `+pi*n/L`).
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(samples.len(), self.grid.n());
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform, normalized, keeping the real part.
    pub fn inverse(&self, mut coeffs: Vec<Complex64>) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.grid.n());
        self.inverse.process(&mut coeffs);
        let scale = 1.0 / self.grid.n() as f64;
        coeffs.into_iter().map(|c| c.re * scale).collect()
    }

    /// Multiply coefficients by `(ik)^order`.
    pub fn apply_deriv(&self, coeffs: &mut [Complex64], order: usize) {
        let nyquist = self.grid.n() / 2;
        for (j, (c, &k)) in coeffs.iter_mut().zip(&self.wavenumbers).enumerate() {
            if j == nyquist && order % 2 == 1 {
                *c = Complex64::new(0.0, 0.0);
                continue;
            }
            *c *= ik_pow(k, order);
        }
    }

    /// Multiply coefficients by `1 / (1 + k^2)`.
    pub fn apply_helmholtz_inv(&self, coeffs: &mut [Complex64]) {
        for (c, &k) in coeffs.iter_mut().zip(&self.wavenumbers) {
            *c /= 1.0 + k * k;
        }
    }

    /// Zero every mode above the 2/3-rule cutoff.
    pub fn dealias(&self, coeffs: &mut [Complex64]) {
        let cutoff = self.grid.dealias_cutoff() as i64;
        for (j, c) in coeffs.iter_mut().enumerate() {
            if self.grid.mode(j).abs() > cutoff {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Values on the `3n/2`-point grid of the trigonometric polynomial with
    /// these coefficients, Nyquist mode dropped. Pointwise products of two
    /// such arrays carry no aliasing error back through [`Self::from_padded`].
    pub fn to_padded(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let n = self.grid.n();
        let m = padded_len(n);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let scale = m as f64 / n as f64;
        for j in 0..n / 2 {
            buf[j] = coeffs[j] * scale;
        }
        for j in (n / 2 + 1)..n {
            buf[j + m - n] = coeffs[j] * scale;
        }
        self.padded_inverse.process(&mut buf);
        let norm = 1.0 / m as f64;
        buf.into_iter().map(|c| c.re * norm).collect()
    }

    /// Coefficients on the `n`-point grid of padded samples, keeping modes
    /// below Nyquist.
    pub fn from_padded(&self, values: &[f64]) -> Vec<Complex64> {
        let n = self.grid.n();
        let m = padded_len(n);
        debug_assert_eq!(values.len(), m);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.padded_forward.process(&mut buf);
        let scale = n as f64 / m as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n / 2 {
            out[j] = buf[j] * scale;
        }
        for j in (n / 2 + 1)..n {
            out[j] = buf[j + m - n] * scale;
        }
        out
    }

    /// Exponential filter `exp(-36 (|m|/m_max)^36)`, acting on the top third.
    pub fn apply_exponential_filter(&self, coeffs: &mut [Complex64]) {
        let m_max = (self.grid.n() / 2) as f64;
        for (j, c) in coeffs.iter_mut().enumerate() {
            let r = self.grid.mode(j).abs() as f64 / m_max;
            *c *= (-36.0 * r.powi(36)).exp();
        }
    }

    pub fn deriv(&self, f: &Field, order: usize) -> Result<Field> {
        if !(1..=3).contains(&order) {
            return Err(Error::InvalidParameter(format!(
                "derivative order must be 1, 2 or 3, got {order}"
            )));
        }
        self.check_grid(f)?;
        let mut coeffs = self.forward(f.samples());
        self.apply_deriv(&mut coeffs, order);
        Field::new(self.grid, self.inverse(coeffs))
    }

    pub fn helmholtz_inv(&self, f: &Field) -> Result<Field> {
        self.check_grid(f)?;
        let mut coeffs = self.forward(f.samples());
        self.apply_helmholtz_inv(&mut coeffs);
        Field::new(self.grid, self.inverse(coeffs))
    }

    /// The forward operator `(1 - d^2/dx^2) f`.
    pub fn helmholtz(&self, f: &Field) -> Result<Field> {
        self.check_grid(f)?;
        let mut coeffs = self.forward(f.samples());
        for (c, &k) in coeffs.iter_mut().zip(&self.wavenumbers) {
            *c *= 1.0 + k * k;
        }
        Field::new(self.grid, self.inverse(coeffs))
    }

    /// Periodic translation `x -> f(x - shift)`, exact for band-limited `f`.
    pub fn translate(&self, f: &Field, shift: f64) -> Result<Field> {
        self.check_grid(f)?;
        let nyquist = self.grid.n() / 2;
        let mut coeffs = self.forward(f.samples());
        for (j, (c, &k)) in coeffs.iter_mut().zip(&self.wavenumbers).enumerate() {
            if j == nyquist {
                // real-valued shift of the Nyquist cosine
                *c *= (k * shift).cos();
            } else {
                *c *= Complex64::from_polar(1.0, -k * shift);
            }
        }
        Field::new(self.grid, self.inverse(coeffs))
    }

    fn check_grid(&self, f: &Field) -> Result<()> {
        if f.grid() != self.grid {
            return Err(Error::Shape(format!(
                "field grid {:?} does not match transform grid {:?}",
                f.grid(),
                self.grid
            )));
        }
        Ok(())
    }
}

fn padded_len(n: usize) -> usize {
    3 * n / 2
}

fn ik_pow(k: f64, order: usize) -> Complex64 {
    match order % 4 {
        0 => Complex64::new(k.powi(order as i32), 0.0),
        1 => Complex64::new(0.0, k.powi(order as i32)),
        2 => Complex64::new(-k.powi(order as i32), 0.0),
        _ => Complex64::new(0.0, -k.powi(order as i32)),
    }
}
