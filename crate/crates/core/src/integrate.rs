//! Classical fourth-order Runge-Kutta on flat state vectors.

use crate::error::Result;

/// One RK4 step of `y' = f(y)` (autonomous).
pub fn rk4_step<F>(y: &[f64], dt: f64, mut f: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = y.len();
    let axpy =
        |a: f64, k: &[f64]| -> Vec<f64> { y.iter().zip(k).map(|(yi, ki)| yi + a * ki).collect() };
    let k1 = f(y)?;
    let k2 = f(&axpy(0.5 * dt, &k1))?;
    let k3 = f(&axpy(0.5 * dt, &k2))?;
    let k4 = f(&axpy(dt, &k3))?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    Ok(out)
}

/// Number of steps of size at most `dt` that reach `t_end`, and the uniform
/// step that lands on it exactly.
pub fn step_plan(dt: f64, t_end: f64) -> (usize, f64) {
    if t_end <= 0.0 {
        return (0, dt);
    }
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    (steps, t_end / steps as f64)
}
