//! Discrete check that critical points of the right-invariant action on paths
//! of diffeomorphisms satisfy the Camassa-Holm equation.
//!
//! A path `gamma(t, x) = x + psi(t, x)` is sampled on a periodic grid at
//! `K + 1` uniform times. Its spatial (Eulerian) velocity is
//! `u = gamma_t o gamma^{-1}`, and the action is
//!
//! ```text
//! a(gamma) = 1/2 int_0^T int ( (u + c0)^2 + u_x^2 ) dx dt
//! ```
//!
//! with `c0 = 0` for the velocity Lagrangian and `c0 != 0` for the
//! surface-elevation Lagrangian. For a perturbation `phi` vanishing at both
//! ends, with `w = phi o gamma^{-1}`, the first variation is
//!
//! ```text
//! d/de a(gamma + e phi) = int int (u + c0)(w_t + u w_x - w u_x) + u_x (w_tx + u w_xx - w u_xx)
//!                       = - int int w [ u_t + 2 c0 u_x + 3 u u_x - u_txx - 2 u_x u_xx - u u_xxx ].
//! ```
//!
//! [`verify_variational_identity`] evaluates the left side by central
//! differences of the discrete action (`D_fd`), the middle form directly
//! (`D_mid`) and the integrated-by-parts form (`D_el`), and reports the gaps.
//!
//! Discretisation: `gamma^{-1}` is the Newton inverse of a monotone cubic
//! interpolant of the sampled `gamma`; `gamma_t` and `phi` are carried to the
//! Eulerian points with the same cubic interpolation. Time derivatives are
//! centered, second-order one-sided at the two ends, and time integrals use
//! the trapezoid rule.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::field::{Field, Grid1D, Spectral};
use crate::interp::PeriodicCubic;

/// Which right-invariant Lagrangian is varied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "lagrangian", rename_all = "snake_case")]
pub enum Lagrangian {
    /// `(u^2 + u_x^2) / 2`; critical points solve CH with `kappa = 0`.
    Velocity,
    /// `((eta + c0)^2 + eta_x^2) / 2`; critical points solve CH with `kappa = c0`.
    Elevation { c0: f64 },
}

impl Lagrangian {
    pub fn offset(&self) -> f64 {
        match *self {
            Lagrangian::Velocity => 0.0,
            Lagrangian::Elevation { c0 } => c0,
        }
    }
}

/// Time-sampled path of orientation-preserving periodic diffeomorphisms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffeoPath {
    grid: Grid1D,
    horizon: f64,
    gamma: Vec<Vec<f64>>,
}

impl DiffeoPath {
    /// `gamma[k][j] = gamma(t_k, x_j)` with `t_k = k T / K`, `k = 0..=K`.
    pub fn new(grid: Grid1D, horizon: f64, gamma: Vec<Vec<f64>>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "horizon must be > 0, got {horizon}"
            )));
        }
        if gamma.len() < 3 {
            return Err(Error::Shape(
                "a path needs at least three time samples".into(),
            ));
        }
        for row in &gamma {
            if row.len() != grid.n() {
                return Err(Error::Shape(format!(
                    "path row has {} samples, grid has {}",
                    row.len(),
                    grid.n()
                )));
            }
            check_finite(row, "path samples")?;
        }
        let spectral = Spectral::new(grid);
        for (k, row) in gamma.iter().enumerate() {
            check_diffeomorphism(&spectral, row)
                .map_err(|msg| Error::NotDiffeomorphism(format!("time index {k}: {msg}")))?;
        }
        Ok(Self {
            grid,
            horizon,
            gamma,
        })
    }

    /// Sample `gamma(t, x)` at `K + 1` times on `[0, T]`. `gamma(t, x) - x`
    /// must be `L`-periodic in `x`.
    pub fn from_fn(
        grid: Grid1D,
        horizon: f64,
        steps: usize,
        gamma: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let xs = grid.points();
        let rows = (0..=steps)
            .map(|k| {
                let t = horizon * k as f64 / steps as f64;
                xs.iter().map(|&x| gamma(t, x)).collect()
            })
            .collect();
        Self::new(grid, horizon, rows)
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `K`.
    pub fn steps(&self) -> usize {
        self.gamma.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps() as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.horizon * k as f64 / self.steps() as f64
    }

    pub fn samples(&self, k: usize) -> &[f64] {
        &self.gamma[k]
    }

    /// `gamma + eps * phi`; fails with the offending `eps` if the result is
    /// not a diffeomorphism at every time.
    pub fn perturbed(&self, pert: &PathPerturbation, eps: f64) -> Result<DiffeoPath> {
        pert.check_compatible(self)?;
        let rows = self
            .gamma
            .iter()
            .zip(&pert.phi)
            .map(|(g, p)| g.iter().zip(p).map(|(a, b)| a + eps * b).collect())
            .collect();
        DiffeoPath::new(self.grid, self.horizon, rows).map_err(|e| match e {
            Error::NotDiffeomorphism(_) => Error::PerturbationTooLarge { eps },
            other => other,
        })
    }

    /// `gamma_t(t_k, x_j)`: centered in the interior, second-order one-sided
    /// at `k = 0` and `k = K`.
    pub fn lagrangian_velocity(&self, k: usize) -> Vec<f64> {
        time_derivative(&self.gamma, k, self.dt())
    }

    /// `gamma^{-1}(t_k, x_j)` at every grid point.
    pub fn inverse(&self, k: usize) -> Result<Vec<f64>> {
        let l = self.grid.length();
        let interp = PeriodicCubic::monotone(self.grid, self.gamma[k].clone(), l)?;
        self.grid
            .points()
            .into_iter()
            .map(|x| interp.invert(x))
            .collect()
    }
}

fn check_diffeomorphism(spectral: &Spectral, row: &[f64]) -> std::result::Result<(), String> {
    let grid = spectral.grid();
    let l = grid.length();
    let n = row.len();
    for j in 0..n {
        let next = if j + 1 == n { row[0] + l } else { row[j + 1] };
        if next <= row[j] {
            return Err(format!("samples not increasing at index {j}"));
        }
    }
    let psi: Vec<f64> = row.iter().zip(grid.points()).map(|(g, x)| g - x).collect();
    let mut hat = spectral.forward(&psi);
    spectral.apply_deriv(&mut hat, 1);
    let slope = spectral.inverse(hat);
    if let Some(j) = slope.iter().position(|&s| 1.0 + s <= 0.0) {
        return Err(format!("d gamma / dx = {} at index {j}", 1.0 + slope[j]));
    }
    Ok(())
}

fn time_derivative(rows: &[Vec<f64>], k: usize, dt: f64) -> Vec<f64> {
    let last = rows.len() - 1;
    let combine = |c: [(usize, f64); 3]| -> Vec<f64> {
        (0..rows[0].len())
            .map(|j| c.iter().map(|&(r, w)| w * rows[r][j]).sum::<f64>() / dt)
            .collect()
    };
    if k == 0 {
        combine([(0, -1.5), (1, 2.0), (2, -0.5)])
    } else if k == last {
        combine([(last, 1.5), (last - 1, -2.0), (last - 2, 0.5)])
    } else {
        combine([(k + 1, 0.5), (k - 1, -0.5), (k, 0.0)])
    }
}

/// Trapezoid weights on `K + 1` uniform samples.
fn trapezoid_weight(k: usize, steps: usize, dt: f64) -> f64 {
    if k == 0 || k == steps {
        0.5 * dt
    } else {
        dt
    }
}

/// A variation `phi(t, x)` of a path, zero at `t = 0` and `t = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPerturbation {
    grid: Grid1D,
    phi: Vec<Vec<f64>>,
}

impl PathPerturbation {
    pub fn new(grid: Grid1D, phi: Vec<Vec<f64>>) -> Result<Self> {
        if phi.len() < 3 {
            return Err(Error::Shape(
                "a perturbation needs at least three time samples".into(),
            ));
        }
        for row in &phi {
            if row.len() != grid.n() {
                return Err(Error::Shape(
                    "perturbation row length differs from grid".into(),
                ));
            }
            check_finite(row, "perturbation")?;
        }
        let last = phi.len() - 1;
        if phi[0].iter().chain(&phi[last]).any(|&v| v != 0.0) {
            return Err(Error::InvalidParameter(
                "perturbation must vanish at both end times".into(),
            ));
        }
        Ok(Self { grid, phi })
    }

    pub fn zero(grid: Grid1D, steps: usize) -> Result<Self> {
        Self::new(grid, vec![vec![0.0; grid.n()]; steps + 1])
    }

    /// Sample `phi(t, x)`; the end rows are forced to zero.
    pub fn from_fn(
        grid: Grid1D,
        horizon: f64,
        steps: usize,
        phi: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let xs = grid.points();
        let rows = (0..=steps)
            .map(|k| {
                if k == 0 || k == steps {
                    return vec![0.0; grid.n()];
                }
                let t = horizon * k as f64 / steps as f64;
                xs.iter().map(|&x| phi(t, x)).collect()
            })
            .collect();
        Self::new(grid, rows)
    }

    /// Random band-limited perturbation: two random trigonometric fields with
    /// modes `1..=modes` (coefficients decaying as `1/m^2`), the first times
    /// the bump `t (T - t) / T^2`, the second times the bump and `(2t/T - 1)`.
    pub fn random<R: Rng + ?Sized>(
        grid: Grid1D,
        horizon: f64,
        steps: usize,
        modes: usize,
        amplitude: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let recipe = RandomPerturbationSpec::draw(modes, amplitude, rng);
        recipe.sample(grid, horizon, steps)
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn samples(&self, k: usize) -> &[f64] {
        &self.phi[k]
    }

    fn check_compatible(&self, path: &DiffeoPath) -> Result<()> {
        if self.grid != path.grid || self.phi.len() != path.gamma.len() {
            return Err(Error::Shape(
                "perturbation and path are sampled differently".into(),
            ));
        }
        Ok(())
    }
}

/// Resolution-independent description of a random perturbation, so the same
/// draw can be sampled on several grids in a refinement sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomPerturbationSpec {
    /// `(a_m, b_m)` pairs for the steady and the time-odd parts.
    pub steady: Vec<(f64, f64)>,
    pub odd: Vec<(f64, f64)>,
}

impl RandomPerturbationSpec {
    pub fn draw<R: Rng + ?Sized>(modes: usize, amplitude: f64, rng: &mut R) -> Self {
        let mut coeffs = || -> Vec<(f64, f64)> {
            (1..=modes)
                .map(|m| {
                    let s = amplitude / (m * m) as f64;
                    (s * rng.gen_range(-1.0..1.0), s * rng.gen_range(-1.0..1.0))
                })
                .collect()
        };
        let steady = coeffs();
        let odd = coeffs();
        Self { steady, odd }
    }

    pub fn eval(&self, length: f64, horizon: f64, t: f64, x: f64) -> f64 {
        let base = 2.0 * std::f64::consts::PI / length;
        let series = |c: &[(f64, f64)]| -> f64 {
            c.iter()
                .enumerate()
                .map(|(i, &(a, b))| {
                    let k = base * (i + 1) as f64;
                    a * (k * x).cos() + b * (k * x).sin()
                })
                .sum()
        };
        let bump = t * (horizon - t) / (horizon * horizon);
        bump * (series(&self.steady) + (2.0 * t / horizon - 1.0) * series(&self.odd))
    }

    pub fn sample(&self, grid: Grid1D, horizon: f64, steps: usize) -> Result<PathPerturbation> {
        PathPerturbation::from_fn(grid, horizon, steps, |t, x| {
            self.eval(grid.length(), horizon, t, x)
        })
    }
}

/// `u(x_j) = gamma_t(t_k, gamma^{-1}(t_k, x_j))`.
pub fn spatial_velocity(path: &DiffeoPath, k: usize) -> Result<Field> {
    if k > path.steps() {
        return Err(Error::InvalidParameter(format!(
            "time index {k} outside 0..={}",
            path.steps()
        )));
    }
    let inverse = path.inverse(k)?;
    compose(path.grid, path.lagrangian_velocity(k), &inverse)
}

/// Carry Lagrangian samples `f(x_j)` to Eulerian points: `f(y_j)`.
fn compose(grid: Grid1D, lagrangian: Vec<f64>, at: &[f64]) -> Result<Field> {
    let interp = PeriodicCubic::new(grid, lagrangian, 0.0)?;
    Field::new(grid, at.iter().map(|&y| interp.eval(y)).collect())
}

/// Spatial velocity at every time sample `k = 0..=K`.
pub fn velocity_snapshots(path: &DiffeoPath) -> Result<Vec<Field>> {
    (0..=path.steps())
        .map(|k| spatial_velocity(path, k))
        .collect()
}

/// Action with the velocity Lagrangian.
pub fn action(path: &DiffeoPath) -> Result<f64> {
    action_with(path, Lagrangian::Velocity)
}

/// Action with the surface-elevation Lagrangian and offset `c0`.
pub fn action_eta(path: &DiffeoPath, c0: f64) -> Result<f64> {
    action_with(path, Lagrangian::Elevation { c0 })
}

pub fn action_with(path: &DiffeoPath, lagrangian: Lagrangian) -> Result<f64> {
    let spectral = Spectral::new(path.grid);
    let c0 = lagrangian.offset();
    let steps = path.steps();
    let dt = path.dt();
    let mut total = 0.0;
    for k in 0..=steps {
        let u = spatial_velocity(path, k)?;
        let ux = spectral.deriv(&u, 1)?;
        let density: f64 = u
            .samples()
            .iter()
            .zip(ux.samples())
            .map(|(&v, &d)| (v + c0) * (v + c0) + d * d)
            .sum();
        total += trapezoid_weight(k, steps, dt) * 0.5 * path.grid.spacing() * density;
    }
    Ok(total)
}

/// `[a(gamma + eps phi) - a(gamma - eps phi)] / (2 eps)`.
pub fn first_variation_fd(
    path: &DiffeoPath,
    pert: &PathPerturbation,
    eps: f64,
    lagrangian: Lagrangian,
) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be > 0, got {eps}"
        )));
    }
    let plus = action_with(&path.perturbed(pert, eps)?, lagrangian)?;
    let minus = action_with(&path.perturbed(pert, -eps)?, lagrangian)?;
    Ok((plus - minus) / (2.0 * eps))
}

/// Pointwise Euler-Lagrange residual at interior time index `k`,
///
/// ```text
/// u_t + 2 kappa u_x + 3 u u_x - u_txx - 2 u_x u_xx - u u_xxx
/// ```
///
/// with `kappa = 0` for the velocity Lagrangian and `kappa = c0` for the
/// elevation Lagrangian. `u_t` is the centered difference of the neighbouring
/// snapshots, which are `dt` apart.
pub fn el_residual(
    snapshots: &[Field],
    dt: f64,
    k: usize,
    lagrangian: Lagrangian,
) -> Result<Field> {
    if k == 0 || k + 1 >= snapshots.len() {
        return Err(Error::InvalidParameter(format!(
            "residual needs an interior time index, got {k} of {}",
            snapshots.len()
        )));
    }
    let u = &snapshots[k];
    let spectral = Spectral::new(u.grid());
    let ut = snapshots[k + 1].zip_with(&snapshots[k - 1], |a, b| (a - b) / (2.0 * dt))?;
    let ux = spectral.deriv(u, 1)?;
    let uxx = spectral.deriv(u, 2)?;
    let uxxx = spectral.deriv(u, 3)?;
    let utxx = spectral.deriv(&ut, 2)?;
    let kappa = lagrangian.offset();
    let n = u.len();
    let (u, ut, ux, uxx, uxxx, utxx) = (
        u.samples(),
        ut.samples(),
        ux.samples(),
        uxx.samples(),
        uxxx.samples(),
        utxx.samples(),
    );
    let base = (0..n)
        .map(|j| ut[j] + 3.0 * u[j] * ux[j] - utxx[j] - 2.0 * ux[j] * uxx[j] - u[j] * uxxx[j]);
    let residual = base.zip(ux).map(|(r, &d)| r + 2.0 * kappa * d).collect();
    Field::new(snapshots[k].grid(), residual)
}

/// One row of a refinement study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow {
    pub n: usize,
    pub steps: usize,
    pub eps: f64,
    #[serde(rename = "D_fd")]
    pub d_fd: f64,
    #[serde(rename = "D_el")]
    pub d_el: f64,
    #[serde(rename = "D_mid")]
    pub d_mid: f64,
    pub rel_gap: f64,
}

/// Result of [`verify_variational_identity`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    #[serde(rename = "D_fd")]
    pub d_fd: f64,
    #[serde(rename = "D_el")]
    pub d_el: f64,
    #[serde(rename = "D_mid")]
    pub d_mid: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
    /// `|D_fd - D_mid|`.
    pub mid_gap: f64,
    /// The `eps` actually used after any halving.
    pub eps: f64,
    pub refinement_table: Vec<RefinementRow>,
}

impl VariationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report always serializes")
    }

    pub fn row(&self, path: &DiffeoPath) -> RefinementRow {
        RefinementRow {
            n: path.grid.n(),
            steps: path.steps(),
            eps: self.eps,
            d_fd: self.d_fd,
            d_el: self.d_el,
            d_mid: self.d_mid,
            rel_gap: self.rel_gap,
        }
    }
}

/// Halvings of `eps` tried before giving up on a perturbation.
pub const MAX_EPS_HALVINGS: usize = 20;

/// Compute `D_fd`, `D_el` and `D_mid` for one path and perturbation.
/// `eps` is halved until `gamma +/- eps phi` stay diffeomorphisms.
pub fn verify_variational_identity(
    path: &DiffeoPath,
    pert: &PathPerturbation,
    eps: f64,
    lagrangian: Lagrangian,
) -> Result<VariationReport> {
    pert.check_compatible(path)?;
    let mut eps = eps;
    let mut halvings = 0;
    let d_fd = loop {
        match first_variation_fd(path, pert, eps, lagrangian) {
            Err(Error::PerturbationTooLarge { .. }) if halvings < MAX_EPS_HALVINGS => {
                eps *= 0.5;
                halvings += 1;
            }
            other => break other?,
        }
    };

    let spectral = Spectral::new(path.grid);
    let steps = path.steps();
    let dt = path.dt();
    let c0 = lagrangian.offset();
    let snapshots = velocity_snapshots(path)?;
    // w_k = phi_k o gamma_k^{-1}
    let mut w = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let inverse = path.inverse(k)?;
        w.push(compose(path.grid, pert.phi[k].clone(), &inverse)?);
    }

    let mut d_el = 0.0;
    for k in 1..steps {
        let r = el_residual(&snapshots, dt, k, lagrangian)?;
        let pairing: f64 = w[k]
            .samples()
            .iter()
            .zip(r.samples())
            .map(|(a, b)| a * b)
            .sum();
        d_el -= dt * path.grid.spacing() * pairing;
    }

    let w_rows: Vec<Vec<f64>> = w.iter().map(|f| f.samples().to_vec()).collect();
    let mut d_mid = 0.0;
    for k in 0..=steps {
        let u = &snapshots[k];
        let wt = Field::new(path.grid, time_derivative(&w_rows, k, dt))?;
        let ux = spectral.deriv(u, 1)?;
        let uxx = spectral.deriv(u, 2)?;
        let wx = spectral.deriv(&w[k], 1)?;
        let wxx = spectral.deriv(&w[k], 2)?;
        let wtx = spectral.deriv(&wt, 1)?;
        let mut integrand = 0.0;
        for j in 0..path.grid.n() {
            let (uj, uxj, uxxj) = (u.samples()[j], ux.samples()[j], uxx.samples()[j]);
            let wj = w[k].samples()[j];
            let first = wt.samples()[j] + uj * wx.samples()[j] - wj * uxj;
            let second = wtx.samples()[j] + uj * wxx.samples()[j] - wj * uxxj;
            integrand += (uj + c0) * first + uxj * second;
        }
        d_mid += trapezoid_weight(k, steps, dt) * path.grid.spacing() * integrand;
    }

    let abs_gap = (d_fd - d_el).abs();
    let rel_gap = if d_fd != 0.0 {
        abs_gap / d_fd.abs()
    } else {
        abs_gap
    };
    Ok(VariationReport {
        d_fd,
        d_el,
        d_mid,
        abs_gap,
        rel_gap,
        mid_gap: (d_fd - d_mid).abs(),
        eps,
        refinement_table: Vec::new(),
    })
}

/// Run [`verify_variational_identity`] at each `(n, K, eps)` level, building
/// the path and perturbation afresh for each grid. The report is that of the
/// first level, with every level recorded in `refinement_table`.
pub fn refinement_sweep<P, Q>(
    levels: &[(usize, usize, f64)],
    length: f64,
    make_path: P,
    make_pert: Q,
    lagrangian: Lagrangian,
) -> Result<VariationReport>
where
    P: Fn(Grid1D, usize) -> Result<DiffeoPath>,
    Q: Fn(Grid1D, usize) -> Result<PathPerturbation>,
{
    let mut first: Option<VariationReport> = None;
    let mut table = Vec::with_capacity(levels.len());
    for &(n, steps, eps) in levels {
        let grid = Grid1D::new(n, length)?;
        let path = make_path(grid, steps)?;
        let pert = make_pert(grid, steps)?;
        let report = verify_variational_identity(&path, &pert, eps, lagrangian)?;
        table.push(report.row(&path));
        first.get_or_insert(report);
    }
    let mut report =
        first.ok_or_else(|| Error::InvalidParameter("refinement sweep needs a level".into()))?;
    report.refinement_table = table;
    Ok(report)
}

/// Observed convergence order from errors at step `h` and `h / 2`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).abs().log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid1D {
        Grid1D::new(n, 2.0 * PI).unwrap()
    }

    #[test]
    fn identity_path_has_zero_velocity_and_action() {
        let g = grid(32);
        let path = DiffeoPath::from_fn(g, 1.0, 8, |_, x| x).unwrap();
        for k in 0..=8 {
            assert!(spatial_velocity(&path, k).unwrap().max_abs() < 1e-14);
        }
        assert!(action(&path).unwrap().abs() < 1e-25);
    }

    #[test]
    fn translation_has_uniform_velocity() {
        let g = grid(32);
        let c = 0.7;
        let path = DiffeoPath::from_fn(g, 2.0, 16, |t, x| x + c * t).unwrap();
        for k in [0, 5, 16] {
            let u = spatial_velocity(&path, k).unwrap();
            assert!(u.samples().iter().all(|v| (v - c).abs() < 1e-13));
        }
        let l = g.length();
        assert_abs_diff_eq!(
            action(&path).unwrap(),
            0.5 * c * c * l * 2.0,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            action_eta(&path, 0.3).unwrap(),
            0.5 * (c + 0.3f64).powi(2) * l * 2.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn identity_path_eta_action() {
        let g = grid(32);
        let path = DiffeoPath::from_fn(g, 1.5, 8, |_, x| x).unwrap();
        assert_abs_diff_eq!(
            action_eta(&path, 1.0).unwrap(),
            0.5 * g.length() * 1.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn folding_path_rejected() {
        let g = grid(32);
        let err = DiffeoPath::from_fn(g, 1.0, 4, |t, x| x + 1.5 * (x - t).sin()).unwrap_err();
        assert!(matches!(err, Error::NotDiffeomorphism(_)));
    }

    #[test]
    fn perturbation_endpoints_enforced() {
        let g = grid(16);
        let mut rows = vec![vec![0.0; 16]; 5];
        rows[4][3] = 1e-3;
        assert!(PathPerturbation::new(g, rows).is_err());
    }

    #[test]
    fn oversized_perturbation_reports_eps() {
        let g = grid(32);
        let path = DiffeoPath::from_fn(g, 1.0, 8, |_, x| x).unwrap();
        let pert = PathPerturbation::from_fn(g, 1.0, 8, |_, x| (3.0 * x).sin()).unwrap();
        match first_variation_fd(&path, &pert, 1.0, Lagrangian::Velocity) {
            Err(Error::PerturbationTooLarge { eps }) => assert_eq!(eps, 1.0),
            other => panic!("{other:?}"),
        }
        let report = verify_variational_identity(&path, &pert, 1.0, Lagrangian::Velocity).unwrap();
        assert!(report.eps < 1.0 / 3.0);
    }

    #[test]
    fn zero_perturbation_has_zero_variation() {
        let g = grid(32);
        let path = DiffeoPath::from_fn(g, 1.0, 8, |t, x| x + 0.05 * (x - t).sin()).unwrap();
        let pert = PathPerturbation::zero(g, 8).unwrap();
        let d = first_variation_fd(&path, &pert, 1e-3, Lagrangian::Velocity).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn residual_of_constant_vanishes() {
        let g = grid(32);
        let snaps = vec![Field::constant(g, 0.4).unwrap(); 3];
        let r = el_residual(&snaps, 0.1, 1, Lagrangian::Velocity).unwrap();
        assert!(r.max_abs() < 1e-14);
        assert!(el_residual(&snaps, 0.1, 0, Lagrangian::Velocity).is_err());
        assert!(el_residual(&snaps, 0.1, 2, Lagrangian::Velocity).is_err());
    }

    #[test]
    fn elevation_with_zero_offset_matches_velocity() {
        let g = grid(32);
        let path = DiffeoPath::from_fn(g, 1.0, 8, |t, x| x + 0.05 * (x - t).sin()).unwrap();
        assert_eq!(action(&path).unwrap(), action_eta(&path, 0.0).unwrap());
        let snaps = velocity_snapshots(&path).unwrap();
        let a = el_residual(&snaps, path.dt(), 3, Lagrangian::Velocity).unwrap();
        let b = el_residual(&snaps, path.dt(), 3, Lagrangian::Elevation { c0: 0.0 }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn observed_order_of_quadratic_error() {
        assert_abs_diff_eq!(observed_order(4e-4, 1e-4), 2.0, epsilon = 1e-12);
    }
}
