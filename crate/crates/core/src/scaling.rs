//! Changes of variables for the free-surface problem and the audit of the
//! small-amplitude limit system.
//!
//! A [`VariableBundle`] carries sampled `u, v, p` on a `z`-column times an
//! `x`-row, plus the surface displacement `eta` on the `x`-row. Its [`Frame`]
//! tag moves along a fixed pipeline
//!
//! ```text
//! Physical --to_nondim--> Nondim --scale_small_amplitude--> Scaled --remove_delta--> DeltaRemoved
//! ```
//!
//! and every stage has an exact inverse. Applying a map to a bundle in the
//! wrong frame is an error.
//!
//! Non-dimensionalisation uses `h0` for `z`, `lambda` for `x`, `a` for `eta`,
//! `sqrt(g h0)` for `u`, `lambda / sqrt(g h0)` for `t` and
//! `h0 sqrt(g h0) / lambda` for `v`. Pressure is measured from the hydrostatic
//! profile: `p_phys = p0 + rho g h0 (1 - z) + rho g h0 p`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::field::{Field, Grid1D, Spectral};

/// Dimensional constants of a water-wave configuration (SI units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    /// Undisturbed depth.
    pub h0: f64,
    /// Horizontal (wavelength) scale.
    pub lambda: f64,
    /// Surface amplitude scale.
    pub a: f64,
    /// Gravitational acceleration.
    pub g: f64,
    /// Density.
    pub rho: f64,
    /// Atmospheric pressure.
    pub p0: f64,
}

impl ScalingParams {
    pub fn new(h0: f64, lambda: f64, a: f64, g: f64, rho: f64, p0: f64) -> Result<Self> {
        let params = Self {
            h0,
            lambda,
            a,
            g,
            rho,
            p0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Fresh water at sea level with the given length scales.
    pub fn water(h0: f64, lambda: f64, a: f64) -> Result<Self> {
        Self::new(h0, lambda, a, 9.81, 1000.0, 101_325.0)
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("h0", self.h0),
            ("lambda", self.lambda),
            ("a", self.a),
            ("g", self.g),
            ("rho", self.rho),
            ("p0", self.p0),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Amplitude parameter `a / h0`.
    pub fn eps(&self) -> f64 {
        self.a / self.h0
    }

    /// Shallowness parameter `h0 / lambda`.
    pub fn delta(&self) -> f64 {
        self.h0 / self.lambda
    }

    pub fn wave_speed(&self) -> f64 {
        (self.g * self.h0).sqrt()
    }

    fn hydrostatic_scale(&self) -> f64 {
        self.rho * self.g * self.h0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Physical,
    Nondim,
    Scaled,
    DeltaRemoved,
}

impl Frame {
    pub fn name(self) -> &'static str {
        match self {
            Frame::Physical => "physical",
            Frame::Nondim => "nondim",
            Frame::Scaled => "scaled",
            Frame::DeltaRemoved => "delta-removed",
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sampled flow variables sharing one frame tag.
///
/// `u`, `v`, `p` are indexed `[iz][ix]`; `eta` is indexed `[ix]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableBundle {
    frame: Frame,
    x: Vec<f64>,
    z: Vec<f64>,
    t: f64,
    u: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    p: Vec<Vec<f64>>,
    eta: Vec<f64>,
}

impl VariableBundle {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        frame: Frame,
        x: Vec<f64>,
        z: Vec<f64>,
        t: f64,
        u: Vec<Vec<f64>>,
        v: Vec<Vec<f64>>,
        p: Vec<Vec<f64>>,
        eta: Vec<f64>,
    ) -> Result<Self> {
        let nx = x.len();
        let nz = z.len();
        if nx == 0 || nz == 0 {
            return Err(Error::Shape(
                "bundle needs at least one x and one z sample".into(),
            ));
        }
        if eta.len() != nx {
            return Err(Error::Shape(format!(
                "eta has {} samples, x has {nx}",
                eta.len()
            )));
        }
        for (name, grid) in [("u", &u), ("v", &v), ("p", &p)] {
            if grid.len() != nz || grid.iter().any(|row| row.len() != nx) {
                return Err(Error::Shape(format!(
                    "{name} must be {nz} rows of {nx} samples"
                )));
            }
        }
        check_finite(&x, "x")?;
        check_finite(&z, "z")?;
        check_finite(&[t], "t")?;
        check_finite(&eta, "eta")?;
        for row in u.iter() {
            check_finite(row, "u")?;
        }
        for row in v.iter() {
            check_finite(row, "v")?;
        }
        for row in p.iter() {
            check_finite(row, "p")?;
        }
        Ok(Self {
            frame,
            x,
            z,
            t,
            u,
            v,
            p,
            eta,
        })
    }

    /// Still water in the physical frame: zero velocity, flat surface and
    /// hydrostatic pressure `p0 + rho g (h0 - z)`.
    pub fn still_water(params: &ScalingParams, x: Vec<f64>, z: Vec<f64>, t: f64) -> Result<Self> {
        params.validate()?;
        let nx = x.len();
        let zeros = vec![vec![0.0; nx]; z.len()];
        let p = z
            .iter()
            .map(|&zk| vec![params.p0 + params.rho * params.g * (params.h0 - zk); nx])
            .collect();
        Self::new(
            Frame::Physical,
            x,
            z,
            t,
            zeros.clone(),
            zeros,
            p,
            vec![0.0; nx],
        )
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }
    pub fn x(&self) -> &[f64] {
        &self.x
    }
    pub fn z(&self) -> &[f64] {
        &self.z
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn u(&self) -> &[Vec<f64>] {
        &self.u
    }
    pub fn v(&self) -> &[Vec<f64>] {
        &self.v
    }
    pub fn p(&self) -> &[Vec<f64>] {
        &self.p
    }
    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// Largest relative discrepancy between matching variables of two bundles,
    /// each variable normalized by its own magnitude in `reference`.
    pub fn max_relative_gap(&self, reference: &VariableBundle) -> Result<f64> {
        if self.x.len() != reference.x.len() || self.z.len() != reference.z.len() {
            return Err(Error::Shape("bundles have different sizes".into()));
        }
        let flat = |b: &VariableBundle| -> Vec<Vec<f64>> {
            vec![
                b.x.clone(),
                b.z.clone(),
                vec![b.t],
                b.u.concat(),
                b.v.concat(),
                b.p.concat(),
                b.eta.clone(),
            ]
        };
        let ours = flat(self);
        let theirs = flat(reference);
        let mut worst: f64 = 0.0;
        for (a, b) in ours.iter().zip(&theirs) {
            let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let gap = a
                .iter()
                .zip(b)
                .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            if scale > 0.0 {
                worst = worst.max(gap / scale);
            } else {
                worst = worst.max(gap);
            }
        }
        Ok(worst)
    }

    fn expect(&self, frame: Frame) -> Result<()> {
        if self.frame != frame {
            return Err(Error::FrameMismatch {
                expected: frame.name(),
                found: self.frame.name(),
            });
        }
        Ok(())
    }

    fn map_rows(rows: &[Vec<f64>], f: impl Fn(usize, f64) -> f64) -> Vec<Vec<f64>> {
        rows.iter()
            .enumerate()
            .map(|(iz, row)| row.iter().map(|&v| f(iz, v)).collect())
            .collect()
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

pub fn to_nondim(bundle: &VariableBundle, params: &ScalingParams) -> Result<VariableBundle> {
    bundle.expect(Frame::Physical)?;
    params.validate()?;
    let c = params.wave_speed();
    let z: Vec<f64> = bundle.z.iter().map(|&z| z / params.h0).collect();
    let hs = params.hydrostatic_scale();
    let p = VariableBundle::map_rows(&bundle.p, |iz, p| (p - params.p0 - hs * (1.0 - z[iz])) / hs);
    VariableBundle::new(
        Frame::Nondim,
        bundle.x.iter().map(|&x| x / params.lambda).collect(),
        z,
        bundle.t * c / params.lambda,
        VariableBundle::map_rows(&bundle.u, |_, u| u / c),
        VariableBundle::map_rows(&bundle.v, |_, v| v * params.lambda / (params.h0 * c)),
        p,
        bundle.eta.iter().map(|&e| e / params.a).collect(),
    )
}

pub fn to_physical(bundle: &VariableBundle, params: &ScalingParams) -> Result<VariableBundle> {
    bundle.expect(Frame::Nondim)?;
    params.validate()?;
    let c = params.wave_speed();
    let hs = params.hydrostatic_scale();
    let p = VariableBundle::map_rows(&bundle.p, |iz, p| {
        params.p0 + hs * (1.0 - bundle.z[iz]) + hs * p
    });
    VariableBundle::new(
        Frame::Physical,
        bundle.x.iter().map(|&x| x * params.lambda).collect(),
        bundle.z.iter().map(|&z| z * params.h0).collect(),
        bundle.t * params.lambda / c,
        VariableBundle::map_rows(&bundle.u, |_, u| u * c),
        VariableBundle::map_rows(&bundle.v, |_, v| v * params.h0 * c / params.lambda),
        p,
        bundle.eta.iter().map(|&e| e * params.a).collect(),
    )
}

/// Divide `p`, `u`, `v` by `eps`, so the stored values are the O(1) scaled
/// variables of the small-amplitude expansion.
pub fn scale_small_amplitude(bundle: &VariableBundle, eps: f64) -> Result<VariableBundle> {
    bundle.expect(Frame::Nondim)?;
    positive("eps", eps)?;
    let mut out = bundle.clone();
    out.frame = Frame::Scaled;
    out.u = VariableBundle::map_rows(&bundle.u, |_, u| u / eps);
    out.v = VariableBundle::map_rows(&bundle.v, |_, v| v / eps);
    out.p = VariableBundle::map_rows(&bundle.p, |_, p| p / eps);
    Ok(out)
}

pub fn unscale_small_amplitude(bundle: &VariableBundle, eps: f64) -> Result<VariableBundle> {
    bundle.expect(Frame::Scaled)?;
    positive("eps", eps)?;
    let mut out = bundle.clone();
    out.frame = Frame::Nondim;
    out.u = VariableBundle::map_rows(&bundle.u, |_, u| u * eps);
    out.v = VariableBundle::map_rows(&bundle.v, |_, v| v * eps);
    out.p = VariableBundle::map_rows(&bundle.p, |_, p| p * eps);
    Ok(out)
}

/// Rescale `x`, `t` by `delta / sqrt(eps)` and `v` by `sqrt(eps) / delta`,
/// leaving `h0` as the only length scale. When `eps == delta^2` the factor
/// is exactly one.
pub fn remove_delta(bundle: &VariableBundle, eps: f64, delta: f64) -> Result<VariableBundle> {
    bundle.expect(Frame::Scaled)?;
    positive("eps", eps)?;
    positive("delta", delta)?;
    let factor = delta / eps.sqrt();
    let mut out = bundle.clone();
    out.frame = Frame::DeltaRemoved;
    out.x = bundle.x.iter().map(|&x| x * factor).collect();
    out.t = bundle.t * factor;
    out.v = VariableBundle::map_rows(&bundle.v, |_, v| v / factor);
    Ok(out)
}

pub fn restore_delta(bundle: &VariableBundle, eps: f64, delta: f64) -> Result<VariableBundle> {
    bundle.expect(Frame::DeltaRemoved)?;
    positive("eps", eps)?;
    positive("delta", delta)?;
    let factor = delta / eps.sqrt();
    let mut out = bundle.clone();
    out.frame = Frame::Scaled;
    out.x = bundle.x.iter().map(|&x| x / factor).collect();
    out.t = bundle.t / factor;
    out.v = VariableBundle::map_rows(&bundle.v, |_, v| v * factor);
    Ok(out)
}

/// Physical -> delta-removed in one call.
pub fn to_long_wave(bundle: &VariableBundle, params: &ScalingParams) -> Result<VariableBundle> {
    let nd = to_nondim(bundle, params)?;
    let scaled = scale_small_amplitude(&nd, params.eps())?;
    remove_delta(&scaled, params.eps(), params.delta())
}

/// Delta-removed -> physical in one call.
pub fn from_long_wave(bundle: &VariableBundle, params: &ScalingParams) -> Result<VariableBundle> {
    let scaled = restore_delta(bundle, params.eps(), params.delta())?;
    let nd = unscale_small_amplitude(&scaled, params.eps())?;
    to_physical(&nd, params)
}

/// Max-abs residuals of the small-amplitude limit system, keyed by equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub residuals: BTreeMap<String, f64>,
    /// Size of the `eps (u u_x + v u_z)` term the limit system drops.
    #[serde(skip)]
    pub neglected_advection: f64,
}

impl ResidualReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().fold(0.0, |m, &v| m.max(v))
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.residuals.get(name).copied()
    }

    /// `{equation_name: max_abs_residual}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.residuals).expect("map of floats always serializes")
    }
}

pub const MOMENTUM_X: &str = "u_t+p_x";
pub const MOMENTUM_Z: &str = "p_z";
pub const MASS: &str = "u_x+v_z";
pub const KINEMATIC_SURFACE: &str = "v-eta_t@z=1";
pub const DYNAMIC_SURFACE: &str = "p-eta@z=1";
pub const KINEMATIC_BOTTOM: &str = "v@z=0";

/// Residuals of the limit system
///
/// ```text
/// u_t + p_x = 0,  p_z = 0,  u_x + v_z = 0,
/// v = eta_t and p = eta on z = 1,  v = 0 on z = 0
/// ```
///
/// for the middle bundle of a snapshot triple at `t - dt, t, t + dt`.
/// `x` derivatives are spectral on the periodic row, `z` derivatives are
/// second-order finite differences on the column, `t` derivatives are centered.
pub fn audit_limit_system(snapshots: [&VariableBundle; 3], eps: f64) -> Result<ResidualReport> {
    positive("eps", eps)?;
    let [prev, cur, next] = snapshots;
    for b in snapshots {
        b.expect(Frame::DeltaRemoved)?;
        if b.x != cur.x || b.z != cur.z {
            return Err(Error::Shape("snapshots must share x and z sampling".into()));
        }
    }
    let dt = 0.5 * (next.t - prev.t);
    if !(dt > 0.0) || ((cur.t - prev.t) - (next.t - cur.t)).abs() > 1e-6 * dt {
        return Err(Error::InvalidParameter(
            "snapshots must be equally spaced in increasing time".into(),
        ));
    }
    let grid = row_grid(&cur.x)?;
    let spectral = Spectral::new(grid);
    let iz_top = column_index(&cur.z, 1.0)
        .ok_or_else(|| Error::Shape("z column must contain the surface z = 1".into()))?;
    let iz_bot = column_index(&cur.z, 0.0)
        .ok_or_else(|| Error::Shape("z column must contain the bed z = 0".into()))?;

    let ddx = |row: &[f64]| -> Result<Vec<f64>> {
        Ok(spectral
            .deriv(&Field::new(grid, row.to_vec())?, 1)?
            .into_samples())
    };
    let ddt = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter()
            .zip(b)
            .map(|(x0, x1)| (x1 - x0) / (2.0 * dt))
            .collect()
    };
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let nz = cur.z.len();
    let nx = cur.x.len();
    let mut mom_x: f64 = 0.0;
    let mut mass: f64 = 0.0;
    let mut advection: f64 = 0.0;
    let u_z = z_derivative(&cur.z, &cur.u)?;
    let v_z = z_derivative(&cur.z, &cur.v)?;
    let p_z = z_derivative(&cur.z, &cur.p)?;
    for iz in 0..nz {
        let u_t = ddt(&prev.u[iz], &next.u[iz]);
        let p_x = ddx(&cur.p[iz])?;
        let u_x = ddx(&cur.u[iz])?;
        for ix in 0..nx {
            mom_x = mom_x.max((u_t[ix] + p_x[ix]).abs());
            mass = mass.max((u_x[ix] + v_z[iz][ix]).abs());
            let adv = cur.u[iz][ix] * u_x[ix] + cur.v[iz][ix] * u_z[iz][ix];
            advection = advection.max((eps * adv).abs());
        }
    }
    let mom_z = p_z.iter().fold(0.0f64, |m, row| m.max(max_abs(row)));

    let eta_t = ddt(&prev.eta, &next.eta);
    let kin_top = cur.v[iz_top]
        .iter()
        .zip(&eta_t)
        .fold(0.0f64, |m, (v, e)| m.max((v - e).abs()));
    let dyn_top = cur.p[iz_top]
        .iter()
        .zip(&cur.eta)
        .fold(0.0f64, |m, (p, e)| m.max((p - e).abs()));
    let kin_bot = max_abs(&cur.v[iz_bot]);

    let residuals = BTreeMap::from([
        (MOMENTUM_X.to_string(), mom_x),
        (MOMENTUM_Z.to_string(), mom_z),
        (MASS.to_string(), mass),
        (KINEMATIC_SURFACE.to_string(), kin_top),
        (DYNAMIC_SURFACE.to_string(), dyn_top),
        (KINEMATIC_BOTTOM.to_string(), kin_bot),
    ]);
    Ok(ResidualReport {
        residuals,
        neglected_advection: advection,
    })
}

/// Periodic grid matching an equispaced `x` row.
fn row_grid(x: &[f64]) -> Result<Grid1D> {
    let n = x.len();
    if n < 2 {
        return Err(Error::Shape(
            "x row too short for spectral derivatives".into(),
        ));
    }
    let dx = x[1] - x[0];
    let uniform = x
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dx).abs() <= 1e-9 * dx.abs());
    if !uniform || !(dx > 0.0) {
        return Err(Error::Shape(
            "x row must be increasing and equispaced".into(),
        ));
    }
    Grid1D::new(n, n as f64 * dx)
}

fn column_index(z: &[f64], target: f64) -> Option<usize> {
    z.iter().position(|&zk| (zk - target).abs() <= 1e-12)
}

/// Second-order finite differences along the column (non-uniform allowed).
fn z_derivative(z: &[f64], rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let nz = z.len();
    let nx = rows.first().map_or(0, Vec::len);
    if nz < 2 {
        return Err(Error::Shape("z column needs at least two samples".into()));
    }
    if z.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Shape("z column must be strictly increasing".into()));
    }
    let mut out = vec![vec![0.0; nx]; nz];
    if nz == 2 {
        let h = z[1] - z[0];
        for ix in 0..nx {
            let d = (rows[1][ix] - rows[0][ix]) / h;
            out[0][ix] = d;
            out[1][ix] = d;
        }
        return Ok(out);
    }
    for (iz, out_row) in out.iter_mut().enumerate() {
        // three-point stencil on (i0, i1, i2), evaluated at z[iz]
        let (i0, i1, i2) = if iz == 0 {
            (0, 1, 2)
        } else if iz == nz - 1 {
            (nz - 3, nz - 2, nz - 1)
        } else {
            (iz - 1, iz, iz + 1)
        };
        let w = lagrange_derivative_weights([z[i0], z[i1], z[i2]], z[iz]);
        for ix in 0..nx {
            out_row[ix] = w[0] * rows[i0][ix] + w[1] * rows[i1][ix] + w[2] * rows[i2][ix];
        }
    }
    Ok(out)
}

fn lagrange_derivative_weights(nodes: [f64; 3], at: f64) -> [f64; 3] {
    let [a, b, c] = nodes;
    [
        ((at - b) + (at - c)) / ((a - b) * (a - c)),
        ((at - a) + (at - c)) / ((b - a) * (b - c)),
        ((at - a) + (at - b)) / ((c - a) * (c - b)),
    ]
}
