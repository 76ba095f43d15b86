//! Exact solutions of the small-amplitude shallow-water limit.
//!
//! In the limit the surface displacement obeys `eta_tt = eta_xx`, so
//! `eta = f(x - t) + g(x + t)`. For irrotational flow the velocity field is
//! then `u = eta + c0` (uniform over depth) and `v = -z eta_x` (linear in depth).

use crate::error::{Error, Result};
use crate::field::{Field, Spectral};
use crate::scaling::{Frame, VariableBundle};

/// Right- and left-moving surface profiles plus the background velocity `c0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceProfile {
    f: Field,
    g_left: Field,
    c0: f64,
}

impl SurfaceProfile {
    pub fn new(f: Field, g_left: Field, c0: f64) -> Result<Self> {
        f.check_same_grid(&g_left)?;
        if !c0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "c0 must be finite, got {c0}"
            )));
        }
        Ok(Self { f, g_left, c0 })
    }

    /// A pure right-mover `eta = f(x - t)`.
    pub fn right_moving(f: Field, c0: f64) -> Result<Self> {
        let zero = Field::zeros(f.grid());
        Self::new(f, zero, c0)
    }

    pub fn f(&self) -> &Field {
        &self.f
    }

    pub fn g_left(&self) -> &Field {
        &self.g_left
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }
}

/// `eta(x, t) = f(x - t) + g_left(x + t)`, with both shifts done spectrally.
pub fn evolve_dalembert(prof: &SurfaceProfile, t: f64) -> Result<Field> {
    evolve_with(&Spectral::new(prof.f.grid()), prof, t)
}

pub(crate) fn evolve_with(spectral: &Spectral, prof: &SurfaceProfile, t: f64) -> Result<Field> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t must be finite, got {t}"
        )));
    }
    let right = spectral.translate(&prof.f, t)?;
    let left = spectral.translate(&prof.g_left, -t)?;
    right.zip_with(&left, |a, b| a + b)
}

/// Irrotational velocity at height `z`: `u = eta + c0`, `v = -z eta_x`.
pub fn reconstruct_irrotational(
    eta: &Field,
    eta_x: &Field,
    c0: f64,
    z: f64,
) -> Result<(Field, Field)> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::InvalidParameter(format!(
            "z must lie in [0, 1], got {z}"
        )));
    }
    let u = eta.map(|e| e + c0)?;
    let v = eta_x.map(|ex| -z * ex)?;
    Ok((u, v))
}

/// Sample the irrotational limit solution at time `t` on a `z` column, in the
/// delta-removed frame (`p = eta` throughout the depth).
pub fn limit_bundle(prof: &SurfaceProfile, t: f64, z_column: &[f64]) -> Result<VariableBundle> {
    let spectral = Spectral::new(prof.f.grid());
    let eta = evolve_with(&spectral, prof, t)?;
    let eta_x = spectral.deriv(&eta, 1)?;
    let mut u = Vec::with_capacity(z_column.len());
    let mut v = Vec::with_capacity(z_column.len());
    let mut p = Vec::with_capacity(z_column.len());
    for &z in z_column {
        let (uz, vz) = reconstruct_irrotational(&eta, &eta_x, prof.c0, z)?;
        u.push(uz.into_samples());
        v.push(vz.into_samples());
        p.push(eta.samples().to_vec());
    }
    VariableBundle::new(
        Frame::DeltaRemoved,
        eta.grid().points(),
        z_column.to_vec(),
        t,
        u,
        v,
        p,
        eta.into_samples(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid1D;

    fn gaussian(grid: Grid1D, centre: f64) -> Field {
        Field::from_fn(grid, |x| (-(x - centre).powi(2) / 2.0).exp()).unwrap()
    }

    #[test]
    fn time_zero_is_sum_of_profiles() {
        let g = Grid1D::new(64, 40.0).unwrap();
        let prof = SurfaceProfile::new(gaussian(g, -3.0), gaussian(g, 5.0), 0.0).unwrap();
        let eta = evolve_dalembert(&prof, 0.0).unwrap();
        let sum = prof.f().zip_with(prof.g_left(), |a, b| a + b).unwrap();
        assert!(eta.linf_distance(&sum).unwrap() < 1e-15);
    }

    #[test]
    fn still_surface_gives_uniform_current() {
        let g = Grid1D::new(32, 10.0).unwrap();
        let zero = Field::zeros(g);
        let (u, v) = reconstruct_irrotational(&zero, &zero, 0.7, 0.4).unwrap();
        assert!(u.samples().iter().all(|&s| s == 0.7));
        assert!(v.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn bed_has_no_vertical_velocity() {
        let g = Grid1D::new(64, 40.0).unwrap();
        let eta = gaussian(g, 1.0);
        let eta_x = eta.deriv(1).unwrap();
        let (_, v) = reconstruct_irrotational(&eta, &eta_x, 0.2, 0.0).unwrap();
        assert_eq!(v.max_abs(), 0.0);
    }

    #[test]
    fn z_outside_column_rejected() {
        let g = Grid1D::new(32, 10.0).unwrap();
        let zero = Field::zeros(g);
        assert!(reconstruct_irrotational(&zero, &zero, 0.0, 1.0001).is_err());
        assert!(reconstruct_irrotational(&zero, &zero, 0.0, -0.1).is_err());
    }

    #[test]
    fn profiles_on_different_grids_rejected() {
        let a = Field::zeros(Grid1D::new(32, 10.0).unwrap());
        let b = Field::zeros(Grid1D::new(32, 11.0).unwrap());
        assert!(SurfaceProfile::new(a, b, 0.0).is_err());
    }
}
