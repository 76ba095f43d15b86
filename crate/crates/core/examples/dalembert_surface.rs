//! Exact small-amplitude surface evolution and the audit of the limit system.

use wavelab::linear_sw::{evolve_dalembert, limit_bundle, SurfaceProfile};
use wavelab::scaling::audit_limit_system;
use wavelab::{Field, Grid1D};

fn main() -> wavelab::Result<()> {
    let grid = Grid1D::new(256, 40.0)?;
    let right = Field::from_fn(grid, |x| (-(x + 5.0).powi(2) / 2.0).exp())?;
    let left = Field::from_fn(grid, |x| 0.5 * (-(x - 5.0).powi(2)).exp())?;
    let prof = SurfaceProfile::new(right, left, 0.0)?;

    for t in [0.0, 2.5, 5.0, 7.5] {
        let eta = evolve_dalembert(&prof, t)?;
        let (j, peak) = eta
            .samples()
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |best, (j, &v)| if v > best.1 { (j, v) } else { best },
            );
        println!(
            "t = {t:4.1}: max eta = {peak:.4} at x = {:6.2}",
            grid.point(j)
        );
    }

    // the audit is for the irrotational right-mover
    let mover = SurfaceProfile::right_moving(prof.f().clone(), 0.3)?;
    let z: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let dt = 1e-5;
    let snaps = [2.0 - dt, 2.0, 2.0 + dt]
        .iter()
        .map(|&t| limit_bundle(&mover, t, &z))
        .collect::<wavelab::Result<Vec<_>>>()?;
    let report = audit_limit_system([&snaps[0], &snaps[1], &snaps[2]], 0.1)?;
    println!("limit-system residuals:\n{}", report.to_json());
    println!(
        "size of the dropped advection term at eps = 0.1: {:.3e}",
        report.neglected_advection
    );
    Ok(())
}
