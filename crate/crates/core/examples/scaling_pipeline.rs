//! Physical water-wave variables carried to the long-wave frame and back.

use wavelab::linear_sw::{limit_bundle, SurfaceProfile};
use wavelab::scaling::{from_long_wave, to_long_wave, ScalingParams};
use wavelab::{Field, Grid1D};

fn main() -> wavelab::Result<()> {
    let params = ScalingParams::water(1.0, 10.0, 0.1)?;
    println!(
        "h0 = 1 m, lambda = 10 m, a = 0.1 m: eps = {}, delta = {}, sqrt(g h0) = {:.4} m/s",
        params.eps(),
        params.delta(),
        params.wave_speed()
    );

    let grid = Grid1D::new(64, 20.0)?;
    let z: Vec<f64> = (0..=4).map(|i| i as f64 / 4.0).collect();
    let f = Field::from_fn(grid, |x| (-x * x).exp())?;
    let limit = limit_bundle(&SurfaceProfile::right_moving(f, 0.0)?, 0.5, &z)?;

    let physical = from_long_wave(&limit, &params)?;
    let top = physical.z().len() - 1;
    println!(
        "physical frame: t = {:.4} s, max eta = {:.4} m, surface pressure range [{:.1}, {:.1}] Pa",
        physical.t(),
        physical.eta().iter().fold(f64::MIN, |m, &v| m.max(v)),
        physical.p()[top].iter().fold(f64::MAX, |m, &v| m.min(v)),
        physical.p()[top].iter().fold(f64::MIN, |m, &v| m.max(v)),
    );

    let again = from_long_wave(&to_long_wave(&physical, &params)?, &params)?;
    println!(
        "round trip relative gap: {:.2e}",
        again.max_relative_gap(&physical)?
    );

    // eps = delta^2 makes the delta-removal map the identity
    let critical = ScalingParams::water(1.0, 10.0, 0.01)?;
    let lw = to_long_wave(&from_long_wave(&limit, &critical)?, &critical)?;
    println!(
        "eps = delta^2: x unchanged exactly: {}",
        lw.x() == limit.x()
    );
    Ok(())
}
