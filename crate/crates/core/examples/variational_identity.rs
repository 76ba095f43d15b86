//! First variation of the right-invariant action against the pairing with
//! the Camassa-Holm residual, under refinement of the time step.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wavelab::variational::{
    observed_order, refinement_sweep, DiffeoPath, Lagrangian, RandomPerturbationSpec,
};

fn main() -> wavelab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let recipe = RandomPerturbationSpec::draw(4, 0.1, &mut rng);
    let levels = [(256, 32, 1e-3), (256, 64, 1e-3), (256, 128, 1e-3)];
    for lagrangian in [Lagrangian::Velocity, Lagrangian::Elevation { c0: 0.3 }] {
        let report = refinement_sweep(
            &levels,
            2.0 * PI,
            |grid, steps| {
                DiffeoPath::from_fn(grid, 1.0, steps, |t, x| {
                    x + 0.05 * (x - t).sin() + 0.02 * (2.0 * x + t * t).cos()
                })
            },
            |grid, steps| recipe.sample(grid, 1.0, steps),
            lagrangian,
        )?;
        println!("{lagrangian:?}");
        for row in &report.refinement_table {
            println!(
                "  K = {:3}: D_fd {:.8e}  D_el {:.8e}  D_mid {:.8e}  rel gap {:.2e}",
                row.steps, row.d_fd, row.d_el, row.d_mid, row.rel_gap
            );
        }
        let gaps: Vec<f64> = report
            .refinement_table
            .iter()
            .map(|r| (r.d_fd - r.d_el).abs())
            .collect();
        println!(
            "  observed order in dt: {:.3}, {:.3}",
            observed_order(gaps[0], gaps[1]),
            observed_order(gaps[1], gaps[2])
        );
    }
    Ok(())
}
