//! Evolve a smooth bump under the Camassa-Holm equation and watch the three
//! conserved quantities.

use wavelab::ch::{ChParams, ChSolver, RhsForm};
use wavelab::{Field, Grid1D};

fn main() -> wavelab::Result<()> {
    let grid = Grid1D::new(512, 40.0)?;
    let kappa = 0.25;
    let solver = ChSolver::new(grid, ChParams::new(kappa, 1e-3, 5.0)?, RhsForm::Nonlocal)?;
    let u0 = Field::from_fn(grid, |x| 1.0 / (x / 2.0).cosh().powi(2))?;
    let state = solver.prepare(u0)?;
    let initial = solver.invariants(&state.u)?;
    println!("    t        H0            H1            H2");
    let end = solver.run(state, |k, s| {
        if k % 1000 == 0 {
            let h = solver.invariants(&s.u)?;
            println!("{:5.2}  {:.10}  {:.10}  {:.10}", s.t, h.h0, h.h1, h.h2);
        }
        Ok(())
    })?;
    let drift = solver.invariants(&end.u)?.relative_drift(&initial);
    println!(
        "relative drift: H0 {:.1e}, H1 {:.1e}, H2 {:.1e}",
        drift[0], drift[1], drift[2]
    );
    println!("max |u_x| at the end: {:.4}", solver.max_slope(&end.u)?);
    Ok(())
}
