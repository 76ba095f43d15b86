//! Peakon ODE against the pseudospectral PDE solver for the same two-peakon
//! initial state.

use wavelab::ch::{ChParams, ChSolver, RhsForm};
use wavelab::peakon::{evolve, mollified_field, sample_field, PeakonEnsemble};
use wavelab::Grid1D;

fn main() -> wavelab::Result<()> {
    let grid = Grid1D::new(4096, 60.0)?;
    let ens = PeakonEnsemble::new(vec![-7.5, 7.5], vec![1.0, 0.5])?;
    let solver = ChSolver::new(grid, ChParams::new(0.0, 1e-3, 1.0)?, RhsForm::Nonlocal)?;
    let mut ode = ens.clone();
    let mut pde = solver.prepare(mollified_field(&ens, grid)?)?;
    for _ in 0..5 {
        ode = evolve(&ode, 1e-3, 1.0)?;
        pde = solver.run(pde, |_, _| Ok(()))?;
        let gap = sample_field(&ode, grid)?.linf_distance(&pde.u)?;
        println!(
            "t = {:.1}: peaks at {:?}, L_inf gap {gap:.3e}",
            ode.t(),
            ode.q()
        );
    }
    Ok(())
}
