//! Two peakons overtaking each other: the faster one hands its momentum to
//! the slower one and the speed set survives the interaction.

use wavelab::peakon::{evolve_logged, hamiltonian, PeakonEnsemble};

fn main() -> wavelab::Result<()> {
    let start = PeakonEnsemble::new(vec![-10.0, 0.0], vec![2.0, 1.0])?;
    let (end, log) = evolve_logged(&start, 1e-3, 40.0, 5000)?;
    println!("{}", log.header());
    for row in log.rows() {
        let cols: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        println!("{}", cols.join(","));
    }
    println!("speeds at t = 40: {:?}", end.velocities());
    let drift = (hamiltonian(&end) - hamiltonian(&start)).abs() / hamiltonian(&start);
    println!("relative H drift: {drift:.1e}");
    Ok(())
}
