//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Criteria run on separate threads.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use wavelab::ch::{
    mode_crest, peak_position, rhs_local, rhs_nonlocal, ChParams, ChSolver, RhsForm,
};
use wavelab::linear_sw::{evolve_dalembert, limit_bundle, SurfaceProfile};
use wavelab::peakon::{
    evolve, hamiltonian, mollified_field, momentum, ode_rhs, sample_field, PeakonEnsemble,
};
use wavelab::scaling::{
    audit_limit_system, from_long_wave, remove_delta, scale_small_amplitude, to_long_wave,
    to_nondim, ScalingParams,
};
use wavelab::variational::{
    el_residual, observed_order, velocity_snapshots, verify_variational_identity, DiffeoPath,
    Lagrangian, PathPerturbation, RandomPerturbationSpec,
};
use wavelab::{Field, Grid1D, Spectral};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        pass: parts.iter().all(|o| o.pass),
        detail: parts
            .into_iter()
            .map(|o| o.detail)
            .collect::<Vec<_>>()
            .join("; "),
    }
}

/// 1. `(1 - d_xx)^{-1} cos(kx) = cos(kx) / (1 + k^2)`.
fn helmholtz_inversion() -> Outcome {
    let grid = Grid1D::new(256, 2.0 * PI).unwrap();
    let sp = Spectral::new(grid);
    let mut worst: f64 = 0.0;
    for k in 1..=10 {
        let k = k as f64;
        let f = Field::from_fn(grid, |x| (k * x).cos()).unwrap();
        let exact = Field::from_fn(grid, |x| (k * x).cos() / (1.0 + k * k)).unwrap();
        worst = worst.max(sp.helmholtz_inv(&f).unwrap().linf_distance(&exact).unwrap());
    }
    check(
        worst <= 1e-12,
        format!("max L_inf error {worst:.2e} (tol 1e-12)"),
    )
}

fn random_band_limited(grid: Grid1D, modes: usize, rng: &mut ChaCha8Rng) -> Field {
    let sp = Spectral::new(grid);
    let n = grid.n();
    let mut hat = vec![Complex64::new(0.0, 0.0); n];
    hat[0] = Complex64::new(rng.gen_range(-1.0..1.0) * n as f64, 0.0);
    for m in 1..=modes {
        let scale = n as f64 / (1.0 + (m * m) as f64 / 16.0);
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
        hat[m] = c;
        hat[n - m] = c.conj();
    }
    Field::new(grid, sp.inverse(hat)).unwrap()
}

/// 2. Local and nonlocal right-hand sides agree.
fn rhs_equivalence() -> Outcome {
    let grid = Grid1D::new(512, 2.0 * PI).unwrap();
    let sp = Spectral::new(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let u = random_band_limited(grid, 80, &mut rng);
        let kappa = 0.25 * (i % 4) as f64;
        let a = rhs_local(&sp, &u, kappa, true).unwrap();
        let b = rhs_nonlocal(&sp, &u, kappa, true).unwrap();
        worst = worst.max(a.linf_distance(&b).unwrap());
    }
    check(
        worst <= 1e-8,
        format!("max L_inf gap over 20 fields {worst:.2e} (tol 1e-8)"),
    )
}

/// 3. Small sine travels at the linear phase speed `2 kappa / (1 + k^2)`.
fn dispersion() -> Outcome {
    let grid = Grid1D::new(128, 2.0 * PI).unwrap();
    let kappa = 0.5;
    let (dt, t_end) = (1e-3, 5.0);
    let solver = ChSolver::new(
        grid,
        ChParams::new(kappa, dt, t_end).unwrap(),
        RhsForm::Nonlocal,
    )
    .unwrap();
    let u0 = Field::from_fn(grid, |x| 1e-6 * x.sin()).unwrap();
    let state = solver.prepare(u0).unwrap();
    let start = mode_crest(&state.u, 1).unwrap();
    let end = solver.run(state, |_, _| Ok(())).unwrap();
    let shift = (mode_crest(&end.u, 1).unwrap() - start).rem_euclid(2.0 * PI);
    let speed = shift / t_end;
    let expected = 2.0 * kappa / 2.0;
    let rel = (speed - expected).abs() / expected;
    check(
        rel <= 5e-3,
        format!("crest speed {speed:.6} vs {expected}, rel err {rel:.2e} (tol 5e-3)"),
    )
}

/// 4. Conservation of H0, H1, H2 for a smooth bump.
fn conservation() -> Outcome {
    let grid = Grid1D::new(1024, 40.0).unwrap();
    let solver = ChSolver::new(
        grid,
        ChParams::new(0.0, 1e-3, 10.0).unwrap(),
        RhsForm::Nonlocal,
    )
    .unwrap();
    let u0 = Field::from_fn(grid, |x| 1.0 / (x / 2.0).cosh().powi(2)).unwrap();
    let state = solver.prepare(u0).unwrap();
    let initial = solver.invariants(&state.u).unwrap();
    let end = solver.run(state, |_, _| Ok(())).unwrap();
    let d = solver.invariants(&end.u).unwrap().relative_drift(&initial);
    check(
        d[0] <= 1e-10 && d[1] <= 1e-6 && d[2] <= 1e-5,
        format!(
            "relative drift H0 {:.2e} (tol 1e-10), H1 {:.2e} (tol 1e-6), H2 {:.2e} (tol 1e-5)",
            d[0], d[1], d[2]
        ),
    )
}

/// Unwrapped displacement of the main peak over a run.
fn track_peak(solver: &ChSolver, u0: Field) -> (f64, Field) {
    let grid = u0.grid();
    let state = solver.prepare(u0).unwrap();
    let mut last = peak_position(&state.u);
    let mut travelled = 0.0;
    let end = solver
        .run(state, |k, s| {
            if k % 10 == 0 {
                let now = peak_position(&s.u);
                travelled += grid.wrap(now - last);
                last = now;
            }
            Ok(())
        })
        .unwrap();
    let now = peak_position(&end.u);
    travelled += grid.wrap(now - last);
    (travelled, end.u)
}

/// 5. A band-limited peakon of speed 1 travels 5 units and keeps its shape.
fn single_peakon() -> Outcome {
    let grid = Grid1D::new(2048, 40.0).unwrap();
    let solver = ChSolver::new(
        grid,
        ChParams::new(0.0, 1e-3, 5.0).unwrap(),
        RhsForm::Nonlocal,
    )
    .unwrap();
    let ens = PeakonEnsemble::new(vec![0.0], vec![1.0]).unwrap();
    let start = peak_position(
        &solver
            .prepare(mollified_field(&ens, grid).unwrap())
            .unwrap()
            .u,
    );
    let (travelled, u) = track_peak(&solver, mollified_field(&ens, grid).unwrap());
    let position = start + travelled;
    let exact = sample_field(&PeakonEnsemble::new(vec![5.0], vec![1.0]).unwrap(), grid).unwrap();
    let profile = u.linf_distance(&exact).unwrap();
    check(
        (position - 5.0).abs() <= 0.05 && profile <= 2e-2,
        format!(
            "peak at {position:.5} (want 5 +/- 0.05), profile L_inf error {profile:.2e} (tol 2e-2)"
        ),
    )
}

/// 6. Two-peakon ODE against the PDE.
fn ode_pde_cross_validation() -> Outcome {
    let grid = Grid1D::new(4096, 60.0).unwrap();
    let ens = PeakonEnsemble::new(vec![-7.5, 7.5], vec![1.0, 0.5]).unwrap();
    let (dt, t_end) = (1e-3, 5.0);
    let ode = sample_field(&evolve(&ens, dt, t_end).unwrap(), grid).unwrap();
    let solver = ChSolver::new(
        grid,
        ChParams::new(0.0, dt, t_end).unwrap(),
        RhsForm::Nonlocal,
    )
    .unwrap();
    let pde = solver
        .run(
            solver
                .prepare(mollified_field(&ens, grid).unwrap())
                .unwrap(),
            |_, _| Ok(()),
        )
        .unwrap();
    let gap = ode.linf_distance(&pde.u).unwrap();
    check(gap <= 2e-2, format!("L_inf gap {gap:.2e} (tol 2e-2)"))
}

/// 7. Peakon equations are Hamilton's equations for H; H and P are conserved.
fn peakon_hamiltonian() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let step = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=5);
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let ens = PeakonEnsemble::new(q.clone(), p.clone()).unwrap();
        let (qdot, pdot) = ode_rhs(&ens);
        let h = |q: &[f64], p: &[f64]| {
            hamiltonian(&PeakonEnsemble::new(q.to_vec(), p.to_vec()).unwrap())
        };
        for i in 0..n {
            let (mut pp, mut pm) = (p.clone(), p.clone());
            pp[i] += step;
            pm[i] -= step;
            let dh_dp = (h(&q, &pp) - h(&q, &pm)) / (2.0 * step);
            let (mut qp, mut qm) = (q.clone(), q.clone());
            qp[i] += step;
            qm[i] -= step;
            let dh_dq = (h(&qp, &p) - h(&qm, &p)) / (2.0 * step);
            worst = worst.max((qdot[i] - dh_dp).abs() / qdot[i].abs().max(1.0));
            worst = worst.max((pdot[i] + dh_dq).abs() / pdot[i].abs().max(1.0));
        }
    }
    let grad = check(
        worst <= 1e-8,
        format!("max gradient mismatch {worst:.2e} (tol 1e-8)"),
    );

    let ens = PeakonEnsemble::new(vec![-6.0, 0.0, 5.0], vec![2.0, 1.0, 0.5]).unwrap();
    let end = evolve(&ens, 1e-3, 20.0).unwrap();
    let dh = ((hamiltonian(&end) - hamiltonian(&ens)) / hamiltonian(&ens)).abs();
    let dp = ((momentum(&end) - momentum(&ens)) / momentum(&ens)).abs();
    let drift = check(
        dh <= 1e-8 && dp <= 1e-8,
        format!("drift over t=20: H {dh:.2e}, P {dp:.2e} (tol 1e-8)"),
    );
    all(vec![grad, drift])
}

fn variational_path(grid: Grid1D, steps: usize) -> DiffeoPath {
    DiffeoPath::from_fn(grid, 1.0, steps, |t, x| {
        x + 0.05 * (x - t).sin() + 0.02 * (2.0 * x + t * t).cos()
    })
    .unwrap()
}

fn variational_perturbation(grid: Grid1D, steps: usize) -> PathPerturbation {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    RandomPerturbationSpec::draw(4, 0.1, &mut rng)
        .sample(grid, 1.0, steps)
        .unwrap()
}

/// 8. First variation of the discrete action matches the CH residual pairing.
fn variational_identity() -> Outcome {
    let grid = Grid1D::new(256, 2.0 * PI).unwrap();
    let eps = 1e-3;
    let v = Lagrangian::Velocity;

    let path = variational_path(grid, 64);
    let pert = variational_perturbation(grid, 64);
    let base = verify_variational_identity(&path, &pert, eps, v).unwrap();
    let gap = check(
        base.rel_gap <= 1e-3,
        format!(
            "K=64: D_fd {:.6e}, D_el {:.6e}, rel gap {:.2e} (tol 1e-3)",
            base.d_fd, base.d_el, base.rel_gap
        ),
    );

    // eps halving: successive differences of D_fd shrink by 4
    let d: Vec<f64> = [eps, eps / 2.0, eps / 4.0]
        .iter()
        .map(|&e| {
            verify_variational_identity(&path, &pert, e, v)
                .unwrap()
                .d_fd
        })
        .collect();
    let eps_order = observed_order(d[0] - d[1], d[1] - d[2]);
    let eps_ok = check(
        eps_order >= 1.9,
        format!("order in eps {eps_order:.3} (min 1.9)"),
    );

    // dt halving: the gap shrinks by 4
    let gaps: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&k| {
            let r = verify_variational_identity(
                &variational_path(grid, k),
                &variational_perturbation(grid, k),
                eps,
                v,
            )
            .unwrap();
            r.abs_gap
        })
        .collect();
    let o1 = observed_order(gaps[0], gaps[1]);
    let o2 = observed_order(gaps[1], gaps[2]);
    let dt_ok = check(
        o1.min(o2) >= 1.9,
        format!("order in dt {o1:.3}, {o2:.3} (min 1.9)"),
    );

    // elevation action: the residual gains exactly 2 c0 eta_x
    let c0 = 0.3;
    let snaps = velocity_snapshots(&path).unwrap();
    let sp = Spectral::new(grid);
    let mut worst: f64 = 0.0;
    for k in 1..path.steps() {
        let plain = el_residual(&snaps, path.dt(), k, v).unwrap();
        let shifted = el_residual(&snaps, path.dt(), k, Lagrangian::Elevation { c0 }).unwrap();
        let extra = sp
            .deriv(&snaps[k], 1)
            .unwrap()
            .map(|d| 2.0 * c0 * d)
            .unwrap();
        let diff = shifted.zip_with(&plain, |a, b| a - b).unwrap();
        worst = worst.max(diff.linf_distance(&extra).unwrap());
    }
    let eta = verify_variational_identity(&path, &pert, eps, Lagrangian::Elevation { c0 }).unwrap();
    let eta_ok = check(
        worst <= 1e-14 && eta.rel_gap <= 1e-3,
        format!(
            "c0=0.3: residual shift error {worst:.1e} (tol 1e-14), rel gap {:.2e} (tol 1e-3)",
            eta.rel_gap
        ),
    );
    all(vec![gap, eps_ok, dt_ok, eta_ok])
}

/// 9. Right-moving limit fields satisfy the limit system; d'Alembert
///    evolution composes.
fn limit_audit() -> Outcome {
    let grid = Grid1D::new(256, 40.0).unwrap();
    let f = Field::from_fn(grid, |x| (-(x + 3.0).powi(2) / 2.0).exp()).unwrap();
    let prof = SurfaceProfile::right_moving(f.clone(), 0.3).unwrap();
    let z: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let (t, dt) = (2.0, 1e-5);
    let snaps: Vec<_> = [t - dt, t, t + dt]
        .iter()
        .map(|&s| limit_bundle(&prof, s, &z).unwrap())
        .collect();
    let report = audit_limit_system([&snaps[0], &snaps[1], &snaps[2]], 0.1).unwrap();
    let audit = check(
        report.max_residual() <= 1e-8,
        format!(
            "max limit-system residual {:.2e} (tol 1e-8)",
            report.max_residual()
        ),
    );

    let g = Field::from_fn(grid, |x| 0.5 * (-(x - 4.0).powi(2)).exp()).unwrap();
    let both = SurfaceProfile::new(f, g, 0.0).unwrap();
    let sp = Spectral::new(grid);
    let (t1, t2) = (1.3, 2.9);
    let mid = SurfaceProfile::new(
        sp.translate(both.f(), t1).unwrap(),
        sp.translate(both.g_left(), -t1).unwrap(),
        0.0,
    )
    .unwrap();
    let semigroup = evolve_dalembert(&mid, t2)
        .unwrap()
        .linf_distance(&evolve_dalembert(&both, t1 + t2).unwrap())
        .unwrap();
    let sg = check(
        semigroup <= 1e-12,
        format!("semigroup gap {semigroup:.2e} (tol 1e-12)"),
    );
    all(vec![audit, sg])
}

/// 10. Scaling pipeline round trip; `eps = delta^2` makes remove_delta the identity.
fn scaling_pipeline() -> Outcome {
    let grid = Grid1D::new(64, 20.0).unwrap();
    let z: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
    let f = Field::from_fn(grid, |x| (-x * x / 4.0).exp()).unwrap();
    let limit = limit_bundle(&SurfaceProfile::right_moving(f, 0.2).unwrap(), 0.7, &z).unwrap();
    let params = ScalingParams::water(2.0, 30.0, 0.15).unwrap();
    let physical = from_long_wave(&limit, &params).unwrap();
    let back = from_long_wave(&to_long_wave(&physical, &params).unwrap(), &params).unwrap();
    let gap = back.max_relative_gap(&physical).unwrap();
    let trip = check(
        gap <= 1e-13,
        format!("round-trip relative gap {gap:.2e} (tol 1e-13)"),
    );

    let square = ScalingParams::water(1.0, 10.0, 0.01).unwrap();
    let scaled = scale_small_amplitude(
        &to_nondim(&from_long_wave(&limit, &square).unwrap(), &square).unwrap(),
        square.eps(),
    )
    .unwrap();
    let removed = remove_delta(&scaled, square.eps(), square.delta()).unwrap();
    let exact = removed.x() == scaled.x() && removed.t() == scaled.t() && removed.v() == scaled.v();
    let ident = check(
        exact,
        format!("eps = delta^2 leaves x, t, v bit-identical: {exact}"),
    );
    all(vec![trip, ident])
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("helmholtz inversion", helmholtz_inversion),
        ("rhs equivalence", rhs_equivalence),
        ("dispersion", dispersion),
        ("conservation", conservation),
        ("single peakon transport", single_peakon),
        ("ode-pde cross-validation", ode_pde_cross_validation),
        ("peakon hamiltonian structure", peakon_hamiltonian),
        ("variational identity", variational_identity),
        ("small-amplitude limit audit", limit_audit),
        ("scaling pipeline", scaling_pipeline),
    ];
    let results: Vec<Outcome> = thread::scope(|s| {
        let handles: Vec<_> = criteria.iter().map(|(_, f)| s.spawn(f)).collect();
        handles
            .into_iter()
            .map(|h| {
                h.join().unwrap_or_else(|_| Outcome {
                    pass: false,
                    detail: "panicked".into(),
                })
            })
            .collect()
    });
    let mut failed = 0;
    for (i, ((name, _), r)) in criteria.iter().zip(&results).enumerate() {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{:>2}] {name}: {}", i + 1, r.detail);
        failed += usize::from(!r.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
