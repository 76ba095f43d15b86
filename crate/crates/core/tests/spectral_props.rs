use std::f64::consts::PI;

use proptest::prelude::*;
use rustfft::num_complex::Complex64;
use wavelab::{Field, Grid1D, Spectral};

fn band_limited(grid: Grid1D, coeffs: &[(f64, f64)]) -> Field {
    let base = 2.0 * PI / grid.length();
    Field::from_fn(grid, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(m, &(a, b))| {
                let k = base * m as f64;
                a * (k * x).cos() + b * (k * x).sin()
            })
            .sum()
    })
    .unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn second_derivative_is_iterated_first(c in coeffs(), l in 1.0..50.0f64) {
        let grid = Grid1D::new(128, l).unwrap();
        let sp = Spectral::new(grid);
        let f = band_limited(grid, &c);
        let twice = sp.deriv(&sp.deriv(&f, 1).unwrap(), 1).unwrap();
        let direct = sp.deriv(&f, 2).unwrap();
        let scale = direct.max_abs().max(1.0);
        prop_assert!(twice.linf_distance(&direct).unwrap() <= 1e-10 * scale);
    }

    #[test]
    fn helmholtz_round_trip(c in coeffs(), l in 1.0..50.0f64) {
        let grid = Grid1D::new(128, l).unwrap();
        let sp = Spectral::new(grid);
        let f = band_limited(grid, &c);
        let back = sp.helmholtz_inv(&sp.helmholtz(&f).unwrap()).unwrap();
        prop_assert!(back.linf_distance(&f).unwrap() <= 1e-12 * f.max_abs().max(1.0));
    }

    #[test]
    fn derivative_integrates_to_zero(c in coeffs()) {
        let grid = Grid1D::new(256, 2.0 * PI).unwrap();
        let f = band_limited(grid, &c);
        prop_assert!(f.deriv(1).unwrap().integrate().abs() <= 1e-12);
    }

    #[test]
    fn translation_commutes_with_derivative(c in coeffs(), shift in -10.0..10.0f64) {
        let grid = Grid1D::new(128, 2.0 * PI).unwrap();
        let sp = Spectral::new(grid);
        let f = band_limited(grid, &c);
        let a = sp.deriv(&sp.translate(&f, shift).unwrap(), 1).unwrap();
        let b = sp.translate(&sp.deriv(&f, 1).unwrap(), shift).unwrap();
        prop_assert!(a.linf_distance(&b).unwrap() <= 1e-11);
    }

    #[test]
    fn wrap_lands_in_cell(x in -1e3..1e3f64, l in 0.5..100.0f64) {
        let grid = Grid1D::new(16, l).unwrap();
        let w = grid.wrap(x);
        prop_assert!(w >= -0.5 * l && w < 0.5 * l);
        let turns = (x - w) / l;
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn padded_products_are_alias_free(
        c in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..16),
        d in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..16),
    ) {
        // modes <= 15 each: the product stays below Nyquist on n = 64
        let grid = Grid1D::new(64, 2.0 * PI).unwrap();
        let sp = Spectral::new(grid);
        let f = band_limited(grid, &c);
        let g = band_limited(grid, &d);
        let pf = sp.to_padded(&sp.forward(f.samples()));
        let pg = sp.to_padded(&sp.forward(g.samples()));
        let prod: Vec<f64> = pf.iter().zip(&pg).map(|(a, b)| a * b).collect();
        let via_padding = sp.inverse(sp.from_padded(&prod));
        let direct: Vec<f64> = f.samples().iter().zip(g.samples()).map(|(a, b)| a * b).collect();
        let err = via_padding.iter().zip(&direct).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        prop_assert!(err < 1e-12);
    }
}

#[test]
fn spectral_derivative_beats_fourth_order_differences() {
    let grid = Grid1D::new(512, 2.0 * PI).unwrap();
    let h = grid.spacing();
    let f = Field::from_fn(grid, |x| x.sin().exp()).unwrap();
    let spectral = f.deriv(1).unwrap();
    let s = f.samples();
    let n = s.len();
    let fd: Vec<f64> = (0..n)
        .map(|j| {
            let at = |o: isize| s[(j as isize + o).rem_euclid(n as isize) as usize];
            (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h)
        })
        .collect();
    let err = spectral
        .samples()
        .iter()
        .zip(&fd)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    // the difference is the finite-difference truncation error, O(h^4)
    assert!(err < 10.0 * h.powi(4), "{err}");
    let exact = Field::from_fn(grid, |x| x.cos() * x.sin().exp()).unwrap();
    assert!(spectral.linf_distance(&exact).unwrap() < 1e-12);
}

#[test]
fn integrate_examples() {
    let g = Grid1D::new(64, 10.0).unwrap();
    assert!((Field::constant(g, 1.0).unwrap().integrate() - 10.0).abs() < 1e-13);
    let g = Grid1D::new(64, 2.0 * PI).unwrap();
    assert!(Field::from_fn(g, f64::sin).unwrap().integrate().abs() < 1e-13);
    let sq = Field::from_fn(g, |x| x.sin().powi(2)).unwrap();
    assert!((sq.integrate() - PI).abs() < 1e-12);
}

#[test]
fn helmholtz_of_constant() {
    let g = Grid1D::new(32, 7.0).unwrap();
    let c = Field::constant(g, 2.5).unwrap();
    assert!(c.helmholtz_inv().unwrap().linf_distance(&c).unwrap() < 1e-15);
}

#[test]
fn forward_inverse_identity() {
    let g = Grid1D::new(48, 3.0).unwrap();
    let sp = Spectral::new(g);
    let f = Field::from_fn(g, |x| (x * 2.0).cos() + 0.1 * x.sin()).unwrap();
    let hat: Vec<Complex64> = sp.forward(f.samples());
    let back = sp.inverse(hat);
    assert!(back
        .iter()
        .zip(f.samples())
        .all(|(a, b)| (a - b).abs() < 1e-14));
}
