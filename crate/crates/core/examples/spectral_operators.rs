//! Spectral derivatives, the Helmholtz inverse and alias-free products on a
//! periodic grid.

use std::f64::consts::PI;

use wavelab::{Field, Grid1D, Spectral};

fn main() -> wavelab::Result<()> {
    let grid = Grid1D::new(128, 2.0 * PI)?;
    let sp = Spectral::new(grid);
    let f = Field::from_fn(grid, |x| x.sin().exp())?;

    let exact = Field::from_fn(grid, |x| x.cos() * x.sin().exp())?;
    println!(
        "d/dx exp(sin x): L_inf error {:.2e}",
        sp.deriv(&f, 1)?.linf_distance(&exact)?
    );

    let back = sp.helmholtz(&sp.helmholtz_inv(&f)?)?;
    println!(
        "(1 - d_xx)(1 - d_xx)^-1 f: L_inf error {:.2e}",
        back.linf_distance(&f)?
    );

    let shifted = sp.translate(&f, 1.0)?;
    let expected = Field::from_fn(grid, |x| (x - 1.0).sin().exp())?;
    println!(
        "translate by 1: L_inf error {:.2e}",
        shifted.linf_distance(&expected)?
    );

    // quadratic product of two band-limited fields, formed on the padded grid
    let g = Field::from_fn(grid, |x| (20.0 * x).cos())?;
    let h = Field::from_fn(grid, |x| (25.0 * x).sin())?;
    let pg = sp.to_padded(&sp.forward(g.samples()));
    let ph = sp.to_padded(&sp.forward(h.samples()));
    let prod: Vec<f64> = pg.iter().zip(&ph).map(|(a, b)| a * b).collect();
    let product = Field::new(grid, sp.inverse(sp.from_padded(&prod)))?;
    let direct = g.zip_with(&h, |a, b| a * b)?;
    println!(
        "padded product vs pointwise: L_inf gap {:.2e}",
        product.linf_distance(&direct)?
    );

    println!(
        "integral of sin^2 over a period: {:.15}",
        Field::from_fn(grid, |x| x.sin().powi(2))?.integrate()
    );
    Ok(())
}
