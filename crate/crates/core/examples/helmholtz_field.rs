//! Green's-function field of two point sources and its discrete Helmholtz residual.

use sfd::sim::{bessel_j0, bessel_y0, hankel2_0, synth_harmonic_field, Grid2D, PointSource, SourceConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for x in [0.01, 1.0, 2.404825557695773, 10.0, 100.0] {
        println!("x {x:>8.4}  J0 {:+.12}  Y0 {:+.12}  |H0(2)| {:.12}", bessel_j0(x), bessel_y0(x)?, hankel2_0(x)?.norm());
    }
    let grid = Grid2D::standard();
    let k = 15.0;
    let scene = SourceConfig {
        k,
        amplitude: 0.1,
        sources: vec![PointSource { a: 1.0, x: 1.2, y: 0.4 }, PointSource { a: 0.5, x: -3.0, y: -6.0 }],
    };
    let u = synth_harmonic_field(&scene, &grid)?;
    let h2 = grid.dx().powi(2);
    let (mut residual, mut norm) = (0.0_f64, 0.0_f64);
    for j in 1..grid.ny - 1 {
        for i in 1..grid.nx - 1 {
            let lap = (u[[j, i + 1]] + u[[j, i - 1]] + u[[j + 1, i]] + u[[j - 1, i]] - 4.0 * u[[j, i]]) / h2;
            residual = residual.max((lap + k * k * u[[j, i]]).norm());
            norm = norm.max(k * k * u[[j, i]].norm());
        }
    }
    println!("max |lap u + k^2 u| / max |k^2 u| = {:.2e} on a {}x{} grid", residual / norm, grid.nx, grid.ny);
    Ok(())
}
