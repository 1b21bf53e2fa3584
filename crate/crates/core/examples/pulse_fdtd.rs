//! Gaussian pulse on the staggered-grid solver: front radius and conserved energy per frame.

use sfd::sim::{simulate_pulse, GaussianPulse, Grid2D};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid2D::square(128)?;
    let (c, cfl) = (343.0, 0.5);
    let pulse = GaussianPulse { center: (grid.x_center(64), grid.y_center(64)), width: 4.0 * grid.dx(), amplitude: 1.0 };
    let run = simulate_pulse(&grid, c, cfl, 121, &pulse)?;
    println!("dt {:.3e} s, padding {} px", run.sequence.dt, run.padding);
    for t in (0..run.sequence.n_frames()).step_by(20) {
        let row = run.sequence.data.slice(ndarray::s![t, 64, 64..]);
        let (r, peak) = row.iter().enumerate().fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        println!(
            "frame {t:>3}  front {:>3} px (expected {:>5.1})  peak {peak:+.4}  energy {:.12e}",
            r,
            t as f64 * cfl,
            run.energy[t]
        );
    }
    Ok(())
}
