//! Renders the real part of a clean and a noisy field as diverging-colormap PNGs.

use sfd::dataset::generate_sample;
use sfd::io::render_heatmap;
use sfd::noise::NoiseKind;
use sfd::sim::Grid2D;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(Into::into).unwrap_or_else(std::env::temp_dir);
    let s = generate_sample("demo".into(), 21, 4, Some(NoiseKind::White), &Grid2D::standard())?;
    let peak = s.clean.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    for (name, field) in [("clean", &s.clean), ("noisy", s.noisy.as_ref().unwrap())] {
        let path = dir.join(format!("sfd_{name}.png"));
        render_heatmap(&field.mapv(|z| z.re), &path, (-peak, peak))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
