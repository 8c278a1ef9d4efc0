//! Willmore energy and the Willmore equation residual across the zoo.
use willmore_lab::chart::norms;
use willmore_lab::gauss_frame::{willmore_energy, willmore_residual};
use willmore_lab::surface::SurfaceData;
use willmore_lab::zoo::{generate, SurfaceKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kinds = [
        SurfaceKind::RoundSphere,
        SurfaceKind::CliffordTorus,
        SurfaceKind::TorusOfRevolution { ratio: 3.0 },
        SurfaceKind::Enneper,
        SurfaceKind::Catenoid,
        SurfaceKind::Veronese,
    ];
    println!("2 pi^2 = {:.6}", 2.0 * std::f64::consts::PI.powi(2));
    for kind in kinds {
        let c = kind.default_chart(96)?;
        let s = SurfaceData::from_raw(&generate(kind, &c)?, &c)?;
        let e = willmore_energy(&s);
        let r = norms(&willmore_residual(&s), &s.mask).sup;
        let scope = if e.chart_local { "chart" } else { "closed" };
        println!("{:<24} W = {:>10.6} ({scope})  residual {r:.2e}", kind.to_string(), e.value);
    }
    Ok(())
}
