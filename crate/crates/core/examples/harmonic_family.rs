//! The associated family of the conformal Gauss map: flat for every spectral
//! parameter on the unit circle exactly when the surface is Willmore.
use willmore_lab::gauss_frame::{build_frame, maurer_cartan};
use willmore_lab::harmonic::{harmonic_residuals, lambda_sweep, strong_conformal_check};
use willmore_lab::surface::SurfaceData;
use willmore_lab::zoo::{generate, SurfaceKind};
use willmore_lab::C64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lambdas: Vec<C64> = (0..8).map(|k| C64::from_polar(1.0, k as f64 * std::f64::consts::PI / 4.0)).collect();
    for kind in [SurfaceKind::CliffordTorus, SurfaceKind::TorusOfRevolution { ratio: 3.0 }] {
        let c = kind.default_chart(64)?;
        let s = SurfaceData::from_raw(&generate(kind, &c)?, &c)?;
        let m = maurer_cartan(&build_frame(&s));
        println!("{kind}");
        for r in lambda_sweep(&m, &lambdas)? {
            println!("  lambda = ({:+.3}, {:+.3})  flatness {:.2e}", r.lambda[0], r.lambda[1], r.norms.sup);
        }
        for line in harmonic_residuals(&m).lines {
            println!("  {:<16} {:.2e}", line.name, line.norms.sup);
        }
        println!("  isotropy of B1   {:.2e}", strong_conformal_check(&m.b1, &m.mask).isotropy);
    }
    Ok(())
}
