//! Structure and integrability residuals of a sampled surface, with their
//! convergence under refinement.
use willmore_lab::chart::observed_order;
use willmore_lab::surface::{integrability_residuals, structure_residuals, SurfaceData};
use willmore_lab::zoo::{generate, SurfaceKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kind: SurfaceKind = std::env::args().nth(1).as_deref().unwrap_or("veronese").parse()?;
    let coarse = kind.default_chart(32)?;
    let fine = coarse.refined();
    let report = |c| -> willmore_lab::Result<_> {
        let s = SurfaceData::from_raw(&generate(kind, c)?, c)?;
        let mut r = structure_residuals(&s);
        r.lines.extend(integrability_residuals(&s).lines);
        Ok(r)
    };
    let (a, b) = (report(&coarse)?, report(&fine)?);

    println!("{kind}: {} -> {} points per side", coarse.nu, fine.nu);
    for (la, lb) in a.lines.iter().zip(&b.lines) {
        println!("{:>24}  {:.3e}  {:.3e}  order {:.2}", la.name, la.norms.sup, lb.norms.sup, observed_order(la.norms.sup, lb.norms.sup));
    }
    Ok(())
}
