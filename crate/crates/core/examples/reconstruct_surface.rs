//! Classify a harmonic frame and recover the Willmore surface behind it.
use willmore_lab::gauss_frame::build_frame;
use willmore_lab::reconstruct::{build_y_mu, classify, Case, dual_surface, project_y0, verify_gauss_match, SphereMap};
use willmore_lab::surface::SurfaceData;
use willmore_lab::zoo::{generate, SurfaceKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kind: SurfaceKind = std::env::args().nth(1).as_deref().unwrap_or("clifford-torus").parse()?;
    let c = kind.default_chart(64)?;
    let s = SurfaceData::from_raw(&generate(kind, &c)?, &c)?;
    let cl = classify(&build_frame(&s))?;
    println!("{kind}: case {} ({})", cl.classification.case, cl.classification.case.verdict());
    println!("{}", serde_json::to_string_pretty(&cl.classification)?);

    let original = SphereMap::from_lift(&c, &s.y);
    let mask = &cl.frame.blocks.mask;
    match cl.classification.case {
        Case::A1 | Case::A2 => {
            let y = project_y0(&cl.frame);
            println!("recovered vs original: {:.2e}", y.distance(&original, mask).sup);
            if let Ok(dual) = dual_surface(&cl.frame) {
                let m = verify_gauss_match(&dual.map, &cl.frame)?;
                println!("dual: duality {:.2e}, gauss match {:.2e} ({:?})", dual.duality_residual, m.distance, m.orientation);
            }
        }
        // The constant lightlike direction is the point at infinity; the surface is the dual.
        Case::B2i => {
            let y = build_y_mu(&cl.frame, cl.mu.as_ref().ok_or("no dual parameter")?);
            println!("recovered vs original: {:.2e}", y.map.distance(&original, mask).sup);
        }
        _ => {}
    }
    Ok(())
}
