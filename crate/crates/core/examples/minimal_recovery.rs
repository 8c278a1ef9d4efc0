//! Frames with a constant lightlike vector: recover the minimal surface when
//! there is one, and reject the frames that come from no surface.
use willmore_lab::chart::{Chart, Topology};
use willmore_lab::gauss_frame::build_frame;
use willmore_lab::reconstruct::{build_y_mu, classify, stereographic};
use willmore_lab::surface::SurfaceData;
use willmore_lab::zoo::{generate, synthetic_rank2_frame, synthetic_reduced_frame, SurfaceKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for kind in [SurfaceKind::Enneper, SurfaceKind::Catenoid] {
        let c = kind.default_chart(64)?;
        let s = SurfaceData::from_raw(&generate(kind, &c)?, &c)?;
        let cl = classify(&build_frame(&s))?;
        let mu = cl.mu.as_ref().ok_or("no dual parameter")?;
        let y = build_y_mu(&cl.frame, mu);
        let x = stereographic(&y.lift, &cl.frame)?;
        let mid = c.idx(c.nu / 2, c.nv / 2);
        println!(
            "{kind}: case {}, riccati {:.1e}, conformality {:.1e}, harmonicity {:.1e}, x(center) = {:.3?}",
            cl.classification.case,
            y.riccati,
            x.conformality,
            x.harmonicity,
            x.x[mid].as_slice()
        );
    }

    let c = Chart::new(41, 41, (-0.8, 0.8), (-0.8, 0.8), Topology::Open)?;
    for (name, frame) in [("reduced", synthetic_reduced_frame(&c)), ("rank-2", synthetic_rank2_frame(&c))] {
        let cl = classify(&frame)?;
        println!("synthetic {name}: case {}, {}", cl.classification.case, cl.classification.case.verdict());
    }
    Ok(())
}
