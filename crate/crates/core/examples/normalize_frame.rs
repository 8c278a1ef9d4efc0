//! Hide a surface's frame behind a random gauge, then normalize it back to
//! the canonical shape of the second fundamental block.
use willmore_lab::gauss_frame::{build_frame, maurer_cartan};
use willmore_lab::harmonic::gauge;
use willmore_lab::reconstruct::normalize;
use willmore_lab::surface::SurfaceData;
use willmore_lab::zoo::{generate, random_gauge, SurfaceKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kind = SurfaceKind::Veronese;
    let c = kind.default_chart(64)?;
    let s = SurfaceData::from_raw(&generate(kind, &c)?, &c)?;
    let frame = build_frame(&s);
    let m = maurer_cartan(&frame);
    let (hidden, _) = gauge(&frame, &m, &random_gauge(&c, frame.dim() - 4, 11, 0.6))?;

    for (label, f) in [("surface frame", &frame), ("gauged frame", &hidden)] {
        let nf = normalize(f, None)?;
        let k = &nf.canonical;
        println!(
            "{label:<14} orientation {:?}, shape residual {:.1e}, max jump/h {:.2}, spec-cond {:.2e}",
            k.orientation,
            k.shape_residual,
            k.max_jump,
            nf.spec_cond_residual().sup
        );
    }
    Ok(())
}
