//! The associated family `α_λ = λ⁻¹α_𝔭′ + α_𝔨 + λα_𝔭″` and the harmonic-map tests.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chart::{norms, Field, Norms};
use crate::gauss_frame::{maurer_cartan_oriented, CMatField, FrameField, MCBlocks, MatField};
use crate::lorentz::{bracket, check_group, i13};
use crate::surface::ResidualReport;
use crate::{Error, Result, C64};

/// Coefficients of `α_λ = P dz + Q dz̄`.
#[derive(Clone, Debug)]
pub struct ExtendedForm {
    pub lambda: C64,
    pub p: CMatField,
    pub q: CMatField,
}

/// Tolerance on `|λ| = 1`.
pub const UNIT_TOL: f64 = 1e-12;

/// `P = λ⁻¹α_𝔭′ + α_𝔨′`, `Q = conj(α_𝔨′) + λ·conj(α_𝔭′)`.
pub fn extend(m: &MCBlocks, lambda: C64) -> Result<ExtendedForm> {
    if (lambda.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::SpectralParameter(lambda.norm()));
    }
    let ap = m.alpha_p();
    let ak = m.alpha_k();
    let inv = lambda.inv();
    let p = ap.zip_map(&ak, |a, k| a * inv + k);
    let q = ap.zip_map(&ak, |a, k| k.map(|e| e.conj()) + a.map(|e| e.conj()) * lambda);
    Ok(ExtendedForm { lambda, p, q })
}

/// Norms of `∂_z Q − ∂_z̄ P + [P, Q]`, the `dz∧dz̄` part of `dα_λ + ½[α_λ∧α_λ]`.
pub fn flatness_residual(e: &ExtendedForm, m: &MCBlocks) -> Norms {
    let c = &m.chart;
    let o = m.orientation;
    let qz = o.d(&e.q, c);
    let pzb = o.d_bar(&e.p, c);
    let r = Field {
        nu: c.nu,
        nv: c.nv,
        values: (0..c.len()).map(|k| &qz[k] - &pzb[k] + bracket(&e.p[k], &e.q[k])).collect(),
    };
    norms(&r, &m.mask)
}

/// One flatness line per sampled `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaResidual {
    pub lambda: [f64; 2],
    pub norms: Norms,
}

pub fn lambda_sweep(m: &MCBlocks, lambdas: &[C64]) -> Result<Vec<LambdaResidual>> {
    lambdas
        .iter()
        .map(|l| {
            let e = extend(m, *l)?;
            Ok(LambdaResidual { lambda: [l.re, l.im], norms: flatness_residual(&e, m) })
        })
        .collect()
}

/// Default `λ` samples: `1, e^{iπ/4}, i, −1`.
pub fn default_lambdas() -> Vec<C64> {
    vec![
        C64::new(1.0, 0.0),
        C64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
    ]
}

/// The three block equations of harmonicity:
///
/// ```text
/// Im(A1_z̄ + Ā1 A1 − B̄1 B1ᵀ I_{1,3}) = 0
/// Im(A2_z̄ + Ā2 A2 − B̄1ᵀ I_{1,3} B1) = 0
/// B1_z̄ + Ā1 B1 − B1 Ā2 = 0
/// ```
///
/// The first two hold for every frame; the third is the harmonic map equation.
pub fn harmonic_residuals(m: &MCBlocks) -> ResidualReport {
    let c = &m.chart;
    let o = m.orientation;
    let g = i13();
    let a1zb = o.d_bar(&m.a1, c);
    let a2zb = o.d_bar(&m.a2, c);
    let b1zb = o.d_bar(&m.b1, c);
    let conj = |x: &DMatrix<C64>| x.map(|e| e.conj());
    let im = |x: DMatrix<C64>| x.map(|e| e.im);
    let len = c.len();
    let line = |f: &dyn Fn(usize) -> DMatrix<C64>| Field { nu: c.nu, nv: c.nv, values: (0..len).map(f).collect::<Vec<_>>() };

    let l1 = line(&|k| &a1zb[k] + conj(&m.a1[k]) * &m.a1[k] - conj(&m.b1[k]) * m.b1[k].transpose() * &g).map(|x| im(x.clone()));
    let l2 = line(&|k| &a2zb[k] + conj(&m.a2[k]) * &m.a2[k] - conj(&m.b1[k]).transpose() * &g * &m.b1[k]).map(|x| im(x.clone()));
    let l3 = line(&|k| &b1zb[k] + conj(&m.a1[k]) * &m.b1[k] - &m.b1[k] * conj(&m.a2[k]));

    let mut r = ResidualReport::default();
    r.push("Im A1 equation", norms(&l1, &m.mask));
    r.push("Im A2 equation", norms(&l2, &m.mask));
    r.push("B1 equation", norms(&l3, &m.mask));
    r
}

/// Strong conformality of the harmonic map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongConformality {
    /// `sup ‖B1ᵀ I_{1,3} B1‖` over the mask.
    pub isotropy: f64,
    /// `sup |tr(B1ᵀ I_{1,3} B1)|`, proportional to `⟨α_𝔭′, α_𝔭′⟩`.
    pub conformality: f64,
}

pub fn strong_conformal_check(b1: &CMatField, mask: &crate::chart::Mask) -> StrongConformality {
    let g = i13();
    let q = b1.map(|b| b.transpose() * &g * b);
    StrongConformality {
        isotropy: norms(&q, mask).sup,
        conformality: norms(&q.map(|x| x.trace()), mask).sup,
    }
}

/// Tolerance on block-diagonality and group membership of gauges.
pub const GAUGE_TOL: f64 = 1e-9;

/// Checks that `G = diag(G1, G2)` with `G1 ∈ SO⁺(1,3)` and `G2 ∈ SO(n)`.
pub fn validate_gauge(g: &MatField) -> Result<()> {
    for (k, x) in g.iter().enumerate() {
        let m = x.nrows();
        let n = m - 4;
        let off = x.view((0, 4), (4, n)).amax().max(x.view((4, 0), (n, 4)).amax());
        if off > GAUGE_TOL {
            return Err(Error::InvalidGauge(format!("off-diagonal block {off:e} at point {k}")));
        }
        let chk = check_group(x);
        if !chk.passes(GAUGE_TOL) {
            return Err(Error::InvalidGauge(format!("not in SO+(1,3) x SO(n) at point {k}: {:e}", chk.residual)));
        }
    }
    Ok(())
}

/// `F̂ = F·G` and its Maurer–Cartan blocks `α̂ = G⁻¹αG + G⁻¹dG`.
pub fn gauge(frame: &FrameField, m: &MCBlocks, g: &MatField) -> Result<(FrameField, MCBlocks)> {
    frame.chart.check(g)?;
    validate_gauge(g)?;
    let f = frame.gauged(g);
    let blocks = maurer_cartan_oriented(&f, m.orientation);
    Ok((f, blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{Chart, Topology};
    use crate::gauss_frame::{build_frame, maurer_cartan};
    use crate::lorentz::{boost, rotation};
    use crate::surface::SurfaceData;
    use nalgebra::DVector;
    use std::f64::consts::PI;

    fn clifford(n: usize) -> (FrameField, MCBlocks) {
        let c = Chart::new(n, n, (0.0, 2.0 * PI), (0.0, 2.0 * PI), Topology::PeriodicBoth).unwrap();
        let r = 0.5f64.sqrt();
        let raw = c.sample(|u, v| DVector::from_vec(vec![1.0, r * u.cos(), r * u.sin(), r * v.cos(), r * v.sin()]));
        let s = SurfaceData::from_raw(&raw, &c).unwrap();
        let f = build_frame(&s);
        let m = maurer_cartan(&f);
        (f, m)
    }

    #[test]
    fn lambda_one_is_identity_and_minus_one_flips_p() {
        let (_, m) = clifford(16);
        let e = extend(&m, C64::new(1.0, 0.0)).unwrap();
        for (p, a) in e.p.iter().zip(m.alpha.iter()) {
            assert!((p - a).iter().all(|x| x.norm() < 1e-14));
        }
        let e = extend(&m, C64::new(-1.0, 0.0)).unwrap();
        let ap = m.alpha_p();
        let ak = m.alpha_k();
        for k in 0..e.p.len() {
            assert!((&e.p[k] - (&ak[k] - &ap[k])).iter().all(|x| x.norm() < 1e-14));
        }
        assert!(matches!(extend(&m, C64::new(2.0, 0.0)), Err(Error::SpectralParameter(_))));
    }

    #[test]
    fn q_is_conjugate_of_p_on_the_circle() {
        let (_, m) = clifford(16);
        let e = extend(&m, C64::from_polar(1.0, 0.3)).unwrap();
        for (p, q) in e.p.iter().zip(e.q.iter()) {
            assert!((p.map(|x| x.conj()) - q).iter().all(|x| x.norm() < 1e-14));
        }
    }

    #[test]
    fn clifford_family_is_flat() {
        let (_, m) = clifford(48);
        let h2 = m.chart.h() * m.chart.h();
        for r in lambda_sweep(&m, &default_lambdas()).unwrap() {
            assert!(r.norms.sup < 5.0 * h2, "{:?}", r);
        }
        for line in harmonic_residuals(&m).lines {
            assert!(line.norms.sup < 5.0 * h2, "{}: {:e}", line.name, line.norms.sup);
        }
        let sc = strong_conformal_check(&m.b1, &m.mask);
        assert!(sc.isotropy < 5.0 * h2);
    }

    #[test]
    fn constant_gauge_transforms_b1_exactly() {
        let (f, m) = clifford(16);
        let g1 = boost(5, 1, 0.3) * rotation(5, 2, 3, 0.7);
        let mut g = g1.clone();
        g[(4, 4)] = 1.0;
        let gf = f.chart.sample(|_, _| g.clone());
        let (_, mh) = gauge(&f, &m, &gf).unwrap();
        let g1c = g1.view((0, 0), (4, 4)).map(|e| C64::new(e, 0.0));
        let g1inv = crate::lorentz::lorentz_inverse(&g1c);
        for k in 0..mh.b1.len() {
            let expected = &g1inv * &m.b1[k];
            assert!((&mh.b1[k] - expected).iter().all(|x| x.norm() < 1e-12));
        }
    }

    #[test]
    fn rejects_non_block_gauge() {
        let (f, m) = clifford(8);
        let g = boost(5, 4, 0.2);
        let gf = f.chart.sample(|_, _| g.clone());
        assert!(matches!(gauge(&f, &m, &gf), Err(Error::InvalidGauge(_))));
    }
}
