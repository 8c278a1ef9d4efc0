//! The conformal Gauss frame `F = (φ₁, φ₂, φ₃, φ₄, ψ₁, …, ψ_n)` and its
//! Maurer–Cartan blocks.
//!
//! `φ₁ = (Y+N)/√2`, `φ₂ = (−Y+N)/√2`, `φ₃ = Y_u`, `φ₄ = Y_v`. The `dz` part of
//! `F⁻¹dF` splits as
//!
//! ```text
//!     [ A1              B1 ]
//!     [ −B1ᵀ I_{1,3}    A2 ]
//! ```
//!
//! and the `dz̄` part is its complex conjugate.

use nalgebra::{DMatrix, SVD};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::chart::{integrate, norms, Chart, Field, Mask, Norms, Orientation};
use crate::lorentz::{b2_from_b1, check_group, i13, lorentz_inverse, metric_c};
use crate::surface::{ResidualReport, SurfaceData};
use crate::{Error, Result, C64, I};

pub type MatField = Field<DMatrix<f64>>;
pub type CMatField = Field<DMatrix<C64>>;

/// Pointwise frames in `SO⁺(1, n+3)`.
#[derive(Clone, Debug)]
pub struct FrameField {
    pub chart: Chart,
    pub frames: MatField,
    /// Points where derived quantities are trusted.
    pub mask: Mask,
}

impl FrameField {
    pub fn new(chart: Chart, frames: MatField, mask: Mask) -> Result<Self> {
        chart.check(&frames)?;
        chart.check(&mask)?;
        Ok(FrameField { chart, frames, mask })
    }

    pub fn dim(&self) -> usize {
        self.frames[0].nrows()
    }

    /// `sup ‖FᵀIF − I‖` over the mask.
    pub fn group_residual(&self) -> Norms {
        norms(&self.frames.map(|f| check_group(f).residual), &self.mask)
    }

    /// Fails unless every masked frame is an oriented, orthochronous isometry.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for (k, f) in self.frames.iter().enumerate() {
            if !self.mask[k] {
                continue;
            }
            let chk = check_group(f);
            if !chk.passes(tol) {
                return Err(Error::NotInGroup(chk.residual.max((chk.det - 1.0).abs())));
            }
        }
        Ok(())
    }

    /// Right multiplication `F ↦ F·G` by a gauge field.
    pub fn gauged(&self, g: &MatField) -> FrameField {
        FrameField {
            chart: self.chart.clone(),
            frames: self.frames.zip_map(g, |f, gg| f * gg),
            mask: self.mask.clone(),
        }
    }
}

/// Builds `F` from the surface data.
pub fn build_frame(s: &SurfaceData) -> FrameField {
    let m = s.dim();
    let frames = Field {
        nu: s.chart.nu,
        nv: s.chart.nv,
        values: (0..s.chart.len())
            .map(|p| {
                let mut f = DMatrix::zeros(m, m);
                f.set_column(0, &((&s.y[p] + &s.n[p]) / SQRT_2));
                f.set_column(1, &((&s.n[p] - &s.y[p]) / SQRT_2));
                f.set_column(2, &s.y_u[p]);
                f.set_column(3, &s.y_v[p]);
                f.view_mut((0, 4), (m, m - 4)).copy_from(&s.psi[p]);
                f
            })
            .collect(),
    };
    FrameField { chart: s.chart.clone(), frames, mask: s.mask.clone() }
}

/// The `dz` (or `dw`, `w = z̄`) coefficient of the Maurer–Cartan form.
#[derive(Clone, Debug)]
pub struct MCBlocks {
    pub chart: Chart,
    pub orientation: Orientation,
    /// The full coefficient `F⁻¹F_z`.
    pub alpha: CMatField,
    pub a1: CMatField,
    pub b1: CMatField,
    pub b2: CMatField,
    pub a2: CMatField,
    pub mask: Mask,
}

impl MCBlocks {
    pub fn from_alpha(chart: Chart, orientation: Orientation, alpha: CMatField, mask: Mask) -> Self {
        let n = alpha[0].nrows() - 4;
        let a1 = alpha.map(|a| a.view((0, 0), (4, 4)).into_owned());
        let b1 = alpha.map(|a| a.view((0, 4), (4, n)).into_owned());
        let b2 = alpha.map(|a| a.view((4, 0), (n, 4)).into_owned());
        let a2 = alpha.map(|a| a.view((4, 4), (n, n)).into_owned());
        MCBlocks { chart, orientation, alpha, a1, b1, b2, a2, mask }
    }

    pub fn codim(&self) -> usize {
        self.a2[0].nrows()
    }

    /// `a_{ij}` of `A1`, indices starting at 1.
    pub fn a(&self, i: usize, j: usize) -> Field<C64> {
        self.a1.map(|a| a[(i - 1, j - 1)])
    }

    /// `‖B2 + B1ᵀI_{1,3}‖`.
    pub fn b2_residual(&self) -> Norms {
        norms(&self.b2.zip_map(&self.b1, |b2, b1| b2 - b2_from_b1(b1)), &self.mask)
    }

    /// `α_𝔭′`: `α` with the diagonal blocks removed.
    pub fn alpha_p(&self) -> CMatField {
        self.alpha.map(|a| {
            let mut x = a.clone();
            let n = a.nrows() - 4;
            x.view_mut((0, 0), (4, 4)).fill(C64::new(0.0, 0.0));
            x.view_mut((4, 4), (n, n)).fill(C64::new(0.0, 0.0));
            x
        })
    }

    /// `α_𝔨′`: the block-diagonal part.
    pub fn alpha_k(&self) -> CMatField {
        let p = self.alpha_p();
        self.alpha.zip_map(&p, |a, pp| a - pp)
    }
}

/// `F⁻¹ ∂F` with `∂ = ∂_z`, computed with the Lorentz adjoint.
pub fn maurer_cartan(frame: &FrameField) -> MCBlocks {
    maurer_cartan_oriented(frame, Orientation::Same)
}

/// As [`maurer_cartan`], differentiating along `w = z̄` for the conjugate orientation.
pub fn maurer_cartan_oriented(frame: &FrameField, orientation: Orientation) -> MCBlocks {
    let c = &frame.chart;
    let fc = frame.frames.map(|f| f.map(|e| C64::new(e, 0.0)));
    let fz = orientation.d(&fc, c);
    let alpha = fc.zip_map(&fz, |f, dz| lorentz_inverse(f) * dz);
    MCBlocks::from_alpha(c.clone(), orientation, alpha, frame.mask.clone())
}

/// Willmore energy `W = 2i∫⟨κ,κ̄⟩ dz∧dz̄ = 4∫Σ|k_j|² du dv`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    pub value: f64,
    /// True when the chart is not closed, so only part of a surface is covered.
    pub chart_local: bool,
}

pub fn willmore_energy(s: &SurfaceData) -> Energy {
    let value = 4.0 * integrate(&s.k_squared(), &s.chart);
    Energy { value, chart_local: !s.chart.topology.is_closed() }
}

/// The field `D_z̄D_z̄κ + (s̄/2)κ` in the frame `ψ`; zero exactly on Willmore surfaces.
pub fn willmore_residual(s: &SurfaceData) -> Field<nalgebra::DVector<C64>> {
    s.willmore_vector()
}

/// `𝔅 = F α_𝔭′ F⁻¹`.
pub fn b_operator(frame: &FrameField, blocks: &MCBlocks) -> CMatField {
    let ap = blocks.alpha_p();
    frame.frames.zip_map(&ap, |f, a| {
        let fc = f.map(|e| C64::new(e, 0.0));
        &fc * a * lorentz_inverse(&fc)
    })
}

/// Block checks on `𝔅`: `V → V⊥`, `V⊥ → V` and `𝔅²|_{V⊥} = 0`.
pub fn b_operator_checks(frame: &FrameField, blocks: &MCBlocks) -> ResidualReport {
    let b = b_operator(frame, blocks);
    let m = frame.dim();
    let mut diag_v = DMatrix::zeros(m, m);
    diag_v.view_mut((0, 0), (4, 4)).fill_with_identity();
    let diag_v = diag_v.map(|e: f64| C64::new(e, 0.0));
    let id = DMatrix::<C64>::identity(m, m);
    let pv = frame.frames.map(|f| {
        let fc = f.map(|e| C64::new(e, 0.0));
        &fc * &diag_v * lorentz_inverse(&fc)
    });
    let vv = b.zip_map(&pv, |bb, p| p * bb * p);
    let pp = b.zip_map(&pv, |bb, p| {
        let q = &id - p;
        &q * bb * &q
    });
    let nil = b.zip_map(&pv, |bb, p| bb * bb * (&id - p));
    let mut r = ResidualReport::default();
    r.push("P_V B P_V", norms(&vv, &frame.mask));
    r.push("P_perp B P_perp", norms(&pp, &frame.mask));
    r.push("B^2 P_perp", norms(&nil, &frame.mask));
    r
}

/// Pointwise numerical rank of `B1` and its maximum over the mask.
#[derive(Clone, Debug)]
pub struct RankReport {
    pub ranks: Field<usize>,
    pub max_rank: usize,
    /// Largest `σ₂/σ₁` over masked points, `0` for `n = 1`.
    pub max_ratio: f64,
    pub threshold: f64,
}

/// Relative rank threshold `rel + RANK_H2·h²`.
pub const RANK_REL: f64 = 1e-6;
pub const RANK_H2: f64 = 20.0;

pub fn rank_threshold(c: &Chart) -> f64 {
    RANK_REL + RANK_H2 * c.h() * c.h()
}

/// Singular values of `B1` are compared with `rel_tol·σ₁`. Points where
/// `σ₁ ≤ zero_floor` (umbilics) get rank 0.
pub fn s_willmore_rank(b1: &CMatField, mask: &Mask, rel_tol: f64, zero_floor: f64) -> RankReport {
    let mut max_ratio = 0.0f64;
    let ranks = b1.map(|b| {
        let sv = SVD::new(b.clone(), false, false).singular_values;
        let mut s: Vec<f64> = sv.iter().cloned().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        let s1 = s[0];
        if s1 <= zero_floor {
            return 0;
        }
        1 + s[1..].iter().filter(|x| **x > rel_tol * s1).count()
    });
    for (k, b) in b1.iter().enumerate() {
        if mask[k] && b.ncols() > 1 {
            let sv = SVD::new(b.clone(), false, false).singular_values;
            let mut s: Vec<f64> = sv.iter().cloned().collect();
            s.sort_by(|a, b| b.total_cmp(a));
            if s[0] > zero_floor {
                max_ratio = max_ratio.max(s[1] / s[0]);
            }
        }
    }
    let max_rank = ranks.iter().zip(mask.iter()).filter(|(_, m)| **m).map(|(r, _)| *r).max().unwrap_or(0);
    RankReport { ranks, max_rank, max_ratio, threshold: rel_tol }
}

/// Rank with the default chart-dependent threshold and a floor relative to `sup |B1|`.
pub fn s_willmore_rank_default(blocks: &MCBlocks) -> RankReport {
    let scale = blocks.b1.iter().zip(blocks.mask.iter()).filter(|(_, m)| **m).map(|(b, _)| b.norm()).fold(0.0, f64::max);
    s_willmore_rank(&blocks.b1, &blocks.mask, rank_threshold(&blocks.chart), 1e-4 * scale.max(1e-300))
}

/// `½ tr(B1ᴴ I_{1,3} B1)`, the Gauss-map metric `¼⟨dG,dG⟩` per `|dz|²`.
pub fn gauss_map_metric(blocks: &MCBlocks) -> Field<f64> {
    let g = i13();
    blocks.b1.map(|b| (b.adjoint() * &g * b).trace().re * 0.5)
}

/// `A1` and `B1` predicted from `s`, `k_j`, `β_j` for the surface gauge.
///
/// ```text
/// A1 = [ 0    0    s1  s2 ]      B1 row pattern per column j:
///      [ 0    0    s3  s4 ]        ( √2β_j, −√2β_j, −k_j, −ik_j )
///      [ s1  −s3   0   0  ]
///      [ s2  −s4   0   0  ]
/// s1 = (1−s−2k²)/(2√2),  s2 = −i(1+s−2k²)/(2√2)
/// s3 = (1+s+2k²)/(2√2),  s4 = −i(1−s+2k²)/(2√2)
/// ```
/// with `k² = Σ|k_j|²`.
pub fn surface_gauge_blocks(s: &SurfaceData) -> (CMatField, CMatField) {
    let n = s.codim();
    let r = 1.0 / (2.0 * SQRT_2);
    let k2 = s.k_squared();
    let a1 = s.schwarzian.zip_map(&k2, |sch, k2| {
        let one = C64::new(1.0, 0.0);
        let s1 = (one - sch - 2.0 * k2) * r;
        let s2 = -I * (one + sch - 2.0 * k2) * r;
        let s3 = (one + sch + 2.0 * k2) * r;
        let s4 = -I * (one - sch + 2.0 * k2) * r;
        let z = C64::new(0.0, 0.0);
        DMatrix::from_row_slice(4, 4, &[z, z, s1, s2, z, z, s3, s4, s1, -s3, z, z, s2, -s4, z, z])
    });
    let b1 = s.kappa.zip_map(&s.beta, |k, b| {
        let mut m = DMatrix::zeros(4, n);
        for j in 0..n {
            m[(0, j)] = b[j] * SQRT_2;
            m[(1, j)] = -b[j] * SQRT_2;
            m[(2, j)] = -k[j];
            m[(3, j)] = -I * k[j];
        }
        m
    });
    (a1, b1)
}

/// Distances of the computed blocks from [`surface_gauge_blocks`], and `A2 − bᵀ`.
pub fn surface_gauge_residuals(s: &SurfaceData, blocks: &MCBlocks) -> ResidualReport {
    let (a1, b1) = surface_gauge_blocks(s);
    let mut r = ResidualReport::default();
    r.push("A1", norms(&blocks.a1.zip_map(&a1, |x, y| x - y), &s.mask));
    r.push("B1", norms(&blocks.b1.zip_map(&b1, |x, y| x - y), &s.mask));
    r.push("A2", norms(&blocks.a2.zip_map(&s.b, |x, b| x - b.transpose()), &s.mask));
    r.push("B2+B1^T I13", blocks.b2_residual());
    r
}

/// `‖XᵀIX + IX‖`-style algebra residual of every coefficient.
pub fn algebra_residual(blocks: &MCBlocks) -> Norms {
    norms(&blocks.alpha.map(|a| {
        let g = metric_c(a.nrows());
        a.transpose() * &g + &g * a
    }), &blocks.mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Topology;
    use nalgebra::DVector;
    use std::f64::consts::PI;

    fn clifford(n: usize) -> SurfaceData {
        let c = Chart::new(n, n, (0.0, 2.0 * PI), (0.0, 2.0 * PI), Topology::PeriodicBoth).unwrap();
        let r = 0.5f64.sqrt();
        let raw = c.sample(|u, v| DVector::from_vec(vec![1.0, r * u.cos(), r * u.sin(), r * v.cos(), r * v.sin()]));
        SurfaceData::from_raw(&raw, &c).unwrap()
    }

    #[test]
    fn frame_columns_have_expected_norms() {
        let s = clifford(32);
        let f = build_frame(&s);
        let g = crate::lorentz::metric(5);
        for fr in f.frames.iter() {
            let gram = fr.transpose() * &g * fr;
            assert!((gram[(0, 0)] + 1.0).abs() < 1e-12);
            assert!((gram[(1, 1)] - 1.0).abs() < 1e-12);
            assert!((gram[(2, 2)] - 1.0).abs() < 1e-2);
            assert!((gram[(3, 3)] - 1.0).abs() < 1e-2);
        }
        assert!(f.validate(1e-2).is_ok());
    }

    #[test]
    fn constant_frame_has_zero_blocks() {
        let c = Chart::new(8, 8, (0.0, 1.0), (0.0, 1.0), Topology::Open).unwrap();
        let g = crate::lorentz::boost(6, 3, 0.4);
        let f = FrameField::new(c.clone(), c.sample(|_, _| g.clone()), c.interior_mask(0)).unwrap();
        let mc = maurer_cartan(&f);
        assert!(mc.alpha.iter().all(|a| a.iter().all(|e| e.norm() < 1e-12)));
    }

    #[test]
    fn clifford_blocks_match_surface_gauge() {
        let s = clifford(64);
        let mc = maurer_cartan(&build_frame(&s));
        let h2 = s.chart.h() * s.chart.h();
        for line in surface_gauge_residuals(&s, &mc).lines {
            assert!(line.norms.sup < 2.0 * h2, "{}: {:e}", line.name, line.norms.sup);
        }
    }

    #[test]
    fn clifford_energy_is_two_pi_squared() {
        let e = willmore_energy(&clifford(64));
        assert!(!e.chart_local);
        assert!((e.value - 2.0 * PI * PI).abs() / (2.0 * PI * PI) < 5e-3, "{}", e.value);
    }

    #[test]
    fn gauss_map_metric_is_hopf_density() {
        let s = clifford(32);
        let mc = maurer_cartan(&build_frame(&s));
        let g = gauss_map_metric(&mc);
        let k2 = s.k_squared();
        for (a, b) in g.iter().zip(k2.iter()) {
            assert!((a - b).abs() < 1e-2);
        }
    }

    #[test]
    fn b_operator_block_structure() {
        let s = clifford(48);
        let f = build_frame(&s);
        let mc = maurer_cartan(&f);
        for line in b_operator_checks(&f, &mc).lines {
            assert!(line.norms.sup < 1e-2, "{}: {:e}", line.name, line.norms.sup);
        }
    }

    #[test]
    fn rank_of_synthetic_null_columns() {
        let c = Chart::new(6, 6, (0.0, 1.0), (0.0, 1.0), Topology::Open).unwrap();
        let one = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        // columns (1,−1,0,0) and (0,0,1,i) are null and independent
        let b = DMatrix::from_row_slice(4, 2, &[one, z, -one, z, z, one, z, I]);
        let field = c.sample(|_, _| b.clone());
        let r = s_willmore_rank(&field, &c.interior_mask(0), 1e-6, 1e-12);
        assert_eq!(r.max_rank, 2);
        let b1 = DMatrix::from_row_slice(4, 2, &[one, one * 2.0, -one, -one * 2.0, z, z, z, z]);
        let r = s_willmore_rank(&c.sample(|_, _| b1.clone()), &c.interior_mask(0), 1e-6, 1e-12);
        assert_eq!(r.max_rank, 1);
    }
}
