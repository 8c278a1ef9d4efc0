//! From a strongly conformally harmonic frame back to surfaces.
//!
//! A frame is first brought into canonical shape ([`normalize`]). Then the
//! coefficient `h = a13 + a23` of `A1` decides between the two cases. When
//! `h ≢ 0` the surface is `[Y0]`, `Y0 = (e0 − ê0)/√2`, and for rank 1 it has
//! a dual. When `h ≡ 0` the frame contains a constant lightlike vector. The
//! candidate surface is then `[Y_μ]`, and its stereographic image is minimal.

use std::f64::consts::SQRT_2;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chart::{d_u, d_uu, d_v, d_vv, norms, Chart, Field, Mask, Norms, Orientation};
use crate::gauss_frame::{build_frame, maurer_cartan, maurer_cartan_oriented, s_willmore_rank_default, FrameField, MCBlocks};
use crate::lorentz::inner_unchecked;
use crate::spinor::{canonicalize_b1, common_factor, Canonical};
use crate::surface::{SurfaceData, VecField};
use crate::{Error, Result, C64};

fn rinner(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    inner_unchecked(a.as_slice(), b.as_slice())
}

fn masked_sup(f: &Field<f64>, mask: &Mask) -> f64 {
    f.iter().zip(mask.iter()).filter(|(_, m)| **m).map(|(x, _)| x.abs()).fold(0.0, f64::max)
}

/// A frame whose `B1` has the canonical shape, with its Maurer–Cartan blocks.
#[derive(Clone, Debug)]
pub struct NormalizedFrame {
    pub frame: FrameField,
    pub blocks: MCBlocks,
    pub canonical: Canonical,
}

impl NormalizedFrame {
    pub fn orientation(&self) -> Orientation {
        self.blocks.orientation
    }

    pub fn chart(&self) -> &Chart {
        &self.frame.chart
    }

    pub fn column(&self, j: usize) -> VecField {
        self.frame.frames.map(|f| f.column(j).into_owned())
    }

    /// `Y0 = (e0 − ê0)/√2`.
    pub fn y0(&self) -> VecField {
        self.frame.frames.map(|f| (f.column(0) - f.column(1)) / SQRT_2)
    }

    /// `N0 = (e0 + ê0)/√2`.
    pub fn n0(&self) -> VecField {
        self.frame.frames.map(|f| (f.column(0) + f.column(1)) / SQRT_2)
    }

    /// `h = a13 + a23`.
    pub fn h(&self) -> Field<C64> {
        self.blocks.a1.map(|a| a[(0, 2)] + a[(1, 2)])
    }

    /// `β_j = B̂1[0, j]/√2` and `k_j = −B̂1[2, j]`, per point.
    pub fn beta_k(&self) -> (Field<DVector<C64>>, Field<DVector<C64>>) {
        let beta = self.blocks.b1.map(|b| DVector::from_iterator(b.ncols(), b.row(0).iter().map(|x| x / SQRT_2)));
        let k = self.blocks.b1.map(|b| DVector::from_iterator(b.ncols(), b.row(2).iter().map(|x| -x)));
        (beta, k)
    }

    /// `|a13 + a23 − i(a14 + a24)|` relative to `sup ‖A1‖`.
    pub fn spec_cond_residual(&self) -> Norms {
        let i = C64::new(0.0, 1.0);
        let r = self.blocks.a1.map(|a| a[(0, 2)] + a[(1, 2)] - i * (a[(0, 3)] + a[(1, 3)]));
        let mut n = norms(&r, &self.blocks.mask);
        let scale = a1_scale(&self.blocks);
        n.sup /= scale;
        n.l2 /= scale;
        n
    }
}

/// `(h / L)²` with `L` the larger chart extent.
pub fn relative_h2(c: &Chart) -> f64 {
    let l = (c.u1 - c.u0).max(c.v1 - c.v0);
    (c.h() / l).powi(2)
}

fn a1_scale(b: &MCBlocks) -> f64 {
    masked_sup(&b.a1.map(|a| a.norm()), &b.mask).max(1e-300)
}

/// Brings `B1` into canonical shape by the gauge `diag(A⁻¹, I)`; the
/// Maurer–Cartan blocks of the result are taken in `orientation`.
pub fn normalize(frame: &FrameField, orientation: Option<Orientation>) -> Result<NormalizedFrame> {
    let n = frame.dim() - 4;
    let same = maurer_cartan(frame);
    let canonical = canonicalize_b1(&same.b1, &frame.chart, &frame.mask, orientation)?;
    let g = canonical.gauge(n);
    let frame = frame.gauged(&g);
    let blocks = maurer_cartan_oriented(&frame, canonical.orientation);
    Ok(NormalizedFrame { frame, blocks, canonical })
}

/// `tol_h` of the `h ≡ 0` test.
pub const H_REL: f64 = 1e-6;
/// `h²` coefficient of the `h ≡ 0` test.
pub const H_H2: f64 = 20.0;
/// Values between the threshold and this multiple of it are ambiguous.
pub const AMBIGUOUS_BAND: f64 = 10.0;
/// `¼(|p_u|² + |p_v|²)` below this counts as vanishing.
pub const CONFORMAL_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    /// `h ≢ 0`, max rank 2: Willmore, not S-Willmore.
    A1,
    /// `h ≢ 0`, max rank 1: S-Willmore with a dual surface.
    A2,
    /// Constant lightlike vector and max rank 2: no Willmore surface.
    B1,
    /// Constant lightlike vector, rank 1, conformal `Y_μ`: minimal in `R^{n+2}`.
    B2i,
    /// Constant lightlike vector, rank 1, reduced map: no Willmore surface.
    B2ii,
    /// `h` neither clearly zero nor clearly nonzero at this resolution.
    Ambiguous,
}

impl Case {
    pub fn has_surface(self) -> bool {
        matches!(self, Case::A1 | Case::A2 | Case::B2i)
    }

    pub fn verdict(self) -> &'static str {
        match self {
            Case::A1 => "Willmore surface [Y0]",
            Case::A2 => "S-Willmore surface [Y0] with dual surface",
            Case::B1 | Case::B2ii => "no Willmore surface: not a conformal Gauss map",
            Case::B2i => "Willmore surface [Y_mu], minimal in R^{n+2}",
            Case::Ambiguous => "ambiguous at this resolution",
        }
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Case::A1 => "a1",
            Case::A2 => "a2",
            Case::B1 => "b1",
            Case::B2i => "b2i",
            Case::B2ii => "b2ii",
            Case::Ambiguous => "ambiguous",
        };
        f.write_str(s)
    }
}

/// Outcome of [`classify`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub case: Case,
    pub orientation: Orientation,
    pub max_rank: usize,
    pub rank_ratio: f64,
    /// `sup |h| / sup ‖A1‖` on the normalization used.
    pub h_ratio: f64,
    pub h_threshold: f64,
    /// Fraction of masked points where `|h|` is below threshold (case a).
    pub zero_set_fraction: f64,
    /// Relative spec-cond residual of the normalization used.
    pub spec_cond: f64,
    /// Case b: `sup ⟨Y_μz, Y_μz̄⟩` and the fraction of points where it is positive.
    pub conformal_sup: Option<f64>,
    pub conformal_fraction: Option<f64>,
    /// Case b2ii: which reduction was detected.
    pub reduction: Option<String>,
}

/// The normalization a classification refers to, and the `μ` data in case b.
#[derive(Clone, Debug)]
pub struct Classified {
    pub classification: Classification,
    pub frame: NormalizedFrame,
    pub mu: Option<DualMu>,
}

fn h_test(nf: &NormalizedFrame) -> (f64, f64, f64) {
    let c = nf.chart();
    let thr = H_REL + H_H2 * relative_h2(c);
    let scale = a1_scale(&nf.blocks);
    let hn = nf.h().map(|x| x.norm());
    let ratio = masked_sup(&hn, &nf.blocks.mask) / scale;
    let below = hn.iter().zip(nf.blocks.mask.iter()).filter(|(x, m)| **m && **x < thr * scale).count();
    (ratio, thr, below as f64 / nf.blocks.mask.count().max(1) as f64)
}

/// Decides the case of a strongly conformally harmonic frame.
pub fn classify(frame: &FrameField) -> Result<Classified> {
    let rank = s_willmore_rank_default(&maurer_cartan(frame));
    let primary = normalize(frame, None)?;
    let (r0, thr, zf0) = h_test(&primary);
    let mut chosen = (primary, r0, zf0);
    if r0 > thr && rank.max_rank == 1 {
        let dual = normalize(frame, Some(chosen.0.orientation().flip()))?;
        let (r1, _, zf1) = h_test(&dual);
        if r1 <= thr {
            chosen = (dual, r1, zf1);
        }
    }
    let (nf, ratio, zero_fraction) = chosen;
    let mut cl = Classification {
        case: Case::Ambiguous,
        orientation: nf.orientation(),
        max_rank: rank.max_rank,
        rank_ratio: rank.max_ratio,
        h_ratio: ratio,
        h_threshold: thr,
        zero_set_fraction: zero_fraction,
        spec_cond: nf.spec_cond_residual().sup,
        conformal_sup: None,
        conformal_fraction: None,
        reduction: None,
    };
    if ratio > thr * AMBIGUOUS_BAND {
        cl.case = if rank.max_rank >= 2 { Case::A1 } else { Case::A2 };
        return Ok(Classified { classification: cl, frame: nf, mu: None });
    }
    if ratio > thr {
        return Ok(Classified { classification: cl, frame: nf, mu: None });
    }
    let nf = fix_y0(&nf);
    if rank.max_rank >= 2 {
        cl.case = Case::B1;
        return Ok(Classified { classification: cl, frame: nf, mu: None });
    }
    let (beta, k) = nf.beta_k();
    let ks = masked_sup(&k.map(|x| x.norm()), &nf.blocks.mask);
    let bs = masked_sup(&beta.map(|x| x.norm()), &nf.blocks.mask);
    if ks <= 1e-6 * (ks + bs) {
        cl.case = Case::B2ii;
        cl.reduction = Some("SO+(1,n+1)/SO+(1,1)xSO(n)".into());
        return Ok(Classified { classification: cl, frame: nf, mu: None });
    }
    let mu = dual_mu(&nf)?;
    let ym = build_y_mu(&nf, &mu);
    let (sup, frac) = (ym.conformal_sup, ym.conformal_fraction);
    cl.conformal_sup = Some(sup);
    cl.conformal_fraction = Some(frac);
    if sup <= CONFORMAL_FLOOR {
        cl.case = Case::B2ii;
        cl.reduction = Some("SO(n+2)/SO(2)xSO(n)".into());
    } else if frac >= 0.5 {
        cl.case = Case::B2i;
    }
    Ok(Classified { classification: cl, frame: nf, mu: Some(mu) })
}

/// Boost in the `(e0, ê0)` plane making `Y0` constant (and `a12 = 0`) when `[Y0]` is.
fn fix_y0(nf: &NormalizedFrame) -> NormalizedFrame {
    let c = nf.chart();
    let seed = c.idx(c.nu / 2, c.nv / 2);
    let y0 = nf.y0();
    let n0 = nf.n0();
    let t = nf.frame.frames[seed].column(0).into_owned();
    let ref_val = rinner(&y0[seed], &t);
    let frames = nf.frame.frames.map_indexed(|k, f| {
        let s = rinner(&y0[k], &t) / ref_val;
        let y = &y0[k] / s;
        let n = &n0[k] * s;
        let mut g = f.clone();
        g.set_column(0, &((&y + &n) / SQRT_2));
        g.set_column(1, &((&n - &y) / SQRT_2));
        g
    });
    let frame = FrameField { chart: c.clone(), frames, mask: nf.frame.mask.clone() };
    let blocks = maurer_cartan_oriented(&frame, nf.orientation());
    NormalizedFrame { frame, blocks, canonical: nf.canonical.clone() }
}

/// Points of `S^{n+2} ⊂ R^{n+3}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereMap {
    pub chart: Chart,
    pub points: VecField,
}

impl SphereMap {
    /// Representative `(1, p)` of each forward lightlike vector; `p` is
    /// rescaled to unit length, which absorbs rounding off the cone.
    pub fn from_lift(chart: &Chart, y: &VecField) -> Self {
        let points = y.map(|v| {
            let p = v.rows(1, v.len() - 1);
            p / p.norm()
        });
        SphereMap { chart: chart.clone(), points }
    }

    /// The lift `(1, p)`.
    pub fn lift(&self) -> VecField {
        self.points.map(|p| {
            let mut y = DVector::zeros(p.len() + 1);
            y[0] = 1.0;
            y.rows_mut(1, p.len()).copy_from(p);
            y
        })
    }

    /// `sup | |p| − 1 |`.
    pub fn unit_defect(&self) -> f64 {
        self.points.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Pointwise Euclidean distance on the mask.
    pub fn distance(&self, other: &SphereMap, mask: &Mask) -> Norms {
        let d = self.points.zip_map(&other.points, |a, b| (a - b).norm());
        norms(&d, mask)
    }

    /// CSV with header `u,v,X0,…`.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let c = &self.chart;
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let dim = self.points[0].len();
        let header: Vec<String> = ["u".into(), "v".into()].into_iter().chain((0..dim).map(|k| format!("X{k}"))).collect();
        writeln!(out, "{}", header.join(","))?;
        for (k, p) in self.points.iter().enumerate() {
            let (i, j) = c.coords(k);
            let mut row = vec![c.u(i).to_string(), c.v(j).to_string()];
            row.extend(p.iter().map(|x| x.to_string()));
            writeln!(out, "{}", row.join(","))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Conformality of a sphere map: `|⟨y_z, y_z⟩| / ⟨y_z, y_z̄⟩`, and where it is immersed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalReport {
    /// `sup |E − G, 2F| / sup (E + G)` over the mask.
    pub conformality: f64,
    /// `sup (E + G)/4`.
    pub metric_sup: f64,
}

pub fn conformal_report(y: &SphereMap, mask: &Mask) -> ConformalReport {
    let c = &y.chart;
    let pu = d_u(&y.points, c);
    let pv = d_v(&y.points, c);
    let defect = pu.zip_map(&pv, |a, b| ((a.norm_squared() - b.norm_squared()).powi(2) + 4.0 * a.dot(b).powi(2)).sqrt());
    let metric = pu.zip_map(&pv, |a, b| 0.25 * (a.norm_squared() + b.norm_squared()));
    let metric_sup = masked_sup(&metric, mask);
    ConformalReport { conformality: masked_sup(&defect, mask) / (4.0 * metric_sup).max(1e-300), metric_sup }
}

/// `y = [Y0]` in case a.
pub fn project_y0(nf: &NormalizedFrame) -> SphereMap {
    SphereMap::from_lift(nf.chart(), &nf.y0())
}

/// `μ` with `β_j = −(μ̄/2)k_j`, stored as `μ` or, near its poles, as `1/μ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MuValue {
    Finite(C64),
    Reciprocal(C64),
}

#[derive(Clone, Debug)]
pub struct DualMu {
    pub values: Field<MuValue>,
    /// Largest relative least-squares residual over the mask.
    pub scatter: f64,
}

/// Tolerance on the relative `μ` scatter.
pub const MU_TOL: f64 = 1e-3;

impl DualMu {
    /// `N0 + μ̄P + μP̄ + ½|μ|²Y0`, or `|ν|²N0 + νP + ν̄P̄ + ½Y0` with `ν = 1/μ`.
    pub fn lift(&self, nf: &NormalizedFrame) -> VecField {
        let (y0, n0) = (nf.y0(), nf.n0());
        let e1 = nf.column(2);
        let e2 = nf.column(3);
        self.values.map_indexed(|k, m| match m {
            MuValue::Finite(mu) => &n0[k] + &e1[k] * mu.re - &e2[k] * mu.im + &y0[k] * (0.5 * mu.norm_sqr()),
            MuValue::Reciprocal(nu) => &n0[k] * nu.norm_sqr() + &e1[k] * nu.re + &e2[k] * nu.im + &y0[k] * 0.5,
        })
    }
}

/// Least-squares `μ` from the canonical `B1`, using `B1/h0` across common zeros.
pub fn dual_mu(nf: &NormalizedFrame) -> Result<DualMu> {
    let c = nf.chart();
    let b1 = match common_factor(&nf.blocks.b1, c) {
        Ok(cf) => cf.reduced,
        Err(_) => nf.blocks.b1.clone(),
    };
    let mut scatter = 0.0f64;
    let mut values = Vec::with_capacity(c.len());
    for (idx, b) in b1.iter().enumerate() {
        let beta: Vec<C64> = b.row(0).iter().map(|x| x / SQRT_2).collect();
        let k: Vec<C64> = b.row(2).iter().map(|x| -x).collect();
        let kk: f64 = k.iter().map(|x| x.norm_sqr()).sum();
        let bb: f64 = beta.iter().map(|x| x.norm_sqr()).sum();
        let scale = kk.sqrt() + bb.sqrt();
        let (value, res) = if kk >= 4.0 * bb {
            if kk == 0.0 {
                (MuValue::Finite(C64::new(0.0, 0.0)), 0.0)
            } else {
                let s: C64 = k.iter().zip(&beta).map(|(k, b)| k * b.conj()).sum();
                let mu = -2.0 * s / kk;
                let r = k.iter().zip(&beta).map(|(k, b)| (b + mu.conj() * 0.5 * k).norm()).fold(0.0, f64::max);
                (MuValue::Finite(mu), r)
            }
        } else {
            let s: C64 = beta.iter().zip(&k).map(|(b, k)| b.conj() * k).sum();
            let nu_bar = -s / (2.0 * bb);
            let r = k.iter().zip(&beta).map(|(k, b)| (k + 2.0 * nu_bar * b).norm()).fold(0.0, f64::max);
            (MuValue::Reciprocal(nu_bar.conj()), r)
        };
        if nf.blocks.mask[idx] && scale > 0.0 {
            scatter = scatter.max(res / scale);
        }
        values.push(value);
    }
    let h2 = c.h() * c.h();
    if scatter > MU_TOL + crate::spinor::NULL_H2 * h2 {
        return Err(Error::InconsistentMu(scatter));
    }
    Ok(DualMu { values: Field { nu: c.nu, nv: c.nv, values }, scatter })
}

/// `Y_μ` as a sphere map with the checks of the conformality dichotomy.
#[derive(Clone, Debug)]
pub struct YMu {
    pub lift: VecField,
    pub map: SphereMap,
    /// `sup |⟨Y_μz, Y_μz⟩| / sup ⟨Y_μz, Y_μz̄⟩` in the `x0 = 1` normalization.
    pub isotropy: f64,
    /// `sup ⟨Y_μz, Y_μz̄⟩`.
    pub conformal_sup: f64,
    /// Fraction of masked points with `⟨Y_μz, Y_μz̄⟩ > CONFORMAL_FLOOR`.
    pub conformal_fraction: f64,
    /// Relative residual of `μ_z + √2(a13 − ia14) + ia34μ` where `μ` is finite.
    pub riccati: f64,
}

pub fn build_y_mu(nf: &NormalizedFrame, mu: &DualMu) -> YMu {
    let c = nf.chart();
    let mask = &nf.blocks.mask;
    let lift = mu.lift(nf);
    let map = SphereMap::from_lift(c, &lift);
    let rep = conformal_report(&map, mask);
    let pu = d_u(&map.points, c);
    let pv = d_v(&map.points, c);
    let metric = pu.zip_map(&pv, |a, b| 0.25 * (a.norm_squared() + b.norm_squared()));
    let positive = metric.iter().zip(mask.iter()).filter(|(x, m)| **m && **x > CONFORMAL_FLOOR).count();

    let o = nf.orientation();
    let muf: Field<C64> = mu.values.map(|m| match m {
        MuValue::Finite(x) => *x,
        MuValue::Reciprocal(nu) if nu.norm() > 1e-3 => nu.inv(),
        MuValue::Reciprocal(_) => C64::new(0.0, 0.0),
    });
    let finite = Field { nu: c.nu, nv: c.nv, values: mu.values.iter().zip(mask.iter()).map(|(m, k)| *k && !matches!(m, MuValue::Reciprocal(nu) if nu.norm() <= 1e-3)).collect() };
    let muz = o.d(&muf, c);
    let i = C64::new(0.0, 1.0);
    let a = &nf.blocks.a1;
    let terms = |k: usize| {
        let x = a[k][(0, 2)] - i * a[k][(0, 3)];
        (muz[k], SQRT_2 * x, i * a[k][(2, 3)] * muf[k])
    };
    let resid = Field { nu: c.nu, nv: c.nv, values: (0..c.len()).map(|k| {
        let (p, q, r) = terms(k);
        (p + q + r).norm()
    }).collect() };
    let size = Field { nu: c.nu, nv: c.nv, values: (0..c.len()).map(|k| {
        let (p, q, r) = terms(k);
        p.norm() + q.norm() + r.norm()
    }).collect() };
    let riccati = masked_sup(&resid, &finite) / masked_sup(&size, &finite).max(1e-300);
    YMu {
        lift,
        map,
        isotropy: rep.conformality,
        conformal_sup: masked_sup(&metric, mask),
        conformal_fraction: positive as f64 / mask.count().max(1) as f64,
        riccati,
    }
}

/// The dual surface `[N0 + μ̄P + μP̄ + ½|μ|²Y0]` of case a2, with the
/// relative size of the `ψ`-components of its derivative.
#[derive(Clone, Debug)]
pub struct DualSurface {
    pub map: SphereMap,
    /// `sup |⟨Ŷ_z, ψ_j⟩| / sup |Ŷ_z|` in the `x0 = 1` normalization.
    pub duality_residual: f64,
}

pub fn dual_surface(nf: &NormalizedFrame) -> Result<DualSurface> {
    let n = nf.frame.dim() - 4;
    let rank = s_willmore_rank_default(&nf.blocks);
    if rank.max_rank > 1 {
        return Err(Error::WrongCase { expected: "a2".into(), found: "rank 2".into() });
    }
    let mu = dual_mu(nf)?;
    let c = nf.chart();
    let map = SphereMap::from_lift(c, &mu.lift(nf));
    let lift = map.lift();
    let yu = d_u(&lift, c);
    let yv = d_v(&lift, c);
    let off = Field {
        nu: c.nu,
        nv: c.nv,
        values: (0..c.len())
            .map(|k| {
                let f = &nf.frame.frames[k];
                (0..n).map(|j| {
                    let psi = f.column(4 + j).into_owned();
                    rinner(&yu[k], &psi).hypot(rinner(&yv[k], &psi))
                }).fold(0.0, f64::max)
            })
            .collect(),
    };
    let size = yu.zip_map(&yv, |a, b| a.norm().hypot(b.norm()));
    let mask = &nf.blocks.mask;
    Ok(DualSurface { map, duality_residual: masked_sup(&off, mask) / masked_sup(&size, mask).max(1e-300) })
}

/// A minimal surface in `R^{n+2}` from the stereographic projection away from `Y0`.
#[derive(Clone, Debug)]
pub struct MinimalSurface {
    pub chart: Chart,
    pub x: VecField,
    /// `sup |E − G, 2F| / sup (E + G)`.
    pub conformality: f64,
    /// `sup |Δx| / (sup |x_uu| + sup |x_vv|)`.
    pub harmonicity: f64,
}

/// Projects `[W]` to the affine chart where the constant `y0` is the point at infinity.
pub fn stereographic(w: &VecField, nf: &NormalizedFrame) -> Result<MinimalSurface> {
    let c = nf.chart();
    let seed = c.idx(c.nu / 2, c.nv / 2);
    let f = &nf.frame.frames[seed];
    let m = f.nrows();
    let y0 = (f.column(0) - f.column(1)) / SQRT_2;
    let n0 = (f.column(0) + f.column(1)) / SQRT_2;
    let basis: Vec<DVector<f64>> = (2..m).map(|j| f.column(j).into_owned()).collect();
    let mut x = Vec::with_capacity(c.len());
    for (k, v) in w.iter().enumerate() {
        let s = -rinner(v, &y0);
        if s.abs() <= 1e-12 * v.norm() {
            return Err(Error::DegenerateImmersion { index: k, value: s });
        }
        let v = v / s;
        let _ = &n0;
        x.push(DVector::from_iterator(m - 2, basis.iter().map(|e| rinner(&v, e))));
    }
    let x = Field { nu: c.nu, nv: c.nv, values: x };
    let mask = &nf.blocks.mask;
    let xu = d_u(&x, c);
    let xv = d_v(&x, c);
    let defect = xu.zip_map(&xv, |a, b| ((a.norm_squared() - b.norm_squared()).powi(2) + 4.0 * a.dot(b).powi(2)).sqrt());
    let metric = xu.zip_map(&xv, |a, b| a.norm_squared() + b.norm_squared());
    let xuu = d_uu(&x, c);
    let xvv = d_vv(&x, c);
    let lap = xuu.zip_map(&xvv, |a, b| (a + b).norm());
    let scale = masked_sup(&xuu.map(|a| a.norm()), mask) + masked_sup(&xvv.map(|a| a.norm()), mask);
    Ok(MinimalSurface {
        chart: c.clone(),
        conformality: masked_sup(&defect, mask) / masked_sup(&metric, mask).max(1e-300),
        harmonicity: masked_sup(&lap, mask) / scale.max(1e-300),
        x,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchOrientation {
    Same,
    Opposite,
    Mixed,
}

/// Comparison of the conformal Gauss map of a surface with a frame's 4-planes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussMatch {
    /// `sup ‖P_V − P_V̂‖_max` of the Lorentz-orthogonal projectors.
    pub distance: f64,
    pub orientation: MatchOrientation,
}

/// Rebuilds the conformal Gauss map of `y` and compares it with `span{e0, ê0, e1, e2}` of `nf`.
pub fn verify_gauss_match(y: &SphereMap, nf: &NormalizedFrame) -> Result<GaussMatch> {
    let s = SurfaceData::from_raw(&y.lift(), &y.chart)?;
    let other = build_frame(&s);
    let mask = nf.frame.mask.and(&other.mask);
    let m = nf.frame.dim();
    let g = crate::lorentz::metric(m);
    let i13 = crate::lorentz::metric(4);
    let mut distance = 0.0f64;
    let (mut pos, mut neg) = (0usize, 0usize);
    for k in 0..y.chart.len() {
        if !mask[k] {
            continue;
        }
        let e: DMatrix<f64> = nf.frame.frames[k].columns(0, 4).into_owned();
        let f: DMatrix<f64> = other.frames[k].columns(0, 4).into_owned();
        let pe = &e * &i13 * e.transpose() * &g;
        let pf = &f * &i13 * f.transpose() * &g;
        distance = distance.max((pe - pf).amax());
        let det = (&i13 * e.transpose() * &g * &f).determinant();
        if det > 0.0 {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    let orientation = match (pos, neg) {
        (_, 0) => MatchOrientation::Same,
        (0, _) => MatchOrientation::Opposite,
        _ => MatchOrientation::Mixed,
    };
    Ok(GaussMatch { distance, orientation })
}
