//! Canonical lift, second lift `N`, normal frame and the invariants
//! `κ = Σ k_j ψ_j`, `s`, `b_{jl}`, `β_j` of a conformal immersion into `S^{n+2}`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::chart::{d_u, d_v, d_z, d_zbar, d_zz, d_zzbar, norms, Chart, Field, Mask, Norms};
use crate::lorentz::{inner_c_unchecked, inner_unchecked, metric};
use crate::{Error, Result, C64};

/// Cells excluded along open boundaries before residuals are measured.
pub const RESIDUAL_MARGIN: usize = 8;

/// Relative tolerance on `|⟨raw, raw⟩|` for lightlike input.
pub const NULL_TOL: f64 = 1e-9;

pub type VecField = Field<DVector<f64>>;
pub type CVecField = Field<DVector<C64>>;

pub fn complexify(f: &VecField) -> CVecField {
    f.map(|x| x.map(|e| C64::new(e, 0.0)))
}

fn cinner(x: &DVector<C64>, y: &DVector<C64>) -> C64 {
    inner_c_unchecked(x.as_slice(), y.as_slice())
}

fn rinner(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    inner_unchecked(x.as_slice(), y.as_slice())
}

/// `⟨x, y⟩` for complex `x` and real `y`.
fn mixed(x: &DVector<C64>, y: &DVector<f64>) -> C64 {
    let mut s = -x[0] * y[0];
    for k in 1..x.len() {
        s += x[k] * y[k];
    }
    s
}

fn cvec(x: &DVector<f64>) -> DVector<C64> {
    x.map(|e| C64::new(e, 0.0))
}

/// The lift `Y = raw/ρ` normalized by `⟨Y_z, Y_z̄⟩ = ½`.
#[derive(Clone, Debug)]
pub struct CanonicalLift {
    pub y: VecField,
    /// The factor `ρ` divided out of the input.
    pub scale: Field<f64>,
    /// `|⟨Y_z, Y_z⟩|`, zero for a conformal parametrization.
    pub conformality: Norms,
    /// `|⟨Y_z, Y_z̄⟩ − ½|` after rescaling.
    pub normalization: Norms,
}

/// Rescales a forward-lightlike immersion to its canonical lift.
pub fn canonical_lift(raw: &VecField, c: &Chart) -> Result<CanonicalLift> {
    c.check(raw)?;
    for (k, x) in raw.iter().enumerate() {
        let norm = rinner(x, x);
        if x[0] <= 0.0 || norm.abs() > NULL_TOL * x[0] * x[0] {
            return Err(Error::NotLightlike { index: k, norm, time: x[0] });
        }
    }
    let ru = d_u(raw, c);
    let rv = d_v(raw, c);
    let metric_factor = ru.zip_map(&rv, |a, b| 0.25 * (rinner(a, a) + rinner(b, b)));
    let floor = 1e-12 * metric_factor.iter().cloned().fold(0.0, f64::max);
    for (k, g) in metric_factor.iter().enumerate() {
        if !(*g > floor) {
            return Err(Error::DegenerateImmersion { index: k, value: *g });
        }
    }
    let scale = metric_factor.map(|g| (2.0 * g).sqrt());
    let y = raw.zip_map(&scale, |x, r| x / *r);
    let mask = c.interior_mask(RESIDUAL_MARGIN / 2);
    let yc = complexify(&y);
    let yz = d_z(&yc, c);
    let yzb = d_zbar(&yc, c);
    let conformality = norms(&yz.map(|a| cinner(a, a)), &mask);
    let normalization = norms(&yz.zip_map(&yzb, |a, b| cinner(a, b) - 0.5), &mask);
    Ok(CanonicalLift { y, scale, conformality, normalization })
}

/// `N` with `⟨N, Y⟩ = −1`, `⟨N, N⟩ = 0`, and `N ≡ 2Y_zz̄ mod Y`.
///
/// With `M = 2Y_zz̄` the null combination is `M + cY`, `c = −⟨M,M⟩/(2⟨M,Y⟩)`;
/// dividing by `−⟨M, Y⟩` makes `⟨N, Y⟩ = −1` exact, which only rescales an
/// `O(h²)` discretization error.
pub fn frame_n(y: &VecField, c: &Chart) -> VecField {
    let m2 = d_zzbar(y, c).map(|x| x * 2.0);
    m2.zip_map(y, |m, yy| {
        let my = rinner(m, yy);
        let cc = -rinner(m, m) / (2.0 * my);
        (m + yy * cc) / (-my)
    })
}

/// Orthogonal projection onto `V⊥`, `V = span{Y, N, Y_u, Y_v}`.
struct Projector {
    basis: [DVector<f64>; 4],
    gram_inv: nalgebra::Matrix4<f64>,
}

impl Projector {
    fn new(y: &DVector<f64>, n: &DVector<f64>, yu: &DVector<f64>, yv: &DVector<f64>) -> Option<Self> {
        let basis = [y.clone(), n.clone(), yu.clone(), yv.clone()];
        let gram = nalgebra::Matrix4::from_fn(|a, b| rinner(&basis[a], &basis[b]));
        let gram_inv = gram.try_inverse()?;
        Some(Projector { basis, gram_inv })
    }

    fn perp(&self, x: &DVector<f64>) -> DVector<f64> {
        let rhs = nalgebra::Vector4::from_fn(|a, _| rinner(&self.basis[a], x));
        let coef = self.gram_inv * rhs;
        let mut out = x.clone();
        for a in 0..4 {
            out -= &self.basis[a] * coef[a];
        }
        out
    }
}

/// `Φ (ΦᵀIΦ)^{-1/2}`: the orthonormal frame nearest to `Φ`.
fn lowdin(phi: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let g = metric(phi.nrows());
    let s = phi.transpose() * &g * phi;
    let eig = SymmetricEigen::new(s);
    if eig.eigenvalues.iter().any(|l| *l <= 1e-14) {
        return None;
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let inv_sqrt = &eig.eigenvectors * d * eig.eigenvectors.transpose();
    Some(phi * inv_sqrt)
}

/// Orientation matrix `(Y, N, Y_u, Y_v, ψ)`.
fn oriented_det(y: &DVector<f64>, n: &DVector<f64>, yu: &DVector<f64>, yv: &DVector<f64>, psi: &DMatrix<f64>) -> f64 {
    let m = y.len();
    let mut f = DMatrix::zeros(m, m);
    f.set_column(0, y);
    f.set_column(1, n);
    f.set_column(2, yu);
    f.set_column(3, yv);
    f.view_mut((0, 4), (m, m - 4)).copy_from(psi);
    f.determinant()
}

/// Oriented orthonormal frame of `V⊥` by nearest-frame propagation.
///
/// The seed is the center of the chart. Its frame is Gram–Schmidt applied to
/// the projected ambient basis, with the last vector flipped if needed so that
/// `(φ₁, φ₂, φ₃, φ₄, ψ)` has determinant `+1`. The seed row is swept outward in
/// `u`, then every row outward in `v` from its already-framed neighbor.
pub fn normal_frame(y: &VecField, n: &VecField, yu: &VecField, yv: &VecField, c: &Chart) -> Result<Field<DMatrix<f64>>> {
    let m = y[0].len();
    let nn = m - 4;
    let mut frames: Vec<Option<DMatrix<f64>>> = vec![None; c.len()];
    let proj = |k: usize| Projector::new(&y[k], &n[k], &yu[k], &yv[k]).ok_or(Error::NormalFrame(k));

    let (ic, jc) = (c.nu / 2, c.nv / 2);
    let seed = c.idx(ic, jc);
    let p = proj(seed)?;
    let g = metric(m);
    let mut cols: Vec<DVector<f64>> = Vec::new();
    let mut candidates: Vec<DVector<f64>> = (0..m).map(|a| p.perp(&DVector::from_fn(m, |i, _| if i == a { 1.0 } else { 0.0 }))).collect();
    candidates.sort_by(|a, b| rinner(b, b).total_cmp(&rinner(a, a)));
    for mut v in candidates {
        for w in &cols {
            let d = rinner(&v, w);
            v -= w * d;
        }
        let len = rinner(&v, &v);
        if len > 1e-8 {
            cols.push(v / len.sqrt());
        }
        if cols.len() == nn {
            break;
        }
    }
    if cols.len() < nn {
        return Err(Error::NormalFrame(seed));
    }
    let mut psi0 = DMatrix::from_columns(&cols);
    if oriented_det(&y[seed], &n[seed], &yu[seed], &yv[seed], &psi0) < 0.0 {
        let last = nn - 1;
        psi0.column_mut(last).neg_mut();
    }
    debug_assert!((psi0.transpose() * &g * &psi0 - DMatrix::identity(nn, nn)).amax() < 1e-10);
    frames[seed] = Some(psi0);

    let mut step = |from: usize, to: usize| -> Result<()> {
        let p = proj(to)?;
        let prev = frames[from].as_ref().expect("sweep order");
        let projected = DMatrix::from_columns(&prev.column_iter().map(|col| p.perp(&col.into_owned())).collect::<Vec<_>>());
        frames[to] = Some(lowdin(&projected).ok_or(Error::NormalFrame(to))?);
        Ok(())
    };
    for i in (ic + 1)..c.nu {
        step(c.idx(i - 1, jc), c.idx(i, jc))?;
    }
    for i in (0..ic).rev() {
        step(c.idx(i + 1, jc), c.idx(i, jc))?;
    }
    for j in (jc + 1)..c.nv {
        for i in 0..c.nu {
            step(c.idx(i, j - 1), c.idx(i, j))?;
        }
    }
    for j in (0..jc).rev() {
        for i in 0..c.nu {
            step(c.idx(i, j + 1), c.idx(i, j))?;
        }
    }
    Ok(Field { nu: c.nu, nv: c.nv, values: frames.into_iter().map(|f| f.expect("all points swept")).collect() })
}

/// A conformal immersion together with its conformal invariants.
#[derive(Clone, Debug)]
pub struct SurfaceData {
    pub chart: Chart,
    /// Canonical lift `Y`.
    pub y: VecField,
    /// Second lift `N`.
    pub n: VecField,
    /// Columns `ψ_1 … ψ_n`.
    pub psi: Field<DMatrix<f64>>,
    /// Hopf components `k_j = ⟨κ, ψ_j⟩`.
    pub kappa: CVecField,
    /// Schwarzian `s`.
    pub schwarzian: Field<C64>,
    /// Normal connection `b_{jl} = ⟨D_z ψ_j, ψ_l⟩`.
    pub b: Field<DMatrix<C64>>,
    pub beta: CVecField,
    pub y_u: VecField,
    pub y_v: VecField,
    /// Points where residuals are measured.
    pub mask: Mask,
}

impl SurfaceData {
    /// Full pipeline from any forward-lightlike conformal immersion.
    pub fn from_raw(raw: &VecField, c: &Chart) -> Result<Self> {
        let lift = canonical_lift(raw, c)?;
        Self::from_lift(lift.y, c)
    }

    /// Pipeline from an already canonical lift.
    pub fn from_lift(y: VecField, c: &Chart) -> Result<Self> {
        c.check(&y)?;
        if y[0].len() < 5 {
            return Err(Error::DimensionMismatch { expected: 5, got: y[0].len() });
        }
        let n = frame_n(&y, c);
        let y_u = d_u(&y, c);
        let y_v = d_v(&y, c);
        let psi = normal_frame(&y, &n, &y_u, &y_v, c)?;
        Ok(Self::assemble(c.clone(), y, n, y_u, y_v, psi))
    }

    /// Computes `κ, s, b, β` from given lifts and frame.
    pub fn assemble(chart: Chart, y: VecField, n: VecField, y_u: VecField, y_v: VecField, psi: Field<DMatrix<f64>>) -> Self {
        let c = &chart;
        let y_zz = d_zz(&complexify(&y), c);
        let schwarzian = y_zz.zip_map(&n, |a, nn| 2.0 * mixed(a, nn));
        let kappa = y_zz.zip_map(&psi, |a, p| DVector::from_iterator(p.ncols(), p.column_iter().map(|col| mixed(a, &col.into_owned()))));
        let b = connection(&psi, c);
        let beta = beta_of(&kappa, &b, c);
        let mask = c.interior_mask(RESIDUAL_MARGIN);
        SurfaceData { chart, y, n, psi, kappa, schwarzian, b, beta, y_u, y_v, mask }
    }

    pub fn codim(&self) -> usize {
        self.psi[0].ncols()
    }

    pub fn dim(&self) -> usize {
        self.y[0].len()
    }

    /// `Σ |k_j|²` pointwise.
    pub fn k_squared(&self) -> Field<f64> {
        self.kappa.map(|k| k.norm_squared())
    }

    /// `κ = Σ k_j ψ_j` as a complex ambient vector.
    pub fn kappa_vector(&self) -> CVecField {
        self.kappa.zip_map(&self.psi, |k, p| p.map(|e| C64::new(e, 0.0)) * k)
    }

    /// `γ_l = β_{l,z̄} − Σ_j b̄_{lj} β_j + (s̄/2) k_l`, the coefficients of
    /// `D_z̄D_z̄κ + (s̄/2)κ`. Its real part vanishes exactly for Willmore surfaces.
    pub fn willmore_vector(&self) -> CVecField {
        let c = &self.chart;
        let beta_zb = d_zbar(&self.beta, c);
        Field {
            nu: c.nu,
            nv: c.nv,
            values: (0..c.len())
                .map(|p| &beta_zb[p] - self.b[p].map(|e| e.conj()) * &self.beta[p] + &self.kappa[p] * (self.schwarzian[p].conj() * 0.5))
                .collect(),
        }
    }
}

/// `b = ½(B − Bᵀ)` with `B_{jl} = ⟨∂_z ψ_j, ψ_l⟩`.
///
/// Only the `V⊥` component of `∂_z ψ_j` pairs with `ψ_l`, so this is the
/// normal connection; antisymmetrization removes the `O(h²)` symmetric part.
pub fn connection(psi: &Field<DMatrix<f64>>, c: &Chart) -> Field<DMatrix<C64>> {
    let psi_c = psi.map(|p| p.map(|e| C64::new(e, 0.0)));
    let dpsi = d_z(&psi_c, c);
    let m = psi[0].nrows();
    let g = metric(m).map(|e| C64::new(e, 0.0));
    dpsi.zip_map(&psi_c, |d, p| {
        let raw = d.transpose() * &g * p;
        (&raw - raw.transpose()) * C64::new(0.5, 0.0)
    })
}

/// `β_l = k_{l,z̄} − Σ_j b̄_{lj} k_j`.
pub fn beta_of(kappa: &CVecField, b: &Field<DMatrix<C64>>, c: &Chart) -> CVecField {
    let kzb = d_zbar(kappa, c);
    Field {
        nu: c.nu,
        nv: c.nv,
        values: (0..c.len()).map(|p| &kzb[p] - b[p].map(|e| e.conj()) * &kappa[p]).collect(),
    }
}

/// Named residual norms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub lines: Vec<ResidualLine>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualLine {
    pub name: String,
    pub norms: Norms,
}

impl ResidualReport {
    pub fn push(&mut self, name: &str, norms: Norms) {
        self.lines.push(ResidualLine { name: name.to_string(), norms });
    }

    pub fn get(&self, name: &str) -> Option<Norms> {
        self.lines.iter().find(|l| l.name == name).map(|l| l.norms)
    }

    pub fn worst(&self) -> Norms {
        self.lines.iter().fold(Norms::default(), |a, l| a.max(l.norms))
    }
}

/// Residuals of the four structure equations of the moving frame
/// `{Y, N, Y_z, Y_z̄, ψ_j}`:
///
/// ```text
/// Y_zz  = −(s/2) Y + κ
/// Y_zz̄ = −⟨κ,κ̄⟩ Y + ½ N
/// N_z   = −2⟨κ,κ̄⟩ Y_z − s Y_z̄ + 2 D_z̄κ
/// ψ_j,z = D_z ψ_j + 2 β_j Y − 2 k_j Y_z̄
/// ```
pub fn structure_residuals(s: &SurfaceData) -> ResidualReport {
    let c = &s.chart;
    let yc = complexify(&s.y);
    let nc = complexify(&s.n);
    let y_zz = d_zz(&yc, c);
    let y_zzb = d_zzbar(&s.y, c);
    let y_z = d_z(&yc, c);
    let y_zb = d_zbar(&yc, c);
    let n_z = d_z(&nc, c);
    let psi_c = s.psi.map(|p| p.map(|e| C64::new(e, 0.0)));
    let psi_z = d_z(&psi_c, c);
    let k2 = s.k_squared();
    let kv = s.kappa_vector();

    let len = c.len();
    let build = |f: &dyn Fn(usize) -> DVector<C64>| Field { nu: c.nu, nv: c.nv, values: (0..len).map(f).collect() };
    let half = C64::new(0.5, 0.0);

    let line1 = build(&|p| &y_zz[p] + &yc[p] * (s.schwarzian[p] * half) - &kv[p]);
    let line2 = build(&|p| cvec(&(&y_zzb[p] + &s.y[p] * k2[p] - &s.n[p] * 0.5)));
    let line3 = build(&|p| {
        let beta_psi = &psi_c[p] * &s.beta[p];
        &n_z[p] + &y_z[p] * C64::new(2.0 * k2[p], 0.0) + &y_zb[p] * s.schwarzian[p] - beta_psi * C64::new(2.0, 0.0)
    });
    let line4: Field<DMatrix<C64>> = Field {
        nu: c.nu,
        nv: c.nv,
        values: (0..len)
            .map(|p| {
                let mut r = &psi_z[p] - &psi_c[p] * s.b[p].transpose();
                for j in 0..s.codim() {
                    let col = &yc[p] * (s.beta[p][j] * 2.0) - &y_zb[p] * (s.kappa[p][j] * 2.0);
                    let mut rc = r.column_mut(j);
                    rc -= col;
                }
                r
            })
            .collect(),
    };

    let mut report = ResidualReport::default();
    report.push("Y_zz", norms(&line1, &s.mask));
    report.push("Y_zzbar", norms(&line2, &s.mask));
    report.push("N_z", norms(&line3, &s.mask));
    report.push("psi_z", norms(&line4, &s.mask));
    report
}

/// Residuals of the conformal Gauss, Codazzi and Ricci equations:
///
/// ```text
/// ½ s_z̄ = 3⟨κ, D_zκ̄⟩ + ⟨D_zκ, κ̄⟩
/// Im(D_z̄D_z̄κ + (s̄/2)κ) = 0
/// R^D_{z̄z}ψ = 2⟨ψ,κ⟩κ̄ − 2⟨ψ,κ̄⟩κ
/// ```
pub fn integrability_residuals(s: &SurfaceData) -> ResidualReport {
    let c = &s.chart;
    let s_zb = d_zbar(&s.schwarzian, c);
    let k_z = d_z(&s.kappa, c);
    let b_zb = d_zbar(&s.b, c);
    let bbar = s.b.map(|x| x.map(|e| e.conj()));
    let bbar_z = d_z(&bbar, c);
    let gamma = s.willmore_vector();
    let len = c.len();

    let gauss = Field {
        nu: c.nu,
        nv: c.nv,
        values: (0..len)
            .map(|p| {
                let k = &s.kappa[p];
                let delta = &k_z[p] - &s.b[p] * k;
                let t1: C64 = k.iter().zip(s.beta[p].iter()).map(|(a, b)| a * b.conj()).sum();
                let t2: C64 = delta.iter().zip(k.iter()).map(|(d, kk)| d * kk.conj()).sum();
                s_zb[p] * 0.5 - t1 * 3.0 - t2
            })
            .collect(),
    };
    let codazzi = gamma.map(|g| g.map(|e| e.im));
    let ricci = Field {
        nu: c.nu,
        nv: c.nv,
        values: (0..len)
            .map(|p| {
                let b = &s.b[p];
                let bb = &bbar[p];
                let lhs = &b_zb[p] - &bbar_z[p] + b * bb - bb * b;
                let k = &s.kappa[p];
                let kb = k.map(|e| e.conj());
                let rhs = (k * kb.transpose() - &kb * k.transpose()) * C64::new(2.0, 0.0);
                lhs - rhs
            })
            .collect(),
    };
    let mut report = ResidualReport::default();
    report.push("gauss", norms(&gauss, &s.mask));
    report.push("codazzi", norms(&codazzi, &s.mask));
    report.push("ricci", norms(&ricci, &s.mask));
    report
}

/// Residuals of the pointwise frame conditions on `N` and `ψ`.
pub fn frame_conditions(s: &SurfaceData) -> ResidualReport {
    let c = &s.chart;
    let yc = complexify(&s.y);
    let y_z = d_z(&yc, c);
    let mut report = ResidualReport::default();
    report.push("<N,Y>+1", norms(&s.n.zip_map(&s.y, |n, y| rinner(n, y) + 1.0), &s.mask));
    report.push("<N,N>", norms(&s.n.map(|n| rinner(n, n)), &s.mask));
    report.push("<N,Y_z>", norms(&y_z.zip_map(&s.n, mixed), &s.mask));
    report.push("<Y_z,Y_zbar>-1/2", norms(&y_z.map(|a| cinner(a, &a.map(|e| e.conj())) - 0.5), &s.mask));
    let g = metric(s.dim());
    report.push(
        "psi orthonormal",
        norms(&s.psi.map(|p| (p.transpose() * &g * p - DMatrix::identity(p.ncols(), p.ncols())).amax()), &s.mask),
    );
    report.push(
        "b antisymmetric",
        norms(&s.b.map(|b| b + b.transpose()), &s.mask),
    );
    report
}
