//! `C⁴ ≅ Mat(2, C)` and the double cover `SL(2, C) → SO⁺(1, 3)`.
//!
//! The isomorphism is
//!
//! ```text
//! m(x) = [ x₀ − x₁     x₂ + i x₃ ]
//!        [ x₂ − i x₃   x₀ + x₁   ]
//! ```
//!
//! so `det m(x) = −⟨x, x⟩`, real vectors go to Hermitian matrices, null vectors
//! to matrices of rank at most one, and `g ∈ SL(2, C)` acts by `X ↦ g X gᴴ`.
//! Vectors of the shape `(p, −p, q, iq)` are exactly those whose image has a
//! vanishing second column.

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::chart::{Chart, Field, Mask, Orientation};
use crate::gauss_frame::CMatField;
use crate::{Error, Result, C64, I};

pub type Spinor = Matrix2<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);

pub fn vec_to_mat(x: &Vector4<C64>) -> Spinor {
    Matrix2::new(x[0] - x[1], x[2] + I * x[3], x[2] - I * x[3], x[0] + x[1])
}

pub fn mat_to_vec(m: &Spinor) -> Vector4<C64> {
    Vector4::new(
        (m[(0, 0)] + m[(1, 1)]) * 0.5,
        (m[(1, 1)] - m[(0, 0)]) * 0.5,
        (m[(0, 1)] + m[(1, 0)]) * 0.5,
        (m[(0, 1)] - m[(1, 0)]) / (2.0 * I),
    )
}

pub fn det(m: &Spinor) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Tolerance on `det g = 1`.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// The real matrix `A` with `m(Ax) = g m(x) gᴴ`.
pub fn sl2_to_so13(g: &Spinor) -> Result<Matrix4<f64>> {
    let d = det(g);
    if (d - 1.0).norm() > UNIMODULAR_TOL {
        return Err(Error::NotUnimodular(d));
    }
    Ok(adjoint_action(g))
}

fn adjoint_action(g: &Spinor) -> Matrix4<f64> {
    let gh = g.adjoint();
    let mut a = Matrix4::zeros();
    for k in 0..4 {
        let mut e = Vector4::from_element(ZERO);
        e[k] = C64::new(1.0, 0.0);
        let col = mat_to_vec(&(g * vec_to_mat(&e) * gh));
        for r in 0..4 {
            a[(r, k)] = col[r].re;
        }
    }
    a
}

/// Distance of `x` from the shape `(p, −p, q, iq)`.
pub fn shape_residual(x: &Vector4<C64>) -> f64 {
    (x[0] + x[1]).norm() + (x[3] - I * x[2]).norm()
}

/// Column `j` of a `4×n` matrix.
fn column(b: &DMatrix<C64>, j: usize) -> Vector4<C64> {
    Vector4::new(b[(0, j)], b[(1, j)], b[(2, j)], b[(3, j)])
}

/// `Σ_j Rᴴ R` over the rows of all `m(b_j)`: a `2×2` Hermitian matrix whose
/// top eigenvector spans the common row direction of a family of rank-one
/// matrices sharing it.
fn row_gram(b: &DMatrix<C64>) -> Matrix2<C64> {
    let mut h = Matrix2::from_element(ZERO);
    for j in 0..b.ncols() {
        let m = vec_to_mat(&column(b, j));
        h += m.adjoint() * m;
    }
    h
}

/// Top eigenpair and `√(λ_min/λ_max)` of a `2×2` Hermitian matrix.
fn top_eigen(h: &Matrix2<C64>) -> (Vector2<C64>, f64, f64) {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = h[(0, 1)];
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let lmax = mean + rad;
    let lmin = (mean - rad).max(0.0);
    let v1 = Vector2::new(b, C64::new(lmax - a, 0.0));
    let v2 = Vector2::new(C64::new(lmax - d, 0.0), b.conj());
    let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
    let v = if v.norm() == 0.0 { Vector2::new(C64::new(1.0, 0.0), ZERO) } else { v / C64::new(v.norm(), 0.0) };
    let ratio = if lmax > 0.0 { (lmin / lmax).sqrt() } else { 0.0 };
    (v, lmax, ratio)
}

/// The `SU(2)` element `g` with `(ḡ w)₂ = 0`, unique up to `diag(e^{iθ}, e^{−iθ})`.
fn su2_killing(w: &Vector2<C64>) -> Spinor {
    let n = w.norm();
    Matrix2::new(w[0] / n, w[1] / n, -w[1].conj() / n, w[0].conj() / n)
}

/// `diag(e^{iθ}, e^{−iθ})·g` with `θ` minimizing the distance to `target`.
fn align_phase(g: &Spinor, target: &Spinor) -> Spinor {
    let m = g * target.adjoint();
    let s = m[(0, 0)] + m[(1, 1)].conj();
    let theta = if s.norm() > 0.0 { -s.arg() } else { 0.0 };
    let e = C64::from_polar(1.0, theta);
    Matrix2::new(e, ZERO, ZERO, e.conj()) * g
}

/// Phase convention at the seed: first nonzero entry of the first row real positive.
fn seed_phase(g: &Spinor) -> Spinor {
    let pivot = if g[(0, 0)].norm() > 1e-8 { g[(0, 0)] } else { g[(0, 1)] };
    let e = C64::from_polar(1.0, -pivot.arg());
    Matrix2::new(e, ZERO, ZERO, e.conj()) * g
}

/// Result of bringing `B1` into the shape with rows `(√2β, −√2β, −k, −ik)`.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub orientation: Orientation,
    pub spin: Field<Spinor>,
    /// `A = sl2_to_so13(g)`; `B̂1 = A·B1` (same) or `A·conj(B1)` (conjugate).
    pub a: Field<Matrix4<f64>>,
    pub b1_hat: CMatField,
    /// `sup |shape residual| / sup ‖B1‖` over the mask.
    pub shape_residual: f64,
    /// Largest `‖A(p) − A(q)‖_max / h` over neighboring grid points.
    pub max_jump: f64,
    /// Largest `σ₂/σ₁` of the stacked rows, the isotropic-family defect.
    pub family_defect: f64,
}

impl Canonical {
    /// The gauge `diag(A⁻¹, I_n)` taking the input frame to the normalized one.
    pub fn gauge(&self, n: usize) -> Field<DMatrix<f64>> {
        self.a.map(|a| {
            let mut g = DMatrix::identity(4 + n, 4 + n);
            let inv = crate::lorentz::lorentz_inverse(&DMatrix::from_fn(4, 4, |r, c| a[(r, c)]));
            g.view_mut((0, 0), (4, 4)).copy_from(&inv);
            g
        })
    }
}

/// Tolerance on `σ₂/σ₁` for deciding the isotropic family of the columns.
pub const FAMILY_TOL: f64 = 1e-3;

/// `h²` coefficient of the nullity and family tolerances for sampled data.
pub const NULL_H2: f64 = 10.0;

/// Largest `σ₂/σ₁` of the stacked rows of `m(b_j)` over the mask, for `B1` and `conj(B1)`.
pub fn family_defects(b1: &CMatField, mask: &Mask) -> (f64, f64) {
    let scale = sup_norm(b1, mask);
    let mut same = 0.0f64;
    let mut conj = 0.0f64;
    for (k, b) in b1.iter().enumerate() {
        if !mask[k] || b.norm() < 1e-6 * scale {
            continue;
        }
        same = same.max(top_eigen(&row_gram(b)).2);
        conj = conj.max(top_eigen(&row_gram(&b.map(|e| e.conj()))).2);
    }
    (same, conj)
}

fn sup_norm(b1: &CMatField, mask: &Mask) -> f64 {
    b1.iter().zip(mask.iter()).filter(|(_, m)| **m).map(|(b, _)| b.norm()).fold(0.0, f64::max)
}

/// Finds `A: U → SO⁺(1,3)` putting every column of `B1` (or of `conj(B1)`)
/// into the shape `(p, −p, q, iq)`.
///
/// The pointwise `SU(2)` element is canonical up to a phase; the phase is
/// fixed at the central seed and then continued along the same sweep as the
/// normal frame, each point choosing the phase closest to its neighbor.
/// With `prefer = None` the family is decided from the data, favoring the
/// same orientation when both fit (max rank 1).
pub fn canonicalize_b1(b1: &CMatField, c: &Chart, mask: &Mask, prefer: Option<Orientation>) -> Result<Canonical> {
    c.check(b1)?;
    let scale = sup_norm(b1, mask);
    if scale == 0.0 {
        return Err(Error::TotallyUmbilic);
    }
    let h2 = c.h() * c.h();
    let iso_tol = (1e-6 + NULL_H2 * h2) * scale * scale;
    let g13 = crate::lorentz::i13();
    for (k, b) in b1.iter().enumerate() {
        let r = (b.transpose() * &g13 * b).iter().fold(0.0f64, |m, e| m.max(e.norm()));
        if mask[k] && r > iso_tol {
            return Err(Error::NotNull { index: k, residual: r });
        }
    }
    let (same, conj) = family_defects(b1, mask);
    let orientation = match prefer {
        Some(o) => o,
        None if same <= FAMILY_TOL || same <= conj => Orientation::Same,
        None => Orientation::Conjugate,
    };
    let family_defect = match orientation {
        Orientation::Same => same,
        Orientation::Conjugate => conj,
    };
    if family_defect > FAMILY_TOL + NULL_H2 * h2 {
        let conj_input = orientation == Orientation::Conjugate;
        let worst = (0..b1.len())
            .filter(|k| mask[*k])
            .max_by(|a, b| {
                let d = |k: usize| {
                    let x = if conj_input { b1[k].map(|e| e.conj()) } else { b1[k].clone() };
                    top_eigen(&row_gram(&x)).2
                };
                d(*a).total_cmp(&d(*b))
            })
            .unwrap_or(0);
        return Err(Error::NotIsotropic(worst));
    }
    let source: CMatField = match orientation {
        Orientation::Same => b1.clone(),
        Orientation::Conjugate => b1.map(|b| b.map(|e| e.conj())),
    };

    let floor = 1e-10 * scale;
    let pointwise = |k: usize| -> Option<Spinor> {
        let b = &source[k];
        if b.norm() <= floor {
            return None;
        }
        let (v, _, _) = top_eigen(&row_gram(b));
        Some(su2_killing(&v.map(|e| e.conj())))
    };

    let mut spin: Vec<Option<Spinor>> = vec![None; c.len()];
    let (ic, jc) = (c.nu / 2, c.nv / 2);
    let seed = c.idx(ic, jc);
    let g0 = pointwise(seed).ok_or(Error::VanishingColumn(seed))?;
    spin[seed] = Some(seed_phase(&g0));
    let mut step = |from: usize, to: usize| {
        let prev = spin[from].expect("sweep order");
        spin[to] = Some(match pointwise(to) {
            Some(g) => align_phase(&g, &prev),
            None => prev,
        });
    };
    for i in (ic + 1)..c.nu {
        step(c.idx(i - 1, jc), c.idx(i, jc));
    }
    for i in (0..ic).rev() {
        step(c.idx(i + 1, jc), c.idx(i, jc));
    }
    for j in (jc + 1)..c.nv {
        for i in 0..c.nu {
            step(c.idx(i, j - 1), c.idx(i, j));
        }
    }
    for j in (0..jc).rev() {
        for i in 0..c.nu {
            step(c.idx(i, j + 1), c.idx(i, j));
        }
    }
    let spin = Field { nu: c.nu, nv: c.nv, values: spin.into_iter().map(|g| g.expect("swept")).collect() };
    let a = spin.map(adjoint_action);
    let b1_hat = a.zip_map(&source, |a, b| {
        let ac = DMatrix::from_fn(4, 4, |r, cc| C64::new(a[(r, cc)], 0.0));
        ac * b
    });
    let shape = b1_hat
        .iter()
        .zip(mask.iter())
        .filter(|(_, m)| **m)
        .map(|(b, _)| (0..b.ncols()).map(|j| shape_residual(&column(b, j))).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let max_jump = neighbor_jump(&a, c);
    Ok(Canonical { orientation, spin, a, b1_hat, shape_residual: shape / scale, max_jump, family_defect })
}

/// Largest `‖A(p) − A(q)‖_max / h` over horizontally or vertically adjacent points.
pub fn neighbor_jump(a: &Field<Matrix4<f64>>, c: &Chart) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..c.nv {
        for i in 0..c.nu {
            let k = c.idx(i, j);
            if i + 1 < c.nu {
                worst = worst.max((a[k] - a[c.idx(i + 1, j)]).amax() / c.hu());
            }
            if j + 1 < c.nv {
                worst = worst.max((a[k] - a[c.idx(i, j + 1)]).amax() / c.hv());
            }
        }
    }
    worst
}

/// Normalizes a single null column field into `𝒩 ⊕ 𝒩₊`.
pub fn normalize_null_column(b: &Field<Vector4<C64>>, c: &Chart) -> Result<(Field<Spinor>, Field<Vector4<C64>>)> {
    let scale = b.iter().map(|x| x.norm()).fold(0.0, f64::max);
    for (k, x) in b.iter().enumerate() {
        if x.norm() <= 1e-10 * scale {
            return Err(Error::VanishingColumn(k));
        }
        let d = det(&vec_to_mat(x)).norm();
        if d > 1e-8 * x.norm_squared() {
            return Err(Error::NotNull { index: k, residual: d });
        }
    }
    let as_mat = b.map(|x| DMatrix::from_column_slice(4, 1, x.as_slice()));
    let all = c.interior_mask(0);
    let can = canonicalize_b1(&as_mat, c, &all, Some(Orientation::Same))?;
    Ok((can.spin, can.b1_hat.map(|m| column(m, 0))))
}

/// A holomorphic common factor `h0 = Π (z − z_i)^{k_i}` of all entries of `B1`.
#[derive(Clone, Debug)]
pub struct CommonFactor {
    pub zeros: Vec<(C64, u32)>,
    pub h0: Field<C64>,
    /// `B1 / h0`, bounded away from zero.
    pub reduced: CMatField,
}

/// Grid points with `‖B1‖` below this fraction of the max are zero candidates.
pub const ZERO_REL: f64 = 0.05;

/// Isolates the common zeros of `B1`.
///
/// Zero candidates are strict local minima of `‖B1‖` below `ZERO_REL·max`.
/// Each is refined by one Newton step on the dominant entry and its order is
/// the rounded log-log slope of `‖B1‖` against the distance to the refined
/// zero over the surrounding ring of points.
pub fn common_factor(b1: &CMatField, c: &Chart) -> Result<CommonFactor> {
    c.check(b1)?;
    let norm = b1.map(|b| b.norm());
    let max = norm.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::TotallyUmbilic);
    }
    let dz = crate::chart::d_z(b1, c);
    let mut zeros = Vec::new();
    for j in 0..c.nv {
        for i in 0..c.nu {
            let k = c.idx(i, j);
            if norm[k] >= ZERO_REL * max {
                continue;
            }
            let is_min = neighbors(c, i, j, 1).iter().all(|&q| norm[q] > norm[k]);
            if !is_min {
                continue;
            }
            let (r, col) = argmax_entry(&dz[k]);
            let fz = dz[k][(r, col)];
            let f = b1[k][(r, col)];
            let ring: Vec<usize> = neighbors(c, i, j, 2);
            // order estimate from the raw minimum first, then Newton with that order
            let z = c.z(k);
            let mut z0 = if fz.norm() > 0.0 { z - f / fz } else { z };
            let slope = fit_order(&norm, c, &ring, z0);
            let order = slope.round().max(1.0) as u32;
            if fz.norm() > 0.0 {
                z0 = z - f * order as f64 / fz;
            }
            let slope = fit_order(&norm, c, &ring, z0);
            if (slope - order as f64).abs() > 0.35 {
                return Err(Error::ZeroSetNotIsolated);
            }
            zeros.push((z0, order));
        }
    }
    let h0 = c.sample_index(|i, j| {
        let z = c.z(c.idx(i, j));
        zeros.iter().fold(C64::new(1.0, 0.0), |acc, (z0, k)| acc * (z - z0).powu(*k))
    });
    let tiny = 1e-9 * c.h();
    let mut reduced: Vec<Option<DMatrix<C64>>> = (0..c.len())
        .map(|k| if h0[k].norm() > tiny.powi(1) { Some(&b1[k] / h0[k]) } else { None })
        .collect();
    for j in 0..c.nv {
        for i in 0..c.nu {
            let k = c.idx(i, j);
            if reduced[k].is_none() {
                let nb: Vec<DMatrix<C64>> = neighbors(c, i, j, 1).iter().filter_map(|&q| reduced[q].clone()).collect();
                if nb.is_empty() {
                    return Err(Error::ZeroSetNotIsolated);
                }
                let sum = nb.iter().skip(1).fold(nb[0].clone(), |a, b| a + b);
                reduced[k] = Some(sum / C64::new(nb.len() as f64, 0.0));
            }
        }
    }
    let reduced = Field { nu: c.nu, nv: c.nv, values: reduced.into_iter().map(|r| r.expect("filled")).collect() };
    let rmax = reduced.iter().map(|b| b.norm()).fold(0.0, f64::max);
    if reduced.iter().any(|b| b.norm() < 1e-3 * rmax) {
        return Err(Error::ZeroSetNotIsolated);
    }
    Ok(CommonFactor { zeros, h0, reduced })
}

fn argmax_entry(m: &DMatrix<C64>) -> (usize, usize) {
    let mut best = (0, 0);
    let mut val = -1.0;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if m[(r, c)].norm() > val {
                val = m[(r, c)].norm();
                best = (r, c);
            }
        }
    }
    best
}

/// Points within Chebyshev distance `r` of `(i, j)`, excluding it; wraps periodic axes.
fn neighbors(c: &Chart, i: usize, j: usize, r: usize) -> Vec<usize> {
    let r = r as isize;
    let mut out = Vec::new();
    for dj in -r..=r {
        for di in -r..=r {
            if di == 0 && dj == 0 {
                continue;
            }
            let ii = i as isize + di;
            let jj = j as isize + dj;
            let ii = if c.topology.periodic_u() { ii.rem_euclid(c.nu as isize) } else { ii };
            let jj = if c.topology.periodic_v() { jj.rem_euclid(c.nv as isize) } else { jj };
            if ii >= 0 && jj >= 0 && (ii as usize) < c.nu && (jj as usize) < c.nv {
                out.push(c.idx(ii as usize, jj as usize));
            }
        }
    }
    out
}

/// Least-squares slope of `log ‖B1‖` against `log |z − z0|`.
fn fit_order(norm: &Field<f64>, c: &Chart, pts: &[usize], z0: C64) -> f64 {
    let data: Vec<(f64, f64)> = pts
        .iter()
        .filter_map(|&q| {
            let d = (c.z(q) - z0).norm();
            (d > 0.0 && norm[q] > 0.0).then(|| (d.ln(), norm[q].ln()))
        })
        .collect();
    let n = data.len() as f64;
    let mx = data.iter().map(|p| p.0).sum::<f64>() / n;
    let my = data.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = data.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = data.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Serializable tag for reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Columns span a subspace of `𝒩 ⊕ 𝒩₊` after gauge.
    Plus,
    /// Columns span a subspace of `𝒩 ⊕ 𝒩₋` after gauge.
    Minus,
}
