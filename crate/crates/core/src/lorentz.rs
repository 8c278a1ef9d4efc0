//! Minkowski space `R^{n+4}_1`, the group `SO⁺(1, n+3)` and its Lie algebra.
//!
//! The metric is `diag(−1, 1, …, 1)`. Complex vectors are paired with the
//! complex-bilinear extension of the metric, never the Hermitian one.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

/// The metric matrix `diag(−1, 1, …, 1)` of size `m`.
pub fn metric(m: usize) -> DMatrix<f64> {
    let mut g = DMatrix::identity(m, m);
    if m > 0 {
        g[(0, 0)] = -1.0;
    }
    g
}

/// The metric with complex entries.
pub fn metric_c(m: usize) -> DMatrix<C64> {
    metric(m).map(|x| C64::new(x, 0.0))
}

/// `I_{1,3} = diag(−1, 1, 1, 1)`.
pub fn i13() -> DMatrix<C64> {
    metric_c(4)
}

/// `⟨x, y⟩ = −x₀y₀ + Σ xᵢyᵢ`.
pub fn inner(x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    Ok(inner_unchecked(x.as_slice(), y.as_slice()))
}

/// Complex-bilinear `⟨x, y⟩`; no conjugation on either slot.
pub fn inner_c(x: &DVector<C64>, y: &DVector<C64>) -> Result<C64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    Ok(inner_c_unchecked(x.as_slice(), y.as_slice()))
}

pub(crate) fn inner_unchecked(x: &[f64], y: &[f64]) -> f64 {
    let mut s = -x[0] * y[0];
    for k in 1..x.len() {
        s += x[k] * y[k];
    }
    s
}

pub(crate) fn inner_c_unchecked(x: &[C64], y: &[C64]) -> C64 {
    let mut s = -x[0] * y[0];
    for k in 1..x.len() {
        s += x[k] * y[k];
    }
    s
}

/// `⟨x, x̄⟩`, which is real.
pub fn hermitian_norm_sq(x: &DVector<C64>) -> f64 {
    let s = x.as_slice();
    let mut t = -s[0].norm_sqr();
    for e in &s[1..] {
        t += e.norm_sqr();
    }
    t
}

/// `I Mᵀ I`, the inverse of any `M` preserving the metric.
pub fn lorentz_inverse<T: nalgebra::ComplexField + Copy>(m: &DMatrix<T>) -> DMatrix<T> {
    let mut inv = m.transpose();
    let n = inv.nrows();
    for k in 1..n {
        inv[(k, 0)] = -inv[(k, 0)];
        inv[(0, k)] = -inv[(0, k)];
    }
    inv
}

/// Group membership report of a real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupCheck {
    /// `‖MᵀIM − I‖_max`.
    pub residual: f64,
    pub det: f64,
    /// `M₀₀`; positive exactly when `M` preserves the future cone.
    pub time_time: f64,
}

impl GroupCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual <= tol && (self.det - 1.0).abs() <= tol.max(1e-12) * 10.0 && self.time_time > 0.0
    }
}

pub fn check_group(m: &DMatrix<f64>) -> GroupCheck {
    let g = metric(m.nrows());
    let residual = (m.transpose() * &g * m - &g).amax();
    GroupCheck {
        residual,
        det: m.determinant(),
        time_time: m[(0, 0)],
    }
}

/// `(passes, residual)` for membership in `SO⁺(1, m−1)`.
pub fn validate_group(m: &DMatrix<f64>, tol: f64) -> Result<(bool, f64)> {
    if !m.is_square() || m.nrows() < 2 {
        return Err(Error::ShapeMismatch { expected: (m.nrows(), m.nrows()), got: m.shape() });
    }
    let c = check_group(m);
    Ok((c.passes(tol), c.residual))
}

/// An element of `SO⁺(1, m−1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement(DMatrix<f64>);

impl GroupElement {
    pub fn new(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        let c = check_group(&m);
        if !c.passes(tol) {
            return Err(Error::NotInGroup(c.residual.max((c.det - 1.0).abs())));
        }
        Ok(GroupElement(m))
    }

    pub fn identity(m: usize) -> Self {
        GroupElement(DMatrix::identity(m, m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn inverse(&self) -> Self {
        GroupElement(lorentz_inverse(&self.0))
    }

    pub fn compose(&self, other: &Self) -> Self {
        GroupElement(&self.0 * &other.0)
    }
}

/// `‖XᵀI + IX‖_max` for a complex matrix.
pub fn algebra_residual(x: &DMatrix<C64>) -> f64 {
    let g = metric_c(x.nrows());
    (x.transpose() * &g + &g * x).iter().fold(0.0, |m, e| m.max(e.norm()))
}

/// The blocks of a matrix in `so(1, n+3) ⊗ C` split as `4 + n`.
///
/// ```text
///     [ a1  b1 ]
///     [ b2  a2 ]
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct Blocks {
    pub a1: DMatrix<C64>,
    pub b1: DMatrix<C64>,
    pub b2: DMatrix<C64>,
    pub a2: DMatrix<C64>,
}

impl Blocks {
    pub fn of(x: &DMatrix<C64>) -> Self {
        let m = x.nrows();
        let n = m - 4;
        Blocks {
            a1: x.view((0, 0), (4, 4)).into_owned(),
            b1: x.view((0, 4), (4, n)).into_owned(),
            b2: x.view((4, 0), (n, 4)).into_owned(),
            a2: x.view((4, 4), (n, n)).into_owned(),
        }
    }

    pub fn assemble(&self) -> DMatrix<C64> {
        let n = self.a2.nrows();
        let mut x = DMatrix::zeros(4 + n, 4 + n);
        x.view_mut((0, 0), (4, 4)).copy_from(&self.a1);
        x.view_mut((0, 4), (4, n)).copy_from(&self.b1);
        x.view_mut((4, 0), (n, 4)).copy_from(&self.b2);
        x.view_mut((4, 4), (n, n)).copy_from(&self.a2);
        x
    }
}

/// `B2 = −B1ᵀ I_{1,3}`, forced by membership in the algebra.
pub fn b2_from_b1(b1: &DMatrix<C64>) -> DMatrix<C64> {
    -(b1.transpose() * i13())
}

/// A complexified element of `so(1, n+3)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement(DMatrix<C64>);

impl AlgebraElement {
    pub fn new(x: DMatrix<C64>, tol: f64) -> Result<Self> {
        if !x.is_square() || x.nrows() < 5 {
            return Err(Error::ShapeMismatch { expected: (x.nrows(), x.nrows()), got: x.shape() });
        }
        let r = algebra_residual(&x);
        if r > tol {
            return Err(Error::NotInAlgebra(r));
        }
        Ok(AlgebraElement(x))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn blocks(&self) -> Blocks {
        Blocks::of(&self.0)
    }

    /// `(k, p)` with `k` block-diagonal and `p` block-off-diagonal.
    pub fn cartan_split(&self) -> (AlgebraElement, AlgebraElement) {
        let Blocks { a1, b1, b2, a2 } = self.blocks();
        let n = a2.nrows();
        let k = Blocks { a1, a2, b1: DMatrix::zeros(4, n), b2: DMatrix::zeros(n, 4) };
        let p = Blocks { a1: DMatrix::zeros(4, 4), a2: DMatrix::zeros(n, n), b1, b2 };
        (AlgebraElement(k.assemble()), AlgebraElement(p.assemble()))
    }

    pub fn bracket(&self, other: &Self) -> AlgebraElement {
        AlgebraElement(bracket(&self.0, &other.0))
    }
}

pub fn bracket(x: &DMatrix<C64>, y: &DMatrix<C64>) -> DMatrix<C64> {
    x * y - y * x
}

/// Projector onto the block-diagonal part.
pub fn k_part(x: &DMatrix<C64>) -> DMatrix<C64> {
    let mut b = Blocks::of(x);
    b.b1.fill(C64::new(0.0, 0.0));
    b.b2.fill(C64::new(0.0, 0.0));
    b.assemble()
}

/// Projector onto the block-off-diagonal part.
pub fn p_part(x: &DMatrix<C64>) -> DMatrix<C64> {
    x - k_part(x)
}

/// Largest modulus of the entries.
pub fn cmax(x: &DMatrix<C64>) -> f64 {
    x.iter().fold(0.0, |m, e| m.max(e.norm()))
}

/// The boost in the `(e₀, e_a)` plane with rapidity `t`.
pub fn boost(m: usize, a: usize, t: f64) -> DMatrix<f64> {
    let mut b = DMatrix::identity(m, m);
    b[(0, 0)] = t.cosh();
    b[(a, a)] = t.cosh();
    b[(0, a)] = t.sinh();
    b[(a, 0)] = t.sinh();
    b
}

/// The rotation in the spatial `(e_a, e_b)` plane by angle `t`.
pub fn rotation(m: usize, a: usize, b: usize, t: f64) -> DMatrix<f64> {
    let mut r = DMatrix::identity(m, m);
    r[(a, a)] = t.cos();
    r[(b, b)] = t.cos();
    r[(a, b)] = -t.sin();
    r[(b, a)] = t.sin();
    r
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(x: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = x.amax() * x.nrows() as f64;
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let y = x / 2f64.powi(s);
    let n = x.nrows();
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=18 {
        term = &term * &y / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// The real algebra element `e_a ∧ e_b` acting as `x ↦ ⟨x, e_b⟩e_a − ⟨x, e_a⟩e_b`.
pub fn wedge_generator(m: usize, a: usize, b: usize) -> DMatrix<f64> {
    let g = metric(m);
    let mut x = DMatrix::zeros(m, m);
    x[(a, b)] += g[(b, b)];
    x[(b, a)] -= g[(a, a)];
    x
}
