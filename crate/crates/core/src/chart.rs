//! Rectangular charts in the complex coordinate `z = u + iv`.
//!
//! Fields are stored row-major with `u` running fastest. Derivatives are
//! second-order: central stencils in the interior and on periodic axes,
//! one-sided second-order stencils on open boundaries. The Wirtinger
//! operators are `∂_z = ½(∂_u − i∂_v)` and `∂_z̄ = ½(∂_u + i∂_v)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64, I};

/// Smallest grid count along either axis.
pub const MIN_POINTS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    Open,
    PeriodicU,
    PeriodicV,
    PeriodicBoth,
}

impl Topology {
    pub fn periodic_u(self) -> bool {
        matches!(self, Topology::PeriodicU | Topology::PeriodicBoth)
    }

    pub fn periodic_v(self) -> bool {
        matches!(self, Topology::PeriodicV | Topology::PeriodicBoth)
    }

    pub fn is_closed(self) -> bool {
        self == Topology::PeriodicBoth
    }
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Topology::Open),
            "periodic-u" => Ok(Topology::PeriodicU),
            "periodic-v" => Ok(Topology::PeriodicV),
            "periodic-both" | "periodic" => Ok(Topology::PeriodicBoth),
            other => Err(Error::InvalidChart(format!("unknown topology {other:?}"))),
        }
    }
}

/// A sampled rectangle `[u0,u1] × [v0,v1]`.
///
/// On a periodic axis the right endpoint is identified with the left one and
/// is not sampled, so the spacing is `(u1 − u0)/nu`; on an open axis both
/// endpoints are sampled and the spacing is `(u1 − u0)/(nu − 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
    pub nu: usize,
    pub nv: usize,
    pub topology: Topology,
}

impl Chart {
    pub fn new(
        nu: usize,
        nv: usize,
        (u0, u1): (f64, f64),
        (v0, v1): (f64, f64),
        topology: Topology,
    ) -> Result<Self> {
        if nu < MIN_POINTS || nv < MIN_POINTS {
            return Err(Error::InvalidChart(format!(
                "grid {nu}x{nv} is smaller than {MIN_POINTS}x{MIN_POINTS}"
            )));
        }
        if !(u1 > u0) || !(v1 > v0) || !u0.is_finite() || !u1.is_finite() || !v0.is_finite() || !v1.is_finite()
        {
            return Err(Error::InvalidChart(format!(
                "degenerate ranges [{u0},{u1}] x [{v0},{v1}]"
            )));
        }
        Ok(Chart { u0, u1, v0, v1, nu, nv, topology })
    }

    /// Parses `Nu,Nv,u0,u1,v0,v1,topology`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if parts.len() != 7 {
            return Err(Error::InvalidChart(format!(
                "expected Nu,Nv,u0,u1,v0,v1,topology, got {spec:?}"
            )));
        }
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::InvalidChart(format!("bad grid count {s:?}")))
        };
        let num = |s: &str| parse_real(s).ok_or_else(|| Error::InvalidChart(format!("bad number {s:?}")));
        Chart::new(
            int(parts[0])?,
            int(parts[1])?,
            (num(parts[2])?, num(parts[3])?),
            (num(parts[4])?, num(parts[5])?),
            parts[6].parse()?,
        )
    }

    pub fn hu(&self) -> f64 {
        let span = self.u1 - self.u0;
        if self.topology.periodic_u() {
            span / self.nu as f64
        } else {
            span / (self.nu - 1) as f64
        }
    }

    pub fn hv(&self) -> f64 {
        let span = self.v1 - self.v0;
        if self.topology.periodic_v() {
            span / self.nv as f64
        } else {
            span / (self.nv - 1) as f64
        }
    }

    /// The coarser of the two spacings; the `h` of every `C·h²` bound.
    pub fn h(&self) -> f64 {
        self.hu().max(self.hv())
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nu, self.nv)
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nu + i
    }

    #[inline]
    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.nu, k / self.nu)
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u0 + i as f64 * self.hu()
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v0 + j as f64 * self.hv()
    }

    pub fn z(&self, k: usize) -> C64 {
        let (i, j) = self.coords(k);
        C64::new(self.u(i), self.v(j))
    }

    pub fn sample<T>(&self, f: impl Fn(f64, f64) -> T) -> Field<T> {
        let mut values = Vec::with_capacity(self.len());
        for j in 0..self.nv {
            let v = self.v(j);
            for i in 0..self.nu {
                values.push(f(self.u(i), v));
            }
        }
        Field { nu: self.nu, nv: self.nv, values }
    }

    /// The same rectangle with spacing halved along both axes.
    pub fn refined(&self) -> Chart {
        let grow = |n: usize, periodic: bool| if periodic { 2 * n } else { 2 * (n - 1) + 1 };
        Chart {
            nu: grow(self.nu, self.topology.periodic_u()),
            nv: grow(self.nv, self.topology.periodic_v()),
            ..self.clone()
        }
    }

    /// Points at least `margin` cells away from every open boundary.
    ///
    /// Each stencil pass that touches a one-sided boundary stencil spoils the
    /// error expansion one cell further in, so quantities obtained after `k`
    /// derivative passes are only `O(h²)`-smooth outside a margin of `k` cells.
    pub fn interior_mask(&self, margin: usize) -> Mask {
        let mu = if self.topology.periodic_u() { 0 } else { margin };
        let mv = if self.topology.periodic_v() { 0 } else { margin };
        self.sample_index(|i, j| {
            i >= mu && i + mu < self.nu && j >= mv && j + mv < self.nv
        })
    }

    pub fn sample_index<T>(&self, f: impl Fn(usize, usize) -> T) -> Field<T> {
        let mut values = Vec::with_capacity(self.len());
        for j in 0..self.nv {
            for i in 0..self.nu {
                values.push(f(i, j));
            }
        }
        Field { nu: self.nu, nv: self.nv, values }
    }

    pub fn check<T>(&self, f: &Field<T>) -> Result<()> {
        if f.shape() != self.shape() {
            return Err(Error::ShapeMismatch { expected: self.shape(), got: f.shape() });
        }
        Ok(())
    }
}

fn parse_real(s: &str) -> Option<f64> {
    match s {
        "pi" => Some(std::f64::consts::PI),
        "2pi" => Some(2.0 * std::f64::consts::PI),
        "-pi" => Some(-std::f64::consts::PI),
        _ => s.parse().ok(),
    }
}

/// Values on the grid of a [`Chart`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    pub nu: usize,
    pub nv: usize,
    pub values: Vec<T>,
}

pub type Mask = Field<bool>;

impl<T> Field<T> {
    pub fn from_values(chart: &Chart, values: Vec<T>) -> Result<Self> {
        if values.len() != chart.len() {
            return Err(Error::ShapeMismatch {
                expected: chart.shape(),
                got: (values.len(), 1),
            });
        }
        Ok(Field { nu: chart.nu, nv: chart.nv, values })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nu, self.nv)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.values.iter()
    }

    pub fn map<S>(&self, f: impl Fn(&T) -> S) -> Field<S> {
        Field { nu: self.nu, nv: self.nv, values: self.values.iter().map(f).collect() }
    }

    pub fn map_indexed<S>(&self, f: impl Fn(usize, &T) -> S) -> Field<S> {
        Field {
            nu: self.nu,
            nv: self.nv,
            values: self.values.iter().enumerate().map(|(k, x)| f(k, x)).collect(),
        }
    }

    pub fn zip_map<R, S>(&self, other: &Field<R>, f: impl Fn(&T, &R) -> S) -> Field<S> {
        assert_eq!(self.shape(), other.shape(), "field shapes differ");
        Field {
            nu: self.nu,
            nv: self.nv,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl<T> std::ops::Index<usize> for Field<T> {
    type Output = T;
    fn index(&self, k: usize) -> &T {
        &self.values[k]
    }
}

impl<T> std::ops::IndexMut<usize> for Field<T> {
    fn index_mut(&mut self, k: usize) -> &mut T {
        &mut self.values[k]
    }
}

impl Mask {
    pub fn and(&self, other: &Mask) -> Mask {
        self.zip_map(other, |a, b| *a && *b)
    }

    pub fn count(&self) -> usize {
        self.values.iter().filter(|b| **b).count()
    }
}

/// Values that finite-difference stencils can combine.
pub trait Stencil: Clone {
    /// `a·x + b·y`.
    fn axpby(a: f64, x: &Self, b: f64, y: &Self) -> Self;
    /// Largest absolute entry; the pointwise norm of residual reports.
    fn max_abs(&self) -> f64;
}

/// Complex-valued stencil values, on which the Wirtinger operators act.
pub trait ComplexStencil: Stencil {
    fn scale_c(&self, c: C64) -> Self;
    fn conj(&self) -> Self;
}

impl Stencil for f64 {
    fn axpby(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        a * x + b * y
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
}

impl Stencil for C64 {
    fn axpby(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        x * a + y * b
    }
    fn max_abs(&self) -> f64 {
        self.norm()
    }
}

impl ComplexStencil for C64 {
    fn scale_c(&self, c: C64) -> Self {
        self * c
    }
    fn conj(&self) -> Self {
        C64::conj(self)
    }
}

impl Stencil for DVector<f64> {
    fn axpby(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        x * a + y * b
    }
    fn max_abs(&self) -> f64 {
        self.amax()
    }
}

impl Stencil for DMatrix<f64> {
    fn axpby(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        x * a + y * b
    }
    fn max_abs(&self) -> f64 {
        self.amax()
    }
}

impl Stencil for DVector<C64> {
    fn axpby(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        x.map(|e| e * a) + y.map(|e| e * b)
    }
    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, e| m.max(e.norm()))
    }
}

impl ComplexStencil for DVector<C64> {
    fn scale_c(&self, c: C64) -> Self {
        self.map(|e| e * c)
    }
    fn conj(&self) -> Self {
        self.map(|e| e.conj())
    }
}

impl Stencil for DMatrix<C64> {
    fn axpby(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        x.map(|e| e * a) + y.map(|e| e * b)
    }
    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, e| m.max(e.norm()))
    }
}

impl ComplexStencil for DMatrix<C64> {
    fn scale_c(&self, c: C64) -> Self {
        self.map(|e| e * c)
    }
    fn conj(&self) -> Self {
        self.map(|e| e.conj())
    }
}

fn combo3<T: Stencil>(c: [f64; 3], x: [&T; 3]) -> T {
    let t = T::axpby(c[0], x[0], c[1], x[1]);
    T::axpby(1.0, &t, c[2], x[2])
}

fn combo4<T: Stencil>(c: [f64; 4], x: [&T; 4]) -> T {
    let t = T::axpby(c[0], x[0], c[1], x[1]);
    let t = T::axpby(1.0, &t, c[2], x[2]);
    T::axpby(1.0, &t, c[3], x[3])
}

#[derive(Clone, Copy)]
enum Axis {
    U,
    V,
}

fn first_along<T: Stencil>(f: &Field<T>, c: &Chart, axis: Axis) -> Field<T> {
    let (n, h, periodic) = match axis {
        Axis::U => (c.nu, c.hu(), c.topology.periodic_u()),
        Axis::V => (c.nv, c.hv(), c.topology.periodic_v()),
    };
    let at = |i: usize, j: usize, s: usize| -> &T {
        match axis {
            Axis::U => &f.values[c.idx(s, j)],
            Axis::V => &f.values[c.idx(i, s)],
        }
    };
    c.sample_index(|i, j| {
        let s = match axis {
            Axis::U => i,
            Axis::V => j,
        };
        let inv = 1.0 / (2.0 * h);
        if periodic || (s > 0 && s + 1 < n) {
            let p = (s + 1) % n;
            let m = (s + n - 1) % n;
            T::axpby(inv, at(i, j, p), -inv, at(i, j, m))
        } else if s == 0 {
            combo3([-3.0 * inv, 4.0 * inv, -inv], [at(i, j, 0), at(i, j, 1), at(i, j, 2)])
        } else {
            combo3(
                [3.0 * inv, -4.0 * inv, inv],
                [at(i, j, n - 1), at(i, j, n - 2), at(i, j, n - 3)],
            )
        }
    })
}

fn second_along<T: Stencil>(f: &Field<T>, c: &Chart, axis: Axis) -> Field<T> {
    let (n, h, periodic) = match axis {
        Axis::U => (c.nu, c.hu(), c.topology.periodic_u()),
        Axis::V => (c.nv, c.hv(), c.topology.periodic_v()),
    };
    let at = |i: usize, j: usize, s: usize| -> &T {
        match axis {
            Axis::U => &f.values[c.idx(s, j)],
            Axis::V => &f.values[c.idx(i, s)],
        }
    };
    let inv = 1.0 / (h * h);
    c.sample_index(|i, j| {
        let s = match axis {
            Axis::U => i,
            Axis::V => j,
        };
        if periodic || (s > 0 && s + 1 < n) {
            let p = (s + 1) % n;
            let m = (s + n - 1) % n;
            combo3([inv, -2.0 * inv, inv], [at(i, j, p), at(i, j, s), at(i, j, m)])
        } else if s == 0 {
            combo4(
                [2.0 * inv, -5.0 * inv, 4.0 * inv, -inv],
                [at(i, j, 0), at(i, j, 1), at(i, j, 2), at(i, j, 3)],
            )
        } else {
            combo4(
                [2.0 * inv, -5.0 * inv, 4.0 * inv, -inv],
                [at(i, j, n - 1), at(i, j, n - 2), at(i, j, n - 3), at(i, j, n - 4)],
            )
        }
    })
}

pub fn d_u<T: Stencil>(f: &Field<T>, c: &Chart) -> Field<T> {
    first_along(f, c, Axis::U)
}

pub fn d_v<T: Stencil>(f: &Field<T>, c: &Chart) -> Field<T> {
    first_along(f, c, Axis::V)
}

pub fn d_uu<T: Stencil>(f: &Field<T>, c: &Chart) -> Field<T> {
    second_along(f, c, Axis::U)
}

pub fn d_vv<T: Stencil>(f: &Field<T>, c: &Chart) -> Field<T> {
    second_along(f, c, Axis::V)
}

pub fn d_uv<T: Stencil>(f: &Field<T>, c: &Chart) -> Field<T> {
    d_v(&d_u(f, c), c)
}

fn wirtinger<T: ComplexStencil>(f: &Field<T>, c: &Chart, sign: f64) -> Field<T> {
    let fu = d_u(f, c);
    let fv = d_v(f, c);
    let w = I * (0.5 * sign);
    fu.zip_map(&fv, |a, b| T::axpby(0.5, a, 1.0, &b.scale_c(w)))
}

/// `∂_z f = ½(f_u − i f_v)`.
pub fn d_z<T: ComplexStencil>(f: &Field<T>, c: &Chart) -> Field<T> {
    wirtinger(f, c, -1.0)
}

/// `∂_z̄ f = ½(f_u + i f_v)`.
pub fn d_zbar<T: ComplexStencil>(f: &Field<T>, c: &Chart) -> Field<T> {
    wirtinger(f, c, 1.0)
}

/// `∂_z∂_z f = ¼(f_uu − f_vv − 2i f_uv)` with three-point second differences.
pub fn d_zz<T: ComplexStencil>(f: &Field<T>, c: &Chart) -> Field<T> {
    let fuu = d_uu(f, c);
    let fvv = d_vv(f, c);
    let fuv = d_uv(f, c);
    c.sample_index(|i, j| {
        let k = c.idx(i, j);
        let t = T::axpby(0.25, &fuu.values[k], -0.25, &fvv.values[k]);
        T::axpby(1.0, &t, 1.0, &fuv.values[k].scale_c(C64::new(0.0, -0.5)))
    })
}

/// `∂_z∂_z̄ f = ¼(f_uu + f_vv)`.
pub fn d_zzbar<T: Stencil>(f: &Field<T>, c: &Chart) -> Field<T> {
    let fuu = d_uu(f, c);
    let fvv = d_vv(f, c);
    fuu.zip_map(&fvv, |a, b| T::axpby(0.25, a, 0.25, b))
}

/// Complex orientation of the working coordinate: `z` itself, or `w = z̄`.
///
/// Passing to `w = z̄` reverses the orientation of the chart without
/// resampling; `∂_w` is then `∂_z̄` on the same grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    Same,
    Conjugate,
}

impl Orientation {
    pub fn d<T: ComplexStencil>(self, f: &Field<T>, c: &Chart) -> Field<T> {
        match self {
            Orientation::Same => d_z(f, c),
            Orientation::Conjugate => d_zbar(f, c),
        }
    }

    pub fn d_bar<T: ComplexStencil>(self, f: &Field<T>, c: &Chart) -> Field<T> {
        match self {
            Orientation::Same => d_zbar(f, c),
            Orientation::Conjugate => d_z(f, c),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Orientation::Same => Orientation::Conjugate,
            Orientation::Conjugate => Orientation::Same,
        }
    }
}

/// Quadrature weights: trapezoidal on open axes, rectangle rule on periodic ones.
fn weights(n: usize, h: f64, periodic: bool) -> Vec<f64> {
    (0..n)
        .map(|i| if !periodic && (i == 0 || i + 1 == n) { 0.5 * h } else { h })
        .collect()
}

/// `∫ f du dv` over the chart.
pub fn integrate<T>(f: &Field<T>, c: &Chart) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    let wu = weights(c.nu, c.hu(), c.topology.periodic_u());
    let wv = weights(c.nv, c.hv(), c.topology.periodic_v());
    let mut acc = T::default();
    for (j, &w) in wv.iter().enumerate() {
        let mut row = T::default();
        for (i, &x) in wu.iter().enumerate() {
            row = row + f.values[c.idx(i, j)] * x;
        }
        acc = acc + row * w;
    }
    acc
}

/// Sup- and L²-norm of a residual field over a mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub sup: f64,
    pub l2: f64,
}

impl Norms {
    pub fn max(self, other: Norms) -> Norms {
        Norms { sup: self.sup.max(other.sup), l2: self.l2.max(other.l2) }
    }
}

/// Norms of the pointwise `max_abs` of a field, restricted to `mask`.
///
/// The L² norm is the root mean square over the masked points.
pub fn norms<T: Stencil>(f: &Field<T>, mask: &Mask) -> Norms {
    let mut sup = 0.0f64;
    let mut sq = 0.0;
    let mut count = 0usize;
    for (x, keep) in f.values.iter().zip(&mask.values) {
        if *keep {
            let a = x.max_abs();
            sup = sup.max(a);
            sq += a * a;
            count += 1;
        }
    }
    let l2 = if count == 0 { 0.0 } else { (sq / count as f64).sqrt() };
    Norms { sup, l2 }
}

/// `log2(coarse/fine)`, the observed order for a halved spacing.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Points where the Hopf differential is numerically zero.
///
/// `ε_umb = rel · max_p Σ|k_j|²`.
pub fn umbilic_mask(k_squared: &Field<f64>, rel: f64) -> Mask {
    let max = k_squared.values.iter().cloned().fold(0.0, f64::max);
    let eps = rel * max;
    k_squared.map(|k| *k < eps)
}

/// Default relative umbilic threshold.
pub const UMBILIC_REL: f64 = 1e-8;

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square(n: usize) -> Chart {
        Chart::new(n, n, (0.0, 1.0), (0.0, 1.0), Topology::Open).unwrap()
    }

    fn max_err(f: &Field<C64>, g: impl Fn(C64) -> C64, c: &Chart) -> f64 {
        f.values
            .iter()
            .enumerate()
            .map(|(k, x)| (x - g(c.z(k))).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn spacing_conventions() {
        let open = Chart::new(11, 5, (0.0, 1.0), (0.0, 2.0), Topology::Open).unwrap();
        assert!((open.hu() - 0.1).abs() < 1e-15);
        assert!((open.hv() - 0.5).abs() < 1e-15);
        let per = Chart::new(10, 8, (0.0, 1.0), (0.0, 2.0), Topology::PeriodicBoth).unwrap();
        assert!((per.hu() - 0.1).abs() < 1e-15);
        assert!((per.hv() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(Chart::new(4, 10, (0.0, 1.0), (0.0, 1.0), Topology::Open).is_err());
        assert!(Chart::new(10, 10, (1.0, 1.0), (0.0, 1.0), Topology::Open).is_err());
    }

    #[test]
    fn parse_chart_flag() {
        let c = Chart::parse("64,32,0,2pi,-1,1,periodic-u").unwrap();
        assert_eq!(c.shape(), (64, 32));
        assert_eq!(c.topology, Topology::PeriodicU);
        assert!((c.u1 - 2.0 * PI).abs() < 1e-15);
        assert!(Chart::parse("64,32,0,1").is_err());
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        let c = unit_square(9);
        let f = c.sample(|_, _| C64::new(3.0, -2.0));
        assert!(d_z(&f, &c).values.iter().all(|x| x.norm() < 1e-12));
        assert!(d_zbar(&f, &c).values.iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn linear_field_is_exact() {
        let c = unit_square(9);
        let f = c.sample(C64::new);
        assert!(max_err(&d_z(&f, &c), |_| C64::new(1.0, 0.0), &c) < 1e-12);
        assert!(max_err(&d_zbar(&f, &c), |_| C64::new(0.0, 0.0), &c) < 1e-12);
    }

    #[test]
    fn z_cubed_converges_at_second_order() {
        // f = z³, ∂_z f = 3z².
        let c = unit_square(64);
        let e1 = max_err(&d_z(&c.sample(|u, v| C64::new(u, v).powi(3)), &c), |z| 3.0 * z * z, &c);
        let c2 = c.refined();
        let e2 = max_err(&d_z(&c2.sample(|u, v| C64::new(u, v).powi(3)), &c2), |z| 3.0 * z * z, &c2);
        let order = observed_order(e1, e2);
        assert!(e1 <= 2.0 * c.h() * c.h(), "e1 = {e1}");
        assert!((1.9..=2.1).contains(&order), "order {order}");
    }

    #[test]
    fn conjugation_identity_is_exact() {
        let c = Chart::new(12, 9, (0.0, 1.0), (-1.0, 0.5), Topology::PeriodicU).unwrap();
        let f = c.sample(|u, v| C64::new((3.0 * u).sin() * v, u * u - v.cos()));
        let lhs = d_zbar(&f.map(|x| x.conj()), &c);
        let rhs = d_z(&f, &c).map(|x| x.conj());
        for (a, b) in lhs.values.iter().zip(&rhs.values) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn wirtinger_operators_commute_to_second_order() {
        let errs: Vec<f64> = [32usize, 64]
            .iter()
            .map(|&n| {
                let c = Chart::new(n, n, (0.0, 2.0 * PI), (0.0, 2.0 * PI), Topology::PeriodicBoth).unwrap();
                let f = c.sample(|u, v| C64::new(u.sin() * (2.0 * v).cos(), (u + v).cos()));
                let a = d_z(&d_zbar(&f, &c), &c);
                let b = d_zbar(&d_z(&f, &c), &c);
                a.zip_map(&b, |x, y| (x - y).norm()).values.into_iter().fold(0.0, f64::max)
            })
            .collect();
        // Both orders use the same linear stencils along independent axes.
        assert!(errs[0] < 1e-10 && errs[1] < 1e-10, "{errs:?}");
    }

    #[test]
    fn second_difference_halves_error_by_four() {
        let errs: Vec<f64> = [40usize, 80]
            .iter()
            .map(|&n| {
                let c = Chart::new(n, n, (0.0, 2.0 * PI), (0.0, 1.0), Topology::PeriodicU).unwrap();
                let f = c.sample(|u, v| u.sin() * v * v);
                let g = d_uu(&f, &c);
                g.values
                    .iter()
                    .enumerate()
                    .map(|(k, x)| {
                        let (i, j) = c.coords(k);
                        (x + c.u(i).sin() * c.v(j).powi(2)).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        let ratio = errs[0] / errs[1];
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn quadrature_examples() {
        let c = unit_square(33);
        assert!((integrate(&c.sample(|_, _| 1.0), &c) - 1.0).abs() < 1e-14);

        let p = Chart::new(40, 8, (0.0, 2.0 * PI), (0.0, 1.0), Topology::PeriodicU).unwrap();
        assert!(integrate(&p.sample(|u, _| u.sin()), &p).abs() < 1e-12);

        let e = (integrate(&c.sample(|u, v| u * v), &c) - 0.25).abs();
        assert!(e <= c.h() * c.h(), "{e}");
    }

    #[test]
    fn interior_mask_respects_periodicity() {
        let c = Chart::new(10, 10, (0.0, 1.0), (0.0, 1.0), Topology::PeriodicU).unwrap();
        let m = c.interior_mask(2);
        assert_eq!(m.count(), 10 * 6);
    }

    #[test]
    fn umbilic_mask_flags_small_values() {
        let c = unit_square(5);
        let k2 = c.sample(|u, _| u);
        let m = umbilic_mask(&k2, 0.3);
        assert_eq!(m.count(), 5 * 2);
    }
}
