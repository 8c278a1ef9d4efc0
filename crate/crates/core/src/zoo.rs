//! Closed-form example surfaces, synthetic frames and grid file I/O.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::{Chart, Topology};
use crate::gauss_frame::{CMatField, FrameField, MatField};
use crate::lorentz::{expm, inner_unchecked, wedge_generator};
use crate::surface::{VecField, NULL_TOL};
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SurfaceKind {
    RoundSphere,
    CliffordTorus,
    /// Torus of revolution with tube radius 1 and center-circle radius `ratio`.
    TorusOfRevolution { ratio: f64 },
    Enneper,
    Catenoid,
    Veronese,
}

impl SurfaceKind {
    /// Codimension `n` of the surface in `S^{n+2}`.
    pub fn codim(self) -> usize {
        match self {
            SurfaceKind::Veronese => 2,
            _ => 1,
        }
    }

    pub fn is_willmore(self) -> bool {
        match self {
            SurfaceKind::TorusOfRevolution { ratio } => (ratio - 2f64.sqrt()).abs() < 1e-12,
            _ => true,
        }
    }

    /// The chart each kind is meant to be sampled on, at `n × n` points.
    pub fn default_chart(self, n: usize) -> Result<Chart> {
        let tau = 2.0 * PI;
        match self {
            SurfaceKind::RoundSphere | SurfaceKind::Enneper | SurfaceKind::Veronese => {
                Chart::new(n, n, (-1.0, 1.0), (-1.0, 1.0), Topology::Open)
            }
            SurfaceKind::CliffordTorus => Chart::new(n, n, (0.0, tau), (0.0, tau), Topology::PeriodicBoth),
            SurfaceKind::TorusOfRevolution { ratio } => {
                let period = tau / (ratio * ratio - 1.0).sqrt();
                Chart::new(n, n, (0.0, period), (0.0, tau), Topology::PeriodicBoth)
            }
            SurfaceKind::Catenoid => Chart::new(n, n, (-1.0, 1.0), (0.0, tau), Topology::PeriodicV),
        }
    }

    fn check_chart(self, c: &Chart) -> Result<()> {
        let need = |per_u: bool, per_v: bool| -> Result<()> {
            if (per_u && !c.topology.periodic_u()) || (per_v && !c.topology.periodic_v()) {
                return Err(Error::InvalidChart(format!("{self} requires a periodic chart, got {:?}", c.topology)));
            }
            Ok(())
        };
        match self {
            SurfaceKind::CliffordTorus | SurfaceKind::TorusOfRevolution { .. } => need(true, true)?,
            SurfaceKind::Catenoid => {}
            _ => {
                if c.topology != Topology::Open {
                    return Err(Error::InvalidChart(format!("{self} is sampled on an open chart")));
                }
            }
        }
        if let SurfaceKind::TorusOfRevolution { ratio } = self {
            if !(ratio > 1.0) {
                return Err(Error::InvalidChart(format!("torus ratio must exceed 1, got {ratio}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceKind::RoundSphere => write!(f, "round-sphere"),
            SurfaceKind::CliffordTorus => write!(f, "clifford-torus"),
            SurfaceKind::TorusOfRevolution { ratio } => write!(f, "torus-of-revolution:{ratio}"),
            SurfaceKind::Enneper => write!(f, "enneper"),
            SurfaceKind::Catenoid => write!(f, "catenoid"),
            SurfaceKind::Veronese => write!(f, "veronese"),
        }
    }
}

impl FromStr for SurfaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let kind = match name.replace('_', "-").as_str() {
            "round-sphere" | "sphere" => SurfaceKind::RoundSphere,
            "clifford-torus" | "clifford" => SurfaceKind::CliffordTorus,
            "torus-of-revolution" | "torus" => {
                let ratio = arg
                    .unwrap_or("3")
                    .parse()
                    .map_err(|_| Error::Config(format!("bad torus ratio in {s:?}")))?;
                SurfaceKind::TorusOfRevolution { ratio }
            }
            "enneper" => SurfaceKind::Enneper,
            "catenoid" => SurfaceKind::Catenoid,
            "veronese" | "veronese-s4" => SurfaceKind::Veronese,
            _ => return Err(Error::Config(format!("unknown surface {s:?}"))),
        };
        Ok(kind)
    }
}

/// Inverse stereographic lift `((1+|x|²)/2, x, (1−|x|²)/2)` of a point of `R^{n+2}`.
pub fn inv_stereo(x: &[f64]) -> DVector<f64> {
    let r2: f64 = x.iter().map(|a| a * a).sum();
    let mut y = DVector::zeros(x.len() + 2);
    y[0] = 0.5 * (1.0 + r2);
    for (k, a) in x.iter().enumerate() {
        y[k + 1] = *a;
    }
    y[x.len() + 1] = 0.5 * (1.0 - r2);
    y
}

/// Lift `(1, p)` of a point of the unit sphere.
pub fn sphere_lift(p: &[f64]) -> DVector<f64> {
    let mut y = DVector::zeros(p.len() + 1);
    y[0] = 1.0;
    for (k, a) in p.iter().enumerate() {
        y[k + 1] = *a;
    }
    y
}

/// Inverse stereographic map `R² → S²`.
fn s2(u: f64, v: f64) -> [f64; 3] {
    let d = 1.0 + u * u + v * v;
    [2.0 * u / d, 2.0 * v / d, (u * u + v * v - 1.0) / d]
}

pub fn enneper(u: f64, v: f64) -> [f64; 3] {
    [u - u * u * u / 3.0 + u * v * v, -v + v * v * v / 3.0 - u * u * v, u * u - v * v]
}

pub fn catenoid(u: f64, v: f64) -> [f64; 3] {
    [u.cosh() * v.cos(), u.cosh() * v.sin(), u]
}

/// Conformal coordinates on the torus of revolution with radii `ratio` and 1.
pub fn torus_of_revolution(ratio: f64, u: f64, v: f64) -> [f64; 3] {
    let w = u * (ratio * ratio - 1.0).sqrt();
    let theta = 2.0 * (((ratio + 1.0) / (ratio - 1.0)).sqrt() * (w / 2.0).sin()).atan2((w / 2.0).cos());
    let rho = ratio + theta.cos();
    [rho * v.cos(), rho * v.sin(), theta.sin()]
}

/// Veronese map `S² → S⁴`.
pub fn veronese(p: [f64; 3]) -> [f64; 5] {
    let [x, y, w] = p;
    let r3 = 3f64.sqrt();
    [r3 * y * w, r3 * x * w, r3 * x * y, 0.5 * r3 * (x * x - y * y), 0.5 * (3.0 * w * w - 1.0)]
}

/// Light-cone samples of a zoo surface.
pub fn generate(kind: SurfaceKind, c: &Chart) -> Result<VecField> {
    kind.check_chart(c)?;
    let r = 0.5f64.sqrt();
    Ok(match kind {
        SurfaceKind::RoundSphere => c.sample(|u, v| {
            let p = s2(u, v);
            sphere_lift(&[p[0], p[1], p[2], 0.0])
        }),
        SurfaceKind::CliffordTorus => c.sample(|u, v| sphere_lift(&[r * u.cos(), r * u.sin(), r * v.cos(), r * v.sin()])),
        SurfaceKind::TorusOfRevolution { ratio } => c.sample(|u, v| inv_stereo(&torus_of_revolution(ratio, u, v))),
        SurfaceKind::Enneper => c.sample(|u, v| inv_stereo(&enneper(u, v))),
        SurfaceKind::Catenoid => c.sample(|u, v| inv_stereo(&catenoid(u, v))),
        SurfaceKind::Veronese => c.sample(|u, v| sphere_lift(&veronese(s2(u, v)))),
    })
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Orthonormal tangent frame and unit normal of Enneper's surface.
fn enneper_frame(u: f64, v: f64) -> [[f64; 3]; 3] {
    let xu = [1.0 - u * u + v * v, -2.0 * u * v, 2.0 * u];
    let xv = [2.0 * u * v, -1.0 + v * v - u * u, -2.0 * v];
    let e1 = unit(xu);
    let e2 = unit(xv);
    [e1, e2, cross(e1, e2)]
}

/// A frame reduced to `SO(n+2)`: `(e_t, −e_last, e1, e2, ψ…)` with the
/// Enneper tangent frame in `R³` and, for `n = 2`, the constant `ψ₂ = e₄`,
/// followed by the null rotation fixing `(e_t + e_last)/√2` that translates
/// by `shift(u, v)` along `e₄`.
fn translated_enneper_frame(c: &Chart, n: usize, shift: impl Fn(f64, f64) -> f64) -> FrameField {
    let m = n + 4;
    let last = m - 1;
    let frames = c.sample(|u, v| {
        let [e1, e2, nu] = enneper_frame(u, v);
        let mut f = DMatrix::zeros(m, m);
        f[(0, 0)] = 1.0;
        f[(last, 1)] = -1.0;
        for a in 0..3 {
            f[(a + 1, 2)] = e1[a];
            f[(a + 1, 3)] = e2[a];
            f[(a + 1, 4)] = nu[a];
        }
        if n == 2 {
            f[(4, 5)] = 1.0;
        }
        if f.determinant() < 0.0 {
            f.column_mut(4).neg_mut();
        }
        let s = shift(u, v);
        if s != 0.0 {
            null_translation(m, 4, s) * f
        } else {
            f
        }
    });
    FrameField { chart: c.clone(), frames, mask: c.interior_mask(crate::surface::RESIDUAL_MARGIN / 2) }
}

/// `exp(N)` with `N x = ⟨x, Y₀⟩ s e_a − ⟨x, s e_a⟩ Y₀`, `Y₀ = (e_t + e_last)/√2`:
/// the Möbius translation by `s e_a` fixing the point at infinity.
pub fn null_translation(m: usize, a: usize, s: f64) -> DMatrix<f64> {
    let r = 0.5f64.sqrt();
    let mut y0 = DVector::zeros(m);
    y0[0] = r;
    y0[m - 1] = r;
    let mut w = DVector::zeros(m);
    w[a] = s;
    let g = crate::lorentz::metric(m);
    // N = w (g y0)ᵀ − y0 (g w)ᵀ
    let n = &w * (&g * &y0).transpose() - &y0 * (&g * &w).transpose();
    expm(&n)
}

/// Synthetic harmonic frame into `SO(n+2)/SO(2)×SO(n)`: case (b)(2)(ii).
pub fn synthetic_reduced_frame(c: &Chart) -> FrameField {
    translated_enneper_frame(c, 1, |_, _| 0.0)
}

/// Synthetic strongly conformally harmonic frame with max rank 2 that
/// contains the constant lightlike vector `(e_t + e_last)/√2`: case (b)(1).
pub fn synthetic_rank2_frame(c: &Chart) -> FrameField {
    translated_enneper_frame(c, 2, |u, _| u)
}

/// Smooth random element field of `exp(so(1, m−1))`, built from sums of
/// low-frequency trigonometric coefficients; periodic charts stay periodic.
pub fn random_lorentz_field(c: &Chart, m: usize, seed: u64, amplitude: f64) -> MatField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens: Vec<DMatrix<f64>> = (0..m).flat_map(|a| ((a + 1)..m).map(move |b| (a, b))).map(|(a, b)| wedge_generator(m, a, b)).collect();
    let coefs: Vec<[f64; 5]> = gens.iter().map(|_| [rng.random_range(-1.0..1.0), rng.random_range(0..3) as f64, rng.random_range(0..3) as f64, rng.random_range(0.0..2.0 * PI), rng.random_range(-1.0..1.0)]).collect();
    let su = 2.0 * PI / (c.u1 - c.u0);
    let sv = 2.0 * PI / (c.v1 - c.v0);
    c.sample(|u, v| {
        let mut x = DMatrix::zeros(m, m);
        for (g, k) in gens.iter().zip(&coefs) {
            let f = k[0] * (k[1] * su * (u - c.u0) + k[2] * sv * (v - c.v0) + k[3]).sin() + 0.5 * k[4];
            x += g * (amplitude * f);
        }
        expm(&x)
    })
}

/// Smooth random gauge `diag(G1, G2)` with `G1 ∈ SO⁺(1,3)`, `G2 ∈ SO(n)`.
pub fn random_gauge(c: &Chart, n: usize, seed: u64, amplitude: f64) -> MatField {
    let g1 = random_lorentz_field(c, 4, seed, amplitude);
    let g2 = if n > 1 {
        // rotations of the normal block: drop the time direction of a Lorentz field on R^{n+1}
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
        let k: Vec<(usize, usize, f64, f64)> = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).map(|(a, b)| (a, b, rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI))).collect();
        let su = 2.0 * PI / (c.u1 - c.u0);
        let sv = 2.0 * PI / (c.v1 - c.v0);
        c.sample(|u, v| {
            let mut x = DMatrix::zeros(n, n);
            for (a, b, s, p) in &k {
                let t = amplitude * s * (su * (u - c.u0) + sv * (v - c.v0) + p).sin();
                x[(*a, *b)] -= t;
                x[(*b, *a)] += t;
            }
            expm(&x)
        })
    } else {
        c.sample(|_, _| DMatrix::identity(n, n))
    };
    g1.zip_map(&g2, |a, b| {
        let mut g = DMatrix::zeros(4 + n, 4 + n);
        g.view_mut((0, 0), (4, 4)).copy_from(a);
        g.view_mut((4, 4), (n, n)).copy_from(b);
        g
    })
}

/// A random `4×n` complex field, generically far from null.
pub fn random_b1(c: &Chart, n: usize, seed: u64) -> CMatField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: Vec<C64> = (0..4 * n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let slope: Vec<C64> = (0..4 * n).map(|_| C64::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3))).collect();
    c.sample(|u, v| DMatrix::from_fn(4, n, |r, j| base[r * n + j] + slope[r * n + j] * C64::new(u, v)))
}

/// Grid file with a chart and one lift per point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridFile {
    pub chart: Chart,
    pub values: Vec<Vec<f64>>,
}

/// Writes `u,v,Y0,…` rows; `f64` display is shortest round-trip, so loading is bit-exact.
pub fn save_csv(path: &Path, c: &Chart, f: &VecField) -> Result<()> {
    c.check(f)?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let m = f[0].len();
    let header: Vec<String> = ["u".to_string(), "v".to_string()].into_iter().chain((0..m).map(|k| format!("Y{k}"))).collect();
    writeln!(out, "{}", header.join(","))?;
    for (k, y) in f.iter().enumerate() {
        let (i, j) = c.coords(k);
        let mut row = vec![c.u(i).to_string(), c.v(j).to_string()];
        row.extend(y.iter().map(|x| x.to_string()));
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_json(path: &Path, c: &Chart, f: &VecField) -> Result<()> {
    c.check(f)?;
    let file = GridFile { chart: c.clone(), values: f.iter().map(|y| y.iter().cloned().collect()).collect() };
    let out = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(out, &file)?;
    Ok(())
}

/// Loads a CSV grid sampled on `c`, checking coordinates and lightlikeness row by row.
pub fn load_csv(path: &Path, c: &Chart) -> Result<VecField> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut lines = file.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))??;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 7 || cols[0] != "u" || cols[1] != "v" || cols[2..].iter().enumerate().any(|(k, h)| *h != format!("Y{k}")) {
        return Err(Error::Parse(format!("bad header {header:?}")));
    }
    let m = cols.len() - 2;
    let mut values = Vec::with_capacity(c.len());
    for (row, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let nums: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("row {row}: {e}")))?;
        if nums.len() != m + 2 {
            return Err(Error::Parse(format!("row {row}: expected {} fields, got {}", m + 2, nums.len())));
        }
        if row >= c.len() {
            return Err(Error::Parse(format!("more rows than the {}x{} chart", c.nu, c.nv)));
        }
        let (i, j) = c.coords(row);
        let tol = 1e-9 * (1.0 + c.u(i).abs().max(c.v(j).abs()));
        if (nums[0] - c.u(i)).abs() > tol || (nums[1] - c.v(j)).abs() > tol {
            return Err(Error::Parse(format!("row {row}: coordinates ({}, {}) do not match the chart", nums[0], nums[1])));
        }
        values.push(validate_row(row, DVector::from_column_slice(&nums[2..]))?);
    }
    crate::chart::Field::from_values(c, values)
}

/// Loads a JSON grid; the chart stored in the file is returned with the field.
pub fn load_json(path: &Path) -> Result<(Chart, VecField)> {
    let file: GridFile = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
    let c = Chart::new(file.chart.nu, file.chart.nv, (file.chart.u0, file.chart.u1), (file.chart.v0, file.chart.v1), file.chart.topology)?;
    let values = file
        .values
        .into_iter()
        .enumerate()
        .map(|(row, y)| validate_row(row, DVector::from_vec(y)))
        .collect::<Result<Vec<_>>>()?;
    let f = crate::chart::Field::from_values(&c, values)?;
    Ok((c, f))
}

/// Loads by extension; CSV needs the chart, JSON carries its own.
pub fn load(path: &Path, chart: Option<&Chart>) -> Result<(Chart, VecField)> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let (c, f) = load_json(path)?;
            if let Some(want) = chart {
                if want.shape() != c.shape() {
                    return Err(Error::ShapeMismatch { expected: want.shape(), got: c.shape() });
                }
            }
            Ok((c, f))
        }
        _ => {
            let c = chart.ok_or_else(|| Error::Config("a CSV input needs --chart".into()))?;
            Ok((c.clone(), load_csv(path, c)?))
        }
    }
}

fn validate_row(row: usize, y: DVector<f64>) -> Result<DVector<f64>> {
    if y.len() < 5 {
        return Err(Error::Parse(format!("row {row}: a lift needs at least 5 coordinates")));
    }
    let norm = inner_unchecked(y.as_slice(), y.as_slice());
    if y[0] <= 0.0 || norm.abs() > NULL_TOL * y[0] * y[0] {
        return Err(Error::NotLightlike { index: row, norm, time: y[0] });
    }
    Ok(y)
}
