//! Command-line driver: argument parsing, run configuration and JSON reports.

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chart::{observed_order, Chart, Topology};
use crate::gauss_frame::{b_operator_checks, build_frame, maurer_cartan, s_willmore_rank_default, willmore_energy, willmore_residual, FrameField};
use crate::harmonic::{default_lambdas, harmonic_residuals, lambda_sweep, strong_conformal_check};
use crate::reconstruct::{build_y_mu, classify, dual_surface, project_y0, stereographic, verify_gauss_match, Case, MatchOrientation, SphereMap};
use crate::surface::{frame_conditions, integrability_residuals, structure_residuals, SurfaceData, VecField};
use crate::zoo::{self, SurfaceKind};
use crate::{Error, Result, C64};

/// Exit code when every check passes.
pub const EXIT_OK: i32 = 0;
/// Exit code when a verification check fails.
pub const EXIT_FAIL: i32 = 2;
/// Exit code for configuration and precondition errors.
pub const EXIT_ERROR: i32 = 3;

/// Default `C` in the `C·(h/L)²` tolerance of residual checks, `L` the chart extent.
pub const DEFAULT_TOL: f64 = 200.0;
/// Default grid size per axis for built-in surfaces.
pub const DEFAULT_POINTS: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "willmore-lab", version, about = "Conformal Gauss maps, Willmore checks and reconstruction on sampled surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariants, Willmore energy and all structure residuals of a surface.
    Analyze(RunArgs),
    /// Flatness of the associated family and the harmonic block equations.
    VerifyHarmonic(RunArgs),
    /// Normalize, classify and recover the surface a frame comes from.
    Reconstruct(RunArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags; a `--config` JSON file may set any of them, and flags win.
#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct RunArgs {
    /// Built-in surface, e.g. clifford-torus, torus-of-revolution:3, enneper,
    /// or a synthetic frame: synthetic-reduced, synthetic-rank2.
    #[arg(long)]
    pub surface: Option<String>,
    /// CSV or JSON grid file of light-cone samples.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// `Nu,Nv,u0,u1,v0,v1,topology`.
    #[arg(long)]
    pub chart: Option<String>,
    /// Coefficient `C` of the `C·h²` residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of spectral parameters on the unit circle.
    #[arg(long)]
    pub lambda_samples: Option<usize>,
    /// Number of grid levels for convergence tables (at least 2).
    #[arg(long)]
    pub refine: Option<usize>,
    /// Report path (json) or field dump path (csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl RunArgs {
    /// Flags override the config file.
    pub fn merged(self) -> Result<RunArgs> {
        let Some(path) = &self.config else { return Ok(self) };
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let file: RunArgs = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok(RunArgs {
            surface: self.surface.or(file.surface),
            input: self.input.or(file.input),
            chart: self.chart.or(file.chart),
            tol: self.tol.or(file.tol),
            lambda_samples: self.lambda_samples.or(file.lambda_samples),
            refine: self.refine.or(file.refine),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            config: self.config,
        })
    }
}

/// Frames that do not come from a surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticFrame {
    Reduced,
    Rank2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Surface(SurfaceKind),
    Synthetic(SyntheticFrame),
    File(PathBuf),
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "synthetic-reduced" => Ok(Source::Synthetic(SyntheticFrame::Reduced)),
            "synthetic-rank2" => Ok(Source::Synthetic(SyntheticFrame::Rank2)),
            _ => Ok(Source::Surface(s.parse()?)),
        }
    }
}

/// Validated configuration of one run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub source: Source,
    pub chart: Chart,
    pub tol: f64,
    pub lambdas: Vec<[f64; 2]>,
    pub refine: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_args(args: RunArgs) -> Result<Self> {
        let args = args.merged()?;
        let source = match (&args.surface, &args.input) {
            (Some(_), Some(_)) => return Err(Error::Config("give either --surface or --input, not both".into())),
            (None, None) => return Err(Error::Config("one of --surface or --input is required".into())),
            (Some(s), None) => s.parse()?,
            (None, Some(p)) => {
                if !p.exists() {
                    return Err(Error::Config(format!("input {} does not exist", p.display())));
                }
                Source::File(p.clone())
            }
        };
        let chart = match (&args.chart, &source) {
            (Some(c), _) => Chart::parse(c)?,
            (None, Source::Surface(k)) => k.default_chart(DEFAULT_POINTS)?,
            (None, Source::Synthetic(_)) => Chart::new(41, 41, (-0.8, 0.8), (-0.8, 0.8), Topology::Open)?,
            (None, Source::File(p)) => {
                if p.extension().and_then(|e| e.to_str()) == Some("json") {
                    zoo::load_json(p)?.0
                } else {
                    return Err(Error::Config("a CSV input needs --chart".into()));
                }
            }
        };
        let tol = args.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) {
            return Err(Error::Config(format!("--tol must be positive, got {tol}")));
        }
        let lambdas = match args.lambda_samples {
            None => default_lambdas(),
            Some(0) => return Err(Error::Config("--lambda-samples must be at least 1".into())),
            Some(k) => (0..k).map(|j| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / k as f64)).collect(),
        };
        let refine = args.refine.unwrap_or(2);
        if refine < 2 {
            return Err(Error::Config("--refine needs at least 2 levels".into()));
        }
        Ok(RunConfig {
            source,
            chart,
            tol,
            lambdas: lambdas.iter().map(|l| [l.re, l.im]).collect(),
            refine,
            out: args.out,
            format: args.format.unwrap_or_default(),
        })
    }

    fn lambdas_c(&self) -> Vec<C64> {
        self.lambdas.iter().map(|l| C64::new(l[0], l[1])).collect()
    }
}

/// One PASS/FAIL line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check { name: name.into(), measured, tolerance, pass: measured <= tolerance }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check { name: name.into(), measured, tolerance, pass: measured >= tolerance }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: measured {:.3e}, tolerance {:.3e}", self.name, self.measured, self.tolerance)
    }
}

/// Machine-readable run report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub invariants: Value,
    pub residuals: Vec<Check>,
    pub classification: Option<Value>,
    pub roundtrip: Option<Value>,
    pub verdict: Option<String>,
}

impl Report {
    fn new(command: &str, cfg: &RunConfig) -> Self {
        Report {
            command: command.into(),
            config: cfg.clone(),
            invariants: json!({}),
            residuals: Vec::new(),
            classification: None,
            roundtrip: None,
            verdict: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_FAIL
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.residuals.iter().find(|c| c.name == name)
    }
}

fn load_lift(cfg: &RunConfig, chart: &Chart) -> Result<VecField> {
    match &cfg.source {
        Source::Surface(k) => zoo::generate(*k, chart),
        Source::File(p) => Ok(zoo::load(p, Some(chart))?.1),
        Source::Synthetic(_) => Err(Error::Config("synthetic frames have no surface; use reconstruct or verify-harmonic".into())),
    }
}

fn frame_for(cfg: &RunConfig, chart: &Chart) -> Result<(Option<SurfaceData>, FrameField)> {
    match &cfg.source {
        Source::Synthetic(SyntheticFrame::Reduced) => Ok((None, zoo::synthetic_reduced_frame(chart))),
        Source::Synthetic(SyntheticFrame::Rank2) => Ok((None, zoo::synthetic_rank2_frame(chart))),
        _ => {
            let s = SurfaceData::from_raw(&load_lift(cfg, chart)?, chart)?;
            let f = build_frame(&s);
            Ok((Some(s), f))
        }
    }
}

fn kappa_max(s: &SurfaceData) -> f64 {
    s.k_squared().iter().zip(s.mask.iter()).filter(|(_, m)| **m).map(|(k, _)| k.sqrt()).fold(0.0, f64::max)
}

/// Surface → Gauss frame: invariants, energy and every structure residual.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<Report> {
    let c = &cfg.chart;
    let s = SurfaceData::from_raw(&load_lift(cfg, c)?, c)?;
    let frame = build_frame(&s);
    let blocks = maurer_cartan(&frame);
    let energy = willmore_energy(&s);
    let rank = s_willmore_rank_default(&blocks);
    let tol = cfg.tol * crate::reconstruct::relative_h2(c);
    let mut r = Report::new("analyze", cfg);
    r.invariants = json!({
        "kappa_max": kappa_max(&s),
        "schwarzian_max": s.schwarzian.iter().map(|x| x.norm()).fold(0.0, f64::max),
        "willmore_energy": energy.value,
        "energy_chart_local": energy.chart_local,
        "s_willmore_rank": rank.max_rank,
        "rank_ratio": rank.max_ratio,
        "codim": s.codim(),
    });
    for report in [structure_residuals(&s), integrability_residuals(&s), frame_conditions(&s), b_operator_checks(&frame, &blocks)] {
        for line in report.lines {
            r.residuals.push(Check::at_most(line.name, line.norms.sup, tol));
        }
    }
    let w = crate::chart::norms(&willmore_residual(&s), &s.mask);
    r.residuals.push(Check::at_most("willmore_residual", w.sup, tol));
    if cfg.format == Format::Csv {
        if let Some(out) = &cfg.out {
            zoo::save_csv(out, c, &s.y)?;
        }
    }
    Ok(r)
}

/// Flatness of `α_λ` at each sample, the block equations and strong conformality,
/// with a convergence table over `refine` grid levels.
pub fn cmd_verify_harmonic(cfg: &RunConfig) -> Result<Report> {
    let lambdas = cfg.lambdas_c();
    let mut charts = vec![cfg.chart.clone()];
    while charts.len() < cfg.refine {
        let next = charts.last().expect("non-empty").refined();
        charts.push(next);
    }
    let mut levels = Vec::new();
    for c in &charts {
        let (_, frame) = frame_for(cfg, c)?;
        let blocks = maurer_cartan(&frame);
        let sweep = lambda_sweep(&blocks, &lambdas)?;
        let harm = harmonic_residuals(&blocks);
        let sc = strong_conformal_check(&blocks.b1, &blocks.mask);
        levels.push((c.h(), sweep, harm, sc));
    }
    let c = &cfg.chart;
    let tol = cfg.tol * crate::reconstruct::relative_h2(c);
    let (_, sweep, harm, sc) = &levels[0];
    let mut r = Report::new("verify-harmonic", cfg);
    for l in sweep {
        r.residuals.push(Check::at_most(format!("flatness lambda=({:.4},{:.4})", l.lambda[0], l.lambda[1]), l.norms.sup, tol));
    }
    for line in &harm.lines {
        r.residuals.push(Check::at_most(line.name.clone(), line.norms.sup, tol));
    }
    r.residuals.push(Check::at_most("strong conformality", sc.isotropy, tol));
    let table: Vec<Value> = levels
        .windows(2)
        .map(|w| {
            let orders: Vec<Value> = w[0]
                .1
                .iter()
                .zip(&w[1].1)
                .map(|(a, b)| json!({"lambda": a.lambda, "coarse": a.norms.sup, "fine": b.norms.sup, "order": observed_order(a.norms.sup, b.norms.sup)}))
                .collect();
            json!({"h_coarse": w[0].0, "h_fine": w[1].0, "flatness": orders})
        })
        .collect();
    r.invariants = json!({
        "strong_conformality": {"isotropy": sc.isotropy, "conformality": sc.conformality},
        "convergence": table,
    });
    Ok(r)
}

/// Normalization, classification and recovery of the surface.
pub fn cmd_reconstruct(cfg: &RunConfig) -> Result<Report> {
    let c = &cfg.chart;
    let (surface, frame) = frame_for(cfg, c)?;
    let classified = classify(&frame)?;
    let cl = &classified.classification;
    let nf = &classified.frame;
    let tol = cfg.tol * crate::reconstruct::relative_h2(c);
    let rel_tol = cfg.tol * crate::reconstruct::relative_h2(c);
    let mut r = Report::new("reconstruct", cfg);
    r.classification = Some(serde_json::to_value(cl)?);
    r.verdict = Some(cl.case.verdict().to_string());
    let blocks = maurer_cartan(&frame);
    if let Some(line) = harmonic_residuals(&blocks).get("B1 equation") {
        r.residuals.push(Check::at_most("harmonic: B1 equation", line.sup, tol));
    }
    let sc = strong_conformal_check(&blocks.b1, &blocks.mask);
    r.residuals.push(Check::at_most("strong conformality", sc.isotropy, tol));
    r.residuals.push(Check::at_most("spec-cond", cl.spec_cond, rel_tol));
    r.residuals.push(Check::at_most("canonical shape", nf.canonical.shape_residual, rel_tol));
    let mut recovered: Option<SphereMap> = None;
    match cl.case {
        Case::A1 | Case::A2 => {
            let y = project_y0(nf);
            r.residuals.push(Check::at_most("unit sphere", y.unit_defect(), 1e-12));
            let gm = verify_gauss_match(&y, nf)?;
            r.residuals.push(Check::at_most("gauss map distance", gm.distance, tol));
            let mut rt = json!({"gauss_orientation": gm.orientation});
            if let Some(s) = &surface {
                let d = y.distance(&SphereMap::from_lift(c, &s.y), &nf.blocks.mask);
                r.residuals.push(Check::at_most("round trip distance", d.sup, 1e-6 + tol));
                rt["distance"] = json!(d);
            }
            if cl.case == Case::A2 {
                let dual = dual_surface(nf)?;
                let dm = verify_gauss_match(&dual.map, nf)?;
                r.residuals.push(Check::at_most("duality", dual.duality_residual, rel_tol));
                r.residuals.push(Check {
                    name: "dual orientation opposite".into(),
                    measured: if dm.orientation == MatchOrientation::Opposite { 1.0 } else { 0.0 },
                    tolerance: 1.0,
                    pass: dm.orientation == MatchOrientation::Opposite,
                });
                rt["dual"] = json!({"distance": dm.distance, "orientation": dm.orientation});
            }
            r.roundtrip = Some(rt);
            recovered = Some(y);
        }
        Case::B2i => {
            let mu = classified.mu.as_ref().expect("case b2i carries mu");
            let ym = build_y_mu(nf, mu);
            let x = stereographic(&ym.lift, nf)?;
            r.residuals.push(Check::at_most("<Y_mu_z, Y_mu_z>", ym.isotropy, rel_tol));
            r.residuals.push(Check::at_most("minimal: conformal", x.conformality, rel_tol));
            r.residuals.push(Check::at_most("minimal: harmonic", x.harmonicity, rel_tol));
            let mut rt = json!({"mu_scatter": mu.scatter, "riccati": ym.riccati});
            if let Some(s) = &surface {
                let d = ym.map.distance(&SphereMap::from_lift(c, &s.y), &nf.blocks.mask);
                rt["distance"] = json!(d);
            }
            r.roundtrip = Some(rt);
            recovered = Some(ym.map);
        }
        Case::B1 | Case::B2ii | Case::Ambiguous => {}
    }
    if let (Format::Csv, Some(out), Some(y)) = (cfg.format, &cfg.out, &recovered) {
        y.save_csv(out)?;
    }
    Ok(r)
}

pub fn run(command: &Command) -> Result<Report> {
    match command {
        Command::Analyze(a) => cmd_analyze(&RunConfig::from_args(a.clone())?),
        Command::VerifyHarmonic(a) => cmd_verify_harmonic(&RunConfig::from_args(a.clone())?),
        Command::Reconstruct(a) => cmd_reconstruct(&RunConfig::from_args(a.clone())?),
    }
}

fn emit(report: &Report) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    match (&report.config.out, report.config.format) {
        (Some(path), Format::Json) => std::fs::write(path, text)?,
        _ => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    for c in &report.residuals {
        eprintln!("{c}");
    }
    if let Some(v) = &report.verdict {
        eprintln!("verdict: {v}");
    }
    Ok(())
}

/// Parses `args`, runs the command, writes the report and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.command).and_then(|r| emit(&r).map(|_| r)) {
        Ok(r) => r.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> RunArgs {
        let mut v = vec!["willmore-lab", "analyze"];
        v.extend_from_slice(list);
        match Cli::try_parse_from(v).unwrap().command {
            Command::Analyze(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cfg.json");
        std::fs::write(&p, r#"{"surface": "enneper", "tol": 3.0, "lambda-samples": 6}"#).unwrap();
        let a = args(&["--config", p.to_str().unwrap(), "--tol", "7"]);
        let cfg = RunConfig::from_args(a).unwrap();
        assert_eq!(cfg.source, Source::Surface(SurfaceKind::Enneper));
        assert_eq!(cfg.tol, 7.0);
        assert_eq!(cfg.lambdas.len(), 6);
    }

    #[test]
    fn config_errors_are_reported() {
        assert!(RunConfig::from_args(args(&[])).is_err());
        assert!(RunConfig::from_args(args(&["--surface", "enneper", "--refine", "1"])).is_err());
        assert!(RunConfig::from_args(args(&["--surface", "klein-bottle"])).is_err());
        assert!(RunConfig::from_args(args(&["--input", "/nonexistent.csv"])).is_err());
        assert_eq!(main_with_args(["willmore-lab", "analyze", "--surface", "nope"]), EXIT_ERROR);
    }

    #[test]
    fn round_sphere_has_no_hopf_differential() {
        let cfg = RunConfig::from_args(args(&["--surface", "round-sphere", "--chart", "24,24,-1,1,-1,1,open"])).unwrap();
        let r = cmd_analyze(&cfg).unwrap();
        assert!(r.invariants["kappa_max"].as_f64().unwrap() <= 1e-10);
    }
}
