//! Acceptance gate: one PASS/FAIL line per criterion on stdout, nonzero exit on any FAIL.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use nalgebra::{DMatrix, DVector, Matrix2, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use willmore_lab::chart::{norms, observed_order, Chart, Mask, Orientation, Topology};
use willmore_lab::gauss_frame::{build_frame, maurer_cartan, willmore_energy, willmore_residual, CMatField};
use willmore_lab::harmonic::{default_lambdas, extend, flatness_residual, strong_conformal_check};
use willmore_lab::lorentz::{check_group, inner_c};
use willmore_lab::reconstruct::{build_y_mu, classify, dual_surface, normalize, project_y0, stereographic, verify_gauss_match, Case, MatchOrientation, SphereMap};
use willmore_lab::spinor::{canonicalize_b1, det, sl2_to_so13, vec_to_mat};
use willmore_lab::surface::{integrability_residuals, structure_residuals, SurfaceData};
use willmore_lab::zoo::{generate, random_b1, random_lorentz_field, synthetic_rank2_frame, synthetic_reduced_frame, SurfaceKind};
use willmore_lab::C64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

const WILLMORE: [SurfaceKind; 5] = [
    SurfaceKind::RoundSphere,
    SurfaceKind::CliffordTorus,
    SurfaceKind::Catenoid,
    SurfaceKind::Enneper,
    SurfaceKind::Veronese,
];
const CONTROL: SurfaceKind = SurfaceKind::TorusOfRevolution { ratio: 3.0 };

/// Coarse and refined charts with matching physical points.
fn charts(kind: SurfaceKind, n: usize) -> (Chart, Chart) {
    let c = kind.default_chart(n).unwrap();
    let f = c.refined();
    (c, f)
}

/// The same physical region on every grid: the central 60% of open axes.
fn physical_mask(c: &Chart) -> Mask {
    let (uc, vc) = (0.5 * (c.u0 + c.u1), 0.5 * (c.v0 + c.v1));
    let (wu, wv) = (0.3 * (c.u1 - c.u0), 0.3 * (c.v1 - c.v0));
    c.sample(|u, v| (c.topology.periodic_u() || (u - uc).abs() <= wu + 1e-12) && (c.topology.periodic_v() || (v - vc).abs() <= wv + 1e-12))
}

fn surface(kind: SurfaceKind, c: &Chart) -> SurfaceData {
    let mut s = SurfaceData::from_raw(&generate(kind, c).unwrap(), c).unwrap();
    s.mask = s.mask.and(&physical_mask(c));
    s
}

/// `O(h²)` verdict for a pair of measurements: small on the fine grid and
/// either second order or already at rounding level.
fn second_order(coarse: f64, fine: f64, h_fine: f64, c: f64) -> (bool, f64) {
    let order = observed_order(coarse, fine);
    let tiny = fine < 1e-9;
    (fine <= c * h_fine * h_fine && (tiny || order >= 1.7), order)
}

/// Independent oracle for surfaces in `S³ ⊂ R⁴`: `∫(H² − K + 1) dA` with
/// `K = 1 + det II / det I`, from analytic first and second derivatives.
fn clifford_oracle(n: usize) -> f64 {
    let r = 1.0 / SQRT_2;
    let h = 2.0 * PI / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (u, v) = (i as f64 * h, j as f64 * h);
            let xu = [-r * u.sin(), r * u.cos(), 0.0, 0.0];
            let xv = [0.0, 0.0, -r * v.sin(), r * v.cos()];
            let xuu = [-r * u.cos(), -r * u.sin(), 0.0, 0.0];
            let xvv = [0.0, 0.0, -r * v.cos(), -r * v.sin()];
            let xuv = [0.0; 4];
            let nu = [r * u.cos(), r * u.sin(), -r * v.cos(), -r * v.sin()];
            let dot = |a: [f64; 4], b: [f64; 4]| a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>();
            let (e, f, g) = (dot(xu, xu), dot(xu, xv), dot(xv, xv));
            let (l, m, nn) = (dot(xuu, nu), dot(xuv, nu), dot(xvv, nu));
            let det1 = e * g - f * f;
            let mean = (e * nn - 2.0 * f * m + g * l) / (2.0 * det1);
            let k = 1.0 + (l * nn - m * m) / det1;
            sum += (mean * mean - k + 1.0) * det1.sqrt() * h * h;
        }
    }
    sum
}

fn criterion_1() -> Outcome {
    let oracle = clifford_oracle(512);
    let errs: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&n| {
            let c = SurfaceKind::CliffordTorus.default_chart(n).unwrap();
            let s = SurfaceData::from_raw(&generate(SurfaceKind::CliffordTorus, &c).unwrap(), &c).unwrap();
            (willmore_energy(&s).value - oracle).abs() / oracle
        })
        .collect();
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    let ok = errs[2] <= 1e-3 && ratios.iter().all(|r| (3.5..=4.5).contains(r));
    outcome(ok, format!("oracle {oracle:.6} (2pi^2 = {:.6}), rel err at 128 {:.3e} <= 1e-3, ratios {:.3}/{:.3} in [3.5,4.5]", 2.0 * PI * PI, errs[2], ratios[0], ratios[1]))
}

fn criterion_2() -> Outcome {
    let mut worst = String::new();
    let mut ok = true;
    for kind in WILLMORE {
        let (c, f) = charts(kind, 48);
        let (a, b) = (surface(kind, &c), surface(kind, &f));
        let mut ra = structure_residuals(&a);
        ra.lines.extend(integrability_residuals(&a).lines);
        let mut rb = structure_residuals(&b);
        rb.lines.extend(integrability_residuals(&b).lines);
        for (la, lb) in ra.lines.iter().zip(&rb.lines) {
            let (pass, order) = second_order(la.norms.sup, lb.norms.sup, f.h(), 50.0);
            let exact = lb.norms.sup < 1e-9;
            if !pass || !(exact || order <= 2.3) {
                ok = false;
                worst += &format!(" {kind}/{}: {:.2e} order {order:.2};", la.name, lb.norms.sup);
            }
        }
    }
    outcome(ok, format!("structure + integrability lines <= 50 h^2, order in [1.7,2.3] on 5 surfaces at 95x95{worst}"))
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut detail = String::new();
    for kind in WILLMORE {
        let (c, f) = charts(kind, 48);
        let (a, b) = (surface(kind, &c), surface(kind, &f));
        let (wa, wb) = (norms(&willmore_residual(&a), &a.mask).sup, norms(&willmore_residual(&b), &b.mask).sup);
        let (pass, order) = second_order(wa, wb, f.h(), 50.0);
        ok &= pass;
        if !pass {
            detail += &format!(" {kind}: {wb:.2e} order {order:.2};");
        }
    }
    let (c, f) = charts(CONTROL, 48);
    let (a, b) = (surface(CONTROL, &c), surface(CONTROL, &f));
    let (wa, wb) = (norms(&willmore_residual(&a), &a.mask).sup, norms(&willmore_residual(&b), &b.mask).sup);
    let control = wb >= 0.1 && wb >= 0.5 * wa;
    ok &= control;
    outcome(ok, format!("Willmore zoo O(h^2){detail}; torus(3) residual {wa:.3} -> {wb:.3} (>= 0.1, non-shrinking)"))
}

fn flatness(kind: SurfaceKind, c: &Chart, lambda: C64) -> f64 {
    let s = surface(kind, c);
    let m = maurer_cartan(&build_frame(&s));
    flatness_residual(&extend(&m, lambda).unwrap(), &m).sup
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut detail = String::new();
    for kind in WILLMORE.into_iter().skip(1) {
        let (c, f) = charts(kind, 48);
        for l in default_lambdas() {
            let (pass, order) = second_order(flatness(kind, &c, l), flatness(kind, &f, l), f.h(), 50.0);
            if !pass {
                ok = false;
                detail += &format!(" {kind} at {l}: order {order:.2};");
            }
        }
    }
    let (c, f) = charts(CONTROL, 48);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let (p1, o1) = second_order(flatness(CONTROL, &c, one), flatness(CONTROL, &f, one), f.h(), 50.0);
    let (ia, ib) = (flatness(CONTROL, &c, i), flatness(CONTROL, &f, i));
    let control = p1 && ib >= 0.1 && ib >= 0.5 * ia;
    ok &= control;
    outcome(ok, format!("Willmore Gauss maps flat at 4 samples{detail}; torus(3): lambda=1 order {o1:.2}, lambda=i residual {ib:.3}"))
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    let mut ok = true;
    for kind in WILLMORE.into_iter().skip(1).chain([CONTROL]) {
        let c = kind.default_chart(96).unwrap();
        let s = surface(kind, &c);
        let m = maurer_cartan(&build_frame(&s));
        let v = strong_conformal_check(&m.b1, &m.mask).isotropy;
        ok &= v <= 20.0 * c.h() * c.h();
        worst = worst.max(v / (c.h() * c.h()));
    }
    let c = Chart::new(24, 24, (-1.0, 1.0), (-1.0, 1.0), Topology::Open).unwrap();
    let rnd = strong_conformal_check(&random_b1(&c, 2, 5), &c.interior_mask(0)).isotropy;
    ok &= rnd >= 0.1;
    outcome(ok, format!("max |B1^T I B1| / h^2 = {worst:.2} <= 20; random B1 {rnd:.3} >= 0.1"))
}

fn random_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_sl2(rng: &mut ChaCha8Rng) -> Matrix2<C64> {
    let g = Matrix2::new(random_c(rng), random_c(rng), random_c(rng), random_c(rng));
    g / det(&g).sqrt()
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut d_err, mut herm, mut hom) = (0.0f64, 0.0f64, 0.0f64);
    let mut ortho = true;
    for _ in 0..1000 {
        let x = Vector4::from_fn(|_, _| random_c(&mut rng));
        let dx = DVector::from_column_slice(x.as_slice());
        let ip = inner_c(&dx, &dx).unwrap();
        d_err = d_err.max((det(&vec_to_mat(&x)) + ip).norm() / (1.0 + x.norm_squared()));
        let xr = x.map(|e| C64::new(e.re, 0.0));
        let m = vec_to_mat(&xr);
        herm = herm.max((m - m.adjoint()).iter().map(|e| e.norm()).fold(0.0, f64::max));
        let (g, h) = (random_sl2(&mut rng), random_sl2(&mut rng));
        let (ag, ah, agh) = (sl2_to_so13(&g).unwrap(), sl2_to_so13(&h).unwrap(), sl2_to_so13(&(g * h)).unwrap());
        hom = hom.max((agh - ag * ah).amax() / (1.0 + agh.amax()));
        let chk = check_group(&DMatrix::from_fn(4, 4, |r, c| ag[(r, c)]));
        ortho &= chk.time_time > 0.0 && chk.det > 0.0;
    }
    let secs = t.elapsed().as_secs_f64();
    let ok = d_err <= 1e-12 && herm <= 1e-14 && hom <= 1e-11 && ortho && secs <= 5.0;
    outcome(ok, format!("det+<x,x> {d_err:.1e} <= 1e-12, hermitian {herm:.1e} <= 1e-14, homomorphism {hom:.1e} <= 1e-11, orthochronous {ortho}, {secs:.2}s <= 5s"))
}

/// Canonical `B1` columns `(√2β, −√2β, −k, −ik)` of rank 1 or 2.
fn canonical_b1(c: &Chart, rank: usize) -> CMatField {
    let i = C64::new(0.0, 1.0);
    c.sample(|u, v| {
        let z = C64::new(u, v);
        let col = |beta: C64, k: C64| [beta * SQRT_2, -beta * SQRT_2, -k, -i * k];
        let c1 = col(C64::new(0.5, 0.2) + z * 0.3, C64::new(1.0, 0.0) + z * z * 0.2);
        let c2 = if rank == 1 {
            c1.map(|x| x * (C64::new(0.3, -0.7) + z * 0.1))
        } else {
            col(C64::new(-0.4, 0.9) + z.conj() * 0.2, C64::new(0.2, 0.5) - z * 0.4)
        };
        DMatrix::from_fn(4, 2, |r, j| if j == 0 { c1[r] } else { c2[r] })
    })
}

fn criterion_7() -> Outcome {
    let c = Chart::new(41, 41, (-1.0, 1.0), (-1.0, 1.0), Topology::Open).unwrap();
    let mask = c.interior_mask(0);
    let mut ok = true;
    let mut detail = String::new();
    for rank in [1, 2] {
        for (o, seed) in [(Orientation::Same, 3u64), (Orientation::Conjugate, 4)] {
            let can = canonical_b1(&c, rank);
            let g = random_lorentz_field(&c, 4, seed + 10 * rank as u64, 0.5);
            let input = can.zip_map(&g, |b, g| {
                let gc = g.map(|e| C64::new(e, 0.0));
                let x = gc * b;
                if o == Orientation::Conjugate { x.map(|e| e.conj()) } else { x }
            });
            // A single null column fits both families pointwise, so rank 1 names its family.
            let prefer = (rank == 1).then_some(o);
            let res = canonicalize_b1(&input, &c, &mask, prefer).unwrap();
            let pass = res.orientation == o && res.shape_residual <= 1e-8 && res.max_jump <= 50.0;
            ok &= pass;
            detail += &format!(" rank{rank}/{o:?}: shape {:.1e}, jump {:.1}, orientation {:?};", res.shape_residual, res.max_jump, res.orientation);
        }
    }
    outcome(ok, format!("shape <= 1e-8, jump/h <= 50:{detail}"))
}

fn round_trip(kind: SurfaceKind, c: &Chart) -> (Case, f64, MatchOrientation) {
    let s = SurfaceData::from_raw(&generate(kind, c).unwrap(), c).unwrap();
    let cl = classify(&build_frame(&s)).unwrap();
    let y = project_y0(&cl.frame);
    let d = y.distance(&SphereMap::from_lift(c, &s.y), &cl.frame.blocks.mask).sup;
    let dual = dual_surface(&cl.frame).unwrap();
    let gm = verify_gauss_match(&dual.map, &cl.frame).unwrap();
    (cl.classification.case, d, gm.orientation)
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut detail = String::new();
    for kind in [SurfaceKind::CliffordTorus, SurfaceKind::Veronese] {
        let (c, f) = charts(kind, 48);
        let (_, dc, _) = round_trip(kind, &c);
        let (case, d, orientation) = round_trip(kind, &f);
        let tol = 1e-6 + 10.0 * f.h() * f.h();
        let order = observed_order(dc, d);
        let pass = case == Case::A2 && d <= tol && (d < 1e-9 || order >= 1.7) && orientation == MatchOrientation::Opposite;
        ok &= pass;
        detail += &format!(" {kind}: case {case}, distance {d:.1e} <= {tol:.1e} order {order:.2}, dual {orientation:?};");
    }
    outcome(ok, format!("round trip and dual orientation:{detail}"))
}

fn minimal_residuals(kind: SurfaceKind, c: &Chart) -> (Case, [f64; 2]) {
    let s = SurfaceData::from_raw(&generate(kind, c).unwrap(), c).unwrap();
    let mut frame = build_frame(&s);
    frame.mask = frame.mask.and(&physical_mask(c));
    let cl = classify(&frame).unwrap();
    if cl.classification.case != Case::B2i {
        return (cl.classification.case, [f64::INFINITY; 2]);
    }
    let ym = build_y_mu(&cl.frame, cl.mu.as_ref().unwrap());
    let x = stereographic(&ym.lift, &cl.frame).unwrap();
    (Case::B2i, [x.conformality, x.harmonicity])
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    let mut detail = String::new();
    for kind in [SurfaceKind::Enneper, SurfaceKind::Catenoid] {
        let (c, f) = charts(kind, 48);
        let (ca, ra) = minimal_residuals(kind, &c);
        let (cb, rb) = minimal_residuals(kind, &f);
        let orders: Vec<f64> = ra.iter().zip(&rb).map(|(a, b)| observed_order(*a, *b)).collect();
        let pass = ca == Case::B2i && cb == Case::B2i && orders.iter().all(|o| *o >= 1.7);
        ok &= pass;
        detail += &format!(" {kind}: {cb}, conformal {:.1e}, harmonic {:.1e}, orders {:.2}/{:.2};", rb[0], rb[1], orders[0], orders[1]);
    }
    let c = Chart::new(41, 41, (-0.8, 0.8), (-0.8, 0.8), Topology::Open).unwrap();
    for (name, frame) in [("reduced", synthetic_reduced_frame(&c)), ("rank-2", synthetic_rank2_frame(&c))] {
        let case = classify(&frame).unwrap().classification.case;
        let pass = matches!(case, Case::B1 | Case::B2ii) && !case.has_surface();
        ok &= pass;
        detail += &format!(" {name}: {case} ({});", case.verdict());
    }
    outcome(ok, format!("minimal recovery and no-surface verdicts:{detail}"))
}

fn criterion_10() -> Outcome {
    let mut ok = true;
    let mut detail = String::new();
    let mut frames = Vec::new();
    for kind in [SurfaceKind::CliffordTorus, SurfaceKind::Veronese, SurfaceKind::Enneper, SurfaceKind::Catenoid] {
        let c = kind.default_chart(64).unwrap();
        let s = SurfaceData::from_raw(&generate(kind, &c).unwrap(), &c).unwrap();
        frames.push((kind.to_string(), build_frame(&s)));
    }
    let c = Chart::new(41, 41, (-0.8, 0.8), (-0.8, 0.8), Topology::Open).unwrap();
    frames.push(("synthetic-reduced".into(), synthetic_reduced_frame(&c)));
    frames.push(("synthetic-rank2".into(), synthetic_rank2_frame(&c)));
    for (name, frame) in frames {
        let h2 = frame.chart.h().powi(2);
        let worst = [Orientation::Same, Orientation::Conjugate]
            .into_iter()
            .filter_map(|o| normalize(&frame, Some(o)).ok())
            .map(|nf| nf.spec_cond_residual().sup)
            .fold(0.0, f64::max);
        let pass = worst <= 5.0 * h2;
        ok &= pass;
        detail += &format!(" {name} {worst:.1e};");
    }
    outcome(ok, format!("relative |a13+a23-i(a14+a24)| <= 5 h^2:{detail}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("Willmore energy of the Clifford torus", criterion_1),
        ("structure and integrability convergence", criterion_2),
        ("Willmore characterization", criterion_3),
        ("associated family flatness", criterion_4),
        ("strong conformal harmonicity", criterion_5),
        ("spinor model sweeps", criterion_6),
        ("normalization round trips", criterion_7),
        ("reconstruction round trip", criterion_8),
        ("constant lightlike vector branch", criterion_9),
        ("spec-cond identity", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {} ({name}, {:.1}s): {}", k + 1, t.elapsed().as_secs_f64(), o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
