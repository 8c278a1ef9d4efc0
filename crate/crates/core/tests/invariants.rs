use proptest::prelude::*;

use willmore_lab::chart::{observed_order, Chart, Topology};
use willmore_lab::gauss_frame::{build_frame, maurer_cartan, s_willmore_rank_default, willmore_energy};
use willmore_lab::harmonic::{gauge, harmonic_residuals, strong_conformal_check};
use willmore_lab::reconstruct::{classify, Case};
use willmore_lab::surface::SurfaceData;
use willmore_lab::zoo::{generate, load, random_gauge, random_lorentz_field, save_csv, save_json, SurfaceKind};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn frame_gauge_changes_nothing_intrinsic(seed in 0u64..1000, amp in 0.1f64..0.8) {
        // The gauged form is differenced again, so agreement is to second order.
        let gauged = |c: &Chart| {
            let s = SurfaceData::from_raw(&generate(SurfaceKind::Veronese, c).unwrap(), c).unwrap();
            let f = build_frame(&s);
            let m = maurer_cartan(&f);
            let g = random_gauge(c, f.dim() - 4, seed, amp);
            let (_, mg) = gauge(&f, &m, &g).unwrap();
            (m, mg)
        };
        let coarse = SurfaceKind::Veronese.default_chart(32).unwrap();
        let fine = coarse.refined();
        let (m, mg) = gauged(&fine);
        let (_, mg_coarse) = gauged(&coarse);
        let a = strong_conformal_check(&m.b1, &m.mask);
        let b = strong_conformal_check(&mg.b1, &mg.mask);
        let h2 = fine.h() * fine.h();
        prop_assert!(b.isotropy < 20.0 * h2 && (a.isotropy - b.isotropy).abs() < 20.0 * h2, "{a:?} {b:?}");
        prop_assert_eq!(s_willmore_rank_default(&m).max_rank, s_willmore_rank_default(&mg).max_rank);
        let eq = |m: &willmore_lab::gauss_frame::MCBlocks| harmonic_residuals(m).get("B1 equation").unwrap().sup;
        let order = observed_order(eq(&mg_coarse), eq(&mg));
        prop_assert!(order > 1.7, "{order}");
    }

    #[test]
    fn energy_and_case_are_moebius_invariant(seed in 0u64..1000, amp in 0.05f64..0.3) {
        let kind = SurfaceKind::CliffordTorus;
        let c = kind.default_chart(48).unwrap();
        let raw = generate(kind, &c).unwrap();
        let g = random_lorentz_field(&c, raw[0].len(), seed, amp)[0].clone();
        let moved = raw.map(|y| &g * y);
        let a = SurfaceData::from_raw(&raw, &c).unwrap();
        let b = SurfaceData::from_raw(&moved, &c).unwrap();
        let (wa, wb) = (willmore_energy(&a).value, willmore_energy(&b).value);
        prop_assert!((wa - wb).abs() / wa < 2e-2, "{wa} {wb}");
        prop_assert_eq!(classify(&build_frame(&b)).unwrap().classification.case, Case::A2);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn grid_files_round_trip(nu in 5usize..12, nv in 5usize..12, json in any::<bool>()) {
        let c = Chart::new(nu, nv, (-0.7, 0.9), (-1.0, 0.5), Topology::Open).unwrap();
        let y = generate(SurfaceKind::Enneper, &c).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(if json { "f.json" } else { "f.csv" });
        if json { save_json(&path, &c, &y).unwrap() } else { save_csv(&path, &c, &y).unwrap() }
        let (c2, y2) = load(&path, Some(&c)).unwrap();
        prop_assert_eq!(&c2, &c);
        for (p, q) in y.iter().zip(y2.iter()) {
            prop_assert!((p - q).amax() == 0.0);
        }
    }
}
