use std::f64::consts::{FRAC_PI_2, PI};

use squeeze_core::design::{real_pair_runs, suitability, validate_design, DesignDescriptor, GammaSpec, ThetaDesign};
use squeeze_core::mathieu::{find_intersections, strutt_map, trace_curve_in, CurveKind, ScanGrid, DEFAULT_INTERVAL};
use squeeze_core::packet::{uncertainty_shadow, GaussianPacket, SHADOW_W};
use squeeze_core::profile::Domain;
use squeeze_core::propagate::{propagate, StepControl};
use squeeze_core::regime::{classify, Regime};
use squeeze_core::units::{magnetic_beta, magnetic_field_for, PhysicalContext};

#[test]
fn local_scan_finds_one_squeezing_point() {
    let grid = ScanGrid::new((1.15, 1.30), (0.78, 0.90), 16, 13, DEFAULT_INTERVAL).unwrap();
    let step = StepControl::with_step(1e-3);
    let map = strutt_map(&grid, step).unwrap();
    assert_eq!(map.flagged_count(), 0);
    let c12 = trace_curve_in(&map, CurveKind::U12Zero);
    let c21 = trace_curve_in(&map, CurveKind::U21Zero);
    let found = find_intersections(&c12, &c21, &grid, step).unwrap();
    assert_eq!(found.len(), 1, "{found:?}");
    let ix = &found[0];
    assert!(ix.matrix.u12.abs() < 1e-6 && ix.matrix.u21.abs() < 1e-6);
    // a diagonal symplectic matrix: the q-squeezing factor and its inverse
    assert!((ix.lambda() * ix.matrix.u22 - 1.0).abs() < 1e-6);
    let report = classify(&ix.matrix, 1e-6).unwrap();
    assert_eq!(report.regime, Regime::Squeezing);
}

#[test]
fn design_verdicts() {
    let step = StepControl::with_step(1e-3);
    let cases = [
        (2.0, -3.0, 0.0, GammaSpec::Sin2, true),
        (1.75, -3.0, 0.0, GammaSpec::Sin2, true),
        (1.8, 3.5, 0.0, GammaSpec::Sin2, false),
        (2.15, -1.0, 0.1, GammaSpec::UNIT, true),
    ];
    for (b, c, be, g, expect) in cases {
        let d = ThetaDesign::solve(b, c, be, g).unwrap();
        let report = validate_design(&d, FRAC_PI_2);
        assert!(report.all_ok(), "{b} {c}: {report:?}");
        assert!(report.beta_endpoint_residual < 1e-8);
        let s = suitability(&d, FRAC_PI_2, 400, step).unwrap();
        assert_eq!(s.suitable, expect, "{b} {c}: min beta {}", s.min_beta);
        assert!(real_pair_runs(&s.eigentrajectory) <= s.eigentrajectory.len());
    }
}

#[test]
fn unit_kinetic_designs_reach_squeezed_fourier() {
    for (b, c) in [(2.15, -1.0), (1.85, -2.0), (2.15, 1.0)] {
        let d = ThetaDesign::solve(b, c, 0.1, GammaSpec::UNIT).unwrap();
        let u = propagate(&d.profile(Domain::ALL), -FRAC_PI_2, FRAC_PI_2, StepControl::default()).unwrap();
        assert!((u.u12 - b).abs() < 1e-9);
        assert!((u.u21 + 1.0 / b).abs() < 1e-9);
        assert!(u.u11.abs() < 1e-9 && u.u22.abs() < 1e-9);
    }
}

#[test]
fn descriptor_survives_disk() {
    let d = ThetaDesign::solve(2.0, -3.0, 0.0, GammaSpec::Sin2).unwrap();
    let dir = std::env::temp_dir().join(format!("squeeze-core-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("design.json");
    std::fs::write(&path, DesignDescriptor::from(&d).to_json()).unwrap();
    let back = DesignDescriptor::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap().to_design().unwrap();
    assert_eq!(back, d);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn solid_design_shadow_stays_inside_belt() {
    let d = ThetaDesign::solve(2.0, -3.0, 0.0, GammaSpec::Sin2).unwrap();
    let band = uncertainty_shadow(
        &d.profile(Domain::ALL),
        (-FRAC_PI_2, 35.0 * PI / 32.0),
        &GaussianPacket::unit(1.0, 1.0),
        SHADOW_W,
        400,
        StepControl::default(),
    )
    .unwrap();
    assert!(band.max_extent() < 10.0);
    assert_eq!(band.samples.len(), 401);
    assert!(band.widest().unwrap().dq > band.samples[0].dq);
}

#[test]
fn magnetic_realization_of_a_design() {
    let d = ThetaDesign::solve(2.0, -3.0, 0.0, GammaSpec::Sin2).unwrap();
    let ctx = PhysicalContext::proton_radio_example();
    let target = move |tau: f64| d.beta(tau).unwrap_or(0.0).max(0.0);
    let field = magnetic_field_for(&ctx, target).unwrap();
    let profile = magnetic_beta(&ctx, field).unwrap();
    for i in 0..=40 {
        let tau = -FRAC_PI_2 + PI * i as f64 / 40.0;
        let want = target(tau);
        assert!((profile.beta(tau) - want).abs() <= 1e-10 * want.max(1.0));
    }
}
