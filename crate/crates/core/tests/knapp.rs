//! Knapp wavepackets: profile, cap geometry, and concentration.

use std::f64::consts::PI;
use std::sync::Arc;

use eigenforge::grid::{build_grid, FourierGrid};
use eigenforge::knapp::{
    bump, cap_symbol_deviation, knapp_coefficients, knapp_wavepacket, packet_region_mass,
    KnappSpec,
};
use eigenforge::region::{region_indicator, RegionSpec};
use eigenforge::symbol::DispersionSymbol;
use eigenforge::SpectralError;

/// Fine along the cap axis, coarse transversally; resolves caps down to
/// `c0 * eps = 0.0125`.
fn cap_grid() -> Arc<FourierGrid> {
    build_grid(2, &[2.0 * PI * 640.0, 2.0 * PI * 72.0], &[1375, 49]).unwrap()
}

#[test]
fn bump_profile_is_a_plateau_with_smooth_shoulders() {
    assert_eq!(bump(0.0), 1.0);
    assert_eq!(bump(1.0), 1.0);
    assert_eq!(bump(2.0), 0.0);
    assert_eq!(bump(3.0), 0.0);
    // the shoulder interpolant is symmetric about its midpoint
    assert!((bump(1.5) - 0.5).abs() <= 1e-12);
    assert!(bump(1.2) > bump(1.8));
    assert!(bump(1.2) < 1.0 && bump(1.8) > 0.0);
}

#[test]
fn packet_has_unit_norm_and_cap_limited_support() {
    let grid = cap_grid();
    let spec = KnappSpec::unit_shell(0.05, 0.5, 2);
    let f = knapp_wavepacket(&spec, &grid).unwrap();
    assert!((f.norm() - 1.0).abs() <= 1e-10);

    let coef = knapp_coefficients(&spec, &grid).unwrap();
    let cap = 0.05 * 0.5;
    let mut seen = 0usize;
    grid.for_each_site(|flat, idx| {
        let v = coef.values()[flat];
        if v.re == 0.0 {
            return;
        }
        seen += 1;
        let xi1 = grid.frequency(0, idx[0]);
        let xi2 = grid.frequency(1, idx[1]);
        assert!((xi1 - 1.0).abs() <= 2.0 * cap + 1e-12);
        assert!(xi2.abs() <= 2.0 * cap.sqrt() + 1e-12);
    });
    assert!(seen > 100, "cap support is implausibly thin: {seen} sites");
}

#[test]
fn cap_symbol_deviation_is_curvature_limited() {
    let grid = cap_grid();
    for c0 in [0.5, 0.25] {
        let spec = KnappSpec::unit_shell(0.05, c0, 2);
        let dev = cap_symbol_deviation(&spec, &grid, &DispersionSymbol::Laplacian).unwrap();
        let cap = 0.05 * c0;
        // sup over the cap is 4 + 1/(1 - cap); 5 (1 + cap) dominates it
        assert!(
            dev <= 5.0 * (1.0 + cap),
            "deviation {dev} exceeds the cap bound at c0 = {c0}"
        );
        assert!(dev >= 4.0, "packet fails to fill its cap: {dev}");
    }
}

#[test]
fn squared_norm_scales_with_the_cap_volume() {
    // volume of the anisotropic cap is (c0 eps)^((d+1)/2) up to a constant,
    // so halving c0 on a fixed grid exposes the exponent 3/2 in d = 2
    let grid = cap_grid();
    let mut points = Vec::new();
    for c0 in [0.5, 0.25] {
        let spec = KnappSpec::unit_shell(0.05, c0, 2);
        let coef = knapp_coefficients(&spec, &grid).unwrap();
        let sq: f64 = coef.values().iter().map(|v| v.norm_sqr()).sum();
        points.push((c0 * 0.05, sq * grid.cell_volume()));
    }
    let slope = (points[0].1 / points[1].1).ln() / (points[0].0 / points[1].0).ln();
    assert!(
        (slope - 1.5).abs() <= 0.01,
        "cap-volume exponent {slope} is off 3/2"
    );
}

#[test]
fn packet_mass_concentrates_in_the_dual_tube() {
    // this grid must also sample the tube in physical space: 16+ cells
    // across each tube dimension, unlike the cap-only grid above
    let grid = build_grid(2, &[2.0 * PI * 80.0, 2.0 * PI * 26.0], &[405, 441]).unwrap();
    let spec = KnappSpec::unit_shell(0.2, 0.5, 2);
    let chi = region_indicator(&RegionSpec::tube(0.1, 1.0), &grid).unwrap();
    let mass = packet_region_mass(&spec, &chi).unwrap();
    assert!(mass >= 0.5, "tube mass {mass} below 1/2");
    assert!(mass <= 1.0 + 1e-12);
}

#[test]
fn coarse_grids_are_rejected_with_the_resolution_rule() {
    let grid = build_grid(2, &[8.0 * PI, 8.0 * PI], &[63, 63]).unwrap();
    let spec = KnappSpec::unit_shell(0.05, 0.5, 2);
    match knapp_wavepacket(&spec, &grid) {
        Err(SpectralError::UnderResolved { axis: 0, .. }) => {}
        other => panic!("expected an under-resolved cap, got {other:?}"),
    }
}

#[test]
fn base_point_must_sit_on_the_first_axis() {
    let grid = cap_grid();
    let spec = KnappSpec::new(0.05, 0.5, vec![1.0, 0.3]);
    assert!(matches!(
        knapp_wavepacket(&spec, &grid),
        Err(SpectralError::Unsupported(_))
    ));
    let spec = KnappSpec::new(0.05, 0.5, vec![1.0]);
    assert!(matches!(
        knapp_wavepacket(&spec, &grid),
        Err(SpectralError::DimensionMismatch { .. })
    ));
}

#[test]
fn packet_parameters_are_validated() {
    let grid = cap_grid();
    assert!(knapp_wavepacket(&KnappSpec::unit_shell(0.0, 0.5, 2), &grid).is_err());
    assert!(knapp_wavepacket(&KnappSpec::unit_shell(-0.1, 0.5, 2), &grid).is_err());
    assert!(knapp_wavepacket(&KnappSpec::unit_shell(0.05, 0.0, 2), &grid).is_err());
    assert!(knapp_wavepacket(&KnappSpec::unit_shell(0.05, f64::NAN, 2), &grid).is_err());
}
