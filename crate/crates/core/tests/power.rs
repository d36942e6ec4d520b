//! Power iteration on the localized spectral operator.

use std::f64::consts::PI;

use eigenforge::grid::{build_grid, Field};
use eigenforge::knapp::{knapp_lower_bound, knapp_wavepacket, KnappSpec};
use eigenforge::power::{
    power_iterate, rescaled_tube_operator, top_eigenpair, top_eigenpair_trace,
};
use eigenforge::region::{region_indicator, RegionSpec};
use eigenforge::symbol::DispersionSymbol;
use eigenforge::SpectralError;

const TWO_PI: f64 = 2.0 * PI;

#[test]
fn unrestricted_on_shell_mode_attains_the_supremum() {
    // chi == 1 and an on-lattice shell mode: K scales it by exactly 1/eps
    let grid = build_grid(2, &[8.0 * PI, 8.0 * PI], &[33, 33]).unwrap();
    let eps = 0.5;
    let ones = Field::from_real(&grid, vec![1.0; grid.site_count()]).unwrap();
    let mode = Field::from_real(&grid, grid.tabulate_coords(|x| x[0].cos())).unwrap();
    let pair = top_eigenpair(&ones, &DispersionSymbol::Laplacian, 1.0, eps, &mode, 1e-10, 50)
        .unwrap();
    assert!(pair.converged);
    assert!(pair.iterations <= 3, "mode seed took {} iterations", pair.iterations);
    assert!((pair.mu - 1.0 / eps).abs() <= 1e-10 / eps);
    assert!(pair.phi.is_real());
    assert!((pair.phi.norm() - 1.0).abs() <= 1e-10);
}

#[test]
fn seed_vanishing_on_the_region_is_rejected() {
    let grid = build_grid(2, &[16.0, 16.0], &[33, 33]).unwrap();
    let chi = region_indicator(&RegionSpec::tube(0.5, 1.0), &grid).unwrap();
    // supported where the tube is not
    let seed = Field::from_real(
        &grid,
        grid.tabulate_coords(|x| if x[0].abs() > 5.0 { 1.0 } else { 0.0 }),
    )
    .unwrap();
    assert!(matches!(
        top_eigenpair(&chi, &DispersionSymbol::Laplacian, 1.0, 0.5, &seed, 1e-10, 50),
        Err(SpectralError::ZeroInit)
    ));
}

#[test]
fn running_out_of_iterations_is_reported_not_raised() {
    let grid = build_grid(2, &[16.0, 16.0], &[33, 33]).unwrap();
    let chi = region_indicator(&RegionSpec::tube(0.5, 1.0), &grid).unwrap();
    let seed = Field::from_real(&grid, vec![1.0; grid.site_count()]).unwrap();
    let pair = top_eigenpair(&chi, &DispersionSymbol::Laplacian, 1.0, 0.5, &seed, 1e-14, 2)
        .unwrap();
    assert!(!pair.converged);
    assert_eq!(pair.iterations, 2);
    assert!(pair.residual > 1e-14);
}

#[test]
fn iteration_parameters_are_validated() {
    let grid = build_grid(1, &[4.0], &[9]).unwrap();
    let f = Field::from_real(&grid, vec![1.0; 9]).unwrap();
    let mut id = |g: &Field| Ok(g.clone());
    assert!(power_iterate(&mut id, &f, 0.0, 10, true).is_err());
    assert!(power_iterate(&mut id, &f, -1.0, 10, true).is_err());
    assert!(power_iterate(&mut id, &f, 1e-10, 0, true).is_err());
    let zero = Field::zeros(&grid);
    assert!(matches!(
        power_iterate(&mut id, &zero, 1e-10, 10, true),
        Err(SpectralError::ZeroInit)
    ));
}

#[test]
fn identity_operator_converges_immediately() {
    let grid = build_grid(1, &[4.0], &[9]).unwrap();
    let f = Field::from_real(&grid, (0..9).map(|i| 1.0 + i as f64).collect()).unwrap();
    let (pair, trace) = power_iterate(&mut |g| Ok(g.clone()), &f, 1e-12, 10, true).unwrap();
    assert!(pair.converged);
    assert_eq!(pair.iterations, 1);
    assert!((pair.mu - 1.0).abs() <= 1e-12);
    assert_eq!(trace.len(), 1);
}

#[test]
fn negative_operators_are_rejected() {
    let grid = build_grid(1, &[4.0], &[9]).unwrap();
    let f = Field::from_real(&grid, vec![1.0; 9]).unwrap();
    let mut neg = |g: &Field| {
        let mut out = g.clone();
        out.scale(-1.0);
        Ok(out)
    };
    assert!(matches!(
        power_iterate(&mut neg, &f, 1e-10, 10, true),
        Err(SpectralError::Degenerate(_))
    ));
}

// The reference configuration: eps = 0.2, M = 1 tube, unit shell.  Grid
// frozen from the resolution policy (axis cap eps/8, transverse sqrt(eps)/8,
// frequency reach 5.0, 16 samples across the tube).
fn reference_run() -> (f64, eigenforge::power::EigenPair, Vec<f64>) {
    let eps = 0.2;
    let grid = build_grid(2, &[40.0 * TWO_PI, 18.0 * TWO_PI], &[405, 405]).unwrap();
    let chi = region_indicator(&RegionSpec::tube(eps, 1.0), &grid).unwrap();
    let packet = knapp_wavepacket(&KnappSpec::unit_shell(eps, 1.0, 2), &grid).unwrap();
    let (pair, trace) = top_eigenpair_trace(
        &chi,
        &DispersionSymbol::Laplacian,
        1.0,
        eps,
        &packet,
        1e-10,
        5000,
    )
    .unwrap();
    (eps, pair, trace)
}

#[test]
fn tube_eigenvalue_reproduces_the_reference_value() {
    let (eps, pair, trace) = reference_run();
    assert!(pair.converged);
    assert!(pair.residual <= 1e-10);
    assert!(pair.phi.is_real());
    assert!((pair.phi.norm() - 1.0).abs() <= 1e-10);

    let eps_mu = eps * pair.mu;
    assert!(
        (eps_mu - 0.36641).abs() <= 2e-5,
        "eps*mu = {eps_mu} departs from the reference 0.36641"
    );
    // the localization floor and the trivial ceiling
    assert!(eps_mu >= 0.25);
    assert!(eps_mu <= 1.0);

    // Rayleigh quotients are nondecreasing up to roundoff
    for w in trace.windows(2) {
        assert!(
            w[1] >= w[0] * (1.0 - 1e-12),
            "Rayleigh quotient dropped: {} -> {}",
            w[0],
            w[1]
        );
    }

    // a single-vector quotient can never beat the top eigenvalue
    let grid = pair.phi.grid();
    let chi = region_indicator(&RegionSpec::tube(eps, 1.0), grid).unwrap();
    let lb = knapp_lower_bound(
        &KnappSpec::unit_shell(eps, 1.0, 2),
        &chi,
        &DispersionSymbol::Laplacian,
    )
    .unwrap();
    assert!(lb > 0.0 && lb <= 1.0);
    assert!(lb <= eps_mu + 1e-9, "packet quotient {lb} above eps*mu {eps_mu}");
}

#[test]
fn deeper_tube_eigenvalue_matches_its_frozen_value() {
    // eps = 0.1, M = 1 on the policy grid for that scale
    let grid = build_grid(2, &[80.0 * TWO_PI, 26.0 * TWO_PI], &[567, 441]).unwrap();
    let eps = 0.1;
    let chi = region_indicator(&RegionSpec::tube(eps, 1.0), &grid).unwrap();
    let packet = knapp_wavepacket(&KnappSpec::unit_shell(eps, 1.0, 2), &grid).unwrap();
    let pair = top_eigenpair(&chi, &DispersionSymbol::Laplacian, 1.0, eps, &packet, 1e-10, 5000)
        .unwrap();
    assert!(pair.converged);
    assert!((eps * pair.mu - 0.33486913).abs() < 2e-6);
    assert!(eps * pair.mu >= 0.25);
}

#[test]
fn stretched_coordinates_shrink_the_box_and_keep_the_lattice() {
    let base = build_grid(2, &[40.0, 20.0], &[45, 27]).unwrap();
    let eps = 0.1;
    let op = rescaled_tube_operator(&base, eps, true).unwrap();
    let grid = op.grid();
    assert_eq!(grid.sizes(), base.sizes());
    assert!((grid.lengths()[0] - eps * 40.0).abs() <= 1e-12);
    assert!((grid.lengths()[1] - eps.sqrt() * 20.0).abs() <= 1e-12);
    // the cut is the open unit square
    let chi = op.chi();
    grid.for_each_site(|flat, idx| {
        let inside = grid.coordinate(0, idx[0]).abs() < 1.0
            && grid.coordinate(1, idx[1]).abs() < 1.0;
        assert_eq!(chi.values()[flat].re, if inside { 1.0 } else { 0.0 });
    });
    // the curvature term moves the operator, but both stay contractions
    let curved = rescaled_tube_operator(&base, eps, false).unwrap();
    let seed = op.default_seed().unwrap();
    let flat_out = op.apply(&seed).unwrap();
    let curved_out = curved.apply(&seed).unwrap();
    assert!(flat_out.norm() <= seed.norm() * (1.0 + 1e-12));
    assert!(curved_out.norm() <= seed.norm() * (1.0 + 1e-12));
    let mut diff = flat_out;
    for (d, c) in diff.values_mut().iter_mut().zip(curved_out.values()) {
        *d -= c;
    }
    assert!(diff.norm() > 0.0);
    // complex-mode iteration: the Rayleigh quotient of a positive
    // contraction stays in (0, 1] whether or not it has converged
    let pair = curved.top_eigenvalue(1e-6, 2000).unwrap();
    assert!(pair.mu > 0.0 && pair.mu <= 1.0 + 1e-12);
}

#[test]
fn stretched_coordinates_validate_their_inputs() {
    let base = build_grid(1, &[4.0], &[9]).unwrap();
    assert!(rescaled_tube_operator(&base, 0.1, true).is_err());
    let base = build_grid(2, &[4.0, 4.0], &[9, 9]).unwrap();
    assert!(rescaled_tube_operator(&base, 0.0, true).is_err());
}
