//! Decay profile of the shell-localized resolvent kernel and the cutoff
//! validation that keeps it meaningful.

use eigenforge::grid::build_grid;
use eigenforge::kernel::{kernel_decay_profile, shell_cutoff};
use eigenforge::multiplier::Multiplier;
use eigenforge::{DispersionSymbol, SpectralError};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[test]
fn shell_cutoff_is_one_on_the_shell_and_zero_far_away() {
    let grid = build_grid(2, &[8.0 * TWO_PI, 8.0 * TWO_PI], &[243, 243]).unwrap();
    let eta = shell_cutoff(&DispersionSymbol::Laplacian, &grid, 1.0, 0.5).unwrap();
    let table = DispersionSymbol::Laplacian.on_grid(&grid).unwrap();
    for (c, h) in eta.values().iter().zip(&table) {
        assert_eq!(c.im, 0.0);
        assert!(c.re >= 0.0 && c.re <= 1.0);
        let gap = (h.sqrt() - 1.0).abs();
        if gap <= 0.5 {
            assert_eq!(c.re, 1.0, "cutoff below 1 at gap {gap}");
        }
        if gap >= 1.0 {
            assert_eq!(c.re, 0.0, "cutoff positive at gap {gap}");
        }
    }
    assert!(matches!(
        shell_cutoff(&DispersionSymbol::Laplacian, &grid, -1.0, 0.5),
        Err(SpectralError::BadParameter(_))
    ));
    assert!(matches!(
        shell_cutoff(&DispersionSymbol::Laplacian, &grid, 1.0, 0.0),
        Err(SpectralError::BadParameter(_))
    ));
}

#[test]
fn profile_decays_about_like_the_inverse_square_root() {
    let grid = build_grid(2, &[8.0 * TWO_PI, 8.0 * TWO_PI], &[243, 243]).unwrap();
    let eta = shell_cutoff(&DispersionSymbol::Laplacian, &grid, 1.0, 0.5).unwrap();
    let profile =
        kernel_decay_profile(&DispersionSymbol::Laplacian, &grid, 1.0, 0.1, &eta).unwrap();

    for w in profile.radii.windows(2) {
        assert!(w[1] > w[0]);
    }
    assert_eq!(profile.radii.len(), profile.envelope.len());
    let (lo, hi) = profile.fit_range;
    assert!((lo - 5.0 * grid.spacing(0)).abs() < 1e-12);
    assert!((hi - 5.0).abs() < 1e-12);

    // the window mixes the r^{-1/2} envelope with the onset of e^{-eps r}
    assert!(
        profile.fitted_exponent > -0.65 && profile.fitted_exponent < -0.30,
        "exponent {} off scale",
        profile.fitted_exponent
    );
    assert!(profile.r_squared > 0.80, "fit quality {}", profile.r_squared);
    assert!(
        profile.suppression_ratio > 0.20 && profile.suppression_ratio < 0.45,
        "suppression {} off scale",
        profile.suppression_ratio
    );
    assert!(profile.envelope[0] > 0.1, "kernel vanished near the origin");
}

#[test]
fn global_cutoff_is_rejected() {
    let grid = build_grid(2, &[8.0 * TWO_PI, 8.0 * TWO_PI], &[81, 81]).unwrap();
    let flat = Multiplier::from_real_values(&grid, vec![1.0; grid.site_count()], true).unwrap();
    match kernel_decay_profile(&DispersionSymbol::Laplacian, &grid, 1.0, 0.1, &flat) {
        Err(SpectralError::BadParameter(msg)) => {
            assert!(msg.contains("measures the box"), "wrong message: {msg}")
        }
        other => panic!("expected a cutoff rejection, got {other:?}"),
    }
}

#[test]
fn cutoff_must_cover_the_shell_and_stay_in_range() {
    let grid = build_grid(2, &[8.0 * TWO_PI, 8.0 * TWO_PI], &[81, 81]).unwrap();
    let zero = Multiplier::from_real_values(&grid, vec![0.0; grid.site_count()], true).unwrap();
    match kernel_decay_profile(&DispersionSymbol::Laplacian, &grid, 1.0, 0.1, &zero) {
        Err(SpectralError::BadParameter(msg)) => {
            assert!(msg.contains("equal 1 near the shell"), "wrong message: {msg}")
        }
        other => panic!("expected a shell-coverage rejection, got {other:?}"),
    }
    let hot = Multiplier::from_real_values(&grid, vec![2.0; grid.site_count()], true).unwrap();
    match kernel_decay_profile(&DispersionSymbol::Laplacian, &grid, 1.0, 0.1, &hot) {
        Err(SpectralError::BadParameter(msg)) => {
            assert!(msg.contains("lie in [0, 1]"), "wrong message: {msg}")
        }
        other => panic!("expected a range rejection, got {other:?}"),
    }
}

#[test]
fn fit_window_needs_room_between_cells_and_the_absorptive_scale() {
    // eps = 1 puts the window end at r = 1/2, under five cells
    let grid = build_grid(2, &[4.0 * TWO_PI, 4.0 * TWO_PI], &[27, 27]).unwrap();
    let eta = shell_cutoff(&DispersionSymbol::Laplacian, &grid, 1.0, 0.5).unwrap();
    match kernel_decay_profile(&DispersionSymbol::Laplacian, &grid, 1.0, 1.0, &eta) {
        Err(SpectralError::BadParameter(msg)) => {
            assert!(msg.contains("fewer than 2 bins"), "wrong message: {msg}")
        }
        other => panic!("expected a window rejection, got {other:?}"),
    }
}

#[test]
fn box_must_reach_twice_the_absorptive_scale() {
    // window [5 dx, 10] is fine but 2/eps = 40 is outside the half box
    let grid = build_grid(2, &[4.0 * TWO_PI, 4.0 * TWO_PI], &[81, 81]).unwrap();
    let eta = shell_cutoff(&DispersionSymbol::Laplacian, &grid, 1.0, 0.5).unwrap();
    match kernel_decay_profile(&DispersionSymbol::Laplacian, &grid, 1.0, 0.05, &eta) {
        Err(SpectralError::BadParameter(msg)) => {
            assert!(msg.contains("absorptive scale"), "wrong message: {msg}")
        }
        other => panic!("expected a reach rejection, got {other:?}"),
    }
}

#[test]
fn foreign_grid_and_bad_parameters_are_rejected() {
    let grid = build_grid(2, &[8.0 * TWO_PI, 8.0 * TWO_PI], &[81, 81]).unwrap();
    let other = build_grid(2, &[8.0 * TWO_PI, 8.0 * TWO_PI], &[27, 27]).unwrap();
    let eta = shell_cutoff(&DispersionSymbol::Laplacian, &other, 1.0, 0.5).unwrap();
    assert!(matches!(
        kernel_decay_profile(&DispersionSymbol::Laplacian, &grid, 1.0, 0.1, &eta),
        Err(SpectralError::GridMismatch)
    ));
    let eta = shell_cutoff(&DispersionSymbol::Laplacian, &grid, 1.0, 0.5).unwrap();
    assert!(matches!(
        kernel_decay_profile(&DispersionSymbol::Laplacian, &grid, 1.0, -0.1, &eta),
        Err(SpectralError::BadParameter(_))
    ));
    assert!(matches!(
        kernel_decay_profile(&DispersionSymbol::Laplacian, &grid, 0.0, 0.1, &eta),
        Err(SpectralError::BadParameter(_))
    ));
}
