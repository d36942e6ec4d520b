//! Grid sizing policy: how large a periodic box and how many lattice sites
//! a run at `(eps, M, c0)` gets.
//!
//! Box lengths per axis: the larger of the margin around the localization
//! region (`margin * region diameter`) and the cap resolution floor
//! (at least 8 frequency samples across each cap width, i.e.
//! `L >= 16 pi / cap`), snapped up to a multiple of `2 pi` so the shell
//! point `(sqrt(lambda), 0)` lands exactly on the frequency lattice.
//!
//! Sizes per axis: enough sites to cover the spectral range `Xi` (all
//! frequencies the absorptive window feeds into the forged potential,
//! growing like `sqrt(eps)` past `eps = 0.05`) and at least 16 spatial
//! samples across the region extent; rounded up to an odd number with
//! prime factors in {3, 5, 7, 11} so FFTs stay fast and the frequency
//! lattice stays symmetric.

use std::f64::consts::PI;
use std::sync::Arc;

use eigenforge::grid::build_grid;
use eigenforge::{FourierGrid, Result, SpectralError};

const TAU: f64 = 2.0 * PI;

/// Default box margin around the region, in region diameters.
pub const DEFAULT_MARGIN: f64 = 4.0;
/// Frequency samples required across each cap width.
pub const CAP_SAMPLES: f64 = 8.0;
/// Spatial samples required across the full region extent.
pub const REGION_SAMPLES: f64 = 16.0;

/// Smallest odd integer `>= n` whose prime factors all lie in {3, 5, 7, 11}.
pub fn next_smooth_odd(n: usize) -> usize {
    let mut k = if n % 2 == 0 { n + 1 } else { n.max(1) };
    while !smooth(k) {
        k += 2;
    }
    k
}

fn smooth(mut k: usize) -> bool {
    for p in [3usize, 5, 7, 11] {
        while k % p == 0 {
            k /= p;
        }
    }
    k == 1
}

/// A planned grid: box lengths and lattice sizes, one entry per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPlan {
    pub lengths: [f64; 2],
    pub sizes: [usize; 2],
}

impl GridPlan {
    pub fn build(&self) -> Result<Arc<FourierGrid>> {
        build_grid(2, &self.lengths, &self.sizes)
    }

    pub fn site_count(&self) -> usize {
        self.sizes[0] * self.sizes[1]
    }
}

/// Frequency radius the lattice must cover at resolution `eps`; grows as
/// `sqrt(eps)` past 0.05 because the absorptive window's off-shell tail
/// widens with eps.
pub fn spectral_range(eps: f64) -> f64 {
    2.5 * 1.0f64.max((eps / 0.05).sqrt())
}

fn snap_length(raw: f64) -> f64 {
    TAU * (raw / TAU).ceil()
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(SpectralError::BadParameter(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

fn plan(half: [f64; 2], cap: [f64; 2], xi: f64, margin: f64, scale: f64) -> GridPlan {
    let mut lengths = [0.0f64; 2];
    let mut sizes = [0usize; 2];
    for j in 0..2 {
        let l = snap_length((margin * 2.0 * half[j]).max(2.0 * CAP_SAMPLES * PI / cap[j]));
        let n_spectral = l * xi / PI;
        let n_spatial = l * REGION_SAMPLES / (2.0 * half[j]);
        sizes[j] = next_smooth_odd((scale * n_spectral.max(n_spatial)).ceil() as usize);
        lengths[j] = l;
    }
    GridPlan { lengths, sizes }
}

/// Plan for a tube region at shell level `lambda` (shell radius
/// `sqrt(lambda)`): the tube's long axis scales with the group speed, the
/// spectral range is widened to keep the same coverage beyond the shell.
pub fn tube_plan(
    lambda: f64,
    eps: f64,
    m: f64,
    c0: f64,
    margin: f64,
    scale: f64,
) -> Result<GridPlan> {
    check_positive("lambda", lambda)?;
    check_positive("eps", eps)?;
    check_positive("c0", c0)?;
    check_positive("grid scale", scale)?;
    if !(m >= 1.0) || !m.is_finite() {
        return Err(SpectralError::BadParameter(format!(
            "tube stretch M must be at least 1, got {m}"
        )));
    }
    if !(margin >= 1.0) || !margin.is_finite() {
        return Err(SpectralError::BadParameter(format!(
            "box margin must be at least 1, got {margin}"
        )));
    }
    let sh = lambda.sqrt();
    let half = [sh * m / eps, (m / eps).sqrt()];
    let cap = [c0 * eps, (c0 * eps).sqrt()];
    let xi = sh + (spectral_range(eps) - 1.0);
    Ok(plan(half, cap, xi, margin, scale))
}

/// Plan for a ball region of radius `1/eps`; the cap floor uses the tight
/// width `c0 * eps` on both axes, and the box is square.
pub fn ball_plan(eps: f64, c0: f64, margin: f64, scale: f64) -> Result<GridPlan> {
    check_positive("eps", eps)?;
    check_positive("c0", c0)?;
    check_positive("grid scale", scale)?;
    if !(margin >= 1.0) || !margin.is_finite() {
        return Err(SpectralError::BadParameter(format!(
            "box margin must be at least 1, got {margin}"
        )));
    }
    let r = 1.0 / eps;
    let half = [r, r];
    let cap = [c0 * eps, c0 * eps];
    let xi = spectral_range(eps);
    Ok(plan(half, cap, xi, margin, scale))
}

/// Plan used by the embedded-eigenvalue route: the packet there is nearly
/// monochromatic, so the spectral range collapses to `xi_max` and no
/// spatial-sampling floor applies.
pub fn embedded_plan(eps: f64, m: f64, c0: f64, xi_max: f64) -> Result<GridPlan> {
    check_positive("eps", eps)?;
    check_positive("c0", c0)?;
    check_positive("xi_max", xi_max)?;
    if !(m >= 1.0) || !m.is_finite() {
        return Err(SpectralError::BadParameter(format!(
            "tube stretch M must be at least 1, got {m}"
        )));
    }
    let half = [m / eps, (m / eps).sqrt()];
    let cap = [c0 * eps, (c0 * eps).sqrt()];
    let mut lengths = [0.0f64; 2];
    let mut sizes = [0usize; 2];
    for j in 0..2 {
        let l = snap_length((DEFAULT_MARGIN * 2.0 * half[j]).max(2.0 * CAP_SAMPLES * PI / cap[j]));
        sizes[j] = next_smooth_odd((l * xi_max / PI).ceil() as usize);
        lengths[j] = l;
    }
    Ok(GridPlan { lengths, sizes })
}

/// Confirm a plan resolves the cap: frequency spacing `2 pi / L` at most
/// one eighth of each cap width. True by construction; kept as a guard so
/// a config that defeats the policy is rejected up front.
pub fn check_cap_resolution(plan: &GridPlan, eps: f64, c0: f64) -> Result<()> {
    let cap = [c0 * eps, (c0 * eps).sqrt()];
    for j in 0..2 {
        let spacing = TAU / plan.lengths[j];
        let required = cap[j] / CAP_SAMPLES;
        if spacing > required * (1.0 + 1e-12) {
            return Err(SpectralError::UnderResolved {
                axis: j,
                spacing,
                required,
            });
        }
    }
    Ok(())
}
