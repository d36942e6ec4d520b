//! Radial decay profile of the shell-localized resolvent kernel
//! `eta(D) (H_0 - z)^{-1}`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::bounds::fit_power_law;
use crate::error::{Result, SpectralError};
use crate::grid::{ifft, Field, FourierGrid};
use crate::knapp::bump;
use crate::multiplier::Multiplier;
use crate::symbol::DispersionSymbol;

/// Smooth frequency cutoff equal to 1 where `|sqrt(h_0) - sqrt(lambda)| <=
/// width` and 0 beyond twice that.
pub fn shell_cutoff(
    symbol: &DispersionSymbol,
    grid: &Arc<FourierGrid>,
    lambda: f64,
    width: f64,
) -> Result<Multiplier> {
    if !(lambda > 0.0 && width > 0.0) {
        return Err(SpectralError::BadParameter(format!(
            "shell cutoff needs lambda > 0 and width > 0, got {lambda}, {width}"
        )));
    }
    let table = symbol.on_grid(grid)?;
    let sl = lambda.sqrt();
    let values = table
        .into_iter()
        .map(|h| bump((h.max(0.0).sqrt() - sl).abs() / width))
        .collect();
    let even = symbol.is_even_on(grid)?;
    Multiplier::from_real_values(grid, values, even)
}

/// Shell-maxima envelope of the kernel with its power-law fit.
#[derive(Clone, Debug)]
pub struct DecayProfile {
    /// Bin-center radii.
    pub radii: Vec<f64>,
    /// Largest kernel modulus in each radial bin.
    pub envelope: Vec<f64>,
    /// Exponent of the power-law fit of the envelope.
    pub fitted_exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Radial window the fit used.
    pub fit_range: (f64, f64),
    /// `envelope(2/eps) / envelope(1/(2*eps))`: how much the absorptive
    /// scale `1/eps` suppresses the tail beyond it.
    pub suppression_ratio: f64,
}

/// Compute the kernel `x -> (2 pi)^{-d} int eta/(h_0 - z) e^{i x xi} d xi`
/// as the scaled inverse FFT of the multiplier, take the maximum modulus in
/// each radial bin of width one cell, and fit `r^p` on the window between
/// `5` cells and the absorptive scale `1/(2 eps)`.
///
/// `eta` must be a genuine shell cutoff: real, within `[0, 1]`, equal to 1
/// near `{h_0 = lambda}`, and vanishing far from it; anything else makes
/// the profile meaningless and is rejected.
pub fn kernel_decay_profile(
    symbol: &DispersionSymbol,
    grid: &Arc<FourierGrid>,
    lambda: f64,
    eps: f64,
    eta: &Multiplier,
) -> Result<DecayProfile> {
    if !(lambda > 0.0 && eps > 0.0) {
        return Err(SpectralError::BadParameter(format!(
            "need lambda > 0 and eps > 0, got {lambda}, {eps}"
        )));
    }
    if eta.grid().as_ref() != grid.as_ref() {
        return Err(SpectralError::GridMismatch);
    }
    let table = symbol.on_grid(grid)?;
    let sl = lambda.sqrt();
    let mut max_shell_gap = 0.0f64;
    let mut far_max = 0.0f64;
    for (c, h) in eta.values().iter().zip(&table) {
        if c.im != 0.0 || c.re < 0.0 || c.re > 1.0 {
            return Err(SpectralError::BadParameter(
                "shell cutoff values must be real and lie in [0, 1]".into(),
            ));
        }
        let gap = (h.max(0.0).sqrt() - sl).abs();
        if gap <= 0.05 * sl {
            max_shell_gap = max_shell_gap.max((c.re - 1.0).abs());
        }
        if gap >= 2.0 * sl {
            far_max = far_max.max(c.re);
        }
    }
    if max_shell_gap > 0.0 {
        return Err(SpectralError::BadParameter(
            "cutoff must equal 1 near the shell {h_0 = lambda}".into(),
        ));
    }
    if far_max > 0.0 {
        return Err(SpectralError::BadParameter(
            "cutoff must vanish far from the shell; a global cutoff measures the box, not the kernel".into(),
        ));
    }

    let z = Complex64::new(lambda, eps);
    let mut hat = Field::zeros(grid);
    for ((v, c), h) in hat.values_mut().iter_mut().zip(eta.values()).zip(&table) {
        *v = c.re / (Complex64::new(*h, 0.0) - z);
    }
    let mut kernel = ifft(&hat);
    // continuum normalization: the unitary inverse transform carries
    // 1/sqrt(N); the integral kernel needs the extra 1/(sqrt(N) cellvol)
    let sites = grid.site_count() as f64;
    kernel.scale(1.0 / (sites.sqrt() * grid.cell_volume()));

    // radial bins one cell wide
    let d = grid.dimension();
    let dr = (0..d).map(|a| grid.spacing(a)).fold(0.0f64, f64::max);
    let max_r = (0..d)
        .map(|a| grid.lengths()[a] / 2.0)
        .map(|h| h * h)
        .sum::<f64>()
        .sqrt();
    let bins = (max_r / dr).ceil() as usize + 1;
    let mut envelope = vec![0.0f64; bins];
    let vals = kernel.values();
    grid.for_each_site(|flat, idx| {
        let mut r2 = 0.0;
        for a in 0..d {
            let x = grid.coordinate(a, idx[a]);
            r2 += x * x;
        }
        let bin = (r2.sqrt() / dr) as usize;
        let a = vals[flat].norm();
        if a > envelope[bin] {
            envelope[bin] = a;
        }
    });
    let radii: Vec<f64> = (0..bins).map(|k| (k as f64 + 0.5) * dr).collect();

    let fit_lo = 5.0 * dr;
    let fit_hi = 1.0 / (2.0 * eps);
    let points: Vec<(f64, f64)> = radii
        .iter()
        .zip(&envelope)
        .filter(|&(&r, &e)| r >= fit_lo && r <= fit_hi && e > 0.0)
        .map(|(&r, &e)| (r, e))
        .collect();
    if points.len() < 2 {
        return Err(SpectralError::BadParameter(format!(
            "decay fit window [{fit_lo:.3}, {fit_hi:.3}] holds fewer than 2 bins; eps too large or box too small"
        )));
    }
    let (fitted_exponent, intercept, r_squared) = fit_power_law(&points)?;

    let near_idx = (fit_hi / dr) as usize;
    let far_idx = (2.0 / eps / dr) as usize;
    if far_idx >= envelope.len() || envelope[near_idx] == 0.0 {
        return Err(SpectralError::BadParameter(
            "box does not reach twice the absorptive scale 2/eps".into(),
        ));
    }
    let suppression_ratio = envelope[far_idx] / envelope[near_idx];

    Ok(DecayProfile {
        radii,
        envelope,
        fitted_exponent,
        intercept,
        r_squared,
        fit_range: (fit_lo, fit_hi),
        suppression_ratio,
    })
}
