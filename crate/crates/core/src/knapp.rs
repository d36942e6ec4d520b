//! Knapp-type wavepackets: unit-norm states whose Fourier support is a
//! plate of size `c0*eps` by `sqrt(c0*eps)` around a shell point.

use std::sync::Arc;

use crate::error::{Result, SpectralError};
use crate::grid::{ifft, Field, FourierGrid};
use crate::multiplier::Multiplier;
use crate::power::apply_k;
use crate::symbol::DispersionSymbol;

/// Anisotropic cap around `base_point`, matching the curvature of the shell:
/// width `c0*eps` along the base direction and `sqrt(c0*eps)` transversally.
#[derive(Clone, Debug, PartialEq)]
pub struct KnappSpec {
    pub eps: f64,
    pub c0: f64,
    /// Cap center on the frequency side; transverse components must vanish.
    pub base_point: Vec<f64>,
}

impl KnappSpec {
    pub fn new(eps: f64, c0: f64, base_point: Vec<f64>) -> KnappSpec {
        KnappSpec { eps, c0, base_point }
    }

    /// Cap centered at `(1, 0, ..., 0)` on the unit shell.
    pub fn unit_shell(eps: f64, c0: f64, dimension: usize) -> KnappSpec {
        let mut base_point = vec![0.0; dimension];
        base_point[0] = 1.0;
        KnappSpec { eps, c0, base_point }
    }

    fn validate(&self, grid: &FourierGrid) -> Result<()> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(SpectralError::BadParameter(format!(
                "packet eps must be positive, got {}",
                self.eps
            )));
        }
        if !(self.c0 > 0.0) || !self.c0.is_finite() {
            return Err(SpectralError::BadParameter(format!(
                "cap constant c0 must be positive, got {}",
                self.c0
            )));
        }
        if self.base_point.len() != grid.dimension() {
            return Err(SpectralError::DimensionMismatch {
                expected: grid.dimension(),
                got: self.base_point.len(),
            });
        }
        if self.base_point[1..].iter().any(|&b| b != 0.0) {
            return Err(SpectralError::Unsupported(
                "cap base point with nonzero transverse components".into(),
            ));
        }
        let cap = self.c0 * self.eps;
        for axis in 0..grid.dimension() {
            let required = if axis == 0 { cap / 8.0 } else { cap.sqrt() / 8.0 };
            let spacing = grid.freq_spacing(axis);
            if spacing > required {
                return Err(SpectralError::UnderResolved {
                    axis,
                    spacing,
                    required,
                });
            }
        }
        Ok(())
    }
}

/// `exp(-1/t)` continued by zero.
fn decay(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 at `t <= 0`, 1 at `t >= 1`.
fn smooth_step(t: f64) -> f64 {
    let a = decay(t);
    let b = decay(1.0 - t);
    a / (a + b)
}

/// Radial profile: 1 on `[0, 1]`, 0 beyond 2, smooth in between.
pub fn bump(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r < 2.0 {
        smooth_step(2.0 - r)
    } else {
        0.0
    }
}

/// Fourier coefficients of the packet: the bump evaluated on the cap's
/// anisotropically rescaled radius.
pub fn knapp_coefficients(spec: &KnappSpec, grid: &Arc<FourierGrid>) -> Result<Multiplier> {
    spec.validate(grid)?;
    let cap = spec.c0 * spec.eps;
    let cap_t = cap.sqrt();
    let base = spec.base_point.clone();
    let values = grid.tabulate_freqs(|xi| {
        let mut r2 = 0.0;
        for (a, &x) in xi.iter().enumerate() {
            let u = if a == 0 { (x - base[0]) / cap } else { x / cap_t };
            r2 += u * u;
        }
        bump(r2.sqrt())
    });
    // The cap sits away from the frequency origin, so these coefficients are
    // not even; the packet itself is complex.
    Multiplier::from_real_values(grid, values, false)
}

/// Unit-norm Knapp wavepacket on the grid.
pub fn knapp_wavepacket(spec: &KnappSpec, grid: &Arc<FourierGrid>) -> Result<Field> {
    let coef = knapp_coefficients(spec, grid)?;
    let hat = Field::from_values(grid, coef.values().to_vec())?;
    let mut f = ifft(&hat);
    let n = f.norm();
    if !(n > 0.0) {
        return Err(SpectralError::Degenerate(
            "knapp packet vanished; cap missed the frequency lattice".into(),
        ));
    }
    f.scale(1.0 / n);
    Ok(f)
}

/// Largest deviation `|h_0 - h_0(base)|` over the cap's support, divided by
/// the cap width `c0*eps`.
pub fn cap_symbol_deviation(
    spec: &KnappSpec,
    grid: &Arc<FourierGrid>,
    symbol: &DispersionSymbol,
) -> Result<f64> {
    let coef = knapp_coefficients(spec, grid)?;
    let table = symbol.on_grid(grid)?;
    let lambda = symbol.eval(&spec.base_point)?;
    let mut max_dev = 0.0f64;
    for (c, h) in coef.values().iter().zip(&table) {
        if c.re > 0.0 {
            max_dev = max_dev.max((h - lambda).abs());
        }
    }
    Ok(max_dev / (spec.c0 * spec.eps))
}

/// Rayleigh-type lower bound `eps * |K f| / |f|` for the top eigenvalue of
/// `eps K`, witnessed by the Knapp packet.
pub fn knapp_lower_bound(
    spec: &KnappSpec,
    chi: &Field,
    symbol: &DispersionSymbol,
) -> Result<f64> {
    let grid = chi.grid();
    let f = knapp_wavepacket(spec, grid)?;
    let lambda = symbol.eval(&spec.base_point)?;
    let kf = apply_k(chi, symbol, lambda, spec.eps, &f)?;
    Ok(spec.eps * kf.norm())
}

/// Fraction of the packet's mass inside the region, `|chi f|^2 / |f|^2`.
pub fn packet_region_mass(spec: &KnappSpec, chi: &Field) -> Result<f64> {
    let f = knapp_wavepacket(spec, chi.grid())?;
    let cf = chi.pointwise_mul(&f)?;
    Ok(cf.norm().powi(2))
}

/// Radial bump in frequency, `bump(|xi|/radius)`; used as a smooth low-pass
/// seed for iterations.
pub fn radial_bump_field(grid: &Arc<FourierGrid>, radius: f64) -> Result<Field> {
    if !(radius > 0.0) {
        return Err(SpectralError::BadParameter(format!(
            "bump radius must be positive, got {radius}"
        )));
    }
    let values = grid.tabulate_freqs(|xi| {
        let r: f64 = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        bump(r / radius)
    });
    let hat = Field::from_real(grid, values)?;
    Ok(ifft(&hat))
}
