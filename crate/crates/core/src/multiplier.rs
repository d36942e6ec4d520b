//! Fourier multipliers `m(D)` applied through the FFT.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, SpectralError};
use crate::grid::{fft, ifft, pairwise_sum_by, Field, FourierGrid};
use crate::symbol::DispersionSymbol;

/// Multiplier values on the frequency lattice.
///
/// `real_even` records that the values are real and invariant under
/// `xi -> -xi`; such multipliers map real fields to real fields and the
/// application enforces that.
#[derive(Clone, Debug)]
pub struct Multiplier {
    grid: Arc<FourierGrid>,
    values: Vec<Complex64>,
    real_even: bool,
}

impl Multiplier {
    pub fn grid(&self) -> &Arc<FourierGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_real_even(&self) -> bool {
        self.real_even
    }

    /// Wrap real lattice values; `even` must be established by the caller.
    pub fn from_real_values(grid: &Arc<FourierGrid>, values: Vec<f64>, even: bool) -> Result<Multiplier> {
        if values.len() != grid.site_count() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.site_count(),
                got: values.len(),
            });
        }
        Ok(Multiplier {
            grid: Arc::clone(grid),
            values: values.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
            real_even: even,
        })
    }

    /// Wrap complex lattice values; never treated as real-even.
    pub fn from_complex_values(grid: &Arc<FourierGrid>, values: Vec<Complex64>) -> Result<Multiplier> {
        if values.len() != grid.site_count() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.site_count(),
                got: values.len(),
            });
        }
        Ok(Multiplier {
            grid: Arc::clone(grid),
            values,
            real_even: false,
        })
    }
}

/// `eps / ((h_0 - lambda)^2 + eps^2)`, the imaginary part of the resolvent
/// at `lambda + i eps`.
pub fn delta_multiplier(
    symbol: &DispersionSymbol,
    grid: &Arc<FourierGrid>,
    lambda: f64,
    eps: f64,
) -> Result<Multiplier> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(SpectralError::BadParameter(format!(
            "delta width eps must be positive, got {eps}"
        )));
    }
    if !lambda.is_finite() {
        return Err(SpectralError::BadParameter(format!(
            "level lambda must be finite, got {lambda}"
        )));
    }
    let table = symbol.on_grid(grid)?;
    let even = symbol.is_even_on(grid)?;
    let values = table
        .into_iter()
        .map(|h| {
            let d = h - lambda;
            Complex64::new(eps / (d * d + eps * eps), 0.0)
        })
        .collect();
    Ok(Multiplier {
        grid: Arc::clone(grid),
        values,
        real_even: even,
    })
}

/// `1 / (h_0 - z)`; errors when `z` touches the lattice values of `h_0`.
pub fn resolvent_multiplier(
    symbol: &DispersionSymbol,
    grid: &Arc<FourierGrid>,
    z: Complex64,
) -> Result<Multiplier> {
    let table = symbol.on_grid(grid)?;
    let mut min_dist = f64::INFINITY;
    let values: Vec<Complex64> = table
        .into_iter()
        .map(|h| {
            let d = Complex64::new(h, 0.0) - z;
            min_dist = min_dist.min(d.norm());
            d.inv()
        })
        .collect();
    if !(min_dist > 0.0) || !min_dist.is_finite() {
        return Err(SpectralError::BadParameter(format!(
            "resolvent point {z} meets the lattice spectrum of the symbol"
        )));
    }
    Ok(Multiplier {
        grid: Arc::clone(grid),
        values,
        real_even: false,
    })
}

/// Apply `m(D) f = ifft(m * fft(f))`.
///
/// When the multiplier is real and even and the input is exactly real, the
/// output is real up to roundoff; an imaginary residue below `1e-12`
/// relative is discarded and anything larger is an error.
pub fn apply_multiplier(m: &Multiplier, f: &Field) -> Result<Field> {
    if m.grid.as_ref() != f.grid().as_ref() {
        return Err(SpectralError::GridMismatch);
    }
    let input_real = m.real_even && f.is_real();
    let mut hat = fft(f);
    for (v, c) in hat.values_mut().iter_mut().zip(&m.values) {
        *v *= c;
    }
    let mut out = ifft(&hat);
    if input_real {
        enforce_real(&mut out)?;
    }
    Ok(out)
}

/// Zero an imaginary part that is below `1e-12` of the real part in `L^2`;
/// error if it is larger.
pub fn enforce_real(f: &mut Field) -> Result<()> {
    let n = f.values().len();
    let re2 = pairwise_sum_by(n, |i| {
        let v = f.values()[i];
        v.re * v.re
    });
    let im2 = pairwise_sum_by(n, |i| {
        let v = f.values()[i];
        v.im * v.im
    });
    if im2 == 0.0 {
        return Ok(());
    }
    let rel = (im2 / re2.max(f64::MIN_POSITIVE)).sqrt();
    if rel > 1e-12 {
        return Err(SpectralError::ResidualImaginary { rel });
    }
    for v in f.values_mut() {
        v.im = 0.0;
    }
    Ok(())
}
