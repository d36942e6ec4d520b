//! Dispersion relations `h_0(xi)` for the free operator `h_0(D)`.

use std::sync::Arc;

use crate::error::{Result, SpectralError};
use crate::grid::FourierGrid;

/// Closed-form or tabulated dispersion relation.
#[derive(Clone, Debug)]
pub enum DispersionSymbol {
    /// `|xi|^2`
    Laplacian,
    /// `|xi|^s` with `s > 0`
    Fractional { s: f64 },
    /// Values on the frequency lattice of one fixed grid; evaluation off
    /// that lattice is an error rather than an interpolation.
    Tabulated {
        grid: Arc<FourierGrid>,
        values: Arc<Vec<f64>>,
    },
}

impl DispersionSymbol {
    pub fn fractional(s: f64) -> Result<DispersionSymbol> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(SpectralError::BadParameter(format!(
                "fractional order s must be positive, got {s}"
            )));
        }
        Ok(DispersionSymbol::Fractional { s })
    }

    pub fn tabulated(grid: &Arc<FourierGrid>, values: Vec<f64>) -> Result<DispersionSymbol> {
        if values.len() != grid.site_count() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.site_count(),
                got: values.len(),
            });
        }
        Ok(DispersionSymbol::Tabulated {
            grid: Arc::clone(grid),
            values: Arc::new(values),
        })
    }

    /// Order `s` of the homogeneous symbols; the Laplacian is `s = 2`.
    pub fn order(&self) -> Option<f64> {
        match self {
            DispersionSymbol::Laplacian => Some(2.0),
            DispersionSymbol::Fractional { s } => Some(*s),
            DispersionSymbol::Tabulated { .. } => None,
        }
    }

    /// Radius of the level set `{h_0 = lambda}` for homogeneous symbols.
    pub fn shell_radius(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(SpectralError::BadParameter(format!(
                "level lambda must be positive, got {lambda}"
            )));
        }
        match self.order() {
            Some(s) => Ok(lambda.powf(1.0 / s)),
            None => Err(SpectralError::Unsupported(
                "shell radius of a tabulated symbol".into(),
            )),
        }
    }

    /// Evaluate at one frequency point.
    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        match self {
            DispersionSymbol::Laplacian => Ok(xi.iter().map(|x| x * x).sum()),
            DispersionSymbol::Fractional { s } => {
                if !(*s > 0.0) {
                    return Err(SpectralError::BadParameter(format!(
                        "fractional order s must be positive, got {s}"
                    )));
                }
                let r2: f64 = xi.iter().map(|x| x * x).sum();
                Ok(r2.sqrt().powf(*s))
            }
            DispersionSymbol::Tabulated { grid, values } => {
                if xi.len() != grid.dimension() {
                    return Err(SpectralError::DimensionMismatch {
                        expected: grid.dimension(),
                        got: xi.len(),
                    });
                }
                let mut flat = 0usize;
                for (axis, &x) in xi.iter().enumerate() {
                    let dxi = grid.freq_spacing(axis);
                    let signed = (x / dxi).round() as i64;
                    let n = grid.sizes()[axis] as i64;
                    let half = (n - 1) / 2;
                    let exact = signed as f64 * dxi;
                    if signed.abs() > half || (x - exact).abs() > 1e-9 * dxi.max(x.abs()) {
                        return Err(SpectralError::OffLattice(xi.to_vec()));
                    }
                    let k = if signed >= 0 { signed } else { signed + n } as usize;
                    flat = flat * grid.sizes()[axis] + k;
                }
                Ok(values[flat])
            }
        }
    }

    /// Tabulate over a grid's full frequency lattice, row-major FFT order.
    pub fn on_grid(&self, grid: &Arc<FourierGrid>) -> Result<Vec<f64>> {
        match self {
            DispersionSymbol::Laplacian => {
                Ok(grid.tabulate_freqs(|xi| xi.iter().map(|x| x * x).sum()))
            }
            DispersionSymbol::Fractional { s } => {
                if !(*s > 0.0) {
                    return Err(SpectralError::BadParameter(format!(
                        "fractional order s must be positive, got {s}"
                    )));
                }
                let s = *s;
                Ok(grid.tabulate_freqs(|xi| {
                    let r2: f64 = xi.iter().map(|x| x * x).sum();
                    r2.sqrt().powf(s)
                }))
            }
            DispersionSymbol::Tabulated { grid: own, values } => {
                if own.as_ref() != grid.as_ref() {
                    return Err(SpectralError::GridMismatch);
                }
                Ok(values.as_ref().clone())
            }
        }
    }

    /// Whether the lattice table satisfies `h_0(-xi) == h_0(xi)` exactly.
    pub fn is_even_on(&self, grid: &Arc<FourierGrid>) -> Result<bool> {
        match self {
            DispersionSymbol::Laplacian | DispersionSymbol::Fractional { .. } => Ok(true),
            DispersionSymbol::Tabulated { .. } => {
                let table = self.on_grid(grid)?;
                let sizes = grid.sizes().to_vec();
                let mut even = true;
                grid.for_each_site(|flat, idx| {
                    if !even {
                        return;
                    }
                    let mut mirror = 0usize;
                    for (axis, &k) in idx.iter().enumerate() {
                        let n = sizes[axis];
                        let mk = if k == 0 { 0 } else { n - k };
                        mirror = mirror * n + mk;
                    }
                    if table[flat] != table[mirror] {
                        even = false;
                    }
                });
                Ok(even)
            }
        }
    }
}
