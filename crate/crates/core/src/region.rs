//! Localization regions and their lattice indicator fields.

use std::sync::Arc;

use crate::error::{Result, SpectralError};
use crate::grid::{Field, FourierGrid};

#[derive(Clone, Debug, PartialEq)]
pub enum RegionShape {
    /// Box `|x_1| < axis_scale * M/eps`, `|x_j| < sqrt(M/eps)` transversally.
    Tube,
    /// Ball `|x - center| < 1/eps`.
    Ball,
}

/// Localization region tied to the resolution scale `eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionSpec {
    pub shape: RegionShape,
    pub eps: f64,
    /// Tube length parameter; ignored for balls.
    pub m: f64,
    /// Region center, one entry per axis; empty means the origin.
    pub center: Vec<f64>,
    /// Stretch of the tube axis; 1 except when forging at levels away from
    /// the unit shell, where the group speed scales the length.
    pub axis_scale: f64,
}

impl RegionSpec {
    pub fn tube(eps: f64, m: f64) -> RegionSpec {
        RegionSpec {
            shape: RegionShape::Tube,
            eps,
            m,
            center: Vec::new(),
            axis_scale: 1.0,
        }
    }

    pub fn ball(eps: f64) -> RegionSpec {
        RegionSpec {
            shape: RegionShape::Ball,
            eps,
            m: 1.0,
            center: Vec::new(),
            axis_scale: 1.0,
        }
    }

    fn validate(&self, dimension: usize) -> Result<()> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(SpectralError::BadParameter(format!(
                "region eps must be positive, got {}",
                self.eps
            )));
        }
        if self.shape == RegionShape::Tube && (!(self.m >= 1.0) || !self.m.is_finite()) {
            return Err(SpectralError::BadParameter(format!(
                "tube stretch M must be at least 1, got {}",
                self.m
            )));
        }
        if !(self.axis_scale > 0.0) || !self.axis_scale.is_finite() {
            return Err(SpectralError::BadParameter(format!(
                "axis_scale must be positive, got {}",
                self.axis_scale
            )));
        }
        if !self.center.is_empty() && self.center.len() != dimension {
            return Err(SpectralError::DimensionMismatch {
                expected: dimension,
                got: self.center.len(),
            });
        }
        Ok(())
    }

    /// Half-extent of the region along each axis.
    pub fn half_lengths(&self, dimension: usize) -> Result<Vec<f64>> {
        self.validate(dimension)?;
        match self.shape {
            RegionShape::Tube => {
                let long = self.axis_scale * self.m / self.eps;
                let short = (self.m / self.eps).sqrt();
                Ok((0..dimension)
                    .map(|a| if a == 0 { long } else { short })
                    .collect())
            }
            RegionShape::Ball => Ok(vec![1.0 / self.eps; dimension]),
        }
    }

    fn center_coord(&self, axis: usize) -> f64 {
        self.center.get(axis).copied().unwrap_or(0.0)
    }
}

/// 0/1 indicator of the region on the grid, as a real field.
///
/// Errors when the region does not fit inside the periodic box, since the
/// indicator would wrap around and stop being an indicator of the region.
pub fn region_indicator(spec: &RegionSpec, grid: &Arc<FourierGrid>) -> Result<Field> {
    let d = grid.dimension();
    let half = spec.half_lengths(d)?;
    for (axis, &h) in half.iter().enumerate() {
        let budget = grid.lengths()[axis] / 2.0;
        let c = spec.center_coord(axis).abs();
        if h + c > budget {
            return Err(SpectralError::BadParameter(format!(
                "region half-extent {h} plus center offset {c} exceeds the box half-length {budget} on axis {axis}"
            )));
        }
    }
    let values = match spec.shape {
        RegionShape::Tube => grid.tabulate_coords(|x| {
            let inside = x
                .iter()
                .enumerate()
                .all(|(a, &xa)| (xa - spec.center_coord(a)).abs() < half[a]);
            if inside {
                1.0
            } else {
                0.0
            }
        }),
        RegionShape::Ball => {
            let r2 = (1.0 / spec.eps) * (1.0 / spec.eps);
            grid.tabulate_coords(|x| {
                let d2: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(a, &xa)| {
                        let t = xa - spec.center_coord(a);
                        t * t
                    })
                    .sum();
                if d2 < r2 {
                    1.0
                } else {
                    0.0
                }
            })
        }
    };
    Field::from_real(grid, values)
}

/// Lattice measure of the region: cell volume times the site count of the
/// indicator's support.
pub fn region_measure(indicator: &Field) -> f64 {
    let cells = indicator.values().iter().filter(|v| v.re != 0.0).count();
    cells as f64 * indicator.grid().cell_volume()
}
