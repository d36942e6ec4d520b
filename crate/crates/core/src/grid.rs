//! Periodic Fourier grids and complex fields living on them.
//!
//! A grid is the box `prod_j [-L_j/2, L_j/2)` sampled at an odd number of
//! points per axis, stored in FFT order (index 0 is the origin).  Odd sizes
//! keep the frequency lattice symmetric under `xi -> -xi`, which is what lets
//! real even multipliers preserve real fields.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, SpectralError};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Sampled periodic box with per-axis FFT plans.
pub struct FourierGrid {
    lengths: Vec<f64>,
    sizes: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierGrid")
            .field("lengths", &self.lengths)
            .field("sizes", &self.sizes)
            .finish()
    }
}

impl PartialEq for FourierGrid {
    fn eq(&self, other: &Self) -> bool {
        self.lengths == other.lengths && self.sizes == other.sizes
    }
}

/// Validate box data and build a grid with FFT plans for every axis.
pub fn build_grid(dimension: usize, box_lengths: &[f64], sizes: &[usize]) -> Result<Arc<FourierGrid>> {
    if dimension == 0 {
        return Err(SpectralError::EmptyGrid);
    }
    if box_lengths.len() != dimension {
        return Err(SpectralError::DimensionMismatch {
            expected: dimension,
            got: box_lengths.len(),
        });
    }
    if sizes.len() != dimension {
        return Err(SpectralError::DimensionMismatch {
            expected: dimension,
            got: sizes.len(),
        });
    }
    for (axis, (&l, &n)) in box_lengths.iter().zip(sizes).enumerate() {
        if !(l > 0.0) || !l.is_finite() {
            return Err(SpectralError::NonPositiveLength { axis, length: l });
        }
        if n % 2 == 0 {
            return Err(SpectralError::EvenGridSize { axis, size: n });
        }
        if n < 3 {
            return Err(SpectralError::BadParameter(format!(
                "grid needs at least 3 points per axis, axis {axis} has {n}"
            )));
        }
    }
    let mut planner = FftPlanner::new();
    let forward = sizes.iter().map(|&n| planner.plan_fft_forward(n)).collect();
    let inverse = sizes.iter().map(|&n| planner.plan_fft_inverse(n)).collect();
    Ok(Arc::new(FourierGrid {
        lengths: box_lengths.to_vec(),
        sizes: sizes.to_vec(),
        forward,
        inverse,
    }))
}

impl FourierGrid {
    pub fn dimension(&self) -> usize {
        self.sizes.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Total number of lattice sites.
    pub fn site_count(&self) -> usize {
        self.sizes.iter().product()
    }

    /// Volume of one cell, `prod_j L_j/N_j`.
    pub fn cell_volume(&self) -> f64 {
        self.lengths
            .iter()
            .zip(&self.sizes)
            .map(|(l, &n)| l / n as f64)
            .product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.sizes[axis] as f64
    }

    /// Frequency lattice spacing `2 pi / L_j`.
    pub fn freq_spacing(&self, axis: usize) -> f64 {
        TWO_PI / self.lengths[axis]
    }

    /// Signed index in `[-(N-1)/2, (N-1)/2]` for FFT-order index `k`.
    fn signed_index(&self, axis: usize, k: usize) -> i64 {
        let n = self.sizes[axis];
        if k <= (n - 1) / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// Physical coordinate of FFT-order index `k` along `axis`.
    pub fn coordinate(&self, axis: usize, k: usize) -> f64 {
        self.signed_index(axis, k) as f64 * self.spacing(axis)
    }

    /// Frequency of FFT-order index `k` along `axis`.
    pub fn frequency(&self, axis: usize, k: usize) -> f64 {
        self.signed_index(axis, k) as f64 * self.freq_spacing(axis)
    }

    /// Coordinates of every site along one axis, FFT order.
    pub fn coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.sizes[axis]).map(|k| self.coordinate(axis, k)).collect()
    }

    /// Frequencies of every site along one axis, FFT order.
    pub fn frequencies(&self, axis: usize) -> Vec<f64> {
        (0..self.sizes[axis]).map(|k| self.frequency(axis, k)).collect()
    }

    /// Call `f` with the flat index and multi-index of every site, row-major.
    pub fn for_each_site(&self, mut f: impl FnMut(usize, &[usize])) {
        let d = self.dimension();
        let mut idx = vec![0usize; d];
        let total = self.site_count();
        for flat in 0..total {
            f(flat, &idx);
            for axis in (0..d).rev() {
                idx[axis] += 1;
                if idx[axis] < self.sizes[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }

    /// Evaluate `f(x)` over the physical lattice into a flat vector.
    pub fn tabulate_coords(&self, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
        let d = self.dimension();
        let mut point = vec![0.0; d];
        let mut out = Vec::with_capacity(self.site_count());
        self.for_each_site(|_, idx| {
            for a in 0..d {
                point[a] = self.coordinate(a, idx[a]);
            }
            out.push(f(&point));
        });
        out
    }

    /// Evaluate `f(xi)` over the frequency lattice into a flat vector.
    pub fn tabulate_freqs(&self, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
        let d = self.dimension();
        let mut point = vec![0.0; d];
        let mut out = Vec::with_capacity(self.site_count());
        self.for_each_site(|_, idx| {
            for a in 0..d {
                point[a] = self.frequency(a, idx[a]);
            }
            out.push(f(&point));
        });
        out
    }

    /// In-place forward DFT along every axis, unitary normalization.
    pub(crate) fn fft_in_place(&self, values: &mut [Complex64]) {
        self.transform(values, false);
        self.unitary_rescale(values);
    }

    /// In-place inverse DFT along every axis, unitary normalization.
    pub(crate) fn ifft_in_place(&self, values: &mut [Complex64]) {
        self.transform(values, true);
        self.unitary_rescale(values);
    }

    // Symmetric 1/sqrt(N) on both directions so Parseval holds without
    // bookkeeping anywhere downstream.
    fn unitary_rescale(&self, values: &mut [Complex64]) {
        let scale = 1.0 / (self.site_count() as f64).sqrt();
        for v in values.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, values: &mut [Complex64], inverse: bool) {
        assert_eq!(values.len(), self.site_count(), "field/grid size mismatch");
        let d = self.dimension();
        let mut scratch: Vec<Complex64> = Vec::new();
        for axis in 0..d {
            let n = self.sizes[axis];
            let plan = if inverse { &self.inverse[axis] } else { &self.forward[axis] };
            let mut work = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            // stride between consecutive entries of a lane along `axis`
            let stride: usize = self.sizes[axis + 1..].iter().product();
            let outer: usize = self.sizes[..axis].iter().product();
            if stride == 1 {
                for chunk in values.chunks_exact_mut(n) {
                    plan.process_with_scratch(chunk, &mut work);
                }
            } else {
                scratch.resize(n, Complex64::default());
                for o in 0..outer {
                    let base_o = o * n * stride;
                    for i in 0..stride {
                        let base = base_o + i;
                        for k in 0..n {
                            scratch[k] = values[base + k * stride];
                        }
                        plan.process_with_scratch(&mut scratch, &mut work);
                        for k in 0..n {
                            values[base + k * stride] = scratch[k];
                        }
                    }
                }
            }
        }
    }
}

/// Complex scalar field sampled on a grid, row-major FFT order.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Arc<FourierGrid>,
    values: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: &Arc<FourierGrid>) -> Field {
        Field {
            grid: Arc::clone(grid),
            values: vec![Complex64::default(); grid.site_count()],
        }
    }

    pub fn from_values(grid: &Arc<FourierGrid>, values: Vec<Complex64>) -> Result<Field> {
        if values.len() != grid.site_count() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.site_count(),
                got: values.len(),
            });
        }
        Ok(Field {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn from_real(grid: &Arc<FourierGrid>, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.site_count() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.site_count(),
                got: values.len(),
            });
        }
        Ok(Field {
            grid: Arc::clone(grid),
            values: values.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        })
    }

    pub fn grid(&self) -> &Arc<FourierGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `L^2` norm with the cell-volume measure.
    pub fn norm(&self) -> f64 {
        let sq = pairwise_sum_by(self.values.len(), |i| self.values[i].norm_sqr());
        (self.grid.cell_volume() * sq).sqrt()
    }

    /// Largest pointwise modulus.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn scale(&mut self, a: f64) {
        for v in &mut self.values {
            *v *= a;
        }
    }

    /// Pointwise product with another field on the same grid.
    pub fn pointwise_mul(&self, other: &Field) -> Result<Field> {
        if self.grid.as_ref() != other.grid.as_ref() {
            return Err(SpectralError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Field {
            grid: Arc::clone(&self.grid),
            values,
        })
    }
}

/// `integral conj(f) g` with the cell-volume measure.
pub fn field_inner(f: &Field, g: &Field) -> Result<Complex64> {
    if f.grid.as_ref() != g.grid.as_ref() {
        return Err(SpectralError::GridMismatch);
    }
    let re = pairwise_sum_by(f.values.len(), |i| {
        let a = f.values[i];
        let b = g.values[i];
        a.re * b.re + a.im * b.im
    });
    let im = pairwise_sum_by(f.values.len(), |i| {
        let a = f.values[i];
        let b = g.values[i];
        a.re * b.im - a.im * b.re
    });
    Ok(f.grid.cell_volume() * Complex64::new(re, im))
}

/// Pairwise summation of `f(0..n)`; error grows like log(n) instead of n.
pub fn pairwise_sum_by(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    fn go(lo: usize, hi: usize, f: &impl Fn(usize) -> f64) -> f64 {
        if hi - lo <= 64 {
            let mut s = 0.0;
            for i in lo..hi {
                s += f(i);
            }
            s
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, f) + go(mid, hi, f)
        }
    }
    go(0, n, &f)
}

/// Forward DFT of a field (unnormalized, frequency side in FFT order).
pub fn fft(f: &Field) -> Field {
    let grid = Arc::clone(&f.grid);
    let mut values = f.values.clone();
    grid.fft_in_place(&mut values);
    Field { grid, values }
}

/// Inverse DFT of a field, scaled so `ifft(fft(f)) == f`.
pub fn ifft(f: &Field) -> Field {
    let grid = Arc::clone(&f.grid);
    let mut values = f.values.clone();
    grid.ifft_in_place(&mut values);
    Field { grid, values }
}
