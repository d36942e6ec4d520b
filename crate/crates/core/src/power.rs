//! The localized spectral operator `K = chi delta(H_0) chi` and power
//! iteration for its top eigenpair.

use std::sync::Arc;

use crate::error::{Result, SpectralError};
use crate::grid::{field_inner, Field, FourierGrid};
use crate::knapp::radial_bump_field;
use crate::multiplier::{apply_multiplier, delta_multiplier, Multiplier};
use crate::symbol::DispersionSymbol;

/// `K = chi delta(H_0) chi` with a precomputed multiplier; reuse across
/// iterations to avoid rebuilding the lattice table per apply.
pub struct BsOperator {
    chi: Field,
    delta: Multiplier,
}

impl BsOperator {
    pub fn new(
        chi: &Field,
        symbol: &DispersionSymbol,
        lambda: f64,
        eps: f64,
    ) -> Result<BsOperator> {
        let delta = delta_multiplier(symbol, chi.grid(), lambda, eps)?;
        Ok(BsOperator {
            chi: chi.clone(),
            delta,
        })
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        let cut = self.chi.pointwise_mul(f)?;
        let spread = apply_multiplier(&self.delta, &cut)?;
        self.chi.pointwise_mul(&spread)
    }

    pub fn chi(&self) -> &Field {
        &self.chi
    }
}

/// One application of `K` to a field.
pub fn apply_k(
    chi: &Field,
    symbol: &DispersionSymbol,
    lambda: f64,
    eps: f64,
    f: &Field,
) -> Result<Field> {
    BsOperator::new(chi, symbol, lambda, eps)?.apply(f)
}

/// Result of a power iteration.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub mu: f64,
    pub phi: Field,
    pub iterations: usize,
    pub converged: bool,
    /// Final relative defect `|K phi - mu phi| / mu`.
    pub residual: f64,
}

/// Power-iterate an abstract positive operator.
///
/// `real_mode` keeps the iterate exactly real, which is valid when the
/// operator maps real fields to real fields.  Stops when the relative
/// defect drops to `tol`; running out of iterations is reported through
/// `converged`, not as an error.
pub fn power_iterate(
    apply: &mut dyn FnMut(&Field) -> Result<Field>,
    init: &Field,
    tol: f64,
    max_iter: usize,
    real_mode: bool,
) -> Result<(EigenPair, Vec<f64>)> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(SpectralError::BadParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(SpectralError::BadParameter("max_iter must be at least 1".into()));
    }
    let mut v = init.clone();
    if real_mode {
        for c in v.values_mut() {
            c.im = 0.0;
        }
    }
    let n0 = v.norm();
    if !(n0 > 0.0) {
        return Err(SpectralError::ZeroInit);
    }
    v.scale(1.0 / n0);

    let mut trace = Vec::new();
    let mut mu = 0.0;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let mut w = apply(&v)?;
        if real_mode {
            for c in w.values_mut() {
                c.im = 0.0;
            }
        }
        mu = field_inner(&v, &w)?.re;
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(SpectralError::Degenerate(format!(
                "Rayleigh quotient left the positive axis: {mu}"
            )));
        }
        trace.push(mu);
        let mut defect = w.clone();
        for (d, x) in defect.values_mut().iter_mut().zip(v.values()) {
            *d -= mu * x;
        }
        residual = defect.norm() / mu;
        let nw = w.norm();
        if !(nw > 0.0) {
            return Err(SpectralError::Degenerate("iterate collapsed to zero".into()));
        }
        w.scale(1.0 / nw);
        v = w;
        if residual <= tol {
            converged = true;
            break;
        }
    }
    Ok((
        EigenPair {
            mu,
            phi: v,
            iterations,
            converged,
            residual,
        },
        trace,
    ))
}

/// Top eigenpair of `K = chi delta(H_0) chi` by power iteration.
///
/// The initial vector is cut to the region first; a vector that vanishes
/// after the cut cannot seed the iteration and is an error.  `K` preserves
/// real fields, so the iterate is kept exactly real.
pub fn top_eigenpair(
    chi: &Field,
    symbol: &DispersionSymbol,
    lambda: f64,
    eps: f64,
    init: &Field,
    tol: f64,
    max_iter: usize,
) -> Result<EigenPair> {
    Ok(top_eigenpair_trace(chi, symbol, lambda, eps, init, tol, max_iter)?.0)
}

/// Same as `top_eigenpair` but also returns the Rayleigh quotient at every
/// step; the sequence is nondecreasing up to roundoff.
pub fn top_eigenpair_trace(
    chi: &Field,
    symbol: &DispersionSymbol,
    lambda: f64,
    eps: f64,
    init: &Field,
    tol: f64,
    max_iter: usize,
) -> Result<(EigenPair, Vec<f64>)> {
    let op = BsOperator::new(chi, symbol, lambda, eps)?;
    let seed = chi.pointwise_mul(init)?;
    power_iterate(&mut |f| op.apply(f), &seed, tol, max_iter, true)
}

/// `chi delta chi` rewritten in stretched coordinates around the shell
/// point `(1, 0)`: the tube becomes the unit square, the symbol becomes
/// `2 eta_1 + eta_2^2 + eps eta_1^2`, and `eps K` of the original problem
/// matches the top of `K' = chi_1 (1 + h'^2)^{-1} chi_1` here.
pub struct RescaledTubeOperator {
    grid: Arc<FourierGrid>,
    delta: Multiplier,
    chi: Field,
}

/// Build the stretched-coordinate operator from the grid of the original
/// problem: box lengths shrink by `(eps, sqrt(eps))`, sizes are kept.
///
/// `flat` drops the `eps eta_1^2` curvature term, giving the parabolic
/// limit operator for comparison.
pub fn rescaled_tube_operator(
    base: &Arc<FourierGrid>,
    eps: f64,
    flat: bool,
) -> Result<RescaledTubeOperator> {
    if base.dimension() != 2 {
        return Err(SpectralError::Unsupported(
            "stretched tube coordinates need a 2-d grid".into(),
        ));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(SpectralError::BadParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let lengths = [eps * base.lengths()[0], eps.sqrt() * base.lengths()[1]];
    let grid = crate::grid::build_grid(2, &lengths, base.sizes())?;
    let values = grid.tabulate_freqs(|eta| {
        let curvature = if flat { 0.0 } else { eps * eta[0] * eta[0] };
        let h = 2.0 * eta[0] + eta[1] * eta[1] + curvature;
        1.0 / (h * h + 1.0)
    });
    // h' is not even, so K' maps real fields to complex ones.
    let delta = Multiplier::from_real_values(&grid, values, false)?;
    let chi_values = grid.tabulate_coords(|y| {
        if y.iter().all(|c| c.abs() < 1.0) {
            1.0
        } else {
            0.0
        }
    });
    let chi = Field::from_real(&grid, chi_values)?;
    Ok(RescaledTubeOperator { grid, delta, chi })
}

impl RescaledTubeOperator {
    pub fn grid(&self) -> &Arc<FourierGrid> {
        &self.grid
    }

    pub fn chi(&self) -> &Field {
        &self.chi
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        let cut = self.chi.pointwise_mul(f)?;
        let spread = apply_multiplier(&self.delta, &cut)?;
        self.chi.pointwise_mul(&spread)
    }

    /// Smooth unit-scale seed cut to the square.
    pub fn default_seed(&self) -> Result<Field> {
        let f = radial_bump_field(&self.grid, 1.0)?;
        self.chi.pointwise_mul(&f)
    }

    /// Top eigenvalue by complex-mode power iteration.
    pub fn top_eigenvalue(&self, tol: f64, max_iter: usize) -> Result<EigenPair> {
        let seed = self.default_seed()?;
        let (pair, _) = power_iterate(&mut |f| self.apply(f), &seed, tol, max_iter, false)?;
        Ok(pair)
    }
}
