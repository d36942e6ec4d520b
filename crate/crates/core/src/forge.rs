//! Forging a complex potential with the prescribed eigenvalue `z = lambda +
//! i eps` from a top eigenpair of `K`, plus the certificates that make the
//! construction checkable after the fact.

use num_complex::Complex64;

use crate::error::{Result, SpectralError};
use crate::grid::{fft, ifft, Field};
use crate::multiplier::{apply_multiplier, delta_multiplier, resolvent_multiplier};
use crate::power::{apply_k, top_eigenpair, EigenPair};
use crate::region::{region_indicator, region_measure, RegionSpec};
use crate::symbol::DispersionSymbol;

/// Orders at which certificates record `L^q` norms of the potential.
pub const CERTIFICATE_Q: [f64; 5] = [1.0, 1.5, 2.0, 2.5, 4.0];

/// Everything needed to re-check a forged eigenvalue without redoing the
/// eigensolve: the potential, the eigenfunction, and the scalar witnesses.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub symbol: DispersionSymbol,
    pub lambda: f64,
    pub eps: f64,
    pub region: RegionSpec,
    pub mu: f64,
    /// Top eigenfunction of `K`, unit norm, real.
    pub phi: Field,
    /// Resolvent image `(H_0 - z)^{-1} phi`; the eigenfunction of `H_0 + V`.
    pub psi: Field,
    /// The forged potential; complex, supported in the region.
    pub potential: Field,
    /// Relative eigenvalue defect `|(H_0 + V - z) psi| / |psi|`.
    pub residual: f64,
    /// Fraction of region cells where `psi` was too small to divide by.
    pub nodal_fraction: f64,
    /// `(q, |V|_q)` pairs at the orders in `CERTIFICATE_Q`.
    pub q_norms: Vec<(f64, f64)>,
}

impl Certificate {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.lambda, self.eps)
    }
}

/// Build the potential `V = -(1/mu) Im(psi)/psi` on the region from a
/// converged eigenpair of `K`.
///
/// Near nodal points of `psi` the quotient is unstable; cells where
/// `|psi| <= tau * max|psi|` are excluded from the support and counted in
/// `nodal_fraction`.  `tau` must lie in `(0, 1e-4]`.
pub fn forge_potential(
    symbol: &DispersionSymbol,
    lambda: f64,
    eps: f64,
    region: &RegionSpec,
    pair: &EigenPair,
    tau: f64,
) -> Result<Certificate> {
    if !(tau > 0.0 && tau <= 1e-4) {
        return Err(SpectralError::BadParameter(format!(
            "nodal threshold tau must lie in (0, 1e-4], got {tau}"
        )));
    }
    if !pair.converged {
        return Err(SpectralError::NotConverged);
    }
    if !(pair.mu > 0.0) {
        return Err(SpectralError::Degenerate(format!(
            "eigenvalue must be positive, got {}",
            pair.mu
        )));
    }
    if !(eps > 0.0) || !(lambda.is_finite()) {
        return Err(SpectralError::BadParameter(format!(
            "need eps > 0 and finite lambda, got eps={eps}, lambda={lambda}"
        )));
    }
    let grid = pair.phi.grid();
    let chi = region_indicator(region, grid)?;
    let z = Complex64::new(lambda, eps);

    let resolvent = resolvent_multiplier(symbol, grid, z)?;
    let psi = apply_multiplier(&resolvent, &pair.phi)?;

    let max_psi = psi.max_abs();
    if !(max_psi > 0.0) {
        return Err(SpectralError::Degenerate("resolvent image vanished".into()));
    }
    let cut = tau * max_psi;
    let inv_mu = 1.0 / pair.mu;
    let mut potential = Field::zeros(grid);
    let mut region_cells = 0usize;
    let mut nodal_cells = 0usize;
    for ((v, &c), &p) in potential
        .values_mut()
        .iter_mut()
        .zip(chi.values())
        .zip(psi.values())
    {
        if c.re == 0.0 {
            continue;
        }
        region_cells += 1;
        let ap = p.norm();
        if ap <= cut {
            nodal_cells += 1;
            continue;
        }
        let mut val = -inv_mu * Complex64::new(p.im, 0.0) / p;
        // |Im psi / psi| <= 1 exactly; clip the roundoff excess so the
        // certificate bound |V| <= 1/mu holds bit-for-bit.
        while val.norm() > inv_mu {
            val *= 1.0 - 2.0 * f64::EPSILON;
        }
        *v = val;
    }
    if region_cells == 0 {
        return Err(SpectralError::Degenerate("region has no lattice cells".into()));
    }
    let nodal_fraction = nodal_cells as f64 / region_cells as f64;

    let residual = eigen_defect(symbol, z, &psi, &potential)?;
    let q_norms = CERTIFICATE_Q
        .iter()
        .map(|&q| Ok((q, crate::bounds::lq_norm(&potential, q)?)))
        .collect::<Result<Vec<_>>>()?;

    Ok(Certificate {
        symbol: symbol.clone(),
        lambda,
        eps,
        region: region.clone(),
        mu: pair.mu,
        phi: pair.phi.clone(),
        psi,
        potential,
        residual,
        nodal_fraction,
        q_norms,
    })
}

/// `|(H_0 - z) psi + V psi| / |psi|`, evaluated spectrally.
fn eigen_defect(
    symbol: &DispersionSymbol,
    z: Complex64,
    psi: &Field,
    potential: &Field,
) -> Result<f64> {
    let grid = psi.grid();
    let table = symbol.on_grid(grid)?;
    let mut hat = fft(psi);
    for (v, h) in hat.values_mut().iter_mut().zip(&table) {
        *v *= Complex64::new(*h, 0.0) - z;
    }
    let mut defect = ifft(&hat);
    let vp = potential.pointwise_mul(psi)?;
    for (d, w) in defect.values_mut().iter_mut().zip(vp.values()) {
        *d += w;
    }
    let n = psi.norm();
    if !(n > 0.0) {
        return Err(SpectralError::Degenerate("psi has zero norm".into()));
    }
    Ok(defect.norm() / n)
}

/// Re-check of a certificate against its own stored data.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    /// Recomputed relative eigenvalue defect.
    pub residual: f64,
    /// Recomputed `(q, |V|_q)` at the certificate's orders.
    pub q_norms: Vec<(f64, f64)>,
    /// Each invariant that failed, in human-readable form.
    pub failures: Vec<String>,
    pub pass: bool,
}

/// Recompute every checkable claim in the certificate.
///
/// `tol` bounds the allowed relative eigenvalue defect and the relative
/// disagreement of recomputed norms with the stored ones.
pub fn verify_certificate(cert: &Certificate, tol: f64) -> Result<VerifyReport> {
    if !(tol > 0.0) {
        return Err(SpectralError::BadParameter(format!(
            "verification tolerance must be positive, got {tol}"
        )));
    }
    let mut failures = Vec::new();
    let grid = cert.potential.grid();
    if cert.psi.grid().as_ref() != grid.as_ref() || cert.phi.grid().as_ref() != grid.as_ref() {
        return Err(SpectralError::CorruptCertificate(
            "phi, psi, and potential live on different grids".into(),
        ));
    }

    let residual = eigen_defect(&cert.symbol, cert.z(), &cert.psi, &cert.potential)?;
    if !(residual <= tol) {
        failures.push(format!(
            "eigenvalue defect {residual:.3e} exceeds tolerance {tol:.3e}"
        ));
    }
    if (residual - cert.residual).abs() > tol * residual.max(cert.residual).max(1e-300) {
        failures.push(format!(
            "stored residual {:.6e} disagrees with recomputed {:.6e}",
            cert.residual, residual
        ));
    }

    // Pointwise bound and support.
    let chi = region_indicator(&cert.region, grid)?;
    let bound = (1.0 + 1e-12) / cert.mu;
    let mut max_v = 0.0f64;
    let mut out_of_region = false;
    for (v, c) in cert.potential.values().iter().zip(chi.values()) {
        let a = v.norm();
        max_v = max_v.max(a);
        if c.re == 0.0 && a != 0.0 {
            out_of_region = true;
        }
    }
    if max_v > bound {
        failures.push(format!(
            "pointwise bound violated: max|V| = {:.6e} > 1/mu = {:.6e}",
            max_v,
            1.0 / cert.mu
        ));
    }
    if out_of_region {
        failures.push("potential does not vanish off the region".into());
    }

    // Norms against the stored values and the region-measure bound
    // |V|_q <= (1/mu) |region|^{1/q}.
    let measure = region_measure(&chi);
    let mut q_norms = Vec::with_capacity(cert.q_norms.len());
    for &(q, stored) in &cert.q_norms {
        let n = crate::bounds::lq_norm(&cert.potential, q)?;
        q_norms.push((q, n));
        if (n - stored).abs() > tol * n.max(stored).max(1e-300) {
            failures.push(format!(
                "stored |V|_{q} = {stored:.6e} disagrees with recomputed {n:.6e}"
            ));
        }
        let cap = measure.powf(1.0 / q) / cert.mu;
        if n > cap * (1.0 + 1e-9) {
            failures.push(format!(
                "|V|_{q} = {n:.6e} exceeds the region bound {cap:.6e}"
            ));
        }
    }

    let pass = failures.is_empty();
    Ok(VerifyReport {
        residual,
        q_norms,
        failures,
        pass,
    })
}

/// Relative defect of the eigenvector identity that links the eigenpair of
/// `K` back to the spectral problem: with `u = delta chi phi`,
/// `((H_0-lambda)^2 + eps^2) u = (eps/mu) chi^2 u` up to discretization.
pub fn verify_bs_correspondence(
    pair: &EigenPair,
    symbol: &DispersionSymbol,
    lambda: f64,
    eps: f64,
    region: &RegionSpec,
) -> Result<f64> {
    Ok(bs_defects(pair, symbol, lambda, eps, region)?.0)
}

/// Round-trip error of the inverse map, `|(1/mu) chi u - phi|` with
/// `u = delta chi phi`.
pub fn bs_roundtrip_error(
    pair: &EigenPair,
    symbol: &DispersionSymbol,
    lambda: f64,
    eps: f64,
    region: &RegionSpec,
) -> Result<f64> {
    Ok(bs_defects(pair, symbol, lambda, eps, region)?.1)
}

fn bs_defects(
    pair: &EigenPair,
    symbol: &DispersionSymbol,
    lambda: f64,
    eps: f64,
    region: &RegionSpec,
) -> Result<(f64, f64)> {
    if !(pair.mu > 0.0) {
        return Err(SpectralError::Degenerate(format!(
            "eigenvalue must be positive, got {}",
            pair.mu
        )));
    }
    let grid = pair.phi.grid();
    let chi = region_indicator(region, grid)?;
    let delta = delta_multiplier(symbol, grid, lambda, eps)?;
    let cut = chi.pointwise_mul(&pair.phi)?;
    let u = apply_multiplier(&delta, &cut)?;
    let nu = u.norm();
    if !(nu > 0.0) {
        return Err(SpectralError::Degenerate("delta chi phi vanished".into()));
    }

    // lhs = ((h_0 - lambda)^2 + eps^2) u - (eps/mu) chi^2 u
    let table = symbol.on_grid(grid)?;
    let mut hat = fft(&u);
    for (v, h) in hat.values_mut().iter_mut().zip(&table) {
        let d = h - lambda;
        *v *= d * d + eps * eps;
    }
    let mut lhs = ifft(&hat);
    let scale = eps / pair.mu;
    for ((l, c), w) in lhs.values_mut().iter_mut().zip(chi.values()).zip(u.values()) {
        // chi is 0/1 so chi^2 == chi
        *l -= scale * c.re * w;
    }
    let defect = lhs.norm() / nu;

    let mut back = chi.pointwise_mul(&u)?;
    back.scale(1.0 / pair.mu);
    for (b, p) in back.values_mut().iter_mut().zip(pair.phi.values()) {
        *b -= p;
    }
    let roundtrip = back.norm();
    Ok((defect, roundtrip))
}

/// Certify a state pretending to be an embedded eigenfunction: a unit `f`
/// concentrated on the region with `|(H_0 - lambda) f| <= eps/2` forces a
/// potential of size at most `4 eps` with eigenvalue `lambda + i eps`.
pub fn embedded_perturbation(
    f: &Field,
    symbol: &DispersionSymbol,
    lambda: f64,
    eps: f64,
    region: &RegionSpec,
) -> Result<Certificate> {
    let grid = f.grid();
    let nf = f.norm();
    if (nf - 1.0).abs() > 1e-10 {
        return Err(SpectralError::BadParameter(format!(
            "state must have unit norm, got {nf}"
        )));
    }
    let chi = region_indicator(region, grid)?;
    let cut = chi.pointwise_mul(f)?;
    let mut outside = f.clone();
    for (o, c) in outside.values_mut().iter_mut().zip(cut.values()) {
        *o -= c;
    }
    let leak = outside.norm();
    if leak > 0.25 {
        return Err(SpectralError::PreconditionViolated(format!(
            "state leaks outside the region: |(1-chi) f| = {leak:.4} > 0.25"
        )));
    }
    let table = symbol.on_grid(grid)?;
    let mut hat = fft(f);
    for (v, h) in hat.values_mut().iter_mut().zip(&table) {
        *v *= h - lambda;
    }
    let near = ifft(&hat).norm();
    if 2.0 * near > eps {
        return Err(SpectralError::PreconditionViolated(format!(
            "state is not spectrally concentrated: 2 |(H_0 - lambda) f| = {:.4} > eps = {eps}",
            2.0 * near
        )));
    }

    let kf = apply_k(&chi, symbol, lambda, eps, f)?;
    let witness = eps * kf.norm();
    if witness < 0.25 {
        return Err(SpectralError::Degenerate(format!(
            "localization lower bound failed: eps |K f| = {witness:.4} < 0.25"
        )));
    }

    let pair = top_eigenpair(&chi, symbol, lambda, eps, f, 1e-8, 5000)?;
    if !pair.converged {
        return Err(SpectralError::NotConverged);
    }
    let cert = forge_potential(symbol, lambda, eps, region, &pair, 1e-8)?;
    let max_v = cert.potential.max_abs();
    if max_v > 4.0 * eps {
        return Err(SpectralError::Degenerate(format!(
            "potential exceeds the guaranteed size: max|V| = {max_v:.4} > 4 eps = {}",
            4.0 * eps
        )));
    }
    Ok(cert)
}
