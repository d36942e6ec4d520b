//! Sharpness quotients: each one is a ratio `lhs/rhs` of an eigenvalue
//! bound evaluated on a forged certificate.  A quotient above 1 means the
//! certificate violates that bound; a quotient tending to 0 or infinity
//! along a family shows the bound degenerating.

use num_complex::Complex64;

use crate::error::{Result, SpectralError};
use crate::forge::Certificate;
use crate::grid::{pairwise_sum_by, Field};
use crate::region::RegionSpec;
use crate::symbol::DispersionSymbol;

/// `L^q` norm with the cell-volume measure; `q = inf` gives the max norm.
pub fn lq_norm(f: &Field, q: f64) -> Result<f64> {
    if q.is_infinite() && q > 0.0 {
        return Ok(f.max_abs());
    }
    if !(q >= 1.0) || !q.is_finite() {
        return Err(SpectralError::BadParameter(format!(
            "Lebesgue exponent must satisfy q >= 1, got {q}"
        )));
    }
    let vals = f.values();
    let s = pairwise_sum_by(vals.len(), |i| vals[i].norm().powf(q));
    Ok((f.grid().cell_volume() * s).powf(1.0 / q))
}

/// Distance from `z` to the closed positive real half-axis.
pub fn dist_to_positive_axis(z: Complex64) -> f64 {
    if z.re >= 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

/// Short-range quotient `|z|^(q - d/2) / |V|_q^q`.
///
/// Bounded families mean eigenvalues obey the classical `L^q` bound;
/// blow-up as `eps` shrinks exhibits its failure.  Needs `q > d/2`.
pub fn ls_quotient(cert: &Certificate, q: f64) -> Result<f64> {
    let d = cert.potential.grid().dimension() as f64;
    if !(q > d / 2.0) {
        return Err(SpectralError::BadParameter(format!(
            "short-range quotient needs q > d/2 = {}, got {q}",
            d / 2.0
        )));
    }
    let nq = lq_norm(&cert.potential, q)?;
    if !(nq > 0.0) {
        return Err(SpectralError::Degenerate("potential has zero norm".into()));
    }
    Ok(cert.z().norm().powf(q - d / 2.0) / nq.powf(q))
}

/// Non-selfadjoint quotient
/// `dist(z, R_+)^(q - (d+1)/2) |z|^(1/2) / |V|_q^q`, for `q >= (d+1)/2`.
pub fn frank_quotient(cert: &Certificate, q: f64) -> Result<f64> {
    let d = cert.potential.grid().dimension() as f64;
    if !(q >= (d + 1.0) / 2.0) {
        return Err(SpectralError::BadParameter(format!(
            "quotient needs q >= (d+1)/2 = {}, got {q}",
            (d + 1.0) / 2.0
        )));
    }
    let nq = lq_norm(&cert.potential, q)?;
    if !(nq > 0.0) {
        return Err(SpectralError::Degenerate("potential has zero norm".into()));
    }
    let z = cert.z();
    Ok(dist_to_positive_axis(z).powf(q - (d + 1.0) / 2.0) * z.norm().sqrt() / nq.powf(q))
}

/// Weight applied at distance `r` from the probe point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecayWeight {
    /// `exp(-E r)`
    Exponential,
    /// `(1 + E r)^(-n)`
    Polynomial { n: u32 },
}

/// Probe points for the localized norms: the region center plus an
/// `8^d` cell-centered sublattice of its bounding box.
pub fn default_y_set(region: &RegionSpec, dimension: usize) -> Result<Vec<Vec<f64>>> {
    let half = region.half_lengths(dimension)?;
    let center: Vec<f64> = (0..dimension)
        .map(|a| region.center.get(a).copied().unwrap_or(0.0))
        .collect();
    let mut points = vec![center.clone()];
    let per_axis = 8usize;
    let total = per_axis.pow(dimension as u32);
    for flat in 0..total {
        let mut rest = flat;
        let mut p = vec![0.0; dimension];
        for a in (0..dimension).rev() {
            let i = rest % per_axis;
            rest /= per_axis;
            let frac = (i as f64 + 0.5) / per_axis as f64;
            p[a] = center[a] - half[a] + 2.0 * half[a] * frac;
        }
        points.push(p);
    }
    Ok(points)
}

/// Localized `(d+1)/2`-th moment of the potential:
/// `sup_y integral w(E |x - y|) |V(x)|^((d+1)/2) dx`
/// over the probe set, with `w` the chosen decay weight.
pub fn davies_nath_f(
    potential: &Field,
    e: f64,
    weight: DecayWeight,
    y_set: &[Vec<f64>],
) -> Result<f64> {
    if !(e >= 0.0) || !e.is_finite() {
        return Err(SpectralError::BadParameter(format!(
            "decay rate must be nonnegative, got {e}"
        )));
    }
    if y_set.is_empty() {
        return Err(SpectralError::BadParameter("probe set is empty".into()));
    }
    let grid = potential.grid();
    let d = grid.dimension();
    for y in y_set {
        if y.len() != d {
            return Err(SpectralError::DimensionMismatch {
                expected: d,
                got: y.len(),
            });
        }
    }
    let p = (d as f64 + 1.0) / 2.0;
    // collect the support once; V vanishes off the region so this is small
    let mut coords: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let vals = potential.values();
    let mut point = vec![0.0; d];
    grid.for_each_site(|flat, idx| {
        let a = vals[flat].norm();
        if a == 0.0 {
            return;
        }
        for ax in 0..d {
            point[ax] = grid.coordinate(ax, idx[ax]);
        }
        coords.extend_from_slice(&point);
        weights.push(a.powf(p));
    });
    let cellvol = grid.cell_volume();
    let mut best = 0.0f64;
    for y in y_set {
        let total = pairwise_sum_by(weights.len(), |i| {
            let mut r2 = 0.0;
            for ax in 0..d {
                let t = coords[i * d + ax] - y[ax];
                r2 += t * t;
            }
            let r = r2.sqrt();
            let w = match weight {
                DecayWeight::Exponential => (-e * r).exp(),
                DecayWeight::Polynomial { n } => (1.0 + e * r).powi(-(n as i32)),
            };
            weights[i] * w
        });
        best = best.max(total * cellvol);
    }
    Ok(best)
}

/// Localized quotient `|z|^(1/2) / F_V(L Im sqrt(z))` with the exponential
/// weight on the certificate's default probe set.
pub fn dn_quotient(cert: &Certificate, l: f64) -> Result<f64> {
    if !(l >= 1.0) || !l.is_finite() {
        return Err(SpectralError::BadParameter(format!(
            "localization factor L must be at least 1, got {l}"
        )));
    }
    let grid = cert.potential.grid();
    let y_set = default_y_set(&cert.region, grid.dimension())?;
    let z = cert.z();
    let im_sqrt = z.sqrt().im;
    let f = davies_nath_f(&cert.potential, l * im_sqrt, DecayWeight::Exponential, &y_set)?;
    if !(f > 0.0) {
        return Err(SpectralError::Degenerate("localized norm vanished".into()));
    }
    Ok(z.norm().sqrt() / f)
}

/// One evaluated bound: `ratio = lhs / rhs`, with the inputs retained.
///
/// `parameters` records the numeric inputs (exponents, dimension, ...) so a
/// report can be logged or compared without the certificate that produced it.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub parameters: Vec<(String, f64)>,
}

/// Which branch of the fractional eigenvalue bound to evaluate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FractionalVariant {
    /// `q <= (d+1)/2`: `|z|^(q - d/s) <= |V|_q^q`
    Subcritical,
    /// `q > (d+1)/2`:
    /// `dist(z, R_+)^(q-(d+1)/2) |z|^((d+1)/2 - d/s) <= |V|_q^q`
    Supercritical,
    /// `|z|^((d+1)/2 - d/s) <= sup_y int (1+|Im z||x-y|)^(-n) |V|^((d+1)/2)`
    Localized { n: u32 },
}

/// Evaluate one branch of the eigenvalue bound for the fractional symbol
/// `|xi|^s` on a certificate, as `BoundReport { lhs, rhs, ratio }`.
///
/// The exponent floor is `q >= d/s` for `s < d`, `q > 1` for `s = d`, and
/// `q >= 1` for `s > d`.
pub fn fractional_check(
    cert: &Certificate,
    q: f64,
    variant: FractionalVariant,
) -> Result<BoundReport> {
    let s = match cert.symbol {
        DispersionSymbol::Fractional { s } => s,
        DispersionSymbol::Laplacian => 2.0,
        DispersionSymbol::Tabulated { .. } => {
            return Err(SpectralError::Unsupported(
                "fractional bound on a tabulated symbol".into(),
            ))
        }
    };
    let grid = cert.potential.grid();
    let d = grid.dimension() as f64;
    if !(q >= 1.0) || !q.is_finite() {
        return Err(SpectralError::BadParameter(format!(
            "Lebesgue exponent must satisfy q >= 1, got {q}"
        )));
    }
    let floor_ok = if s < d {
        q >= d / s
    } else if s == d {
        q > 1.0
    } else {
        true
    };
    if !floor_ok {
        return Err(SpectralError::BadParameter(format!(
            "exponent q = {q} is below the floor for s = {s}, d = {d}"
        )));
    }
    let z = cert.z();
    let az = z.norm();
    let critical = (d + 1.0) / 2.0;
    let (name, lhs, rhs) = match variant {
        FractionalVariant::Subcritical => {
            if q > critical {
                return Err(SpectralError::BadParameter(format!(
                    "subcritical branch needs q <= (d+1)/2 = {critical}, got {q}"
                )));
            }
            let lhs = az.powf(q - d / s);
            let rhs = lq_norm(&cert.potential, q)?.powf(q);
            (format!("fractional_subcritical_q{q}"), lhs, rhs)
        }
        FractionalVariant::Supercritical => {
            if !(q > critical) {
                return Err(SpectralError::BadParameter(format!(
                    "supercritical branch needs q > (d+1)/2 = {critical}, got {q}"
                )));
            }
            let lhs = dist_to_positive_axis(z).powf(q - critical) * az.powf(critical - d / s);
            let rhs = lq_norm(&cert.potential, q)?.powf(q);
            (format!("fractional_supercritical_q{q}"), lhs, rhs)
        }
        FractionalVariant::Localized { n } => {
            let lhs = az.powf(critical - d / s);
            let y_set = default_y_set(&cert.region, grid.dimension())?;
            let rhs = davies_nath_f(
                &cert.potential,
                z.im.abs(),
                DecayWeight::Polynomial { n },
                &y_set,
            )?;
            (format!("fractional_localized_n{n}"), lhs, rhs)
        }
    };
    if !(rhs > 0.0) {
        return Err(SpectralError::Degenerate(
            "right-hand side of the bound vanished".into(),
        ));
    }
    let mut parameters = vec![
        ("q".to_string(), q),
        ("s".to_string(), s),
        ("d".to_string(), d),
    ];
    if let FractionalVariant::Localized { n } = variant {
        parameters.push(("n".to_string(), n as f64));
    }
    Ok(BoundReport {
        name,
        lhs,
        rhs,
        ratio: lhs / rhs,
        parameters,
    })
}

/// Least-squares fit of `y = C x^p` through `(x_i, y_i)` in log-log
/// coordinates; returns `(p, ln C, r^2)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(SpectralError::BadParameter(format!(
            "power-law fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    for &(x, y) in points {
        if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(SpectralError::BadParameter(format!(
                "power-law fit needs positive finite points, got ({x}, {y})"
            )));
        }
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|&(x, _)| x.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(SpectralError::BadParameter(
            "power-law fit needs at least two distinct abscissae".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let p = intercept + slope * x;
            (y - p) * (y - p)
        })
        .sum();
    let ss_tot: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok((slope, intercept, r2))
}
