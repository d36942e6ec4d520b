//! The measurement sweep: one certified forge per `eps`, the derived
//! spectral quotients, and a fixed-schema CSV rendering.

use std::time::Instant;

use eigenforge::{
    bs_roundtrip_error, davies_nath_f, default_y_set, dn_quotient, fit_power_law,
    forge_potential, fractional_check, frank_quotient, knapp_wavepacket, lq_norm, ls_quotient,
    region_indicator, top_eigenpair, verify_bs_correspondence, verify_certificate, BoundReport,
    DecayWeight, FractionalVariant, KnappSpec, RegionSpec, Result, SpectralError,
};

use crate::config::{SweepConfig, SymbolChoice};
use crate::policy;

/// Shell radius of the level set `h = lambda`: where the forged packet
/// concentrates in frequency.
pub fn shell_radius(symbol: &SymbolChoice, lambda: f64) -> f64 {
    match symbol {
        SymbolChoice::Laplacian => lambda.sqrt(),
        SymbolChoice::Fractional { s } => lambda.powf(1.0 / s),
    }
}

/// Everything measured on one certified run.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub eps: f64,
    pub m: f64,
    pub c0: f64,
    pub grid_lengths: Vec<f64>,
    pub grid_sizes: Vec<usize>,
    pub mu: f64,
    pub eps_mu: f64,
    pub iterations: usize,
    pub power_residual: f64,
    /// Eigenvalue defect stored in the certificate.
    pub residual: f64,
    pub nodal_fraction: f64,
    pub certified: bool,
    pub verify_failures: Vec<String>,
    /// `(q, |V|_q)` in config order.
    pub norm_q: Vec<(f64, f64)>,
    /// `(q, quotient)` for the q in the config with q > d/2.
    pub ls: Vec<(f64, f64)>,
    /// `(q, quotient)` for the q in the config with q >= (d+1)/2.
    pub frank: Vec<(f64, f64)>,
    /// `(L, quotient)` in config order.
    pub dn: Vec<(f64, f64)>,
    /// `(L, F_V(L Im sqrt(z)))` in config order.
    pub f_values: Vec<(f64, f64)>,
    /// Log-log slope of `f_values`; absent with fewer than two L.
    pub f_slope: Option<f64>,
    pub bs_defect: f64,
    pub bs_roundtrip: f64,
    /// Supercritical bound at q = 2; fractional symbols only.
    pub thm4_ii: Option<BoundReport>,
    /// Localized bound with weight order 4; fractional symbols only.
    pub thm4_iii: Option<BoundReport>,
    pub wall_ms: u64,
}

/// One sweep entry: either a full row or the parameters plus the reason
/// the run died.  A failure never aborts the remaining rows.
#[derive(Clone, Debug)]
pub enum RowOutcome {
    Done(Box<SweepRow>),
    Failed { eps: f64, m: f64, c0: f64, reason: String },
}

impl RowOutcome {
    pub fn is_certified(&self) -> bool {
        match self {
            RowOutcome::Done(row) => row.certified,
            RowOutcome::Failed { .. } => false,
        }
    }
}

/// Column layout of the CSV, fixed by the q and L lists of the config.
#[derive(Clone, Debug)]
pub struct ColumnPlan {
    pub q: Vec<f64>,
    pub l: Vec<f64>,
}

impl ColumnPlan {
    pub fn new(cfg: &SweepConfig) -> ColumnPlan {
        ColumnPlan {
            q: cfg.q.clone(),
            l: cfg.l.clone(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        let mut cols: Vec<String> = ["epsilon", "M", "c0", "mu", "eps_mu", "residual", "nodal_fraction"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for &q in &self.q {
            cols.push(format!("norm_q_{q}"));
        }
        for &q in &self.q {
            if q > 1.0 {
                cols.push(format!("ls_quotient_{q}"));
            }
        }
        for &q in &self.q {
            if q >= 1.5 {
                cols.push(format!("frank_quotient_{q}"));
            }
        }
        for &l in &self.l {
            cols.push(format!("dn_quotient_L{l}"));
        }
        cols.push("wall_ms".to_string());
        cols
    }

    pub fn header(&self) -> String {
        self.labels().join(",")
    }
}

/// Sweep results in row order, with the column plan they render under.
#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub columns: ColumnPlan,
    pub rows: Vec<RowOutcome>,
}

fn num(x: f64) -> String {
    format!("{:.11e}", x)
}

impl SweepOutput {
    pub fn csv_string(&self) -> String {
        let labels = self.columns.labels();
        let mut out = String::new();
        out.push_str(&self.columns.header());
        out.push('\n');
        for row in &self.rows {
            match row {
                RowOutcome::Done(r) => {
                    let mut cells = vec![
                        num(r.eps),
                        num(r.m),
                        num(r.c0),
                        num(r.mu),
                        num(r.eps_mu),
                        num(r.residual),
                        num(r.nodal_fraction),
                    ];
                    for &(_, v) in &r.norm_q {
                        cells.push(num(v));
                    }
                    for &(_, v) in &r.ls {
                        cells.push(num(v));
                    }
                    for &(_, v) in &r.frank {
                        cells.push(num(v));
                    }
                    for &(_, v) in &r.dn {
                        cells.push(num(v));
                    }
                    cells.push(num(r.wall_ms as f64));
                    debug_assert_eq!(cells.len(), labels.len());
                    out.push_str(&cells.join(","));
                }
                RowOutcome::Failed { eps, m, c0, .. } => {
                    let mut cells = vec![num(*eps), num(*m), num(*c0)];
                    cells.extend(std::iter::repeat_n("nan".to_string(), labels.len() - 3));
                    out.push_str(&cells.join(","));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        crate::certio::atomic_write(path, self.csv_string().as_bytes())
    }
}

/// Run the full sweep.  A bad config is a hard error; a failing row is
/// recorded with its reason (also echoed to stderr) and the sweep moves on.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.eps.len());
    for &eps in &cfg.eps {
        let (m, c0) = cfg.params(eps);
        match run_row(cfg, eps, m, c0) {
            Ok(row) => rows.push(RowOutcome::Done(Box::new(row))),
            Err(err) => {
                let reason = err.to_string();
                eprintln!("sweep row eps = {eps} failed: {reason}");
                rows.push(RowOutcome::Failed { eps, m, c0, reason });
            }
        }
    }
    Ok(SweepOutput {
        columns: ColumnPlan::new(cfg),
        rows,
    })
}

/// A forged certificate together with the eigenpair and verification it
/// came from; the sweep measures quotients on top of this.
pub struct ForgeRun {
    pub region: RegionSpec,
    pub pair: eigenforge::EigenPair,
    pub cert: eigenforge::Certificate,
    pub report: eigenforge::VerifyReport,
}

/// Plan the grid for one `(eps, M, c0)` tuple, run the power iteration
/// from the cap packet, forge the potential, and verify it.
pub fn forge_run(cfg: &SweepConfig, eps: f64, m: f64, c0: f64) -> Result<ForgeRun> {
    let symbol = cfg.symbol.to_symbol()?;
    let plan = policy::tube_plan(cfg.lambda, eps, m, c0, cfg.margin, cfg.grid_scale)?;
    policy::check_cap_resolution(&plan, eps, c0)?;
    let grid = plan.build()?;

    let shell = shell_radius(&cfg.symbol, cfg.lambda);
    let mut region = RegionSpec::tube(eps, m);
    region.axis_scale = shell;
    let chi = region_indicator(&region, &grid)?;
    let packet = knapp_wavepacket(&KnappSpec::new(eps, c0, vec![shell, 0.0]), &grid)?;

    let pair = top_eigenpair(
        &chi,
        &symbol,
        cfg.lambda,
        eps,
        &packet,
        cfg.power_tol,
        cfg.max_iter,
    )?;
    if !pair.converged {
        return Err(SpectralError::NotConverged);
    }

    let cert = forge_potential(&symbol, cfg.lambda, eps, &region, &pair, cfg.forge_tau)?;
    let report = verify_certificate(&cert, cfg.certify_tol)?;
    Ok(ForgeRun {
        region,
        pair,
        cert,
        report,
    })
}

/// One sweep row: plan the grid, forge a certificate, measure every
/// requested quotient.
pub fn run_row(cfg: &SweepConfig, eps: f64, m: f64, c0: f64) -> Result<SweepRow> {
    let start = Instant::now();
    let symbol = cfg.symbol.to_symbol()?;
    let ForgeRun {
        region,
        pair,
        cert,
        report,
    } = forge_run(cfg, eps, m, c0)?;
    let grid = cert.potential.grid().clone();

    let z = cert.z();
    let im_sqrt = z.sqrt().im;
    let mut norm_q = Vec::new();
    let mut ls = Vec::new();
    let mut frank = Vec::new();
    for &q in &cfg.q {
        norm_q.push((q, lq_norm(&cert.potential, q)?));
        if q > 1.0 {
            ls.push((q, ls_quotient(&cert, q)?));
        }
        if q >= 1.5 {
            frank.push((q, frank_quotient(&cert, q)?));
        }
    }
    let y_set = default_y_set(&region, grid.dimension())?;
    let mut dn = Vec::new();
    let mut f_values = Vec::new();
    for &l in &cfg.l {
        dn.push((l, dn_quotient(&cert, l)?));
        let f = davies_nath_f(
            &cert.potential,
            l * im_sqrt,
            DecayWeight::Exponential,
            &y_set,
        )?;
        f_values.push((l, f));
    }
    let f_slope = if f_values.len() >= 2 {
        let pts: Vec<(f64, f64)> = f_values.iter().map(|&(l, f)| (l * im_sqrt, f)).collect();
        Some(fit_power_law(&pts)?.0)
    } else {
        None
    };

    let bs_defect = verify_bs_correspondence(&pair, &symbol, cfg.lambda, eps, &region)?;
    let bs_roundtrip = bs_roundtrip_error(&pair, &symbol, cfg.lambda, eps, &region)?;

    let (thm4_ii, thm4_iii) = match cfg.symbol {
        SymbolChoice::Fractional { .. } => (
            Some(fractional_check(&cert, 2.0, FractionalVariant::Supercritical)?),
            Some(fractional_check(
                &cert,
                2.0,
                FractionalVariant::Localized { n: 4 },
            )?),
        ),
        SymbolChoice::Laplacian => (None, None),
    };

    Ok(SweepRow {
        eps,
        m,
        c0,
        grid_lengths: grid.lengths().to_vec(),
        grid_sizes: grid.sizes().to_vec(),
        mu: pair.mu,
        eps_mu: eps * pair.mu,
        iterations: pair.iterations,
        power_residual: pair.residual,
        residual: cert.residual,
        nodal_fraction: cert.nodal_fraction,
        certified: report.pass,
        verify_failures: report.failures,
        norm_q,
        ls,
        frank,
        dn,
        f_values,
        f_slope,
        bs_defect,
        bs_roundtrip,
        thm4_ii,
        thm4_iii,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}
