//! `eigenforge`: forge complex potentials with a prescribed eigenvalue
//! and tabulate how they sit against eigenvalue bounds.
//!
//! Every subcommand exits 0 only when all certifications it requested
//! pass; operational errors exit 2.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eigenforge::{
    kernel_decay_profile, knapp_lower_bound, region_indicator, shell_cutoff, verify_certificate,
    KnappSpec, RegionSpec, Result, SpectralError,
};
use eigenforge_cli::certio::{atomic_write, load_certificate, save_certificate};
use eigenforge_cli::config::{parse_config, parse_list, SweepConfig, SymbolChoice};
use eigenforge_cli::policy;
use eigenforge_cli::sweep::{forge_run, run_sweep, shell_radius, RowOutcome};

#[derive(Parser)]
#[command(name = "eigenforge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file; built-in defaults apply when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the eps list, comma separated.
    #[arg(long)]
    eps: Option<String>,
    /// Override the Lebesgue orders, comma separated.
    #[arg(long)]
    q: Option<String>,
    /// Override the localization factors, comma separated.
    #[arg(long = "L")]
    l: Option<String>,
    /// Override the grid refinement multiplier.
    #[arg(long)]
    grid_scale: Option<f64>,
    /// Override the certification tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Forge one certificate file per eps.
    Forge(Common),
    /// Load a certificate file and certify it again from scratch.
    Verify {
        file: PathBuf,
        /// Certification tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the full measurement sweep and write sweep.csv.
    Sweep(Common),
    /// Tabulate the cap packet lower bound over the tube stretch M.
    Knapp {
        #[command(flatten)]
        common: Common,
        /// Stretch values, comma separated.
        #[arg(long, default_value = "2,4,8,16")]
        m: String,
    },
    /// Fit the decay profile of the shell-localized kernel.
    Kernel(Common),
    /// Run the sweep for the fractional symbol and print its bound table.
    Fractional {
        #[command(flatten)]
        common: Common,
        /// Fractional order of the symbol.
        #[arg(long)]
        s: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn load_config(common: &Common) -> Result<SweepConfig> {
    let mut cfg = match &common.config {
        Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
        None => SweepConfig::default(),
    };
    if let Some(eps) = &common.eps {
        cfg.eps = parse_list("eps", eps)?;
    }
    if let Some(q) = &common.q {
        cfg.q = parse_list("q", q)?;
    }
    if let Some(l) = &common.l {
        cfg.l = parse_list("L", l)?;
    }
    if let Some(scale) = common.grid_scale {
        cfg.grid_scale = scale;
    }
    if let Some(tol) = common.tol {
        cfg.certify_tol = tol;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Forge(common) => cmd_forge(&common),
        Command::Verify { file, tol } => cmd_verify(&file, tol),
        Command::Sweep(common) => cmd_sweep(&common, None),
        Command::Knapp { common, m } => cmd_knapp(&common, &m),
        Command::Kernel(common) => cmd_kernel(&common),
        Command::Fractional { common, s } => {
            let mut cfg = load_config(&common)?;
            cfg.symbol = match (cfg.symbol, s) {
                (SymbolChoice::Fractional { s }, None) => SymbolChoice::Fractional { s },
                (_, s) => SymbolChoice::Fractional {
                    s: s.unwrap_or(1.0),
                },
            };
            cfg.validate()?;
            cmd_sweep(&common, Some(cfg))
        }
    }
}

fn cmd_forge(common: &Common) -> Result<bool> {
    let cfg = load_config(common)?;
    let mut all = true;
    for &eps in &cfg.eps {
        let (m, c0) = cfg.params(eps);
        let run = forge_run(&cfg, eps, m, c0)?;
        let path = common.out.join(format!("certificate_eps{eps}.crt"));
        save_certificate(&run.cert, &path)?;
        let verdict = if run.report.pass { "certified" } else { "FAILED" };
        println!(
            "eps = {eps}  mu = {:.6}  residual = {:.3e}  {}  -> {}",
            run.cert.mu,
            run.cert.residual,
            verdict,
            path.display()
        );
        for failure in &run.report.failures {
            eprintln!("  {failure}");
        }
        all &= run.report.pass;
    }
    Ok(all)
}

fn cmd_verify(file: &Path, tol: Option<f64>) -> Result<bool> {
    let cert = load_certificate(file)?;
    let report = verify_certificate(&cert, tol.unwrap_or(1e-3))?;
    println!(
        "lambda = {}  eps = {}  mu = {:.6}  residual = {:.3e}  nodal_fraction = {:.3e}",
        cert.lambda, cert.eps, cert.mu, report.residual, cert.nodal_fraction
    );
    for (q, v) in &report.q_norms {
        println!("norm_q_{q} = {v:.6e}");
    }
    for failure in &report.failures {
        println!("failure: {failure}");
    }
    println!("{}", if report.pass { "PASS" } else { "FAIL" });
    Ok(report.pass)
}

fn cmd_sweep(common: &Common, preset: Option<SweepConfig>) -> Result<bool> {
    let cfg = match preset {
        Some(cfg) => cfg,
        None => load_config(common)?,
    };
    let fractional = matches!(cfg.symbol, SymbolChoice::Fractional { .. });
    let output = run_sweep(&cfg)?;
    let name = if fractional { "fractional.csv" } else { "sweep.csv" };
    let path = common.out.join(name);
    output.write_csv(&path)?;
    let mut all = true;
    for outcome in &output.rows {
        match outcome {
            RowOutcome::Done(row) => {
                println!(
                    "eps = {}  grid = {}x{}  mu = {:.6}  eps_mu = {:.6}  residual = {:.3e}  iterations = {}  {}",
                    row.eps,
                    row.grid_sizes[0],
                    row.grid_sizes[1],
                    row.mu,
                    row.eps_mu,
                    row.residual,
                    row.iterations,
                    if row.certified { "certified" } else { "FAILED" }
                );
                for failure in &row.verify_failures {
                    eprintln!("  {failure}");
                }
                if fractional {
                    if let (Some(ii), Some(iii)) = (&row.thm4_ii, &row.thm4_iii) {
                        println!(
                            "  {}: lhs = {:.6e}  rhs = {:.6e}  ratio = {:.6e}",
                            ii.name, ii.lhs, ii.rhs, ii.ratio
                        );
                        println!(
                            "  {}: lhs = {:.6e}  rhs = {:.6e}  ratio = {:.6e}",
                            iii.name, iii.lhs, iii.rhs, iii.ratio
                        );
                    }
                }
            }
            RowOutcome::Failed { eps, reason, .. } => {
                println!("eps = {eps}  FAILED: {reason}");
            }
        }
        all &= outcome.is_certified();
    }
    println!("table -> {}", path.display());
    Ok(all)
}

fn cmd_knapp(common: &Common, m_list: &str) -> Result<bool> {
    let cfg = load_config(common)?;
    let eps = match cfg.eps.as_slice() {
        [one] => *one,
        _ if common.eps.is_none() => 0.05,
        _ => {
            return Err(SpectralError::BadParameter(
                "the stretch table runs at a single eps".into(),
            ))
        }
    };
    let symbol = cfg.symbol.to_symbol()?;
    let shell = shell_radius(&cfg.symbol, cfg.lambda);
    let mut csv = String::from("epsilon,M,c0,lower_bound\n");
    for &m in &parse_list("m", m_list)? {
        if !(m >= 1.0) {
            return Err(SpectralError::BadParameter(format!(
                "stretch M must be at least 1, got {m}"
            )));
        }
        let c0 = 1.0 / m;
        let plan = policy::tube_plan(cfg.lambda, eps, m, c0, cfg.margin, cfg.grid_scale)?;
        policy::check_cap_resolution(&plan, eps, c0)?;
        let grid = plan.build()?;
        let mut region = RegionSpec::tube(eps, m);
        region.axis_scale = shell;
        let chi = region_indicator(&region, &grid)?;
        let spec = KnappSpec::new(eps, c0, vec![shell, 0.0]);
        let bound = knapp_lower_bound(&spec, &chi, &symbol)?;
        println!("M = {m}  c0 = {c0}  lower_bound = {bound:.6}");
        csv.push_str(&format!(
            "{:.11e},{:.11e},{:.11e},{:.11e}\n",
            eps, m, c0, bound
        ));
    }
    let path = common.out.join("knapp.csv");
    atomic_write(&path, csv.as_bytes())?;
    println!("table -> {}", path.display());
    Ok(true)
}

fn cmd_kernel(common: &Common) -> Result<bool> {
    let cfg = load_config(common)?;
    let eps = match cfg.eps.as_slice() {
        [one] => *one,
        _ if common.eps.is_none() => 0.02,
        _ => {
            return Err(SpectralError::BadParameter(
                "the kernel profile runs at a single eps".into(),
            ))
        }
    };
    let width = 0.5;
    let boxes = 96.0 * 2.0 * std::f64::consts::PI;
    let n = policy::next_smooth_odd((cfg.grid_scale * 1701.0).ceil() as usize);
    let grid = eigenforge::build_grid(2, &[boxes, boxes], &[n, n])?;
    let symbol = cfg.symbol.to_symbol()?;
    let eta = shell_cutoff(&symbol, &grid, cfg.lambda, width)?;
    let profile = kernel_decay_profile(&symbol, &grid, cfg.lambda, eps, &eta)?;
    println!(
        "grid = {n}x{n}  fit window = [{:.3}, {:.3}]",
        profile.fit_range.0, profile.fit_range.1
    );
    println!(
        "exponent = {:.4}  r_squared = {:.5}  suppression = {:.4}",
        profile.fitted_exponent, profile.r_squared, profile.suppression_ratio
    );
    let mut csv = String::from("radius,envelope\n");
    for (r, v) in profile.radii.iter().zip(&profile.envelope) {
        csv.push_str(&format!("{:.11e},{:.11e}\n", r, v));
    }
    let path = common.out.join("kernel.csv");
    atomic_write(&path, csv.as_bytes())?;
    println!("table -> {}", path.display());
    Ok(true)
}
