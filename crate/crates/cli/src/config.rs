//! Run configuration: a flat `key = value` text format with typed keys.
//! Unknown or duplicated keys are errors, so a typo can never silently run
//! the wrong experiment.

use eigenforge::{DispersionSymbol, Result, SpectralError};

use crate::policy;

/// Which dispersion symbol a run uses.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolChoice {
    Laplacian,
    Fractional { s: f64 },
}

impl SymbolChoice {
    pub fn to_symbol(&self) -> Result<DispersionSymbol> {
        match self {
            SymbolChoice::Laplacian => Ok(DispersionSymbol::Laplacian),
            SymbolChoice::Fractional { s } => DispersionSymbol::fractional(*s),
        }
    }
}

/// How the tube stretch `M` is chosen per `eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MRule {
    /// `M = max(2, ln(1/eps))`.
    Log,
    Fixed(f64),
}

impl MRule {
    pub fn m(&self, eps: f64) -> f64 {
        match self {
            MRule::Log => 2.0f64.max((1.0 / eps).ln()),
            MRule::Fixed(m) => *m,
        }
    }
}

/// How the cap width parameter `c0` is chosen per `M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum C0Rule {
    /// `c0 = 1/M`.
    InverseM,
    Fixed(f64),
}

impl C0Rule {
    pub fn c0(&self, m: f64) -> f64 {
        match self {
            C0Rule::InverseM => 1.0 / m,
            C0Rule::Fixed(c) => *c,
        }
    }
}

/// Everything a sweep needs; `default()` is the sweep the tables in the
/// README describe.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub dimension: usize,
    pub symbol: SymbolChoice,
    pub lambda: f64,
    pub eps: Vec<f64>,
    pub m_rule: MRule,
    pub c0_rule: C0Rule,
    pub q: Vec<f64>,
    pub l: Vec<f64>,
    pub margin: f64,
    pub grid_scale: f64,
    pub power_tol: f64,
    pub max_iter: usize,
    pub forge_tau: f64,
    pub certify_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            dimension: 2,
            symbol: SymbolChoice::Laplacian,
            lambda: 1.0,
            eps: vec![0.2, 0.1, 0.05],
            m_rule: MRule::Log,
            c0_rule: C0Rule::InverseM,
            q: vec![1.5, 2.0, 2.5],
            l: vec![1.0, 2.0, 4.0, 8.0],
            margin: policy::DEFAULT_MARGIN,
            grid_scale: 1.0,
            power_tol: 1e-10,
            max_iter: 5000,
            forge_tau: 1e-8,
            certify_tol: 1e-3,
        }
    }
}

impl SweepConfig {
    /// `(M, c0)` for one `eps`.
    pub fn params(&self, eps: f64) -> (f64, f64) {
        let m = self.m_rule.m(eps);
        (m, self.c0_rule.c0(m))
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 2 {
            return Err(SpectralError::Unsupported(format!(
                "the sweep policy is two-dimensional, got dimension {}",
                self.dimension
            )));
        }
        if self.eps.is_empty() {
            return Err(bad("eps list must be nonempty"));
        }
        for &e in &self.eps {
            if !(e > 0.0 && e <= 0.5) || !e.is_finite() {
                return Err(bad(&format!("eps must lie in (0, 0.5], got {e}")));
            }
        }
        if self.q.is_empty() {
            return Err(bad("q list must be nonempty"));
        }
        for &q in &self.q {
            if !(q >= 1.0) || !q.is_finite() {
                return Err(bad(&format!("q must be at least 1, got {q}")));
            }
        }
        if self.l.is_empty() {
            return Err(bad("L list must be nonempty"));
        }
        for &l in &self.l {
            if !(l >= 1.0) || !l.is_finite() {
                return Err(bad(&format!("L must be at least 1, got {l}")));
            }
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(bad(&format!("lambda must be positive, got {}", self.lambda)));
        }
        if let SymbolChoice::Fractional { s } = self.symbol {
            if !(s > 0.0) || !s.is_finite() {
                return Err(bad(&format!("fractional order s must be positive, got {s}")));
            }
        }
        if !(self.power_tol > 0.0) || !(self.certify_tol > 0.0) {
            return Err(bad("tolerances must be positive"));
        }
        if !(self.forge_tau > 0.0 && self.forge_tau <= 1e-4) {
            return Err(bad(&format!(
                "forge_tau must lie in (0, 1e-4], got {}",
                self.forge_tau
            )));
        }
        if self.max_iter == 0 {
            return Err(bad("max_iter must be positive"));
        }
        if let MRule::Fixed(m) = self.m_rule {
            if !(m >= 1.0) || !m.is_finite() {
                return Err(bad(&format!("fixed M must be at least 1, got {m}")));
            }
        }
        if let C0Rule::Fixed(c) = self.c0_rule {
            if !(c > 0.0) || !c.is_finite() {
                return Err(bad(&format!("fixed c0 must be positive, got {c}")));
            }
        }
        // The policy must resolve the cap at the hardest eps of the run.
        let mut smallest = self.eps[0];
        for &e in &self.eps {
            if e < smallest {
                smallest = e;
            }
        }
        let (m, c0) = self.params(smallest);
        let plan = policy::tube_plan(self.lambda, smallest, m, c0, self.margin, self.grid_scale)?;
        policy::check_cap_resolution(&plan, smallest, c0)?;
        Ok(())
    }
}

fn bad(msg: &str) -> SpectralError {
    SpectralError::BadParameter(msg.to_string())
}

/// Parse the flat text format: one `key = value` per line, `#` starts a
/// comment, blank lines ignored. Every key must be known and appear at
/// most once; values are typed per key.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::default();
    let mut seen: Vec<String> = Vec::new();
    let mut symbol_kind: Option<String> = None;
    let mut fractional_s: Option<f64> = None;
    let mut m_rule: Option<String> = None;
    let mut m_value: Option<f64> = None;
    let mut c0_rule: Option<String> = None;
    let mut c0_value: Option<f64> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            bad(&format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            ))
        })?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        if seen.iter().any(|k| k == &key) {
            return Err(bad(&format!("duplicate key `{key}`")));
        }
        seen.push(key.clone());
        match key.as_str() {
            "dimension" => cfg.dimension = parse_one(&key, value)?,
            "symbol" => symbol_kind = Some(value.to_ascii_lowercase()),
            "s" => fractional_s = Some(parse_one(&key, value)?),
            "lambda" => cfg.lambda = parse_one(&key, value)?,
            "eps" => cfg.eps = parse_list(&key, value)?,
            "m_rule" => m_rule = Some(value.to_ascii_lowercase()),
            "m" => m_value = Some(parse_one(&key, value)?),
            "c0_rule" => c0_rule = Some(value.to_ascii_lowercase()),
            "c0" => c0_value = Some(parse_one(&key, value)?),
            "q" => cfg.q = parse_list(&key, value)?,
            "l" => cfg.l = parse_list(&key, value)?,
            "margin" => cfg.margin = parse_one(&key, value)?,
            "grid_scale" => cfg.grid_scale = parse_one(&key, value)?,
            "power_tol" => cfg.power_tol = parse_one(&key, value)?,
            "max_iter" => cfg.max_iter = parse_one(&key, value)?,
            "forge_tau" => cfg.forge_tau = parse_one(&key, value)?,
            "certify_tol" => cfg.certify_tol = parse_one(&key, value)?,
            _ => return Err(bad(&format!("unknown key `{key}`"))),
        }
    }

    cfg.symbol = match symbol_kind.as_deref() {
        None | Some("laplacian") => {
            if symbol_kind.is_none() {
                if let Some(s) = fractional_s {
                    return Err(bad(&format!(
                        "s = {s} is only meaningful with `symbol = fractional`"
                    )));
                }
            } else if fractional_s.is_some() {
                return Err(bad("s is only meaningful with `symbol = fractional`"));
            }
            SymbolChoice::Laplacian
        }
        Some("fractional") => SymbolChoice::Fractional {
            s: fractional_s.unwrap_or(1.0),
        },
        Some(other) => {
            return Err(bad(&format!(
                "symbol must be `laplacian` or `fractional`, got `{other}`"
            )))
        }
    };
    cfg.m_rule = match m_rule.as_deref() {
        None => {
            if let Some(m) = m_value {
                return Err(bad(&format!(
                    "m = {m} is only meaningful with `m_rule = fixed`"
                )));
            }
            MRule::Log
        }
        Some("log") => {
            if m_value.is_some() {
                return Err(bad("m is only meaningful with `m_rule = fixed`"));
            }
            MRule::Log
        }
        Some("fixed") => MRule::Fixed(
            m_value.ok_or_else(|| bad("`m_rule = fixed` needs an `m = ...` line"))?,
        ),
        Some(other) => {
            return Err(bad(&format!(
                "m_rule must be `log` or `fixed`, got `{other}`"
            )))
        }
    };
    cfg.c0_rule = match c0_rule.as_deref() {
        None => {
            if let Some(c) = c0_value {
                return Err(bad(&format!(
                    "c0 = {c} is only meaningful with `c0_rule = fixed`"
                )));
            }
            C0Rule::InverseM
        }
        Some("inverse_m") => {
            if c0_value.is_some() {
                return Err(bad("c0 is only meaningful with `c0_rule = fixed`"));
            }
            C0Rule::InverseM
        }
        Some("fixed") => C0Rule::Fixed(
            c0_value.ok_or_else(|| bad("`c0_rule = fixed` needs a `c0 = ...` line"))?,
        ),
        Some(other) => {
            return Err(bad(&format!(
                "c0_rule must be `inverse_m` or `fixed`, got `{other}`"
            )))
        }
    };

    cfg.validate()?;
    Ok(cfg)
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| bad(&format!("key `{key}`: cannot parse `{value}`")))
}

/// Comma-separated float list; also the shape the CLI override flags use.
pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    if value.trim().is_empty() {
        return Err(bad(&format!("key `{key}`: list must be nonempty")));
    }
    value
        .split(',')
        .map(|v| parse_one(key, v.trim()))
        .collect()
}
