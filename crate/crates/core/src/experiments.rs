//! Numeric studies: convergence of `(λ_i^{(n)})^{1/n}` to the limit roots,
//! the degree-2 closed-form check, the weak-convergence harness for `ν_d`,
//! and quantile tables of `Φ(μ)`. Each study returns rows in schedule order
//! regardless of how the work was scheduled across threads.

use std::path::PathBuf;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::convolution::{
    constant_root_profile, laguerre_profile, lln_limit_roots, multiplicative_power,
    two_root_profile,
};
use crate::empirical::{
    discretize_measure, ks_distance, ks_distance_exact, log_moment, EmpiricalMeasure,
};
use crate::error::{Error, Result};
use crate::free_limit::{MeasureSpec, PhiQuantileFn};
use crate::io::PolynomialFile;
use crate::precise::{self, format_exact, parse_rational, pow2, rat};
use crate::solver::{roots_of_power, theorem_brackets, SolverConfig, DEFAULT_REL_TOL};
use crate::symmetric::{RootMultiset, SymmetricProfile};

/// Bits carried by logarithms and `n`-th roots in reported columns.
const REPORT_BITS: u64 = 128;
/// Significant digits of decimal columns.
pub const DECIMAL_DIGITS: usize = 30;

pub fn default_n_schedule() -> Vec<u32> {
    (1..=10).map(|k| 1u32 << k).collect()
}

/// Where a seed profile comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeedSpec {
    Laguerre { degree: usize },
    TwoRoot { degree: usize },
    Constant { value: String, degree: usize },
    Roots { roots: Vec<String> },
    ETilde { e_tilde: Vec<String> },
    File { path: PathBuf },
}

impl SeedSpec {
    pub fn profile(&self) -> Result<SymmetricProfile> {
        let positive = |d: usize| {
            if d == 0 {
                Err(Error::Config("seed degree must be at least 1".into()))
            } else {
                Ok(d)
            }
        };
        match self {
            SeedSpec::Laguerre { degree } => Ok(laguerre_profile(positive(*degree)?)),
            SeedSpec::TwoRoot { degree } => Ok(two_root_profile(positive(*degree)?)),
            SeedSpec::Constant { value, degree } => {
                constant_root_profile(&parse_rational(value)?, positive(*degree)?)
            }
            SeedSpec::Roots { roots } => {
                let r = roots
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()?;
                Ok(SymmetricProfile::from_roots(&RootMultiset::new(r)?))
            }
            SeedSpec::ETilde { e_tilde } => SymmetricProfile::from_exact(
                e_tilde
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()?,
            ),
            SeedSpec::File { path } => PolynomialFile::read(path)?.to_profile(),
        }
    }
}

/// Family studied by the weak-convergence harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConjectureSource {
    /// Laguerre profiles of degree `d`; their roots converge to MP.
    Laguerre,
    /// `x^d (x-1)^d`, degree `2d`; roots converge to `½(δ_0+δ_1)`.
    TwoRoot,
    /// Midpoint-quantile discretization of `measure` at degree `d`.
    Measure { measure: MeasureSpec },
}

impl ConjectureSource {
    /// The measure `μ` the seed roots converge to.
    pub fn measure(&self) -> MeasureSpec {
        match self {
            ConjectureSource::Laguerre => MeasureSpec::MarchenkoPastur,
            ConjectureSource::TwoRoot => MeasureSpec::BernoulliHalf,
            ConjectureSource::Measure { measure } => measure.clone(),
        }
    }

    pub fn profile(&self, d: usize) -> Result<SymmetricProfile> {
        Ok(match self {
            ConjectureSource::Laguerre => laguerre_profile(d),
            ConjectureSource::TwoRoot => two_root_profile(d),
            ConjectureSource::Measure { measure } => {
                SymmetricProfile::from_roots(&discretize_measure(measure, d)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    /// Refinement budget; derived from `rel_tol` when absent.
    #[serde(default)]
    pub precision_bits: Option<u32>,
}

fn default_rel_tol() -> f64 {
    DEFAULT_REL_TOL
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            precision_bits: None,
        }
    }
}

impl Tolerances {
    pub fn solver_config(&self) -> Result<SolverConfig> {
        let cfg = SolverConfig::new(self.rel_tol)?;
        Ok(match self.precision_bits {
            Some(b) => cfg.with_precision_bits(b),
            None => cfg,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub seed: Option<SeedSpec>,
    #[serde(default)]
    pub source: Option<ConjectureSource>,
    #[serde(default = "default_n_schedule")]
    pub n_schedule: Vec<u32>,
    #[serde(default)]
    pub d_schedule: Vec<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn strictly_increasing<T: PartialOrd>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl ExperimentConfig {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            seed: None,
            source: None,
            n_schedule: default_n_schedule(),
            d_schedule: Vec::new(),
            tolerances: Tolerances::default(),
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !strictly_increasing(&self.n_schedule) {
            return Err(Error::Config(
                "n_schedule must be strictly increasing".into(),
            ));
        }
        if self.n_schedule.first() == Some(&0) {
            return Err(Error::Config("powers must be at least 1".into()));
        }
        if !strictly_increasing(&self.d_schedule) {
            return Err(Error::Config(
                "d_schedule must be strictly increasing".into(),
            ));
        }
        if self.d_schedule.first() == Some(&0) {
            return Err(Error::Config("degrees must be at least 1".into()));
        }
        if self.tolerances.rel_tol.is_nan() || self.tolerances.rel_tol <= 0.0 {
            return Err(Error::Config("rel_tol must be positive".into()));
        }
        if self.tolerances.precision_bits == Some(0) {
            return Err(Error::Config("precision_bits must be positive".into()));
        }
        self.tolerances.solver_config()?;
        Ok(())
    }
}

/// One output value.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    /// Rendered as `p/q`.
    Exact(BigRational),
    /// Rendered to [`DECIMAL_DIGITS`] significant digits.
    Decimal(BigRational),
    /// Rendered as the shortest decimal that reads back to the same double.
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

fn render_f64(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Exact(v) => format_exact(v),
            Cell::Decimal(v) => precise::to_decimal(v, DECIMAL_DIGITS),
            Cell::Float(v) => render_f64(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Empty => Value::Null,
            other => Value::String(other.render()),
        }
    }
}

fn opt<T>(v: Option<T>, f: impl FnOnce(T) -> Cell) -> Cell {
    v.map_or(Cell::Empty, f)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn rendered_rows(&self) -> impl Iterator<Item = Vec<String>> + '_ {
        self.rows
            .iter()
            .map(|r| r.iter().map(Cell::render).collect())
    }

    /// Array of objects keyed by column name.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(r.iter().map(Cell::to_json))
                        .collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

pub trait Tabular {
    const COLUMNS: &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

pub fn to_table<T: Tabular>(rows: &[T]) -> Table {
    let mut t = Table::new(T::COLUMNS);
    for r in rows {
        t.push(r.cells());
    }
    t
}

fn ln(x: &BigRational) -> BigRational {
    precise::ln_precise(x, REPORT_BITS).expect("positive argument")
}

fn n_q(n: u32) -> BigRational {
    BigRational::from_integer(n.into())
}

// ---------------------------------------------------------------- lln

#[derive(Debug, Clone, PartialEq)]
pub struct LlnRow {
    pub i: usize,
    pub limit: BigRational,
}

impl Tabular for LlnRow {
    const COLUMNS: &'static [&'static str] = &["i", "R_i", "R_i_decimal"];
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.i as i64),
            Cell::Exact(self.limit.clone()),
            Cell::Decimal(self.limit.clone()),
        ]
    }
}

pub fn lln_rows(p: &SymmetricProfile) -> Result<Vec<LlnRow>> {
    let limits = lln_limit_roots(p);
    let exact = limits.exact().ok_or(Error::InexactInput)?;
    Ok(exact
        .iter()
        .enumerate()
        .map(|(k, r)| LlnRow {
            i: k + 1,
            limit: r.clone(),
        })
        .collect())
}

// ---------------------------------------------------------------- converge

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeRow {
    pub n: u32,
    pub i: usize,
    pub lambda: Option<BigRational>,
    /// `(λ_i^{(n)})^{1/n}`.
    pub root_n: Option<BigRational>,
    pub limit: BigRational,
    /// `log λ_i^{1/n} - log R_i`; absent on the zero part.
    pub log_error: Option<BigRational>,
    pub scaled_log_error: Option<BigRational>,
    /// The certified enclosure of `λ_i^{(n)}` meets
    /// `[C(d,i-1)^{-1} R_i^n, C(d,i) R_i^n]`. Roots can sit within the
    /// solver tolerance of a bracket end, so the point value alone is not
    /// compared.
    pub in_bracket: Option<bool>,
    pub error: Option<String>,
}

impl Tabular for ConvergeRow {
    const COLUMNS: &'static [&'static str] = &[
        "n",
        "i",
        "lambda",
        "lambda_root_n",
        "R_i",
        "log_error",
        "n_log_error",
        "in_bracket",
        "error",
    ];
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.n as i64),
            Cell::Int(self.i as i64),
            opt(self.lambda.clone(), Cell::Decimal),
            opt(self.root_n.clone(), Cell::Decimal),
            Cell::Decimal(self.limit.clone()),
            opt(self.log_error.clone(), Cell::Decimal),
            opt(self.scaled_log_error.clone(), Cell::Decimal),
            opt(self.in_bracket, Cell::Bool),
            opt(self.error.clone(), Cell::Text),
        ]
    }
}

fn converge_at(
    p: &SymmetricProfile,
    limits: &[BigRational],
    n: u32,
    cfg: &SolverConfig,
) -> Result<Vec<ConvergeRow>> {
    let blank = |i: usize, error: Option<String>| ConvergeRow {
        n,
        i,
        lambda: None,
        root_n: None,
        limit: limits[i - 1].clone(),
        log_error: None,
        scaled_log_error: None,
        in_bracket: None,
        error,
    };
    let solved = match roots_of_power(p, n, cfg) {
        Ok(s) => s,
        Err(e) if e.is_precision() => {
            return Ok((1..=limits.len())
                .map(|i| blank(i, Some(e.to_string())))
                .collect())
        }
        Err(e) => return Err(e),
    };
    let brackets = theorem_brackets(p, n);
    let roots = solved.roots().roots();
    Ok((1..=limits.len())
        .map(|i| {
            let lambda = roots[i - 1].clone();
            let mut row = blank(i, None);
            if lambda.is_zero() || limits[i - 1].is_zero() {
                row.in_bracket = Some(lambda.is_zero() && limits[i - 1].is_zero());
                row.root_n = Some(precise::nth_root(&lambda, n, REPORT_BITS));
                row.lambda = Some(lambda);
                return row;
            }
            let center = num_traits::pow(limits[i - 1].clone(), n as usize);
            let log_error = ln(&(&lambda / center)) / n_q(n);
            row.root_n = Some(precise::nth_root(&lambda, n, REPORT_BITS));
            let enclosure = solved.bracket_of(i);
            let tb = &brackets.brackets[i - 1];
            row.in_bracket = Some(match (&tb.lower, &tb.upper) {
                (Some(lo), Some(hi)) => &enclosure.lower <= hi && &enclosure.upper >= lo,
                _ => tb.contains(&lambda),
            });
            row.scaled_log_error = Some(&log_error * n_q(n));
            row.log_error = Some(log_error);
            row.lambda = Some(lambda);
            row
        })
        .collect())
}

/// For every `n` in the schedule and every `i`: `λ_i^{(n)}`, its `n`-th
/// root, `R_i`, the log error, `n` times the log error, and whether
/// `λ_i^{(n)}` lies in its a-priori bracket. Precision failures are reported
/// in the `error` column of the affected rows.
pub fn converge(
    p: &SymmetricProfile,
    schedule: &[u32],
    cfg: &SolverConfig,
) -> Result<Vec<ConvergeRow>> {
    if !strictly_increasing(schedule) || schedule.first() == Some(&0) {
        return Err(Error::Config(
            "n-schedule must be positive and strictly increasing".into(),
        ));
    }
    let limits = lln_limit_roots(p)
        .exact()
        .ok_or(Error::InexactInput)?
        .to_vec();
    let blocks: Vec<Vec<ConvergeRow>> = schedule
        .par_iter()
        .map(|&n| converge_at(p, &limits, n, cfg))
        .collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

// ---------------------------------------------------------------- rate-d2

/// Profile of `x² - 2x + 1/2`, whose `⊠_2` powers are `x² - 2x + 2^{-n}`.
pub fn rate_d2_seed() -> SymmetricProfile {
    SymmetricProfile::from_exact(vec![BigRational::one(), BigRational::one(), rat(1, 2)])
        .expect("valid profile")
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub n: u32,
    pub constant: BigRational,
    /// Coefficients of the power are exactly `(1, -2, 2^{-n})`.
    pub coefficients_exact: bool,
    /// `1 ± √(1 - 2^{-n})`.
    pub closed_form: [BigRational; 2],
    pub solver: [BigRational; 2],
    pub max_rel_diff: f64,
    pub agree: bool,
    /// `n (log λ_1^{1/n} - log 1)` and `n (log λ_2^{1/n} - log ½)`.
    pub scaled_log_error: [BigRational; 2],
}

impl Tabular for RateRow {
    const COLUMNS: &'static [&'static str] = &[
        "n",
        "constant",
        "coefficients_exact",
        "lambda1_closed",
        "lambda2_closed",
        "lambda1_solver",
        "lambda2_solver",
        "max_rel_diff",
        "agree",
        "n_log_error_1",
        "n_log_error_2",
    ];
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.n as i64),
            Cell::Exact(self.constant.clone()),
            Cell::Bool(self.coefficients_exact),
            Cell::Decimal(self.closed_form[0].clone()),
            Cell::Decimal(self.closed_form[1].clone()),
            Cell::Decimal(self.solver[0].clone()),
            Cell::Decimal(self.solver[1].clone()),
            Cell::Float(self.max_rel_diff),
            Cell::Bool(self.agree),
            Cell::Decimal(self.scaled_log_error[0].clone()),
            Cell::Decimal(self.scaled_log_error[1].clone()),
        ]
    }
}

/// `1 ± √(1 - 2^{-n})`, the smaller root written as `2^{-n} / (1 + √…)` to
/// avoid cancellation.
pub fn rate_d2_closed_form(n: u32, bits: u64) -> [BigRational; 2] {
    let c = pow2(-(n as i64));
    let s = precise::sqrt(&(BigRational::one() - &c), bits);
    let big = BigRational::one() + &s;
    let small = &c / &big;
    [big, small]
}

fn rel_diff(a: &BigRational, b: &BigRational) -> f64 {
    if b.is_zero() {
        return if a.is_zero() { 0.0 } else { f64::INFINITY };
    }
    precise::to_f64(&((a - b) / b).abs())
}

fn rate_row(seed: &SymmetricProfile, n: u32, cfg: &SolverConfig) -> Result<RateRow> {
    let constant = pow2(-(n as i64));
    let poly = multiplicative_power(seed, n).to_coefficients()?;
    let coefficients_exact =
        poly.coefficients() == [BigRational::one(), precise::int(-2), constant.clone()];
    let closed_form = rate_d2_closed_form(n, cfg.precision_bits as u64 + 64);
    let solved = roots_of_power(seed, n, cfg)?;
    let r = solved.roots().roots();
    let solver = [r[0].clone(), r[1].clone()];
    let max_rel_diff =
        rel_diff(&solver[0], &closed_form[0]).max(rel_diff(&solver[1], &closed_form[1]));
    let ln_half = ln(&rat(1, 2));
    let scaled_log_error = [ln(&solver[0]), ln(&solver[1]) - n_q(n) * ln_half];
    Ok(RateRow {
        n,
        constant,
        coefficients_exact,
        closed_form,
        solver,
        max_rel_diff,
        agree: max_rel_diff <= cfg.rel_tol,
        scaled_log_error,
    })
}

/// One row per `n = 1..=n_max` for `p = x² - 2x + 1/2`.
pub fn rate_d2(n_max: u32, cfg: &SolverConfig) -> Result<Vec<RateRow>> {
    if n_max == 0 {
        return Err(Error::Config("n_max must be at least 1".into()));
    }
    let seed = rate_d2_seed();
    (1..=n_max)
        .into_par_iter()
        .map(|n| rate_row(&seed, n, cfg))
        .collect()
}

// ---------------------------------------------------------------- conjecture

#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureRow {
    pub d: usize,
    pub degree: usize,
    pub ks: f64,
    pub ks_exact: Option<BigRational>,
    /// `|R_1 - ∫t dμ|`.
    pub mean_error: f64,
    /// `|R_d - (∫t^{-1}dμ)^{-1}|`, when the seed has no zero roots.
    pub harmonic_error: Option<f64>,
    /// `∫log dν_d`, when zero-free.
    pub log_moment_limit: Option<f64>,
    /// `∫log dΦ(μ)`, when `μ` has no atom at zero.
    pub log_moment_target: Option<f64>,
}

impl Tabular for ConjectureRow {
    const COLUMNS: &'static [&'static str] = &[
        "d",
        "degree",
        "ks",
        "ks_exact",
        "mean_error",
        "harmonic_error",
        "log_moment_limit",
        "log_moment_target",
    ];
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.d as i64),
            Cell::Int(self.degree as i64),
            Cell::Float(self.ks),
            opt(self.ks_exact.clone(), Cell::Exact),
            Cell::Float(self.mean_error),
            opt(self.harmonic_error, Cell::Float),
            opt(self.log_moment_limit, Cell::Float),
            opt(self.log_moment_target, Cell::Float),
        ]
    }
}

fn conjecture_row(
    source: &ConjectureSource,
    mu: &MeasureSpec,
    target: &PhiQuantileFn,
    target_log: Option<f64>,
    d: usize,
) -> Result<ConjectureRow> {
    let profile = source.profile(d)?;
    let limits = lln_limit_roots(&profile);
    let nu = EmpiricalMeasure::from_limit_roots(&limits);
    let ks_exact = ks_distance_exact(&nu, target);
    let ks = ks_exact
        .as_ref()
        .map_or_else(|| ks_distance(&nu, target), precise::to_f64);
    let r = limits.values_f64();
    let zero_free = profile.zero_count() == 0;
    let (lower, upper) = target.support();
    Ok(ConjectureRow {
        d,
        degree: profile.degree(),
        ks,
        ks_exact,
        mean_error: (r[0] - mu.mean()).abs(),
        harmonic_error: zero_free.then(|| (r[r.len() - 1] - lower).abs()),
        log_moment_limit: if zero_free {
            Some(log_moment(&nu)?)
        } else {
            None
        },
        log_moment_target: target_log,
    })
    .inspect(|_row| {
        debug_assert!(upper.is_finite());
    })
}

/// KS distance between `ν_d` and `Φ(μ)` with the endpoint and log-moment
/// diagnostics, one row per `d`.
pub fn conjecture(source: &ConjectureSource, d_schedule: &[usize]) -> Result<Vec<ConjectureRow>> {
    if !strictly_increasing(d_schedule) || d_schedule.first() == Some(&0) {
        return Err(Error::Config(
            "d-schedule must be positive and strictly increasing".into(),
        ));
    }
    let mu = source.measure();
    let target = PhiQuantileFn::new(mu.clone())?;
    let target_log = target.log_moment().ok();
    d_schedule
        .par_iter()
        .map(|&d| conjecture_row(source, &mu, &target, target_log, d))
        .collect()
}

// ---------------------------------------------------------------- phi

#[derive(Debug, Clone, PartialEq)]
pub struct PhiRow {
    pub k: usize,
    pub t: f64,
    pub quantile: f64,
}

impl Tabular for PhiRow {
    const COLUMNS: &'static [&'static str] = &["k", "t", "quantile"];
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.k as i64),
            Cell::Float(self.t),
            Cell::Float(self.quantile),
        ]
    }
}

/// `Q(t)` of `Φ(μ)` at `t_k = m + (1 - m) k/(points + 1)`, `k = 1..=points`,
/// with `m = μ({0})`.
pub fn phi_table(mu: &MeasureSpec, points: usize) -> Result<Vec<PhiRow>> {
    if points == 0 {
        return Err(Error::Config("points must be at least 1".into()));
    }
    let phi = PhiQuantileFn::new(mu.clone())?;
    let m = phi.zero_mass();
    (1..=points)
        .into_par_iter()
        .map(|k| {
            let t = m + (1.0 - m) * k as f64 / (points + 1) as f64;
            Ok(PhiRow {
                k,
                t,
                quantile: phi.eval(t)?,
            })
        })
        .collect()
}
