//! Batch runs over the catalog, regression against the reference tables,
//! `m`-sweeps and profile sampling.

mod expected;
mod output;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::ansatz::{self, eval_profile, Family, MetricProfile, ProfilePoint};
use crate::bundle::{BundleData, CatalogName, EpsilonChoice};
use crate::entropy::{self, EntropyResult};
use crate::error::{Error, Result};
use crate::numerics::NumericsConfig;

pub use expected::{expected_rows, ExpectedRow, EXPECTED_ROWS};
pub use output::{
    format_significant, parse_csv_report, write_report, write_samples, write_sweep, CsvRecord, OutputFormat,
};

/// Which metric to construct on a bundle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSpec {
    pub family: Family,
    pub m: Option<f64>,
    pub eps: Option<EpsilonChoice>,
}

impl RowSpec {
    pub fn einstein_z2() -> Self {
        Self { family: Family::EinsteinZ2, m: None, eps: None }
    }

    pub fn einstein_ww(eps: EpsilonChoice) -> Self {
        Self { family: Family::EinsteinWw, m: None, eps: Some(eps) }
    }

    pub fn krs() -> Self {
        Self { family: Family::Krs, m: None, eps: None }
    }

    pub fn quasi_einstein(m: f64, eps: EpsilonChoice) -> Self {
        Self { family: Family::QuasiEinstein, m: Some(m), eps: Some(eps) }
    }

    pub fn from_expected(row: &ExpectedRow) -> Self {
        Self { family: row.family, m: row.m.map(f64::from), eps: row.epsilon() }
    }

    fn eps_or_default(&self, bundle: &BundleData) -> EpsilonChoice {
        self.eps.clone().unwrap_or_else(|| EpsilonChoice::all_negative(bundle.rank()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvedRow {
    pub profile: MetricProfile,
    pub entropy: EntropyResult,
}

impl SolvedRow {
    pub fn constant_value(&self) -> f64 {
        self.profile.defining_constant()
    }
}

/// Solves the metric described by `spec`. Missing `ε` defaults to all `-1`.
pub fn solve_row(bundle: &BundleData, spec: &RowSpec, cfg: &NumericsConfig) -> Result<MetricProfile> {
    match spec.family {
        Family::EinsteinZ2 => ansatz::solve_ww_z2(bundle, cfg),
        Family::Krs => ansatz::solve_krs(bundle, cfg),
        Family::EinsteinWw => ansatz::solve_ww_einstein(bundle, &spec.eps_or_default(bundle), cfg),
        Family::QuasiEinstein => {
            let m = spec.m.ok_or_else(|| Error::Config("quasi-Einstein metrics need a value of m".into()))?;
            ansatz::solve_qem(bundle, m, &spec.eps_or_default(bundle), cfg)
        }
    }
}

/// Solves the metric and computes its entropy. Soliton profiles come back
/// with their potential normalisation set.
pub fn compute_row(bundle: &BundleData, spec: &RowSpec, cfg: &NumericsConfig) -> Result<SolvedRow> {
    let profile = solve_row(bundle, spec, cfg)?;
    let entropy = entropy::nu_for_profile(&profile)?;
    let profile = match entropy.breakdown.c {
        Some(c) => profile.with_potential_constant(c),
        None => profile,
    };
    Ok(SolvedRow { profile, entropy })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative tolerance on the significand.
    pub rtol_significand: f64,
    /// Absolute tolerance on the defining constant; `None` uses two units
    /// of the last printed decimal of each reference value.
    pub atol_constant: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol_significand: 5e-6, atol_constant: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub expected: ExpectedRow,
    pub constant_deviation: f64,
    pub constant_atol: f64,
    /// `|significand - expected| / expected`, with the reference exponent.
    pub significand_deviation: f64,
    pub significand_rtol: f64,
    pub pass: bool,
}

impl Comparison {
    fn new(expected: &ExpectedRow, solved: &SolvedRow, tol: &Tolerances) -> Self {
        let constant_atol = tol.atol_constant.unwrap_or_else(|| expected.constant_atol());
        let constant_deviation = (solved.constant_value() - expected.constant_value()).abs();
        let significand = (solved.entropy.nu + f64::from(expected.exponent)).exp();
        let significand_deviation = (significand - expected.significand).abs() / expected.significand;
        let pass = constant_deviation <= constant_atol && significand_deviation <= tol.rtol_significand;
        Self {
            expected: *expected,
            constant_deviation,
            constant_atol,
            significand_deviation,
            significand_rtol: tol.rtol_significand,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowOutcome {
    pub bundle: String,
    pub spec: RowSpec,
    pub solved: Result<SolvedRow>,
    pub expected: Option<ExpectedRow>,
    pub comparison: Option<Comparison>,
}

impl RowOutcome {
    /// `None` when there was nothing to compare against.
    pub fn pass(&self) -> Option<bool> {
        match (&self.solved, &self.comparison) {
            (_, Some(c)) => Some(c.pass),
            (Err(_), None) if self.expected.is_some() => Some(false),
            _ => None,
        }
    }
}

/// Outcome of a batch, ordered from best to worst.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RunStatus {
    Pass,
    Mismatch,
    SolverFailure,
    ValidationError,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Pass => 0,
            RunStatus::ValidationError => 1,
            RunStatus::SolverFailure => 2,
            RunStatus::Mismatch => 3,
        }
    }

    pub fn of_error(e: &Error) -> Self {
        if e.is_solver_failure() {
            RunStatus::SolverFailure
        } else {
            RunStatus::ValidationError
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub rows: Vec<RowOutcome>,
    pub numerics: NumericsConfig,
    pub tolerances: Tolerances,
    pub elapsed: Duration,
}

impl RunReport {
    pub fn status(&self) -> RunStatus {
        self.rows
            .iter()
            .map(|r| match (&r.solved, r.pass()) {
                (Err(e), _) => RunStatus::of_error(e),
                (Ok(_), Some(false)) => RunStatus::Mismatch,
                _ => RunStatus::Pass,
            })
            .max()
            .unwrap_or(RunStatus::Pass)
    }

    pub fn all_pass(&self) -> bool {
        self.status() == RunStatus::Pass
    }
}

/// Computes a list of rows, comparing where a reference row
/// is attached. Rows are independent and run in parallel; the report keeps
/// input order.
pub fn run_rows(
    jobs: Vec<(String, BundleData, RowSpec, Option<ExpectedRow>)>,
    cfg: &NumericsConfig,
    tol: &Tolerances,
) -> RunReport {
    let start = Instant::now();
    let rows = jobs
        .into_par_iter()
        .map(|(name, bundle, spec, expected)| {
            let solved = compute_row(&bundle, &spec, cfg);
            let comparison = match (&solved, &expected) {
                (Ok(s), Some(e)) => Some(Comparison::new(e, s, tol)),
                _ => None,
            };
            RowOutcome { bundle: name, spec, solved, expected, comparison }
        })
        .collect();
    RunReport { rows, numerics: *cfg, tolerances: *tol, elapsed: start.elapsed() }
}

/// Solves every reference row of the named catalog bundles and compares.
pub fn run_catalog(names: &[CatalogName], cfg: &NumericsConfig, tol: &Tolerances) -> RunReport {
    let jobs = names
        .iter()
        .flat_map(|&name| expected_rows(name))
        .map(|row| (row.bundle.as_str().to_string(), row.bundle.bundle(), RowSpec::from_expected(row), Some(*row)))
        .collect();
    run_rows(jobs, cfg, tol)
}

/// Uniform samples of `α`, `β_i` and `f` on `[0, s*]`, endpoints included.
pub fn sample_profile(profile: &MetricProfile, grid_points: usize) -> Result<Vec<ProfilePoint>> {
    if grid_points < 2 {
        return Err(Error::Config("at least two sample points are required".into()));
    }
    let s_star = profile.s_star();
    let last = grid_points - 1;
    (0..grid_points)
        .map(|i| {
            let s = if i == last { s_star } else { s_star * i as f64 / last as f64 };
            eval_profile(profile, s)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
    NotMonotone,
    NotApplicable,
}

impl Trend {
    pub fn as_str(self) -> &'static str {
        match self {
            Trend::Increasing => "increasing",
            Trend::Decreasing => "decreasing",
            Trend::NotMonotone => "not monotone",
            Trend::NotApplicable => "n/a",
        }
    }

    /// Strict monotonicity of a sequence; fewer than two values is n/a.
    pub fn of(values: &[f64]) -> Trend {
        if values.len() < 2 {
            return Trend::NotApplicable;
        }
        if values.windows(2).all(|w| w[0] < w[1]) {
            Trend::Increasing
        } else if values.windows(2).all(|w| w[0] > w[1]) {
            Trend::Decreasing
        } else {
            Trend::NotMonotone
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub m: f64,
    pub solved: Result<SolvedRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub bundle: String,
    pub eps: EpsilonChoice,
    pub rows: Vec<SweepRow>,
    /// The bundle's soliton, for comparison with the large-`m` limit.
    pub krs: Result<SolvedRow>,
    /// Trend of the normalised entropy in `m`; n/a if any `m` failed.
    pub trend: Trend,
}

impl SweepReport {
    pub fn status(&self) -> RunStatus {
        self.rows
            .iter()
            .map(|r| &r.solved)
            .chain(std::iter::once(&self.krs))
            .map(|s| s.as_ref().err().map_or(RunStatus::Pass, RunStatus::of_error))
            .max()
            .unwrap_or(RunStatus::Pass)
    }
}

/// Quasi-Einstein metrics for each `m`, plus the soliton.
pub fn sweep_m(
    bundle_name: &str,
    bundle: &BundleData,
    eps: &EpsilonChoice,
    m_list: &[f64],
    cfg: &NumericsConfig,
) -> SweepReport {
    let rows: Vec<SweepRow> = m_list
        .par_iter()
        .map(|&m| SweepRow { m, solved: compute_row(bundle, &RowSpec::quasi_einstein(m, eps.clone()), cfg) })
        .collect();
    let krs = compute_row(bundle, &RowSpec::krs(), cfg);
    let nus: Option<Vec<f64>> = rows.iter().map(|r| r.solved.as_ref().ok().map(|s| s.entropy.nu)).collect();
    let trend = nus.map_or(Trend::NotApplicable, |v| Trend::of(&v));
    SweepReport { bundle: bundle_name.to_string(), eps: eps.clone(), rows, krs, trend }
}
