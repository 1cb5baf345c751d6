//! Cohomogeneity-one metrics
//!
//! ```text
//! g = α(s)⁻¹ ds² + α(s) θ⊗θ + Σ β_i(s) π_i* h_i,   s ∈ [0, s*]
//! ```
//!
//! on the `CP¹`-bundle `P_q ×_{U(1)} CP¹`. Each family fixes `β_i` in closed
//! form and `α` as a prefactor times a running integral; one scalar
//! constant is left over and is determined by a closing condition. The
//! solvers in this module find that constant and return an immutable
//! [`MetricProfile`].
//!
//! Smoothness at the two collapsed circles needs `α(0) = α(s*) = 0`,
//! `α'(0) = -α'(s*) = 2` and every `β_i > 0` on `[0, s*]`;
//! [`MetricProfile::diagnostics`] measures all of these.

mod krs;
mod warped;
mod z2;

use serde::{Deserialize, Serialize};

use crate::bundle::{BundleData, EpsilonChoice};
use crate::error::{Error, Result};
use crate::numerics::{
    cumulative_simpson38, find_root_bracketed, integrate_simpson38, scan_bracket, NumericsConfig, ScanScale,
};

pub(crate) use krs::weight_polynomial as krs_weight;
pub use krs::{krs_closing_value, solve_krs, solve_krs_all};
pub use warped::{solve_qem, solve_qem_all, solve_ww_einstein, solve_ww_einstein_all};
pub use z2::{solve_ww_z2, solve_ww_z2_all, z2_closing_value};

/// Finite-difference step for the boundary derivative checks.
pub const FD_STEP: f64 = 1e-5;
/// Points used when checking `β_i > 0`.
pub const BETA_GRID: usize = 1501;

/// Thresholds a solved profile must meet.
pub const ALPHA_END_TOL: f64 = 1e-8;
pub const ALPHA_SLOPE_TOL: f64 = 1e-6;
pub const QUADRATIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Wang-Wang Einstein metric with fibre-wise Z2 symmetry.
    EinsteinZ2,
    /// Wang-Wang Einstein metric without the Z2 symmetry.
    EinsteinWw,
    /// Dancer-Wang shrinking Kähler-Ricci soliton.
    Krs,
    QuasiEinstein,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::EinsteinZ2 => "einstein_z2",
            Family::EinsteinWw => "einstein_ww",
            Family::Krs => "krs",
            Family::QuasiEinstein => "qe",
        }
    }

    pub fn constant_name(self) -> &'static str {
        match self {
            Family::EinsteinZ2 => "R",
            Family::EinsteinWw | Family::QuasiEinstein => "kappa0",
            Family::Krs => "kappa1",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "einstein_z2" | "z2" => Ok(Family::EinsteinZ2),
            "einstein_ww" | "ww" | "einstein" => Ok(Family::EinsteinWw),
            "krs" => Ok(Family::Krs),
            "qe" | "quasi_einstein" => Ok(Family::QuasiEinstein),
            other => Err(Error::Config(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Z2Constants {
    /// Midpoint of the interval; `s* = 2R`.
    pub r: f64,
    pub a: Vec<f64>,
    /// `E = R(R-4)/2`.
    pub e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WwConstants {
    pub kappa0: f64,
    /// `E* = κ₀(κ₀+4)/2`.
    pub e_star: f64,
    pub a: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrsConstants {
    pub kappa1: f64,
    /// `σ_i = -2 - 2p_i/q_i`.
    pub sigma: Vec<f64>,
    /// Additive normalisation of the potential, fixed by the entropy
    /// normalisation `∫ e^{-f} dV = (4π)^{n/2}`.
    pub c: Option<f64>,
}

impl KrsConstants {
    /// `κ₀ = C/κ₁ - 2`, available once `C` is fixed.
    pub fn kappa0(&self) -> Option<f64> {
        self.c.map(|c| c / self.kappa1 - 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QeConstants {
    pub m: f64,
    pub kappa0: f64,
    pub e_star: f64,
    pub a: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Constants {
    Z2(Z2Constants),
    Ww(WwConstants),
    Krs(KrsConstants),
    Qe(QeConstants),
}

/// A solved metric of one of the four families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricProfile {
    bundle: BundleData,
    eps: Option<EpsilonChoice>,
    constants: Constants,
    /// Normalised closing-condition value at the solved constant.
    closing_residual: f64,
    cfg: NumericsConfig,
}

/// `α`, `β_i` and the potential `f` at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub s: f64,
    pub alpha: f64,
    pub betas: Vec<f64>,
    pub f: f64,
}

impl MetricProfile {
    pub(crate) fn new(
        bundle: BundleData,
        eps: Option<EpsilonChoice>,
        constants: Constants,
        closing_residual: f64,
        cfg: NumericsConfig,
    ) -> Self {
        Self { bundle, eps, constants, closing_residual, cfg }
    }

    pub fn family(&self) -> Family {
        match self.constants {
            Constants::Z2(_) => Family::EinsteinZ2,
            Constants::Ww(_) => Family::EinsteinWw,
            Constants::Krs(_) => Family::Krs,
            Constants::Qe(_) => Family::QuasiEinstein,
        }
    }

    pub fn bundle(&self) -> &BundleData {
        &self.bundle
    }

    pub fn eps(&self) -> Option<&EpsilonChoice> {
        self.eps.as_ref()
    }

    pub fn constants(&self) -> &Constants {
        &self.constants
    }

    pub fn numerics(&self) -> &NumericsConfig {
        &self.cfg
    }

    /// Quasi-Einstein parameter `m`, if any.
    pub fn m(&self) -> Option<f64> {
        match &self.constants {
            Constants::Qe(c) => Some(c.m),
            _ => None,
        }
    }

    /// The constant the closing condition solves for (`R`, `κ₀` or `κ₁`).
    pub fn defining_constant(&self) -> f64 {
        match &self.constants {
            Constants::Z2(c) => c.r,
            Constants::Ww(c) => c.kappa0,
            Constants::Krs(c) => c.kappa1,
            Constants::Qe(c) => c.kappa0,
        }
    }

    pub fn s_star(&self) -> f64 {
        match &self.constants {
            Constants::Z2(c) => 2.0 * c.r,
            _ => 4.0,
        }
    }

    pub fn closing_residual(&self) -> f64 {
        self.closing_residual
    }

    /// Returns a copy with the soliton potential normalisation `C` set.
    pub fn with_potential_constant(&self, c: f64) -> Self {
        let mut out = self.clone();
        if let Constants::Krs(k) = &mut out.constants {
            k.c = Some(c);
        }
        out
    }

    pub(crate) fn betas_model(&self) -> Betas {
        let f = self.bundle.factors();
        let n: Vec<i32> = f.iter().map(|f| f.n as i32).collect();
        match &self.constants {
            Constants::Z2(c) => Betas::quadratic(c.r, &c.a, f, n),
            Constants::Ww(c) => Betas::quadratic(-c.kappa0, &c.a, f, n),
            Constants::Qe(c) => Betas::quadratic(-c.kappa0, &c.a, f, n),
            Constants::Krs(c) => {
                Betas::Linear { slope: f.iter().map(|f| -f64::from(f.q)).collect(), sigma: c.sigma.clone(), n }
            }
        }
    }

    pub fn betas(&self, s: f64) -> Vec<f64> {
        self.betas_model().values(s)
    }

    /// `∏ β_i(s)^{n_i}`, the volume density relative to `2π ∏ vol_i`.
    pub fn volume_density(&self, s: f64) -> f64 {
        self.betas_model().product(s)
    }

    fn check_domain(&self, s: f64) -> Result<()> {
        let s_star = self.s_star();
        if !(0.0..=s_star).contains(&s) {
            return Err(Error::Domain { s, s_star });
        }
        Ok(())
    }

    pub fn alpha(&self, s: f64) -> Result<f64> {
        self.check_domain(s)?;
        let steps = self.cfg.steps;
        match &self.constants {
            Constants::Z2(c) => {
                let s = if s > c.r { 2.0 * c.r - s } else { s };
                z2::alpha(&self.bundle, c, s, steps)
            }
            Constants::Ww(c) => warped::alpha(&self.bundle, 0.0, c.kappa0, c.e_star, &c.a, s, steps),
            Constants::Qe(c) => warped::alpha(&self.bundle, c.m, c.kappa0, c.e_star, &c.a, s, steps),
            Constants::Krs(c) => krs::alpha(&self.bundle, c.kappa1, s, steps),
        }
    }

    /// Z2 only: evaluates `α` on `(R, 2R]` from the regularised formula
    /// instead of by reflection. Used to test the symmetry of the solution.
    pub fn alpha_unreflected(&self, s: f64) -> Result<f64> {
        self.check_domain(s)?;
        match &self.constants {
            Constants::Z2(c) => z2::alpha(&self.bundle, c, s, self.cfg.steps),
            _ => self.alpha(s),
        }
    }

    /// Soliton or quasi-Einstein potential. Einstein families have `f ≡ 0`.
    /// For the soliton, `f = κ₁(s-2) + C` with `C = 0` until
    /// [`with_potential_constant`](Self::with_potential_constant) is used.
    /// For quasi-Einstein metrics only `e^{-f/m} ∝ s+κ₀` is fixed, so
    /// `f = -m ln(s+κ₀)` is reported.
    pub fn potential(&self, s: f64) -> f64 {
        match &self.constants {
            Constants::Z2(_) | Constants::Ww(_) => 0.0,
            Constants::Krs(c) => c.kappa1 * (s - 2.0) + c.c.unwrap_or(0.0),
            Constants::Qe(c) => -c.m * (s + c.kappa0).ln(),
        }
    }

    /// `α` at every quadrature panel boundary in `[0, s*]`.
    pub fn alpha_on_panels(&self) -> Result<Vec<(f64, f64)>> {
        let steps = self.cfg.steps;
        match &self.constants {
            Constants::Z2(c) => {
                let half = z2::alpha_on_panels(&self.bundle, c, steps)?;
                let mut out = half.clone();
                out.extend(half.iter().rev().skip(1).map(|&(s, a)| (2.0 * c.r - s, a)));
                Ok(out)
            }
            Constants::Ww(c) => warped::alpha_on_panels(&self.bundle, 0.0, c.kappa0, c.e_star, &c.a, steps),
            Constants::Qe(c) => warped::alpha_on_panels(&self.bundle, c.m, c.kappa0, c.e_star, &c.a, steps),
            Constants::Krs(c) => krs::alpha_on_panels(&self.bundle, c.kappa1, steps),
        }
    }

    /// Worst consistency residual across the factors: the quadratic
    /// `8A_i²E - 8A_i p_i - q_i²` for the Einstein and quasi-Einstein
    /// families, `2 + σ_i + 2p_i/q_i` for the soliton.
    pub fn consistency_residual(&self) -> f64 {
        let f = self.bundle.factors();
        let quad = |a: &[f64], e: f64| {
            a.iter().zip(f).map(|(&a, f)| quadratic_residual(a, e, f.p, f.q).abs()).fold(0.0, f64::max)
        };
        match &self.constants {
            Constants::Z2(c) => quad(&c.a, c.e),
            Constants::Ww(c) => quad(&c.a, c.e_star),
            Constants::Qe(c) => quad(&c.a, c.e_star),
            Constants::Krs(c) => c
                .sigma
                .iter()
                .zip(f)
                .map(|(&s, f)| (2.0 + s + 2.0 * f64::from(f.p) / f64::from(f.q)).abs())
                .fold(0.0, f64::max),
        }
    }

    /// Boundary values, boundary slopes, positivity and residuals.
    pub fn diagnostics(&self) -> Result<ProfileDiagnostics> {
        let s_star = self.s_star();
        let h = FD_STEP;
        let a0 = self.alpha(0.0)?;
        let a1 = self.alpha(h)?;
        let a2 = self.alpha(2.0 * h)?;
        let e0 = self.alpha(s_star)?;
        let e1 = self.alpha(s_star - h)?;
        let e2 = self.alpha(s_star - 2.0 * h)?;
        // second-order one-sided differences
        let slope_start = (-3.0 * a0 + 4.0 * a1 - a2) / (2.0 * h);
        let slope_end = (3.0 * e0 - 4.0 * e1 + e2) / (2.0 * h);

        let model = self.betas_model();
        let min_beta = (0..BETA_GRID)
            .flat_map(|i| model.values(s_star * i as f64 / (BETA_GRID - 1) as f64))
            .fold(f64::INFINITY, f64::min);

        let panels = self.alpha_on_panels()?;
        let min_interior_alpha = panels[1..panels.len() - 1].iter().map(|&(_, a)| a).fold(f64::INFINITY, f64::min);

        Ok(ProfileDiagnostics {
            alpha_start: a0,
            alpha_end: e0,
            slope_start,
            slope_end,
            min_beta,
            min_interior_alpha,
            consistency_residual: self.consistency_residual(),
            closing_residual: self.closing_residual,
        })
    }

    /// Fails with [`Error::InvalidProfile`] naming the first violated
    /// smoothness or positivity condition.
    pub fn verify(&self) -> Result<ProfileDiagnostics> {
        let d = self.diagnostics()?;
        d.violation().map_or(Ok(d), |msg| Err(Error::InvalidProfile(msg)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileDiagnostics {
    pub alpha_start: f64,
    pub alpha_end: f64,
    pub slope_start: f64,
    pub slope_end: f64,
    pub min_beta: f64,
    pub min_interior_alpha: f64,
    pub consistency_residual: f64,
    pub closing_residual: f64,
}

impl ProfileDiagnostics {
    pub fn violation(&self) -> Option<String> {
        if self.alpha_start != 0.0 {
            return Some(format!("alpha(0) = {:e}", self.alpha_start));
        }
        if !(self.alpha_end.abs() <= ALPHA_END_TOL) {
            return Some(format!("alpha(s*) = {:e}", self.alpha_end));
        }
        if !((self.slope_start - 2.0).abs() <= ALPHA_SLOPE_TOL) {
            return Some(format!("alpha'(0) = {}", self.slope_start));
        }
        if !((self.slope_end + 2.0).abs() <= ALPHA_SLOPE_TOL) {
            return Some(format!("alpha'(s*) = {}", self.slope_end));
        }
        if !(self.min_beta > 0.0) {
            return Some(format!("min beta = {:e}", self.min_beta));
        }
        if !(self.min_interior_alpha > 0.0) {
            return Some(format!("min interior alpha = {:e}", self.min_interior_alpha));
        }
        if !(self.consistency_residual <= QUADRATIC_TOL) {
            return Some(format!("consistency residual = {:e}", self.consistency_residual));
        }
        None
    }
}

pub fn eval_profile(profile: &MetricProfile, s: f64) -> Result<ProfilePoint> {
    Ok(ProfilePoint { s, alpha: profile.alpha(s)?, betas: profile.betas(s), f: profile.potential(s) })
}

/// The `β_i` of a profile.
#[derive(Debug, Clone)]
pub(crate) enum Betas {
    /// `β_i = a_i (s - center)² + b_i` with `b_i = -q_i²/(4a_i)`.
    Quadratic { center: f64, a: Vec<f64>, b: Vec<f64>, n: Vec<i32> },
    /// `β_i = slope_i (s + σ_i)` with `slope_i = -q_i`.
    Linear { slope: Vec<f64>, sigma: Vec<f64>, n: Vec<i32> },
}

impl Betas {
    fn quadratic(center: f64, a: &[f64], factors: &[crate::bundle::BaseFactor], n: Vec<i32>) -> Self {
        let b = a.iter().zip(factors).map(|(&a, f)| -f64::from(f.q).powi(2) / (4.0 * a)).collect();
        Betas::Quadratic { center, a: a.to_vec(), b, n }
    }

    pub(crate) fn values(&self, s: f64) -> Vec<f64> {
        match self {
            Betas::Quadratic { center, a, b, .. } => {
                let u = (s - center).powi(2);
                a.iter().zip(b).map(|(a, b)| a * u + b).collect()
            }
            Betas::Linear { slope, sigma, .. } => slope.iter().zip(sigma).map(|(k, c)| k * (s + c)).collect(),
        }
    }

    pub(crate) fn product(&self, s: f64) -> f64 {
        match self {
            Betas::Quadratic { center, a, b, n } => {
                let u = (s - center).powi(2);
                a.iter().zip(b).zip(n).map(|((a, b), &n)| (a * u + b).powi(n)).product()
            }
            Betas::Linear { slope, sigma, n } => {
                slope.iter().zip(sigma).zip(n).map(|((k, c), &n)| (k * (s + c)).powi(n)).product()
            }
        }
    }
}

/// `8a²e - 8ap - q²`.
pub fn quadratic_residual(a: f64, e: f64, p: i32, q: i32) -> f64 {
    let (p, q) = (f64::from(p), f64::from(q));
    8.0 * a * a * e - 8.0 * a * p - q * q
}

/// Roots of `8e A² - 8p A - q² = 0` in ascending order, computed without
/// cancellation. `None` when `e = 0` or the roots are complex.
pub fn consistency_roots(e: f64, p: i32, q: i32) -> Option<(f64, f64)> {
    let (p, q) = (f64::from(p), f64::from(q));
    let (qa, qb, qc) = (8.0 * e, -8.0 * p, -q * q);
    if qa == 0.0 || !qa.is_finite() {
        return None;
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return None;
    }
    let t = -0.5 * (qb + qb.signum() * disc.sqrt());
    let (r1, r2) = (t / qa, qc / t);
    Some(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}

/// Scans `range` for sign changes of the normalised closing function `g`
/// and refines every bracket. Brackets whose refinement fails are
/// returned as errors so callers can report them.
pub(crate) fn solve_scalar<G>(
    g: G,
    lo: f64,
    hi: f64,
    scale: ScanScale,
    cfg: &NumericsConfig,
) -> Vec<Result<crate::numerics::Root>>
where
    G: Fn(f64) -> f64,
{
    scan_bracket(&g, lo, hi, cfg.scan_grid, scale)
        .into_iter()
        .map(|(a, b)| find_root_bracketed(&g, a, b, cfg))
        .collect()
}

/// Keeps the profiles that pass [`MetricProfile::verify`]. With no
/// survivors the most informative error is returned.
pub(crate) fn survivors(
    candidates: Vec<Result<MetricProfile>>,
    none_found: impl FnOnce() -> Error,
) -> Result<Vec<MetricProfile>> {
    let mut ok = Vec::new();
    let mut first_err = None;
    for c in candidates {
        match c.and_then(|p| p.verify().map(|_| p)) {
            Ok(p) => ok.push(p),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    if ok.is_empty() {
        Err(first_err.unwrap_or_else(none_found))
    } else {
        Ok(ok)
    }
}

/// Running integral `∫₀^s integrand` scaled by `prefactor(s)`.
pub(crate) fn prefactor_integral<F, P>(integrand: F, prefactor: P, s: f64, steps: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(prefactor(s) * integrate_simpson38(integrand, 0.0, s, steps)?)
}

pub(crate) fn prefactor_integral_panels<F, P>(
    integrand: F,
    prefactor: P,
    end: f64,
    steps: usize,
) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    Ok(cumulative_simpson38(integrand, 0.0, end, steps)?
        .into_iter()
        .map(|(s, v)| (s, if s == 0.0 { 0.0 } else { prefactor(s) * v }))
        .collect())
}

pub(crate) fn require_valid(bundle: &BundleData, cfg: &NumericsConfig) -> Result<()> {
    cfg.validate()?;
    bundle.ensure_valid()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consistency_roots_satisfy_quadratic() {
        for (e, p, q) in [(-1.99468, 2, -1), (5305.0, 3, -1), (0.5, 2, -1), (-2.0, 3, -2)] {
            let (r1, r2) = consistency_roots(e, p, q).unwrap();
            assert!(r1 <= r2);
            for r in [r1, r2] {
                assert!(quadratic_residual(r, e, p, q).abs() < 1e-12, "{e} {p} {q} {r}");
            }
        }
        assert!(consistency_roots(0.0, 2, -1).is_none());
        // 64p² + 32eq² < 0
        assert!(consistency_roots(-9.0, 2, -1).is_none());
    }

    #[test]
    fn positive_e_gives_roots_of_opposite_sign() {
        let (lo, hi) = consistency_roots(3.0, 2, -1).unwrap();
        assert!(lo < 0.0 && hi > 0.0);
    }

    #[test]
    fn family_names_round_trip() {
        for f in [Family::EinsteinZ2, Family::EinsteinWw, Family::Krs, Family::QuasiEinstein] {
            assert_eq!(f.as_str().parse::<Family>().unwrap(), f);
        }
        assert!("ricci".parse::<Family>().is_err());
    }
}
