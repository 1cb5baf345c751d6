//! Wang-Wang Einstein metrics (no Z2 symmetry) and quasi-Einstein metrics.
//!
//! Both use `β_i(s) = A_i (s+κ₀)² - q_i²/(4A_i)` and
//!
//! ```text
//! α(s) = (s+κ₀)^{1-m} / P(s) ∫₀^s (x+κ₀)^{m-2} (E* - (x+κ₀)²/2) P(x) dx
//! ```
//!
//! with `E* = κ₀(κ₀+4)/2`. The Einstein case is `m = 0`. The closing
//! condition is `α(4) = 0`.

use crate::bundle::{existence_integral, BundleData, EpsilonChoice};
use crate::error::{Error, Result};
use crate::numerics::{integrate_with_magnitude, NumericsConfig, ScanScale};

use super::{
    consistency_roots, prefactor_integral, prefactor_integral_panels, require_valid, solve_scalar, survivors,
    Constants, MetricProfile, QeConstants, WwConstants,
};

fn e_star(kappa0: f64) -> f64 {
    kappa0 * (kappa0 + 4.0) / 2.0
}

fn power(t: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() < 64.0 {
        t.powi(exponent as i32)
    } else {
        t.powf(exponent)
    }
}

/// `A_i` for a given `κ₀`: the root of the consistency quadratic whose sign
/// is `ε_i`.
fn signed_roots(bundle: &BundleData, eps: &EpsilonChoice, kappa0: f64) -> Option<Vec<f64>> {
    let e = e_star(kappa0);
    bundle
        .factors()
        .iter()
        .zip(eps.signs())
        .map(|(f, &sign)| {
            let (lo, hi) = consistency_roots(e, f.p, f.q)?;
            let a = if sign > 0 { hi } else { lo };
            (a != 0.0 && (a > 0.0) == (sign > 0)).then_some(a)
        })
        .collect()
}

fn density<'a>(bundle: &'a BundleData, kappa0: f64, a: &'a [f64]) -> impl Fn(f64) -> f64 + 'a {
    move |x| {
        let u = (x + kappa0) * (x + kappa0);
        bundle
            .factors()
            .iter()
            .zip(a)
            .map(|(f, &a)| (a * u - f64::from(f.q).powi(2) / (4.0 * a)).powi(f.n as i32))
            .product::<f64>()
    }
}

fn integrand<'a>(bundle: &'a BundleData, m: f64, kappa0: f64, e: f64, a: &'a [f64]) -> impl Fn(f64) -> f64 + 'a {
    let p = density(bundle, kappa0, a);
    move |x| {
        let t = x + kappa0;
        power(t, m - 2.0) * (e - 0.5 * t * t) * p(x)
    }
}

fn closing(bundle: &BundleData, eps: &EpsilonChoice, m: f64, kappa0: f64, steps: usize) -> Option<f64> {
    let a = signed_roots(bundle, eps, kappa0)?;
    let (v, mag) = integrate_with_magnitude(integrand(bundle, m, kappa0, e_star(kappa0), &a), 0.0, 4.0, steps).ok()?;
    Some(v / mag)
}

pub(super) fn alpha(bundle: &BundleData, m: f64, kappa0: f64, e: f64, a: &[f64], s: f64, steps: usize) -> Result<f64> {
    let p = density(bundle, kappa0, a);
    prefactor_integral(integrand(bundle, m, kappa0, e, a), |s| power(s + kappa0, 1.0 - m) / p(s), s, steps)
}

pub(super) fn alpha_on_panels(
    bundle: &BundleData,
    m: f64,
    kappa0: f64,
    e: f64,
    a: &[f64],
    steps: usize,
) -> Result<Vec<(f64, f64)>> {
    let p = density(bundle, kappa0, a);
    prefactor_integral_panels(integrand(bundle, m, kappa0, e, a), |s| power(s + kappa0, 1.0 - m) / p(s), 4.0, steps)
}

fn solve_kappa0(
    bundle: &BundleData,
    eps: &EpsilonChoice,
    m: f64,
    cfg: &NumericsConfig,
    build: impl Fn(f64, Vec<f64>) -> Constants,
) -> Result<Vec<MetricProfile>> {
    let range = cfg.scan.kappa0;
    let g = |k: f64| closing(bundle, eps, m, k, cfg.steps).unwrap_or(f64::NAN);
    let candidates = solve_scalar(g, range.lo, range.hi, ScanScale::Geometric, cfg)
        .into_iter()
        .map(|root| {
            root.and_then(|root| {
                let a = signed_roots(bundle, eps, root.x).ok_or_else(|| {
                    Error::InvalidProfile(format!("no signed consistency root at kappa0 = {}", root.x))
                })?;
                Ok(MetricProfile::new(bundle.clone(), Some(eps.clone()), build(root.x, a), root.residual, *cfg))
            })
        })
        .collect();
    survivors(candidates, || Error::NoConvergence {
        reason: "the kappa0 closing function has no sign change".into(),
        lo: range.lo,
        hi: range.hi,
    })
}

fn check_existence(bundle: &BundleData, eps: &EpsilonChoice, cfg: &NumericsConfig) -> Result<f64> {
    let integral = existence_integral(bundle, eps, cfg)?;
    if !(integral < 0.0) {
        return Err(Error::ExistenceFailed { integral, reason: "the existence integral is not negative".into() });
    }
    Ok(integral)
}

/// Every Wang-Wang Einstein metric for this `ε` in the `κ₀` scan range.
pub fn solve_ww_einstein_all(
    bundle: &BundleData,
    eps: &EpsilonChoice,
    cfg: &NumericsConfig,
) -> Result<Vec<MetricProfile>> {
    require_valid(bundle, cfg)?;
    eps.check_rank(bundle)?;
    if !eps.has_positive() {
        let integral = existence_integral(bundle, eps, cfg)?;
        return Err(Error::ExistenceFailed { integral, reason: "at least one epsilon must be +1".into() });
    }
    check_existence(bundle, eps, cfg)?;
    solve_kappa0(bundle, eps, 0.0, cfg, |kappa0, a| Constants::Ww(WwConstants { kappa0, e_star: e_star(kappa0), a }))
}

pub fn solve_ww_einstein(bundle: &BundleData, eps: &EpsilonChoice, cfg: &NumericsConfig) -> Result<MetricProfile> {
    Ok(solve_ww_einstein_all(bundle, eps, cfg)?.remove(0))
}

/// Every quasi-Einstein metric with parameter `m > 1` for this `ε`.
pub fn solve_qem_all(
    bundle: &BundleData,
    m: f64,
    eps: &EpsilonChoice,
    cfg: &NumericsConfig,
) -> Result<Vec<MetricProfile>> {
    require_valid(bundle, cfg)?;
    eps.check_rank(bundle)?;
    if !(m > 1.0 && m.is_finite()) {
        return Err(Error::Config(format!("quasi-Einstein m must be a finite real > 1, got {m}")));
    }
    check_existence(bundle, eps, cfg)?;
    solve_kappa0(bundle, eps, m, cfg, |kappa0, a| Constants::Qe(QeConstants { m, kappa0, e_star: e_star(kappa0), a }))
}

pub fn solve_qem(bundle: &BundleData, m: f64, eps: &EpsilonChoice, cfg: &NumericsConfig) -> Result<MetricProfile> {
    Ok(solve_qem_all(bundle, m, eps, cfg)?.remove(0))
}
