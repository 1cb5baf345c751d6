//! Dancer-Wang shrinking Kähler-Ricci solitons.
//!
//! `β_i(s) = -q_i (s + σ_i)` with `σ_i = -2 - 2p_i/q_i`, and with
//! `W(x) = ∏ (x - 2 - 2p_i/q_i)^{n_i}`
//!
//! ```text
//! α(s) = e^{κ₁ s} / W(s) ∫₀^s (2-x) e^{-κ₁ x} W(x) dx
//! ```
//!
//! The exponent sign is chosen so that the catalog solitons have `κ₁ > 0`;
//! the closing condition `α(4) = 0` is then the vanishing of the weighted
//! moment `∫₀⁴ (2-x) e^{-κ₁ x} W(x) dx`.

use crate::bundle::BundleData;
use crate::error::{Error, Result};
use crate::numerics::{integrate_with_magnitude, NumericsConfig, ScanScale};

use super::{
    prefactor_integral, prefactor_integral_panels, require_valid, solve_scalar, survivors, Constants, KrsConstants,
    MetricProfile,
};

/// `W(x) = ∏ (x + σ_i)^{n_i}`.
pub(crate) fn weight_polynomial(bundle: &BundleData) -> impl Fn(f64) -> f64 + '_ {
    move |x| {
        bundle
            .factors()
            .iter()
            .map(|f| (x - 2.0 - 2.0 * f64::from(f.p) / f64::from(f.q)).powi(f.n as i32))
            .product::<f64>()
    }
}

fn integrand(bundle: &BundleData, kappa1: f64) -> impl Fn(f64) -> f64 + '_ {
    let w = weight_polynomial(bundle);
    move |x| (2.0 - x) * (-kappa1 * x).exp() * w(x)
}

/// Normalised closing value `∫(2-x)e^{-κ₁x}W / ∫|(2-x)e^{-κ₁x}W|`.
pub fn krs_closing_value(bundle: &BundleData, kappa1: f64, cfg: &NumericsConfig) -> Result<f64> {
    let (v, mag) = integrate_with_magnitude(integrand(bundle, kappa1), 0.0, 4.0, cfg.steps)?;
    Ok(v / mag)
}

pub(super) fn alpha(bundle: &BundleData, kappa1: f64, s: f64, steps: usize) -> Result<f64> {
    let w = weight_polynomial(bundle);
    prefactor_integral(integrand(bundle, kappa1), |s| (kappa1 * s).exp() / w(s), s, steps)
}

pub(super) fn alpha_on_panels(bundle: &BundleData, kappa1: f64, steps: usize) -> Result<Vec<(f64, f64)>> {
    let w = weight_polynomial(bundle);
    prefactor_integral_panels(integrand(bundle, kappa1), |s| (kappa1 * s).exp() / w(s), 4.0, steps)
}

fn sigmas(bundle: &BundleData) -> Vec<f64> {
    bundle.factors().iter().map(|f| -2.0 - 2.0 * f64::from(f.p) / f64::from(f.q)).collect()
}

impl MetricProfile {
    /// Soliton-ansatz profile for a prescribed `κ₁`, without solving the
    /// closing condition. `κ₁ = 0` gives the trivial weight.
    pub fn krs_with_kappa1(bundle: &BundleData, kappa1: f64, cfg: &NumericsConfig) -> Result<MetricProfile> {
        require_valid(bundle, cfg)?;
        let residual = krs_closing_value(bundle, kappa1, cfg)?;
        Ok(MetricProfile::new(
            bundle.clone(),
            None,
            Constants::Krs(KrsConstants { kappa1, sigma: sigmas(bundle), c: None }),
            residual,
            *cfg,
        ))
    }
}

/// Every non-trivial soliton in the `κ₁` scan range, ascending.
pub fn solve_krs_all(bundle: &BundleData, cfg: &NumericsConfig) -> Result<Vec<MetricProfile>> {
    require_valid(bundle, cfg)?;
    if let Some(f) = bundle.factors().iter().find(|f| f.q > 0) {
        return Err(Error::Unsupported(format!("the soliton ansatz needs every q_i < 0 (got q = {})", f.q)));
    }
    let range = cfg.scan.kappa1;
    let gap = cfg.scan.kappa1_exclusion;
    let g = |k: f64| krs_closing_value(bundle, k, cfg).unwrap_or(f64::NAN);

    let mut roots = Vec::new();
    if range.lo < -gap {
        roots.extend(solve_scalar(g, range.lo, (-gap).min(range.hi), ScanScale::Linear, cfg));
    }
    if range.hi > gap {
        roots.extend(solve_scalar(g, gap.max(range.lo), range.hi, ScanScale::Linear, cfg));
    }

    if roots.is_empty() {
        let at_zero = g(0.0);
        if at_zero.abs() <= cfg.residual_tol {
            return Err(Error::TrivialSoliton);
        }
        return Err(Error::NoConvergence {
            reason: "the soliton closing function has no sign change away from kappa1 = 0".into(),
            lo: range.lo,
            hi: range.hi,
        });
    }

    let candidates = roots
        .into_iter()
        .map(|root| {
            root.map(|root| {
                MetricProfile::new(
                    bundle.clone(),
                    None,
                    Constants::Krs(KrsConstants { kappa1: root.x, sigma: sigmas(bundle), c: None }),
                    root.residual,
                    *cfg,
                )
            })
        })
        .collect();
    survivors(candidates, || Error::TrivialSoliton)
}

pub fn solve_krs(bundle: &BundleData, cfg: &NumericsConfig) -> Result<MetricProfile> {
    Ok(solve_krs_all(bundle, cfg)?.remove(0))
}
