//! Perelman's ν-entropy of the solved metrics, at `τ = 1`.
//!
//! * Einstein: `ν = ln Vol - (n/2) ln(4πe)`.
//! * Soliton: `ν = ln(K I) - (n/2) ln(4πe)` with
//!   `I = ∫₀⁴ e^{-κ₁(x-2)} W(x) dx` and `K = 2π ∏ (-q_i)^{n_i} vol_i`.
//! * Quasi-Einstein: the warped-product entropy minus the entropy of the
//!   fibre, `ν̃ = ln(K (2E*)^{-m/2} J) - (n/2) ln(4πe)` with
//!   `J = ∫₀⁴ (s+κ₀)^m ∏β_i^{n_i} ds` and `K = 2π ∏ vol_i`.
//!
//! Values are rendered as `ln(significand · e^{-exponent})` with
//! `exponent = n/2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ansatz::{Constants, Family, MetricProfile};
use crate::error::{Error, Result};
use crate::numerics::integrate_simpson38;

/// `ln(4πe)`.
pub fn log_four_pi_e() -> f64 {
    (4.0 * PI).ln() + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    /// Constant prefactor `K` of the family's formula.
    pub k_constant: f64,
    /// The family's main quadrature (`∫P`, `I` or `J`).
    pub main_integral: f64,
    /// Riemannian volume, for Einstein metrics.
    pub volume: Option<f64>,
    /// Dimension entering `(4πe)^{dim/2}`.
    pub dimension: u32,
    /// Soliton potential normalisation `C = ν + n/2`.
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult {
    pub nu: f64,
    pub significand: f64,
    pub exponent: i32,
    /// True for the quasi-Einstein quantity, which is a normalised entropy
    /// rather than the ν-entropy of the base metric itself.
    pub normalized: bool,
    pub breakdown: Breakdown,
}

impl EntropyResult {
    fn new(nu: f64, normalized: bool, breakdown: Breakdown) -> Self {
        let exponent = (breakdown.dimension / 2) as i32;
        Self::with_exponent(nu, exponent, normalized, breakdown)
    }

    fn with_exponent(nu: f64, exponent: i32, normalized: bool, breakdown: Breakdown) -> Self {
        Self { nu, significand: (nu + f64::from(exponent)).exp(), exponent, normalized, breakdown }
    }

    /// `e^ν`, the Gaussian density.
    pub fn gaussian_density(&self) -> f64 {
        self.nu.exp()
    }
}

fn ensure_family(profile: &MetricProfile, allowed: &[Family]) -> Result<()> {
    if allowed.contains(&profile.family()) {
        Ok(())
    } else {
        Err(Error::InvalidProfile(format!(
            "{} profile passed to an entropy formula for {:?}",
            profile.family(),
            allowed
        )))
    }
}

/// `∫ f` over `[0, s*]`, rejecting profiles whose `β_i` are not positive at
/// every quadrature node.
fn integrate_over_profile<F: Fn(f64) -> f64>(profile: &MetricProfile, f: F) -> Result<f64> {
    let model = profile.betas_model();
    let bad = std::cell::Cell::new(None);
    let value = integrate_simpson38(
        |s| {
            if model.values(s).iter().any(|&b| !(b > 0.0)) && bad.get().is_none() {
                bad.set(Some(s));
            }
            f(s)
        },
        0.0,
        profile.s_star(),
        profile.numerics().steps,
    )?;
    match bad.get() {
        Some(s) => Err(Error::InvalidProfile(format!("beta not positive at s = {s}"))),
        None => Ok(value),
    }
}

pub fn nu_einstein(profile: &MetricProfile) -> Result<EntropyResult> {
    ensure_family(profile, &[Family::EinsteinZ2, Family::EinsteinWw])?;
    let bundle = profile.bundle();
    let k = bundle.base_volume_constant();
    let integral = integrate_over_profile(profile, |s| profile.volume_density(s))?;
    let volume = k * integral;
    let dimension = bundle.total_dimension();
    let nu = volume.ln() - f64::from(dimension) / 2.0 * log_four_pi_e();
    Ok(EntropyResult::new(
        nu,
        false,
        Breakdown { k_constant: k, main_integral: integral, volume: Some(volume), dimension, c: None },
    ))
}

pub fn nu_krs(profile: &MetricProfile) -> Result<EntropyResult> {
    ensure_family(profile, &[Family::Krs])?;
    let Constants::Krs(c) = profile.constants() else { unreachable!() };
    let bundle = profile.bundle();
    let k = 2.0 * PI * bundle.factors().iter().map(|f| f64::from(-f.q).powi(f.n as i32) * f.vol).product::<f64>();
    let w = crate::ansatz::krs_weight(bundle);
    let kappa1 = c.kappa1;
    let integral = integrate_over_profile(profile, |x| (-kappa1 * (x - 2.0)).exp() * w(x))?;
    let dimension = bundle.total_dimension();
    let nu = (k * integral).ln() - f64::from(dimension) / 2.0 * log_four_pi_e();
    Ok(EntropyResult::new(
        nu,
        false,
        Breakdown {
            k_constant: k,
            main_integral: integral,
            volume: None,
            dimension,
            c: Some(nu + f64::from(dimension) / 2.0),
        },
    ))
}

/// Normalised entropy of a quasi-Einstein base: the warped-product
/// entropy with the fibre's own entropy removed.
pub fn nu_qem_normalized(profile: &MetricProfile) -> Result<EntropyResult> {
    ensure_family(profile, &[Family::QuasiEinstein])?;
    let Constants::Qe(c) = profile.constants() else { unreachable!() };
    let bundle = profile.bundle();
    let k = bundle.base_volume_constant();
    let (m, kappa0) = (c.m, c.kappa0);
    let integral = integrate_over_profile(profile, |s| (s + kappa0).powf(m) * profile.volume_density(s))?;
    let dimension = bundle.total_dimension();
    let nu = k.ln() - m / 2.0 * (2.0 * c.e_star).ln() + integral.ln() - f64::from(dimension) / 2.0 * log_four_pi_e();
    Ok(EntropyResult::new(
        nu,
        true,
        Breakdown { k_constant: k, main_integral: integral, volume: None, dimension, c: None },
    ))
}

/// ν-entropy of the Einstein warped product `M ×_{e^{-f/m}} F^m`, where
/// `fiber_vol_scaled` is the volume of `F` with Einstein constant `1/2`.
pub fn nu_warped_product(profile: &MetricProfile, fiber_vol_scaled: f64) -> Result<EntropyResult> {
    ensure_family(profile, &[Family::QuasiEinstein])?;
    let m = profile.m().unwrap_or(f64::NAN);
    if !(m >= 2.0 && m.fract() == 0.0) {
        return Err(Error::FiberDimension { m });
    }
    if !(fiber_vol_scaled > 0.0 && fiber_vol_scaled.is_finite()) {
        return Err(Error::Config(format!("fiber volume must be positive, got {fiber_vol_scaled}")));
    }
    let base = nu_qem_normalized(profile)?;
    let nu = base.nu + fiber_entropy(m as u32, fiber_vol_scaled);
    let dimension = base.breakdown.dimension + m as u32;
    Ok(EntropyResult::new(
        nu,
        false,
        Breakdown {
            k_constant: base.breakdown.k_constant,
            main_integral: base.breakdown.main_integral,
            volume: Some((nu + f64::from(dimension) / 2.0 * log_four_pi_e()).exp()),
            dimension,
            c: None,
        },
    ))
}

/// ν of an `m`-dimensional Einstein manifold with Einstein constant `1/2`
/// and the given volume.
pub fn fiber_entropy(m: u32, volume: f64) -> f64 {
    volume.ln() - f64::from(m) / 2.0 * log_four_pi_e()
}

/// Volume of the round `S^m` with Einstein constant `1/2`, i.e. radius
/// `√(2(m-1))`.
pub fn round_sphere_volume(m: u32) -> Result<f64> {
    if m < 2 {
        return Err(Error::FiberDimension { m: f64::from(m) });
    }
    // unit sphere: ω_0 = 2, ω_1 = 2π, ω_k = 2π ω_{k-2} / (k-1)
    let mut omega = if m.is_multiple_of(2) { 2.0 } else { 2.0 * PI };
    let mut k = if m.is_multiple_of(2) { 2 } else { 3 };
    while k <= m {
        omega *= 2.0 * PI / f64::from(k - 1);
        k += 2;
    }
    Ok(omega * (2.0 * f64::from(m - 1)).powf(f64::from(m) / 2.0))
}

/// Entropy of a product of solitons with the same `τ`.
pub fn nu_sum(a: &EntropyResult, b: &EntropyResult) -> f64 {
    a.nu + b.nu
}

/// Dispatches on the profile's family; quasi-Einstein profiles get the
/// normalised quantity.
pub fn nu_for_profile(profile: &MetricProfile) -> Result<EntropyResult> {
    match profile.family() {
        Family::EinsteinZ2 | Family::EinsteinWw => nu_einstein(profile),
        Family::Krs => nu_krs(profile),
        Family::QuasiEinstein => nu_qem_normalized(profile),
    }
}

/// Re-renders `result` with a different exponent.
pub fn with_exponent(result: &EntropyResult, exponent: i32) -> EntropyResult {
    EntropyResult::with_exponent(result.nu, exponent, result.normalized, result.breakdown)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_two_sphere() {
        let v = round_sphere_volume(2).unwrap();
        assert!((v - 8.0 * PI).abs() < 1e-12);
        let nu = fiber_entropy(2, v);
        assert!((nu - (2f64.ln() - 1.0)).abs() < 1e-14);
        assert!((nu + 0.306853).abs() < 1e-6);
    }

    #[test]
    fn round_three_sphere() {
        // radius 2: 2π² r³
        let v = round_sphere_volume(3).unwrap();
        assert!((v - 2.0 * PI * PI * 8.0).abs() < 1e-10);
        assert!(round_sphere_volume(1).is_err());
    }

    #[test]
    fn sums() {
        let mk = |nu: f64| {
            EntropyResult::with_exponent(
                nu,
                0,
                false,
                Breakdown { k_constant: 1.0, main_integral: 1.0, volume: None, dimension: 0, c: None },
            )
        };
        assert_eq!(nu_sum(&mk(-0.5), &mk(-0.25)), -0.75);
        assert_eq!(nu_sum(&mk(0.123), &mk(0.0)), 0.123);
    }

    #[test]
    fn rendering_round_trips() {
        let r = EntropyResult::new(
            -0.6591305,
            false,
            Breakdown { k_constant: 1.0, main_integral: 1.0, volume: None, dimension: 4, c: None },
        );
        assert_eq!(r.exponent, 2);
        assert!((r.significand.ln() - f64::from(r.exponent) - r.nu).abs() < 1e-12);
    }
}
