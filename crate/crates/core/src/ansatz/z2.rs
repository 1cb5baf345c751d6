//! Einstein metrics with fibre-wise Z2 symmetry.
//!
//! `β_i(s) = A_i (s-R)² - q_i²/(4A_i)` is even about `s = R`, and so is
//! `P = ∏ β_i^{n_i}`, which makes `P` a polynomial in `u = (s-R)²`. The
//! `α` integrand carries a double pole `c P(x)/(R-x)²` with
//! `c = -R(R-4)/2`; subtracting `c P(R)/(R-x)²` analytically leaves
//!
//! ```text
//! F(s) = ∫₀^s [P(x)/2 + c (P(x) - P(R))/(x-R)²] dx
//! α(s) = [(R-s) F(s) + c P(R) s / R] / P(s)
//! ```
//!
//! whose integrand is again a polynomial in `u`. Expanding `α` about
//! `s = R` turns the closing condition `α'(R) = 0` into
//! `F(R) - c P(R)/R = 0`.

use crate::bundle::BundleData;
use crate::error::{Error, Result};
use crate::numerics::{cumulative_simpson38, integrate_simpson38, integrate_with_magnitude, NumericsConfig, ScanScale};

use super::{consistency_roots, require_valid, solve_scalar, survivors, Constants, MetricProfile, Z2Constants};

/// Which root of the consistency quadratic a factor uses. Both roots are
/// negative when `0 < R < 4`; positivity of `β_i` decides between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    /// The root closer to zero.
    Near,
    Far,
}

/// `∏ (a_i u + b_i)^{n_i}` as ascending coefficients in `u`.
struct EvenPoly(Vec<f64>);

impl EvenPoly {
    fn new(bundle: &BundleData, a: &[f64]) -> Self {
        let mut coeffs = vec![1.0];
        for (f, &a) in bundle.factors().iter().zip(a) {
            let b = -f64::from(f.q).powi(2) / (4.0 * a);
            for _ in 0..f.n {
                let mut next = vec![0.0; coeffs.len() + 1];
                for (k, &c) in coeffs.iter().enumerate() {
                    next[k] += c * b;
                    next[k + 1] += c * a;
                }
                coeffs = next;
            }
        }
        EvenPoly(coeffs)
    }

    fn eval(&self, u: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    /// `(P(u) - P(0)) / u`.
    fn difference_quotient(&self, u: f64) -> f64 {
        self.0[1..].iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }
}

fn constants_for(bundle: &BundleData, r: f64, branches: &[Branch]) -> Option<Z2Constants> {
    let e = r * (r - 4.0) / 2.0;
    let mut a = Vec::with_capacity(bundle.rank());
    for (f, &branch) in bundle.factors().iter().zip(branches) {
        let (lo, hi) = consistency_roots(e, f.p, f.q)?;
        let root = match branch {
            Branch::Near => hi,
            Branch::Far => lo,
        };
        let b = -f64::from(f.q).powi(2) / (4.0 * root);
        // β_i is extremal at s = R and at the ends s = 0, 2R
        if !(root < 0.0 && b > 0.0 && root * r * r + b > 0.0) {
            return None;
        }
        a.push(root);
    }
    Some(Z2Constants { r, a, e })
}

fn regular_integrand<'a>(poly: &'a EvenPoly, c: &Z2Constants) -> impl Fn(f64) -> f64 + 'a {
    let (r, k) = (c.r, -c.e);
    move |x| {
        let u = (x - r) * (x - r);
        0.5 * poly.eval(u) + k * poly.difference_quotient(u)
    }
}

/// `(F(R) - c P(R)/R)` divided by `∫|integrand| + |c P(R)/R|`.
fn closing(bundle: &BundleData, c: &Z2Constants, steps: usize) -> Result<f64> {
    let poly = EvenPoly::new(bundle, &c.a);
    let tail = -c.e * poly.eval(0.0) / c.r;
    let (value, magnitude) = integrate_with_magnitude(regular_integrand(&poly, c), 0.0, c.r, steps)?;
    Ok((value - tail) / (magnitude + tail.abs()))
}

/// Regularised `α` on `[0, 2R]`; the caller reflects if it wants to.
pub(super) fn alpha(bundle: &BundleData, c: &Z2Constants, s: f64, steps: usize) -> Result<f64> {
    let poly = EvenPoly::new(bundle, &c.a);
    let f = integrate_simpson38(regular_integrand(&poly, c), 0.0, s, steps)?;
    Ok(assemble(&poly, c, s, f))
}

fn assemble(poly: &EvenPoly, c: &Z2Constants, s: f64, running: f64) -> f64 {
    let r = c.r;
    ((r - s) * running - c.e * poly.eval(0.0) * s / r) / poly.eval((s - r) * (s - r))
}

/// `α` at the panel boundaries of `[0, R]`.
pub(super) fn alpha_on_panels(bundle: &BundleData, c: &Z2Constants, steps: usize) -> Result<Vec<(f64, f64)>> {
    let poly = EvenPoly::new(bundle, &c.a);
    Ok(cumulative_simpson38(regular_integrand(&poly, c), 0.0, c.r, steps)?
        .into_iter()
        .map(|(s, v)| (s, assemble(&poly, c, s, v)))
        .collect())
}

/// Normalised closing value at a given `R` with the admissible roots, for
/// inspection and testing. `None` if no branch admits positive `β_i`.
pub fn z2_closing_value(bundle: &BundleData, r: f64, cfg: &NumericsConfig) -> Option<f64> {
    branch_choices(bundle.rank())
        .iter()
        .find_map(|b| constants_for(bundle, r, b))
        .and_then(|c| closing(bundle, &c, cfg.steps).ok())
}

fn branch_choices(rank: usize) -> Vec<Vec<Branch>> {
    (0..1usize << rank)
        .map(|mask| (0..rank).map(|i| if mask >> i & 1 == 0 { Branch::Near } else { Branch::Far }).collect())
        .collect()
}

/// Every Z2 Einstein metric found in the `R` scan range that passes the
/// profile checks, in ascending `R`.
pub fn solve_ww_z2_all(bundle: &BundleData, cfg: &NumericsConfig) -> Result<Vec<MetricProfile>> {
    require_valid(bundle, cfg)?;
    let range = cfg.scan.r;
    let mut candidates = Vec::new();
    for branches in branch_choices(bundle.rank()) {
        let g = |r: f64| {
            constants_for(bundle, r, &branches).and_then(|c| closing(bundle, &c, cfg.steps).ok()).unwrap_or(f64::NAN)
        };
        for root in solve_scalar(g, range.lo, range.hi, ScanScale::Linear, cfg) {
            candidates.push(root.and_then(|root| {
                let c = constants_for(bundle, root.x, &branches).ok_or(Error::NoAdmissibleRoot { r: root.x })?;
                Ok(MetricProfile::new(bundle.clone(), None, Constants::Z2(c), root.residual, *cfg))
            }));
        }
    }
    let mut found = survivors(candidates, || Error::NoConvergence {
        reason: "the Z2 closing function has no sign change".into(),
        lo: range.lo,
        hi: range.hi,
    })?;
    found.sort_by(|a, b| a.defining_constant().total_cmp(&b.defining_constant()));
    Ok(found)
}

/// The Z2-symmetric Einstein metric with `s* = 2R`.
pub fn solve_ww_z2(bundle: &BundleData, cfg: &NumericsConfig) -> Result<MetricProfile> {
    Ok(solve_ww_z2_all(bundle, cfg)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::CatalogName;

    #[test]
    fn poly_matches_direct_product() {
        let b = CatalogName::Cp1OverCp1xcp2.bundle();
        let a = [-0.07, -0.04];
        let poly = EvenPoly::new(&b, &a);
        assert_eq!(poly.0.len(), 4);
        for u in [0.0, 0.3, 1.7, 4.0] {
            let direct = (a[0] * u + 1.0 / (4.0 * 0.07)) * (a[1] * u + 1.0 / (4.0 * 0.04)).powi(2);
            assert!((poly.eval(u) - direct).abs() < 1e-12 * direct.abs());
        }
        let u = 0.5;
        let dq = (poly.eval(u) - poly.eval(0.0)) / u;
        assert!((poly.difference_quotient(u) - dq).abs() < 1e-12);
    }

    #[test]
    fn admissible_root_for_page_metric() {
        let b = CatalogName::Cp1OverCp1.bundle();
        let r = 2.10308;
        let near = constants_for(&b, r, &[Branch::Near]).unwrap();
        assert!((near.a[0] + 0.06697).abs() < 1e-5);
        // the other root makes β(0) negative
        assert!(constants_for(&b, r, &[Branch::Far]).is_none());
    }

    #[test]
    fn printed_radius_nearly_closes() {
        let b = CatalogName::Cp1OverCp1.bundle();
        let v = z2_closing_value(&b, 2.10308, &NumericsConfig::default()).unwrap();
        assert!(v.abs() < 1e-5, "{v}");
        let away = z2_closing_value(&b, 2.2, &NumericsConfig::default()).unwrap();
        assert!(away.abs() > 1e-3);
    }

    /// The regular reformulation against a finite difference of the raw
    /// singular formula, integrated with the pole removed only where it is
    /// integrable.
    #[test]
    fn closing_condition_matches_raw_derivative() {
        let b = CatalogName::Cp1OverCp1.bundle();
        let cfg = NumericsConfig::default();
        let r = 2.2;
        let c = constants_for(&b, r, &[Branch::Near]).unwrap();
        let beta = |x: f64| c.a[0] * (x - r).powi(2) - 1.0 / (4.0 * c.a[0]);
        let k = -c.e;
        // raw α(s) for s < R with ∫ k P(R)/(R-x)² done in closed form
        let raw_alpha = |s: f64| {
            let reg = |x: f64| 0.5 * beta(x) + k * (beta(x) - beta(r)) / (r - x).powi(2);
            let f = crate::numerics::integrate_simpson38(reg, 0.0, s, 3000).unwrap();
            let sing = k * beta(r) * (1.0 / (r - s) - 1.0 / r);
            (r - s) * (f + sing) / beta(s)
        };
        let h = 1e-3;
        // α(R) = c exactly; second-order one-sided difference from the left
        let left = (3.0 * k - 4.0 * raw_alpha(r - h) + raw_alpha(r - 2.0 * h)) / (2.0 * h);
        let g = closing(&b, &c, cfg.steps).unwrap();
        let poly = EvenPoly::new(&b, &c.a);
        let (_, mag) = integrate_with_magnitude(regular_integrand(&poly, &c), 0.0, r, cfg.steps).unwrap();
        let tail = k * poly.eval(0.0) / r;
        let alpha_prime_r = -(g * (mag + tail.abs())) / poly.eval(0.0);
        assert!(alpha_prime_r.abs() > 1e-2);
        assert!((left - alpha_prime_r).abs() < 1e-4, "{left} vs {alpha_prime_r}");
    }
}
