//! Bundle input data: the Kähler-Einstein base factors `(V_i, h_i)`, the
//! Euler-class twist `q`, the built-in catalog and the existence integral
//! shared by the Wang-Wang and quasi-Einstein constructions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_simpson38, NumericsConfig};

/// One factor `V_i` of the base, normalised so that `Ric(h_i) = p_i h_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseFactor {
    /// Complex dimension of `V_i`.
    pub n: u32,
    pub p: i32,
    pub q: i32,
    /// Volume of `(V_i, h_i)`.
    pub vol: f64,
}

impl BaseFactor {
    pub const fn new(n: u32, p: i32, q: i32, vol: f64) -> Self {
        Self { n, p, q, vol }
    }

    /// `p_i / |q_i|`.
    pub fn twist_ratio(&self) -> f64 {
        f64::from(self.p) / f64::from(self.q.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleData {
    factors: Vec<BaseFactor>,
}

impl BundleData {
    pub fn new(factors: Vec<BaseFactor>) -> Self {
        Self { factors }
    }

    pub fn factors(&self) -> &[BaseFactor] {
        &self.factors
    }

    /// Number of base factors `r`.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Real dimension `n = 2 + 2 Σ n_i` of the total space.
    pub fn total_dimension(&self) -> u32 {
        2 + 2 * self.factors.iter().map(|f| f.n).sum::<u32>()
    }

    /// `2π ∏ vol_i`, the volume of the principal circle bundle over `V`
    /// before the `β_i` scalings.
    pub fn base_volume_constant(&self) -> f64 {
        2.0 * PI * self.factors.iter().map(|f| f.vol).product::<f64>()
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate(self);
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidBundle(report))
        }
    }

    /// Parses the JSON bundle file format:
    /// `{"factors":[{"n":1,"p":2,"q":-1,"vol":"2pi"}, ...]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: BundleFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let factors = file
            .factors
            .into_iter()
            .map(|f| Ok(BaseFactor::new(f.n, f.p, f.q, f.vol.value()?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(factors))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleFile {
    factors: Vec<FactorEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorEntry {
    n: u32,
    p: i32,
    q: i32,
    vol: VolumeEntry,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VolumeEntry {
    Number(f64),
    Text(String),
}

impl VolumeEntry {
    fn value(&self) -> Result<f64> {
        match self {
            VolumeEntry::Number(v) => Ok(*v),
            VolumeEntry::Text(s) => parse_volume(s),
        }
    }
}

/// Parses a volume literal: a decimal/scientific real, or `2pi` / `2pi^2`.
pub fn parse_volume(text: &str) -> Result<f64> {
    match text.trim() {
        "2pi" => Ok(2.0 * PI),
        "2pi^2" => Ok(2.0 * PI * PI),
        other => other.parse::<f64>().map_err(|_| Error::Parse(format!("invalid volume `{text}`"))),
    }
}

/// Signs `ε_i = ±1` selecting the branch of each consistency quadratic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct EpsilonChoice(Vec<i8>);

impl EpsilonChoice {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::Config("epsilon choice must not be empty".into()));
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Config(format!("epsilon entries must be +1 or -1, got {bad}")));
        }
        Ok(Self(signs))
    }

    pub fn all_negative(r: usize) -> Self {
        Self(vec![-1; r])
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_positive(&self) -> bool {
        self.0.contains(&1)
    }

    pub(crate) fn check_rank(&self, bundle: &BundleData) -> Result<()> {
        if self.len() != bundle.rank() {
            return Err(Error::Config(format!(
                "epsilon has {} entries but the bundle has {} factors",
                self.len(),
                bundle.rank()
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<i8>> for EpsilonChoice {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<EpsilonChoice> for Vec<i8> {
    fn from(e: EpsilonChoice) -> Self {
        e.0
    }
}

impl fmt::Display for EpsilonChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for EpsilonChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .split(',')
            .map(|t| match t.trim() {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                other => Err(Error::Config(format!("invalid epsilon entry `{other}`"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(signs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoFactors,
    DimensionNotPositive { factor: usize },
    IndexNotPositive { factor: usize },
    TwistZero { factor: usize },
    TwistTooLarge { factor: usize },
    VolumeNotPositive { factor: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoFactors => write!(f, "at least one base factor is required"),
            Violation::DimensionNotPositive { factor } => write!(f, "factor {factor}: n must be >= 1"),
            Violation::IndexNotPositive { factor } => write!(f, "factor {factor}: p must be >= 1"),
            Violation::TwistZero { factor } => write!(f, "factor {factor}: q must be nonzero"),
            Violation::TwistTooLarge { factor } => write!(f, "factor {factor}: |q| < p required"),
            Violation::VolumeNotPositive { factor } => {
                write!(f, "factor {factor}: vol must be positive and finite")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Accepted but noteworthy input, e.g. positive `q_i`.
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&msgs.join("; "))
    }
}

pub fn validate(bundle: &BundleData) -> ValidationReport {
    let mut report = ValidationReport::default();
    if bundle.factors.is_empty() {
        report.violations.push(Violation::NoFactors);
    }
    for (i, f) in bundle.factors.iter().enumerate() {
        let factor = i + 1;
        if f.n < 1 {
            report.violations.push(Violation::DimensionNotPositive { factor });
        }
        if f.p < 1 {
            report.violations.push(Violation::IndexNotPositive { factor });
        }
        if f.q == 0 {
            report.violations.push(Violation::TwistZero { factor });
        } else if f.q.abs() >= f.p {
            report.violations.push(Violation::TwistTooLarge { factor });
        }
        if !(f.vol > 0.0 && f.vol.is_finite()) {
            report.violations.push(Violation::VolumeNotPositive { factor });
        }
        if f.q > 0 {
            report.warnings.push(format!("factor {factor}: positive q is untested against published data"));
        }
    }
    report
}

/// `∫_{-1}^{1} ∏ (p_i/|q_i| + ε_i x)^{n_i} x dx`. Negative values signal
/// existence of quasi-Einstein metrics for this `ε`, and of Wang-Wang
/// Einstein metrics when additionally some `ε_i = +1`.
pub fn existence_integral(bundle: &BundleData, eps: &EpsilonChoice, cfg: &NumericsConfig) -> Result<f64> {
    eps.check_rank(bundle)?;
    let terms: Vec<(f64, f64, i32)> =
        bundle.factors.iter().zip(eps.signs()).map(|(f, &e)| (f.twist_ratio(), f64::from(e), f.n as i32)).collect();
    integrate_simpson38(
        |x| x * terms.iter().map(|&(c, e, n)| (c + e * x).powi(n)).product::<f64>(),
        -1.0,
        1.0,
        cfg.steps,
    )
}

/// The four manifolds of the reference tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogName {
    Cp1OverCp1,
    Cp1OverCp2Q1,
    Cp1OverCp2Q2,
    Cp1OverCp1xcp2,
}

impl CatalogName {
    pub const ALL: [CatalogName; 4] =
        [CatalogName::Cp1OverCp1, CatalogName::Cp1OverCp2Q1, CatalogName::Cp1OverCp2Q2, CatalogName::Cp1OverCp1xcp2];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogName::Cp1OverCp1 => "cp1_over_cp1",
            CatalogName::Cp1OverCp2Q1 => "cp1_over_cp2_q1",
            CatalogName::Cp1OverCp2Q2 => "cp1_over_cp2_q2",
            CatalogName::Cp1OverCp1xcp2 => "cp1_over_cp1xcp2",
        }
    }

    pub fn bundle(self) -> BundleData {
        const CP1: f64 = 2.0 * PI;
        const CP2: f64 = 2.0 * PI * PI;
        let factors = match self {
            CatalogName::Cp1OverCp1 => vec![BaseFactor::new(1, 2, -1, CP1)],
            CatalogName::Cp1OverCp2Q1 => vec![BaseFactor::new(2, 3, -1, CP2)],
            CatalogName::Cp1OverCp2Q2 => vec![BaseFactor::new(2, 3, -2, CP2)],
            CatalogName::Cp1OverCp1xcp2 => {
                vec![BaseFactor::new(1, 2, -1, CP1), BaseFactor::new(2, 3, -1, CP2)]
            }
        };
        BundleData::new(factors)
    }
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CatalogName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CatalogName::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| Error::NotInCatalog(s.to_string()))
    }
}

pub fn builtin_catalog(name: &str) -> Result<BundleData> {
    Ok(name.parse::<CatalogName>()?.bundle())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(n: u32, p: i32, q: i32) -> BundleData {
        BundleData::new(vec![BaseFactor::new(n, p, q, 2.0 * PI)])
    }

    #[test]
    fn page_data_is_valid() {
        let report = single(1, 2, -1).validate();
        assert!(report.is_valid());
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn zero_twist_is_rejected() {
        let report = single(1, 2, 0).validate();
        assert_eq!(report.violations, vec![Violation::TwistZero { factor: 1 }]);
        assert_eq!(report.to_string(), "factor 1: q must be nonzero");
    }

    #[test]
    fn twist_on_boundary_is_rejected() {
        let report = single(1, 2, -2).validate();
        assert_eq!(report.violations, vec![Violation::TwistTooLarge { factor: 1 }]);
        assert_eq!(report.to_string(), "factor 1: |q| < p required");
    }

    #[test]
    fn every_violation_is_listed() {
        let b = BundleData::new(vec![BaseFactor::new(0, 0, 0, -1.0), BaseFactor::new(1, 3, 1, f64::NAN)]);
        let report = b.validate();
        assert_eq!(report.violations.len(), 5);
        assert_eq!(report.warnings.len(), 1);
        assert!(BundleData::new(vec![]).validate().violations.contains(&Violation::NoFactors));
    }

    #[test]
    fn positive_twist_is_accepted_with_warning() {
        let report = single(1, 2, 1).validate();
        assert!(report.is_valid());
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn existence_integral_closed_forms() {
        let cfg = NumericsConfig::default();
        let neg = EpsilonChoice::all_negative(1);
        let pos = EpsilonChoice::new(vec![1]).unwrap();
        // ∫(2 - x)x dx = -2/3
        let v = existence_integral(&single(1, 2, -1), &neg, &cfg).unwrap();
        assert!((v + 2.0 / 3.0).abs() < 1e-14);
        let v = existence_integral(&single(1, 2, -1), &pos, &cfg).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
        // ∫(1.5 - x)^2 x dx = -2
        let v = existence_integral(&single(2, 3, -2), &neg, &cfg).unwrap();
        assert!((v + 2.0).abs() < 1e-13);
    }

    #[test]
    fn existence_integral_checks_rank() {
        let cfg = NumericsConfig::default();
        let err = existence_integral(&single(1, 2, -1), &EpsilonChoice::all_negative(2), &cfg);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn catalog_entries() {
        let b = builtin_catalog("cp1_over_cp1").unwrap();
        assert_eq!(b.factors(), &[BaseFactor::new(1, 2, -1, 2.0 * PI)]);
        let b = builtin_catalog("cp1_over_cp2_q2").unwrap();
        assert_eq!(b.factors(), &[BaseFactor::new(2, 3, -2, 2.0 * PI * PI)]);
        let b = builtin_catalog("cp1_over_cp1xcp2").unwrap();
        assert_eq!(b.factors(), &[BaseFactor::new(1, 2, -1, 2.0 * PI), BaseFactor::new(2, 3, -1, 2.0 * PI * PI)]);
        assert_eq!(builtin_catalog("cp2"), Err(Error::NotInCatalog("cp2".into())));
    }

    #[test]
    fn catalog_dimensions_and_validity() {
        let dims: Vec<u32> = CatalogName::ALL.iter().map(|c| c.bundle().total_dimension()).collect();
        assert_eq!(dims, vec![4, 6, 6, 8]);
        for c in CatalogName::ALL {
            assert!(c.bundle().validate().violations.is_empty(), "{c}");
            assert_eq!(c.as_str().parse::<CatalogName>().unwrap(), c);
        }
    }

    #[test]
    fn bundle_file_parsing() {
        let b = BundleData::from_json_str(
            r#"{"factors":[{"n":1,"p":2,"q":-1,"vol":"2pi"},{"n":2,"p":3,"q":-1,"vol":"2pi^2"}]}"#,
        )
        .unwrap();
        assert_eq!(b, CatalogName::Cp1OverCp1xcp2.bundle());
        let b = BundleData::from_json_str(r#"{"factors":[{"n":1,"p":2,"q":-1,"vol":2.5e0}]}"#).unwrap();
        assert_eq!(b.factors()[0].vol, 2.5);
        let b = BundleData::from_json_str(r#"{"factors":[{"n":1,"p":2,"q":-1,"vol":"1.5e1"}]}"#).unwrap();
        assert_eq!(b.factors()[0].vol, 15.0);
        assert!(matches!(
            BundleData::from_json_str(r#"{"factors":[{"n":1,"p":2,"q":-1,"vol":"tau"}]}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(BundleData::from_json_str(r#"{"factors":[{"n":1}]}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn epsilon_parsing() {
        let e: EpsilonChoice = "1,-1".parse().unwrap();
        assert_eq!(e.signs(), &[1, -1]);
        assert_eq!(e.to_string(), "1,-1");
        assert!(e.has_positive());
        assert_eq!("+1".parse::<EpsilonChoice>().unwrap().signs(), &[1]);
        assert!("0".parse::<EpsilonChoice>().is_err());
        assert!(EpsilonChoice::new(vec![2]).is_err());
        assert!(EpsilonChoice::new(vec![]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn flipping_epsilon_negates_degree_one_integral(p in 2i32..40, q in 1i32..40) {
                prop_assume!(q < p);
                let cfg = NumericsConfig::default();
                let b = single(1, p, -q);
                let minus = existence_integral(&b, &EpsilonChoice::new(vec![-1]).unwrap(), &cfg).unwrap();
                let plus = existence_integral(&b, &EpsilonChoice::new(vec![1]).unwrap(), &cfg).unwrap();
                prop_assert!((plus + minus).abs() < 1e-12);
                prop_assert!((plus - 2.0 / 3.0).abs() < 1e-12);
            }
        }
    }
}
