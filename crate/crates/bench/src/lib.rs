//! Benchmark fixtures shared by the criterion targets.

use soliton_entropy::{BundleData, CatalogName, NumericsConfig};

/// Every catalog bundle with its name.
pub fn catalog() -> Vec<(&'static str, BundleData)> {
    CatalogName::ALL.iter().map(|c| (c.as_str(), c.bundle())).collect()
}

/// Default numerics with a different quadrature resolution.
pub fn numerics(steps: usize) -> NumericsConfig {
    NumericsConfig::default().with_steps(steps)
}
