//! Einstein metrics, Kähler-Ricci solitons and quasi-Einstein metrics on
//! `CP¹`-bundles over products of Fano Kähler-Einstein manifolds, and their
//! Perelman ν-entropy.
//!
//! Each family of metrics is determined by a single scalar constant fixed
//! by a closing condition; [`ansatz`] solves for it and [`entropy`] turns
//! the solved profile into ν. [`report`] reproduces the reference tables
//! for the four built-in manifolds.
//!
//! ```
//! use soliton_entropy::{ansatz, bundle::CatalogName, entropy, numerics::NumericsConfig};
//!
//! let bundle = CatalogName::Cp1OverCp1.bundle();
//! let profile = ansatz::solve_krs(&bundle, &NumericsConfig::default()).unwrap();
//! let nu = entropy::nu_krs(&profile).unwrap();
//! assert!((nu.significand - 3.826552).abs() < 1e-5);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ansatz;
pub mod bundle;
pub mod entropy;
pub mod error;
pub mod numerics;
pub mod report;

pub use ansatz::{eval_profile, Family, MetricProfile, ProfilePoint};
pub use bundle::{builtin_catalog, existence_integral, BaseFactor, BundleData, CatalogName, EpsilonChoice};
pub use entropy::EntropyResult;
pub use error::{Error, Result};
pub use numerics::NumericsConfig;
