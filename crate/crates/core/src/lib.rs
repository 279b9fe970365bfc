//! Membership-inference privacy auditing for tabular synthetic data.
//!
//! Given the training table a generator was fit on, a holdout table drawn from
//! the same population, the released synthetic table and (optionally) a
//! reference table, the audit runs an ensemble of no-box and calibrated
//! membership-inference attacks and reports the worst case over all of them.
//!
//! The pipeline is split into small layers:
//!
//! - [`data`], [`seed`], [`quadruple`], [`result`]: shared domain types.
//! - [`ingest`]: CSV and schema IO, the train/holdout/reference split and
//!   table fingerprints.
//! - [`preprocess`]: encoders fit only on adversary-visible data.
//! - [`estimators`]: exact nearest neighbours, Gaussian KDE and the two
//!   trainable discriminators.
//! - [`attacks`]: the attack families and the [`attacks::run_attack`]
//!   dispatcher.
//! - [`evaluation`]: ROC-derived metrics and effective epsilon.
//! - [`audit`]: grid expansion, the suite runner and report rendering.
//! - [`dcrprop`]: the non-adversarial DCR proportion metric.
//! - [`harness`]: toy generators and fixtures with known leakage.
//! - [`cli`]: the `synth-audit` command line.
//!
//! ```no_run
//! use synth_audit::audit::{run_suite, AuditConfig};
//! use synth_audit::harness::make_case;
//! use synth_audit::quadruple::validate_quadruple;
//!
//! let case = make_case("leaky", 200, 5, 7).unwrap();
//! let quad = validate_quadruple(case.train, case.holdout, case.synthetic, Some(case.reference)).unwrap();
//! let report = run_suite(&quad, &AuditConfig::default()).unwrap();
//! println!("Max-AUC = {:.3}", report.max_mia["auc"].value);
//! ```

pub mod attacks;
pub mod audit;
pub mod cli;
pub mod data;
pub mod dcrprop;
pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod harness;
pub mod ingest;
pub mod preprocess;
pub mod quadruple;
pub mod result;
pub mod seed;

pub use error::{Error, Result};

/// Version string recorded in report provenance.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
