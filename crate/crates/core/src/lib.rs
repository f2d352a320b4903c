//! Extended-precision solver for positive solutions of
//!
//! ```text
//! ℓ_n = x_n (σ_{n,1} x_{n+1} + σ_{n,0} x_n + σ_{n,−1} x_{n−1}) + κ_n x_n,   n ≥ 1,
//! ```
//!
//! the discrete Painlevé I / Freud recurrence family.
//!
//! Given `x_0`, exactly one `x_1 > 0` (under the conditions checked in
//! [`uniqueness`]) makes every term positive. Forward iteration from any
//! other `x_1` eventually produces a nonpositive term, and the parity of
//! the first such index tells which side of the true value `x_1` lies on.
//! [`shooting::solve`] bisects on that signal at growing precision and
//! returns a certified bracket.
//!
//! ```
//! use dp1::{CoefficientFamily, Policy, RealP};
//!
//! let freud = CoefficientFamily::freud("1", "0", "0")?;
//! let sol = dp1::solve(&freud, &RealP::zero(128), 1e-10, &Policy::default())?;
//! let exact = dp1::oracle::freud_x1_closed_form(128)?;
//! assert!(sol.bracket.contains(&exact));
//! # Ok::<(), dp1::Error>(())
//! ```
//!
//! Modules:
//! - [`precision`]: `RealP`, a fixed-precision MPFR float.
//! - [`coefficients`]: built-in, closed-form and tabulated families.
//! - [`recurrence`]: forward steps, trajectories, residuals.
//! - [`shooting`]: classification, bisection, grid scans.
//! - [`uniqueness`]: per-index uniqueness conditions and verdicts.
//! - [`asymptotics`]: limits of `x_n / √ℓ_n`.
//! - [`oracle`]: Gamma-function and quadrature values of `x_1`.
//! - [`cli`]: configuration and manifests behind the `dp1` binary.

pub mod asymptotics;
pub mod cli;
pub mod coefficients;
pub mod error;
pub mod oracle;
pub mod precision;
pub mod recurrence;
pub mod shooting;
pub mod uniqueness;

pub use coefficients::CoefficientFamily;
pub use error::{Error, Result};
pub use precision::RealP;
pub use recurrence::{iterate, Trajectory};
pub use shooting::{classify, solve, Outcome, Policy, Solution};
pub use uniqueness::Verdict;
