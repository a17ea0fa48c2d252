//! Riemann problems for the deposition model
//!
//! ```text
//! v_t + (u v)_x = 0,    u_t + (u^2 + eps v)_x = 0
//! ```
//!
//! and for its `eps -> 0` limit system, whose Riemann problem needs
//! delta-shocks (a Dirac mass in `v` travelling with the discontinuity) when
//! `u_+ <= 0 <= u_-`.
//!
//! - [`riemann`]: exact solver at fixed `eps > 0` (wave curves, pattern
//!   classification, sampling).
//! - [`limit_system`]: exact solver of the limit system, including the
//!   delta-shock and its generalized jump conditions.
//! - [`flux_limit`]: the `eps -> 0` analysis: two-shock threshold, closed-form
//!   limits of intermediate states and speeds, weak-form convergence.
//! - [`nt_scheme`]: staggered central (Nessyahu-Tadmor) finite-volume
//!   simulator used to watch the density concentrate.
//! - [`io`]: CSV/JSON writers shared by the CLI.

pub mod error;
pub mod flux_limit;
pub mod io;
pub mod limit_system;
pub mod nt_scheme;
pub mod quadrature;
pub mod riemann;
pub mod tolerance;

pub use error::{Error, Result};
pub use riemann::{Eps, Invariants, State};
pub use tolerance::Tolerance;
