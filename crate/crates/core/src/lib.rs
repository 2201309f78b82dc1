//! Steiner symmetrization of coercive convex functions.
//!
//! The one-dimensional engine ([`convex1d`]) works exactly on piecewise-linear
//! convex functions: a function is symmetrized by reading off its sublevel-set
//! width profile `s -> |{f <= s}|` and rebuilding the unique even convex function
//! with the same profile. The grid layer ([`gridnd`]) applies the same engine line
//! by line along an arbitrary direction in the plane, and [`santalo`] runs the
//! functional Blaschke-Santaló experiments on top of both.
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`convex1d`] | exact PL calculus: widths, both symmetrizations, conjugates, integrals |
//! | [`gridnd`] | tensor-grid functions in 1-D/2-D, line symmetrization, fast conjugate |
//! | [`santalo`] | Santaló products, dual monotonicity, radial bound, convergence runs |
//! | [`funcbank`] | named test functions with verified ground-truth facts |
//! | `oracle` | brute-force references (feature `oracle`) |

pub mod convex1d;
pub mod error;
pub mod funcbank;
pub mod gridnd;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod quad;
pub mod santalo;

pub use convex1d::{ArgminInterval, PlConvex1D, Tail, Violation, WidthProfile};
pub use error::{Error, Result};
pub use gridnd::{Direction, GridFn, GridSpec};

/// Relative tolerance used for equality checks throughout the exact 1-D engine.
pub const REL_TOL: f64 = 1e-9;
