//! Coulomb gas on the unit sphere.
//!
//! This crate samples point configurations on S² ⊂ R³, evaluates and locally
//! minimizes their logarithmic pair energy
//!
//! ```text
//! H_N(x_1, …, x_N) = Σ_{i≠j} log(1 / ‖x_i − x_j‖),
//! ```
//!
//! and numerically checks the concentration bounds that tie the Gibbs measure
//! e^{−βH_N} to near-minimal configurations.
//!
//! Module map:
//!
//! * [`geometry`] — sphere primitives: distances, caps, tangent frames,
//!   geodesic steps, stereographic projection.
//! * [`energy`] — the energy kernel, incremental updates, Riemannian gradient,
//!   separation statistics, and closed-form mean energies.
//! * [`gibbs`] — Gibbs measures over finite state spaces and exact
//!   verification of the concentration and mean-energy lemmas by enumeration.
//! * [`samplers`] — uniform, Gaussian-analytic-function zeros, spherical
//!   ensemble, and Metropolis Coulomb-gas samplers.
//! * [`minimize`] — Riemannian gradient descent and the persistent
//!   best-known-minimum ledger.
//! * [`verify`] — theorem-level quantities, the perturbation bound, the
//!   second-derivative chain, and empirical deviation checks.

pub mod energy;
pub mod error;
pub mod geometry;
pub mod gibbs;
pub mod minimize;
pub mod samplers;
pub mod verify;

pub use error::{Error, Result};

/// Version stamped into every CSV and JSON artifact this crate emits.
pub const SCHEMA_VERSION: u32 = 1;
