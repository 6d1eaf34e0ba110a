//! Gibbs measures for the doubling map: convolution, entropy, regularity.
//!
//! The crate works with g-measures on the circle `R/Z` under `T(x) = 2x mod 1`,
//! described by a Jacobian `J > 0` with `J(x) + J(x + 1/2) = 1`. It builds
//! dyadic atomic approximations of the associated Gibbs measures, convolves
//! them, and verifies the analytic structure of the convolution:
//!
//! - the convolved measure is again a g-measure with Jacobian
//!   `J~(u) = ∫ J(u - x) dμ₂(x)` ([`convolution`]),
//! - its entropy `h(ν) = -∫ log J~ dν` dominates the entropies of the
//!   factors, with a variational certificate ([`entropy_lab`]),
//! - convolution regularizes: Hölder constants do not grow, and iterated
//!   self-convolution flattens toward Lebesgue measure,
//! - the entropy responds to first-order perturbations of the Jacobian
//!   through an explicit linear-response series ([`entropy_lab`]).
//!
//! The [`scenarios`] module packages these computations as named, seeded,
//! bit-reproducible runs; `verify_all` sweeps every numerical bound the crate
//! promises. See the `examples/` directory for runnable walkthroughs and the
//! `gibbsconv` binary for the command-line interface.

pub mod circle;
pub mod convolution;
pub mod entropy_lab;
pub mod error;
pub mod measures;
pub mod scenarios;
pub mod transfer;

pub use circle::{CirclePoint, GridFunction};
pub use error::{Error, Result};
pub use measures::AtomicMeasure;
pub use transfer::{entropy_gibbs, gibbs_atoms, JacobianPotential};
