//! Numerical machinery for the coherent-state quantization of Yang-Mills
//! theory on a spacetime cylinder.
//!
//! The structure group is `K = SU(2)` with complexification
//! `K_C = SL(2, C)`. The crate is organised bottom-up:
//!
//! * [`group`]: Lie algebra coordinates, exponential/logarithm maps and the
//!   polar identification `(x, Y) -> x e^{iY}`.
//! * [`haar`]: Haar sampling and product quadrature on `SU(2)`.
//! * [`harmonic`]: Peter-Weyl expansions, characters, Casimir values, the heat
//!   kernel and the heat semigroup on band-limited functions.
//! * [`flat`]: the finite-dimensional Segal-Bargmann transforms and their
//!   Gaussian measures.
//! * [`lattice`]: lattice connections on the spatial circle, holonomy, gauge
//!   and path-group actions, lattice Gaussian measures and the lattice
//!   Laplacian.
//! * [`reduced`]: the transform on `K_C`, reduced coherent states and the
//!   lattice-versus-group commutativity checks.
//! * [`harness`]: named, seeded experiments producing [`report::VerificationReport`]s.
//!
//! Inner product convention: `<X, Y> = -2 tr(XY)` on `su(2)`, so that
//! `e_a = -(i/2) sigma_a` is orthonormal and the Casimir value on the irrep of
//! dimension `n` is `(n^2 - 1) / 4`.

// `!(x > 0.0)` is deliberate: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod flat;
pub mod group;
pub mod haar;
pub mod harmonic;
pub mod harness;
pub mod lattice;
pub mod mc;
pub mod quadrature;
pub mod reduced;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Crate version string embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
