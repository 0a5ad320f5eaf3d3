//! Exact and approximate total-variation mixing profiles.
//!
//! The crate is organised around a small set of families whose spectral data
//! is known in closed form: the binomial-hypergeometric Gibbs sampler, the
//! random k-cycle walk on the symmetric group, the Ehrenfest urn on a
//! Gelfand pair and the lazy hypercube walk. Each family exposes an exact
//! distance, a Lemma-style main term with a rigorous error bound, and the
//! limiting profile.

pub mod chain;
pub mod error;
pub mod gelfand;
pub mod gibbs;
pub mod hypercube;
pub mod montecarlo;
pub mod scalar;
pub mod spectral;
pub mod special;
pub mod symmetric;
pub mod verify;

pub use chain::{Chain, Distribution, ProfilePoint};
pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
