//! Representation theory of S_n at desk scale and the random k-cycle walk.

mod characters;
mod combinatorics;
mod hough;
mod kcycle;
mod partition;

pub use characters::*;
pub use combinatorics::*;
pub use hough::*;
pub use kcycle::*;
pub use partition::*;
