//! Exact verification of the quantitative constant chain behind the pinched
//! anisotropic stable Bernstein theorem in dimensions 4 and 5.
//!
//! Every pass/fail decision is made over exact rationals or elements of a
//! real quadratic field; floating point only appears in the randomized
//! cross-checks of [`oracle`] and as a search heuristic in [`optimizer`].

pub mod exact;
pub mod linalg;
pub mod constants;
pub mod published;
pub mod certifier;
pub mod oracle;
pub mod optimizer;

pub use exact::{QuadExt, Rational, Sign};
pub use linalg::{Definiteness, Strictness, SymMatrix};
