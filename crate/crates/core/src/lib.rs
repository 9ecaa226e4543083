//! Exact Sherali-Adams relaxations of the homomorphism problem, colour
//! refinement and fractional isomorphism for finite relational structures.

pub mod equitable;
pub mod error;
pub mod format;
pub mod ftrees;
pub mod homcount;
pub mod lp;
pub mod matrix;
pub mod par;
pub mod polymorph;
pub mod rat;
pub mod refine;
pub mod relax;
pub mod stark;
pub mod structure;
pub mod treedec;
pub mod witness;

pub use error::{Error, ParseErrorKind, Result};
pub use rat::Rat;
pub use structure::{Constraint, Signature, Structure};
pub use relax::Limits;
