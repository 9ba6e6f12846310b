//! Truncated multivariate power series (jets) over typed variable spaces.

mod compose;
#[allow(clippy::module_inception)]
mod jet;
mod matrix;
mod monomial;
mod space;

pub use compose::{compose, invert_map};
pub use jet::{Jet, JetError};
pub use matrix::JetMatrix;
pub use monomial::{compositions, Monomial};
pub use space::{same_space, VarInfo, VarKind, VarSpace};
