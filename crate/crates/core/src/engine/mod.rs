//! The nondegeneracy engine: CR vector fields, pulled-back gradients,
//! derivative span ladders and coordinate-change checks.

mod fields;
mod ladder;
mod pipeline;
mod transform;

pub use fields::{apply_field, cr_basis, CrVectorField};
pub use ladder::{ek_spaces, nondegeneracy_report, EkLadder, NondegeneracyReport, Verdict, Witness};
pub use pipeline::{manifold_identity_pipeline, manifold_nondegeneracy, ManifoldInput, Pipeline};
pub use transform::{
    check_transformation_law, check_transformation_law_with_base, linear_part,
    random_biholomorphism, transform_target, transformed_gradient_matrix, TransformCheck,
};

use std::fmt;

use crate::jet::JetError;
use crate::manifold::ManifoldError;

#[derive(Clone, Debug)]
pub enum EngineError {
    Jet(JetError),
    Manifold(ManifoldError),
    /// The requested derivative order exceeds the available jet order.
    OrderExhausted { alpha: Vec<u32> },
    /// An iterated CR derivative of a pulled-back defining function failed to
    /// vanish identically; indicates inconsistent input or an internal bug.
    TangencyLadder { alpha: Vec<u32>, rho_index: usize },
    Input(String),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::Jet(e) => write!(f, "{e}"),
            EngineError::Manifold(e) => write!(f, "{e}"),
            EngineError::OrderExhausted { alpha } => write!(
                f,
                "working order exhausted while applying the CR fields for multiindex {alpha:?}; raise the truncation order"
            ),
            EngineError::TangencyLadder { alpha, rho_index } => write!(
                f,
                "iterated CR derivative alpha = {alpha:?} of pulled-back rho_{} is not identically zero",
                rho_index + 1
            ),
            EngineError::Input(s) => write!(f, "{s}"),
        }
    }
}

impl std::error::Error for EngineError {}

impl From<JetError> for EngineError {
    fn from(e: JetError) -> Self {
        EngineError::Jet(e)
    }
}

impl From<ManifoldError> for EngineError {
    fn from(e: ManifoldError) -> Self {
        EngineError::Manifold(e)
    }
}
