//! Linear vector fields `h_{i,j}`, formal Lie brackets and the rewriting of
//! non-admissible couplings into brackets of admissible fields.

mod bracket;
mod classes;
mod field;
mod phall;
mod rewrite;

use thiserror::Error;

use crate::digraph::GraphError;
use crate::problem::RestEntry;

pub use bracket::Bracket;
pub use classes::{chain_generators, connected_leaves, equivalence_class, multilinear_class, MAX_CLASS_DEGREE};
pub use field::{Gen, IntMatrix};
pub use phall::{build_phall, is_hall, project_low_degree, Combo, PHallBasis, PhViolation, Projector};
pub use rewrite::{
    admissible_fields, rec_bracket, rec_bracket_phall, rewrite_dynamics, theta, ExtendedSystem, RestRewrite, Term,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("generator {0} is not in the basis")]
    LeafOutsideBasis(Gen),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degree {degree} exceeds the class enumeration limit {max}")]
    Capacity { degree: usize, max: usize },
    #[error("no directed path from agent {i} to agent {j}")]
    NotConnected { i: usize, j: usize },
    #[error("coupling {}_{{{},{}}} = {} cannot be rewritten", .0.kind.label(), .0.i, .0.j, .0.coeff)]
    Unsupported(RestEntry),
    #[error("invariant failed: {0}")]
    Invariant(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
