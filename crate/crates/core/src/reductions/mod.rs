//! Instance generators for the three hardness constructions, brute-force
//! oracles for their source problems, structural validation, and the scripted
//! strategies that witness each direction of the equivalences.

mod certify;
mod gadget;
mod nae;
mod script;
mod setcover;
mod threedm;
mod validate;

use thiserror::Error;

pub use certify::{certify_divider, certify_facilitator_plan, DividerCertificate, FacilitatorCertificate};
pub use gadget::{Elem, End, GadgetIndex, PathEntry, PathRole, ReductionKind, Source, Terminal, Wing};
pub use nae::{oracle_nae, reduce_nae, satisfying_assignment, scripted_divider_nae, scripted_facilitator_nae, NaeFacilitator, NaeInstance};
pub use script::{RunnerDivider, ScriptState};
pub use setcover::{oracle_setcover, reduce_setcover, SetCoverInstance};
pub use threedm::{oracle_3dm, perfect_matching_3dm, reduce_3dm, scripted_divider_3dm, ThreeDmInstance};
pub use validate::{classify_tree, validate_gadgets, Check, TreeShape, ValidationReport};

/// Largest search an oracle will attempt.
pub const ORACLE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("invalid source instance: {0}")]
    InvalidSource(String),
    #[error("oracle search space {size} exceeds {budget}")]
    BudgetExceeded { size: u64, budget: u64 },
    #[error("gadget index does not match the instance: {0}")]
    IndexMismatch(String),
}
