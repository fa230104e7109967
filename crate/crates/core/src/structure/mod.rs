//! Structural analysis of finitely presented and concretely given groups:
//! abelianization through Smith normal form, and derived / lower central
//! series data for finite groups carried either as permutation groups or as
//! completed regular coset tables.

pub mod perm;
pub mod series;
pub mod snf;

pub use perm::{derived_subgroup, Perm, PermGroup};
pub use series::{
    structure_report, FiniteGroup, NilpotencyClass, StructureLimits, StructureReport,
    SubgroupData, TableGroup,
};
pub use snf::{abelianization, smith_normal_form, AbelianInvariants};

/// Errors from structure computations. Resource guards are errors here (not
/// in-band statuses) because the caller chose the carrier and its limits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructureError {
    /// Permutations of different degrees were mixed.
    DegreeMismatch,
    /// An image list was not a bijection.
    InvalidPermutation,
    /// The carrier acts on more points than the configured limit.
    DegreeLimitExceeded { degree: usize, limit: usize },
    /// A subgroup closure grew past the configured element limit.
    SubgroupLimitExceeded { limit: usize },
    /// The group order exceeds the configured limit.
    OrderLimitExceeded,
}

impl core::fmt::Display for StructureError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StructureError::DegreeMismatch => write!(f, "permutations act on different domains"),
            StructureError::InvalidPermutation => write!(f, "image list is not a permutation"),
            StructureError::DegreeLimitExceeded { degree, limit } => {
                write!(f, "degree {degree} exceeds limit {limit}")
            }
            StructureError::SubgroupLimitExceeded { limit } => {
                write!(f, "subgroup closure exceeds {limit} elements")
            }
            StructureError::OrderLimitExceeded => write!(f, "group order exceeds configured limit"),
        }
    }
}

impl core::error::Error for StructureError {}
