//! Split, fold and shift moves, maximal splitting, and periodicity detection.

mod canonical;
mod elementary;
mod sequence;

pub use canonical::{canonical_form, isomorphisms, TrackIso};
pub use elementary::{
    fold, fold_unmeasured, shift, shift_unmeasured, split, split_unmeasured, MoveKind, MoveRecord,
};
pub(crate) use sequence::is_max;
pub use sequence::{
    certify, dump_sequence, format_iso, maximal_split, power_certificate, run_sequence,
    PeriodicityCertificate, SplittingSequence, DEFAULT_MAX_STEPS,
};

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::track::{BranchId, TrackError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("no branch {0}")]
    NoSuchBranch(BranchId),
    #[error("branch {0} is not large")]
    NotLarge(BranchId),
    #[error("branch {0} is not small")]
    NotSmall(BranchId),
    #[error("branch {0} is not mixed")]
    NotMixed(BranchId),
    #[error("small branch {0} joins an SL slot to an SR slot and cannot be folded")]
    NotFoldable(BranchId),
    #[error("mixed branch {0} returns to its own switch")]
    MixedLoop(BranchId),
    #[error("central split at branch {0}: the two opposite neighbors have equal weight")]
    CentralSplit(BranchId),
    #[error("central split at branch {0} inside a maximal splitting")]
    CentralSplitInBatch(BranchId),
    #[error("branch {0} has maximal weight but is not large")]
    MaximalNotLarge(BranchId),
    #[error("branches {0:?} are never split over the period")]
    UnsplitBranches(Vec<BranchId>),
    #[error("periodicity certificate failed: {0}")]
    CertificateFailed(String),
    #[error("weights live in different number fields")]
    FieldMismatch,
    #[error(transparent)]
    Algebra(AlgebraError),
    #[error(transparent)]
    Track(#[from] TrackError),
}

impl From<AlgebraError> for MoveError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::FieldMismatch => MoveError::FieldMismatch,
            other => MoveError::Algebra(other),
        }
    }
}
