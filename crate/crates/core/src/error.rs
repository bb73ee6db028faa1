use thiserror::Error;

use crate::answer::AnsKind;
use crate::capacity::CapacityError;
use crate::eval::EvalError;
use crate::syntax::Label;

/// Failures while building or evaluating continuations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("answer domain mismatch: expected {expected}, found {found}")]
    DomainMismatch { expected: AnsKind, found: AnsKind },
    #[error("scaling factor must be non-negative")]
    NegativeScale,
    #[error("program contains `input` at ^{0} but no input model is configured")]
    NoInputModel(Label),
    #[error("no capacity is registered for the input at ^{0}")]
    NoModelForSite(Label),
    #[error("input at ^{label}: {message}")]
    InputMismatch { label: Label, message: String },
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error("the execution oracle does not support `input` (at ^{0})")]
    InputNotEnumerable(Label),
}
