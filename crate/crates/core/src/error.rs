use thiserror::Error;

use crate::horizontal::{HState, Letter};
use crate::trees::Position;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("tree syntax error at byte {offset}: {message}")]
pub struct ParseTreeError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("invalid symbol {0:?}: expected letters, digits or '_'")]
    InvalidSymbol(String),
    #[error("position {0} is not in the tree domain")]
    PositionOutOfDomain(Position),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("horizontal state {0} out of range")]
    StateOutOfRange(HState),
    #[error("duplicate transition from {from} on {letter}")]
    DuplicateTransition { from: HState, letter: Letter },
    #[error("operation requires an {expected} machine")]
    WrongRole { expected: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("outer automaton has no leaf states")]
    NoLeafStates,
    #[error("automaton is invalid: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("witness parameter {name} must be at least {min}, got {value}")]
    TooSmall {
        name: &'static str,
        min: usize,
        value: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}
