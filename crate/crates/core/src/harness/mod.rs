//! File format, corpus oracles and bound experiments.

pub mod format;
pub mod oracle;
pub mod report;

pub use format::{load_automaton, parse_automaton, save_automaton, serialize_automaton, LoadError};
pub use oracle::{
    check_boolean, check_complement, check_concat, concat_membership_oracle, language_equal,
    language_equal_by_enumeration, wdta_ambiguity, Automaton, Comparison,
};
pub use report::{verify_boolean_bounds, verify_concat_bound, BoolOp, BoundReport, Check, CheckKind, Kind, VerifyError};
