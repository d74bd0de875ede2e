//! Deterministic unranked tree automata: strongly deterministic (one
//! classifier per symbol) and weakly deterministic (one acceptor per state
//! and symbol) models, their Boolean operations and concatenation,
//! minimization, worst-case witness families and checking utilities.
//!
//! ```
//! use unranked::{witnesses::make_mb, Tree};
//!
//! let mb = make_mb(2).unwrap();
//! assert!(mb.accepts(&Tree::parse("b(a,a)").unwrap()));
//! ```

pub mod constructions;
pub mod error;
pub mod harness;
pub mod horizontal;
pub mod minimize;
pub mod sdta;
pub mod trees;
pub mod wdta;
pub mod witnesses;

pub use error::{ConstructionError, FormatError, MachineError, ParseTreeError, TreeError, WitnessError};
pub use horizontal::{HState, HorizontalMachine, Letter, VState};
pub use sdta::{Sdta, SizePair, Violation};
pub use trees::{CorpusSpec, Position, Symbol, Tree};
pub use wdta::Wdta;
