//! Logic programs, circular definitions and diagonal digit streams evaluated
//! with three truth values: `true`, `false` and `recursive`.
//!
//! A statement is *recursive* when finding its truth value requires finding
//! that same truth value again. Instead of looping, the engines here report it.

pub mod cli;
pub mod corpus;
pub mod diagonal;
pub mod engine;
pub mod fixpoint;
pub mod grounding;
pub mod prop;
pub mod syntax;
pub mod tabled;
pub mod truth;

pub use engine::{evaluate, Answer, Engine, EngineError, QueryOptions};
pub use syntax::{parse_program, parse_query, Atom, Literal, Program, Rule, Term};
pub use truth::{Interpretation, TruthValue};
