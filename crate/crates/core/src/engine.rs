//! Shared query plumbing for the two evaluation engines.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::fixpoint::{query_fixpoint_detailed, StepChanges};
use crate::grounding::{GroundError, GroundOptions};
use crate::syntax::{Atom, Program};
use crate::tabled::{query_tabled_detailed, ProofTrace, DEFAULT_MAX_TABLE_ENTRIES};
use crate::truth::TruthValue;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("query `{0}` is not ground; only queries over constants can be answered")]
    NonGroundQuery(String),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error("fixpoint did not stabilise within {bound} iterations")]
    IterationBound { bound: usize },
    #[error("call table exceeded {cap} entries")]
    TableCap { cap: usize },
}

impl EngineError {
    /// Resource exhaustion as opposed to a malformed request.
    pub fn is_resource(&self) -> bool {
        !matches!(self, EngineError::NonGroundQuery(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryOptions {
    pub ground: GroundOptions,
    pub max_table_entries: usize,
    pub trace: bool,
}

impl Default for QueryOptions {
    fn default() -> Self {
        Self {
            ground: GroundOptions::default(),
            max_table_entries: DEFAULT_MAX_TABLE_ENTRIES,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Fixpoint,
    #[default]
    Tabled,
}

impl Engine {
    pub const ALL: [Engine; 2] = [Engine::Fixpoint, Engine::Tabled];

    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Fixpoint => "fixpoint",
            Engine::Tabled => "tabled",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fixpoint" => Ok(Engine::Fixpoint),
            "tabled" => Ok(Engine::Tabled),
            other => Err(format!("unknown engine `{other}` (expected fixpoint or tabled)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnswerTrace {
    Fixpoint(Vec<StepChanges>),
    Tabled(ProofTrace),
}

impl fmt::Display for AnswerTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnswerTrace::Tabled(t) => write!(f, "{t}"),
            AnswerTrace::Fixpoint(steps) => {
                for (i, changes) in steps.iter().enumerate() {
                    writeln!(f, "iteration {}", i + 1)?;
                    for (atom, value) in changes {
                        writeln!(f, "  {atom} = {value}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub value: TruthValue,
    /// Operator applications for the fixpoint engine; local re-evaluation
    /// sweeps over recursive components for the tabled engine.
    pub iterations: usize,
    pub trace: Option<AnswerTrace>,
}

pub fn evaluate(
    engine: Engine,
    program: &Program,
    query: &Atom,
    options: &QueryOptions,
) -> Result<Answer, EngineError> {
    match engine {
        Engine::Fixpoint => {
            let (value, result) = query_fixpoint_detailed(program, query, options)?;
            Ok(Answer {
                value,
                iterations: result.iterations,
                trace: result.trace.map(AnswerTrace::Fixpoint),
            })
        }
        Engine::Tabled => {
            let outcome = query_tabled_detailed(program, query, options)?;
            Ok(Answer {
                value: outcome.value,
                iterations: outcome.sweeps,
                trace: options.trace.then_some(AnswerTrace::Tabled(outcome.trace)),
            })
        }
    }
}
