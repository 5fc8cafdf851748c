//! The normative semantics: least fixpoint of the three-valued immediate
//! consequence operator, climbed from the all-`Recursive` interpretation.
//!
//! Atoms still `Recursive` at the fixpoint are exactly those whose
//! evaluation keeps re-asking for their own value.

use std::collections::BTreeMap;

use crate::engine::{EngineError, QueryOptions};
use crate::grounding::{ground, GroundAtom, GroundProgram};
use crate::syntax::{Atom, Program};
use crate::truth::{Interpretation, TruthValue};

/// Atoms whose value changed in one operator application, with their new value.
pub type StepChanges = Vec<(GroundAtom, TruthValue)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixpointResult {
    pub interpretation: Interpretation<GroundAtom>,
    /// Operator applications until two consecutive interpretations agreed.
    pub iterations: usize,
    /// One entry per application, present when tracing was requested.
    pub trace: Option<Vec<StepChanges>>,
}

impl FixpointResult {
    /// Rebuilds the iteration chain `I0 = all-Recursive, I1, ..., In` from the
    /// trace. `None` without a trace.
    pub fn chain(&self) -> Option<Vec<Interpretation<GroundAtom>>> {
        let trace = self.trace.as_ref()?;
        let mut current = Interpretation::all_recursive(self.interpretation.keys().cloned());
        let mut chain = vec![current.clone()];
        for changes in trace {
            for (atom, value) in changes {
                current.set(atom.clone(), *value);
            }
            chain.push(current.clone());
        }
        Some(chain)
    }
}

struct Operator<'g> {
    program: &'g GroundProgram,
    by_head: BTreeMap<&'g GroundAtom, Vec<usize>>,
}

impl<'g> Operator<'g> {
    fn new(program: &'g GroundProgram) -> Self {
        Self {
            program,
            by_head: program.rules_by_head(),
        }
    }

    fn value_of(&self, atom: &GroundAtom, current: &Interpretation<GroundAtom>) -> TruthValue {
        let Some(rules) = self.by_head.get(atom) else {
            return TruthValue::False;
        };
        TruthValue::any(rules.iter().map(|&i| {
            TruthValue::all(self.program.rules[i].body.iter().map(|lit| {
                let v = current.get(&lit.atom).unwrap_or(TruthValue::False);
                if lit.negated {
                    !v
                } else {
                    v
                }
            }))
        }))
    }

    /// Simultaneous update: every new value is computed from `current` only.
    fn apply(&self, current: &Interpretation<GroundAtom>) -> Interpretation<GroundAtom> {
        current.keys().map(|a| (a.clone(), self.value_of(a, current))).collect()
    }
}

/// One application of the immediate consequence operator. Atoms without
/// rules become `False`.
pub fn fitting_step(program: &GroundProgram, current: &Interpretation<GroundAtom>) -> Interpretation<GroundAtom> {
    Operator::new(program).apply(current)
}

pub fn fitting_fixpoint(program: &GroundProgram, trace: bool) -> Result<FixpointResult, EngineError> {
    let op = Operator::new(program);
    let bound = program.atoms.len() + 1;
    let mut current = Interpretation::all_recursive(program.atoms.iter().cloned());
    let mut steps = trace.then(Vec::new);
    let mut iterations = 0;
    loop {
        if iterations == bound {
            return Err(EngineError::IterationBound { bound });
        }
        let next = op.apply(&current);
        iterations += 1;
        if let Some(steps) = steps.as_mut() {
            steps.push(current.changes_to(&next));
        }
        if next == current {
            break;
        }
        current = next;
    }
    Ok(FixpointResult {
        interpretation: current,
        iterations,
        trace: steps,
    })
}

/// Grounds `program` together with `query`, runs the fixpoint and looks the
/// query up. Queries on predicates the program never mentions are `False`.
pub fn query_fixpoint_detailed(
    program: &Program,
    query: &Atom,
    options: &QueryOptions,
) -> Result<(TruthValue, FixpointResult), EngineError> {
    let goal = GroundAtom::from_atom(query).ok_or_else(|| EngineError::NonGroundQuery(query.to_string()))?;
    let grounded = ground(program, Some(query), options.ground)?;
    let result = fitting_fixpoint(&grounded, options.trace)?;
    let value = result.interpretation.get(&goal).unwrap_or(TruthValue::False);
    Ok((value, result))
}

pub fn query_fixpoint(program: &Program, query: &Atom, options: &QueryOptions) -> Result<TruthValue, EngineError> {
    query_fixpoint_detailed(program, query, options).map(|(v, _)| v)
}
