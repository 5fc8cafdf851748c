//! Top-down evaluation with a call table.
//!
//! A call that is re-encountered while it is still being evaluated is the
//! point where plain SLD resolution would loop forever. Here it is recorded as
//! a cycle hit and answered with the current approximation (initially
//! `Recursive`). Calls are grounded on demand: a rule matches a call when
//! its head unifies with it, and body-only variables range over the Herbrand
//! universe.
//!
//! Results that depend on a still-open call are provisional and never
//! memoized. Calls are numbered in visiting order and every call tracks the
//! lowest number it touched (its watermark). A call whose watermark is its
//! own number closes a recursive component: every call above it on the
//! in-progress stack belongs to that component, and the component is solved
//! by a local simultaneous fixpoint, all other dependencies already being
//! final. Composing these local least fixpoints gives the global one, so
//! every completed entry equals the fixpoint engine's value.

use std::collections::BTreeMap;
use std::fmt;

use crate::engine::{EngineError, QueryOptions};
use crate::grounding::{for_each_tuple, herbrand_universe, GroundAtom, GroundLiteral};
use crate::syntax::{Atom, Program, Rule, Term};
use crate::truth::TruthValue;

pub const DEFAULT_MAX_TABLE_ENTRIES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    /// A call with its evaluation below it. Calls answered from the table, or
    /// from an open call off the current path, have no children.
    Call {
        atom: GroundAtom,
        children: Vec<TraceEvent>,
        verdict: TruthValue,
    },
    /// Entry into one ground instance of a source rule (1-based).
    Rule { number: usize, children: Vec<TraceEvent> },
    /// The call is already on the current evaluation path.
    Cycle { atom: GroundAtom },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTrace {
    pub root: TraceEvent,
}

impl ProofTrace {
    /// Atoms of every cycle hit, in trace order.
    pub fn cycle_hits(&self) -> Vec<&GroundAtom> {
        fn walk<'a>(e: &'a TraceEvent, out: &mut Vec<&'a GroundAtom>) {
            match e {
                TraceEvent::Cycle { atom } => out.push(atom),
                TraceEvent::Call { children, .. } | TraceEvent::Rule { children, .. } => {
                    children.iter().for_each(|c| walk(c, out))
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    fn settle(event: &mut TraceEvent, completed: &BTreeMap<GroundAtom, TruthValue>) {
        match event {
            TraceEvent::Call {
                atom,
                children,
                verdict,
            } => {
                if let Some(v) = completed.get(atom) {
                    *verdict = *v;
                }
                children.iter_mut().for_each(|c| Self::settle(c, completed));
            }
            TraceEvent::Rule { children, .. } => children.iter_mut().for_each(|c| Self::settle(c, completed)),
            TraceEvent::Cycle { .. } => {}
        }
    }
}

impl fmt::Display for ProofTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn line(f: &mut fmt::Formatter<'_>, depth: usize, text: fmt::Arguments<'_>) -> fmt::Result {
            writeln!(f, "{:width$}{text}", "", width = depth * 2)
        }
        fn walk(f: &mut fmt::Formatter<'_>, e: &TraceEvent, depth: usize) -> fmt::Result {
            match e {
                TraceEvent::Call {
                    atom,
                    children,
                    verdict,
                } => {
                    line(f, depth, format_args!("call {atom}"))?;
                    for c in children {
                        walk(f, c, depth + 1)?;
                    }
                    line(f, depth + 1, format_args!("= {verdict} {atom}"))
                }
                TraceEvent::Rule { number, children } => {
                    line(f, depth, format_args!("rule #{number}"))?;
                    children.iter().try_for_each(|c| walk(f, c, depth + 1))
                }
                TraceEvent::Cycle { atom } => line(f, depth, format_args!("cycle {atom}")),
            }
        }
        walk(f, &self.root, 0)
    }
}

/// Completed verdicts plus the calls still under evaluation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CallTable {
    completed: BTreeMap<GroundAtom, TruthValue>,
    in_progress: Vec<GroundAtom>,
}

impl CallTable {
    pub fn completed(&self) -> &BTreeMap<GroundAtom, TruthValue> {
        &self.completed
    }

    pub fn in_progress(&self) -> &[GroundAtom] {
        &self.in_progress
    }

    pub fn len(&self) -> usize {
        self.completed.len() + self.in_progress.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabledOutcome {
    pub value: TruthValue,
    pub trace: ProofTrace,
    pub table: CallTable,
    /// Local fixpoint sweeps spent closing recursive components.
    pub sweeps: usize,
}

struct Open {
    number: usize,
    on_path: bool,
    approximation: TruthValue,
    instances: Vec<Vec<GroundLiteral>>,
}

/// Evaluator over one program and universe. The table persists across calls
/// to [`TabledEvaluator::solve`].
pub struct TabledEvaluator<'p> {
    program: &'p Program,
    universe: Vec<String>,
    cap: usize,
    table: CallTable,
    open: BTreeMap<GroundAtom, Open>,
    counter: usize,
    sweeps: usize,
}

/// Watermark of a call that touched no open call.
const SETTLED: usize = usize::MAX;

impl<'p> TabledEvaluator<'p> {
    pub fn new(program: &'p Program, universe: impl IntoIterator<Item = String>, max_entries: usize) -> Self {
        Self {
            program,
            universe: universe.into_iter().collect(),
            cap: max_entries,
            table: CallTable::default(),
            open: BTreeMap::new(),
            counter: 0,
            sweeps: 0,
        }
    }

    pub fn table(&self) -> &CallTable {
        &self.table
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn into_table(self) -> CallTable {
        self.table
    }

    pub fn solve(&mut self, goal: &GroundAtom) -> Result<(TruthValue, ProofTrace), EngineError> {
        let (value, _, mut root) = self.call(goal)?;
        debug_assert!(self.open.is_empty() && self.table.in_progress.is_empty());
        ProofTrace::settle(&mut root, &self.table.completed);
        Ok((value, ProofTrace { root }))
    }

    /// Ground body instances of every rule whose head unifies with `goal`.
    fn instances(&self, goal: &GroundAtom) -> Vec<(usize, Vec<GroundLiteral>)> {
        let mut out = Vec::new();
        for (id, rule) in self.program.rules().iter().enumerate() {
            let Some(binding) = unify_head(rule, goal) else {
                continue;
            };
            let free: Vec<&str> = rule
                .variables()
                .into_iter()
                .filter(|v| !binding.contains_key(v))
                .collect();
            for_each_tuple(&self.universe, free.len(), |tuple| {
                let mut b = binding.clone();
                b.extend(free.iter().copied().zip(tuple.iter().copied()));
                let body = rule
                    .body
                    .iter()
                    .map(|l| GroundLiteral {
                        atom: crate::grounding::substitute(&l.atom, &b),
                        negated: l.negated,
                    })
                    .collect();
                out.push((id, body));
            });
        }
        out
    }

    fn call(&mut self, goal: &GroundAtom) -> Result<(TruthValue, usize, TraceEvent), EngineError> {
        if let Some(&v) = self.table.completed.get(goal) {
            let event = TraceEvent::Call {
                atom: goal.clone(),
                children: Vec::new(),
                verdict: v,
            };
            return Ok((v, SETTLED, event));
        }
        if let Some(open) = self.open.get(goal) {
            let event = if open.on_path {
                TraceEvent::Cycle { atom: goal.clone() }
            } else {
                TraceEvent::Call {
                    atom: goal.clone(),
                    children: Vec::new(),
                    verdict: open.approximation,
                }
            };
            return Ok((open.approximation, open.number, event));
        }
        if self.table.len() >= self.cap {
            return Err(EngineError::TableCap { cap: self.cap });
        }

        let number = self.counter;
        self.counter += 1;
        self.table.in_progress.push(goal.clone());
        self.open.insert(
            goal.clone(),
            Open {
                number,
                on_path: true,
                approximation: TruthValue::Recursive,
                instances: Vec::new(),
            },
        );

        let mut watermark = number;
        let mut cyclic = false;
        let mut value = TruthValue::False;
        let mut children = Vec::new();
        let mut bodies = Vec::new();
        for (id, body) in self.instances(goal) {
            let mut conj = TruthValue::True;
            let mut calls = Vec::with_capacity(body.len());
            for lit in &body {
                let (v, low, event) = self.call(&lit.atom)?;
                watermark = watermark.min(low);
                cyclic |= low <= number;
                conj = conj & if lit.negated { !v } else { v };
                calls.push(event);
            }
            value = value | conj;
            children.push(TraceEvent::Rule {
                number: id + 1,
                children: calls,
            });
            bodies.push(body);
        }

        let open = self.open.get_mut(goal).expect("goal was opened above");
        open.on_path = false;
        open.approximation = value;
        open.instances = bodies;

        if watermark < number {
            // part of a component closed further down the stack
            let event = TraceEvent::Call {
                atom: goal.clone(),
                children,
                verdict: value,
            };
            return Ok((value, watermark, event));
        }

        let split = self
            .table
            .in_progress
            .iter()
            .rposition(|a| a == goal)
            .expect("goal is in progress");
        let members: Vec<GroundAtom> = self.table.in_progress.drain(split..).collect();
        let value = if cyclic {
            self.close_component(&members, goal)
        } else {
            value
        };
        for m in &members {
            let v = if m == goal { value } else { self.open[m].approximation };
            self.open.remove(m);
            self.table.completed.insert(m.clone(), v);
        }
        let event = TraceEvent::Call {
            atom: goal.clone(),
            children,
            verdict: value,
        };
        Ok((value, SETTLED, event))
    }

    /// Solves a recursive component from all-`Recursive` with simultaneous
    /// updates, writing the results back as the members' approximations.
    fn close_component(&mut self, members: &[GroundAtom], goal: &GroundAtom) -> TruthValue {
        let mut current: BTreeMap<&GroundAtom, TruthValue> =
            members.iter().map(|m| (m, TruthValue::Recursive)).collect();
        let lookup = |atom: &GroundAtom, current: &BTreeMap<&GroundAtom, TruthValue>| {
            current
                .get(atom)
                .or_else(|| self.table.completed.get(atom))
                .copied()
                .expect("dependencies outside the component are complete")
        };
        let mut sweeps = 0;
        loop {
            sweeps += 1;
            let next: BTreeMap<&GroundAtom, TruthValue> = members
                .iter()
                .map(|m| {
                    let v = TruthValue::any(self.open[m].instances.iter().map(|body| {
                        TruthValue::all(body.iter().map(|l| {
                            let v = lookup(&l.atom, &current);
                            if l.negated {
                                !v
                            } else {
                                v
                            }
                        }))
                    }));
                    (m, v)
                })
                .collect();
            if next == current {
                break;
            }
            current = next;
        }
        self.sweeps += sweeps;
        let settled: Vec<(GroundAtom, TruthValue)> = current.into_iter().map(|(a, v)| (a.clone(), v)).collect();
        let mut goal_value = TruthValue::Recursive;
        for (atom, v) in settled {
            if &atom == goal {
                goal_value = v;
            }
            if let Some(open) = self.open.get_mut(&atom) {
                open.approximation = v;
            }
        }
        goal_value
    }
}

fn unify_head<'r>(rule: &'r Rule, goal: &'r GroundAtom) -> Option<BTreeMap<&'r str, &'r str>> {
    if rule.head.predicate != goal.predicate || rule.head.arity() != goal.args.len() {
        return None;
    }
    let mut binding = BTreeMap::new();
    for (term, value) in rule.head.args.iter().zip(&goal.args) {
        match term {
            Term::Constant(c) if c != value => return None,
            Term::Constant(_) => {}
            Term::Variable(v) => match binding.insert(v.as_str(), value.as_str()) {
                Some(prev) if prev != value => return None,
                _ => {}
            },
        }
    }
    Some(binding)
}

pub fn query_tabled_detailed(
    program: &Program,
    query: &Atom,
    options: &QueryOptions,
) -> Result<TabledOutcome, EngineError> {
    let goal = GroundAtom::from_atom(query).ok_or_else(|| EngineError::NonGroundQuery(query.to_string()))?;
    let universe = herbrand_universe(program, Some(query));
    let mut evaluator = TabledEvaluator::new(program, universe, options.max_table_entries);
    let (value, trace) = evaluator.solve(&goal)?;
    let sweeps = evaluator.sweeps();
    Ok(TabledOutcome {
        value,
        trace,
        table: evaluator.into_table(),
        sweeps,
    })
}

pub fn query_tabled(
    program: &Program,
    query: &Atom,
    options: &QueryOptions,
) -> Result<(TruthValue, ProofTrace), EngineError> {
    query_tabled_detailed(program, query, options).map(|o| (o.value, o.trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, parse_query};
    use crate::truth::TruthValue::*;

    fn ask(program: &str, query: &str) -> TabledOutcome {
        query_tabled_detailed(
            &parse_program(program).unwrap(),
            &parse_query(query).unwrap(),
            &QueryOptions::default(),
        )
        .unwrap()
    }

    fn atom(text: &str) -> GroundAtom {
        GroundAtom::from_atom(&parse_query(text).unwrap()).unwrap()
    }

    #[test]
    fn liar_is_recursive_with_a_cycle_hit() {
        let out = ask("f :- \\+ f.", "f");
        assert_eq!(out.value, Recursive);
        assert_eq!(out.trace.cycle_hits(), [&atom("f")]);
        assert_eq!(
            out.trace.to_string(),
            "call f\n  rule #1\n    cycle f\n  = recursive f\n"
        );
    }

    #[test]
    fn true_branch_absorbs_cycle() {
        let out = ask("p :- q. q :- p. q :- r. r.", "p");
        assert_eq!(out.value, True);
        assert_eq!(out.table.completed()[&atom("q")], True);
        assert_eq!(out.table.completed()[&atom("r")], True);
        assert_eq!(out.trace.cycle_hits(), [&atom("p")]);
    }

    #[test]
    fn fact_has_no_cycle() {
        let out = ask("p.", "p");
        assert_eq!(out.value, True);
        assert!(out.trace.cycle_hits().is_empty());
        assert_eq!(out.trace.to_string(), "call p\n  rule #1\n  = true p\n");
        assert_eq!(out.sweeps, 0);
    }

    #[test]
    fn closed_world() {
        assert_eq!(ask("p.", "q").value, False);
        assert_eq!(ask("", "nosuch").value, False);
    }

    #[test]
    fn needs_local_iteration() {
        // q reaches p through a cycle but r forces it false
        let out = ask("p :- \\+ q. q :- p, r. r :- \\+ s.  s.", "p");
        assert_eq!(out.value, True);
        assert_eq!(out.table.completed()[&atom("q")], False);

        let out = ask("p :- \\+ q. q :- \\+ p. q :- s. s.", "p");
        assert_eq!(out.value, False);
        assert_eq!(out.table.completed()[&atom("q")], True);
    }

    #[test]
    fn off_path_open_calls_are_not_cycle_hits() {
        // r re-enters q after q returned provisionally; only p is an ancestor hit
        let out = ask("p :- q, r. q :- p. r :- q.", "p");
        assert_eq!(out.value, Recursive);
        let hits = out.trace.cycle_hits();
        assert_eq!(hits, [&atom("p")]);
    }

    #[test]
    fn body_only_variables_range_over_universe() {
        let out = ask("p :- q(X), \\+ r(X). q(a). q(b). r(a).", "p");
        assert_eq!(out.value, True);
        let out = ask("p :- q(X), \\+ r(X). q(a). r(a).", "p");
        assert_eq!(out.value, False);
    }

    #[test]
    fn repeated_head_variables_must_agree() {
        assert_eq!(ask("same(X, X).", "same(a, a)").value, True);
        assert_eq!(ask("same(X, X). q(b).", "same(a, b)").value, False);
    }

    #[test]
    fn table_cap() {
        let p = parse_program("p :- q. q :- r. r.").unwrap();
        let opts = QueryOptions {
            max_table_entries: 2,
            ..QueryOptions::default()
        };
        let err = query_tabled_detailed(&p, &parse_query("p").unwrap(), &opts).unwrap_err();
        assert_eq!(err, EngineError::TableCap { cap: 2 });
    }

    #[test]
    fn evaluator_reuses_its_table() {
        let p = parse_program("a :- \\+ b. b :- \\+ a. c :- a.").unwrap();
        let mut ev = TabledEvaluator::new(&p, ["u0".to_string()], 100);
        let (v, _) = ev.solve(&atom("c")).unwrap();
        assert_eq!(v, Recursive);
        assert_eq!(ev.table().completed().len(), 3);
        let (v, trace) = ev.solve(&atom("b")).unwrap();
        assert_eq!(v, Recursive);
        assert_eq!(trace.to_string(), "call b\n  = recursive b\n");
    }
}
