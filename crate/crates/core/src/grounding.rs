//! Herbrand instantiation.
//!
//! The language has no function symbols, so the Herbrand universe is just the
//! set of constants and every program has finitely many ground instances.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{Atom, Literal, Program, Rule, Term};

/// Constant used when a program and query mention no constants at all.
pub const RESERVED_CONSTANT: &str = "u0";

pub const DEFAULT_MAX_GROUND_RULES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error("grounding would produce {projected} {what}, above the cap of {cap}")]
    TooLarge {
        what: &'static str,
        projected: String,
        cap: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundOptions {
    /// Upper bound on ground rules and, separately, on ground atoms.
    pub max_ground_rules: usize,
}

impl Default for GroundOptions {
    fn default() -> Self {
        Self {
            max_ground_rules: DEFAULT_MAX_GROUND_RULES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new<S: Into<String>>(predicate: impl Into<String>, args: impl IntoIterator<Item = S>) -> Self {
        Self {
            predicate: predicate.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    /// `None` if the atom still contains a variable.
    pub fn from_atom(atom: &Atom) -> Option<Self> {
        let args = atom
            .args
            .iter()
            .map(|t| match t {
                Term::Constant(c) => Some(c.clone()),
                Term::Variable(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Self {
            predicate: atom.predicate.clone(),
            args,
        })
    }

    pub fn to_atom(&self) -> Atom {
        Atom::new(
            self.predicate.clone(),
            self.args.iter().cloned().map(Term::Constant).collect(),
        )
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_atom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundLiteral {
    pub atom: GroundAtom,
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundRule {
    pub head: GroundAtom,
    pub body: Vec<GroundLiteral>,
    /// Index of the source rule in the program this instance came from.
    pub source: usize,
    /// Variable bindings that produced this instance, in first-occurrence order.
    pub bindings: Vec<(String, String)>,
}

impl GroundRule {
    pub fn to_rule(&self) -> Rule {
        Rule {
            head: self.head.to_atom(),
            body: self
                .body
                .iter()
                .map(|l| Literal {
                    atom: l.atom.to_atom(),
                    negated: l.negated,
                })
                .collect(),
        }
    }
}

impl fmt::Display for GroundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rule())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
    /// Every predicate of the program applied to every tuple of constants.
    pub atoms: BTreeSet<GroundAtom>,
    pub universe: BTreeSet<String>,
}

impl GroundProgram {
    /// The ground rules as an ordinary program; grounding it again is a no-op.
    pub fn to_program(&self) -> Program {
        Program::from_rules(self.rules.iter().map(GroundRule::to_rule).collect())
            .expect("ground rules come from an arity-consistent program")
    }

    /// Rule indices grouped by head atom.
    pub fn rules_by_head(&self) -> BTreeMap<&GroundAtom, Vec<usize>> {
        let mut index: BTreeMap<&GroundAtom, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.rules.iter().enumerate() {
            index.entry(&r.head).or_default().push(i);
        }
        index
    }
}

pub fn herbrand_universe(program: &Program, query: Option<&Atom>) -> BTreeSet<String> {
    let mut universe = program.constants().clone();
    if let Some(q) = query {
        universe.extend(q.constants().map(str::to_string));
    }
    if universe.is_empty() {
        universe.insert(RESERVED_CONSTANT.to_string());
    }
    universe
}

/// Calls `visit` with every assignment of `universe` values to `count`
/// positions, in lexicographic order with the first position most significant.
pub(crate) fn for_each_tuple<'a>(universe: &'a [String], count: usize, mut visit: impl FnMut(&[&'a str])) {
    if count > 0 && universe.is_empty() {
        return;
    }
    let mut digits = vec![0usize; count];
    let mut tuple: Vec<&str> = vec![universe.first().map_or("", String::as_str); count];
    loop {
        visit(&tuple);
        let mut i = count;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < universe.len() {
                tuple[i] = &universe[digits[i]];
                break;
            }
            digits[i] = 0;
            tuple[i] = &universe[0];
        }
    }
}

pub(crate) fn substitute(atom: &Atom, binding: &BTreeMap<&str, &str>) -> GroundAtom {
    GroundAtom {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|t| match t {
                Term::Constant(c) => c.clone(),
                Term::Variable(v) => binding[v.as_str()].to_string(),
            })
            .collect(),
    }
}

fn checked_count(universe: usize, exponent: usize) -> Option<usize> {
    universe.checked_pow(u32::try_from(exponent).ok()?)
}

fn projected<I: IntoIterator<Item = usize>>(
    universe: usize,
    exponents: I,
    what: &'static str,
    cap: usize,
) -> Result<usize, GroundError> {
    let mut total: Option<usize> = Some(0);
    for e in exponents {
        total = total.and_then(|t| t.checked_add(checked_count(universe, e)?));
    }
    match total {
        Some(n) if n <= cap => Ok(n),
        Some(n) => Err(GroundError::TooLarge {
            what,
            projected: n.to_string(),
            cap,
        }),
        None => Err(GroundError::TooLarge {
            what,
            projected: "more than usize::MAX".into(),
            cap,
        }),
    }
}

pub fn ground(program: &Program, query: Option<&Atom>, options: GroundOptions) -> Result<GroundProgram, GroundError> {
    let universe = herbrand_universe(program, query);
    let constants: Vec<String> = universe.iter().cloned().collect();
    let cap = options.max_ground_rules;

    let rule_vars: Vec<Vec<&str>> = program.rules().iter().map(Rule::variables).collect();
    let n_rules = projected(constants.len(), rule_vars.iter().map(Vec::len), "ground rules", cap)?;
    let n_atoms = projected(
        constants.len(),
        program.predicates().values().copied(),
        "ground atoms",
        cap,
    )?;

    let mut rules = Vec::with_capacity(n_rules);
    for (source, (rule, vars)) in program.rules().iter().zip(&rule_vars).enumerate() {
        for_each_tuple(&constants, vars.len(), |tuple| {
            let binding: BTreeMap<&str, &str> = vars.iter().copied().zip(tuple.iter().copied()).collect();
            rules.push(GroundRule {
                head: substitute(&rule.head, &binding),
                body: rule
                    .body
                    .iter()
                    .map(|l| GroundLiteral {
                        atom: substitute(&l.atom, &binding),
                        negated: l.negated,
                    })
                    .collect(),
                source,
                bindings: vars
                    .iter()
                    .zip(tuple)
                    .map(|(v, c)| (v.to_string(), c.to_string()))
                    .collect(),
            });
        });
    }

    let mut atoms = BTreeSet::new();
    for (predicate, &arity) in program.predicates() {
        for_each_tuple(&constants, arity, |tuple| {
            atoms.insert(GroundAtom::new(predicate.clone(), tuple.iter().copied()));
        });
    }
    debug_assert_eq!(atoms.len(), n_atoms);

    Ok(GroundProgram { rules, atoms, universe })
}
