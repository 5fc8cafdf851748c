//! The bundled paradox corpus with its expected verdicts.
//!
//! The same files ship under `corpus/` at the repository root.

use crate::diagonal::parse_matrix;
use crate::engine::{evaluate, Engine, QueryOptions};
use crate::prop::parse_definitions;
use crate::syntax::{parse_program, parse_query};
use crate::truth::TruthValue::{self, *};

pub const SELF_REFERENCE: &str = include_str!("../../../corpus/self.rtv");
pub const RUSSELL: &str = include_str!("../../../corpus/russell.rtv");
pub const RUSSELL_GOLDEN: &str = include_str!("../../../corpus/russell.golden");
pub const CONTRAST: &str = include_str!("../../../corpus/contrast.rtv");
pub const LIAR: &str = include_str!("../../../corpus/liar.def");
pub const TRUTH_TELLER: &str = include_str!("../../../corpus/truthteller.def");
pub const HALT: &str = include_str!("../../../corpus/halt.def");
pub const CIRCULAR: &str = include_str!("../../../corpus/circular.def");
pub const DIAGONAL: &str = include_str!("../../../corpus/diagonal.dgm");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    /// A logic program and `(query, expected verdict)` pairs.
    Program { queries: Vec<(String, TruthValue)> },
    /// A definition system and `(variable, expected value)` pairs.
    Definitions { expected: Vec<(String, TruthValue)> },
    /// A digit matrix, the row to render, the digit count and the numeral.
    Matrix {
        row: String,
        digits: usize,
        expected: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub file: String,
    pub text: String,
    pub source: Source,
}

fn pairs(items: &[(&str, TruthValue)]) -> Vec<(String, TruthValue)> {
    items.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn entry(name: &str, file: &str, text: &str, source: Source) -> CorpusEntry {
    CorpusEntry {
        name: name.into(),
        file: file.into(),
        text: text.into(),
        source,
    }
}

pub fn entries() -> Vec<CorpusEntry> {
    vec![
        entry(
            "self",
            "self.rtv",
            SELF_REFERENCE,
            Source::Program {
                queries: pairs(&[
                    ("t", Recursive),
                    ("f", Recursive),
                    ("a(z)", Recursive),
                    ("b(z)", Recursive),
                    ("elementOf(c, c)", Recursive),
                    ("elementOf(r, r)", Recursive),
                ]),
            },
        ),
        entry(
            "russell",
            "russell.rtv",
            RUSSELL,
            Source::Program {
                queries: pairs(&[
                    ("elementOf(r, r)", Recursive),
                    ("elementOf(c, c)", Recursive),
                    ("elementOf(c, r)", Recursive),
                    ("elementOf(r, c)", Recursive),
                ]),
            },
        ),
        entry(
            "contrast",
            "contrast.rtv",
            CONTRAST,
            Source::Program {
                queries: pairs(&[
                    ("p", True),
                    ("q", True),
                    ("s", True),
                    ("n", True),
                    ("n2", False),
                    ("v", False),
                ]),
            },
        ),
        entry(
            "liar",
            "liar.def",
            LIAR,
            Source::Definitions {
                expected: pairs(&[("s", Recursive)]),
            },
        ),
        entry(
            "truthteller",
            "truthteller.def",
            TRUTH_TELLER,
            Source::Definitions {
                expected: pairs(&[("u", Recursive)]),
            },
        ),
        entry(
            "halt",
            "halt.def",
            HALT,
            Source::Definitions {
                expected: pairs(&[("halt", Recursive)]),
            },
        ),
        entry(
            "circular",
            "circular.def",
            CIRCULAR,
            Source::Definitions {
                expected: pairs(&[("t", Recursive), ("f", Recursive), ("p", True)]),
            },
        ),
        entry(
            "diagonal",
            "diagonal.dgm",
            DIAGONAL,
            Source::Matrix {
                row: "anti".into(),
                digits: 8,
                expected: "0.10r0110".into(),
            },
        ),
    ]
}

pub fn find(name: &str) -> Option<CorpusEntry> {
    entries().into_iter().find(|e| e.name == name)
}

/// One checked expectation of an entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub entry: String,
    pub case: String,
    pub engine: Option<Engine>,
    pub expected: String,
    /// The observed result, or the error that prevented one.
    pub actual: Result<String, String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.actual.as_deref() == Ok(self.expected.as_str())
    }
}

/// Checks every expectation of `entry`; programs run on both engines.
pub fn check(entry: &CorpusEntry, options: &QueryOptions) -> Vec<CheckOutcome> {
    let outcome = |case: &str, engine, expected: String, actual| CheckOutcome {
        entry: entry.name.clone(),
        case: case.to_string(),
        engine,
        expected,
        actual,
    };
    match &entry.source {
        Source::Program { queries } => {
            let program = parse_program(&entry.text);
            let mut out = Vec::new();
            for (query, expected) in queries {
                for engine in Engine::ALL {
                    let actual = program
                        .as_ref()
                        .map_err(ToString::to_string)
                        .and_then(|p| {
                            let q = parse_query(query).map_err(|e| e.to_string())?;
                            evaluate(engine, p, &q, options).map_err(|e| e.to_string())
                        })
                        .map(|a| a.value.to_string());
                    out.push(outcome(query, Some(engine), expected.to_string(), actual));
                }
            }
            out
        }
        Source::Definitions { expected } => {
            let solved = parse_definitions(&entry.text)
                .and_then(|file| file.solve())
                .map_err(|e| e.to_string());
            expected
                .iter()
                .map(|(var, want)| {
                    let actual = solved.clone().and_then(|s| {
                        s.values
                            .get(var)
                            .map(|v| v.to_string())
                            .ok_or_else(|| format!("`{var}` is not defined"))
                    });
                    outcome(var, None, want.to_string(), actual)
                })
                .collect()
        }
        Source::Matrix { row, digits, expected } => {
            let actual = parse_matrix(&entry.text)
                .and_then(|m| m.render_stream(m.row_index(row)?, *digits))
                .map_err(|e| e.to_string());
            vec![outcome(row, None, expected.clone(), actual)]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_passes() {
        for e in entries() {
            for o in check(&e, &QueryOptions::default()) {
                assert!(o.passed(), "{o:?}");
            }
        }
    }

    #[test]
    fn wrong_expectation_fails() {
        let mut e = find("liar").unwrap();
        e.source = Source::Definitions {
            expected: pairs(&[("s", True)]),
        };
        let out = check(&e, &QueryOptions::default());
        assert!(!out[0].passed());
        assert_eq!(out[0].actual, Ok("recursive".into()));
    }

    #[test]
    fn names_are_unique() {
        let names: std::collections::BTreeSet<_> = entries().into_iter().map(|e| e.name).collect();
        assert_eq!(names.len(), entries().len());
        assert!(find("nope").is_none());
    }
}
