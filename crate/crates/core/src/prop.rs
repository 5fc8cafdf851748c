//! Propositional formulas over the three truth values, and circular
//! definition systems.
//!
//! A definition `x := φ` is read as a rule for finding the value of `x`: find
//! the value of `φ`. When `φ` mentions `x` itself the search never ends, and
//! the solver reports `x` as recursive. Concretely, the solution is the least
//! fixpoint in the knowledge order, reached by simultaneous re-evaluation from
//! all-`Recursive`.
//!
//! Text syntax: identifiers, `!`, `&`, `|`, `->`, `<->` and parentheses, with
//! precedence in that order (`!` binds tightest) and `->` right-associative.
//! A definition file holds `name := formula ;` and `input name = value ;`
//! statements; `#` starts a comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::truth::{Interpretation, TruthValue};

pub const DEFAULT_VARIABLE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PropError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("variable `{0}` has no value")]
    Unbound(String),
    #[error("formula has {count} variables, above the cap of {cap}")]
    TooManyVariables { count: usize, cap: usize },
    #[error("`{0}` is defined more than once")]
    DuplicateDefinition(String),
    #[error("`{0}` is both defined and declared as an input")]
    DefinedInput(String),
    #[error("definition of `{definition}` mentions `{name}`, which is neither defined nor an input")]
    Undeclared { name: String, definition: String },
    #[error("no value supplied for input `{0}`")]
    MissingInput(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Not(a) => a.collect_variables(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    pub fn eval(&self, valuation: &Interpretation<String>) -> Result<TruthValue, PropError> {
        self.eval_with(&|name| valuation.get(&name.to_string()))
    }

    fn eval_with(&self, lookup: &dyn Fn(&str) -> Option<TruthValue>) -> Result<TruthValue, PropError> {
        Ok(match self {
            Formula::Var(v) => lookup(v).ok_or_else(|| PropError::Unbound(v.clone()))?,
            Formula::Not(a) => !a.eval_with(lookup)?,
            Formula::And(a, b) => a.eval_with(lookup)? & b.eval_with(lookup)?,
            Formula::Or(a, b) => a.eval_with(lookup)? | b.eval_with(lookup)?,
            Formula::Implies(a, b) => a.eval_with(lookup)?.implies(b.eval_with(lookup)?),
            Formula::Iff(a, b) => a.eval_with(lookup)?.iff(b.eval_with(lookup)?),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(_) => 5,
            Formula::Var(_) => 6,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, node: &Formula, min: u8) -> fmt::Result {
            if node.precedence() < min {
                write!(f, "({node})")
            } else {
                write!(f, "{node}")
            }
        }
        let p = self.precedence();
        let (a, op, b, right_assoc) = match self {
            Formula::Var(v) => return f.write_str(v),
            Formula::Not(a) => {
                f.write_str("!")?;
                return child(f, a, p);
            }
            Formula::And(a, b) => (a, "&", b, false),
            Formula::Or(a, b) => (a, "|", b, false),
            Formula::Implies(a, b) => (a, "->", b, true),
            Formula::Iff(a, b) => (a, "<->", b, false),
        };
        let (left_min, right_min) = if right_assoc { (p + 1, p) } else { (p, p + 1) };
        child(f, a, left_min)?;
        write!(f, " {op} ")?;
        child(f, b, right_min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoValued {
    Tautology,
    Contradiction,
    Contingent,
}

impl fmt::Display for TwoValued {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TwoValued::Tautology => "tautology",
            TwoValued::Contradiction => "contradiction",
            TwoValued::Contingent => "contingent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub two_valued: TwoValued,
    /// Values the formula takes over all three-valued valuations.
    pub attainable: BTreeSet<TruthValue>,
}

/// Exhaustive classification: `2^n` classical valuations for the two-valued
/// verdict and `3^n` valuations for the attainable values.
pub fn classify(formula: &Formula, cap: usize) -> Result<Classification, PropError> {
    let vars: Vec<String> = formula.variables().into_iter().collect();
    if vars.len() > cap {
        return Err(PropError::TooManyVariables { count: vars.len(), cap });
    }
    let mut digits = vec![0usize; vars.len()];
    let mut attainable = BTreeSet::new();
    let (mut saw_true, mut saw_false) = (false, false);
    loop {
        let value =
            formula.eval_with(&|name| vars.iter().position(|v| v == name).map(|i| TruthValue::ALL[digits[i]]))?;
        attainable.insert(value);
        if digits.iter().all(|&d| TruthValue::ALL[d].is_classical()) {
            match value {
                TruthValue::True => saw_true = true,
                TruthValue::False => saw_false = true,
                TruthValue::Recursive => unreachable!("classical inputs give classical outputs"),
            }
        }
        let mut i = digits.len();
        loop {
            if i == 0 {
                let two_valued = match (saw_true, saw_false) {
                    (true, false) => TwoValued::Tautology,
                    (false, true) => TwoValued::Contradiction,
                    _ => TwoValued::Contingent,
                };
                return Ok(Classification { two_valued, attainable });
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < TruthValue::ALL.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Variables defined by (possibly self-referential) formulas, plus inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefinitionSystem {
    definitions: BTreeMap<String, Formula>,
    inputs: BTreeSet<String>,
}

impl DefinitionSystem {
    pub fn new(definitions: BTreeMap<String, Formula>, inputs: BTreeSet<String>) -> Result<Self, PropError> {
        if let Some(both) = definitions.keys().find(|k| inputs.contains(*k)) {
            return Err(PropError::DefinedInput(both.clone()));
        }
        for (name, rhs) in &definitions {
            if let Some(missing) = rhs
                .variables()
                .into_iter()
                .find(|v| !definitions.contains_key(v) && !inputs.contains(v))
            {
                return Err(PropError::Undeclared {
                    name: missing,
                    definition: name.clone(),
                });
            }
        }
        Ok(Self { definitions, inputs })
    }

    pub fn definitions(&self) -> &BTreeMap<String, Formula> {
        &self.definitions
    }

    pub fn inputs(&self) -> &BTreeSet<String> {
        &self.inputs
    }

    fn initial(&self, input_values: &BTreeMap<String, TruthValue>) -> Result<Interpretation<String>, PropError> {
        let mut current = Interpretation::all_recursive(self.definitions.keys().cloned());
        for input in &self.inputs {
            let value = input_values
                .get(input)
                .ok_or_else(|| PropError::MissingInput(input.clone()))?;
            current.set(input.clone(), *value);
        }
        Ok(current)
    }

    /// One simultaneous re-evaluation of every defined variable.
    pub fn step(&self, current: &Interpretation<String>) -> Result<Interpretation<String>, PropError> {
        let mut next = current.clone();
        for (name, rhs) in &self.definitions {
            next.set(name.clone(), rhs.eval(current)?);
        }
        Ok(next)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefinitionSolution {
    /// Values of defined variables and inputs.
    pub values: Interpretation<String>,
    pub iterations: usize,
}

pub fn solve_definitions(
    system: &DefinitionSystem,
    input_values: &BTreeMap<String, TruthValue>,
) -> Result<DefinitionSolution, PropError> {
    let mut current = system.initial(input_values)?;
    let mut iterations = 0;
    loop {
        let next = system.step(&current)?;
        iterations += 1;
        debug_assert!(iterations <= system.definitions.len() + 1);
        if next == current {
            return Ok(DefinitionSolution {
                values: current,
                iterations,
            });
        }
        current = next;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Define,
    Equals,
    Semi,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Not => "!",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Implies => "->",
            Tok::Iff => "<->",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Define => ":=",
            Tok::Equals => "=",
            Tok::Semi => ";",
        };
        write!(f, "`{s}`")
    }
}

/// A token with its line and column.
type Spanned = (Tok, usize, usize);

fn lex(text: &str) -> Result<(Vec<Spanned>, (usize, usize)), PropError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let err = |line, column, message: String| PropError::Syntax { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        let fixed = |s: &str| chars[i..].starts_with(&s.chars().collect::<Vec<_>>());
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i);
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '!' | '&' | '|' | '(' | ')' | ';' | '=' => {
                advance(1, &mut i);
                match c {
                    '!' => Tok::Not,
                    '&' => Tok::And,
                    '|' => Tok::Or,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ';' => Tok::Semi,
                    _ => Tok::Equals,
                }
            }
            '-' if fixed("->") => {
                advance(2, &mut i);
                Tok::Implies
            }
            '<' if fixed("<->") => {
                advance(3, &mut i);
                Tok::Iff
            }
            ':' if fixed(":=") => {
                advance(2, &mut i);
                Tok::Define
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    ident.push(chars[i]);
                    advance(1, &mut i);
                }
                Tok::Ident(ident)
            }
            other => return Err(err(line, col, format!("unexpected character `{other}`"))),
        };
        out.push((tok, start.0, start.1));
    }
    Ok((out, (line, col)))
}

struct FormulaParser {
    tokens: Vec<Spanned>,
    index: usize,
    end: (usize, usize),
}

impl FormulaParser {
    fn new(text: &str) -> Result<Self, PropError> {
        let (tokens, end) = lex(text)?;
        Ok(Self { tokens, index: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.index).map(|t| &t.0)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.tokens.get(self.index + 1).map(|t| &t.0)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.index += 1;
            true
        } else {
            false
        }
    }

    fn position(&self) -> (usize, usize) {
        self.tokens.get(self.index).map_or(self.end, |t| (t.1, t.2))
    }

    fn error(&self, wanted: &str) -> PropError {
        let (line, column) = self.position();
        let found = self
            .peek()
            .map_or_else(|| "end of input".to_string(), ToString::to_string);
        PropError::Syntax {
            line,
            column,
            message: format!("expected {wanted}, found {found}"),
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), PropError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&tok.to_string()))
        }
    }

    fn ident(&mut self) -> Result<String, PropError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.index += 1;
                Ok(name)
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn iff(&mut self) -> Result<Formula, PropError> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::Iff) {
            lhs = Formula::iff(lhs, self.implication()?);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, PropError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            Ok(Formula::implies(lhs, self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, PropError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, PropError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, PropError> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat(&Tok::LParen) {
            let inner = self.iff()?;
            self.expect(&Tok::RParen)?;
            return Ok(inner);
        }
        match self.peek() {
            Some(Tok::Ident(_)) => Ok(Formula::Var(self.ident()?)),
            _ => Err(self.error("a variable, `!` or `(`")),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, PropError> {
    let mut p = FormulaParser::new(text)?;
    let f = p.iff()?;
    if p.peek().is_some() {
        return Err(p.error("end of formula"));
    }
    Ok(f)
}

/// A parsed definition file: the system and the values given to its inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefinitionFile {
    pub system: DefinitionSystem,
    pub input_values: BTreeMap<String, TruthValue>,
}

impl DefinitionFile {
    pub fn solve(&self) -> Result<DefinitionSolution, PropError> {
        solve_definitions(&self.system, &self.input_values)
    }
}

pub fn parse_definitions(text: &str) -> Result<DefinitionFile, PropError> {
    let mut p = FormulaParser::new(text)?;
    let mut definitions = BTreeMap::new();
    let mut input_values = BTreeMap::new();
    while p.peek().is_some() {
        let is_input =
            matches!(p.peek(), Some(Tok::Ident(k)) if k == "input") && matches!(p.peek2(), Some(Tok::Ident(_)));
        if is_input {
            p.index += 1;
            let name = p.ident()?;
            p.expect(&Tok::Equals)?;
            let (line, column) = p.position();
            let value = p.ident()?.parse::<TruthValue>().map_err(|e| PropError::Syntax {
                line,
                column,
                message: e.to_string(),
            })?;
            if input_values.insert(name.clone(), value).is_some() {
                return Err(PropError::DuplicateDefinition(name));
            }
        } else {
            let name = p.ident()?;
            p.expect(&Tok::Define)?;
            let rhs = p.iff()?;
            if definitions.insert(name.clone(), rhs).is_some() {
                return Err(PropError::DuplicateDefinition(name));
            }
        }
        p.expect(&Tok::Semi)?;
    }
    let inputs = input_values.keys().cloned().collect();
    Ok(DefinitionFile {
        system: DefinitionSystem::new(definitions, inputs)?,
        input_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truth::TruthValue::*;

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    fn val(pairs: &[(&str, TruthValue)]) -> Interpretation<String> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn solve(text: &str) -> Interpretation<String> {
        parse_definitions(text).unwrap().solve().unwrap().values
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            f("!a & b | c -> d -> e <-> g"),
            Formula::iff(
                Formula::implies(
                    Formula::or(
                        Formula::and(Formula::not(Formula::var("a")), Formula::var("b")),
                        Formula::var("c")
                    ),
                    Formula::implies(Formula::var("d"), Formula::var("e"))
                ),
                Formula::var("g")
            )
        );
        assert_eq!(f("a <-> b <-> c"), f("(a <-> b) <-> c"));
        assert_eq!(f("a | b | c"), f("(a | b) | c"));
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "f <-> !f",
            "(a -> b) -> c",
            "a -> b -> c",
            "!(a & b) | !!c",
            "a <-> (b <-> c)",
            "(a | b) & c",
        ] {
            let parsed = f(text);
            assert_eq!(parsed.to_string(), text);
            assert_eq!(f(&parsed.to_string()), parsed);
        }
    }

    #[test]
    fn formula_syntax_errors() {
        assert!(matches!(
            parse_formula("a &"),
            Err(PropError::Syntax { line: 1, column: 4, .. })
        ));
        assert!(parse_formula("a b").is_err());
        assert!(parse_formula("(a").is_err());
        assert!(parse_formula("a - b").is_err());
    }

    #[test]
    fn evaluation_examples() {
        let liar = f("f <-> !f");
        assert_eq!(liar.eval(&val(&[("f", Recursive)])), Ok(Recursive));
        assert_eq!(liar.eval(&val(&[("f", True)])), Ok(False));
        assert_eq!(f("p | !p").eval(&val(&[("p", Recursive)])), Ok(Recursive));
        assert_eq!(
            f("p | q").eval(&val(&[("p", True)])),
            Err(PropError::Unbound("q".into()))
        );
    }

    #[test]
    fn classification_examples() {
        let c = classify(&f("f <-> !f"), DEFAULT_VARIABLE_CAP).unwrap();
        assert_eq!(c.two_valued, TwoValued::Contradiction);
        assert_eq!(c.attainable, BTreeSet::from([False, Recursive]));

        let c = classify(&f("t <-> t"), DEFAULT_VARIABLE_CAP).unwrap();
        assert_eq!(c.two_valued, TwoValued::Tautology);
        assert_eq!(c.attainable, BTreeSet::from([True, Recursive]));

        let c = classify(&f("p & !p"), DEFAULT_VARIABLE_CAP).unwrap();
        assert_eq!(c.two_valued, TwoValued::Contradiction);
        assert_eq!(c.attainable, BTreeSet::from([False, Recursive]));

        let c = classify(&f("p -> q"), DEFAULT_VARIABLE_CAP).unwrap();
        assert_eq!(c.two_valued, TwoValued::Contingent);
        assert_eq!(c.attainable.len(), 3);
    }

    #[test]
    fn classification_cap() {
        assert_eq!(
            classify(&f("a & b & c"), 2),
            Err(PropError::TooManyVariables { count: 3, cap: 2 })
        );
    }

    #[test]
    fn circular_definitions_are_recursive() {
        for (text, var) in [
            ("f := !f;", "f"),
            ("t := t;", "t"),
            ("s := !s;", "s"),
            ("u := u;", "u"),
            ("halt := !halt;", "halt"),
        ] {
            assert_eq!(solve(text).get(&var.to_string()), Some(Recursive), "{text}");
        }
    }

    #[test]
    fn input_settles_definition() {
        let sol = parse_definitions("p := q | p; input q = true;")
            .unwrap()
            .solve()
            .unwrap();
        assert_eq!(sol.values.get(&"p".to_string()), Some(True));
        assert_eq!(sol.iterations, 2);
        let v = solve("p := q | p; input q = false;");
        assert_eq!(v.get(&"p".to_string()), Some(Recursive));
    }

    #[test]
    fn chained_definitions() {
        let v = solve("# a chain\na := !b;\nb := c & d;\nc := !c;\nd := e;\ninput e = false;");
        assert_eq!(v.get(&"d".to_string()), Some(False));
        assert_eq!(v.get(&"b".to_string()), Some(False));
        assert_eq!(v.get(&"a".to_string()), Some(True));
        assert_eq!(v.get(&"c".to_string()), Some(Recursive));
    }

    #[test]
    fn definition_validation() {
        assert_eq!(
            parse_definitions("p := q;").unwrap_err(),
            PropError::Undeclared {
                name: "q".into(),
                definition: "p".into()
            }
        );
        assert_eq!(
            parse_definitions("p := p; p := !p;").unwrap_err(),
            PropError::DuplicateDefinition("p".into())
        );
        assert_eq!(
            parse_definitions("p := p; input p = true;").unwrap_err(),
            PropError::DefinedInput("p".into())
        );
        assert!(matches!(
            parse_definitions("input q = maybe;"),
            Err(PropError::Syntax {
                line: 1,
                column: 11,
                ..
            })
        ));
        assert!(parse_definitions("p := p").is_err());
        // `input` is an ordinary name when it is being defined
        assert_eq!(solve("input := !input;").get(&"input".to_string()), Some(Recursive));
    }

    #[test]
    fn missing_input_value() {
        let system = DefinitionSystem::new(
            BTreeMap::from([("p".to_string(), f("q"))]),
            BTreeSet::from(["q".to_string()]),
        )
        .unwrap();
        assert_eq!(
            solve_definitions(&system, &BTreeMap::new()),
            Err(PropError::MissingInput("q".into()))
        );
    }
}
