//! Front end for the logic-programming language.
//!
//! The language is the function-free fragment of Prolog with negation as
//! failure: clauses `head :- l1, ..., ln.` where each literal is an atom,
//! optionally prefixed with `\+`. Terms are constants (lower-case initial)
//! or variables (upper-case or `_` initial). `%` starts a comment that runs
//! to the end of the line.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: predicate `{predicate}` used with arity {found}, previously {expected}")]
    ArityConflict {
        predicate: String,
        expected: usize,
        found: usize,
        line: usize,
        column: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Constant(String),
    Variable(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Constant(n) | Term::Variable(n) => n,
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Self {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_variable())
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Variable(v) => Some(v.as_str()),
            Term::Constant(_) => None,
        })
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Constant(c) => Some(c.as_str()),
            Term::Variable(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn positive(atom: Atom) -> Self {
        Self { atom, negated: false }
    }

    pub fn negative(atom: Atom) -> Self {
        Self { atom, negated: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn fact(head: Atom) -> Self {
        Self { head, body: Vec::new() }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    /// Distinct variables in order of first occurrence, head first.
    pub fn variables(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        let atoms = std::iter::once(&self.head).chain(self.body.iter().map(|l| &l.atom));
        for v in atoms.flat_map(Atom::variables) {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
        seen
    }

    fn atoms(&self) -> impl Iterator<Item = &Atom> {
        std::iter::once(&self.head).chain(self.body.iter().map(|l| &l.atom))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    rules: Vec<Rule>,
    constants: BTreeSet<String>,
    arities: BTreeMap<String, usize>,
}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a program from rules, checking per-predicate arity consistency.
    pub fn from_rules(rules: Vec<Rule>) -> Result<Self, SyntaxError> {
        let mut program = Self::new();
        for rule in rules {
            program.push(rule)?;
        }
        Ok(program)
    }

    /// Appends a rule. A predicate that is already known at another arity is
    /// rejected and the program is left unchanged.
    pub fn push(&mut self, rule: Rule) -> Result<(), SyntaxError> {
        let mut pending: BTreeMap<&str, usize> = BTreeMap::new();
        for atom in rule.atoms() {
            let known = self
                .arities
                .get(&atom.predicate)
                .or_else(|| pending.get(atom.predicate.as_str()))
                .copied();
            match known {
                Some(expected) if expected != atom.arity() => {
                    return Err(SyntaxError::ArityConflict {
                        predicate: atom.predicate.clone(),
                        expected,
                        found: atom.arity(),
                        line: 0,
                        column: 0,
                    })
                }
                Some(_) => {}
                None => {
                    pending.insert(&atom.predicate, atom.arity());
                }
            }
        }
        for (p, n) in pending {
            self.arities.insert(p.to_string(), n);
        }
        for atom in rule.atoms() {
            self.constants.extend(atom.constants().map(str::to_string));
        }
        self.rules.push(rule);
        Ok(())
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn constants(&self) -> &BTreeSet<String> {
        &self.constants
    }

    /// Predicate name to arity, for every predicate mentioned in the program.
    pub fn predicates(&self) -> &BTreeMap<String, usize> {
        &self.arities
    }

    pub fn arity_of(&self, predicate: &str) -> Option<usize> {
        self.arities.get(predicate).copied()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("\\+ ")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// Renders a rule as one line, including the trailing newline.
impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        f.write_str(".\n")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.rules.iter().try_for_each(|r| write!(f, "{r}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Lower(String),
    Upper(String),
    Neck,
    QueryMark,
    Negation,
    LParen,
    RParen,
    Comma,
    Dot,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Lower(s) | Token::Upper(s) => write!(f, "`{s}`"),
            Token::Neck => f.write_str("`:-`"),
            Token::QueryMark => f.write_str("`?-`"),
            Token::Negation => f.write_str("`\\+`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::Comma => f.write_str("`,`"),
            Token::Dot => f.write_str("`.`"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn error_at(pos: Pos, message: impl Into<String>) -> SyntaxError {
    SyntaxError::Parse {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<(Vec<(Token, Pos)>, Pos), SyntaxError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    let mut column = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        match c {
            c if c.is_whitespace() => {
                bump!();
            }
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '(' | ')' | ',' | '.' => {
                bump!();
                tokens.push((
                    match c {
                        '(' => Token::LParen,
                        ')' => Token::RParen,
                        ',' => Token::Comma,
                        _ => Token::Dot,
                    },
                    pos,
                ));
            }
            ':' | '?' | '\\' => {
                bump!();
                let want = if c == '\\' { '+' } else { '-' };
                if chars.peek() != Some(&want) {
                    return Err(error_at(pos, format!("expected `{c}{want}`")));
                }
                bump!();
                tokens.push((
                    match c {
                        ':' => Token::Neck,
                        '?' => Token::QueryMark,
                        _ => Token::Negation,
                    },
                    pos,
                ));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let token = if c.is_ascii_lowercase() {
                    Token::Lower(ident)
                } else {
                    Token::Upper(ident)
                };
                tokens.push((token, pos));
            }
            other => return Err(error_at(pos, format!("unexpected character `{other}`"))),
        }
    }
    Ok((tokens, Pos { line, column }))
}

struct Parser {
    tokens: Vec<(Token, Pos)>,
    index: usize,
    end: Pos,
}

impl Parser {
    fn new(text: &str) -> Result<Self, SyntaxError> {
        let (tokens, end) = tokenize(text)?;
        Ok(Self { tokens, index: 0, end })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.index).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.tokens.get(self.index).map_or(self.end, |(_, p)| *p)
    }

    fn at_end(&self) -> bool {
        self.index >= self.tokens.len()
    }

    fn eat(&mut self, want: &Token) -> bool {
        if self.peek() == Some(want) {
            self.index += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: &Token) -> Result<(), SyntaxError> {
        if self.eat(want) {
            Ok(())
        } else {
            Err(self.unexpected(&want.to_string()))
        }
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        let found = match self.peek() {
            Some(t) => t.to_string(),
            None => "end of input".to_string(),
        };
        error_at(self.pos(), format!("expected {wanted}, found {found}"))
    }

    fn atom(&mut self) -> Result<Atom, SyntaxError> {
        let predicate = match self.peek() {
            Some(Token::Lower(name)) => name.clone(),
            _ => return Err(self.unexpected("a predicate name")),
        };
        self.index += 1;
        let mut args = Vec::new();
        if self.eat(&Token::LParen) {
            loop {
                let term = match self.peek() {
                    Some(Token::Lower(n)) => Term::Constant(n.clone()),
                    Some(Token::Upper(n)) => Term::Variable(n.clone()),
                    _ => return Err(self.unexpected("a constant or variable")),
                };
                self.index += 1;
                args.push(term);
                if !self.eat(&Token::Comma) {
                    break;
                }
            }
            self.expect(&Token::RParen)?;
        }
        Ok(Atom { predicate, args })
    }

    fn literal(&mut self) -> Result<Literal, SyntaxError> {
        let negated = self.eat(&Token::Negation);
        Ok(Literal {
            atom: self.atom()?,
            negated,
        })
    }

    fn clause(&mut self) -> Result<Rule, SyntaxError> {
        if self.peek() == Some(&Token::Negation) {
            return Err(error_at(self.pos(), "rule heads cannot be negated"));
        }
        let head = self.atom()?;
        let mut body = Vec::new();
        if self.eat(&Token::Neck) {
            loop {
                body.push(self.literal()?);
                if !self.eat(&Token::Comma) {
                    break;
                }
            }
        }
        self.expect(&Token::Dot)?;
        Ok(Rule { head, body })
    }
}

pub fn parse_program(text: &str) -> Result<Program, SyntaxError> {
    let mut parser = Parser::new(text)?;
    let mut program = Program::new();
    while !parser.at_end() {
        let pos = parser.pos();
        let rule = parser.clause()?;
        program.push(rule).map_err(|e| match e {
            SyntaxError::ArityConflict {
                predicate,
                expected,
                found,
                ..
            } => SyntaxError::ArityConflict {
                predicate,
                expected,
                found,
                line: pos.line,
                column: pos.column,
            },
            other => other,
        })?;
    }
    Ok(program)
}

/// Parses a single query atom, optionally written as `?- atom.`.
pub fn parse_query(text: &str) -> Result<Atom, SyntaxError> {
    let mut parser = Parser::new(text)?;
    parser.eat(&Token::QueryMark);
    let atom = parser.atom()?;
    parser.eat(&Token::Dot);
    if !parser.at_end() {
        return Err(parser.unexpected("end of query"));
    }
    Ok(atom)
}

/// True for names usable as constants and predicates.
pub fn is_constant_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// True for names usable as variables.
pub fn is_variable_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
