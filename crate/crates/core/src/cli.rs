//! Command implementations behind the `rtv` binary.
//!
//! Every command writes to caller-supplied streams and returns a process
//! exit code: [`EXIT_OK`] for any verdict (including `recursive`),
//! [`EXIT_USAGE`] for unreadable input or failed checks, [`EXIT_RESOURCE`]
//! when a grounding or table cap is hit.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::{self, CorpusEntry};
use crate::diagonal::parse_matrix;
use crate::engine::{evaluate, Engine, EngineError, QueryOptions};
use crate::prop::parse_definitions;
use crate::syntax::{parse_program, parse_query, Program, SyntaxError};
use crate::truth::TruthValue;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;

/// Environment variable overriding the ground-rule cap.
pub const MAX_GROUND_RULES_ENV: &str = "RTV_MAX_GROUND_RULES";

/// JSON schema for `run --format json` output.
pub const RUN_OUTPUT_SCHEMA: &str = include_str!("../../../schema/run-output.schema.json");

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Plain,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Format::Plain),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected plain or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Plain => "plain",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunConfig {
    pub engine: Engine,
    pub format: Format,
    pub trace: bool,
    pub options: QueryOptions,
}

impl RunConfig {
    /// Applies `RTV_MAX_GROUND_RULES` if it is set.
    pub fn with_env_caps(mut self) -> Result<Self, String> {
        if let Ok(raw) = std::env::var(MAX_GROUND_RULES_ENV) {
            self.options.ground.max_ground_rules = raw
                .trim()
                .parse()
                .map_err(|_| format!("{MAX_GROUND_RULES_ENV} must be a non-negative integer, got `{raw}`"))?;
        }
        Ok(self)
    }

    fn query_options(&self) -> QueryOptions {
        QueryOptions {
            trace: self.trace,
            ..self.options
        }
    }
}

#[derive(Debug, Serialize)]
struct RunOutput {
    query: String,
    value: TruthValue,
    engine: Engine,
    iterations: usize,
}

fn read(path: &Path, err: &mut dyn Write) -> Option<String> {
    match std::fs::read_to_string(path) {
        Ok(text) => Some(text),
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
            None
        }
    }
}

fn parse_error(path: &Path, e: &SyntaxError, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "error: {}:{e}", path.display());
    EXIT_USAGE
}

fn engine_error(e: &EngineError, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "error: {e}");
    if e.is_resource() {
        EXIT_RESOURCE
    } else {
        EXIT_USAGE
    }
}

/// `run <file> --query <atom>`: one verdict on stdout.
pub fn cmd_run(path: &Path, query: &str, config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(text) = read(path, err) else {
        return EXIT_USAGE;
    };
    let program = match parse_program(&text) {
        Ok(p) => p,
        Err(e) => return parse_error(path, &e, err),
    };
    let query = match parse_query(query) {
        Ok(q) => q,
        Err(e) => {
            let _ = writeln!(err, "error: query: {e}");
            return EXIT_USAGE;
        }
    };
    let answer = match evaluate(config.engine, &program, &query, &config.query_options()) {
        Ok(a) => a,
        Err(e) => return engine_error(&e, err),
    };
    if let Some(trace) = &answer.trace {
        let _ = write!(err, "{trace}");
    }
    let written = match config.format {
        Format::Plain => writeln!(out, "{}", answer.value),
        Format::Json => {
            let json = serde_json::to_string(&RunOutput {
                query: query.to_string(),
                value: answer.value,
                engine: config.engine,
                iterations: answer.iterations,
            })
            .expect("plain data serializes");
            writeln!(out, "{json}")
        }
    };
    if written.is_err() {
        return EXIT_USAGE;
    }
    EXIT_OK
}

/// `prop <file> [--var <name>]`: `name = value` per defined variable.
pub fn cmd_prop(path: &Path, var: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(text) = read(path, err) else {
        return EXIT_USAGE;
    };
    let solved = parse_definitions(&text).and_then(|file| Ok((file.solve()?, file)));
    let (solution, file) = match solved {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let names: Vec<&String> = match var {
        Some(v) => match file.system.definitions().get_key_value(v) {
            Some((name, _)) => vec![name],
            None => {
                let _ = writeln!(err, "error: `{v}` is not defined in {}", path.display());
                return EXIT_USAGE;
            }
        },
        None => file.system.definitions().keys().collect(),
    };
    for name in names {
        let value = solution.values.get(name).expect("solution covers every definition");
        if writeln!(out, "{name} = {value}").is_err() {
            return EXIT_USAGE;
        }
    }
    EXIT_OK
}

/// `diag <file> --row <name> --digits <n>`: the rendered numeral.
pub fn cmd_diag(path: &Path, row: &str, digits: usize, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(text) = read(path, err) else {
        return EXIT_USAGE;
    };
    let rendered = parse_matrix(&text).and_then(|m| m.render_stream(m.row_index(row)?, digits));
    match rendered {
        Ok(s) => {
            if writeln!(out, "{s}").is_err() {
                return EXIT_USAGE;
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            EXIT_USAGE
        }
    }
}

/// Checks entries and prints one row per expectation. True iff all pass.
pub fn run_corpus(entries: &[CorpusEntry], options: &QueryOptions, out: &mut dyn Write) -> io::Result<bool> {
    let mut all = true;
    writeln!(
        out,
        "{:<6} {:<12} {:<18} {:<9} {:<10} actual",
        "status", "entry", "case", "engine", "expected"
    )?;
    for entry in entries {
        for o in corpus::check(entry, options) {
            let pass = o.passed();
            all &= pass;
            let actual = match &o.actual {
                Ok(v) => v.clone(),
                Err(e) => format!("error: {e}"),
            };
            writeln!(
                out,
                "{:<6} {:<12} {:<18} {:<9} {:<10} {}",
                if pass { "pass" } else { "FAIL" },
                o.entry,
                o.case,
                o.engine.map_or("-", Engine::as_str),
                o.expected,
                actual
            )?;
        }
    }
    Ok(all)
}

/// `corpus [name]`: runs the bundled corpus, exit 0 iff everything passes.
pub fn cmd_corpus(name: Option<&str>, config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let entries = match name {
        None => corpus::entries(),
        Some(n) => match corpus::find(n) {
            Some(e) => vec![e],
            None => {
                let known: Vec<String> = corpus::entries().into_iter().map(|e| e.name).collect();
                let _ = writeln!(err, "error: no corpus entry `{n}` (known: {})", known.join(", "));
                return EXIT_USAGE;
            }
        },
    };
    match run_corpus(&entries, &config.options, out) {
        Ok(true) => EXIT_OK,
        _ => EXIT_USAGE,
    }
}

/// Interactive session: clauses are added to the session program, `?- q.`
/// lines are answered, `:engine`, `:trace` and `:quit` are directives.
pub struct Repl {
    program: Program,
    config: RunConfig,
    pending: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplStep {
    Continue,
    Quit,
}

impl Repl {
    pub fn new(config: RunConfig) -> Self {
        Self {
            program: Program::new(),
            config,
            pending: String::new(),
        }
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    /// True while a clause spans several lines.
    pub fn is_continuing(&self) -> bool {
        !self.pending.is_empty()
    }

    pub fn handle_line(&mut self, line: &str, out: &mut dyn Write) -> io::Result<ReplStep> {
        let trimmed = line.trim();
        if self.pending.is_empty() {
            if let Some(directive) = trimmed.strip_prefix(':') {
                return self.directive(directive, out);
            }
        }
        self.pending.push_str(line);
        self.pending.push('\n');
        let code = self
            .pending
            .lines()
            .map(|l| l.split('%').next().unwrap_or(""))
            .collect::<Vec<_>>()
            .join(" ");
        let code = code.trim();
        if code.is_empty() {
            self.pending.clear();
            return Ok(ReplStep::Continue);
        }
        if !code.ends_with('.') {
            return Ok(ReplStep::Continue);
        }
        let text = std::mem::take(&mut self.pending);
        if code.starts_with("?-") {
            self.query(&text, out)?;
        } else {
            match parse_program(&text) {
                Ok(parsed) => {
                    let mut extended = self.program.clone();
                    let added = parsed.rules().iter().try_for_each(|r| extended.push(r.clone()));
                    match added {
                        Ok(()) => self.program = extended,
                        Err(e) => writeln!(out, "error: {e}")?,
                    }
                }
                Err(e) => writeln!(out, "error: {e}")?,
            }
        }
        Ok(ReplStep::Continue)
    }

    fn query(&mut self, text: &str, out: &mut dyn Write) -> io::Result<()> {
        let query = match parse_query(text) {
            Ok(q) => q,
            Err(e) => return writeln!(out, "error: {e}"),
        };
        match evaluate(self.config.engine, &self.program, &query, &self.config.query_options()) {
            Ok(answer) => {
                if let Some(trace) = &answer.trace {
                    write!(out, "{trace}")?;
                }
                writeln!(out, "{}", answer.value)
            }
            Err(e) => writeln!(out, "error: {e}"),
        }
    }

    fn directive(&mut self, directive: &str, out: &mut dyn Write) -> io::Result<ReplStep> {
        let mut words = directive.split_whitespace();
        match (words.next(), words.next()) {
            (Some("quit"), None) => return Ok(ReplStep::Quit),
            (Some("engine"), None) => writeln!(out, "engine: {}", self.config.engine)?,
            (Some("engine"), Some(name)) => match name.parse::<Engine>() {
                Ok(engine) => {
                    self.config.engine = engine;
                    writeln!(out, "engine: {engine}")?;
                }
                Err(e) => writeln!(out, "error: {e}")?,
            },
            (Some("trace"), arg) => {
                self.config.trace = match arg {
                    None => !self.config.trace,
                    Some("on") => true,
                    Some("off") => false,
                    Some(other) => {
                        writeln!(out, "error: expected `:trace on` or `:trace off`, got `{other}`")?;
                        return Ok(ReplStep::Continue);
                    }
                };
                writeln!(out, "trace: {}", if self.config.trace { "on" } else { "off" })?;
            }
            _ => writeln!(
                out,
                "error: unknown directive `:{directive}` (try :engine, :trace, :quit)"
            )?,
        }
        Ok(ReplStep::Continue)
    }
}

/// Runs a session over `input` until end of input or `:quit`.
pub fn cmd_repl(config: RunConfig, input: &mut dyn BufRead, out: &mut dyn Write, prompt: bool) -> io::Result<i32> {
    let mut repl = Repl::new(config);
    let mut line = String::new();
    loop {
        if prompt {
            write!(out, "{}", if repl.is_continuing() { "|    " } else { "rtv> " })?;
            out.flush()?;
        }
        line.clear();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        if repl.handle_line(&line, out)? == ReplStep::Quit {
            break;
        }
    }
    Ok(EXIT_OK)
}
