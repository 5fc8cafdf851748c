use std::io::{self, IsTerminal};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use recursive_truth::cli::{self, Format, RunConfig, EXIT_USAGE};
use recursive_truth::Engine;

#[derive(Parser)]
#[command(name = "rtv", version)]
#[command(about = "Answer self-referential queries with true, false or recursive")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Answer a ground query against a logic program (.rtv)
    Run {
        file: PathBuf,
        /// Ground atom to ask, e.g. `elementOf(r, r)`
        #[arg(long)]
        query: String,
        #[arg(long, default_value = "tabled")]
        engine: Engine,
        /// Print the evaluation trace on stderr
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value = "plain")]
        format: Format,
    },
    /// Solve a circular definition system (.def)
    Prop {
        file: PathBuf,
        /// Print only this variable
        #[arg(long)]
        var: Option<String>,
    },
    /// Render a row of a digit matrix (.dgm)
    Diag {
        file: PathBuf,
        #[arg(long)]
        row: String,
        /// Digits to write, counting the leading 0
        #[arg(long)]
        digits: usize,
    },
    /// Check the bundled corpus against its expected verdicts
    Corpus { name: Option<String> },
    /// Interactive session
    Repl {
        #[arg(long, default_value = "tabled")]
        engine: Engine,
        #[arg(long)]
        trace: bool,
    },
}

fn code(status: i32) -> ExitCode {
    ExitCode::from(u8::try_from(status).unwrap_or(1))
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => code(EXIT_USAGE),
            };
        }
    };
    let config = match RunConfig::default().with_env_caps() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return code(EXIT_USAGE);
        }
    };
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let status = match args.command {
        Command::Run {
            file,
            query,
            engine,
            trace,
            format,
        } => {
            let config = RunConfig {
                engine,
                format,
                trace,
                ..config
            };
            cli::cmd_run(&file, &query, &config, &mut out, &mut err)
        }
        Command::Prop { file, var } => cli::cmd_prop(&file, var.as_deref(), &mut out, &mut err),
        Command::Diag { file, row, digits } => cli::cmd_diag(&file, &row, digits, &mut out, &mut err),
        Command::Corpus { name } => cli::cmd_corpus(name.as_deref(), &config, &mut out, &mut err),
        Command::Repl { engine, trace } => {
            let config = RunConfig {
                engine,
                trace,
                ..config
            };
            let prompt = io::stdin().is_terminal();
            match cli::cmd_repl(config, &mut io::stdin().lock(), &mut out, prompt) {
                Ok(status) => status,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_USAGE
                }
            }
        }
    };
    code(status)
}
