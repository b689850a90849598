//! Command-line front-end. Exit codes: 0 for success, permissible or true;
//! 1 for impermissible, false or a model with validation errors; 2 for any
//! usage, I/O or parse error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use kantian::{
    load_model, parse_query, render_text, validate_model, CheckedModel, Context, Intervention, LoadError,
    MeritOptions, ModelDocument, Reading, VerdictReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kantian", version, about = "Check actions in Kantian causal agency models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Debug, clap::Args)]
struct Situation {
    /// Background value, e.g. --set accident=true. Repeatable.
    #[arg(long = "set", value_name = "VAR=BOOL", value_parser = parse_assignment)]
    set: Vec<(String, bool)>,
}

impl Situation {
    fn background(&self) -> BTreeMap<String, bool> {
        self.set.iter().cloned().collect()
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check one action against the categorical imperative.
    Check {
        model: PathBuf,
        #[arg(long)]
        action: String,
        #[command(flatten)]
        situation: Situation,
        #[arg(long, default_value = "1", value_parser = parse_reading)]
        reading: Reading,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List every action with its verdict.
    Permissible {
        model: PathBuf,
        #[command(flatten)]
        situation: Situation,
        #[arg(long, default_value = "1", value_parser = parse_reading)]
        reading: Reading,
    },
    /// Permissible actions whose goals positively affect the most patients.
    Meritorious {
        model: PathBuf,
        #[command(flatten)]
        situation: Situation,
        #[arg(long, default_value = "1", value_parser = parse_reading)]
        reading: Reading,
        /// Break ties by preferring fewer patients harmed by consequences.
        #[arg(long)]
        tiebreak_negative: bool,
    },
    /// Evaluate a query formula in the situation where ACTION is performed.
    Query {
        model: PathBuf,
        #[arg(long)]
        action: String,
        #[command(flatten)]
        situation: Situation,
        formula: String,
    },
    /// Report structural problems in a model file.
    Validate { model: PathBuf },
}

fn parse_assignment(s: &str) -> Result<(String, bool), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected VAR=true|false, found {s:?}"))?;
    let value = match value.trim() {
        "true" => true,
        "false" => false,
        other => return Err(format!("expected true or false for {name}, found {other:?}")),
    };
    Ok((name.trim().to_string(), value))
}

fn parse_reading(s: &str) -> Result<Reading, String> {
    s.parse()
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn load(path: &PathBuf) -> Result<CheckedModel, Failure> {
    load_model(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Check {
            model,
            action,
            situation,
            reading,
            format,
        } => {
            let model = load(&model)?;
            let w = model.situation(&action, &situation.background())?;
            let ctx = Context::new(&model, &w, &Intervention::none())?;
            let (verdict, report) = VerdictReport::build(&ctx, reading)?;
            match format {
                Format::Text => write!(out, "{}", render_text(&verdict))?,
                Format::Machine => writeln!(out, "{}", report.to_json())?,
            }
            Ok(if verdict.permissible { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Permissible {
            model,
            situation,
            reading,
        } => {
            let model = load(&model)?;
            let background = situation.background();
            let mut actions = model.model().actions.clone();
            actions.sort();
            for action in actions {
                let w = model.situation(&action, &background)?;
                let verdict = kantian::ci_permissible(&model, &w, reading)?;
                write!(out, "{}", render_text(&verdict))?;
            }
            Ok(EXIT_OK)
        }
        Command::Meritorious {
            model,
            situation,
            reading,
            tiebreak_negative,
        } => {
            let model = load(&model)?;
            let options = MeritOptions {
                permitted_only: true,
                tiebreak_negative,
            };
            let best = kantian::meritorious(&model, &situation.background(), reading, options)?;
            for action in &best {
                writeln!(out, "{action}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Query {
            model,
            action,
            situation,
            formula,
        } => {
            let model = load(&model)?;
            let formula = parse_query(&formula).map_err(|e| Failure(format!("query: {e}")))?;
            let w = model.situation(&action, &situation.background())?;
            let holds = kantian::satisfies(&model, &w, &Intervention::none(), &formula)?;
            writeln!(out, "{holds}")?;
            Ok(if holds { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Validate { model: path } => {
            let text = std::fs::read_to_string(&path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            let doc = ModelDocument::from_json(&text).map_err(|e| Failure(format!("{}: {}", path.display(), LoadError::from(e))))?;
            let diags = match doc.to_model() {
                Ok(model) => validate_model(&model),
                Err(diags) => diags,
            };
            for d in &diags {
                writeln!(out, "{d}")?;
            }
            let errors = diags.iter().filter(|d| d.is_error()).count();
            if errors == 0 {
                writeln!(out, "ok: {} warning(s)", diags.len())?;
                Ok(EXIT_OK)
            } else {
                Ok(EXIT_NEGATIVE)
            }
        }
    }
}
