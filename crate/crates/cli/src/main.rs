//! `chainlab`: runs lattice scenarios from JSON configs or figure presets and
//! writes CSV artifacts plus a manifest.
//!
//! Exit codes: 0 success, 2 invalid config, 3 solver failure, 4 I/O failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod presets;
mod scenarios;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

/// Default parent directory for outputs when neither `--out` nor the
/// config's `output` is given.
pub const OUT_DIR_ENV: &str = "CHAINLAB_OUT_DIR";

#[derive(Debug)]
pub enum CliError {
    Schema { field: String, message: String },
    Solver(String),
    Io(String),
}

impl CliError {
    pub fn schema(field: &str, message: impl Into<String>) -> Self {
        CliError::Schema {
            field: field.to_owned(),
            message: message.into(),
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Schema { .. } => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema { field, message } => {
                write!(f, "invalid config at `{field}`: {message}")
            }
            CliError::Solver(m) => write!(f, "solver error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "chainlab",
    version,
    about = "Wave propagation in randomly perturbed harmonic lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON config.
    Run {
        config: PathBuf,
        /// Override a scalar field, e.g. `--set lattice.sigma=0.1`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a figure preset (`fig4`) or one of its panels (`fig4a`).
    Preset {
        name: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory; panels go to subdirectories.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the figure presets.
    ListPresets,
}

fn default_parent() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("chainlab-out"))
}

fn run_one(
    name: &str,
    mut doc: Value,
    set: &[String],
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    for s in set {
        config::apply_override(&mut doc, s)?;
    }
    let cfg = config::from_value(doc)?;
    let dir = out
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| default_parent().join(name));
    let files = scenarios::run(&cfg, &dir)?;
    println!("{name}: {} files in {}", files.len(), dir.display());
    Ok(())
}

fn read_config(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::schema("<root>", format!("not valid JSON: {e}")))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, set, out } => {
            let name = config
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "run".into());
            run_one(&name, read_config(&config)?, &set, out)
        }
        Command::Preset { name, set, out } => {
            let panels = presets::lookup(&name).ok_or_else(|| {
                CliError::schema(
                    "preset",
                    format!("unknown preset `{name}`; see `chainlab list-presets`"),
                )
            })?;
            let single = panels.len() == 1;
            for (panel, doc) in panels {
                let dir = out
                    .as_ref()
                    .map(|o| if single { o.clone() } else { o.join(&panel) });
                run_one(&panel, doc, &set, dir)?;
            }
            Ok(())
        }
        Command::ListPresets => {
            for p in presets::all() {
                let panels: Vec<String> = p
                    .panels
                    .iter()
                    .filter(|(s, _)| !s.is_empty())
                    .map(|(s, _)| format!("{}{s}", p.name))
                    .collect();
                let extra = if panels.is_empty() {
                    String::new()
                } else {
                    format!(" [{}]", panels.join(", "))
                };
                println!("{}  {}{extra}", p.name, p.summary);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
