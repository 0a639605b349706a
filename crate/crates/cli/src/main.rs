//! `metacat`: check `.mcat` files, export their proof graphs, print them back.
//!
//! Exit status: 0 when every theorem is valid, 1 when some theorem is
//! invalid or the engines disagree, 2 on unreadable input, parse or
//! elaboration errors, and theorems that are not well formed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use metacat_core::dot::{theorem_dot, Level};
use metacat_core::oracle::{check_all_direct, differential_run, Summary};
use metacat_core::surface::{dump, load, Elaborated, LoadError};
use metacat_core::{check_all, registered_env, CheckStatus, StatusKind};

#[derive(Parser)]
#[command(
    name = "metacat",
    version,
    about = "Proof checker for string-diagrammatic derivations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every theorem in a file.
    Check {
        file: PathBuf,
        /// Machine-readable report.
        #[arg(long)]
        json: bool,
        /// Also check with the direct evaluator and compare.
        #[arg(long)]
        oracle: bool,
        /// Random differential trials against the direct evaluator.
        #[arg(long, default_value_t = 0)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Export a theorem's graph in Graphviz format.
    Dot {
        file: PathBuf,
        #[arg(long = "thm")]
        thm: String,
        /// Label wires with the values computed while checking.
        #[arg(long)]
        values: bool,
        #[arg(long, default_value = "ir")]
        level: Level,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Print a file in canonical form.
    Dump { file: PathBuf },
}

const OK: u8 = 0;
const INVALID: u8 = 1;
const ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check {
            file,
            json,
            oracle,
            trials,
            seed,
        } => cmd_check(&file, json, oracle, trials, seed),
        Command::Dot {
            file,
            thm,
            values,
            level,
            output,
        } => cmd_dot(&file, &thm, values, level, output.as_deref()),
        Command::Dump { file } => cmd_dump(&file),
    };
    ExitCode::from(code)
}

/// Reads and elaborates `path`, reporting failures on stderr.
fn read(path: &Path) -> Result<Elaborated, u8> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: error: {e}", path.display());
        ERROR
    })?;
    load(&text).map_err(|e| {
        let span = e.span();
        let what = match &e {
            LoadError::Parse(p) => {
                format!("expected {}, found {}", p.expected.join(" or "), p.found)
            }
            LoadError::Elab(el) => el.kind.to_string(),
        };
        eprintln!(
            "{}:{}:{}: error: {what}",
            path.display(),
            span.line,
            span.column
        );
        ERROR
    })
}

fn status_word(status: &CheckStatus) -> &'static str {
    match status.kind() {
        StatusKind::Valid => "valid",
        StatusKind::StaticError => "error",
        _ => "invalid",
    }
}

fn detail(status: &CheckStatus) -> Option<String> {
    let text = status.to_string();
    let (_, rest) = text.split_once(": ")?;
    Some(rest.to_string())
}

fn summary_json(s: &Summary) -> Value {
    json!({
        "trials": s.trials,
        "valid": s.valid,
        "invalid": s.invalid,
        "errors": s.errors,
        "divergences": s.divergences,
        "first_divergence": s.first_divergence.as_ref().map(|d| d.to_string()),
    })
}

fn cmd_check(path: &Path, as_json: bool, oracle: bool, trials: usize, seed: u64) -> u8 {
    let elaborated = match read(path) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let env = &elaborated.env;
    let reports = check_all(env);

    let mut code = OK;
    for (name, report) in &reports {
        match report.status.kind() {
            StatusKind::Valid => {}
            StatusKind::StaticError => {
                let span = elaborated
                    .theorem_spans
                    .get(name)
                    .copied()
                    .unwrap_or_default();
                eprintln!(
                    "{}:{}:{}: error in `{name}`: {}",
                    path.display(),
                    span.line,
                    span.column,
                    detail(&report.status).unwrap_or_default()
                );
                code = ERROR;
            }
            _ => code = code.max(INVALID),
        }
    }

    // Theorems on which the two engines disagree.
    let mut disagreements = Vec::new();
    if oracle {
        for ((name, ir), (_, direct)) in reports.iter().zip(check_all_direct(env)) {
            if ir.status.kind() != direct.status.kind() {
                disagreements.push(format!(
                    "{name}: hypergraph {} but direct {}",
                    ir.status, direct.status
                ));
            }
        }
    }
    let differential =
        (trials > 0).then(|| differential_run(&registered_env(env, &reports), trials, seed));
    if !disagreements.is_empty() || differential.as_ref().is_some_and(|s| s.divergences > 0) {
        code = code.max(INVALID);
    }

    if as_json {
        let theorems: Vec<Value> = reports
            .iter()
            .map(|(name, report)| {
                let mut entry = json!({ "name": &**name, "status": status_word(&report.status) });
                if let Some(d) = detail(&report.status) {
                    entry["detail"] = json!(d);
                }
                entry
            })
            .collect();
        let mut out = json!({ "file": path.display().to_string(), "theorems": theorems });
        if oracle {
            out["oracle"] = json!({ "theorems": reports.len(), "disagreements": disagreements });
        }
        if let Some(s) = &differential {
            out["differential"] = summary_json(s);
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("serializable")
        );
    } else {
        for (name, report) in &reports {
            println!("{name}: {}", report.status);
        }
        if oracle {
            if disagreements.is_empty() {
                println!("oracle: {} theorems, 0 disagreements", reports.len());
            } else {
                println!(
                    "oracle: {} theorems, {} disagreements",
                    reports.len(),
                    disagreements.len()
                );
                for d in &disagreements {
                    println!("  {d}");
                }
            }
        }
        if let Some(s) = &differential {
            println!("differential (seed {seed}): {s}");
            if let Some(d) = &s.first_divergence {
                println!("first divergence: {d}");
            }
        }
    }
    code
}

fn cmd_dot(path: &Path, name: &str, values: bool, level: Level, output: Option<&Path>) -> u8 {
    let elaborated = match read(path) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let env = &elaborated.env;
    let Some(thm) = env.theorem(name) else {
        eprintln!("{}: error: unknown theorem `{name}`", path.display());
        return ERROR;
    };
    let working = registered_env(env, &check_all(env));
    let text = match theorem_dot(thm, &working, level, values) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("{}: error in `{name}`: {e}", path.display());
            return ERROR;
        }
    };
    match output {
        Some(out) => {
            if let Err(e) = fs::write(out, text) {
                eprintln!("{}: error: {e}", out.display());
                return ERROR;
            }
        }
        None => print!("{text}"),
    }
    OK
}

fn cmd_dump(path: &Path) -> u8 {
    match read(path) {
        Ok(e) => {
            print!("{}", dump(&e.env));
            OK
        }
        Err(code) => code,
    }
}
