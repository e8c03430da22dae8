//! Command-line front end. Every report is an envelope
//! `{"command", "config", "result"}` echoing the effective configuration.

mod commands;
pub mod verify;

use std::io::{IsTerminal, Read, Write};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::error::Error;
use crate::ordinals::FUNDAMENTAL_RULE;

pub const FORMAT_ENV: &str = "TOWERLEN_FORMAT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_UNKNOWN: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "towerlen", version, about = "Exact derived towers, tree ranks and Ext invariants")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Opts,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Exit with status 4 when any verdict is unknown or any bound is not exact.
    #[arg(long, global = true)]
    pub require_exact: bool,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true, default_value_t = 24)]
    pub horizon: usize,
    #[arg(long, global = true, default_value_t = 20)]
    pub height_bits: u32,
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    #[arg(long, global = true, default_value = "w")]
    pub max_alpha: String,
    #[arg(long, global = true, default_value_t = 3)]
    pub breadth: usize,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Exact integer linear algebra.
    #[command(subcommand)]
    Lin(LinCmd),
    /// Ordinals in Cantor normal form.
    #[command(subcommand)]
    Ord(OrdCmd),
    /// Tree ranks, index trees and rank games.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Towers of lattices and their derived towers.
    #[command(subcommand)]
    Tower(TowerCmd),
    /// Colimit-presented flat modules.
    #[command(subcommand)]
    Mod(ModCmd),
    /// Run a seeded verification suite.
    Verify { suite: String },
}

#[derive(Subcommand, Debug)]
pub enum LinCmd {
    /// Row Hermite normal form with its unimodular transform.
    Hnf { input: String },
    /// Smith normal form with both transforms.
    Snf { input: String },
    /// Intersection of two lattices.
    Meet { input: String },
    /// Sum of two lattices.
    Join { input: String },
    /// Pure hull of a lattice.
    Saturate { input: String },
    /// Stable image of an endomorphism.
    EventualImage { input: String },
}

#[derive(Subcommand, Debug)]
pub enum OrdCmd {
    /// The n-th term of the fundamental sequence.
    Fundamental { alpha: String, n: u64 },
    /// Order of two ordinals.
    Compare { left: String, right: String },
}

#[derive(Subcommand, Debug)]
pub enum TreeCmd {
    /// Rank of a finite tree and of each node.
    Rank { input: String },
    /// Materialize an index tree to `--breadth` and `--depth`.
    Index {
        alpha: String,
        /// Use the forest `I_alpha` instead of the plain tree.
        #[arg(long)]
        forest: bool,
    },
    /// Order label of a node, address given as comma-separated indices.
    Linearize {
        alpha: String,
        #[arg(default_value = "")]
        address: String,
        #[arg(long)]
        forest: bool,
    },
    /// Rank of the escape game on a finite tree.
    Game { input: String },
}

#[derive(Subcommand, Debug)]
pub enum TowerCmd {
    /// Levels of the derived tower at `--alpha`.
    Derive { input: String },
    /// Mittag-Leffler length up to `--max-alpha`.
    Length { input: String },
    /// Mittag-Leffler verdict.
    Ml { input: String },
    /// Glue a spine and ribs into a fishbone tower.
    FishboneBuild { input: String },
    /// Compare the fishbone closed form with the derived tower.
    FishboneVerify { input: String },
    /// Quotient by the eventual intersection.
    Reduce { input: String },
}

#[derive(Subcommand, Debug)]
pub enum ModCmd {
    /// The dual tower of a module.
    Dual { input: String },
    /// Projectivity verdict via the dual tower.
    Projective { input: String },
    /// Projective length with its plain flag.
    Length { input: String },
    /// The module of a p-adic digit stream; seeded digits when no input is given.
    Xi {
        input: Option<String>,
        #[arg(long, default_value_t = 3)]
        prime: u64,
        #[arg(long, default_value_t = 32)]
        stages: usize,
    },
    /// Materialize a wedge sum or gap module.
    Wedge { input: String },
    /// Partial quotient at `--alpha` with its dual bonds.
    SigmaPartial { input: String },
    /// Truncated phantom resolution at `--alpha` with `--breadth` arms.
    Resolution { input: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct Config {
    pub rule: &'static str,
    pub ring: Option<String>,
    pub seed: u64,
    pub depth: usize,
    pub horizon: usize,
    pub height_bits: u32,
    pub alpha: String,
    pub max_alpha: String,
    pub breadth: usize,
    pub require_exact: bool,
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    config: &'a Config,
    result: &'a Value,
}

/// What a command produced: the result and whether its checks passed.
pub struct Outcome {
    pub result: Value,
    pub ok: bool,
}

pub(crate) fn read_input(input: &str) -> crate::Result<String> {
    let t = input.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(input.to_string());
    }
    if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(input).map_err(|e| Error::Parse(format!("{input}: {e}")))
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::Shape(_) | Error::Precondition(_) => EXIT_PRECONDITION,
        Error::Inexact(_) => EXIT_UNKNOWN,
    }
}

/// Any unknown verdict, unknown flag or non-exact length bound.
pub fn has_unknown(v: &Value) -> bool {
    match v {
        Value::String(s) => s == "unknown",
        Value::Array(a) => a.iter().any(has_unknown),
        Value::Object(o) => {
            o.iter().any(|(k, x)| {
                let inexact_length =
                    matches!(k.as_str(), "length" | "r_projective_length") && x.is_object() && x.get("exactly").is_none();
                inexact_length || has_unknown(x)
            })
        }
        _ => false,
    }
}

fn use_json(opts: &Opts) -> bool {
    if opts.json {
        return true;
    }
    match std::env::var(FORMAT_ENV).as_deref() {
        Ok("json") => true,
        Ok("table") => false,
        _ => !std::io::stdout().is_terminal(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(o) if !o.is_empty() => o.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) if a.iter().any(|x| x.is_object()) => {
            a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out))
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn render_table(command: &str, config: &Config, result: &Value) -> String {
    let mut rows = vec![("command".to_string(), command.to_string())];
    flatten("config", &serde_json::to_value(config).expect("config serializes"), &mut rows);
    flatten("", result, &mut rows);
    let w = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in rows {
        s.push_str(&format!("{k:<w$}  {v}\n"));
    }
    s
}

pub fn render_json(command: &str, config: &Config, result: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&Envelope { command, config, result }).expect("reports serialize");
    s.push('\n');
    s
}

/// Parses `args`, runs the command and writes the report; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let (name, config, outcome) = match commands::dispatch(&cli) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let text = if use_json(&cli.opts) {
        render_json(&name, &config, &outcome.result)
    } else {
        render_table(&name, &config, &outcome.result)
    };
    let _ = out.write_all(text.as_bytes());
    if !outcome.ok {
        EXIT_FAILED
    } else if cli.opts.require_exact && has_unknown(&outcome.result) {
        let _ = writeln!(err, "error: the report contains an unknown verdict or an inexact bound");
        EXIT_UNKNOWN
    } else {
        EXIT_OK
    }
}

pub(crate) fn base_config(opts: &Opts, depth: usize, alpha: &str) -> Config {
    Config {
        rule: FUNDAMENTAL_RULE,
        ring: None,
        seed: opts.seed,
        depth,
        horizon: opts.horizon,
        height_bits: opts.height_bits,
        alpha: alpha.to_string(),
        max_alpha: opts.max_alpha.clone(),
        breadth: opts.breadth,
        require_exact: opts.require_exact,
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn unknown_detection() {
        assert!(has_unknown(&json!({"a": [{"verdict": "unknown"}]})));
        assert!(has_unknown(&json!({"length": {"at_least": "1"}})));
        assert!(!has_unknown(&json!({"length": {"exactly": "1"}, "plain": "yes"})));
    }

    #[test]
    fn table_rows() {
        let opts = Cli::try_parse_from(["towerlen", "ord", "compare", "1", "2"]).unwrap().opts;
        let t = render_table("x", &base_config(&opts, 16, "1"), &json!({"r": {"s": [1, 2]}}));
        assert!(t.contains("r.s") && t.contains("[1,2]"));
    }
}
