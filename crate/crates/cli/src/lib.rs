//! `htab`: prove formulas and sequents, check formulas against model files,
//! and run the differential fuzz harness.
//!
//! Exit codes: `prove` gives 0 proved, 1 refuted, 2 unknown; `check-model`
//! gives 0 satisfied, 1 not satisfied; `fuzz` gives 0 clean, 1 failures.
//! Usage, parse and file errors give 3; an engine inconsistency gives 4.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hybrid_tableau::differential::{run_fuzz, FuzzConfig};
use hybrid_tableau::engine::{prove_with, sequent_formula, Budget, Mode, Options, TraceRecord, Verdict};
use hybrid_tableau::semantics::{
    eval_strict, model_to_json, parse_model, render_model_text, Bounds, Kripke, Model, WorldPair,
};
use hybrid_tableau::syntax::{parse, Formula, Vocabulary};
use serde_json::json;

pub const EXIT_USAGE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "htab", version, about = "Tableau prover for two-dimensional hybrid product logics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Prove a formula, or a sequent written `G1, G2 |- D1, D2`.
    Prove(ProveArgs),
    /// Evaluate a formula at a world pair of a model file.
    CheckModel(CheckArgs),
    /// Compare the prover against exhaustive small-model search.
    Fuzz(FuzzArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Hpl,
    Hdpl,
    HdplDec,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Hpl => Mode::Hpl,
            ModeArg::Hdpl => Mode::Hdpl,
            ModeArg::HdplDec => Mode::HdplDec,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Result,
    Trace,
    Model,
    All,
}

#[derive(Args, Debug)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value = "hpl")]
    pub mode: ModeArg,
    /// Rule-application limit.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    /// Fresh-nominal limit per dimension.
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_nominals: u64,
    /// Enable the fused box, disjunction and implication rules.
    #[arg(long)]
    pub derived_rules: bool,
}

impl EngineArgs {
    fn options(&self) -> Options {
        Options {
            mode: self.mode.into(),
            budget: Budget::new(self.budget as usize, self.max_nominals as usize),
            derived_rules: self.derived_rules,
        }
    }
}

#[derive(Args, Debug)]
pub struct ProveArgs {
    /// Formula or sequent; read from --file when absent.
    pub formula: Option<String>,
    #[arg(long, conflicts_with = "formula")]
    pub file: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long, value_enum, default_value = "result")]
    pub emit: Emit,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Model in the text or JSON exchange format.
    pub model: PathBuf,
    pub formula: String,
    /// World pair `x,y` by name; defaults to the file's designated pair.
    #[arg(long)]
    pub at: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct FuzzArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Largest generated formula, in nodes.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_size: u64,
    /// Largest oracle model `w1,w2`.
    #[arg(long, default_value = "2,2", value_parser = parse_bounds)]
    pub oracle_bounds: Bounds,
    /// Atom counts `props,noms1,noms2`.
    #[arg(long, default_value = "2,2,2", value_parser = parse_vocab)]
    pub vocab: Vocabulary,
    /// Also audit every final tableau.
    #[arg(long)]
    pub audit: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

fn numbers(s: &str, n: usize) -> Result<Vec<usize>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got `{s}`"));
    }
    parts.iter().map(|p| p.parse::<usize>().map_err(|e| format!("`{p}`: {e}"))).collect()
}

fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let v = numbers(s, 2)?;
    if v.contains(&0) {
        return Err("bounds must be positive".into());
    }
    Ok(Bounds::new(v[0], v[1]))
}

fn parse_vocab(s: &str) -> Result<Vocabulary, String> {
    let v = numbers(s, 3)?;
    if v.iter().all(|&k| k == 0) {
        return Err("vocabulary needs at least one atom".into());
    }
    Ok(Vocabulary::new(v[0] as u32, v[1] as u32, v[2] as u32))
}

/// Parses `text` as a formula, or as a sequent when it contains `|-`.
pub fn parse_input(text: &str) -> Result<Formula, String> {
    let side = |s: &str| -> Result<Vec<Formula>, String> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| parse(p).map_err(|e| format!("`{p}`: {e}")))
            .collect()
    };
    match text.split_once("|-") {
        Some((g, d)) => Ok(sequent_formula(&side(g)?, &side(d)?)),
        None => parse(text.trim()).map_err(|e| e.to_string()),
    }
}

/// Runs the CLI on `args` (program name first). Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match cli.command {
        Command::Prove(a) => cmd_prove(&a, out, err),
        Command::CheckModel(a) => cmd_check_model(&a, out, err),
        Command::Fuzz(a) => cmd_fuzz(&a, out),
    }
}

fn trace_line(r: &TraceRecord) -> String {
    let premises = r.premises.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
    let mut line = format!("{:>4} [{}] {}({premises}): {}", r.step, r.branch, r.rule, r.added.join("; "));
    if r.accessibility {
        line.push_str(" *");
    }
    if let Some(n) = &r.fresh {
        line.push_str(&format!(" fresh {n}"));
    }
    line
}

pub fn cmd_prove(a: &ProveArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match (&a.formula, &a.file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", path.display());
                return EXIT_USAGE;
            }
        },
        (None, None) => {
            let _ = writeln!(err, "error: give a formula or --file");
            return EXIT_USAGE;
        }
    };
    let phi = match parse_input(&text) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let opts = a.engine.options();
    let attempt = match prove_with(&phi, &opts) {
        Ok(at) => at,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INTERNAL;
        }
    };
    let t = &attempt.tableau;
    let code = match attempt.verdict {
        Verdict::Proved { .. } => 0,
        Verdict::Refuted { .. } => 1,
        Verdict::Unknown(_) => 2,
    };
    let want_trace = matches!(a.emit, Emit::Trace | Emit::All);
    let want_model = matches!(a.emit, Emit::Model | Emit::All);
    let want_result = matches!(a.emit, Emit::Result | Emit::All);
    let refutation = match &attempt.verdict {
        Verdict::Refuted { model, branch } => Some((model, *branch)),
        _ => None,
    };
    let [n1, n2] = t.nominals_allocated();

    match a.format {
        Format::Json => {
            let mut doc = json!({
                "formula": phi.to_string(),
                "mode": opts.mode,
                "verdict": attempt.verdict.name(),
                "rule_applications": t.rule_applications(),
                "nominals_allocated": [n1, n2],
            });
            if let Verdict::Unknown(report) = &attempt.verdict {
                doc["open_branches"] = json!(report.open_branches);
            }
            if let Some((m, branch)) = refutation {
                doc["branch"] = json!(branch);
                if want_model || want_result {
                    doc["model"] = json!(model_to_json(&m.model, Some(m.designated)));
                }
            }
            if want_trace {
                doc["trace"] = json!(t.trace());
            }
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("JSON output"));
        }
        Format::Text => {
            if want_result {
                let _ = writeln!(out, "verdict: {}", attempt.verdict.name());
                let _ = writeln!(out, "mode: {}", opts.mode);
                let _ = writeln!(out, "formula: {phi}");
                let _ = writeln!(out, "rule applications: {}", t.rule_applications());
                let _ = writeln!(out, "nominals allocated: {n1} + {n2}");
                if let Verdict::Unknown(report) = &attempt.verdict {
                    let ids: Vec<String> = report.open_branches.iter().map(|b| b.to_string()).collect();
                    let _ = writeln!(out, "open branches: {}", ids.join(" "));
                }
                if let Some((_, branch)) = refutation {
                    let _ = writeln!(out, "branch: {branch}");
                }
            }
            if want_trace {
                for r in t.trace() {
                    let _ = writeln!(out, "{}", trace_line(r));
                }
            }
            if let Some((m, _)) = refutation {
                if want_model || want_result {
                    let _ = write!(out, "{}", render_model_text(&m.model, Some(m.designated)));
                }
            }
        }
    }
    code
}

fn world_pair(m: &Model, at: &str) -> Result<WorldPair, String> {
    let (x, y) = at.split_once(',').ok_or_else(|| format!("--at expects `x,y`, got `{at}`"))?;
    let (x, y) = (x.trim(), y.trim());
    let xi = m.world1_index(x).ok_or_else(|| format!("no first-dimension world `{x}`"))?;
    let yi = m.world2_index(y).ok_or_else(|| format!("no second-dimension world `{y}`"))?;
    Ok(WorldPair::new(xi, yi))
}

pub fn cmd_check_model(a: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let fail = |err: &mut dyn Write, msg: String| {
        let _ = writeln!(err, "error: {msg}");
        EXIT_USAGE
    };
    let text = match std::fs::read_to_string(&a.model) {
        Ok(t) => t,
        Err(e) => return fail(err, format!("{}: {e}", a.model.display())),
    };
    let file = match parse_model(&text) {
        Ok(f) => f,
        Err(e) => return fail(err, format!("{}: {e}", a.model.display())),
    };
    let phi = match parse(&a.formula) {
        Ok(f) => f,
        Err(e) => return fail(err, e.to_string()),
    };
    let w = match (&a.at, file.designated) {
        (Some(at), _) => match world_pair(&file.model, at) {
            Ok(w) => w,
            Err(e) => return fail(err, e),
        },
        (None, Some(w)) => w,
        (None, None) => return fail(err, "no --at given and the model has no designated pair".into()),
    };
    let holds = match eval_strict(&file.model, w, &phi.desugar()) {
        Ok(v) => v,
        Err(e) => return fail(err, e.to_string()),
    };
    let (x, y) = (&file.model.worlds1()[w.x], &file.model.worlds2()[w.y]);
    match a.format {
        Format::Text => {
            let _ = writeln!(out, "{holds}");
        }
        Format::Json => {
            let doc = json!({ "formula": phi.to_string(), "world": [x, y], "satisfied": holds });
            let _ = writeln!(out, "{doc}");
        }
    }
    if holds {
        0
    } else {
        1
    }
}

pub fn cmd_fuzz(a: &FuzzArgs, out: &mut dyn Write) -> i32 {
    let opts = a.engine.options();
    let cfg = FuzzConfig {
        seed: a.seed,
        count: a.count,
        max_size: a.max_size as usize,
        vocab: a.vocab,
        mode: opts.mode,
        budget: opts.budget,
        bounds: a.oracle_bounds,
        derived_rules: opts.derived_rules,
        audit: a.audit,
    };
    let report = run_fuzz(&cfg);
    match a.format {
        Format::Json => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("JSON output"));
        }
        Format::Text => {
            let _ = writeln!(
                out,
                "mode {} seed {}: {} cases, {} proved, {} refuted, {} unknown ({:.1}%), {} failures",
                report.mode,
                report.seed,
                report.cases,
                report.proved,
                report.refuted,
                report.unknown,
                100.0 * report.unknown_rate(),
                report.failures.len()
            );
            for f in &report.failures {
                let _ = writeln!(out, "case {} {:?}: {}\n  {}", f.case, f.kind, f.formula, f.detail.replace('\n', "\n  "));
            }
        }
    }
    if report.is_clean() {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequents_become_implications() {
        let f = parse_input("@i1 @a1 p1, <1>i1 |- <1><2>p1").unwrap();
        assert_eq!(f, sequent_formula(&[parse("@i1 @a1 p1").unwrap(), parse("<1>i1").unwrap()], &[parse("<1><2>p1").unwrap()]));
        assert_eq!(parse_input(" p1 -> p1 ").unwrap(), parse("p1 -> p1").unwrap());
        assert!(parse_input("p1 |- (").is_err());
    }

    #[test]
    fn numeric_arguments() {
        assert_eq!(parse_bounds("2, 3").unwrap(), Bounds::new(2, 3));
        assert!(parse_bounds("0,2").is_err());
        assert!(parse_bounds("2").is_err());
        assert_eq!(parse_vocab("1,0,2").unwrap(), Vocabulary::new(1, 0, 2));
        assert!(parse_vocab("0,0,0").is_err());
    }
}
