//! `heyde` command line: checks, decompositions, fixtures, sweeps and lemma
//! verification over JSON instance files.
//!
//! Exit codes: 0 when everything is consistent, 1 when a report contains a
//! finding (a theorem-contradicting result or a disagreement between two
//! routes), 2 for invalid input.

mod input;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heyde_core::{
    all_automorphisms, classify_corollary, construct_instance, decompose,
    difference_lemma_log_check, instance_rng, lemma_fixture, random_construction_spec, run_sweep,
    verify_difference_lemma, verify_newle1, AutomorphismFilter, ConstructionFile, HeydeInstance,
    InstanceFile, SweepConfig, SweepMode, SweepReport,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FINDING: u8 = 1;
pub const EXIT_INVALID: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "heyde",
    version,
    about = "Exact Heyde-type characterization checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Args)]
pub struct Options {
    /// JSON input file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Largest (random) or exact (exhaustive) pmf denominator.
    #[arg(long, global = true)]
    pub denominator: Option<u64>,
    /// Maximum number of sweep instances.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Tolerance for floating-point cross-checks only.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Inline group spec JSON, or a list of them.
    #[arg(long, global = true)]
    pub spec: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conditional symmetry and the functional equation on one instance.
    Check,
    /// Structure decomposition of a symmetric instance.
    Decompose,
    /// Build a symmetric instance file.
    Construct,
    /// Run a sweep and emit a report.
    Sweep {
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run both lemma verifiers on the fixture derived from an instance.
    VerifyLemmas,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Random,
    Constructed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Error object printed on failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn invalid(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            kind: kind.into(),
            message: message.into(),
        }
    }

    fn to_json(&self) -> Value {
        json!({ "error": self.kind, "message": self.message })
    }
}

impl From<heyde_core::Error> for Failure {
    fn from(e: heyde_core::Error) -> Self {
        Failure {
            code: if e.is_finding() {
                EXIT_FINDING
            } else {
                EXIT_INVALID
            },
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

/// What a command prints and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
}

enum Body {
    Json(Value),
    Text(String),
}

type CommandResult = Result<(Body, u8), Failure>;

/// Recursively sorted keys, so output bytes depend only on content.
fn canonical(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut entries: Vec<_> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(
                entries
                    .into_iter()
                    .map(|(k, v)| (k, canonical(v)))
                    .collect::<Map<_, _>>(),
            )
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonical).collect()),
        other => other,
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn render(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonical(v)).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn run(cli: &Cli) -> Outcome {
    let result = if cli.opts.tolerance.is_finite() && cli.opts.tolerance >= 0.0 {
        dispatch(cli)
    } else {
        Err(Failure::invalid(
            "invalid_argument",
            "--tolerance must be a nonnegative number",
        ))
    };
    let (text, code) = match result {
        Ok((Body::Json(v), code)) => (render(v), code),
        Ok((Body::Text(t), code)) => (t, code),
        Err(f) => {
            return Outcome {
                code: f.code,
                stdout: render(f.to_json()),
            }
        }
    };
    match &cli.opts.output {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
            },
            Err(e) => {
                let f = Failure::invalid("io", format!("{}: {e}", path.display()));
                Outcome {
                    code: f.code,
                    stdout: render(f.to_json()),
                }
            }
        },
        None => Outcome { code, stdout: text },
    }
}

fn dispatch(cli: &Cli) -> CommandResult {
    match &cli.command {
        Command::Check => check(&cli.opts),
        Command::Decompose => decompose_cmd(&cli.opts),
        Command::Construct => construct(&cli.opts),
        Command::Sweep { mode, format } => sweep(&cli.opts, *mode, *format),
        Command::VerifyLemmas => verify_lemmas(&cli.opts),
    }
}

fn load_instance(opts: &Options) -> Result<HeydeInstance, Failure> {
    let path = opts
        .input
        .as_ref()
        .ok_or_else(|| Failure::invalid("missing_argument", "--input is required"))?;
    let file: InstanceFile = input::read(path)?;
    if let Some(text) = &opts.spec {
        let specs = input::specs(text)?;
        if specs.len() != 1 || specs[0] != file.spec {
            return Err(Failure::invalid(
                "spec_mismatch",
                "--spec does not match the instance spec",
            ));
        }
    }
    Ok(HeydeInstance::from_file(&file)?)
}

fn check(opts: &Options) -> CommandResult {
    let inst = load_instance(opts)?;
    let symmetric = inst.is_conditionally_symmetric();
    let heyde = inst.satisfies_heyde_equation();
    let agree = symmetric == heyde;
    let body = json!({ "symmetric": symmetric, "heyde_equation": heyde, "agree": agree });
    Ok((Body::Json(body), if agree { EXIT_OK } else { EXIT_FINDING }))
}

fn decompose_cmd(opts: &Options) -> CommandResult {
    let inst = load_instance(opts)?;
    let dec = decompose(&inst)?;
    let corollaries = classify_corollary(&inst, &dec);
    let code = if dec.flags.all() && corollaries.all_hold() {
        EXIT_OK
    } else {
        EXIT_FINDING
    };
    let mut body = to_json(&dec);
    body["corollaries"] = to_json(&corollaries);
    Ok((Body::Json(body), code))
}

fn construct(opts: &Options) -> CommandResult {
    let cs = match (&opts.input, &opts.spec) {
        (Some(path), _) => input::read::<ConstructionFile>(path)?.to_spec()?,
        (None, Some(text)) => {
            let specs = input::specs(text)?;
            let [spec] = specs.as_slice() else {
                return Err(Failure::invalid(
                    "invalid_argument",
                    "construct takes a single --spec",
                ));
            };
            let mut rng = instance_rng(opts.seed.unwrap_or(0), 0);
            let denominator = opts.denominator.unwrap_or(8);
            if denominator == 0 {
                return Err(Failure::invalid(
                    "invalid_argument",
                    "--denominator must be at least 1",
                ));
            }
            random_construction_spec(spec, &all_automorphisms(spec), denominator, &mut rng)
                .ok_or_else(|| {
                    Failure::invalid("construction_hypothesis", "no admissible automorphism")
                })?
        }
        (None, None) => {
            return Err(Failure::invalid(
                "missing_argument",
                "construct needs --input or --spec",
            ));
        }
    };
    let c = construct_instance(&cs)?;
    Ok((Body::Json(to_json(&c.instance.to_file())), EXIT_OK))
}

fn sweep_config(opts: &Options, mode: Option<Mode>) -> Result<SweepConfig, Failure> {
    let mut cfg = match &opts.input {
        Some(path) => input::read::<SweepConfig>(path)?,
        None => SweepConfig {
            specs: Vec::new(),
            mode: SweepMode::Exhaustive,
            denominator: 2,
            automorphisms: AutomorphismFilter::All,
            seed: 0,
            budget: None,
        },
    };
    if let Some(text) = &opts.spec {
        cfg.specs = input::specs(text)?;
    }
    if cfg.specs.is_empty() && opts.input.is_none() {
        return Err(Failure::invalid(
            "missing_argument",
            "sweep needs --input or --spec",
        ));
    }
    if let Some(m) = mode {
        cfg.mode = match m {
            Mode::Exhaustive => SweepMode::Exhaustive,
            Mode::Random => SweepMode::Random,
            Mode::Constructed => SweepMode::Constructed,
        };
    }
    cfg.seed = opts.seed.unwrap_or(cfg.seed);
    cfg.denominator = opts.denominator.unwrap_or(cfg.denominator);
    cfg.budget = opts.budget.or(cfg.budget);
    Ok(cfg)
}

fn csv_report(r: &SweepReport) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::invalid("io", e.to_string());
    w.write_record(["category", "verified", "violated", "skipped"])
        .map_err(fail)?;
    for (name, c) in [
        ("equivalence", r.equivalence),
        ("decomposition", r.decomposition),
        ("corollaries", r.corollaries),
        ("construction", r.construction),
    ] {
        w.write_record([
            name.to_string(),
            c.verified.to_string(),
            c.violated.to_string(),
            c.skipped.to_string(),
        ])
        .map_err(fail)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::invalid("io", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of ASCII fields"))
}

fn sweep(opts: &Options, mode: Option<Mode>, format: Format) -> CommandResult {
    let cfg = sweep_config(opts, mode)?;
    let report = run_sweep(&cfg)?;
    let code = if report.violations() == 0 {
        EXIT_OK
    } else {
        EXIT_FINDING
    };
    let body = match format {
        Format::Json => Body::Json(to_json(&report)),
        Format::Csv => Body::Text(csv_report(&report)?),
    };
    Ok((body, code))
}

fn verify_lemmas(opts: &Options) -> CommandResult {
    let inst = load_instance(opts)?;
    let (f, g, beta) = lemma_fixture(&inst);
    let difference = verify_difference_lemma(&f, &g, &beta)?;
    let log_check = if difference.hypothesis {
        Some(difference_lemma_log_check(&f, &g, &beta, opts.tolerance)?)
    } else {
        None
    };
    let newle1 = verify_newle1(&f, &g, &beta, opts.tolerance)?;
    let finding = (difference.hypothesis && !difference.holds())
        || log_check.is_some_and(|ok| ok != difference.holds())
        || (newle1.hypothesis && !newle1.holds());
    let body = json!({
        "difference_lemma": to_json(&difference),
        "log_cross_check": log_check,
        "newle1": to_json(&newle1),
    });
    Ok((
        Body::Json(body),
        if finding { EXIT_FINDING } else { EXIT_OK },
    ))
}
