//! The `synth-audit` command line.
//!
//! Exit codes: 0 success, 1 unexpected failure (such as an unwritable
//! output), 2 invalid input or arguments, 3 one or more attack instances
//! failed (the report is still written).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::audit::{compare_reports, render_comparison, render_markdown, run_suite, AttackSelection, AuditConfig, AuditReport};
use crate::data::{DataTable, TableSchema};
use crate::evaluation::{EpsilonConfig, EpsilonMode, EvalConfig};
use crate::harness::make_case;
use crate::ingest::{read_schema, read_table, split_real, write_table, SplitSpec};
use crate::preprocess::FitSource;
use crate::quadruple::validate_quadruple;
use crate::seed::RandomSeed;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ATTACK_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "synth-audit", version, about = "Membership-inference privacy audits for tabular synthetic data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the attack suite and write a JSON report.
    Audit(AuditArgs),
    /// Split a real table into train, holdout and reference CSVs.
    Split(SplitArgs),
    /// Render a JSON report, optionally against a second one.
    Report(ReportArgs),
    /// Write the CSVs of a toy fixture.
    Fixtures(FixtureArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EpsilonModeArg {
    Point,
    Cp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FitSourceArg {
    Synthetic,
    Reference,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub holdout: PathBuf,
    #[arg(long)]
    pub synthetic: PathBuf,
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// JSON schema; inferred from the training table when absent.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Comma list of families or instances (`dpi:k=25`), or `all`.
    #[arg(long, default_value = "all")]
    pub attacks: String,
    #[arg(long)]
    pub seed: u64,
    /// Maximum members and non-members in the evaluation set.
    #[arg(long, default_value_t = crate::audit::DEFAULT_EVAL_CAP)]
    pub cap: usize,
    #[arg(long, value_delimiter = ',', default_values_t = crate::evaluation::DEFAULT_FPR_TARGETS)]
    pub fpr_targets: Vec<f64>,
    #[arg(long, value_enum, default_value_t = EpsilonModeArg::Point)]
    pub epsilon_mode: EpsilonModeArg,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Confidence level for Clopper–Pearson bounds.
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long, value_enum, default_value_t = FitSourceArg::Synthetic)]
    pub fit_source: FitSourceArg,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a Markdown rendering here.
    #[arg(long)]
    pub md: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long)]
    pub verbose: bool,
    /// Add the DCR-Prop similarity block (needs --reference).
    #[arg(long)]
    pub dcr_prop: bool,
    /// Record per-instance wall-clock time in the report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    #[arg(long)]
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub compare: Option<PathBuf>,
    /// Print JSON instead of Markdown.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    /// `leaky`, `noisy-<sigma>`, `private`, `gaussian` or `marginal`.
    #[arg(long)]
    pub fixture: String,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub d: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Maps an error to its documented exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::File { source, .. } => match source.as_ref() {
            Error::Io(e) if e.kind() == std::io::ErrorKind::NotFound => EXIT_INVALID,
            inner => exit_code(inner),
        },
        Error::AllAttacksFailed => EXIT_ATTACK_FAILED,
        Error::Io(_) => EXIT_FAILURE,
        _ => EXIT_INVALID,
    }
}

/// Parses `std::env::args` and runs the chosen subcommand.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Audit(a) => cmd_audit(&a),
        Command::Split(a) => cmd_split(&a).map(|()| EXIT_OK),
        Command::Report(a) => cmd_report(&a).map(|()| EXIT_OK),
        Command::Fixtures(a) => cmd_fixtures(&a).map(|()| EXIT_OK),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    })
}

fn load_schema(path: Option<&Path>) -> crate::Result<Option<TableSchema>> {
    path.map(read_schema).transpose()
}

/// Reads the training table first; the others follow its schema (without
/// vocabularies, so unseen categories are allowed).
fn read_inputs(args: &AuditArgs) -> crate::Result<(DataTable, DataTable, DataTable, Option<DataTable>)> {
    let schema = load_schema(args.schema.as_deref())?;
    let train = read_table(&args.train, schema.as_ref())?;
    let follow = schema.unwrap_or_else(|| train.schema().without_categories());
    let holdout = read_table(&args.holdout, Some(&follow))?;
    let synthetic = read_table(&args.synthetic, Some(&follow))?;
    let reference = args
        .reference
        .as_ref()
        .map(|p| read_table(p, Some(&follow)))
        .transpose()?;
    Ok((train, holdout, synthetic, reference))
}

pub fn audit_config(args: &AuditArgs) -> crate::Result<AuditConfig> {
    Ok(AuditConfig {
        attacks: AttackSelection::parse(&args.attacks)?,
        eval_cap: args.cap,
        seed: RandomSeed(args.seed),
        evaluation: EvalConfig {
            fpr_targets: args.fpr_targets.clone(),
            epsilon: EpsilonConfig {
                mode: match args.epsilon_mode {
                    EpsilonModeArg::Point => EpsilonMode::Point,
                    EpsilonModeArg::Cp => EpsilonMode::ClopperPearson,
                },
                delta: args.delta,
                confidence: args.confidence,
            },
        },
        fit_source: match args.fit_source {
            FitSourceArg::Synthetic => FitSource::Synthetic,
            FitSourceArg::Reference => FitSource::Reference,
        },
        dcr_prop: args.dcr_prop,
        jobs: args.jobs,
        record_timings: args.timings,
    })
}

pub fn cmd_audit(args: &AuditArgs) -> crate::Result<i32> {
    let config = audit_config(args)?;
    config.evaluation.validate()?;
    let (train, holdout, synthetic, reference) = read_inputs(args)?;
    let quad = validate_quadruple(train, holdout, synthetic, reference)?;
    if args.verbose {
        println!(
            "auditing {} train / {} holdout / {} synthetic rows",
            quad.train.n_rows(),
            quad.holdout.n_rows(),
            quad.synthetic.n_rows()
        );
    }
    let report = run_suite(&quad, &config)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    report.save(&args.out)?;
    if let Some(md) = &args.md {
        std::fs::write(md, render_markdown(&report)).map_err(|e| Error::from(e).in_file(md))?;
    }
    if args.verbose {
        for (metric, entry) in &report.max_mia {
            println!("max {metric} = {:.4} ({})", entry.value, entry.argmax);
        }
        println!("wrote {}", args.out.display());
    }
    Ok(if report.n_failed() > 0 { EXIT_ATTACK_FAILED } else { EXIT_OK })
}

fn create_dir(dir: &Path) -> crate::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::from(e).in_file(dir))
}

pub fn cmd_split(args: &SplitArgs) -> crate::Result<()> {
    let schema = load_schema(args.schema.as_deref())?;
    let data = read_table(&args.input, schema.as_ref())?;
    let spec = SplitSpec::new(args.test_fraction, RandomSeed(args.seed))?;
    let split = split_real(&data, &spec)?;
    create_dir(&args.out_dir)?;
    for (name, table) in [
        ("train", &split.train),
        ("holdout", &split.holdout),
        ("reference", &split.reference),
    ] {
        write_table(args.out_dir.join(format!("{name}.csv")), table)?;
        println!("{name} {}", table.n_rows());
    }
    Ok(())
}

pub fn cmd_report(args: &ReportArgs) -> crate::Result<()> {
    let report = AuditReport::load(&args.input)?;
    match &args.compare {
        Some(other) => {
            let other = AuditReport::load(other)?;
            let cmp = compare_reports(&report, &other);
            if args.json {
                println!("{}", serde_json::to_string_pretty(&cmp)?);
            } else {
                print!("{}", render_comparison(&cmp));
            }
        }
        None if args.json => print!("{}", report.to_json()?),
        None => print!("{}", render_markdown(&report)),
    }
    Ok(())
}

pub fn cmd_fixtures(args: &FixtureArgs) -> crate::Result<()> {
    let case = make_case(&args.fixture, args.n, args.d, args.seed)?;
    create_dir(&args.out_dir)?;
    for (name, table) in [
        ("train", &case.train),
        ("holdout", &case.holdout),
        ("reference", &case.reference),
        ("synthetic", &case.synthetic),
    ] {
        write_table(args.out_dir.join(format!("{name}.csv")), table)?;
    }
    Ok(())
}
