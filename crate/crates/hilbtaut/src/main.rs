use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use hilbtaut::verify::{self, Bounds, Tier};
use hilbtaut::{CliError, JobConfig, Operation, OutputFormat, SurfaceSpec};

/// Cohomology of tautological bundles on Hilbert schemes of points, computed exactly.
#[derive(Parser)]
#[command(name = "hilbtaut", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one closed formula.
    Compute(ComputeArgs),
    /// Run the self-verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ComputeArgs {
    /// JSON job file; flags given alongside override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Surface preset: p2, affine.
    #[arg(long)]
    surface: Option<String>,
    /// Twist of L on p2.
    #[arg(long = "L", allow_negative_numbers = true)]
    l: Option<i64>,
    /// Twist of A on p2.
    #[arg(long = "A", allow_negative_numbers = true)]
    a: Option<i64>,
    /// Weight cutoff of the affine preset.
    #[arg(long)]
    d: Option<u32>,
    /// taut, tensor2, sym2, ext2, extk, tensor2-twisted.
    #[arg(long)]
    op: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_enum)]
    output: Option<OutputFormat>,
}

#[derive(Args)]
struct VerifyArgs {
    /// `all`, or comma-separated suite names or criterion numbers.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    max_n: Option<u32>,
    /// Overridden by HILBTAUT_VERIFY_TIER.
    #[arg(long, value_enum)]
    tier: Option<Tier>,
    #[arg(long, value_enum, default_value = "table")]
    output: OutputFormat,
}

fn surface_from_flags(args: &ComputeArgs, base: Option<SurfaceSpec>) -> Result<SurfaceSpec, CliError> {
    let name = match (&args.surface, &base) {
        (Some(s), _) => s.clone(),
        (None, Some(SurfaceSpec::P2 { .. })) => "p2".into(),
        (None, Some(SurfaceSpec::Affine { .. })) => "affine".into(),
        (None, Some(spec @ SurfaceSpec::Formal { .. })) => {
            if args.l.is_some() || args.a.is_some() || args.d.is_some() {
                return Err(CliError::Usage("--L/--A/--d do not apply to a formal surface".into()));
            }
            return Ok(spec.clone());
        }
        (None, None) => return Err(CliError::Usage("missing --surface (or --config)".into())),
    };
    match name.as_str() {
        "p2" => {
            let (bl, ba) = match base {
                Some(SurfaceSpec::P2 { l, a }) => (Some(l), a),
                _ => (None, 0),
            };
            let l = args.l.or(bl).ok_or_else(|| CliError::Usage("p2 needs --L".into()))?;
            Ok(SurfaceSpec::P2 { l, a: args.a.unwrap_or(ba) })
        }
        "affine" => {
            let bd = match base {
                Some(SurfaceSpec::Affine { d }) => Some(d),
                _ => None,
            };
            let d = args.d.or(bd).ok_or_else(|| CliError::Usage("affine needs --d".into()))?;
            Ok(SurfaceSpec::Affine { d })
        }
        "formal" => Err(CliError::Usage("formal surfaces are read from --config".into())),
        other => Err(CliError::Usage(format!("unknown surface {:?}; expected p2 or affine", other))),
    }
}

fn job_from_args(args: &ComputeArgs) -> anyhow::Result<JobConfig> {
    let base = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {}", path.display(), e)))?;
            Some(JobConfig::from_json(&text).with_context(|| format!("in {}", path.display()))?)
        }
        None => None,
    };
    let surface = surface_from_flags(args, base.as_ref().map(|b| b.surface.clone()))?;
    let op = args.op.clone().or_else(|| base.as_ref().map(|b| b.op.clone())).ok_or_else(|| CliError::Usage("missing --op".into()))?;
    let n = args.n.or(base.as_ref().map(|b| b.n)).ok_or_else(|| CliError::Usage("missing --n".into()))?;
    Ok(JobConfig {
        surface,
        op,
        n,
        k: args.k.or(base.as_ref().and_then(|b| b.k)),
        output: args.output.or(base.as_ref().map(|b| b.output)).unwrap_or_default(),
    })
}

fn run_verify(suite: &str, max_n: Option<u32>, tier: Option<Tier>, output: OutputFormat) -> anyhow::Result<()> {
    let bounds = Bounds { tier: hilbtaut::effective_tier(tier)?, max_n };
    let outcomes = verify::run(suite, &bounds)?;
    print!("{}", verify::render(&outcomes, &bounds, output));
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.suite.to_string()).collect();
    if !failed.is_empty() {
        return Err(CliError::Falsified(format!("failing suites: {}", failed.join(", "))).into());
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Compute(args) => {
            let job = job_from_args(&args)?;
            if job.validate()? == Operation::Verify {
                return run_verify("all", Some(job.n), None, job.output);
            }
            let report = hilbtaut::compute(&job)?;
            print!("{}", report.render(job.output));
            Ok(())
        }
        Command::Verify(args) => run_verify(&args.suite, args.max_n, args.tier, args.output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hilbtaut: {:#}", e);
            let code = e.chain().find_map(|c| c.downcast_ref::<CliError>()).map_or(2, CliError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
