use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use excalc::expr::parse_expression;
use excalc::{emit_report, run_suite, ConfigError, Overrides, Plan, Scenario};
use excalc_core::fields::DerivativeMode;

#[derive(Parser)]
#[command(
    name = "excalc",
    version,
    about = "Verify curvature and deformation identities on scenario files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario's check suite.
    Check(RunArgs),
    /// Report curvature values at the sample points.
    Curvature(RunArgs),
    /// Run only the gauge and diffeomorphism checks.
    Deform(RunArgs),
    /// Validate a scenario, or an expression, and print canonical forms.
    Parse(ParseArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ad,
    Fd,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance applied to every check.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    dd_mode: Option<Mode>,
    #[arg(long)]
    fd_step: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Report file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ParseArgs {
    #[arg(long, conflicts_with = "expression")]
    scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    dim: usize,
    expression: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Result<Overrides, ConfigError> {
        if self.tol.is_some_and(|t| t.is_nan() || t <= 0.0) {
            return Err(ConfigError::Invalid("--tol must be positive".into()));
        }
        if self.fd_step.is_some_and(|h| h.is_nan() || h <= 0.0) {
            return Err(ConfigError::Invalid("--fd-step must be positive".into()));
        }
        Ok(Overrides {
            seed: self.seed,
            tolerance: self.tol,
            dd_mode: self.dd_mode.map(|m| match m {
                Mode::Ad => DerivativeMode::Ad,
                Mode::Fd => DerivativeMode::Fd,
            }),
            fd_step: self.fd_step,
            samples: self.samples,
        })
    }
}

fn run(args: &RunArgs, plan: impl Fn(&Scenario) -> Plan) -> Result<bool, ConfigError> {
    let scenario = Scenario::load(&args.scenario)?;
    let plan = plan(&scenario);
    if plan.checks.is_empty() && !plan.curvature {
        return Err(ConfigError::Invalid(
            "scenario has no gauge or diffeomorphism to check".into(),
        ));
    }
    let report = run_suite(&scenario, &args.overrides()?, &plan);
    emit_report(&report, args.output.as_deref())?;
    for c in report.failed_checks() {
        eprintln!(
            "FAIL {} ({}): max residual {:e} >= tolerance {:e}",
            c.name, c.equation, c.max_residual, c.tolerance
        );
    }
    for e in &report.point_errors {
        eprintln!("error at {:?} in {}: {}", e.point, e.check, e.error);
    }
    Ok(report.pass)
}

fn parse(args: &ParseArgs) -> Result<bool, ConfigError> {
    match (&args.scenario, &args.expression) {
        (Some(path), _) => {
            let s = Scenario::load(path)?;
            println!("{}", serde_json::to_string_pretty(&s.expressions())?);
        }
        (None, Some(src)) => {
            let e = parse_expression(src, args.dim).map_err(|source| ConfigError::Expression {
                location: "argument".into(),
                source,
            })?;
            println!("{e}");
        }
        (None, None) => {
            return Err(ConfigError::Invalid(
                "give --scenario or an expression".into(),
            ))
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check(a) => run(a, Plan::full),
        Command::Curvature(a) => run(a, |_| Plan::curvature_only()),
        Command::Deform(a) => run(a, |s| {
            let mut p = Plan::deformation(s);
            p.curvature = !p.checks.is_empty();
            p
        }),
        Command::Parse(a) => parse(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("excalc: {e}");
            ExitCode::from(2)
        }
    }
}
