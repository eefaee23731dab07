//! `fsync`: pattern tooling, bounds, experiments, reports and FII checks.
//!
//! Exit codes: 0 success, 1 a gate or validation failed, 2 usage or
//! configuration error, 3 the pattern is not independent.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fsync_core::bounds::{fi_recursion_anchored, NoiseFisher};
use fsync_core::config::{RunConfig, CONFIG_VERSION};
use fsync_core::dist::DistributionSpec;
use fsync_core::fisherineq::{
    check_fii_1d, check_fii_2d_dependent, default_grids_2d, BivariateGaussianSpec, Grid1D, FII_1D_TOL, FII_2D_TOL,
};
use fsync_core::montecarlo::{replay_trial, run_experiment};
use fsync_core::pattern::{
    gen_butterfly, gen_random_independent, gen_tournament, validate_independence, Independence, MeetingPattern,
};
use fsync_core::report::{assemble, evaluate, Thresholds};
use fsync_core::sync::Algorithm;
use fsync_core::table::{
    read_bounds, read_result, trial_writer, write_bounds, write_result, write_trial_rows, RunMeta,
};
use fsync_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EXIT_GATE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DEPENDENT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fsync",
    version,
    about = "Clock synchronization on independent meeting patterns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or validate meeting patterns.
    #[command(subcommand)]
    Pattern(PatternCmd),
    /// Fisher-information bounds for the pattern and catalog of a config.
    Bounds(BoundsArgs),
    /// Run a Monte Carlo experiment.
    Run(RunArgs),
    /// Evaluate the gates over a result table and its bounds.
    Report(ReportArgs),
    /// Numerically check the Fisher information inequality.
    VerifyFii(FiiArgs),
}

#[derive(Subcommand)]
enum PatternCmd {
    Gen(GenArgs),
    /// Check independence; prints the first offending event.
    Validate {
        file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternKind {
    Tournament,
    Random,
    Butterfly,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: PatternKind,
    #[arg(long)]
    n: usize,
    /// Rounds of a random pattern.
    #[arg(long, default_value_t = 1)]
    rounds: usize,
    /// Fraction of sensors observing per round in a random pattern.
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, env = "FSYNC_SEED")]
    seed: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the pattern named in the config.
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// Used when the config has no seed.
    #[arg(long, env = "FSYNC_SEED")]
    seed: Option<u64>,
    /// Also write every trial's states to `<output>.trials.csv`.
    #[arg(long)]
    dump_trials: bool,
    /// Dump only the first N trials.
    #[arg(long, requires = "dump_trials")]
    dump_limit: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    result: PathBuf,
    #[arg(long)]
    bounds: PathBuf,
    /// Defaults to `<result>.report.json`.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, default_value_t = 0.005)]
    unbiased_fraction: f64,
    #[arg(long)]
    variance_tol: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    competitive_tol: f64,
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct FiiArgs {
    /// Bivariate Gaussian location family instead of two 1-D families.
    #[arg(long)]
    two_d: bool,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    rho: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma1_sq: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma3_sq: f64,
    #[arg(long, default_value_t = 1.0)]
    noise_var: f64,
    /// Points per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// 1-D first family as JSON, e.g. '{"kind":"logistic","scale":1.0}'.
    #[arg(long, default_value = r#"{"kind":"logistic","scale":1.0}"#)]
    p1: String,
    #[arg(long, default_value = r#"{"kind":"gaussian","variance":1.0}"#)]
    p2: String,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PatternNotIndependent { .. } => EXIT_DEPENDENT,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn pattern_gen(args: &GenArgs) -> CmdResult {
    let pattern = match args.kind {
        PatternKind::Butterfly => gen_butterfly(args.n)?,
        kind => {
            let seed = args
                .seed
                .ok_or_else(|| usage("no --seed given and FSYNC_SEED is unset"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match kind {
                PatternKind::Tournament => gen_tournament(args.n, &mut rng)?,
                _ => gen_random_independent(args.n, args.rounds, args.density, &mut rng)?,
            }
        }
    };
    match &args.output {
        Some(path) => pattern.save(path)?,
        None => {
            let mut out = output(None)?;
            serde_json::to_writer_pretty(&mut out, &pattern).map_err(Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(0)
}

fn pattern_validate(file: &Path) -> CmdResult {
    let pattern = MeetingPattern::load(file)?;
    match validate_independence(&pattern) {
        Independence::Valid => {
            println!(
                "valid: n = {}, depth {}, {} events",
                pattern.n(),
                pattern.depth(),
                pattern.events().len()
            );
            Ok(0)
        }
        Independence::Violation { event, shared } => {
            println!("not independent at {event}: relevant sets share {shared:?}");
            Ok(EXIT_GATE)
        }
    }
}

fn bounds(args: &BoundsArgs) -> CmdResult {
    let config = RunConfig::load(&args.config)?;
    let pattern = match &args.pattern {
        Some(p) => MeetingPattern::load(p)?,
        None => config.load_pattern()?,
    };
    let n = pattern.n();
    let initial_fi = config
        .assignment_for(n)?
        .iter()
        .map(DistributionSpec::fisher_information)
        .collect::<Result<Vec<_>, _>>()?;
    let noise_fi = NoiseFisher::from_value(config.catalog.noise.fisher_information()?);
    let traj = fi_recursion_anchored(&pattern, &initial_fi, noise_fi, &config.anchored_mask(n)?)?;
    write_bounds(&traj, output(args.output.as_deref())?)?;
    Ok(0)
}

fn run(args: &RunArgs) -> CmdResult {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(a) = args.algorithm {
        config.algorithm = a;
    }
    let pattern = config.load_pattern()?;
    let mut experiment = config.experiment(pattern.clone(), args.seed)?;
    experiment.workers = args.workers;
    let result = run_experiment(&experiment)?;
    write_result(&result, BufWriter::new(File::create(&args.output)?))?;

    let initial_fi = experiment
        .assignment
        .iter()
        .map(DistributionSpec::fisher_information)
        .collect::<Result<Vec<_>, _>>()?;
    let noise_fi = result.fisher.noise_fi;
    let meta = RunMeta {
        version: CONFIG_VERSION,
        algorithm: result.algorithm,
        trials: result.trials,
        tau_star: result.tau_star,
        seed: experiment.seed,
        delta0: result.delta0,
        noise_variance: result.noise_variance,
        noise_fi: (noise_fi != NoiseFisher::Infinite).then(|| noise_fi.value()),
        pattern: std::path::absolute(&config.pattern)?,
        initial_fi,
        epsilon: config.epsilon,
    };
    meta.save(&RunMeta::sidecar_path(&args.output))?;

    if args.dump_trials {
        let path = args.output.with_extension("trials.csv");
        let mut w = trial_writer(BufWriter::new(File::create(&path)?))?;
        let count = args.dump_limit.unwrap_or(experiment.trials).min(experiment.trials);
        for k in 0..count {
            write_trial_rows(&mut w, k, &replay_trial(&experiment, k)?)?;
        }
        w.flush()?;
    }
    if !result.accuracy_deterministic {
        eprintln!("warning: accuracy sequence differed between trials");
    }
    Ok(0)
}

fn report(args: &ReportArgs) -> CmdResult {
    let meta_path = RunMeta::sidecar_path(&args.result);
    let meta = RunMeta::load(&meta_path)?;
    let pattern_path = match meta_path.parent() {
        Some(dir) if meta.pattern.is_relative() => dir.join(&meta.pattern),
        _ => meta.pattern.clone(),
    };
    let pattern = MeetingPattern::load(&pattern_path)?;
    let table = read_result(File::open(&args.result)?)?;
    let bounds_values = read_bounds(File::open(&args.bounds)?)?;
    let (result, fisher) = assemble(table, bounds_values, &meta, &pattern)?;
    let th = Thresholds {
        unbiased_fraction: args.unbiased_fraction,
        variance_tol: args.variance_tol,
        competitive_tol: args.competitive_tol,
        epsilon: args.epsilon,
    };
    let gates = evaluate(&result, &fisher, &pattern, &meta.initial_fi, meta.epsilon, &th)?;
    print!("{}", gates.to_text());

    let json_path = args
        .json
        .clone()
        .unwrap_or_else(|| args.result.with_extension("report.json"));
    let mut text = serde_json::to_string_pretty(&serde_json::json!({
        "passed": gates.passed(),
        "delta0": gates.delta0,
        "trials": gates.trials,
        "gates": gates.gates,
    }))
    .map_err(Error::from)?;
    text.push('\n');
    std::fs::write(json_path, text)?;
    Ok(if gates.passed() { 0 } else { EXIT_GATE })
}

fn verify_fii(args: &FiiArgs) -> CmdResult {
    if args.two_d {
        let noise = DistributionSpec::gaussian(args.noise_var)?;
        let p1 = BivariateGaussianSpec::new(args.sigma1_sq, args.sigma3_sq, args.rho)?;
        let (g1, g3) = default_grids_2d(&p1, &noise, args.grid.unwrap_or(513))?;
        let r = check_fii_2d_dependent(&p1, &noise, &g1, &g3)?;
        let cond = p1.conditional_variance();
        let e1 = (r.j_p1 * cond - 1.0).abs();
        let er = (r.j_r * (cond + args.noise_var) - 1.0).abs();
        let ok = e1 <= FII_2D_TOL && er <= FII_2D_TOL;
        println!(
            "{} J_p1 = {:.10} (closed form {:.10}), J_r = {:.10} (closed form {:.10}), slack = {:.3e}",
            if ok { "PASS" } else { "FAIL" },
            r.j_p1,
            1.0 / cond,
            r.j_r,
            1.0 / (cond + args.noise_var),
            r.slack
        );
        return Ok(if ok { 0 } else { EXIT_GATE });
    }
    let parse =
        |s: &str| serde_json::from_str::<DistributionSpec>(s).map_err(|e| usage(format!("bad family {s}: {e}")));
    let (p1, p2) = (parse(&args.p1)?, parse(&args.p2)?);
    let grid = Grid1D::for_pair(&p1, &p2, args.grid.unwrap_or(4001))?;
    let s = check_fii_1d(&p1, &p2, &grid)?;
    let ok = s.slack >= -FII_1D_TOL;
    println!(
        "{} J_p1 = {:.10}, J_p2 = {:.10}, J_r = {:.10}, slack = {:.3e}",
        if ok { "PASS" } else { "FAIL" },
        s.j_p1,
        s.j_p2,
        s.j_r,
        s.slack
    );
    Ok(if ok { 0 } else { EXIT_GATE })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Pattern(PatternCmd::Gen(a)) => pattern_gen(a),
        Command::Pattern(PatternCmd::Validate { file }) => pattern_validate(file),
        Command::Bounds(a) => bounds(a),
        Command::Run(a) => run(a),
        Command::Report(a) => report(a),
        Command::VerifyFii(a) => verify_fii(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
