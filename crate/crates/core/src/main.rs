use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use segmin::algorithms::{alg_base, alg_log_d, Algorithm};
use segmin::bench::{load_instances, run_bench, summarize, BenchConfig};
use segmin::decompose::digit_count;
use segmin::exact::{exact_opt, ExactLimits};
use segmin::generators::{gen_adversarial, gen_gaussian, gen_harmonic, gen_random, GaussianParams};
use segmin::io::{
    format_matrix, parse_matrix, read_input, segmentation_from_json, segmentation_to_json,
    write_output,
};
use segmin::row_solvers::{ExactRowSolver, SingleRowSolver, SweepSolver};
use segmin::{lower_bound, verify, Error, IntensityMatrix, Segmentation, Verdict};

const EXIT_OTHER: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_LIMITS: u8 = 3;
const EXIT_VERIFY: u8 = 4;
const EXIT_TIMEOUT: u8 = 5;

#[derive(Parser)]
#[command(
    name = "segmin",
    version,
    about = "Segment minimization for integer intensity matrices"
)]
struct Cli {
    /// Worker threads (default: all logical cores).
    #[arg(long, global = true, env = "SEGMIN_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment a matrix and write the segmentation as JSON.
    Solve(SolveArgs),
    /// Generate instances in the matrix text format.
    Gen(GenArgs),
    /// Run algorithms over a directory of matrices and report.
    Bench(BenchArgs),
    /// Check that a segmentation sums to a matrix.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveAlg {
    B2,
    B3,
    B4,
    Logd,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum RowSolverKind {
    Sweep,
    Exact,
}

#[derive(Args)]
struct ExactArgs {
    /// Largest instance (rows * cols) the exact solver accepts.
    #[arg(long, default_value_t = 64)]
    exact_max_cells: usize,
    /// Largest entry the exact solver accepts.
    #[arg(long, default_value_t = 6)]
    exact_max_h: u64,
    /// Seconds before the exact solver gives up (0 = no limit).
    #[arg(long, default_value_t = 30.0)]
    exact_time_budget: f64,
}

impl ExactArgs {
    fn limits(&self) -> ExactLimits {
        ExactLimits {
            max_cells: self.exact_max_cells,
            max_h: self.exact_max_h,
            time_budget: (self.exact_time_budget > 0.0)
                .then(|| Duration::from_secs_f64(self.exact_time_budget)),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    alg: SolveAlg,
    /// Matrix file, or - for stdin.
    #[arg(long = "in")]
    input: PathBuf,
    /// Segmentation file, or - for stdout.
    #[arg(long)]
    out: PathBuf,
    /// Single-row solver for logd.
    #[arg(long, value_enum, default_value = "sweep")]
    row_solver: RowSolverKind,
    /// Accepted for scripting symmetry; every algorithm is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    exact: ExactArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Gaussian,
    Adversarial,
    Harmonic,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long, default_value_t = 50)]
    rows: usize,
    #[arg(long, default_value_t = 50)]
    cols: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gaussian: number of peaks.
    #[arg(long, default_value_t = 7)]
    peaks: usize,
    #[arg(long, default_value_t = 1.0)]
    amp_min: f64,
    #[arg(long, default_value_t = 25.0)]
    amp_max: f64,
    /// Gaussian spread in cells (default: min(rows, cols) / 6).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    gain: f64,
    #[arg(long, default_value_t = 0.5)]
    center_fraction: f64,
    /// Adversarial and harmonic: the base.
    #[arg(long, default_value_t = 3)]
    b: u64,
    /// Adversarial: number of repeated layers.
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Random: largest entry.
    #[arg(long, default_value_t = 10)]
    h: u64,
    /// Seeded kinds: write this many instances (seeds seed, seed+1, ...)
    /// into --dir instead of one matrix to --out.
    #[arg(long)]
    count: Option<u64>,
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    dir: PathBuf,
    /// Comma-separated list out of b2, b3, b4, logd.
    #[arg(long, default_value = "b2,b3,b4,logd", value_delimiter = ',')]
    algs: Vec<String>,
    /// Skip the exact solver entirely.
    #[arg(long)]
    no_exact: bool,
    #[command(flatten)]
    exact: ExactArgs,
    /// JSON report path; the CSV table goes next to it with a .csv extension.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Record wall-clock runtimes (reports are then no longer reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    seg: PathBuf,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => EXIT_PARSE,
            Error::LimitsExceeded(_) => EXIT_LIMITS,
            Error::DimensionMismatch { .. } | Error::RowMismatch(_) => EXIT_VERIFY,
            Error::InvalidSegment(_) | Error::Parameter(_) => EXIT_OTHER,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_OTHER,
        msg: format!("{}: {e}", path.display()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Gen(args) => generate(args),
        Command::Bench(args) => bench(args, cli.threads),
        Command::Verify(args) => verify_cmd(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn read_matrix(path: &Path) -> Result<IntensityMatrix, Failure> {
    let text = read_input(path).map_err(|e| io_failure(path, e))?;
    Ok(parse_matrix(&text)?)
}

fn solve(args: SolveArgs) -> Result<u8, Failure> {
    let t = read_matrix(&args.input)?;
    let mut code = 0;
    let (seg, layers): (Segmentation, Option<usize>) = match args.alg {
        SolveAlg::B2 => (alg_base(&t, 2)?, Some(digit_count(t.max_value(), 2))),
        SolveAlg::B3 => (alg_base(&t, 3)?, Some(digit_count(t.max_value(), 3))),
        SolveAlg::B4 => (alg_base(&t, 4)?, Some(digit_count(t.max_value(), 4))),
        SolveAlg::Logd => {
            let solver: Box<dyn SingleRowSolver> = match args.row_solver {
                RowSolverKind::Sweep => Box::new(SweepSolver),
                RowSolverKind::Exact => Box::new(ExactRowSolver::default()),
            };
            (
                alg_log_d(&t, solver.as_ref(), 2)?,
                Some(digit_count(t.row_difference(), 2)),
            )
        }
        SolveAlg::Exact => {
            let out = exact_opt(&t, args.exact.limits())?;
            if !out.is_optimal() {
                eprintln!("time budget exhausted; writing the best segmentation found");
                code = EXIT_TIMEOUT;
            }
            (out.segmentation, None)
        }
    };
    check(&t, &seg)?;
    write_output(&args.out, &segmentation_to_json(&seg)).map_err(|e| io_failure(&args.out, e))?;
    // Keep stdout clean for the segmentation when it goes there.
    let report = format!(
        "size {}\nlower_bound {}\nh {}\nD {}\nlayers {}",
        seg.size(),
        lower_bound(&t),
        t.max_value(),
        t.row_difference(),
        layers.map_or_else(|| "-".to_string(), |l| l.to_string())
    );
    if args.out.as_os_str() == "-" {
        eprintln!("{report}");
    } else {
        println!("{report}");
    }
    Ok(code)
}

fn check(t: &IntensityMatrix, seg: &Segmentation) -> Result<(), Failure> {
    let msg = match verify(t, seg) {
        Ok(Verdict::Ok) => return Ok(()),
        Ok(v) => v.to_string(),
        Err(e) => e.to_string(),
    };
    Err(Failure {
        code: EXIT_VERIFY,
        msg,
    })
}

fn generate(args: GenArgs) -> Result<u8, Failure> {
    let make = |seed: u64| -> Result<IntensityMatrix, Error> {
        match args.kind {
            GenKind::Gaussian => gen_gaussian(&GaussianParams {
                rows: args.rows,
                cols: args.cols,
                num_peaks: args.peaks,
                amp_range: (args.amp_min, args.amp_max),
                sigma: args.sigma,
                gain: args.gain,
                center_fraction: args.center_fraction,
                seed,
            }),
            GenKind::Adversarial => gen_adversarial(args.b, args.k),
            GenKind::Harmonic => gen_harmonic(args.b, args.cols),
            GenKind::Random => gen_random(args.rows, args.cols, args.h, seed),
        }
    };
    match (args.count, &args.dir) {
        (Some(count), Some(dir)) => {
            fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
            let kind = match args.kind {
                GenKind::Gaussian => "gaussian",
                GenKind::Adversarial => "adversarial",
                GenKind::Harmonic => "harmonic",
                GenKind::Random => "random",
            };
            for seed in args.seed..args.seed + count {
                let path = dir.join(format!("{kind}-{seed:06}.txt"));
                fs::write(&path, format_matrix(&make(seed)?)).map_err(|e| io_failure(&path, e))?;
            }
        }
        (None, None) => {
            write_output(&args.out, &format_matrix(&make(args.seed)?))
                .map_err(|e| io_failure(&args.out, e))?;
        }
        _ => {
            return Err(Failure {
                code: EXIT_OTHER,
                msg: "--count and --dir go together".into(),
            })
        }
    }
    Ok(0)
}

fn bench(args: BenchArgs, threads: Option<usize>) -> Result<u8, Failure> {
    let algorithms = args
        .algs
        .iter()
        .map(|a| a.trim().parse::<Algorithm>())
        .collect::<Result<Vec<_>, _>>()?;
    let (instances, mut skipped) =
        load_instances(&args.dir).map_err(|e| io_failure(&args.dir, e))?;
    let config = BenchConfig {
        algorithms,
        exact: (!args.no_exact).then(|| args.exact.limits()),
        threads,
        timings: args.timings,
    };
    let mut report = run_bench(&instances, &config)?;
    skipped.append(&mut report.skipped);
    skipped.sort_by(|a, b| a.id.cmp(&b.id));
    report.skipped = skipped;
    let summary = summarize(&report);
    print!("{}", summary.text);
    if let Some(path) = &args.report {
        fs::write(path, &summary.json).map_err(|e| io_failure(path, e))?;
        let csv = path.with_extension("csv");
        fs::write(&csv, &summary.csv).map_err(|e| io_failure(&csv, e))?;
    }
    if let Some(v) = report.violations().first() {
        return Err(Failure {
            code: EXIT_VERIFY,
            msg: format!("report invariant broken: {v}"),
        });
    }
    Ok(if report.skipped.is_empty() {
        0
    } else {
        EXIT_PARSE
    })
}

fn verify_cmd(args: VerifyArgs) -> Result<u8, Failure> {
    let t = read_matrix(&args.matrix)?;
    let text = read_input(&args.seg).map_err(|e| io_failure(&args.seg, e))?;
    let seg = segmentation_from_json(&text)?;
    check(&t, &seg)?;
    println!("OK ({} segments)", seg.size());
    Ok(0)
}
