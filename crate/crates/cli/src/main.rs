//! `thincirc`: command-line front end.
//!
//! Primary output goes to stdout; the resolved parameters are echoed to
//! stderr as a `#`-prefixed, rerunnable command line, and so are errors.

use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thincirc_core::construction::{construct_thin_circulant, ConstructionParams};
use thincirc_core::experiment::{corollary_report, density_sweep, write_sweep_csv, SweepSpec};
use thincirc_core::freeness::{verify_matrix, verify_support, SearchLimits, Verdict};
use thincirc_core::rectangles::{
    check_enumeration, enumerate_rectangles, points_count, solution_dim, verify_lemmas,
    LemmaSelection, DEFAULT_TUPLE_LIMIT,
};
use thincirc_core::rho::{rho_by_max, rho_closed};
use thincirc_core::sumset::{
    min_sumset_by_partition_search, min_sumset_grid_exhaustive, min_sumset_size, PointSet,
    SumsetBoundQuery,
};
use thincirc_core::{CirculantMatrix, Error};

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\nmatrix JSON format: matrix-json/1\nsweep CSV format: sweep-csv/1"
);

#[derive(Parser, Debug)]
#[command(name = "thincirc", version = VERSION, about = "Thin (k,l)-free circulant matrices")]
struct Cli {
    /// Worker threads for construct, sweep and enumeration (default: logical cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a (k,l)-free 2N x 2N circulant by the randomized construction.
    Construct(ConstructArgs),
    /// Check a matrix JSON file for an all-ones k x l block.
    Verify(VerifyArgs),
    /// The exponent rho(K,L) as an exact fraction.
    Rho(RhoArgs),
    /// Minimum |A+B| for |A|=K, |B|=L, dim(A+B)=n.
    SumsetMin(SumsetArgs),
    /// Enumerate rectangles and check the class-counting lemmas.
    EnumRect(EnumArgs),
    /// Density sweeps and the corollary report.
    Experiment {
        #[command(subcommand)]
        command: ExperimentCommand,
    },
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    /// Multiplier on the default density.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 100)]
    max_trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Verifier work budget per trial (shifted intersections).
    #[arg(long, default_value_t = SearchLimits::default().max_ops)]
    budget: u64,
    /// Write the result JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VerifyMode {
    /// Cyclic sums on the matrix as given.
    Cyclic,
    /// Plain integer sums on the first row, i.e. the zero-padded double.
    Integer,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    #[arg(long, value_enum, default_value_t = VerifyMode::Cyclic)]
    mode: VerifyMode,
    #[arg(long, default_value_t = SearchLimits::default().max_ops)]
    budget: u64,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["k", "table"]))]
struct RhoArgs {
    #[arg(long, requires = "l")]
    k: Option<usize>,
    #[arg(long, requires = "k")]
    l: Option<usize>,
    /// Print a CSV table for all 2 <= K <= L <= MAX instead.
    #[arg(long, value_name = "MAX", conflicts_with_all = ["k", "l"])]
    table: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Oracle {
    Partition,
    Grid,
}

#[derive(Args, Debug)]
struct SumsetArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    #[arg(long)]
    n: usize,
    /// Cross-check against an independent search.
    #[arg(long, value_enum)]
    oracle: Option<Oracle>,
    /// Grid half-width for the grid oracle.
    #[arg(long, default_value_t = 2)]
    radius: i64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Lemma {
    Lemma1,
    Lemma2,
    Lemma3,
    All,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args, Debug)]
struct EnumArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    #[arg(long, value_enum)]
    verify: Option<Lemma>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// List ordered tuples rather than increasing blocks.
    #[arg(long)]
    ordered: bool,
    /// Largest N^(k+l) accepted.
    #[arg(long, default_value_t = DEFAULT_TUPLE_LIMIT)]
    tuple_limit: u128,
}

#[derive(Subcommand, Debug)]
enum ExperimentCommand {
    /// Empirical freeness frequency over a grid of N and density scales.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// CSV destination (default stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the full rows, including exhausted counts, as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Weight bound and reference magnitudes at k = l = ceil(log2 N).
    Corollary {
        #[arg(long)]
        n: u64,
    },
}

/// Exit status plus an optional message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Display) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Internal(_) => 1,
            Error::BudgetExhausted { .. } => 4,
            Error::ConstructionFailed(f) if f.budget_only() => 4,
            Error::ConstructionFailed(_) => 3,
            _ => 2,
        };
        let message = match &e {
            Error::ConstructionFailed(f) => format!(
                "{e}\n{}",
                serde_json::to_string_pretty(f.as_ref()).unwrap_or_default()
            ),
            _ => e.to_string(),
        };
        Self { code, message }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::new(2, e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::new(1, e)
    }
}

type Outcome = Result<(), Failure>;

fn header(parts: &[String]) {
    eprintln!("# thincirc {}", parts.join(" "));
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
        }
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn construct(args: &ConstructArgs, jobs: usize) -> Outcome {
    let mut h = vec![
        "construct".into(),
        format!("--n {} --k {} --l {}", args.n, args.k, args.l),
        format!(
            "--scale {} --max-trials {} --seed {}",
            args.scale, args.max_trials, args.seed
        ),
        format!("--budget {} --jobs {jobs}", args.budget),
    ];
    if let Some(out) = &args.out {
        h.push(format!("--out {}", out.display()));
    }
    header(&h);
    let params = ConstructionParams {
        n: args.n,
        k: args.k,
        l: args.l,
        density_scale: args.scale,
        max_trials: args.max_trials,
        seed: args.seed,
        max_ops: args.budget,
        jobs,
    };
    let result = construct_thin_circulant(&params)?;
    eprintln!(
        "# p={} threshold={} accepted_on={:?} trials={} gamma={}",
        result.p, result.threshold, result.accepted_on, result.trials_used, result.row_weight
    );
    let text = serde_json::to_string_pretty(&result.to_json_value())? + "\n";
    emit(args.out.as_deref(), &text)
}

/// A bare matrix object, or a `construct` result with the matrix under
/// `"matrix"`.
fn load_matrix(text: &str) -> Result<CirculantMatrix, Failure> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Failure::new(2, format!("input: {e}")))?;
    match value.get("matrix") {
        Some(inner) => Ok(CirculantMatrix::from_json(&inner.to_string())?),
        None => Ok(CirculantMatrix::from_json(text)?),
    }
}

fn verify(args: &VerifyArgs) -> Outcome {
    let mode = match args.mode {
        VerifyMode::Cyclic => "cyclic",
        VerifyMode::Integer => "integer",
    };
    header(&[format!(
        "verify --input {} --k {} --l {} --mode {mode} --budget {}",
        args.input.display(),
        args.k,
        args.l,
        args.budget
    )]);
    let matrix = load_matrix(&read(&args.input)?)?;
    let limits = SearchLimits {
        max_ops: args.budget,
        ..SearchLimits::default()
    };
    let verdict = match args.mode {
        VerifyMode::Cyclic => verify_matrix(&matrix, args.k, args.l, &limits)?,
        VerifyMode::Integer => verify_support(matrix.row(), args.k, args.l, &limits)?,
    };
    match verdict {
        Verdict::Free => {
            println!("free");
            Ok(())
        }
        Verdict::Block(w) => {
            println!("{}", w.to_json()?);
            Err(Failure::new(3, "found an all-ones block"))
        }
        Verdict::BudgetExhausted { spent } => Err(Error::BudgetExhausted { spent }.into()),
    }
}

fn rho(args: &RhoArgs) -> Outcome {
    if let Some(max) = args.table {
        header(&[format!("rho --table {max}")]);
        println!("K,L,rho,rho_decimal,argmax_n");
        for k in 2..=max {
            for l in k..=max {
                let r = checked_rho(k, l)?;
                println!("{k},{l},{r},{},{}", r.as_f64(), r.argmax_n);
            }
        }
        return Ok(());
    }
    let (k, l) = (
        args.k.expect("required by clap"),
        args.l.expect("required by clap"),
    );
    header(&[format!("rho --k {k} --l {l}")]);
    let r = checked_rho(k, l)?;
    eprintln!(
        "# rho={} argmax_n={} branch={:?} swapped={}",
        r.as_f64(),
        r.argmax_n,
        r.branch,
        r.swapped
    );
    println!("{r}");
    Ok(())
}

/// Closed form, confirmed against direct maximisation.
fn checked_rho(k: usize, l: usize) -> Result<thincirc_core::RhoValue, Failure> {
    let closed = rho_closed(k, l)?;
    let by_max = rho_by_max(k, l)?;
    if closed.value != by_max.value {
        return Err(Failure::new(
            1,
            format!("rho({k},{l}): closed form {closed} != maximisation {by_max}"),
        ));
    }
    Ok(closed)
}

fn points(p: &PointSet) -> String {
    serde_json::to_string(&p.points().collect::<Vec<_>>()).unwrap_or_default()
}

fn sumset_min(args: &SumsetArgs) -> Outcome {
    let mut h = format!("sumset-min --k {} --l {} --n {}", args.k, args.l, args.n);
    match args.oracle {
        Some(Oracle::Partition) => h += " --oracle partition",
        Some(Oracle::Grid) => h += &format!(" --oracle grid --radius {}", args.radius),
        None => {}
    }
    header(&[h]);
    let q = SumsetBoundQuery::new(args.n, args.k, args.l)?;
    let value = min_sumset_size(&q)?;
    println!("{value}");
    match args.oracle {
        None => {}
        Some(Oracle::Partition) => {
            let m = min_sumset_by_partition_search(&q)?;
            let w = m.witness;
            println!(
                "partition {} s={} s_A={} s_B={}",
                m.value, w.s, w.s_a, w.s_b
            );
            if m.value != value {
                return Err(Failure::new(
                    1,
                    format!("partition search {} != {value}", m.value),
                ));
            }
        }
        Some(Oracle::Grid) => {
            match min_sumset_grid_exhaustive(args.k, args.l, args.n, args.radius)? {
                None => println!("grid none"),
                Some(g) => {
                    println!("grid {} A={} B={}", g.value, points(&g.a), points(&g.b));
                    if g.value < value {
                        return Err(Failure::new(
                            1,
                            format!("grid minimum {} < {value}", g.value),
                        ));
                    }
                    if g.value > value {
                        eprintln!("# the grid minimum exceeds the formula at this radius");
                    }
                }
            }
        }
    }
    Ok(())
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn enum_rect(args: &EnumArgs) -> Outcome {
    let mut h = format!(
        "enum-rect --n {} --k {} --l {} --tuple-limit {}",
        args.n, args.k, args.l, args.tuple_limit
    );
    if let Some(v) = args.verify {
        h += &format!(
            " --verify {}",
            v.to_possible_value()
                .expect("no skipped variants")
                .get_name()
        );
    }
    if args.ordered {
        h += " --ordered";
    }
    if let Format::Json = args.format {
        h += " --format json";
    }
    header(&[h]);

    let Some(which) = args.verify else {
        check_enumeration(args.n, args.k, args.l, args.tuple_limit)?;
        let rows = enumerate_rectangles(args.n, args.k, args.l, !args.ordered);
        let mut out = io::BufWriter::new(io::stdout().lock());
        match args.format {
            Format::Text => {
                for e in rows {
                    writeln!(
                        out,
                        "a={} b={} m={} n={}",
                        join(e.a()),
                        join(e.b()),
                        points_count(&e),
                        solution_dim(&e)
                    )?;
                }
            }
            Format::Json => {
                let all: Vec<_> = rows
                    .map(|e| {
                        serde_json::json!({
                            "a": e.a(), "b": e.b(), "m": points_count(&e), "n": solution_dim(&e)
                        })
                    })
                    .collect();
                writeln!(out, "{}", serde_json::to_string_pretty(&all)?)?;
            }
        }
        out.flush()?;
        return Ok(());
    };

    let selection = match which {
        Lemma::Lemma1 => LemmaSelection {
            lemma1: true,
            ..Default::default()
        },
        Lemma::Lemma2 => LemmaSelection {
            lemma2: true,
            ..Default::default()
        },
        Lemma::Lemma3 => LemmaSelection {
            lemma3: true,
            ..Default::default()
        },
        Lemma::All => LemmaSelection::ALL,
    };
    let report = verify_lemmas(args.n, args.k, args.l, selection, args.tuple_limit)?;
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Text => {
            println!("rectangles {}", report.rectangles);
            println!("classes {}", report.classes);
            let spectrum: Vec<String> = report
                .n_spectrum
                .iter()
                .map(|(n, c)| format!("{n}:{c}"))
                .collect();
            println!("n_spectrum {}", spectrum.join(" "));
            if let Some(r) = &report.lemma1 {
                println!(
                    "lemma1 violations {} worst_ratio {}",
                    r.violations.len(),
                    r.worst_ratio
                );
            }
            if let Some(r) = &report.lemma2 {
                for b in &r.buckets {
                    println!("lemma2 n={} classes {} bound {}", b.n, b.classes, b.bound);
                }
                println!("lemma2 violations {}", r.violations);
            }
            if let Some(r) = &report.lemma3 {
                println!(
                    "lemma3 violations {} checked {} worst_n_over_m {} rho {}",
                    r.violations.len(),
                    r.checked,
                    r.worst_n_over_m,
                    r.rho
                );
            }
            println!(
                "structural violations {}",
                report.structural_violations.len()
            );
        }
    }
    match report.violation_count() {
        0 => Ok(()),
        v => Err(Failure::new(1, format!("{v} lemma violations"))),
    }
}

fn experiment(cmd: &ExperimentCommand, jobs: usize) -> Outcome {
    match cmd {
        ExperimentCommand::Sweep { spec, out, json } => {
            let mut h = format!("experiment sweep --spec {} --jobs {jobs}", spec.display());
            if let Some(o) = out {
                h += &format!(" --out {}", o.display());
            }
            if let Some(j) = json {
                h += &format!(" --json {}", j.display());
            }
            header(&[h]);
            let spec = SweepSpec::from_json(&read(spec)?)?;
            eprintln!("# spec {}", serde_json::to_string(&spec)?);
            let rows = density_sweep(&spec)?;
            let mut buf = Vec::new();
            write_sweep_csv(&rows, &mut buf)?;
            emit(out.as_deref(), &String::from_utf8_lossy(&buf))?;
            if let Some(path) = json {
                emit(Some(path), &(serde_json::to_string_pretty(&rows)? + "\n"))?;
            }
            let exhausted: u64 = rows.iter().map(|r| r.exhausted).sum();
            if exhausted > 0 {
                eprintln!("# {exhausted} samples ran out of verifier budget (counted as not free)");
            }
            Ok(())
        }
        ExperimentCommand::Corollary { n } => {
            header(&[format!("experiment corollary --n {n}")]);
            let report = corollary_report(*n)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let jobs = match cli.jobs {
        Some(0) => return Err(Failure::new(2, "--jobs must be positive")),
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| Failure::new(1, e))?;
    match &cli.command {
        Command::Construct(a) => construct(a, jobs),
        Command::Verify(a) => verify(a),
        Command::Rho(a) => rho(a),
        Command::SumsetMin(a) => sumset_min(a),
        Command::EnumRect(a) => enum_rect(a),
        Command::Experiment { command } => experiment(command, jobs),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
