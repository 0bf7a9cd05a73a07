//! Command-line front end: convergence studies, direct-vs-FFT benchmarks,
//! PDE solves (built-in cases or JSON config files), operational matrix
//! dumps, and the acceptance self-test.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 self-test failure.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use caputo_ade::acceptance;
use caputo_ade::error::Error;
use caputo_ade::expr::parse_expression;
use caputo_ade::grid::build_time_grid;
use caputo_ade::opmatrix::build_operational_matrix;
use caputo_ade::study::{
    case_from_config, edp1, edp2, edp3, pde_csv, run_caputo_study, run_pde_case,
    run_speed_benchmark, study_csv, Method, PdeCase, TestFunction, EDP1_DEFAULT_SCALE,
};

#[derive(Parser)]
#[command(name = "caputo-ade", version, about = "Caputo fractional derivative toolkit")]
struct Cli {
    /// Run the acceptance suite and exit (exit code 4 on any failure).
    #[arg(long)]
    self_test: bool,
    /// Worker threads for study cells. Accepted for interface stability;
    /// cells currently run sequentially, which keeps output deterministic.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence study of the Caputo evaluators against exact references.
    CaputoStudy(StudyArgs),
    /// Time the direct quadratic scheme against the FFT fast path.
    SpeedBench(BenchArgs),
    /// Solve an advection-diffusion problem (built-in case or config file).
    Solve(SolveArgs),
    /// Print the operational matrix for a given (alpha, N, tf).
    OpmatrixDump(DumpArgs),
}

#[derive(Args)]
struct StudyArgs {
    /// Single fractional order (shorthand for --alphas with one value).
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated fractional orders in (0,1).
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    /// Single grid size (shorthand for --ns with one value).
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated grid sizes.
    #[arg(long, value_delimiter = ',')]
    ns: Vec<usize>,
    /// Final time of the grid.
    #[arg(long, default_value_t = 1.2)]
    tf: f64,
    /// Comma-separated methods: linear, quadratic, star, fft.
    #[arg(long, value_delimiter = ',', default_value = "quadratic")]
    method: Vec<String>,
    /// Test function: "exp2t", "monomial:<beta>", or an expression in t.
    #[arg(long, default_value = "exp2t")]
    function: String,
    /// Exact Caputo derivative expression in (t, alpha); required when
    /// --function is a free-form expression.
    #[arg(long)]
    exact: Option<String>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 0.17)]
    alpha: f64,
    /// Comma-separated grid sizes, ascending.
    #[arg(long, value_delimiter = ',')]
    ns: Vec<usize>,
    #[arg(long, default_value_t = 1.2)]
    tf: f64,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Built-in case name: edp1, edp2, or edp3.
    #[arg(long, conflicts_with = "config")]
    case: Option<String>,
    /// JSON problem description (see the config schema in the README).
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    /// Override the fractional order of a built-in case.
    #[arg(long)]
    alpha: Option<f64>,
    /// Time steps.
    #[arg(long)]
    nt: Option<usize>,
    /// Spatial collocation degree.
    #[arg(long)]
    nx: Option<usize>,
    /// Hermite stretch factor for real-line problems.
    #[arg(long)]
    hermite_scale: Option<f64>,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    tf: f64,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

/// Splits failures into configuration errors (exit 2) and numerical
/// failures (exit 3).
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Parse { .. } | Error::InvalidArgument(_) => 2,
        _ => 3,
    }
}

fn emit(text: &str, out: Option<&std::path::Path>) -> Result<(), Error> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display()))),
    }
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>, Error> {
    names.iter().map(|s| s.parse()).collect()
}

fn collect_sizes(n: Option<usize>, ns: &[usize], what: &str) -> Result<Vec<usize>, Error> {
    let mut sizes: Vec<usize> = ns.to_vec();
    if let Some(n) = n {
        sizes.push(n);
    }
    if sizes.is_empty() {
        return Err(Error::Config(format!("no {what} given (use --n or --ns)")));
    }
    sizes.sort_unstable();
    sizes.dedup();
    Ok(sizes)
}

fn run_study(args: &StudyArgs) -> Result<(), Error> {
    let mut alphas = args.alphas.clone();
    if let Some(a) = args.alpha {
        alphas.push(a);
    }
    if alphas.is_empty() {
        return Err(Error::Config("no alpha given (use --alpha or --alphas)".into()));
    }
    let ns = collect_sizes(args.n, &args.ns, "grid sizes")?;
    let methods = parse_methods(&args.method)?;
    let function = match args.function.as_str() {
        "exp2t" => TestFunction::Exp2t,
        s if s.starts_with("monomial:") => {
            let beta: f64 = s["monomial:".len()..]
                .parse()
                .map_err(|_| Error::Config(format!("bad monomial exponent in {s:?}")))?;
            TestFunction::Monomial(beta)
        }
        s => TestFunction::Expression {
            f: parse_expression(s)?,
            exact: args.exact.as_deref().map(parse_expression).transpose()?,
        },
    };
    let result = run_caputo_study(&alphas, &ns, args.tf, &function, &methods)?;
    let mut text = study_csv(&result);
    for f in &result.fits {
        writeln!(
            text,
            "# alpha {} method {}: slope {:.4}, pearson {:.7}",
            f.alpha,
            f.method.as_str(),
            f.fit.slope,
            f.fit.pearson
        )
        .expect("string write");
    }
    emit(&text, args.out.as_deref())
}

fn run_bench(args: &BenchArgs) -> Result<(), Error> {
    if args.ns.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("--ns must be sorted ascending".into()));
    }
    let result = run_speed_benchmark(args.alpha, &args.ns, args.tf)?;
    emit(&study_csv(&result), args.out.as_deref())
}

fn build_case(args: &SolveArgs) -> Result<PdeCase, Error> {
    if let Some(path) = &args.config {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "config".into());
        return case_from_config(&src, &name);
    }
    let name = args
        .case
        .as_deref()
        .ok_or_else(|| Error::Config("solve needs --case or --config".into()))?;
    match name {
        "edp1" => edp1(
            args.alpha.unwrap_or(0.17),
            args.nt.unwrap_or(2700),
            args.nx.unwrap_or(16),
            args.hermite_scale.unwrap_or(EDP1_DEFAULT_SCALE),
        ),
        "edp2" => edp2(
            args.alpha.unwrap_or(0.17),
            args.nt.unwrap_or(2700),
            args.nx.unwrap_or(15),
        ),
        "edp3" => edp3(
            args.alpha.unwrap_or(0.338),
            args.nt.unwrap_or(3500),
            args.nx.unwrap_or(10),
        ),
        other => Err(Error::Config(format!(
            "unknown case {other:?} (expected edp1, edp2, or edp3)"
        ))),
    }
}

fn run_solve(args: &SolveArgs) -> Result<(), Error> {
    let case = build_case(args)?;
    let result = run_pde_case(&case)?;
    emit(&pde_csv(std::slice::from_ref(&result)), args.out.as_deref())
}

fn run_dump(args: &DumpArgs) -> Result<(), Error> {
    let grid = build_time_grid(args.tf, args.n)?;
    let op = build_operational_matrix(args.alpha, &grid)?;
    let mut text = String::new();
    for i in 0..op.m.rows() {
        let row: Vec<String> = op.m.row(i).iter().map(|v| format!("{v:e}")).collect();
        writeln!(text, "{}", row.join(",")).expect("string write");
    }
    emit(&text, args.out.as_deref())
}

fn run_self_test() -> u8 {
    let outcomes = acceptance::run_all();
    let mut failed = 0;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{status}] {}: {}", o.id, o.name, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("self-test: all {} criteria passed", outcomes.len());
        0
    } else {
        println!("self-test: {failed} of {} criteria failed", outcomes.len());
        4
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.self_test {
        return ExitCode::from(run_self_test());
    }
    let result = match &cli.command {
        None => {
            eprintln!("nothing to do: pass a subcommand or --self-test (see --help)");
            return ExitCode::from(2);
        }
        Some(Command::CaputoStudy(args)) => run_study(args),
        Some(Command::SpeedBench(args)) => run_bench(args),
        Some(Command::Solve(args)) => run_solve(args),
        Some(Command::OpmatrixDump(args)) => run_dump(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
