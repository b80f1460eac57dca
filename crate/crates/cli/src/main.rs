use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use posort::quantum::{tech_constant, VerifyOptions, DEFAULT_MATRIX_CAP};
use posort::report::format_real;
use posort::suites::{self, SuiteConfig};
use posort::{analyze, parse_sp, AnalyzeOptions, Limits, Poset};

/// Classical and quantum lower bounds for sorting under partial information.
#[derive(Parser, Debug)]
#[command(name = "posort", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute every bound for one poset.
    Analyze(AnalyzeArgs),
    /// Run a property suite: lemmas, polytopes, orderstats, sp, adversary or all.
    Verify(VerifyArgs),
    /// Scan the Stirling ratio over 1 <= n1 <= n2 <= max-n.
    TechConstant(TechArgs),
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = 1e-8, value_parser = positive_real)]
    tol: f64,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Poset file: `n` on the first line, then `i j` per relation (1-based).
    #[arg(conflicts_with = "expr", required_unless_present = "expr")]
    file: Option<PathBuf>,
    /// Inline series-parallel expression, e.g. "(. * .) + .".
    #[arg(long)]
    expr: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Largest accepted poset.
    #[arg(long)]
    max_n: Option<usize>,
    /// Largest extension count that is enumerated.
    #[arg(long)]
    max_extensions: Option<u64>,
    /// Largest adversary matrix dimension.
    #[arg(long)]
    matrix_cap: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    suite: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct TechArgs {
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(2..))]
    max_n: u64,
    /// Write the ratio table here instead of standard output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

fn positive_real(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be a positive number".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors share the input-error code; 2 means a failed check
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Verify(args) => run_verify(args),
        Command::TechConstant(args) => run_tech(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run_analyze(args: AnalyzeArgs) -> posort::Result<ExitCode> {
    let mut limits = Limits::default();
    let mut matrix_cap = DEFAULT_MATRIX_CAP;
    if let Some(n) = args.max_n {
        eprintln!("warning: element limit raised from {} to {n}", limits.max_elements);
        limits.max_elements = n;
    }
    if let Some(m) = args.max_extensions {
        eprintln!("warning: enumeration limit changed from {} to {m}", limits.max_enumeration);
        limits.max_enumeration = m;
    }
    if let Some(c) = args.matrix_cap {
        eprintln!("warning: adversary matrix cap changed from {matrix_cap} to {c}");
        matrix_cap = c;
    }
    let poset = match (&args.file, &args.expr) {
        (_, Some(text)) => parse_sp(text)?.realize(),
        (Some(path), None) => Poset::read_file(path)?,
        (None, None) => unreachable!("clap requires one input"),
    };
    if poset.n() > limits.max_elements {
        return Err(posort::Error::LimitExceeded {
            what: "poset size",
            value: poset.n().to_string(),
            limit: limits.max_elements.to_string(),
        });
    }
    let opts = AnalyzeOptions {
        limits,
        matrix_cap,
        tol: args.common.tol,
        verify: VerifyOptions {
            power: posort::quantum::PowerOptions {
                seed: args.common.seed,
                ..Default::default()
            },
            ..VerifyOptions::default()
        },
    };
    let report = analyze(&poset, &opts)?;
    match args.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Csv => print!("{}", report.to_csv()),
        Format::Text => print!("{}", report.to_text()),
    }
    Ok(if report.all_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn run_verify(args: VerifyArgs) -> posort::Result<ExitCode> {
    let selected = suites::select(&args.suite)?;
    let cfg = SuiteConfig {
        seed: args.common.seed,
        samples: args.common.samples as usize,
        tol: args.common.tol,
    };
    let mut failed = 0;
    let mut total = 0;
    for suite in selected {
        for outcome in suites::run(suite, &cfg) {
            total += 1;
            let status = if outcome.passed { "PASS" } else { "FAIL" };
            failed += !outcome.passed as usize;
            println!("{status} [{}] {}: {}", outcome.suite, outcome.name, outcome.detail);
        }
    }
    println!("{} of {total} properties passed", total - failed);
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn run_tech(args: TechArgs) -> posort::Result<ExitCode> {
    let tc = tech_constant(args.max_n as usize)?;
    let mut table = String::from("n1,n2,ratio\n");
    for r in &tc.ratios {
        table.push_str(&format!("{},{},{}\n", r.n1, r.n2, format_real(r.ratio).unwrap_or_default()));
    }
    println!("c_min = {}", format_real(tc.c_min).unwrap_or_default());
    println!("argmin = ({}, {})", tc.argmin.0, tc.argmin.1);
    match args.csv {
        Some(path) => fs::write(path, table)?,
        None => print!("{table}"),
    }
    Ok(ExitCode::SUCCESS)
}
