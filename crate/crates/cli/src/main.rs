//! `qcube` — batch verification harness for functional inequalities on the
//! quantum Boolean cube.
//!
//! Subcommands: `verify` (run the law suite), `tabulate` (evaluate named
//! constants over grids), `demo` (worked sharp examples), `search`
//! (extremizer descent). Exit codes: 0 all pass, 1 any law failed,
//! 2 configuration or usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use qcube::calculus::{self, SubsetMask};
use qcube::classical::{BooleanFn, VIMethod};
use qcube::constants::ConstantName;
use qcube::generators::{generate, GeneratorKind, GeneratorSpec};
use qcube::laws::{check_classical, check_quantum, Law, LawParams};
use qcube::report::{RunReport, SuiteConfig, Tolerances};
use qcube::search::{search_extremal, SearchConfig};
use qcube::suite::run_suite;

/// Environment variable naming the default output directory.
const OUT_ENV: &str = "QCUBE_OUT";

#[derive(Parser)]
#[command(name = "qcube", version, about = "Verify functional inequalities on the quantum Boolean cube")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the inequality suite and write a report plus per-law tables.
    Verify(VerifyArgs),
    /// Evaluate named constants over parameter grids.
    Tabulate(TabulateArgs),
    /// Print a worked sharp example end to end.
    Demo(DemoArgs),
    /// Search for extremal inputs of a law by margin descent.
    Search(SearchArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Named suite: `default` runs every law.
    #[arg(long)]
    suite: Option<String>,
    /// Comma-separated law IDs (e.g. `Q1,Q4,A3'`); empty string selects none.
    #[arg(long)]
    laws: Option<String>,
    /// Qubit range, `N` or `MIN..MAX` (inclusive).
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Force one generator family for all quantum trials.
    #[arg(long)]
    gen: Option<String>,
    #[arg(long, value_name = "LIST")]
    grid_p: Option<String>,
    #[arg(long, value_name = "LIST")]
    grid_q: Option<String>,
    #[arg(long, value_name = "LIST")]
    grid_alpha: Option<String>,
    #[arg(long, value_name = "LIST")]
    grid_t: Option<String>,
    /// Maximum coalition size k.
    #[arg(long)]
    grid_k: Option<usize>,
    #[arg(long)]
    tol_scalar: Option<f64>,
    #[arg(long)]
    tol_psd: Option<f64>,
    /// Output directory (default: $QCUBE_OUT or ./qcube-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TabulateArgs {
    /// Comma-separated constant names (default: all).
    #[arg(long)]
    names: Option<String>,
    /// Grid for p-parameterized constants.
    #[arg(long, value_name = "LIST")]
    grid_p: Option<String>,
    /// Grid for alpha-parameterized constants.
    #[arg(long, value_name = "LIST")]
    grid_alpha: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    /// One of: bell-sharpness, poincare-extremizer, appendix-maj3.
    name: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Law to search (quantum catalog).
    #[arg(long)]
    law: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    starts: usize,
    #[arg(long, default_value_t = 25)]
    iterations: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1.5)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    t: f64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Errors that should surface as exit code 2.
struct ConfigError(String);

impl<E: std::fmt::Display> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Tabulate(args) => cmd_tabulate(args),
        Command::Demo(args) => cmd_demo(args),
        Command::Search(args) => cmd_search(args),
    };
    match outcome {
        Ok(code) => code,
        Err(ConfigError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("qcube-out"))
}

/// Writes atomically: temp file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> Result<(), ConfigError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(|e| ConfigError(format!("creating {}: {e}", dir.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    ));
    fs::write(&tmp, contents).map_err(|e| ConfigError(format!("writing {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| ConfigError(format!("renaming to {}: {e}", path.display())))?;
    Ok(())
}

fn parse_list(text: &str) -> Result<Vec<f64>, ConfigError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|e| ConfigError(format!("bad grid value {s:?}: {e}"))))
        .collect()
}

fn parse_range(text: &str) -> Result<(usize, usize), ConfigError> {
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        Ok((lo.trim().parse()?, hi.trim().parse()?))
    } else {
        let n: usize = text.parse()?;
        Ok((n, n))
    }
}

fn all_law_ids() -> Vec<String> {
    Law::QUANTUM
        .iter()
        .chain(Law::CLASSICAL.iter())
        .map(|l| l.id().to_string())
        .collect()
}

fn build_config(args: &VerifyArgs) -> Result<SuiteConfig, ConfigError> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("reading {}: {e}", path.display())))?;
            serde_json::from_str::<SuiteConfig>(&text)
                .map_err(|e| ConfigError(format!("parsing {}: {e}", path.display())))?
        }
        None => SuiteConfig::default(),
    };
    match args.suite.as_deref() {
        Some("default") => config.laws = all_law_ids(),
        Some(other) => return Err(ConfigError(format!("unknown suite {other:?}"))),
        None => {
            if args.config.is_none() && args.laws.is_none() {
                config.laws = all_law_ids();
            }
        }
    }
    if let Some(laws) = &args.laws {
        config.laws = laws
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
    }
    if let Some(range) = &args.n {
        let (lo, hi) = parse_range(range)?;
        config.n_min = lo;
        config.n_max = hi;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(gen) = &args.gen {
        config.generator = Some(gen.clone());
    }
    if let Some(g) = &args.grid_p {
        config.grid_p = parse_list(g)?;
    }
    if let Some(g) = &args.grid_q {
        config.grid_q = parse_list(g)?;
    }
    if let Some(g) = &args.grid_alpha {
        config.grid_alpha = parse_list(g)?;
    }
    if let Some(g) = &args.grid_t {
        config.grid_t = parse_list(g)?;
    }
    if let Some(k) = args.grid_k {
        config.k_max = k;
    }
    if let Some(tol) = args.tol_scalar {
        config.tolerances.scalar = tol;
    }
    if let Some(tol) = args.tol_psd {
        config.tolerances.psd = tol;
    }
    Ok(config)
}

/// File-system-safe form of a law ID (`A3'` → `A3prime`).
fn law_file_stem(id: &str) -> String {
    id.replace('\'', "prime")
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, ConfigError> {
    let dir = out_dir(args.out.clone());
    let config = build_config(&args)?;
    config.validate()?;
    let report = run_suite(&config)?;

    write_atomic(&dir.join("report.json"), &report.canonical_json()?)?;
    for summary in &report.laws {
        let csv = RunReport::law_csv(summary);
        write_atomic(&dir.join(format!("law_{}.csv", law_file_stem(&summary.law_id))), &csv)?;
    }

    for summary in &report.laws {
        println!(
            "{:<4} checks {:>5}  passes {:>5}  failures {:>3}  skips {:>4}  worst margin {:+.6e}",
            summary.law_id,
            summary.checks,
            summary.passes,
            summary.failures,
            summary.skips,
            summary.worst_margin,
        );
    }
    println!(
        "total: {} checks, {} failures ({} ms); report in {}",
        report.total_checks,
        report.total_failures,
        report.wall_time_ms,
        dir.display()
    );
    Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_tabulate(args: TabulateArgs) -> Result<ExitCode, ConfigError> {
    let dir = out_dir(args.out.clone());
    let names: Vec<ConstantName> = match &args.names {
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(ConstantName::from_str)
            .collect::<Result<_, _>>()?,
        None => ConstantName::ALL.to_vec(),
    };
    let grid_p = match &args.grid_p {
        Some(g) => parse_list(g)?,
        None => vec![1.0, 1.25, 1.5, 1.75, 2.0],
    };
    let grid_alpha = match &args.grid_alpha {
        Some(g) => parse_list(g)?,
        None => vec![0.0, 0.25, 0.5, 1.0],
    };

    let mut out = String::from("constant,arg,value\n");
    for name in &names {
        let grid: &[f64] = match name {
            ConstantName::LpPoincare => &grid_alpha,
            ConstantName::G1Integral => &[f64::NAN],
            _ => &grid_p,
        };
        for &arg in grid {
            let value = name.evaluate(arg)?;
            // 12 significant digits.
            let arg_text = if arg.is_nan() { String::from("-") } else { format!("{arg}") };
            let row = format!("{},{},{:.11e}\n", name.label(), arg_text, value);
            print!("{row}");
            out.push_str(&row);
        }
    }
    write_atomic(&dir.join("constants.csv"), &out)?;
    println!("table in {}", dir.join("constants.csv").display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_demo(args: DemoArgs) -> Result<ExitCode, ConfigError> {
    let dir = out_dir(args.out.clone());
    let tol = Tolerances::default();
    let records = match args.name.as_str() {
        "bell-sharpness" => {
            let spec = GeneratorSpec::new(GeneratorKind::Bell, 2, 0);
            let a = generate(&spec)?;
            println!("Bell projector P = |phi+><phi+| on two qubits; Var(P) = {}", calculus::variance(&a));
            let j = SubsetMask::singleton(2, 0)?;
            let d = calculus::derivative(&a, &j)?;
            let abs_sq = d.adjoint().mul(&d)?;
            let top = abs_sq.operator_norm()?;
            println!("|d_1 P|^2 has top eigenvalue {top} (= 9/16)");
            let stats = calculus::variance_stats(&a, 0)?;
            let var1 = stats.var_j.operator_norm()?;
            println!("Var_1(P) = {var1} x identity, so 3 Var_1(P) = {} matches it", 3.0 * var1);
            let records = check_quantum(Law::Q4, &a, &LawParams::default(), &tol)?;
            for rec in &records {
                println!("Q4 site {}: margin {:+.3e} (sharp)", rec.params["j"], rec.margin);
            }
            records
        }
        "poincare-extremizer" => {
            let spec = GeneratorSpec::new(GeneratorKind::PauliCharacter { entries: vec![3] }, 1, 0);
            let a = generate(&spec)?;
            println!("Level-1 character sigma_3 on one qubit: Var = {}", calculus::variance(&a));
            let params = LawParams { t: 0.7, ..Default::default() };
            let records = check_quantum(Law::Q1, &a, &params, &tol)?;
            for rec in &records {
                println!(
                    "Q1 at t = 0.7: e^(-2t) Var = {:.12e}, Var(P_t A) = {:.12e}, margin {:+.3e}",
                    rec.lhs, rec.rhs, rec.margin
                );
            }
            records
        }
        "appendix-maj3" => {
            let f = BooleanFn::majority3();
            println!("Majority on three bits: Var = {}", f.variance());
            for i in 0..3 {
                let vi = f.v_i(i, VIMethod::Fourier)?;
                println!("V_{}(f) = {vi} (= 1/3)", i + 1);
            }
            let params = LawParams { p: 1.0, q: 1.0, ..Default::default() };
            let records = check_classical(Law::A6, &f, &params, &tol)?;
            for rec in &records {
                println!(
                    "A6 coordinate {}: bound {:.12e} >= V_i {:.12e}, margin {:+.3e}",
                    rec.params["i"], rec.lhs, rec.rhs, rec.margin
                );
            }
            records
        }
        other => return Err(qcube::Error::UnknownDemo(other.to_string()).into()),
    };
    let json = serde_json::to_string_pretty(&records)?;
    write_atomic(&dir.join(format!("demo_{}.json", args.name)), &json)?;
    println!("records in {}", dir.join(format!("demo_{}.json", args.name)).display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_search(args: SearchArgs) -> Result<ExitCode, ConfigError> {
    let dir = out_dir(args.out.clone());
    let law: Law = args.law.parse()?;
    let config = SearchConfig {
        n: args.n,
        random_starts: args.starts,
        iterations: args.iterations,
        seed: args.seed,
        params: LawParams {
            p: args.p,
            q: args.q,
            alpha: args.alpha,
            beta: 0.0,
            t: args.t,
            k: args.k,
        },
        tolerances: Tolerances::default(),
    };
    let results = search_extremal(law, &config)?;
    for r in &results {
        println!(
            "{law}: start {:<18} margin {:+.6e} verified {}",
            r.start, r.margin, r.verified
        );
    }
    let json = serde_json::to_string_pretty(&results)?;
    write_atomic(&dir.join(format!("search_{}.json", law_file_stem(law.id()))), &json)?;
    Ok(ExitCode::SUCCESS)
}
