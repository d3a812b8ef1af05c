//! Command-line front end.
//!
//! Exit codes: 0 success, 1 internal consistency failure, 2 usage or
//! validation error, 3 tie in the data.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use exceedance::asymptotics::{
    beta_moment_fit, density_csv, symmetric_case_table, AsymptoticsError, RescaledDensity,
};
use exceedance::counting::{pmf, pmf_any_order, ComparisonSpec, CountingError, PmfTable};
use exceedance::exactmath::significant_decimal;
use exceedance::inference::{read_sample_file, run_test, Alternative, InferenceError, TWO_SIDED_CONVENTION};
use exceedance::montecarlo::{simulate_pmf, six_sigma_tolerance, SimulationError, SourceDistribution, RNG_ALGORITHM};
use exceedance::paths::{enumerate_exceedance_histogram, PathError, DEFAULT_ENUMERATION_CAP};

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<CountingError> for Failure {
    fn from(e: CountingError) -> Self {
        match e {
            CountingError::SumMismatch { .. } => Failure::internal(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<PathError> for Failure {
    fn from(e: PathError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<SimulationError> for Failure {
    fn from(e: SimulationError) -> Self {
        match e {
            SimulationError::Tie { .. } => Failure { code: 3, message: e.to_string() },
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<InferenceError> for Failure {
    fn from(e: InferenceError) -> Self {
        match e {
            InferenceError::Tie { .. } => Failure { code: 3, message: e.to_string() },
            InferenceError::Spec(inner) => inner.into(),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<AsymptoticsError> for Failure {
    fn from(e: AsymptoticsError) -> Self {
        match e {
            AsymptoticsError::Spec(inner) => inner.into(),
            _ => Failure::usage(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlternativeArg {
    Less,
    Greater,
    TwoSided,
}

impl From<AlternativeArg> for Alternative {
    fn from(a: AlternativeArg) -> Self {
        match a {
            AlternativeArg::Less => Alternative::Less,
            AlternativeArg::Greater => Alternative::Greater,
            AlternativeArg::TwoSided => Alternative::TwoSided,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    Exponential,
    Normal,
    Pareto,
}

impl From<DistArg> for SourceDistribution {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Uniform => SourceDistribution::Uniform,
            DistArg::Exponential => SourceDistribution::Exponential,
            DistArg::Normal => SourceDistribution::Normal,
            DistArg::Pareto => SourceDistribution::Pareto,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "exceedance", about = "Exact comparison of bottom-k order statistics of two samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SpecArgs {
    /// Size of sample X
    #[arg(long)]
    m: usize,
    /// Size of sample Y
    #[arg(long)]
    n: usize,
    /// Number of order-statistic comparisons
    #[arg(long)]
    k: usize,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
    format: OutputFormat,
    /// Fractional digits for decimal renderings
    #[arg(long, default_value_t = 6)]
    digits: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact distribution of L = #{i <= k : X(i) < Y(i)}
    Pmf {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Accept m > n by reflecting the (n, m, k) distribution
        #[arg(long)]
        allow_swap: bool,
    },
    /// Brute-force histogram over all lattice paths, checked against the closed form
    Enumerate {
        #[command(flatten)]
        spec: SpecArgs,
        /// Largest m + n to enumerate
        #[arg(long, env = "EXCEEDANCE_ENUM_CAP", default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        format: OutputFormat,
    },
    /// Exact two-sample test on sample files
    Test {
        #[arg(long)]
        x_file: PathBuf,
        #[arg(long)]
        y_file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = AlternativeArg::Greater)]
        alternative: AlternativeArg,
        #[command(flatten)]
        output: OutputArgs,
        /// Accept |x| > |y|
        #[arg(long)]
        allow_swap: bool,
    },
    /// Monte Carlo estimate of the distribution
    Simulate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
        dist: DistArg,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Distribution of T_2k, the time the associated walk spends above zero in its first 2k steps
    Walk {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        allow_swap: bool,
    },
    /// Rescaled densities, beta fits and arcsine comparison
    Asymptotics {
        /// Comma-separated k values for the (2k, 2k, k) summary
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["m", "n", "k"], required_unless_present_all = ["m", "n", "k"])]
        k_list: Option<Vec<usize>>,
        #[arg(long, requires_all = ["n", "k"])]
        m: Option<usize>,
        #[arg(long, requires_all = ["m", "k"])]
        n: Option<usize>,
        #[arg(long, requires_all = ["m", "n"])]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
}

fn resolve_table(spec: &SpecArgs, allow_swap: bool) -> Result<PmfTable, Failure> {
    if spec.m > spec.n && !allow_swap {
        return Err(Failure::usage(format!(
            "m = {} exceeds n = {}; pass --allow-swap to use the reflected distribution",
            spec.m, spec.n
        )));
    }
    Ok(pmf_any_order(spec.m, spec.n, spec.k)?)
}

fn string_map<T: ToString>(items: impl IntoIterator<Item = (String, T)>) -> Value {
    Value::Object(items.into_iter().map(|(k, v)| (k, Value::String(v.to_string()))).collect::<Map<_, _>>())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_pmf(spec: SpecArgs, output: OutputArgs, allow_swap: bool) -> Result<String, Failure> {
    let table = resolve_table(&spec, allow_swap)?;
    let digits = output.digits;
    Ok(match output.format {
        OutputFormat::Json => {
            let mut v = table.to_json();
            v["probs_decimal"] = string_map(
                table.probs().iter().enumerate().map(|(l, p)| (l.to_string(), p.to_decimal(digits))),
            );
            pretty(&v)
        }
        OutputFormat::Csv => table.to_csv(digits),
        OutputFormat::Human => {
            let mut s = format!(
                "m = {}, n = {}, k = {}, total paths = {}\n",
                table.m(),
                table.n(),
                table.k(),
                table.total()
            );
            if table.m() > table.n() {
                s.push_str("(computed from the reflected (n, m, k) distribution)\n");
            }
            s.push_str("l\tcount\tPr(L = l)\n");
            for (l, (c, p)) in table.counts().iter().zip(table.probs()).enumerate() {
                writeln!(s, "{l}\t{c}\t{p} ~ {}", p.to_decimal(digits)).unwrap();
            }
            s
        }
    })
}

fn cmd_enumerate(spec: SpecArgs, cap: usize, format: OutputFormat) -> Result<(String, bool), Failure> {
    let hist = enumerate_exceedance_histogram(spec.m, spec.n, spec.k, cap)?;
    let table = pmf(&ComparisonSpec::new(spec.m, spec.n, spec.k)?)?;
    let matched = (0..=spec.k).all(|l| hist.get(l) == table.counts()[l]);
    let status = if matched { "MATCH" } else { "MISMATCH" };
    let out = match format {
        OutputFormat::Json => pretty(&json!({
            "m": spec.m,
            "n": spec.n,
            "k": spec.k,
            "cap": cap,
            "enumerated": hist.to_json(),
            "closed_form": table.to_json()["counts"],
            "status": status,
        })),
        OutputFormat::Csv => {
            let mut s = String::from("l,enumerated,closed_form,match\n");
            for l in 0..=spec.k {
                let (e, c) = (hist.get(l), &table.counts()[l]);
                writeln!(s, "{l},{e},{c},{}", e == *c).unwrap();
            }
            s
        }
        OutputFormat::Human => {
            let mut s = format!("m = {}, n = {}, k = {}: enumerated {} paths\n", spec.m, spec.n, spec.k, hist.total());
            s.push_str("l\tenumerated\tclosed form\n");
            for l in 0..=spec.k {
                writeln!(s, "{l}\t{}\t{}", hist.get(l), table.counts()[l]).unwrap();
            }
            s.push_str(status);
            s.push('\n');
            s
        }
    };
    Ok((out, matched))
}

fn cmd_test(
    x_file: PathBuf,
    y_file: PathBuf,
    k: usize,
    alternative: Alternative,
    output: OutputArgs,
    allow_swap: bool,
) -> Result<String, Failure> {
    let x = read_sample_file(&x_file)?;
    let y = read_sample_file(&y_file)?;
    if x.len() > y.len() && !allow_swap {
        return Err(Failure::usage(format!(
            "x sample ({}) is larger than y sample ({}); pass --allow-swap to use the reflected distribution",
            x.len(),
            y.len()
        )));
    }
    let report = run_test(&x, &y, k, alternative)?;
    let digits = output.digits;
    Ok(match output.format {
        OutputFormat::Json => pretty(&report.to_json(digits)),
        OutputFormat::Csv => format!(
            "m,n,k,observed_l,alternative,p_value,p_value_decimal,reduction\n{},{},{},{},{},{},{},{}\n",
            report.m(),
            report.n(),
            report.k(),
            report.observed_l,
            report.alternative,
            report.p_value,
            report.p_value.to_decimal(digits),
            report.reduction().as_str()
        ),
        OutputFormat::Human => {
            let mut s = format!(
                "m = {}, n = {}, k = {}\nobserved l = {}\nalternative = {}\np-value = {} ~ {}\nnull distribution: {}\n",
                report.m(),
                report.n(),
                report.k(),
                report.observed_l,
                report.alternative,
                report.p_value,
                report.p_value.to_decimal(digits),
                report.reduction().as_str()
            );
            if report.alternative == Alternative::TwoSided {
                writeln!(s, "two-sided convention: {TWO_SIDED_CONVENTION}").unwrap();
            }
            s
        }
    })
}

fn cmd_simulate(spec: SpecArgs, dist: SourceDistribution, trials: u64, seed: u64, output: OutputArgs) -> Result<String, Failure> {
    let spec = ComparisonSpec::new(spec.m, spec.n, spec.k)?;
    let exact = pmf(&spec)?;
    let sim = simulate_pmf(&spec, dist, trials, seed)?;
    let deviation = sim.max_abs_deviation(exact.probs());
    let digits = output.digits;
    Ok(match output.format {
        OutputFormat::Json => {
            let mut v = sim.to_json(digits);
            v["exact_probs"] = exact.to_json()["probs"].clone();
            v["max_abs_deviation"] = json!(format!("{deviation:.3e}"));
            v["tolerance_6sigma"] = string_map(
                exact.probs().iter().enumerate().map(|(l, p)| (l.to_string(), format!("{:.3e}", six_sigma_tolerance(p, trials)))),
            );
            pretty(&v)
        }
        OutputFormat::Csv => {
            let mut s = String::from("l,count,prob_exact,prob_decimal,exact_prob,abs_deviation\n");
            for (l, f) in sim.exact_frequencies().iter().enumerate() {
                let p = &exact.probs()[l];
                writeln!(
                    s,
                    "{l},{},{f},{},{p},{:.3e}",
                    sim.counts[l],
                    f.to_decimal(digits),
                    (sim.frequency(l) - p.to_f64()).abs()
                )
                .unwrap();
            }
            s
        }
        OutputFormat::Human => {
            let mut s = format!(
                "m = {}, n = {}, k = {}, dist = {}, trials = {}, seed = {}\n",
                spec.m(),
                spec.n(),
                spec.k(),
                dist,
                trials,
                seed
            );
            s.push_str("l\tfrequency\texact\n");
            for (l, p) in exact.probs().iter().enumerate() {
                writeln!(s, "{l}\t{}\t{p} ~ {}", sim.exact_frequencies()[l].to_decimal(digits), p.to_decimal(digits)).unwrap();
            }
            writeln!(s, "max |deviation| = {deviation:.3e}").unwrap();
            writeln!(s, "ties resampled = {}", sim.ties_resampled).unwrap();
            s
        }
    })
}

fn cmd_walk(spec: SpecArgs, output: OutputArgs, allow_swap: bool) -> Result<String, Failure> {
    let table = resolve_table(&spec, allow_swap)?;
    let digits = output.digits;
    let rows: Vec<(usize, String, String)> = table
        .probs()
        .iter()
        .enumerate()
        .map(|(l, p)| (2 * l, p.to_string(), p.to_decimal(digits)))
        .collect();
    Ok(match output.format {
        OutputFormat::Json => pretty(&json!({
            "m": table.m(),
            "n": table.n(),
            "k": table.k(),
            "steps": 2 * table.k(),
            "t2k": string_map(rows.iter().map(|(t, p, _)| (t.to_string(), p))),
        })),
        OutputFormat::Csv => {
            let mut s = String::from("t2k,prob_exact,prob_decimal\n");
            for (t, p, d) in &rows {
                writeln!(s, "{t},{p},{d}").unwrap();
            }
            s
        }
        OutputFormat::Human => {
            let mut s = format!(
                "walks of {} steps ending at {}; time above zero in the first {} steps\n",
                table.m() + table.n(),
                table.m() as i64 - table.n() as i64,
                2 * table.k()
            );
            s.push_str("T\tPr(T_2k = T)\n");
            for (t, p, d) in &rows {
                writeln!(s, "{t}\t{p} ~ {d}").unwrap();
            }
            s
        }
    })
}

fn cmd_asymptotics(
    k_list: Option<Vec<usize>>,
    triple: Option<(usize, usize, usize)>,
    format: OutputFormat,
) -> Result<String, Failure> {
    if let Some(ks) = k_list {
        if ks.is_empty() {
            return Err(Failure::usage("empty --k-list"));
        }
        let table = symmetric_case_table(&ks)?;
        return Ok(match format {
            OutputFormat::Json => pretty(&table.to_json()),
            OutputFormat::Csv => table.to_csv(),
            OutputFormat::Human => {
                let mut s = String::from("k\tsup |F - arcsine|\tbeta alpha\tbeta beta\n");
                for r in &table.rows {
                    let fit = r
                        .fit
                        .map(|f| format!("{:.6}\t{:.6}", f.alpha, f.beta_param))
                        .unwrap_or_else(|| "-\t-".to_string());
                    writeln!(s, "{}\t{:.6e}\t{fit}", r.k, r.sup_distance).unwrap();
                }
                writeln!(s, "distance non-increasing in k: {}", table.monotone_non_increasing()).unwrap();
                s
            }
        });
    }
    let (m, n, k) = triple.ok_or_else(|| Failure::usage("pass --k-list or all of --m, --n, --k"))?;
    let spec = ComparisonSpec::new(m, n, k)?;
    let density = RescaledDensity::from_table(&pmf(&spec)?);
    let fit = beta_moment_fit(&density)?;
    Ok(match format {
        OutputFormat::Csv => density_csv(&density, Some(&fit)),
        OutputFormat::Json => {
            let points: Vec<Value> = density
                .rendered()
                .into_iter()
                .zip(&density.points)
                .map(|((x, d), (_, exact))| json!({"x": x, "density": d, "density_exact": exact.to_string()}))
                .collect();
            pretty(&json!({
                "m": m,
                "n": n,
                "k": k,
                "points": points,
                "mass": density.mass().to_string(),
                "beta_fit": {
                    "alpha": fit.alpha,
                    "beta": fit.beta_param,
                    "mean": fit.mean,
                    "variance": fit.variance,
                },
            }))
        }
        OutputFormat::Human => {
            let mut s = String::from("x\tdensity\n");
            for (x, d) in density.rendered() {
                writeln!(s, "{x}\t{d}").unwrap();
            }
            writeln!(
                s,
                "beta fit: alpha = {:.6}, beta = {:.6} (mean {}, variance {})",
                fit.alpha,
                fit.beta_param,
                significant_decimal(&density.moments().0, 15),
                significant_decimal(&density.moments().1, 15)
            )
            .unwrap();
            s
        }
    })
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Pmf { spec, output, allow_swap } => cmd_pmf(spec, output, allow_swap),
        Command::Enumerate { spec, cap, format } => {
            let (out, matched) = cmd_enumerate(spec, cap, format)?;
            if matched {
                Ok(out)
            } else {
                print!("{out}");
                Err(Failure::internal("enumeration disagrees with the closed form"))
            }
        }
        Command::Test { x_file, y_file, k, alternative, output, allow_swap } => {
            cmd_test(x_file, y_file, k, alternative.into(), output, allow_swap)
        }
        Command::Simulate { spec, dist, trials, seed, output } => {
            cmd_simulate(spec, dist.into(), trials, seed, output)
        }
        Command::Walk { spec, output, allow_swap } => cmd_walk(spec, output, allow_swap),
        Command::Asymptotics { k_list, m, n, k, format } => {
            let triple = match (m, n, k) {
                (Some(m), Some(n), Some(k)) => Some((m, n, k)),
                _ => None,
            };
            cmd_asymptotics(k_list, triple, format)
        }
    }
}

fn main() -> ExitCode {
    let version = format!("{}\nrng: {RNG_ALGORITHM}", env!("CARGO_PKG_VERSION"));
    let matches = Cli::command().version(version).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
