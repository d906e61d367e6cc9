use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use hyperconnect::connection::{build, MatrixKind};
use hyperconnect::oracle::{default_tolerance, integrate_loaded_domain, DomainSpec, Family};
use hyperconnect::series::{component, eval_ghs, prefactor, solution_vector, Point, SeriesOptions};
use hyperconnect::verify::{run_suites, sample_parameters, Suite, SuiteInput, VerificationReport, Z_BEYOND, Z_GRID, Z_NEGATIVE};
use hyperconnect::{Parameters, SolutionVector};

use crate::input::{parse_complex, resolve_params};
use crate::Failure;

#[derive(Debug, Parser)]
#[command(name = "hyperconnect", version, about = "Solutions and connection matrices of the generalized hypergeometric equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Beta-normalized solution vectors at 0, 1 or ∞.
    Eval(EvalArgs),
    /// Print a connection matrix as JSON.
    Matrix(MatrixArgs),
    /// Run verification suites; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Compare quadrature of the loaded integrals with the series.
    Oracle(OracleArgs),
    /// Terms used and wall time of the series for n = 1..6.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Human,
    Json,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// JSON parameter document {"n", "alpha", "beta"}.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated complex numbers, e.g. "0.3,0.7+0.1i".
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
}

impl ParamArgs {
    fn resolve(&self) -> Result<Option<Parameters>, Failure> {
        resolve_params(self.params.as_deref(), self.n, self.alpha.as_deref(), self.beta.as_deref())
    }

    fn require(&self) -> Result<Parameters, Failure> {
        self.resolve()?
            .ok_or_else(|| Failure::config("parameters required: --params FILE or --alpha/--beta"))
    }
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Series truncation tolerance.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Term budget (default 100000); setting it also unlocks |z| > 0.8.
    #[arg(long)]
    max_terms: Option<usize>,
}

impl SeriesArgs {
    fn options(&self) -> Result<SeriesOptions, Failure> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Failure::config("--tol must be a positive number"));
        }
        let opts = SeriesOptions::with_tol(self.tol);
        Ok(match self.max_terms {
            Some(m) if m == 0 => return Err(Failure::config("--max-terms must be positive")),
            Some(m) => opts.with_max_terms(m),
            None => opts,
        })
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    series: SeriesArgs,
    /// "re" or "re+imi".
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    /// 0, 1 or inf; may be repeated. Default: every point whose series converges at z.
    #[arg(long)]
    point: Vec<String>,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// inf0, one0, zero1, one_inf, hat_one0 or hat_inf0.
    #[arg(long)]
    kind: String,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    series: SeriesArgs,
    /// inverse, connection01, corollary, inf0, residues, periodicity,
    /// propositions, gauss or all; may be repeated.
    #[arg(long, default_value = "all")]
    suite: Vec<String>,
    /// Number of random draws when no parameters are given.
    #[arg(long, default_value_t = 10)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    series: SeriesArgs,
    /// d0, dinf, d0tilde or d1tilde. Default: all four.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    index: Option<usize>,
    /// Real z; default: -0.5 (d0), -2 (dinf), 0.3/0.5/0.7 (tilde families).
    #[arg(long, allow_hyphen_values = true)]
    z: Option<f64>,
    /// Quadrature tolerance (default 1e-8 for n = 1, 1e-6 for n = 2).
    #[arg(long)]
    quad_tol: Option<f64>,
    /// Seed for drawing parameters when none are given.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Timing repetitions per cell; the median is reported.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, value_enum, default_value_t = Output::Human)]
    output: Output,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, Failure> {
    match cli.command {
        Command::Eval(a) => eval(a, out),
        Command::Matrix(a) => matrix(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Oracle(a) => oracle(a, out),
        Command::Bench(a) => bench(a, out),
    }
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn parse_point(s: &str) -> Result<Point, Failure> {
    match s {
        "0" | "zero" => Ok(Point::Zero),
        "1" | "one" => Ok(Point::One),
        "inf" | "infinity" => Ok(Point::Infinity),
        _ => Err(Failure::config(format!("unknown point {s:?} (expected 0, 1 or inf)"))),
    }
}

fn point_name(p: Point) -> &'static str {
    match p {
        Point::Zero => "0",
        Point::One => "1",
        Point::Infinity => "inf",
    }
}

fn vector_json(v: &SolutionVector) -> Value {
    json!({
        "point": point_name(v.point),
        "z": pair(v.z),
        "values": v.values.iter().map(|&x| pair(x)).collect::<Vec<_>>(),
        "terms_used": v.series.iter().map(|s| s.terms_used).collect::<Vec<_>>(),
        "tail_estimates": v.series.iter().map(|s| s.tail_estimate).collect::<Vec<_>>(),
        "branch_note": v.branch_note,
    })
}

fn eval(a: EvalArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let p = a.params.require()?;
    let opts = a.series.options()?;
    let z = parse_complex(&a.z).map_err(|m| Failure::config(format!("z: {m}")))?;
    let points: Vec<Point> = if a.point.is_empty() {
        let mut v = Vec::new();
        if z.norm() < 1.0 {
            v.push(Point::Zero);
        }
        if (Complex64::new(1.0, 0.0) - z).norm() < 1.0 {
            v.push(Point::One);
        }
        if z.norm() > 1.0 {
            v.push(Point::Infinity);
        }
        v
    } else {
        a.point.iter().map(|s| parse_point(s)).collect::<Result<_, _>>()?
    };
    for point in points {
        let v = solution_vector(point, &p, z, &opts)?;
        match a.output {
            Output::Json => writeln!(out, "{}", vector_json(&v))?,
            Output::Human => {
                writeln!(out, "point {} at z = {}", point_name(point), fmt_c(z))?;
                for (i, (x, s)) in v.values.iter().zip(&v.series).enumerate() {
                    writeln!(out, "  F_{:<2} = {:>48}   terms {:>6}   tail {:.1e}", i + 1, fmt_c(*x), s.terms_used, s.tail_estimate)?;
                }
            }
        }
    }
    Ok(0)
}

fn fmt_c(z: Complex64) -> String {
    format!("{:+.16e} {:+.16e}i", z.re, z.im)
}

fn matrix(a: MatrixArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let kind = MatrixKind::parse(&a.kind).ok_or_else(|| {
        Failure::config(format!(
            "unknown kind {:?} (expected inf0, one0, zero1, one_inf, hat_one0, hat_inf0)",
            a.kind
        ))
    })?;
    let p = a.params.require()?;
    let m = build(kind, &p)?;
    match a.output {
        Output::Json => writeln!(out, "{}", m.to_json())?,
        Output::Human => {
            writeln!(out, "{} (n = {})", kind.as_str(), m.n)?;
            for i in 1..=m.n + 1 {
                let row: Vec<String> = (1..=m.n + 1).map(|j| format!("{:>48}", fmt_c(m.get(i, j)))).collect();
                writeln!(out, "{}", row.join(" "))?;
            }
            writeln!(out, "convention: {}", m.convention)?;
        }
    }
    Ok(0)
}

fn parse_suites(names: &[String], n: usize) -> Result<Vec<Suite>, Failure> {
    let mut suites = Vec::new();
    for name in names {
        if name == "all" {
            suites.extend(Suite::all_for(n));
        } else {
            suites.push(Suite::parse(name).ok_or_else(|| {
                Failure::config(format!(
                    "unknown suite {name:?} (expected inverse, connection01, corollary, inf0, residues, periodicity, propositions, gauss, all)"
                ))
            })?);
        }
    }
    suites.sort();
    suites.dedup();
    for s in &suites {
        if let Some(max) = s.max_n() {
            if n > max {
                return Err(Failure::config(format!("suite {} supports n <= {max} (got n = {n})", s.as_str())));
            }
        }
    }
    Ok(suites)
}

fn human_line(r: &VerificationReport) -> String {
    let z = r.z.map_or("-".to_string(), |z| format!("{}", z.re));
    let seed = r.seed.map_or("-".to_string(), |s| s.to_string());
    format!(
        "{}  {:<34} n={}  z={:<5} residual={:<10.3e} tol={:<8.0e} seed={}",
        if r.pass { "PASS" } else { "FAIL" },
        r.identity,
        r.n,
        z,
        r.residual,
        r.tolerance,
        seed
    )
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let opts = a.series.options()?;
    let fixed = a.params.resolve()?;
    let input = match fixed {
        Some(params) => SuiteInput::Fixed { params, seed: None },
        None => {
            let n = a.params.n.ok_or_else(|| Failure::config("verify needs --n (or explicit parameters)"))?;
            if n == 0 {
                return Err(Failure::config("--n must be at least 1"));
            }
            SuiteInput::Random {
                n,
                draws: a.draws,
                seed: a.seed,
            }
        }
    };
    let n = match &input {
        SuiteInput::Fixed { params, .. } => params.n(),
        SuiteInput::Random { n, .. } => *n,
    };
    let suites = parse_suites(&a.suite, n)?;
    let mut failed = 0usize;
    let mut total = 0usize;
    let mut io_error = None;
    let mut emit = |r: &VerificationReport| {
        total += 1;
        if !r.pass {
            failed += 1;
        }
        let line = match a.output {
            Output::Json => r.to_json(),
            Output::Human => human_line(r),
        };
        if let Err(e) = writeln!(out, "{line}") {
            io_error.get_or_insert(e);
        }
    };
    run_suites(&suites, &input, &opts, &mut emit)?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    if a.output == Output::Human {
        writeln!(out, "{} checks, {} failed", total, failed)?;
    }
    Ok(if failed > 0 { 1 } else { 0 })
}

fn parse_family(s: &str) -> Result<Family, Failure> {
    [Family::D0, Family::Dinf, Family::D0tilde, Family::D1tilde]
        .into_iter()
        .find(|f| f.as_str() == s)
        .ok_or_else(|| Failure::config(format!("unknown family {s:?} (expected d0, dinf, d0tilde, d1tilde)")))
}

fn oracle(a: OracleArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let opts = a.series.options()?;
    let p = match a.params.resolve()? {
        Some(p) => p,
        None => {
            let n = a.params.n.unwrap_or(1);
            sample_parameters(Suite::Propositions, n, a.seed)?
        }
    };
    let n = p.n();
    let families = match &a.family {
        Some(f) => vec![parse_family(f)?],
        None => vec![Family::D0, Family::Dinf, Family::D0tilde, Family::D1tilde],
    };
    let quad_tol = a.quad_tol.unwrap_or_else(|| default_tolerance(n));
    if !(quad_tol > 0.0) {
        return Err(Failure::config("--quad-tol must be positive"));
    }
    if a.output == Output::Json {
        writeln!(out, "{}", json!({ "params": serde_json::from_str::<Value>(&p.to_json()).expect("valid json") }))?;
    } else {
        writeln!(out, "parameters {}", p.to_json())?;
    }
    for family in families {
        let zs: Vec<f64> = match (a.z, family) {
            (Some(z), _) => vec![z],
            (None, Family::D0) => vec![Z_NEGATIVE],
            (None, Family::Dinf) => vec![Z_BEYOND],
            (None, _) => Z_GRID.to_vec(),
        };
        let indices: Vec<usize> = match a.index {
            Some(i) => vec![i],
            None => (1..=n + 1).collect(),
        };
        for &z in &zs {
            for &i in &indices {
                let spec = DomainSpec::new(family, i, n, z)?;
                let quad = integrate_loaded_domain(&spec, &p, quad_tol)?;
                let point = family.point();
                let zc = Complex64::new(z, 0.0);
                let series = prefactor(point, i, &p)? * component(point, i, &p, zc, &opts)?.value;
                let diff = (quad - series).norm() / quad.norm().max(1.0);
                match a.output {
                    Output::Json => writeln!(
                        out,
                        "{}",
                        json!({
                            "family": family.as_str(),
                            "index": i,
                            "z": z,
                            "quadrature": pair(quad),
                            "series": pair(series),
                            "relative_difference": diff,
                        })
                    )?,
                    Output::Human => writeln!(
                        out,
                        "{:<8} i={} z={:<5} quadrature {:>48}  series {:>48}  rel.diff {:.2e}",
                        family.as_str(),
                        i,
                        z,
                        fmt_c(quad),
                        fmt_c(series),
                        diff
                    )?,
                }
            }
        }
    }
    Ok(0)
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let repeats = a.repeats.max(1);
    let z = Complex64::new(0.5, 0.0);
    if a.output == Output::Human {
        writeln!(out, "{:>2}  {:>7}  {:>6}  {:>12}", "n", "tol", "terms", "median µs")?;
    }
    for n in 1..=6usize {
        let upper: Vec<Complex64> = (0..=n).map(|s| Complex64::new(0.3 + 0.1 * s as f64, 0.05)).collect();
        let lower: Vec<Complex64> = (0..n).map(|s| Complex64::new(1.25 + 0.17 * s as f64, -0.05)).collect();
        for tol in [1e-6, 1e-10, 1e-14] {
            let opts = SeriesOptions::with_tol(tol);
            let mut times = Vec::with_capacity(repeats);
            let mut terms = 0;
            for _ in 0..repeats {
                let start = Instant::now();
                let v = eval_ghs(&upper, &lower, z, &opts)?;
                times.push(start.elapsed().as_secs_f64() * 1e6);
                terms = v.terms_used;
            }
            times.sort_by(f64::total_cmp);
            let median = times[times.len() / 2];
            match a.output {
                Output::Json => writeln!(out, "{}", json!({"n": n, "tol": tol, "z": 0.5, "terms_used": terms, "median_us": median}))?,
                Output::Human => writeln!(out, "{:>2}  {:>7.0e}  {:>6}  {:>12.2}", n, tol, terms, median)?,
            }
        }
    }
    Ok(0)
}
