//! Commands behind the `lpq` binary.
//!
//! Exit codes: 0 success, 1 failed example checks, 2 configuration error,
//! 3 numerical failure. All output is a deterministic function of the
//! arguments (and the seed, where one is taken).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{sandwich, FunOptions, SandwichReport};
use crate::divergence::Quantity;
use crate::error::{Error, Result};
use crate::examples::{by_name, ExampleArgs, NamedExample, EXAMPLE_NAMES};
use crate::monotone::{criteria_verdict, monotone_constant_fun, monotone_constant_seq};
use crate::netspace::GridOptions;
use crate::opnorm::{estimate_opnorm, make_line_multiplier, DiscreteMultiplier, OpNormEstimate, DEFAULT_ITERS, DEFAULT_RESTARTS};
use crate::symbols::{make_exponents, pow2, ExponentTriple, FunSymbol, Interval, Mode, SeqSymbol, Symbol};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lpq", version, about = "Bounds and norm estimates for Lp -> Lq Fourier multipliers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Lower and upper bounds for one symbol, as JSON.
    Report(ReportArgs),
    /// Check every named example against its expected values.
    ValidateExamples(ValidateArgs),
    /// Empirical lower estimate of the discretized operator norm.
    Opnorm(OpnormArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SymbolSource {
    /// Built-in example name.
    #[arg(long, conflicts_with = "symbol", required_unless_present = "symbol")]
    pub example: Option<String>,
    /// JSON symbol file.
    #[arg(long)]
    pub symbol: Option<PathBuf>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Truncation depth of sequence examples.
    #[arg(long)]
    pub depth: Option<i32>,
}

impl SymbolSource {
    fn example_args(&self) -> ExampleArgs {
        ExampleArgs {
            r: self.r,
            alpha: self.alpha,
            gamma: self.gamma,
            tau: self.tau,
            depth: self.depth,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SymbolSource,
    /// Domain exponent, decimal or a ratio such as 4/3.
    #[arg(long, value_parser = parse_ratio)]
    pub p: Option<f64>,
    /// Target exponent, decimal or a ratio.
    #[arg(long, value_parser = parse_ratio)]
    pub q: Option<f64>,
    /// Smallest block index for function symbols.
    #[arg(long, allow_negative_numbers = true)]
    pub kmin: Option<i32>,
    /// Largest block index for function symbols.
    #[arg(long, allow_negative_numbers = true)]
    pub kmax: Option<i32>,
    /// Step-approximant mesh relative to the block scale.
    #[arg(long)]
    pub mesh: Option<f64>,
    /// Also compute the generalized-monotone certificate and verdict.
    #[arg(long)]
    pub monotone: bool,
    /// Also estimate the operator norm with this many samples.
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ITERS)]
    pub iters: usize,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Domain length of the line model for function symbols.
    #[arg(long, default_value_t = 64.0)]
    pub length: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the per-block table as CSV.
    #[arg(long)]
    pub blocks_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    /// Relative tolerance for rows computed by quadrature or meshes.
    #[arg(long, default_value_t = 0.02)]
    pub tolerance: f64,
    /// Restrict to one example.
    #[arg(long)]
    pub only: Option<String>,
    /// Write every check as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OpnormArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SymbolSource,
    #[arg(long, value_parser = parse_ratio)]
    pub p: Option<f64>,
    #[arg(long, value_parser = parse_ratio)]
    pub q: Option<f64>,
    /// Number of samples, a power of two.
    #[arg(long = "N", default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_ITERS)]
    pub iters: usize,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Domain length of the line model for function symbols.
    #[arg(long, default_value_t = 64.0)]
    pub length: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the per-start trajectories as CSV.
    #[arg(long)]
    pub trajectory_csv: Option<PathBuf>,
}

/// Parses `"4/3"`, `"2"` or `"1.5"`.
pub fn parse_ratio(s: &str) -> std::result::Result<f64, String> {
    let bad = || format!("{s:?} is not a number or ratio");
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0.0 {
                return Err(bad());
            }
            a / b
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// On-disk symbol description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum SymbolFile {
    /// Values on the window `[window_lo, window_lo + len - 1]`.
    Sequence {
        window_lo: i64,
        values: Vec<f64>,
        /// Imaginary parts, same length as `values`.
        #[serde(default)]
        imag: Option<Vec<f64>>,
        /// Whether the values are declared to decay outside the window.
        #[serde(default)]
        decays: bool,
    },
    /// `[a, b, value]` steps, zero elsewhere.
    PiecewiseConstant { steps: Vec<(f64, f64, f64)> },
    /// A named example with optional parameters.
    Builtin {
        name: String,
        #[serde(default)]
        parameters: ExampleArgs,
    },
}

/// Symbol with the exponents and options it comes with, if any.
struct Loaded {
    symbol: Symbol,
    exponents: Option<ExponentTriple>,
    fun_options: FunOptions,
    name: String,
    parameters: Value,
}

fn from_example(x: NamedExample) -> Result<Loaded> {
    Ok(Loaded {
        name: x.name.to_string(),
        parameters: serde_json::to_value(x.parameters)?,
        symbol: x.symbol,
        exponents: Some(x.exponents),
        fun_options: x.fun_options,
    })
}

pub fn load_symbol_file(path: &Path) -> Result<SymbolFile> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn load(src: &SymbolSource) -> Result<Loaded> {
    if let Some(name) = &src.example {
        return from_example(by_name(name, &src.example_args())?);
    }
    let path = src
        .symbol
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("need --example or --symbol".into()))?;
    let label = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let file = load_symbol_file(path)?;
    let parameters = serde_json::to_value(&file)?;
    let symbol = match file {
        SymbolFile::Builtin { name, parameters } => {
            let mut args = parameters;
            let cli = src.example_args();
            args.r = cli.r.or(args.r);
            args.alpha = cli.alpha.or(args.alpha);
            args.gamma = cli.gamma.or(args.gamma);
            args.tau = cli.tau.or(args.tau);
            args.depth = cli.depth.or(args.depth);
            return from_example(by_name(&name, &args)?);
        }
        SymbolFile::Sequence {
            window_lo,
            values,
            imag,
            decays,
        } => {
            let vals: Vec<Complex64> = match imag {
                None => values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
                Some(im) if im.len() == values.len() => {
                    values.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect()
                }
                Some(im) => {
                    return Err(Error::LengthMismatch {
                        expected: values.len(),
                        got: im.len(),
                    })
                }
            };
            Symbol::Seq(SeqSymbol::new(window_lo, vals, decays)?)
        }
        SymbolFile::PiecewiseConstant { steps } => Symbol::Fun(FunSymbol::piecewise_constant(steps)?),
    };
    Ok(Loaded {
        symbol,
        exponents: None,
        fun_options: FunOptions::default(),
        name: label,
        parameters,
    })
}

fn exponents(p: Option<f64>, q: Option<f64>, fallback: Option<ExponentTriple>) -> Result<ExponentTriple> {
    match (p, q, fallback) {
        (Some(p), Some(q), _) => make_exponents(p, q, Mode::Hoermander),
        (None, None, Some(e)) => make_exponents(e.p, e.q, Mode::Hoermander),
        _ => Err(Error::InvalidParameter("give both --p and --q".into())),
    }
}

/// Discretization and search settings of an operator-norm estimate.
struct Probe {
    n: usize,
    length: f64,
    iters: usize,
    restarts: usize,
    seed: u64,
}

fn opnorm_for(symbol: &Symbol, e: &ExponentTriple, probe: &Probe) -> Result<OpNormEstimate> {
    let t = match symbol {
        Symbol::Seq(a) => DiscreteMultiplier::periodic(a, probe.n)?,
        Symbol::Fun(f) => make_line_multiplier(f, probe.n, probe.length)?,
    };
    estimate_opnorm(&t, e.p, e.q, probe.iters, probe.restarts, probe.seed)
}

fn provenance(module: &str, operation: &str, parameters: Value, q: Option<&Quantity>) -> Value {
    json!({
        "module": module,
        "operation": operation,
        "parameters": parameters,
        "flags": q.map(|q| q.flags.clone()).unwrap_or_default(),
    })
}

fn report_provenance(r: &SandwichReport, kind: &str, params: &Value) -> Value {
    let op = |base: &str| format!("{base}_{kind}");
    let mut m = serde_json::Map::new();
    m.insert("lower_necessary".into(), provenance("bounds", &op("necessary_lower"), params.clone(), Some(&r.lower_necessary)));
    m.insert(
        "upper_hoermander_block".into(),
        provenance("bounds", &op("hoermander_upper"), params.clone(), Some(&r.upper_hoermander_block)),
    );
    m.insert(
        "upper_hoermander_classic".into(),
        provenance("bounds", "hoermander_classic", params.clone(), Some(&r.upper_hoermander_classic)),
    );
    if let Some(q) = &r.upper_lizorkin_dyadic {
        m.insert("upper_lizorkin_dyadic".into(), provenance("bounds", &op("lizorkin_upper"), params.clone(), Some(q)));
    }
    if let Some(q) = &r.upper_lizorkin_classic {
        m.insert("upper_lizorkin_classic".into(), provenance("bounds", "lizorkin_classic", params.clone(), Some(q)));
    }
    Value::Object(m)
}

fn write_text(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn cmd_report(a: &ReportArgs, out: &mut dyn Write) -> Result<i32> {
    let mut loaded = load(&a.source)?;
    let e = exponents(a.p, a.q, loaded.exponents)?;
    let opts = &mut loaded.fun_options;
    opts.krange = (a.kmin.unwrap_or(opts.krange.0), a.kmax.unwrap_or(opts.krange.1));
    if let Some(m) = a.mesh {
        opts.rel_mesh = m;
    }
    let opts = *opts;
    let mut report = sandwich(&loaded.symbol, &e, &opts)?;
    let estimate = match a.n {
        Some(n) => {
            let probe = Probe {
                n,
                length: a.length,
                iters: a.iters,
                restarts: a.restarts,
                seed: a.seed,
            };
            Some(opnorm_for(&loaded.symbol, &e, &probe)?)
        }
        None => None,
    };
    report.empirical_opnorm = estimate.as_ref().map(|x| x.value);
    let kind = match loaded.symbol {
        Symbol::Seq(_) => "seq",
        Symbol::Fun(_) => "fun",
    };
    let params = json!({
        "symbol": loaded.name,
        "symbol_parameters": loaded.parameters,
        "exponents": e,
        "fun_options": opts,
    });
    let mut prov = report_provenance(&report, kind, &params);
    if let Some(x) = &estimate {
        prov["empirical_opnorm"] = provenance(
            "opnorm",
            "estimate_opnorm",
            json!({"N": a.n, "iters": x.iterations, "restarts": x.restarts, "seed": x.seed, "length": a.length}),
            None,
        );
    }
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "config": {"command": "report", "args": a},
        "report": report,
        "provenance": prov,
    });
    if a.monotone {
        let cert = match &loaded.symbol {
            Symbol::Seq(s) => monotone_constant_seq(s, None)?,
            Symbol::Fun(f) => {
                let h = pow2(opts.krange.1 + 1);
                let dom = Interval::new(-h, h);
                let grid = GridOptions::new(dom.len() / 4096.0);
                monotone_constant_fun(f, dom, None, grid, dom.len() / 4096.0)?
            }
        };
        let verdict = criteria_verdict(&loaded.symbol, &e, &cert, &opts)?;
        doc["monotone"] = json!({"certificate": cert, "verdict": verdict});
    }
    if let Some(p) = &a.blocks_csv {
        std::fs::write(p, report.per_block_csv())?;
    }
    write_text(a.out.as_deref(), &to_json(&doc)?, out)?;
    Ok(EXIT_OK)
}

fn cmd_validate(a: &ValidateArgs, out: &mut dyn Write) -> Result<i32> {
    if !(a.tolerance >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {} must be >= 0", a.tolerance)));
    }
    let names: Vec<&str> = match &a.only {
        Some(n) if EXAMPLE_NAMES.contains(&n.as_str()) => vec![n.as_str()],
        Some(n) => return Err(Error::InvalidParameter(format!("unknown example {n:?}"))),
        None => EXAMPLE_NAMES.to_vec(),
    };
    let mut all = Vec::new();
    let mut table = format!("{:<8} {:>6} {:>6}  {:<6} failed\n", "example", "checks", "passed", "status");
    for name in names {
        let rows = by_name(name, &ExampleArgs::default())?.validate(a.tolerance)?;
        let passed = rows.iter().filter(|r| r.pass).count();
        let failed: Vec<String> = rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| format!("{}={}", r.measure, r.got.value))
            .collect();
        let status = if failed.is_empty() { "PASS" } else { "FAIL" };
        table.push_str(&format!(
            "{:<8} {:>6} {:>6}  {:<6} {}\n",
            name,
            rows.len(),
            passed,
            status,
            failed.join(" ")
        ));
        all.extend(rows);
    }
    out.write_all(table.as_bytes())?;
    if let Some(p) = &a.json {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "config": {"command": "validate-examples", "args": a},
            "checks": all,
        });
        std::fs::write(p, to_json(&doc)?)?;
    }
    Ok(if all.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_CHECKS_FAILED })
}

/// Whether the periodic model with `n` samples accepts the symbol window.
fn fits(symbol: &Symbol, n: usize) -> bool {
    match symbol {
        Symbol::Seq(a) => a.window_lo().abs().max(a.window_hi().abs()) <= (n / 4) as i64,
        Symbol::Fun(_) => true,
    }
}

fn cmd_opnorm(a: &OpnormArgs, out: &mut dyn Write) -> Result<i32> {
    let mut loaded = load(&a.source)?;
    // Examples without an explicit depth are truncated to fit the sample count.
    if a.source.example.is_some() && a.source.depth.is_none() {
        let mut depth = 24;
        while !fits(&loaded.symbol, a.n) && depth > 1 {
            depth -= 1;
            let mut args = a.source.example_args();
            args.depth = Some(depth);
            match by_name(a.source.example.as_deref().unwrap_or_default(), &args) {
                Ok(x) => loaded = from_example(x)?,
                Err(_) => break,
            }
        }
    }
    let e = exponents(a.p, a.q, loaded.exponents)?;
    let probe = Probe {
        n: a.n,
        length: a.length,
        iters: a.iters,
        restarts: a.restarts,
        seed: a.seed,
    };
    let est = opnorm_for(&loaded.symbol, &e, &probe)?;
    let model = match loaded.symbol {
        Symbol::Seq(_) => json!({"kind": "periodic"}),
        Symbol::Fun(_) => json!({"kind": "line", "length": a.length}),
    };
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "config": {"command": "opnorm", "args": a},
        "symbol": {"name": loaded.name, "parameters": loaded.parameters},
        "model": model,
        "estimate": {
            "value": est.value,
            "N": a.n,
            "iterations": est.iterations,
            "restarts": est.restarts,
            "seed": est.seed,
            "p": e.p,
            "q": e.q,
        },
        "provenance": provenance("opnorm", "estimate_opnorm", json!({"N": a.n, "model": model}), None),
    });
    if let Some(p) = &a.trajectory_csv {
        std::fs::write(p, est.trajectory_csv())?;
    }
    write_text(a.out.as_deref(), &to_json(&doc)?, out)?;
    Ok(EXIT_OK)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Report(a) => cmd_report(a, out),
        Command::ValidateExamples(a) => cmd_validate(a, out),
        Command::Opnorm(a) => cmd_opnorm(a, out),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lpq: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}
