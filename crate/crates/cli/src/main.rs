//! `hardy`: command-line driver for the Hardy-operator toolkit.
//!
//! Exit status: 0 success, 1 usage or I/O error, 2 domain error,
//! 3 ill-conditioning that more precision might cure.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hardy_core::context::Context;
use hardy_core::json::{approximate_json, check_bits};
use hardy_core::scalar::{Real, Scalar};
use hardy_core::{with_scalar, Error};
use serde_json::{json, Value};

use commands::{load_json, parse_n_list, MuntzSource};
use config::{Config, Format};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Core(e) if e.is_precision_related() => 3,
            CliError::Core(_) => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "hardy", version, about = "Hardy operator on L2[0,1]: log-monomial algebra, Pick matrices, monomial approximation of invariant subspaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Config file of `key = value` lines; HARDY_<KEY> variables and flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Working precision in bits: 53, 128, 256 or 512.
    #[arg(long, global = true)]
    bits: Option<u32>,
    #[arg(long, global = true)]
    merge_tol: Option<String>,
    #[arg(long, global = true)]
    root_cluster_tol: Option<String>,
    #[arg(long, global = true)]
    membership_tol: Option<String>,
    #[arg(long, global = true)]
    bisection_tol: Option<String>,
    /// Multiplier on the PSD threshold dim * eps * norm.
    #[arg(long, global = true)]
    psd_factor: Option<String>,
    #[arg(long, global = true)]
    half_plane_margin: Option<String>,
    #[arg(long, global = true)]
    k_max: Option<String>,
    #[arg(long, global = true)]
    allow_vanishing_at_minus_one: bool,
    /// json or csv, for commands that offer both.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Global {
    fn flag_layer(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("bits", self.bits.map(|b| b.to_string()));
        put("merge_tol", self.merge_tol.clone());
        put("root_cluster_tol", self.root_cluster_tol.clone());
        put("membership_tol", self.membership_tol.clone());
        put("bisection_tol", self.bisection_tol.clone());
        put("psd_factor", self.psd_factor.clone());
        put("half_plane_margin", self.half_plane_margin.clone());
        put("k_max", self.k_max.clone());
        put("allow_vanishing_at_minus_one", self.allow_vanishing_at_minus_one.then(|| "true".to_string()));
        put("format", self.format.clone());
        m
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply H, H*, 1-H or 1-H* to a log-monomial sum.
    Apply {
        #[arg(long)]
        op: String,
        /// LogMonomialSum JSON, inline or as a file.
        #[arg(long = "fn")]
        f: String,
    },
    /// Gram matrix of a monomial space.
    Gram {
        #[arg(long, allow_hyphen_values = true)]
        exponents: String,
    },
    /// Distance from a function (or `{"indicator": a}`) to a monomial space.
    Dist {
        #[arg(long = "fn")]
        f: String,
        #[arg(long)]
        space: String,
    },
    /// Orthogonal projection onto a monomial space.
    Project {
        #[arg(long = "fn")]
        f: String,
        #[arg(long)]
        space: String,
    },
    /// Laguerre function e_n, or Laguerre coefficients of a function.
    Laguerre {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        expand: Option<String>,
        #[arg(long)]
        nmax: Option<u32>,
    },
    /// Partial sums of sum (2 Re s_k + 1) / |s_k + 1|^2.
    Muntz {
        /// Exponent list or JSON file.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "power")]
        exponents: Option<String>,
        /// Use s_k = k^power for k = 1, 2, ...
        #[arg(long)]
        power: Option<u32>,
        #[arg(long)]
        terms: usize,
    },
    /// Pick matrix test for interpolation data.
    Pick {
        #[arg(long, allow_hyphen_values = true)]
        points: String,
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long, allow_hyphen_values = true)]
        bound: String,
    },
    /// Largest scaling constant C_N for a moment sequence.
    Scaling {
        #[arg(long)]
        moments: String,
        #[arg(long = "N")]
        n: Option<usize>,
    },
    /// Monomial approximants Mult_N of an invariant subspace.
    Approximate {
        #[arg(long)]
        subspace: String,
        /// `3`, `1,2,5` or `1..12`.
        #[arg(long = "N")]
        n: String,
        /// JSON list of test functions for the distance table.
        #[arg(long)]
        tests: Option<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Distances to the space with exponents s + w^j h, w^m = 1; CSV (h, dist, slope).
    RootsOfUnity {
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        s: String,
        #[arg(long)]
        m: usize,
        /// Comma-separated step sizes.
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        /// Log power of the test function (log x)^n x^s.
        #[arg(long, default_value_t = 0)]
        n: u32,
        /// Measure the gap from Mult_h to the space with s of multiplicity m.
        #[arg(long)]
        reverse: bool,
    },
    /// Run the pipeline on a finite monomial space and report recovery errors.
    Recovery {
        #[arg(long, allow_hyphen_values = true)]
        exponents: String,
        #[arg(long = "N")]
        n: String,
    },
}

enum Output {
    Json(Value),
    Csv(String),
}

fn ctx<T: Scalar>(cfg: &Config) -> Context<T> {
    cfg.tolerances.context()
}

fn csv_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn run(cli: Cli) -> Result<(Output, u8), CliError> {
    let cfg = Config::load(cli.global.config.as_deref(), cli.global.flag_layer())?;
    let bits = cfg.bits_or(53);
    check_bits(bits).map_err(|e| CliError::Usage(e.to_string()))?;
    let json_out = |v: Value| Ok((Output::Json(v), 0));
    match cli.command {
        Command::Apply { op, f } => {
            let f = load_json(&f)?;
            json_out(with_scalar!(bits, T => commands::apply::<T>(&op, &f, &ctx(&cfg)))?)
        }
        Command::Gram { exponents } => json_out(with_scalar!(bits, T => commands::gram_cmd::<T>(&exponents, &ctx(&cfg)))?),
        Command::Dist { f, space } => {
            let f = load_json(&f)?;
            json_out(with_scalar!(bits, T => commands::dist::<T>(&f, &space, &ctx(&cfg)))?)
        }
        Command::Project { f, space } => {
            let f = load_json(&f)?;
            json_out(with_scalar!(bits, T => commands::project_cmd::<T>(&f, &space, &ctx(&cfg)))?)
        }
        Command::Laguerre { n, expand, nmax } => {
            let f = expand.as_deref().map(load_json).transpose()?;
            json_out(with_scalar!(bits, T => commands::laguerre::<T>(n, f.as_ref(), nmax, &ctx(&cfg)))?)
        }
        Command::Muntz { exponents, power, terms } => {
            let src = match (&exponents, power) {
                (Some(e), None) => MuntzSource::List(e),
                (None, Some(p)) => MuntzSource::Power(p),
                _ => return Err(CliError::Usage("muntz needs --exponents or --power".into())),
            };
            let sums: Vec<String> =
                with_scalar!(bits, T => commands::muntz::<T>(src, terms, &ctx(&cfg))?.iter().map(Scalar::to_decimal).collect());
            match cfg.format {
                Format::Json => json_out(json!({ "partial_sums": sums })),
                Format::Csv => {
                    let mut s = String::from("k,partial_sum\n");
                    for (k, v) in sums.iter().enumerate() {
                        s.push_str(&format!("{},{v}\n", k + 1));
                    }
                    Ok((Output::Csv(s), 0))
                }
            }
        }
        Command::Pick { points, values, bound } => {
            json_out(with_scalar!(bits, T => commands::pick::<T>(&points, &values, &bound, &ctx(&cfg)))?)
        }
        Command::Scaling { moments, n } => {
            let m = load_json(&moments)?;
            json_out(with_scalar!(bits, T => commands::scaling::<T>(&m, n, &ctx(&cfg)))?)
        }
        Command::Approximate { subspace, n, tests, csv } => {
            let spec = load_json(&subspace)?;
            let ns = parse_n_list(&n)?;
            let tests = tests.as_deref().map(load_json).transpose()?.unwrap_or(Value::Array(Vec::new()));
            let n_tests = tests.as_array().map_or(0, Vec::len);
            let report = approximate_json(&spec, &ns, &tests, cfg.bits, &cfg.tolerances)?;
            if let Some(p) = csv {
                std::fs::write(&p, report.to_csv(n_tests)).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let code = report
                .entries
                .iter()
                .filter_map(|e| e.get("kind").and_then(Value::as_str))
                .map(|k| if matches!(k, "ill_conditioned" | "no_convergence") { 3 } else { 2 })
                .max()
                .unwrap_or(0);
            Ok((Output::Json(report.to_json()), code))
        }
        Command::Experiment(Experiment::RootsOfUnity { s, m, h, n, reverse }) => {
            let hs: Vec<String> = h.split(',').map(|x| x.trim().to_string()).collect();
            let rows: Vec<(String, String, f64, f64)> = with_scalar!(bits, T => {
                commands::roots_of_unity::<T>(&s, m, n, &hs, reverse, &ctx(&cfg))?
                    .into_iter()
                    .map(|(h, d)| (h.to_decimal(), d.to_decimal(), h.as_f64(), d.as_f64()))
                    .collect()
            });
            let fl: Vec<(f64, f64)> = rows.iter().map(|r| (r.2, r.3)).collect();
            let mut out = String::from("h,dist,slope\n");
            for (r, sl) in rows.iter().zip(commands::slopes(&fl)) {
                out.push_str(&format!("{},{},{}\n", r.0, r.1, sl.map(csv_num).unwrap_or_default()));
            }
            Ok((Output::Csv(out), 0))
        }
        Command::Experiment(Experiment::Recovery { exponents, n }) => {
            let ns = parse_n_list(&n)?;
            let truth = with_scalar!(bits, T => recovery_truth::<T>(&exponents, &ctx(&cfg))?);
            let spec = json!({ "variant": "monomial", "exponents": truth.1 });
            let report = approximate_json(&spec, &ns, &Value::Array(Vec::new()), cfg.bits, &cfg.tolerances)?;
            let mut out = String::from("N,bits,C_N,num_exponents,max_exponent_error\n");
            for e in &report.entries {
                let row = match e.get("exponents") {
                    Some(found) => {
                        let got = expand_f64(found)?;
                        let err = if got.len() == truth.0.len() {
                            csv_num(got.iter().zip(&truth.0).map(|(a, b)| (a.0 - b.0).hypot(a.1 - b.1)).fold(0.0, f64::max))
                        } else {
                            "inf".to_string()
                        };
                        format!("{},{},{},{},{err}", e["N"], e["bits"], e["C_N"].as_str().unwrap_or(""), got.len())
                    }
                    None => format!("{},{},,,", e["N"], e["bits"]),
                };
                out.push_str(&row);
                out.push('\n');
            }
            Ok((Output::Csv(out), 0))
        }
    }
}

type Points = Vec<(f64, f64)>;

/// Expanded, sorted exponents of the requested space, plus its JSON form.
fn recovery_truth<T: Real>(text: &str, ctx: &Context<T>) -> Result<(Points, Value), CliError> {
    let space = commands::load_exponents(text, ctx)?;
    let v = hardy_core::json::multiset_to_json(&space);
    Ok((expand_f64(&v)?, v))
}

fn expand_f64(v: &Value) -> Result<Points, CliError> {
    let mut out = Vec::new();
    for e in v.as_array().into_iter().flatten() {
        let z = hardy_core::scalar::parse_complex::<f64>(e["s"].as_str().unwrap_or(""))
            .ok_or_else(|| CliError::Core(Error::Parse("bad exponent in report".into())))?;
        for _ in 0..e["mult"].as_u64().unwrap_or(1) {
            out.push((z.re, z.im));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out_path = cli.global.out.clone();
    match run(cli) {
        Ok((out, code)) => {
            let text = match out {
                Output::Json(v) => serde_json::to_string_pretty(&v).expect("serializable") + "\n",
                Output::Csv(s) => s,
            };
            let written = match out_path {
                Some(p) => std::fs::write(&p, text).map_err(|e| format!("{}: {e}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("i/o error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
