use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use mqshape::experiment::{sweep_point, PointStatus};
use mqshape::mn::DEFAULT_BRACKET;
use mqshape::output::{fmt_f64, json_string, metadata_line, mn_curve_csv, points_csv, sweep_csv};
use mqshape::{
    degree_range, limit_behavior, minimize_mn, mn_curve, sweep_c, Error, ExperimentConfig,
    GridSpec, MnCase, MnStatus, TheoryConstants,
};

const DEFAULT_POINTS: usize = 201;

#[derive(Parser)]
#[command(
    name = "mqshape",
    version,
    about = "Multiquadric shape-parameter selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the bound constants (s, m, rho, Delta0, C, delta0, lambda').
    Constants(Flags),
    /// Write MN(c) on a logarithmic c-grid.
    MnCurve(Flags),
    /// Minimize MN(c) over a bracket.
    OptimalC(Flags),
    /// Interpolate a Gaussian and compare the measured error with the bound.
    Verify(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct Flags {
    /// Spatial dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Kernel exponent; not a non-negative even integer.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Weight parameter of the function space.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    b0: Option<f64>,
    /// Scheme parameter; the lattice degree is the smallest admissible one.
    #[arg(long)]
    delta: Option<f64>,
    /// Lattice degree.
    #[arg(long)]
    l: Option<usize>,
    /// Single shape parameter.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    c_min: Option<f64>,
    #[arg(long)]
    c_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Gaussian decay rate of the target e^{-a|x|^2}.
    #[arg(long)]
    a: Option<f64>,
    /// Constant factor of the multiquadric bound.
    #[arg(long)]
    d0: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// JSON file with any of the above; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

impl Flags {
    fn overlay(self, base: Flags) -> Flags {
        Flags {
            n: self.n.or(base.n),
            beta: self.beta.or(base.beta),
            sigma: self.sigma.or(base.sigma),
            b0: self.b0.or(base.b0),
            delta: self.delta.or(base.delta),
            l: self.l.or(base.l),
            c: self.c.or(base.c),
            c_min: self.c_min.or(base.c_min),
            c_max: self.c_max.or(base.c_max),
            points: self.points.or(base.points),
            a: self.a.or(base.a),
            d0: self.d0.or(base.d0),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            config: None,
        }
    }
}

enum CliError {
    Usage(String),
    Lib(Error),
    NoInterior(String),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::NoInterior(_) => 5,
            CliError::Lib(e) => match e {
                Error::UnsupportedRegime(_) => 3,
                Error::Conditioning { .. }
                | Error::Range(_)
                | Error::Overflow(_)
                | Error::GammaPole(_) => 4,
                _ => 2,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::NoInterior(m) | CliError::Io(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn require<T>(v: Option<T>, name: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("missing required flag --{name}")))
}

fn positive(v: f64, name: &str) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be a positive finite number, got {v}"
        )))
    }
}

fn load(flags: Flags) -> CliResult<Flags> {
    let Some(path) = flags.config.clone() else {
        return Ok(flags);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let base: Flags = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
    Ok(flags.overlay(base))
}

/// Validated parameters shared by every subcommand.
struct Params {
    n: usize,
    beta: f64,
    sigma: f64,
    b0: f64,
    d0: f64,
    format: Option<Format>,
    out: Option<PathBuf>,
}

impl Params {
    fn from_flags(f: &Flags) -> CliResult<Params> {
        let n = require(f.n, "n")?;
        if n == 0 {
            return Err(CliError::Usage("--n must be >= 1".into()));
        }
        let beta = require(f.beta, "beta")?;
        if !beta.is_finite() {
            return Err(CliError::Usage(format!(
                "--beta must be finite, got {beta}"
            )));
        }
        Ok(Params {
            n,
            beta,
            sigma: positive(f.sigma.unwrap_or(1.0), "sigma")?,
            b0: positive(f.b0.unwrap_or(1.0), "b0")?,
            d0: positive(f.d0.unwrap_or(1.0), "d0")?,
            format: f.format,
            out: f.out.clone(),
        })
    }

    fn meta(&self) -> Vec<(&'static str, String)> {
        vec![
            ("n", self.n.to_string()),
            ("beta", self.beta.to_string()),
            ("sigma", self.sigma.to_string()),
            ("b0", self.b0.to_string()),
            ("d0", self.d0.to_string()),
        ]
    }
}

fn bracket(f: &Flags) -> CliResult<(f64, f64)> {
    let lo = positive(f.c_min.unwrap_or(DEFAULT_BRACKET.0), "c-min")?;
    let hi = positive(f.c_max.unwrap_or(DEFAULT_BRACKET.1), "c-max")?;
    if lo >= hi {
        return Err(CliError::Usage(format!(
            "--c-min ({lo}) must be smaller than --c-max ({hi})"
        )));
    }
    Ok((lo, hi))
}

fn grid(f: &Flags) -> CliResult<GridSpec> {
    let (c_min, c_max) = bracket(f)?;
    let count = f.points.unwrap_or(DEFAULT_POINTS);
    if count < 2 {
        return Err(CliError::Usage(format!(
            "--points must be >= 2, got {count}"
        )));
    }
    Ok(GridSpec {
        c_min,
        c_max,
        count,
    })
}

/// Lattice degree from `--l`, or the smallest one admitted by `--delta`.
fn lattice_degree(f: &Flags, p: &Params) -> CliResult<usize> {
    match (f.l, f.delta) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "--l and --delta are mutually exclusive".into(),
        )),
        (Some(0), None) => Err(CliError::Usage("--l must be >= 1".into())),
        (Some(l), None) => Ok(l),
        (None, Some(delta)) => {
            let tc = TheoryConstants::new(p.n, p.beta, p.b0)?;
            Ok(degree_range(tc.c_big, delta)?.0)
        }
        (None, None) => Err(CliError::Usage("one of --l or --delta is required".into())),
    }
}

fn with_meta(mut value: Value, meta: &str) -> Value {
    if let Value::Object(map) = &mut value {
        map.insert("meta".into(), Value::String(meta.to_string()));
    }
    value
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn single_row_csv(meta: &str, fields: &[(&str, String)]) -> String {
    let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
    let row: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
    format!("{meta}\n{}\n{}\n", header.join(","), row.join(","))
}

fn cmd_constants(f: &Flags) -> CliResult<(String, Option<PathBuf>)> {
    let n = require(f.n, "n")?;
    let beta = require(f.beta, "beta")?;
    let b0 = positive(f.b0.unwrap_or(1.0), "b0")?;
    let tc = TheoryConstants::new(n, beta, b0)?;
    let meta = metadata_line(
        "constants",
        &[
            ("n", n.to_string()),
            ("beta", beta.to_string()),
            ("b0", b0.to_string()),
        ],
    );
    let text = match f.format.unwrap_or(Format::Json) {
        Format::Json => json_string(&with_meta(to_value(&tc), &meta)),
        Format::Csv => single_row_csv(
            &meta,
            &[
                ("n", tc.n.to_string()),
                ("beta", fmt_f64(tc.beta)),
                ("b0", fmt_f64(tc.b0)),
                ("s", tc.s.to_string()),
                ("m", tc.m.to_string()),
                ("rho", fmt_f64(tc.rho)),
                ("delta0_const", fmt_f64(tc.delta0_const)),
                ("case_label", tc.case_label.to_string()),
                ("C", fmt_f64(tc.c_big)),
                ("delta_max", fmt_f64(tc.delta_max)),
                ("lambda_prime", fmt_f64(tc.lambda_prime)),
            ],
        ),
    };
    Ok((text, f.out.clone()))
}

fn cmd_mn_curve(f: &Flags) -> CliResult<(String, Option<PathBuf>)> {
    let p = Params::from_flags(f)?;
    let g = grid(f)?;
    let l = lattice_degree(f, &p)?;
    let case = MnCase::new(p.n, p.beta, p.sigma, l, p.d0)?;
    let curve = mn_curve(&case, g.c_min, g.c_max, g.count)?;
    let mut params = p.meta();
    params.extend([
        ("case", case.kind.to_string()),
        ("l", l.to_string()),
        ("c_min", g.c_min.to_string()),
        ("c_max", g.c_max.to_string()),
        ("points", g.count.to_string()),
    ]);
    let meta = metadata_line("mn-curve", &params);
    let text = match p.format.unwrap_or(Format::Csv) {
        Format::Csv => mn_curve_csv(&curve, &meta),
        Format::Json => json_string(&with_meta(to_value(&curve), &meta)),
    };
    Ok((text, p.out))
}

fn cmd_optimal_c(f: &Flags) -> CliResult<(String, Option<PathBuf>)> {
    let p = Params::from_flags(f)?;
    let (lo, hi) = bracket(f)?;
    let l = lattice_degree(f, &p)?;
    let case = MnCase::new(p.n, p.beta, p.sigma, l, p.d0)?;
    let result = minimize_mn(&case, lo, hi)?;
    match result.status {
        MnStatus::InteriorMin => {}
        MnStatus::InfimumAtZero => {
            return Err(CliError::NoInterior(format!(
                "MN(c) -> 0 as c -> 0+ ({}, l = {l}, 1 + beta - n - 4l > 0); no interior minimizer",
                case.kind
            )))
        }
        MnStatus::UnboundedWarning => {
            let lim = limit_behavior(&case);
            return Err(CliError::NoInterior(format!(
                "smallest MN on [{lo}, {hi}] is at c = {} on the bracket boundary \
                 (limit at 0+: {:?}); widen the bracket",
                result.grid_argmin, lim.at_zero
            )));
        }
    }
    let mut params = p.meta();
    params.extend([
        ("case", case.kind.to_string()),
        ("l", l.to_string()),
        ("c_min", lo.to_string()),
        ("c_max", hi.to_string()),
    ]);
    let meta = metadata_line("optimal-c", &params);
    let text = match p.format.unwrap_or(Format::Json) {
        Format::Json => json_string(&with_meta(
            json!({
                "case": case.kind.to_string(),
                "l": l,
                "result": to_value(&result),
            }),
            &meta,
        )),
        Format::Csv => single_row_csv(
            &meta,
            &[
                ("c_star", result.c_star.map(fmt_f64).unwrap_or_default()),
                ("mn_at_c_star", fmt_f64(result.mn_at_c_star)),
                ("status", result.status.to_string()),
                ("bracket_lo", fmt_f64(result.bracket.0)),
                ("bracket_hi", fmt_f64(result.bracket.1)),
                ("grid_argmin", fmt_f64(result.grid_argmin)),
            ],
        ),
    };
    Ok((text, p.out))
}

fn cmd_verify(f: &Flags) -> CliResult<(String, Option<PathBuf>)> {
    let p = Params::from_flags(f)?;
    let delta = require(f.delta, "delta")?;
    let a = positive(f.a.unwrap_or(0.25), "a")?;
    if p.sigma <= 2.0 * a {
        return Err(CliError::Usage(format!(
            "the Gaussian e^(-a|x|^2) lies in E_sigma only when sigma > 2a; got sigma = {}, a = {a}",
            p.sigma
        )));
    }
    if f.l == Some(0) {
        return Err(CliError::Usage("--l must be >= 1".into()));
    }
    let mut cfg = ExperimentConfig::gaussian(p.n, p.beta, p.sigma, p.b0, delta, 1.0, a);
    cfg.d0 = p.d0;
    cfg.degree = f.l;

    let mut params = p.meta();
    params.extend([("delta", delta.to_string()), ("a", a.to_string())]);
    if let Some(l) = f.l {
        params.push(("l", l.to_string()));
    }
    let format = p.format.unwrap_or(Format::Csv);

    let text = match f.c {
        Some(c) => {
            if f.c_min.is_some() || f.c_max.is_some() || f.points.is_some() {
                return Err(CliError::Usage(
                    "--c cannot be combined with --c-min/--c-max/--points".into(),
                ));
            }
            let c = positive(c, "c")?;
            let point = sweep_point(&cfg.with_c(c))?;
            if point.status == PointStatus::Failed {
                return Err(CliError::Lib(Error::Conditioning {
                    estimate: point.cond_estimate.unwrap_or(f64::INFINITY),
                }));
            }
            params.push(("c", c.to_string()));
            let meta = metadata_line("verify", &params);
            match format {
                Format::Csv => points_csv(std::slice::from_ref(&point), &meta),
                Format::Json => json_string(&with_meta(to_value(&point), &meta)),
            }
        }
        None => {
            let g = grid(f)?;
            let sweep = sweep_c(&cfg, g)?;
            params.extend([
                ("c_min", g.c_min.to_string()),
                ("c_max", g.c_max.to_string()),
                ("points", g.count.to_string()),
            ]);
            let meta = metadata_line("verify", &params);
            match format {
                Format::Csv => sweep_csv(&sweep, &meta),
                Format::Json => json_string(&with_meta(to_value(&sweep), &meta)),
            }
        }
    };
    Ok((text, p.out))
}

fn emit(text: &str, out: Option<PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let (text, out) = match cli.command {
        Command::Constants(f) => cmd_constants(&load(f)?)?,
        Command::MnCurve(f) => cmd_mn_curve(&load(f)?)?,
        Command::OptimalC(f) => cmd_optimal_c(&load(f)?)?,
        Command::Verify(f) => cmd_verify(&load(f)?)?,
    };
    emit(&text, out)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
