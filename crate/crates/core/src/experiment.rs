//! Verification harness: interpolate a Gaussian on a lattice that satisfies
//! the scheme constraints, measure the error, and compare it with the
//! applicable `E_σ` bound and with `MN(c)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::espace::{esigma_norm_gaussian, GaussianFunction};
use crate::interpolant::{max_error_on_lattice, Interpolant};
use crate::kernel::KernelParams;
use crate::mn::{log_grid, mn_curve, mn_value, CaseKind, GridSpec, MnCase, MnCurve};
use crate::simplex::regular_simplex;
use crate::theory::{
    degree_range, error_bound_5, error_bound_6, error_bound_7, SchemeParams, TheoryConstants,
};

/// Reports with a condition estimate at or above this are not used to judge
/// the bound.
pub const VERIFIABLE_CONDITION: f64 = 1e12;

pub const DEFAULT_PROBE_MULTIPLIER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Target {
    /// `e^{-a|x|²}`
    Gaussian { a: f64 },
    /// The zero function.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub beta: f64,
    pub sigma: f64,
    pub b0: f64,
    pub delta: f64,
    pub c: f64,
    pub target: Target,
    pub probe_multiplier: usize,
    pub d0: f64,
    /// Simplex diameter; defaults to the midpoint `1.5/(3C)`.
    pub diameter: Option<f64>,
    /// Lattice degree; defaults to the smallest admissible one.
    pub degree: Option<usize>,
}

impl ExperimentConfig {
    pub fn gaussian(n: usize, beta: f64, sigma: f64, b0: f64, delta: f64, c: f64, a: f64) -> Self {
        ExperimentConfig {
            n,
            beta,
            sigma,
            b0,
            delta,
            c,
            target: Target::Gaussian { a },
            probe_multiplier: DEFAULT_PROBE_MULTIPLIER,
            d0: 1.0,
            diameter: None,
            degree: None,
        }
    }

    pub fn with_c(&self, c: f64) -> Self {
        ExperimentConfig { c, ..*self }
    }
}

/// Everything fixed by the configuration before any linear algebra runs.
#[derive(Debug, Clone, Copy)]
struct Plan {
    constants: TheoryConstants,
    scheme: SchemeParams,
    case: MnCase,
    target: Option<GaussianFunction>,
    e_norm: f64,
}

fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    if !(cfg.sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be positive, got {}",
            cfg.sigma
        )));
    }
    if cfg.probe_multiplier == 0 {
        return Err(Error::InvalidArgument(
            "probe multiplier must be >= 1".into(),
        ));
    }
    let constants = TheoryConstants::new(cfg.n, cfg.beta, cfg.b0)?;
    let (l_min, _) = degree_range(constants.c_big, cfg.delta)?;
    let l = cfg.degree.unwrap_or(l_min);
    let r = cfg.diameter.unwrap_or(1.5 / (3.0 * constants.c_big));
    let scheme = SchemeParams {
        b0: cfg.b0,
        delta: cfg.delta,
        l,
        r,
    };
    scheme.validate(&constants)?;
    let case = MnCase::new(cfg.n, cfg.beta, cfg.sigma, l, cfg.d0)?;
    let (target, e_norm) = match cfg.target {
        Target::Gaussian { a } => {
            let g = GaussianFunction::new(a, cfg.n)?;
            (Some(g), esigma_norm_gaussian(&g, cfg.sigma)?)
        }
        Target::Zero => (None, 0.0),
    };
    Ok(Plan {
        constants,
        scheme,
        case,
        target,
        e_norm,
    })
}

fn bound_for(p: &Plan, cfg: &ExperimentConfig) -> Result<f64> {
    let (tc, sp) = (&p.constants, &p.scheme);
    match p.case.kind {
        CaseKind::Case1 => error_bound_5(tc, sp, cfg.n, cfg.beta, cfg.c, cfg.sigma, p.e_norm),
        CaseKind::Case2 => error_bound_6(tc, sp, cfg.c, cfg.sigma, p.e_norm),
        CaseKind::Case3 => {
            error_bound_7(tc, sp, cfg.n, cfg.beta, cfg.c, cfg.sigma, cfg.d0, p.e_norm)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub case: CaseKind,
    pub constants: TheoryConstants,
    pub l: usize,
    pub r: f64,
    pub n_centers: usize,
    pub probe_degree: usize,
    pub cond_estimate: f64,
    pub max_error: f64,
    pub e_norm: f64,
    pub bound: f64,
    pub ratio: f64,
    pub mn: f64,
    pub interpolation_residual: f64,
    pub moment_residual: f64,
}

impl ExperimentReport {
    /// Whether the solve is trustworthy enough to judge the bound.
    pub fn verifiable(&self) -> bool {
        self.cond_estimate < VERIFIABLE_CONDITION
    }

    pub fn bound_holds(&self) -> bool {
        self.ratio <= 1.0
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let p = plan(cfg)?;
    let kernel = KernelParams::new(cfg.n, cfg.beta, cfg.c)?;
    let simplex = regular_simplex(cfg.n, p.scheme.r)?;
    let centers = simplex.evenly_spaced_points(p.scheme.l)?;

    let f = |x: &[f64]| p.target.map_or(0.0, |g| g.eval(x));
    let values: Vec<f64> = centers.points.iter().map(|x| f(x)).collect();
    let interp = Interpolant::fit(&centers, kernel, &values)?;

    let probe_degree = cfg.probe_multiplier * p.scheme.l;
    let max_error = max_error_on_lattice(&interp, f, probe_degree)?;
    let bound = bound_for(&p, cfg)?;
    let ratio = if max_error == 0.0 {
        0.0
    } else {
        max_error / bound
    };

    Ok(ExperimentReport {
        config: *cfg,
        case: p.case.kind,
        constants: p.constants,
        l: p.scheme.l,
        r: p.scheme.r,
        n_centers: centers.len(),
        probe_degree,
        cond_estimate: interp.cond_estimate,
        max_error,
        e_norm: p.e_norm,
        bound,
        ratio,
        mn: mn_value(&p.case, cfg.c)?,
        interpolation_residual: interp.interpolation_residual(),
        moment_residual: interp.moment_residual(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Ok,
    /// Solved, but the condition estimate is too large to judge the bound.
    IllConditioned,
    /// The solve itself failed.
    Failed,
}

impl std::fmt::Display for PointStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PointStatus::Ok => "ok",
            PointStatus::IllConditioned => "ill-conditioned",
            PointStatus::Failed => "failed",
        })
    }
}

/// One c of a sweep. Failed solves keep the condition estimate when one is
/// known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub c: f64,
    pub mn: f64,
    pub status: PointStatus,
    pub report: Option<ExperimentReport>,
    pub cond_estimate: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub curve: MnCurve,
    pub points: Vec<SweepPoint>,
}

impl Sweep {
    pub fn empirical_argmin(&self) -> Option<f64> {
        self.points
            .iter()
            .filter(|p| p.status == PointStatus::Ok)
            .filter_map(|p| p.report.as_ref().map(|r| (p.c, r.max_error)))
            .fold(None, |best: Option<(f64, f64)>, (c, e)| match best {
                Some((_, be)) if be <= e => best,
                _ => Some((c, e)),
            })
            .map(|(c, _)| c)
    }

    pub fn mn_argmin(&self) -> Option<f64> {
        self.curve
            .samples
            .iter()
            .fold(None, |best: Option<(f64, f64)>, s| match best {
                Some((_, b)) if b <= s.ln_mn => best,
                _ => Some((s.c, s.ln_mn)),
            })
            .map(|(c, _)| c)
    }
}

/// Run one experiment and classify the outcome. Conditioning failures are
/// turned into a `Failed` point; every other error propagates.
pub fn sweep_point(cfg: &ExperimentConfig) -> Result<SweepPoint> {
    let p = plan(cfg)?;
    let mn = mn_value(&p.case, cfg.c)?;
    match run_experiment(cfg) {
        Ok(report) => Ok(SweepPoint {
            c: cfg.c,
            mn,
            status: if report.verifiable() {
                PointStatus::Ok
            } else {
                PointStatus::IllConditioned
            },
            cond_estimate: Some(report.cond_estimate),
            report: Some(report),
            error: None,
        }),
        Err(Error::Conditioning { estimate }) => Ok(SweepPoint {
            c: cfg.c,
            mn,
            status: PointStatus::Failed,
            report: None,
            cond_estimate: Some(estimate),
            error: Some(Error::Conditioning { estimate }.to_string()),
        }),
        Err(e) => Err(e),
    }
}

/// Run the experiment for every c of a logarithmic grid, alongside the MN
/// curve on the same grid. Per-point solver failures are recorded, not
/// propagated.
pub fn sweep_c(cfg: &ExperimentConfig, grid: GridSpec) -> Result<Sweep> {
    let p = plan(cfg)?;
    let curve = mn_curve(&p.case, grid.c_min, grid.c_max, grid.count)?;
    let cs = log_grid(grid.c_min, grid.c_max, grid.count)?;
    let points = cs
        .par_iter()
        .map(|&c| sweep_point(&cfg.with_c(c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep { curve, points })
}
