//! The c-dependent factor `MN(c)` of the `E_σ` error bounds, its limit
//! behavior, and its minimization over the shape parameter.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::validate_beta;
use crate::theory::{check_case1, ln_case2_brace, ln_xi_factor};

/// Default search bracket for the shape parameter.
pub const DEFAULT_BRACKET: (f64, f64) = (1e-3, 1e3);
/// Points in the logarithmic scan that precedes golden-section refinement.
pub const SCAN_POINTS: usize = 2001;
/// Relative bracket width at which golden-section refinement stops.
pub const REFINE_TOLERANCE: f64 = 1e-10;
const MAX_REFINE_ITERS: usize = 500;

const BETA_EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseKind {
    /// β < 0, |n + β| ≥ 1, n + β + 1 ≥ 0.
    Case1,
    /// β = −1, n = 1.
    Case2,
    /// β > 0.
    Case3,
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseKind::Case1 => "case1",
            CaseKind::Case2 => "case2",
            CaseKind::Case3 => "case3",
        })
    }
}

/// Decide which MN function governs `(n, β)`.
pub fn classify_case(n: usize, beta: f64) -> Result<CaseKind> {
    validate_beta(beta)?;
    if n == 0 {
        return Err(Error::InvalidArgument("dimension n must be >= 1".into()));
    }
    if n == 1 && (beta + 1.0).abs() < BETA_EQ_TOL {
        return Ok(CaseKind::Case2);
    }
    if beta > 0.0 {
        return Ok(CaseKind::Case3);
    }
    match check_case1(n, beta) {
        Ok(()) => Ok(CaseKind::Case1),
        Err(Error::OutOfCase(why)) => Err(Error::UnsupportedRegime(format!(
            "{why}; not beta = -1 with n = 1; not beta > 0"
        ))),
        Err(e) => Err(e),
    }
}

/// An admissible MN function: the case together with every parameter it
/// depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MnCase {
    pub kind: CaseKind,
    pub n: usize,
    pub beta: f64,
    pub sigma: f64,
    pub l: usize,
    /// Constant factor of the multiquadric bound; ignored outside Case 3.
    pub d0: f64,
}

impl MnCase {
    pub fn new(n: usize, beta: f64, sigma: f64, l: usize, d0: f64) -> Result<Self> {
        let kind = classify_case(n, beta)?;
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if l == 0 {
            return Err(Error::InvalidArgument(
                "lattice degree l must be >= 1".into(),
            ));
        }
        if !(d0 > 0.0) || !d0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "d0 must be positive, got {d0}"
            )));
        }
        Ok(MnCase {
            kind,
            n,
            beta,
            sigma,
            l,
            d0,
        })
    }

    /// Exponent of the leading power of `c`.
    pub fn c_exponent(&self) -> f64 {
        let (n, b, l) = (self.n as f64, self.beta, self.l as f64);
        match self.kind {
            CaseKind::Case1 => (b - n + 1.0 - 4.0 * l) / 4.0,
            CaseKind::Case2 => b / 2.0 - l,
            CaseKind::Case3 => (1.0 + b - n - 4.0 * l) / 4.0,
        }
    }

    /// `ln MN(c)` without the constant `d0`; this is the function the
    /// optimizer works on.
    fn ln_shape(&self, c: f64) -> f64 {
        let k = self.n as f64 + self.beta + 1.0;
        let tail = match self.kind {
            CaseKind::Case1 | CaseKind::Case3 => ln_xi_factor(c, self.sigma, k),
            CaseKind::Case2 => ln_case2_brace(c, self.sigma),
        };
        self.c_exponent() * c.ln() + tail
    }

    fn ln_offset(&self) -> f64 {
        match self.kind {
            CaseKind::Case3 => self.d0.ln(),
            _ => 0.0,
        }
    }

    /// `ln MN(c)`.
    pub fn ln_mn(&self, c: f64) -> Result<f64> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "c must be positive, got {c}"
            )));
        }
        let v = self.ln_shape(c) + self.ln_offset();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Range(format!("ln MN({c}) is not finite")))
        }
    }
}

/// `MN(c)` on the linear scale. Saturates to `inf` (or `0`) once `ln MN`
/// leaves roughly `±709`; use [`MnCase::ln_mn`] when the full range matters.
pub fn mn_value(case: &MnCase, c: f64) -> Result<f64> {
    Ok(case.ln_mn(c)?.exp())
}

/// Logarithmically spaced grid with exact endpoints.
pub fn log_grid(c_min: f64, c_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(c_min > 0.0) || !(c_max > c_min) || !c_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need 0 < c_min < c_max, got [{c_min}, {c_max}]"
        )));
    }
    if count < 2 {
        return Err(Error::InvalidArgument(
            "grid needs at least 2 points".into(),
        ));
    }
    let (lo, hi) = (c_min.ln(), c_max.ln());
    let last = count - 1;
    Ok((0..count)
        .map(|i| match i {
            0 => c_min,
            i if i == last => c_max,
            i => (lo + (hi - lo) * i as f64 / last as f64).exp(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub c_min: f64,
    pub c_max: f64,
    pub count: usize,
}

/// One curve point. `ln_mn` is always finite; `mn` may saturate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MnSample {
    pub c: f64,
    pub mn: f64,
    pub ln_mn: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnCurve {
    pub case: MnCase,
    pub grid: GridSpec,
    pub samples: Vec<MnSample>,
}

pub fn mn_curve(case: &MnCase, c_min: f64, c_max: f64, count: usize) -> Result<MnCurve> {
    let samples = log_grid(c_min, c_max, count)?
        .into_iter()
        .map(|c| {
            let ln_mn = case.ln_mn(c)?;
            Ok(MnSample {
                c,
                mn: ln_mn.exp(),
                ln_mn,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MnCurve {
        case: *case,
        grid: GridSpec {
            c_min,
            c_max,
            count,
        },
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MnStatus {
    /// Minimizer strictly inside the bracket.
    InteriorMin,
    /// MN decreases to 0 as c → 0⁺; no minimizer exists.
    InfimumAtZero,
    /// Smallest value sits on a bracket end for another reason; widen the bracket.
    UnboundedWarning,
}

impl fmt::Display for MnStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MnStatus::InteriorMin => "interior-min",
            MnStatus::InfimumAtZero => "infimum-at-zero",
            MnStatus::UnboundedWarning => "unbounded-warning",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MnResult {
    pub c_star: Option<f64>,
    /// MN at `c_star`, or the smallest value seen on the bracket boundary.
    pub mn_at_c_star: f64,
    pub status: MnStatus,
    pub bracket: (f64, f64),
    /// Argmin of the logarithmic scan.
    pub grid_argmin: f64,
}

/// Two-stage minimization: a 2001-point logarithmic scan followed by
/// golden-section refinement around the scan minimum.
pub fn minimize_mn(case: &MnCase, c_lo: f64, c_hi: f64) -> Result<MnResult> {
    let grid = log_grid(c_lo, c_hi, SCAN_POINTS)?;
    let values = grid
        .iter()
        .map(|&c| {
            let v = case.ln_shape(c);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Range(format!("ln MN({c}) is not finite")))
            }
        })
        .collect::<Result<Vec<_>>>()?;

    // first strict minimum: ties go to the smaller c
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    let offset = case.ln_offset();
    let last = grid.len() - 1;

    if best == 0 || best == last {
        let status = if best == 0 && limit_behavior(case).at_zero == LimitAtZero::Zero {
            MnStatus::InfimumAtZero
        } else {
            MnStatus::UnboundedWarning
        };
        let bracket = if best == 0 {
            (grid[0], grid[1])
        } else {
            (grid[last - 1], grid[last])
        };
        return Ok(MnResult {
            c_star: None,
            mn_at_c_star: (values[best] + offset).exp(),
            status,
            bracket,
            grid_argmin: grid[best],
        });
    }

    let f = |c: f64| case.ln_shape(c);
    let (a, b) = (grid[best - 1], grid[best + 1]);
    let c_star = golden_section(f, a, b, REFINE_TOLERANCE, MAX_REFINE_ITERS);
    // never worse than the scan
    let (c_star, ln_best) = if f(c_star) <= values[best] {
        (c_star, f(c_star))
    } else {
        (grid[best], values[best])
    };
    Ok(MnResult {
        c_star: Some(c_star),
        mn_at_c_star: (ln_best + offset).exp(),
        status: MnStatus::InteriorMin,
        bracket: (a, b),
        grid_argmin: grid[best],
    })
}

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping when
/// the bracket is narrower than `rel_tol` times its midpoint. Ties keep the
/// left part.
pub fn golden_section<F: Fn(f64) -> f64>(
    f: F,
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
    max_iter: usize,
) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if b - a <= rel_tol * 0.5 * (a + b).abs() {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitAtZero {
    PlusInfinity,
    Zero,
    FinitePositive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitBehavior {
    pub at_zero: LimitAtZero,
    /// Always +∞ for every admissible case.
    pub at_infinity_is_infinite: bool,
    pub note: Option<String>,
}

/// Limits of MN as `c → 0⁺` and `c → ∞`.
pub fn limit_behavior(case: &MnCase) -> LimitBehavior {
    let mut note = None;
    let at_zero = match case.kind {
        CaseKind::Case1 => {
            let k = case.n as f64 + case.beta + 1.0;
            if k.abs() < BETA_EQ_TOL {
                note = Some(
                    "n + beta + 1 = 0: blow-up at c -> 0+ follows from the negative power of c alone"
                        .to_string(),
                );
            }
            LimitAtZero::PlusInfinity
        }
        CaseKind::Case2 => LimitAtZero::PlusInfinity,
        CaseKind::Case3 => {
            let e = 1.0 + case.beta - case.n as f64 - 4.0 * case.l as f64;
            if e.abs() < BETA_EQ_TOL {
                LimitAtZero::FinitePositive
            } else if e > 0.0 {
                LimitAtZero::Zero
            } else {
                LimitAtZero::PlusInfinity
            }
        }
    };
    LimitBehavior {
        at_zero,
        at_infinity_is_infinite: true,
        note,
    }
}
