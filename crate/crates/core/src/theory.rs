//! Closed-form constants and error bounds for multiquadric interpolation on
//! evenly spaced simplex lattices.
//!
//! Every bound is accumulated as a sum of logarithms and exponentiated once,
//! so large lattice degrees or tiny shape parameters do not overflow
//! intermediate factors.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{cpd_order, validate_beta};
use crate::special::unit_ball_volume;

/// Slack used when turning the real interval `[1/(3Cδ), 2/(3Cδ)]` into
/// integer degrees.
const DEGREE_SLACK: f64 = 1e-9;

/// Which branch of the (ρ, Δ₀) definition applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseLabel {
    /// β < n − 3, β < 0.
    #[serde(rename = "A-i")]
    AI,
    /// β < n − 3, β > 0.
    #[serde(rename = "A-ii")]
    AII,
    /// n − 3 ≤ β < n − 1.
    B,
    /// β ≥ n − 1.
    C,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::AI => "A-i",
            CaseLabel::AII => "A-ii",
            CaseLabel::B => "B",
            CaseLabel::C => "C",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoDelta {
    pub rho: f64,
    pub delta0_const: f64,
    pub s: i64,
    pub case_label: CaseLabel,
}

// product of the integers lo..=hi, 1 when empty
fn int_product(lo: i64, hi: i64) -> f64 {
    (lo..=hi).map(|k| k as f64).product()
}

/// ρ and Δ₀ for dimension `n` and exponent `beta`.
pub fn rho_delta0(n: usize, beta: f64) -> Result<RhoDelta> {
    validate_beta(beta)?;
    if n == 0 {
        return Err(Error::InvalidArgument("dimension n must be >= 1".into()));
    }
    let nf = n as f64;
    let m = cpd_order(beta)? as i64;
    let raw_s = ((nf - beta - 3.0) / 2.0).ceil() as i64;

    let out = if beta < nf - 3.0 {
        let s = raw_s;
        if beta < 0.0 {
            let rho = (3.0 + s as f64) / 3.0;
            RhoDelta {
                rho,
                delta0_const: int_product(3, 2 + s) / (rho * rho),
                s,
                case_label: CaseLabel::AI,
            }
        } else {
            let rho = 1.0 + s as f64 / (2 * m + 3) as f64;
            RhoDelta {
                rho,
                delta0_const: int_product(2 * m + 3, 2 * m + 2 + s) / rho.powi((2 * m + 2) as i32),
                s,
                case_label: CaseLabel::AII,
            }
        }
    } else if beta < nf - 1.0 {
        RhoDelta {
            rho: 1.0,
            delta0_const: 1.0,
            s: raw_s,
            case_label: CaseLabel::B,
        }
    } else {
        let s = -raw_s;
        RhoDelta {
            rho: 1.0,
            delta0_const: 1.0 / int_product(2 * m - s + 3, 2 * m + 2),
            s,
            case_label: CaseLabel::C,
        }
    };
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConstants {
    pub c_big: f64,
    pub delta_max: f64,
    pub lambda_prime: f64,
}

/// `C = max{2/(3 b₀), 8ρ}`, `δ₀ = 1/(3C)` and `λ′ = (2/3)^{1/(3C)}`.
pub fn scheme_constants(rho: f64, b0: f64) -> Result<SchemeConstants> {
    if !(rho >= 1.0) || !(b0 > 0.0) || !b0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "scheme constants need rho >= 1 and b0 > 0, got rho = {rho}, b0 = {b0}"
        )));
    }
    let c_big = (2.0 / (3.0 * b0)).max(8.0 * rho);
    Ok(SchemeConstants {
        c_big,
        delta_max: 1.0 / (3.0 * c_big),
        lambda_prime: (2.0f64 / 3.0).powf(1.0 / (3.0 * c_big)),
    })
}

/// Everything derived from `(n, β, b₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub n: usize,
    pub beta: f64,
    pub b0: f64,
    pub m: usize,
    pub s: i64,
    pub rho: f64,
    pub delta0_const: f64,
    pub case_label: CaseLabel,
    pub c_big: f64,
    pub delta_max: f64,
    pub lambda_prime: f64,
}

impl TheoryConstants {
    pub fn new(n: usize, beta: f64, b0: f64) -> Result<Self> {
        let rd = rho_delta0(n, beta)?;
        let sc = scheme_constants(rd.rho, b0)?;
        Ok(TheoryConstants {
            n,
            beta,
            b0,
            m: cpd_order(beta)?,
            s: rd.s,
            rho: rd.rho,
            delta0_const: rd.delta0_const,
            case_label: rd.case_label,
            c_big: sc.c_big,
            delta_max: sc.delta_max,
            lambda_prime: sc.lambda_prime,
        })
    }

    /// Admissible simplex diameters `[1/(3C), 2/(3C)]`.
    pub fn diameter_range(&self) -> (f64, f64) {
        (1.0 / (3.0 * self.c_big), 2.0 / (3.0 * self.c_big))
    }
}

/// Integer lattice degrees allowed for a given δ.
pub fn degree_range(c_big: f64, delta: f64) -> Result<(usize, usize)> {
    if !(delta > 0.0) || !(delta < 1.0 / (3.0 * c_big)) {
        return Err(Error::SchemeViolation(format!(
            "delta = {delta} must satisfy 0 < delta < delta_max = {}",
            1.0 / (3.0 * c_big)
        )));
    }
    let lo = 1.0 / (3.0 * c_big * delta);
    let hi = 2.0 * lo;
    let l_min = (lo * (1.0 - DEGREE_SLACK)).ceil() as usize;
    let l_max = (hi * (1.0 + DEGREE_SLACK)).floor() as usize;
    Ok((l_min.max(1), l_max))
}

/// `b₀`, δ, lattice degree `l` and simplex diameter `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub b0: f64,
    pub delta: f64,
    pub l: usize,
    pub r: f64,
}

impl SchemeParams {
    pub fn validate(&self, tc: &TheoryConstants) -> Result<()> {
        let (l_min, l_max) = degree_range(tc.c_big, self.delta)?;
        if self.l < l_min || self.l > l_max {
            return Err(Error::SchemeViolation(format!(
                "lattice degree l = {} outside [{l_min}, {l_max}] for delta = {}",
                self.l, self.delta
            )));
        }
        let (r_lo, r_hi) = tc.diameter_range();
        let tol = 1e-12 * r_hi;
        if self.r < r_lo - tol || self.r > r_hi + tol {
            return Err(Error::SchemeViolation(format!(
                "simplex diameter r = {} outside [{r_lo}, {r_hi}]",
                self.r
            )));
        }
        Ok(())
    }
}

/// Positive root `ξ* = (cσ + √(c²σ² + 4σk))/4` of `2ξ²/σ − cξ − k/2 = 0`.
pub fn xi_star(c: f64, sigma: f64, k: f64) -> f64 {
    (c * sigma + (c * c * sigma * sigma + 4.0 * sigma * k).sqrt()) / 4.0
}

/// `ln` of `{ ξ^{k/2} e^{cξ − ξ²/σ} }^{1/2}` at `ξ = ξ*(c, σ, k)`.
pub(crate) fn ln_xi_factor(c: f64, sigma: f64, k: f64) -> f64 {
    let xi = xi_star(c, sigma, k);
    let power = if k == 0.0 { 0.0 } else { (k / 2.0) * xi.ln() };
    0.5 * (power + c * xi - xi * xi / sigma)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

/// Hypotheses under which the inverse-multiquadric `E_σ` bound with a
/// general dimension applies.
pub fn check_case1(n: usize, beta: f64) -> Result<()> {
    let nb = n as f64 + beta;
    let mut violated = Vec::new();
    if !(beta < 0.0) {
        violated.push("beta < 0");
    }
    if !(nb.abs() >= 1.0) {
        violated.push("|n + beta| >= 1");
    }
    if !(nb + 1.0 >= 0.0) {
        violated.push("n + beta + 1 >= 0");
    }
    if violated.is_empty() {
        Ok(())
    } else {
        let hint = if n == 1 && (beta + 1.0).abs() < 1e-12 {
            " (beta = -1, n = 1 is handled by the dedicated one-dimensional bound)"
        } else {
            ""
        };
        Err(Error::OutOfCase(format!(
            "n = {n}, beta = {beta} violates {}{hint}",
            violated.join(", ")
        )))
    }
}

pub(crate) fn ln_h_norm_factor_case1(n: usize, beta: f64, c: f64, sigma: f64) -> Result<f64> {
    check_case1(n, beta)?;
    check_positive("c", c)?;
    check_positive("sigma", sigma)?;
    let nf = n as f64;
    let k = nf + beta + 1.0;
    Ok((-nf - (1.0 + beta) / 4.0) * LN_2
        + (-nf - 0.25) * PI.ln()
        + (1.0 - nf - beta) / 4.0 * c.ln()
        + ln_xi_factor(c, sigma, k))
}

/// Factor multiplying `‖f‖_{E_σ}` in the bound on `‖f‖_h` for
/// `β < 0, |n + β| ≥ 1, n + β + 1 ≥ 0`.
pub fn h_norm_bound_case1(n: usize, beta: f64, c: f64, sigma: f64) -> Result<f64> {
    Ok(ln_h_norm_factor_case1(n, beta, c, sigma)?.exp())
}

/// Breakpoint `2/√(3σ)` between the two branches of `M(c)`.
pub fn m_breakpoint(sigma: f64) -> f64 {
    2.0 / (3.0 * sigma).sqrt()
}

/// Left branch of `M`: `e^{1 − 1/(c²σ)}`, as a logarithm.
pub fn ln_m_left(c: f64, sigma: f64) -> f64 {
    1.0 - 1.0 / (c * c * sigma)
}

/// Right branch of `M`: `g(ξ) = √(cξ) e^{cξ − ξ²/σ}` at
/// `ξ = (cσ + √(c²σ² + 4σ))/4`, as a logarithm.
pub fn ln_m_right(c: f64, sigma: f64) -> f64 {
    let xi = xi_star(c, sigma, 1.0);
    0.5 * (c * xi).ln() + c * xi - xi * xi / sigma
}

/// `ln M(c)` for `β = −1, n = 1`.
pub fn ln_m_of_c(c: f64, sigma: f64) -> f64 {
    if c <= m_breakpoint(sigma) {
        ln_m_left(c, sigma)
    } else {
        ln_m_right(c, sigma)
    }
}

pub fn m_of_c(c: f64, sigma: f64) -> f64 {
    ln_m_of_c(c, sigma).exp()
}

/// `ln {1/ln 2 + 2√3 M(c)}^{1/2}`.
pub(crate) fn ln_case2_brace(c: f64, sigma: f64) -> f64 {
    let a = -LN_2.ln();
    let b = (2.0 * 3f64.sqrt()).ln() + ln_m_of_c(c, sigma);
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    0.5 * (hi + (lo - hi).exp().ln_1p())
}

pub(crate) fn ln_h_norm_factor_case2(c: f64, sigma: f64) -> Result<f64> {
    check_positive("c", c)?;
    check_positive("sigma", sigma)?;
    Ok(-1.25 * LN_2 - PI.ln() + ln_case2_brace(c, sigma))
}

/// Factor multiplying `‖f‖_{E_σ}` for `β = −1, n = 1`.
pub fn h_norm_bound_case2(c: f64, sigma: f64) -> Result<f64> {
    Ok(ln_h_norm_factor_case2(c, sigma)?.exp())
}

pub(crate) fn ln_h_norm_factor_case3(
    n: usize,
    beta: f64,
    c: f64,
    sigma: f64,
    d0: f64,
) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::OutOfCase(format!(
            "multiquadric bound requires beta > 0, got {beta}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("dimension n must be >= 1".into()));
    }
    check_positive("c", c)?;
    check_positive("sigma", sigma)?;
    check_positive("d0", d0)?;
    let nf = n as f64;
    let k = 1.0 + beta + nf;
    Ok(d0.ln() + (1.0 - beta - nf) / 4.0 * c.ln() + ln_xi_factor(c, sigma, k))
}

/// Factor multiplying `‖f‖_{E_σ}` for `β > 0`; `d0` is the unspecified
/// constant depending only on `(n, β)`.
pub fn h_norm_bound_case3(n: usize, beta: f64, c: f64, sigma: f64, d0: f64) -> Result<f64> {
    Ok(ln_h_norm_factor_case3(n, beta, c, sigma, d0)?.exp())
}

/// Logarithm of the c-independent part shared by all bounds:
/// `√(nα_n) √Δ₀ √(3C) √δ (λ′)^{1/δ}`.
fn ln_common(tc: &TheoryConstants, sp: &SchemeParams) -> f64 {
    let nf = tc.n as f64;
    0.5 * (nf * unit_ball_volume(tc.n)).ln()
        + 0.5 * tc.delta0_const.ln()
        + 0.5 * (3.0 * tc.c_big).ln()
        + 0.5 * sp.delta.ln()
        + tc.lambda_prime.ln() / sp.delta
}

fn finish(ln_value: f64, norm: f64) -> Result<f64> {
    if norm < 0.0 || norm.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "norm must be >= 0, got {norm}"
        )));
    }
    if norm == 0.0 {
        return Ok(0.0);
    }
    let v = (ln_value + norm.ln()).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range(format!(
            "bound overflows (log value {ln_value})"
        )))
    }
}

fn check_consistent(tc: &TheoryConstants, sp: &SchemeParams, n: usize, beta: f64) -> Result<()> {
    if tc.n != n || tc.beta != beta {
        return Err(Error::InvalidArgument(format!(
            "theory constants were built for (n = {}, beta = {}), not ({n}, {beta})",
            tc.n, tc.beta
        )));
    }
    if sp.b0 != tc.b0 {
        return Err(Error::InvalidArgument(
            "scheme b0 differs from theory constants".into(),
        ));
    }
    sp.validate(tc)
}

/// Pointwise bound on `|f(x) − s(x)|` in terms of the native-space seminorm `‖f‖_h`.
pub fn error_bound_4(
    tc: &TheoryConstants,
    sp: &SchemeParams,
    n: usize,
    beta: f64,
    c: f64,
    h_norm: f64,
) -> Result<f64> {
    check_consistent(tc, sp, n, beta)?;
    check_positive("c", c)?;
    let nf = n as f64;
    let ln = (nf + beta - 7.0) / 4.0 * LN_2
        + (nf - 1.0) / 4.0 * PI.ln()
        + (beta / 2.0 - sp.l as f64) * c.ln()
        + ln_common(tc, sp);
    finish(ln, h_norm)
}

/// Bound in terms of `‖f‖_{E_σ}` for `β < 0, |n + β| ≥ 1, n + β + 1 ≥ 0`.
pub fn error_bound_5(
    tc: &TheoryConstants,
    sp: &SchemeParams,
    n: usize,
    beta: f64,
    c: f64,
    sigma: f64,
    e_norm: f64,
) -> Result<f64> {
    check_consistent(tc, sp, n, beta)?;
    check_case1(n, beta)?;
    check_positive("c", c)?;
    check_positive("sigma", sigma)?;
    let nf = n as f64;
    let ln = (-0.75 * nf - 2.0) * LN_2
        + (-0.75 * nf - 0.5) * PI.ln()
        + (beta - nf + 1.0 - 4.0 * sp.l as f64) / 4.0 * c.ln()
        + ln_xi_factor(c, sigma, nf + beta + 1.0)
        + ln_common(tc, sp);
    finish(ln, e_norm)
}

/// Bound in terms of `‖f‖_{E_σ}` for `β = −1, n = 1`.
pub fn error_bound_6(
    tc: &TheoryConstants,
    sp: &SchemeParams,
    c: f64,
    sigma: f64,
    e_norm: f64,
) -> Result<f64> {
    let (n, beta) = (1usize, -1.0f64);
    check_consistent(tc, sp, n, beta)?;
    check_positive("c", c)?;
    check_positive("sigma", sigma)?;
    let nf = n as f64;
    let ln = ((beta - 3.0 * nf) / 4.0 - 2.0) * LN_2
        + (nf - 5.0) / 4.0 * PI.ln()
        + (beta / 2.0 - sp.l as f64) * c.ln()
        + ln_case2_brace(c, sigma)
        + ln_common(tc, sp);
    finish(ln, e_norm)
}

/// Bound in terms of `‖f‖_{E_σ}` for `β > 0`.
#[allow(clippy::too_many_arguments)]
pub fn error_bound_7(
    tc: &TheoryConstants,
    sp: &SchemeParams,
    n: usize,
    beta: f64,
    c: f64,
    sigma: f64,
    d0: f64,
    e_norm: f64,
) -> Result<f64> {
    check_consistent(tc, sp, n, beta)?;
    if !(beta > 0.0) {
        return Err(Error::OutOfCase(format!(
            "multiquadric bound requires beta > 0, got {beta}"
        )));
    }
    check_positive("c", c)?;
    check_positive("sigma", sigma)?;
    check_positive("d0", d0)?;
    let nf = n as f64;
    let ln = (nf + beta - 7.0) / 4.0 * LN_2
        + (nf - 1.0) / 4.0 * PI.ln()
        + d0.ln()
        + (1.0 + beta - nf - 4.0 * sp.l as f64) / 4.0 * c.ln()
        + ln_xi_factor(c, sigma, 1.0 + beta + nf)
        + ln_common(tc, sp);
    finish(ln, e_norm)
}

/// Both sides of `cξ* − (ξ*)²/σ = (1/16)[2c²σ + 2c√(c²σ² + 4σk) − 4k]`
/// with `k = n + β + 1`.
pub fn case3_exponent_identity(c: f64, sigma: f64, n: usize, beta: f64) -> (f64, f64) {
    let k = n as f64 + beta + 1.0;
    let xi = xi_star(c, sigma, k);
    let lhs = c * xi - xi * xi / sigma;
    let rhs = (2.0 * c * c * sigma + 2.0 * c * (c * c * sigma * sigma + 4.0 * sigma * k).sqrt()
        - 4.0 * k)
        / 16.0;
    (lhs, rhs)
}
