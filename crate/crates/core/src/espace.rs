//! The weighted space `E_σ = { f ∈ L² : ∫ |f̂(ξ)|² e^{|ξ|²/σ} dξ < ∞ }`.
//!
//! Fourier transforms use the unitary convention
//! `f̂(ξ) = (2π)^{-n/2} ∫ f(x) e^{-i⟨x, ξ⟩} dx`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::special::unit_ball_volume;

/// `f(x) = e^{-a|x|²}` on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFunction {
    pub a: f64,
    pub n: usize,
}

impl GaussianFunction {
    pub fn new(a: f64, n: usize) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Gaussian decay a must be positive, got {a}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("dimension n must be >= 1".into()));
        }
        Ok(GaussianFunction { a, n })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (-self.a * x.iter().map(|v| v * v).sum::<f64>()).exp()
    }

    /// `|f̂|²` as a function of `|ξ|`: `(2a)^{-n} e^{-|ξ|²/(2a)}`.
    pub fn fourier_sq(&self, radius: f64) -> f64 {
        (2.0 * self.a).powi(-(self.n as i32)) * (-radius * radius / (2.0 * self.a)).exp()
    }

    pub fn is_admissible(&self, sigma: f64) -> bool {
        sigma > 2.0 * self.a
    }
}

/// Closed-form `‖f‖_{E_σ}` for a Gaussian; requires `σ > 2a`.
pub fn esigma_norm_gaussian(g: &GaussianFunction, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if !g.is_admissible(sigma) {
        return Err(Error::DivergentNorm(format!(
            "Gaussian with a = {} is not in E_sigma for sigma = {sigma}: need sigma > 2a",
            g.a
        )));
    }
    let a2 = 2.0 * g.a;
    let half_n = g.n as f64 / 2.0;
    let ln_sq = -(g.n as f64) * a2.ln() + half_n * (a2 * PI * sigma / (sigma - a2)).ln();
    Ok((0.5 * ln_sq).exp())
}

/// Width of the radial panels marched outwards by the quadrature.
const PANEL_WIDTH: f64 = 1.0;
const MAX_PANELS: usize = 10_000;
/// Consecutive non-decreasing panel contributions treated as divergence.
const GROWTH_PANELS: usize = 8;

/// `‖f‖_{E_σ}` by adaptive radial quadrature of
/// `∫_0^∞ n α_n r^{n−1} |f̂(r)|² e^{r²/σ} dr`, given `|f̂|²` as a function
/// of the radius. Relative accuracy target 1e−8.
pub fn esigma_norm_quadrature<F>(fhat_squared: F, sigma: f64, n: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(sigma > 0.0) || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "need sigma > 0 and n >= 1, got sigma = {sigma}, n = {n}"
        )));
    }
    let surface = n as f64 * unit_ball_volume(n);
    let integrand = |r: f64| {
        let f2 = fhat_squared(r);
        if f2 == 0.0 {
            return 0.0;
        }
        let radial = if n == 1 { 1.0 } else { r.powi(n as i32 - 1) };
        surface * radial * f2 * (r * r / sigma).exp()
    };

    let mut total: f64 = 0.0;
    let mut prev = f64::INFINITY;
    let mut growth = 0;
    for k in 0..MAX_PANELS {
        let lo = k as f64 * PANEL_WIDTH;
        let part = integrate(integrand, lo, lo + PANEL_WIDTH, 1e-12, 0.0, 200);
        if !part.is_finite() || !total.is_finite() {
            return Err(Error::DivergentNorm(format!(
                "integrand overflows near r = {lo}"
            )));
        }
        total += part;
        if part >= prev && part > 0.0 {
            growth += 1;
            if growth >= GROWTH_PANELS {
                return Err(Error::DivergentNorm(format!(
                    "tail contributions keep growing up to r = {}",
                    lo + PANEL_WIDTH
                )));
            }
        } else {
            growth = 0;
        }
        if part <= 1e-17 * total.abs() && part < prev {
            return Ok(total.sqrt());
        }
        if total == 0.0 && part == 0.0 && k > 0 {
            return Ok(0.0);
        }
        prev = part;
    }
    Err(Error::DivergentNorm(format!(
        "no convergence within radius {}",
        MAX_PANELS as f64 * PANEL_WIDTH
    )))
}
