//! Scalar special functions and exact combinatorics.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

// Lanczos approximation, g = 10.900511 with 11 terms (Pugh 2004, as used by statrs).
const LANCZOS_G: f64 = 10.900511;

#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

#[allow(clippy::excessive_precision)]
const TWO_SQRT_E_OVER_PI: f64 = 1.860_382_734_205_265_7;

/// Distance from a non-positive integer below which `gamma` reports a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

fn lanczos_positive(x: f64) -> f64 {
    let sum = LANCZOS_COEFFS
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_COEFFS[0], |s, (i, &dk)| {
            s + dk / (x + i as f64 - 1.0)
        });
    sum * TWO_SQRT_E_OVER_PI * ((x - 0.5 + LANCZOS_G) / E).powf(x - 0.5)
}

/// `sin(pi * x)` with exact argument reduction, so that the result keeps full
/// relative accuracy near the integers.
pub fn sin_pi(x: f64) -> f64 {
    let k = x.round();
    let r = x - k;
    let s = (PI * r).sin();
    if k.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

/// The gamma function for real arguments.
///
/// Arguments below 1/2 go through the reflection formula
/// `Γ(x) = π / (sin(πx) Γ(1 − x))`.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::InvalidArgument("gamma of NaN".into()));
    }
    let nearest = x.round();
    if nearest <= 0.0 && (x - nearest).abs() < POLE_TOLERANCE {
        return Err(Error::GammaPole(x));
    }
    if x < 0.5 {
        Ok(PI / (sin_pi(x) * lanczos_positive(1.0 - x)))
    } else {
        Ok(lanczos_positive(x))
    }
}

/// Volume of the unit ball in `R^n`, `π^{n/2} / Γ(n/2 + 1)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    // Γ(n/2 + 1) has no pole for n >= 0.
    PI.powf(half) / gamma(half + 1.0).expect("positive argument")
}

/// Exact binomial coefficient `C(a, b)`.
pub fn binomial(a: u64, b: u64) -> Result<u64> {
    if b > a {
        return Err(Error::InvalidArgument(format!(
            "binomial({a}, {b}) requires b <= a"
        )));
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        // acc * (a - i) is divisible by (i + 1) at every step.
        acc = acc
            .checked_mul((a - i) as u128)
            .ok_or_else(|| Error::Overflow(format!("binomial({a}, {b})")))?
            / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return Err(Error::Overflow(format!("binomial({a}, {b})")));
        }
    }
    Ok(acc as u64)
}
