//! The generalized multiquadric `h(x) = Γ(−β/2)(c² + |x|²)^{β/2}` and the
//! polynomial space attached to its order of conditional positive
//! definiteness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{binomial, gamma};

/// Tolerance for rejecting β close to a non-negative even integer.
pub const BETA_TOLERANCE: f64 = 1e-12;

pub fn validate_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() {
        return Err(Error::InvalidBeta(beta));
    }
    let half = beta / 2.0;
    let nearest = half.round();
    if nearest >= 0.0 && (beta - 2.0 * nearest).abs() < BETA_TOLERANCE {
        return Err(Error::InvalidBeta(beta));
    }
    Ok(())
}

/// Order `m = max(⌈β/2⌉, 0)` of conditional positive definiteness.
pub fn cpd_order(beta: f64) -> Result<usize> {
    validate_beta(beta)?;
    Ok((beta / 2.0).ceil().max(0.0) as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub beta: f64,
    pub c: f64,
    pub n: usize,
    /// Γ(−β/2), fixed at construction.
    #[serde(skip)]
    scale: f64,
}

impl KernelParams {
    pub fn new(n: usize, beta: f64, c: f64) -> Result<Self> {
        validate_beta(beta)?;
        if n == 0 {
            return Err(Error::InvalidArgument("dimension n must be >= 1".into()));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "shape parameter c must be positive, got {c}"
            )));
        }
        let scale = gamma(-beta / 2.0)?;
        Ok(KernelParams { beta, c, n, scale })
    }

    pub fn cpd_order(&self) -> usize {
        (self.beta / 2.0).ceil().max(0.0) as usize
    }

    /// The factor Γ(−β/2).
    pub fn gamma_factor(&self) -> f64 {
        self.scale
    }

    /// `h` as a function of the squared radius.
    #[inline]
    pub fn eval_sq(&self, r2: f64) -> f64 {
        self.scale * (self.c * self.c + r2).powf(self.beta / 2.0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_sq(x.iter().map(|v| v * v).sum())
    }

    /// `h(x - y)`.
    pub fn eval_between(&self, x: &[f64], y: &[f64]) -> f64 {
        self.eval_sq(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum())
    }
}

/// Monomial basis of `P_{m-1}` in `n` variables, graded lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyBasis {
    pub n: usize,
    /// `m - 1`; `-1` is the zero space.
    pub degree: i64,
    pub exponents: Vec<Vec<u32>>,
}

impl PolyBasis {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension n must be >= 1".into()));
        }
        let degree = m as i64 - 1;
        let mut exponents = Vec::new();
        if m >= 1 {
            let expected = binomial((n + m - 1) as u64, n as u64)? as usize;
            exponents.reserve(expected);
            for total in 0..m as u32 {
                let mut cur = Vec::with_capacity(n);
                monomials_of_degree(total, n, &mut cur, &mut exponents);
            }
            debug_assert_eq!(exponents.len(), expected);
        }
        Ok(PolyBasis {
            n,
            degree,
            exponents,
        })
    }

    /// `Q`, the dimension of the space.
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn eval_monomial(&self, j: usize, x: &[f64]) -> f64 {
        self.exponents[j]
            .iter()
            .zip(x)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }

    pub fn eval_all(&self, x: &[f64]) -> Vec<f64> {
        (0..self.len()).map(|j| self.eval_monomial(j, x)).collect()
    }
}

fn monomials_of_degree(total: u32, vars: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if vars == 1 {
        cur.push(total);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for e in (0..=total).rev() {
        cur.push(e);
        monomials_of_degree(total - e, vars - 1, cur, out);
        cur.pop();
    }
}
