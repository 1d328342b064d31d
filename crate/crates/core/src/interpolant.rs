//! Assembly and solution of the polynomial-augmented kernel system
//!
//! ```text
//! [ A   P ] [c]   [f]
//! [ Pᵀ  0 ] [b] = [0]
//! ```
//!
//! with `A_ji = h(x_j − x_i)` and `P_ji = p_i(x_j)`, and evaluation of
//! `s(x) = Σ c_i h(x − x_i) + Σ b_i p_i(x)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{KernelParams, PolyBasis};
use crate::simplex::CenterSet;

/// Condition estimates above this are treated as numerically singular.
pub const SINGULAR_CONDITION: f64 = 1e15;

/// Relative residual accepted after the solve.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

const MAX_REFINEMENT_STEPS: usize = 3;

/// The assembled saddle-point system, before factorization.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub kernel: KernelParams,
    pub centers: CenterSet,
    pub poly: PolyBasis,
    values: Vec<f64>,
}

pub fn assemble_system(
    centers: &CenterSet,
    kernel: KernelParams,
    values: &[f64],
) -> Result<LinearSystem> {
    let n_centers = centers.len();
    if values.len() != n_centers {
        return Err(Error::DimensionMismatch {
            expected: n_centers,
            found: values.len(),
        });
    }
    if centers.dim() != kernel.n {
        return Err(Error::DimensionMismatch {
            expected: kernel.n,
            found: centers.dim(),
        });
    }
    let m = kernel.cpd_order();
    if m >= 1 && centers.degree + 1 < m {
        return Err(Error::InvalidArgument(format!(
            "lattice degree {} is below m - 1 = {}: centers do not determine P_(m-1)",
            centers.degree,
            m - 1
        )));
    }
    let poly = PolyBasis::new(kernel.n, m)?;
    let q = poly.len();
    let size = n_centers + q;

    let mut matrix = DMatrix::zeros(size, size);
    for j in 0..n_centers {
        for i in 0..=j {
            let v = kernel.eval_between(&centers.points[j], &centers.points[i]);
            matrix[(j, i)] = v;
            matrix[(i, j)] = v;
        }
        for k in 0..q {
            let p = poly.eval_monomial(k, &centers.points[j]);
            matrix[(j, n_centers + k)] = p;
            matrix[(n_centers + k, j)] = p;
        }
    }
    let mut rhs = DVector::zeros(size);
    for (j, v) in values.iter().enumerate() {
        rhs[j] = *v;
    }
    Ok(LinearSystem {
        matrix,
        rhs,
        kernel,
        centers: centers.clone(),
        poly,
        values: values.to_vec(),
    })
}

/// 2-norm condition number from the singular values.
pub fn condition_estimate(matrix: &DMatrix<f64>) -> f64 {
    let sv = matrix.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

impl LinearSystem {
    /// Solve with a fully pivoted LU factorization plus a few steps of
    /// iterative refinement.
    pub fn solve(self) -> Result<Interpolant> {
        let cond = condition_estimate(&self.matrix);
        if !(cond <= SINGULAR_CONDITION) {
            return Err(Error::Conditioning { estimate: cond });
        }
        let lu = self.matrix.clone().full_piv_lu();
        let mut x = lu
            .solve(&self.rhs)
            .ok_or(Error::Conditioning { estimate: cond })?;

        let mut residual = &self.rhs - &self.matrix * &x;
        let mut res_norm = residual.amax();
        for _ in 0..MAX_REFINEMENT_STEPS {
            if res_norm == 0.0 {
                break;
            }
            let Some(dx) = lu.solve(&residual) else { break };
            let candidate = &x + dx;
            let cand_residual = &self.rhs - &self.matrix * &candidate;
            let cand_norm = cand_residual.amax();
            if cand_norm < res_norm {
                x = candidate;
                residual = cand_residual;
                res_norm = cand_norm;
            } else {
                break;
            }
        }

        let n_centers = self.centers.len();
        let kernel_coeffs = x.rows(0, n_centers).iter().cloned().collect();
        let poly_coeffs = x.rows(n_centers, self.poly.len()).iter().cloned().collect();
        Ok(Interpolant {
            kernel: self.kernel,
            centers: self.centers,
            kernel_coeffs,
            poly_coeffs,
            poly: self.poly,
            values: self.values,
            cond_estimate: cond,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Interpolant {
    pub kernel: KernelParams,
    pub centers: CenterSet,
    pub kernel_coeffs: Vec<f64>,
    pub poly_coeffs: Vec<f64>,
    pub poly: PolyBasis,
    /// Data values at the centers.
    pub values: Vec<f64>,
    pub cond_estimate: f64,
}

impl Interpolant {
    /// Assemble and solve in one step.
    pub fn fit(centers: &CenterSet, kernel: KernelParams, values: &[f64]) -> Result<Self> {
        assemble_system(centers, kernel, values)?.solve()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let kernel_part: f64 = self
            .kernel_coeffs
            .iter()
            .zip(&self.centers.points)
            .map(|(c, xi)| c * self.kernel.eval_between(x, xi))
            .sum();
        let poly_part: f64 = self
            .poly_coeffs
            .iter()
            .enumerate()
            .map(|(j, b)| b * self.poly.eval_monomial(j, x))
            .sum();
        kernel_part + poly_part
    }

    /// `max_j |s(x_j) − f_j|`, relative to `max |f_j|` (absolute when the
    /// data vanish).
    pub fn interpolation_residual(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let worst = self
            .centers
            .points
            .iter()
            .zip(&self.values)
            .map(|(x, f)| (self.evaluate(x) - f).abs())
            .fold(0.0, f64::max);
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }

    /// `max_j |Σ_i c_i p_j(x_i)|`, each relative to `Σ_i |c_i p_j(x_i)|`.
    /// The coefficient scale is floored at `max|f| / max|A|`, the size a
    /// kernel coefficient needs to matter, so roundoff-level coefficients
    /// (data fit by the polynomial alone) count as zero.
    pub fn moment_residual(&self) -> f64 {
        let data = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let pts = &self.centers.points;
        let a_max = pts
            .iter()
            .flat_map(|x| pts.iter().map(move |y| (x, y)))
            .map(|(x, y)| self.kernel.eval_between(x, y).abs())
            .fold(0.0f64, f64::max);
        let floor = if a_max > 0.0 { data / a_max } else { 0.0 };
        (0..self.poly.len())
            .map(|j| {
                let (sum, scale) =
                    self.kernel_coeffs
                        .iter()
                        .zip(pts)
                        .fold((0.0, 0.0), |(s, a), (c, x)| {
                            let p = self.poly.eval_monomial(j, x);
                            (s + c * p, a + (c * p).abs() + floor * p.abs())
                        });
                if scale > 0.0 {
                    sum.abs() / scale
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Largest `|f(x) − s(x)|` over the evenly spaced lattice of degree
/// `probe_degree` in the interpolation simplex.
pub fn max_error_on_lattice<F>(s: &Interpolant, f: F, probe_degree: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let probes = s.centers.simplex.evenly_spaced_points(probe_degree)?;
    Ok(probes
        .points
        .iter()
        .map(|x| (f(x) - s.evaluate(x)).abs())
        .fold(0.0, f64::max))
}
