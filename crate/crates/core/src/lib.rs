//! Generalized multiquadric interpolation on simplex lattices, with
//! shape-parameter selection by minimizing the c-dependent factor of
//! closed-form error bounds.
//!
//! The kernel is `h(x) = Γ(−β/2)(c² + |x|²)^{β/2}`, `β ∉ {0, 2, 4, ...}`,
//! `c > 0`. Interpolants `s(x) = Σ c_i h(x − x_i) + p(x)` are built on the
//! evenly spaced lattice of degree `l` of an n-simplex, with `p` of degree
//! at most `m − 1`, `m = max(⌈β/2⌉, 0)`.
//!
//! Modules:
//!
//! - [`special`]: gamma function, unit-ball volume, binomials.
//! - [`simplex`]: simplices, barycentric coordinates, lattices.
//! - [`kernel`]: the kernel and the polynomial basis.
//! - [`interpolant`]: the augmented linear system, solve, evaluation.
//! - [`theory`]: bound constants (ρ, Δ₀, C, δ₀, λ′) and the error bounds.
//! - [`espace`]: `E_σ` norms of Gaussians, closed form and quadrature.
//! - [`mn`]: the MN functions and their minimization.
//! - [`experiment`]: bound verification and c-sweeps.
//! - [`output`]: CSV formatting.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod espace;
pub mod experiment;
pub mod interpolant;
pub mod kernel;
pub mod mn;
pub mod output;
mod quadrature;
pub mod simplex;
pub mod special;
pub mod theory;

pub use error::{Error, Result};
pub use espace::{esigma_norm_gaussian, esigma_norm_quadrature, GaussianFunction};
pub use experiment::{
    run_experiment, sweep_c, sweep_point, ExperimentConfig, ExperimentReport, PointStatus, Sweep,
    SweepPoint, Target,
};
pub use interpolant::{assemble_system, max_error_on_lattice, Interpolant, LinearSystem};
pub use kernel::{cpd_order, KernelParams, PolyBasis};
pub use mn::{
    classify_case, limit_behavior, minimize_mn, mn_curve, mn_value, CaseKind, GridSpec, MnCase,
    MnCurve, MnResult, MnStatus,
};
pub use simplex::{regular_simplex, CenterSet, Simplex};
pub use theory::{degree_range, rho_delta0, scheme_constants, SchemeParams, TheoryConstants};
