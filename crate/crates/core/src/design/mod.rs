//! Inverse design: amplitudes `β(τ)` whose symmetric-interval evolution
//! `u(τ, -τ)` follows a prescribed `θ(τ) = u₁₂(τ, -τ)`.

mod descriptor;
mod suitability;
mod synth;
mod theta;
mod validate;

pub use descriptor::{write_profile_csv, DesignDescriptor};
pub use suitability::{
    eigentrajectories, profile_suitability, real_pair_runs, suitability, EigenSample, Suitability, NEGATIVITY_TOL,
};
pub use synth::{beta_from_theta, beta_near_zero, locate_zero, SINGULAR_WINDOW, SLOPE_TOL};
pub use theta::{
    audit_coefficients, condition_residuals, endpoint_slope, closed_form_coefficients, solve_coefficients, theta_eval,
    CoefficientAudit, GammaSpec, ThetaDerivatives, ThetaDesign, HARMONICS,
};
pub use validate::{
    validate_design, DesignReport, SingularPoint, CONDITION2_TOL, CONDITION3_TOL, ENDPOINT_TOL, SCAN_POINTS,
};
