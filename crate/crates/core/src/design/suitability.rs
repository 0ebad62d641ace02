//! Suitability of a designed amplitude for squeezing, and the eigenvalue
//! trajectories of `u(τ, -τ)` used to inspect it.

use serde::Serialize;

use crate::error::Result;
use crate::profile::{AmplitudeProfile, Domain};
use crate::propagate::{propagate_symmetric, StepControl};

use super::theta::ThetaDesign;

/// An amplitude counts as non-negative down to this value.
pub const NEGATIVITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenSample {
    pub tau: f64,
    pub re_plus: f64,
    pub re_minus: f64,
    pub im: f64,
    /// `|Tr u| ≥ 2`
    pub is_real_pair: bool,
}

/// Eigenvalues of `u(τ, -τ)` on a uniform grid of `(0, half_width]`.
pub fn eigentrajectories(
    profile: &AmplitudeProfile,
    half_width: f64,
    n_samples: usize,
    step: StepControl,
) -> Result<Vec<EigenSample>> {
    let family = propagate_symmetric(profile, half_width, n_samples, step)?;
    Ok(family
        .iter()
        .skip(1)
        .map(|(tau, u)| {
            let half_trace = 0.5 * u.trace();
            let disc = half_trace * half_trace - u.det();
            if disc >= 0.0 {
                let r = disc.sqrt();
                EigenSample {
                    tau,
                    re_plus: half_trace + r,
                    re_minus: half_trace - r,
                    im: 0.0,
                    is_real_pair: true,
                }
            } else {
                EigenSample {
                    tau,
                    re_plus: half_trace,
                    re_minus: half_trace,
                    im: (-disc).sqrt(),
                    is_real_pair: u.trace().abs() >= 2.0,
                }
            }
        })
        .collect())
}

/// Number of maximal runs of real-pair samples.
pub fn real_pair_runs(samples: &[EigenSample]) -> usize {
    let mut runs = 0;
    let mut inside = false;
    for s in samples {
        if s.is_real_pair && !inside {
            runs += 1;
        }
        inside = s.is_real_pair;
    }
    runs
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suitability {
    pub suitable: bool,
    pub min_beta: f64,
    pub beta_sign_changes: usize,
    pub eigentrajectory: Vec<EigenSample>,
}

/// `β ≥ -ε` at `n_samples + 1` uniform points of `[-half_width, half_width]`.
pub fn profile_suitability(
    profile: &AmplitudeProfile,
    half_width: f64,
    n_samples: usize,
    step: StepControl,
) -> Result<Suitability> {
    let n = n_samples.max(1);
    let betas: Vec<f64> = (0..=n)
        .map(|i| profile.beta(-half_width + 2.0 * half_width * i as f64 / n as f64))
        .collect();
    let min_beta = betas.iter().copied().fold(f64::INFINITY, f64::min);
    let mut sign_changes = 0;
    let mut last_sign = 0.0;
    for b in &betas {
        if b.abs() <= NEGATIVITY_TOL {
            continue;
        }
        let s = b.signum();
        if last_sign != 0.0 && s != last_sign {
            sign_changes += 1;
        }
        last_sign = s;
    }
    let eigentrajectory = eigentrajectories(profile, half_width, n, step)?;
    Ok(Suitability {
        suitable: betas.iter().all(|b| *b >= -NEGATIVITY_TOL),
        min_beta,
        beta_sign_changes: sign_changes,
        eigentrajectory,
    })
}

pub fn suitability(
    d: &ThetaDesign,
    half_width: f64,
    n_samples: usize,
    step: StepControl,
) -> Result<Suitability> {
    let profile = d.profile(Domain::ALL);
    profile_suitability(&profile, half_width, n_samples, step)
}
