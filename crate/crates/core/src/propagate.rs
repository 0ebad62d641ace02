//! Fixed-step RK4 integration of `∂τ u = Λ(τ) u` and of the symmetric-interval
//! law `du/dτ = Λ u + u Λ` for `u(τ, -τ)`.

use crate::error::{Error, Result};
use crate::matrix::SymplecticMatrix;
use crate::profile::AmplitudeProfile;

pub const DEFAULT_STEP: f64 = 1e-4;

/// Finiteness is checked every this many steps.
const CHECK_EVERY: usize = 256;

/// Step control for the fixed-step integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Maximum step in τ. The interval is split into `ceil(|Δτ| / step)`
    /// equal steps.
    pub step: f64,
    /// Also integrate with half the step and report the difference.
    pub richardson: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            richardson: false,
        }
    }
}

impl StepControl {
    pub fn with_step(step: f64) -> Self {
        Self {
            step,
            richardson: false,
        }
    }

    pub fn with_richardson(mut self) -> Self {
        self.richardson = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.step.is_finite() && self.step > 0.0 {
            Ok(())
        } else {
            Err(Error::Argument(format!("step must be positive and finite, got {}", self.step)))
        }
    }

    /// Number of steps used for an interval of length `span`.
    pub fn steps_for(&self, span: f64) -> usize {
        ((span.abs() / self.step).ceil() as usize).max(1)
    }
}

/// Result of a propagation with its accuracy diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagation {
    pub matrix: SymplecticMatrix,
    pub steps: usize,
    pub det_drift: f64,
    /// `max|u_h - u_{h/2}| / 15`, the Richardson estimate of the RK4 error
    /// of `matrix`; present only when requested.
    pub richardson_error: Option<f64>,
}

#[inline(always)]
fn lambda_times(g: f64, b: f64, u: &SymplecticMatrix) -> SymplecticMatrix {
    SymplecticMatrix::new(g * u.u21, g * u.u22, -b * u.u11, -b * u.u12)
}

#[inline(always)]
fn times_lambda(g: f64, b: f64, u: &SymplecticMatrix) -> SymplecticMatrix {
    SymplecticMatrix::new(-b * u.u12, g * u.u11, -b * u.u22, g * u.u21)
}

#[inline(always)]
fn axpy(u: &SymplecticMatrix, a: f64, k: &SymplecticMatrix) -> SymplecticMatrix {
    SymplecticMatrix::new(
        u.u11 + a * k.u11,
        u.u12 + a * k.u12,
        u.u21 + a * k.u21,
        u.u22 + a * k.u22,
    )
}

/// One classical RK4 step of `u' = Λ u`. Stage amplitudes are given as
/// `(γ, β)` at the start, midpoint and end of the step.
#[inline(always)]
pub(crate) fn rk4_step(
    u: &SymplecticMatrix,
    h: f64,
    start: (f64, f64),
    mid: (f64, f64),
    end: (f64, f64),
) -> SymplecticMatrix {
    let k1 = lambda_times(start.0, start.1, u);
    let k2 = lambda_times(mid.0, mid.1, &axpy(u, 0.5 * h, &k1));
    let k3 = lambda_times(mid.0, mid.1, &axpy(u, 0.5 * h, &k2));
    let k4 = lambda_times(end.0, end.1, &axpy(u, h, &k3));
    let s = h / 6.0;
    SymplecticMatrix::new(
        u.u11 + s * (k1.u11 + 2.0 * (k2.u11 + k3.u11) + k4.u11),
        u.u12 + s * (k1.u12 + 2.0 * (k2.u12 + k3.u12) + k4.u12),
        u.u21 + s * (k1.u21 + 2.0 * (k2.u21 + k3.u21) + k4.u21),
        u.u22 + s * (k1.u22 + 2.0 * (k2.u22 + k3.u22) + k4.u22),
    )
}

#[inline(always)]
fn sym_rhs(g: f64, b: f64, u: &SymplecticMatrix) -> SymplecticMatrix {
    lambda_times(g, b, u) + times_lambda(g, b, u)
}

fn rk4_symmetric_step(
    u: &SymplecticMatrix,
    h: f64,
    start: (f64, f64),
    mid: (f64, f64),
    end: (f64, f64),
) -> SymplecticMatrix {
    let k1 = sym_rhs(start.0, start.1, u);
    let k2 = sym_rhs(mid.0, mid.1, &axpy(u, 0.5 * h, &k1));
    let k3 = sym_rhs(mid.0, mid.1, &axpy(u, 0.5 * h, &k2));
    let k4 = sym_rhs(end.0, end.1, &axpy(u, h, &k3));
    let s = h / 6.0;
    SymplecticMatrix::new(
        u.u11 + s * (k1.u11 + 2.0 * (k2.u11 + k3.u11) + k4.u11),
        u.u12 + s * (k1.u12 + 2.0 * (k2.u12 + k3.u12) + k4.u12),
        u.u21 + s * (k1.u21 + 2.0 * (k2.u21 + k3.u21) + k4.u21),
        u.u22 + s * (k1.u22 + 2.0 * (k2.u22 + k3.u22) + k4.u22),
    )
}

#[inline(always)]
fn amplitudes(profile: &AmplitudeProfile, tau: f64) -> (f64, f64) {
    (profile.gamma(tau), profile.beta(tau))
}

/// Integrates `n` equal steps from `u0` at `tau0`, step `h` (signed).
fn integrate_steps(
    profile: &AmplitudeProfile,
    u0: SymplecticMatrix,
    tau0: f64,
    h: f64,
    n: usize,
) -> Result<SymplecticMatrix> {
    let mut u = u0;
    let mut last_ok = (u0, tau0);
    let mut start = amplitudes(profile, tau0);
    for k in 0..n {
        let t = tau0 + k as f64 * h;
        let t_end = tau0 + (k + 1) as f64 * h;
        let mid = amplitudes(profile, t + 0.5 * h);
        let end = amplitudes(profile, t_end);
        u = rk4_step(&u, h, start, mid, end);
        start = end;
        if (k + 1) % CHECK_EVERY == 0 || k + 1 == n {
            if !u.is_finite() {
                return Err(Error::IntegrationFailure { last_tau: last_ok.1 });
            }
            last_ok = (u, t_end);
        }
    }
    Ok(u)
}

fn check_interval(profile: &AmplitudeProfile, tau0: f64, tau1: f64) -> Result<()> {
    let d = profile.domain();
    d.check(tau0)?;
    d.check(tau1)
}

/// Evolution matrix `u(tau1, tau0)`. Backward intervals (`tau1 < tau0`) are
/// integrated with a negative step.
pub fn propagate(
    profile: &AmplitudeProfile,
    tau0: f64,
    tau1: f64,
    step: StepControl,
) -> Result<SymplecticMatrix> {
    step.validate()?;
    check_interval(profile, tau0, tau1)?;
    if tau1 == tau0 {
        return Ok(SymplecticMatrix::IDENTITY);
    }
    let n = step.steps_for(tau1 - tau0);
    integrate_steps(profile, SymplecticMatrix::IDENTITY, tau0, (tau1 - tau0) / n as f64, n)
}

/// [`propagate`] plus determinant drift and, if requested, the Richardson
/// step-halving estimate.
pub fn propagate_with_diagnostics(
    profile: &AmplitudeProfile,
    tau0: f64,
    tau1: f64,
    step: StepControl,
) -> Result<Propagation> {
    let matrix = propagate(profile, tau0, tau1, step)?;
    let richardson_error = if step.richardson {
        let fine = propagate(
            profile,
            tau0,
            tau1,
            StepControl::with_step(step.step / 2.0),
        )?;
        Some(matrix.max_abs_diff(&fine) / 15.0)
    } else {
        None
    };
    Ok(Propagation {
        matrix,
        steps: if tau1 == tau0 { 0 } else { step.steps_for(tau1 - tau0) },
        det_drift: matrix.det_deviation(),
        richardson_error,
    })
}

/// A family of evolution matrices sampled along one integration pass.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionFamily {
    pub taus: Vec<f64>,
    pub matrices: Vec<SymplecticMatrix>,
}

impl EvolutionFamily {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &SymplecticMatrix)> + '_ {
        self.taus.iter().copied().zip(self.matrices.iter())
    }

    pub fn last(&self) -> Option<(f64, SymplecticMatrix)> {
        Some((*self.taus.last()?, *self.matrices.last()?))
    }

    pub fn max_det_drift(&self) -> f64 {
        self.matrices.iter().map(|m| m.det_deviation()).fold(0.0, f64::max)
    }
}

/// Dense output: `u(τ_k, tau0)` at `n_samples + 1` uniformly spaced `τ_k`
/// from `tau0` to `tau1`, all from a single forward pass. Every sample
/// interval is covered by the same integer number of RK4 steps.
pub fn propagate_dense(
    profile: &AmplitudeProfile,
    tau0: f64,
    tau1: f64,
    n_samples: usize,
    step: StepControl,
) -> Result<EvolutionFamily> {
    step.validate()?;
    check_interval(profile, tau0, tau1)?;
    if n_samples == 0 {
        return Err(Error::Argument("n_samples must be at least 1".into()));
    }
    let mut taus = Vec::with_capacity(n_samples + 1);
    let mut matrices = Vec::with_capacity(n_samples + 1);
    taus.push(tau0);
    matrices.push(SymplecticMatrix::IDENTITY);
    if tau1 == tau0 {
        for _ in 0..n_samples {
            taus.push(tau0);
            matrices.push(SymplecticMatrix::IDENTITY);
        }
        return Ok(EvolutionFamily { taus, matrices });
    }
    let sample_span = (tau1 - tau0) / n_samples as f64;
    let per_sample = step.steps_for(sample_span);
    let h = sample_span / per_sample as f64;
    let mut u = SymplecticMatrix::IDENTITY;
    for s in 0..n_samples {
        let t_start = tau0 + s as f64 * sample_span;
        u = integrate_steps(profile, u, t_start, h, per_sample)?;
        taus.push(if s + 1 == n_samples { tau1 } else { tau0 + (s + 1) as f64 * sample_span });
        matrices.push(u);
    }
    Ok(EvolutionFamily { taus, matrices })
}

/// The family `u(τ, -τ)` for `τ ∈ [0, half_width]`, sampled at `n_samples + 1`
/// uniform points, by integrating `du/dτ = Λ u + u Λ` from `u(0, 0) = 1`.
///
/// The profile must be symmetric about `τ = 0`; this is verified by sampling.
pub fn propagate_symmetric(
    profile: &AmplitudeProfile,
    half_width: f64,
    n_samples: usize,
    step: StepControl,
) -> Result<EvolutionFamily> {
    step.validate()?;
    if !(half_width >= 0.0) {
        return Err(Error::Argument(format!("half width must be non-negative, got {half_width}")));
    }
    if n_samples == 0 {
        return Err(Error::Argument("n_samples must be at least 1".into()));
    }
    check_interval(profile, -half_width, half_width)?;
    profile.check_symmetry(half_width)?;

    let mut taus = vec![0.0];
    let mut matrices = vec![SymplecticMatrix::IDENTITY];
    let sample_span = half_width / n_samples as f64;
    if half_width == 0.0 {
        taus.resize(n_samples + 1, 0.0);
        matrices.resize(n_samples + 1, SymplecticMatrix::IDENTITY);
        return Ok(EvolutionFamily { taus, matrices });
    }
    let per_sample = step.steps_for(sample_span);
    let n_total = per_sample * n_samples;
    let h = half_width / n_total as f64;
    let mut u = SymplecticMatrix::IDENTITY;
    let mut start = amplitudes(profile, 0.0);
    let mut last_ok = 0.0;
    for k in 0..n_total {
        let t = k as f64 * h;
        let t_end = (k + 1) as f64 * h;
        let mid = amplitudes(profile, t + 0.5 * h);
        let end = amplitudes(profile, t_end);
        u = rk4_symmetric_step(&u, h, start, mid, end);
        start = end;
        if (k + 1) % per_sample == 0 {
            if !u.is_finite() {
                return Err(Error::IntegrationFailure { last_tau: last_ok });
            }
            last_ok = t_end;
            let s = (k + 1) / per_sample;
            taus.push(if s == n_samples { half_width } else { s as f64 * sample_span });
            matrices.push(u);
        }
    }
    Ok(EvolutionFamily { taus, matrices })
}

/// Integration of `u' = Λ u` over `n` steps of size `h` with amplitudes given
/// on the half-step node grid `τ₀ + j·h/2`, `j = 0..=2n`, and `γ ≡ 1`.
///
/// Used by parameter scans, where the node values of the time dependence can
/// be tabulated once and reused for every parameter point.
pub fn propagate_tabulated(beta_nodes: &[f64], h: f64) -> SymplecticMatrix {
    debug_assert!(beta_nodes.len() % 2 == 1);
    let n = (beta_nodes.len() - 1) / 2;
    let mut u = SymplecticMatrix::IDENTITY;
    for k in 0..n {
        u = rk4_step(
            &u,
            h,
            (1.0, beta_nodes[2 * k]),
            (1.0, beta_nodes[2 * k + 1]),
            (1.0, beta_nodes[2 * k + 2]),
        );
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{free_evolution, rotation};
    use crate::profile::Domain;
    use std::f64::consts::PI;

    #[test]
    fn free_evolution_closed_form() {
        for tau in [0.5, 1.0, -2.0, 10.0] {
            let u = propagate(&AmplitudeProfile::free(), 0.0, tau, StepControl::default()).unwrap();
            assert!(u.max_abs_diff(&free_evolution(tau)) < 1e-10, "{tau}: {u}");
        }
    }

    #[test]
    fn constant_beta_matches_rotation() {
        for kappa in [0.5_f64, 1.0, 1.7] {
            let p = AmplitudeProfile::constant(kappa * kappa);
            for tau in [0.3, PI, -4.0, 10.0] {
                let u = propagate(&p, 0.0, tau, StepControl::default()).unwrap();
                assert!(u.max_abs_diff(&rotation(kappa, tau)) < 1e-8, "kappa {kappa} tau {tau}");
                assert!(u.det_deviation() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_length_is_identity() {
        let u = propagate(&AmplitudeProfile::constant(3.0), 1.0, 1.0, StepControl::default()).unwrap();
        assert_eq!(u, SymplecticMatrix::IDENTITY);
    }

    #[test]
    fn backward_integration_inverts_forward() {
        let p = AmplitudeProfile::new(|t: f64| 1.2 + 0.8 * t.cos(), Domain::ALL);
        let fwd = propagate(&p, 0.3, 2.0, StepControl::default()).unwrap();
        let bwd = propagate(&p, 2.0, 0.3, StepControl::default()).unwrap();
        assert!((fwd * bwd).max_abs_diff(&SymplecticMatrix::IDENTITY) < 1e-10);
    }

    #[test]
    fn richardson_diagnostic_is_small() {
        let p = AmplitudeProfile::new(|t: f64| 1.2 + 1.6 * t.cos(), Domain::ALL);
        let d = propagate_with_diagnostics(&p, 0.0, 2.0 * PI, StepControl::with_step(1e-2).with_richardson())
            .unwrap();
        let e = d.richardson_error.unwrap();
        assert!(e > 0.0 && e < 1e-7, "{e}");
        assert!(d.det_drift < 1e-7);
    }

    #[test]
    fn non_finite_amplitude_reports_last_tau() {
        let p = AmplitudeProfile::new(|t: f64| if t > 0.5 { f64::NAN } else { 1.0 }, Domain::ALL);
        match propagate(&p, 0.0, 1.0, StepControl::with_step(1e-3)) {
            Err(Error::IntegrationFailure { last_tau }) => assert!(last_tau <= 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_step_and_domain() {
        let p = AmplitudeProfile::constant(1.0).with_domain(Domain::new(0.0, 1.0).unwrap());
        assert!(propagate(&p, 0.0, 2.0, StepControl::default()).is_err());
        assert!(propagate(&p, 0.0, 0.5, StepControl::with_step(0.0)).is_err());
    }

    #[test]
    fn symmetric_examples() {
        let fam = propagate_symmetric(&AmplitudeProfile::free(), 1.0, 4, StepControl::default()).unwrap();
        let (tau, u) = fam.last().unwrap();
        assert_eq!(tau, 1.0);
        assert!(u.max_abs_diff(&SymplecticMatrix::new(1.0, 2.0, 0.0, 1.0)) < 1e-12);
        assert_eq!(fam.matrices[0], SymplecticMatrix::IDENTITY);

        let fam = propagate_symmetric(&AmplitudeProfile::constant(1.0), PI / 4.0, 8, StepControl::default())
            .unwrap();
        let (_, u) = fam.last().unwrap();
        assert!(u.max_abs_diff(&SymplecticMatrix::new(0.0, 1.0, -1.0, 0.0)) < 1e-10);
    }

    #[test]
    fn symmetric_rejects_asymmetric_profile() {
        let p = AmplitudeProfile::new(|t: f64| 1.0 + 0.3 * t, Domain::ALL);
        assert!(matches!(
            propagate_symmetric(&p, 1.0, 4, StepControl::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn symmetric_agrees_with_two_point() {
        let p = AmplitudeProfile::new(|t: f64| 0.4 + 1.1 * (2.0 * t).cos() + 0.2 * t * t, Domain::ALL);
        let fam = propagate_symmetric(&p, 1.5, 10, StepControl::default()).unwrap();
        for (tau, u) in fam.iter() {
            let direct = propagate(&p, -tau, tau, StepControl::default()).unwrap();
            assert!(u.max_abs_diff(&direct) < 1e-6);
            assert!(u.is_equidiagonal(1e-7));
        }
    }

    #[test]
    fn dense_matches_pointwise() {
        let p = AmplitudeProfile::new(|t: f64| 1.0 + 0.5 * t.sin(), Domain::ALL);
        let fam = propagate_dense(&p, -1.0, 2.0, 6, StepControl::default()).unwrap();
        assert_eq!(fam.len(), 7);
        for (tau, u) in fam.iter() {
            let direct = propagate(&p, -1.0, tau, StepControl::default()).unwrap();
            assert!(u.max_abs_diff(&direct) < 1e-10);
        }
    }

    #[test]
    fn tabulated_matches_profile_path() {
        let (b0, b1) = (1.2, 0.8);
        let tau0 = PI / 2.0;
        let n = 2000;
        let h = 2.0 * PI / n as f64;
        let nodes: Vec<f64> = (0..=2 * n)
            .map(|j| b0 + 2.0 * b1 * (tau0 + j as f64 * 0.5 * h).cos())
            .collect();
        let tab = propagate_tabulated(&nodes, h);
        let p = AmplitudeProfile::new(move |t: f64| b0 + 2.0 * b1 * t.cos(), Domain::ALL);
        let direct = propagate(&p, tau0, tau0 + 2.0 * PI, StepControl::with_step(h)).unwrap();
        assert!(tab.max_abs_diff(&direct) < 1e-12);
    }
}
