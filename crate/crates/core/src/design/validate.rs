//! Pointwise regularity conditions on a designed `θ`.

use serde::Serialize;

use crate::error::Result;

use super::synth::{beta_from_theta, locate_zero, SLOPE_TOL};
use super::theta::ThetaDesign;

/// Sign-change scan resolution for zeros of `θ` and `θ'`.
pub const SCAN_POINTS: usize = 10_000;

pub const CONDITION2_TOL: f64 = 1e-6;
pub const CONDITION3_TOL: f64 = 1e-8;
pub const ENDPOINT_TOL: f64 = 1e-8;

/// A zero of `θ` with the slope measured there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularPoint {
    pub tau: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignReport {
    /// `θ' = ±2` at every zero of `θ`.
    pub condition1_ok: bool,
    pub condition1_residual: f64,
    /// `β' = 0` at zeros of `θ` where also `θ''' = 0`.
    pub condition2_ok: bool,
    pub condition2_residual: f64,
    /// `-βθ² = ½θ''θ + γ` where `θ' = 0`, `θ ≠ 0`.
    pub condition3_ok: bool,
    pub condition3_residual: f64,
    /// `|β(T) - β_end|`.
    pub beta_endpoint_residual: f64,
    pub singular_points: Vec<SingularPoint>,
    /// Points where `θ' = 0` and `θ ≠ 0`: squeezed Fourier moments.
    pub fourier_points: Vec<f64>,
}

impl DesignReport {
    pub fn all_ok(&self) -> bool {
        self.condition1_ok && self.condition2_ok && self.condition3_ok
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let lo_negative = f(lo) < 0.0;
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Zeros of `f` on `[0, t_max]` from a uniform sign-change scan, refined by
/// bisection. Exact zeros at scan nodes are kept.
fn scan_zeros(f: impl Fn(f64) -> f64, t_max: f64, exact_tol: f64) -> Vec<f64> {
    let mut zeros = Vec::new();
    let node = |i: usize| t_max * i as f64 / SCAN_POINTS as f64;
    let mut prev = f(0.0);
    if prev.abs() <= exact_tol {
        zeros.push(0.0);
    }
    for i in 1..=SCAN_POINTS {
        let t = node(i);
        let v = f(t);
        if v.abs() <= exact_tol {
            if zeros.last().map_or(true, |z| (t - z).abs() > 2.0 * t_max / SCAN_POINTS as f64) {
                zeros.push(t);
            }
        } else if prev.abs() > exact_tol && prev * v < 0.0 {
            zeros.push(bisect(&f, node(i - 1), t));
        }
        prev = v;
    }
    zeros
}

fn beta_slope(d: &ThetaDesign, tau: f64) -> Result<f64> {
    let h = 1e-4;
    Ok((beta_from_theta(d, tau + h)? - beta_from_theta(d, tau - h)?) / (2.0 * h))
}

/// Checks the regularity conditions of `β` on `[-half_width, half_width]`.
/// By the antisymmetry of `θ` it is enough to scan `[0, half_width]`.
pub fn validate_design(d: &ThetaDesign, half_width: f64) -> DesignReport {
    let t_max = half_width.abs();

    let mut singular_points = Vec::new();
    for z in scan_zeros(|t| d.theta(t), t_max, 0.0) {
        let tau = locate_zero(d, z).unwrap_or(z);
        singular_points.push(SingularPoint {
            tau,
            slope: d.eval(tau).d1,
        });
    }
    let condition1_residual = singular_points
        .iter()
        .map(|p| (p.slope.abs() - 2.0).abs())
        .fold(0.0, f64::max);

    let mut condition2_residual: f64 = 0.0;
    let mut condition2_ok = true;
    for p in &singular_points {
        if d.eval(p.tau).d3.abs() <= 1e-8 {
            match beta_slope(d, p.tau) {
                Ok(s) => condition2_residual = condition2_residual.max(s.abs()),
                Err(_) => condition2_ok = false,
            }
        }
    }
    condition2_ok &= condition2_residual <= CONDITION2_TOL;

    let fourier_points: Vec<f64> = scan_zeros(|t| d.eval(t).d1, t_max, 1e-12)
        .into_iter()
        .filter(|t| d.theta(*t).abs() > 1e-9)
        .collect();
    let mut condition3_residual: f64 = 0.0;
    let mut condition3_ok = true;
    for &tau in &fourier_points {
        let t = d.eval(tau);
        match beta_from_theta(d, tau) {
            Ok(beta) => {
                let r = (-beta * t.theta * t.theta - (0.5 * t.d2 * t.theta + d.gamma.eval(tau))).abs();
                condition3_residual = condition3_residual.max(r);
            }
            Err(_) => condition3_ok = false,
        }
    }
    condition3_ok &= condition3_residual <= CONDITION3_TOL;

    let beta_endpoint_residual = beta_from_theta(d, t_max)
        .map(|b| (b - d.beta_end).abs())
        .unwrap_or(f64::INFINITY);

    DesignReport {
        condition1_ok: condition1_residual <= SLOPE_TOL,
        condition1_residual,
        condition2_ok,
        condition2_residual,
        condition3_ok,
        condition3_residual,
        beta_endpoint_residual,
        singular_points,
        fourier_points,
    }
}
