//! `β = γ([½θ']² - 1)/θ² - θ''/(2θ)`: the amplitude realizing a designed
//! `θ(τ) = u₁₂(τ, -τ)`.

use crate::error::{Error, Result};
use crate::profile::{AmplitudeProfile, Domain};

use super::theta::{ThetaDesign, HARMONICS};

/// Below this `|θ|` the formula is evaluated through its series about the
/// nearby zero of `θ`.
pub const SINGULAR_WINDOW: f64 = 1e-6;

/// Allowed deviation of `|θ'|` from 2 at a zero of `θ`.
pub const SLOPE_TOL: f64 = 1e-6;

const ZERO_BISECT_TOL: f64 = 1e-12;

/// Inside this `|θ|`, `[½θ']² - 1` is formed relative to the nearby zero to
/// avoid cancellation.
const CANCELLATION_WINDOW: f64 = 1e-3;

/// `β(τ)` for the design, with `γ = d.gamma(τ)`.
pub fn beta_from_theta(d: &ThetaDesign, tau: f64) -> Result<f64> {
    let t = d.eval(tau);
    if t.theta.abs() > SINGULAR_WINDOW {
        let g = d.gamma.eval(tau);
        let half = 0.5 * t.d1;
        let sq = if t.theta.abs() < CANCELLATION_WINDOW {
            slope_excess(d, tau).map_or(half * half - 1.0, |(excess, sign)| excess * (half + sign))
        } else {
            half * half - 1.0
        };
        return Ok(g * sq / (t.theta * t.theta) - t.d2 / (2.0 * t.theta));
    }
    beta_near_zero(d, tau)
}

/// `½θ'(τ) - ½θ'(τ_z)` about the zero `τ_z` near `tau`, from
/// `cos kτ - cos kτ_z = -2 sin(k(τ+τ_z)/2) sin(k(τ-τ_z)/2)`, together with the
/// sign of `θ'(τ_z)`. Treats `|θ'(τ_z)| = 2` as exact, like the series.
fn slope_excess(d: &ThetaDesign, tau: f64) -> Option<(f64, f64)> {
    let tz = locate_zero(d, tau).ok()?;
    let slope = d.eval(tz).d1;
    if (slope.abs() - 2.0).abs() > SLOPE_TOL {
        return None;
    }
    let mut delta = 0.0;
    for (a, k) in d.a.iter().zip(HARMONICS) {
        delta -= 2.0 * k * a * (0.5 * k * (tau + tz)).sin() * (0.5 * k * (tau - tz)).sin();
    }
    Some((0.5 * delta, slope.signum()))
}

/// Locates the zero of `θ` near `tau` by bisection.
pub fn locate_zero(d: &ThetaDesign, tau: f64) -> Result<f64> {
    let t = d.eval(tau);
    if t.theta == 0.0 {
        return Ok(tau);
    }
    // |θ'| ≈ 2 puts the zero within |θ|/2 of tau; the bracket allows |θ'| ≥ 0.1.
    let width = (20.0 * t.theta.abs()).max(1e-9);
    let (mut lo, mut hi) = (tau - width, tau + width);
    let (f_lo, f_hi) = (d.theta(lo), d.theta(hi));
    if f_lo * f_hi > 0.0 {
        return Err(Error::MalformedDesign { tau, slope: t.d1 });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    let lo_negative = f_lo < 0.0;
    while hi - lo > ZERO_BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        let f = d.theta(mid);
        if f == 0.0 {
            return Ok(mid);
        }
        if (f < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Series evaluation inside the singular window.
///
/// With `s = τ - τ_z` about the zero `τ_z`, the numerator
/// `N = γ([½θ']² - 1) - ½θθ''` is expanded through `s³` and divided by
/// `θ² = s²P²`, `P = θ'(τ_z) + ½θ''(τ_z) s + …`. The constant term of
/// `[½θ']² - 1` is dropped: it is zero exactly when `θ'(τ_z) = ±2`, which is
/// the condition for a finite limit and is checked to [`SLOPE_TOL`].
pub fn beta_near_zero(d: &ThetaDesign, tau: f64) -> Result<f64> {
    let tz = locate_zero(d, tau)?;
    let z = d.eval(tz);
    if (z.d1.abs() - 2.0).abs() > SLOPE_TOL {
        return Err(Error::MalformedDesign { tau: tz, slope: z.d1 });
    }
    let s = tau - tz;
    let [g0, g1, g2, g3] = d.gamma.derivatives(tz);
    let gs = [g0, g1, 0.5 * g2, g3 / 6.0];
    // θ = Σ th[i] s^i, θ(τ_z) taken as 0
    let th = [0.0, z.d1, 0.5 * z.d2, z.d3 / 6.0, z.d4 / 24.0];
    // ½θ' - ½θ'(τ_z) = Σ q[i] s^i
    let q = [0.0, 0.5 * z.d2, 0.25 * z.d3, z.d4 / 12.0];
    // θ'' through s²
    let dd = [z.d2, z.d3, 0.5 * z.d4];
    // [½θ']² - 1 with the constant dropped: θ'(τ_z) q + q²
    let mut sq = [0.0; 4];
    for i in 0..4 {
        sq[i] += z.d1 * q[i];
        for j in 0..=i {
            sq[i] += q[j] * q[i - j];
        }
    }
    let mut num = [0.0; 4];
    for i in 0..4 {
        for j in 0..=i {
            num[i] += gs[j] * sq[i - j];
        }
        for j in 0..=i.min(2) {
            num[i] -= 0.5 * th[i - j] * dd[j];
        }
    }
    let residual = num[0].abs().max(num[1].abs());
    if residual > SLOPE_TOL {
        return Err(Error::SingularAmplitude { tau: tz, residual });
    }
    // β = (num₂ + num₃ s) / (P₀² + 2P₀P₁ s) to first order
    let (p0, p1) = (th[1], th[2]);
    let b0 = num[2] / (p0 * p0);
    let b1 = num[3] / (p0 * p0) - 2.0 * num[2] * p1 / (p0 * p0 * p0);
    Ok(b0 + b1 * s)
}

impl ThetaDesign {
    /// Physical amplitude profile realizing the design: `β` from the
    /// synthesis formula, unit kinetic term. Points where synthesis fails
    /// evaluate to NaN, which the propagator reports as an integration failure.
    pub fn profile(&self, domain: Domain) -> AmplitudeProfile {
        let d = *self;
        AmplitudeProfile::new(move |tau| beta_from_theta(&d, tau).unwrap_or(f64::NAN), domain)
    }

    pub fn beta(&self, tau: f64) -> Result<f64> {
        beta_from_theta(self, tau)
    }
}
