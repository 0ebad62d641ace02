//! Four-harmonic `θ(τ) = a₁ sin τ + a₃ sin 3τ + a₅ sin 5τ + a₇ sin 7τ` and the
//! linear system fixing its coefficients.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Harmonic orders of `θ`.
pub const HARMONICS: [f64; 4] = [1.0, 3.0, 5.0, 7.0];

/// `sin(kπ/2)` for the odd harmonics, exactly.
const SIN_HALF_PI: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

/// The kinetic-type amplitude `γ` entering the synthesis formula for `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GammaSpec {
    Const { value: f64 },
    /// `γ(τ) = sin² τ`
    Sin2,
}

impl GammaSpec {
    pub const UNIT: Self = GammaSpec::Const { value: 1.0 };

    /// `γ` and its first three derivatives at `tau`.
    pub fn derivatives(&self, tau: f64) -> [f64; 4] {
        match *self {
            GammaSpec::Const { value } => [value, 0.0, 0.0, 0.0],
            GammaSpec::Sin2 => {
                let (s2, c2) = (2.0 * tau).sin_cos();
                let s = tau.sin();
                [s * s, s2, 2.0 * c2, -4.0 * s2]
            }
        }
    }

    #[inline]
    pub fn eval(&self, tau: f64) -> f64 {
        match *self {
            GammaSpec::Const { value } => value,
            GammaSpec::Sin2 => {
                let s = tau.sin();
                s * s
            }
        }
    }

    /// Value at the interval ends `±π/2`.
    pub fn at_end(&self) -> f64 {
        match *self {
            GammaSpec::Const { value } => value,
            GammaSpec::Sin2 => 1.0,
        }
    }
}

impl std::fmt::Display for GammaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GammaSpec::Const { value } => write!(f, "const:{value}"),
            GammaSpec::Sin2 => f.write_str("sin2"),
        }
    }
}

impl std::str::FromStr for GammaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("sin2") {
            return Ok(GammaSpec::Sin2);
        }
        match s.split_once(':') {
            Some((kind, v)) if kind.eq_ignore_ascii_case("const") => v
                .trim()
                .parse::<f64>()
                .map(|value| GammaSpec::Const { value })
                .map_err(|e| Error::Argument(format!("bad gamma constant '{v}': {e}"))),
            _ => Err(Error::Argument(format!("gamma must be 'sin2' or 'const:<value>', got '{s}'"))),
        }
    }
}

/// `θ` and its first four derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaDerivatives {
    pub theta: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
}

/// A designed `θ(τ) = u₁₂(τ, -τ)` together with the design constants it was
/// solved from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaDesign {
    /// `[a₁, a₃, a₅, a₇]`
    pub a: [f64; 4],
    /// Target `u₁₂` at `±π/2`.
    pub b: f64,
    /// Third-derivative design constant.
    pub c: f64,
    /// `β(±π/2)`.
    pub beta_end: f64,
    pub gamma: GammaSpec,
}

impl ThetaDesign {
    /// Solves the coefficients for `γ` evaluated at the interval ends.
    pub fn solve(b: f64, c: f64, beta_end: f64, gamma: GammaSpec) -> Result<Self> {
        let a = solve_coefficients(b, c, beta_end, gamma.at_end())?;
        Ok(Self {
            a,
            b,
            c,
            beta_end,
            gamma,
        })
    }

    /// A design with explicitly given coefficients; nothing is checked.
    pub fn from_coefficients(a: [f64; 4], b: f64, c: f64, beta_end: f64, gamma: GammaSpec) -> Self {
        Self {
            a,
            b,
            c,
            beta_end,
            gamma,
        }
    }

    /// Analytic `θ, θ', θ'', θ''', θ''''` at `tau`.
    pub fn eval(&self, tau: f64) -> ThetaDerivatives {
        let mut out = ThetaDerivatives {
            theta: 0.0,
            d1: 0.0,
            d2: 0.0,
            d3: 0.0,
            d4: 0.0,
        };
        for (a, k) in self.a.iter().zip(HARMONICS) {
            let (s, c) = (k * tau).sin_cos();
            let (k2, k3) = (k * k, k * k * k);
            out.theta += a * s;
            out.d1 += a * k * c;
            out.d2 -= a * k2 * s;
            out.d3 -= a * k3 * c;
            out.d4 += a * k3 * k * s;
        }
        out
    }

    #[inline]
    pub fn theta(&self, tau: f64) -> f64 {
        self.a.iter().zip(HARMONICS).map(|(a, k)| a * (k * tau).sin()).sum()
    }

    pub fn gamma_end(&self) -> f64 {
        self.gamma.at_end()
    }

    /// Residuals of the four design conditions at `τ = 0` and `τ = π/2`.
    pub fn condition_residuals(&self) -> [f64; 4] {
        condition_residuals(&self.a, self.b, self.c, self.beta_end, self.gamma_end())
    }
}

/// `(θ, θ', θ'', θ''')` at `tau`.
pub fn theta_eval(d: &ThetaDesign, tau: f64) -> (f64, f64, f64, f64) {
    let t = d.eval(tau);
    (t.theta, t.d1, t.d2, t.d3)
}

fn system(b: f64, c: f64, beta_end: f64, gamma_end: f64) -> ([[f64; 4]; 4], [f64; 4]) {
    let mut m = [[0.0; 4]; 4];
    for (j, k) in HARMONICS.iter().enumerate() {
        // θ(π/2)
        m[0][j] = SIN_HALF_PI[j];
        // θ'(0)
        m[1][j] = *k;
        // θ''(π/2)
        m[2][j] = -k * k * SIN_HALF_PI[j];
        // a₁ + 27a₃ + 125a₅ + 343a₇, which is -θ'''(0)
        m[3][j] = k * k * k;
    }
    let rhs = [b, 2.0, -2.0 * gamma_end / b - 2.0 * b * beta_end, -c];
    (m, rhs)
}

/// Residuals of
///
/// * `θ(π/2) = b`
/// * `θ'(0) = 2`
/// * `θ''(π/2) = -2γ/b - 2bβ_end` (the squeezed Fourier endpoint identity
///   `-βθ² = ½θ''θ + γ` at `θ = b`)
/// * `Σ k³ aₖ = -c`, i.e. `θ'''(0) = c`
///
/// evaluated from the analytic derivatives of the harmonic series.
pub fn condition_residuals(a: &[f64; 4], b: f64, c: f64, beta_end: f64, gamma_end: f64) -> [f64; 4] {
    let (m, rhs) = system(b, c, beta_end, gamma_end);
    let mut r = [0.0; 4];
    for i in 0..4 {
        r[i] = (m[i].iter().zip(a).map(|(x, y)| x * y).sum::<f64>() - rhs[i]).abs();
    }
    r
}

/// Solves the 4×4 design system by Gaussian elimination with partial pivoting.
pub fn solve_coefficients(b: f64, c: f64, beta_end: f64, gamma_end: f64) -> Result<[f64; 4]> {
    if b == 0.0 || !b.is_finite() {
        return Err(Error::Argument(format!("b must be finite and non-zero, got {b}")));
    }
    if !c.is_finite() || !beta_end.is_finite() || !gamma_end.is_finite() {
        return Err(Error::Argument("design constants must be finite".into()));
    }
    let (mut m, mut rhs) = system(b, c, beta_end, gamma_end);
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("non-empty");
        // The matrix is a fixed integer matrix with non-zero determinant.
        assert!(m[pivot][col] != 0.0, "design system is singular");
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut a = [0.0; 4];
    for row in (0..4).rev() {
        let tail: f64 = (row + 1..4).map(|k| m[row][k] * a[k]).sum();
        a[row] = (rhs[row] - tail) / m[row][row];
    }
    Ok(a)
}

/// Closed-form coefficient formulas in closed form
/// conditions, kept as an independent cross-check of the linear solve.
pub fn closed_form_coefficients(b: f64, c: f64, beta_end: f64, gamma_end: f64) -> [f64; 4] {
    let (be, g) = (beta_end, gamma_end);
    [
        (b * (58.0 + c + 5.0 * b * (21.0 - 2.0 * be)) - 10.0 * g) / (128.0 * b),
        (b * (74.0 + c - b * (35.0 + 2.0 * be)) - 2.0 * g) / (128.0 * b),
        (b * (22.0 - c + 3.0 * b * (-7.0 + 6.0 * be)) + 18.0 * g) / (384.0 * b),
        -(b * (26.0 + c + 3.0 * b * (-5.0 + 2.0 * be)) + 6.0 * g) / (384.0 * b),
    ]
}

/// Comparison of the linear-solve coefficients with the closed-form formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientAudit {
    pub solved: [f64; 4],
    pub closed_form: [f64; 4],
    pub max_abs_difference: f64,
    /// Condition residuals of the solved coefficients.
    pub solved_residuals: [f64; 4],
    /// Condition residuals of the closed-form coefficients.
    pub closed_form_residuals: [f64; 4],
    /// Residual of the closed-form coefficients in the second-derivative row
    /// written without its `a₇` term (`-a₁ + 9a₃ - 25a₅`).
    pub closed_form_row_without_a7_residual: f64,
    /// Residual of the closed-form coefficients when the third-derivative row is
    /// read as the true `θ'''(0) = -c`.
    pub closed_form_opposite_c_sign_residual: f64,
}

pub fn audit_coefficients(b: f64, c: f64, beta_end: f64, gamma_end: f64) -> Result<CoefficientAudit> {
    let solved = solve_coefficients(b, c, beta_end, gamma_end)?;
    let closed_form = closed_form_coefficients(b, c, beta_end, gamma_end);
    let max_abs_difference = solved
        .iter()
        .zip(&closed_form)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let rhs3 = -2.0 * gamma_end / b - 2.0 * b * beta_end;
    let no_a7 = (-closed_form[0] + 9.0 * closed_form[1] - 25.0 * closed_form[2] - rhs3).abs();
    let true_d3: f64 = -closed_form.iter().zip(HARMONICS).map(|(a, k)| a * k * k * k).sum::<f64>();
    Ok(CoefficientAudit {
        solved,
        closed_form,
        max_abs_difference,
        solved_residuals: condition_residuals(&solved, b, c, beta_end, gamma_end),
        closed_form_residuals: condition_residuals(&closed_form, b, c, beta_end, gamma_end),
        closed_form_row_without_a7_residual: no_a7,
        closed_form_opposite_c_sign_residual: (true_d3 + c).abs(),
    })
}

/// `θ'(π/2)`, identically zero for odd harmonics.
pub fn endpoint_slope(d: &ThetaDesign) -> f64 {
    d.eval(FRAC_PI_2).d1
}
