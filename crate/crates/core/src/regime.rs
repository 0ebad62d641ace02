//! Classification of one-period evolution matrices by `Γ = Tr u`.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::matrix::SymplecticMatrix;

/// Half-width of the band around `|Γ| = 2` reported as the threshold regime.
pub const THRESHOLD_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `|Γ| < 2`: eigenvalues `e^{±iσ}`, oscillating evolution.
    Stable,
    /// `|Γ| = 2`: eigenvalues `±1`.
    Threshold,
    /// `|Γ| > 2`: real eigenvalues `±e^{±σ}`, squeezing of the eigen-pair.
    Squeezing,
}

impl Regime {
    pub fn from_trace(trace: f64) -> Self {
        let excess = trace.abs() - 2.0;
        if excess.abs() <= THRESHOLD_BAND {
            Regime::Threshold
        } else if excess < 0.0 {
            Regime::Stable
        } else {
            Regime::Squeezing
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Stable => "stable",
            Regime::Threshold => "threshold",
            Regime::Squeezing => "squeezing",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn ser_complex_pair<S: Serializer>(v: &[Complex64; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
}

fn ser_rows<S: Serializer>(v: &[[Complex64; 2]; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub gamma_trace: f64,
    pub regime: Regime,
    /// `[λ⁺, λ⁻]`; in the squeezing regime `|λ⁺| = e^σ ≥ |λ⁻|`.
    #[serde(serialize_with = "ser_complex_pair")]
    pub eigenvalues: [Complex64; 2],
    /// Row eigenvectors `a` with `a·u = λ a`, one per eigenvalue, scaled so the
    /// entry of largest modulus equals `+1`. They define the global pair `a±`.
    #[serde(serialize_with = "ser_rows")]
    pub eigen_rows: [[Complex64; 2]; 2],
    /// Rotation angle (stable) or log-squeezing factor (squeezing); 0 at threshold.
    pub sigma: f64,
}

fn normalize_row(row: [Complex64; 2]) -> [Complex64; 2] {
    let pivot = if row[0].norm() >= row[1].norm() { row[0] } else { row[1] };
    if pivot.norm() == 0.0 {
        return row;
    }
    [row[0] / pivot, row[1] / pivot]
}

/// Left eigenvector of `u` for eigenvalue `lambda`: solves `x u11 + y u21 = λ x`
/// and `x u12 + y u22 = λ y`, taking the better conditioned of the two forms.
fn row_eigenvector(u: &SymplecticMatrix, lambda: Complex64) -> [Complex64; 2] {
    let c = Complex64::from(u.u21);
    let b = Complex64::from(u.u12);
    let from_first = [c, lambda - u.u11];
    let from_second = [lambda - u.u22, b];
    let n1 = from_first[0].norm_sqr() + from_first[1].norm_sqr();
    let n2 = from_second[0].norm_sqr() + from_second[1].norm_sqr();
    if n1.max(n2) < 1e-24 {
        // u is a multiple of the identity: every row vector is an eigenvector.
        return [Complex64::from(1.0), Complex64::from(0.0)];
    }
    normalize_row(if n1 >= n2 { from_first } else { from_second })
}

/// Classifies `u` by its trace. Requires `|det u - 1| <= tol`.
pub fn classify(u: &SymplecticMatrix, tol: f64) -> Result<RegimeReport> {
    u.ensure_symplectic(tol)?;
    let gamma = u.trace();
    let regime = Regime::from_trace(gamma);
    let sign = if gamma < 0.0 { -1.0 } else { 1.0 };
    let (eigenvalues, sigma) = match regime {
        Regime::Stable => {
            let sigma = (0.5 * gamma).acos();
            let z = Complex64::from_polar(1.0, sigma);
            ([z, z.conj()], sigma)
        }
        Regime::Threshold => ([Complex64::from(sign), Complex64::from(sign)], 0.0),
        Regime::Squeezing => {
            let sigma = (0.5 * gamma.abs()).acosh();
            (
                [Complex64::from(sign * sigma.exp()), Complex64::from(sign * (-sigma).exp())],
                sigma,
            )
        }
    };
    let mut eigen_rows = [
        row_eigenvector(u, eigenvalues[0]),
        row_eigenvector(u, eigenvalues[1]),
    ];
    if regime == Regime::Threshold && u.max_abs_diff(&SymplecticMatrix::IDENTITY.scale(sign)) < 1e-12 {
        eigen_rows[1] = [Complex64::from(0.0), Complex64::from(1.0)];
    }
    Ok(RegimeReport {
        gamma_trace: gamma,
        regime,
        eigenvalues,
        eigen_rows,
        sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::matrix::rotation;
    use std::f64::consts::{LN_2, PI};

    fn assert_left_eigen(u: &SymplecticMatrix, r: &RegimeReport) {
        for (lambda, row) in r.eigenvalues.iter().zip(r.eigen_rows.iter()) {
            let lhs0 = row[0] * u.u11 + row[1] * u.u21;
            let lhs1 = row[0] * u.u12 + row[1] * u.u22;
            assert!((lhs0 - lambda * row[0]).norm() < 1e-9);
            assert!((lhs1 - lambda * row[1]).norm() < 1e-9);
            let max = row[0].norm().max(row[1].norm());
            assert!((max - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_rotation_is_stable() {
        let u = SymplecticMatrix::new(0.0, 1.0, -1.0, 0.0);
        let r = classify(&u, 1e-9).unwrap();
        assert_eq!(r.regime, Regime::Stable);
        assert!((r.sigma - PI / 2.0).abs() < 1e-15);
        assert!((r.eigenvalues[0] - Complex64::i()).norm() < 1e-15);
        assert!((r.eigenvalues[1] + Complex64::i()).norm() < 1e-15);
        assert_left_eigen(&u, &r);
    }

    #[test]
    fn diagonal_is_squeezing() {
        let u = SymplecticMatrix::new(2.0, 0.0, 0.0, 0.5);
        let r = classify(&u, 1e-9).unwrap();
        assert_eq!(r.regime, Regime::Squeezing);
        assert!((r.sigma - LN_2).abs() < 1e-15);
        assert!((r.eigenvalues[0].re - 2.0).abs() < 1e-14);
        assert!((r.eigenvalues[1].re - 0.5).abs() < 1e-14);
        assert_left_eigen(&u, &r);
    }

    #[test]
    fn rounded_squeezing_matrix() {
        // det of the 3-decimal matrix is 0.99744
        let u = SymplecticMatrix::new(0.227, 0.007, 0.0, 4.394);
        assert!(classify(&u, 1e-9).is_err());
        let r = classify(&u, 5e-3).unwrap();
        assert_eq!(r.regime, Regime::Squeezing);
        assert!((r.gamma_trace - 4.621).abs() < 1e-12);
    }

    #[test]
    fn threshold_cases() {
        for u in [
            SymplecticMatrix::IDENTITY,
            SymplecticMatrix::new(1.0, 3.0, 0.0, 1.0),
            SymplecticMatrix::new(-1.0, 0.0, 2.0, -1.0),
        ] {
            let r = classify(&u, 1e-9).unwrap();
            assert_eq!(r.regime, Regime::Threshold);
            assert_eq!(r.sigma, 0.0);
            assert_left_eigen(&u, &r);
        }
    }

    #[test]
    fn negative_trace_squeezing() {
        let u = SymplecticMatrix::new(-2.0, 1.0, 0.0, -0.5);
        let r = classify(&u, 1e-9).unwrap();
        assert_eq!(r.regime, Regime::Squeezing);
        assert!((r.eigenvalues[0].re + 2.0).abs() < 1e-14);
        assert!((r.eigenvalues[0] * r.eigenvalues[1] - 1.0).norm() < 1e-14);
        assert_left_eigen(&u, &r);
    }

    #[test]
    fn stable_eigenvalues_unit_modulus() {
        for (k, t) in [(0.7, 0.4), (1.3, 2.0), (2.0, 1.0)] {
            let u = rotation(k, t) * SymplecticMatrix::new(1.0, 0.1, 0.0, 1.0);
            let r = classify(&u, 1e-9).unwrap();
            if r.regime == Regime::Stable {
                for z in r.eigenvalues {
                    assert!((z.norm() - 1.0).abs() < 1e-9);
                }
                assert_left_eigen(&u, &r);
            }
        }
    }

    #[test]
    fn rejects_non_symplectic() {
        let u = SymplecticMatrix::new(1.0, 0.0, 0.0, 2.0);
        assert!(matches!(classify(&u, 1e-6), Err(Error::NonSymplectic { .. })));
    }
}
