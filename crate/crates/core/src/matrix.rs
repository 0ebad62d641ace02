//! 2×2 real symplectic matrices and the equidiagonal (Toeplitz) algebra.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `u11 - u22` for closed-form equidiagonal inputs.
pub const EQUIDIAGONAL_TOL: f64 = 1e-9;

/// A real 2×2 matrix, stored row-major.
///
/// Evolution maps of quadratic Hamiltonians have unit determinant; the type
/// does not enforce it, because propagated matrices only satisfy it up to
/// integration error. Use [`SymplecticMatrix::det_deviation`] to monitor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticMatrix {
    pub u11: f64,
    pub u12: f64,
    pub u21: f64,
    pub u22: f64,
}

impl SymplecticMatrix {
    pub const IDENTITY: Self = Self::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(u11: f64, u12: f64, u21: f64, u22: f64) -> Self {
        Self { u11, u12, u21, u22 }
    }

    pub fn from_rows(rows: [[f64; 2]; 2]) -> Self {
        Self::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.u11, self.u12], [self.u21, self.u22]]
    }

    pub fn det(&self) -> f64 {
        self.u11 * self.u22 - self.u12 * self.u21
    }

    pub fn det_deviation(&self) -> f64 {
        (self.det() - 1.0).abs()
    }

    pub fn trace(&self) -> f64 {
        self.u11 + self.u22
    }

    /// Inverse of a unit-determinant matrix, computed exactly from the
    /// adjugate divided by the actual determinant.
    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self::new(self.u22 / d, -self.u12 / d, -self.u21 / d, self.u11 / d)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.u11, self.u21, self.u12, self.u22)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.u11, s * self.u12, s * self.u21, s * self.u22)
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.u11 * v[0] + self.u12 * v[1],
            self.u21 * v[0] + self.u22 * v[1],
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.u11.is_finite() && self.u12.is_finite() && self.u21.is_finite() && self.u22.is_finite()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.u11 - other.u11)
            .abs()
            .max((self.u12 - other.u12).abs())
            .max((self.u21 - other.u21).abs())
            .max((self.u22 - other.u22).abs())
    }

    pub fn equidiagonal_defect(&self) -> f64 {
        (self.u11 - self.u22).abs()
    }

    pub fn is_equidiagonal(&self, tol: f64) -> bool {
        self.equidiagonal_defect() <= tol
    }

    /// `uv + vu`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    /// Checks `|det - 1| <= tol`.
    pub fn ensure_symplectic(&self, tol: f64) -> Result<()> {
        let deviation = self.det_deviation();
        if deviation <= tol {
            Ok(())
        } else {
            Err(Error::NonSymplectic { deviation, tol })
        }
    }
}

impl Default for SymplecticMatrix {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Mul for SymplecticMatrix {
    type Output = Self;

    fn mul(self, r: Self) -> Self {
        Self::new(
            self.u11 * r.u11 + self.u12 * r.u21,
            self.u11 * r.u12 + self.u12 * r.u22,
            self.u21 * r.u11 + self.u22 * r.u21,
            self.u21 * r.u12 + self.u22 * r.u22,
        )
    }
}

impl Add for SymplecticMatrix {
    type Output = Self;

    fn add(self, r: Self) -> Self {
        Self::new(self.u11 + r.u11, self.u12 + r.u12, self.u21 + r.u21, self.u22 + r.u22)
    }
}

impl Sub for SymplecticMatrix {
    type Output = Self;

    fn sub(self, r: Self) -> Self {
        Self::new(self.u11 - r.u11, self.u12 - r.u12, self.u21 - r.u21, self.u22 - r.u22)
    }
}

impl fmt::Display for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{:.6}, {:.6}], [{:.6}, {:.6}]]",
            self.u11, self.u12, self.u21, self.u22
        )
    }
}

/// Closed-form evolution under a constant elastic amplitude `β = κ²` for a
/// time `delta_tau`. `κ = 0` gives free evolution `[[1, Δτ], [0, 1]]`.
pub fn rotation(kappa: f64, delta_tau: f64) -> SymplecticMatrix {
    if kappa == 0.0 {
        return free_evolution(delta_tau);
    }
    let (s, c) = (kappa * delta_tau).sin_cos();
    SymplecticMatrix::new(c, s / kappa, -kappa * s, c)
}

pub fn free_evolution(delta_tau: f64) -> SymplecticMatrix {
    SymplecticMatrix::new(1.0, delta_tau, 0.0, 1.0)
}

/// Squeezed Fourier transformation `[[0, 1/κ], [-κ, 0]]`, i.e. a rotation
/// over a quarter period.
pub fn squeezed_fourier(kappa: f64) -> SymplecticMatrix {
    SymplecticMatrix::new(0.0, 1.0 / kappa, -kappa, 0.0)
}

/// Product of `ms` in list order: `ms[0] · ms[1] ⋯ ms[n-1]`, so the last
/// matrix acts first on a phase-space vector.
pub fn compose(ms: &[SymplecticMatrix]) -> Result<SymplecticMatrix> {
    let (first, rest) = ms
        .split_first()
        .ok_or_else(|| Error::Argument("compose needs at least one matrix".into()))?;
    Ok(rest.iter().fold(*first, |acc, m| acc * *m))
}

/// Symmetric product `vₙ⋯v₁ v₀ v₁⋯vₙ`; `vs[0]` is `v₁`.
pub fn symmetric_product(v0: &SymplecticMatrix, vs: &[SymplecticMatrix]) -> Result<SymplecticMatrix> {
    for (i, m) in std::iter::once(v0).chain(vs).enumerate() {
        if !m.is_equidiagonal(EQUIDIAGONAL_TOL) {
            return Err(Error::Precondition(format!(
                "factor {i} is not equidiagonal (|u11 - u22| = {:e})",
                m.equidiagonal_defect()
            )));
        }
    }
    Ok(vs.iter().fold(*v0, |acc, v| *v * acc * *v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &SymplecticMatrix, b: &SymplecticMatrix, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn rotation_special_cases() {
        let sqf = SymplecticMatrix::new(0.0, 1.0, -1.0, 0.0);
        assert!(close(&rotation(1.0, PI / 2.0), &sqf, 1e-15));
        assert!(close(&rotation(2.0, PI / 4.0), &SymplecticMatrix::new(0.0, 0.5, -2.0, 0.0), 1e-15));
        assert!(close(&rotation(3.0, 2.0 * PI / 3.0), &SymplecticMatrix::IDENTITY, 1e-15));
        assert_eq!(rotation(0.0, 1.5), free_evolution(1.5));
    }

    #[test]
    fn compose_two_squeezed_fouriers() {
        let u = compose(&[squeezed_fourier(1.0), squeezed_fourier(2.0)]).unwrap();
        assert!(close(&u, &SymplecticMatrix::new(-2.0, 0.0, 0.0, -0.5), 1e-15));
    }

    #[test]
    fn compose_identity_and_inverse() {
        let m = rotation(1.3, 0.7) * free_evolution(0.4);
        assert!(close(&compose(&[SymplecticMatrix::IDENTITY, m]).unwrap(), &m, 1e-15));
        assert!(close(&compose(&[m, m.inverse()]).unwrap(), &SymplecticMatrix::IDENTITY, 1e-14));
        assert!(matches!(compose(&[]), Err(Error::Argument(_))));
    }

    #[test]
    fn symmetric_product_cases() {
        let u = symmetric_product(&rotation(1.0, PI / 2.0), &[]).unwrap();
        assert!(close(&u, &SymplecticMatrix::new(0.0, 1.0, -1.0, 0.0), 1e-15));

        let v0 = rotation(1.0, 0.3);
        let v1 = rotation(2.0, 0.2);
        let u = symmetric_product(&v0, &[v1]).unwrap();
        // direct 2x2 product
        let r = v1.rows();
        let m = v0.rows();
        let mut rm = [[0.0; 2]; 2];
        let mut rmr = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                rm[i][j] = (0..2).map(|k| r[i][k] * m[k][j]).sum();
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                rmr[i][j] = (0..2).map(|k| rm[i][k] * r[k][j]).sum();
            }
        }
        assert!(close(&u, &SymplecticMatrix::from_rows(rmr), 1e-15));
        assert!((u.u11 - u.u22).abs() < 1e-15);
        assert!((u.u11 - 0.5 * u.trace()).abs() < 1e-15);
    }

    #[test]
    fn symmetric_product_rejects_shear() {
        let shear = SymplecticMatrix::new(2.0, 0.0, 0.0, 0.5);
        assert!(matches!(
            symmetric_product(&rotation(1.0, 0.1), &[shear]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn ensure_symplectic_reports_deviation() {
        assert!(SymplecticMatrix::IDENTITY.ensure_symplectic(1e-12).is_ok());
        let bad = SymplecticMatrix::new(2.0, 0.0, 0.0, 1.0);
        assert!(matches!(bad.ensure_symplectic(1e-9), Err(Error::NonSymplectic { .. })));
    }
}
