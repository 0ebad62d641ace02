//! Laboratory units for the Paul trap and the solenoid, in CGS-Gaussian.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mathieu::MathieuParams;
use crate::profile::{AmplitudeProfile, Domain};

/// cm/s
pub const SPEED_OF_LIGHT: f64 = 2.99792458e10;
/// esu
pub const ELEMENTARY_CHARGE: f64 = 4.80320471e-10;
/// erg·s
pub const HBAR: f64 = 1.054571817e-27;
/// g
pub const PROTON_MASS: f64 = 1.67262192e-24;
/// erg per eV
pub const ERG_PER_EV: f64 = 1.602176634e-12;
/// volts per statvolt
pub const VOLTS_PER_STATVOLT: f64 = 299.792458;

fn default_hbar() -> f64 {
    HBAR
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalContext {
    pub mass_g: f64,
    /// In elementary charges.
    pub charge_e: f64,
    pub r0_cm: f64,
    pub omega_rad_s: f64,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    /// Time scale of `τ = t/T`; `2π/ω` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_scale_s: Option<f64>,
}

/// `Φ(t) = Φ₀ + Φ₁ cos ωt`, volts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapDrive {
    pub phi0: f64,
    pub phi1: f64,
}

impl PhysicalContext {
    pub fn new(mass_g: f64, charge_e: f64, r0_cm: f64, omega_rad_s: f64) -> Result<Self> {
        let ctx = Self {
            mass_g,
            charge_e,
            r0_cm,
            omega_rad_s,
            hbar: HBAR,
            time_scale_s: None,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    /// A proton in an `r₀ = 10 cm` trap driven by a 3 km radio wave, with
    /// `ω = c/λ`.
    pub fn proton_radio_example() -> Self {
        Self {
            mass_g: PROTON_MASS,
            charge_e: 1.0,
            r0_cm: 10.0,
            omega_rad_s: SPEED_OF_LIGHT / 3.0e5,
            hbar: HBAR,
            time_scale_s: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Argument(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("mass_g", self.mass_g)?;
        positive("charge_e", self.charge_e)?;
        positive("r0_cm", self.r0_cm)?;
        positive("omega_rad_s", self.omega_rad_s)?;
        positive("hbar", self.hbar)?;
        if let Some(t) = self.time_scale_s {
            positive("time_scale_s", t)?;
        }
        Ok(())
    }

    pub fn charge_esu(&self) -> f64 {
        self.charge_e * ELEMENTARY_CHARGE
    }

    pub fn time_scale(&self) -> f64 {
        self.time_scale_s.unwrap_or(2.0 * PI / self.omega_rad_s)
    }

    /// `ω² r₀² m`, erg.
    pub fn energy_scale_erg(&self) -> f64 {
        self.omega_rad_s * self.omega_rad_s * self.r0_cm * self.r0_cm * self.mass_g
    }

    pub fn energy_scale_ev(&self) -> f64 {
        self.energy_scale_erg() / ERG_PER_EV
    }

    /// Volts of drive per unit of dimensionless amplitude, `ω² r₀² m / e`.
    pub fn volts_per_unit_beta(&self) -> f64 {
        self.energy_scale_erg() / self.charge_esu() * VOLTS_PER_STATVOLT
    }

    /// Dimensionless `(q_d, p_d)` from CGS position and momentum.
    pub fn to_dimensionless_phase(&self, q_cm: f64, p_cgs: f64) -> (f64, f64) {
        let t = self.time_scale();
        (q_cm * (self.mass_g / (self.hbar * t)).sqrt(), p_cgs * (t / (self.hbar * self.mass_g)).sqrt())
    }
}

/// `β₀ = eΦ₀/(ω²r₀²m)`, `2β₁ = eΦ₁/(ω²r₀²m)`.
pub fn trap_to_dimensionless(ctx: &PhysicalContext, drive: TrapDrive) -> Result<MathieuParams> {
    ctx.validate()?;
    let v = ctx.volts_per_unit_beta();
    Ok(MathieuParams::new(drive.phi0 / v, drive.phi1 / (2.0 * v)))
}

pub fn required_voltages(ctx: &PhysicalContext, params: MathieuParams) -> Result<TrapDrive> {
    ctx.validate()?;
    let v = ctx.volts_per_unit_beta();
    Ok(TrapDrive {
        phi0: params.beta0 * v,
        phi1: 2.0 * params.beta1 * v,
    })
}

/// `e T / (2 m c)`, converting gauss to the dimensionless `κ`.
fn kappa_per_gauss(ctx: &PhysicalContext) -> f64 {
    ctx.charge_esu() * ctx.time_scale() / (2.0 * ctx.mass_g * SPEED_OF_LIGHT)
}

/// `β(τ) = (e T B(Tτ) / (2mc))²` for a solenoid field `B(t)` in gauss.
pub fn magnetic_beta<F>(ctx: &PhysicalContext, field: F) -> Result<AmplitudeProfile>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    ctx.validate()?;
    let k = kappa_per_gauss(ctx);
    let t = ctx.time_scale();
    Ok(AmplitudeProfile::new(
        move |tau| {
            let kappa = k * field(t * tau);
            kappa * kappa
        },
        Domain::ALL,
    ))
}

/// The field `B(t) = (2mc/(eT)) √β(t/T)` realizing a non-negative `β`.
pub fn magnetic_field_for<F>(ctx: &PhysicalContext, beta: F) -> Result<impl Fn(f64) -> f64 + Send + Sync + Clone>
where
    F: Fn(f64) -> f64 + Send + Sync + Clone,
{
    ctx.validate()?;
    let k = kappa_per_gauss(ctx);
    let t = ctx.time_scale();
    Ok(move |time: f64| {
        let b = beta(time / t);
        if b < 0.0 {
            f64::NAN
        } else {
            b.sqrt() / k
        }
    })
}
