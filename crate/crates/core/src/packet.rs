//! Gaussian packets carried by an evolution family: centers follow the
//! classical trajectories, second moments transform as `Σ → u Σ uᵀ`.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::CsvWriter;
use crate::matrix::SymplecticMatrix;
use crate::profile::AmplitudeProfile;
use crate::propagate::{propagate_dense, EvolutionFamily, StepControl};

/// Two-sided Gaussian quantile enclosing 0.999 of the probability.
pub const SHADOW_W: f64 = 3.2905;

/// Determinant tolerance for matrices applied to packets; admits matrices
/// quoted to three decimals.
pub const SYMPLECTIC_TOL: f64 = 5e-3;

/// Packet starting positions in the trajectory congruence.
pub const DEFAULT_P0: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub q0: f64,
    pub p0: f64,
    pub kappa: f64,
}

impl GaussianPacket {
    pub fn new(q0: f64, p0: f64, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Argument(format!("packet width kappa must be positive, got {kappa}")));
        }
        if !(q0.is_finite() && p0.is_finite()) {
            return Err(Error::Argument("packet center must be finite".into()));
        }
        Ok(Self { q0, p0, kappa })
    }

    /// Unit-width packet, `(Δq)² = (Δp)² = 1/2`.
    pub fn unit(q0: f64, p0: f64) -> Self {
        Self { q0, p0, kappa: 1.0 }
    }

    /// Initial `[[⟨q²⟩_c, ⟨qp⟩_c], [⟨pq⟩_c, ⟨p²⟩_c]]`.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        [[0.5 / self.kappa, 0.0], [0.0, 0.5 * self.kappa]]
    }

    /// Position variance after `u`, for any width.
    pub fn variance_q(&self, u: &SymplecticMatrix) -> f64 {
        u.u11 * u.u11 / (2.0 * self.kappa) + self.kappa * u.u12 * u.u12 / 2.0
    }

    pub fn variance_p(&self, u: &SymplecticMatrix) -> f64 {
        u.u21 * u.u21 / (2.0 * self.kappa) + self.kappa * u.u22 * u.u22 / 2.0
    }
}

fn require_unit(pk: &GaussianPacket) -> Result<()> {
    if pk.kappa != 1.0 {
        return Err(Error::Precondition(format!(
            "unit-width packet required, got kappa = {}",
            pk.kappa
        )));
    }
    Ok(())
}

pub fn evolve_center(pk: &GaussianPacket, u: &SymplecticMatrix) -> Result<(f64, f64)> {
    u.ensure_symplectic(SYMPLECTIC_TOL)?;
    let [q, p] = u.apply([pk.q0, pk.p0]);
    Ok((q, p))
}

/// `Δq = sqrt(½(u₁₁² + u₁₂²))` for a unit-width packet.
pub fn uncertainty_q(pk: &GaussianPacket, u: &SymplecticMatrix) -> Result<f64> {
    require_unit(pk)?;
    Ok((0.5 * (u.u11 * u.u11 + u.u12 * u.u12)).sqrt())
}

/// `Δp = sqrt(½(u₂₁² + u₂₂²))` for a unit-width packet.
pub fn uncertainty_p(pk: &GaussianPacket, u: &SymplecticMatrix) -> Result<f64> {
    require_unit(pk)?;
    Ok((0.5 * (u.u21 * u.u21 + u.u22 * u.u22)).sqrt())
}

/// Position probability density of the evolved unit packet at `x`.
pub fn probability_density(pk: &GaussianPacket, u: &SymplecticMatrix, x: f64) -> Result<f64> {
    let dq = uncertainty_q(pk, u)?;
    let mean = u.u11 * pk.q0 + u.u12 * pk.p0;
    let z = (x - mean) / dq;
    Ok((-z * z).exp() / (PI.sqrt() * dq))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub tau: f64,
    pub q: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub packet: GaussianPacket,
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }
}

/// Applies one evolution family to every packet center.
pub fn apply_family(family: &EvolutionFamily, packets: &[GaussianPacket]) -> Result<Vec<Trajectory>> {
    packets
        .iter()
        .map(|pk| {
            let points = family
                .iter()
                .map(|(tau, u)| evolve_center(pk, u).map(|(q, p)| TrajectoryPoint { tau, q, p }))
                .collect::<Result<Vec<_>>>()?;
            Ok(Trajectory { packet: *pk, points })
        })
        .collect()
}

/// The congruence of packet-center trajectories over `interval`, from a single
/// dense integration pass.
pub fn trajectory_congruence(
    profile: &AmplitudeProfile,
    interval: (f64, f64),
    packets: &[GaussianPacket],
    n_samples: usize,
    step: StepControl,
) -> Result<(EvolutionFamily, Vec<Trajectory>)> {
    let family = propagate_dense(profile, interval.0, interval.1, n_samples, step)?;
    let trajectories = apply_family(&family, packets)?;
    Ok((family, trajectories))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShadowSample {
    pub tau: f64,
    pub q_mean: f64,
    pub dq: f64,
    pub lo: f64,
    pub hi: f64,
}

/// `⟨q⟩ ± w·Δq` along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShadowBand {
    pub w: f64,
    pub samples: Vec<ShadowSample>,
}

impl ShadowBand {
    pub fn from_family(family: &EvolutionFamily, pk: &GaussianPacket, w: f64) -> Result<Self> {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::Argument(format!("band multiplier must be non-negative, got {w}")));
        }
        let samples = family
            .iter()
            .map(|(tau, u)| {
                let (q_mean, _) = evolve_center(pk, u)?;
                let dq = uncertainty_q(pk, u)?;
                Ok(ShadowSample {
                    tau,
                    q_mean,
                    dq,
                    lo: q_mean - w * dq,
                    hi: q_mean + w * dq,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { w, samples })
    }

    /// `max |⟨q⟩| + w·Δq`.
    pub fn max_extent(&self) -> f64 {
        self.samples.iter().map(|s| s.lo.abs().max(s.hi.abs())).fold(0.0, f64::max)
    }

    /// The sample with the widest band.
    pub fn widest(&self) -> Option<&ShadowSample> {
        self.samples.iter().max_by(|a, b| a.dq.total_cmp(&b.dq))
    }
}

pub fn uncertainty_shadow(
    profile: &AmplitudeProfile,
    interval: (f64, f64),
    pk: &GaussianPacket,
    w: f64,
    n_samples: usize,
    step: StepControl,
) -> Result<ShadowBand> {
    require_unit(pk)?;
    let family = propagate_dense(profile, interval.0, interval.1, n_samples, step)?;
    ShadowBand::from_family(&family, pk, w)
}

/// `tau,q,p`
pub fn write_trajectory_csv<W: Write>(t: &Trajectory, out: W) -> std::io::Result<()> {
    let mut w = CsvWriter::new(out, &["tau", "q", "p"])?;
    for pt in &t.points {
        w.row(&[pt.tau, pt.q, pt.p])?;
    }
    w.flush()
}

/// `tau,qmean,dq,lo,hi`
pub fn write_shadow_csv<W: Write>(band: &ShadowBand, out: W) -> std::io::Result<()> {
    let mut w = CsvWriter::new(out, &["tau", "qmean", "dq", "lo", "hi"])?;
    for s in &band.samples {
        w.row(&[s.tau, s.q_mean, s.dq, s.lo, s.hi])?;
    }
    w.flush()
}
