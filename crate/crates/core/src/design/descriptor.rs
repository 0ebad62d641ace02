//! JSON persistence of designs and the profile CSV dump.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::CsvWriter;

use super::synth::beta_from_theta;
use super::theta::{GammaSpec, ThetaDesign};

/// Stored coefficients may differ from a fresh solve by at most this much.
const COEFFICIENT_TOL: f64 = 1e-9;

/// `{b, c, beta_end, gamma: {kind, value}, a: [a1, a3, a5, a7]}`; `a` is
/// optional on input and recomputed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignDescriptor {
    pub b: f64,
    pub c: f64,
    pub beta_end: f64,
    pub gamma: GammaSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 4]>,
}

impl From<&ThetaDesign> for DesignDescriptor {
    fn from(d: &ThetaDesign) -> Self {
        Self {
            b: d.b,
            c: d.c,
            beta_end: d.beta_end,
            gamma: d.gamma,
            a: Some(d.a),
        }
    }
}

impl DesignDescriptor {
    pub fn to_design(&self) -> Result<ThetaDesign> {
        let d = ThetaDesign::solve(self.b, self.c, self.beta_end, self.gamma)?;
        if let Some(a) = self.a {
            let diff = a.iter().zip(&d.a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            if !(diff <= COEFFICIENT_TOL) {
                return Err(Error::Descriptor(format!(
                    "stored coefficients {a:?} disagree with the design constants (max diff {diff:.3e})"
                )));
            }
        }
        Ok(d)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Descriptor(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }
}

/// Writes `tau,beta,gamma,theta` at `n + 1` uniform points of `[lo, hi]`.
/// Failed `β` evaluations are written as `NaN`.
pub fn write_profile_csv<W: Write>(d: &ThetaDesign, lo: f64, hi: f64, n: usize, out: W) -> std::io::Result<()> {
    let mut w = CsvWriter::new(out, &["tau", "beta", "gamma", "theta"])?;
    let n = n.max(1);
    for i in 0..=n {
        let tau = lo + (hi - lo) * i as f64 / n as f64;
        let beta = beta_from_theta(d, tau).unwrap_or(f64::NAN);
        w.row(&[tau, beta, d.gamma.eval(tau), d.theta(tau)])?;
    }
    w.flush()
}
