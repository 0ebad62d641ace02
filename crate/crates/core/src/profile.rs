//! Time-dependent amplitudes `(β(τ), γ(τ))` of `H = γ p²/2 + β q²/2`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A shareable real function of the dimensionless time.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Tolerance of the sampled `β(τ) = β(-τ)` check.
pub const SYMMETRY_TOL: f64 = 1e-10;

const SYMMETRY_SAMPLES: usize = 97;

/// Closed interval of admissible times. Either bound may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub const ALL: Self = Self {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Argument(format!("invalid domain [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, tau: f64) -> bool {
        tau >= self.lo && tau <= self.hi
    }

    pub fn check(&self, tau: f64) -> Result<()> {
        if self.contains(tau) {
            Ok(())
        } else {
            Err(Error::Domain {
                tau,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}

/// The pair of amplitudes defining the generator `Λ(τ) = [[0, γ], [-β, 0]]`.
#[derive(Clone)]
pub struct AmplitudeProfile {
    beta: ScalarFn,
    gamma: ScalarFn,
    unit_gamma: bool,
    domain: Domain,
    symmetric: bool,
}

impl fmt::Debug for AmplitudeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AmplitudeProfile")
            .field("domain", &self.domain)
            .field("unit_gamma", &self.unit_gamma)
            .field("symmetric", &self.symmetric)
            .finish_non_exhaustive()
    }
}

impl AmplitudeProfile {
    /// Profile with the given elastic amplitude and `γ ≡ 1`.
    pub fn new<F>(beta: F, domain: Domain) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            beta: Arc::new(beta),
            gamma: Arc::new(|_| 1.0),
            unit_gamma: true,
            domain,
            symmetric: false,
        }
    }

    pub fn constant(beta: f64) -> Self {
        Self::new(move |_| beta, Domain::ALL)
    }

    pub fn free() -> Self {
        Self::constant(0.0)
    }

    pub fn with_gamma<G>(mut self, gamma: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.gamma = Arc::new(gamma);
        self.unit_gamma = false;
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    /// Tags the profile as symmetric about `τ = 0` after checking
    /// `β(τ) = β(-τ)` and `γ(τ) = γ(-τ)` on a sample grid of `[0, half_width]`.
    pub fn into_symmetric(mut self, half_width: f64) -> Result<Self> {
        self.check_symmetry(half_width)?;
        self.symmetric = true;
        Ok(self)
    }

    pub fn check_symmetry(&self, half_width: f64) -> Result<()> {
        let t_max = half_width.abs().min(self.domain.hi).min(-self.domain.lo);
        for i in 0..SYMMETRY_SAMPLES {
            let tau = t_max * i as f64 / (SYMMETRY_SAMPLES - 1) as f64;
            for (name, f) in [("beta", &self.beta), ("gamma", &self.gamma)] {
                let (a, b) = (f(tau), f(-tau));
                if (a - b).abs() > SYMMETRY_TOL * a.abs().max(1.0) {
                    return Err(Error::Precondition(format!(
                        "{name} is not symmetric about 0: {name}({tau}) = {a}, {name}({}) = {b}",
                        -tau
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_tagged_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn has_unit_gamma(&self) -> bool {
        self.unit_gamma
    }

    #[inline]
    pub fn beta(&self, tau: f64) -> f64 {
        (self.beta)(tau)
    }

    #[inline]
    pub fn gamma(&self, tau: f64) -> f64 {
        if self.unit_gamma {
            1.0
        } else {
            (self.gamma)(tau)
        }
    }

    pub fn beta_fn(&self) -> ScalarFn {
        Arc::clone(&self.beta)
    }
}

/// `Λ(τ) = [[0, γ(τ)], [-β(τ), 0]]` as a row-major array.
pub fn generator(profile: &AmplitudeProfile, tau: f64) -> Result<[[f64; 2]; 2]> {
    profile.domain.check(tau)?;
    Ok([[0.0, profile.gamma(tau)], [-profile.beta(tau), 0.0]])
}
