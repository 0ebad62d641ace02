//! Squeezing by time-dependent quadratic Hamiltonians: symplectic evolution
//! matrices, the Mathieu squeezing scan, Toeplitz-algebra inverse design of
//! amplitudes, Gaussian packet dynamics and laboratory units.

pub mod design;
pub mod error;
pub mod io;
pub mod mathieu;
pub mod matrix;
pub mod packet;
pub mod profile;
pub mod propagate;
pub mod regime;
pub mod units;

pub use design::{DesignDescriptor, DesignReport, GammaSpec, Suitability, ThetaDesign};
pub use error::{Error, Result};
pub use mathieu::{Intersection, MathieuParams, ScanGrid, SqueezeCurve, StruttMap};
pub use matrix::SymplecticMatrix;
pub use packet::{GaussianPacket, ShadowBand};
pub use profile::{AmplitudeProfile, Domain};
pub use propagate::{EvolutionFamily, StepControl};
pub use regime::{classify, Regime, RegimeReport};
pub use units::{PhysicalContext, TrapDrive};
