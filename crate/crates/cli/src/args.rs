//! Argument value types: ranges, grid sizes, π-expressions and packet specs.

use std::fmt;
use std::str::FromStr;

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use squeeze_core::design::GammaSpec;

/// A number, a fraction, or a rational multiple of π: `1.5`, `9/5`, `pi`,
/// `-pi/2`, `5pi/2`, `35*pi/32`.
pub fn parse_value(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let Some(idx) = t.find("pi") else {
        let (n, d) = t.split_once('/').ok_or_else(|| format!("not a number: '{s}'"))?;
        let (n, d) = (n.parse::<f64>(), d.parse::<f64>());
        return match (n, d) {
            (Ok(n), Ok(d)) if d != 0.0 => Ok(n / d),
            _ => Err(format!("not a number: '{s}'")),
        };
    };
    let (head, tail) = (&t[..idx], &t[idx + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| format!("bad multiple of pi: '{s}'"))?,
    };
    let denom = match tail {
        "" => 1.0,
        d => d
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .ok_or_else(|| format!("bad divisor in '{s}'"))?,
    };
    if denom == 0.0 {
        return Err(format!("zero divisor in '{s}'"));
    }
    Ok(coef * std::f64::consts::PI / denom)
}

/// `lo,hi`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range(pub f64, pub f64);

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected 'lo,hi', got '{s}'"))?;
        Ok(Range(parse_value(a)?, parse_value(b)?))
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

/// `N` or `N0xN1`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSize(pub usize, pub usize);

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad grid size '{s}'"));
        match s.split_once(['x', 'X', ',']) {
            Some((a, b)) => Ok(GridSize(parse(a)?, parse(b)?)),
            None => {
                let n = parse(s)?;
                Ok(GridSize(n, n))
            }
        }
    }
}

/// `q0:p0[,p0...]`; one unit-width packet per momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    pub q0: f64,
    pub p0: Vec<f64>,
}

impl FromStr for PacketSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (q, ps) = s.split_once(':').ok_or_else(|| format!("expected 'q0:p0,p0,...', got '{s}'"))?;
        let p0 = ps.split(',').map(parse_value).collect::<Result<Vec<_>, _>>()?;
        if p0.is_empty() {
            return Err("no initial momenta given".into());
        }
        Ok(PacketSpec { q0: parse_value(q)?, p0 })
    }
}

fn parse_gamma(s: &str) -> Result<GammaSpec, String> {
    s.parse::<GammaSpec>().map_err(|e| e.to_string())
}

/// Where the amplitude comes from.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Design descriptor JSON.
    #[arg(long)]
    pub design: Option<std::path::PathBuf>,
    /// Mathieu amplitude `beta0,beta1`.
    #[arg(long, value_name = "BETA0,BETA1")]
    pub mathieu: Option<Range>,
    /// Constant amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub beta_const: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// (beta0, beta1) → (phi0, phi1) volts
    ToVoltages,
    /// (phi0, phi1) volts → (beta0, beta1)
    ToParams,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "command")]
pub enum Command {
    /// Strutt raster and u12 = 0 / u21 = 0 curves of the Mathieu amplitude.
    Scan {
        #[arg(long, default_value = "0.9,2.0", allow_hyphen_values = true)]
        beta0_range: Range,
        #[arg(long, default_value = "0.5,1.6", allow_hyphen_values = true)]
        beta1_range: Range,
        #[arg(long, default_value = "221x221")]
        grid: GridSize,
        #[arg(long, default_value = "pi/2,5pi/2", allow_hyphen_values = true)]
        interval: Range,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Solve a four-harmonic design and check it.
    Design {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_value)]
        b: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_value)]
        c: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true, value_parser = parse_value)]
        beta_end: f64,
        /// `sin2` or `const:<v>`
        #[arg(long, default_value = "sin2", value_parser = parse_gamma)]
        gamma: GammaSpec,
        /// Sampling interval of the profile dump.
        #[arg(long, default_value = "-pi/2,pi/2", allow_hyphen_values = true)]
        interval: Range,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Packet-center congruence and final evolution matrix.
    Propagate {
        #[command(flatten)]
        source: Source,
        /// Defaults: design `-pi/2,35pi/32`, mathieu `pi/2,5pi/2`, constant `0,1`.
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<Range>,
        #[arg(long, default_value = "1:-2,-1,0,1,2", allow_hyphen_values = true)]
        packets: PacketSpec,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Uncertainty shadow `<q> ± w Δq` of one unit-width packet.
    Shadow {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<Range>,
        #[arg(long, default_value = "1:1", allow_hyphen_values = true)]
        packets: PacketSpec,
        #[arg(long, default_value_t = squeeze_core::packet::SHADOW_W)]
        w: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Trap voltages from Mathieu parameters and back.
    Units {
        /// Physical context JSON; the proton / 3 km radio wave example if absent.
        #[arg(long)]
        context: Option<std::path::PathBuf>,
        #[arg(long, value_enum, default_value = "to-voltages")]
        direction: Direction,
        #[arg(long, default_value = "1.217,0.844", allow_hyphen_values = true)]
        values: Range,
    },
}

impl Command {
    pub fn step(&self) -> Option<f64> {
        match self {
            Command::Scan { step, .. }
            | Command::Design { step, .. }
            | Command::Propagate { step, .. }
            | Command::Shadow { step, .. } => Some(*step),
            Command::Units { .. } => None,
        }
    }
}
