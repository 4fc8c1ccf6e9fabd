use std::fmt;
use std::str::FromStr;

use crate::constants::{ELEMENTARY_CHARGE, HBAR};
use crate::{Error, Result};

/// Rate units. The canonical unit is rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Unit {
    RadPerSecond,
    /// Energy `ℏω` in μeV.
    MicroElectronVolt,
    /// Ordinary frequency `ω/2π` in THz.
    Terahertz,
    /// Dimensionless multiple of the given vacuum rate (rad/s).
    PerGamma0(f64),
}

impl Unit {
    /// Size of one unit in rad/s.
    fn in_rad_per_second(self) -> Result<f64> {
        match self {
            Unit::RadPerSecond => Ok(1.0),
            Unit::MicroElectronVolt => Ok(1e-6 * ELEMENTARY_CHARGE / HBAR),
            Unit::Terahertz => Ok(2.0 * std::f64::consts::PI * 1e12),
            Unit::PerGamma0(g0) if g0 > 0.0 && g0.is_finite() => Ok(g0),
            Unit::PerGamma0(g0) => Err(Error::validation(format!("invalid Gamma_0 context {g0}"))),
        }
    }
}

impl FromStr for Unit {
    type Err = Error;

    /// Parses the context-free units; `gamma0` needs [`Unit::PerGamma0`].
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rad/s" => Ok(Unit::RadPerSecond),
            "ueV" | "μeV" | "µeV" => Ok(Unit::MicroElectronVolt),
            "THz" => Ok(Unit::Terahertz),
            other => Err(Error::UnknownUnit(other.to_string())),
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unit::RadPerSecond => write!(f, "rad/s"),
            Unit::MicroElectronVolt => write!(f, "ueV"),
            Unit::Terahertz => write!(f, "THz"),
            Unit::PerGamma0(g0) => write!(f, "Gamma0({g0:e} rad/s)"),
        }
    }
}

pub fn convert(value: f64, from: Unit, to: Unit) -> Result<f64> {
    Ok(value * from.in_rad_per_second()? / to.in_rad_per_second()?)
}
