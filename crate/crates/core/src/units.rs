//! Unit conventions and physical constants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Reduced Planck constant in J·s (CODATA 2018, exact digits).
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Unit system tag carried by every computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitMode {
    /// SI units, ħ in J·s.
    Si,
    /// Natural units, ħ = 1.
    Natural,
}

impl fmt::Display for UnitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitMode::Si => "si",
            UnitMode::Natural => "natural",
        })
    }
}

impl FromStr for UnitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "si" => Ok(UnitMode::Si),
            "natural" => Ok(UnitMode::Natural),
            other => Err(format!("unknown unit mode `{other}` (expected `si` or `natural`)")),
        }
    }
}

/// Physical constants for one unit mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants<T> {
    hbar: T,
    mode: UnitMode,
}

impl<T: Real> Constants<T> {
    #[inline]
    pub fn hbar(&self) -> T {
        self.hbar
    }

    #[inline]
    pub fn mode(&self) -> UnitMode {
        self.mode
    }

    /// Constants with a custom ħ, tagged with `mode`.
    ///
    /// Used to probe the classical limit (ħ → 0). `hbar` must be positive.
    pub fn with_hbar(hbar: T, mode: UnitMode) -> crate::Result<Self> {
        if !(hbar > T::zero()) || !hbar.is_finite() {
            return Err(crate::Error::invalid("hbar", "must be positive and finite"));
        }
        Ok(Constants { hbar, mode })
    }
}

/// Returns the constants for `mode`.
pub fn constants_for<T: Real>(mode: UnitMode) -> Constants<T> {
    let hbar = match mode {
        UnitMode::Si => T::lit(HBAR_SI),
        UnitMode::Natural => T::one(),
    };
    Constants { hbar, mode }
}
