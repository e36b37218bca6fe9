//! Initial-data presets on `[0, 1]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `ρ = 1`, `u = 0`.
    Constant,
    /// `ρ = 1 + 0.2 cos(πx)`, `u = 0`.
    CosineBump,
    /// `ρ = 1 + 0.2 cos(πx)`, `u = 0.3 sin(πx)`.
    TravelingBump,
}

impl Preset {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "constant" => Some(Self::Constant),
            "cosine-bump" => Some(Self::CosineBump),
            "traveling-bump" => Some(Self::TravelingBump),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Constant => "constant",
            Self::CosineBump => "cosine-bump",
            Self::TravelingBump => "traveling-bump",
        }
    }

    pub fn rho0(self, x: f64) -> f64 {
        match self {
            Self::Constant => 1.0,
            Self::CosineBump | Self::TravelingBump => 1.0 + 0.2 * (PI * x).cos(),
        }
    }

    pub fn u0(self, x: f64) -> f64 {
        match self {
            Self::TravelingBump => 0.3 * (PI * x).sin(),
            _ => 0.0,
        }
    }

    /// Mass-neutral density perturbation used when data are not well prepared.
    pub fn perturbation(x: f64) -> f64 {
        0.05 * (2.0 * PI * x).cos()
    }
}
