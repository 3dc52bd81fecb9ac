use std::fmt;
use std::str::FromStr;

use crate::error::{ensure_finite, Error, Result};
use crate::linear::LinearParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupling {
    /// `g(a†b + b†a)`
    Linear,
    /// `J(a†bb + b†b†a)`, charger at twice the battery frequency.
    Nonlinear,
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coupling::Linear => "linear",
            Coupling::Nonlinear => "nonlinear",
        })
    }
}

impl FromStr for Coupling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Coupling::Linear),
            "nonlinear" => Ok(Coupling::Nonlinear),
            other => Err(format!("unknown coupling '{other}' (expected linear or nonlinear)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearParams {
    pub omega_b: f64,
    /// Drive amplitude Ω.
    pub drive: f64,
    /// Two-photon coupling J.
    pub j: f64,
    /// Charger decay rate γ.
    pub gamma: f64,
}

impl NonlinearParams {
    pub fn new(omega_b: f64, drive: f64, j: f64, gamma: f64) -> Result<Self> {
        let p = Self { omega_b, drive, j, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("omega_b", self.omega_b)?;
        ensure_finite("Omega", self.drive)?;
        ensure_finite("J", self.j)?;
        ensure_finite("gamma", self.gamma)?;
        if self.omega_b <= 0.0 {
            return Err(Error::InvalidInput("omega_b must be positive".into()));
        }
        if self.drive < 0.0 {
            return Err(Error::InvalidInput("Omega must be non-negative".into()));
        }
        if self.j <= 0.0 {
            return Err(Error::InvalidInput("J must be positive".into()));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidInput("gamma must be non-negative".into()));
        }
        Ok(())
    }

    /// Ω/J
    pub fn drive_ratio(&self) -> f64 {
        self.drive / self.j
    }
}

/// A complete physical scenario: rates plus coupling flavour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemParams {
    Linear(LinearParams),
    Nonlinear(NonlinearParams),
}

impl SystemParams {
    pub fn coupling(&self) -> Coupling {
        match self {
            SystemParams::Linear(_) => Coupling::Linear,
            SystemParams::Nonlinear(_) => Coupling::Nonlinear,
        }
    }

    pub fn omega_b(&self) -> f64 {
        match self {
            SystemParams::Linear(p) => p.omega_b,
            SystemParams::Nonlinear(p) => p.omega_b,
        }
    }

    pub fn drive(&self) -> f64 {
        match self {
            SystemParams::Linear(p) => p.drive,
            SystemParams::Nonlinear(p) => p.drive,
        }
    }

    pub fn gamma(&self) -> f64 {
        match self {
            SystemParams::Linear(p) => p.gamma,
            SystemParams::Nonlinear(p) => p.gamma,
        }
    }

    /// g for the linear model, J for the nonlinear one.
    pub fn coupling_rate(&self) -> f64 {
        match self {
            SystemParams::Linear(p) => p.g,
            SystemParams::Nonlinear(p) => p.j,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SystemParams::Linear(p) => p.validate(),
            SystemParams::Nonlinear(p) => p.validate(),
        }
    }

    /// Names accepted by [`SystemParams::with`].
    pub fn field_names(&self) -> &'static [&'static str] {
        match self {
            SystemParams::Linear(_) => &["omega_b", "Omega", "g", "gamma"],
            SystemParams::Nonlinear(_) => &["omega_b", "Omega", "J", "gamma"],
        }
    }

    /// Copy with one named field replaced.
    pub fn with(&self, field: &str, value: f64) -> Result<Self> {
        let mut out = *self;
        match (&mut out, field) {
            (SystemParams::Linear(p), "omega_b") => p.omega_b = value,
            (SystemParams::Linear(p), "Omega") => p.drive = value,
            (SystemParams::Linear(p), "g") => p.g = value,
            (SystemParams::Linear(p), "gamma") => p.gamma = value,
            (SystemParams::Nonlinear(p), "omega_b") => p.omega_b = value,
            (SystemParams::Nonlinear(p), "Omega") => p.drive = value,
            (SystemParams::Nonlinear(p), "J") => p.j = value,
            (SystemParams::Nonlinear(p), "gamma") => p.gamma = value,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "'{field}' is not a parameter of the {} model",
                    self.coupling()
                )))
            }
        }
        out.validate()?;
        Ok(out)
    }

    pub fn get(&self, field: &str) -> Option<f64> {
        match (self, field) {
            (_, "omega_b") => Some(self.omega_b()),
            (_, "Omega") => Some(self.drive()),
            (_, "gamma") => Some(self.gamma()),
            (SystemParams::Linear(p), "g") => Some(p.g),
            (SystemParams::Nonlinear(p), "J") => Some(p.j),
            _ => None,
        }
    }
}
