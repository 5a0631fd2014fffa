//! Physical inputs, reduced coordinates and unit conversion.
//!
//! The whole computation factors through the pair `(zeta, theta)`:
//!
//! * `zeta = omega0 * z / c` is the distance in units of the transition
//!   wavelength `lambda0 = c / omega0`;
//! * `theta = hbar * omega0 / (k_B T)` is the thermal wavelength
//!   `hbar c / (k_B T)` in the same units. `T = 0` maps to `theta = inf`.
//!
//! Reduced energies are measured in `E_unit = 3 hbar omega0^4 alpha0 / (128 pi eps0 c^3)`.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// CODATA 2018 values, SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub k_b: f64,
    pub epsilon_0: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    c: 299_792_458.0,
    k_b: 1.380_649e-23,
    epsilon_0: 8.854_187_812_8e-12,
};

/// Two-level atom: angular transition frequency and static polarizabilities
/// along x, y (parallel to the wall) and z (normal to the wall).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtomSpec {
    omega0: f64,
    alpha: [f64; 3],
}

impl AtomSpec {
    pub fn new(omega0: f64, alpha_x: f64, alpha_y: f64, alpha_z: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::invalid(format!(
                "transition frequency must be finite and positive, got {omega0}"
            )));
        }
        let alpha = [alpha_x, alpha_y, alpha_z];
        if alpha.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::invalid(format!(
                "polarizabilities must be finite and non-negative, got {alpha:?}"
            )));
        }
        if alpha.iter().sum::<f64>() <= 0.0 {
            return Err(Error::invalid("polarizabilities must not all be zero"));
        }
        Ok(Self { omega0, alpha })
    }

    /// Isotropic atom with total polarizability `alpha0`, split evenly.
    pub fn isotropic(omega0: f64, alpha0: f64) -> Result<Self> {
        let a = alpha0 / 3.0;
        Self::new(omega0, a, a, a)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn alpha(&self) -> [f64; 3] {
        self.alpha
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha.iter().sum()
    }

    pub fn is_isotropic(&self) -> bool {
        self.alpha[0] == self.alpha[1] && self.alpha[1] == self.alpha[2]
    }

    /// `alpha_j / alpha0` for j = x, y, z.
    pub fn weights(&self) -> [f64; 3] {
        let a0 = self.alpha0();
        [self.alpha[0] / a0, self.alpha[1] / a0, self.alpha[2] / a0]
    }

    /// Same atom with a different transition frequency.
    pub fn with_omega0(&self, omega0: f64) -> Result<Self> {
        Self::new(omega0, self.alpha[0], self.alpha[1], self.alpha[2])
    }
}

/// Bath temperature (K) and atom height above the wall (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Environment {
    pub temperature: f64,
    pub distance: f64,
}

impl Environment {
    pub fn new(temperature: f64, distance: f64) -> Result<Self> {
        let env = Self {
            temperature,
            distance,
        };
        env.validate()?;
        Ok(env)
    }

    fn validate(&self) -> Result<()> {
        if !(self.distance.is_finite() && self.distance > 0.0) {
            return Err(Error::invalid(format!(
                "distance must be finite and positive, got {}",
                self.distance
            )));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::invalid(format!(
                "temperature must be finite and non-negative, got {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

/// Dimensionless distance and inverse temperature. `theta == f64::INFINITY`
/// encodes zero temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedPoint {
    pub zeta: f64,
    pub theta: f64,
}

impl ReducedPoint {
    pub fn new(zeta: f64, theta: f64) -> Result<Self> {
        if !(zeta.is_finite() && zeta > 0.0) {
            return Err(Error::invalid(format!(
                "zeta must be finite and positive, got {zeta}"
            )));
        }
        if theta.is_nan() || theta <= 0.0 {
            return Err(Error::invalid(format!(
                "theta must be positive (or infinite), got {theta}"
            )));
        }
        Ok(Self { zeta, theta })
    }

    pub fn zero_temperature(zeta: f64) -> Result<Self> {
        Self::new(zeta, f64::INFINITY)
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.theta.is_infinite()
    }

    pub fn with_zeta(&self, zeta: f64) -> Result<Self> {
        Self::new(zeta, self.theta)
    }
}

impl fmt::Display for ReducedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(zeta={}, theta={})", self.zeta, self.theta)
    }
}

pub fn to_reduced(atom: &AtomSpec, env: &Environment) -> Result<ReducedPoint> {
    env.validate()?;
    let k = CODATA_2018;
    let zeta = atom.omega0 * env.distance / k.c;
    let theta = if env.temperature == 0.0 {
        f64::INFINITY
    } else {
        k.hbar * atom.omega0 / (k.k_b * env.temperature)
    };
    ReducedPoint::new(zeta, theta)
}

pub fn to_physical(atom: &AtomSpec, point: ReducedPoint) -> Environment {
    let k = CODATA_2018;
    let temperature = if point.is_zero_temperature() {
        0.0
    } else {
        k.hbar * atom.omega0 / (k.k_b * point.theta)
    };
    Environment {
        temperature,
        distance: point.zeta * k.c / atom.omega0,
    }
}

/// `3 hbar omega0^4 alpha0 / (128 pi eps0 c^3)`, joules per reduced unit.
pub fn energy_unit(atom: &AtomSpec) -> f64 {
    let k = CODATA_2018;
    let w = atom.omega0;
    3.0 * k.hbar * w.powi(4) * atom.alpha0() / (128.0 * PI * k.epsilon_0 * k.c.powi(3))
}

/// Newtons per reduced force unit (`E_unit * omega0 / c`).
pub fn force_unit(atom: &AtomSpec) -> f64 {
    energy_unit(atom) * atom.omega0 / CODATA_2018.c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateLabel {
    Ground,
    Excited,
    ThermalAverage,
}

impl StateLabel {
    pub const ALL: [StateLabel; 3] = [
        StateLabel::Ground,
        StateLabel::Excited,
        StateLabel::ThermalAverage,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StateLabel::Ground => "ground",
            StateLabel::Excited => "excited",
            StateLabel::ThermalAverage => "average",
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ground" | "g" => Ok(StateLabel::Ground),
            "excited" | "e" => Ok(StateLabel::Excited),
            "average" | "thermal_average" | "avg" => Ok(StateLabel::ThermalAverage),
            other => Err(Error::invalid(format!("unknown state '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    Reduced,
    Si,
}

impl Units {
    pub fn as_str(&self) -> &'static str {
        match self {
            Units::Reduced => "reduced",
            Units::Si => "si",
        }
    }
}

/// Boundary-dependent shift of one state split into its two sources.
///
/// `total` is always assembled as `tf + rr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftBreakdown {
    pub state: StateLabel,
    pub units: Units,
    pub tf: f64,
    pub rr: f64,
    pub total: f64,
    pub tf_error: f64,
    pub rr_error: f64,
}

impl ShiftBreakdown {
    pub fn new(state: StateLabel, tf: f64, rr: f64, tf_error: f64, rr_error: f64) -> Self {
        Self {
            state,
            units: Units::Reduced,
            tf,
            rr,
            total: tf + rr,
            tf_error,
            rr_error,
        }
    }

    pub fn error_estimate(&self) -> f64 {
        self.tf_error + self.rr_error
    }

    /// Scale reduced values to joules.
    pub fn to_si(&self, atom: &AtomSpec) -> Self {
        if self.units == Units::Si {
            return *self;
        }
        let e = energy_unit(atom);
        Self {
            state: self.state,
            units: Units::Si,
            tf: self.tf * e,
            rr: self.rr * e,
            total: self.tf * e + self.rr * e,
            tf_error: self.tf_error * e,
            rr_error: self.rr_error * e,
        }
    }
}
