//! Wall-induced level shifts of a two-level atom near a perfectly conducting
//! plane in a thermal bath, split into thermal-fluctuation (tf) and
//! radiation-reaction (rr) parts, together with the resulting atom-wall force.
//!
//! Everything numerical runs in the reduced coordinates
//! `zeta = omega0 z / c` and `theta = hbar omega0 / (k_B T)`; SI values are
//! produced only at the edges via [`model::energy_unit`].
//!
//! ```
//! use atomwall::kernels::KernelConfig;
//! use atomwall::model::{AtomSpec, ReducedPoint, StateLabel};
//! use atomwall::shifts::shift_total;
//!
//! let atom = AtomSpec::isotropic(2.37e15, 1.0).unwrap();
//! let point = ReducedPoint::zero_temperature(1e-3).unwrap();
//! let shift = shift_total(StateLabel::Ground, &atom, point, &KernelConfig::default()).unwrap();
//! // van der Waals: -(4/3) / zeta^3
//! assert!((shift.total / (-4.0 / 3.0 * 1e9) - 1.0).abs() < 5e-3);
//! ```

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod force;
pub mod kernels;
pub mod model;
pub mod numerics;
pub mod shifts;

pub use error::{Error, Result};
