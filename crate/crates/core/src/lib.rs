//! Simulation and analysis of driven-dissipative continuous-variable quantum batteries.
//!
//! A driven, lossy charger mode `a` feeds a lossless battery mode `b` through
//! either a linear (`g(a†b + b†a)`) or a degenerate two-photon
//! (`J(a†bb + b†b†a)`) coupling. Four independent routes compute the stored
//! energy, power and ergotropy:
//!
//! * [`linear`] closed forms for the linear coupling,
//! * [`cumulant`] second-order cumulant equations for the nonlinear coupling,
//! * [`perturbation`] weak-driving series and closed forms,
//! * [`fock`] exact Lindblad integration in a truncated Fock space.
//!
//! [`metrics`] turns any of them into charging figures of merit and
//! [`scenario`] drives the command line tool.

pub mod cumulant;
pub mod error;
pub mod figures;
pub mod fock;
pub mod gaussian;
pub mod linear;
pub mod metrics;
pub mod ode;
pub mod params;
pub mod perturbation;
pub mod report;
pub mod roots;
pub mod scenario;
pub mod sweep;

pub use error::{Error, Result};
pub use gaussian::{MomentState, QuadratureStats};
pub use linear::LinearParams;
pub use params::{Coupling, NonlinearParams, SystemParams};
