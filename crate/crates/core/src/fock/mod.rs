//! Exact reference route: Lindblad evolution of both modes in a truncated Fock space.

pub mod basis;
pub mod density;
pub mod lindblad;
pub mod operator;

pub use basis::{BatteryLevels, FockBasis};
pub use density::{exact_ergotropy, extract_moments, reduced_battery, DensityMatrix};
pub use lindblad::{converge_cutoffs, evolve, lindblad_rhs, CutoffConvergence, FockModel, FockSample, FockTrajectory};
pub use operator::{build_hamiltonian, SparseOperator};

use crate::error::{Error, Result};
use crate::sweep::Execution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockConfig {
    /// Charger levels kept.
    pub cutoff_a: usize,
    /// Battery levels kept.
    pub cutoff_b: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Relative change of the final energy and ergotropy that ends cutoff growth.
    pub convergence_rel: f64,
    pub max_doublings: usize,
    /// Diagonalize the full state at every sample to check positivity.
    pub check_positivity: bool,
    pub execution: Execution,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self {
            cutoff_a: 8,
            cutoff_b: 8,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            convergence_rel: 1e-4,
            max_doublings: 4,
            check_positivity: false,
            execution: Execution::default(),
        }
    }
}

impl FockConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cutoff_a < 2 || self.cutoff_b < 2 {
            return Err(Error::InvalidInput(format!(
                "Fock cutoffs must be at least 2, got {}x{}",
                self.cutoff_a, self.cutoff_b
            )));
        }
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("convergence_rel", self.convergence_rel),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidInput(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }

    /// Battery cutoff doubled, charger cutoff raised by four.
    pub fn grown(&self) -> Self {
        self.grown_modes(true, true)
    }

    /// Grows only the selected modes.
    pub fn grown_modes(&self, charger: bool, battery: bool) -> Self {
        Self {
            cutoff_a: if charger { self.cutoff_a + 4 } else { self.cutoff_a },
            cutoff_b: if battery { self.cutoff_b * 2 } else { self.cutoff_b },
            ..*self
        }
    }
}
