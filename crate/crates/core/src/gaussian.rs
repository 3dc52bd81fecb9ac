//! Single-mode Gaussian bookkeeping for the battery mode.
//!
//! Everything here is a pure function of the battery moments `⟨b⟩`, `⟨b†b⟩`
//! and `⟨bb⟩`. The quadratures are `x = (b† + b)/√2` and `p = i(b† − b)/√2`,
//! and the covariance determinant `D = 4(σx²σp² − ξ²)` controls purity
//! (`1/√D`) and the passive-state energy `ω_b(√D − 1)/2`.

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};

/// Determinants in `[1 - DET_TOLERANCE, 1)` are treated as exactly 1.
pub const DET_TOLERANCE: f64 = 1e-9;

/// Largest imaginary residue tolerated in quantities that are real by construction.
pub const IMAG_RESIDUE_TOLERANCE: f64 = 1e-10;

/// First and second moments of the charger (`a`) and battery (`b`) modes at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    pub a_mean: Complex64,
    pub a_num: f64,
    pub a_sq: Complex64,
    pub b_mean: Complex64,
    pub b_num: f64,
    pub b_sq: Complex64,
    pub time: f64,
}

impl MomentState {
    pub fn vacuum(time: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            a_mean: zero,
            a_num: 0.0,
            a_sq: zero,
            b_mean: zero,
            b_num: 0.0,
            b_sq: zero,
            time,
        }
    }

    /// Battery-only moments with the charger left in vacuum.
    pub fn battery(b_mean: Complex64, b_num: f64, b_sq: Complex64) -> Self {
        Self {
            b_mean,
            b_num,
            b_sq,
            ..Self::vacuum(0.0)
        }
    }

    fn check_finite(&self) -> Result<()> {
        let fields = [
            ("a_mean.re", self.a_mean.re),
            ("a_mean.im", self.a_mean.im),
            ("a_num", self.a_num),
            ("a_sq.re", self.a_sq.re),
            ("a_sq.im", self.a_sq.im),
            ("b_mean.re", self.b_mean.re),
            ("b_mean.im", self.b_mean.im),
            ("b_num", self.b_num),
            ("b_sq.re", self.b_sq.re),
            ("b_sq.im", self.b_sq.im),
        ];
        fields
            .iter()
            .try_for_each(|(name, v)| ensure_finite(name, *v))
    }

    /// `⟨b†b⟩ − |⟨b⟩|²`
    fn b_excess_number(&self) -> f64 {
        self.b_num - self.b_mean.norm_sqr()
    }

    /// `⟨b²⟩ − ⟨b⟩²`
    fn b_anomalous(&self) -> Complex64 {
        self.b_sq - self.b_mean * self.b_mean
    }
}

/// Quadrature variances, coherence and covariance determinant of the battery mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureStats {
    pub var_x: f64,
    pub var_p: f64,
    pub coherence: f64,
    pub det: f64,
}

impl QuadratureStats {
    /// `σx·σp`, equal to 1/2 for minimum-uncertainty states.
    pub fn uncertainty_product(&self) -> f64 {
        (self.var_x * self.var_p).sqrt()
    }
}

pub fn quadrature_stats(m: &MomentState) -> Result<QuadratureStats> {
    m.check_finite()?;
    let n_ex = m.b_excess_number();
    let c = m.b_anomalous();
    let i = Complex64::i();

    let two_var_x = 1.0 + 2.0 * n_ex + c.conj() + c;
    let two_var_p = 1.0 + 2.0 * n_ex - c.conj() - c;
    let two_xi = i * (c.conj() - c);

    for (name, z) in [("var_x", two_var_x), ("var_p", two_var_p), ("coherence", two_xi)] {
        if z.im.abs() > IMAG_RESIDUE_TOLERANCE {
            return Err(Error::Inconsistency(format!(
                "{name} has imaginary residue {:.3e}",
                z.im
            )));
        }
    }

    let var_x = 0.5 * two_var_x.re;
    let var_p = 0.5 * two_var_p.re;
    let coherence = 0.5 * two_xi.re;
    Ok(QuadratureStats {
        var_x,
        var_p,
        coherence,
        det: 4.0 * (var_x * var_p - coherence * coherence),
    })
}

/// `D = (1 + 2⟨b†b⟩ − 2|⟨b⟩|²)² − 4|⟨b²⟩ − ⟨b⟩²|²`
pub fn covariance_determinant(m: &MomentState) -> Result<f64> {
    m.check_finite()?;
    let diag = 1.0 + 2.0 * m.b_excess_number();
    Ok(diag * diag - 4.0 * m.b_anomalous().norm_sqr())
}

fn physical_det(det: f64) -> Result<f64> {
    ensure_finite("det", det)?;
    if det < 1.0 - DET_TOLERANCE {
        return Err(Error::Unphysical(format!(
            "covariance determinant {det} violates the Heisenberg bound D >= 1"
        )));
    }
    Ok(det.max(1.0))
}

/// Passive-state energy of a single-mode Gaussian state, `ω_b(√D − 1)/2`.
pub fn passive_energy(omega_b: f64, det: f64) -> Result<f64> {
    ensure_finite("omega_b", omega_b)?;
    if omega_b <= 0.0 {
        return Err(Error::InvalidInput(format!("omega_b must be positive, got {omega_b}")));
    }
    let det = physical_det(det)?;
    Ok(omega_b * (det.sqrt() - 1.0) / 2.0)
}

/// Ergotropy `E − E_β`. Values below `-DET_TOLERANCE` are returned but logged.
pub fn ergotropy_gaussian(energy: f64, passive: f64) -> Result<f64> {
    ensure_finite("energy", energy)?;
    ensure_finite("passive", passive)?;
    let erg = energy - passive;
    if erg < -DET_TOLERANCE {
        log::warn!("negative ergotropy {erg:.3e} (energy {energy}, passive {passive})");
    }
    Ok(erg)
}

pub fn purity(det: f64) -> Result<f64> {
    Ok(1.0 / physical_det(det)?.sqrt())
}
