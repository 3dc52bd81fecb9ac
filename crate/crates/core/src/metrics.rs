//! Charging figures of merit extracted from sampled trajectories.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cumulant::CumulantState;
use crate::error::{Error, Result};
use crate::fock::{exact_ergotropy, FockTrajectory};
use crate::gaussian::{covariance_determinant, ergotropy_gaussian, passive_energy, MomentState};
use crate::linear::{earliest_argmax, plateau_reaches_end};

/// Fewest samples accepted by [`compute_metrics`].
pub const MIN_SAMPLES: usize = 64;

/// Battery populations on a time grid, with whatever state data the route provides.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `⟨b†b⟩` per sample.
    pub battery_number: Vec<f64>,
    pub moments: Option<Vec<MomentState>>,
    /// Reduced battery density matrices.
    pub battery_states: Option<Vec<DMatrix<Complex64>>>,
}

impl Trajectory {
    pub fn from_populations(times: Vec<f64>, battery_number: Vec<f64>) -> Result<Self> {
        if times.len() != battery_number.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                actual: battery_number.len(),
            });
        }
        Ok(Self {
            times,
            battery_number,
            moments: None,
            battery_states: None,
        })
    }

    pub fn from_moments(moments: Vec<MomentState>) -> Self {
        Self {
            times: moments.iter().map(|m| m.time).collect(),
            battery_number: moments.iter().map(|m| m.b_num).collect(),
            moments: Some(moments),
            battery_states: None,
        }
    }

    pub fn from_cumulant(states: &[CumulantState]) -> Self {
        Self::from_moments(states.iter().map(CumulantState::to_moments).collect())
    }

    pub fn from_fock(traj: &FockTrajectory) -> Self {
        let mut out = Self::from_moments(traj.samples.iter().map(|s| s.moments).collect());
        out.battery_states = Some(traj.samples.iter().map(|s| s.battery.clone()).collect());
        out
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErgotropyRoute {
    /// `E − ω_b(√D − 1)/2` from the battery moments.
    Gaussian,
    /// Eigenvalue reordering of the reduced battery state.
    Exact,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MetricFlags {
    /// The energy vanishes identically; optima are reported as zero.
    pub zero: bool,
    /// The energy maximum sits at the final sample (monotone charging).
    pub energy_asymptotic: bool,
    /// The power maximum sits at the final sample.
    pub power_asymptotic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryMetrics {
    pub t_grid: Vec<f64>,
    pub energy: Vec<f64>,
    /// `E/t`, undefined at `t = 0`.
    pub power: Vec<Option<f64>>,
    pub ergotropy: Option<Vec<f64>>,
    pub t_e: f64,
    pub e_te: f64,
    pub t_p: f64,
    pub p_tp: f64,
    pub flags: MetricFlags,
}

/// Vertex of the parabola through three points, if it is a maximum inside the bracket.
fn parabolic_peak(t: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let d1 = (y[1] - y[0]) / (t[1] - t[0]);
    let d2 = (y[2] - y[1]) / (t[2] - t[1]);
    let curvature = (d2 - d1) / (t[2] - t[0]);
    if curvature.is_nan() || curvature >= 0.0 {
        return None;
    }
    // y = y1 + s(τ − t1) + curvature(τ − t1)², slope at t1 from the divided differences
    let slope = d1 + curvature * (t[1] - t[0]);
    let shift = -slope / (2.0 * curvature);
    let t_peak = t[1] + shift;
    if t_peak < t[0] || t_peak > t[2] {
        return None;
    }
    Some((t_peak, y[1] + slope * shift + curvature * shift * shift))
}

/// Relative gap below which two refined peaks count as equally high.
const PEAK_TIE: f64 = 1e-6;

/// `(time, value, at_end)` of the earliest maximum.
///
/// Every local maximum is refined by a parabola before comparing, so equal
/// peaks that the grid happens to sample unevenly still resolve to the first.
fn refined_max(times: &[f64], values: &[f64]) -> Option<(f64, f64, bool)> {
    let k = earliest_argmax(values)?;
    let last = values.len() - 1;
    if plateau_reaches_end(values, k) {
        return Some((times[last], values[last], true));
    }
    let mut peaks = Vec::new();
    if values[0] > values[1] {
        peaks.push((times[0], values[0]));
    }
    for i in 1..last {
        if values[i] >= values[i - 1] && values[i] > values[i + 1] {
            let peak = parabolic_peak(
                [times[i - 1], times[i], times[i + 1]],
                [values[i - 1], values[i], values[i + 1]],
            );
            peaks.push(peak.map_or((times[i], values[i]), |(t, v)| (t, v.max(values[i]))));
        }
    }
    let top = peaks.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let (t, v) = peaks.into_iter().find(|p| p.1 >= top - PEAK_TIE * top.abs())?;
    Some((t, v, false))
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.len() < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "metrics need at least {MIN_SAMPLES} samples, got {}",
            times.len()
        )));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("time grid must be finite and strictly increasing".into()));
    }
    if times[0] < 0.0 {
        return Err(Error::InvalidInput("time grid starts before t = 0".into()));
    }
    Ok(())
}

pub fn compute_metrics(traj: &Trajectory, omega_b: f64) -> Result<BatteryMetrics> {
    check_grid(&traj.times)?;
    if traj.battery_number.len() != traj.times.len() {
        return Err(Error::DimensionMismatch {
            expected: traj.times.len(),
            actual: traj.battery_number.len(),
        });
    }
    let energy: Vec<f64> = traj.battery_number.iter().map(|n| omega_b * n).collect();
    let power: Vec<Option<f64>> = traj
        .times
        .iter()
        .zip(&energy)
        .map(|(&t, &e)| (t > 0.0).then(|| e / t))
        .collect();

    let ergotropy = if traj.battery_states.is_some() {
        Some(ergotropy_trajectory(traj, ErgotropyRoute::Exact, omega_b)?)
    } else if traj.moments.is_some() {
        Some(ergotropy_trajectory(traj, ErgotropyRoute::Gaussian, omega_b)?)
    } else {
        None
    };

    let mut flags = MetricFlags::default();
    if energy.iter().all(|&e| e == 0.0) {
        flags.zero = true;
        return Ok(BatteryMetrics {
            t_grid: traj.times.clone(),
            energy,
            power,
            ergotropy,
            t_e: 0.0,
            e_te: 0.0,
            t_p: 0.0,
            p_tp: 0.0,
            flags,
        });
    }

    let (t_e, e_te, at_end) = refined_max(&traj.times, &energy)
        .ok_or_else(|| Error::Inconsistency("energy trajectory has no finite maximum".into()))?;
    flags.energy_asymptotic = at_end;

    let first = power.iter().position(Option::is_some).unwrap_or(power.len());
    let p_times = &traj.times[first..];
    let p_values: Vec<f64> = power[first..].iter().map(|p| p.unwrap_or(f64::NAN)).collect();
    let (t_p, p_tp, at_end) = refined_max(p_times, &p_values)
        .ok_or_else(|| Error::Inconsistency("power trajectory has no finite maximum".into()))?;
    flags.power_asymptotic = at_end;

    Ok(BatteryMetrics {
        t_grid: traj.times.clone(),
        energy,
        power,
        ergotropy,
        t_e,
        e_te,
        t_p,
        p_tp,
        flags,
    })
}

pub fn ergotropy_trajectory(traj: &Trajectory, route: ErgotropyRoute, omega_b: f64) -> Result<Vec<f64>> {
    match route {
        ErgotropyRoute::Gaussian => {
            let moments = traj
                .moments
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("Gaussian ergotropy needs moment data".into()))?;
            moments
                .iter()
                .map(|m| {
                    let det = covariance_determinant(m)?;
                    ergotropy_gaussian(omega_b * m.b_num, passive_energy(omega_b, det)?)
                })
                .collect()
        }
        ErgotropyRoute::Exact => {
            let states = traj
                .battery_states
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("exact ergotropy needs reduced density matrices".into()))?;
            states.iter().map(|rho| exact_ergotropy(rho, omega_b)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::{moments, optimal_energy, optimal_time_energy, LinearParams};
    use crate::ode::uniform_grid;

    fn linear_trajectory(p: &LinearParams, t_end: f64, n: usize) -> Trajectory {
        Trajectory::from_moments(uniform_grid(t_end, n).iter().map(|&t| moments(t, p).unwrap()).collect())
    }

    #[test]
    fn zero_trajectory() {
        let times = uniform_grid(10.0, 100);
        let traj = Trajectory::from_populations(times, vec![0.0; 100]).unwrap();
        let m = compute_metrics(&traj, 1.0).unwrap();
        assert!(m.flags.zero);
        assert_eq!((m.t_e, m.e_te, m.t_p, m.p_tp), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(m.power[0], None);
    }

    #[test]
    fn rejects_bad_grids() {
        let short = Trajectory::from_populations(uniform_grid(1.0, 10), vec![0.0; 10]).unwrap();
        assert!(compute_metrics(&short, 1.0).is_err());
        let mut times = uniform_grid(1.0, 100);
        times.swap(3, 4);
        let bad = Trajectory::from_populations(times, vec![0.0; 100]).unwrap();
        assert!(compute_metrics(&bad, 1.0).is_err());
        assert!(Trajectory::from_populations(vec![0.0], vec![]).is_err());
    }

    #[test]
    fn linear_peak_matches_closed_form() {
        let p = LinearParams::new(1.0, 0.1, 0.5, 1.0).unwrap();
        let m = compute_metrics(&linear_trajectory(&p, 20.0, 2001), 1.0).unwrap();
        let t_exact = optimal_time_energy(&p);
        assert!((m.t_e / t_exact - 1.0).abs() < 1e-4, "{} vs {t_exact}", m.t_e);
        assert!((m.e_te / optimal_energy(&p) - 1.0).abs() < 1e-6);
        assert!(!m.flags.energy_asymptotic);
        let erg = m.ergotropy.unwrap();
        for (e, w) in m.energy.iter().zip(&erg) {
            assert!((e - w).abs() < 1e-8);
        }
        assert!(m.p_tp * m.t_p <= m.e_te + 1e-9);
    }

    #[test]
    fn overdamped_charging_is_flagged_asymptotic() {
        let p = LinearParams::new(1.0, 0.1, 0.2, 1.0).unwrap();
        let m = compute_metrics(&linear_trajectory(&p, 100.0, 500), 1.0).unwrap();
        assert!(m.flags.energy_asymptotic);
        assert_eq!(m.t_e, 100.0);
    }

    #[test]
    fn parabola_vertex_exact_for_quadratics() {
        let f = |t: f64| 2.0 - 3.0 * (t - 0.37).powi(2);
        let t = [0.1, 0.4, 0.8];
        let (tp, yp) = parabolic_peak(t, t.map(f)).unwrap();
        assert!((tp - 0.37).abs() < 1e-14 && (yp - 2.0).abs() < 1e-14);
        assert!(parabolic_peak([0.0, 1.0, 2.0], [0.0, 1.0, 2.0]).is_none());
    }

    #[test]
    fn route_without_data_is_rejected() {
        let traj = Trajectory::from_populations(uniform_grid(1.0, 64), vec![0.1; 64]).unwrap();
        assert!(ergotropy_trajectory(&traj, ErgotropyRoute::Gaussian, 1.0).is_err());
        assert!(ergotropy_trajectory(&traj, ErgotropyRoute::Exact, 1.0).is_err());
    }

    #[test]
    fn earliest_of_equal_peaks_wins() {
        // sin² has equal maxima at π/2 and 3π/2
        let times = uniform_grid(2.0 * std::f64::consts::PI, 401);
        let n: Vec<f64> = times.iter().map(|t| t.sin().powi(2)).collect();
        let m = compute_metrics(&Trajectory::from_populations(times, n).unwrap(), 1.0).unwrap();
        assert!((m.t_e - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn unevenly_sampled_equal_peaks_resolve_to_the_first() {
        // peaks at π/√2 and 3π/√2 fall between grid points at different offsets
        let times = uniform_grid(10.0, 201);
        let n: Vec<f64> = times.iter().map(|t| (t / std::f64::consts::SQRT_2).sin().powi(4)).collect();
        let m = compute_metrics(&Trajectory::from_populations(times, n).unwrap(), 1.0).unwrap();
        assert!((m.t_e - std::f64::consts::PI / std::f64::consts::SQRT_2).abs() < 1e-3, "{}", m.t_e);
        assert!((m.e_te - 1.0).abs() < 1e-5);
    }
}
