//! Closed-form charging of the linearly coupled battery.
//!
//! In the frame rotating at the (resonant) drive frequency the Hamiltonian is
//! `g(a†b + b†a) + Ω(a† + a)` and only the charger decays. The battery amplitude
//! stays coherent, `⟨b⟩(t) = −(Ω/g)(1 − X(t))`, with
//! `X(t) = e^{−γt/4}[cos Gt + (γ/4G) sin Gt]` and `G = √(g² − (γ/4)²)`.
//! `G` is carried as a complex number so the overdamped side of the
//! exceptional point `g = γ/4` needs no separate branch.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::gaussian::{MomentState, IMAG_RESIDUE_TOLERANCE};
use crate::roots::{bisect, golden_section_max, lambert_w_m1};

/// Below this value of `|G|·t` the Taylor expansion in `G²t²` is used.
const TAYLOR_THRESHOLD: f64 = 1e-6;

/// Number of log-spaced samples in the coarse power scan.
const POWER_SCAN_POINTS: usize = 512;

/// Relative width of the golden-section bracket at termination.
const POWER_TIME_TOL: f64 = 1e-10;

/// Two maxima closer than this (relative) count as a tie; the earlier one wins.
pub(crate) const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearParams {
    pub omega_b: f64,
    /// Drive amplitude Ω.
    pub drive: f64,
    /// Charger–battery coupling g.
    pub g: f64,
    /// Charger decay rate γ.
    pub gamma: f64,
}

impl LinearParams {
    pub fn new(omega_b: f64, drive: f64, g: f64, gamma: f64) -> Result<Self> {
        let p = Self { omega_b, drive, g, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("omega_b", self.omega_b)?;
        ensure_finite("Omega", self.drive)?;
        ensure_finite("g", self.g)?;
        ensure_finite("gamma", self.gamma)?;
        if self.omega_b <= 0.0 {
            return Err(Error::InvalidInput("omega_b must be positive".into()));
        }
        if self.drive < 0.0 {
            return Err(Error::InvalidInput("Omega must be non-negative".into()));
        }
        if self.g <= 0.0 {
            return Err(Error::InvalidInput("g must be positive".into()));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidInput("gamma must be non-negative".into()));
        }
        Ok(())
    }

    /// `ω_b(Ω/g)²`, the long-time stored energy for any `γ > 0`.
    pub fn steady_energy(&self) -> f64 {
        self.omega_b * (self.drive / self.g).powi(2)
    }

    pub fn is_above_exceptional_point(&self) -> bool {
        self.g > exceptional_point(self.gamma)
    }
}

/// `G = √(g² − (γ/4)²)`, purely imaginary below the exceptional point.
pub fn renormalized_frequency(g: f64, gamma: f64) -> Complex64 {
    let radicand = g * g - (gamma / 4.0).powi(2);
    if radicand >= 0.0 {
        Complex64::new(radicand.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-radicand).sqrt())
    }
}

/// `g_EP = γ/4`.
pub fn exceptional_point(gamma: f64) -> f64 {
    gamma / 4.0
}

/// Damped propagator pieces `(e^{−γt/4} cos Gt, e^{−γt/4} sin(Gt)/G)`.
fn damped_cos_sin(t: f64, g: f64, gamma: f64) -> (Complex64, Complex64) {
    let big_g = renormalized_frequency(g, gamma);
    let g_sq = g * g - (gamma / 4.0).powi(2);
    if big_g.norm() * t < TAYLOR_THRESHOLD || big_g.norm() < 1e-12 * g {
        let u = g_sq * t * t;
        let decay = (-gamma * t / 4.0).exp();
        let c = (1.0 - u / 2.0 + u * u / 24.0) * decay;
        let s = t * (1.0 - u / 6.0 + u * u / 120.0) * decay;
        return (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
    }
    // Combine the growth and decay exponents before exponentiating so the
    // overdamped branch never forms cosh(κt) on its own.
    let i = Complex64::i();
    let damping = Complex64::new(-gamma / 4.0, 0.0);
    let plus = ((i * big_g + damping) * t).exp();
    let minus = ((-i * big_g + damping) * t).exp();
    ((plus + minus) / 2.0, (plus - minus) / (2.0 * i * big_g))
}

fn relaxation(t: f64, p: &LinearParams) -> Result<f64> {
    let (c, s) = damped_cos_sin(t, p.g, p.gamma);
    let x = c + s * (p.gamma / 4.0);
    if x.im.abs() > IMAG_RESIDUE_TOLERANCE {
        return Err(Error::Inconsistency(format!(
            "linear relaxation factor has imaginary residue {:.3e} at t = {t}",
            x.im
        )));
    }
    Ok(x.re)
}

/// Stored energy `ω_b(Ω/g)²{1 − [cos Gt + (γ/4G) sin Gt]e^{−γt/4}}²`.
pub fn energy_linear(t: f64, p: &LinearParams) -> Result<f64> {
    ensure_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::InvalidInput(format!("time must be non-negative, got {t}")));
    }
    let x = relaxation(t, p)?;
    Ok(p.steady_energy() * (1.0 - x).powi(2))
}

/// Charger and battery moments of the (coherent) linear solution.
pub fn moments(t: f64, p: &LinearParams) -> Result<MomentState> {
    ensure_finite("t", t)?;
    let (c, s) = damped_cos_sin(t, p.g, p.gamma);
    let x = c + s * (p.gamma / 4.0);
    let a_mean = Complex64::new(0.0, -p.drive) * s;
    if x.im.abs() > IMAG_RESIDUE_TOLERANCE || a_mean.re.abs() > IMAG_RESIDUE_TOLERANCE {
        return Err(Error::Inconsistency(format!(
            "linear moments have complex residue at t = {t}"
        )));
    }
    let a_mean = Complex64::new(0.0, a_mean.im);
    let b_mean = Complex64::new(-(p.drive / p.g) * (1.0 - x.re), 0.0);
    Ok(MomentState {
        a_mean,
        a_num: a_mean.norm_sqr(),
        a_sq: a_mean * a_mean,
        b_mean,
        b_num: b_mean.norm_sqr(),
        b_sq: b_mean * b_mean,
        time: t,
    })
}

/// `π/Re G` above the exceptional point, `+∞` at or below it.
pub fn optimal_time_energy(p: &LinearParams) -> f64 {
    if p.is_above_exceptional_point() {
        PI / renormalized_frequency(p.g, p.gamma).re
    } else {
        f64::INFINITY
    }
}

pub fn optimal_energy(p: &LinearParams) -> f64 {
    if p.is_above_exceptional_point() {
        let big_g = renormalized_frequency(p.g, p.gamma).re;
        p.steady_energy() * (1.0 + (-PI * p.gamma / (4.0 * big_g)).exp()).powi(2)
    } else {
        p.steady_energy()
    }
}

/// Dimensionless constants of the weak- and strong-coupling power optima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearConstants {
    /// Weak-coupling optimal power time `t_P = Aγ/(2g²)`.
    pub a: f64,
    /// Strong-coupling optimal power time `t_P = B/g`.
    pub b: f64,
    /// Weak-coupling power prefactor `P = Cω_bΩ²/γ`.
    pub c: f64,
    /// Strong-coupling power prefactor `P = Dω_bΩ²/g`.
    pub d_strong: f64,
}

impl LinearConstants {
    /// Residual of `(1 + 2A)e^{−A} = 1`, the turning-point condition of `(1 − e^{−u})²/u`.
    pub fn a_residual(&self) -> f64 {
        (1.0 + 2.0 * self.a) * (-self.a).exp() - 1.0
    }

    /// Residual of `tan(B/2) = 2B`.
    pub fn b_residual(&self) -> f64 {
        (self.b / 2.0).tan() - 2.0 * self.b
    }
}

/// Argument of the Lambert function that defines `A`.
pub fn lambert_argument() -> f64 {
    -1.0 / (2.0 * 0.5f64.exp())
}

pub fn linear_constants() -> Result<LinearConstants> {
    let a = -0.5 - lambert_w_m1(lambert_argument())?;
    let b = bisect(|b| (b / 2.0).tan() - 2.0 * b, 2.0, 3.0)?;
    Ok(LinearConstants {
        a,
        b,
        c: 2.0 * (1.0 - (-a).exp()).powi(2) / a,
        d_strong: 4.0 * (b / 2.0).sin().powi(4) / b,
    })
}

/// Upper end of the power scan.
///
/// `40/γ` and `20π/g` cover the dissipative and oscillatory regimes; the
/// `4γ/g²` term keeps the weak-coupling optimum (`≈ 0.63γ/g²`) inside the
/// window once `g/γ` drops to 0.01 and below.
pub fn power_search_horizon(p: &LinearParams) -> f64 {
    let oscillatory = 20.0 * PI / p.g;
    if p.gamma > 0.0 {
        oscillatory.max(40.0 / p.gamma).max(4.0 * p.gamma / (p.g * p.g))
    } else {
        oscillatory
    }
}

/// Index of the earliest sample within `TIE_TOLERANCE` of the largest value.
pub(crate) fn earliest_argmax(values: &[f64]) -> Option<usize> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return None;
    }
    let threshold = max - TIE_TOLERANCE * max.abs();
    values.iter().position(|&v| v >= threshold)
}

/// Whether every sample from `k` on stays within `TIE_TOLERANCE` of `values[k]`,
/// i.e. the maximum is a plateau approached monotonically rather than a peak.
pub(crate) fn plateau_reaches_end(values: &[f64], k: usize) -> bool {
    let threshold = values[k] - TIE_TOLERANCE * values[k].abs();
    values[k..].iter().all(|&v| v >= threshold)
}

/// `(t_P, P(t_P))` for `P(t) = E(t)/t`: log-spaced scan, then golden-section refinement.
pub fn power_optimum(p: &LinearParams) -> Result<(f64, f64)> {
    p.validate()?;
    if p.drive <= 0.0 {
        return Err(Error::InvalidInput("power optimum needs Omega > 0".into()));
    }
    let t_max = power_search_horizon(p);
    let t_min = t_max * 1e-6;
    let ratio = (t_max / t_min).ln() / (POWER_SCAN_POINTS - 1) as f64;
    let times: Vec<f64> = (0..POWER_SCAN_POINTS)
        .map(|k| t_min * (ratio * k as f64).exp())
        .collect();
    let powers = times
        .iter()
        .map(|&t| energy_linear(t, p).map(|e| e / t))
        .collect::<Result<Vec<_>>>()?;
    let best = earliest_argmax(&powers)
        .ok_or_else(|| Error::NoConvergence("power scan produced no finite maximum".into()))?;
    let lo = times[best.saturating_sub(1)];
    let hi = times[(best + 1).min(POWER_SCAN_POINTS - 1)];
    let power = |t: f64| energy_linear(t, p).map(|e| e / t).unwrap_or(f64::NEG_INFINITY);
    let (t, value) = golden_section_max(power, lo, hi, POWER_TIME_TOL)?;
    if value < powers[best] * (1.0 - TIE_TOLERANCE) {
        return Err(Error::NoConvergence(format!(
            "power refinement lost the grid maximum near t = {}",
            times[best]
        )));
    }
    Ok((t, value))
}

pub fn optimal_time_power(p: &LinearParams) -> Result<f64> {
    power_optimum(p).map(|(t, _)| t)
}

pub fn max_power(p: &LinearParams) -> Result<f64> {
    power_optimum(p).map(|(_, power)| power)
}

/// Energy maximum found numerically on `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPeak {
    pub time: f64,
    pub energy: f64,
    /// The maximum sits at the end of the window (monotone charging).
    pub asymptotic: bool,
}

/// Numerical maximization of `energy_linear` on a uniform grid followed by
/// golden-section refinement; independent of the closed forms for `t_E`.
pub fn numeric_energy_peak(p: &LinearParams, horizon: f64, samples: usize) -> Result<EnergyPeak> {
    p.validate()?;
    if horizon.is_nan() || horizon <= 0.0 || samples < 3 {
        return Err(Error::InvalidInput("need horizon > 0 and at least 3 samples".into()));
    }
    let dt = horizon / (samples - 1) as f64;
    let energies = (0..samples)
        .map(|k| energy_linear(k as f64 * dt, p))
        .collect::<Result<Vec<_>>>()?;
    let best = earliest_argmax(&energies)
        .ok_or_else(|| Error::NoConvergence("energy scan produced no finite maximum".into()))?;
    if plateau_reaches_end(&energies, best) {
        return Ok(EnergyPeak {
            time: horizon,
            energy: energies[samples - 1],
            asymptotic: true,
        });
    }
    let lo = best.saturating_sub(1) as f64 * dt;
    let hi = (best + 1) as f64 * dt;
    let (time, energy) = golden_section_max(
        |t| energy_linear(t, p).unwrap_or(f64::NEG_INFINITY),
        lo,
        hi,
        1e-12,
    )?;
    Ok(EnergyPeak {
        time,
        energy,
        asymptotic: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g: f64, gamma: f64) -> LinearParams {
        LinearParams::new(1.0, 1.0, g, gamma).unwrap()
    }

    #[test]
    fn renormalized_frequency_examples() {
        assert_eq!(renormalized_frequency(1.0, 0.0), Complex64::new(1.0, 0.0));
        assert!((renormalized_frequency(1.0, 2.0).re - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(renormalized_frequency(1.0, 4.0).norm(), 0.0);
        let below = renormalized_frequency(1.0, 8.0);
        assert_eq!(below.re, 0.0);
        assert!((below.im - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exceptional_point_examples() {
        assert_eq!(exceptional_point(4.0), 1.0);
        assert_eq!(exceptional_point(0.0), 0.0);
        assert_eq!(exceptional_point(2.0), 0.5);
    }

    #[test]
    fn energy_starts_at_vacuum() {
        for &(g, gamma) in &[(1.0, 0.0), (1.0, 2.0), (1.0, 4.0), (0.2, 1.0)] {
            assert_eq!(energy_linear(0.0, &params(g, gamma)).unwrap(), 0.0);
        }
    }

    #[test]
    fn dissipationless_limit_quadruples_steady_energy() {
        let p = LinearParams::new(1.3, 0.4, 0.7, 0.0).unwrap();
        let e = energy_linear(PI / p.g, &p).unwrap();
        let expected = p.omega_b * (2.0 * p.drive / p.g).powi(2);
        assert!((e - expected).abs() < 1e-13 * expected);
        // sin⁴ form at an arbitrary time
        let t = 0.37;
        let sin4 = p.omega_b * (2.0 * p.drive / p.g).powi(2) * (p.g * t / 2.0).sin().powi(4);
        assert!((energy_linear(t, &p).unwrap() - sin4).abs() < 1e-14);
    }

    #[test]
    fn long_time_limit_is_steady_energy() {
        for &(g, gamma) in &[(0.5, 1.0), (0.2, 1.0), (0.25, 1.0), (3.0, 0.5)] {
            let p = params(g, gamma);
            let e = energy_linear(200.0 / gamma, &p).unwrap();
            assert!((e - p.steady_energy()).abs() < 1e-6 * p.steady_energy(), "g={g} gamma={gamma}");
        }
    }

    #[test]
    fn overdamped_evaluation_does_not_overflow() {
        let p = params(0.01, 1.0);
        let e = energy_linear(6000.0, &p).unwrap();
        assert!(e.is_finite() && e > 0.0 && e < p.steady_energy());
    }

    #[test]
    fn continuous_across_exceptional_point() {
        let gamma = 1.0;
        let g_ep = exceptional_point(gamma);
        for &t in &[0.5, 3.0, 10.0, 40.0] {
            let at = energy_linear(t, &params(g_ep, gamma)).unwrap() * g_ep * g_ep;
            for &dg in &[1e-8, -1e-8] {
                let g = g_ep + dg;
                let near = energy_linear(t, &params(g, gamma)).unwrap() * g * g;
                assert!((near - at).abs() < 1e-6 * at, "t={t} dg={dg}: {near} vs {at}");
            }
        }
    }

    #[test]
    fn energy_scales_with_omega_b_and_drive() {
        let p = params(0.6, 1.0);
        let q = LinearParams { omega_b: 2.5, drive: 3.0, ..p };
        for &t in &[0.3, 2.0, 7.0] {
            let ratio = energy_linear(t, &q).unwrap() / energy_linear(t, &p).unwrap();
            assert!((ratio - 2.5 * 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn moments_solve_the_linear_equations_of_motion() {
        // d⟨a⟩/dt = −(γ/2)⟨a⟩ − ig⟨b⟩ − iΩ,  d⟨b⟩/dt = −ig⟨a⟩, by central differences
        let i = Complex64::i();
        for &(g, gamma) in &[(1.0, 2.0), (0.2, 1.0), (0.25, 1.0), (1.0, 0.0)] {
            let p = LinearParams::new(1.0, 0.3, g, gamma).unwrap();
            for &t in &[0.4, 2.5, 9.0] {
                let h = 1e-5;
                let m = moments(t, &p).unwrap();
                let mp = moments(t + h, &p).unwrap();
                let mm = moments(t - h, &p).unwrap();
                let da = (mp.a_mean - mm.a_mean) / (2.0 * h);
                let db = (mp.b_mean - mm.b_mean) / (2.0 * h);
                let da_rhs = -gamma / 2.0 * m.a_mean - i * g * m.b_mean - i * p.drive;
                let db_rhs = -i * g * m.a_mean;
                assert!((da - da_rhs).norm() < 1e-8, "g={g} gamma={gamma} t={t}");
                assert!((db - db_rhs).norm() < 1e-8, "g={g} gamma={gamma} t={t}");
                let e = energy_linear(t, &p).unwrap();
                assert!((m.b_num - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn optimal_time_examples() {
        assert_eq!(optimal_time_energy(&params(0.2, 1.0)), f64::INFINITY);
        assert_eq!(optimal_time_energy(&params(0.25, 1.0)), f64::INFINITY);
        assert!((optimal_time_energy(&params(1.0, 0.0)) - PI).abs() < 1e-15);
        assert!((optimal_time_energy(&params(1.0, 2.0)) - 2.0 * PI / 3f64.sqrt()).abs() < 1e-14);
        assert!((optimal_time_energy(&params(1.0, 2.0)) - 3.6276).abs() < 1e-4);
    }

    #[test]
    fn optimal_energy_examples() {
        let weak = params(0.2, 1.0);
        assert_eq!(optimal_energy(&weak), weak.steady_energy());
        let lossless = params(0.5, 0.0);
        assert!((optimal_energy(&lossless) - 4.0 * lossless.steady_energy()).abs() < 1e-14);
        let e = optimal_energy(&params(1.0, 2.0));
        assert!((e - (1.0 + (-PI / 3f64.sqrt()).exp()).powi(2)).abs() < 1e-14);
        assert!((e - 1.35265).abs() < 1e-5);
    }

    #[test]
    fn optimal_energy_approaches_fourfold_monotonically() {
        let ratios: Vec<f64> = [1.0, 2.0, 5.0, 10.0, 100.0]
            .iter()
            .map(|&g| {
                let p = params(g, 1.0);
                optimal_energy(&p) / p.steady_energy()
            })
            .collect();
        assert!(ratios.windows(2).all(|w| w[0] < w[1]));
        assert!(ratios.iter().all(|&r| r < 4.0));
        assert!(4.0 - ratios[4] < 0.035);
    }

    #[test]
    fn constants_match_their_defining_equations() {
        let k = linear_constants().unwrap();
        assert!(k.a_residual().abs() < 1e-14, "{}", k.a_residual());
        assert!(k.b_residual().abs() < 1e-12, "{}", k.b_residual());
        // printed values are truncated, not rounded
        for (value, printed) in [(k.a, 1.256), (k.b, 2.786), (k.c, 0.814), (k.d_strong, 1.347)] {
            assert!((0.0..1e-3).contains(&(value - printed)), "{value} vs {printed}");
        }
        assert!(k.b > 2.0 && k.b < 3.0);
    }

    #[test]
    fn strong_coupling_power_optimum_matches_constants() {
        let k = linear_constants().unwrap();
        let p = params(1.0, 0.0);
        let (t, power) = power_optimum(&p).unwrap();
        assert!((t - k.b).abs() < 1e-6 * k.b, "t_P = {t}");
        assert!((power - k.d_strong).abs() < 1e-6, "P = {power}");
    }

    #[test]
    fn weak_coupling_power_optimum_matches_constants() {
        let k = linear_constants().unwrap();
        let p = params(0.01, 1.0);
        let (t, power) = power_optimum(&p).unwrap();
        let t_asym = k.a * p.gamma / (2.0 * p.g * p.g);
        assert!((t / t_asym - 1.0).abs() < 0.02, "t_P = {t}, asymptote {t_asym}");
        assert!((power / k.c - 1.0).abs() < 0.02, "P = {power}");
    }

    #[test]
    fn intermediate_power_optimum_is_bracketed_by_a_direct_scan() {
        let p = params(1.0, 2.0);
        let (t, power) = power_optimum(&p).unwrap();
        // brute-force oracle on a fine uniform grid
        let (t_scan, p_scan) = (1..200_000)
            .map(|k| k as f64 * 1e-4)
            .map(|t| (t, energy_linear(t, &p).unwrap() / t))
            .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        assert!((t - t_scan).abs() < 2e-4);
        assert!(power >= p_scan && power - p_scan < 1e-9);
        let k = linear_constants().unwrap();
        assert!(power < k.d_strong / p.g);
    }

    #[test]
    fn numeric_peak_matches_closed_form() {
        let p = params(1.0, 2.0);
        let peak = numeric_energy_peak(&p, 20.0, 2001).unwrap();
        assert!(!peak.asymptotic);
        assert!((peak.time - optimal_time_energy(&p)).abs() < 1e-6);
        assert!((peak.energy - optimal_energy(&p)).abs() < 1e-12);
        let weak = params(0.2, 1.0);
        let peak = numeric_energy_peak(&weak, 400.0, 2001).unwrap();
        assert!(peak.asymptotic);
    }

    #[test]
    fn zero_drive_has_no_power_optimum() {
        let p = LinearParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(power_optimum(&p).is_err());
    }
}
