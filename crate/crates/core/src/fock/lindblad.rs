//! Master-equation generator `i[ρ, H] + (γ/2)(2aρa† − a†aρ − ρa†a)` and its integration.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::{BatteryLevels, FockBasis};
use super::density::{exact_ergotropy, extract_moments, reduced_battery, DensityMatrix};
use super::operator::{build_hamiltonian, SparseOperator};
use super::FockConfig;
use crate::error::{Error, Result};
use crate::gaussian::MomentState;
use crate::ode::{integrate, uniform_grid, IntegrationStats, IntegratorOptions, OdeSystem};
use crate::params::SystemParams;
use crate::sweep::{for_each_row, Execution};

/// Highest-level population allowed before the cutoff is deemed too small.
pub const CUTOFF_GUARD: f64 = 1e-6;

/// Hamiltonian, decay channel and basis of one truncated model.
#[derive(Debug, Clone)]
pub struct FockModel {
    basis: FockBasis,
    hamiltonian: SparseOperator,
    /// Index of `a†|i⟩` and `√(n_a + 1)`, when inside the basis.
    raised: Vec<Option<(usize, f64)>>,
    charger_number: Vec<f64>,
    gamma: f64,
    execution: Execution,
}

impl FockModel {
    /// Model on the default ladder: even battery levels for the two-photon
    /// coupling (exact from a vacuum start), all levels otherwise.
    pub fn new(params: &SystemParams, cfg: &FockConfig) -> Result<Self> {
        let levels = match params {
            SystemParams::Linear(_) => BatteryLevels::All,
            SystemParams::Nonlinear(_) => BatteryLevels::Even,
        };
        Self::with_levels(params, cfg, levels)
    }

    pub fn with_levels(params: &SystemParams, cfg: &FockConfig, levels: BatteryLevels) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        let basis = FockBasis::new(cfg.cutoff_a, cfg.cutoff_b, levels);
        let hamiltonian = build_hamiltonian(params, &basis);
        Self::from_operator(basis, hamiltonian, params.gamma(), cfg.execution)
    }

    /// Model with an arbitrary real symmetric Hamiltonian on `basis`.
    pub fn from_operator(basis: FockBasis, hamiltonian: SparseOperator, gamma: f64, execution: Execution) -> Result<Self> {
        if hamiltonian.dim() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                actual: hamiltonian.dim(),
            });
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidInput(format!("gamma must be finite and non-negative, got {gamma}")));
        }
        let raised = (0..basis.dim()).map(|i| basis.shift(i, 1, 0)).collect();
        let charger_number = basis.states().iter().map(|&(na, _)| na as f64).collect();
        Ok(Self {
            basis,
            hamiltonian,
            raised,
            charger_number,
            gamma,
            execution,
        })
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn hamiltonian(&self) -> &SparseOperator {
        &self.hamiltonian
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `out = L(ρ)`, using `scratch` for `Hρ`. All slices are `dim²` long.
    fn apply(&self, rho: &[Complex64], scratch: &mut [Complex64], out: &mut [Complex64]) {
        let n = self.basis.dim();
        let h = &self.hamiltonian;
        for_each_row(scratch, n, self.execution, |r, row| {
            row.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
            for (k, v) in h.row(r) {
                for (x, &p) in row.iter_mut().zip(&rho[k * n..(k + 1) * n]) {
                    *x += p * v;
                }
            }
        });
        let hr: &[Complex64] = scratch;
        let gamma = self.gamma;
        let half_gamma = 0.5 * gamma;
        let raised = &self.raised;
        let na = &self.charger_number;
        for_each_row(out, n, self.execution, |r, row| {
            let rho_row = &rho[r * n..(r + 1) * n];
            for c in 0..n {
                // i(Hρ)†[r,c] − i(Hρ)[r,c]
                let x = hr[c * n + r].conj() - hr[r * n + c];
                let mut d = Complex64::new(-x.im, x.re);
                d -= rho_row[c] * (half_gamma * (na[r] + na[c]));
                row[c] = d;
            }
            if gamma != 0.0 {
                if let Some((ur, sr)) = raised[r] {
                    let up_row = &rho[ur * n..(ur + 1) * n];
                    for c in 0..n {
                        if let Some((uc, sc)) = raised[c] {
                            row[c] += up_row[uc] * (gamma * sr * sc);
                        }
                    }
                }
            }
        });
    }

    /// Integrates from `initial` and calls `visit` at every grid time.
    pub fn run<V>(&self, initial: &DensityMatrix, grid: &[f64], cfg: &FockConfig, mut visit: V) -> Result<IntegrationStats>
    where
        V: FnMut(f64, &DensityMatrix) -> Result<()>,
    {
        let n = self.basis.dim();
        if initial.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: initial.dim(),
            });
        }
        let y0: Vec<f64> = bytemuck::cast_slice(initial.as_slice()).to_vec();
        let mut system = LindbladSystem {
            model: self,
            scratch: vec![Complex64::new(0.0, 0.0); n * n],
        };
        let mut sample = DensityMatrix::zeros(n);
        let opts = IntegratorOptions::new(cfg.rel_tol, cfg.abs_tol);
        integrate(&mut system, 0.0, &y0, grid, &opts, |t, y| {
            sample.as_mut_slice().copy_from_slice(bytemuck::cast_slice(y));
            visit(t, &sample)
        })
    }
}

struct LindbladSystem<'a> {
    model: &'a FockModel,
    scratch: Vec<Complex64>,
}

impl OdeSystem for LindbladSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.scratch.len()
    }

    fn rhs(&mut self, _t: f64, y: &[f64], dydt: &mut [f64]) {
        self.model
            .apply(bytemuck::cast_slice(y), &mut self.scratch, bytemuck::cast_slice_mut(dydt));
    }
}

/// Time derivative of `rho` under `model`.
pub fn lindblad_rhs(rho: &DensityMatrix, model: &FockModel) -> Result<DensityMatrix> {
    let n = model.basis().dim();
    if rho.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: rho.dim(),
        });
    }
    let mut out = DensityMatrix::zeros(n);
    let mut scratch = vec![Complex64::new(0.0, 0.0); n * n];
    model.apply(rho.as_slice(), &mut scratch, out.as_mut_slice());
    Ok(out)
}

/// Observables recorded at one grid time.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSample {
    pub moments: MomentState,
    /// Reduced battery state on the full battery ladder.
    pub battery: DMatrix<Complex64>,
    pub trace_error: f64,
    pub hermiticity_error: f64,
    /// Smallest eigenvalue of the full state, when positivity checks are enabled.
    pub min_eigenvalue: Option<f64>,
    pub top_population_a: f64,
    pub top_population_b: f64,
}

impl FockSample {
    pub fn time(&self) -> f64 {
        self.moments.time
    }

    pub fn energy(&self, omega_b: f64) -> f64 {
        omega_b * self.moments.b_num
    }

    pub fn ergotropy(&self, omega_b: f64) -> Result<f64> {
        exact_ergotropy(&self.battery, omega_b)
    }

    fn record(rho: &DensityMatrix, basis: &FockBasis, t: f64, positivity: bool) -> Result<Self> {
        rho.check_invariants(positivity)?;
        let (pa, pb) = rho.top_level_populations(basis);
        Ok(Self {
            moments: extract_moments(rho, basis, t)?,
            battery: reduced_battery(rho, basis)?,
            trace_error: (rho.trace() - 1.0).norm(),
            hermiticity_error: rho.hermiticity_error(),
            min_eigenvalue: positivity.then(|| rho.min_eigenvalue()),
            top_population_a: pa,
            top_population_b: pb,
        })
    }
}

#[derive(Debug, Clone)]
pub struct FockTrajectory {
    /// Cutoffs actually used after any guard-triggered growth.
    pub config: FockConfig,
    pub samples: Vec<FockSample>,
    pub stats: IntegrationStats,
}

impl FockTrajectory {
    pub fn last(&self) -> &FockSample {
        self.samples.last().expect("trajectories have at least two samples")
    }
}

/// Vacuum-started evolution on `n_samples` uniform times up to `t_end`.
///
/// Whenever the highest retained level of a mode exceeds [`CUTOFF_GUARD`]
/// the run restarts with that mode's cutoff grown, at most `max_doublings`
/// times.
pub fn evolve(params: &SystemParams, cfg: &FockConfig, t_end: f64, n_samples: usize) -> Result<FockTrajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) || n_samples < 2 {
        return Err(Error::InvalidInput("evolve needs t_end > 0 and at least 2 samples".into()));
    }
    let grid = uniform_grid(t_end, n_samples);
    let mut current = *cfg;
    for doublings in 0..=cfg.max_doublings {
        let model = FockModel::new(params, &current)?;
        let basis = model.basis();
        let mut samples = Vec::with_capacity(n_samples);
        let (mut short_a, mut short_b) = (false, false);
        let outcome = model.run(&DensityMatrix::vacuum(basis), &grid, &current, |t, rho| {
            let s = FockSample::record(rho, basis, t, current.check_positivity)?;
            short_a = s.top_population_a >= CUTOFF_GUARD;
            short_b = s.top_population_b >= CUTOFF_GUARD;
            let worst = s.top_population_a.max(s.top_population_b);
            samples.push(s);
            if short_a || short_b {
                return Err(Error::CutoffInsufficient {
                    doublings,
                    cutoff_a: current.cutoff_a,
                    cutoff_b: current.cutoff_b,
                    population: worst,
                });
            }
            Ok(())
        });
        match outcome {
            Ok(stats) => {
                return Ok(FockTrajectory {
                    config: current,
                    samples,
                    stats,
                })
            }
            Err(e @ Error::CutoffInsufficient { .. }) if doublings == cfg.max_doublings => return Err(e),
            Err(Error::CutoffInsufficient { population, .. }) => {
                log::info!(
                    "cutoffs {}x{} insufficient (population {population:.2e}, charger {short_a}, battery {short_b}); growing",
                    current.cutoff_a,
                    current.cutoff_b
                );
                current = current.grown_modes(short_a, short_b);
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("loop returns on the final doubling")
}

#[derive(Debug, Clone)]
pub struct CutoffConvergence {
    /// Smallest configuration whose final energy and ergotropy agree with the
    /// next larger one to within `convergence_rel`.
    pub config: FockConfig,
    /// Trajectory of the larger, reference configuration.
    pub trajectory: FockTrajectory,
    pub energy_change: f64,
    pub ergotropy_change: f64,
}

fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Grows the cutoffs until the final-time energy and ergotropy stop changing.
pub fn converge_cutoffs(
    params: &SystemParams,
    cfg: &FockConfig,
    t_end: f64,
    n_samples: usize,
) -> Result<CutoffConvergence> {
    let omega_b = params.omega_b();
    let final_values = |traj: &FockTrajectory| -> Result<(f64, f64)> {
        let s = traj.last();
        Ok((s.energy(omega_b), s.ergotropy(omega_b)?))
    };
    let mut coarse = evolve(params, cfg, t_end, n_samples)?;
    let (mut e0, mut w0) = final_values(&coarse)?;
    loop {
        let used = doublings_between(cfg, &coarse.config);
        if used >= cfg.max_doublings {
            return Err(Error::NoConvergence(format!(
                "cutoffs {}x{} still changing after {used} doublings",
                coarse.config.cutoff_a, coarse.config.cutoff_b
            )));
        }
        let fine = evolve(params, &coarse.config.grown(), t_end, n_samples)?;
        let (e1, w1) = final_values(&fine)?;
        let de = relative_change(e0, e1);
        let dw = relative_change(w0, w1);
        log::debug!(
            "cutoffs {}x{} -> {}x{}: energy change {de:.2e}, ergotropy change {dw:.2e}",
            coarse.config.cutoff_a,
            coarse.config.cutoff_b,
            fine.config.cutoff_a,
            fine.config.cutoff_b
        );
        if de < cfg.convergence_rel && dw < cfg.convergence_rel {
            return Ok(CutoffConvergence {
                config: coarse.config,
                trajectory: fine,
                energy_change: de,
                ergotropy_change: dw,
            });
        }
        coarse = fine;
        e0 = e1;
        w0 = w1;
    }
}

/// Growth steps separating two configurations, counted on the faster-growing mode.
fn doublings_between(start: &FockConfig, now: &FockConfig) -> usize {
    let battery = (now.cutoff_b / start.cutoff_b).max(1).ilog2() as usize;
    let charger = now.cutoff_a.saturating_sub(start.cutoff_a) / 4;
    battery.max(charger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::LinearParams;
    use crate::params::NonlinearParams;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cfg(a: usize, b: usize) -> FockConfig {
        FockConfig {
            cutoff_a: a,
            cutoff_b: b,
            ..FockConfig::default()
        }
    }

    #[test]
    fn undriven_vacuum_is_stationary() {
        let p = SystemParams::Nonlinear(NonlinearParams::new(1.0, 0.0, 1.0, 0.5).unwrap());
        let model = FockModel::new(&p, &cfg(4, 6)).unwrap();
        let d = lindblad_rhs(&DensityMatrix::vacuum(model.basis()), &model).unwrap();
        assert!(d.as_slice().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn single_photon_decay() {
        let basis = FockBasis::new(3, 2, BatteryLevels::All);
        let zero = SparseOperator::from_triplets(basis.dim(), []);
        let model = FockModel::from_operator(basis, zero, 1.0, Execution::Sequential).unwrap();
        let basis = model.basis();
        let rho = DensityMatrix::pure(basis, &[(1, 0, c(1.0))]).unwrap();
        let d = lindblad_rhs(&rho, &model).unwrap();
        let (i00, i10) = (basis.index(0, 0).unwrap(), basis.index(1, 0).unwrap());
        for r in 0..basis.dim() {
            for col in 0..basis.dim() {
                let expected = match (r, col) {
                    _ if r == i00 && col == i00 => 1.0,
                    _ if r == i10 && col == i10 => -1.0,
                    _ => 0.0,
                };
                assert!((d.get(r, col) - c(expected)).norm() < 1e-15, "({r},{col})");
            }
        }
    }

    #[test]
    fn generator_is_traceless_and_hermitian() {
        let p = SystemParams::Nonlinear(NonlinearParams::new(1.0, 0.4, 0.9, 0.7).unwrap());
        let model = FockModel::with_levels(&p, &cfg(4, 5), BatteryLevels::All).unwrap();
        let basis = model.basis();
        let rho = DensityMatrix::pure(
            basis,
            &[(0, 0, c(0.5)), (1, 2, Complex64::new(0.2, -0.4)), (3, 1, Complex64::new(-0.3, 0.1)), (2, 4, c(0.6))],
        )
        .unwrap();
        let d = lindblad_rhs(&rho, &model).unwrap();
        assert!(d.trace().norm() < 1e-12);
        assert!(d.hermiticity_error() < 1e-12);
        assert!(lindblad_rhs(&DensityMatrix::zeros(3), &model).is_err());
    }

    #[test]
    fn execution_modes_agree_bitwise() {
        let p = SystemParams::Linear(LinearParams::new(1.0, 0.2, 0.5, 1.0).unwrap());
        let seq = FockModel::new(&p, &FockConfig { execution: Execution::Sequential, ..cfg(5, 6) }).unwrap();
        let par = FockModel::new(&p, &FockConfig { execution: Execution::Parallel, ..cfg(5, 6) }).unwrap();
        let rho = DensityMatrix::pure(seq.basis(), &[(0, 0, c(1.0)), (1, 3, Complex64::new(0.3, 0.2))]).unwrap();
        assert_eq!(lindblad_rhs(&rho, &seq).unwrap(), lindblad_rhs(&rho, &par).unwrap());
    }

    #[test]
    fn linear_evolution_tracks_closed_form() {
        let lp = LinearParams::new(1.0, 0.1, 0.5, 1.0).unwrap();
        let traj = evolve(&SystemParams::Linear(lp), &cfg(8, 8), 40.0, 81).unwrap();
        for s in &traj.samples[1..] {
            let exact = crate::linear::energy_linear(s.time(), &lp).unwrap();
            assert!((s.energy(1.0) - exact).abs() < 1e-3 * exact, "t={}", s.time());
        }
    }

    #[test]
    fn guard_grows_cutoffs() {
        let p = SystemParams::Linear(LinearParams::new(1.0, 1.0, 1.0, 1.0).unwrap());
        let traj = evolve(&p, &FockConfig { max_doublings: 6, ..cfg(3, 3) }, 5.0, 6).unwrap();
        assert!(traj.config.cutoff_b > 3);
        assert!(traj.samples.iter().all(|s| s.top_population_b < CUTOFF_GUARD));
        let r = evolve(&p, &FockConfig { max_doublings: 0, ..cfg(3, 3) }, 5.0, 6);
        assert!(matches!(r, Err(Error::CutoffInsufficient { .. })));
    }

    #[test]
    fn undriven_convergence_returns_input() {
        let p = SystemParams::Nonlinear(NonlinearParams::new(1.0, 0.0, 1.0, 0.5).unwrap());
        let start = cfg(4, 4);
        let conv = converge_cutoffs(&p, &start, 5.0, 3).unwrap();
        assert_eq!(conv.config, start);
    }
}
