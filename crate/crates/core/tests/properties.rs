use proptest::prelude::*;

use num_complex::Complex64;
use qbattery::cumulant::{integrate_cumulant, steady_variances};
use qbattery::fock::{lindblad_rhs, BatteryLevels, DensityMatrix, FockConfig, FockModel};
use qbattery::linear::{energy_linear, LinearParams};
use qbattery::metrics::{compute_metrics, Trajectory};
use qbattery::ode::uniform_grid;
use qbattery::report::fmt_num;
use qbattery::scenario::Scenario;
use qbattery::{NonlinearParams, SystemParams};

fn linear_trajectory(p: &LinearParams, t_end: f64, n: usize) -> Trajectory {
    let times = uniform_grid(t_end, n);
    let numbers = times.iter().map(|&t| energy_linear(t, p).unwrap() / p.omega_b).collect();
    Trajectory::from_populations(times, numbers).unwrap()
}

fn underdamped() -> impl Strategy<Value = LinearParams> {
    (0.01f64..2.0, 0.5f64..5.0, 0.0f64..1.5).prop_map(|(drive, g, gamma)| LinearParams::new(1.0, drive, g, gamma).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn optima_ignore_energy_scale(p in underdamped(), scale in 0.01f64..100.0) {
        let t_end = 12.0 / p.g;
        let base = compute_metrics(&linear_trajectory(&p, t_end, 801), 1.0).unwrap();
        let scaled = compute_metrics(&linear_trajectory(&p, t_end, 801), scale).unwrap();
        prop_assert!((base.t_e - scaled.t_e).abs() <= 1e-12 * base.t_e);
        prop_assert!((base.t_p - scaled.t_p).abs() <= 1e-12 * base.t_p);
        prop_assert!((scaled.e_te - scale * base.e_te).abs() <= 1e-12 * scaled.e_te);
    }

    #[test]
    fn peak_power_bounded_by_peak_energy(p in underdamped()) {
        let m = compute_metrics(&linear_trajectory(&p, 12.0 / p.g, 801), 1.0).unwrap();
        prop_assert!(m.p_tp * m.t_p <= m.e_te + 1e-9);
    }

    #[test]
    fn grid_refinement_is_consistent(p in underdamped()) {
        let t_end = 12.0 / p.g;
        let coarse = compute_metrics(&linear_trajectory(&p, t_end, 2001), 1.0).unwrap();
        let fine = compute_metrics(&linear_trajectory(&p, t_end, 4001), 1.0).unwrap();
        prop_assert!((coarse.t_e - fine.t_e).abs() < 1e-3 * fine.t_e);
        prop_assert!((coarse.t_p - fine.t_p).abs() < 1e-3 * fine.t_p);
    }

    #[test]
    fn linear_energy_stays_below_four_times_steady(p in underdamped(), t in 0.0f64..50.0) {
        let e = energy_linear(t, &p).unwrap();
        prop_assert!(e >= 0.0 && e <= 4.0 * p.steady_energy() * (1.0 + 1e-12));
    }

    #[test]
    fn steady_state_is_minimum_uncertainty(ratio in 1e-3f64..1e3) {
        let q = steady_variances(&NonlinearParams::new(1.0, ratio, 1.0, 0.5).unwrap());
        prop_assert!((q.var_x * q.var_p - 0.25).abs() < 1e-14);
        prop_assert!(q.var_x < 0.5 && q.var_p > 0.5);
    }

    #[test]
    fn number_format_round_trips(x in prop::num::f64::NORMAL) {
        let back: f64 = fmt_num(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-15 * x.abs());
    }

    #[test]
    fn scenario_parameters_survive_parsing(drive in 0.0f64..10.0, j in 0.1f64..10.0, gamma in 0.0f64..5.0, n in 64usize..5000) {
        let text = format!("coupling = nonlinear\nOmega = {drive}\nJ = {j}\ngamma = {gamma}\nt_end = 5\nn_samples = {n}\n");
        let s = Scenario::parse(&text, "prop").unwrap();
        prop_assert_eq!(s.params, SystemParams::Nonlinear(NonlinearParams::new(1.0, drive, j, gamma).unwrap()));
        prop_assert_eq!(s.n_samples, n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cumulant_stays_pure(drive in 0.0f64..1.5, gamma in 0.0f64..3.0) {
        let p = NonlinearParams::new(1.0, drive, 1.0, gamma).unwrap();
        for s in integrate_cumulant(&p, 15.0, 151).unwrap() {
            prop_assert!((s.determinant() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn generator_preserves_trace_and_hermiticity(
        drive in 0.0f64..1.0,
        gamma in 0.0f64..2.0,
        amps in prop::collection::vec((0usize..3, 0usize..4, -1.0f64..1.0, -1.0f64..1.0), 1..5),
    ) {
        let p = SystemParams::Nonlinear(NonlinearParams::new(1.0, drive, 1.0, gamma).unwrap());
        let cfg = FockConfig { cutoff_a: 3, cutoff_b: 4, ..FockConfig::default() };
        let model = FockModel::with_levels(&p, &cfg, BatteryLevels::All).unwrap();
        let amps: Vec<_> = amps.into_iter().map(|(a, b, re, im)| (a, b, Complex64::new(re, im))).collect();
        // amplitudes on the same level may cancel exactly
        let rho = DensityMatrix::pure(model.basis(), &amps);
        prop_assume!(rho.is_ok());
        let rho = rho.unwrap();
        let d = lindblad_rhs(&rho, &model).unwrap();
        prop_assert!(d.trace().norm() < 1e-12);
        prop_assert!(d.hermiticity_error() < 1e-12);
    }
}
