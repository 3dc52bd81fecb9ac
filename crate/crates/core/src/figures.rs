//! Data bundles for the standard figures, one table per panel.
//!
//! Units follow the figure axes: the linear battery is measured against its
//! steady energy with time in `1/g`, the nonlinear one in `ω_b` and `1/J`.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::cumulant::{integrate_cumulant, steady_energy_nonlinear, steady_variances};
use crate::error::{Error, Result};
use crate::fock::{evolve, FockConfig};
use crate::linear::{self, exceptional_point, linear_constants, LinearParams};
use crate::metrics::{compute_metrics, BatteryMetrics, Trajectory};
use crate::ode::uniform_grid;
use crate::params::{NonlinearParams, SystemParams};
use crate::perturbation::{approx_optima_nonlinear, perturbative_energy, weak_driving_energy, SeriesOrder};
use crate::report::{fmt_num, Table};
use crate::sweep::{par_map, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureName {
    Fig1c,
    Fig2,
    Fig3,
    Fig4,
}

impl FigureName {
    pub const ALL: [FigureName; 4] = [FigureName::Fig1c, FigureName::Fig2, FigureName::Fig3, FigureName::Fig4];

    pub fn name(self) -> &'static str {
        match self {
            FigureName::Fig1c => "fig1c",
            FigureName::Fig2 => "fig2",
            FigureName::Fig3 => "fig3",
            FigureName::Fig4 => "fig4",
        }
    }
}

impl fmt::Display for FigureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        FigureName::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown figure '{s}' (expected fig1c, fig2, fig3 or fig4)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    /// Density of log-spaced axes.
    pub points_per_decade: usize,
    /// Density of the exact Fock points on the Ω/J axis.
    pub fock_points_per_decade: usize,
    /// Largest Ω/J handed to the Fock route.
    pub fock_max_ratio: f64,
    /// Samples per time trace.
    pub samples: usize,
    /// Overrides each panel's default time window (in its own time unit).
    pub t_end: Option<f64>,
    pub execution: Execution,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            points_per_decade: 200,
            fock_points_per_decade: 2,
            fock_max_ratio: 1.0,
            samples: 2001,
            t_end: None,
            execution: Execution::default(),
        }
    }
}

impl FigureOptions {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_decade == 0 || self.fock_points_per_decade == 0 {
            return Err(Error::InvalidInput("points per decade must be positive".into()));
        }
        if self.samples < crate::metrics::MIN_SAMPLES {
            return Err(Error::InvalidInput(format!(
                "figures need at least {} samples per trace",
                crate::metrics::MIN_SAMPLES
            )));
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidInput(format!("t_end must be positive, got {t}")));
            }
        }
        Ok(())
    }

    fn window(&self, default: f64) -> f64 {
        self.t_end.unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    /// File stem, e.g. `fig2a`.
    pub name: String,
    pub table: Table,
}

/// `10^(k/per_decade)` for every k spanning `[10^lo, 10^hi]`.
pub fn decade_grid(lo: i32, hi: i32, per_decade: usize) -> Vec<f64> {
    let n = per_decade as i32;
    (lo * n..=hi * n).map(|k| 10f64.powf(k as f64 / n as f64)).collect()
}

fn panel(name: &str, table: Table) -> Panel {
    Panel {
        name: name.to_string(),
        table,
    }
}

fn metrics_of(traj: &Trajectory, omega_b: f64) -> Result<BatteryMetrics> {
    compute_metrics(traj, omega_b)
}

fn populations(times: &[f64], omega_b: f64, energy: impl Fn(f64) -> Result<f64>) -> Result<Trajectory> {
    let n = times.iter().map(|&t| Ok(energy(t)? / omega_b)).collect::<Result<Vec<_>>>()?;
    Trajectory::from_populations(times.to_vec(), n)
}

fn fig1c(opts: &FigureOptions) -> Result<Vec<Panel>> {
    let mut t = Table::new(
        "fig1c: steady-state battery quadrature variances of the nonlinear battery",
        &[
            "Omega_over_J",
            "var_x",
            "var_p",
            "var_x_weak",
            "var_p_weak",
            "var_x_strong",
            "var_p_strong",
            "minimum_uncertainty",
        ],
    )
    .echo("coupling", "nonlinear")
    .echo("J", "1")
    .echo("omega_b", "1")
    .echo("Omega_over_J", format!("log 1e-2..1e2, {} per decade", opts.points_per_decade))
    .note("weak: 1/2 -+ Omega/J; strong: J/(8 Omega), 2 Omega/J; the steady state does not depend on gamma");
    for r in decade_grid(-2, 2, opts.points_per_decade) {
        let q = steady_variances(&NonlinearParams::new(1.0, r, 1.0, 0.5)?);
        t.push(vec![
            Some(r),
            Some(q.var_x),
            Some(q.var_p),
            Some(0.5 - r),
            Some(0.5 + r),
            Some(1.0 / (8.0 * r)),
            Some(2.0 * r),
            Some(0.5),
        ]);
    }
    Ok(vec![panel("fig1c", t)])
}

fn linear_echo(t: Table, gamma: f64, drive: f64) -> Table {
    t.echo("coupling", "linear")
        .echo("omega_b", "1")
        .echo("gamma", fmt_num(gamma))
        .echo("Omega", fmt_num(drive))
}

fn fig2(opts: &FigureOptions) -> Result<Vec<Panel>> {
    let gamma = 1.0;
    let drive = gamma / 10.0;
    let g_ep = exceptional_point(gamma);
    let consts = linear_constants()?;

    // Column (a, d): g = γ/2, time in units of 1/g.
    let p = LinearParams::new(1.0, drive, gamma / 2.0, gamma)?;
    let g_window = opts.window(20.0);
    let times = uniform_grid(g_window / p.g, opts.samples);
    let m = metrics_of(&populations(&times, 1.0, |t| linear::energy_linear(t, &p))?, 1.0)?;
    let e_ss = p.steady_energy();
    let p_unit = drive * drive / p.g;
    let mut a = linear_echo(
        Table::new("fig2a: linear battery energy at g = gamma/2", &["g_t", "E_over_Ess", "steady"]),
        gamma,
        drive,
    )
    .echo("g", fmt_num(p.g))
    .note(format!("t_E g = {}", fmt_num(m.t_e * p.g)))
    .note(format!("E(t_E)/E_ss = {}", fmt_num(m.e_te / e_ss)));
    let mut d = linear_echo(
        Table::new(
            "fig2d: linear battery power at g = gamma/2, in units of omega_b Omega^2/g",
            &["g_t", "P"],
        ),
        gamma,
        drive,
    )
    .echo("g", fmt_num(p.g))
    .note(format!("t_P g = {}", fmt_num(m.t_p * p.g)))
    .note(format!("P(t_P) g/(omega_b Omega^2) = {}", fmt_num(m.p_tp / p_unit)));
    for (i, &t) in times.iter().enumerate() {
        a.push(vec![Some(t * p.g), Some(m.energy[i] / e_ss), Some(1.0)]);
        d.push(vec![Some(t * p.g), m.power[i].map(|v| v / p_unit)]);
    }

    // Columns (b, c, e, f): g/γ sweep.
    let ratios = decade_grid(-2, 2, opts.points_per_decade);
    let sweep_note = format!("g_over_gamma log 1e-2..1e2, {} per decade", opts.points_per_decade);
    let ep_note = format!("exceptional point g_EP/gamma = {}", fmt_num(g_ep / gamma));
    let mk = |title: &str, cols: &[&str]| {
        linear_echo(Table::new(title, cols), gamma, drive)
            .echo("g_over_gamma", sweep_note.clone())
            .note(ep_note.clone())
    };
    let mut b = mk("fig2b: optimal energy time g t_E", &["g_over_gamma", "g_tE", "dissipationless"])
        .note("t_E is infinite (left empty) at and below the exceptional point");
    let mut c = mk(
        "fig2c: maximum energy E(t_E)/E_ss",
        &["g_over_gamma", "E_tE_over_Ess", "steady", "dissipationless"],
    );
    let mut e = mk(
        "fig2e: optimal power time gamma t_P",
        &["g_over_gamma", "gamma_tP", "weak", "strong"],
    )
    .note("weak: A gamma^2/(2 g^2); strong: B gamma/g");
    let mut f = mk(
        "fig2f: maximum power in units of omega_b Omega^2/gamma",
        &["g_over_gamma", "P_tP", "weak", "strong"],
    )
    .note("weak: C; strong: D_strong gamma/g");
    let rows = par_map(&ratios, opts.execution, |&r| -> Result<_> {
        let p = LinearParams::new(1.0, drive, r * gamma, gamma)?;
        let (t_p, p_tp) = linear::power_optimum(&p)?;
        Ok((p, t_p, p_tp))
    });
    for (r, row) in ratios.iter().copied().zip(rows) {
        let (p, t_p, p_tp) = row?;
        let t_e = linear::optimal_time_energy(&p);
        b.push(vec![Some(r), t_e.is_finite().then_some(t_e * p.g), Some(PI)]);
        c.push(vec![Some(r), Some(linear::optimal_energy(&p) / p.steady_energy()), Some(1.0), Some(4.0)]);
        let p_unit = drive * drive / gamma;
        e.push(vec![
            Some(r),
            Some(gamma * t_p),
            Some(consts.a / (2.0 * r * r)),
            Some(consts.b / r),
        ]);
        f.push(vec![Some(r), Some(p_tp / p_unit), Some(consts.c), Some(consts.d_strong / r)]);
    }
    Ok(vec![
        panel("fig2a", a),
        panel("fig2b", b),
        panel("fig2c", c),
        panel("fig2d", d),
        panel("fig2e", e),
        panel("fig2f", f),
    ])
}

fn nonlinear_echo(t: Table, p: &NonlinearParams) -> Table {
    t.echo("coupling", "nonlinear")
        .echo("omega_b", fmt_num(p.omega_b))
        .echo("J", fmt_num(p.j))
        .echo("Omega", fmt_num(p.drive))
        .echo("gamma", fmt_num(p.gamma))
}

/// Energy and power tables for one set of named nonlinear traces.
fn trace_pair(
    stem: (&str, &str),
    titles: (&str, &str),
    times: &[f64],
    traces: &[(String, BatteryMetrics)],
    energy_unit: f64,
    echo: impl Fn(Table) -> Table,
) -> (Panel, Panel) {
    let mut e_cols = vec!["J_t".to_string()];
    let mut p_cols = vec!["J_t".to_string()];
    for (name, _) in traces {
        e_cols.push(format!("{name}:energy"));
        p_cols.push(format!("{name}:power"));
    }
    let e_cols: Vec<&str> = e_cols.iter().map(String::as_str).collect();
    let p_cols: Vec<&str> = p_cols.iter().map(String::as_str).collect();
    let mut e = echo(Table::new(titles.0, &e_cols));
    let mut p = echo(Table::new(titles.1, &p_cols));
    for (name, m) in traces {
        e = e.note(format!("{name}: J t_E = {}, E(t_E) = {}", fmt_num(m.t_e), fmt_num(m.e_te / energy_unit)));
        p = p.note(format!("{name}: J t_P = {}, P(t_P) = {}", fmt_num(m.t_p), fmt_num(m.p_tp)));
    }
    for (i, &t) in times.iter().enumerate() {
        let mut er = vec![Some(t)];
        let mut pr = vec![Some(t)];
        for (_, m) in traces {
            er.push(Some(m.energy[i] / energy_unit));
            pr.push(m.power[i]);
        }
        e.push(er);
        p.push(pr);
    }
    (panel(stem.0, e), panel(stem.1, p))
}

fn cumulant_metrics(p: &NonlinearParams, t_end: f64, samples: usize) -> Result<BatteryMetrics> {
    let states = integrate_cumulant(p, t_end, samples)?;
    metrics_of(&Trajectory::from_cumulant(&states), p.omega_b)
}

/// Drive strengths of the semi-logarithmic column.
pub const FIG3_DRIVES: [f64; 3] = [0.05, 0.25, 1.0];

fn fig3(opts: &FigureOptions) -> Result<Vec<Panel>> {
    let mut out = Vec::new();

    // (a, d): Ω = J/4 without loss, cumulant against the series.
    let p = NonlinearParams::new(1.0, 0.25, 1.0, 0.0)?;
    let t_end = opts.window(12.0);
    let times = uniform_grid(t_end, opts.samples);
    let mut traces = vec![("cumulant".to_string(), cumulant_metrics(&p, t_end, opts.samples)?)];
    for (k, order) in [SeriesOrder::Zeroth, SeriesOrder::First, SeriesOrder::Second].into_iter().enumerate() {
        let traj = populations(&times, 1.0, |t| perturbative_energy(t, &p, order))?;
        traces.push((format!("order{k}"), metrics_of(&traj, 1.0)?));
    }
    let (a, d) = trace_pair(
        ("fig3a", "fig3d"),
        (
            "fig3a: lossless nonlinear battery energy in units of omega_b",
            "fig3d: lossless nonlinear battery power in units of omega_b J",
        ),
        &times,
        &traces,
        1.0,
        |t| nonlinear_echo(t, &p),
    );
    out.extend([a, d]);

    // (b, e): Ω = J/4, γ = J/2, energy in units of the steady value.
    let p = NonlinearParams::new(1.0, 0.25, 1.0, 0.5)?;
    let t_end = opts.window(20.0);
    let times = uniform_grid(t_end, opts.samples);
    let e_ss = steady_energy_nonlinear(&p);
    let weak = approx_optima_nonlinear(&p)?;
    let traces = vec![
        ("cumulant".to_string(), cumulant_metrics(&p, t_end, opts.samples)?),
        (
            "weak_driving".to_string(),
            metrics_of(&populations(&times, 1.0, |t| weak_driving_energy(t, &p))?, 1.0)?,
        ),
    ];
    let (mut b, mut e) = trace_pair(
        ("fig3b", "fig3e"),
        (
            "fig3b: dissipative nonlinear battery energy in units of the steady energy",
            "fig3e: dissipative nonlinear battery power in units of omega_b J",
        ),
        &times,
        &traces,
        e_ss,
        |t| nonlinear_echo(t, &p),
    );
    let approx_ss = p.omega_b * p.drive_ratio().powi(2);
    b.table = b
        .table
        .note(format!("steady energy E_ss = {}", fmt_num(e_ss)))
        .note(format!(
            "weak-driving estimates: J t_E = {}, E(t_E)/E_ss = {}, steady {}",
            fmt_num(weak.t_e),
            fmt_num(weak.e_te / e_ss),
            fmt_num(approx_ss / e_ss)
        ));
    e.table = e.table.note(format!(
        "weak-driving estimates: J t_P = {}, P(t_P) = {}",
        fmt_num(weak.t_p),
        fmt_num(weak.p_tp)
    ));
    out.extend([b, e]);

    // (c, f): γ = J/2 at several drives.
    let traces = FIG3_DRIVES
        .iter()
        .map(|&w| {
            let p = NonlinearParams::new(1.0, w, 1.0, 0.5)?;
            Ok((format!("Omega={}", fmt_num(w)), cumulant_metrics(&p, t_end, opts.samples)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let drives: Vec<String> = FIG3_DRIVES.iter().map(|&w| fmt_num(w)).collect();
    let (c, f) = trace_pair(
        ("fig3c", "fig3f"),
        (
            "fig3c: dissipative nonlinear battery energy in units of omega_b (semi-log)",
            "fig3f: dissipative nonlinear battery power in units of omega_b J",
        ),
        &times,
        &traces,
        1.0,
        |t| {
            t.echo("coupling", "nonlinear")
                .echo("omega_b", "1")
                .echo("J", "1")
                .echo("gamma", "0.5")
                .echo("Omega", drives.join(" "))
        },
    );
    out.extend([c, f]);
    Ok(out)
}

/// Exact Fock results at one drive strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockPoint {
    pub omega_ratio: f64,
    /// Energy and ergotropy at the end of the window, taken as the steady state.
    pub energy_end: f64,
    pub ergotropy_end: f64,
    pub t_e: f64,
    pub e_te: f64,
    pub t_p: f64,
    pub p_tp: f64,
    pub cutoffs: (usize, usize),
}

pub fn fock_point(p: &NonlinearParams, cfg: &FockConfig, t_end: f64, samples: usize) -> Result<FockPoint> {
    let traj = evolve(&SystemParams::Nonlinear(*p), cfg, t_end, samples)?;
    let m = metrics_of(&Trajectory::from_fock(&traj), p.omega_b)?;
    let last = traj.last();
    Ok(FockPoint {
        omega_ratio: p.drive_ratio(),
        energy_end: last.energy(p.omega_b),
        ergotropy_end: last.ergotropy(p.omega_b)?,
        t_e: m.t_e,
        e_te: m.e_te,
        t_p: m.t_p,
        p_tp: m.p_tp,
        cutoffs: (traj.config.cutoff_a, traj.config.cutoff_b),
    })
}

/// Default window of the nonlinear performance sweeps, in units of `1/J`.
pub const FIG4_T_END: f64 = 100.0;

/// Fock sweep of one figure row: drive ratios and their outcomes, in order.
pub fn fig4_fock_row(
    gamma: f64,
    ratios: &[f64],
    t_end: f64,
    samples: usize,
    execution: Execution,
) -> Vec<(f64, Result<FockPoint>)> {
    let cfg = FockConfig {
        execution,
        ..FockConfig::default()
    };
    let results = par_map(ratios, execution, |&r| {
        NonlinearParams::new(1.0, r, 1.0, gamma).and_then(|p| fock_point(&p, &cfg, t_end, samples))
    });
    ratios.iter().copied().zip(results).collect()
}

fn fig4_row(gamma: f64, stems: [&str; 3], opts: &FigureOptions) -> Result<Vec<Panel>> {
    let ratios = decade_grid(-2, 1, opts.points_per_decade);
    let stride = (opts.points_per_decade / opts.fock_points_per_decade).max(1);
    let fock_ratios: Vec<f64> = ratios
        .iter()
        .enumerate()
        .filter(|&(k, &r)| k % stride == 0 && r <= opts.fock_max_ratio * (1.0 + 1e-12))
        .map(|(_, &r)| r)
        .collect();
    let t_end = opts.window(FIG4_T_END);
    log::info!("fig4 gamma = {gamma}: {} Fock points", fock_ratios.len());
    let fock = fig4_fock_row(gamma, &fock_ratios, t_end, opts.samples, opts.execution);
    let cumulant = par_map(&ratios, opts.execution, |&r| -> Result<_> {
        let p = NonlinearParams::new(1.0, r, 1.0, gamma)?;
        Ok((p, cumulant_metrics(&p, t_end, opts.samples)?))
    });

    let echo = |t: Table| {
        t.echo("coupling", "nonlinear")
            .echo("omega_b", "1")
            .echo("J", "1")
            .echo("gamma", fmt_num(gamma))
            .echo("t_end", fmt_num(t_end))
            .echo("n_samples", opts.samples.to_string())
            .echo("Omega_over_J", format!("log 1e-2..1e1, {} per decade", opts.points_per_decade))
            .echo(
                "fock points",
                format!(
                    "{} per decade up to Omega/J = {}",
                    opts.fock_points_per_decade,
                    fmt_num(opts.fock_max_ratio)
                ),
            )
    };
    let mut notes = Vec::new();
    for (r, res) in &fock {
        match res {
            Ok(f) => notes.push(format!("fock Omega/J = {}: cutoffs {}x{}", fmt_num(*r), f.cutoffs.0, f.cutoffs.1)),
            Err(e) => notes.push(format!("fock Omega/J = {}: failed ({e})", fmt_num(*r))),
        }
    }
    let with_notes = |t: Table| notes.iter().fold(echo(t), |t, n| t.note(n.clone()));
    let mut a = with_notes(Table::new(
        format!("{}: steady-state energy and ergotropy in units of omega_b", stems[0]),
        &[
            "Omega_over_J",
            "fock_energy",
            "fock_ergotropy",
            "cumulant_steady",
            "weak_driving_steady",
            "cumulant_energy_end",
            "cumulant_ergotropy_end",
        ],
    ));
    let mut b = with_notes(Table::new(
        format!("{}: optimal charging times in units of 1/J", stems[1]),
        &["Omega_over_J", "fock_tE", "fock_tP", "cumulant_tE", "cumulant_tP", "weak_tE", "weak_tP"],
    ));
    let mut c = with_notes(Table::new(
        format!("{}: maximum energy (omega_b) and peak power (omega_b J)", stems[2]),
        &["Omega_over_J", "fock_E_tE", "fock_P_tP", "cumulant_E_tE", "cumulant_P_tP", "weak_E_tE", "weak_P_tP"],
    ));
    let mut fock_iter = fock.iter().peekable();
    for (&r, cm) in ratios.iter().zip(cumulant) {
        let (p, m) = cm?;
        let f = match fock_iter.peek() {
            Some((fr, res)) if *fr == r => {
                fock_iter.next();
                res.as_ref().ok().copied()
            }
            _ => None,
        };
        let weak = approx_optima_nonlinear(&p).ok();
        a.push(vec![
            Some(r),
            f.map(|f| f.energy_end),
            f.map(|f| f.ergotropy_end),
            Some(steady_energy_nonlinear(&p)),
            Some(p.omega_b * r * r),
            m.energy.last().copied(),
            m.ergotropy.as_ref().and_then(|w| w.last().copied()),
        ]);
        b.push(vec![
            Some(r),
            f.map(|f| f.t_e),
            f.map(|f| f.t_p),
            Some(m.t_e),
            Some(m.t_p),
            weak.map(|w| w.t_e),
            weak.map(|w| w.t_p),
        ]);
        c.push(vec![
            Some(r),
            f.map(|f| f.e_te),
            f.map(|f| f.p_tp),
            Some(m.e_te),
            Some(m.p_tp),
            weak.map(|w| w.e_te),
            weak.map(|w| w.p_tp),
        ]);
    }
    Ok(vec![panel(stems[0], a), panel(stems[1], b), panel(stems[2], c)])
}

fn fig4(opts: &FigureOptions) -> Result<Vec<Panel>> {
    let mut out = fig4_row(0.5, ["fig4a", "fig4b", "fig4c"], opts)?;
    out.extend(fig4_row(2.0, ["fig4d", "fig4e", "fig4f"], opts)?);
    Ok(out)
}

pub fn figure(name: FigureName, opts: &FigureOptions) -> Result<Vec<Panel>> {
    opts.validate()?;
    match name {
        FigureName::Fig1c => fig1c(opts),
        FigureName::Fig2 => fig2(opts),
        FigureName::Fig3 => fig3(opts),
        FigureName::Fig4 => fig4(opts),
    }
}

/// Writes `<dir>/<panel>.csv` for every panel and returns the paths.
pub fn write_figure(name: FigureName, opts: &FigureOptions, dir: &Path) -> Result<Vec<PathBuf>> {
    let panels = figure(name, opts)?;
    std::fs::create_dir_all(dir)?;
    panels
        .iter()
        .map(|p| {
            let path = dir.join(format!("{}.csv", p.name));
            std::fs::write(&path, p.table.to_csv()?)?;
            Ok(path)
        })
        .collect()
}
