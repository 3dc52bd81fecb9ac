//! Scenario files, route selection and parameter sweeps.
//!
//! A scenario is a flat `key = value` file. `#` starts a comment. Example:
//!
//! ```text
//! coupling = nonlinear
//! route = all
//! Omega = 0.25
//! J = 1
//! gamma = 0.5
//! t_end = 40
//! sweep.param = Omega
//! sweep.min = 0.01
//! sweep.max = 1
//! sweep.points = 20
//! sweep.scale = log
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::cumulant::integrate_cumulant;
use crate::error::{Error, Result};
use crate::fock::{converge_cutoffs, evolve, FockConfig};
use crate::gaussian::{quadrature_stats, QuadratureStats};
use crate::linear::{self, LinearParams};
use crate::metrics::{compute_metrics, BatteryMetrics, MetricFlags, Trajectory};
use crate::ode::uniform_grid;
use crate::params::{Coupling, NonlinearParams, SystemParams};
use crate::perturbation::{perturbative_energy, weak_driving_energy, SeriesOrder};
use crate::sweep::{grid, par_map, Execution};

pub const DEFAULT_SAMPLES: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Linear closed forms.
    Analytic,
    Cumulant,
    /// Perturbative series (lossless) or weak-driving closed form (lossy).
    Perturbation,
    Fock,
    /// Every route above, inapplicable ones left empty.
    All,
}

impl Route {
    pub const CONCRETE: [Route; 4] = [Route::Analytic, Route::Cumulant, Route::Perturbation, Route::Fock];

    pub fn name(self) -> &'static str {
        match self {
            Route::Analytic => "analytic",
            Route::Cumulant => "cumulant",
            Route::Perturbation => "perturbation",
            Route::Fock => "fock",
            Route::All => "all",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Route::CONCRETE
            .into_iter()
            .chain([Route::All])
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown route '{s}' (expected analytic, cumulant, perturbation, fock or all)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
    pub scale: SweepScale,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        grid(self.min, self.max, self.n_points, self.scale == SweepScale::Log)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: SystemParams,
    pub route: Route,
    pub t_end: f64,
    pub n_samples: usize,
    /// Fock settings; defaults apply when the file has no `fock.*` keys.
    pub fock: Option<FockConfig>,
    /// Run a cutoff-convergence study instead of a single guarded evolution.
    pub fock_converge: bool,
    pub execution: Execution,
    pub sweep: Option<Sweep>,
}

const KEYS: &[&str] = &[
    "coupling",
    "route",
    "omega_b",
    "Omega",
    "g",
    "J",
    "gamma",
    "t_end",
    "n_samples",
    "execution",
    "fock.cutoff_a",
    "fock.cutoff_b",
    "fock.rel_tol",
    "fock.abs_tol",
    "fock.convergence_rel",
    "fock.max_doublings",
    "fock.check_positivity",
    "fock.converge",
    "sweep.param",
    "sweep.min",
    "sweep.max",
    "sweep.points",
    "sweep.scale",
];

/// Raw `key = value` entries with their line numbers.
struct Entries<'a> {
    path: &'a str,
    map: BTreeMap<String, (String, usize)>,
}

impl Entries<'_> {
    fn config_error(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Config {
            path: self.path.to_string(),
            line,
            msg: msg.into(),
        }
    }

    fn raw(&self, key: &str) -> Option<(&str, usize)> {
        self.map.get(key).map(|(v, l)| (v.as_str(), *l))
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|e| self.config_error(line, format!("bad value for '{key}': {e}"))),
        }
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        self.parse(key)?
            .ok_or_else(|| self.config_error(0, format!("missing required key '{key}'")))
    }

    /// Line of `key`, or 0 when the problem concerns the file as a whole.
    fn line(&self, key: &str) -> usize {
        self.raw(key).map_or(0, |(_, l)| l)
    }
}

fn tokenize<'a>(text: &str, path: &'a str) -> Result<Entries<'a>> {
    let mut entries = Entries {
        path,
        map: BTreeMap::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| entries.config_error(line, format!("expected 'key = value', got '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(entries.config_error(line, format!("unknown key '{key}'")));
        }
        if value.is_empty() {
            return Err(entries.config_error(line, format!("empty value for '{key}'")));
        }
        if let Some((_, first)) = entries.map.get(key) {
            return Err(entries.config_error(line, format!("duplicate key '{key}' (first set on line {first})")));
        }
        entries.map.insert(key.to_string(), (value.to_string(), line));
    }
    Ok(entries)
}

fn parse_execution(s: &str) -> std::result::Result<Execution, String> {
    match s {
        "parallel" => Ok(Execution::Parallel),
        "sequential" => Ok(Execution::Sequential),
        other => Err(format!("unknown execution '{other}' (expected parallel or sequential)")),
    }
}

fn parse_scale(s: &str) -> std::result::Result<SweepScale, String> {
    match s {
        "linear" | "lin" => Ok(SweepScale::Linear),
        "log" => Ok(SweepScale::Log),
        other => Err(format!("unknown sweep scale '{other}' (expected linear or log)")),
    }
}

impl Scenario {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses scenario text; `path` only labels error messages.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let e = tokenize(text, path)?;
        let coupling: Coupling = e.require("coupling")?;
        let omega_b = e.parse("omega_b")?.unwrap_or(1.0);
        let drive = e.require("Omega")?;
        let gamma = e.require("gamma")?;
        let (rate_key, other_key) = match coupling {
            Coupling::Linear => ("g", "J"),
            Coupling::Nonlinear => ("J", "g"),
        };
        if e.raw(other_key).is_some() {
            return Err(e.config_error(
                e.line(other_key),
                format!("'{other_key}' does not apply to {coupling} coupling (use '{rate_key}')"),
            ));
        }
        let rate = e.require(rate_key)?;
        let params = match coupling {
            Coupling::Linear => LinearParams::new(omega_b, drive, rate, gamma).map(SystemParams::Linear),
            Coupling::Nonlinear => NonlinearParams::new(omega_b, drive, rate, gamma).map(SystemParams::Nonlinear),
        }
        .map_err(|err| e.config_error(e.line(rate_key), err.to_string()))?;

        let route = match e.raw("route") {
            None => Route::All,
            Some((v, line)) => v.parse().map_err(|m: String| e.config_error(line, m))?,
        };
        let t_end: f64 = e.require("t_end")?;
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(e.config_error(e.line("t_end"), format!("t_end must be positive, got {t_end}")));
        }
        let n_samples = e.parse("n_samples")?.unwrap_or(DEFAULT_SAMPLES);
        let execution = match e.raw("execution") {
            None => Execution::default(),
            Some((v, line)) => parse_execution(v).map_err(|m| e.config_error(line, m))?,
        };

        let fock = if e.map.keys().any(|k| k.starts_with("fock.") && k != "fock.converge") {
            let d = FockConfig::default();
            let cfg = FockConfig {
                cutoff_a: e.parse("fock.cutoff_a")?.unwrap_or(d.cutoff_a),
                cutoff_b: e.parse("fock.cutoff_b")?.unwrap_or(d.cutoff_b),
                rel_tol: e.parse("fock.rel_tol")?.unwrap_or(d.rel_tol),
                abs_tol: e.parse("fock.abs_tol")?.unwrap_or(d.abs_tol),
                convergence_rel: e.parse("fock.convergence_rel")?.unwrap_or(d.convergence_rel),
                max_doublings: e.parse("fock.max_doublings")?.unwrap_or(d.max_doublings),
                check_positivity: e.parse("fock.check_positivity")?.unwrap_or(d.check_positivity),
                execution,
            };
            cfg.validate().map_err(|err| e.config_error(0, err.to_string()))?;
            Some(cfg)
        } else {
            None
        };
        let fock_converge = e.parse("fock.converge")?.unwrap_or(false);

        let sweep = match e.raw("sweep.param") {
            None => {
                if let Some(k) = e.map.keys().find(|k| k.starts_with("sweep.")) {
                    return Err(e.config_error(e.line(k), format!("'{k}' given without sweep.param")));
                }
                None
            }
            Some((param, line)) => {
                if !params.field_names().contains(&param) {
                    return Err(e.config_error(
                        line,
                        format!(
                            "sweep parameter '{param}' is not one of {}",
                            params.field_names().join(", ")
                        ),
                    ));
                }
                let scale = match e.raw("sweep.scale") {
                    None => SweepScale::Linear,
                    Some((v, l)) => parse_scale(v).map_err(|m| e.config_error(l, m))?,
                };
                let sweep = Sweep {
                    param: param.to_string(),
                    min: e.require("sweep.min")?,
                    max: e.require("sweep.max")?,
                    n_points: e.require("sweep.points")?,
                    scale,
                };
                if sweep.n_points < 2 {
                    return Err(e.config_error(e.line("sweep.points"), "sweep.points must be at least 2"));
                }
                if !(sweep.min.is_finite() && sweep.max.is_finite() && sweep.min < sweep.max) {
                    return Err(e.config_error(e.line("sweep.max"), "sweep range needs finite min < max"));
                }
                if scale == SweepScale::Log && sweep.min <= 0.0 {
                    return Err(e.config_error(e.line("sweep.min"), "log sweeps need a positive minimum"));
                }
                for v in [sweep.min, sweep.max] {
                    params
                        .with(param, v)
                        .map_err(|err| e.config_error(e.line("sweep.min"), err.to_string()))?;
                }
                Some(sweep)
            }
        };

        let scenario = Scenario {
            params,
            route,
            t_end,
            n_samples,
            fock,
            fock_converge,
            execution,
            sweep,
        };
        scenario
            .validate()
            .map_err(|err| e.config_error(e.line("n_samples"), err.to_string()))?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_samples < crate::metrics::MIN_SAMPLES {
            return Err(Error::InvalidInput(format!(
                "n_samples must be at least {}, got {}",
                crate::metrics::MIN_SAMPLES,
                self.n_samples
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidInput(format!("t_end must be positive, got {}", self.t_end)));
        }
        Ok(())
    }

    pub fn fock_config(&self) -> FockConfig {
        self.fock.unwrap_or(FockConfig {
            execution: self.execution,
            ..FockConfig::default()
        })
    }

    pub fn time_grid(&self) -> Vec<f64> {
        uniform_grid(self.t_end, self.n_samples)
    }

    /// Computes every series of the selected route at the scenario parameters.
    pub fn run(&self) -> Result<RunOutput> {
        self.validate()?;
        Ok(RunOutput {
            times: self.time_grid(),
            series: run_route(self, &self.params)?,
        })
    }

    /// One summary row per sweep point, in sweep order.
    pub fn run_sweep(&self) -> Result<SweepOutput> {
        self.validate()?;
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("scenario has no sweep".into()))?;
        let values = sweep.values();
        let rows = par_map(&values, self.execution, |&v| -> Result<SweepRow> {
            let params = self.params.with(&sweep.param, v)?;
            let series = run_route(self, &params)?;
            Ok(SweepRow {
                value: v,
                series: series
                    .iter()
                    .map(|s| (s.name.clone(), s.data.as_ref().map(SeriesSummary::of)))
                    .collect(),
            })
        });
        Ok(SweepOutput {
            param: sweep.param.clone(),
            rows: rows.into_iter().collect::<Result<_>>()?,
        })
    }
}

/// Per-sample quadrature data and the derived metrics of one series.
#[derive(Debug, Clone)]
pub struct SeriesData {
    pub metrics: BatteryMetrics,
    pub quadratures: Option<Vec<QuadratureStats>>,
    /// Extra facts worth echoing, such as the Fock cutoffs finally used.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    /// `None` when the route does not apply; `skip_reason` says why.
    pub data: Option<SeriesData>,
    pub skip_reason: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub times: Vec<f64>,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSummary {
    pub t_e: f64,
    pub e_te: f64,
    pub t_p: f64,
    pub p_tp: f64,
    pub energy_end: f64,
    pub ergotropy_end: Option<f64>,
    pub flags: MetricFlags,
}

impl SeriesSummary {
    pub fn of(data: &SeriesData) -> Self {
        let m = &data.metrics;
        Self {
            t_e: m.t_e,
            e_te: m.e_te,
            t_p: m.t_p,
            p_tp: m.p_tp,
            energy_end: m.energy.last().copied().unwrap_or(0.0),
            ergotropy_end: m.ergotropy.as_ref().and_then(|w| w.last().copied()),
            flags: m.flags,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub series: Vec<(String, Option<SeriesSummary>)>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub param: String,
    pub rows: Vec<SweepRow>,
}

fn computed(name: &str, traj: &Trajectory, omega_b: f64, notes: Vec<String>) -> Result<Series> {
    let quadratures = traj
        .moments
        .as_ref()
        .map(|ms| ms.iter().map(quadrature_stats).collect::<Result<Vec<_>>>())
        .transpose()?;
    Ok(Series {
        name: name.to_string(),
        data: Some(SeriesData {
            metrics: compute_metrics(traj, omega_b)?,
            quadratures,
            notes,
        }),
        skip_reason: None,
    })
}

fn nonlinear_only(params: &SystemParams, route: Route) -> Result<NonlinearParams> {
    match params {
        SystemParams::Nonlinear(p) => Ok(*p),
        SystemParams::Linear(_) => Err(Error::UnsupportedRegime(format!(
            "the {route} route covers the nonlinear coupling only"
        ))),
    }
}

fn populations(times: &[f64], omega_b: f64, energy: impl Fn(f64) -> Result<f64>) -> Result<Trajectory> {
    let numbers = times.iter().map(|&t| Ok(energy(t)? / omega_b)).collect::<Result<Vec<_>>>()?;
    Trajectory::from_populations(times.to_vec(), numbers)
}

/// Series produced by one concrete route.
fn route_series(s: &Scenario, params: &SystemParams, route: Route) -> Result<Vec<Series>> {
    let omega_b = params.omega_b();
    let times = s.time_grid();
    match route {
        Route::Analytic => {
            let SystemParams::Linear(p) = params else {
                return Err(Error::UnsupportedRegime(
                    "the analytic route covers the linear coupling only".into(),
                ));
            };
            let moments = times.iter().map(|&t| linear::moments(t, p)).collect::<Result<Vec<_>>>()?;
            Ok(vec![computed("analytic", &Trajectory::from_moments(moments), omega_b, vec![])?])
        }
        Route::Cumulant => {
            let p = nonlinear_only(params, route)?;
            let states = integrate_cumulant(&p, s.t_end, s.n_samples)?;
            Ok(vec![computed("cumulant", &Trajectory::from_cumulant(&states), omega_b, vec![])?])
        }
        Route::Perturbation => {
            let p = nonlinear_only(params, route)?;
            if p.gamma == 0.0 {
                [SeriesOrder::Zeroth, SeriesOrder::First, SeriesOrder::Second]
                    .into_iter()
                    .enumerate()
                    .map(|(k, order)| {
                        let traj = populations(&times, omega_b, |t| perturbative_energy(t, &p, order))?;
                        computed(&format!("order{k}"), &traj, omega_b, vec![])
                    })
                    .collect()
            } else {
                let traj = populations(&times, omega_b, |t| weak_driving_energy(t, &p))?;
                Ok(vec![computed("weak_driving", &traj, omega_b, vec![])?])
            }
        }
        Route::Fock => {
            let cfg = s.fock_config();
            let (traj, notes) = if s.fock_converge {
                let conv = converge_cutoffs(params, &cfg, s.t_end, s.n_samples)?;
                let notes = vec![
                    format!("converged cutoffs {}x{}", conv.config.cutoff_a, conv.config.cutoff_b),
                    format!(
                        "reference cutoffs {}x{}",
                        conv.trajectory.config.cutoff_a, conv.trajectory.config.cutoff_b
                    ),
                    format!("final energy change {:.3e}", conv.energy_change),
                    format!("final ergotropy change {:.3e}", conv.ergotropy_change),
                ];
                (conv.trajectory, notes)
            } else {
                let traj = evolve(params, &cfg, s.t_end, s.n_samples)?;
                let notes = vec![format!("cutoffs {}x{}", traj.config.cutoff_a, traj.config.cutoff_b)];
                (traj, notes)
            };
            Ok(vec![computed("fock", &Trajectory::from_fock(&traj), omega_b, notes)?])
        }
        Route::All => unreachable!("expanded by run_route"),
    }
}

fn skipped_names(params: &SystemParams, route: Route) -> Vec<String> {
    match (route, params) {
        (Route::Perturbation, SystemParams::Nonlinear(p)) if p.gamma == 0.0 => {
            (0..3).map(|k| format!("order{k}")).collect()
        }
        (Route::Perturbation, SystemParams::Nonlinear(_)) => vec!["weak_driving".into()],
        _ => vec![route.name().to_string()],
    }
}

fn run_route(s: &Scenario, params: &SystemParams) -> Result<Vec<Series>> {
    if s.route != Route::All {
        return route_series(s, params, s.route);
    }
    let mut out = Vec::new();
    for route in Route::CONCRETE {
        match route_series(s, params, route) {
            Ok(series) => out.extend(series),
            Err(Error::UnsupportedRegime(reason)) => out.extend(skipped_names(params, route).into_iter().map(|name| Series {
                name,
                data: None,
                skip_reason: Some(reason.clone()),
            })),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NONLINEAR: &str = "coupling = nonlinear\nOmega = 0.25\nJ = 1\ngamma = 0  # lossless\nt_end = 8\nn_samples = 161\n";

    fn config_line(r: Result<Scenario>) -> usize {
        match r {
            Err(Error::Config { line, .. }) => line,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn parses_minimal_file_with_defaults() {
        let s = Scenario::parse(NONLINEAR, "x").unwrap();
        assert_eq!(s.route, Route::All);
        assert_eq!(s.params.omega_b(), 1.0);
        assert_eq!(s.params.coupling_rate(), 1.0);
        assert!(s.fock.is_none() && s.sweep.is_none());
        assert_eq!(s.fock_config(), FockConfig::default());
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(config_line(Scenario::parse("coupling = linear\nbogus = 1\n", "x")), 2);
        assert_eq!(config_line(Scenario::parse("coupling = linear\n\nOmega 1\n", "x")), 3);
        assert_eq!(config_line(Scenario::parse(&format!("{NONLINEAR}Omega = 2\n"), "x")), 7);
        assert_eq!(config_line(Scenario::parse(&format!("{NONLINEAR}route = fast\n"), "x")), 7);
        assert_eq!(config_line(Scenario::parse(&format!("{NONLINEAR}g = 1\n"), "x")), 7);
        let bad_number = NONLINEAR.replace("Omega = 0.25", "Omega = quarter");
        assert_eq!(config_line(Scenario::parse(&bad_number, "x")), 2);
        assert_eq!(config_line(Scenario::parse("coupling = nonlinear\n", "x")), 0);
    }

    #[test]
    fn sweep_must_name_a_parameter() {
        let ok = format!("{NONLINEAR}sweep.param = Omega\nsweep.min = 0.1\nsweep.max = 1\nsweep.points = 3\nsweep.scale = log\n");
        let s = Scenario::parse(&ok, "x").unwrap();
        let values = s.sweep.unwrap().values();
        assert_eq!(values.len(), 3);
        assert!((values[1] - 0.1f64.sqrt()).abs() < 1e-15);
        let bad = ok.replace("sweep.param = Omega", "sweep.param = g");
        assert_eq!(config_line(Scenario::parse(&bad, "x")), 7);
        let few = ok.replace("sweep.points = 3", "sweep.points = 1");
        assert_eq!(config_line(Scenario::parse(&few, "x")), 10);
    }

    #[test]
    fn all_route_fills_inapplicable_groups_with_notes() {
        let s = Scenario::parse(&format!("{NONLINEAR}fock.cutoff_a = 4\nfock.cutoff_b = 8\n"), "x").unwrap();
        let out = s.run().unwrap();
        let names: Vec<_> = out.series.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["analytic", "cumulant", "order0", "order1", "order2", "fock"]);
        assert!(out.series[0].data.is_none() && out.series[0].skip_reason.is_some());
        assert!(out.series[1..].iter().all(|s| s.data.is_some()));
    }

    #[test]
    fn explicit_mismatched_route_is_an_error() {
        let s = Scenario::parse(&format!("{NONLINEAR}route = analytic\n"), "x").unwrap();
        assert!(matches!(s.run(), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn linear_analytic_summary_matches_closed_form() {
        let text = "coupling = linear\nroute = analytic\nOmega = 0.1\ng = 1\ngamma = 0.5\nt_end = 10\nn_samples = 4001\n";
        let s = Scenario::parse(text, "x").unwrap();
        let out = s.run().unwrap();
        let m = &out.series[0].data.as_ref().unwrap().metrics;
        let p = LinearParams::new(1.0, 0.1, 1.0, 0.5).unwrap();
        assert!((m.t_e - linear::optimal_time_energy(&p)).abs() < 1e-4 * m.t_e);
        assert!((m.e_te - linear::optimal_energy(&p)).abs() < 1e-8 * m.e_te);
    }

    #[test]
    fn sweep_rows_follow_sweep_order() {
        let text = "coupling = nonlinear\nroute = cumulant\nOmega = 0.1\nJ = 1\ngamma = 0.5\nt_end = 20\nn_samples = 201\n\
                    sweep.param = gamma\nsweep.min = 0.25\nsweep.max = 2\nsweep.points = 4\n";
        let s = Scenario::parse(text, "x").unwrap();
        let par = s.run_sweep().unwrap();
        let seq = Scenario {
            execution: Execution::Sequential,
            ..s.clone()
        }
        .run_sweep()
        .unwrap();
        let values: Vec<f64> = par.rows.iter().map(|r| r.value).collect();
        assert_eq!(values, s.sweep.as_ref().unwrap().values());
        for (a, b) in par.rows.iter().zip(&seq.rows) {
            assert_eq!(a.series, b.series);
        }
    }
}
