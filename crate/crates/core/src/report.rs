//! CSV emission and the constants table.
//!
//! Numbers carry 15 significant digits, rows end in `\n`, and parameters are
//! echoed as `#` comment lines so that every file records how it was made.

use std::f64::consts::SQRT_2;
use std::io::Write;

use crate::error::Result;
use crate::linear::linear_constants;
use crate::metrics::MetricFlags;
use crate::params::SystemParams;
use crate::perturbation::perturbation_constants;
use crate::roots::golden_section_max;
use crate::scenario::{RunOutput, Scenario, SweepOutput, SweepScale};
use crate::sweep::Execution;

pub const CSV_DIGITS: usize = 15;
pub const CONSTANT_DIGITS: usize = 12;
pub const RUN_COLUMNS: [&str; 7] = ["t", "energy", "power", "ergotropy", "var_x", "var_p", "det"];
pub const SUMMARY_COLUMNS: [&str; 4] = ["t_E", "E_tE", "t_P", "P_tP"];

/// `x` rounded to `digits` significant digits, positional between 1e-5 and
/// 1e15 and scientific elsewhere, trailing zeros removed.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits.max(1) - 1, x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let all = mantissa.replace('.', "");
    let digits = all.trim_end_matches('0');
    let sign = if x < 0.0 { "-" } else { "" };
    let body = if (-5..15).contains(&exp) {
        if exp >= 0 {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                format!("{digits}{}", "0".repeat(int_len - digits.len()))
            } else {
                format!("{}.{}", &digits[..int_len], &digits[int_len..])
            }
        } else {
            format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
        }
    } else if digits.len() > 1 {
        format!("{}.{}e{exp}", &digits[..1], &digits[1..])
    } else {
        format!("{digits}e{exp}")
    };
    format!("{sign}{body}")
}

pub fn fmt_num(x: f64) -> String {
    fmt_sig(x, CSV_DIGITS)
}

fn cell(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn flag_names(f: &MetricFlags) -> String {
    let mut out = Vec::new();
    if f.zero {
        out.push("zero");
    }
    if f.energy_asymptotic {
        out.push("energy_asymptotic");
    }
    if f.power_asymptotic {
        out.push("power_asymptotic");
    }
    out.join("|")
}

pub fn params_echo(p: &SystemParams) -> Vec<(String, String)> {
    let mut out = vec![("coupling".to_string(), p.coupling().to_string())];
    for &field in p.field_names() {
        out.push((field.to_string(), fmt_num(p.get(field).expect("listed field"))));
    }
    out
}

/// `key = value` pairs that reproduce the scenario, in file order.
pub fn scenario_echo(s: &Scenario) -> Vec<(String, String)> {
    let mut out = params_echo(&s.params);
    out.push(("route".into(), s.route.to_string()));
    out.push(("t_end".into(), fmt_num(s.t_end)));
    out.push(("n_samples".into(), s.n_samples.to_string()));
    let exec = match s.execution {
        Execution::Sequential => "sequential",
        Execution::Parallel => "parallel",
    };
    out.push(("execution".into(), exec.into()));
    let cfg = s.fock_config();
    out.extend([
        ("fock.cutoff_a".into(), cfg.cutoff_a.to_string()),
        ("fock.cutoff_b".into(), cfg.cutoff_b.to_string()),
        ("fock.rel_tol".into(), fmt_num(cfg.rel_tol)),
        ("fock.abs_tol".into(), fmt_num(cfg.abs_tol)),
        ("fock.convergence_rel".into(), fmt_num(cfg.convergence_rel)),
        ("fock.max_doublings".into(), cfg.max_doublings.to_string()),
        ("fock.check_positivity".into(), cfg.check_positivity.to_string()),
        ("fock.converge".into(), s.fock_converge.to_string()),
    ]);
    if let Some(sw) = &s.sweep {
        let scale = match sw.scale {
            SweepScale::Linear => "linear",
            SweepScale::Log => "log",
        };
        out.extend([
            ("sweep.param".into(), sw.param.clone()),
            ("sweep.min".into(), fmt_num(sw.min)),
            ("sweep.max".into(), fmt_num(sw.max)),
            ("sweep.points".into(), sw.n_points.to_string()),
            ("sweep.scale".into(), scale.into()),
        ]);
    }
    out
}

fn write_echo<W: Write>(w: &mut W, title: &str, echo: &[(String, String)]) -> Result<()> {
    writeln!(w, "# {title}")?;
    writeln!(w, "# generator = qbattery {}", env!("CARGO_PKG_VERSION"))?;
    for (k, v) in echo {
        writeln!(w, "# {k} = {v}")?;
    }
    Ok(())
}

/// Time series followed by a blank line and the optimum summary.
///
/// A single series uses the plain column names; several series get
/// `name:column` groups and a `series` column in the summary.
pub fn write_run_csv<W: Write>(w: &mut W, scenario: &Scenario, out: &RunOutput) -> Result<()> {
    write_echo(w, "qbattery run", &scenario_echo(scenario))?;
    for s in &out.series {
        if let Some(reason) = &s.skip_reason {
            writeln!(w, "# {}: not applicable ({reason})", s.name)?;
        }
        if let Some(d) = &s.data {
            for note in &d.notes {
                writeln!(w, "# {}: {note}", s.name)?;
            }
            let flags = flag_names(&d.metrics.flags);
            if !flags.is_empty() {
                writeln!(w, "# {}: flags {flags}", s.name)?;
            }
        }
    }
    let grouped = out.series.len() != 1;
    let mut header = vec!["t".to_string()];
    for s in &out.series {
        for col in &RUN_COLUMNS[1..] {
            header.push(if grouped { format!("{}:{col}", s.name) } else { col.to_string() });
        }
    }
    writeln!(w, "{}", header.join(","))?;
    for (i, &t) in out.times.iter().enumerate() {
        let mut row = vec![fmt_num(t)];
        for s in &out.series {
            match &s.data {
                None => row.extend(std::iter::repeat_n(String::new(), RUN_COLUMNS.len() - 1)),
                Some(d) => {
                    let m = &d.metrics;
                    let q = d.quadratures.as_ref().map(|q| q[i]);
                    row.push(fmt_num(m.energy[i]));
                    row.push(cell(m.power[i]));
                    row.push(cell(m.ergotropy.as_ref().map(|e| e[i])));
                    row.push(cell(q.map(|q| q.var_x)));
                    row.push(cell(q.map(|q| q.var_p)));
                    row.push(cell(q.map(|q| q.det)));
                }
            }
        }
        writeln!(w, "{}", row.join(","))?;
    }
    writeln!(w)?;
    if grouped {
        writeln!(w, "series,{}", SUMMARY_COLUMNS.join(","))?;
    } else {
        writeln!(w, "{}", SUMMARY_COLUMNS.join(","))?;
    }
    for s in &out.series {
        let values: Vec<String> = match &s.data {
            None => vec![String::new(); SUMMARY_COLUMNS.len()],
            Some(d) => {
                let m = &d.metrics;
                [m.t_e, m.e_te, m.t_p, m.p_tp].into_iter().map(fmt_num).collect()
            }
        };
        if grouped {
            writeln!(w, "{},{}", s.name, values.join(","))?;
        } else {
            writeln!(w, "{}", values.join(","))?;
        }
    }
    Ok(())
}

/// One row per sweep point and series.
pub fn write_sweep_csv<W: Write>(w: &mut W, scenario: &Scenario, out: &SweepOutput) -> Result<()> {
    write_echo(w, "qbattery sweep", &scenario_echo(scenario))?;
    writeln!(
        w,
        "{},series,{},energy_end,ergotropy_end,flags",
        out.param,
        SUMMARY_COLUMNS.join(",")
    )?;
    for row in &out.rows {
        for (name, summary) in &row.series {
            let rest = match summary {
                None => ",,,,,,".to_string(),
                Some(s) => format!(
                    "{},{},{},{},{},{},{}",
                    fmt_num(s.t_e),
                    fmt_num(s.e_te),
                    fmt_num(s.t_p),
                    fmt_num(s.p_tp),
                    fmt_num(s.energy_end),
                    cell(s.ergotropy_end),
                    flag_names(&s.flags)
                ),
            };
            writeln!(w, "{},{name},{rest}", fmt_num(row.value))?;
        }
    }
    Ok(())
}

/// Generic numeric table used by the figure commands.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub title: String,
    pub echo: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn echo(mut self, key: &str, value: impl Into<String>) -> Self {
        self.echo.push((key.to_string(), value.into()));
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        write_echo(w, &self.title, &self.echo)?;
        for n in &self.notes {
            writeln!(w, "# {n}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| cell(x)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(String::from_utf8(buf).expect("table output is ASCII"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantRow {
    pub name: &'static str,
    pub value: f64,
    /// Residual of the defining equation, or deviation from an independent
    /// maximization for constants that are peak values.
    pub residual: f64,
    pub definition: &'static str,
}

pub fn constants_table() -> Result<Vec<ConstantRow>> {
    let lin = linear_constants()?;
    let pert = perturbation_constants()?;
    let (_, c_max) = golden_section_max(|u| 2.0 * (1.0 - (-u).exp()).powi(2) / u, 0.5, 3.0, 1e-12)?;
    let (_, d_max) = golden_section_max(|x| 4.0 * (x / 2.0).sin().powi(4) / x, 2.0, 3.5, 1e-12)?;
    let (_, beta_max) = golden_section_max(|a| 2.0 * SQRT_2 * a.sin().powi(4) / a, 1.0, 2.0, 1e-12)?;
    Ok(vec![
        ConstantRow {
            name: "A",
            value: lin.a,
            residual: lin.a_residual(),
            definition: "-1/2 - W_{-1}(-1/(2 sqrt e)); (1 + 2A)exp(-A) - 1",
        },
        ConstantRow {
            name: "B",
            value: lin.b,
            residual: lin.b_residual(),
            definition: "tan(B/2) - 2B",
        },
        ConstantRow {
            name: "C",
            value: lin.c,
            residual: lin.c - c_max,
            definition: "max_u 2(1 - exp(-u))^2/u",
        },
        ConstantRow {
            name: "D_strong",
            value: lin.d_strong,
            residual: lin.d_strong - d_max,
            definition: "max_x 4 sin^4(x/2)/x",
        },
        ConstantRow {
            name: "alpha",
            value: pert.alpha,
            residual: pert.alpha_residual(),
            definition: "tan(alpha) - 4 alpha",
        },
        ConstantRow {
            name: "beta",
            value: pert.beta,
            residual: pert.beta - beta_max,
            definition: "max_a 2 sqrt2 sin^4(a)/a",
        },
        ConstantRow {
            name: "sqrt2_alpha",
            value: pert.power_time(),
            residual: pert.power_time() - SQRT_2 * pert.alpha,
            definition: "J t_P of the lossless nonlinear battery",
        },
        ConstantRow {
            name: "B-2alpha",
            value: lin.b - 2.0 * pert.alpha,
            residual: lin.b - 2.0 * pert.alpha,
            definition: "identity: both solve tan(x) = 4x with x = B/2",
        },
    ])
}

pub fn write_constants<W: Write>(w: &mut W, rows: &[ConstantRow]) -> Result<()> {
    writeln!(w, "name,value,residual,definition")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},\"{}\"",
            r.name,
            fmt_sig(r.value, CONSTANT_DIGITS),
            fmt_sig(r.residual, 3),
            r.definition
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(100.0), "100");
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333333");
        assert_eq!(fmt_num(2.0 / 3.0 * 1e-3), "0.000666666666666667");
        assert_eq!(fmt_num(1.5e-7), "1.5e-7");
        assert_eq!(fmt_num(1e20), "1e20");
        assert_eq!(fmt_num(123_456_789.123_456_79), "123456789.123457");
        assert_eq!(fmt_num(9.9999999999999999), "10");
        assert_eq!(fmt_sig(std::f64::consts::PI, 12), "3.14159265359");
    }

    #[test]
    fn formatting_round_trips_to_fifteen_digits() {
        for &x in &[1.2345678901234567e-9, 0.061229399, 7.77e14, 3.3e15, -4.2e-6] {
            let back: f64 = fmt_num(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-14 * x.abs(), "{x}");
        }
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new("demo", &["x", "y"]).echo("gamma", "0.5").note("n");
        t.push(vec![Some(1.0), None]);
        let csv = t.to_csv().unwrap();
        assert!(csv.ends_with("x,y\n1,\n"));
        assert!(csv.contains("# gamma = 0.5\n# n\n"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn constants_residuals_are_tiny() {
        let rows = constants_table().unwrap();
        for r in &rows {
            assert!(r.residual.abs() < 1e-12, "{} residual {}", r.name, r.residual);
        }
        let mut buf = Vec::new();
        write_constants(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\nA,1.25643"));
        assert!(text.contains("\nbeta,1.905"));
    }
}
