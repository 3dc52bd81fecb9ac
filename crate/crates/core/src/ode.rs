//! Dormand–Prince 5(4) integrator with step-size control and continuous output.
//!
//! The state is a flat `[f64]`; complex-valued systems pack real and imaginary
//! parts. Samples are produced by the fourth-order dense output of the method,
//! so the requested grid never constrains the step size.

use crate::error::{Error, Result};

pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&mut self, t: f64, y: &[f64], dydt: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerances {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol }
    }

    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            rtol: self.rtol / factor,
            atol: self.atol / factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub tol: Tolerances,
    pub max_steps: usize,
}

impl IntegratorOptions {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            tol: Tolerances::new(rtol, atol),
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

// Butcher tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// difference between fifth and embedded fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense output
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// step-size controller (Hairer & Wanner's DOPRI5 defaults)
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

struct Workspace {
    k: [Vec<f64>; 7],
    y_stage: Vec<f64>,
    y_new: Vec<f64>,
    cont: [Vec<f64>; 5],
    sample: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        let v = || vec![0.0; n];
        Self {
            k: [v(), v(), v(), v(), v(), v(), v()],
            y_stage: v(),
            y_new: v(),
            cont: [v(), v(), v(), v(), v()],
            sample: v(),
        }
    }
}

fn weighted_rms(tol: &Tolerances, y: &[f64], f: &[f64]) -> f64 {
    let sum: f64 = y
        .iter()
        .zip(f)
        .map(|(yi, fi)| {
            let sc = tol.atol + tol.rtol * yi.abs();
            (fi / sc).powi(2)
        })
        .sum();
    (sum / y.len().max(1) as f64).sqrt()
}

fn initial_step<S: OdeSystem>(
    sys: &mut S,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    tol: &Tolerances,
    span: f64,
    ws: &mut Workspace,
) -> f64 {
    let d0 = weighted_rms(tol, y0, y0);
    let d1 = weighted_rms(tol, y0, f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    for ((ys, y), f) in ws.y_stage.iter_mut().zip(y0).zip(f0) {
        *ys = y + h0 * f;
    }
    sys.rhs(t0 + h0, &ws.y_stage, &mut ws.k[1]);
    let diff: Vec<f64> = ws.k[1].iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = weighted_rms(tol, y0, &diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Integrates from `t0` and calls `visit(t, y)` at every entry of `sample_times`.
///
/// `sample_times` must be non-decreasing and not earlier than `t0`. The visitor
/// may abort the run by returning an error.
pub fn integrate<S, V>(
    sys: &mut S,
    t0: f64,
    y0: &[f64],
    sample_times: &[f64],
    opts: &IntegratorOptions,
    mut visit: V,
) -> Result<IntegrationStats>
where
    S: OdeSystem,
    V: FnMut(f64, &[f64]) -> Result<()>,
{
    let n = sys.dim();
    if y0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: y0.len(),
        });
    }
    if sample_times.windows(2).any(|w| w[1] < w[0]) || sample_times.first().is_some_and(|&s| s < t0) {
        return Err(Error::InvalidInput("sample times must be sorted and start at or after t0".into()));
    }
    let mut stats = IntegrationStats::default();
    let mut samples = sample_times.iter().copied().peekable();
    while let Some(&ts) = samples.peek() {
        if ts > t0 {
            break;
        }
        visit(ts, y0)?;
        samples.next();
    }
    let Some(&t_end) = sample_times.last() else {
        return Ok(stats);
    };
    if samples.peek().is_none() {
        return Ok(stats);
    }

    let tol = opts.tol;
    let mut ws = Workspace::new(n);
    let mut y = y0.to_vec();
    let mut t = t0;
    sys.rhs(t, &y, &mut ws.k[0]);
    stats.rhs_evals += 1;
    let k0 = ws.k[0].clone();
    let mut h = initial_step(sys, t, &y, &k0, &tol, t_end - t0, &mut ws);
    stats.rhs_evals += 1;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    while t < t_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::NoConvergence(format!(
                "step budget of {} exhausted at t = {t}",
                opts.max_steps
            )));
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }
        let last_step = t + h >= t_end;
        if last_step {
            h = t_end - t;
        }

        step(sys, t, h, &y, &mut ws);
        stats.rhs_evals += 6;

        let err_sum: f64 = (0..n)
            .map(|i| {
                let k = &ws.k;
                let e = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
                let sc = tol.atol + tol.rtol * y[i].abs().max(ws.y_new[i].abs());
                (e / sc).powi(2)
            })
            .sum();
        let err = (err_sum / n.max(1) as f64).sqrt();
        if !err.is_finite() {
            stats.rejected += 1;
            h *= FAC_MIN;
            last_rejected = true;
            continue;
        }

        let fac11 = err.powf(0.2 - BETA * 0.75);
        if err <= 1.0 {
            let mut fac = fac11 / fac_old.powf(BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            fac_old = err.max(1e-4);
            stats.accepted += 1;

            let t_new = if last_step { t_end } else { t + h };
            if samples.peek().is_some_and(|&ts| ts <= t_new) {
                prepare_dense(h, &y, &mut ws);
                while let Some(&ts) = samples.peek() {
                    if ts > t_new {
                        break;
                    }
                    let theta = ((ts - t) / h).clamp(0.0, 1.0);
                    let theta1 = 1.0 - theta;
                    let c = &ws.cont;
                    for (i, out) in ws.sample.iter_mut().enumerate() {
                        *out = c[0][i]
                            + theta * (c[1][i] + theta1 * (c[2][i] + theta * (c[3][i] + theta1 * c[4][i])));
                    }
                    visit(ts, &ws.sample)?;
                    samples.next();
                }
            }

            std::mem::swap(&mut y, &mut ws.y_new);
            ws.k.swap(0, 6);
            t = t_new;
            h = h_new;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
    }
    Ok(stats)
}

/// One trial step; leaves stages in `ws.k` and the fifth-order solution in `ws.y_new`.
/// `ws.k[0]` must hold `f(t, y)` on entry.
fn step<S: OdeSystem>(sys: &mut S, t: f64, h: f64, y: &[f64], ws: &mut Workspace) {
    let n = y.len();
    let Workspace { k, y_stage, y_new, .. } = ws;

    for i in 0..n {
        y_stage[i] = y[i] + h * A21 * k[0][i];
    }
    sys.rhs(t + C2 * h, y_stage, &mut k[1]);
    for i in 0..n {
        y_stage[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
    }
    sys.rhs(t + C3 * h, y_stage, &mut k[2]);
    for i in 0..n {
        y_stage[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
    }
    sys.rhs(t + C4 * h, y_stage, &mut k[3]);
    for i in 0..n {
        y_stage[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
    }
    sys.rhs(t + C5 * h, y_stage, &mut k[4]);
    for i in 0..n {
        y_stage[i] = y[i]
            + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i] + A65 * k[4][i]);
    }
    sys.rhs(t + h, y_stage, &mut k[5]);
    for i in 0..n {
        y_new[i] = y[i]
            + h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
    }
    sys.rhs(t + h, y_new, &mut k[6]);
}

fn prepare_dense(h: f64, y: &[f64], ws: &mut Workspace) {
    let Workspace { k, y_new, cont, .. } = ws;
    for i in 0..y.len() {
        let diff = y_new[i] - y[i];
        let bspl = h * k[0][i] - diff;
        cont[0][i] = y[i];
        cont[1][i] = diff;
        cont[2][i] = bspl;
        cont[3][i] = diff - h * k[6][i] - bspl;
        cont[4][i] = h
            * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i]);
    }
}

/// `n` evenly spaced times on `[0, t_end]`.
pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t_end],
        _ => (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect(),
    }
}
