//! Repeated damp-then-recover cycles on an encoded `|1_L>` and lifetime fits.
//!
//! A delay `t` split into `N` cycles damps every qubit with
//! `gamma_step = 1 - exp(-(t/N - dt) / T1)` before each recovery, where `dt`
//! is the time a recovery takes. The recovery is rebuilt for `gamma_step`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{amplitude_damping_n, gamma_from_delay};
use crate::codes::QuantumCode;
use crate::error::{Error, Result};
use crate::matkernel::{outer, ComplexMatrix};
use crate::metrics::{encoder_marginal, fidelity_poly_fit, PolyFit};
use crate::orthogonalizer::{orthogonalize, OrthogonalizeOptions};
use crate::presets::is_single_damping;
use crate::recovery::syndrome_petz;

/// Which recovery runs after every damping step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CycleRecovery {
    /// Syndrome-based Petz map, completed to a channel.
    SyndromePetz,
    /// Syndrome-based Petz operators of the no-damping and single-damping records, no completion.
    Restricted,
    /// Damping only; used to check that cycles compose to a single channel.
    Disabled,
}

#[derive(Debug, Clone)]
pub struct MulticycleConfig {
    pub t1_us: f64,
    pub delay_grid: Vec<f64>,
    pub cycles: usize,
    pub dt_us: f64,
    pub code: QuantumCode,
    /// Orthogonalization order; `None` uses the default order.
    pub order: Option<Vec<String>>,
    pub recovery: CycleRecovery,
    /// When set, readout decodes with this unitary and reads the marginal of the input qubit.
    pub encoder: Option<ComplexMatrix>,
}

impl MulticycleConfig {
    /// Leung code with its preset order, restricted recovery and encoder readout.
    pub fn leung(t1_us: f64, delay_grid: Vec<f64>, cycles: usize) -> Self {
        MulticycleConfig {
            t1_us,
            delay_grid,
            cycles,
            dt_us: 0.0,
            code: crate::codes::leung_code(),
            order: Some(crate::presets::leung_order()),
            recovery: CycleRecovery::Restricted,
            encoder: Some(crate::codes::leung_encoder()),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurvePoint {
    pub t_us: f64,
    /// Per-cycle damping strength.
    pub gamma_step: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MulticycleCurve {
    pub cycles: usize,
    pub points: Vec<CurvePoint>,
    /// Delays shorter than `cycles * dt`, which were not run.
    pub skipped: Vec<f64>,
}

impl MulticycleCurve {
    pub fn ts(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t_us).collect()
    }

    pub fn fidelities(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.fidelity).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_curve_csv(&self.points.iter().map(|p| (p.t_us, p.fidelity)).collect::<Vec<_>>(), out)
    }
}

pub fn write_curve_csv<W: Write>(curve: &[(f64, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t_us", "fidelity"])?;
    for (t, f) in curve {
        w.write_record([format!("{t}"), format!("{f:.15e}")])?;
    }
    w.flush()?;
    Ok(())
}

fn run_point(cfg: &MulticycleConfig, t: f64) -> Result<CurvePoint> {
    let code = &cfg.code;
    let step = t / cfg.cycles as f64 - cfg.dt_us;
    let gamma_step = gamma_from_delay(step, cfg.t1_us)?;
    let noise = amplitude_damping_n(gamma_step, code.n)?;
    let recovery = match cfg.recovery {
        CycleRecovery::Disabled => None,
        kind => {
            let opts = match &cfg.order {
                Some(o) => OrthogonalizeOptions::with_order(o),
                None => OrthogonalizeOptions::default(),
            };
            let full = syndrome_petz(&orthogonalize(&noise, code, &opts)?)?;
            Some(if kind == CycleRecovery::Restricted { full.restricted(is_single_damping) } else { full })
        }
    };
    let one = code.codeword(1);
    let mut rho = outer(&one, &one);
    for _ in 0..cfg.cycles {
        rho = noise.apply(&rho)?;
        if let Some(r) = &recovery {
            rho = r.apply(&rho)?;
        }
    }
    let fidelity = match &cfg.encoder {
        Some(u) => encoder_marginal(code, u, &rho, 1)?,
        None => (one.adjoint() * &rho * &one)[(0, 0)].re,
    };
    Ok(CurvePoint { t_us: t, gamma_step, fidelity })
}

/// `F(t)` for `|1_L>` after `cycles` damp-recover rounds, one point per delay.
pub fn run_multicycle(cfg: &MulticycleConfig) -> Result<MulticycleCurve> {
    if cfg.cycles == 0 {
        return Err(Error::OutOfRange { what: "cycles", value: 0.0 });
    }
    if !(cfg.t1_us > 0.0) {
        return Err(Error::OutOfRange { what: "T1", value: cfg.t1_us });
    }
    let (run, skipped): (Vec<f64>, Vec<f64>) =
        cfg.delay_grid.iter().partition(|&&t| t / cfg.cycles as f64 - cfg.dt_us >= 0.0);
    for t in &skipped {
        log::warn!("delay {t} us is shorter than {} recoveries of {} us; skipped", cfg.cycles, cfg.dt_us);
    }
    let points = run.par_iter().map(|&t| run_point(cfg, t)).collect::<Result<Vec<_>>>()?;
    Ok(MulticycleCurve { cycles: cfg.cycles, points, skipped })
}

/// Fit of the curve against the total damping `gamma(t)`, using the points with `0 < gamma <= 0.2`.
pub fn multicycle_gamma_fit(curve: &MulticycleCurve, t1_us: f64, degree: usize) -> Result<PolyFit> {
    let mut gs = Vec::new();
    let mut fs = Vec::new();
    for p in &curve.points {
        let g = gamma_from_delay(p.t_us, t1_us)?;
        if g > 0.0 && g <= 0.2 {
            gs.push(g);
            fs.push(p.fidelity);
        }
    }
    fidelity_poly_fit(&gs, &fs, degree)
}

/// Delays at which a single qubit reaches each damping strength in `gammas`.
pub fn delays_for_gammas(gammas: &[f64], t1_us: f64) -> Vec<f64> {
    gammas.iter().map(|g| -t1_us * (-g).ln_1p()).collect()
}

/// `e^{-t/T1}`: the excited-state population of an unprotected qubit.
pub fn bare_qubit_curve(t1_us: f64, delay_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if !(t1_us > 0.0) {
        return Err(Error::OutOfRange { what: "T1", value: t1_us });
    }
    Ok(delay_grid.iter().map(|&t| (t, (-t / t1_us).exp())).collect())
}

/// `f(t) = a + b e^{-t/T}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LifetimeFit {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "T_us")]
    pub t: f64,
    /// `max |f(t_i) - data_i|`.
    pub residual: f64,
}

impl LifetimeFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.a + self.b * (-t / self.t).exp()
    }
}

/// Fitted `T` beyond this multiple of the longest delay is reported as non-convergence.
pub const MAX_T_FACTOR: f64 = 100.0;
const GOLDEN_TOL: f64 = 1e-10;

/// Best `(a, b)` for a fixed `T` and the resulting sum of squared errors.
fn linear_part(ts: &[f64], fs: &[f64], t: f64) -> (f64, f64, f64) {
    let x = DMatrix::from_fn(ts.len(), 2, |i, j| if j == 0 { 1.0 } else { (-ts[i] / t).exp() });
    let y = DVector::from_column_slice(fs);
    let svd = x.clone().svd(true, true);
    let ab = svd.solve(&y, 1e-14).unwrap_or_else(|_| DVector::zeros(2));
    let sse = (&x * &ab - y).norm_squared();
    (ab[0], ab[1], sse)
}

/// Golden-section search for the minimum of `f` on `[lo, hi]`.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > GOLDEN_TOL {
        if f1 <= f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    (lo + hi) / 2.0
}

/// Least-squares fit of `a + b e^{-t/T}` with starts at `T = t_ref/4, t_ref, 4 t_ref`.
///
/// `(a, b)` are solved exactly for every trial `T`, so the search is one
/// dimensional in `ln T`. Each start walks downhill by factors of two to
/// bracket a minimum, then golden-section refines it.
pub fn exp_fit_with_scale(ts: &[f64], fs: &[f64], t_ref: f64) -> Result<LifetimeFit> {
    if ts.len() != fs.len() {
        return Err(Error::dims("exp_fit", ts.len(), fs.len()));
    }
    if ts.len() < 4 {
        return Err(Error::dims("exp_fit points", 4, ts.len()));
    }
    if let Some(&f) = fs.iter().find(|&&f| !(-1e-9..=1.0 + 1e-9).contains(&f)) {
        return Err(Error::OutOfRange { what: "fidelity", value: f });
    }
    let t_max = ts.iter().copied().fold(0.0, f64::max);
    if !(t_max > 0.0) || !(t_ref > 0.0) {
        return Err(Error::OutOfRange { what: "time scale", value: t_max.min(t_ref) });
    }
    let sse = |ln_t: f64| linear_part(ts, fs, ln_t.exp()).2;
    let ln_cap = (1e3 * MAX_T_FACTOR * t_max).ln();
    let ln_floor = (1e-3 * t_max).ln();
    let step = 2f64.ln();
    let mut best: Option<(f64, f64)> = None;
    for start in [t_ref / 4.0, t_ref, 4.0 * t_ref] {
        let mut x = start.ln().clamp(ln_floor, ln_cap);
        let mut fx = sse(x);
        // Downhill direction, then walk until the error rises.
        let dir = if sse(x + step) < fx { 1.0 } else { -1.0 };
        loop {
            let next = x + dir * step;
            if next > ln_cap || next < ln_floor {
                break;
            }
            let fnext = sse(next);
            if fnext >= fx {
                break;
            }
            (x, fx) = (next, fnext);
        }
        let ln_t = golden_min(sse, (x - step).max(ln_floor), (x + step).min(ln_cap));
        let value = sse(ln_t);
        if best.is_none_or(|(_, v)| value < v) {
            best = Some((ln_t, value));
        }
    }
    let (ln_t, _) = best.expect("three starts");
    let t = ln_t.exp();
    if t > MAX_T_FACTOR * t_max {
        return Err(Error::NoConvergence(format!("lifetime {t:.3e} exceeds {MAX_T_FACTOR} x the longest delay")));
    }
    let (a, b, _) = linear_part(ts, fs, t);
    let fit = LifetimeFit { a, b, t, residual: 0.0 };
    let residual = ts.iter().zip(fs).map(|(&x, &y)| (fit.eval(x) - y).abs()).fold(0.0, f64::max);
    Ok(LifetimeFit { residual, ..fit })
}

/// [`exp_fit_with_scale`] with the reference scale set to half the longest delay.
pub fn exp_fit(ts: &[f64], fs: &[f64]) -> Result<LifetimeFit> {
    let t_max = ts.iter().copied().fold(0.0, f64::max);
    exp_fit_with_scale(ts, fs, t_max / 2.0)
}
