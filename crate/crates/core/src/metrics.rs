//! Fidelities of `R o A` on a code, polynomial fits in the noise strength,
//! the Petz-versus-syndrome certificates and the encoder readout protocol.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::KrausChannel;
use crate::codes::QuantumCode;
use crate::error::{Error, Result};
use crate::matkernel::{c, min_eigenvalue, outer, trace, ComplexMatrix, ComplexVector, C64};
use crate::orthogonalizer::OrthogonalizedNoise;
use crate::recovery::{noisy_code_projector, petz, polar_recovery, syndrome_petz, RecoveryMap};

/// Slack granted to the fidelity inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-9;
/// Design matrices with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// `T[a, b, a', b'] = <a_L| R(A(|b_L><b'_L|)) |a'_L>` for a fixed code, noise and recovery.
#[derive(Debug, Clone)]
pub struct LogicalTransfer {
    pub d: usize,
    data: Vec<C64>,
}

impl LogicalTransfer {
    pub fn new(code: &QuantumCode, noise: &KrausChannel, recovery: &RecoveryMap) -> Result<Self> {
        if noise.dim != code.dim() || recovery.dim != code.dim() {
            return Err(Error::dims("fidelity", code.dim(), noise.dim.max(recovery.dim)));
        }
        let d = code.d;
        let cw = &code.codewords;
        let mut data = vec![C64::new(0.0, 0.0); d * d * d * d];
        for b in 0..d {
            for bp in 0..d {
                let rho = outer(&cw.column(b).into_owned(), &cw.column(bp).into_owned());
                let out = recovery.apply(&noise.apply(&rho)?)?;
                let block = cw.adjoint() * out * cw;
                for a in 0..d {
                    for ap in 0..d {
                        data[((a * d + b) * d + ap) * d + bp] = block[(a, ap)];
                    }
                }
            }
        }
        Ok(LogicalTransfer { d, data })
    }

    pub fn get(&self, a: usize, b: usize, ap: usize, bp: usize) -> C64 {
        let d = self.d;
        self.data[((a * d + b) * d + ap) * d + bp]
    }

    /// `(1/d^2) sum_{a,a'} T[a, a, a', a']`.
    pub fn entanglement_fidelity(&self) -> f64 {
        let d = self.d;
        let mut s = C64::new(0.0, 0.0);
        for a in 0..d {
            for ap in 0..d {
                s += self.get(a, a, ap, ap);
            }
        }
        s.re / (d * d) as f64
    }

    /// `<psi| R(A(|psi><psi|)) |psi>` for logical amplitudes `psi`.
    pub fn state_fidelity(&self, psi: &[C64]) -> f64 {
        let d = self.d;
        let mut s = C64::new(0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                let ab = psi[a].conj() * psi[b];
                if ab == C64::new(0.0, 0.0) {
                    continue;
                }
                for ap in 0..d {
                    for bp in 0..d {
                        s += ab * psi[ap] * psi[bp].conj() * self.get(a, b, ap, bp);
                    }
                }
            }
        }
        s.re
    }
}

pub fn entanglement_fidelity(recovery: &RecoveryMap, noise: &KrausChannel, code: &QuantumCode) -> Result<f64> {
    Ok(LogicalTransfer::new(code, noise, recovery)?.entanglement_fidelity())
}

/// `(1/d^2) sum_{k,l} |Tr(R_k A_l P)|^2` summed pair by pair, completion included.
pub fn entanglement_fidelity_pairwise(recovery: &RecoveryMap, noise: &KrausChannel, code: &QuantumCode) -> Result<f64> {
    if noise.dim != code.dim() || recovery.dim != code.dim() {
        return Err(Error::dims("fidelity", code.dim(), noise.dim.max(recovery.dim)));
    }
    let mut rs = recovery.kraus_ops();
    rs.extend(recovery.completion.clone());
    let images: Vec<_> = noise.ops.iter().map(|a| a.left_mul(&code.projector)).collect();
    let mut total = 0.0;
    for r in &rs {
        for img in &images {
            total += trace(&(r * img)).norm_sqr();
        }
    }
    Ok(total / (code.d * code.d) as f64)
}

/// Bloch state `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
pub fn bloch_amplitudes(theta: f64, phi: f64) -> [C64; 2] {
    [c((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)]
}

#[derive(Debug, Clone, Serialize)]
pub struct WorstCase {
    pub value: f64,
    pub theta: f64,
    pub phi: f64,
}

impl WorstCase {
    /// The minimizing state as a full-space vector.
    pub fn state(&self, code: &QuantumCode) -> ComplexVector {
        let [a, b] = bloch_amplitudes(self.theta, self.phi);
        code.codeword(0) * a + code.codeword(1) * b
    }
}

const THETA_STEPS: usize = 64;
const PHI_STEPS: usize = 128;
const FINAL_STEP: f64 = 1e-7;
const REFINE_STARTS: usize = 4;

/// Minimum of the state fidelity over the Bloch sphere: grid search, then
/// compass pattern search from the best few grid points.
pub fn worst_case_from_transfer(t: &LogicalTransfer) -> Result<WorstCase> {
    if t.d != 2 {
        return Err(Error::UnsupportedDimension(t.d));
    }
    let pi = std::f64::consts::PI;
    let f = |theta: f64, phi: f64| t.state_fidelity(&bloch_amplitudes(theta, phi));
    let dt = pi / (THETA_STEPS - 1) as f64;
    let dp = 2.0 * pi / PHI_STEPS as f64;
    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity(THETA_STEPS * PHI_STEPS);
    for i in 0..THETA_STEPS {
        for j in 0..PHI_STEPS {
            let (theta, phi) = (i as f64 * dt, j as f64 * dp);
            grid.push((f(theta, phi), theta, phi));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    let mut best = WorstCase { value: f64::INFINITY, theta: 0.0, phi: 0.0 };
    for &(mut value, mut theta, mut phi) in grid.iter().take(REFINE_STARTS) {
        let mut step = dt.max(dp);
        while step > FINAL_STEP {
            let mut moved = false;
            for (dth, dph) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let (th, ph) = ((theta + dth).clamp(0.0, pi), phi + dph);
                let v = f(th, ph);
                if v < value {
                    (value, theta, phi, moved) = (v, th, ph, true);
                    break;
                }
            }
            if !moved {
                step /= 2.0;
            }
        }
        if value < best.value {
            best = WorstCase { value, theta, phi: phi.rem_euclid(2.0 * pi) };
        }
    }
    Ok(best)
}

pub fn worst_case_fidelity(recovery: &RecoveryMap, noise: &KrausChannel, code: &QuantumCode) -> Result<WorstCase> {
    if code.d != 2 {
        return Err(Error::UnsupportedDimension(code.d));
    }
    worst_case_from_transfer(&LogicalTransfer::new(code, noise, recovery)?)
}

/// Fit of `1 - sum_i a_i gamma^i`.
#[derive(Debug, Clone, Serialize)]
pub struct PolyFit {
    /// `a_1 .. a_degree`.
    pub coeffs: Vec<f64>,
    /// `max |model - data|` over the fitted points.
    pub residual: f64,
}

impl PolyFit {
    pub fn a(&self, i: usize) -> f64 {
        self.coeffs[i - 1]
    }

    pub fn eval(&self, gamma: f64) -> f64 {
        1.0 - self.coeffs.iter().enumerate().map(|(i, a)| a * gamma.powi(i as i32 + 1)).sum::<f64>()
    }
}

pub fn fidelity_poly_fit(gammas: &[f64], values: &[f64], degree: usize) -> Result<PolyFit> {
    if gammas.len() != values.len() {
        return Err(Error::dims("fidelity_poly_fit", gammas.len(), values.len()));
    }
    if degree == 0 || gammas.len() < degree + 1 {
        return Err(Error::dims("fidelity_poly_fit points", degree + 1, gammas.len()));
    }
    if let Some(&g) = gammas.iter().find(|&&g| !(g > 0.0 && g <= 0.2)) {
        return Err(Error::OutOfRange { what: "fit gamma", value: g });
    }
    let x = DMatrix::from_fn(gammas.len(), degree, |i, j| gammas[i].powi(j as i32 + 1));
    let y = DVector::from_iterator(values.len(), values.iter().map(|v| 1.0 - v));
    let svd = x.clone().svd(true, true);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if cond > MAX_CONDITION {
        return Err(Error::IllConditioned(cond));
    }
    let a = svd.solve(&y, 0.0).map_err(|e| Error::NoConvergence(e.to_string()))?;
    let fit = PolyFit { coeffs: a.iter().copied().collect(), residual: 0.0 };
    let residual = gammas.iter().zip(values).map(|(&g, &v)| (fit.eval(g) - v).abs()).fold(0.0, f64::max);
    Ok(PolyFit { residual, ..fit })
}

/// `0.005, 0.010, ..., 0.200`.
pub fn default_gamma_grid() -> Vec<f64> {
    (1..=40).map(|i| i as f64 * 0.005).collect()
}

/// Grid `a, a + step, ..., b` (inclusive up to rounding).
pub fn parse_grid(a: f64, b: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Parse(format!("bad grid {a}:{b}:{step}")));
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| a + i as f64 * step).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    pub gamma_grid: Vec<f64>,
    pub f_ent: Vec<f64>,
    /// Empty when the worst case was not requested.
    pub f_min: Vec<f64>,
    pub fit_ent: PolyFit,
    pub fit_min: Option<PolyFit>,
}

impl FidelityReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["gamma", "f_ent", "f_min"])?;
        for (i, g) in self.gamma_grid.iter().enumerate() {
            let fmin = self.f_min.get(i).map(|v| format!("{v:.15e}")).unwrap_or_default();
            w.write_record([format!("{g}"), format!("{:.15e}", self.f_ent[i]), fmin])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Fits<'a> {
            fit_ent: &'a PolyFit,
            fit_min: &'a Option<PolyFit>,
            points: usize,
        }
        Ok(serde_json::to_string_pretty(&Fits { fit_ent: &self.fit_ent, fit_min: &self.fit_min, points: self.gamma_grid.len() })?)
    }
}

/// One point of a sweep: the code, noise and recovery at strength `gamma`.
pub type SweepPoint = (QuantumCode, KrausChannel, RecoveryMap);

/// Evaluates the fidelities at every grid point in parallel and fits degree-5 polynomials.
pub fn fidelity_sweep<F>(grid: &[f64], worst_case: bool, build: F) -> Result<FidelityReport>
where
    F: Fn(f64) -> Result<SweepPoint> + Sync,
{
    let points: Vec<(f64, Option<f64>)> = grid
        .par_iter()
        .map(|&g| {
            let (code, noise, rec) = build(g)?;
            let t = LogicalTransfer::new(&code, &noise, &rec)?;
            let fmin = if worst_case { Some(worst_case_from_transfer(&t)?.value) } else { None };
            Ok((t.entanglement_fidelity(), fmin))
        })
        .collect::<Result<_>>()?;
    let f_ent: Vec<f64> = points.iter().map(|p| p.0).collect();
    let f_min: Vec<f64> = points.iter().filter_map(|p| p.1).collect();
    let fit_ent = fidelity_poly_fit(grid, &f_ent, 5)?;
    let fit_min = if worst_case { Some(fidelity_poly_fit(grid, &f_min, 5)?) } else { None };
    Ok(FidelityReport { gamma_grid: grid.to_vec(), f_ent, f_min, fit_ent, fit_min })
}

/// True when no value exceeds its predecessor by more than `tol`.
pub fn is_non_increasing(values: &[f64], tol: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + tol)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PetzComparison {
    pub f_petz: f64,
    pub f_syndrome: f64,
    /// `1 - F_ent` of the Petz map.
    pub eta_p: f64,
    pub eta_s: f64,
    pub holds: bool,
}

/// Compares the Petz map of `A` with the syndrome-based Petz map of the orthogonalized set.
pub fn petz_comparison(code: &QuantumCode, noise: &KrausChannel, orth: &OrthogonalizedNoise) -> Result<PetzComparison> {
    let f_petz = entanglement_fidelity(&petz(code, noise, crate::matkernel::RANK_TOL)?, noise, code)?;
    let f_syndrome = entanglement_fidelity(&syndrome_petz(orth)?, noise, code)?;
    let (eta_p, eta_s) = (1.0 - f_petz, 1.0 - f_syndrome);
    let holds = f_petz >= f_syndrome * f_syndrome - INEQUALITY_SLACK && 2.0 * eta_s >= eta_p - INEQUALITY_SLACK;
    Ok(PetzComparison { f_petz, f_syndrome, eta_p, eta_s, holds })
}

/// Worst-case fidelity of the polar recovery next to `min_mu (1/d^2) sum_k |<mu|E_k^dag E_k|mu>|^2`.
pub fn polar_bound_diagnostic(code: &QuantumCode, noise: &KrausChannel, orth: &OrthogonalizedNoise) -> Result<(f64, f64)> {
    let lhs = worst_case_fidelity(&polar_recovery(orth)?, noise, code)?.value;
    let d = orth.d();
    let rhs = (0..d)
        .map(|mu| {
            orth.records.iter().map(|r| r.m_tilde_logical()[(mu, mu)].norm_sqr()).sum::<f64>() / (d * d) as f64
        })
        .fold(f64::INFINITY, f64::min);
    Ok((lhs, rhs))
}

/// `<m_L| R(A(|m_L><m_L|)) |m_L>`.
pub fn codespace_fidelity(code: &QuantumCode, noise: &KrausChannel, recovery: &RecoveryMap, m: usize) -> Result<f64> {
    let v = code.codeword(m);
    let out = recovery.apply(&noise.apply(&outer(&v, &v))?)?;
    Ok((v.adjoint() * out * &v)[(0, 0)].re)
}

/// Qubit (1-based, leftmost first) that carries the logical input of the encoder.
pub const READOUT_QUBIT: usize = 2;

/// Probability of reading `m` on the input qubit after `U^dag R A U` acts on `|0 m 0 0>`.
pub fn logical_readout_fidelity(
    code: &QuantumCode,
    noise: &KrausChannel,
    recovery: &RecoveryMap,
    encoder: &ComplexMatrix,
    m: usize,
) -> Result<f64> {
    let n = code.n;
    if n < READOUT_QUBIT || m > 1 {
        return Err(Error::TruthTableMismatch(format!("no readout of m = {m} on qubit {READOUT_QUBIT} of {n}")));
    }
    if encoder.nrows() != code.dim() || encoder.ncols() != code.dim() {
        return Err(Error::dims("encoder", code.dim(), encoder.nrows()));
    }
    let shift = n - READOUT_QUBIT;
    let input = crate::matkernel::basis_vector(code.dim(), m << shift);
    let rho = encoder * outer(&input, &input) * encoder.adjoint();
    encoder_marginal(code, encoder, &recovery.apply(&noise.apply(&rho)?)?, m)
}

/// Decodes `rho` with `encoder^dag` and returns the probability that the input qubit reads `m`.
///
/// The encoder must send `|0 b 0 0>` (input qubit `b`, all others 0) to `|b_L>`.
pub fn encoder_marginal(code: &QuantumCode, encoder: &ComplexMatrix, rho: &ComplexMatrix, m: usize) -> Result<f64> {
    let n = code.n;
    if code.d != 2 || m > 1 || n < READOUT_QUBIT {
        return Err(Error::TruthTableMismatch(format!("readout needs a qubit code and m in {{0, 1}}, got m = {m}")));
    }
    if encoder.nrows() != code.dim() || encoder.ncols() != code.dim() {
        return Err(Error::dims("encoder", code.dim(), encoder.nrows()));
    }
    let shift = n - READOUT_QUBIT;
    for bit in 0..2 {
        let col = encoder.column(bit << shift).into_owned();
        let residual = (&col - code.codeword(bit)).camax();
        if residual > 1e-10 {
            return Err(Error::TruthTableMismatch(format!(
                "encoder input with qubit {READOUT_QUBIT} = {bit} misses the codeword by {residual:.3e}"
            )));
        }
    }
    let decoded = encoder.adjoint() * rho * encoder;
    Ok((0..code.dim()).filter(|b| (b >> shift) & 1 == m).map(|b| decoded[(b, b)].re).sum())
}

/// Weight of the maximally mixed noisy code state on the completion subspace.
pub fn completion_contribution(code: &QuantumCode, noise: &KrausChannel, recovery: &RecoveryMap) -> Result<f64> {
    let Some(q) = &recovery.completion else { return Ok(0.0) };
    let ap = noisy_code_projector(code, noise)?;
    Ok(trace(&(q * ap)).re / code.d as f64)
}

/// Smallest eigenvalue of `A(P) - E(P)` with `E(P) = sum_k (E_k P_k)(E_k P_k)^dag`.
pub fn noisy_projector_gap(code: &QuantumCode, noise: &KrausChannel, orth: &OrthogonalizedNoise) -> Result<f64> {
    let ap = noisy_code_projector(code, noise)?;
    let ep = orth.records.iter().fold(ComplexMatrix::zeros(code.dim(), code.dim()), |acc, r| acc + &r.e_op * r.e_op.adjoint());
    min_eigenvalue(&(ap - ep))
}
