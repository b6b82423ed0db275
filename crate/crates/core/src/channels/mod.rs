//! Noise channels as Kraus sets.

mod pauli;

pub use pauli::{enumerate_by_weight, Pauli, PauliAction, PauliString};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{identity, max_abs, min_eigenvalue, re, ComplexMatrix, ComplexVector, C64};

/// Tolerance for the completeness certificates of constructed channels.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// A single Kraus operator. Pauli strings stay in their signed-permutation form.
#[derive(Debug, Clone)]
pub enum KrausOp {
    Dense(ComplexMatrix),
    Pauli(PauliString),
}

impl KrausOp {
    pub fn dim(&self) -> usize {
        match self {
            KrausOp::Dense(m) => m.nrows(),
            KrausOp::Pauli(p) => p.dim(),
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        match self {
            KrausOp::Dense(m) => m.clone(),
            KrausOp::Pauli(p) => p.dense(),
        }
    }

    pub fn adjoint(&self) -> KrausOp {
        match self {
            KrausOp::Dense(m) => KrausOp::Dense(m.adjoint()),
            KrausOp::Pauli(p) => KrausOp::Pauli(p.adjoint()),
        }
    }

    pub fn apply_vec(&self, v: &ComplexVector) -> ComplexVector {
        match self {
            KrausOp::Dense(m) => m * v,
            KrausOp::Pauli(p) => p.action().apply_vec(v),
        }
    }

    /// `K * m`.
    pub fn left_mul(&self, m: &ComplexMatrix) -> ComplexMatrix {
        match self {
            KrausOp::Dense(k) => k * m,
            KrausOp::Pauli(p) => p.action().left_mul(m),
        }
    }

    /// Accumulates `K rho K^dag` into `acc`.
    pub fn conjugate_into(&self, rho: &ComplexMatrix, acc: &mut ComplexMatrix) {
        match self {
            KrausOp::Dense(k) => *acc += k * rho * k.adjoint(),
            KrausOp::Pauli(p) => p.action().conjugate_into(rho, acc),
        }
    }

    pub fn conjugate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        self.conjugate_into(rho, &mut out);
        out
    }

    /// `K^dag K`.
    pub fn gram(&self) -> ComplexMatrix {
        match self {
            KrausOp::Dense(k) => k.adjoint() * k,
            KrausOp::Pauli(p) => identity(p.dim()) * re(p.coefficient * p.coefficient),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match self {
            KrausOp::Dense(k) => k.norm(),
            KrausOp::Pauli(p) => p.coefficient.abs() * (p.dim() as f64).sqrt(),
        }
    }

    /// Operator product `self * other`, staying in Pauli form when both are Pauli.
    pub fn mul(&self, other: &KrausOp) -> Result<KrausOp> {
        if self.dim() != other.dim() {
            return Err(Error::dims("KrausOp::mul", self.dim(), other.dim()));
        }
        Ok(match (self, other) {
            (KrausOp::Pauli(a), KrausOp::Pauli(b)) => KrausOp::Pauli(a.mul(b)?),
            (a, KrausOp::Dense(b)) => KrausOp::Dense(a.left_mul(b)),
            (KrausOp::Dense(a), KrausOp::Pauli(b)) => KrausOp::Dense(a * b.dense()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TpClass {
    TracePreserving,
    TraceNonIncreasing,
}

#[derive(Debug, Clone)]
pub struct KrausChannel {
    pub ops: Vec<KrausOp>,
    pub labels: Vec<String>,
    pub dim: usize,
    pub tp_class: TpClass,
}

impl KrausChannel {
    /// Builds a channel and certifies its completeness class.
    pub fn new(ops: Vec<KrausOp>, labels: Vec<String>, tp_class: TpClass) -> Result<Self> {
        let ch = Self::new_unchecked(ops, labels, tp_class)?;
        ch.certify()?;
        Ok(ch)
    }

    /// Shape checks only; used when the caller certifies separately.
    pub(crate) fn new_unchecked(ops: Vec<KrausOp>, labels: Vec<String>, tp_class: TpClass) -> Result<Self> {
        let dim = ops.first().map(KrausOp::dim).unwrap_or(0);
        if let Some(bad) = ops.iter().find(|op| op.dim() != dim) {
            return Err(Error::dims("KrausChannel", dim, bad.dim()));
        }
        if labels.len() != ops.len() {
            return Err(Error::dims("KrausChannel labels", ops.len(), labels.len()));
        }
        Ok(KrausChannel { ops, labels, dim, tp_class })
    }

    pub fn identity(dim: usize) -> Self {
        KrausChannel {
            ops: vec![KrausOp::Dense(identity(dim))],
            labels: vec!["I".into()],
            dim,
            tp_class: TpClass::TracePreserving,
        }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `sum_k A_k^dag A_k`.
    pub fn completeness_sum(&self) -> ComplexMatrix {
        let mut pauli_weight = 0.0;
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for op in &self.ops {
            match op {
                KrausOp::Pauli(p) => pauli_weight += p.coefficient * p.coefficient,
                dense => acc += dense.gram(),
            }
        }
        acc + identity(self.dim) * re(pauli_weight)
    }

    fn certify(&self) -> Result<()> {
        let sum = self.completeness_sum();
        match self.tp_class {
            TpClass::TracePreserving => {
                let residual = max_abs(&(sum - identity(self.dim)));
                if residual >= COMPLETENESS_TOL {
                    return Err(Error::ToleranceViolation {
                        certificate: "trace preservation",
                        residual,
                        tol: COMPLETENESS_TOL,
                    });
                }
            }
            TpClass::TraceNonIncreasing => {
                let min = min_eigenvalue(&(identity(self.dim) - sum))?;
                if min < -COMPLETENESS_TOL {
                    return Err(Error::ToleranceViolation {
                        certificate: "trace non-increase",
                        residual: -min,
                        tol: COMPLETENESS_TOL,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply(self, rho)
    }
}

pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::OutOfRange { what: "gamma", value: gamma });
    }
    let z = C64::new(0.0, 0.0);
    let d0 = ComplexMatrix::from_row_slice(2, 2, &[re(1.0), z, z, re((1.0 - gamma).sqrt())]);
    let d1 = ComplexMatrix::from_row_slice(2, 2, &[z, re(gamma.sqrt()), z, z]);
    Ok(KrausChannel {
        ops: vec![KrausOp::Dense(d0), KrausOp::Dense(d1)],
        labels: vec!["D_0".into(), "D_1".into()],
        dim: 2,
        tp_class: TpClass::TracePreserving,
    })
}

/// `single^{(x) n}`, first factor on qubit 1. Labels concatenate the per-factor
/// suffixes after a shared `prefix_` (so `D_0`, `D_1` give `D_0100`, ...).
pub fn n_fold_product(single: &KrausChannel, n: usize) -> Result<KrausChannel> {
    if single.dim != 2 {
        return Err(Error::dims("n_fold_product", 2, single.dim));
    }
    if n == 0 {
        return Err(Error::OutOfRange { what: "n", value: 0.0 });
    }
    let split: Vec<(&str, &str)> = single
        .labels
        .iter()
        .map(|l| l.rsplit_once('_').unwrap_or(("", l.as_str())))
        .collect();
    let prefix = split[0].0;
    let shared = split.iter().all(|(p, _)| *p == prefix);
    let mats: Vec<ComplexMatrix> = single.ops.iter().map(KrausOp::to_dense).collect();
    let k = mats.len();
    let total = k.pow(n as u32);
    let mut ops = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for code in 0..total {
        let digits: Vec<usize> = (0..n).map(|q| (code / k.pow((n - 1 - q) as u32)) % k).collect();
        let mut m = mats[digits[0]].clone();
        for &dgt in &digits[1..] {
            m = m.kronecker(&mats[dgt]);
        }
        ops.push(KrausOp::Dense(m));
        labels.push(if shared && !prefix.is_empty() {
            let suffix: String = digits.iter().map(|&dg| split[dg].1).collect();
            format!("{prefix}_{suffix}")
        } else {
            digits.iter().map(|&dg| single.labels[dg].as_str()).collect::<Vec<_>>().join("")
        });
    }
    Ok(KrausChannel { ops, labels, dim: 1 << n, tp_class: single.tp_class })
}

/// `AD(gamma)^{(x) n}` with labels `D_b1...bn`.
pub fn amplitude_damping_n(gamma: f64, n: usize) -> Result<KrausChannel> {
    n_fold_product(&amplitude_damping(gamma)?, n)
}

/// Independent single-qubit depolarizing noise on `n` qubits, one Pauli-string
/// Kraus operator per word, ordered by weight then lexicographically.
pub fn depolarizing(p: f64, n: usize) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { what: "p", value: p });
    }
    if n == 0 || n > 10 {
        return Err(Error::OutOfRange { what: "n", value: n as f64 });
    }
    let mut ops = Vec::with_capacity(1 << (2 * n));
    let mut labels = Vec::with_capacity(1 << (2 * n));
    for s in enumerate_by_weight(n) {
        let w = s.weight() as i32;
        let coef = ((p / 3.0).powi(w) * (1.0 - p).powi(n as i32 - w)).sqrt();
        labels.push(s.word());
        ops.push(KrausOp::Pauli(s.with_coefficient(coef)));
    }
    let ch = KrausChannel { ops, labels, dim: 1 << n, tp_class: TpClass::TracePreserving };
    ch.certify()?;
    Ok(ch)
}

pub fn apply(channel: &KrausChannel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.nrows() != channel.dim || rho.ncols() != channel.dim {
        return Err(Error::dims("apply", channel.dim, rho.nrows()));
    }
    let mut out = ComplexMatrix::zeros(channel.dim, channel.dim);
    for op in &channel.ops {
        op.conjugate_into(rho, &mut out);
    }
    Ok(out)
}

/// Kraus set `{B_j A_k}` of `second o first`, labelled `b*a`. With `prune`,
/// products with Frobenius norm below 1e-12 are dropped.
pub fn compose(second: &KrausChannel, first: &KrausChannel, prune: bool) -> Result<KrausChannel> {
    if second.dim != first.dim {
        return Err(Error::dims("compose", first.dim, second.dim));
    }
    let mut ops = Vec::with_capacity(second.len() * first.len());
    let mut labels = Vec::with_capacity(second.len() * first.len());
    for (b, lb) in second.ops.iter().zip(&second.labels) {
        for (a, la) in first.ops.iter().zip(&first.labels) {
            let prod = b.mul(a)?;
            if prune && prod.frobenius_norm() < 1e-12 {
                continue;
            }
            ops.push(prod);
            labels.push(format!("{lb}*{la}"));
        }
    }
    let tp_class = if second.tp_class == TpClass::TracePreserving && first.tp_class == TpClass::TracePreserving {
        TpClass::TracePreserving
    } else {
        TpClass::TraceNonIncreasing
    };
    Ok(KrausChannel { ops, labels, dim: first.dim, tp_class })
}

/// Damping probability after a delay `t` on a qubit with relaxation time `t1`.
pub fn gamma_from_delay(t: f64, t1: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::OutOfRange { what: "t", value: t });
    }
    if !(t1 > 0.0) {
        return Err(Error::OutOfRange { what: "T1", value: t1 });
    }
    Ok(-(-t / t1).exp_m1())
}

/// Weight of a damping label `D_0101` (number of damped qubits).
pub fn damping_weight(label: &str) -> Option<usize> {
    let bits = label.strip_prefix("D_")?;
    bits.chars().all(|c| c == '0' || c == '1').then(|| bits.chars().filter(|&c| c == '1').count())
}
