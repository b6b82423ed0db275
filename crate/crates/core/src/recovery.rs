//! Recovery maps: Petz, syndrome-based Petz, polar, Leung and stabilizer lookup.
//!
//! Every builder returns a [`RecoveryMap`] whose Kraus set satisfies
//! `sum R^dag R <= I`. Maps that are not trace preserving carry a completion
//! projector onto the complement of that sum's support, applied as identity.

use std::io::Write;

use serde::Serialize;

use crate::channels::{KrausChannel, KrausOp, PauliString, TpClass};
use crate::codes::{QuantumCode, StabilizerGroup};
use crate::error::{Error, Result};
use crate::matkernel::{
    cutoff, hermitian_eig, identity, kron, max_abs, max_eigenvalue, partial_trace_logical, polar_decompose, psd_power,
    re, support_projector, ComplexMatrix, RANK_TOL,
};
use crate::orthogonalizer::{label_weight, orthogonalize, OrthogonalizeOptions, OrthogonalizedNoise};

/// `sum R^dag R <= I` must hold to this tolerance.
pub const SUBNORMAL_TOL: f64 = 1e-10;
/// With the completion included the sum must equal `I` to this tolerance.
pub const COMPLETE_TOL: f64 = 1e-9;
/// Eigenspace tolerance used by the syndrome table.
pub const EIGENSPACE_TOL: f64 = 1e-9;

/// QEC matrix `M[(k, mu), (l, nu)] = <mu_L| A_k^dag A_l |nu_L>`, composite index `k * d + mu`.
#[derive(Debug, Clone)]
pub struct QecMatrix {
    pub d: usize,
    pub n_ops: usize,
    pub entries: ComplexMatrix,
}

impl QecMatrix {
    /// Block `(k, l)` as a `d x d` matrix.
    pub fn block(&self, k: usize, l: usize) -> ComplexMatrix {
        self.entries.view((k * self.d, l * self.d), (self.d, self.d)).into_owned()
    }

    /// Largest entry outside the diagonal `k = l` blocks.
    pub fn off_block_max(&self) -> f64 {
        let d = self.d;
        let mut worst = 0.0f64;
        for i in 0..self.entries.nrows() {
            for j in 0..self.entries.ncols() {
                if i / d != j / d {
                    worst = worst.max(self.entries[(i, j)].norm());
                }
            }
        }
        worst
    }
}

fn qec_from_images(d: usize, images: &[ComplexMatrix]) -> QecMatrix {
    let dim = images.first().map(|m| m.nrows()).unwrap_or(0);
    let mut y = ComplexMatrix::zeros(dim, d * images.len());
    for (k, img) in images.iter().enumerate() {
        y.columns_mut(k * d, d).copy_from(img);
    }
    QecMatrix { d, n_ops: images.len(), entries: y.adjoint() * y }
}

pub fn qec_matrix(code: &QuantumCode, ops: &[KrausOp]) -> Result<QecMatrix> {
    if let Some(bad) = ops.iter().find(|op| op.dim() != code.dim()) {
        return Err(Error::dims("qec_matrix", code.dim(), bad.dim()));
    }
    let images: Vec<_> = ops.iter().map(|op| op.left_mul(&code.codewords)).collect();
    Ok(qec_from_images(code.d, &images))
}

/// The orthogonalized QEC matrix `Mt`, built from the records' `E_k P_k C`.
pub fn qec_matrix_orth(orth: &OrthogonalizedNoise) -> QecMatrix {
    let images: Vec<_> = orth.records.iter().map(|r| r.image.clone()).collect();
    qec_from_images(orth.d(), &images)
}

/// Commutator norms for the Petz optimality condition.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OptimalityDiagnostics {
    /// `|[M, Tr_L(sqrt M) (x) I_d]|_F`.
    pub natural: f64,
    /// `|[M, Tr_L(sqrt M (x) I_d)]|_F`, which reduces to `d |[M, sqrt M]|` and vanishes identically.
    pub literal: f64,
}

pub fn optimality_diagnostics(m: &QecMatrix) -> Result<OptimalityDiagnostics> {
    let sqrt_m = psd_power(&m.entries, 0.5, RANK_TOL)?;
    let reduced = partial_trace_logical(&sqrt_m, m.d, m.n_ops)?;
    let lifted = kron(&reduced, &identity(m.d));
    let commutator = |a: &ComplexMatrix, b: &ComplexMatrix| (a * b - b * a).norm();
    Ok(OptimalityDiagnostics {
        natural: commutator(&m.entries, &lifted),
        literal: commutator(&m.entries, &(&sqrt_m * re(m.d as f64))),
    })
}

pub fn optimality_check(m: &QecMatrix) -> Result<f64> {
    Ok(optimality_diagnostics(m)?.natural)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RecoveryKind {
    Petz,
    SyndromePetz,
    PolarRE,
    Leung,
    StabilizerLookup,
    Restricted,
}

/// Kraus operators either stored densely or as `left * core_k * right`.
#[derive(Debug, Clone)]
pub enum KrausSet {
    Dense(Vec<ComplexMatrix>),
    Factored { left: ComplexMatrix, cores: Vec<KrausOp>, right: ComplexMatrix },
}

#[derive(Debug, Clone)]
pub struct RecoveryMap {
    pub kind: RecoveryKind,
    pub ops: KrausSet,
    pub labels: Vec<String>,
    /// Projector applied as an extra Kraus operator; `None` for trace-preserving sets.
    pub completion: Option<ComplexMatrix>,
    pub dim: usize,
    /// Condition number of the operator inverted to build the set, 1 when nothing was inverted.
    /// Certificates allow roundoff of `eps * condition` on top of their fixed tolerances.
    pub condition: f64,
}

impl RecoveryMap {
    fn with_completion(kind: RecoveryKind, ops: KrausSet, labels: Vec<String>, dim: usize, condition: f64) -> Result<Self> {
        let mut map = RecoveryMap { kind, ops, labels, completion: None, dim, condition };
        let sum = map.completeness_sum();
        let complement = identity(dim) - support_projector(&sum, RANK_TOL)?;
        if max_abs(&complement) > RANK_TOL {
            map.completion = Some(complement);
        }
        map.certify()?;
        Ok(map)
    }

    fn roundoff(&self, tol: f64) -> f64 {
        tol.max(f64::EPSILON * self.condition)
    }

    pub fn len(&self) -> usize {
        match &self.ops {
            KrausSet::Dense(v) => v.len(),
            KrausSet::Factored { cores, .. } => cores.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dense Kraus operators, completion excluded.
    pub fn kraus_ops(&self) -> Vec<ComplexMatrix> {
        match &self.ops {
            KrausSet::Dense(v) => v.clone(),
            KrausSet::Factored { left, cores, right } => cores.iter().map(|k| left * k.left_mul(right)).collect(),
        }
    }

    pub fn kraus_op(&self, label: &str) -> Option<ComplexMatrix> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(match &self.ops {
            KrausSet::Dense(v) => v[i].clone(),
            KrausSet::Factored { left, cores, right } => left * cores[i].left_mul(right),
        })
    }

    /// `sum_k R_k rho R_k^dag` without the completion term.
    pub fn apply_without_completion(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::dims("apply_recovery", self.dim, rho.nrows()));
        }
        Ok(match &self.ops {
            KrausSet::Dense(v) => {
                let mut out = ComplexMatrix::zeros(self.dim, self.dim);
                for r in v {
                    out += r * rho * r.adjoint();
                }
                out
            }
            KrausSet::Factored { left, cores, right } => {
                let x = right * rho * right.adjoint();
                let mut y = ComplexMatrix::zeros(self.dim, self.dim);
                for k in cores {
                    k.conjugate_into(&x, &mut y);
                }
                left * y * left.adjoint()
            }
        })
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = self.apply_without_completion(rho)?;
        if let Some(q) = &self.completion {
            out += q * rho * q;
        }
        Ok(out)
    }

    /// `sum_k R_k^dag R_k`, completion excluded.
    pub fn completeness_sum(&self) -> ComplexMatrix {
        match &self.ops {
            KrausSet::Dense(v) => v.iter().fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, r| acc + r.adjoint() * r),
            KrausSet::Factored { left, cores, right } => {
                let ll = left.adjoint() * left;
                let mut y = ComplexMatrix::zeros(self.dim, self.dim);
                for k in cores {
                    k.adjoint().conjugate_into(&ll, &mut y);
                }
                // Hermitian by construction; symmetrize away the roundoff that
                // an ill-conditioned A(P)^{-1/2} amplifies.
                let sum = right.adjoint() * y * right;
                (&sum + sum.adjoint()) * re(0.5)
            }
        }
    }

    pub fn without_completion(&self) -> RecoveryMap {
        RecoveryMap { completion: None, ..self.clone() }
    }

    /// Keeps the Kraus operators whose label passes `keep` and drops the completion.
    pub fn restricted(&self, keep: impl Fn(&str) -> bool) -> RecoveryMap {
        let all = self.kraus_ops();
        let (ops, labels): (Vec<_>, Vec<_>) =
            all.into_iter().zip(&self.labels).filter(|(_, l)| keep(l)).map(|(r, l)| (r, l.clone())).unzip();
        RecoveryMap { kind: RecoveryKind::Restricted, ops: KrausSet::Dense(ops), labels, completion: None, dim: self.dim, condition: self.condition }
    }

    /// Checks `sum R^dag R <= I` and, when a completion is present, that the total is `I`.
    pub fn certify(&self) -> Result<()> {
        let sum = self.completeness_sum();
        let excess = max_eigenvalue(&sum)? - 1.0;
        let tol = self.roundoff(SUBNORMAL_TOL);
        if excess > tol {
            return Err(Error::ToleranceViolation { certificate: "recovery is trace non-increasing", residual: excess, tol });
        }
        if let Some(q) = &self.completion {
            let residual = max_abs(&(sum + q - identity(self.dim)));
            let tol = self.roundoff(COMPLETE_TOL);
            if residual > tol {
                return Err(Error::ToleranceViolation { certificate: "completed recovery is trace preserving", residual, tol });
            }
        }
        Ok(())
    }

    /// The map as a Kraus channel, completion appended last under the label `completion`.
    pub fn as_channel(&self) -> KrausChannel {
        let mut ops: Vec<KrausOp> = self.kraus_ops().into_iter().map(KrausOp::Dense).collect();
        let mut labels = self.labels.clone();
        if let Some(q) = &self.completion {
            ops.push(KrausOp::Dense(q.clone()));
            labels.push("completion".into());
        }
        let tp = if self.completion.is_some() { TpClass::TracePreserving } else { TpClass::TraceNonIncreasing };
        KrausChannel::new_unchecked(ops, labels, tp).expect("recovery operators share one dimension")
    }
}

/// `A(P) = sum_i A_i P A_i^dag`.
pub fn noisy_code_projector(code: &QuantumCode, noise: &KrausChannel) -> Result<ComplexMatrix> {
    if noise.dim != code.dim() {
        return Err(Error::dims("noise on code", code.dim(), noise.dim));
    }
    let mut out = ComplexMatrix::zeros(code.dim(), code.dim());
    for op in &noise.ops {
        op.conjugate_into(&code.projector, &mut out);
    }
    Ok(out)
}

/// Petz map `{P A_i^dag A(P)^{-1/2}}`, pseudo-inverse on `supp A(P)`.
pub fn petz(code: &QuantumCode, noise: &KrausChannel, tol: f64) -> Result<RecoveryMap> {
    let ap = noisy_code_projector(code, noise)?;
    if max_abs(&ap) == 0.0 {
        return Err(Error::OutOfRange { what: "|A(P)|", value: 0.0 });
    }
    let eig = hermitian_eig(&ap)?;
    let top = eig.spectral_norm();
    let cut = cutoff(top, tol);
    if let Some(&min) = eig.eigenvalues.first().filter(|&&l| l < -cut) {
        return Err(Error::NegativeSpectrum { min_eigenvalue: min });
    }
    let smallest = eig.eigenvalues.iter().copied().find(|&l| l > cut).unwrap_or(top);
    let right = eig.map(|l| (l > cut).then(|| l.powf(-0.5)));
    let ops = KrausSet::Factored {
        left: code.projector.clone(),
        cores: noise.ops.iter().map(KrausOp::adjoint).collect(),
        right,
    };
    RecoveryMap::with_completion(RecoveryKind::Petz, ops, noise.labels.clone(), code.dim(), top / smallest)
}

/// `R_l = sum_{mu,nu} (Mt_ll^{-1/2})_{mu nu} |mu_L><nu_L| E_l^dag`, one operator per record.
fn syndrome_operators(orth: &OrthogonalizedNoise) -> Result<Vec<ComplexMatrix>> {
    let c = &orth.codewords;
    orth.records
        .iter()
        .map(|r| {
            // Scale first so the rank cutoff is relative to this record's weight.
            let scale = r.image.norm_squared();
            let g = r.m_tilde_logical() / re(scale);
            let coeff = psd_power(&g, -0.5, RANK_TOL)? / re(scale.sqrt());
            Ok(c * coeff * r.image.adjoint())
        })
        .collect()
}

pub fn syndrome_petz(orth: &OrthogonalizedNoise) -> Result<RecoveryMap> {
    RecoveryMap::with_completion(
        RecoveryKind::SyndromePetz,
        KrausSet::Dense(syndrome_operators(orth)?),
        orth.labels(),
        orth.dim(),
        1.0,
    )
}

/// Splits each Kraus operator as `R = G Pi` with `Pi = R^dag R` and `G` unitary.
pub fn factorize(map: &RecoveryMap) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>> {
    map.kraus_ops()
        .into_iter()
        .map(|r| {
            let (g, _) = polar_decompose(&r, RANK_TOL)?;
            Ok((g, r.adjoint() * r))
        })
        .collect()
}

/// `R_k = P_k U_k^dag`.
pub fn polar_recovery(orth: &OrthogonalizedNoise) -> Result<RecoveryMap> {
    polar_with_kind(orth, RecoveryKind::PolarRE)
}

fn polar_with_kind(orth: &OrthogonalizedNoise, kind: RecoveryKind) -> Result<RecoveryMap> {
    let ops: Vec<_> = orth.records.iter().map(|r| &r.p_support * r.u.adjoint()).collect();
    let projectors: Vec<_> = ops.iter().map(|r| r.adjoint() * r).collect();
    for (k, pk) in projectors.iter().enumerate() {
        let residual = max_abs(&(pk * pk - pk));
        if residual > SUBNORMAL_TOL {
            return Err(Error::ToleranceViolation { certificate: "polar syndrome projector is idempotent", residual, tol: SUBNORMAL_TOL });
        }
        for pl in &projectors[k + 1..] {
            let residual = max_abs(&(pk * pl));
            if residual > SUBNORMAL_TOL {
                return Err(Error::ToleranceViolation { certificate: "polar syndrome projectors are orthogonal", residual, tol: SUBNORMAL_TOL });
            }
        }
    }
    RecoveryMap::with_completion(kind, KrausSet::Dense(ops), orth.labels(), orth.dim(), 1.0)
}

/// Polar recovery over the no-error and weight-one operators only.
///
/// Fails with `SubspacesOverlap` unless those operators already map the code to
/// mutually orthogonal subspaces.
pub fn leung_recovery(code: &QuantumCode, noise: &KrausChannel, tol: f64) -> Result<RecoveryMap> {
    if noise.dim != code.dim() {
        return Err(Error::dims("leung_recovery", code.dim(), noise.dim));
    }
    let keep: Vec<usize> = (0..noise.len())
        .filter(|&i| label_weight(&noise.labels[i]).is_some_and(|w| w <= 1))
        .collect();
    let images: Vec<_> = keep.iter().map(|&i| noise.ops[i].left_mul(&code.codewords)).collect();
    for (a, ia) in keep.iter().zip(&images) {
        for (b, ib) in keep.iter().zip(&images) {
            if a >= b {
                continue;
            }
            let overlap = max_abs(&(ia.adjoint() * ib));
            if overlap > tol {
                return Err(Error::SubspacesOverlap {
                    first: noise.labels[*a].clone(),
                    second: noise.labels[*b].clone(),
                    overlap,
                });
            }
        }
    }
    let subset = KrausChannel::new_unchecked(
        keep.iter().map(|&i| noise.ops[i].clone()).collect(),
        keep.iter().map(|&i| noise.labels[i].clone()).collect(),
        TpClass::TraceNonIncreasing,
    )?;
    let labels = subset.labels.clone();
    let orth = orthogonalize(&subset, code, &OrthogonalizeOptions::with_order(&labels))?;
    polar_with_kind(&orth, RecoveryKind::Leung)
}

/// Standard decoder: for each syndrome apply the adjoint of the lightest listed error.
///
/// Ties go to the earlier error in `errors` after a stable sort by weight, so
/// a lexicographic input list yields a lexicographic tie-break. Syndromes no
/// listed error produces are projected without correction.
pub fn stabilizer_lookup_recovery(
    code: &QuantumCode,
    group: &StabilizerGroup,
    errors: &[PauliString],
) -> Result<RecoveryMap> {
    let n = group.n_qubits();
    if code.n != n {
        return Err(Error::dims("stabilizer_lookup_recovery", code.n, n));
    }
    let mut sorted: Vec<&PauliString> = errors.iter().collect();
    sorted.sort_by_key(|e| e.weight());
    let n_syndromes = 1usize << group.generators.len();
    let mut chosen: Vec<Option<&PauliString>> = vec![None; n_syndromes];
    for e in sorted {
        let s = group.syndrome(e);
        if chosen[s].is_none() {
            chosen[s] = Some(e);
        }
    }
    let mut ops = Vec::with_capacity(n_syndromes);
    let mut labels = Vec::with_capacity(n_syndromes);
    for (s, e) in chosen.iter().enumerate() {
        let proj = group.syndrome_projector(s);
        match e {
            Some(e) => {
                ops.push(e.adjoint().action().left_mul(&proj));
                labels.push(e.word());
            }
            None => {
                ops.push(proj);
                labels.push(format!("s{s}"));
            }
        }
    }
    RecoveryMap::with_completion(RecoveryKind::StabilizerLookup, KrausSet::Dense(ops), labels, code.dim(), 1.0)
}

/// How measurement eigenvalues become syndrome bits.
#[derive(Debug, Clone, Copy, Default)]
pub struct SyndromeConventions {
    /// Measure secondary check `i` only when primary bit `i` is set.
    pub conditioned_secondary: bool,
    /// Bit reported for eigenvalue `+1` on the primary checks (`-1` gives the other value).
    pub primary_plus: u8,
    pub secondary_plus: u8,
}

impl SyndromeConventions {
    /// Conditioned secondary checks reporting 1 on `+1`, as in the four-qubit table.
    pub fn leung() -> Self {
        SyndromeConventions { conditioned_secondary: true, primary_plus: 0, secondary_plus: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyndromeRow {
    pub error: String,
    pub primary: Vec<u8>,
    /// `None` when every primary bit is 0 and no secondary check runs.
    pub secondary: Option<Vec<u8>>,
    /// Index of the record in the orthogonalized set.
    pub recovery: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SyndromeTable {
    pub rows: Vec<SyndromeRow>,
}

impl SyndromeTable {
    /// CSV with columns `error, p1.., s1.., recovery`; skipped secondary bits are empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let np = self.rows.first().map(|r| r.primary.len()).unwrap_or(0);
        let ns = self.rows.iter().filter_map(|r| r.secondary.as_ref().map(Vec::len)).max().unwrap_or(np);
        let mut header = vec!["error".to_string()];
        header.extend((1..=np).map(|i| format!("p{i}")));
        header.extend((1..=ns).map(|i| format!("s{i}")));
        header.push("recovery".into());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.error.clone()];
            rec.extend(row.primary.iter().map(u8::to_string));
            match &row.secondary {
                Some(s) => rec.extend(s.iter().map(u8::to_string)),
                None => rec.extend(std::iter::repeat_n(String::new(), ns)),
            }
            rec.push(format!("G{}", row.recovery));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Eigenvalue (+1 or -1) of `op` on the span of `basis`, or `NotEigenspace`.
fn eigen_sign(label: &str, op: &PauliString, basis: &ComplexMatrix) -> Result<f64> {
    let applied = op.action().left_mul(basis);
    let plus = (&applied - basis).norm();
    let minus = (&applied + basis).norm();
    let (sign, residual) = if plus <= minus { (1.0, plus) } else { (-1.0, minus) };
    if residual > EIGENSPACE_TOL {
        return Err(Error::NotEigenspace { label: label.into(), operator: op.to_string(), residual });
    }
    Ok(sign)
}

/// Syndrome bits for the listed records from the eigenvalues of `primary` and `secondary` checks.
pub fn syndrome_table(
    orth: &OrthogonalizedNoise,
    errors: &[String],
    primary: &[PauliString],
    secondary: &[PauliString],
    conv: SyndromeConventions,
) -> Result<SyndromeTable> {
    let bit = |sign: f64, plus: u8| if sign > 0.0 { plus } else { 1 - plus };
    let mut rows: Vec<SyndromeRow> = Vec::new();
    for label in errors {
        let recovery = orth
            .records
            .iter()
            .position(|r| &r.label == label)
            .ok_or_else(|| Error::Parse(format!("no surviving record named `{label}`")))?;
        let basis = orth.records[recovery].image_basis();
        let p: Vec<u8> = primary
            .iter()
            .map(|op| eigen_sign(label, op, &basis).map(|s| bit(s, conv.primary_plus)))
            .collect::<Result<_>>()?;
        let flagged: Vec<bool> = p.iter().map(|&b| b != bit(1.0, conv.primary_plus)).collect();
        let secondary_bits = if flagged.iter().any(|&f| f) && !secondary.is_empty() {
            let mut s = Vec::with_capacity(secondary.len());
            for (i, op) in secondary.iter().enumerate() {
                let measured = !conv.conditioned_secondary || flagged.get(i).copied().unwrap_or(false);
                s.push(if measured { bit(eigen_sign(label, op, &basis)?, conv.secondary_plus) } else { 0 });
            }
            Some(s)
        } else {
            None
        };
        let row = SyndromeRow { error: label.clone(), primary: p, secondary: secondary_bits, recovery };
        if let Some(prev) = rows.iter().find(|r| r.primary == row.primary && r.secondary == row.secondary) {
            return Err(Error::AmbiguousSyndrome {
                first: prev.error.clone(),
                second: row.error.clone(),
                key: format!("{:?}/{:?}", row.primary, row.secondary),
            });
        }
        rows.push(row);
    }
    Ok(SyndromeTable { rows })
}

/// The four-qubit table: `ZZII, IIZZ` primary, `ZIII, IIIZ` secondary, weight <= 1 rows.
pub fn leung_syndrome_table(orth: &OrthogonalizedNoise) -> Result<SyndromeTable> {
    let parse = |w: &[&str]| w.iter().map(|s| s.parse()).collect::<Result<Vec<PauliString>>>();
    let errors: Vec<String> =
        ["D_0000", "D_1000", "D_0100", "D_0010", "D_0001"].iter().map(|s| s.to_string()).collect();
    syndrome_table(orth, &errors, &parse(&["ZZII", "IIZZ"])?, &parse(&["ZIII", "IIIZ"])?, SyndromeConventions::leung())
}
