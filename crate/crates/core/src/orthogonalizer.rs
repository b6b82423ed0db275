//! Sequential orthogonalization of the syndrome subspaces `A_k P`.
//!
//! Each operator is processed in the caller's order and has the images of all
//! earlier survivors projected out: `E_k P = A_k P - W_{k-1} A_k P` with
//! `W_{k-1} = sum_{i<k} U_i P_i U_i^dag`. All heavy lifting happens on the
//! `2^n x d` blocks `A_k C`, where `C` holds the codewords as columns.

use serde::Serialize;

use crate::channels::{damping_weight, KrausChannel, KrausOp, PauliString, TpClass};
use crate::codes::QuantumCode;
use crate::error::{Error, Result};
use crate::matkernel::{
    hermitian_eig, max_abs, min_eigenvalue, orthonormal_columns, polar_decompose, ComplexMatrix, RANK_TOL,
};

/// Relative norm below which `E_k P` counts as null.
pub const DROP_TOL: f64 = 1e-9;
/// Tolerance of every certificate checked before `orthogonalize` returns.
pub const CERT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct OrthRecord {
    pub label: String,
    /// Position of the originating operator in the noise channel.
    pub source_index: usize,
    /// `E_k P_k` as a full-space operator (equal to `E_k P` unless the support was overridden).
    pub e_op: ComplexMatrix,
    /// Polar unitary of `e_op`.
    pub u: ComplexMatrix,
    /// `P_k`, a projector inside the codespace.
    pub p_support: ComplexMatrix,
    /// `P_k E_k^dag E_k P_k`.
    pub m_tilde: ComplexMatrix,
    /// `E_k P_k C`, one column per codeword.
    pub image: ComplexMatrix,
    /// Orthonormal basis of `P_k` in codeword coordinates (`d x rank`).
    pub support_logical: ComplexMatrix,
    /// `A_k C`, kept for the `M_kk - Mt_kk` certificate.
    pub raw_image: ComplexMatrix,
}

impl OrthRecord {
    pub fn rank(&self) -> usize {
        self.support_logical.ncols()
    }

    /// `M_kk`-block of the orthogonalized QEC matrix in codeword coordinates.
    pub fn m_tilde_logical(&self) -> ComplexMatrix {
        self.image.adjoint() * &self.image
    }

    /// Orthonormal basis of the syndrome subspace `range(E_k P_k)`.
    pub fn image_basis(&self) -> ComplexMatrix {
        orthonormal_columns(&(&self.image * &self.support_logical), RANK_TOL).expect("Gram matrices are Hermitian")
    }

    /// `U_k P_k U_k^dag`, the projector onto the syndrome subspace.
    pub fn syndrome_projector(&self) -> ComplexMatrix {
        let b = self.image_basis();
        &b * b.adjoint()
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Certificates {
    /// `max_{k != l} |P_k E_k^dag E_l P_l|_F`.
    pub subspace_orthogonality: f64,
    /// `max_{k != l} |P_k U_k^dag U_l P_l|_F`.
    pub unitary_orthogonality: f64,
    /// `lambda_max(W) - 1`.
    pub w_excess: f64,
    /// `-min_k lambda_min(M_kk - Mt_kk)`.
    pub m_dominance: f64,
}

impl Certificates {
    pub fn check(&self, tol: f64) -> Result<()> {
        for (certificate, residual) in [
            ("syndrome subspace orthogonality", self.subspace_orthogonality),
            ("polar unitary orthogonality", self.unitary_orthogonality),
            ("W bounded by identity", self.w_excess),
            ("M_kk dominates Mt_kk", self.m_dominance),
        ] {
            if !(residual < tol) {
                return Err(Error::ToleranceViolation { certificate, residual, tol });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct OrthogonalizedNoise {
    pub records: Vec<OrthRecord>,
    /// `sum_k U_k P_k U_k^dag`.
    pub cumulative_w: ComplexMatrix,
    pub dropped: Vec<String>,
    pub certificates: Certificates,
    /// Codewords used to build the records.
    pub codewords: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct OrthogonalizeOptions {
    /// Processing order by label; `None` means [`default_order`].
    pub order: Option<Vec<String>>,
    pub drop_tol: f64,
    pub rank_tol: f64,
    pub cert_tol: f64,
    /// Replace `P_k` of the named record by a sub-projector of the codespace.
    pub support_overrides: Vec<(String, ComplexMatrix)>,
}

impl Default for OrthogonalizeOptions {
    fn default() -> Self {
        OrthogonalizeOptions {
            order: None,
            drop_tol: DROP_TOL,
            rank_tol: RANK_TOL,
            cert_tol: CERT_TOL,
            support_overrides: Vec::new(),
        }
    }
}

impl OrthogonalizeOptions {
    pub fn with_order<S: AsRef<str>>(order: &[S]) -> Self {
        OrthogonalizeOptions {
            order: Some(order.iter().map(|s| s.as_ref().to_string()).collect()),
            ..Default::default()
        }
    }

    pub fn with_override(mut self, label: &str, projector: ComplexMatrix) -> Self {
        self.support_overrides.push((label.to_string(), projector));
        self
    }
}

/// Error weight of a damping or Pauli label, if it is one of those.
pub fn label_weight(label: &str) -> Option<usize> {
    damping_weight(label).or_else(|| label.parse::<PauliString>().ok().map(|p| p.weight()))
}

/// No-error first, then ascending weight, lexicographic within a weight.
/// Channels with labels of unknown shape keep their own order.
pub fn default_order(noise: &KrausChannel) -> Vec<String> {
    let weights: Option<Vec<usize>> = noise.labels.iter().map(|l| label_weight(l)).collect();
    let mut labels = noise.labels.clone();
    if let Some(w) = weights {
        let mut idx: Vec<usize> = (0..labels.len()).collect();
        idx.sort_by(|&a, &b| w[a].cmp(&w[b]).then_with(|| noise.labels[a].cmp(&noise.labels[b])));
        labels = idx.into_iter().map(|i| noise.labels[i].clone()).collect();
    }
    labels
}

pub fn orthogonalize(
    noise: &KrausChannel,
    code: &QuantumCode,
    opts: &OrthogonalizeOptions,
) -> Result<OrthogonalizedNoise> {
    let orth = orthogonalize_uncertified(noise, code, opts)?;
    orth.certificates.check(opts.cert_tol)?;
    Ok(orth)
}

/// Same as [`orthogonalize`] but returns the residuals without enforcing them.
pub fn orthogonalize_uncertified(
    noise: &KrausChannel,
    code: &QuantumCode,
    opts: &OrthogonalizeOptions,
) -> Result<OrthogonalizedNoise> {
    let dim = code.dim();
    if noise.dim != dim {
        return Err(Error::dims("orthogonalize", dim, noise.dim));
    }
    let order = match &opts.order {
        Some(o) => o.clone(),
        None => default_order(noise),
    };
    let c = &code.codewords;

    let overrides: Vec<(String, ComplexMatrix)> = opts
        .support_overrides
        .iter()
        .map(|(label, proj)| logical_override(code, proj).map(|m| (label.clone(), m)))
        .collect::<Result<_>>()?;

    let mut seen = vec![false; noise.len()];
    let mut basis = ComplexMatrix::zeros(dim, 0);
    let mut records = Vec::new();
    let mut dropped = Vec::new();

    for label in &order {
        let idx = noise
            .index_of(label)
            .ok_or_else(|| Error::Parse(format!("order names unknown operator `{label}`")))?;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::Parse(format!("order lists `{label}` twice")));
        }
        let op: &KrausOp = &noise.ops[idx];
        let raw = op.left_mul(c);
        let raw_norm = raw.norm();
        let ec = if basis.ncols() > 0 { &raw - &basis * (basis.adjoint() * &raw) } else { raw.clone() };
        if raw_norm == 0.0 || ec.norm() <= opts.drop_tol * raw_norm {
            dropped.push(label.clone());
            continue;
        }

        let scale = raw_norm * raw_norm;
        let mut mt = ec.adjoint() * &ec / crate::matkernel::re(scale);
        if let Some((_, ov)) = overrides.iter().find(|(l, _)| l == label) {
            mt = ov * mt * ov;
        }
        let support = hermitian_eig(&mt)?.support_basis(opts.rank_tol);
        if support.ncols() == 0 {
            dropped.push(label.clone());
            continue;
        }
        let proj_logical = &support * support.adjoint();
        let image = &ec * &proj_logical;

        // New orthonormal directions spanning range(E_k P_k).
        let new_dirs = orthonormal_columns(&(&image * &support), opts.rank_tol)?;
        let old = basis.ncols();
        basis = basis.resize_horizontally(old + new_dirs.ncols(), crate::matkernel::ZERO);
        basis.columns_mut(old, new_dirs.ncols()).copy_from(&new_dirs);

        let e_op = &image * c.adjoint();
        let (u, _) = polar_decompose(&e_op, opts.rank_tol)?;
        let p_support = c * &proj_logical * c.adjoint();
        let m_tilde = e_op.adjoint() * &e_op;
        records.push(OrthRecord {
            label: label.clone(),
            source_index: idx,
            e_op,
            u,
            p_support,
            m_tilde,
            image,
            support_logical: support,
            raw_image: raw,
        });
    }

    let cumulative_w = if basis.ncols() > 0 { &basis * basis.adjoint() } else { ComplexMatrix::zeros(dim, dim) };
    let certificates = certify(&records, &basis, c)?;
    Ok(OrthogonalizedNoise { records, cumulative_w, dropped, certificates, codewords: c.clone() })
}

fn logical_override(code: &QuantumCode, proj: &ComplexMatrix) -> Result<ComplexMatrix> {
    if proj.nrows() != code.dim() || proj.ncols() != code.dim() {
        return Err(Error::dims("support override", code.dim(), proj.nrows()));
    }
    let logical = code.codewords.adjoint() * proj * &code.codewords;
    let lifted = &code.codewords * &logical * code.codewords.adjoint();
    let residual = max_abs(&(&lifted - proj)).max(max_abs(&(&logical * &logical - &logical)));
    if residual > 1e-9 {
        return Err(Error::ToleranceViolation {
            certificate: "override is a projector inside the codespace",
            residual,
            tol: 1e-9,
        });
    }
    Ok(logical)
}

fn certify(records: &[OrthRecord], basis: &ComplexMatrix, c: &ComplexMatrix) -> Result<Certificates> {
    let mut cert = Certificates::default();
    let supported: Vec<ComplexMatrix> = records.iter().map(|r| &r.image * &r.support_logical).collect();
    let rotated: Vec<ComplexMatrix> = records.iter().map(|r| &r.u * c * &r.support_logical).collect();
    for k in 0..records.len() {
        for l in 0..records.len() {
            if k == l {
                continue;
            }
            cert.subspace_orthogonality = cert.subspace_orthogonality.max((supported[k].adjoint() * &supported[l]).norm());
            cert.unitary_orthogonality =
                cert.unitary_orthogonality.max((rotated[k].adjoint() * &rotated[l]).norm());
        }
    }
    if basis.ncols() > 0 {
        let gram = basis.adjoint() * basis;
        cert.w_excess = (crate::matkernel::max_eigenvalue(&gram)? - 1.0).max(0.0);
    }
    for r in records {
        let diff = r.raw_image.adjoint() * &r.raw_image - r.image.adjoint() * &r.image;
        cert.m_dominance = cert.m_dominance.max((-min_eigenvalue(&diff)?).max(0.0));
    }
    Ok(cert)
}

impl OrthogonalizedNoise {
    pub fn d(&self) -> usize {
        self.codewords.ncols()
    }

    pub fn dim(&self) -> usize {
        self.codewords.nrows()
    }

    pub fn labels(&self) -> Vec<String> {
        self.records.iter().map(|r| r.label.clone()).collect()
    }

    pub fn record(&self, label: &str) -> Option<&OrthRecord> {
        self.records.iter().find(|r| r.label == label)
    }

    /// `Q = I - W`, rebuilt on demand.
    pub fn q_projector(&self) -> ComplexMatrix {
        crate::matkernel::identity(self.dim()) - &self.cumulative_w
    }

    /// Keeps only the records accepted by `keep`; certificates are recomputed.
    pub fn restricted(&self, keep: impl Fn(&OrthRecord) -> bool) -> Result<OrthogonalizedNoise> {
        let records: Vec<OrthRecord> = self.records.iter().filter(|r| keep(r)).cloned().collect();
        let dirs: Vec<_> = records
            .iter()
            .flat_map(|r| r.image_basis().column_iter().map(|c| c.into_owned()).collect::<Vec<_>>())
            .collect();
        let basis = if dirs.is_empty() { ComplexMatrix::zeros(self.dim(), 0) } else { ComplexMatrix::from_columns(&dirs) };
        let cumulative_w = &basis * basis.adjoint();
        let certificates = certify(&records, &basis, &self.codewords)?;
        let mut dropped = self.dropped.clone();
        dropped.extend(self.records.iter().filter(|r| !keep(r)).map(|r| r.label.clone()));
        Ok(OrthogonalizedNoise { records, cumulative_w, dropped, certificates, codewords: self.codewords.clone() })
    }

    /// The trace non-increasing map `{E_k P_k}`.
    pub fn as_channel(&self) -> KrausChannel {
        as_channel(self)
    }
}

pub fn as_channel(orth: &OrthogonalizedNoise) -> KrausChannel {
    KrausChannel::new_unchecked(
        orth.records.iter().map(|r| KrausOp::Dense(r.e_op.clone())).collect(),
        orth.labels(),
        TpClass::TraceNonIncreasing,
    )
    .expect("records share one dimension")
}

/// Labels of the surviving records with error weight at most `weight_cap`.
pub fn correctable_set(orth: &OrthogonalizedNoise, weight_cap: usize) -> Vec<String> {
    orth.records
        .iter()
        .filter(|r| label_weight(&r.label).is_some_and(|w| w <= weight_cap))
        .map(|r| r.label.clone())
        .collect()
}
