//! Code constructions: the Leung and biconvex four-qubit codes, stabilizer
//! codespaces, code files and encoding unitaries.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::PauliString;
use crate::error::{Error, Result};
use crate::matkernel::{
    hermitian_eig, identity, max_abs, re, unitarity_residual, ComplexMatrix, ComplexVector, C64,
};

pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct QuantumCode {
    pub n: usize,
    pub d: usize,
    /// Codewords as the columns of a `2^n x d` isometry.
    pub codewords: ComplexMatrix,
    pub projector: ComplexMatrix,
}

impl QuantumCode {
    pub fn new(n: usize, codewords: ComplexMatrix) -> Result<Self> {
        if codewords.nrows() != 1 << n {
            return Err(Error::dims("QuantumCode", 1usize << n, codewords.nrows()));
        }
        let d = codewords.ncols();
        let residual = max_abs(&(codewords.adjoint() * &codewords - identity(d)));
        if residual >= ORTHONORMAL_TOL {
            return Err(Error::NonOrthonormal { residual });
        }
        let projector = &codewords * codewords.adjoint();
        Ok(QuantumCode { n, d, codewords, projector })
    }

    pub fn from_vectors(n: usize, vectors: &[ComplexVector]) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Parse("a code needs at least one codeword".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != 1 << n) {
            return Err(Error::dims("codeword", 1usize << n, v.len()));
        }
        Self::new(n, ComplexMatrix::from_columns(vectors))
    }

    pub fn dim(&self) -> usize {
        self.codewords.nrows()
    }

    pub fn codeword(&self, m: usize) -> ComplexVector {
        self.codewords.column(m).into_owned()
    }

    /// `|a_L><b_L|` as a full-space operator.
    pub fn logical_operator(&self, a: usize, b: usize) -> ComplexMatrix {
        self.codewords.column(a) * self.codewords.column(b).adjoint()
    }
}

fn ket(n: usize, amplitudes: &[(usize, f64)]) -> ComplexVector {
    let mut v = ComplexVector::zeros(1 << n);
    for &(idx, a) in amplitudes {
        v[idx] += re(a);
    }
    v
}

/// `|0_L> = (|0000> + |1111>)/sqrt2`, `|1_L> = (|0011> + |1100>)/sqrt2`.
pub fn leung_code() -> QuantumCode {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = ket(4, &[(0b0000, s), (0b1111, s)]);
    let one = ket(4, &[(0b0011, s), (0b1100, s)]);
    QuantumCode::from_vectors(4, &[zero, one]).expect("Leung codewords are orthonormal")
}

/// Largest damping strength for which the biconvex `|0000>` amplitude is real.
pub const BICONVEX_GAMMA_MAX: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn biconvex_amplitudes(gamma: f64) -> Result<(f64, f64)> {
    if !(0.0..BICONVEX_GAMMA_MAX).contains(&gamma) {
        return Err(Error::OutOfRange { what: "gamma", value: gamma });
    }
    let a = (1.0 - 1.0 / (2.0 * (1.0 - gamma * gamma))).sqrt();
    let b = 1.0 / (std::f64::consts::SQRT_2 * (1.0 - gamma));
    Ok((a, b))
}

/// Norm of the biconvex `|0_L>` before renormalization; exceeds 1 for `gamma > 0`.
pub fn biconvex_raw_norm(gamma: f64) -> Result<f64> {
    let (a, b) = biconvex_amplitudes(gamma)?;
    Ok(a.hypot(b))
}

/// The damping-adapted four-qubit code; `|0_L>` is renormalized after construction.
pub fn biconvex_code(gamma: f64) -> Result<QuantumCode> {
    let (a, b) = biconvex_amplitudes(gamma)?;
    let norm = a.hypot(b);
    let zero = ket(4, &[(0b0000, a / norm), (0b1111, b / norm)]);
    let one = ket(4, &[(0b0011, 0.5), (0b1100, 0.5), (0b0101, 0.5), (0b1010, -0.5)]);
    QuantumCode::from_vectors(4, &[zero, one])
}

#[derive(Debug, Clone)]
pub struct StabilizerGroup {
    pub generators: Vec<PauliString>,
}

impl StabilizerGroup {
    pub fn new(generators: Vec<PauliString>) -> Result<Self> {
        let n = generators.first().map(PauliString::n_qubits).unwrap_or(0);
        for (i, g) in generators.iter().enumerate() {
            if g.n_qubits() != n {
                return Err(Error::InconsistentGroup(format!("generator {g} has the wrong length")));
            }
            if g.is_minus_identity() {
                return Err(Error::InconsistentGroup("-I cannot stabilize anything".into()));
            }
            if g.phase % 2 == 1 {
                return Err(Error::InconsistentGroup(format!("generator {g} is not Hermitian")));
            }
            if let Some(h) = generators[..i].iter().find(|h| !h.commutes_with(g)) {
                return Err(Error::InconsistentGroup(format!("{h} and {g} anticommute")));
            }
        }
        Ok(StabilizerGroup { generators })
    }

    pub fn parse(words: &[&str]) -> Result<Self> {
        Self::new(words.iter().map(|w| w.parse()).collect::<Result<Vec<_>>>()?)
    }

    pub fn n_qubits(&self) -> usize {
        self.generators.first().map(PauliString::n_qubits).unwrap_or(0)
    }

    /// Syndrome bits of a Pauli error: bit `i` is 1 when it anticommutes with generator `i`.
    pub fn syndrome(&self, error: &PauliString) -> usize {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| !g.commutes_with(error))
            .fold(0, |s, (i, _)| s | (1 << i))
    }

    /// Projector onto the syndrome-`s` eigenspace, `prod_i (I + (-1)^{s_i} S_i)/2`.
    pub fn syndrome_projector(&self, s: usize) -> ComplexMatrix {
        let dim = 1 << self.n_qubits();
        let mut proj = identity(dim);
        for (i, g) in self.generators.iter().enumerate() {
            let sign = if s >> i & 1 == 1 { -1.0 } else { 1.0 };
            let factor = (identity(dim) + g.dense() * re(sign)) * re(0.5);
            proj *= factor;
        }
        proj
    }
}

/// The six-qubit degenerate code's generators.
pub fn six_qubit_group() -> StabilizerGroup {
    StabilizerGroup::parse(&["YIZXXY", "ZXIIXZ", "IZXXXX", "IIIZIZ", "ZZZIZI"])
        .expect("six-qubit generators commute")
}

/// The `[[6,1,3]]` codespace of [`six_qubit_group`].
pub fn six_qubit_code() -> QuantumCode {
    stabilizer_codespace(&six_qubit_group()).expect("six-qubit group has a two-dimensional codespace")
}

/// Joint +1 eigenspace of the group, with a deterministic phase-fixed basis.
pub fn stabilizer_codespace(group: &StabilizerGroup) -> Result<QuantumCode> {
    let n = group.n_qubits();
    let k = group.generators.len();
    if k > n {
        return Err(Error::InconsistentGroup(format!("{k} generators on {n} qubits")));
    }
    let proj = group.syndrome_projector(0);
    let eig = hermitian_eig(&((&proj + proj.adjoint()) * re(0.5)))?;
    let expected = 1usize << (n - k);
    let vectors: Vec<ComplexVector> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0.5)
        .map(|(i, _)| phase_fix(eig.eigenvectors.column(i).into_owned()))
        .collect();
    if vectors.len() != expected {
        return Err(Error::InconsistentGroup(format!(
            "codespace has rank {} but {} independent generators need {}",
            vectors.len(),
            k,
            expected
        )));
    }
    QuantumCode::from_vectors(n, &vectors)
}

/// Rotates a vector so that its first amplitude above 1e-8 is real and positive.
fn phase_fix(v: ComplexVector) -> ComplexVector {
    match v.iter().find(|z| z.norm() > 1e-8) {
        Some(&z) => {
            let unit = z / z.norm();
            v * unit.conj()
        }
        None => v,
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CodeFile {
    n: usize,
    d: usize,
    vectors: Vec<Vec<[f64; 2]>>,
}

pub fn load_code(path: impl AsRef<Path>) -> Result<QuantumCode> {
    let text = fs::read_to_string(path.as_ref())?;
    parse_code(&text)
}

pub fn parse_code(text: &str) -> Result<QuantumCode> {
    let file: CodeFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.vectors.len() != file.d {
        return Err(Error::Parse(format!("d = {} but {} vectors given", file.d, file.vectors.len())));
    }
    if file.n == 0 || file.n > 12 {
        return Err(Error::Parse(format!("unsupported qubit count {}", file.n)));
    }
    let vectors: Vec<ComplexVector> = file
        .vectors
        .iter()
        .map(|v| ComplexVector::from_iterator(v.len(), v.iter().map(|&[a, b]| C64::new(a, b))))
        .collect();
    QuantumCode::from_vectors(file.n, &vectors)
}

pub fn code_to_json(code: &QuantumCode) -> Result<String> {
    let vectors = (0..code.d)
        .map(|m| code.codewords.column(m).iter().map(|z| [z.re, z.im]).collect())
        .collect();
    Ok(serde_json::to_string_pretty(&CodeFile { n: code.n, d: code.d, vectors })?)
}

pub fn save_code(code: &QuantumCode, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, code_to_json(code)? + "\n")?;
    Ok(())
}

/// Builds `U` with `U|input> = output` for every computational basis input.
pub fn encoding_unitary(code: &QuantumCode, mapping: &[(usize, ComplexVector)]) -> Result<ComplexMatrix> {
    let dim = code.dim();
    if mapping.len() != dim {
        return Err(Error::dims("encoding_unitary mapping", dim, mapping.len()));
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    let mut seen = vec![false; dim];
    for (input, output) in mapping {
        if *input >= dim || seen[*input] {
            return Err(Error::Parse(format!("basis input {input} is missing or repeated")));
        }
        if output.len() != dim {
            return Err(Error::dims("encoding_unitary output", dim, output.len()));
        }
        seen[*input] = true;
        u.set_column(*input, output);
    }
    let residual = unitarity_residual(&u);
    if residual >= ORTHONORMAL_TOL {
        return Err(Error::NonUnitary { residual });
    }
    Ok(u)
}

/// Truth table of the Leung encoder. Qubit 2 carries the logical input; the
/// other three qubits select a Pauli-frame or tilde partner of the codeword.
pub fn leung_truth_table() -> Vec<(usize, ComplexVector)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = ket(4, &[(0b0000, s), (0b1111, s)]);
    let one = ket(4, &[(0b0011, s), (0b1100, s)]);
    let zero_t = ket(4, &[(0b0000, s), (0b1111, -s)]);
    let one_t = ket(4, &[(0b1100, s), (0b0011, -s)]);
    let x1 = "XIII".parse::<PauliString>().unwrap().dense();
    let x4 = "IIIX".parse::<PauliString>().unwrap().dense();
    let x14 = &x1 * &x4;
    let mut table = Vec::with_capacity(16);
    #[allow(clippy::identity_op)] // keeps the sixteen rows aligned
    for (bit, word, tilde) in [(0usize, &zero, &zero_t), (1, &one, &one_t)] {
        let hi = bit << 2;
        table.push((0b0000 | hi, word.clone()));
        table.push((0b0001 | hi, &x1 * word));
        table.push((0b0010 | hi, &x4 * word));
        table.push((0b0011 | hi, tilde.clone()));
        table.push((0b1000 | hi, &x4 * tilde));
        table.push((0b1001 | hi, &x14 * word));
        table.push((0b1010 | hi, &x1 * tilde));
        table.push((0b1011 | hi, &x14 * tilde));
    }
    table
}

pub fn leung_encoder() -> ComplexMatrix {
    encoding_unitary(&leung_code(), &leung_truth_table()).expect("Leung truth table is unitary")
}
