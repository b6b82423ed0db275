use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matkernel::{c, ComplexMatrix, ComplexVector, C64, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        let i = c(0.0, 1.0);
        let m = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -i, i, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        ComplexMatrix::from_row_slice(2, 2, &m)
    }

    /// `self * other = i^k * result`.
    fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

/// `coefficient * i^phase * P_1 (x) ... (x) P_n`, with qubit 1 the leftmost
/// letter and the most significant bit of a basis index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    /// Power of `i`, always reduced mod 4.
    pub phase: u8,
    pub letters: Vec<Pauli>,
    pub coefficient: f64,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        PauliString { phase: 0, letters, coefficient: 1.0 }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Pauli::I; n])
    }

    /// Single-qubit letter `p` on 1-based qubit `q` of `n`.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut letters = vec![Pauli::I; n];
        letters[q - 1] = p;
        Self::new(letters)
    }

    pub fn with_coefficient(mut self, coefficient: f64) -> Self {
        self.coefficient = coefficient;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.letters.len()
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn phase_factor(&self) -> C64 {
        [ONE, c(0.0, 1.0), -ONE, c(0.0, -1.0)][(self.phase % 4) as usize]
    }

    /// The full prefactor `coefficient * i^phase`.
    pub fn scalar(&self) -> C64 {
        self.phase_factor() * self.coefficient
    }

    /// The letters alone, e.g. `IXZI`.
    pub fn word(&self) -> String {
        self.letters.iter().map(|p| p.symbol()).collect()
    }

    /// Sparse label such as `X1Z3`; the identity is `I`.
    pub fn sparse_label(&self) -> String {
        let s: String = self
            .letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, p)| format!("{}{}", p.symbol(), q + 1))
            .collect();
        if s.is_empty() {
            "I".into()
        } else {
            s
        }
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.letters.len() - 1 - q)
    }

    pub fn x_mask(&self) -> usize {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| matches!(p, Pauli::X | Pauli::Y))
            .fold(0, |m, (q, _)| m | self.bit(q))
    }

    pub fn z_mask(&self) -> usize {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| matches!(p, Pauli::Z | Pauli::Y))
            .fold(0, |m, (q, _)| m | self.bit(q))
    }

    /// Signed-permutation action on basis states: `P|b> = amp(b) |b ^ x_mask>`.
    pub fn action(&self) -> PauliAction {
        let n_y = self.letters.iter().filter(|&&p| p == Pauli::Y).count();
        let base = self.scalar() * [ONE, c(0.0, 1.0), -ONE, c(0.0, -1.0)][n_y % 4];
        PauliAction { x_mask: self.x_mask(), z_mask: self.z_mask(), base, dim: self.dim() }
    }

    pub fn dense(&self) -> ComplexMatrix {
        let a = self.action();
        let mut m = ComplexMatrix::zeros(a.dim, a.dim);
        for b in 0..a.dim {
            m[(b ^ a.x_mask, b)] = a.amp(b);
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        PauliString {
            phase: (4 - self.phase % 4) % 4,
            letters: self.letters.clone(),
            coefficient: self.coefficient,
        }
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString, Error> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::dims("PauliString::mul", self.n_qubits(), other.n_qubits()));
        }
        let mut phase = self.phase + other.phase;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (k, p) = a.mul(b);
                phase += k;
                p
            })
            .collect();
        Ok(PauliString { phase: phase % 4, letters, coefficient: self.coefficient * other.coefficient })
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// True when the operator is exactly `-I` (up to a positive coefficient).
    pub fn is_minus_identity(&self) -> bool {
        self.weight() == 0 && self.phase % 4 == 2
    }

    /// Recovers a Pauli string from its dense matrix, if it is one.
    pub fn from_dense(m: &ComplexMatrix, tol: f64) -> Option<PauliString> {
        let dim = m.nrows();
        if dim == 0 || !dim.is_power_of_two() || m.ncols() != dim {
            return None;
        }
        let n = dim.trailing_zeros() as usize;
        let x_mask = (0..dim).find(|&r| m[(r, 0)].norm() > tol)?;
        let mut letters = Vec::with_capacity(n);
        for q in 0..n {
            let bit = 1 << (n - 1 - q);
            let flips = x_mask & bit != 0;
            // A sign flip on the column with only this bit set reveals a Z component.
            let a0 = m[(x_mask, 0)];
            let a1 = m[(x_mask ^ bit, bit)];
            let flips_sign = (a1 + a0).norm() < tol;
            letters.push(match (flips, flips_sign) {
                (false, false) => Pauli::I,
                (true, false) => Pauli::X,
                (true, true) => Pauli::Y,
                (false, true) => Pauli::Z,
            });
        }
        let mut p = PauliString::new(letters);
        let a = p.action();
        let scale = m[(x_mask, 0)] / a.amp(0);
        p.coefficient = scale.norm();
        let unit = scale / scale.norm();
        p.phase = [ONE, c(0.0, 1.0), -ONE, c(0.0, -1.0)]
            .iter()
            .position(|&u| (u - unit).norm() < 1e-9)? as u8;
        ((p.dense() - m).iter().all(|z| z.norm() <= tol)).then_some(p)
    }
}

/// Precomputed signed-permutation data of a Pauli string.
#[derive(Debug, Clone, Copy)]
pub struct PauliAction {
    pub x_mask: usize,
    pub z_mask: usize,
    base: C64,
    pub dim: usize,
}

impl PauliAction {
    /// Amplitude of `P|b>` on `|b ^ x_mask>`.
    #[inline]
    pub fn amp(&self, b: usize) -> C64 {
        if (b & self.z_mask).count_ones() % 2 == 1 {
            -self.base
        } else {
            self.base
        }
    }

    pub fn apply_vec(&self, v: &ComplexVector) -> ComplexVector {
        let mut out = ComplexVector::zeros(self.dim);
        for b in 0..self.dim {
            out[b ^ self.x_mask] = self.amp(b) * v[b];
        }
        out
    }

    /// `P * m`.
    pub fn left_mul(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, m.ncols());
        for b in 0..self.dim {
            let a = self.amp(b);
            let target = b ^ self.x_mask;
            for j in 0..m.ncols() {
                out[(target, j)] = a * m[(b, j)];
            }
        }
        out
    }

    /// `m * P^dag`.
    pub fn right_mul_adjoint(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(m.nrows(), self.dim);
        for b in 0..self.dim {
            let a = self.amp(b).conj();
            let target = b ^ self.x_mask;
            for i in 0..m.nrows() {
                out[(i, target)] = m[(i, b)] * a;
            }
        }
        out
    }

    /// `P rho P^dag`.
    pub fn conjugate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let aj = self.amp(j).conj();
            let tj = j ^ self.x_mask;
            for i in 0..self.dim {
                out[(i ^ self.x_mask, tj)] = self.amp(i) * rho[(i, j)] * aj;
            }
        }
        out
    }

    /// Accumulates `P rho P^dag` into `acc`.
    pub fn conjugate_into(&self, rho: &ComplexMatrix, acc: &mut ComplexMatrix) {
        for j in 0..self.dim {
            let aj = self.amp(j).conj();
            let tj = j ^ self.x_mask;
            for i in 0..self.dim {
                acc[(i ^ self.x_mask, tj)] += self.amp(i) * rho[(i, j)] * aj;
            }
        }
    }
}

impl fmt::Display for PauliString {
    /// Sign prefix only when the phase is not `+1`; the coefficient is not printed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][(self.phase % 4) as usize];
        write!(f, "{}{}", prefix, self.word())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional `+`, `-`, `i`, `+i` or `-i` prefix followed by letters.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else {
            (0, s)
        };
        if rest.is_empty() {
            return Err(Error::Parse(format!("empty Pauli string `{s}`")));
        }
        let letters = rest
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse(format!("bad Pauli letter `{other}` in `{s}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PauliString { phase, letters, coefficient: 1.0 })
    }
}

/// All `4^n` letter strings, ordered by weight and then lexicographically with `I < X < Y < Z`.
pub fn enumerate_by_weight(n: usize) -> Vec<PauliString> {
    let total = 1usize << (2 * n);
    let mut all: Vec<PauliString> = (0..total)
        .map(|code| {
            let letters = (0..n)
                .map(|q| Pauli::ALL[(code >> (2 * (n - 1 - q))) & 3])
                .collect();
            PauliString::new(letters)
        })
        .collect();
    all.sort_by_key(|p| p.weight());
    all
}
