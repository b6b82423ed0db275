//! Processing orders and overrides for the four-qubit damping codes.

use crate::codes::QuantumCode;
use crate::orthogonalizer::OrthogonalizeOptions;

fn labels(bits: &[&str]) -> Vec<String> {
    bits.iter().map(|b| format!("D_{b}")).collect()
}

const TAIL: [&str; 5] = ["0111", "1011", "1101", "1110", "1111"];

/// No damping, single damping, the four double dampings that annihilate
/// `|1_L>`, then `D_1100` before `D_0011`. `D_0011` ends up null.
pub fn leung_order() -> Vec<String> {
    let mut v = labels(&["0000", "0001", "0010", "0100", "1000", "1001", "0110", "0101", "1010", "1100", "0011"]);
    v.extend(labels(&TAIL));
    v
}

/// [`leung_order`] with the single-damping operators listed qubit 1 first, so
/// that record indices follow the syndrome table's recovery numbering.
pub fn leung_syndrome_order() -> Vec<String> {
    let mut v = labels(&["0000", "1000", "0100", "0010", "0001", "1001", "0110", "0101", "1010", "1100", "0011"]);
    v.extend(labels(&TAIL));
    v
}

const HEAD: [&str; 5] = ["0000", "0001", "0010", "0100", "1000"];

/// Biconvex code, first flow: `D_0101` comes last and is null.
pub fn biconvex_flow1() -> Vec<String> {
    let mut v = labels(&HEAD);
    v.extend(labels(&["1001", "0110", "0011", "1100", "1010", "0101"]));
    v.extend(labels(&TAIL));
    v
}

/// Biconvex code, second flow: `D_0011` comes last and is null.
pub fn biconvex_flow2() -> Vec<String> {
    let mut v = labels(&HEAD);
    v.extend(labels(&["1001", "0110", "0101", "1010", "1100", "0011"]));
    v.extend(labels(&TAIL));
    v
}

/// Second flow with the `D_0101` record restricted to `|0_L><0_L|`.
pub fn biconvex_flow2_tuned(code: &QuantumCode) -> OrthogonalizeOptions {
    OrthogonalizeOptions::with_order(&biconvex_flow2()).with_override("D_0101", code.logical_operator(0, 0))
}

/// True for the no-damping and single-damping labels.
pub fn is_single_damping(label: &str) -> bool {
    crate::channels::damping_weight(label).is_some_and(|w| w <= 1)
}
