//! The [[6,1]] stabilizer code under depolarizing noise: counts the surviving
//! Pauli records and compares lookup, Petz and syndrome-Petz recoveries.
//!
//! `cargo run --release --example six_qubit -- 0.05`

use aqec::channels::{depolarizing, enumerate_by_weight};
use aqec::codes::{six_qubit_code, six_qubit_group};
use aqec::matkernel::RANK_TOL;
use aqec::metrics::entanglement_fidelity;
use aqec::orthogonalizer::{label_weight, orthogonalize, OrthogonalizeOptions};
use aqec::recovery::{petz, stabilizer_lookup_recovery, syndrome_petz};

fn main() -> aqec::Result<()> {
    let p: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let code = six_qubit_code();
    let noise = depolarizing(p, 6)?;
    let orth = orthogonalize(&noise, &code, &OrthogonalizeOptions::default())?;

    let mut by_weight = [0usize; 7];
    for r in &orth.records {
        by_weight[label_weight(&r.label).unwrap_or(0)] += 1;
    }
    println!("p = {p}: {} records, by weight {:?}", orth.records.len(), &by_weight[..3]);

    let errors: Vec<_> = enumerate_by_weight(6).into_iter().filter(|e| e.weight() <= 2).collect();
    let lookup = stabilizer_lookup_recovery(&code, &six_qubit_group(), &errors)?;
    for (name, map) in [
        ("lookup", lookup),
        ("syndrome-Petz", syndrome_petz(&orth)?),
        ("Petz", petz(&code, &noise, RANK_TOL)?),
    ] {
        println!("  {name:<14} F_ent {:.6}", entanglement_fidelity(&map, &noise, &code)?);
    }
    Ok(())
}
