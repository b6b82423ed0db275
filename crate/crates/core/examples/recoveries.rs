//! Builds every recovery for the Leung code at one damping strength and
//! compares entanglement and worst-case fidelities.
//!
//! `cargo run --example recoveries -- 0.1`

use aqec::channels::amplitude_damping_n;
use aqec::codes::leung_code;
use aqec::matkernel::{identity, max_abs, RANK_TOL};
use aqec::metrics::{entanglement_fidelity, worst_case_fidelity};
use aqec::orthogonalizer::{orthogonalize, OrthogonalizeOptions};
use aqec::presets::leung_order;
use aqec::recovery::{factorize, leung_recovery, petz, polar_recovery, syndrome_petz};

fn main() -> aqec::Result<()> {
    let gamma: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let code = leung_code();
    let noise = amplitude_damping_n(gamma, 4)?;
    let orth = orthogonalize(&noise, &code, &OrthogonalizeOptions::with_order(&leung_order()))?;

    let maps = [
        ("Petz", petz(&code, &noise, RANK_TOL)?),
        ("syndrome-Petz", syndrome_petz(&orth)?),
        ("polar", polar_recovery(&orth)?),
        ("Leung", leung_recovery(&code, &noise, RANK_TOL)?),
    ];
    println!("gamma = {gamma}");
    for (name, map) in &maps {
        let f_ent = entanglement_fidelity(map, &noise, &code)?;
        let worst = worst_case_fidelity(map, &noise, &code)?;
        println!(
            "  {name:<14} {} ops, completion {:<5}  F_ent {f_ent:.6}  F_min {:.6} at theta {:.3}",
            map.len(),
            map.completion.is_some(),
            worst.value,
            worst.theta
        );
    }

    // Each syndrome-Petz operator splits into a measurement and a unitary correction.
    let parts = factorize(&maps[1].1)?;
    for ((g, pi), label) in parts.iter().zip(&maps[1].1.labels) {
        let residual = max_abs(&(g.adjoint() * g - identity(16)));
        println!("  {label}: measurement trace {:.3}, unitary residual {residual:.1e}", pi.trace().re);
    }
    Ok(())
}
