//! The damping-dependent biconvex code under both orthogonalization flows.
//! The Leung recovery applies here because the single-damping images do not
//! overlap; on codes where they do it returns `SubspacesOverlap`.
//!
//! `cargo run --release --example biconvex`

use aqec::channels::amplitude_damping_n;
use aqec::codes::biconvex_code;
use aqec::matkernel::RANK_TOL;
use aqec::metrics::{default_gamma_grid, entanglement_fidelity, fidelity_sweep};
use aqec::orthogonalizer::{orthogonalize, OrthogonalizeOptions};
use aqec::presets::{biconvex_flow1, biconvex_flow2_tuned};
use aqec::recovery::{leung_recovery, syndrome_petz};

fn main() -> aqec::Result<()> {
    let grid = default_gamma_grid();
    for (name, tuned) in [("flow 1", false), ("flow 2 with override", true)] {
        let report = fidelity_sweep(&grid, false, |g| {
            let code = biconvex_code(g)?;
            let noise = amplitude_damping_n(g, 4)?;
            let opts = if tuned { biconvex_flow2_tuned(&code) } else { OrthogonalizeOptions::with_order(&biconvex_flow1()) };
            let r = syndrome_petz(&orthogonalize(&noise, &code, &opts)?)?;
            Ok((code, noise, r))
        })?;
        println!("{name:<22} syndrome-Petz a2 = {:.4}", report.fit_ent.a(2));
    }

    let code = biconvex_code(0.1)?;
    let noise = amplitude_damping_n(0.1, 4)?;
    match leung_recovery(&code, &noise, RANK_TOL) {
        Ok(r) => println!("Leung recovery at gamma 0.1: F_ent {:.6}", entanglement_fidelity(&r, &noise, &code)?),
        Err(e) => println!("Leung recovery: {e}"),
    }
    Ok(())
}
