//! Splits a delay into N damping steps with a recovery after each, for
//! N = 1, 2, 5, and fits the resulting curves against the bare qubit.
//!
//! `cargo run --release --example multicycle`

use aqec::experiments::{bare_qubit_curve, exp_fit, multicycle_gamma_fit, run_multicycle, MulticycleConfig};

const T1_US: f64 = 155.0;

fn main() -> aqec::Result<()> {
    let grid: Vec<f64> = (0..=250).map(|i| i as f64 * 2.0).collect();
    let bare = bare_qubit_curve(T1_US, &grid)?;
    println!("bare qubit at {} us: {:.4}", grid[100], bare[100].1);
    for n in [1, 2, 5] {
        let curve = run_multicycle(&MulticycleConfig::leung(T1_US, grid.clone(), n))?;
        let a2 = multicycle_gamma_fit(&curve, T1_US, 5)?.a(2);
        let fit = exp_fit(&curve.ts(), &curve.fidelities());
        let lifetime = fit.map(|f| format!("{:.1} us", f.t)).unwrap_or_else(|e| e.to_string());
        println!("N = {n}: F({} us) = {:.4}, gamma a2 = {a2:.4}, lifetime {lifetime}", grid[100], curve.fidelities()[100]);
    }
    Ok(())
}
