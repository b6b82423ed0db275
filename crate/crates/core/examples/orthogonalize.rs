//! Orthogonalizes four-qubit amplitude damping on the Leung code and prints
//! each surviving record with its support rank and the certificate residuals.
//!
//! `cargo run --example orthogonalize -- 0.1`

use aqec::channels::amplitude_damping_n;
use aqec::codes::leung_code;
use aqec::orthogonalizer::{orthogonalize, OrthogonalizeOptions};
use aqec::presets::leung_order;

fn main() -> aqec::Result<()> {
    let gamma: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let code = leung_code();
    let noise = amplitude_damping_n(gamma, 4)?;
    let orth = orthogonalize(&noise, &code, &OrthogonalizeOptions::with_order(&leung_order()))?;

    println!("gamma = {gamma}: {} records", orth.records.len());
    for r in &orth.records {
        let weight = r.m_tilde_logical().trace().re / 2.0;
        println!("  {:<7} rank {}  mean weight {weight:.3e}", r.label, r.rank());
    }
    println!("dropped: {}", orth.dropped.join(", "));
    println!("{:#?}", orth.certificates);
    Ok(())
}
