//! Sweeps the damping strength for the Petz and syndrome-Petz recoveries on
//! the Leung code, fits `1 - sum a_i gamma^i` and writes the curves as CSV.
//!
//! `cargo run --release --example fidelity_sweep -- out_dir`

use std::fs::File;
use std::path::PathBuf;

use aqec::channels::amplitude_damping_n;
use aqec::codes::leung_code;
use aqec::matkernel::RANK_TOL;
use aqec::metrics::{default_gamma_grid, fidelity_sweep};
use aqec::orthogonalizer::{orthogonalize, OrthogonalizeOptions};
use aqec::presets::leung_order;
use aqec::recovery::{petz, syndrome_petz};

fn main() -> aqec::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "sweep_out".into()));
    std::fs::create_dir_all(&out)?;
    let code = leung_code();
    let grid = default_gamma_grid();

    let petz_report = fidelity_sweep(&grid, true, |g| {
        let noise = amplitude_damping_n(g, 4)?;
        let r = petz(&code, &noise, RANK_TOL)?;
        Ok((code.clone(), noise, r))
    })?;
    let syndrome_report = fidelity_sweep(&grid, true, |g| {
        let noise = amplitude_damping_n(g, 4)?;
        let orth = orthogonalize(&noise, &code, &OrthogonalizeOptions::with_order(&leung_order()))?;
        let r = syndrome_petz(&orth)?;
        Ok((code.clone(), noise, r))
    })?;

    for (name, report) in [("petz", &petz_report), ("syndrome_petz", &syndrome_report)] {
        report.write_csv(File::create(out.join(format!("{name}.csv")))?)?;
        let min = report.fit_min.as_ref().map(|f| f.a(2)).unwrap_or(f64::NAN);
        println!("{name:<14} a1 {:+.1e}  a2 {:.4}  worst-case a2 {min:.4}", report.fit_ent.a(1), report.fit_ent.a(2));
    }
    println!("curves written to {}", out.display());
    Ok(())
}
