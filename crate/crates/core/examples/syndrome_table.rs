//! Prints the syndrome table of the Leung code: primary ZZII, IIZZ checks,
//! conditioned secondary ZIII, IIIZ checks, and the recovery for each row.
//!
//! `cargo run --example syndrome_table`

use aqec::channels::amplitude_damping_n;
use aqec::codes::leung_code;
use aqec::orthogonalizer::{orthogonalize, OrthogonalizeOptions};
use aqec::presets::leung_syndrome_order;
use aqec::recovery::leung_syndrome_table;

fn main() -> aqec::Result<()> {
    let code = leung_code();
    let noise = amplitude_damping_n(0.1, 4)?;
    let orth = orthogonalize(&noise, &code, &OrthogonalizeOptions::with_order(&leung_syndrome_order()))?;
    leung_syndrome_table(&orth)?.write_csv(std::io::stdout())
}
