//! Writes the Leung code in the JSON code-file format, reads it back and
//! checks that the round trip preserves the codewords.
//!
//! `cargo run --example code_file -- leung.json`

use aqec::codes::{leung_code, load_code, save_code};
use aqec::matkernel::max_abs;

fn main() -> aqec::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "leung.json".into());
    let code = leung_code();
    save_code(&code, &path)?;
    let back = load_code(&path)?;
    println!("{path}: n = {}, d = {}, round-trip error {:.1e}", back.n, back.d, max_abs(&(&back.codewords - &code.codewords)));
    Ok(())
}
