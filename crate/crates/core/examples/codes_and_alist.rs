//! Building, saving and loading parity-check matrices; encoding.
//!
//! Codes are sparse parity-check matrices over GF(2^m). The random
//! constructor produces regular, 4-cycle-free matrices, which is exactly
//! the condition the hard-decision vote decoder needs. Matrices round-trip
//! through the alist text format, with the nonbinary entries listed next to
//! their column indices.
//!
//! Run with `cargo run --example codes_and_alist`.

use nbisi::code::{build_encoder, load_alist, random_regular_code};
use nbisi::gf::FieldTable;
use nbisi::Result;
use std::sync::Arc;

fn main() -> Result<()> {
    let field = Arc::new(FieldTable::with_default_poly(4)?);
    let code = random_regular_code(24, 2, 4, field.clone(), 5)?;
    println!(
        "random regular code: {} checks x {} symbols over GF({}), {} entries",
        code.num_rows(),
        code.num_cols(),
        field.q(),
        code.num_entries()
    );
    println!(
        "column weight 2, row weight 4, majority-logic decodable: {}",
        code.is_majority_logic_decodable()
    );

    let path = std::env::temp_dir().join("nbisi_codes_and_alist_example.alist");
    code.save_alist(&path)?;
    let text = std::fs::read_to_string(&path)
        .map_err(|e| nbisi::Error::io(path.display().to_string(), e))?;
    println!("\nfirst alist lines (n m, weights, then per-column index/value pairs):");
    for line in text.lines().take(5) {
        println!("  {line}");
    }

    let reloaded = load_alist(&path, field.clone())?;
    assert_eq!(reloaded.num_entries(), code.num_entries());
    println!("reloaded from {} with identical entries", path.display());

    // The encoder Gauss-eliminates H once; redundant checks only shrink the
    // rank, not the codeword length.
    let encoder = build_encoder(&code)?;
    println!(
        "\nencoder: {} message symbols -> {} codeword symbols (rank {})",
        encoder.message_len(),
        encoder.codeword_len(),
        encoder.rank()
    );
    let message: Vec<u8> = (0..encoder.message_len()).map(|k| (k % 16) as u8).collect();
    let v = encoder.encode(&message);
    let syndrome = code.syndrome(&v);
    assert!(syndrome.iter().all(|&s| s == 0), "a codeword must satisfy every check");
    println!("encoded a message; all {} checks are satisfied", syndrome.len());

    std::fs::remove_file(&path).ok();
    Ok(())
}
