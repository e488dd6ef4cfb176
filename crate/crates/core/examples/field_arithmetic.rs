//! Field tables and the symbol representation.
//!
//! A symbol is a `u8` holding the binary coordinates of a GF(2^m) element,
//! so addition is XOR and multiplication runs through log/antilog tables of
//! a primitive element. Everything downstream (codes, check nodes, votes)
//! works through one shared [`FieldTable`].
//!
//! Run with `cargo run --example field_arithmetic`.

use nbisi::gf::FieldTable;
use nbisi::Result;

fn main() -> Result<()> {
    let f = FieldTable::with_default_poly(4)?;
    println!(
        "GF({}) from the degree-{} primitive polynomial {:#x}",
        f.q(),
        f.m(),
        f.primitive_poly()
    );

    println!("\naddition is coordinate-wise XOR:");
    for (x, y) in [(3u8, 5u8), (9, 9), (12, 1)] {
        println!("  {x:2} + {y:2} = {:2}", f.add(x, y));
    }

    println!("\nmultiplication table corner (rows x, columns y, 0..=4):");
    for x in 0..5u8 {
        let row: Vec<String> = (0..5u8).map(|y| format!("{:2}", f.mul(x, y))).collect();
        println!("  {}", row.join(" "));
    }

    // Every nonzero element has an inverse, and in characteristic 2 each
    // element is its own negative.
    for x in 1..f.q() as u8 {
        let inv = f.inv(x)?;
        assert_eq!(f.mul(x, inv), 1, "{x} * {inv} must be 1");
        assert_eq!(f.neg(x), x);
    }
    println!("\nall {} nonzero elements verified: x * inv(x) = 1, -x = x", f.q() - 1);

    // A spot check of distributivity, the axiom the decoder leans on when it
    // scales parity-check entries.
    let (a, b, c) = (7u8, 11, 14);
    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
    println!("distributivity holds on ({a}, {b}, {c})");

    // Other field sizes come from the same constructor; m ranges over 1..=8.
    let big = FieldTable::with_default_poly(8)?;
    println!("\nGF({}) is the largest supported field", big.q());
    Ok(())
}
