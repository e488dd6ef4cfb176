//! From noisy samples to integer possibilities.
//!
//! The receiver's integer path never touches a probability. Each branch's
//! squared distance to the received section is clipped at `d_max` and mapped
//! affinely onto 0..=2^p-1, larger meaning more likely. These "possibility"
//! values are what the detector, the symbol nodes and the check nodes
//! exchange; a common shift means nothing, so vectors are routinely pinned
//! to minimum 0.
//!
//! Run with `cargo run --example quantized_metrics`.

use nbisi::channel::{modulate_symbols, IsiChannel, SectionalizedTrellis};
use nbisi::metrics::{branch_possibilities, default_d_max, QuantizerConfig};
use nbisi::Result;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    // The affine map at p = 9 bits, ceiling 80: distance 0 hits the top
    // value 511, the midpoint rounds to 256, and everything at or beyond the
    // ceiling flattens to 0.
    let q9 = QuantizerConfig::new(9, 80.0)?;
    println!("p = 9, d_max = 80 (top value {}):", q9.max_value());
    for d in [0.0, 1.0, 20.0, 40.0, 79.9, 80.0, 200.0] {
        println!("  distance {d:5.1} -> {}", q9.quantize_distance(d));
    }

    // A sensible default ceiling is the worst-case section distance: with
    // BPSK at +-1 each sample misses by at most twice the tap mass.
    let channel = IsiChannel::from_spec("epr4")?;
    let m = 4;
    let d_max = default_d_max(&channel, m);
    println!("\nEPR4 with GF(16) sections: default d_max = {d_max}");

    // One transmitted section, observed in noise, scored against every
    // branch. Branches with identical output samples necessarily share a
    // value; only the distance enters.
    let quantizer = QuantizerConfig::new(9, d_max)?;
    let trellis = SectionalizedTrellis::new(&channel, m);
    let sent = [9u8];
    let x = modulate_symbols(m, &sent);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let y = channel.transmit(&x, 0.6, &mut rng);
    let values = branch_possibilities(&trellis, &y, &quantizer);

    let mut ranked: Vec<(usize, i32)> = values.iter().copied().enumerate().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    println!("\nsymbol 9 sent from state 0 at sigma 0.6; best branches:");
    println!("rank  branch  from  symbol  value");
    for (rank, (id, value)) in ranked.iter().take(5).enumerate() {
        let b = trellis.branch(*id);
        println!("{rank:4}  {id:6}  {:4}  {:6}  {value:5}", b.from, b.symbol);
    }
    let true_id = trellis.branch_id(0, sent[0]);
    println!(
        "\nthe transmitted branch {true_id} scores {} of {}",
        values[true_id],
        quantizer.max_value()
    );
    Ok(())
}
