//! Viterbi with majority-logic vote counters.
//!
//! The hard-decision schedule keeps one integer counter per (symbol, value)
//! pair. Each iteration, Viterbi detects on channel metrics plus counters,
//! every parity check votes a field value for each adjacent symbol, and the
//! votes accumulate. A symbol the detector got wrong is outvoted by its
//! checks within a few rounds, as long as no two of its checks share
//! another symbol (the 4-cycle-free condition).
//!
//! Run with `cargo run --example hard_joint`.

use nbisi::channel::{modulate_symbols, IsiChannel, SectionalizedTrellis};
use nbisi::code::{build_encoder, random_regular_code};
use nbisi::gf::{FieldTable, Symbol};
use nbisi::joint::{run_frame, Decoder, Detector, ScheduleConfig, ScheduleMode};
use nbisi::metrics::QuantizerConfig;
use nbisi::Result;
use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn main() -> Result<()> {
    let field = Arc::new(FieldTable::with_default_poly(4)?);
    let code = random_regular_code(60, 4, 6, field.clone(), 3)?;
    let encoder = build_encoder(&code)?;
    println!(
        "[{}, {}] GF(16) code, column weight 4, majority-logic decodable: {}",
        code.num_cols(),
        encoder.message_len(),
        code.is_majority_logic_decodable()
    );
    let channel = IsiChannel::from_spec("dicode")?;
    let trellis = SectionalizedTrellis::new(&channel, 4);
    let quantizer = QuantizerConfig::new(4, 32.0)?;
    let schedule = ScheduleConfig {
        detector: Detector::Viterbi,
        decoder: Decoder::Gmlgd,
        mode: ScheduleMode::Iterative,
        max_iterations: 10,
        inner_iterations: 0,
    };

    // Corrupt the codeword before modulation and transmit without noise:
    // the detector then reproduces exactly that corrupted word, which is
    // the cleanest way to hand the vote decoder a known error pattern.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for injected in 1..=3usize {
        let trials = 200;
        let mut corrected = 0;
        let mut worst = 0;
        for _ in 0..trials {
            let msg: Vec<Symbol> = (0..encoder.message_len())
                .map(|_| rng.random_range(0..16) as Symbol)
                .collect();
            let v = encoder.encode(&msg);
            let mut corrupted = v.clone();
            for _ in 0..injected {
                let j = rng.random_range(0..corrupted.len());
                corrupted[j] = field.add(corrupted[j], rng.random_range(1..16) as Symbol);
            }
            let y = channel.convolve(&modulate_symbols(4, &corrupted));
            let r = run_frame(&y, &code, &trellis, &quantizer, 0.0, &schedule)?;
            if r.converged && r.decoded == v {
                corrected += 1;
                worst = worst.max(r.iterations_used);
            }
        }
        println!(
            "{injected} wrong symbol(s): corrected {corrected}/{trials}, worst case {worst} iterations"
        );
    }
    println!("\none error is always outvoted; with more, two wrong symbols can share");
    println!("a check and prop each other up, so correction is no longer guaranteed.");
    Ok(())
}
