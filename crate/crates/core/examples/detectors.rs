//! The three detectors side by side on the same frames.
//!
//! Viterbi returns the single best symbol sequence; max-log-MAP keeps, per
//! symbol, the best sequence metric for each candidate value (both in
//! integer possibility arithmetic). BCJR is the floating-point benchmark,
//! computing true posterior probabilities. On the same noisy frames their
//! symbol decisions land within a whisker of each other, which is the whole
//! point of the integer path: benchmark-grade decisions without a single
//! real multiplication.
//!
//! Run with `cargo run --example detectors`.

use nbisi::channel::{modulate_symbols, IsiChannel, SectionalizedTrellis};
use nbisi::detect::{assemble_branch_metrics, bcjr, max_log_map, viterbi};
use nbisi::gf::Symbol;
use nbisi::metrics::{branch_possibilities, default_d_max, PossibilityVector, QuantizerConfig};
use nbisi::{OpCounts, Result};
use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let m = 4u32;
    let q = 1usize << m;
    let n = 64usize;
    let frames = 200;
    let sigma = 0.55;
    let channel = IsiChannel::from_spec("epr4")?;
    let trellis = SectionalizedTrellis::new(&channel, m);
    let quantizer = QuantizerConfig::new(9, default_d_max(&channel, m))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let uniform_prior: Vec<Vec<f64>> = vec![vec![1.0 / q as f64; q]; n];
    let zero_prior: Vec<PossibilityVector> = vec![vec![0; q]; n];
    let mut errors = [0u64; 3];
    let mut ops = [OpCounts::default(), OpCounts::default(), OpCounts::default()];

    for _ in 0..frames {
        let sent: Vec<Symbol> = (0..n).map(|_| rng.random_range(0..q) as Symbol).collect();
        let y = channel.transmit(&modulate_symbols(m, &sent), sigma, &mut rng);
        let chan: Vec<Vec<i32>> = (0..n)
            .map(|j| branch_possibilities(&trellis, &y[j * m as usize..(j + 1) * m as usize], &quantizer))
            .collect();

        let mut assembly = OpCounts::default();
        let metrics = assemble_branch_metrics(&trellis, &chan, &zero_prior, &mut assembly);

        let hard = viterbi(&trellis, &metrics, &mut ops[0]);
        errors[0] += hard.iter().zip(&sent).filter(|(a, b)| a != b).count() as u64;

        let soft = max_log_map(&trellis, &metrics, &zero_prior, &mut ops[1]);
        errors[1] += soft
            .iter()
            .zip(&sent)
            .filter(|(v, &s)| argmax(v) != s)
            .count() as u64;

        let bench = bcjr(&trellis, &y, sigma, &uniform_prior, &mut ops[2]);
        errors[2] += bench
            .posteriors
            .iter()
            .zip(&sent)
            .filter(|(p, &s)| argmax_f(p) != s)
            .count() as u64;
    }

    let total = (frames * n) as f64;
    println!("{frames} frames of {n} GF({q}) symbols over EPR4 at sigma {sigma}\n");
    println!("detector     symbol error rate  integer ops  real ops");
    for (label, i) in [("Viterbi", 0), ("max-log-MAP", 1), ("BCJR", 2)] {
        let ints = ops[i].int_add + ops[i].int_cmp;
        let reals = ops[i].real_mul + ops[i].real_add + ops[i].real_div;
        println!(
            "{label:<12} {:>17.5}  {ints:>11}  {reals:>8}",
            errors[i] as f64 / total
        );
    }
    println!("\n(the shared metric assembly is integer work too; BCJR needs none of it)");
    Ok(())
}

fn argmax(v: &[i32]) -> Symbol {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best as Symbol
}

fn argmax_f(v: &[f64]) -> Symbol {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best as Symbol
}
