//! How a channel becomes a sectionalized trellis.
//!
//! An ISI channel with memory L has 2^L bit-level states. Regrouping m bit
//! steps into one section makes the trellis consume a whole GF(2^m) symbol
//! per transition: 2^L states, 2^(L+m) branches per section, each branch
//! carrying the m channel outputs produced along the way. Branch ids are
//! `state * 2^m + symbol`, and a symbol's bits enter the channel least
//! significant first.
//!
//! Run with `cargo run --example trellis_walkthrough`.

use nbisi::channel::{modulate_symbols, IsiChannel, SectionalizedTrellis};
use nbisi::Result;

fn main() -> Result<()> {
    let channel = IsiChannel::from_spec("dicode")?;
    let m = 2;
    let trellis = SectionalizedTrellis::new(&channel, m);
    println!(
        "dicode taps {:?}, memory {}, sectionalized for GF({})",
        channel.taps(),
        channel.memory(),
        trellis.symbols_per_section()
    );
    println!(
        "{} states, {} branches per section, {} samples per section\n",
        trellis.num_states(),
        trellis.num_branches(),
        trellis.section_bits()
    );

    println!("id  from  symbol  outputs          to");
    for (id, b) in trellis.branches().iter().enumerate() {
        let outputs: Vec<String> = b.outputs.iter().map(|z| format!("{z:+.0}")).collect();
        println!(
            "{id:2}  {:4}  {:6}  {:14}  {:2}",
            b.from,
            b.symbol,
            outputs.join(" "),
            b.to
        );
    }

    // Walking the trellis reproduces the channel exactly: concatenating the
    // branch outputs along a symbol sequence equals convolving the modulated
    // bit stream.
    let symbols = [1u8, 2, 3, 0];
    let mut state = 0;
    let mut walked = Vec::new();
    for &s in &symbols {
        let b = trellis.branch(trellis.branch_id(state, s));
        walked.extend(b.outputs.iter().copied());
        state = b.to;
    }
    let direct = channel.convolve(&modulate_symbols(m, &symbols));
    assert_eq!(walked, direct, "the trellis must reproduce the channel");
    println!("\nwalked {symbols:?} through the trellis: outputs {walked:?}");
    println!("direct convolution of the same bits agrees, final state {state}");

    // Any tap list works, not just the named catalog entries.
    let custom = IsiChannel::from_spec("0.5, -0.25, 0.1")?;
    let t = SectionalizedTrellis::new(&custom, 4);
    println!(
        "\ncustom taps {:?}: {} states, {} branches per GF(16) section",
        custom.taps(),
        t.num_states(),
        t.num_branches()
    );
    Ok(())
}
