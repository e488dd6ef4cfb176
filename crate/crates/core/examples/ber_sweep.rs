//! A small end-to-end Monte Carlo run producing a CSV.
//!
//! An [`ExperimentConfig`] bundles code, channel, quantizer, schedule and
//! sweep; the runner simulates frames with one independent random stream
//! per (seed, point, frame), so results do not depend on batching or thread
//! count. Alongside the error rates it reports frame-averaged operation
//! counts, and a second run can be attached as the complexity baseline.
//!
//! Run with `cargo run --release --example ber_sweep`.

use nbisi::bench::{attach_ratio, csv_string, run_experiment_streamed, CodeSource};
use nbisi::channel::IsiChannel;
use nbisi::decode::{EmsConfig, Scale, TruncationRule};
use nbisi::joint::{Decoder, Detector, ScheduleConfig, ScheduleMode};
use nbisi::{ExperimentConfig, Result};

fn config(label: &str, detector: Detector, decoder: Decoder) -> Result<ExperimentConfig> {
    Ok(ExperimentConfig {
        label: label.into(),
        code: CodeSource::Random { n: 48, col_weight: 2, row_weight: 4, seed: 5 },
        field_bits: Some(4),
        channel: IsiChannel::from_spec("epr4")?,
        precision_bits: 9,
        d_max: None,
        schedule: ScheduleConfig {
            detector,
            decoder,
            mode: ScheduleMode::Iterative,
            max_iterations: 20,
            inner_iterations: 0,
        },
        ebn0_db: vec![-2.5, -1.5, -0.5],
        max_frames: 2000,
        target_frame_errors: 60,
        seed: 17,
    })
}

fn main() -> Result<()> {
    let ems = config(
        "mu-ems",
        Detector::MaxLogMap,
        Decoder::Ems(EmsConfig {
            branch_rule: TruncationRule::Mu { offset: 40 },
            state_rule: TruncationRule::Mu { offset: 40 },
            scale: Scale::new(3, 4)?,
        }),
    )?;
    println!("integer receiver ({}):", ems.label);
    let mut report = run_experiment_streamed(&ems, |row| {
        println!(
            "  Eb/N0 {:4.1} dB: {} frames, ber {:.3e}, fer {:.3e}, {:.1} iterations",
            row.ebn0_db, row.frames, row.ber, row.fer, row.mean_iterations
        );
    })?;

    let bench = config("bcjr-qspa", Detector::Bcjr, Decoder::Qspa)?;
    println!("benchmark ({}):", bench.label);
    let baseline = run_experiment_streamed(&bench, |row| {
        println!(
            "  Eb/N0 {:4.1} dB: {} frames, ber {:.3e}, fer {:.3e}, {:.1} iterations",
            row.ebn0_db, row.frames, row.ber, row.fer, row.mean_iterations
        );
    })?;

    // The ratio column compares total operation counts point by point; the
    // categories weigh integer and floating-point work the same, so treat it
    // as a rough comparison, not a cycle count.
    attach_ratio(&mut report.rows, &baseline.rows)?;
    println!("\nCSV (config fingerprint {}):\n", report.fingerprint);
    print!("{}", csv_string(&report.rows));
    Ok(())
}
