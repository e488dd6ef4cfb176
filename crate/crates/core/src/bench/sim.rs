//! The Monte Carlo loop: frames in, error rates and operation counts out.
//!
//! Determinism contract: every frame draws from its own stream keyed by
//! (seed, sweep point, frame index), and per-point tallies are integer sums,
//! so results do not depend on worker count or scheduling order.

use rayon::prelude::*;

use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

use crate::bench::config::ExperimentConfig;
use crate::bench::counters::OpCounts;
use crate::channel::{modulate_symbols, snr_to_sigma, IsiChannel, SectionalizedTrellis};
use crate::code::{build_encoder, Encoder, SparseParityMatrix};
use crate::detect::{assemble_branch_metrics, bcjr, max_log_map, viterbi};
use crate::error::{Error, Result};
use crate::gf::Symbol;
use crate::joint::{run_frame, Detector, FrameResult, ScheduleConfig};
use crate::metrics::{branch_possibilities, QuantizerConfig};

/// Frames processed between stopping-rule checks. Fixed so the simulated
/// frame set, and with it every estimate, is independent of timing.
const BATCH: u64 = 512;

/// Cumulative operation counts of one frame, detector and decoder combined.
pub fn count_ops(result: &FrameResult) -> OpCounts {
    result.counters.combined()
}

/// Frame-averaged operation counts per category.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeanOps {
    pub int_add: f64,
    pub int_cmp: f64,
    pub field_ops: f64,
    pub real_mul: f64,
    pub real_add: f64,
    pub real_div: f64,
    pub ems_configs: f64,
}

impl MeanOps {
    fn from_sum(sum: &OpCounts, frames: u64) -> Self {
        let n = frames as f64;
        MeanOps {
            int_add: sum.int_add as f64 / n,
            int_cmp: sum.int_cmp as f64 / n,
            field_ops: sum.field_ops as f64 / n,
            real_mul: sum.real_mul as f64 / n,
            real_add: sum.real_add as f64 / n,
            real_div: sum.real_div as f64 / n,
            ems_configs: sum.ems_configs as f64 / n,
        }
    }

    /// All countable categories summed; the configuration tally is a search
    ///-size diagnostic, not an arithmetic operation, and stays out.
    pub fn total(&self) -> f64 {
        self.int_add + self.int_cmp + self.field_ops + self.real_mul + self.real_add + self.real_div
    }
}

/// Ratio of frame-averaged total operation counts, candidate over baseline.
/// Categories are summed into a single number; this is a rough measure, so
/// pair it with the per-category values when precision matters.
pub fn complexity_ratio(candidate: &MeanOps, baseline: &MeanOps) -> Result<f64> {
    let b = baseline.total();
    if b == 0.0 {
        return Err(Error::Config(
            "complexity ratio needs a baseline with a nonzero operation count".into(),
        ));
    }
    Ok(candidate.total() / b)
}

/// One sweep point of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub symbol_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub ser: f64,
    pub fer: f64,
    pub mean_iterations: f64,
    pub mean_ops: MeanOps,
    /// Candidate-over-baseline total-operation ratio; 0 until a baseline is
    /// attached with [`attach_ratio`].
    pub ratio: f64,
    /// Sum of squared per-frame information-bit error counts, kept so
    /// confidence intervals can be formed without rerunning.
    pub bit_errors_sq_sum: u64,
    /// Mean and standard deviation of the EMS configuration count per
    /// decoding iteration (0 for decoders without a configuration search).
    pub ems_configs_per_iter_mean: f64,
    pub ems_configs_per_iter_stddev: f64,
}

/// A finished run: where it came from and what it measured.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub label: String,
    pub seed: u64,
    pub fingerprint: String,
    pub rows: Vec<ResultRow>,
}

#[derive(Debug, Default, Clone, Copy)]
struct PointTally {
    frames: u64,
    bit_errors: u64,
    bit_errors_sq: u64,
    symbol_errors: u64,
    frame_errors: u64,
    iterations: u64,
    ops: OpCounts,
    ems_iterations: u64,
    ems_configs: u64,
    ems_configs_sq: u64,
}

impl PointTally {
    fn merge(mut self, other: PointTally) -> PointTally {
        self.frames += other.frames;
        self.bit_errors += other.bit_errors;
        self.bit_errors_sq += other.bit_errors_sq;
        self.symbol_errors += other.symbol_errors;
        self.frame_errors += other.frame_errors;
        self.iterations += other.iterations;
        self.ops += other.ops;
        self.ems_iterations += other.ems_iterations;
        self.ems_configs += other.ems_configs;
        self.ems_configs_sq += other.ems_configs_sq;
        self
    }

    fn into_row(self, ebn0_db: f64, info_symbols: usize, bits_per_symbol: u32) -> ResultRow {
        let frames = self.frames as f64;
        let info_bits = (info_symbols as u64 * u64::from(bits_per_symbol)) as f64;
        let (ems_mean, ems_sd) = if self.ems_iterations > 0 {
            let n = self.ems_iterations as f64;
            let mean = self.ems_configs as f64 / n;
            let var = (self.ems_configs_sq as f64 / n - mean * mean).max(0.0);
            (mean, var.sqrt())
        } else {
            (0.0, 0.0)
        };
        ResultRow {
            ebn0_db,
            frames: self.frames,
            bit_errors: self.bit_errors,
            symbol_errors: self.symbol_errors,
            frame_errors: self.frame_errors,
            ber: self.bit_errors as f64 / (frames * info_bits),
            ser: self.symbol_errors as f64 / (frames * info_symbols as f64),
            fer: self.frame_errors as f64 / frames,
            mean_iterations: self.iterations as f64 / frames,
            mean_ops: MeanOps::from_sum(&self.ops, self.frames),
            ratio: 0.0,
            bit_errors_sq_sum: self.bit_errors_sq,
            ems_configs_per_iter_mean: ems_mean,
            ems_configs_per_iter_stddev: ems_sd,
        }
    }
}

/// Everything a frame worker needs, resolved once per run.
struct Resolved {
    code: SparseParityMatrix,
    encoder: Encoder,
    channel: IsiChannel,
    trellis: SectionalizedTrellis,
    quantizer: QuantizerConfig,
    schedule: ScheduleConfig,
    bits_per_symbol: u32,
    seed: u64,
}

fn resolve(config: &ExperimentConfig) -> Result<Resolved> {
    let code = config.load_code()?;
    let bits = code.field().m();
    let encoder = build_encoder(&code)?;
    if encoder.message_len() == 0 {
        return Err(Error::Code(
            "the parity-check matrix has full column rank; there is nothing to encode".into(),
        ));
    }
    let trellis = SectionalizedTrellis::new(&config.channel, bits);
    let quantizer = config.quantizer(bits)?;
    config.schedule.validate(&code)?;
    Ok(Resolved {
        code,
        encoder,
        channel: config.channel.clone(),
        trellis,
        quantizer,
        schedule: config.schedule,
        bits_per_symbol: bits,
        seed: config.seed,
    })
}

/// Resolves everything a run would need and reports the first configuration
/// error without simulating a single frame. Useful before printing headers or
/// starting a long companion run.
pub fn preflight(config: &ExperimentConfig) -> Result<()> {
    resolve(config).map(|_| ())
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream per (seed, point, frame); reordering workers cannot
/// change what any frame sees.
fn frame_rng(seed: u64, point: u64, frame: u64) -> ChaCha8Rng {
    let mut k = mix(seed ^ 0x9E37_79B9_7F4A_7C15);
    k = mix(k ^ point);
    k = mix(k ^ frame);
    ChaCha8Rng::seed_from_u64(k)
}

fn simulate_frame(r: &Resolved, point: u64, frame: u64, sigma: f64) -> Result<PointTally> {
    let mut rng = frame_rng(r.seed, point, frame);
    let q = r.code.field().q();
    let message: Vec<Symbol> = (0..r.encoder.message_len())
        .map(|_| rng.random_range(0..q) as Symbol)
        .collect();
    let v = r.encoder.encode(&message);
    let x = modulate_symbols(r.bits_per_symbol, &v);
    let y = r.channel.transmit(&x, sigma, &mut rng);
    let out = run_frame(&y, &r.code, &r.trellis, &r.quantizer, sigma, &r.schedule)?;

    let mut tally = PointTally {
        frames: 1,
        ..PointTally::default()
    };
    let mut frame_bits = 0u64;
    for (k, &col) in r.encoder.message_cols().iter().enumerate() {
        let diff = out.decoded[col] ^ message[k];
        if diff != 0 {
            tally.symbol_errors += 1;
            frame_bits += u64::from(diff.count_ones());
        }
    }
    tally.bit_errors = frame_bits;
    tally.bit_errors_sq = frame_bits * frame_bits;
    if out.decoded != v {
        tally.frame_errors = 1;
    }
    tally.iterations = out.iterations_used as u64;
    tally.ops = count_ops(&out);
    for it in &out.counters.per_iteration {
        if it.decoder.ems_configs > 0 {
            tally.ems_iterations += 1;
            tally.ems_configs += it.decoder.ems_configs;
            tally.ems_configs_sq += it.decoder.ems_configs * it.decoder.ems_configs;
        }
    }
    Ok(tally)
}

/// Runs the whole sweep, calling `on_row` as each point finishes.
///
/// Each point simulates frames in fixed batches until the frame budget is
/// exhausted or the frame-error budget is met; the estimators always divide
/// by the frames actually simulated.
pub fn run_experiment_streamed(
    config: &ExperimentConfig,
    mut on_row: impl FnMut(&ResultRow),
) -> Result<ExperimentReport> {
    let r = resolve(config)?;
    let rate = r.encoder.message_len() as f64 / r.code.num_cols() as f64;
    let mut rows = Vec::with_capacity(config.ebn0_db.len());
    for (point, &ebn0) in config.ebn0_db.iter().enumerate() {
        let sigma = snr_to_sigma(ebn0, rate);
        let mut tally = PointTally::default();
        while tally.frames < config.max_frames && tally.frame_errors < config.target_frame_errors
        {
            let start = tally.frames;
            let end = (start + BATCH).min(config.max_frames);
            let batch = (start..end)
                .into_par_iter()
                .map(|frame| simulate_frame(&r, point as u64, frame, sigma))
                .try_reduce(PointTally::default, |a, b| Ok(a.merge(b)))?;
            tally = tally.merge(batch);
        }
        let row = tally.into_row(ebn0, r.encoder.message_len(), r.bits_per_symbol);
        on_row(&row);
        rows.push(row);
    }
    Ok(ExperimentReport {
        label: config.label.clone(),
        seed: config.seed,
        fingerprint: config.fingerprint(),
        rows,
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_streamed(config, |_| {})
}

/// Fills in `ratio` on every candidate row from the baseline row at the
/// same Eb/N0. Points without a matching baseline point are an error.
pub fn attach_ratio(rows: &mut [ResultRow], baseline: &[ResultRow]) -> Result<()> {
    for row in rows.iter_mut() {
        let base = baseline
            .iter()
            .find(|b| b.ebn0_db == row.ebn0_db)
            .ok_or_else(|| {
                Error::Config(format!(
                    "baseline has no sweep point at {} dB",
                    row.ebn0_db
                ))
            })?;
        row.ratio = complexity_ratio(&row.mean_ops, &base.mean_ops)?;
    }
    Ok(())
}

/// Detector-only error rates over an uncoded random bit stream.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorRow {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub symbol_errors: u64,
    pub ber: f64,
    pub ser: f64,
}

/// Measures the configured detector alone: `sections` random symbols per
/// frame, no code, hard decisions from the detector output. Uncoded rate 1.
pub fn run_detector_only(
    config: &ExperimentConfig,
    sections: usize,
    frames: u64,
) -> Result<Vec<DetectorRow>> {
    if sections == 0 || frames == 0 {
        return Err(Error::Config(
            "detector measurement needs positive section and frame counts".into(),
        ));
    }
    let bits = match config.field_bits {
        Some(b) => b,
        // No explicit field: borrow it from the code the config names.
        None => config.load_code()?.field().m(),
    };
    let trellis = SectionalizedTrellis::new(&config.channel, bits);
    let quantizer = config.quantizer(bits)?;
    let q = 1usize << bits;
    let detector = config.schedule.detector;

    let mut rows = Vec::with_capacity(config.ebn0_db.len());
    for (point, &ebn0) in config.ebn0_db.iter().enumerate() {
        let sigma = snr_to_sigma(ebn0, 1.0);
        let (bit_errors, symbol_errors) = (0..frames)
            .into_par_iter()
            .map(|frame| {
                let mut rng = frame_rng(config.seed, point as u64, frame);
                let tx: Vec<Symbol> =
                    (0..sections).map(|_| rng.random_range(0..q) as Symbol).collect();
                let x = modulate_symbols(bits, &tx);
                let y = config.channel.transmit(&x, sigma, &mut rng);
                let decided = detect_sequence(detector, &trellis, &quantizer, &y, sigma, q);
                let mut bits_wrong = 0u64;
                let mut syms_wrong = 0u64;
                for (a, b) in decided.iter().zip(&tx) {
                    let diff = a ^ b;
                    if diff != 0 {
                        syms_wrong += 1;
                        bits_wrong += u64::from(diff.count_ones());
                    }
                }
                (bits_wrong, syms_wrong)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        let total_syms = (frames * sections as u64) as f64;
        rows.push(DetectorRow {
            ebn0_db: ebn0,
            frames,
            bit_errors,
            symbol_errors,
            ber: bit_errors as f64 / (total_syms * f64::from(bits)),
            ser: symbol_errors as f64 / total_syms,
        });
    }
    Ok(rows)
}

fn detect_sequence(
    detector: Detector,
    trellis: &SectionalizedTrellis,
    quantizer: &QuantizerConfig,
    y: &[f64],
    sigma: f64,
    q: usize,
) -> Vec<Symbol> {
    let mut scratch = OpCounts::default();
    let m = trellis.section_bits() as usize;
    let sections = y.len() / m;
    match detector {
        Detector::Viterbi | Detector::MaxLogMap => {
            let chan: Vec<Vec<i32>> = (0..sections)
                .map(|j| branch_possibilities(trellis, &y[j * m..(j + 1) * m], quantizer))
                .collect();
            let zeros = vec![vec![0i32; q]; sections];
            let metrics = assemble_branch_metrics(trellis, &chan, &zeros, &mut scratch);
            match detector {
                Detector::Viterbi => viterbi(trellis, &metrics, &mut scratch),
                _ => max_log_map(trellis, &metrics, &zeros, &mut scratch)
                    .iter()
                    .map(argmax_symbol)
                    .collect(),
            }
        }
        Detector::Bcjr => {
            let uniform = vec![vec![1.0 / q as f64; q]; sections];
            let out = bcjr(trellis, y, sigma, &uniform, &mut scratch);
            out.posteriors.iter().map(argmax_symbol_f64).collect()
        }
    }
}

fn argmax_symbol(v: &Vec<i32>) -> Symbol {
    let mut best = 0usize;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best as Symbol
}

fn argmax_symbol_f64(v: &Vec<f64>) -> Symbol {
    let mut best = 0usize;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best as Symbol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::config::ExperimentConfig;

    fn small_config(extra: &str) -> ExperimentConfig {
        let text = format!(
            "code = random\ncode_n = 24\ncode_col_weight = 2\ncode_row_weight = 4\n\
             field = 4\nchannel = dicode\ndetector = max-log-map\ndecoder = mu-ems\n\
             c = 1\nscale = 0.5\nmax_iterations = 8\n\
             max_frames = 64\ntarget_frame_errors = 1000\nseed = 3\n{extra}"
        );
        ExperimentConfig::parse(&text, "test").unwrap()
    }

    #[test]
    fn noiseless_points_have_zero_error_rates() {
        // 60 dB is effectively noiseless for this code length.
        let cfg = small_config("ebn0_db = 60\n");
        let report = run_experiment(&cfg).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.frames, 64);
        assert_eq!(row.bit_errors, 0);
        assert_eq!(row.symbol_errors, 0);
        assert_eq!(row.frame_errors, 0);
        assert_eq!(row.ber, 0.0);
        assert_eq!(row.ser, 0.0);
        assert_eq!(row.fer, 0.0);
        assert_eq!(row.mean_iterations, 1.0);
        assert!(row.mean_ops.int_add > 0.0);
        assert!(row.ems_configs_per_iter_mean > 0.0);
    }

    #[test]
    fn same_seed_reproduces_identical_rows() {
        let cfg = small_config("ebn0_db = 4\n");
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b, "same seed must reproduce the run bit for bit");
        let mut cfg2 = cfg.clone();
        cfg2.seed = 4;
        let c = run_experiment(&cfg2).unwrap();
        assert_ne!(a.rows, c.rows, "a different seed should change the sample");
    }

    #[test]
    fn error_budget_stops_early_but_counts_all_frames() {
        let mut cfg = small_config("ebn0_db = 0\n");
        cfg.max_frames = 100_000;
        cfg.target_frame_errors = 5;
        let report = run_experiment(&cfg).unwrap();
        let row = &report.rows[0];
        assert!(row.frame_errors >= 5, "0 dB on this code must produce errors");
        assert!(row.frames < 100_000, "the error budget should stop the point");
        assert_eq!(row.frames % 512, 0, "stopping happens on batch boundaries");
        assert!((row.fer - row.frame_errors as f64 / row.frames as f64).abs() < 1e-15);
    }

    #[test]
    fn ber_improves_with_snr() {
        let mut cfg = small_config("ebn0_db = 0, 8\n");
        cfg.max_frames = 1024;
        let report = run_experiment(&cfg).unwrap();
        let low = &report.rows[0];
        let high = &report.rows[1];
        assert!(
            low.ber > high.ber,
            "BER must drop over an 8 dB span: {} vs {}",
            low.ber,
            high.ber
        );
    }

    #[test]
    fn ratio_attaches_against_a_baseline() {
        let cfg = small_config("ebn0_db = 6\n");
        let mut report = run_experiment(&cfg).unwrap();
        let baseline = report.rows.clone();
        attach_ratio(&mut report.rows, &baseline).unwrap();
        assert!((report.rows[0].ratio - 1.0).abs() < 1e-12, "self ratio is 1");

        let mut halved = baseline.clone();
        halved[0].mean_ops = MeanOps {
            int_add: baseline[0].mean_ops.total() * 2.0,
            ..MeanOps::default()
        };
        let mut rows = baseline.clone();
        attach_ratio(&mut rows, &halved).unwrap();
        assert!((rows[0].ratio - 0.5).abs() < 1e-12, "half the ops gives 0.5");

        let mut zero = baseline.clone();
        zero[0].mean_ops = MeanOps::default();
        assert!(attach_ratio(&mut rows, &zero).is_err(), "zero baseline rejected");

        let mut shifted = baseline;
        shifted[0].ebn0_db += 1.0;
        assert!(attach_ratio(&mut rows, &shifted).is_err(), "points must line up");
    }

    #[test]
    fn detector_only_rates_fall_with_snr() {
        let cfg = small_config("ebn0_db = 2, 10\n");
        let rows = run_detector_only(&cfg, 32, 200).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].ber > rows[1].ber);
        assert!(rows[1].ber < 1e-2, "10 dB uncoded dicode should be nearly clean");
        assert!(rows[0].ser >= rows[0].ber, "a symbol error is at least one bit");
    }

    #[test]
    fn full_rank_code_is_rejected() {
        // A square invertible matrix has no message positions.
        let text = "code = random\ncode_n = 4\ncode_col_weight = 1\ncode_row_weight = 1\n\
                    field = 2\nchannel = dicode\ndetector = max-log-map\ndecoder = mu-ems\n\
                    c = 0\nebn0_db = 4\n";
        let cfg = ExperimentConfig::parse(text, "test").unwrap();
        assert!(run_experiment(&cfg).is_err());
    }
}
