//! Joint detection and decoding of nonbinary LDPC codes over binary-input
//! intersymbol-interference channels.
//!
//! The receiver runs message passing on a normal graph whose nodes are the
//! channel trellis (one section per field symbol), the code symbols, the
//! parity-check edge scalings, and the checks. Detector-side messages are
//! integer "possibility" vectors: affine images of log-likelihoods quantized
//! to p bits, larger meaning more likely, minimum pinned at 0. The decoder
//! side offers the extended-min-sum family with four support-truncation
//! rules, plus two benchmarks (floating-point BCJR with QSPA) and a
//! hard-decision majority-logic voter.
//!
//! Module map:
//!
//! * [`gf`] — GF(2^m) tables, m ≤ 8.
//! * [`code`] — sparse parity-check matrices, alist I/O, encoding, random
//!   regular 4-cycle-free construction.
//! * [`channel`] — ISI tap models, BPSK mapping, the sectionalized trellis.
//! * [`metrics`] — the distance-to-integer quantizer and possibility
//!   vectors.
//! * [`detect`] — Viterbi, max-log-MAP and BCJR on the sectionalized
//!   trellis.
//! * [`decode`] — node operations: V/H/C-node updates (EMS and QSPA) and
//!   the majority-logic vote counters.
//! * [`joint`] — the two schedules wiring detector and decoder together.
//! * [`bench`] — Monte Carlo sweeps, operation counting, configs, CSV.
//! * [`cli`] — the `nbisi` binary.
//!
//! The `examples/` directory is the guided tour; each file is a runnable
//! walkthrough of one layer:
//!
//! * `field_arithmetic` — field tables and the symbol representation.
//! * `codes_and_alist` — building, saving and loading parity-check
//!   matrices; encoding.
//! * `trellis_walkthrough` — how a channel becomes a sectionalized trellis.
//! * `quantized_metrics` — from noisy samples to integer possibilities.
//! * `detectors` — the three detectors side by side on one frame.
//! * `soft_joint` — the iterative max-log-MAP/EMS receiver, step by step.
//! * `hard_joint` — Viterbi with majority-logic vote counters.
//! * `ber_sweep` — a small end-to-end Monte Carlo run producing a CSV.

pub mod bench;
pub mod channel;
pub mod cli;
pub mod code;
pub mod decode;
pub mod detect;
pub mod error;
pub mod gf;
pub mod joint;
pub mod metrics;

pub use bench::{ExperimentConfig, ExperimentReport, OpCounts, ResultRow};
pub use channel::{IsiChannel, SectionalizedTrellis};
pub use code::{build_encoder, load_alist, random_regular_code, Encoder, SparseParityMatrix};
pub use error::{Error, Result};
pub use gf::{FieldTable, Symbol};
pub use joint::{
    run_frame, run_hard_joint, run_once_schedule, run_soft_joint, Decoder, Detector, FrameResult,
    ScheduleConfig, ScheduleMode,
};
pub use metrics::{PossibilityVector, QuantizerConfig};
