//! Joint detection/decoding schedules on the normal graph.
//!
//! Two schedules exist. In the iterative one the detector and decoder
//! alternate, exchanging extrinsic messages, until the hard decision
//! satisfies every check or the iteration budget runs out. In the one-shot
//! schedule the detector runs a single time and only the decoder iterates on
//! its frozen output.
//!
//! Three detector/decoder pairings are supported, and nothing else: the
//! integer max-log-MAP detector with an X-EMS decoder, the floating-point
//! BCJR with QSPA (the benchmark pair, run on true probabilities), and the
//! Viterbi detector with the hard-decision GMLGD.

use crate::bench::counters::{FrameCounters, IterationCounts, OpCounts};
use crate::channel::SectionalizedTrellis;
use crate::code::SparseParityMatrix;
use crate::decode::{
    cnode_ems, cnode_qspa, gmlgd_extrinsic, gmlgd_update, permute_to_check, permute_to_variable,
    vnode_decide, vnode_decide_pmf, vnode_to_hnode, vnode_to_hnode_pmf, vnode_to_tnode,
    vnode_to_tnode_pmf, EmsConfig, GmlgdState, TruncationRule,
};
use crate::detect::{assemble_branch_metrics, bcjr, max_log_map, viterbi};
use crate::error::{Error, Result};
use crate::gf::Symbol;
use crate::metrics::{branch_possibilities, PossibilityVector, QuantizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    Viterbi,
    MaxLogMap,
    Bcjr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decoder {
    Qspa,
    Ems(EmsConfig),
    Gmlgd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleMode {
    /// One detection pass, then decoder-only iterations.
    Once,
    /// Detector and decoder alternate with extrinsic feedback.
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConfig {
    pub detector: Detector,
    pub decoder: Decoder,
    pub mode: ScheduleMode,
    /// Outer iteration budget of the iterative schedule.
    pub max_iterations: usize,
    /// Decoder sweep budget of the one-shot schedule.
    pub inner_iterations: usize,
}

impl ScheduleConfig {
    /// Short name of the decoder rule, as used in configs and reports.
    pub fn decoder_label(&self) -> &'static str {
        match self.decoder {
            Decoder::Qspa => "qspa",
            Decoder::Gmlgd => "gmlgd",
            Decoder::Ems(cfg) => match cfg.branch_rule {
                TruncationRule::M { .. } => "m-ems",
                TruncationRule::T { .. } => "t-ems",
                TruncationRule::D { .. } => "d-ems",
                TruncationRule::Mu { .. } => "mu-ems",
            },
        }
    }

    pub fn detector_label(&self) -> &'static str {
        match self.detector {
            Detector::Viterbi => "viterbi",
            Detector::MaxLogMap => "max-log-map",
            Detector::Bcjr => "bcjr",
        }
    }

    /// Rejects unsupported pairings and structural mismatches before any
    /// frame work starts.
    pub fn validate(&self, code: &SparseParityMatrix) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::Schedule("iteration budget must be at least 1".into()));
        }
        match (self.detector, &self.decoder) {
            (Detector::MaxLogMap, Decoder::Ems(cfg)) => cfg.validate()?,
            (Detector::Bcjr, Decoder::Qspa) => {}
            (Detector::Viterbi, Decoder::Gmlgd) => {
                if self.mode == ScheduleMode::Once {
                    return Err(Error::Schedule(
                        "the hard-decision pair only works iteratively: its feedback acts \
                         through re-detection"
                            .into(),
                    ));
                }
                if !code.is_majority_logic_decodable() {
                    return Err(Error::Schedule(
                        "gmlgd needs a majority-logic decodable code (no two rows or columns \
                         may share more than one position)"
                            .into(),
                    ));
                }
            }
            _ => {
                return Err(Error::Schedule(format!(
                    "unsupported detector/decoder pairing: {} with {} (supported: \
                     max-log-map with an EMS rule, bcjr with qspa, viterbi with gmlgd)",
                    self.detector_label(),
                    self.decoder_label(),
                )));
            }
        }
        if !matches!(self.decoder, Decoder::Gmlgd) {
            if let Some(i) = (0..code.num_rows()).find(|&i| code.row(i).len() < 2) {
                return Err(Error::Code(format!(
                    "row {i} has degree {} but the check update needs at least 2",
                    code.row(i).len()
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    pub decoded: Vec<Symbol>,
    /// True only if the decision satisfies every check.
    pub converged: bool,
    /// Outer iterations executed (iterative), or decoder sweeps used (once;
    /// 0 when the detection alone already satisfies the checks).
    pub iterations_used: usize,
    pub counters: FrameCounters,
}

/// Positions of each edge in both adjacency directions: for column j's e-th
/// entry, `row_slot[j][e]` is its index within the row's entry list, and
/// vice versa.
struct EdgeIndex {
    row_slot: Vec<Vec<usize>>,
    col_slot: Vec<Vec<usize>>,
}

impl EdgeIndex {
    fn new(code: &SparseParityMatrix) -> Self {
        let row_slot = (0..code.num_cols())
            .map(|j| {
                code.col(j)
                    .iter()
                    .map(|&(i, _)| {
                        code.row(i)
                            .iter()
                            .position(|&(jj, _)| jj == j)
                            .expect("adjacency lists agree")
                    })
                    .collect()
            })
            .collect();
        let col_slot = (0..code.num_rows())
            .map(|i| {
                code.row(i)
                    .iter()
                    .map(|&(j, _)| {
                        code.col(j)
                            .iter()
                            .position(|&(ii, _)| ii == i)
                            .expect("adjacency lists agree")
                    })
                    .collect()
            })
            .collect();
        EdgeIndex { row_slot, col_slot }
    }
}

fn quantized_channel_sections(
    y: &[f64],
    trellis: &SectionalizedTrellis,
    quantizer: &QuantizerConfig,
) -> Vec<Vec<i32>> {
    let m = trellis.section_bits() as usize;
    assert_eq!(y.len() % m, 0, "received length must be a whole number of sections");
    (0..y.len() / m)
        .map(|j| branch_possibilities(trellis, &y[j * m..(j + 1) * m], quantizer))
        .collect()
}

fn syndrome_is_zero(code: &SparseParityMatrix, v: &[Symbol]) -> bool {
    code.syndrome(v).iter().all(|&s| s == 0)
}

/// Saturating cap on an exchanged possibility vector. Node updates can push
/// sums past the quantizer ceiling; without this the detector-decoder loop
/// has positive feedback and a stubborn frame grows its metrics without
/// bound. A hardware saturating adder would do this for free, so no
/// operation is charged.
fn saturate(v: &mut [i32], cap: i32) {
    for entry in v.iter_mut() {
        if *entry > cap {
            *entry = cap;
        }
    }
}

/// One decoder sweep on the integer path: variable updates, permutations,
/// EMS check updates, decision and trellis feedback. Returns the decision
/// and whether it satisfies all checks; `v_to_t` is overwritten with the new
/// feedback.
///
/// Extrinsics leaving the check nodes and the trellis feedback saturate at
/// `cap` (the quantizer ceiling), so everything a node receives is bounded
/// by its degree times the ceiling. Variable-node sums may exceed the
/// ceiling transiently; clamping those too would erase the ordering among
/// confident symbols.
#[allow(clippy::too_many_arguments)]
fn ems_sweep(
    code: &SparseParityMatrix,
    edges: &EdgeIndex,
    det_out: &[PossibilityVector],
    cfg: &EmsConfig,
    cap: i32,
    h_to_v: &mut [Vec<PossibilityVector>],
    v_to_t: &mut [PossibilityVector],
    counts: &mut OpCounts,
) -> Result<(Vec<Symbol>, bool)> {
    let field = code.field();
    let n = code.num_cols();

    let mut to_check: Vec<Vec<PossibilityVector>> = (0..code.num_rows())
        .map(|i| vec![Vec::new(); code.row(i).len()])
        .collect();
    for j in 0..n {
        for (e, &(i, hij)) in code.col(j).iter().enumerate() {
            let msg = vnode_to_hnode(&det_out[j], &h_to_v[j], e, counts);
            to_check[i][edges.row_slot[j][e]] = permute_to_check(field, &msg, hij, counts);
        }
    }
    for i in 0..code.num_rows() {
        let out = cnode_ems(field, &to_check[i], cfg, counts)?;
        for (slot, &(j, hij)) in code.row(i).iter().enumerate() {
            let mut ext = permute_to_variable(field, &out[slot], hij, counts);
            saturate(&mut ext, cap);
            h_to_v[j][edges.col_slot[i][slot]] = ext;
        }
    }

    let mut v_hat = vec![0; n];
    for j in 0..n {
        let (total, decision) = vnode_decide(&det_out[j], &h_to_v[j], counts);
        v_hat[j] = decision;
        v_to_t[j] = vnode_to_tnode(&total, &det_out[j], counts);
        saturate(&mut v_to_t[j], cap);
    }
    let ok = syndrome_is_zero(code, &v_hat);
    Ok((v_hat, ok))
}

/// One decoder sweep on the probability path (QSPA).
fn qspa_sweep(
    code: &SparseParityMatrix,
    edges: &EdgeIndex,
    det_out: &[Vec<f64>],
    h_to_v: &mut [Vec<Vec<f64>>],
    v_to_t: &mut [Vec<f64>],
    counts: &mut OpCounts,
) -> (Vec<Symbol>, bool) {
    let field = code.field();
    let q = field.q();
    let n = code.num_cols();

    let mut to_check: Vec<Vec<Vec<f64>>> = (0..code.num_rows())
        .map(|i| vec![Vec::new(); code.row(i).len()])
        .collect();
    for j in 0..n {
        for (e, &(i, hij)) in code.col(j).iter().enumerate() {
            let msg = vnode_to_hnode_pmf(&det_out[j], &h_to_v[j], e, counts);
            to_check[i][edges.row_slot[j][e]] = permute_to_check(field, &msg, hij, counts);
        }
    }
    for i in 0..code.num_rows() {
        let out = cnode_qspa(field, &to_check[i], counts);
        for (slot, &(j, hij)) in code.row(i).iter().enumerate() {
            h_to_v[j][edges.col_slot[i][slot]] =
                permute_to_variable(field, &out[slot], hij, counts);
        }
    }

    let mut v_hat = vec![0; n];
    for j in 0..n {
        let (_, decision) = vnode_decide_pmf(&det_out[j], &h_to_v[j]);
        v_hat[j] = decision;
        v_to_t[j] = vnode_to_tnode_pmf(q, &h_to_v[j]);
    }
    let ok = syndrome_is_zero(code, &v_hat);
    (v_hat, ok)
}

/// Iterative schedule for the soft pairings (max-log-MAP with EMS, BCJR with
/// QSPA): detect, sweep the decoder once, decide, stop on a zero syndrome.
///
/// `sigma` is consumed only by the BCJR benchmark detector; the integer path
/// never sees the noise variance.
pub fn run_soft_joint(
    y: &[f64],
    code: &SparseParityMatrix,
    trellis: &SectionalizedTrellis,
    quantizer: &QuantizerConfig,
    sigma: f64,
    schedule: &ScheduleConfig,
) -> Result<FrameResult> {
    schedule.validate(code)?;
    let edges = EdgeIndex::new(code);
    let n = code.num_cols();
    let q = code.field().q();
    let mut counters = FrameCounters::default();

    match (schedule.detector, schedule.decoder) {
        (Detector::MaxLogMap, Decoder::Ems(cfg)) => {
            let chan = quantized_channel_sections(y, trellis, quantizer);
            assert_eq!(chan.len(), n, "one section per code symbol");
            let mut v_to_t: Vec<PossibilityVector> = vec![vec![0; q]; n];
            let mut h_to_v: Vec<Vec<PossibilityVector>> = (0..n)
                .map(|j| vec![vec![0; q]; code.col(j).len()])
                .collect();
            let mut last = vec![0; n];
            for l in 1..=schedule.max_iterations {
                let mut it = IterationCounts::default();
                let metrics = assemble_branch_metrics(trellis, &chan, &v_to_t, &mut it.detector);
                let det_out = max_log_map(trellis, &metrics, &v_to_t, &mut it.detector);
                let (v_hat, done) = ems_sweep(
                    code,
                    &edges,
                    &det_out,
                    &cfg,
                    quantizer.max_value(),
                    &mut h_to_v,
                    &mut v_to_t,
                    &mut it.decoder,
                )?;
                counters.push_iteration(it);
                last = v_hat;
                if done {
                    return Ok(FrameResult {
                        decoded: last,
                        converged: true,
                        iterations_used: l,
                        counters,
                    });
                }
            }
            Ok(FrameResult {
                decoded: last,
                converged: false,
                iterations_used: schedule.max_iterations,
                counters,
            })
        }
        (Detector::Bcjr, Decoder::Qspa) => {
            let mut v_to_t: Vec<Vec<f64>> = vec![vec![1.0 / q as f64; q]; n];
            let mut h_to_v: Vec<Vec<Vec<f64>>> = (0..n)
                .map(|j| vec![vec![1.0 / q as f64; q]; code.col(j).len()])
                .collect();
            let mut last = vec![0; n];
            for l in 1..=schedule.max_iterations {
                let mut it = IterationCounts::default();
                let det = bcjr(trellis, y, sigma, &v_to_t, &mut it.detector);
                let (v_hat, done) = qspa_sweep(
                    code,
                    &edges,
                    &det.extrinsics,
                    &mut h_to_v,
                    &mut v_to_t,
                    &mut it.decoder,
                );
                counters.push_iteration(it);
                last = v_hat;
                if done {
                    return Ok(FrameResult {
                        decoded: last,
                        converged: true,
                        iterations_used: l,
                        counters,
                    });
                }
            }
            Ok(FrameResult {
                decoded: last,
                converged: false,
                iterations_used: schedule.max_iterations,
                counters,
            })
        }
        _ => Err(Error::Schedule(
            "the soft schedule needs max-log-MAP with EMS or BCJR with QSPA".into(),
        )),
    }
}

/// One-shot schedule: a single detection pass, then decoder-only sweeps on
/// the frozen detector output. If the detection alone already satisfies the
/// checks, no sweep runs at all.
pub fn run_once_schedule(
    y: &[f64],
    code: &SparseParityMatrix,
    trellis: &SectionalizedTrellis,
    quantizer: &QuantizerConfig,
    sigma: f64,
    schedule: &ScheduleConfig,
) -> Result<FrameResult> {
    schedule.validate(code)?;
    let edges = EdgeIndex::new(code);
    let n = code.num_cols();
    let q = code.field().q();
    let mut counters = FrameCounters::default();

    match (schedule.detector, schedule.decoder) {
        (Detector::MaxLogMap, Decoder::Ems(cfg)) => {
            let chan = quantized_channel_sections(y, trellis, quantizer);
            let zero_priors: Vec<PossibilityVector> = vec![vec![0; q]; n];
            let mut detection = IterationCounts::default();
            let metrics =
                assemble_branch_metrics(trellis, &chan, &zero_priors, &mut detection.detector);
            let det_out = max_log_map(trellis, &metrics, &zero_priors, &mut detection.detector);
            counters.push_iteration(detection);

            let mut v_hat: Vec<Symbol> = Vec::with_capacity(n);
            for out in &det_out {
                let (_, d) = vnode_decide(out, &[], &mut OpCounts::default());
                v_hat.push(d);
            }
            if syndrome_is_zero(code, &v_hat) {
                return Ok(FrameResult {
                    decoded: v_hat,
                    converged: true,
                    iterations_used: 0,
                    counters,
                });
            }

            let mut v_to_t: Vec<PossibilityVector> = vec![vec![0; q]; n];
            let mut h_to_v: Vec<Vec<PossibilityVector>> = (0..n)
                .map(|j| vec![vec![0; q]; code.col(j).len()])
                .collect();
            for l in 1..=schedule.inner_iterations {
                let mut it = IterationCounts::default();
                let (decided, done) = ems_sweep(
                    code,
                    &edges,
                    &det_out,
                    &cfg,
                    quantizer.max_value(),
                    &mut h_to_v,
                    &mut v_to_t,
                    &mut it.decoder,
                )?;
                counters.push_iteration(it);
                v_hat = decided;
                if done {
                    return Ok(FrameResult {
                        decoded: v_hat,
                        converged: true,
                        iterations_used: l,
                        counters,
                    });
                }
            }
            Ok(FrameResult {
                decoded: v_hat,
                converged: false,
                iterations_used: schedule.inner_iterations,
                counters,
            })
        }
        (Detector::Bcjr, Decoder::Qspa) => {
            let uniform: Vec<Vec<f64>> = vec![vec![1.0 / q as f64; q]; n];
            let mut detection = IterationCounts::default();
            let det = bcjr(trellis, y, sigma, &uniform, &mut detection.detector);
            counters.push_iteration(detection);

            let mut v_hat: Vec<Symbol> = Vec::with_capacity(n);
            for out in &det.extrinsics {
                let (_, d) = vnode_decide_pmf(out, &[]);
                v_hat.push(d);
            }
            if syndrome_is_zero(code, &v_hat) {
                return Ok(FrameResult {
                    decoded: v_hat,
                    converged: true,
                    iterations_used: 0,
                    counters,
                });
            }

            let mut v_to_t: Vec<Vec<f64>> = vec![vec![1.0 / q as f64; q]; n];
            let mut h_to_v: Vec<Vec<Vec<f64>>> = (0..n)
                .map(|j| vec![vec![1.0 / q as f64; q]; code.col(j).len()])
                .collect();
            for l in 1..=schedule.inner_iterations {
                let mut it = IterationCounts::default();
                let (decided, done) = qspa_sweep(
                    code,
                    &edges,
                    &det.extrinsics,
                    &mut h_to_v,
                    &mut v_to_t,
                    &mut it.decoder,
                );
                counters.push_iteration(it);
                v_hat = decided;
                if done {
                    return Ok(FrameResult {
                        decoded: v_hat,
                        converged: true,
                        iterations_used: l,
                        counters,
                    });
                }
            }
            Ok(FrameResult {
                decoded: v_hat,
                converged: false,
                iterations_used: schedule.inner_iterations,
                counters,
            })
        }
        _ => Err(Error::Schedule(
            "the one-shot schedule needs a soft detector/decoder pairing".into(),
        )),
    }
}

/// Iterative hard-decision schedule: Viterbi detection on counter-based
/// priors, syndrome check, then one round of check votes into the counters.
pub fn run_hard_joint(
    y: &[f64],
    code: &SparseParityMatrix,
    trellis: &SectionalizedTrellis,
    quantizer: &QuantizerConfig,
    schedule: &ScheduleConfig,
) -> Result<FrameResult> {
    schedule.validate(code)?;
    if !matches!(
        (schedule.detector, schedule.decoder),
        (Detector::Viterbi, Decoder::Gmlgd)
    ) {
        return Err(Error::Schedule(
            "the hard schedule is Viterbi with gmlgd only".into(),
        ));
    }
    let n = code.num_cols();
    let q = code.field().q();
    let chan = quantized_channel_sections(y, trellis, quantizer);
    assert_eq!(chan.len(), n, "one section per code symbol");

    let mut counters = FrameCounters::default();
    let mut state = GmlgdState::new(n, q);
    let mut last = vec![0; n];
    for l in 1..=schedule.max_iterations {
        let mut it = IterationCounts::default();
        // The counter priors belong to the decoder, so their addition into
        // the branch metrics is charged there.
        let metrics = assemble_branch_metrics(trellis, &chan, state.counters(), &mut it.decoder);
        let v_hat = viterbi(trellis, &metrics, &mut it.detector);
        last = v_hat;
        let syndrome = code.syndrome(&last);
        if syndrome.iter().all(|&s| s == 0) {
            counters.push_iteration(it);
            return Ok(FrameResult {
                decoded: last,
                converged: true,
                iterations_used: l,
                counters,
            });
        }
        let votes = gmlgd_extrinsic(code, &last, &syndrome, &mut it.decoder);
        gmlgd_update(&mut state, &votes, &mut it.decoder);
        counters.push_iteration(it);
    }
    Ok(FrameResult {
        decoded: last,
        converged: false,
        iterations_used: schedule.max_iterations,
        counters,
    })
}

/// Runs one frame under whatever the schedule asks for.
pub fn run_frame(
    y: &[f64],
    code: &SparseParityMatrix,
    trellis: &SectionalizedTrellis,
    quantizer: &QuantizerConfig,
    sigma: f64,
    schedule: &ScheduleConfig,
) -> Result<FrameResult> {
    match (schedule.mode, &schedule.decoder) {
        (_, Decoder::Gmlgd) => run_hard_joint(y, code, trellis, quantizer, schedule),
        (ScheduleMode::Iterative, _) => {
            run_soft_joint(y, code, trellis, quantizer, sigma, schedule)
        }
        (ScheduleMode::Once, _) => run_once_schedule(y, code, trellis, quantizer, sigma, schedule),
    }
}
