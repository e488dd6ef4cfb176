//! Decoder-side node computations on the normal graph: variable-node sums,
//! edge permutations by the parity-check coefficients, the EMS check-node
//! update under four message-truncation rules, the QSPA benchmark check
//! node, and the hard-decision GMLGD vote machinery.
//!
//! Integer messages are possibility vectors (larger = more likely, minimum
//! renormalized to 0 after every node update). The QSPA path runs on plain
//! probability vectors instead.

use crate::bench::counters::OpCounts;
use crate::code::SparseParityMatrix;
use crate::error::{Error, Result};
use crate::gf::{FieldTable, Symbol};
use crate::metrics::{normalize_min_zero, PossibilityVector};

/// Sentinel for field-sum states the truncated search cannot reach.
const UNREACHABLE: i32 = i32::MIN;

/// Rounds `numer / denom` to the nearest integer, halves away from zero.
/// `denom` must be positive.
fn div_round_half_away(numer: i64, denom: i64) -> i64 {
    debug_assert!(denom > 0);
    if numer >= 0 {
        (2 * numer + denom) / (2 * denom)
    } else {
        -((2 * -numer + denom) / (2 * denom))
    }
}

/// Exact rational scaling factor in (0, 1], applied with half-away-from-zero
/// rounding so the message pipeline stays integer-only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scale {
    num: u32,
    den: u32,
}

impl Scale {
    pub const ONE: Scale = Scale { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::Config(format!(
                "scale must be a rational in (0, 1], got {num}/{den}"
            )));
        }
        let g = gcd(num, den);
        Ok(Scale {
            num: num / g,
            den: den / g,
        })
    }

    /// Accepts decimals (`0.75`, `1`) and fractions (`3/4`).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("`{s}` is not a valid scale"));
        if let Some((a, b)) = s.split_once('/') {
            let num: u32 = a.trim().parse().map_err(|_| bad())?;
            let den: u32 = b.trim().parse().map_err(|_| bad())?;
            return Scale::new(num, den);
        }
        match s.split_once('.') {
            None => {
                let whole: u32 = s.parse().map_err(|_| bad())?;
                Scale::new(whole, 1)
            }
            Some((whole, frac)) => {
                if frac.is_empty() || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                let whole: u32 = if whole.is_empty() {
                    0
                } else {
                    whole.parse().map_err(|_| bad())?
                };
                let den = 10u32.pow(frac.len() as u32);
                let frac_num: u32 = frac.parse().map_err(|_| bad())?;
                let num = whole
                    .checked_mul(den)
                    .and_then(|w| w.checked_add(frac_num))
                    .ok_or_else(bad)?;
                Scale::new(num, den)
            }
        }
    }

    pub fn numerator(&self) -> u32 {
        self.num
    }

    pub fn denominator(&self) -> u32 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    #[inline]
    pub fn apply(&self, v: i32) -> i32 {
        if self.is_one() {
            return v;
        }
        div_round_half_away(i64::from(v) * i64::from(self.num), i64::from(self.den)) as i32
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Message-truncation rules selecting the support F over which the check
/// node searches. M keeps a fixed count, T a fixed floor, D a fixed gap to
/// the maximum, and Mu an adaptive floor at the vector mean minus an offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationRule {
    M { count: usize },
    T { threshold: i32 },
    D { gap: i32 },
    Mu { offset: i32 },
}

impl TruncationRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TruncationRule::M { count } if count < 1 => {
                Err(Error::Config("M rule needs a count of at least 1".into()))
            }
            TruncationRule::D { gap } if gap < 0 => {
                Err(Error::Config("D rule needs a nonnegative gap".into()))
            }
            _ => Ok(()),
        }
    }

    /// A rule that keeps everything, for oracle comparisons.
    pub fn full_field() -> TruncationRule {
        TruncationRule::T { threshold: i32::MIN + 1 }
    }
}

/// Core selection over the present (index, value) pairs. `q_total` is the
/// field size; the Mu mean divides by it, counting absent entries as 0.
/// The maximum element (smallest index among ties) is always kept.
fn select_support(present: &[(usize, i32)], rule: &TruncationRule, q_total: usize) -> Vec<usize> {
    debug_assert!(!present.is_empty());
    let (argmax_idx, max_val) = present
        .iter()
        .fold((usize::MAX, i32::MIN), |(bi, bv), &(i, v)| {
            if v > bv || (v == bv && i < bi) {
                (i, v)
            } else {
                (bi, bv)
            }
        });

    let mut keep: Vec<usize> = match *rule {
        TruncationRule::M { count } => {
            let mut order: Vec<(usize, i32)> = present.to_vec();
            order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            order.truncate(count.max(1));
            order.into_iter().map(|(i, _)| i).collect()
        }
        TruncationRule::T { threshold } => present
            .iter()
            .filter(|&&(_, v)| v >= threshold)
            .map(|&(i, _)| i)
            .collect(),
        TruncationRule::D { gap } => present
            .iter()
            .filter(|&&(_, v)| max_val - v <= gap)
            .map(|&(i, _)| i)
            .collect(),
        TruncationRule::Mu { offset } => {
            let sum: i64 = present.iter().map(|&(_, v)| i64::from(v)).sum();
            let mu = div_round_half_away(sum, q_total as i64) - i64::from(offset);
            present
                .iter()
                .filter(|&&(_, v)| i64::from(v) >= mu)
                .map(|&(i, _)| i)
                .collect()
        }
    };
    if !keep.contains(&argmax_idx) {
        keep.push(argmax_idx);
    }
    keep.sort_unstable();
    keep
}

/// Support of a full message vector under a rule, as sorted field values.
pub fn truncate(msg: &[i32], rule: &TruncationRule) -> Vec<usize> {
    let present: Vec<(usize, i32)> = msg.iter().copied().enumerate().collect();
    select_support(&present, rule, msg.len())
}

/// Variable-to-check message: detector message plus every check-side message
/// except the receiving edge, renormalized to min 0.
///
/// Charged q integer additions per summed vector.
pub fn vnode_to_hnode(
    detector: &[i32],
    incoming: &[PossibilityVector],
    exclude: usize,
    counts: &mut OpCounts,
) -> PossibilityVector {
    let mut out = detector.to_vec();
    for (k, msg) in incoming.iter().enumerate() {
        if k == exclude {
            continue;
        }
        debug_assert_eq!(msg.len(), out.len());
        for (o, &v) in out.iter_mut().zip(msg) {
            *o += v;
        }
        counts.int_add += out.len() as u64;
    }
    normalize_min_zero(&mut out);
    out
}

/// Decision at a variable node: the total possibility (detector message plus
/// all check-side messages) and its argmax, ties to the smallest field value.
pub fn vnode_decide(
    detector: &[i32],
    incoming: &[PossibilityVector],
    counts: &mut OpCounts,
) -> (PossibilityVector, Symbol) {
    let mut total = detector.to_vec();
    for msg in incoming {
        for (t, &v) in total.iter_mut().zip(msg) {
            *t += v;
        }
        counts.int_add += total.len() as u64;
    }
    let mut best = 0usize;
    for (i, &v) in total.iter().enumerate() {
        if v > total[best] {
            best = i;
        }
    }
    (total, best as Symbol)
}

/// Extrinsic feedback to the trellis: total minus the detector's own
/// message, renormalized to min 0.
pub fn vnode_to_tnode(
    total: &[i32],
    detector: &[i32],
    counts: &mut OpCounts,
) -> PossibilityVector {
    let mut out: Vec<i32> = total.iter().zip(detector).map(|(&t, &d)| t - d).collect();
    counts.int_add += out.len() as u64;
    normalize_min_zero(&mut out);
    out
}

/// Permutation toward the check node: the mass of x moves to y = h x, so
/// out[y] = in[h^{-1} y]. Works on integer and probability messages alike.
/// Charged q field operations (the q products); the inverse direction reuses
/// the same map for free.
pub fn permute_to_check<T: Copy + Default>(
    field: &FieldTable,
    msg: &[T],
    h: Symbol,
    counts: &mut OpCounts,
) -> Vec<T> {
    debug_assert_ne!(h, 0);
    let mut out = vec![T::default(); msg.len()];
    for (x, &v) in msg.iter().enumerate() {
        out[field.mul(h, x as Symbol) as usize] = v;
    }
    counts.field_ops += msg.len() as u64;
    out
}

/// Inverse permutation, back toward the variable node: out[x] = in[h x].
pub fn permute_to_variable<T: Copy>(
    field: &FieldTable,
    msg: &[T],
    h: Symbol,
    _counts: &mut OpCounts,
) -> Vec<T> {
    debug_assert_ne!(h, 0);
    (0..msg.len())
        .map(|x| msg[field.mul(h, x as Symbol) as usize])
        .collect()
}

/// Check-node configuration of the EMS search: how incoming supports and
/// intermediate partial-sum vectors are truncated, and the output scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmsConfig {
    /// Truncates each incoming message's support before the search.
    pub branch_rule: TruncationRule,
    /// Truncates the partial-sum vector after each merge step.
    pub state_rule: TruncationRule,
    /// Applied to the outgoing vectors before renormalization.
    pub scale: Scale,
}

impl EmsConfig {
    pub fn validate(&self) -> Result<()> {
        self.branch_rule.validate()?;
        self.state_rule.validate()
    }
}

/// Reachable (index, value) pairs of a partial-sum vector.
fn present_entries(vec: &[i32]) -> Vec<(usize, i32)> {
    vec.iter()
        .copied()
        .enumerate()
        .filter(|&(_, v)| v != UNREACHABLE)
        .collect()
}

/// One truncated merge step of the partial-sum search: extend `state` by one
/// edge whose message is `msg` restricted to `support`.
///
/// Every surviving (state, branch) candidate costs one integer addition (the
/// metric sum), one field operation (the index sum), one comparison (the
/// running max) and one configuration tick.
///
/// The partial sums are renormalized to min 0 before the state rule is
/// applied. The uniform shift cancels out of the final per-edge outputs, but
/// it keeps absolute thresholds (the T and Mu rules) meaningful against
/// vectors that would otherwise drift upward by one message magnitude per
/// step.
fn merge_step(
    field: &FieldTable,
    state: &[i32],
    msg: &[i32],
    support: &[usize],
    state_rule: &TruncationRule,
    counts: &mut OpCounts,
) -> Vec<i32> {
    let q = msg.len();
    let mut next = vec![UNREACHABLE; q];
    for (z, &sv) in state.iter().enumerate() {
        if sv == UNREACHABLE {
            continue;
        }
        for &y in support {
            counts.int_add += 1;
            counts.int_cmp += 1;
            counts.field_ops += 1;
            counts.ems_configs += 1;
            let target = field.add(z as Symbol, y as Symbol) as usize;
            let cand = sv + msg[y];
            if cand > next[target] {
                next[target] = cand;
            }
        }
    }
    let reached_min = next
        .iter()
        .copied()
        .filter(|&v| v != UNREACHABLE)
        .min()
        .unwrap_or(0);
    for v in next.iter_mut() {
        if *v != UNREACHABLE {
            *v -= reached_min;
        }
    }
    let present = present_entries(&next);
    let keep = select_support(&present, state_rule, q);
    let mut truncated = vec![UNREACHABLE; q];
    for &i in &keep {
        truncated[i] = next[i];
    }
    truncated
}

/// EMS check-node update. For each edge e and output value y, the unscaled
/// output is the best metric sum over truncated assignments of the other
/// edges whose field values add to y; values the truncated search cannot
/// reach get the floor 0. The result is scaled and renormalized to min 0.
pub fn cnode_ems(
    field: &FieldTable,
    incoming: &[PossibilityVector],
    cfg: &EmsConfig,
    counts: &mut OpCounts,
) -> Result<Vec<PossibilityVector>> {
    let dc = incoming.len();
    if dc < 2 {
        return Err(Error::Code(format!(
            "check node needs degree at least 2, got {dc}"
        )));
    }
    let q = field.q();
    for msg in incoming {
        assert_eq!(msg.len(), q, "messages must cover the field");
    }
    let supports: Vec<Vec<usize>> = incoming
        .iter()
        .map(|m| truncate(m, &cfg.branch_rule))
        .collect();

    let mut delta = vec![UNREACHABLE; q];
    delta[0] = 0;

    // forward[e]: best partial sums over edges < e.
    let mut forward: Vec<Vec<i32>> = Vec::with_capacity(dc);
    forward.push(delta.clone());
    for e in 0..dc - 1 {
        let next = merge_step(
            field,
            &forward[e],
            &incoming[e],
            &supports[e],
            &cfg.state_rule,
            counts,
        );
        forward.push(next);
    }

    // backward[e]: best partial sums over edges >= e.
    let mut backward: Vec<Vec<i32>> = vec![Vec::new(); dc + 1];
    backward[dc] = delta;
    for e in (1..dc).rev() {
        backward[e] = merge_step(
            field,
            &backward[e + 1],
            &incoming[e],
            &supports[e],
            &cfg.state_rule,
            counts,
        );
    }

    let mut outputs = Vec::with_capacity(dc);
    for e in 0..dc {
        let mut out = vec![UNREACHABLE; q];
        for (z1, &fv) in forward[e].iter().enumerate() {
            if fv == UNREACHABLE {
                continue;
            }
            for (z2, &bv) in backward[e + 1].iter().enumerate() {
                if bv == UNREACHABLE {
                    continue;
                }
                counts.int_add += 1;
                counts.int_cmp += 1;
                counts.field_ops += 1;
                counts.ems_configs += 1;
                let y = field.add(z1 as Symbol, z2 as Symbol) as usize;
                let cand = fv + bv;
                if cand > out[y] {
                    out[y] = cand;
                }
            }
        }
        for v in out.iter_mut() {
            *v = if *v == UNREACHABLE {
                0
            } else {
                cfg.scale.apply(*v)
            };
        }
        normalize_min_zero(&mut out);
        outputs.push(out);
    }
    Ok(outputs)
}

/// QSPA check-node update on probability vectors: exact sum-product via
/// iterated pairwise convolution over the additive group of the field.
///
/// Charged per edge: 2q^2 real additions (the two convolutions' multiply-
/// accumulates), q real multiplications and q divisions (the output
/// normalization), matching the coarse per-edge accounting.
pub fn cnode_qspa(
    field: &FieldTable,
    incoming: &[Vec<f64>],
    counts: &mut OpCounts,
) -> Vec<Vec<f64>> {
    let dc = incoming.len();
    assert!(dc >= 2, "check node needs degree at least 2");
    let q = field.q();
    let convolve = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; q];
        for (z1, &av) in a.iter().enumerate() {
            if av == 0.0 {
                continue;
            }
            for (z2, &bv) in b.iter().enumerate() {
                out[field.add(z1 as Symbol, z2 as Symbol) as usize] += av * bv;
            }
        }
        out
    };

    let mut delta = vec![0.0; q];
    delta[0] = 1.0;
    let mut forward: Vec<Vec<f64>> = Vec::with_capacity(dc);
    forward.push(delta.clone());
    for e in 0..dc - 1 {
        forward.push(convolve(&forward[e], &incoming[e]));
    }
    let mut backward: Vec<Vec<f64>> = vec![Vec::new(); dc + 1];
    backward[dc] = delta;
    for e in (1..dc).rev() {
        backward[e] = convolve(&backward[e + 1], &incoming[e]);
    }

    (0..dc)
        .map(|e| {
            counts.real_add += 2 * (q as u64) * (q as u64);
            counts.real_mul += q as u64;
            counts.real_div += q as u64;
            let mut out = convolve(&forward[e], &backward[e + 1]);
            let sum: f64 = out.iter().sum();
            debug_assert!(sum > 0.0, "incoming pmfs cannot all vanish");
            for v in out.iter_mut() {
                *v /= sum;
            }
            out
        })
        .collect()
}

/// Variable-to-check message on the probability path: product of the
/// detector pmf and all check-side pmfs except the receiving edge,
/// normalized. Charged q multiplications and q divisions per edge.
pub fn vnode_to_hnode_pmf(
    detector: &[f64],
    incoming: &[Vec<f64>],
    exclude: usize,
    counts: &mut OpCounts,
) -> Vec<f64> {
    let mut out = detector.to_vec();
    for (k, msg) in incoming.iter().enumerate() {
        if k == exclude {
            continue;
        }
        for (o, &v) in out.iter_mut().zip(msg) {
            *o *= v;
        }
    }
    counts.real_mul += out.len() as u64;
    counts.real_div += out.len() as u64;
    let sum: f64 = out.iter().sum();
    // A zero product everywhere means contradictory messages; fall back to
    // uniform rather than poisoning the frame with NaN.
    if sum > 0.0 {
        for v in out.iter_mut() {
            *v /= sum;
        }
    } else {
        let u = 1.0 / out.len() as f64;
        for v in out.iter_mut() {
            *v = u;
        }
    }
    out
}

/// Decision on the probability path: total pmf (up to normalization) and its
/// argmax, ties to the smallest field value.
pub fn vnode_decide_pmf(detector: &[f64], incoming: &[Vec<f64>]) -> (Vec<f64>, Symbol) {
    let mut total = detector.to_vec();
    for msg in incoming {
        for (t, &v) in total.iter_mut().zip(msg) {
            *t *= v;
        }
    }
    let mut best = 0usize;
    for (i, &v) in total.iter().enumerate() {
        if v > total[best] {
            best = i;
        }
    }
    (total, best as Symbol)
}

/// Probability-path feedback to the trellis: product of the check-side pmfs
/// only (the detector's own message excluded), normalized.
pub fn vnode_to_tnode_pmf(q: usize, incoming: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![1.0; q];
    for msg in incoming {
        for (o, &v) in out.iter_mut().zip(msg) {
            *o *= v;
        }
    }
    let sum: f64 = out.iter().sum();
    if sum > 0.0 {
        for v in out.iter_mut() {
            *v /= sum;
        }
    } else {
        let u = 1.0 / q as f64;
        for v in out.iter_mut() {
            *v = u;
        }
    }
    out
}

/// Per-symbol vote counters of the hard-decision decoder. Counters only
/// grow; they double as the Viterbi symbol priors.
#[derive(Debug, Clone)]
pub struct GmlgdState {
    counters: Vec<PossibilityVector>,
}

impl GmlgdState {
    pub fn new(n: usize, q: usize) -> Self {
        GmlgdState {
            counters: vec![vec![0; q]; n],
        }
    }

    pub fn counters(&self) -> &[PossibilityVector] {
        &self.counters
    }

    pub fn total_mass(&self) -> i64 {
        self.counters
            .iter()
            .flat_map(|c| c.iter())
            .map(|&v| i64::from(v))
            .sum()
    }
}

/// Extrinsic vote of every check for every adjacent symbol:
/// sigma_{i->j} = h_{i,j}^{-1} s_i + v̂_j (characteristic 2). Returns one
/// vote per column entry, aligned with `h.col(j)`.
///
/// Charged 2q field operations per edge (the syndrome product and the
/// inverse-scaled offset, at counter-vector granularity).
pub fn gmlgd_extrinsic(
    h: &SparseParityMatrix,
    v_hat: &[Symbol],
    syndrome: &[Symbol],
    counts: &mut OpCounts,
) -> Vec<Vec<Symbol>> {
    let f = h.field();
    let q = f.q() as u64;
    (0..h.num_cols())
        .map(|j| {
            h.col(j)
                .iter()
                .map(|&(i, hij)| {
                    counts.field_ops += 2 * q;
                    let inv = f.inv(hij).expect("parity entries are nonzero");
                    f.add(f.mul(inv, syndrome[i]), v_hat[j])
                })
                .collect()
        })
        .collect()
}

/// Applies one round of votes: each vote increments its counter by exactly 1.
///
/// Charged one integer addition per vote and 2q field operations per edge
/// (counter maintenance at vector granularity).
pub fn gmlgd_update(state: &mut GmlgdState, votes: &[Vec<Symbol>], counts: &mut OpCounts) {
    assert_eq!(votes.len(), state.counters.len());
    for (j, column_votes) in votes.iter().enumerate() {
        let q = state.counters[j].len() as u64;
        for &vote in column_votes {
            counts.int_add += 1;
            counts.field_ops += 2 * q;
            state.counters[j][vote as usize] += 1;
        }
    }
}
