//! Trellis detectors over the sectionalized trellis: integer Viterbi (hard
//! output), integer max-log-MAP (soft extrinsic output), and the
//! floating-point BCJR benchmark.
//!
//! The integer detectors consume assembled branch metrics
//! L_j(b) = L(channel) + L(prior of the branch symbol) and never see the
//! noise variance. Forward recursions start in state 0 (the -1 fill pins the
//! initial channel state); there is no termination, so backward recursions
//! start uniform over the final states.

use crate::bench::counters::OpCounts;
use crate::channel::SectionalizedTrellis;
use crate::gf::Symbol;
use crate::metrics::{normalize_min_zero, PossibilityVector};

/// Assembled integer metrics, indexed `[section][branch id]`.
pub type BranchMetricSet = Vec<Vec<i32>>;

/// Sentinel for unreachable states; far enough from 0 that legitimate path
/// metrics can never collide with it, close enough that adding a branch
/// metric cannot overflow.
const UNREACHED: i32 = i32::MIN / 4;

/// Adds each branch's symbol prior to its channel possibility value.
///
/// One integer addition per branch is charged to `counts`; callers attribute
/// the charge to the component that produced the priors (detector on the
/// soft path, decoder on the hard path).
pub fn assemble_branch_metrics(
    trellis: &SectionalizedTrellis,
    channel_values: &[Vec<i32>],
    priors: &[PossibilityVector],
    counts: &mut OpCounts,
) -> BranchMetricSet {
    assert_eq!(channel_values.len(), priors.len(), "one prior vector per section");
    let metrics: BranchMetricSet = channel_values
        .iter()
        .zip(priors)
        .map(|(chan, prior)| {
            assert_eq!(chan.len(), trellis.num_branches());
            assert_eq!(prior.len(), trellis.symbols_per_section());
            trellis
                .branches()
                .iter()
                .zip(chan)
                .map(|(b, &c)| c + prior[b.symbol as usize])
                .collect()
        })
        .collect();
    counts.int_add += (channel_values.len() * trellis.num_branches()) as u64;
    metrics
}

/// Maximum-metric sequence search. Returns the symbol labeling of the best
/// path from state 0 with a free final state; ties fall to the smaller
/// origin state, then the smaller symbol, and at the end of the block to
/// the smaller final state.
///
/// Charged per section: one comparison per branch and one addition per
/// destination state (the survivor extension).
pub fn viterbi(
    trellis: &SectionalizedTrellis,
    metrics: &BranchMetricSet,
    counts: &mut OpCounts,
) -> Vec<Symbol> {
    let num_states = trellis.num_states();
    let n = metrics.len();
    let mut alpha = vec![UNREACHED; num_states];
    alpha[0] = 0;
    let mut survivors: Vec<Vec<usize>> = Vec::with_capacity(n);

    for section in metrics {
        let mut next = vec![UNREACHED; num_states];
        let mut choice = vec![usize::MAX; num_states];
        // Branch id order is (origin, symbol) ascending; with a strict
        // comparison the first candidate wins ties, which is the tie rule.
        for (id, b) in trellis.branches().iter().enumerate() {
            counts.int_cmp += 1;
            if alpha[b.from] == UNREACHED {
                continue;
            }
            let cand = alpha[b.from] + section[id];
            if cand > next[b.to] {
                next[b.to] = cand;
                choice[b.to] = id;
            }
        }
        counts.int_add += num_states as u64;
        survivors.push(choice);
        alpha = next;
    }

    let mut end_state = 0;
    for (s, &metric) in alpha.iter().enumerate() {
        if metric > alpha[end_state] {
            end_state = s;
        }
    }
    let mut symbols = vec![0; n];
    let mut state = end_state;
    for j in (0..n).rev() {
        let id = survivors[j][state];
        debug_assert_ne!(id, usize::MAX, "traceback hit an unreached state");
        symbols[j] = trellis.branch(id).symbol;
        state = trellis.branch(id).from;
    }
    symbols
}

/// Path metric of a given symbol sequence from state 0 (used for reporting
/// and oracle comparison).
pub fn path_metric(
    trellis: &SectionalizedTrellis,
    metrics: &BranchMetricSet,
    symbols: &[Symbol],
) -> i32 {
    let mut state = 0;
    let mut total = 0;
    for (j, &v) in symbols.iter().enumerate() {
        let id = trellis.branch_id(state, v);
        total += metrics[j][id];
        state = trellis.branch(id).to;
    }
    total
}

/// Integer max-log-MAP. For each section and symbol value, the output is the
/// best total path metric among paths using that symbol there, minus the
/// symbol's own prior (the extrinsic convention: the channel term stays in),
/// shifted so each section's minimum is 0.
///
/// Charged per branch per section: one addition and one comparison in each
/// of the forward, backward and completion passes. The fourth addition per
/// branch lives in [`assemble_branch_metrics`].
pub fn max_log_map(
    trellis: &SectionalizedTrellis,
    metrics: &BranchMetricSet,
    priors: &[PossibilityVector],
    counts: &mut OpCounts,
) -> Vec<PossibilityVector> {
    let num_states = trellis.num_states();
    let q = trellis.symbols_per_section();
    let n = metrics.len();
    assert_eq!(priors.len(), n);

    // Forward values plus the cached per-branch sums alpha[from] + metric,
    // which the completion pass reuses.
    let mut alpha = vec![UNREACHED; num_states];
    alpha[0] = 0;
    let mut cached: Vec<Vec<i32>> = Vec::with_capacity(n);
    for section in metrics {
        let mut sums = vec![UNREACHED; trellis.num_branches()];
        let mut next = vec![UNREACHED; num_states];
        for (id, b) in trellis.branches().iter().enumerate() {
            counts.int_add += 1;
            counts.int_cmp += 1;
            if alpha[b.from] == UNREACHED {
                continue;
            }
            let s = alpha[b.from] + section[id];
            sums[id] = s;
            if s > next[b.to] {
                next[b.to] = s;
            }
        }
        cached.push(sums);
        alpha = next;
    }

    // Backward from a uniform final distribution, completing each section's
    // output as soon as its beta values are at hand.
    let mut beta = vec![0i32; num_states];
    let mut output = vec![Vec::new(); n];
    for j in (0..n).rev() {
        let mut out = vec![UNREACHED; q];
        let mut prev = vec![UNREACHED; num_states];
        for (id, b) in trellis.branches().iter().enumerate() {
            counts.int_add += 2;
            counts.int_cmp += 2;
            if beta[b.to] != UNREACHED && cached[j][id] != UNREACHED {
                let full = cached[j][id] + beta[b.to];
                if full > out[b.symbol as usize] {
                    out[b.symbol as usize] = full;
                }
            }
            if beta[b.to] != UNREACHED {
                let s = beta[b.to] + metrics[j][id];
                if s > prev[b.from] {
                    prev[b.from] = s;
                }
            }
        }
        for (v, o) in out.iter_mut().enumerate() {
            debug_assert_ne!(*o, UNREACHED, "every symbol is reachable in a full trellis");
            *o -= priors[j][v];
        }
        normalize_min_zero(&mut out);
        output[j] = out;
        beta = prev;
    }
    output
}

/// BCJR output: exact per-section posteriors and the extrinsic pmfs that
/// exclude each section's own prior.
#[derive(Debug, Clone)]
pub struct BcjrOutput {
    pub posteriors: Vec<Vec<f64>>,
    pub extrinsics: Vec<Vec<f64>>,
}

/// log(exp(a) + exp(b)) tolerating negative infinities.
#[inline]
fn logsumexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Floating-point BCJR benchmark detector with true Gaussian branch
/// likelihoods, computed in the log domain.
///
/// Charged per branch per section in the probability-domain reading: one
/// multiplication and one accumulation forward, the same backward, and two
/// multiplications plus one accumulation in the completion.
pub fn bcjr(
    trellis: &SectionalizedTrellis,
    y: &[f64],
    sigma: f64,
    priors: &[Vec<f64>],
    counts: &mut OpCounts,
) -> BcjrOutput {
    let m = trellis.section_bits() as usize;
    assert_eq!(y.len() % m, 0, "received length must be a whole number of sections");
    let n = y.len() / m;
    assert_eq!(priors.len(), n, "one prior pmf per section");
    let num_states = trellis.num_states();
    let q = trellis.symbols_per_section();
    // A vanishing sigma would zero the divisor; the clamp keeps the
    // likelihoods finite and the argmax unchanged.
    let sigma = sigma.max(1e-6);
    let inv_two_var = 1.0 / (2.0 * sigma * sigma);

    // Per-section, per-branch channel log-likelihoods.
    let chan_ll: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let section = &y[j * m..(j + 1) * m];
            trellis
                .branches()
                .iter()
                .map(|b| {
                    let d: f64 = b
                        .outputs
                        .iter()
                        .zip(section)
                        .map(|(z, yy)| (yy - z) * (yy - z))
                        .sum();
                    -d * inv_two_var
                })
                .collect()
        })
        .collect();
    let log_priors: Vec<Vec<f64>> = priors
        .iter()
        .map(|p| p.iter().map(|&x| x.ln()).collect())
        .collect();

    let mut alphas = vec![vec![f64::NEG_INFINITY; num_states]; n + 1];
    alphas[0][0] = 0.0;
    for j in 0..n {
        for (id, b) in trellis.branches().iter().enumerate() {
            counts.real_mul += 1;
            counts.real_add += 1;
            let t = alphas[j][b.from] + chan_ll[j][id] + log_priors[j][b.symbol as usize];
            alphas[j + 1][b.to] = logsumexp(alphas[j + 1][b.to], t);
        }
    }
    let mut betas = vec![vec![f64::NEG_INFINITY; num_states]; n + 1];
    betas[n] = vec![0.0; num_states];
    for j in (0..n).rev() {
        for (id, b) in trellis.branches().iter().enumerate() {
            counts.real_mul += 1;
            counts.real_add += 1;
            let t = betas[j + 1][b.to] + chan_ll[j][id] + log_priors[j][b.symbol as usize];
            betas[j][b.from] = logsumexp(betas[j][b.from], t);
        }
    }

    let mut posteriors = Vec::with_capacity(n);
    let mut extrinsics = Vec::with_capacity(n);
    for j in 0..n {
        let mut post = vec![f64::NEG_INFINITY; q];
        let mut ext = vec![f64::NEG_INFINITY; q];
        for (id, b) in trellis.branches().iter().enumerate() {
            counts.real_mul += 2;
            counts.real_add += 1;
            let core = alphas[j][b.from] + chan_ll[j][id] + betas[j + 1][b.to];
            let v = b.symbol as usize;
            post[v] = logsumexp(post[v], core + log_priors[j][v]);
            ext[v] = logsumexp(ext[v], core);
        }
        posteriors.push(log_normalize(&post));
        extrinsics.push(log_normalize(&ext));
    }
    BcjrOutput {
        posteriors,
        extrinsics,
    }
}

/// exp-normalizes a log-domain vector into a pmf summing to 1.
fn log_normalize(log_values: &[f64]) -> Vec<f64> {
    let total = log_values.iter().fold(f64::NEG_INFINITY, |a, &b| logsumexp(a, b));
    assert!(total > f64::NEG_INFINITY, "at least one value must be reachable");
    let mut out: Vec<f64> = log_values.iter().map(|&v| (v - total).exp()).collect();
    let s: f64 = out.iter().sum();
    for v in out.iter_mut() {
        *v /= s;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::IsiChannel;
    use crate::metrics::{branch_possibilities, QuantizerConfig};
    use rand::Rng as _;
    use rand::SeedableRng as _;
    use rand_chacha::ChaCha8Rng;

    fn dicode_trellis(m: u32) -> SectionalizedTrellis {
        SectionalizedTrellis::new(&IsiChannel::from_spec("dicode").unwrap(), m)
    }

    /// All q^n symbol sequences, for exhaustive oracles.
    fn all_sequences(q: usize, n: usize) -> Vec<Vec<Symbol>> {
        let mut seqs = vec![vec![]];
        for _ in 0..n {
            seqs = seqs
                .into_iter()
                .flat_map(|s| {
                    (0..q).map(move |v| {
                        let mut t = s.clone();
                        t.push(v as Symbol);
                        t
                    })
                })
                .collect();
        }
        seqs
    }

    fn random_metrics(
        trellis: &SectionalizedTrellis,
        n: usize,
        rng: &mut ChaCha8Rng,
    ) -> (Vec<Vec<i32>>, Vec<PossibilityVector>) {
        let chan: Vec<Vec<i32>> = (0..n)
            .map(|_| {
                (0..trellis.num_branches())
                    .map(|_| rng.random_range(0..512))
                    .collect()
            })
            .collect();
        let priors: Vec<PossibilityVector> = (0..n)
            .map(|_| {
                (0..trellis.symbols_per_section())
                    .map(|_| rng.random_range(0..256))
                    .collect()
            })
            .collect();
        (chan, priors)
    }

    #[test]
    fn viterbi_matches_exhaustive_maximum() {
        let trellis = dicode_trellis(2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (chan, priors) = random_metrics(&trellis, 4, &mut rng);
            let mut counts = OpCounts::default();
            let metrics = assemble_branch_metrics(&trellis, &chan, &priors, &mut counts);
            let v = viterbi(&trellis, &metrics, &mut counts);
            let best = all_sequences(4, 4)
                .iter()
                .map(|s| path_metric(&trellis, &metrics, s))
                .max()
                .unwrap();
            assert_eq!(path_metric(&trellis, &metrics, &v), best);
        }
    }

    #[test]
    fn viterbi_all_equal_metrics_breaks_ties_to_zero() {
        let trellis = dicode_trellis(2);
        let metrics = vec![vec![7; trellis.num_branches()]; 5];
        let mut counts = OpCounts::default();
        let v = viterbi(&trellis, &metrics, &mut counts);
        assert_eq!(v, vec![0; 5], "ties must fall to the smallest state and symbol");
    }

    #[test]
    fn max_log_map_matches_exhaustive_max_marginal() {
        let trellis = dicode_trellis(2);
        let q = 4;
        let n = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let (chan, priors) = random_metrics(&trellis, n, &mut rng);
            let mut counts = OpCounts::default();
            let metrics = assemble_branch_metrics(&trellis, &chan, &priors, &mut counts);
            let got = max_log_map(&trellis, &metrics, &priors, &mut counts);

            // Oracle: best total metric over all sequences pinned to (j, v),
            // minus the prior, renormalized per section.
            for j in 0..n {
                let mut want = vec![i32::MIN; q];
                for s in all_sequences(q, n) {
                    let pm = path_metric(&trellis, &metrics, &s);
                    let v = s[j] as usize;
                    want[v] = want[v].max(pm);
                }
                for v in 0..q {
                    want[v] -= priors[j][v];
                }
                let min = *want.iter().min().unwrap();
                for w in want.iter_mut() {
                    *w -= min;
                }
                assert_eq!(got[j], want, "section {j}");
            }
        }
    }

    #[test]
    fn single_section_max_log_map_reduces_to_branch_maximum() {
        let trellis = dicode_trellis(2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (chan, _) = random_metrics(&trellis, 1, &mut rng);
        let zero_priors = vec![vec![0; 4]];
        let mut counts = OpCounts::default();
        let metrics = assemble_branch_metrics(&trellis, &chan, &zero_priors, &mut counts);
        let out = max_log_map(&trellis, &metrics, &zero_priors, &mut counts);
        // Only state-0 branches are reachable in section 0.
        let mut want = vec![i32::MIN; 4];
        for sym in 0..4u8 {
            let id = trellis.branch_id(0, sym);
            want[sym as usize] = chan[0][id];
        }
        let min = *want.iter().min().unwrap();
        for w in want.iter_mut() {
            *w -= min;
        }
        assert_eq!(out[0], want);
    }

    #[test]
    fn noiseless_sections_prefer_the_transmitted_symbol() {
        let ch = IsiChannel::from_spec("dicode").unwrap();
        let trellis = SectionalizedTrellis::new(&ch, 2);
        let cfg = QuantizerConfig::new(9, 20.0).unwrap();
        let symbols: Vec<Symbol> = vec![3, 1, 0, 2, 2, 1];
        let x = crate::channel::modulate_symbols(2, &symbols);
        let y = ch.convolve(&x);
        let chan: Vec<Vec<i32>> = (0..symbols.len())
            .map(|j| branch_possibilities(&trellis, &y[2 * j..2 * j + 2], &cfg))
            .collect();
        let priors = vec![vec![0; 4]; symbols.len()];
        let mut counts = OpCounts::default();
        let metrics = assemble_branch_metrics(&trellis, &chan, &priors, &mut counts);

        let v = viterbi(&trellis, &metrics, &mut counts);
        assert_eq!(v, symbols, "noiseless Viterbi must recover the input");

        let ext = max_log_map(&trellis, &metrics, &priors, &mut counts);
        for (j, &s) in symbols.iter().enumerate() {
            let best = *ext[j].iter().max().unwrap();
            assert_eq!(ext[j][s as usize], best, "section {j} must rank the truth highest");
        }
    }

    #[test]
    fn detectors_agree_on_the_argmax_without_ties() {
        let trellis = dicode_trellis(2);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        'outer: for _ in 0..30 {
            let (chan, priors) = random_metrics(&trellis, 5, &mut rng);
            let mut counts = OpCounts::default();
            let metrics = assemble_branch_metrics(&trellis, &chan, &priors, &mut counts);
            // Skip instances whose global optimum is not unique.
            let seqs = all_sequences(4, 5);
            let best = seqs
                .iter()
                .map(|s| path_metric(&trellis, &metrics, s))
                .max()
                .unwrap();
            if seqs
                .iter()
                .filter(|s| path_metric(&trellis, &metrics, s) == best)
                .count()
                != 1
            {
                continue 'outer;
            }
            let v = viterbi(&trellis, &metrics, &mut counts);
            let ext = max_log_map(&trellis, &metrics, &priors, &mut counts);
            // The extrinsic excludes the prior; the posterior (extrinsic
            // plus prior) is what the sequence optimum speaks to.
            for (j, &s) in v.iter().enumerate() {
                let post: Vec<i32> = ext[j]
                    .iter()
                    .zip(&priors[j])
                    .map(|(&e, &p)| e + p)
                    .collect();
                let m = *post.iter().max().unwrap();
                assert_eq!(
                    post[s as usize], m,
                    "max-log-MAP must rank the Viterbi symbol top at section {j}"
                );
            }
            checked += 1;
        }
        assert!(checked >= 10, "too few unique-optimum instances: {checked}");
    }

    #[test]
    fn bcjr_matches_exhaustive_marginalization() {
        let ch = IsiChannel::from_spec("dicode").unwrap();
        let trellis = SectionalizedTrellis::new(&ch, 2);
        let n = 4;
        let q = 4;
        let sigma = 0.8;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let symbols: Vec<Symbol> = (0..n).map(|_| rng.random_range(0..q) as Symbol).collect();
            let x = crate::channel::modulate_symbols(2, &symbols);
            let y = ch.transmit(&x, sigma, &mut rng);
            let priors: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let raw: Vec<f64> = (0..q).map(|_| rng.random_range(0.05..1.0)).collect();
                    let s: f64 = raw.iter().sum();
                    raw.into_iter().map(|v| v / s).collect()
                })
                .collect();
            let mut counts = OpCounts::default();
            let out = bcjr(&trellis, &y, sigma, &priors, &mut counts);

            // Oracle: enumerate all q^n sequences with true Gaussian weights.
            let mut post = vec![vec![0.0f64; q]; n];
            for s in all_sequences(q, n) {
                let z = ch.convolve(&crate::channel::modulate_symbols(2, &s));
                let d: f64 = z.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
                let mut w = (-d / (2.0 * sigma * sigma)).exp();
                for (j, &v) in s.iter().enumerate() {
                    w *= priors[j][v as usize];
                }
                for (j, &v) in s.iter().enumerate() {
                    post[j][v as usize] += w;
                }
            }
            for j in 0..n {
                let total: f64 = post[j].iter().sum();
                let got_sum: f64 = out.posteriors[j].iter().sum();
                assert!((got_sum - 1.0).abs() < 1e-12, "posterior must be a pmf");
                for v in 0..q {
                    let want = post[j][v] / total;
                    let got = out.posteriors[j][v];
                    assert!(
                        (got - want).abs() <= 1e-9 * want.max(1e-30) + 1e-12,
                        "section {j} symbol {v}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn bcjr_extrinsic_divides_out_the_prior() {
        let ch = IsiChannel::from_spec("dicode").unwrap();
        let trellis = SectionalizedTrellis::new(&ch, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let symbols: Vec<Symbol> = vec![1, 3, 0];
        let x = crate::channel::modulate_symbols(2, &symbols);
        let y = ch.transmit(&x, 0.6, &mut rng);
        let priors: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.1..1.0)).collect();
                let s: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / s).collect()
            })
            .collect();
        let mut counts = OpCounts::default();
        let out = bcjr(&trellis, &y, 0.6, &priors, &mut counts);
        for j in 0..3 {
            let ratio: Vec<f64> = (0..4)
                .map(|v| out.posteriors[j][v] / priors[j][v])
                .collect();
            let s: f64 = ratio.iter().sum();
            for v in 0..4 {
                assert!(
                    (out.extrinsics[j][v] - ratio[v] / s).abs() < 1e-9,
                    "extrinsic must equal the renormalized posterior/prior ratio"
                );
            }
        }
    }

    #[test]
    fn operation_counts_match_closed_forms() {
        // N = 10 sections, q = 16, dicode (L = 1).
        let trellis = dicode_trellis(4);
        let n = 10;
        let q = 16u64;
        let two_l = 2u64;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let chan: Vec<Vec<i32>> = (0..n)
            .map(|_| {
                (0..trellis.num_branches())
                    .map(|_| rng.random_range(0..512))
                    .collect()
            })
            .collect();
        let priors = vec![vec![0; 16]; n];

        let mut det = OpCounts::default();
        let metrics = assemble_branch_metrics(&trellis, &chan, &priors, &mut det);
        let _ = max_log_map(&trellis, &metrics, &priors, &mut det);
        assert_eq!(det.int_add, 4 * n as u64 * q * two_l, "max-log-MAP additions");
        assert_eq!(det.int_cmp, 3 * n as u64 * q * two_l, "max-log-MAP comparisons");

        let mut vit = OpCounts::default();
        let _ = viterbi(&trellis, &metrics, &mut vit);
        assert_eq!(vit.int_add, n as u64 * two_l, "Viterbi additions");
        assert_eq!(vit.int_cmp, n as u64 * q * two_l, "Viterbi comparisons");

        let mut bc = OpCounts::default();
        let y = vec![0.0; n * 4];
        let flat_priors = vec![vec![1.0 / 16.0; 16]; n];
        let _ = bcjr(&trellis, &y, 0.7, &flat_priors, &mut bc);
        assert_eq!(bc.real_mul, 4 * n as u64 * q * two_l, "BCJR multiplications");
        assert_eq!(bc.real_add, 3 * n as u64 * q * two_l, "BCJR additions");
    }
}
