//! Structural operation counters.
//!
//! Counting is structural: each algorithm increments a counter at a defined
//! algorithmic step (per branch, per state, per edge), not per executed CPU
//! instruction. The conventions, chosen so that one iteration of each
//! structured algorithm lands exactly on its closed-form cost, are:
//!
//! * Branch-metric assembly (channel value + prior, one integer addition per
//!   branch) is charged to whoever owns the prior: the soft detector on the
//!   max-log-MAP path, the decoder on the Viterbi/GMLGD path. This is the
//!   fourth of the max-log-MAP's four additions per branch and the Nq2^L
//!   term in the GMLGD's additions.
//! * Viterbi charges one comparison per branch and one addition per
//!   destination state (survivor extension); the per-branch candidate sums
//!   reuse the assembled metrics.
//! * max-log-MAP charges one addition and one comparison per branch in each
//!   of the forward, backward and completion passes (the completion reuses
//!   the cached forward sum), giving 4Nq2^L additions with assembly and
//!   3Nq2^L comparisons.
//! * BCJR follows the probability-domain reading: per branch, one
//!   multiplication and one accumulation forward, the same backward, and two
//!   multiplications plus one accumulation in the completion, so 4Nq2^L real
//!   multiplications and 3Nq2^L real additions.
//! * QSPA charges, per edge per iteration: q field operations for the
//!   permutation toward the check (the return permutation reuses the cached
//!   index map), q multiplications at the variable node and q at the check
//!   node, q divisions for each of the two normalizations, and two length-q
//!   group convolutions whose q^2 multiply-accumulates each count as real
//!   additions. Totals: q·delta field, 2q·delta mul, 2q^2·delta add,
//!   2q·delta div.
//! * GMLGD charges one integer addition per counter increment (delta per
//!   iteration) and four length-q vector touches per edge for the vote and
//!   counter maintenance (4q·delta field operations), plus the assembly
//!   additions above.
//! * EMS check-node work is data dependent, so it is measured, not derived:
//!   each surviving dynamic-programming candidate costs one integer
//!   addition, one comparison and one field operation, and bumps the
//!   configuration counter.
//!
//! Renormalization shifts of integer messages are free, matching the source
//! convention that only lists the six categories below.

use std::ops::AddAssign;

/// Operation tallies in the six reported categories plus the EMS
/// configuration count. `ems_configs` is diagnostic and excluded from
/// [`OpCounts::total`].
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounts {
    pub int_add: u64,
    pub int_cmp: u64,
    pub field_ops: u64,
    pub real_mul: u64,
    pub real_add: u64,
    pub real_div: u64,
    /// Surviving EMS configurations examined (not an arithmetic category).
    pub ems_configs: u64,
}

impl OpCounts {
    /// Sum of the six arithmetic categories. The configuration count stays
    /// out: it is a search-size diagnostic, not an operation.
    pub fn total(&self) -> u64 {
        self.int_add + self.int_cmp + self.field_ops + self.real_mul + self.real_add + self.real_div
    }

    pub fn is_zero(&self) -> bool {
        *self == OpCounts::default()
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: OpCounts) {
        self.int_add += rhs.int_add;
        self.int_cmp += rhs.int_cmp;
        self.field_ops += rhs.field_ops;
        self.real_mul += rhs.real_mul;
        self.real_add += rhs.real_add;
        self.real_div += rhs.real_div;
        self.ems_configs += rhs.ems_configs;
    }
}

/// One outer iteration's tallies, split by component.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct IterationCounts {
    pub detector: OpCounts,
    pub decoder: OpCounts,
}

/// Per-frame tallies: cumulative per component plus the per-iteration trail.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct FrameCounters {
    pub detector: OpCounts,
    pub decoder: OpCounts,
    pub per_iteration: Vec<IterationCounts>,
}

impl FrameCounters {
    /// Folds one iteration into the cumulative totals and keeps its record.
    pub fn push_iteration(&mut self, iter: IterationCounts) {
        self.detector += iter.detector;
        self.decoder += iter.decoder;
        self.per_iteration.push(iter);
    }

    /// Detector plus decoder, all iterations.
    pub fn combined(&self) -> OpCounts {
        let mut c = self.detector;
        c += self.decoder;
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_exclude_the_configuration_count() {
        let c = OpCounts {
            int_add: 1,
            int_cmp: 2,
            field_ops: 3,
            real_mul: 4,
            real_add: 5,
            real_div: 6,
            ems_configs: 1000,
        };
        assert_eq!(c.total(), 21);
    }

    #[test]
    fn frame_counters_accumulate_iterations() {
        let mut f = FrameCounters::default();
        let it = IterationCounts {
            detector: OpCounts {
                int_add: 10,
                ..OpCounts::default()
            },
            decoder: OpCounts {
                field_ops: 7,
                ..OpCounts::default()
            },
        };
        f.push_iteration(it);
        f.push_iteration(it);
        assert_eq!(f.detector.int_add, 20);
        assert_eq!(f.decoder.field_ops, 14);
        assert_eq!(f.per_iteration.len(), 2);
        assert_eq!(f.combined().total(), 34);
    }
}
