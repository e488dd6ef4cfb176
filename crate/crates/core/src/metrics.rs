//! Integer possibility metrics for trellis branches.
//!
//! Each received section is compared against every branch's noiseless output
//! by squared Euclidean distance, the distance is clipped at a configured
//! ceiling d_max, and the result is mapped linearly onto p-bit integers:
//! distance 0 gets the largest value 2^p - 1, anything at or beyond d_max
//! gets 0. The noise variance never enters, which is the point: detectors
//! and decoders downstream run on plain integers.
//!
//! Values are carried as i32 rather than the p bits they need because path
//! and sum metrics accumulate well past p bits; debug builds assert against
//! overflow where the accumulation happens.

use crate::channel::{IsiChannel, SectionalizedTrellis};
use crate::error::{Error, Result};

/// A length-q vector of p-bit possibility values, one per field symbol.
/// After [`normalize_min_zero`] the smallest entry is 0.
pub type PossibilityVector = Vec<i32>;

/// Parameters of the distance-to-integer map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerConfig {
    /// Output bit width p; values land in [0, 2^p - 1].
    pub precision_bits: u32,
    /// Distances at or above this ceiling quantize to 0.
    pub d_max: f64,
}

impl QuantizerConfig {
    pub fn new(precision_bits: u32, d_max: f64) -> Result<Self> {
        if precision_bits < 1 || precision_bits > 30 {
            return Err(Error::Config(format!(
                "precision must be between 1 and 30 bits, got {precision_bits}"
            )));
        }
        if !(d_max > 0.0) || !d_max.is_finite() {
            return Err(Error::Config(format!("d_max must be positive, got {d_max}")));
        }
        Ok(QuantizerConfig {
            precision_bits,
            d_max,
        })
    }

    /// Largest representable value, 2^p - 1.
    #[inline]
    pub fn max_value(&self) -> i32 {
        (1i32 << self.precision_bits) - 1
    }

    /// Maps a squared distance to its integer possibility value, rounding
    /// half away from zero.
    #[inline]
    pub fn quantize_distance(&self, d: f64) -> i32 {
        debug_assert!(d >= 0.0, "squared distances cannot be negative");
        let clipped = d.min(self.d_max);
        ((self.d_max - clipped) / self.d_max * f64::from(self.max_value())).round() as i32
    }
}

/// Default distance ceiling 2 m (sum |f_l|)^2: twice the worst-case energy a
/// section can see, so typical sections use most of the integer range
/// without saturating it.
pub fn default_d_max(channel: &IsiChannel, m: u32) -> f64 {
    let span: f64 = channel.taps().iter().map(|t| t.abs()).sum();
    2.0 * f64::from(m) * span * span
}

/// Possibility value of every branch for one received section, indexed by
/// branch id. Branches with identical outputs necessarily get identical
/// values because only the distance enters.
pub fn branch_possibilities(
    trellis: &SectionalizedTrellis,
    y_section: &[f64],
    cfg: &QuantizerConfig,
) -> Vec<i32> {
    assert_eq!(
        y_section.len(),
        trellis.section_bits() as usize,
        "section must contain m received samples"
    );
    trellis
        .branches()
        .iter()
        .map(|b| {
            let d: f64 = b
                .outputs
                .iter()
                .zip(y_section)
                .map(|(z, y)| (y - z) * (y - z))
                .sum();
            cfg.quantize_distance(d)
        })
        .collect()
}

/// Shifts a message so its smallest entry is 0. Possibility semantics are
/// invariant to a common offset; keeping the floor at 0 bounds growth.
#[inline]
pub fn normalize_min_zero(values: &mut [i32]) {
    if let Some(&min) = values.iter().min() {
        if min != 0 {
            for v in values.iter_mut() {
                *v -= min;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg9() -> QuantizerConfig {
        QuantizerConfig::new(9, 80.0).unwrap()
    }

    #[test]
    fn golden_values_at_nine_bits() {
        let q = cfg9();
        assert_eq!(q.max_value(), 511);
        assert_eq!(q.quantize_distance(0.0), 511, "zero distance gets the top value");
        // (80 - 40)/80 * 511 = 255.5, and .5 rounds away from zero.
        assert_eq!(q.quantize_distance(40.0), 256);
        assert_eq!(q.quantize_distance(80.0), 0, "the ceiling itself maps to 0");
        assert_eq!(q.quantize_distance(120.0), 0, "beyond the ceiling clips to 0");
    }

    #[test]
    fn quantizer_is_monotone_nonincreasing_in_distance() {
        let q = cfg9();
        let mut last = i32::MAX;
        for step in 0..=1000 {
            let d = 0.1 * f64::from(step);
            let v = q.quantize_distance(d);
            assert!(v <= last, "value rose from {last} to {v} at d = {d}");
            assert!((0..=511).contains(&v));
            last = v;
        }
        // Strict drop across a full quantization step below the ceiling.
        let step_width = 80.0 / 511.0;
        assert!(q.quantize_distance(10.0) > q.quantize_distance(10.0 + 1.5 * step_width));
    }

    #[test]
    fn config_validation() {
        assert!(QuantizerConfig::new(0, 80.0).is_err());
        assert!(QuantizerConfig::new(31, 80.0).is_err());
        assert!(QuantizerConfig::new(9, 0.0).is_err());
        assert!(QuantizerConfig::new(9, -3.0).is_err());
        assert!(QuantizerConfig::new(9, f64::INFINITY).is_err());
        assert!(QuantizerConfig::new(1, 1.0).is_ok(), "one bit is the legal minimum");
    }

    #[test]
    fn default_ceiling_follows_tap_energy() {
        let dicode = IsiChannel::from_spec("dicode").unwrap();
        assert!((default_d_max(&dicode, 4) - 32.0).abs() < 1e-12);
        let epr4 = IsiChannel::from_spec("epr4").unwrap();
        assert!((default_d_max(&epr4, 4) - 128.0).abs() < 1e-12);
        let pb = IsiChannel::from_spec("proakis-b").unwrap();
        let span = 0.407 + 0.815 + 0.407;
        assert!((default_d_max(&pb, 4) - 8.0 * span * span).abs() < 1e-12);
    }

    #[test]
    fn branches_with_identical_outputs_get_identical_values() {
        let ch = IsiChannel::from_spec("dicode").unwrap();
        let trellis = SectionalizedTrellis::new(&ch, 2);
        let y = [0.3, -1.1];
        let values = branch_possibilities(&trellis, &y, &cfg9());
        assert_eq!(values.len(), trellis.num_branches());
        for a in 0..trellis.num_branches() {
            for b in a + 1..trellis.num_branches() {
                if trellis.branch(a).outputs == trellis.branch(b).outputs {
                    assert_eq!(values[a], values[b], "branches {a} and {b} share an output");
                }
            }
        }
        // Dicode collapses many of its 16 branches onto shared outputs, so
        // the check above must actually fire.
        let mut any_shared = false;
        for a in 0..trellis.num_branches() {
            for b in a + 1..trellis.num_branches() {
                any_shared |= trellis.branch(a).outputs == trellis.branch(b).outputs;
            }
        }
        assert!(any_shared, "test premise: dicode has coinciding branch outputs");
    }

    #[test]
    fn transmitted_branch_tops_a_noiseless_section() {
        let ch = IsiChannel::from_spec("epr4").unwrap();
        let trellis = SectionalizedTrellis::new(&ch, 4);
        let cfg = QuantizerConfig::new(9, 180.0).unwrap();
        for &(state, symbol) in &[(0usize, 0u8), (5, 11), (7, 15), (2, 9)] {
            let id = trellis.branch_id(state, symbol);
            let y = trellis.branch(id).outputs.clone();
            let values = branch_possibilities(&trellis, &y, &cfg);
            assert_eq!(values[id], cfg.max_value(), "own output is at distance zero");
            for (other, &v) in values.iter().enumerate() {
                assert!(v <= values[id], "branch {other} beat the true branch");
            }
        }
    }

    #[test]
    fn normalization_shifts_minimum_to_zero() {
        let mut v = vec![400, 380, 395, 511];
        normalize_min_zero(&mut v);
        assert_eq!(v, vec![20, 0, 15, 131]);
        let mut w = vec![0, 3, 7];
        normalize_min_zero(&mut w);
        assert_eq!(w, vec![0, 3, 7], "already normalized input is untouched");
        let mut neg = vec![-5, 2];
        normalize_min_zero(&mut neg);
        assert_eq!(neg, vec![0, 7]);
    }
}
