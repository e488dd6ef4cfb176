//! Binary-input intersymbol-interference channels and the sectionalized
//! trellis walked by the detectors.
//!
//! A channel is a real tap vector f_0..f_L. Transmission is BPSK (bit c maps
//! to 2c - 1), the channel output at time t is sum_l f_l * x_{t-l} plus white
//! Gaussian noise, and positions before the start of the block are filled
//! with -1 (the modulated zero bit), so the initial channel state is known.
//! Nothing is appended at the end: the final state is unconstrained.
//!
//! The trellis groups m consecutive bit intervals into one section so that a
//! section carries exactly one GF(2^m) code symbol. Symbol bits enter the
//! channel least-significant first. A state packs the last L transmitted
//! bits with the most recent bit in bit 0, which makes the state update
//! `((s << 1) | c) & mask`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gf::Symbol;

/// Tap vector f(D) = f_0 + f_1 D + ... + f_L D^L.
#[derive(Debug, Clone, PartialEq)]
pub struct IsiChannel {
    taps: Vec<f64>,
}

impl IsiChannel {
    pub fn new(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::Config("channel needs at least one tap".into()));
        }
        if taps.iter().all(|&t| t == 0.0) {
            return Err(Error::Config("channel taps are all zero".into()));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config("channel taps must be finite".into()));
        }
        Ok(IsiChannel { taps })
    }

    /// Looks up a named response or parses comma-separated taps.
    ///
    /// Known names: `dicode` (1 - D), `epr4` (1 + D - D^2 - D^3) and
    /// `proakis-b` (0.407 + 0.815 D + 0.407 D^2).
    pub fn from_spec(spec: &str) -> Result<Self> {
        let taps = match spec.to_ascii_lowercase().as_str() {
            "dicode" => vec![1.0, -1.0],
            "epr4" => vec![1.0, 1.0, -1.0, -1.0],
            "proakis-b" => vec![0.407, 0.815, 0.407],
            other => other
                .split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|_| {
                        Error::Config(format!(
                            "`{spec}` is neither a known channel name nor a comma-separated tap list"
                        ))
                    })
                })
                .collect::<Result<Vec<f64>>>()?,
        };
        IsiChannel::new(taps)
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Channel memory L (number of taps minus one).
    pub fn memory(&self) -> usize {
        self.taps.len() - 1
    }

    /// Noiseless output, same length as the input, with -1 fill before the
    /// block start.
    pub fn convolve(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|t| {
                self.taps
                    .iter()
                    .enumerate()
                    .map(|(l, &f)| f * if t >= l { x[t - l] } else { -1.0 })
                    .sum()
            })
            .collect()
    }

    /// Noiseless output plus N(0, sigma^2) samples.
    pub fn transmit<R: Rng + ?Sized>(&self, x: &[f64], sigma: f64, rng: &mut R) -> Vec<f64> {
        self.convolve(x)
            .into_iter()
            .map(|z| z + sigma * rng.sample::<f64, _>(StandardNormal))
            .collect()
    }
}

/// BPSK: bit 0 maps to -1.0, bit 1 to +1.0.
#[inline]
pub fn bipolar(bit: u8) -> f64 {
    2.0 * f64::from(bit) - 1.0
}

/// Expands symbols to bits, least-significant bit of each symbol first, and
/// modulates them. The result has `m * symbols.len()` samples.
pub fn modulate_symbols(m: u32, symbols: &[Symbol]) -> Vec<f64> {
    let mut x = Vec::with_capacity(symbols.len() * m as usize);
    for &s in symbols {
        for k in 0..m {
            x.push(bipolar((s >> k) & 1));
        }
    }
    x
}

/// Noise scale for a target Eb/N0 in dB at the given code rate:
/// sigma = sqrt(1 / (2 R 10^(x/10))).
pub fn snr_to_sigma(ebn0_db: f64, rate: f64) -> f64 {
    assert!(rate > 0.0, "rate must be positive");
    (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt()
}

/// One section transition: from state `from`, the symbol `symbol` produces
/// the m channel outputs `outputs` and lands in state `to`.
#[derive(Debug, Clone)]
pub struct Branch {
    pub from: usize,
    pub symbol: Symbol,
    pub outputs: Vec<f64>,
    pub to: usize,
}

/// Time-invariant section trellis with 2^L states and 2^(L+m) branches.
///
/// Branches are stored in (origin state, symbol)-ascending order, so the
/// branch for `(state, symbol)` lives at index `state * 2^m + symbol`. That
/// order is also the tie-breaking order used by the detectors.
#[derive(Debug, Clone)]
pub struct SectionalizedTrellis {
    m: u32,
    memory: usize,
    num_states: usize,
    branches: Vec<Branch>,
    incoming: Vec<Vec<usize>>,
}

impl SectionalizedTrellis {
    pub fn new(channel: &IsiChannel, m: u32) -> Self {
        assert!((1..=8).contains(&m), "symbol width must be 1..=8 bits");
        let memory = channel.memory();
        let num_states = 1usize << memory;
        let q = 1usize << m;
        let mask = num_states - 1;
        let taps = channel.taps();

        let mut branches = Vec::with_capacity(num_states * q);
        let mut incoming = vec![Vec::new(); num_states];
        for from in 0..num_states {
            for symbol in 0..q {
                let mut state = from;
                let mut outputs = Vec::with_capacity(m as usize);
                for k in 0..m {
                    let c = ((symbol >> k) & 1) as u8;
                    let mut z = taps[0] * bipolar(c);
                    for l in 1..=memory {
                        z += taps[l] * bipolar(((state >> (l - 1)) & 1) as u8);
                    }
                    outputs.push(z);
                    state = ((state << 1) | c as usize) & mask;
                }
                incoming[state].push(branches.len());
                branches.push(Branch {
                    from,
                    symbol: symbol as Symbol,
                    outputs,
                    to: state,
                });
            }
        }
        SectionalizedTrellis {
            m,
            memory,
            num_states,
            branches,
            incoming,
        }
    }

    /// Bits per section (one code symbol).
    pub fn section_bits(&self) -> u32 {
        self.m
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_branches(&self) -> usize {
        self.branches.len()
    }

    /// Symbols per section, 2^m.
    pub fn symbols_per_section(&self) -> usize {
        1 << self.m
    }

    #[inline]
    pub fn branch_id(&self, state: usize, symbol: Symbol) -> usize {
        state * self.symbols_per_section() + symbol as usize
    }

    #[inline]
    pub fn branch(&self, id: usize) -> &Branch {
        &self.branches[id]
    }

    /// All branches in (origin, symbol)-ascending order.
    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Ids of the branches terminating in `state`.
    pub fn incoming(&self, state: usize) -> &[usize] {
        &self.incoming[state]
    }
}
