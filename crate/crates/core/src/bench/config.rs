//! Experiment descriptions and their on-disk format.
//!
//! Configs are plain ASCII, one `key = value` per line, `#` starts a
//! comment, lists are comma-separated. Every malformed line is reported with
//! its line number.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::channel::IsiChannel;
use crate::code::{random_regular_code, SparseParityMatrix};
use crate::decode::{EmsConfig, Scale, TruncationRule};
use crate::error::{Error, Result};
use crate::gf::FieldTable;
use crate::joint::{Decoder, Detector, ScheduleConfig, ScheduleMode};
use crate::metrics::{default_d_max, QuantizerConfig};

/// Where the parity-check matrix comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSource {
    Alist(PathBuf),
    Random {
        n: usize,
        col_weight: usize,
        row_weight: usize,
        seed: u64,
    },
}

/// A full simulation run: code, channel, quantizer, schedule, sweep and
/// stopping rule. Produced by [`ExperimentConfig::from_file`] or built
/// directly.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Series label in reports; defaults to the decoder name.
    pub label: String,
    pub code: CodeSource,
    /// Bits per symbol. Required for random codes; for alist codes it is
    /// cross-checked against the file when given.
    pub field_bits: Option<u32>,
    pub channel: IsiChannel,
    pub precision_bits: u32,
    /// Quantizer ceiling; when absent the channel's worst-case section
    /// distance is used.
    pub d_max: Option<f64>,
    pub schedule: ScheduleConfig,
    pub ebn0_db: Vec<f64>,
    /// Frame cap per sweep point.
    pub max_frames: u64,
    /// A point stops early once this many frame errors have accumulated.
    pub target_frame_errors: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses config text; `origin` names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut kv: HashMap<String, (String, usize)> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::parse(origin, line_no, "expected `key = value`"));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(Error::parse(origin, line_no, "empty key or value"));
            }
            if let Some((_, prev)) = kv.insert(key.clone(), (value, line_no)) {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("duplicate key `{key}` (first set on line {prev})"),
                ));
            }
        }
        let mut keys = Keys { origin, kv };
        let config = build_config(&mut keys)?;
        if let Some((key, (_, line))) = keys.kv.iter().min_by_key(|(_, (_, l))| *l) {
            return Err(Error::parse(
                keys.origin,
                *line,
                format!("unknown key `{key}`"),
            ));
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ebn0_db.is_empty() {
            return Err(Error::Config("the Eb/N0 sweep must not be empty".into()));
        }
        if self.max_frames == 0 || self.target_frame_errors == 0 {
            return Err(Error::Config("frame and error budgets must be positive".into()));
        }
        if matches!(self.code, CodeSource::Random { .. }) && self.field_bits.is_none() {
            return Err(Error::Config(
                "random codes need `field` (bits per symbol)".into(),
            ));
        }
        if let Some(bits) = self.field_bits {
            if !(1..=8).contains(&bits) {
                return Err(Error::Config(format!(
                    "field must be 1..=8 bits, got {bits}"
                )));
            }
        }
        QuantizerConfig::new(self.precision_bits, self.d_max.unwrap_or(1.0))?;
        Ok(())
    }

    /// Loads or generates the parity-check matrix.
    pub fn load_code(&self) -> Result<SparseParityMatrix> {
        match &self.code {
            CodeSource::Alist(path) => {
                let code = crate::code::load_alist_with_default_field(path)?;
                if let Some(bits) = self.field_bits {
                    if code.field().m() != bits {
                        return Err(Error::Config(format!(
                            "config says {bits}-bit symbols but {} is over GF(2^{})",
                            path.display(),
                            code.field().m()
                        )));
                    }
                }
                Ok(code)
            }
            CodeSource::Random {
                n,
                col_weight,
                row_weight,
                seed,
            } => {
                let bits = self.field_bits.expect("validated: random codes carry field");
                let field = Arc::new(FieldTable::with_default_poly(bits)?);
                random_regular_code(*n, *col_weight, *row_weight, field, *seed)
            }
        }
    }

    /// The quantizer this run uses; the default ceiling depends on the
    /// channel and symbol width, so it is resolved here.
    pub fn quantizer(&self, field_bits: u32) -> Result<QuantizerConfig> {
        let d_max = self
            .d_max
            .unwrap_or_else(|| default_d_max(&self.channel, field_bits));
        QuantizerConfig::new(self.precision_bits, d_max)
    }

    /// Stable hex digest of the whole config, recorded alongside results so
    /// a CSV can be traced back to the exact run description.
    pub fn fingerprint(&self) -> String {
        let canonical = format!("{self:?}");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in canonical.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

struct Keys<'a> {
    origin: &'a str,
    kv: HashMap<String, (String, usize)>,
}

impl Keys<'_> {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.kv.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<(String, usize)> {
        self.take(key)
            .ok_or_else(|| Error::Config(format!("{}: missing key `{key}`", self.origin)))
    }

    fn parse_opt<T: FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.take(key) {
            None => Ok(default),
            Some((v, line)) => v.parse().map_err(|_| {
                Error::parse(self.origin, line, format!("cannot parse `{v}` as {key}"))
            }),
        }
    }

    fn parse_req<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let (v, line) = self.required(key)?;
        v.parse()
            .map_err(|_| Error::parse(self.origin, line, format!("cannot parse `{v}` as {key}")))
    }
}

fn build_config(keys: &mut Keys) -> Result<ExperimentConfig> {
    let origin = keys.origin.to_string();

    let (code_value, _) = keys.required("code")?;
    let code = if code_value == "random" {
        CodeSource::Random {
            n: keys.parse_req("code_n")?,
            col_weight: keys.parse_req("code_col_weight")?,
            row_weight: keys.parse_req("code_row_weight")?,
            seed: keys.parse_opt("code_seed", 1)?,
        }
    } else {
        CodeSource::Alist(PathBuf::from(code_value))
    };

    let field_bits = match keys.take("field") {
        None => None,
        Some((v, line)) => Some(v.parse::<u32>().map_err(|_| {
            Error::parse(&origin, line, format!("cannot parse `{v}` as field bits"))
        })?),
    };

    let (chan_value, chan_line) = keys.required("channel")?;
    let channel = IsiChannel::from_spec(&chan_value)
        .map_err(|e| Error::parse(&origin, chan_line, e.to_string()))?;

    let precision_bits = keys.parse_opt("precision_bits", 9u32)?;
    let d_max = match keys.take("d_max") {
        None => None,
        Some((v, line)) => Some(v.parse::<f64>().map_err(|_| {
            Error::parse(&origin, line, format!("cannot parse `{v}` as d_max"))
        })?),
    };

    let (det_value, det_line) = keys.required("detector")?;
    let detector = match det_value.as_str() {
        "viterbi" => Detector::Viterbi,
        "max-log-map" => Detector::MaxLogMap,
        "bcjr" => Detector::Bcjr,
        other => {
            return Err(Error::parse(
                &origin,
                det_line,
                format!("unknown detector `{other}` (viterbi, max-log-map, bcjr)"),
            ))
        }
    };

    let scale = match keys.take("scale") {
        None => Scale::ONE,
        Some((v, line)) => {
            Scale::parse(&v).map_err(|e| Error::parse(&origin, line, e.to_string()))?
        }
    };
    let (dec_value, dec_line) = keys.required("decoder")?;
    let ems = |branch_rule: TruncationRule, state_rule: TruncationRule| {
        Decoder::Ems(EmsConfig {
            branch_rule,
            state_rule,
            scale,
        })
    };
    // The M and Mu rules take one parameter covering both the branch
    // supports and the partial-sum states; the T and D rules are thresholds
    // with separate state (`T_s`, `D_s`) and branch (`T_b`, `D_b`) values.
    let decoder = match dec_value.as_str() {
        "qspa" => Decoder::Qspa,
        "gmlgd" => Decoder::Gmlgd,
        "m-ems" => {
            let count = keys.parse_req("M")?;
            ems(
                TruncationRule::M { count },
                TruncationRule::M { count },
            )
        }
        "t-ems" => ems(
            TruncationRule::T {
                threshold: keys.parse_req("T_b")?,
            },
            TruncationRule::T {
                threshold: keys.parse_req("T_s")?,
            },
        ),
        "d-ems" => ems(
            TruncationRule::D {
                gap: keys.parse_req("D_b")?,
            },
            TruncationRule::D {
                gap: keys.parse_req("D_s")?,
            },
        ),
        "mu-ems" => {
            let offset = keys.parse_req("c")?;
            ems(
                TruncationRule::Mu { offset },
                TruncationRule::Mu { offset },
            )
        }
        other => {
            return Err(Error::parse(
                &origin,
                dec_line,
                format!("unknown decoder `{other}` (qspa, m-ems, t-ems, d-ems, mu-ems, gmlgd)"),
            ))
        }
    };

    let mode = match keys.take("schedule") {
        None => ScheduleMode::Iterative,
        Some((v, line)) => match v.as_str() {
            "iterative" => ScheduleMode::Iterative,
            "once" => ScheduleMode::Once,
            other => {
                return Err(Error::parse(
                    &origin,
                    line,
                    format!("unknown schedule `{other}` (iterative, once)"),
                ))
            }
        },
    };

    let schedule = ScheduleConfig {
        detector,
        decoder,
        mode,
        max_iterations: keys.parse_opt("max_iterations", 50)?,
        inner_iterations: keys.parse_opt("inner_iterations", 50)?,
    };

    let (sweep_value, sweep_line) = keys.required("ebn0_db")?;
    let ebn0_db: Vec<f64> = sweep_value
        .split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| {
                Error::parse(
                    &origin,
                    sweep_line,
                    format!("cannot parse `{}` as an Eb/N0 value", s.trim()),
                )
            })
        })
        .collect::<Result<_>>()?;

    let label = match keys.take("label") {
        Some((v, _)) => v,
        None => schedule.decoder_label().to_string(),
    };

    Ok(ExperimentConfig {
        label,
        code,
        field_bits,
        channel,
        precision_bits,
        d_max,
        schedule,
        ebn0_db,
        max_frames: keys.parse_opt("max_frames", 1_000_000)?,
        target_frame_errors: keys.parse_opt("target_frame_errors", 100)?,
        seed: keys.parse_opt("seed", 1)?,
    })
}
