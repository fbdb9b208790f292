use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::constellation::Constellation;
use crate::error::{Error, Result};

/// Where the known symbols sit inside a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum PilotPattern {
    /// `block_len` pilots followed by `gap` payload symbols, repeated from
    /// the start of the frame. `gap = 0` makes every symbol a pilot.
    Distributed { block_len: usize, gap: usize },
    /// A preamble, then `burst_len` pilots after every `burst_gap` payload
    /// symbols, then a postamble.
    Bursts {
        preamble: usize,
        burst_len: usize,
        burst_gap: usize,
        postamble: usize,
    },
    /// Pilots only at both ends of the frame.
    PreamblePostambleOnly { len: usize },
}

impl PilotPattern {
    fn validate(&self) -> Result<()> {
        match *self {
            PilotPattern::Distributed { block_len: 0, .. } => {
                Err(Error::invalid("distributed pilot block length must be >= 1"))
            }
            PilotPattern::Bursts { burst_gap: 0, .. } => {
                Err(Error::invalid("burst gap must be >= 1"))
            }
            _ => Ok(()),
        }
    }

    pub fn is_pilot(&self, i: usize, total_len: usize) -> bool {
        match *self {
            PilotPattern::Distributed { block_len, gap } => i % (block_len + gap) < block_len,
            PilotPattern::Bursts {
                preamble,
                burst_len,
                burst_gap,
                postamble,
            } => {
                if i < preamble || i + postamble >= total_len {
                    true
                } else {
                    (i - preamble) % (burst_gap + burst_len) >= burst_gap
                }
            }
            PilotPattern::PreamblePostambleOnly { len } => i < len || i + len >= total_len,
        }
    }

    /// Smallest frame length carrying exactly `n_payload` payload symbols
    /// with the frame ending on the pattern's closing pilots (if any).
    pub fn frame_len_for_payload(&self, n_payload: usize) -> Result<usize> {
        self.validate()?;
        Ok(match *self {
            PilotPattern::Distributed { block_len, gap } => {
                if gap == 0 {
                    if n_payload > 0 {
                        return Err(Error::invalid(
                            "an all-pilot pattern cannot carry payload symbols",
                        ));
                    }
                    block_len
                } else {
                    block_len * n_payload.div_ceil(gap) + n_payload
                }
            }
            PilotPattern::Bursts {
                preamble,
                burst_len,
                burst_gap,
                postamble,
            } => {
                let bursts = n_payload.saturating_sub(1) / burst_gap;
                preamble + n_payload + burst_len * bursts + postamble
            }
            PilotPattern::PreamblePostambleOnly { len } => 2 * len + n_payload,
        })
    }
}

/// Pilot layout of a frame together with the known pilot symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePlan {
    pattern: PilotPattern,
    pilot_mask: Vec<bool>,
    /// Constellation index at each position; only meaningful where the mask is set.
    pilot_symbols: Vec<usize>,
    payload_positions: Vec<usize>,
}

impl FramePlan {
    /// Lay out `pattern` over exactly `total_len` symbols. Pilot symbols are
    /// drawn uniformly from the constellation with a stream seeded by `pilot_seed`.
    pub fn new(
        pattern: PilotPattern,
        total_len: usize,
        constellation: &Constellation,
        pilot_seed: u64,
    ) -> Result<Self> {
        pattern.validate()?;
        if total_len == 0 {
            return Err(Error::invalid("frame length must be >= 1"));
        }
        let pilot_mask: Vec<bool> = (0..total_len).map(|i| pattern.is_pilot(i, total_len)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(pilot_seed);
        let pilot_symbols = pilot_mask
            .iter()
            .map(|&p| if p { rng.random_range(0..constellation.size()) } else { 0 })
            .collect();
        let payload_positions = (0..total_len).filter(|&i| !pilot_mask[i]).collect();
        Ok(Self {
            pattern,
            pilot_mask,
            pilot_symbols,
            payload_positions,
        })
    }

    pub fn for_payload(
        pattern: PilotPattern,
        n_payload: usize,
        constellation: &Constellation,
        pilot_seed: u64,
    ) -> Result<Self> {
        let k = pattern.frame_len_for_payload(n_payload)?;
        let plan = Self::new(pattern, k, constellation, pilot_seed)?;
        debug_assert_eq!(plan.payload_len(), n_payload);
        Ok(plan)
    }

    pub fn pattern(&self) -> PilotPattern {
        self.pattern
    }

    pub fn len(&self) -> usize {
        self.pilot_mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pilot_mask.is_empty()
    }

    pub fn pilot_mask(&self) -> &[bool] {
        &self.pilot_mask
    }

    #[inline]
    pub fn is_pilot(&self, k: usize) -> bool {
        self.pilot_mask[k]
    }

    /// Constellation index of the pilot at position `k`.
    pub fn pilot_symbol(&self, k: usize) -> Option<usize> {
        self.pilot_mask[k].then(|| self.pilot_symbols[k])
    }

    pub fn pilot_count(&self) -> usize {
        self.len() - self.payload_positions.len()
    }

    pub fn payload_positions(&self) -> &[usize] {
        &self.payload_positions
    }

    pub fn payload_len(&self) -> usize {
        self.payload_positions.len()
    }

    pub fn payload_fraction(&self) -> f64 {
        self.payload_len() as f64 / self.len() as f64
    }
}

/// One transmitted frame and what the channel did to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub payload_bits: Vec<u8>,
    pub coded_bits: Vec<u8>,
    /// Constellation index per position, pilots included.
    pub symbol_indices: Vec<usize>,
    pub coded_symbols: Vec<Complex64>,
    /// Unwrapped phase trajectory.
    pub true_phase: Vec<f64>,
    pub received: Vec<Complex64>,
}

/// Place Gray-mapped coded bits on the payload positions and the plan's
/// pilots elsewhere. Phase and received samples are left empty.
pub fn build_frame(
    plan: &FramePlan,
    constellation: &Constellation,
    payload_bits: Vec<u8>,
    coded_bits: Vec<u8>,
) -> Result<Frame> {
    let expected = plan.payload_len() * constellation.bits_per_symbol();
    if coded_bits.len() != expected {
        return Err(Error::LengthMismatch {
            what: "coded bits vs payload capacity",
            expected,
            got: coded_bits.len(),
        });
    }
    let data = constellation.map_indices(&coded_bits)?;
    let mut symbol_indices = vec![0usize; plan.len()];
    let mut data_iter = data.into_iter();
    for (k, slot) in symbol_indices.iter_mut().enumerate() {
        *slot = match plan.pilot_symbol(k) {
            Some(p) => p,
            None => data_iter.next().expect("payload length checked above"),
        };
    }
    let coded_symbols = symbol_indices
        .iter()
        .map(|&m| constellation.points()[m])
        .collect();
    Ok(Frame {
        payload_bits,
        coded_bits,
        symbol_indices,
        coded_symbols,
        true_phase: Vec::new(),
        received: Vec::new(),
    })
}
