use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstellationKind {
    #[serde(alias = "qpsk")]
    Qpsk,
    #[serde(alias = "qam16", alias = "16qam")]
    Qam16,
}

/// Unit-energy Gray-mapped constellation.
///
/// Symbol `m` carries the bits of `m` written MSB first, so `bit(m, 0)` is
/// the most significant bit of the label.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: ConstellationKind,
    points: Vec<Complex64>,
    bits_per_symbol: usize,
}

/// Two Gray-coded bits to a 4-level axis value in {-3, -1, 1, 3}.
fn gray_level(b0: usize, b1: usize) -> f64 {
    match (b0, b1) {
        (0, 0) => -3.0,
        (0, 1) => -1.0,
        (1, 1) => 1.0,
        _ => 3.0,
    }
}

impl Constellation {
    pub fn new(kind: ConstellationKind) -> Self {
        match kind {
            ConstellationKind::Qpsk => {
                let points = (0..4)
                    .map(|m| {
                        let i = 1.0 - 2.0 * ((m >> 1) & 1) as f64;
                        let q = 1.0 - 2.0 * (m & 1) as f64;
                        Complex64::new(i, q) * FRAC_1_SQRT_2
                    })
                    .collect();
                Self {
                    kind,
                    points,
                    bits_per_symbol: 2,
                }
            }
            ConstellationKind::Qam16 => {
                let scale = 1.0 / 10.0_f64.sqrt();
                let points = (0..16)
                    .map(|m| {
                        let i = gray_level((m >> 3) & 1, (m >> 2) & 1);
                        let q = gray_level((m >> 1) & 1, m & 1);
                        Complex64::new(i, q) * scale
                    })
                    .collect();
                Self {
                    kind,
                    points,
                    bits_per_symbol: 4,
                }
            }
        }
    }

    pub fn qpsk() -> Self {
        Self::new(ConstellationKind::Qpsk)
    }

    pub fn qam16() -> Self {
        Self::new(ConstellationKind::Qam16)
    }

    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    #[inline]
    pub fn bit(&self, symbol: usize, i: usize) -> u8 {
        ((symbol >> (self.bits_per_symbol - 1 - i)) & 1) as u8
    }

    pub fn index_of_bits(&self, bits: &[u8]) -> usize {
        bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize)
    }

    /// Map a bit stream onto symbol indices, consecutive groups of
    /// `bits_per_symbol` bits per symbol.
    pub fn map_indices(&self, bits: &[u8]) -> Result<Vec<usize>> {
        if bits.len() % self.bits_per_symbol != 0 {
            return Err(Error::LengthMismatch {
                what: "bit stream is not a whole number of symbols",
                expected: bits.len().next_multiple_of(self.bits_per_symbol),
                got: bits.len(),
            });
        }
        Ok(bits
            .chunks(self.bits_per_symbol)
            .map(|c| self.index_of_bits(c))
            .collect())
    }

    pub fn nearest(&self, r: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (m, p) in self.points.iter().enumerate() {
            let d = (r - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = m;
            }
        }
        best
    }

    pub fn bits_of(&self, symbol: usize, out: &mut Vec<u8>) {
        for i in 0..self.bits_per_symbol {
            out.push(self.bit(symbol, i));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_energy() {
        for c in [Constellation::qpsk(), Constellation::qam16()] {
            let e: f64 = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / c.size() as f64;
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        for c in [Constellation::qpsk(), Constellation::qam16()] {
            let pts = c.points();
            let dmin = pts
                .iter()
                .enumerate()
                .flat_map(|(i, a)| pts.iter().skip(i + 1).map(move |b| (a - b).norm()))
                .fold(f64::INFINITY, f64::min);
            for a in 0..c.size() {
                for b in 0..c.size() {
                    if a != b && ((pts[a] - pts[b]).norm() - dmin).abs() < 1e-9 {
                        assert_eq!((a ^ b).count_ones(), 1, "{:?} {a} {b}", c.kind());
                    }
                }
            }
        }
    }

    #[test]
    fn bits_round_trip() {
        let c = Constellation::qam16();
        let bits = [1u8, 0, 1, 1, 0, 0, 1, 0];
        let idx = c.map_indices(&bits).unwrap();
        let mut back = Vec::new();
        for &m in &idx {
            c.bits_of(m, &mut back);
        }
        assert_eq!(back, bits);
        assert!(c.map_indices(&bits[..3]).is_err());
    }
}
