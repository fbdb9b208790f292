//! LDPC codes: regular construction, alist ingestion, systematic encoding and
//! sum-product decoding.

mod construct;
mod decoder;
mod encoder;
mod matrix;

use std::path::Path;

pub use construct::construct_regular_matrix;
pub use decoder::{DecodeOutput, SpaDecoder, LLR_MAX};
pub use encoder::SystematicEncoder;
pub use matrix::ParityCheckMatrix;

use decoder::EdgeLayout;

use crate::error::{Error, Result};

/// A parity-check matrix with its encoder and decoder edge layout. Immutable
/// and shareable across threads; decoders borrow it.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    h: ParityCheckMatrix,
    encoder: SystematicEncoder,
    layout: EdgeLayout,
}

impl LdpcCode {
    pub fn from_matrix(h: ParityCheckMatrix) -> Self {
        let encoder = SystematicEncoder::new(&h);
        let layout = EdgeLayout::new(&h);
        Self { h, encoder, layout }
    }

    pub fn construct_regular(n: usize, col_deg: usize, row_deg: usize, seed: u64) -> Result<Self> {
        construct_regular_matrix(n, col_deg, row_deg, seed).map(Self::from_matrix)
    }

    pub fn load_matrix(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ParityCheckMatrix::from_alist(&text).map(Self::from_matrix)
    }

    pub fn write_alist(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.h.to_alist()).map_err(|e| Error::io(path, e))
    }

    pub fn matrix(&self) -> &ParityCheckMatrix {
        &self.h
    }

    pub fn n(&self) -> usize {
        self.h.n()
    }

    /// Number of information bits, `n - rank(H)`.
    pub fn k(&self) -> usize {
        self.encoder.k()
    }

    pub fn rank(&self) -> usize {
        self.encoder.rank()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k() {
            return Err(Error::LengthMismatch {
                what: "information bits",
                expected: self.k(),
                got: info.len(),
            });
        }
        Ok(self.encoder.encode_unchecked(info))
    }

    pub fn extract_info(&self, codeword: &[u8]) -> Vec<u8> {
        self.encoder.extract_info(codeword)
    }

    pub fn decoder(&self) -> SpaDecoder<'_> {
        SpaDecoder::new(&self.layout)
    }

    /// One-shot decode with a fresh decoder.
    pub fn decode_spa(&self, llr_in: &[f64], max_iter: usize) -> Result<DecodeOutput> {
        if llr_in.len() != self.n() {
            return Err(Error::LengthMismatch {
                what: "input LLRs",
                expected: self.n(),
                got: llr_in.len(),
            });
        }
        if llr_in.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("input LLRs must be finite"));
        }
        Ok(self.decoder().decode(llr_in, max_iter))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const HAMMING: [u8; 21] = [
        1, 0, 1, 0, 1, 0, 1, //
        0, 1, 1, 0, 0, 1, 1, //
        0, 0, 0, 1, 1, 1, 1,
    ];

    fn hamming() -> LdpcCode {
        LdpcCode::from_matrix(ParityCheckMatrix::from_dense(3, 7, &HAMMING).unwrap())
    }

    #[test]
    fn hamming_rank_and_rate() {
        let code = hamming();
        assert_eq!(code.rank(), 3);
        assert_eq!(code.k(), 4);
        assert!((code.rate() - 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn all_codewords_satisfy_checks() {
        let code = hamming();
        for m in 0..16u8 {
            let info: Vec<u8> = (0..4).map(|i| (m >> i) & 1).collect();
            let cw = code.encode(&info).unwrap();
            assert!(code.matrix().syndrome_is_zero(&cw));
            assert_eq!(code.extract_info(&cw), info);
        }
        assert_eq!(code.encode(&[0; 4]).unwrap(), vec![0; 7]);
        assert!(code.encode(&[0; 3]).is_err());
    }

    #[test]
    fn rank_deficient_matrix() {
        // Third row is the sum of the first two.
        let h = ParityCheckMatrix::from_dense(3, 4, &[1, 1, 0, 0, 0, 1, 1, 0, 1, 0, 1, 1]).unwrap();
        let h = ParityCheckMatrix::from_rows(
            4,
            vec![h.rows()[0].clone(), h.rows()[1].clone(), vec![0, 2], vec![3, 2]],
        )
        .unwrap();
        let code = LdpcCode::from_matrix(h);
        assert_eq!(code.rank(), 3);
        assert_eq!(code.k(), 1);
        let cw = code.encode(&[1]).unwrap();
        assert!(code.matrix().syndrome_is_zero(&cw));
    }

    #[test]
    fn noiseless_codeword_converges_immediately() {
        let code = LdpcCode::construct_regular(96, 3, 6, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let info: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
        let cw = code.encode(&info).unwrap();
        let llr: Vec<f64> = cw.iter().map(|&b| if b == 0 { LLR_MAX } else { -LLR_MAX }).collect();
        let out = code.decode_spa(&llr, 50).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
        assert_eq!(out.hard_bits, cw);
    }

    #[test]
    fn zero_input_gives_zero_extrinsic() {
        let code = LdpcCode::construct_regular(96, 3, 6, 7).unwrap();
        let out = code.decode_spa(&vec![0.0; 96], 10).unwrap();
        assert!(out.llr_extrinsic.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn extrinsic_decomposition_and_converged_flag() {
        let code = LdpcCode::construct_regular(200, 3, 6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..20 {
            let info: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
            let cw = code.encode(&info).unwrap();
            let sigma = 0.6 + 0.05 * trial as f64;
            let llr: Vec<f64> = cw
                .iter()
                .map(|&b| {
                    let x = if b == 0 { 1.0 } else { -1.0 };
                    let y = x + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal);
                    2.0 * y / (sigma * sigma)
                })
                .collect();
            let out = code.decode_spa(&llr, 30).unwrap();
            for v in 0..code.n() {
                let expect = (llr[v] + out.llr_extrinsic[v]).clamp(-LLR_MAX, LLR_MAX);
                assert!((out.llr_posterior[v] - expect).abs() < 1e-12);
            }
            assert_eq!(out.converged, code.matrix().syndrome_is_zero(&out.hard_bits));
            let again = code.decode_spa(&llr, 30).unwrap();
            assert_eq!(out, again);
        }
    }

    #[test]
    fn rejects_non_finite_llrs() {
        let code = hamming();
        assert!(code.decode_spa(&[f64::NAN; 7], 5).is_err());
        assert!(code.decode_spa(&[0.0; 6], 5).is_err());
    }

    #[test]
    fn write_and_load_round_trip() {
        let code = LdpcCode::construct_regular(120, 3, 6, 11).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.alist");
        code.write_alist(&path).unwrap();
        let back = LdpcCode::load_matrix(&path).unwrap();
        assert_eq!(back.matrix(), code.matrix());
    }
}
