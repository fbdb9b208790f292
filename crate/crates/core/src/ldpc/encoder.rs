//! Systematic encoding from the reduced row-echelon form of H over GF(2).
//!
//! Information bits occupy the non-pivot columns; each pivot column holds the
//! parity of a fixed subset of information bits. Dependent rows of H vanish
//! during elimination, so rank-deficient matrices are handled directly.

use super::matrix::ParityCheckMatrix;

type Words = Vec<u64>;

#[inline]
fn get(w: &[u64], i: usize) -> bool {
    (w[i / 64] >> (i % 64)) & 1 == 1
}

#[inline]
fn set(w: &mut [u64], i: usize) {
    w[i / 64] |= 1 << (i % 64);
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystematicEncoder {
    n: usize,
    info_cols: Vec<usize>,
    pivot_cols: Vec<usize>,
    /// One bitset over information-bit indices per pivot column.
    parity_taps: Vec<Words>,
}

impl SystematicEncoder {
    pub fn new(h: &ParityCheckMatrix) -> Self {
        let n = h.n();
        let words = n.div_ceil(64);
        let mut rows: Vec<Words> = h
            .rows()
            .iter()
            .map(|row| {
                let mut w = vec![0u64; words];
                for &c in row {
                    set(&mut w, c);
                }
                w
            })
            .collect();

        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for col in 0..n {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| get(&rows[i], col)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && get(row, col) {
                    for (a, b) in row.iter_mut().zip(&pivot) {
                        *a ^= b;
                    }
                }
            }
            pivot_cols.push(col);
            r += 1;
        }
        rows.truncate(r);

        let mut is_pivot = vec![false; n];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        let info_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let k_words = info_cols.len().div_ceil(64).max(1);
        let parity_taps = rows
            .iter()
            .map(|row| {
                let mut taps = vec![0u64; k_words];
                for (i, &c) in info_cols.iter().enumerate() {
                    if get(row, c) {
                        set(&mut taps, i);
                    }
                }
                taps
            })
            .collect();
        Self {
            n,
            info_cols,
            pivot_cols,
            parity_taps,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    pub fn k(&self) -> usize {
        self.info_cols.len()
    }

    pub fn info_cols(&self) -> &[usize] {
        &self.info_cols
    }

    /// Caller guarantees `info.len() == k()`.
    pub fn encode_unchecked(&self, info: &[u8]) -> Vec<u8> {
        let mut packed = vec![0u64; self.k().div_ceil(64).max(1)];
        for (i, &b) in info.iter().enumerate() {
            if b & 1 == 1 {
                set(&mut packed, i);
            }
        }
        let mut cw = vec![0u8; self.n];
        for (&c, &b) in self.info_cols.iter().zip(info) {
            cw[c] = b & 1;
        }
        for (&c, taps) in self.pivot_cols.iter().zip(&self.parity_taps) {
            let ones: u32 = taps.iter().zip(&packed).map(|(a, b)| (a & b).count_ones()).sum();
            cw[c] = (ones & 1) as u8;
        }
        cw
    }

    pub fn extract_info(&self, codeword: &[u8]) -> Vec<u8> {
        self.info_cols.iter().map(|&c| codeword[c]).collect()
    }
}
