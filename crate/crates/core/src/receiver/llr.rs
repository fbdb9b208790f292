//! Conversion between symbol pmfs and bit LLRs (`ln P(b=0) - ln P(b=1)`).

use crate::detector::SymbolPmf;
use crate::ldpc::LLR_MAX;
use crate::modem::Constellation;

/// Exact bit marginals of each pmf, appended label bit by label bit (MSB first).
pub fn pmf_to_bit_llrs(pmfs: &[SymbolPmf], constellation: &Constellation) -> Vec<f64> {
    let bps = constellation.bits_per_symbol();
    let mut out = Vec::with_capacity(pmfs.len() * bps);
    for pmf in pmfs {
        for i in 0..bps {
            let (mut p0, mut p1) = (0.0, 0.0);
            for (m, &p) in pmf.probs().iter().enumerate() {
                if constellation.bit(m, i) == 0 {
                    p0 += p;
                } else {
                    p1 += p;
                }
            }
            let llr = if p0 == p1 { 0.0 } else { p0.ln() - p1.ln() };
            out.push(llr.clamp(-LLR_MAX, LLR_MAX));
        }
    }
    out
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Symbol pmfs formed as products of independent bit probabilities.
pub fn bit_llrs_to_pmf(llrs: &[f64], constellation: &Constellation) -> Vec<SymbolPmf> {
    let bps = constellation.bits_per_symbol();
    let m = constellation.size();
    llrs.chunks_exact(bps)
        .map(|bits| {
            let logs: Vec<f64> = (0..m)
                .map(|s| {
                    bits.iter()
                        .enumerate()
                        .map(|(i, &l)| {
                            if constellation.bit(s, i) == 0 {
                                -softplus(-l)
                            } else {
                                -softplus(l)
                            }
                        })
                        .sum()
                })
                .collect();
            SymbolPmf::from_log(&logs)
        })
        .collect()
}
