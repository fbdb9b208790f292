//! Predicted and instrumented per-symbol operation counts.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detector::{
    DetectorConfig, DetectorInput, DetectorVariant, OpCounts, PhaseDetector, SymbolPmf,
};
use crate::error::Result;
use crate::modem::{apply_channel, generate_phase, Constellation, ConstellationKind};

/// Closed-form counts per code symbol per iteration: additions,
/// multiplications and table lookups.
pub fn predicted_ops(variant: DetectorVariant, m: u64, n_theta: u64) -> OpCounts {
    match variant {
        DetectorVariant::Tp => OpCounts::new(7 * m + 12, 11 * m + 22, 2 * m + 2),
        DetectorVariant::EpNative | DetectorVariant::EpDamped | DetectorVariant::EpModified => {
            OpCounts::new(16 * m + 18, 34 * m + 25, 12 * m + 8)
        }
        DetectorVariant::DpBcjr => {
            let n = n_theta;
            OpCounts::new(
                5 * n * n + (18 * m - 6) * n - (m + 2),
                n * (14 * m + 1) + 1,
                2 * n * n + n * (3 * m - 1) - m,
            )
        }
    }
}

/// Length of the synthetic calibration frame.
pub const CALIBRATION_SYMBOLS: usize = 64;

/// Instrumented per-symbol, per-iteration counts on a synthetic frame
/// (6 degree phase noise, one pilot in 20, uniform payload priors).
pub fn measured_ops(
    variant: DetectorVariant,
    kind: ConstellationKind,
    n_theta: usize,
) -> Result<[f64; 3]> {
    let constellation = Constellation::new(kind);
    let m = constellation.size();
    let sigma_delta = 6f64.to_radians();
    let sigma2 = 0.1;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b5);
    let k = CALIBRATION_SYMBOLS;
    let symbols: Vec<usize> = (0..k).map(|_| rng.random_range(0..m)).collect();
    let points: Vec<Complex64> = symbols.iter().map(|&s| constellation.points()[s]).collect();
    let phase = generate_phase(k, sigma_delta, &mut rng);
    let received = apply_channel(&points, &phase, sigma2, &mut rng)?;
    let pilot_mask: Vec<bool> = (0..k).map(|i| i % 20 == 0).collect();
    let priors: Vec<SymbolPmf> = (0..k)
        .map(|i| {
            if pilot_mask[i] {
                SymbolPmf::indicator(m, symbols[i])
            } else {
                SymbolPmf::uniform(m)
            }
        })
        .collect();
    let mut cfg = DetectorConfig::for_variant(variant);
    cfg.n_theta = n_theta;
    let det = PhaseDetector {
        cfg: &cfg,
        constellation: &constellation,
        sigma2,
        sigma_delta,
    };
    let out = det.run(
        DetectorInput {
            received: &received,
            priors: &priors,
            pilot_mask: &pilot_mask,
            rejection: None,
        },
        1,
    )?;
    Ok(out.ops.per(out.symbol_updates))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpsReport {
    pub predicted: OpCounts,
    pub measured: [f64; 3],
}

impl OpsReport {
    /// Measured over predicted, per category.
    pub fn ratio(&self) -> [f64; 3] {
        let p = [self.predicted.adds, self.predicted.mults, self.predicted.lut];
        [0, 1, 2].map(|i| self.measured[i] / p[i] as f64)
    }
}

pub fn count_ops(variant: DetectorVariant, kind: ConstellationKind, n_theta: usize) -> Result<OpsReport> {
    let m = Constellation::new(kind).size() as u64;
    Ok(OpsReport {
        predicted: predicted_ops(variant, m, n_theta as u64),
        measured: measured_ops(variant, kind, n_theta)?,
    })
}

/// Least-squares polynomial fit of degree `degree`; returns the coefficient
/// of determination.
pub fn polyfit_r2(x: &[f64], y: &[f64], degree: usize) -> f64 {
    let p = degree + 1;
    // normal equations
    let mut a = vec![vec![0.0; p + 1]; p];
    for (&xi, &yi) in x.iter().zip(y) {
        let pows: Vec<f64> = (0..p).map(|j| xi.powi(j as i32)).collect();
        for r in 0..p {
            for c in 0..p {
                a[r][c] += pows[r] * pows[c];
            }
            a[r][p] += pows[r] * yi;
        }
    }
    for col in 0..p {
        let piv = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        a.swap(col, piv);
        let d = a[col][col];
        if d == 0.0 {
            continue;
        }
        for row in 0..p {
            if row != col {
                let f = a[row][col] / d;
                for c in col..=p {
                    a[row][c] -= f * a[col][c];
                }
            }
        }
    }
    let coef: Vec<f64> = (0..p)
        .map(|i| if a[i][i] == 0.0 { 0.0 } else { a[i][p] / a[i][i] })
        .collect();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let fit: f64 = coef.iter().enumerate().map(|(j, c)| c * xi.powi(j as i32)).sum();
        ss_res += (yi - fit).powi(2);
        ss_tot += (yi - mean).powi(2);
    }
    if ss_tot == 0.0 {
        return if ss_res == 0.0 { 1.0 } else { 0.0 };
    }
    1.0 - ss_res / ss_tot
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(predicted_ops(DetectorVariant::Tp, 4, 0), OpCounts::new(40, 66, 10));
        assert_eq!(predicted_ops(DetectorVariant::EpNative, 16, 0), OpCounts::new(274, 569, 200));
        assert_eq!(predicted_ops(DetectorVariant::DpBcjr, 4, 512).adds, 1_344_506);
    }

    #[test]
    fn fit_quality() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v * v - v + 2.0).collect();
        assert!((polyfit_r2(&x, &y, 2) - 1.0).abs() < 1e-12);
        let noisy = [1.0, 5.0, 2.0, 6.0];
        assert!(polyfit_r2(&x, &noisy, 1) < 0.9);
    }
}
