//! Shared fixtures for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pnep_core::detector::SymbolPmf;
use pnep_core::modem::{apply_channel, generate_phase, Constellation, ConstellationKind};
use pnep_core::Complex64;

/// A synthetic received frame with one pilot every `pilot_every` symbols.
pub struct BenchFrame {
    pub constellation: Constellation,
    pub received: Vec<Complex64>,
    pub priors: Vec<SymbolPmf>,
    pub pilot_mask: Vec<bool>,
    pub sigma2: f64,
    pub sigma_delta: f64,
}

pub fn bench_frame(kind: ConstellationKind, len: usize, pilot_every: usize, seed: u64) -> BenchFrame {
    let constellation = Constellation::new(kind);
    let m = constellation.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols: Vec<usize> = (0..len).map(|_| rng.random_range(0..m)).collect();
    let points: Vec<Complex64> = symbols.iter().map(|&s| constellation.points()[s]).collect();
    let sigma_delta = 6f64.to_radians();
    let sigma2 = 0.2;
    let phase = generate_phase(len, sigma_delta, &mut rng);
    let received = apply_channel(&points, &phase, sigma2, &mut rng).expect("valid channel");
    let pilot_mask: Vec<bool> = (0..len).map(|k| k % pilot_every == 0).collect();
    let priors = (0..len)
        .map(|k| {
            if pilot_mask[k] {
                SymbolPmf::indicator(m, symbols[k])
            } else {
                SymbolPmf::uniform(m)
            }
        })
        .collect();
    BenchFrame {
        constellation,
        received,
        priors,
        pilot_mask,
        sigma2,
        sigma_delta,
    }
}
