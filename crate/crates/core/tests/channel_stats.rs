use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pnep_core::modem::{apply_channel, ebn0_to_sigma2, generate_phase};

#[test]
fn phase_increments_have_requested_spread() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sd = 6f64.to_radians();
    let theta = generate_phase(200_000, sd, &mut rng);
    let inc: Vec<f64> = theta.windows(2).map(|w| w[1] - w[0]).collect();
    let n = inc.len() as f64;
    let mean = inc.iter().sum::<f64>() / n;
    let var = inc.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!(mean.abs() < 4.0 * sd / n.sqrt());
    assert!((var.sqrt() / sd - 1.0).abs() < 0.01, "std ratio {}", var.sqrt() / sd);
}

#[test]
fn noise_is_circular_with_requested_variance() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 200_000;
    let symbols = vec![Complex64::new(1.0, 0.0); n];
    let phase = vec![0.0; n];
    let sigma2 = 0.3;
    let r = apply_channel(&symbols, &phase, sigma2, &mut rng).unwrap();
    let noise: Vec<Complex64> = r.iter().map(|x| x - 1.0).collect();
    let var_re = noise.iter().map(|x| x.re * x.re).sum::<f64>() / n as f64;
    let var_im = noise.iter().map(|x| x.im * x.im).sum::<f64>() / n as f64;
    let cross = noise.iter().map(|x| x.re * x.im).sum::<f64>() / n as f64;
    assert!((var_re / sigma2 - 1.0).abs() < 0.02);
    assert!((var_im / sigma2 - 1.0).abs() < 0.02);
    assert!(cross.abs() < 0.01);
}

#[test]
fn sigma2_accounts_for_rate_and_pilots() {
    // Eb/N0 = 0 dB, rate 1/2 QPSK without pilots gives Es/N0 = 1, N0 = 1, sigma2 = 1/2.
    assert!((ebn0_to_sigma2(0.0, 0.5, 2, 1.0).unwrap() - 0.5).abs() < 1e-15);
    let with_pilots = ebn0_to_sigma2(0.0, 0.5, 2, 0.95).unwrap();
    assert!((with_pilots - 0.5 / 0.95).abs() < 1e-15);
    assert!(ebn0_to_sigma2(f64::NAN, 0.5, 2, 1.0).is_err());
}
