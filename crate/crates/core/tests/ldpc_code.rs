mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pnep_core::ldpc::{LdpcCode, ParityCheckMatrix, LLR_MAX};

#[test]
fn desk_code_is_regular_and_four_cycle_free() {
    let code = LdpcCode::construct_regular(4000, 3, 6, 1).unwrap();
    let h = code.matrix();
    assert_eq!(h.n(), 4000);
    assert_eq!(h.m(), 2000);
    assert!(h.cols().iter().all(|c| c.len() == 3));
    assert!(h.rows().iter().all(|r| r.len() == 6));
    assert!(!h.has_four_cycle());
    assert!(code.k() >= 2000);
    assert_eq!(code.k() + code.rank(), 4000);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let info: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
        let cw = code.encode(&info).unwrap();
        assert!(h.syndrome_is_zero(&cw));
        assert_eq!(code.extract_info(&cw), info);
    }
}

#[test]
fn construction_is_deterministic_in_seed() {
    let a = LdpcCode::construct_regular(600, 3, 6, 42).unwrap();
    let b = LdpcCode::construct_regular(600, 3, 6, 42).unwrap();
    let c = LdpcCode::construct_regular(600, 3, 6, 43).unwrap();
    assert_eq!(a.matrix(), b.matrix());
    assert_ne!(a.matrix(), c.matrix());
}

#[test]
fn infeasible_degrees_are_rejected() {
    assert!(LdpcCode::construct_regular(10, 3, 7, 1).is_err());
    assert!(LdpcCode::construct_regular(12, 3, 6, 1).is_err());
}

#[test]
fn spa_agrees_with_exhaustive_map_on_hamming() {
    let code = LdpcCode::from_matrix(ParityCheckMatrix::from_dense(3, 7, &common::HAMMING_H).unwrap());
    let codewords: Vec<Vec<u8>> = (0..16u8)
        .map(|w| code.encode(&(0..4).map(|i| (w >> i) & 1).collect::<Vec<_>>()).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let sigma2 = 1.0 / (2.0 * code.rate() * 10f64.powf(0.6));
    let mut agree = 0;
    for _ in 0..2000 {
        let cw = &codewords[rng.random_range(0..16)];
        let llr: Vec<f64> = cw
            .iter()
            .map(|&b| {
                let x = if b == 0 { 1.0 } else { -1.0 };
                2.0 * (x + sigma2.sqrt() * rng.sample::<f64, _>(rand_distr::StandardNormal)) / sigma2
            })
            .collect();
        let spa = code.decode_spa(&llr, 50).unwrap().hard_bits;
        agree += usize::from(spa == common::exhaustive_map_bits(&codewords, &llr));
    }
    assert!(agree >= 1980, "agreement {agree}/2000");
}

#[test]
fn truncated_alist_is_rejected() {
    let code = LdpcCode::construct_regular(120, 3, 6, 2).unwrap();
    let text = code.matrix().to_alist();
    let cut = &text[..text.len() / 2];
    assert!(ParityCheckMatrix::from_alist(cut).is_err());
    assert!(ParityCheckMatrix::from_alist("").is_err());
}

#[test]
fn saturated_input_decodes_in_one_iteration() {
    let code = LdpcCode::construct_regular(4000, 3, 6, 1).unwrap();
    let llr = vec![LLR_MAX; 4000];
    let out = code.decode_spa(&llr, 10).unwrap();
    assert!(out.converged);
    assert!(out.hard_bits.iter().all(|&b| b == 0));
}
