use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use pnep_bench::bench_frame;
use pnep_core::detector::{DetectorConfig, DetectorInput, DetectorVariant, PhaseDetector};
use pnep_core::modem::ConstellationKind;

fn detectors(c: &mut Criterion) {
    let len = 2106;
    let mut group = c.benchmark_group("detector");
    group.throughput(Throughput::Elements(len as u64));
    for kind in [ConstellationKind::Qpsk, ConstellationKind::Qam16] {
        let f = bench_frame(kind, len, 20, 1);
        for variant in [DetectorVariant::Tp, DetectorVariant::EpNative, DetectorVariant::EpModified] {
            let cfg = DetectorConfig::for_variant(variant);
            let det = PhaseDetector {
                cfg: &cfg,
                constellation: &f.constellation,
                sigma2: f.sigma2,
                sigma_delta: f.sigma_delta,
            };
            let input = DetectorInput {
                received: &f.received,
                priors: &f.priors,
                pilot_mask: &f.pilot_mask,
                rejection: None,
            };
            group.bench_with_input(
                BenchmarkId::new(variant.label(), format!("{kind:?}")),
                &input,
                |b, input| b.iter(|| det.run(*input, variant.default_inner_iterations()).unwrap()),
            );
        }
    }
    group.finish();
}

fn dp_bcjr_grid(c: &mut Criterion) {
    let len = 256;
    let f = bench_frame(ConstellationKind::Qpsk, len, 20, 2);
    let mut group = c.benchmark_group("dp-BCJR");
    group.sample_size(10);
    group.throughput(Throughput::Elements(len as u64));
    for n_theta in [64, 128, 256, 512] {
        let mut cfg = DetectorConfig::for_variant(DetectorVariant::DpBcjr);
        cfg.n_theta = n_theta;
        let det = PhaseDetector {
            cfg: &cfg,
            constellation: &f.constellation,
            sigma2: f.sigma2,
            sigma_delta: f.sigma_delta,
        };
        let input = DetectorInput {
            received: &f.received,
            priors: &f.priors,
            pilot_mask: &f.pilot_mask,
            rejection: None,
        };
        group.bench_with_input(BenchmarkId::from_parameter(n_theta), &input, |b, input| {
            b.iter(|| det.run(*input, 1).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, detectors, dp_bcjr_grid);
criterion_main!(benches);
