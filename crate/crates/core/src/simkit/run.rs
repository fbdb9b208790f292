use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::detector::OpCounts;
use crate::error::{Error, Result};
use crate::ldpc::LdpcCode;
use crate::modem::{
    apply_channel, build_frame, ebn0_to_sigma2, generate_phase, ChannelParams, Constellation, Frame,
    FramePlan,
};
use crate::receiver::{run_receiver, ReceiverContext};

/// Frames simulated per batch. Stop rules are checked frame by frame in
/// index order, so the batch size never changes the result.
const BATCH: u64 = 16;

/// One row of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub scenario: String,
    pub variant: String,
    pub ebn0_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub mean_turbo_iters: f64,
    /// Mean rejected observations per frame.
    pub mean_rejections: f64,
    /// Operation counts per symbol per inner detector iteration.
    pub adds: f64,
    pub mults: f64,
    pub lut: f64,
    pub seed: u64,
    pub config_hash: String,
    pub wall_seconds: f64,
}

/// Outcome of one simulated frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FrameResult {
    pub bit_errors: u64,
    pub turbo_iterations: u64,
    pub rejections: u64,
    pub ops: OpCounts,
    pub symbol_updates: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Totals {
    frames: u64,
    bit_errors: u64,
    frame_errors: u64,
    turbo: u64,
    rejections: u64,
    ops: OpCounts,
    updates: u64,
}

impl Totals {
    fn add(&mut self, r: &FrameResult) {
        self.frames += 1;
        self.bit_errors += r.bit_errors;
        self.frame_errors += u64::from(r.bit_errors > 0);
        self.turbo += r.turbo_iterations;
        self.rejections += r.rejections;
        self.ops += r.ops;
        self.updates += r.symbol_updates;
    }
}

/// Stream seed for one frame, mixing the base seed, the operating point and
/// the frame index.
pub fn frame_seed(base_seed: u64, ebn0_db: f64, frame_index: u64) -> u64 {
    let mut h = splitmix64(base_seed);
    h = splitmix64(h ^ ebn0_db.to_bits());
    splitmix64(h ^ frame_index)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A configured link with its code and frame layout built once.
#[derive(Debug)]
pub struct Simulation {
    cfg: RunConfig,
    code: LdpcCode,
    constellation: Constellation,
    plan: FramePlan,
    hash: String,
}

impl Simulation {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let code = cfg.scenario.code.load()?;
        Self::with_code(cfg, code)
    }

    /// Reuse an already constructed code.
    pub fn with_code(cfg: RunConfig, code: LdpcCode) -> Result<Self> {
        cfg.validate()?;
        let constellation = Constellation::new(cfg.scenario.constellation);
        let bps = constellation.bits_per_symbol();
        if code.n() % bps != 0 {
            return Err(Error::Config(format!(
                "code length {} is not a multiple of {bps} bits per symbol",
                code.n()
            )));
        }
        let plan = FramePlan::for_payload(
            cfg.scenario.pilots,
            code.n() / bps,
            &constellation,
            cfg.scenario.pilot_seed,
        )?;
        let hash = cfg.config_hash();
        Ok(Self {
            cfg,
            code,
            constellation,
            plan,
            hash,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn code(&self) -> &LdpcCode {
        &self.code
    }

    pub fn plan(&self) -> &FramePlan {
        &self.plan
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn sigma2(&self, ebn0_db: f64) -> Result<f64> {
        ebn0_to_sigma2(
            ebn0_db,
            self.code.rate(),
            self.constellation.bits_per_symbol(),
            self.plan.payload_fraction(),
        )
    }

    pub fn channel(&self, ebn0_db: f64) -> Result<ChannelParams> {
        ChannelParams::new(self.sigma2(ebn0_db)?, self.cfg.scenario.sigma_delta_deg.to_radians())
    }

    /// Draw information bits, encode, frame and pass through the channel.
    pub fn generate_frame(&self, channel: &ChannelParams, rng: &mut ChaCha8Rng) -> Result<Frame> {
        let info: Vec<u8> = (0..self.code.k()).map(|_| rng.random_range(0..2u8)).collect();
        let coded = self.code.encode(&info)?;
        let mut frame = build_frame(&self.plan, &self.constellation, info, coded)?;
        frame.true_phase = generate_phase(self.plan.len(), channel.sigma_delta, rng);
        frame.received = apply_channel(&frame.coded_symbols, &frame.true_phase, channel.sigma2, rng)?;
        Ok(frame)
    }

    /// Simulate and decode frame `index` at `ebn0_db`.
    pub fn run_frame(&self, ebn0_db: f64, index: u64) -> Result<FrameResult> {
        let channel = self.channel(ebn0_db)?;
        let mut rng = ChaCha8Rng::seed_from_u64(frame_seed(self.cfg.base_seed, ebn0_db, index));
        let frame = self.generate_frame(&channel, &mut rng)?;
        let ctx = ReceiverContext {
            code: &self.code,
            plan: &self.plan,
            constellation: &self.constellation,
            channel,
            ebn0_db,
        };
        let out = run_receiver(&frame, &ctx, &self.cfg.scenario.receiver)?;
        let bit_errors = out
            .decoded_bits
            .iter()
            .zip(&frame.payload_bits)
            .filter(|(a, b)| a != b)
            .count() as u64;
        let mut res = FrameResult {
            bit_errors,
            turbo_iterations: out.turbo_iterations as u64,
            ..Default::default()
        };
        for d in &out.diagnostics {
            res.rejections += d.rejections as u64;
            res.ops += d.ops;
            res.symbol_updates += d.symbol_updates;
        }
        Ok(res)
    }

    /// Simulate one operating point until the stop rule fires.
    pub fn run_point(&self, ebn0_db: f64) -> Result<BerRecord> {
        let start = Instant::now();
        let stop = self.cfg.stop;
        let mut totals = Totals::default();
        let mut next = 0u64;
        'outer: while next < stop.max_frames {
            let end = (next + BATCH).min(stop.max_frames);
            let results = (next..end)
                .into_par_iter()
                .map(|i| self.run_frame(ebn0_db, i))
                .collect::<Result<Vec<_>>>()?;
            for r in &results {
                totals.add(r);
                if totals.frame_errors >= stop.min_frame_errors {
                    break 'outer;
                }
            }
            next = end;
        }
        Ok(self.record(ebn0_db, &totals, start.elapsed().as_secs_f64()))
    }

    fn record(&self, ebn0_db: f64, t: &Totals, wall_seconds: f64) -> BerRecord {
        let frames = t.frames.max(1) as f64;
        let bits = frames * self.code.k() as f64;
        let [adds, mults, lut] = t.ops.per(t.updates);
        BerRecord {
            scenario: self.cfg.name.clone(),
            variant: self.cfg.variant_label().to_string(),
            ebn0_db,
            frames: t.frames,
            bit_errors: t.bit_errors,
            frame_errors: t.frame_errors,
            ber: t.bit_errors as f64 / bits,
            fer: t.frame_errors as f64 / frames,
            mean_turbo_iters: t.turbo as f64 / frames,
            mean_rejections: t.rejections as f64 / frames,
            adds,
            mults,
            lut,
            seed: self.cfg.base_seed,
            config_hash: self.hash.clone(),
            wall_seconds,
        }
    }

    /// Run every grid point, calling `on_record` as each finishes.
    pub fn run_sweep(&self, mut on_record: impl FnMut(&BerRecord)) -> Result<Vec<BerRecord>> {
        let mut out = Vec::with_capacity(self.cfg.ebn0_db.len());
        for &e in &self.cfg.ebn0_db {
            let rec = self.run_point(e)?;
            on_record(&rec);
            out.push(rec);
        }
        Ok(out)
    }
}

/// Run `f` on a dedicated pool of `workers` threads (all cores when `None`).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::Config("worker count must be >= 1".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Write `<stem>.csv` and the `<stem>.json` config sidecar into `dir`.
pub fn write_outputs(
    dir: impl AsRef<Path>,
    stem: &str,
    cfg: &RunConfig,
    records: &[BerRecord],
) -> Result<(PathBuf, PathBuf)> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    write_csv(&csv_path, records)?;
    let json = serde_json::to_string_pretty(cfg).expect("config serializes");
    fs::write(&json_path, json + "\n").map_err(|e| Error::io(&json_path, e))?;
    Ok((csv_path, json_path))
}

pub fn write_csv(path: &Path, records: &[BerRecord]) -> Result<()> {
    let to_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::invalid(format!("{}: {other:?}", path.display())),
    };
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    if records.is_empty() {
        w.write_record(CSV_COLUMNS).map_err(to_err)?;
    }
    for r in records {
        w.serialize(r).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<BerRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    r.deserialize()
        .map(|row| row.map_err(|e| Error::invalid(format!("{}: {e}", path.display()))))
        .collect()
}

pub const CSV_COLUMNS: [&str; 16] = [
    "scenario",
    "variant",
    "ebn0_db",
    "frames",
    "bit_errors",
    "frame_errors",
    "ber",
    "fer",
    "mean_turbo_iters",
    "mean_rejections",
    "adds",
    "mults",
    "lut",
    "seed",
    "config_hash",
    "wall_seconds",
];
