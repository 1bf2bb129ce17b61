//! Seeded Monte Carlo word-error-rate experiments: configuration,
//! execution, and CSV emission.
//!
//! A "frame" in result rows is one simulated codeword (one fading draw).
//! Per-trial RNG streams are derived by counter-based splitting from the
//! master seed, so results are bit-identical for any worker count.

pub mod config;
mod presets;

pub use presets::{preset_names, presets, presets_matching};

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bicm::{BicmChain, BicmError, ConvCode, SlotPlan};
use crate::bounds::{
    build_equivalent_channel, delta_max_generic, BoundConfig, BoundsError, PrecodingStrategy,
};
use crate::channel::{
    n0_for_ebn0_db, ChannelError, ChannelRealization, FadingRealization, GainNormalization,
    LinkGains, ProtocolConfig, RelayMode,
};
use crate::outage::{mix_seed, OutagePoint};
use crate::precoder::{Precoder, PrecoderError};
use crate::rational::Rational;
use crate::receiver::{turbo_loop, AppDetector, BcjrDecoder, ReceiverError};

use config::ConfigError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("bounds: {0}")]
    Bounds(#[from] BoundsError),
    #[error("channel: {0}")]
    Channel(#[from] ChannelError),
    #[error("chain: {0}")]
    Bicm(#[from] BicmError),
    #[error("precoder: {0}")]
    Precoder(#[from] PrecoderError),
    #[error("receiver: {0}")]
    Receiver(#[from] ReceiverError),
    #[error("plot overlay: {0}")]
    Overlay(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// True when the error is an exhaustive-enumeration cap violation
    /// (mapped to a dedicated exit code by the CLI).
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(
            self,
            HarnessError::Receiver(ReceiverError::DetectorCap { .. })
                | HarnessError::Bounds(BoundsError::EnumerationCap { .. })
        )
    }
}

/// Stopping rule of one SNR point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StopRule {
    pub min_word_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { min_word_errors: 100, max_frames: 1_000_000 }
    }
}

/// Full description of one WER experiment.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub name: String,
    pub beta: u32,
    pub alpha: u32,
    pub energies: Vec<f64>,
    pub gains: LinkGains,
    pub relay_mode: RelayMode,
    pub normalization: GainNormalization,
    pub code_name: String,
    pub plan: SlotPlan,
    pub strategy: PrecodingStrategy,
    pub spreading: u32,
    pub n: usize,
    pub n_iter: usize,
    pub snr_grid_db: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn num_slots(&self) -> usize {
        (self.beta + 1 + self.alpha) as usize
    }

    pub fn code(&self) -> Result<ConvCode, HarnessError> {
        Ok(ConvCode::by_name(&self.code_name).map_err(BicmError::from)?)
    }

    /// Information rate in bits per channel use.
    pub fn rate(&self) -> Result<Rational, HarnessError> {
        Ok(self.plan.rate(self.code()?.rate()))
    }

    pub fn bound_config(&self) -> Result<BoundConfig, HarnessError> {
        // A uniform plan is the equal-spectral-efficiency case.
        let slots = self.plan.slots();
        let slot_plan = if slots.iter().all(|&m| m == slots[0]) {
            None
        } else {
            Some(slots.to_vec())
        };
        Ok(BoundConfig {
            beta: self.beta,
            alpha: self.alpha,
            s: self.spreading,
            rc: self.code()?.rate(),
            slot_plan,
            strategy: self.strategy,
        })
    }

    /// Diversity bound predicted for this configuration.
    pub fn predicted_delta(&self) -> Result<u32, HarnessError> {
        let bc = self.bound_config()?;
        let ch = crate::bounds::build_matryoshka(&bc, self.n as u64)?;
        Ok(delta_max_generic(&ch, bc.rc)?)
    }

    pub fn protocol(&self, n0: f64) -> Result<ProtocolConfig, HarnessError> {
        let mut p = ProtocolConfig::new(self.beta, self.alpha, self.energies.clone(), n0)?;
        p.gains = self.gains;
        p.relay_mode = self.relay_mode;
        p.normalization = self.normalization;
        p.validate()?;
        Ok(p)
    }

    pub fn build_precoder(&self) -> Result<Precoder, HarnessError> {
        build_precoder(self.strategy, self.spreading, self.num_slots())
    }

    /// Parse from the flat key-value file format.
    pub fn from_text(text: &str) -> Result<Self, HarnessError> {
        use config::*;
        let raw = RawConfig::parse(text)?;
        let name = raw.get("experiment", "name").unwrap_or("experiment").to_string();
        let n = parse_usize("n", raw.require("experiment", "n")?)?;
        let n_iter = raw
            .get("experiment", "n_iter")
            .map(|v| parse_usize("n_iter", v))
            .transpose()?
            .unwrap_or(10);
        let seed = raw
            .get("experiment", "seed")
            .map(|v| parse_u64("seed", v))
            .transpose()?
            .unwrap_or(1);
        let snr_grid_db = raw
            .get("experiment", "snr")
            .map(parse_snr_grid)
            .transpose()?
            .unwrap_or_else(|| (0..=12).map(|i| 2.0 * i as f64).collect());
        let stop = StopRule {
            min_word_errors: raw
                .get("experiment", "min_word_errors")
                .map(|v| parse_u64("min_word_errors", v))
                .transpose()?
                .unwrap_or(100),
            max_frames: raw
                .get("experiment", "max_frames")
                .map(|v| parse_u64("max_frames", v))
                .transpose()?
                .unwrap_or(1_000_000),
        };
        let beta = parse_u32("beta", raw.require("protocol", "beta")?)?;
        let alpha = raw
            .get("protocol", "alpha")
            .map(|v| parse_u32("alpha", v))
            .transpose()?
            .unwrap_or(0);
        let m = (beta + 1 + alpha) as usize;
        let energies = match raw.get("protocol", "energies") {
            Some(v) => parse_f64_list("energies", v)?,
            None => default_energies(m),
        };
        let relay_mode = raw
            .get("protocol", "relay_mode")
            .map(parse_relay_mode)
            .transpose()?
            .unwrap_or(RelayMode::Faded);
        let normalization = raw
            .get("protocol", "normalization")
            .map(parse_normalization)
            .transpose()?
            .unwrap_or(GainNormalization::Instantaneous);
        let gains = match (raw.get("protocol", "gains"), raw.get("protocol", "relay_link_boost_db")) {
            (Some(v), _) => parse_gains(v)?,
            (None, Some(db)) => LinkGains::reliable_relay_links(parse_f64("relay_link_boost_db", db)?),
            (None, None) => LinkGains::reliable_relay_links(20.0),
        };
        let code_name = raw.require("code", "name")?.to_string();
        let plan_m = parse_u32_list("m", raw.require("plan", "m")?)?;
        let plan = SlotPlan::new(plan_m)
            .map_err(|e| ConfigError::BadValue { key: "m".into(), msg: format!("{e}") })?;
        let strategy = raw
            .get("precoder", "strategy")
            .map(parse_strategy)
            .transpose()?
            .unwrap_or(PrecodingStrategy::None);
        let spreading = raw
            .get("precoder", "s")
            .map(|v| parse_u32("s", v))
            .transpose()?
            .unwrap_or(1);
        Ok(ExperimentConfig {
            name,
            beta,
            alpha,
            energies,
            gains,
            relay_mode,
            normalization,
            code_name,
            plan,
            strategy,
            spreading,
            n,
            n_iter,
            snr_grid_db,
            stop,
            seed,
        })
    }

    /// Canonical text form: the basis of the config hash and a valid input
    /// for `from_text`.
    pub fn to_canonical_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[experiment]");
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "n_iter = {}", self.n_iter);
        let _ = writeln!(s, "seed = {}", self.seed);
        let snr: Vec<String> = self.snr_grid_db.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "snr = {}", snr.join(","));
        let _ = writeln!(s, "min_word_errors = {}", self.stop.min_word_errors);
        let _ = writeln!(s, "max_frames = {}", self.stop.max_frames);
        let _ = writeln!(s, "[protocol]");
        let _ = writeln!(s, "beta = {}", self.beta);
        let _ = writeln!(s, "alpha = {}", self.alpha);
        let e: Vec<String> = self.energies.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "energies = {}", e.join(","));
        let _ = writeln!(
            s,
            "relay_mode = {}",
            match self.relay_mode {
                RelayMode::Faded => "faded",
                RelayMode::Ideal => "ideal",
            }
        );
        let _ = writeln!(
            s,
            "normalization = {}",
            match self.normalization {
                GainNormalization::Instantaneous => "instantaneous",
                GainNormalization::Statistical => "statistical",
            }
        );
        let _ = writeln!(
            s,
            "gains = {},{},{},{}",
            self.gains.sd, self.gains.sr, self.gains.rd, self.gains.rr
        );
        let _ = writeln!(s, "[code]");
        let _ = writeln!(s, "name = {}", self.code_name);
        let _ = writeln!(s, "[precoder]");
        let _ = writeln!(
            s,
            "strategy = {}",
            match self.strategy {
                PrecodingStrategy::None => "none",
                PrecodingStrategy::SinglePrecoder => "single",
                PrecodingStrategy::MultiPrecoder => "multi",
            }
        );
        let _ = writeln!(s, "s = {}", self.spreading);
        let _ = writeln!(s, "[plan]");
        let m: Vec<String> = self.plan.slots().iter().map(u32::to_string).collect();
        let _ = writeln!(s, "m = {}", m.join(","));
        s
    }

    pub fn config_hash(&self) -> String {
        format!("{:016x}", fnv1a(self.to_canonical_string().as_bytes()))
    }
}

/// Slot energies of the energy-invariant preset: full power in slot 1,
/// half shared with the relay afterwards.
pub fn default_energies(m: usize) -> Vec<f64> {
    let mut e = vec![0.5; m];
    e[0] = 1.0;
    e
}

/// Precoder selection from (strategy, spreading, frame length).
pub fn build_precoder(
    strategy: PrecodingStrategy,
    spreading: u32,
    m: usize,
) -> Result<Precoder, HarnessError> {
    if spreading <= 1 {
        return Ok(Precoder::identity(m));
    }
    let rotation = match spreading {
        2 => Precoder::cyclotomic_2x2(),
        4 => Precoder::kruskemper_4x4()?,
        other => {
            return Err(HarnessError::Precoder(PrecoderError::DataFile(format!(
                "no bundled rotation of size {other} (available: 2, 4)"
            ))))
        }
    };
    let p = match strategy {
        PrecodingStrategy::None => Precoder::identity(m),
        PrecodingStrategy::SinglePrecoder => Precoder::embed_single(&rotation, m)?,
        PrecodingStrategy::MultiPrecoder => Precoder::embed_multi(&rotation, m)?,
    };
    Ok(p)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// One measured SNR point. `wall_time_s` is informational and deliberately
/// excluded from the deterministic CSV output.
#[derive(Clone, Debug)]
pub struct ResultRow {
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub word_errors: u64,
    pub ber: f64,
    pub wer: f64,
    pub wall_time_s: f64,
    pub seed: u64,
    pub config_hash: String,
}

/// Everything reusable across trials of one experiment.
pub struct BuiltExperiment {
    pub cfg: ExperimentConfig,
    pub code: ConvCode,
    pub chain: BicmChain,
    pub precoder: Precoder,
    pub decoder: BcjrDecoder,
    pub rate_bits: f64,
    pub predicted_delta: u32,
}

impl BuiltExperiment {
    pub fn build(cfg: &ExperimentConfig) -> Result<Self, HarnessError> {
        let bc = cfg.bound_config()?;
        bc.validate()?;
        let eq = build_equivalent_channel(&bc, cfg.n as u64)?;
        let predicted_delta = delta_max_generic(&eq.channel, bc.rc)?;
        let code = cfg.code()?;
        let chain = BicmChain::build(code.clone(), cfg.plan.clone(), &eq, cfg.n, cfg.seed)?;
        let precoder = cfg.build_precoder()?;
        let decoder = BcjrDecoder::new(&code, chain.k_info);
        // Surface the exhaustive-detector cap before any simulation starts.
        let probe = crate::linalg::CMat::identity(cfg.num_slots());
        AppDetector::new(&probe, &cfg.plan, 1.0)?;
        let rate_bits = cfg.rate()?.to_f64();
        cfg.protocol(1.0)?;
        Ok(BuiltExperiment {
            cfg: cfg.clone(),
            code,
            chain,
            precoder,
            decoder,
            rate_bits,
            predicted_delta,
        })
    }

    /// Simulate one codeword: fading draw, transmission, 10-ish iterations
    /// of detection/decoding, error counting.
    fn simulate_codeword(&self, n0: f64, rng: &mut ChaCha12Rng) -> Result<(u64, bool), HarnessError> {
        let protocol = self.cfg.protocol(n0)?;
        let mut info = vec![0u8; self.chain.k_info];
        for b in info.iter_mut() {
            *b = rng.random_range(0..2);
        }
        let fading = FadingRealization::draw(&protocol, rng);
        let real = ChannelRealization::new(protocol, fading)?;
        let g = real.effective_matrix(&self.precoder);
        let detector = AppDetector::new(&g, &self.cfg.plan, n0)?;
        let frames_z = self.chain.transmit(&info)?;
        let mut frames_y = Vec::with_capacity(frames_z.len());
        for z in &frames_z {
            let y = real.simulate_frame(z, &self.precoder, rng)?;
            frames_y.push(real.psi_inv.left_mul_vec(&y));
        }
        let result = turbo_loop(&frames_y, &detector, &self.decoder, &self.chain, self.cfg.n_iter)?;
        let bit_errors = result
            .decoded_info
            .iter()
            .zip(&info)
            .filter(|(a, b)| a != b)
            .count() as u64;
        Ok((bit_errors, bit_errors > 0))
    }
}

const BATCH: u64 = 64;

/// Run the WER sweep. `workers` sizes a dedicated thread pool (None uses
/// the global one); the output is bit-identical either way.
pub fn run_wer(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<ResultRow>, HarnessError> {
    let built = BuiltExperiment::build(cfg)?;
    match workers {
        None => run_wer_built(&built),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .expect("thread pool");
            pool.install(|| run_wer_built(&built))
        }
    }
}

fn run_wer_built(built: &BuiltExperiment) -> Result<Vec<ResultRow>, HarnessError> {
    let cfg = &built.cfg;
    let hash = cfg.config_hash();
    let mut rows = Vec::with_capacity(cfg.snr_grid_db.len());
    for (pi, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let start = std::time::Instant::now();
        let n0 = n0_for_ebn0_db(&cfg.protocol(1.0)?, built.rate_bits, snr_db);
        let mut frames = 0u64;
        let mut bit_errors = 0u64;
        let mut word_errors = 0u64;
        while word_errors < cfg.stop.min_word_errors && frames < cfg.stop.max_frames {
            let batch_end = (frames + BATCH).min(cfg.stop.max_frames);
            let batch: Vec<(u64, bool)> = (frames..batch_end)
                .into_par_iter()
                .map(|t| {
                    let mut rng = ChaCha12Rng::seed_from_u64(mix_seed(cfg.seed, pi as u64, t));
                    built.simulate_codeword(n0, &mut rng)
                })
                .collect::<Result<_, _>>()?;
            for (be, we) in batch {
                bit_errors += be;
                word_errors += u64::from(we);
            }
            frames = batch_end;
        }
        let k = built.chain.k_info as u64;
        rows.push(ResultRow {
            snr_db,
            frames,
            bit_errors,
            word_errors,
            ber: bit_errors as f64 / (frames * k) as f64,
            wer: word_errors as f64 / frames as f64,
            wall_time_s: start.elapsed().as_secs_f64(),
            seed: cfg.seed,
            config_hash: hash.clone(),
        });
    }
    Ok(rows)
}

/// Deterministic CSV of a result table.
pub fn emit_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("snr_db,frames,bit_errors,word_errors,ber,wer,seed,config_hash\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.snr_db, r.frames, r.bit_errors, r.word_errors, r.ber, r.wer, r.seed, r.config_hash
        ));
    }
    out
}

/// Plot data `(snr_db, wer)` with an optional outage overlay; the overlay
/// grid must match the result grid exactly.
pub fn emit_plotdata(rows: &[ResultRow], outage: Option<&[OutagePoint]>) -> Result<String, HarnessError> {
    let mut out = String::new();
    match outage {
        None => {
            out.push_str("snr_db,wer\n");
            for r in rows {
                out.push_str(&format!("{},{}\n", r.snr_db, r.wer));
            }
        }
        Some(pts) => {
            if pts.len() != rows.len()
                || rows.iter().zip(pts).any(|(r, p)| (r.snr_db - p.snr_db).abs() > 1e-9)
            {
                return Err(HarnessError::Overlay(format!(
                    "outage grid ({} points) does not align with the WER grid ({} points)",
                    pts.len(),
                    rows.len()
                )));
            }
            out.push_str("snr_db,wer,p_out\n");
            for (r, p) in rows.iter().zip(pts) {
                out.push_str(&format!("{},{},{}\n", r.snr_db, r.wer, p.p_out));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_e4() -> ExperimentConfig {
        let mut cfg = presets_matching("E4-s1").pop().unwrap();
        cfg.n = 240;
        cfg.relay_mode = RelayMode::Ideal;
        cfg.snr_grid_db = vec![14.0];
        cfg.stop = StopRule { min_word_errors: 5, max_frames: 192 };
        cfg.seed = 31;
        cfg
    }

    #[test]
    fn config_text_round_trip() {
        let cfg = tiny_e4();
        let text = cfg.to_canonical_string();
        let back = ExperimentConfig::from_text(&text).unwrap();
        assert_eq!(back.to_canonical_string(), text);
        assert_eq!(back.config_hash(), cfg.config_hash());
    }

    #[test]
    fn noise_off_decodes_perfectly() {
        let mut cfg = tiny_e4();
        cfg.snr_grid_db = vec![90.0];
        cfg.stop = StopRule { min_word_errors: 1, max_frames: 8 };
        let rows = run_wer(&cfg, Some(1)).unwrap();
        assert_eq!(rows[0].word_errors, 0);
        assert_eq!(rows[0].frames, 8);
        assert_eq!(rows[0].wer, 0.0);
    }

    #[test]
    fn worker_count_does_not_change_bytes() {
        let cfg = tiny_e4();
        let a = emit_csv(&run_wer(&cfg, Some(1)).unwrap());
        let b = emit_csv(&run_wer(&cfg, Some(2)).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn predicted_delta_annotations() {
        for (name, want) in [("E4-s1", 2), ("E4-s2", 3), ("E3-alpha2", 4), ("E1-s1", 2)] {
            let cfg = presets_matching(name).pop().unwrap();
            assert_eq!(cfg.predicted_delta().unwrap(), want, "{name}");
        }
    }

    #[test]
    fn overlay_grid_mismatch_fails_loudly() {
        let rows = vec![ResultRow {
            snr_db: 2.0,
            frames: 10,
            bit_errors: 1,
            word_errors: 1,
            ber: 0.01,
            wer: 0.1,
            wall_time_s: 0.0,
            seed: 1,
            config_hash: "x".into(),
        }];
        let pts = vec![OutagePoint { snr_db: 4.0, p_out: 0.5, ci_low: 0.4, ci_high: 0.6, trials: 10 }];
        assert!(emit_plotdata(&rows, Some(&pts)).is_err());
        assert!(emit_plotdata(&rows, None).unwrap().contains("snr_db,wer"));
    }
}
