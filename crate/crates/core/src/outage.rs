//! Gaussian-input mutual information of the whitened cooperation-frame
//! channel and Monte Carlo outage probability.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{n0_for_ebn0_db, ChannelError, ChannelRealization, ProtocolConfig};
use crate::linalg::{logdet_hermitian_pd, CMat};
use crate::precoder::Precoder;

#[derive(Debug, Error)]
pub enum OutageError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Instantaneous mutual information per channel use of `y' = z G + w` with
/// unit-variance Gaussian input and white noise of variance `2 n0`:
/// `(1/M) log2 det(I + G^H G / (2 n0))`.
pub fn instantaneous_mi(g: &CMat, n0: f64) -> f64 {
    let m = g.nrows();
    let mut a = g.hermitian().mul(g).scale(1.0 / (2.0 * n0));
    for i in 0..m {
        a[(i, i)] += 1.0;
    }
    let logdet = logdet_hermitian_pd(&a).expect("I + G^H G / 2n0 is positive definite");
    logdet / std::f64::consts::LN_2 / m as f64
}

/// One point of an outage curve with its Wilson 95% confidence interval.
#[derive(Clone, Debug, PartialEq)]
pub struct OutagePoint {
    pub snr_db: f64,
    pub p_out: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Monte Carlo outage probability of the target rate (bits per channel
/// use) along an Eb/N0 grid. Deterministic in `(seed, trials)` regardless
/// of parallelism.
pub fn outage_probability(
    rate_bits: f64,
    snr_grid_db: &[f64],
    cfg: &ProtocolConfig,
    precoder: &Precoder,
    trials: u64,
    seed: u64,
) -> Result<Vec<OutagePoint>, OutageError> {
    cfg.validate()?;
    let mut points = Vec::with_capacity(snr_grid_db.len());
    for (pi, &snr_db) in snr_grid_db.iter().enumerate() {
        let n0 = n0_for_ebn0_db(cfg, rate_bits, snr_db);
        let point_cfg = cfg.with_n0(n0);
        let outages: u64 = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha12Rng::seed_from_u64(mix_seed(seed, pi as u64, t));
                let real = ChannelRealization::draw(point_cfg.clone(), &mut rng)
                    .expect("validated config");
                let g = real.effective_matrix(precoder);
                u64::from(instantaneous_mi(&g, n0) < rate_bits)
            })
            .sum();
        let p = outages as f64 / trials as f64;
        let (lo, hi) = wilson_interval(outages, trials);
        points.push(OutagePoint { snr_db, p_out: p, ci_low: lo, ci_high: hi, trials });
    }
    Ok(points)
}

/// Counter-based per-trial seed derivation (splitmix64 over the tuple).
pub fn mix_seed(master: u64, stream: u64, counter: u64) -> u64 {
    let mut x = master ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ counter.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Closed-form Rayleigh outage of the scalar link `y = sqrt(E) h x + w`
/// with `E|h|^2 = gain`: `1 - exp(-(2^R - 1) 2 n0 / (E gain))`.
pub fn rayleigh_outage_closed_form(rate_bits: f64, energy: f64, gain: f64, n0: f64) -> f64 {
    1.0 - (-(2f64.powf(rate_bits) - 1.0) * 2.0 * n0 / (energy * gain)).exp()
}

/// CSV rendering of an outage curve: `snr_db,p_out,ci_low,ci_high,trials`.
pub fn outage_csv(points: &[OutagePoint]) -> String {
    let mut out = String::from("snr_db,p_out,ci_low,ci_high,trials\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.snr_db, p.p_out, p.ci_low, p.ci_high, p.trials
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::RelayMode;
    use num_complex::Complex64;

    #[test]
    fn scalar_mi_is_shannon_formula() {
        let mut g = CMat::zeros(1, 1);
        g[(0, 0)] = Complex64::new(0.6, -0.8); // |h|^2 = 1
        let n0 = 0.25;
        let want = (1.0f64 + 1.0 / 0.5).log2();
        assert!((instantaneous_mi(&g, n0) - want).abs() < 1e-12);
    }

    #[test]
    fn diagonal_mi_averages_per_slot_capacities() {
        let h = [
            Complex64::new(0.3, 0.4),
            Complex64::new(1.2, 0.0),
            Complex64::new(0.0, 0.9),
        ];
        let mut g = CMat::zeros(3, 3);
        for (i, &hi) in h.iter().enumerate() {
            g[(i, i)] = hi;
        }
        let n0 = 0.2;
        let want: f64 = h
            .iter()
            .map(|hi| (1.0 + hi.norm_sqr() / (2.0 * n0)).log2())
            .sum::<f64>()
            / 3.0;
        assert!((instantaneous_mi(&g, n0) - want).abs() < 1e-12);
    }

    #[test]
    fn mi_invariant_under_orthogonal_precoding() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let cfg = ProtocolConfig::new(2, 0, vec![1.0, 0.5, 0.5], 0.1).unwrap();
        let real = ChannelRealization::draw(cfg, &mut rng).unwrap();
        let id = real.effective_matrix(&Precoder::identity(3));
        let rot = real.effective_matrix(
            &Precoder::embed_single(&Precoder::cyclotomic_2x2(), 3).unwrap(),
        );
        assert!((instantaneous_mi(&id, 0.1) - instantaneous_mi(&rot, 0.1)).abs() < 1e-10);
    }

    #[test]
    fn mi_monotone_in_noise() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(4);
        let cfg = ProtocolConfig::new(2, 0, vec![1.0, 0.5, 0.5], 0.1).unwrap();
        let real = ChannelRealization::draw(cfg, &mut rng).unwrap();
        let g = real.effective_matrix(&Precoder::identity(3));
        let mut prev = f64::INFINITY;
        for n0 in [0.01, 0.1, 1.0, 10.0] {
            let mi = instantaneous_mi(&g, n0);
            assert!(mi >= 0.0 && mi < prev);
            prev = mi;
        }
    }

    #[test]
    fn scalar_outage_matches_closed_form() {
        // beta = 1 with the relay silenced is a scalar Rayleigh link per slot.
        let mut cfg = ProtocolConfig::new(1, 0, vec![1.0, 1.0], 0.1).unwrap();
        cfg.relay_mode = RelayMode::Ideal;
        let rate = 1.0;
        let grid = [6.0, 10.0];
        let pts = outage_probability(rate, &grid, &cfg, &Precoder::identity(2), 150_000, 77).unwrap();
        for p in &pts {
            let n0 = n0_for_ebn0_db(&cfg, rate, p.snr_db);
            // Both slots are independent unit-energy source-destination uses
            // of the same h_sd, so MI < R iff the scalar link is in outage.
            let want = rayleigh_outage_closed_form(rate, 1.0, cfg.gains.sd, n0);
            assert!(
                (p.p_out - want).abs() < 4.0 * (want * (1.0 - want) / p.trials as f64).sqrt() + 1e-4,
                "snr {} p {} want {want}",
                p.snr_db,
                p.p_out
            );
        }
    }

    #[test]
    fn wilson_bounds_are_sane() {
        let (lo, hi) = wilson_interval(0, 1000);
        assert!(lo.abs() < 1e-12);
        assert!(hi < 0.01);
        let (lo2, hi2) = wilson_interval(500, 1000);
        assert!(lo2 < 0.5 && 0.5 < hi2);
    }

    #[test]
    fn deterministic_under_seed() {
        let cfg = ProtocolConfig::new(2, 0, vec![1.0, 0.5, 0.5], 0.1).unwrap();
        let a = outage_probability(1.0, &[8.0], &cfg, &Precoder::identity(3), 2000, 5).unwrap();
        let b = outage_probability(1.0, &[8.0], &cfg, &Precoder::identity(3), 2000, 5).unwrap();
        assert_eq!(a, b);
    }
}
