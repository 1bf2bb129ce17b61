//! Cooperation-frame channel model: fading draws, relay gain
//! normalization, the upper-triangular cascade matrix, colored-noise
//! covariance and its whitening transform, and frame transmission.
//!
//! One cooperation frame spans `M = beta + 1 + alpha` slots. The source
//! transmits in every slot; from slot 2 on, one relay (round robin over the
//! `beta` relays) scales and forwards what it received in the previous
//! slot. The destination's M received samples follow the row-vector model
//! `y = z S H + w_c`, with `H` upper triangular and `w_c` colored by the
//! amplified relay noise.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::linalg::{cholesky_lower, invert_lower_triangular, CMat, LinalgError};
use crate::precoder::Precoder;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("invalid protocol config: {0}")]
    InvalidConfig(String),
    #[error("relay {index} receives zero power; cannot normalize its gain")]
    ZeroRelayPower { index: usize },
    #[error("noise covariance is not positive definite: {0}")]
    Whitening(#[from] LinalgError),
    #[error("frame has {got} symbols, expected M = {expected}")]
    FrameLength { got: usize, expected: usize },
}

/// Source-relay / inter-relay link treatment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelayMode {
    /// All links Rayleigh faded, relays add their own noise.
    Faded,
    /// Deterministic unit-modulus source-relay and inter-relay fadings and
    /// noiseless relays; destination links stay faded.
    Ideal,
}

/// Relay gain normalization rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GainNormalization {
    /// Unit transmit power conditioned on the fading draw.
    Instantaneous,
    /// Unit transmit power on average over the fading distribution.
    Statistical,
}

/// Average power gains of the four link classes (linear scale).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkGains {
    pub sd: f64,
    pub sr: f64,
    pub rd: f64,
    pub rr: f64,
}

impl LinkGains {
    pub fn unit() -> Self {
        LinkGains { sd: 1.0, sr: 1.0, rd: 1.0, rr: 1.0 }
    }

    /// Source-destination at 0 dB, the "highly reliable" source-relay and
    /// inter-relay links boosted by `db` decibels.
    pub fn reliable_relay_links(db: f64) -> Self {
        let g = 10f64.powf(db / 10.0);
        LinkGains { sd: 1.0, sr: g, rd: 1.0, rr: g }
    }
}

/// Protocol parameters of one cooperation frame.
#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub beta: u32,
    pub alpha: u32,
    /// Per-slot source energy split: the source spends `energies[i]` in
    /// slot i+1 and the relay spends `1 - energies[i]` of it.
    pub energies: Vec<f64>,
    /// Per-link complex AWGN variance is `2 * n0`.
    pub n0: f64,
    pub gains: LinkGains,
    pub relay_mode: RelayMode,
    pub normalization: GainNormalization,
}

impl ProtocolConfig {
    pub fn new(beta: u32, alpha: u32, energies: Vec<f64>, n0: f64) -> Result<Self, ChannelError> {
        let cfg = ProtocolConfig {
            beta,
            alpha,
            energies,
            n0,
            gains: LinkGains::unit(),
            relay_mode: RelayMode::Faded,
            normalization: GainNormalization::Instantaneous,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn num_slots(&self) -> usize {
        (self.beta + 1 + self.alpha) as usize
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.beta == 0 {
            return Err(ChannelError::InvalidConfig("beta must be >= 1".into()));
        }
        if self.beta == 1 && self.alpha > 0 {
            // With one relay the round robin would make it receive and
            // transmit in the same slot.
            return Err(ChannelError::InvalidConfig("alpha > 0 requires beta >= 2".into()));
        }
        if self.energies.len() != self.num_slots() {
            return Err(ChannelError::InvalidConfig(format!(
                "expected {} slot energies, got {}",
                self.num_slots(),
                self.energies.len()
            )));
        }
        if self.energies.iter().any(|&e| !(0.0..=1.0).contains(&e)) {
            return Err(ChannelError::InvalidConfig("slot energies must lie in [0, 1]".into()));
        }
        if self.n0 < 0.0 {
            return Err(ChannelError::InvalidConfig("n0 must be non-negative".into()));
        }
        Ok(())
    }

    pub fn with_n0(&self, n0: f64) -> Self {
        let mut c = self.clone();
        c.n0 = n0;
        c
    }

    /// Average received symbol energy per slot at the destination (source
    /// part plus unit-power relay part).
    pub fn avg_received_symbol_energy(&self) -> f64 {
        let m = self.num_slots() as f64;
        self.energies
            .iter()
            .enumerate()
            .map(|(i, &e)| e * self.gains.sd + if i > 0 { (1.0 - e) * self.gains.rd } else { 0.0 })
            .sum::<f64>()
            / m
    }
}

/// Per-link noise variance `2 N0` for a target Eb/N0 given the information
/// rate in bits per channel use.
pub fn n0_for_ebn0_db(cfg: &ProtocolConfig, rate_bits: f64, ebn0_db: f64) -> f64 {
    assert!(rate_bits > 0.0);
    let es = cfg.avg_received_symbol_energy();
    let eb = es / rate_bits;
    eb / 10f64.powf(ebn0_db / 10.0)
}

/// Effective relay active in slot `i` (1-based): `((i-1) mod beta) + 1`.
pub fn effective_relay_index(beta: u32, i: u32) -> u32 {
    debug_assert!(i >= 1);
    (i - 1) % beta + 1
}

fn draw_cn(rng: &mut impl Rng, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    Complex64::new(
        s * rng.sample::<f64, _>(StandardNormal),
        s * rng.sample::<f64, _>(StandardNormal),
    )
}

/// One quasi-static draw of every fading coefficient of the network.
#[derive(Clone, Debug)]
pub struct FadingRealization {
    pub h_sd: Complex64,
    /// Source to relay j (index j-1).
    pub h_sr: Vec<Complex64>,
    /// Relay j to destination (index j-1).
    pub h_rd: Vec<Complex64>,
    /// Relay j to relay l, `h_rr[j-1][l-1]`, used for j != l.
    pub h_rr: Vec<Vec<Complex64>>,
}

impl FadingRealization {
    pub fn draw(cfg: &ProtocolConfig, rng: &mut impl Rng) -> Self {
        let b = cfg.beta as usize;
        let one = Complex64::new(1.0, 0.0);
        let ideal = cfg.relay_mode == RelayMode::Ideal;
        FadingRealization {
            h_sd: draw_cn(rng, cfg.gains.sd),
            h_sr: (0..b)
                .map(|_| if ideal { one } else { draw_cn(rng, cfg.gains.sr) })
                .collect(),
            h_rd: (0..b).map(|_| draw_cn(rng, cfg.gains.rd)).collect(),
            h_rr: (0..b)
                .map(|j| {
                    (0..b)
                        .map(|l| {
                            if j == l {
                                Complex64::new(0.0, 0.0)
                            } else if ideal {
                                one
                            } else {
                                draw_cn(rng, cfg.gains.rr)
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Source fading into the relay serving slot `i` (1-based).
    pub fn h_sr_slot(&self, beta: u32, i: u32) -> Complex64 {
        self.h_sr[(effective_relay_index(beta, i) - 1) as usize]
    }

    /// Fading from the relay serving slot `i` to the destination.
    pub fn h_rd_slot(&self, beta: u32, i: u32) -> Complex64 {
        self.h_rd[(effective_relay_index(beta, i) - 1) as usize]
    }

    /// Fading from the relay serving slot `i` to the relay serving slot `k`.
    pub fn h_rr_slots(&self, beta: u32, i: u32, k: u32) -> Complex64 {
        let j = (effective_relay_index(beta, i) - 1) as usize;
        let l = (effective_relay_index(beta, k) - 1) as usize;
        self.h_rr[j][l]
    }
}

/// Instantaneous relay gain recursion: relay i's received power given the
/// fading is `E_i |h_sr|^2 + (1-E_i) gamma_{i-1}^2 |h_rr|^2 P_{i-1} + 2 N0`
/// (the noise term drops for ideal noiseless relays); `gamma_i = 1/sqrt(P_i)`.
pub fn relay_gains(fading: &FadingRealization, cfg: &ProtocolConfig) -> Result<Vec<f64>, ChannelError> {
    let m = cfg.num_slots();
    let beta = cfg.beta;
    let relay_noise = match cfg.relay_mode {
        RelayMode::Faded => 2.0 * cfg.n0,
        RelayMode::Ideal => 0.0,
    };
    let mut gammas = Vec::with_capacity(m - 1);
    let mut prev_power = 0.0f64; // P_0: no slot-0 relay
    let mut prev_gamma = 0.0f64; // gamma_0 = 0
    for i in 1..m {
        // Power received by the relay serving slot i (1-based slot index i).
        let slot = i as u32;
        let e_i = cfg.energies[i - 1];
        let (sr2, rr2) = match cfg.normalization {
            GainNormalization::Instantaneous => (
                fading.h_sr_slot(beta, slot).norm_sqr(),
                if i >= 2 {
                    fading.h_rr_slots(beta, slot - 1, slot).norm_sqr()
                } else {
                    0.0
                },
            ),
            GainNormalization::Statistical => (
                match cfg.relay_mode {
                    RelayMode::Faded => cfg.gains.sr,
                    RelayMode::Ideal => 1.0,
                },
                match cfg.relay_mode {
                    RelayMode::Faded => cfg.gains.rr,
                    RelayMode::Ideal => 1.0,
                },
            ),
        };
        let p = e_i * sr2 + (1.0 - e_i) * prev_gamma * prev_gamma * rr2 * prev_power + relay_noise;
        if p <= 0.0 {
            return Err(ChannelError::ZeroRelayPower { index: i });
        }
        let gamma = 1.0 / p.sqrt();
        gammas.push(gamma);
        prev_power = p;
        prev_gamma = gamma;
    }
    Ok(gammas)
}

/// Amplitude of the relay cascade from the signal entering the relay
/// serving slot `from` (already scaled by that relay's input coefficient)
/// to the destination sample of slot `to`, with `1 <= from < to <= M`:
/// product of relay gains, residual energy splits, inter-relay fadings and
/// the final relay-destination fading.
fn cascade_to_destination(
    fading: &FadingRealization,
    gammas: &[f64],
    cfg: &ProtocolConfig,
    from: usize,
    to: usize,
) -> Complex64 {
    debug_assert!(from >= 1 && from < to && to <= cfg.num_slots());
    let beta = cfg.beta;
    let mut coeff = Complex64::new(1.0, 0.0);
    let mut energy = 1.0f64;
    for u in from + 1..=to {
        energy *= 1.0 - cfg.energies[u - 1];
    }
    for u in from..to {
        coeff *= gammas[u - 1];
    }
    for v in from..to - 1 {
        coeff *= fading.h_rr_slots(beta, v as u32, v as u32 + 1);
    }
    coeff *= fading.h_rd_slot(beta, to as u32 - 1);
    coeff * energy.sqrt()
}

/// A drawn channel: gains, cascade matrix, noise covariance and whitener.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    pub config: ProtocolConfig,
    pub fading: FadingRealization,
    pub gammas: Vec<f64>,
    /// Upper-triangular M x M cascade matrix of `y = z S H + w_c`.
    pub h: CMat,
    /// Normalized noise covariance: `E[w_c^H w_c] = 2 N0 Theta`.
    pub theta: CMat,
    /// Inverse Cholesky factor with `Theta = Psi^H Psi`; right-multiplying
    /// received rows by `psi_inv` whitens the noise.
    pub psi_inv: CMat,
}

impl ChannelRealization {
    pub fn new(cfg: ProtocolConfig, fading: FadingRealization) -> Result<Self, ChannelError> {
        cfg.validate()?;
        let gammas = relay_gains(&fading, &cfg)?;
        let h = build_matrix(&fading, &gammas, &cfg);
        let theta = noise_covariance(&fading, &gammas, &cfg);
        let psi_inv = whiten(&theta)?;
        Ok(ChannelRealization { config: cfg, fading, gammas, h, theta, psi_inv })
    }

    pub fn draw(cfg: ProtocolConfig, rng: &mut impl Rng) -> Result<Self, ChannelError> {
        let fading = FadingRealization::draw(&cfg, rng);
        Self::new(cfg, fading)
    }

    /// Effective whitened matrix `G = S H Psi^-1` seen by the detector.
    pub fn effective_matrix(&self, precoder: &Precoder) -> CMat {
        precoder.to_cmat().mul(&self.h).mul(&self.psi_inv)
    }

    /// Transmit one frame of M precoded symbols through the slot-by-slot
    /// protocol recursion, drawing fresh per-link AWGN (never sampling the
    /// covariance directly).
    pub fn simulate_frame(
        &self,
        z: &[Complex64],
        precoder: &Precoder,
        rng: &mut impl Rng,
    ) -> Result<Vec<Complex64>, ChannelError> {
        self.simulate_frame_detailed(z, precoder, rng).map(|(y, _)| y)
    }

    /// Like [`simulate_frame`](Self::simulate_frame), additionally
    /// returning the unscaled reception `y_{r_i}` of the relay serving
    /// each of the first M-1 slots (the quantities the gains normalize).
    pub fn simulate_frame_detailed(
        &self,
        z: &[Complex64],
        precoder: &Precoder,
        rng: &mut impl Rng,
    ) -> Result<(Vec<Complex64>, Vec<Complex64>), ChannelError> {
        let m = self.config.num_slots();
        if z.len() != m {
            return Err(ChannelError::FrameLength { got: z.len(), expected: m });
        }
        let x = precoder.apply(z);
        let cfg = &self.config;
        let beta = cfg.beta;
        let noise_var = 2.0 * cfg.n0;
        let relay_noise_var = match cfg.relay_mode {
            RelayMode::Faded => noise_var,
            RelayMode::Ideal => 0.0,
        };
        let mut y = vec![Complex64::new(0.0, 0.0); m];
        let mut relay_rx = Vec::with_capacity(m - 1);
        let mut prev_relay_rx = Complex64::new(0.0, 0.0);
        let mut prev_gamma = 0.0f64;
        for i in 1..=m {
            let e_i = cfg.energies[i - 1];
            let relayed = (1.0 - e_i).sqrt() * prev_gamma * prev_relay_rx;
            y[i - 1] = e_i.sqrt() * self.fading.h_sd * x[i - 1] + draw_cn(rng, noise_var);
            // relay-destination contribution (none in slot 1)
            if i >= 2 {
                y[i - 1] += self.fading.h_rd_slot(beta, i as u32 - 1) * relayed;
            }
            // reception at the relay serving slot i (feeds slot i+1)
            if i < m {
                let mut rx = e_i.sqrt() * self.fading.h_sr_slot(beta, i as u32) * x[i - 1];
                if i >= 2 {
                    rx += self.fading.h_rr_slots(beta, i as u32 - 1, i as u32) * relayed;
                }
                if relay_noise_var > 0.0 {
                    rx += draw_cn(rng, relay_noise_var);
                }
                relay_rx.push(rx);
                prev_relay_rx = rx;
                prev_gamma = self.gammas[i - 1];
            }
        }
        Ok((y, relay_rx))
    }
}

/// Entry pattern of the cascade matrix: diagonal `sqrt(E_i) h_sd`, and for
/// k >= 1 the (i, i+k) entry is the source-to-relay pickup in slot i times
/// the relay cascade down to the destination sample of slot i+k.
pub fn build_matrix(fading: &FadingRealization, gammas: &[f64], cfg: &ProtocolConfig) -> CMat {
    let m = cfg.num_slots();
    let beta = cfg.beta;
    let mut h = CMat::zeros(m, m);
    for i in 1..=m {
        let e_i = cfg.energies[i - 1];
        h[(i - 1, i - 1)] = e_i.sqrt() * fading.h_sd;
        for j in i + 1..=m {
            h[(i - 1, j - 1)] = e_i.sqrt()
                * fading.h_sr_slot(beta, i as u32)
                * cascade_to_destination(fading, gammas, cfg, i, j);
        }
    }
    h
}

/// Normalized covariance `Theta` of the colored destination noise: slot j
/// collects its own AWGN plus every earlier relay's noise scaled by the
/// same cascade coefficients that appear in `H`.
pub fn noise_covariance(fading: &FadingRealization, gammas: &[f64], cfg: &ProtocolConfig) -> CMat {
    let m = cfg.num_slots();
    let mut theta = CMat::identity(m);
    if cfg.relay_mode == RelayMode::Ideal {
        return theta; // noiseless relays leave the destination noise white
    }
    // coeff[t][j]: coefficient of relay-t noise inside w_{j+1}
    let mut coeff = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for t in 1..m {
        for j in t + 1..=m {
            coeff[t - 1][j - 1] = cascade_to_destination(fading, gammas, cfg, t, j);
        }
    }
    for a in 0..m {
        for b in 0..m {
            let mut sum = Complex64::new(0.0, 0.0);
            for t in 0..m {
                sum += coeff[t][a].conj() * coeff[t][b];
            }
            theta[(a, b)] += sum;
        }
    }
    theta
}

/// Whitener `Psi^-1` from the Cholesky factorization `Theta = Psi^H Psi`.
pub fn whiten(theta: &CMat) -> Result<CMat, ChannelError> {
    let l = cholesky_lower(theta)?; // Theta = L L^H, so Psi = L^H
    Ok(invert_lower_triangular(&l).hermitian())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn cfg_beta2() -> ProtocolConfig {
        ProtocolConfig::new(2, 0, vec![1.0, 0.5, 0.5], 0.05).unwrap()
    }

    #[test]
    fn relay_round_robin() {
        assert_eq!(effective_relay_index(2, 1), 1);
        assert_eq!(effective_relay_index(2, 2), 2);
        assert_eq!(effective_relay_index(2, 3), 1);
        assert_eq!(effective_relay_index(2, 4), 2);
        for i in 1..=9 {
            assert_eq!(effective_relay_index(1, i), 1);
        }
    }

    #[test]
    fn gamma_matches_hand_value() {
        // beta = 1, E1 = 1, |h_sr| = 1, 2N0 = 1 -> P1 = 2, gamma = 1/sqrt(2)
        let cfg = ProtocolConfig::new(1, 0, vec![1.0, 0.5], 0.5).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let mut fading = FadingRealization::draw(&cfg, &mut rng);
        fading.h_sr[0] = Complex64::new(1.0, 0.0);
        let g = relay_gains(&fading, &cfg).unwrap();
        assert!((g[0] - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ideal_noiseless_relay_has_unit_gain() {
        let mut cfg = ProtocolConfig::new(1, 0, vec![1.0, 0.5], 0.0).unwrap();
        cfg.relay_mode = RelayMode::Ideal;
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let fading = FadingRealization::draw(&cfg, &mut rng);
        let g = relay_gains(&fading, &cfg).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_is_upper_triangular_and_matches_pattern() {
        let cfg = cfg_beta2();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let real = ChannelRealization::draw(cfg.clone(), &mut rng).unwrap();
        assert!(real.h.is_upper_triangular(0.0));
        let f = &real.fading;
        let g = &real.gammas;
        // (1,1): sqrt(E1) h_sd
        assert!((real.h[(0, 0)] - f.h_sd).norm() < 1e-15);
        // (1,2): sqrt(E1 (1-E2)) gamma_1 h_sr1 h_r1d
        let expect01 = (1.0f64 * 0.5).sqrt() * g[0] * f.h_sr[0] * f.h_rd[0];
        assert!((real.h[(0, 1)] - expect01).norm() < 1e-14);
        // (1,3): sqrt(E1 (1-E2)(1-E3)) gamma_1 gamma_2 h_sr1 h_r1r2 h_r2d
        let expect02 = (0.25f64).sqrt() * g[0] * g[1] * f.h_sr[0] * f.h_rr[0][1] * f.h_rd[1];
        assert!((real.h[(0, 2)] - expect02).norm() < 1e-14);
        // (2,3): sqrt(E2 (1-E3)) gamma_2 h_sr2 h_r2d
        let expect12 = (0.25f64).sqrt() * g[1] * f.h_sr[1] * f.h_rd[1];
        assert!((real.h[(1, 2)] - expect12).norm() < 1e-14);
    }

    #[test]
    fn two_slot_theta_is_diagonal() {
        let cfg = ProtocolConfig::new(1, 0, vec![1.0, 0.5], 0.1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let real = ChannelRealization::draw(cfg, &mut rng).unwrap();
        let f = &real.fading;
        assert!((real.theta[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(real.theta[(0, 1)].norm() < 1e-15);
        let expect = 1.0 + 0.5 * real.gammas[0].powi(2) * f.h_rd[0].norm_sqr();
        assert!((real.theta[(1, 1)].re - expect).abs() < 1e-14);
    }

    #[test]
    fn theta_cascade_matches_hand_expansion_m3() {
        let cfg = cfg_beta2();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let real = ChannelRealization::draw(cfg, &mut rng).unwrap();
        let f = &real.fading;
        let g = &real.gammas;
        // w2 = sqrt(1-E2) g1 h_r1d w_r1 + w_d2
        let c12 = 0.5f64.sqrt() * g[0] * f.h_rd[0];
        // w3 = sqrt((1-E2)(1-E3)) g1 g2 h_r1r2 h_r2d w_r1 + sqrt(1-E3) g2 h_r2d w_r2 + w_d3
        let c13 = 0.25f64.sqrt() * g[0] * g[1] * f.h_rr[0][1] * f.h_rd[1];
        let c23 = 0.5f64.sqrt() * g[1] * f.h_rd[1];
        assert!((real.theta[(1, 1)] - Complex64::new(1.0 + c12.norm_sqr(), 0.0)).norm() < 1e-13);
        assert!((real.theta[(2, 2)] - Complex64::new(1.0 + c13.norm_sqr() + c23.norm_sqr(), 0.0)).norm() < 1e-13);
        assert!((real.theta[(1, 2)] - c12.conj() * c13).norm() < 1e-13);
        assert!(real.theta[(1, 2)].norm() > 0.0, "relay-1 noise couples slots 2 and 3");
    }

    #[test]
    fn theta_cascade_matches_hand_expansion_m4() {
        let cfg = ProtocolConfig::new(3, 0, vec![1.0, 0.5, 0.5, 0.5], 0.07).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(55);
        let real = ChannelRealization::draw(cfg, &mut rng).unwrap();
        let f = &real.fading;
        let g = &real.gammas;
        // relay-noise coefficients of w_4, expanded by hand
        let c14 = 0.125f64.sqrt() * g[0] * g[1] * g[2] * f.h_rr[0][1] * f.h_rr[1][2] * f.h_rd[2];
        let c24 = 0.25f64.sqrt() * g[1] * g[2] * f.h_rr[1][2] * f.h_rd[2];
        let c34 = 0.5f64.sqrt() * g[2] * f.h_rd[2];
        let c13 = 0.25f64.sqrt() * g[0] * g[1] * f.h_rr[0][1] * f.h_rd[1];
        let c23 = 0.5f64.sqrt() * g[1] * f.h_rd[1];
        let c12 = 0.5f64.sqrt() * g[0] * f.h_rd[0];
        let expect44 = 1.0 + c14.norm_sqr() + c24.norm_sqr() + c34.norm_sqr();
        assert!((real.theta[(3, 3)].re - expect44).abs() < 1e-12);
        assert!((real.theta[(1, 3)] - c12.conj() * c14).norm() < 1e-13);
        assert!((real.theta[(2, 3)] - (c13.conj() * c14 + c23.conj() * c24)).norm() < 1e-13);
        // the cascade coefficient of w_{r,i} inside w_j mirrors H's rows:
        // H(i, j) = sqrt(E_i) h_sr_i * cascade(i -> j)
        for i in 1..=3usize {
            for j in (i + 1)..=4usize {
                let cascade = [[c12, c13, c14], [Complex64::new(0.0, 0.0), c23, c24], [
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    c34,
                ]][i - 1][j - 2];
                let e_i = real.config.energies[i - 1];
                let expect_h = e_i.sqrt() * f.h_sr_slot(3, i as u32) * cascade;
                assert!(
                    (real.h[(i - 1, j - 1)] - expect_h).norm() < 1e-13,
                    "H({i},{j}) does not share the noise cascade"
                );
            }
        }
    }

    #[test]
    fn whitener_inverts_cholesky() {
        let cfg = cfg_beta2();
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let real = ChannelRealization::draw(cfg, &mut rng).unwrap();
        let psi = real.psi_inv.clone();
        // Theta = Psi^H Psi with Psi = (psi_inv)^-1; check Psi^H Psi psi_inv^H psi_inv = I
        let prod = psi.hermitian().mul(&real.theta).mul(&psi);
        assert!(prod.frobenius_distance(&CMat::identity(3)) < 1e-10);
        // trivial cases
        let id = whiten(&CMat::identity(2)).unwrap();
        assert!(id.frobenius_distance(&CMat::identity(2)) < 1e-15);
        let diag = CMat::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 4.0]]);
        let w = whiten(&diag).unwrap();
        assert!((w[(1, 1)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn noiseless_frame_reproduces_matrix_model() {
        let mut cfg = cfg_beta2();
        cfg.n0 = 0.0;
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let real = ChannelRealization::draw(cfg, &mut rng).unwrap();
        let prec = Precoder::identity(3);
        let z: Vec<Complex64> = (0..3)
            .map(|i| Complex64::new(1.0 - i as f64, 0.5 * i as f64))
            .collect();
        let y = real.simulate_frame(&z, &prec, &mut rng).unwrap();
        let expect = real.h.left_mul_vec(&z);
        for (a, b) in y.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12, "recursion must match z*H");
        }
    }

    #[test]
    fn zero_input_noise_matches_covariance() {
        let cfg = cfg_beta2();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let real = ChannelRealization::draw(cfg.clone(), &mut rng).unwrap();
        let prec = Precoder::identity(3);
        let z = vec![Complex64::new(0.0, 0.0); 3];
        let trials = 200_000;
        let mut acc = CMat::zeros(3, 3);
        for _ in 0..trials {
            let w = real.simulate_frame(&z, &prec, &mut rng).unwrap();
            for a in 0..3 {
                for b in 0..3 {
                    acc[(a, b)] += w[a].conj() * w[b];
                }
            }
        }
        let emp = acc.scale(1.0 / trials as f64);
        let expect = real.theta.scale(2.0 * cfg.n0);
        let rel = emp.frobenius_distance(&expect) / expect.frobenius_norm();
        assert!(rel < 0.02, "relative covariance error {rel}");
    }

    #[test]
    fn energy_preserving_preset_balances_slots() {
        // E = (1, 0.5): with unit-power relays both slots carry equal
        // average received energy.
        let cfg = ProtocolConfig::new(1, 0, vec![1.0, 0.5], 0.01).unwrap();
        assert!((cfg.avg_received_symbol_energy() - 1.0).abs() < 1e-15);
        let cfg3 = cfg_beta2();
        assert!((cfg3.avg_received_symbol_energy() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn row_fading_dependence_is_nested_in_ideal_mode() {
        // With ideal relays, row i of H depends exactly on h_sd and the
        // h_rd of relays serving slots i+1..M.
        let mut cfg = ProtocolConfig::new(2, 2, vec![1.0, 0.5, 0.5, 0.5, 0.5], 0.01).unwrap();
        cfg.relay_mode = RelayMode::Ideal;
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let real = ChannelRealization::draw(cfg.clone(), &mut rng).unwrap();
        let m = cfg.num_slots();
        for i in 0..m {
            for j in 0..m {
                let e = real.h[(i, j)];
                if j < i {
                    assert_eq!(e, Complex64::new(0.0, 0.0));
                } else if j == i {
                    assert!((e - cfg.energies[i].sqrt() * real.fading.h_sd).norm() < 1e-14);
                } else {
                    // depends (linearly) on h_rd of the relay serving slot j
                    let relay = (effective_relay_index(cfg.beta, j as u32) - 1) as usize;
                    let ratio = e / real.fading.h_rd[relay];
                    assert!(ratio.im.abs() < 1e-12, "only the final hop is complex in ideal mode");
                }
            }
        }
    }

    #[test]
    fn statistical_normalization_is_fading_independent() {
        let mut cfg = cfg_beta2();
        cfg.normalization = GainNormalization::Statistical;
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let f1 = FadingRealization::draw(&cfg, &mut rng);
        let f2 = FadingRealization::draw(&cfg, &mut rng);
        assert_eq!(relay_gains(&f1, &cfg).unwrap(), relay_gains(&f2, &cfg).unwrap());
    }
}
