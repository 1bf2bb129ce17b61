//! End-to-end receiver behavior on drawn channels: extrinsic quality
//! ordering across slots, and iteration gain of the turbo loop.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use ssafsim::channel::{ChannelRealization, ProtocolConfig, RelayMode};
use ssafsim::harness::{default_energies, presets_matching, run_wer, StopRule};
use ssafsim::bicm::{map_symbols, SlotPlan};
use ssafsim::precoder::Precoder;
use ssafsim::receiver::{AppDetector, LlrKind, LlrVector};

/// Empirical mutual information of LLRs against known bits.
fn empirical_mi(pairs: &[(u8, f64)]) -> f64 {
    let s: f64 = pairs
        .iter()
        .map(|&(b, l)| {
            let signed = if b == 0 { l } else { -l };
            1.0 - ((-signed).exp().ln_1p() / std::f64::consts::LN_2)
        })
        .sum();
    s / pairs.len() as f64
}

#[test]
fn detector_extrinsic_quality_follows_slot_diversity() {
    // Ideal relays, identity precoder: slot k sees beta + 2 - k fading
    // variables, so earlier slots must carry better extrinsic information.
    let mut cfg = ProtocolConfig::new(2, 0, default_energies(3), 0.0).unwrap();
    cfg.relay_mode = RelayMode::Ideal;
    let plan = SlotPlan::uniform(1, 3);
    let prec = Precoder::identity(3);
    let mut rng = ChaCha12Rng::seed_from_u64(4242);
    let mut per_slot: Vec<Vec<(u8, f64)>> = vec![Vec::new(); 3];
    let n0 = 0.05;
    for _ in 0..4000 {
        let real = ChannelRealization::draw(cfg.with_n0(n0), &mut rng).unwrap();
        let g = real.effective_matrix(&prec);
        let det = AppDetector::new(&g, &plan, n0).unwrap();
        let bits: Vec<u8> = (0..3).map(|_| rng.random_range(0..2)).collect();
        let z = map_symbols(&bits, &plan).unwrap().remove(0);
        let y = real.simulate_frame(&z, &prec, &mut rng).unwrap();
        let yw = real.psi_inv.left_mul_vec(&y);
        let ext = det
            .detect(&yw, &LlrVector::zeros(LlrKind::Prior, 3))
            .unwrap();
        for k in 0..3 {
            per_slot[k].push((bits[k], ext.values()[k]));
        }
    }
    let mi: Vec<f64> = per_slot.iter().map(|p| empirical_mi(p)).collect();
    assert!(
        mi[0] >= mi[1] - 0.01 && mi[1] >= mi[2] - 0.01,
        "slot extrinsic MI not ordered: {mi:?}"
    );
    assert!(mi[0] > mi[2] + 0.02, "diversity gap should be visible: {mi:?}");
}

#[test]
fn turbo_iterations_reduce_word_errors() {
    // The rotated frame leans on the iterative exchange: one pass leaves
    // most of the spreading gain on the table.
    let mut base = presets_matching("E4-s2").pop().unwrap();
    base.n = 240;
    base.relay_mode = RelayMode::Ideal;
    base.snr_grid_db = vec![12.0];
    base.stop = StopRule { min_word_errors: u64::MAX, max_frames: 10_000 };
    base.seed = 777;

    let mut one = base.clone();
    one.n_iter = 1;
    let wer_one = run_wer(&one, None).unwrap()[0].wer;
    let mut ten = base;
    ten.n_iter = 10;
    let wer_ten = run_wer(&ten, None).unwrap()[0].wer;
    assert!(
        wer_ten <= wer_one,
        "10 iterations ({wer_ten}) should not lose to 1 ({wer_one})"
    );
    assert!(wer_ten < 0.8 * wer_one, "iteration gain should be material");
}

#[test]
fn noiseless_frames_decode_through_whitened_model() {
    // zero-noise sanity across a non-trivial precoder: y Psi^-1 against
    // G = S H Psi^-1 must reproduce the transmitted bits at every slot
    let mut cfg = ProtocolConfig::new(2, 0, default_energies(3), 0.0).unwrap();
    cfg.relay_mode = RelayMode::Ideal;
    let plan = SlotPlan::uniform(2, 3);
    let prec = Precoder::embed_single(&Precoder::cyclotomic_2x2(), 3).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    for _ in 0..20 {
        let real = ChannelRealization::draw(cfg.clone(), &mut rng).unwrap();
        let g = real.effective_matrix(&prec);
        let det = AppDetector::new(&g, &plan, 1e-4).unwrap();
        let bits: Vec<u8> = (0..6).map(|_| rng.random_range(0..2)).collect();
        let z = map_symbols(&bits, &plan).unwrap().remove(0);
        let y = real.simulate_frame(&z, &prec, &mut rng).unwrap();
        let yw = real.psi_inv.left_mul_vec(&y);
        let ext = det
            .detect(&yw, &LlrVector::zeros(LlrKind::Prior, 6))
            .unwrap();
        for (j, &b) in bits.iter().enumerate() {
            let l = ext.values()[j];
            assert!(
                if b == 0 { l > 0.0 } else { l < 0.0 },
                "slot bit {j} got llr {l} for bit {b}"
            );
        }
    }
}

#[test]
fn receiver_is_finite_over_the_snr_range() {
    // -10 to 40 dB sweep: every exchanged message stays finite and clipped.
    let mut cfg = presets_matching("E4-s2").pop().unwrap();
    cfg.n = 240;
    cfg.relay_mode = RelayMode::Ideal;
    cfg.stop = StopRule { min_word_errors: u64::MAX, max_frames: 4 };
    cfg.snr_grid_db = vec![-10.0, 0.0, 20.0, 40.0];
    cfg.seed = 3;
    let rows = run_wer(&cfg, None).unwrap();
    for r in &rows {
        assert!(r.ber.is_finite() && r.wer.is_finite());
    }
    // and at the extremes the detector/decoder outputs themselves
    for snr_db in [-10.0, 40.0] {
        let protocol = ProtocolConfig::new(2, 0, default_energies(3), 0.0).unwrap();
        let n0 = ssafsim::channel::n0_for_ebn0_db(&protocol, 2.0 / 3.0, snr_db);
        let mut rng = ChaCha12Rng::seed_from_u64(snr_db as i64 as u64 ^ 0xabc);
        let mut c = protocol.with_n0(n0);
        c.relay_mode = RelayMode::Ideal;
        let real = ChannelRealization::draw(c, &mut rng).unwrap();
        let plan = SlotPlan::uniform(1, 3);
        let prec = Precoder::identity(3);
        let det = AppDetector::new(&real.effective_matrix(&prec), &plan, n0).unwrap();
        let bits: Vec<u8> = (0..3).map(|_| rng.random_range(0..2)).collect();
        let z = map_symbols(&bits, &plan).unwrap().remove(0);
        let y = real.simulate_frame(&z, &prec, &mut rng).unwrap();
        let yw = real.psi_inv.left_mul_vec(&y);
        let ext = det.detect(&yw, &LlrVector::zeros(LlrKind::Prior, 3)).unwrap();
        for &l in ext.values() {
            assert!(l.is_finite() && l.abs() <= 50.0, "llr {l} at {snr_db} dB");
        }
    }
}

#[test]
fn zero_symbol_frames_pass_only_noise() {
    let cfg = ProtocolConfig::new(2, 0, default_energies(3), 0.5).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(5);
    let real = ChannelRealization::draw(cfg, &mut rng).unwrap();
    let prec = Precoder::identity(3);
    let z = vec![Complex64::new(0.0, 0.0); 3];
    let y = real.simulate_frame(&z, &prec, &mut rng).unwrap();
    assert!(y.iter().all(|v| v.norm() > 0.0), "pure noise is still nonzero");
}
