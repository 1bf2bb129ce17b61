//! Iterative joint detection and decoding.
//!
//! The APP detector marginalizes exact posterior bit probabilities over all
//! candidate symbol vectors of one cooperation frame (exhaustive, capped at
//! 20 bits per frame) against the whitened model `y' = z G + w`. The
//! channel decoder is an exact log-MAP forward-backward pass over the
//! terminated convolutional trellis. Extrinsic information loops between
//! the two a fixed number of times.

use num_complex::Complex64;
use thiserror::Error;

use crate::bicm::{BicmChain, ConvCode, QamMapper, SlotPlan, Trellis};
use crate::linalg::CMat;

/// LLR magnitude cap applied to every exchanged message.
pub const LLR_CLIP: f64 = 50.0;

/// Hard cap on the per-frame bit count of the exhaustive detector.
pub const DETECTOR_MAX_BITS: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum ReceiverError {
    #[error("frame carries {bits} bits, exhaustive detection capped at {cap}")]
    DetectorCap { bits: usize, cap: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Role of an LLR vector in the iterative exchange. Values are
/// `ln(p(bit=0)/p(bit=1))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LlrKind {
    Prior,
    Extrinsic,
    Aposteriori,
}

/// Clipped per-bit log-likelihood ratios.
#[derive(Clone, Debug)]
pub struct LlrVector {
    kind: LlrKind,
    values: Vec<f64>,
}

impl LlrVector {
    pub fn new(kind: LlrKind, mut values: Vec<f64>) -> Self {
        for v in &mut values {
            *v = v.clamp(-LLR_CLIP, LLR_CLIP);
        }
        LlrVector { kind, values }
    }

    pub fn zeros(kind: LlrKind, n: usize) -> Self {
        LlrVector { kind, values: vec![0.0; n] }
    }

    pub fn kind(&self) -> LlrKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn hard_decisions(&self) -> Vec<u8> {
        self.values.iter().map(|&v| u8::from(v < 0.0)).collect()
    }
}

/// Exhaustive APP detector for one effective matrix `G = S H Psi^-1`.
pub struct AppDetector {
    m: usize,
    bit_count: usize,
    slot_of_bit: Vec<usize>,
    flip_masks: Vec<usize>,
    tables: Vec<Option<Vec<Complex64>>>,
    g_rows: Vec<Vec<Complex64>>,
    two_n0: f64,
}

impl AppDetector {
    pub fn new(g: &CMat, plan: &SlotPlan, n0: f64) -> Result<Self, ReceiverError> {
        let m = plan.num_slots();
        if g.nrows() != m || g.ncols() != m {
            return Err(ReceiverError::Dimension(format!(
                "G is {}x{}, expected {m}x{m}",
                g.nrows(),
                g.ncols()
            )));
        }
        let bit_count = plan.bits_per_frame();
        if bit_count > DETECTOR_MAX_BITS {
            return Err(ReceiverError::DetectorCap { bits: bit_count, cap: DETECTOR_MAX_BITS });
        }
        let mut slot_of_bit = Vec::with_capacity(bit_count);
        let mut flip_masks = Vec::with_capacity(bit_count);
        let mut tables = Vec::with_capacity(m);
        for (k, &mk) in plan.slots().iter().enumerate() {
            if mk == 0 {
                tables.push(None);
                continue;
            }
            let mapper = QamMapper::new(mk).expect("plan validated upstream");
            tables.push(Some(mapper.constellation().to_vec()));
            for j in 0..mk {
                slot_of_bit.push(k);
                flip_masks.push(1usize << (mk - 1 - j));
            }
        }
        let g_rows = (0..m).map(|k| g.row(k).to_vec()).collect();
        Ok(AppDetector { m, bit_count, slot_of_bit, flip_masks, tables, g_rows, two_n0: 2.0 * n0 })
    }

    pub fn bits_per_frame(&self) -> usize {
        self.bit_count
    }

    fn initial_point(&self) -> Vec<Complex64> {
        let mut point = vec![Complex64::new(0.0, 0.0); self.m];
        for (k, table) in self.tables.iter().enumerate() {
            if let Some(t) = table {
                let z = t[0];
                for (p, &gk) in point.iter_mut().zip(&self.g_rows[k]) {
                    *p += z * gk;
                }
            }
        }
        point
    }

    /// Sweep all candidates in Gray order, invoking `f(bits, metric)` where
    /// `bits` has bit j set iff detector bit j is 1.
    fn sweep(&self, y: &[Complex64], priors: &[f64], mut f: impl FnMut(usize, f64)) {
        let mut labels = vec![0usize; self.m];
        let mut point = self.initial_point();
        let mut prior_part = 0.0f64;
        let mut bits = 0usize;

        let metric = |point: &[Complex64], prior_part: f64| -> f64 {
            let d: f64 = y.iter().zip(point).map(|(a, b)| (a - b).norm_sqr()).sum();
            -d / self.two_n0 + prior_part
        };
        f(bits, metric(&point, prior_part));
        let n_cand = 1usize << self.bit_count;
        for t in 1..n_cand {
            let j = t.trailing_zeros() as usize;
            let k = self.slot_of_bit[j];
            let table = self.tables[k].as_ref().unwrap();
            let old = table[labels[k]];
            labels[k] ^= self.flip_masks[j];
            let dz = table[labels[k]] - old;
            for (p, &gk) in point.iter_mut().zip(&self.g_rows[k]) {
                *p += dz * gk;
            }
            bits ^= 1 << j;
            if bits & (1 << j) != 0 {
                prior_part -= priors[j];
            } else {
                prior_part += priors[j];
            }
            f(bits, metric(&point, prior_part));
        }
    }

    /// Extrinsic LLRs of every frame bit: exact marginalization minus the
    /// bit's own prior.
    pub fn detect(&self, y: &[Complex64], priors: &LlrVector) -> Result<LlrVector, ReceiverError> {
        if y.len() != self.m {
            return Err(ReceiverError::Dimension(format!(
                "received frame has {} samples, expected {}",
                y.len(),
                self.m
            )));
        }
        if priors.len() != self.bit_count {
            return Err(ReceiverError::Dimension(format!(
                "{} priors for {} frame bits",
                priors.len(),
                self.bit_count
            )));
        }
        let pr = priors.values();
        let mut max_metric = f64::NEG_INFINITY;
        self.sweep(y, pr, |_, m| {
            if m > max_metric {
                max_metric = m;
            }
        });
        let mut acc0 = vec![0.0f64; self.bit_count];
        let mut acc1 = vec![0.0f64; self.bit_count];
        self.sweep(y, pr, |bits, m| {
            let e = (m - max_metric).exp();
            for j in 0..self.bit_count {
                if bits & (1 << j) != 0 {
                    acc1[j] += e;
                } else {
                    acc0[j] += e;
                }
            }
        });
        let ext: Vec<f64> = (0..self.bit_count)
            .map(|j| acc0[j].ln() - acc1[j].ln() - pr[j])
            .collect();
        Ok(LlrVector::new(LlrKind::Extrinsic, ext))
    }
}

/// Output of one forward-backward pass.
#[derive(Clone, Debug)]
pub struct BcjrOutput {
    /// Extrinsic LLRs of the transmitted coded bits (stream order).
    pub coded_extrinsic: LlrVector,
    /// A-posteriori LLRs of the information bits.
    pub info_app: LlrVector,
}

/// Exact log-MAP decoder over the terminated trellis of a convolutional
/// code, consuming LLRs of the transmitted (post-puncturing) coded stream.
pub struct BcjrDecoder {
    trellis: Trellis,
    k_info: usize,
    info_steps: usize,
    steps: usize,
    n: usize,
    /// stream index of each (step, output), `usize::MAX` when punctured
    stream_index: Vec<usize>,
}

impl BcjrDecoder {
    pub fn new(code: &ConvCode, k_info: usize) -> Self {
        let trellis = code.trellis();
        assert_eq!(k_info % trellis.n_inputs, 0);
        let info_steps = k_info / trellis.n_inputs;
        let steps = info_steps + trellis.tail_steps;
        let mut stream_index = vec![usize::MAX; steps * trellis.n_out];
        let mut idx = 0usize;
        for t in 0..steps {
            for o in 0..trellis.n_out {
                if code.is_kept(t, o) {
                    stream_index[t * trellis.n_out + o] = idx;
                    idx += 1;
                }
            }
        }
        BcjrDecoder { trellis, k_info, info_steps, steps, n: idx, stream_index }
    }

    pub fn coded_len(&self) -> usize {
        self.n
    }

    pub fn k_info(&self) -> usize {
        self.k_info
    }

    /// Input combos available at step `t`: all of them over the
    /// information steps, only the zero-driving combo during the tail.
    fn combos_at(&self, t: usize, state: usize) -> std::ops::RangeInclusive<usize> {
        if t < self.info_steps {
            0..=self.trellis.n_combos() - 1
        } else {
            let u = self.trellis.tail_input
                [(t - self.info_steps) * self.trellis.n_states + state] as usize;
            u..=u
        }
    }

    /// Branch likelihoods `exp(gamma)` of every output pattern at step `t`,
    /// written into `egs[0..2^n_out]`.
    fn pattern_likelihoods(&self, llr: &[f64], t: usize, egs: &mut [f64]) {
        let n_out = self.trellis.n_out;
        // gamma(pattern) = sum over kept outputs of +-L/2
        let mut base = 0.0;
        let mut contrib = [0.0f64; 8];
        for o in 0..n_out {
            let si = self.stream_index[t * n_out + o];
            if si != usize::MAX {
                base += 0.5 * llr[si];
                contrib[o] = -llr[si];
            }
        }
        for (pattern, e) in egs.iter_mut().enumerate().take(1 << n_out) {
            let mut g = base;
            for (o, &c) in contrib.iter().enumerate().take(n_out) {
                if (pattern >> o) & 1 == 1 {
                    g += c;
                }
            }
            *e = g.exp();
        }
    }

    pub fn decode(&self, channel_llrs: &LlrVector) -> Result<BcjrOutput, ReceiverError> {
        if channel_llrs.len() != self.n {
            return Err(ReceiverError::Dimension(format!(
                "{} channel LLRs for a {}-bit coded stream",
                channel_llrs.len(),
                self.n
            )));
        }
        let llr = channel_llrs.values();
        let ns = self.trellis.n_states;
        let n_out = self.trellis.n_out;
        let nc = self.trellis.n_combos();

        // Scaled linear-domain forward-backward: per-step normalization
        // keeps the state metrics in range, branch likelihoods are bounded
        // by the LLR clip, and the scale factors cancel in every ratio.
        let mut alpha = vec![0.0f64; (self.steps + 1) * ns];
        let mut beta = vec![0.0f64; (self.steps + 1) * ns];
        alpha[0] = 1.0;
        beta[self.steps * ns] = 1.0;
        let mut egs = vec![0.0f64; 1 << n_out];

        for t in 0..self.steps {
            self.pattern_likelihoods(llr, t, &mut egs);
            let (cur, nxt) = alpha.split_at_mut((t + 1) * ns);
            let cur = &cur[t * ns..];
            let nxt = &mut nxt[..ns];
            for s in 0..ns {
                let a = cur[s];
                if a == 0.0 {
                    continue;
                }
                for u in self.combos_at(t, s) {
                    let d = self.trellis.next[s * nc + u] as usize;
                    nxt[d] += a * egs[self.trellis.out[s * nc + u] as usize];
                }
            }
            let best = nxt.iter().cloned().fold(0.0f64, f64::max);
            if best > 0.0 {
                let inv = 1.0 / best;
                for v in nxt.iter_mut() {
                    *v *= inv;
                }
            }
        }
        for t in (0..self.steps).rev() {
            self.pattern_likelihoods(llr, t, &mut egs);
            let (head, tail) = beta.split_at_mut((t + 1) * ns);
            let cur = &mut head[t * ns..];
            let nxt = &tail[..ns];
            for s in 0..ns {
                let mut acc = 0.0;
                for u in self.combos_at(t, s) {
                    let d = self.trellis.next[s * nc + u] as usize;
                    acc += egs[self.trellis.out[s * nc + u] as usize] * nxt[d];
                }
                cur[s] = acc;
            }
            let best = cur.iter().cloned().fold(0.0f64, f64::max);
            if best > 0.0 {
                let inv = 1.0 / best;
                for v in cur.iter_mut() {
                    *v *= inv;
                }
            }
        }

        let mut coded_app = vec![(0.0f64, 0.0f64); self.n];
        let mut info = vec![(0.0f64, 0.0f64); self.k_info];
        let k_in = self.trellis.n_inputs;
        for t in 0..self.steps {
            self.pattern_likelihoods(llr, t, &mut egs);
            let a = &alpha[t * ns..(t + 1) * ns];
            let b = &beta[(t + 1) * ns..(t + 2) * ns];
            for s in 0..ns {
                if a[s] == 0.0 {
                    continue;
                }
                for u in self.combos_at(t, s) {
                    let d = self.trellis.next[s * nc + u] as usize;
                    let out_bits = self.trellis.out[s * nc + u];
                    let w = a[s] * egs[out_bits as usize] * b[d];
                    if w == 0.0 {
                        continue;
                    }
                    if t < self.info_steps {
                        for j in 0..k_in {
                            let e = &mut info[t * k_in + j];
                            if (u >> j) & 1 == 0 {
                                e.0 += w;
                            } else {
                                e.1 += w;
                            }
                        }
                    }
                    for o in 0..n_out {
                        let si = self.stream_index[t * n_out + o];
                        if si == usize::MAX {
                            continue;
                        }
                        let e = &mut coded_app[si];
                        if (out_bits >> o) & 1 == 0 {
                            e.0 += w;
                        } else {
                            e.1 += w;
                        }
                    }
                }
            }
        }
        let ratio = |p0: f64, p1: f64| -> f64 {
            if p0 == 0.0 && p1 == 0.0 {
                0.0
            } else {
                p0.ln() - p1.ln()
            }
        };
        let coded_extrinsic: Vec<f64> = coded_app
            .iter()
            .zip(llr)
            .map(|(&(p0, p1), &l)| ratio(p0, p1) - l)
            .collect();
        let info_app: Vec<f64> = info.iter().map(|&(p0, p1)| ratio(p0, p1)).collect();
        Ok(BcjrOutput {
            coded_extrinsic: LlrVector::new(LlrKind::Extrinsic, coded_extrinsic),
            info_app: LlrVector::new(LlrKind::Aposteriori, info_app),
        })
    }
}

/// Result of the iterative receiver.
#[derive(Clone, Debug)]
pub struct TurboResult {
    pub decoded_info: Vec<u8>,
    /// Blind per-iteration estimate of the detector extrinsic mutual
    /// information, `mean(1 - log2(1 + exp(-|L|)))`.
    pub detector_mi_trace: Vec<f64>,
}

/// Run `n_iter` detector/decoder exchanges over the frames of one codeword
/// and return hard information decisions.
pub fn turbo_loop(
    frames_y: &[Vec<Complex64>],
    detector: &AppDetector,
    decoder: &BcjrDecoder,
    chain: &BicmChain,
    n_iter: usize,
) -> Result<TurboResult, ReceiverError> {
    assert!(n_iter >= 1);
    let b = detector.bits_per_frame();
    let n = decoder.coded_len();
    if frames_y.len() * b != n {
        return Err(ReceiverError::Dimension(format!(
            "{} frames of {b} bits for a {n}-bit codeword",
            frames_y.len()
        )));
    }
    let mut priors_pos = vec![0.0f64; n];
    let mut mi_trace = Vec::with_capacity(n_iter);
    let mut last = None;
    for _ in 0..n_iter {
        let mut det_pos = vec![0.0f64; n];
        for (f, y) in frames_y.iter().enumerate() {
            let priors = LlrVector::new(LlrKind::Prior, priors_pos[f * b..(f + 1) * b].to_vec());
            let ext = detector.detect(y, &priors)?;
            det_pos[f * b..(f + 1) * b].copy_from_slice(ext.values());
        }
        mi_trace.push(blind_mi(&det_pos));
        let dec_in = LlrVector::new(LlrKind::Prior, chain.interleaver.deinterleave(&det_pos));
        let out = decoder.decode(&dec_in)?;
        priors_pos = chain.interleaver.interleave(out.coded_extrinsic.values());
        last = Some(out);
    }
    let out = last.expect("n_iter >= 1");
    Ok(TurboResult {
        decoded_info: out.info_app.hard_decisions(),
        detector_mi_trace: mi_trace,
    })
}

fn blind_mi(llrs: &[f64]) -> f64 {
    if llrs.is_empty() {
        return 0.0;
    }
    let s: f64 = llrs
        .iter()
        .map(|&l| 1.0 - ((-l.abs()).exp().ln_1p() / std::f64::consts::LN_2))
        .sum();
    s / llrs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bicm::{demap_llr_reference, log_sum_exp};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn diag_g(h: &[Complex64]) -> CMat {
        let m = h.len();
        let mut g = CMat::zeros(m, m);
        for i in 0..m {
            g[(i, i)] = h[i];
        }
        g
    }

    #[test]
    fn detector_matches_reference_on_diagonal_channels() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for plan in [
            SlotPlan::uniform(2, 3),
            SlotPlan::new(vec![4, 2, 1]).unwrap(),
            SlotPlan::uniform(4, 2),
        ] {
            let m = plan.num_slots();
            let h: Vec<Complex64> = (0..m)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let n0 = 0.35;
            let det = AppDetector::new(&diag_g(&h), &plan, n0).unwrap();
            let y: Vec<Complex64> = (0..m)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let flat = LlrVector::zeros(LlrKind::Prior, plan.bits_per_frame());
            let got = det.detect(&y, &flat).unwrap();
            let want = demap_llr_reference(&y, &h, &plan, n0).unwrap();
            for (g, w) in got.values().iter().zip(&want) {
                assert!((g - w).abs() < 1e-9, "detector {g} vs reference {w}");
            }
        }
    }

    #[test]
    fn detector_extrinsic_ignores_own_prior() {
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let plan = SlotPlan::uniform(2, 2);
        // coupled matrix so that cross-bit priors genuinely matter
        let g = CMat::from_rows(&[
            vec![Complex64::new(1.1, 0.2), Complex64::new(0.5, -0.4)],
            vec![Complex64::new(-0.3, 0.8), Complex64::new(0.9, 0.3)],
        ]);
        let det = AppDetector::new(&g, &plan, 0.5).unwrap();
        let y: Vec<Complex64> = (0..2)
            .map(|_| Complex64::new(rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        let mut base = vec![0.7, -1.3, 0.4, 2.0];
        let e1 = det.detect(&y, &LlrVector::new(LlrKind::Prior, base.clone())).unwrap();
        base[2] = -5.0; // change only bit 2's own prior
        let e2 = det.detect(&y, &LlrVector::new(LlrKind::Prior, base)).unwrap();
        assert!((e1.values()[2] - e2.values()[2]).abs() < 1e-12);
        assert!((e1.values()[0] - e2.values()[0]).abs() > 1e-9, "other bits do react");
    }

    #[test]
    fn perfect_priors_collapse_to_genie_llr() {
        // Coupled 2x2 matrix, BPSK in both slots; pinning bit 1 must reduce
        // bit 0's extrinsic to interference-cancelled matched filtering.
        let plan = SlotPlan::uniform(1, 2);
        let g = CMat::from_rows(&[
            vec![Complex64::new(0.9, 0.2), Complex64::new(0.3, -0.6)],
            vec![Complex64::new(-0.4, 1.1), Complex64::new(0.7, 0.1)],
        ]);
        let n0 = 0.4;
        let det = AppDetector::new(&g, &plan, n0).unwrap();
        let z = vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        let y = g.left_mul_vec(&z);
        // certain prior on bit 1 (true value 1 -> symbol -1); bit 0 free
        let priors = LlrVector::new(LlrKind::Prior, vec![0.0, -LLR_CLIP]);
        let ext = det.detect(&y, &priors).unwrap();
        let dist = |z0: f64| -> f64 {
            let zc = vec![Complex64::new(z0, 0.0), Complex64::new(-1.0, 0.0)];
            let p = g.left_mul_vec(&zc);
            y.iter().zip(&p).map(|(a, b)| (a - b).norm_sqr()).sum()
        };
        let genie = (-dist(1.0) + dist(-1.0)) / (2.0 * n0);
        assert!(
            (ext.values()[0] - genie).abs() < 1e-9,
            "extrinsic {} vs genie {genie}",
            ext.values()[0]
        );
    }

    #[test]
    fn noiseless_detection_recovers_bits() {
        let plan = SlotPlan::new(vec![2, 2, 2]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let h: Vec<Complex64> = (0..3)
            .map(|_| Complex64::new(1.0 + rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        let det = AppDetector::new(&diag_g(&h), &plan, 1e-3).unwrap();
        let bits = [0u8, 1, 1, 0, 1, 0];
        let frames = crate::bicm::map_symbols(&bits, &plan).unwrap();
        let y: Vec<Complex64> = h.iter().zip(&frames[0]).map(|(hh, zz)| hh * zz).collect();
        let ext = det
            .detect(&y, &LlrVector::zeros(LlrKind::Prior, 6))
            .unwrap();
        for (j, &b) in bits.iter().enumerate() {
            let l = ext.values()[j];
            assert!(if b == 0 { l > 0.0 } else { l < 0.0 }, "bit {j}: llr {l} vs bit {b}");
        }
    }

    #[test]
    fn detector_cap_enforced() {
        let plan = SlotPlan::uniform(6, 4); // 24 bits
        let g = CMat::identity(4);
        assert!(matches!(
            AppDetector::new(&g, &plan, 0.1),
            Err(ReceiverError::DetectorCap { bits: 24, cap: 20 })
        ));
    }

    /// Brute-force MAP over all codewords of a small code.
    fn map_oracle(code: &ConvCode, k_info: usize, llr: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = llr.len();
        let mut info_acc = vec![(f64::NEG_INFINITY, f64::NEG_INFINITY); k_info];
        let mut coded_acc = vec![(f64::NEG_INFINITY, f64::NEG_INFINITY); n];
        for msg in 0u32..1 << k_info {
            let bits: Vec<u8> = (0..k_info).map(|i| ((msg >> i) & 1) as u8).collect();
            let cw = code.encode(&bits).unwrap();
            let metric: f64 = cw
                .iter()
                .zip(llr)
                .map(|(&c, &l)| if c == 0 { 0.5 * l } else { -0.5 * l })
                .sum();
            for (i, &b) in bits.iter().enumerate() {
                let e = &mut info_acc[i];
                if b == 0 {
                    e.0 = log_sum_exp(e.0, metric);
                } else {
                    e.1 = log_sum_exp(e.1, metric);
                }
            }
            for (i, &c) in cw.iter().enumerate() {
                let e = &mut coded_acc[i];
                if c == 0 {
                    e.0 = log_sum_exp(e.0, metric);
                } else {
                    e.1 = log_sum_exp(e.1, metric);
                }
            }
        }
        (
            info_acc.iter().map(|&(a, b)| a - b).collect(),
            coded_acc.iter().map(|&(a, b)| a - b).collect(),
        )
    }

    #[test]
    fn bcjr_equals_brute_force_map() {
        let mut rng = ChaCha12Rng::seed_from_u64(14);
        for code in [ConvCode::rsc_23_35(), ConvCode::rsc_2of3()] {
            let k_info = 10;
            let dec = BcjrDecoder::new(&code, k_info);
            let llr: Vec<f64> = (0..dec.coded_len())
                .map(|_| 4.0 * (rng.random::<f64>() - 0.5))
                .collect();
            let out = dec
                .decode(&LlrVector::new(LlrKind::Prior, llr.clone()))
                .unwrap();
            let (info_want, coded_want) = map_oracle(&code, k_info, &llr);
            for (g, w) in out.info_app.values().iter().zip(&info_want) {
                assert!((g - w).abs() < 1e-9, "{}: info {g} vs {w}", code.name());
            }
            for ((g, w), &l) in out
                .coded_extrinsic
                .values()
                .iter()
                .zip(&coded_want)
                .zip(&llr)
            {
                let w_ext = (w - l).clamp(-LLR_CLIP, LLR_CLIP);
                assert!((g - w_ext).abs() < 1e-9, "{}: coded {g} vs {w_ext}", code.name());
            }
        }
    }

    #[test]
    fn bcjr_decides_clean_input_correctly() {
        let code = ConvCode::rsc_133_171();
        let k_info = 40;
        let dec = BcjrDecoder::new(&code, k_info);
        let mut rng = ChaCha12Rng::seed_from_u64(15);
        let info: Vec<u8> = (0..k_info).map(|_| rng.random_range(0..2u8)).collect();
        let cw = code.encode(&info).unwrap();
        let llr: Vec<f64> = cw.iter().map(|&c| if c == 0 { 8.0 } else { -8.0 }).collect();
        let out = dec.decode(&LlrVector::new(LlrKind::Prior, llr)).unwrap();
        assert_eq!(out.info_app.hard_decisions(), info);
    }

    #[test]
    fn bcjr_codeword_translation_symmetry() {
        // Linearity: flipping the LLR signs along any codeword c translates
        // the posterior by c, so every info APP flips sign exactly where
        // c's information bits are set.
        let code = ConvCode::rsc_23_35();
        let k_info = 12;
        let dec = BcjrDecoder::new(&code, k_info);
        let mut rng = ChaCha12Rng::seed_from_u64(16);
        let info: Vec<u8> = (0..k_info).map(|_| rng.random_range(0..2u8)).collect();
        let cw = code.encode(&info).unwrap();
        let llr: Vec<f64> = (0..dec.coded_len()).map(|_| 6.0 * (rng.random::<f64>() - 0.5)).collect();
        let flipped: Vec<f64> = llr
            .iter()
            .zip(&cw)
            .map(|(&l, &c)| if c == 0 { l } else { -l })
            .collect();
        let out = dec.decode(&LlrVector::new(LlrKind::Prior, llr)).unwrap();
        let out_f = dec.decode(&LlrVector::new(LlrKind::Prior, flipped)).unwrap();
        for (t, (&a, &b)) in out
            .info_app
            .values()
            .iter()
            .zip(out_f.info_app.values())
            .enumerate()
        {
            let want = if info[t] == 0 { a } else { -a };
            assert!((b - want).abs() < 1e-9, "bit {t}: {b} vs {want}");
        }
    }
}
