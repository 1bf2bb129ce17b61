//! Gray-labeled QAM mapping with per-slot spectral efficiencies, and the
//! scalar reference demapper used to validate the joint detector.

use num_complex::Complex64;
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, PartialEq)]
pub enum MappingError {
    #[error("unsupported modulation: m = {0} (BPSK or square QAM only)")]
    UnsupportedModulation(u32),
    #[error("bit count {bits} is not a multiple of the frame payload {per_frame}")]
    BitCount { bits: usize, per_frame: usize },
    #[error("slot plan must carry at least one bit per frame")]
    EmptyPlan,
}

/// Bits per symbol for each slot of the cooperation frame; a zero entry
/// means the source sends no fresh symbol in that slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotPlan {
    m: Vec<u32>,
}

impl SlotPlan {
    pub fn new(m: Vec<u32>) -> Result<Self, MappingError> {
        if m.iter().all(|&b| b == 0) {
            return Err(MappingError::EmptyPlan);
        }
        Ok(SlotPlan { m })
    }

    pub fn uniform(m: u32, slots: usize) -> Self {
        SlotPlan { m: vec![m; slots] }
    }

    pub fn slots(&self) -> &[u32] {
        &self.m
    }

    pub fn num_slots(&self) -> usize {
        self.m.len()
    }

    pub fn bits_per_frame(&self) -> usize {
        self.m.iter().map(|&b| b as usize).sum()
    }

    /// Information rate `Rc * sum(m) / M` in bits per channel use.
    pub fn rate(&self, rc: Rational) -> Rational {
        Rational::new(
            rc.num() * self.bits_per_frame() as i64,
            rc.den() * self.num_slots() as i64,
        )
        .expect("non-empty plan")
    }

    /// Global in-frame bit index of (slot, bit-in-slot).
    pub fn bit_offset(&self, slot: usize) -> usize {
        self.m[..slot].iter().map(|&b| b as usize).sum()
    }
}

pub fn gray_code(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Unit-energy Gray-labeled constellation for one slot: BPSK for m = 1,
/// square QAM for even m.
#[derive(Clone, Debug)]
pub struct QamMapper {
    m: u32,
    symbols: Vec<Complex64>,
}

impl QamMapper {
    pub fn new(m: u32) -> Result<Self, MappingError> {
        if m == 0 || (m > 1 && m % 2 != 0) {
            return Err(MappingError::UnsupportedModulation(m));
        }
        if m == 1 {
            return Ok(QamMapper {
                m,
                symbols: vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            });
        }
        let half = m / 2;
        let levels_n = 1usize << half;
        // unit average energy: per-axis levels +-a, +-3a, ...
        let a = (3.0 / (2.0 * ((levels_n * levels_n) as f64 - 1.0))).sqrt();
        let mut level_of_label = vec![0.0f64; levels_n];
        for i in 0..levels_n {
            level_of_label[gray_code(i)] = (levels_n as f64 - 1.0 - 2.0 * i as f64) * a;
        }
        let symbols = (0..1usize << m)
            .map(|v| {
                let i_label = v >> half;
                let q_label = v & (levels_n - 1);
                Complex64::new(level_of_label[i_label], level_of_label[q_label])
            })
            .collect();
        Ok(QamMapper { m, symbols })
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.m
    }

    /// Symbol for a label value (bits MSB-first packed into an integer).
    pub fn map_value(&self, v: usize) -> Complex64 {
        self.symbols[v]
    }

    pub fn map_bits(&self, bits: &[u8]) -> Complex64 {
        debug_assert_eq!(bits.len(), self.m as usize);
        let v = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        self.symbols[v]
    }

    pub fn constellation(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn average_energy(&self) -> f64 {
        self.symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.symbols.len() as f64
    }
}

/// Map a positions-ordered bit stream onto cooperation frames (frame-major,
/// slots with m = 0 carry the zero symbol).
pub fn map_symbols(bits: &[u8], plan: &SlotPlan) -> Result<Vec<Vec<Complex64>>, MappingError> {
    let per_frame = plan.bits_per_frame();
    if per_frame == 0 {
        return Err(MappingError::EmptyPlan);
    }
    if bits.len() % per_frame != 0 {
        return Err(MappingError::BitCount { bits: bits.len(), per_frame });
    }
    let mappers: Vec<Option<QamMapper>> = plan
        .slots()
        .iter()
        .map(|&m| if m == 0 { Ok(None) } else { QamMapper::new(m).map(Some) })
        .collect::<Result<_, _>>()?;
    let mut frames = Vec::with_capacity(bits.len() / per_frame);
    for chunk in bits.chunks(per_frame) {
        let mut frame = Vec::with_capacity(plan.num_slots());
        let mut cursor = 0usize;
        for (k, &m) in plan.slots().iter().enumerate() {
            if m == 0 {
                frame.push(Complex64::new(0.0, 0.0));
            } else {
                let mapper = mappers[k].as_ref().unwrap();
                frame.push(mapper.map_bits(&chunk[cursor..cursor + m as usize]));
                cursor += m as usize;
            }
        }
        frames.push(frame);
    }
    Ok(frames)
}

/// Exact per-bit LLRs (ln p0/p1) of one frame over a diagonal channel
/// `y_k = h_k z_k + w_k` with white noise of variance `2 n0` per slot;
/// the reference the joint detector must reproduce on diagonal matrices.
pub fn demap_llr_reference(
    y: &[Complex64],
    channel_diag: &[Complex64],
    plan: &SlotPlan,
    n0: f64,
) -> Result<Vec<f64>, MappingError> {
    let mut llrs = Vec::with_capacity(plan.bits_per_frame());
    for (k, &m) in plan.slots().iter().enumerate() {
        if m == 0 {
            continue;
        }
        let mapper = QamMapper::new(m)?;
        let h = channel_diag[k];
        let metrics: Vec<f64> = mapper
            .constellation()
            .iter()
            .map(|&s| -(y[k] - h * s).norm_sqr() / (2.0 * n0))
            .collect();
        for bit in 0..m as usize {
            let mask = 1usize << (m as usize - 1 - bit);
            let mut num = f64::NEG_INFINITY;
            let mut den = f64::NEG_INFINITY;
            for (v, &t) in metrics.iter().enumerate() {
                if v & mask == 0 {
                    num = log_sum_exp(num, t);
                } else {
                    den = log_sum_exp(den, t);
                }
            }
            llrs.push(num - den);
        }
    }
    Ok(llrs)
}

/// Exact `ln(e^a + e^b)`.
pub fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qpsk_labels_and_energy() {
        let qpsk = QamMapper::new(2).unwrap();
        let a = 1.0 / 2.0f64.sqrt();
        let s = qpsk.map_bits(&[0, 0]);
        assert!((s - Complex64::new(a, a)).norm() < 1e-15, "00 -> (+a, +a)");
        assert!((qpsk.average_energy() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gray_adjacency_on_both_axes() {
        for m in [2u32, 4, 6] {
            let mapper = QamMapper::new(m).unwrap();
            let n = 1usize << m;
            let spacing = {
                let half = m / 2;
                let ln = (1usize << half) as f64;
                2.0 * (3.0 / (2.0 * (ln * ln - 1.0))).sqrt()
            };
            // every pair of points one grid step apart differs in 1 label bit
            for a in 0..n {
                for b in (a + 1)..n {
                    let d = mapper.map_value(a) - mapper.map_value(b);
                    let adjacent = (d.norm() - spacing).abs() < 1e-12
                        && (d.re.abs() < 1e-12 || d.im.abs() < 1e-12);
                    if adjacent {
                        assert_eq!((a ^ b).count_ones(), 1, "m={m}: labels {a:#x},{b:#x}");
                    }
                }
            }
        }
    }

    #[test]
    fn qam64_has_unit_energy() {
        let m = QamMapper::new(6).unwrap();
        assert_eq!(m.constellation().len(), 64);
        assert!((m.average_energy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn odd_m_rejected() {
        assert!(matches!(QamMapper::new(3), Err(MappingError::UnsupportedModulation(3))));
        assert!(matches!(QamMapper::new(0), Err(MappingError::UnsupportedModulation(0))));
        assert!(QamMapper::new(1).is_ok());
    }

    #[test]
    fn rate_identity() {
        let plan = SlotPlan::new(vec![6, 4, 2]).unwrap();
        let r = plan.rate(Rational::new(1, 3).unwrap());
        assert_eq!(r, Rational::new(4, 3).unwrap());
    }

    #[test]
    fn zero_slots_map_to_zero_symbols() {
        let plan = SlotPlan::new(vec![2, 0, 0]).unwrap();
        let frames = map_symbols(&[0, 1, 1, 0], &plan).unwrap();
        assert_eq!(frames.len(), 2);
        for f in &frames {
            assert_eq!(f[1], Complex64::new(0.0, 0.0));
            assert_eq!(f[2], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn bpsk_reference_llr_sign() {
        let plan = SlotPlan::new(vec![1]).unwrap();
        let h = [Complex64::new(0.8, -0.3)];
        // transmit bit 0 -> symbol +1
        let y = [h[0] * Complex64::new(1.0, 0.0)];
        let llrs = demap_llr_reference(&y, &h, &plan, 0.25).unwrap();
        assert!(llrs[0] > 0.0, "noiseless bit 0 must have positive LLR");
        let y1 = [h[0] * Complex64::new(-1.0, 0.0)];
        let llrs1 = demap_llr_reference(&y1, &h, &plan, 0.25).unwrap();
        assert!(llrs1[0] < 0.0);
        // matched-filter form: LLR = 2 Re(h* y) / n0
        let expect = 2.0 * (h[0].conj() * y[0]).re / 0.25;
        assert!((llrs[0] - expect).abs() < 1e-12);
    }

    #[test]
    fn qpsk_components_are_independent() {
        let plan = SlotPlan::new(vec![2]).unwrap();
        let h = [Complex64::new(1.0, 0.0)];
        let y = [Complex64::new(0.4, -1.2)];
        let llrs = demap_llr_reference(&y, &h, &plan, 0.5).unwrap();
        // first bit depends only on Re(y), second only on Im(y)
        let y2 = [Complex64::new(0.4, 3.0)];
        let llrs2 = demap_llr_reference(&y2, &h, &plan, 0.5).unwrap();
        assert!((llrs[0] - llrs2[0]).abs() < 1e-12);
        assert!((llrs[1] - llrs2[1]).abs() > 0.1);
    }
}
