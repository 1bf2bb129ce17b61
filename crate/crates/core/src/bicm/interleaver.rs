//! Diversity-constrained channel interleaver.
//!
//! Coded bits are assigned to transmit positions so that systematic bits
//! fill the equivalent-channel blocks in decreasing diversity order and
//! parity bits take the rest. Within a block the spreading is seeded
//! pseudo-random, visiting cooperation frames round-robin so consecutive
//! trellis bits land in distinct frames whenever the frame count permits.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use super::mapping::SlotPlan;
use crate::bounds::EquivalentChannel;

#[derive(Debug, Error, PartialEq)]
pub enum InterleaverError {
    #[error("codeword length {n} does not match channel length {channel}")]
    LengthMismatch { n: usize, channel: u64 },
    #[error("codeword length {n} is not a whole number of frames of {per_frame} bits")]
    FrameAlignment { n: usize, per_frame: usize },
    #[error("class list has {got} entries, expected {expected}")]
    ClassLength { got: usize, expected: usize },
}

/// Bijection between coded-bit indices and transmit positions, along with
/// each position's equivalent-channel block.
#[derive(Clone, Debug)]
pub struct InterleaverPlan {
    perm: Vec<usize>,
    block_of_position: Vec<usize>,
    seed: u64,
}

impl InterleaverPlan {
    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Transmit position of coded bit `i`.
    pub fn position_of(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn block_of_position(&self, p: usize) -> usize {
        self.block_of_position[p]
    }

    /// Scatter coded-order values into transmit order.
    pub fn interleave<T: Copy + Default>(&self, coded: &[T]) -> Vec<T> {
        assert_eq!(coded.len(), self.perm.len());
        let mut out = vec![T::default(); coded.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            out[p] = coded[i];
        }
        out
    }

    /// Gather transmit-order values back into coded order.
    pub fn deinterleave<T: Copy + Default>(&self, positions: &[T]) -> Vec<T> {
        assert_eq!(positions.len(), self.perm.len());
        self.perm.iter().map(|&p| positions[p]).collect()
    }

    /// The same bijection re-expressed against the block-contiguous bit
    /// layout of the equivalent channel (block 0 first), the convention the
    /// code-diversity oracle uses.
    pub fn block_layout_permutation(&self) -> Vec<usize> {
        let n = self.perm.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&p| (self.block_of_position[p], p));
        let mut rank = vec![0usize; n];
        for (r, &p) in order.iter().enumerate() {
            rank[p] = r;
        }
        self.perm.iter().map(|&p| rank[p]).collect()
    }
}

/// Build the constrained interleaver for an `n`-bit codeword.
///
/// `systematic[i]` flags coded bit `i` as systematic; `eq` supplies the
/// slot-to-block map of the equivalent channel whose total length must be
/// `n`.
pub fn build_interleaver(
    n: usize,
    plan: &SlotPlan,
    eq: &EquivalentChannel,
    systematic: &[bool],
    seed: u64,
) -> Result<InterleaverPlan, InterleaverError> {
    if eq.channel.total_length() != n as u64 {
        return Err(InterleaverError::LengthMismatch { n, channel: eq.channel.total_length() });
    }
    if systematic.len() != n {
        return Err(InterleaverError::ClassLength { got: systematic.len(), expected: n });
    }
    let per_frame = plan.bits_per_frame();
    if per_frame == 0 || n % per_frame != 0 {
        return Err(InterleaverError::FrameAlignment { n, per_frame });
    }
    let frames = n / per_frame;
    let nblocks = eq.channel.num_blocks();

    // Transmit position of (frame, slot, bit) and its block.
    let mut block_of_position = vec![usize::MAX; n];
    // positions[block][frame] -> stack of positions
    let mut positions: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); frames]; nblocks];
    for f in 0..frames {
        for (k, &mk) in plan.slots().iter().enumerate() {
            if mk == 0 {
                continue;
            }
            let block = eq.slot_to_block[k].expect("non-empty slot must belong to a block");
            let base = f * per_frame + plan.bit_offset(k);
            for j in 0..mk as usize {
                block_of_position[base + j] = block;
                positions[block][f].push(base + j);
            }
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut frame_orders: Vec<Vec<usize>> = Vec::with_capacity(nblocks);
    for block in positions.iter_mut() {
        for stack in block.iter_mut() {
            stack.shuffle(&mut rng);
        }
        let mut order: Vec<usize> = (0..frames).collect();
        order.shuffle(&mut rng);
        frame_orders.push(order);
    }

    let mut remaining: Vec<usize> = positions
        .iter()
        .map(|b| b.iter().map(Vec::len).sum())
        .collect();
    let mut counters = vec![0usize; nblocks];
    let mut perm = vec![usize::MAX; n];
    let mut block_cursor = 0usize;

    let mut assign = |idx: usize,
                      block_cursor: &mut usize,
                      counters: &mut Vec<usize>,
                      remaining: &mut Vec<usize>,
                      positions: &mut Vec<Vec<Vec<usize>>>| {
        while remaining[*block_cursor] == 0 {
            *block_cursor += 1;
        }
        let b = *block_cursor;
        // Round-robin over frames so consecutive bits spread across frames.
        let order = &frame_orders[b];
        let mut fi = counters[b] % frames;
        while positions[b][order[fi]].is_empty() {
            fi = (fi + 1) % frames;
        }
        let pos = positions[b][order[fi]].pop().unwrap();
        counters[b] += 1;
        remaining[b] -= 1;
        perm[idx] = pos;
    };

    for (i, &sys) in systematic.iter().enumerate() {
        if sys {
            assign(i, &mut block_cursor, &mut counters, &mut remaining, &mut positions);
        }
    }
    for (i, &sys) in systematic.iter().enumerate() {
        if !sys {
            assign(i, &mut block_cursor, &mut counters, &mut remaining, &mut positions);
        }
    }
    debug_assert!(perm.iter().all(|&p| p != usize::MAX));
    Ok(InterleaverPlan { perm, block_of_position, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{build_equivalent_channel, BoundConfig, PrecodingStrategy};
    use crate::rational::Rational;

    fn eq_channel(beta: u32, n: u64) -> EquivalentChannel {
        let cfg = BoundConfig {
            beta,
            alpha: 0,
            s: 1,
            rc: Rational::new(1, 2).unwrap(),
            slot_plan: None,
            strategy: PrecodingStrategy::None,
        };
        build_equivalent_channel(&cfg, n).unwrap()
    }

    #[test]
    fn permutation_is_a_bijection() {
        let n = 1296;
        let eq = eq_channel(2, n as u64);
        let plan = SlotPlan::uniform(4, 3);
        let systematic: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
        let il = build_interleaver(n, &plan, &eq, &systematic, 42).unwrap();
        let mut seen = vec![false; n];
        for i in 0..n {
            let p = il.position_of(i);
            assert!(!seen[p], "position {p} assigned twice");
            seen[p] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn systematic_bits_land_on_highest_diversity_blocks() {
        let n = 240;
        let eq = eq_channel(2, n as u64);
        let plan = SlotPlan::uniform(1, 3);
        // K = 120 systematic bits exactly fill blocks 0 and 1 (80 + 80 > 120)
        let systematic: Vec<bool> = (0..n).map(|i| i < 120).collect();
        let il = build_interleaver(n, &plan, &eq, &systematic, 7).unwrap();
        let max_sys_block = (0..120).map(|i| il.block_of_position(il.position_of(i))).max().unwrap();
        let min_par_block = (120..n).map(|i| il.block_of_position(il.position_of(i))).min().unwrap();
        assert!(max_sys_block <= 1);
        assert!(min_par_block >= 1);
        // block capacities: 80 sys in block 0, 40 sys + 40 parity in block 1
        let sys_in_0 = (0..120).filter(|&i| il.block_of_position(il.position_of(i)) == 0).count();
        assert_eq!(sys_in_0, 80);
    }

    #[test]
    fn all_systematic_fit_first_block_exactly() {
        let n = 60;
        let eq = eq_channel(2, n as u64);
        let plan = SlotPlan::uniform(2, 3);
        let systematic: Vec<bool> = (0..n).map(|i| i < 20).collect();
        let il = build_interleaver(n, &plan, &eq, &systematic, 3).unwrap();
        for i in 0..20 {
            assert_eq!(il.block_of_position(il.position_of(i)), 0);
        }
    }

    #[test]
    fn consecutive_bits_hit_distinct_frames() {
        let n = 240;
        let eq = eq_channel(2, n as u64);
        let plan = SlotPlan::uniform(1, 3);
        let systematic: Vec<bool> = (0..n).map(|i| i < 120).collect();
        let il = build_interleaver(n, &plan, &eq, &systematic, 11).unwrap();
        let frames = 80;
        let per_frame = 3;
        // consecutive systematic bits within one block never share a frame
        for i in 0..119usize {
            let (p0, p1) = (il.position_of(i), il.position_of(i + 1));
            if il.block_of_position(p0) == il.block_of_position(p1) {
                assert_ne!(p0 / per_frame, p1 / per_frame, "bits {i},{} share a frame", i + 1);
            }
        }
        let _ = frames;
    }

    #[test]
    fn interleave_round_trip() {
        let n = 24;
        let eq = eq_channel(2, n as u64);
        let plan = SlotPlan::uniform(2, 3);
        let systematic: Vec<bool> = (0..n).map(|i| i % 3 == 0).collect();
        let il = build_interleaver(n, &plan, &eq, &systematic, 5).unwrap();
        let data: Vec<u32> = (0..n as u32).collect();
        assert_eq!(il.deinterleave(&il.interleave(&data)), data);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let eq = eq_channel(2, 24);
        let plan = SlotPlan::uniform(2, 3);
        let systematic = vec![false; 30];
        assert!(matches!(
            build_interleaver(30, &plan, &eq, &systematic, 0),
            Err(InterleaverError::LengthMismatch { .. })
        ));
    }
}
