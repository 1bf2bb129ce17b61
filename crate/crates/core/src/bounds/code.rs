//! Binary linear codes and the brute-force code-diversity oracle.
//!
//! The oracle enumerates every nonzero codeword and reports the diversity
//! of the earliest block touched by its support, minimized over codewords.
//! It is the exact pairwise-error-probability diversity of a code on a
//! nested block-fading channel and serves as the independent check for the
//! closed-form bounds.

use rand::Rng;

use super::{BoundsError, MatryoshkaChannel};

const WORD_BITS: usize = 64;
/// Enumeration cap: at most 2^20 codewords.
pub const ORACLE_MAX_K: usize = 20;

/// Binary linear code given by a full-rank generator matrix, stored as
/// bit-packed rows.
#[derive(Clone, Debug)]
pub struct BinaryLinearCode {
    k: usize,
    n: usize,
    rows: Vec<Vec<u64>>,
    systematic_positions: Option<Vec<usize>>,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

fn get_bit(row: &[u64], j: usize) -> bool {
    row[j / WORD_BITS] >> (j % WORD_BITS) & 1 == 1
}

fn set_bit(row: &mut [u64], j: usize) {
    row[j / WORD_BITS] |= 1 << (j % WORD_BITS);
}

fn rank_of(rows: &[Vec<u64>]) -> usize {
    let mut work: Vec<Vec<u64>> = rows.to_vec();
    let mut rank = 0;
    let nbits = work.first().map_or(0, |r| r.len() * WORD_BITS);
    for col in 0..nbits {
        if let Some(p) = (rank..work.len()).find(|&r| get_bit(&work[r], col)) {
            work.swap(rank, p);
            let pivot = work[rank].clone();
            for (r, row) in work.iter_mut().enumerate() {
                if r != rank && get_bit(row, col) {
                    for (w, pw) in row.iter_mut().zip(&pivot) {
                        *w ^= pw;
                    }
                }
            }
            rank += 1;
            if rank == work.len() {
                break;
            }
        }
    }
    rank
}

impl BinaryLinearCode {
    /// Build from explicit generator rows (each a slice of 0/1 bits).
    pub fn from_bit_rows(rows: &[Vec<u8>]) -> Result<Self, BoundsError> {
        let k = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut packed = vec![vec![0u64; words_for(n)]; k];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "ragged generator matrix");
            for (j, &b) in row.iter().enumerate() {
                if b != 0 {
                    set_bit(&mut packed[i], j);
                }
            }
        }
        if rank_of(&packed) != k {
            return Err(BoundsError::RankDeficient);
        }
        Ok(BinaryLinearCode { k, n, rows: packed, systematic_positions: None })
    }

    /// Systematic code `[I | P]` from the parity part (`k x (n-k)` bits).
    pub fn systematic(parity: &[Vec<u8>]) -> Result<Self, BoundsError> {
        let k = parity.len();
        let p = parity.first().map_or(0, Vec::len);
        let n = k + p;
        let mut rows = vec![vec![0u8; n]; k];
        for i in 0..k {
            rows[i][i] = 1;
            for j in 0..p {
                rows[i][k + j] = parity[i][j];
            }
        }
        let mut code = Self::from_bit_rows(&rows)?;
        code.systematic_positions = Some((0..k).collect());
        Ok(code)
    }

    /// The length-n repetition code (k = 1).
    pub fn repetition(n: usize) -> Self {
        let mut code = Self::from_bit_rows(&[vec![1u8; n]]).expect("repetition row is nonzero");
        code.systematic_positions = Some(vec![0]);
        code
    }

    /// Random systematic code with uniform parity bits.
    pub fn random_systematic(k: usize, n: usize, rng: &mut impl Rng) -> Self {
        assert!(n > k);
        let parity: Vec<Vec<u8>> = (0..k)
            .map(|_| (0..n - k).map(|_| rng.random_range(0..2u8)).collect())
            .collect();
        Self::systematic(&parity).expect("identity part guarantees full rank")
    }

    /// Random linear code with a full-rank but otherwise unstructured
    /// generator.
    pub fn random_linear(k: usize, n: usize, rng: &mut impl Rng) -> Self {
        loop {
            let rows: Vec<Vec<u8>> = (0..k)
                .map(|_| (0..n).map(|_| rng.random_range(0..2u8)).collect())
                .collect();
            if let Ok(code) = Self::from_bit_rows(&rows) {
                return code;
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn is_systematic(&self) -> bool {
        self.systematic_positions.is_some()
    }

    pub fn systematic_positions(&self) -> Option<&[usize]> {
        self.systematic_positions.as_deref()
    }

    /// Code with columns rearranged: bit `j` of the original moves to
    /// position `perm[j]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let words = words_for(self.n);
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = vec![0u64; words];
                for (j, &pj) in perm.iter().enumerate() {
                    if get_bit(row, j) {
                        set_bit(&mut out, pj);
                    }
                }
                out
            })
            .collect();
        BinaryLinearCode {
            k: self.k,
            n: self.n,
            rows,
            systematic_positions: self
                .systematic_positions
                .as_ref()
                .map(|ps| ps.iter().map(|&p| perm[p]).collect()),
        }
    }

    /// Encode a k-bit message.
    pub fn encode(&self, message: &[u8]) -> Vec<u8> {
        assert_eq!(message.len(), self.k);
        let mut cw = vec![0u64; words_for(self.n)];
        for (i, &b) in message.iter().enumerate() {
            if b != 0 {
                for (w, rw) in cw.iter_mut().zip(&self.rows[i]) {
                    *w ^= rw;
                }
            }
        }
        (0..self.n).map(|j| get_bit(&cw, j) as u8).collect()
    }
}

/// Exact diversity order of a code over a nested channel: by linearity,
/// `min` over nonzero codewords `c` of the diversity of the first block
/// containing a nonzero bit of `c`. Enumerates all `2^K - 1` codewords in
/// Gray order (capped at `K <= 20`).
pub fn code_diversity_oracle(
    code: &BinaryLinearCode,
    ch: &MatryoshkaChannel,
) -> Result<u32, BoundsError> {
    if code.n as u64 != ch.total_length() {
        return Err(BoundsError::CodeChannelMismatch {
            code: code.n,
            channel: ch.total_length(),
        });
    }
    if code.k > ORACLE_MAX_K {
        return Err(BoundsError::EnumerationCap { k: code.k, cap: ORACLE_MAX_K });
    }

    // Per-block masks over the codeword bits.
    let words = words_for(code.n);
    let nblocks = ch.num_blocks();
    let mut block_masks = vec![vec![0u64; words]; nblocks];
    let mut pos = 0u64;
    for (b, &len) in ch.lengths().iter().enumerate() {
        for _ in 0..len {
            set_bit(&mut block_masks[b], pos as usize);
            pos += 1;
        }
    }

    let worst = *ch.diversities().last().unwrap();
    let mut min_div = u32::MAX;
    let mut cw = vec![0u64; words];
    for t in 1u64..(1u64 << code.k) {
        let flip = t.trailing_zeros() as usize;
        for (w, rw) in cw.iter_mut().zip(&code.rows[flip]) {
            *w ^= rw;
        }
        // First block intersecting the support.
        for (b, mask) in block_masks.iter().enumerate() {
            if cw.iter().zip(mask).any(|(w, m)| w & m != 0) {
                min_div = min_div.min(ch.diversities()[b]);
                break;
            }
        }
        if min_div == worst {
            break;
        }
    }
    Ok(min_div)
}
