//! Diversity-order bounds for coded transmission over slotted
//! amplify-and-forward cooperation frames.
//!
//! The central abstraction is the nested ("matryoshka") block-fading
//! channel: the fading set seen by a block is always contained in the
//! fading set of the previous block, so block diversities are
//! non-increasing. Every protocol/precoder configuration handled here maps
//! onto such a channel, and the generic Singleton-style bound on that
//! channel reproduces the per-case closed forms. Everything in this module
//! is exact integer/rational arithmetic.

mod code;
mod tables;

pub use code::{code_diversity_oracle, BinaryLinearCode};
pub use tables::{emit_bound_tables, max_rate_table, BoundTable, MaxRateTable};

use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("matryoshka channel needs at least one block")]
    EmptyChannel,
    #[error("diversity and length lists must have equal size")]
    LengthMismatch,
    #[error("block {index} has {what} = 0 (all entries must be >= 1)")]
    ZeroEntry { index: usize, what: &'static str },
    #[error("diversities must be non-increasing (block {index})")]
    NotNested { index: usize },
    #[error("coding rate {0} is outside (0, 1]")]
    InvalidRate(Rational),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{n} is not divisible by {by} ({what})")]
    Divisibility { n: u64, by: u64, what: &'static str },
    #[error("codeword enumeration cap exceeded: K = {k} > {cap}")]
    EnumerationCap { k: usize, cap: usize },
    #[error("code length {code} does not match channel length {channel}")]
    CodeChannelMismatch { code: usize, channel: u64 },
    #[error("generator matrix is rank deficient")]
    RankDeficient,
}

/// Nested block-fading channel descriptor: per-block diversity orders
/// (non-increasing) and per-block lengths in bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatryoshkaChannel {
    diversities: Vec<u32>,
    lengths: Vec<u64>,
}

impl MatryoshkaChannel {
    pub fn new(diversities: Vec<u32>, lengths: Vec<u64>) -> Result<Self, BoundsError> {
        if diversities.is_empty() {
            return Err(BoundsError::EmptyChannel);
        }
        if diversities.len() != lengths.len() {
            return Err(BoundsError::LengthMismatch);
        }
        for (i, &d) in diversities.iter().enumerate() {
            if d == 0 {
                return Err(BoundsError::ZeroEntry { index: i, what: "diversity" });
            }
            if i > 0 && d > diversities[i - 1] {
                return Err(BoundsError::NotNested { index: i });
            }
        }
        for (i, &l) in lengths.iter().enumerate() {
            if l == 0 {
                return Err(BoundsError::ZeroEntry { index: i, what: "length" });
            }
        }
        Ok(MatryoshkaChannel { diversities, lengths })
    }

    pub fn diversities(&self) -> &[u32] {
        &self.diversities
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    pub fn num_blocks(&self) -> usize {
        self.diversities.len()
    }

    pub fn total_length(&self) -> u64 {
        self.lengths.iter().sum()
    }

    /// Maximum diversity order of the configuration (first block).
    pub fn max_diversity(&self) -> u32 {
        self.diversities[0]
    }

    /// Block index (0-based) containing the given bit position.
    pub fn block_of_bit(&self, pos: u64) -> usize {
        let mut acc = 0u64;
        for (i, &l) in self.lengths.iter().enumerate() {
            acc += l;
            if pos < acc {
                return i;
            }
        }
        panic!("bit position {pos} out of range");
    }
}

/// Precoding strategy over the cooperation frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrecodingStrategy {
    /// No precoding (spreading 1).
    None,
    /// One rotation spreading the first slot with the s-1 lowest-diversity
    /// slots.
    SinglePrecoder,
    /// (beta+1)/s independent rotations, each pairing the next-highest slot
    /// with the s-1 lowest uncoupled ones.
    MultiPrecoder,
}

impl PrecodingStrategy {
    pub fn parse(s: &str) -> Result<Self, BoundsError> {
        match s {
            "none" => Ok(PrecodingStrategy::None),
            "single" | "single_precoder" => Ok(PrecodingStrategy::SinglePrecoder),
            "multi" | "multi_precoder" => Ok(PrecodingStrategy::MultiPrecoder),
            other => Err(BoundsError::InvalidConfig(format!("unknown strategy '{other}'"))),
        }
    }
}

/// Parameters of a bound evaluation: relays, extra slots, spreading, coding
/// rate, and optionally unequal per-slot spectral efficiencies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundConfig {
    pub beta: u32,
    pub alpha: u32,
    pub s: u32,
    pub rc: Rational,
    pub slot_plan: Option<Vec<u32>>,
    pub strategy: PrecodingStrategy,
}

impl BoundConfig {
    pub fn num_slots(&self) -> u32 {
        self.beta + 1 + self.alpha
    }

    pub fn validate(&self) -> Result<(), BoundsError> {
        let m = self.num_slots();
        if self.beta == 0 {
            return Err(BoundsError::InvalidConfig("beta must be >= 1".into()));
        }
        if !self.rc.is_valid_rate() {
            return Err(BoundsError::InvalidRate(self.rc));
        }
        if self.s == 0 || self.s > m {
            return Err(BoundsError::InvalidConfig(format!(
                "spreading s = {} must satisfy 1 <= s <= {m}",
                self.s
            )));
        }
        if self.beta == 1 && self.alpha > 0 {
            // Frame stretching is defined for two relays and more.
            return Err(BoundsError::InvalidConfig(
                "alpha > 0 requires beta >= 2".into(),
            ));
        }
        match self.strategy {
            PrecodingStrategy::None => {
                if self.s != 1 {
                    return Err(BoundsError::InvalidConfig(
                        "strategy 'none' requires s = 1".into(),
                    ));
                }
            }
            PrecodingStrategy::SinglePrecoder => {}
            PrecodingStrategy::MultiPrecoder => {
                if self.alpha != 0 {
                    return Err(BoundsError::InvalidConfig(
                        "multi-precoder strategy requires alpha = 0".into(),
                    ));
                }
                if (self.beta + 1) % self.s != 0 {
                    return Err(BoundsError::InvalidConfig(format!(
                        "multi-precoder strategy requires s | beta+1 (s = {}, beta+1 = {})",
                        self.s,
                        self.beta + 1
                    )));
                }
                if self.slot_plan.is_some() {
                    return Err(BoundsError::InvalidConfig(
                        "multi-precoder with unequal slot plans is not defined".into(),
                    ));
                }
            }
        }
        if let Some(plan) = &self.slot_plan {
            if plan.len() != m as usize {
                return Err(BoundsError::InvalidConfig(format!(
                    "slot plan has {} entries, expected M = {m}",
                    plan.len()
                )));
            }
            if plan.iter().all(|&b| b == 0) {
                return Err(BoundsError::InvalidConfig("slot plan is all zero".into()));
            }
        }
        Ok(())
    }
}

/// The equivalent nested channel of a configuration, together with the map
/// from each slot to its block (slots whose block carries no bits map to
/// `None`).
#[derive(Clone, Debug)]
pub struct EquivalentChannel {
    pub channel: MatryoshkaChannel,
    pub slot_to_block: Vec<Option<usize>>,
}

/// Diversity order of the slot with 1-based index `slot` (out of
/// `beta + 1 + alpha` slots): the first `1 + alpha` slots see every fading
/// variable, later slots see one fewer per step.
pub fn slot_diversity(beta: u32, alpha: u32, slot: u32) -> u32 {
    let m = beta + 1 + alpha;
    debug_assert!((1..=m).contains(&slot));
    if slot <= 1 + alpha {
        beta + 1
    } else {
        m + 1 - slot
    }
}

/// Slot groups induced by the precoding strategy, each listing the 0-based
/// slot indices it spreads together, ordered by decreasing diversity.
fn strategy_groups(cfg: &BoundConfig) -> Vec<Vec<usize>> {
    let m = cfg.num_slots() as usize;
    let s = cfg.s as usize;
    match cfg.strategy {
        PrecodingStrategy::None => (0..m).map(|k| vec![k]).collect(),
        PrecodingStrategy::SinglePrecoder => {
            if s == 1 {
                return (0..m).map(|k| vec![k]).collect();
            }
            let mut head: Vec<usize> = vec![0];
            head.extend(m - s + 1..m);
            let mut groups = vec![head];
            groups.extend((1..=m - s).map(|k| vec![k]));
            groups
        }
        PrecodingStrategy::MultiPrecoder => {
            let n_groups = m / s;
            (0..n_groups)
                .map(|g| {
                    let mut grp = vec![g];
                    grp.extend(m - (g + 1) * (s - 1)..m - g * (s - 1));
                    grp
                })
                .collect()
        }
    }
}

/// Build the equivalent matryoshka channel of a configuration for an
/// `n`-bit codeword, with the slot-to-block map used by the interleaver.
pub fn build_equivalent_channel(cfg: &BoundConfig, n: u64) -> Result<EquivalentChannel, BoundsError> {
    cfg.validate()?;
    let m = cfg.num_slots() as usize;

    // Per-slot bit counts.
    let slot_bits: Vec<u64> = match &cfg.slot_plan {
        Some(plan) => {
            let total: u64 = plan.iter().map(|&b| b as u64).sum();
            if n % total != 0 {
                return Err(BoundsError::Divisibility { n, by: total, what: "sum of slot plan" });
            }
            plan.iter().map(|&b| b as u64 * (n / total)).collect()
        }
        None => {
            if n % m as u64 != 0 {
                return Err(BoundsError::Divisibility { n, by: m as u64, what: "slot count M" });
            }
            vec![n / m as u64; m]
        }
    };

    let groups = strategy_groups(cfg);
    let group_div: Vec<u32> = groups
        .iter()
        .map(|g| {
            g.iter()
                .map(|&k| slot_diversity(cfg.beta, cfg.alpha, k as u32 + 1))
                .max()
                .unwrap()
        })
        .collect();
    let group_len: Vec<u64> = groups
        .iter()
        .map(|g| g.iter().map(|&k| slot_bits[k]).sum())
        .collect();

    // Merge adjacent equal-diversity groups into canonical blocks, then drop
    // empty blocks.
    let mut slot_to_block = vec![None; m];
    let mut diversities = Vec::new();
    let mut lengths: Vec<u64> = Vec::new();
    let mut group_block = vec![0usize; groups.len()];
    for (gi, (&d, &l)) in group_div.iter().zip(&group_len).enumerate() {
        if let Some(&last) = diversities.last() {
            if last == d {
                *lengths.last_mut().unwrap() += l;
                group_block[gi] = diversities.len() - 1;
                continue;
            }
        }
        diversities.push(d);
        lengths.push(l);
        group_block[gi] = diversities.len() - 1;
    }
    // Re-index after removing zero-length blocks.
    let mut kept = Vec::new();
    let mut remap = vec![None; lengths.len()];
    for (bi, (&d, &l)) in diversities.iter().zip(&lengths).enumerate() {
        if l > 0 {
            remap[bi] = Some(kept.len());
            kept.push((d, l));
        }
    }
    for (gi, grp) in groups.iter().enumerate() {
        let block = remap[group_block[gi]];
        for &k in grp {
            slot_to_block[k] = block;
        }
    }
    let channel = MatryoshkaChannel::new(
        kept.iter().map(|&(d, _)| d).collect(),
        kept.iter().map(|&(_, l)| l).collect(),
    )?;
    Ok(EquivalentChannel { channel, slot_to_block })
}

/// Equivalent channel without the slot map.
pub fn build_matryoshka(cfg: &BoundConfig, n: u64) -> Result<MatryoshkaChannel, BoundsError> {
    Ok(build_equivalent_channel(cfg, n)?.channel)
}

/// Code dimension `K = Rc * N`; the flag reports whether the product was an
/// integer (otherwise K is rounded up and the caller should warn).
pub fn code_dimension(rc: Rational, n: u64) -> (u64, bool) {
    let k = rc.ceil_mul(n) as u64;
    let exact = rc.floor_mul(n) as u64 == k;
    (k, exact)
}

/// Generic diversity bound of a rate-`rc` linear code over a nested
/// block-fading channel: the diversity of the block at which the cumulative
/// length first reaches the code dimension.
pub fn delta_max_generic(ch: &MatryoshkaChannel, rc: Rational) -> Result<u32, BoundsError> {
    if !rc.is_valid_rate() {
        return Err(BoundsError::InvalidRate(rc));
    }
    let (k, _) = code_dimension(rc, ch.total_length());
    let mut acc = 0u64;
    for (i, &l) in ch.lengths().iter().enumerate() {
        acc += l;
        if k <= acc {
            return Ok(ch.diversities()[i]);
        }
    }
    unreachable!("rc <= 1 guarantees K <= total length");
}

/// Closed-form diversity bound `min(s + floor((beta+1+alpha)(1-Rc)), beta+1)`.
///
/// Specializations: `s = 1, alpha = 0` is the non-precoded frame bound;
/// `alpha = 0` the single-precoder bound; `s = 1` the stretched-frame bound.
pub fn delta_closed_form(beta: u32, alpha: u32, s: u32, rc: Rational) -> Result<u32, BoundsError> {
    if beta == 0 {
        return Err(BoundsError::InvalidConfig("beta must be >= 1".into()));
    }
    if beta == 1 && alpha > 0 {
        return Err(BoundsError::InvalidConfig("alpha > 0 requires beta >= 2".into()));
    }
    if s == 0 {
        return Err(BoundsError::InvalidConfig("spreading s must be >= 1".into()));
    }
    if !rc.is_valid_rate() {
        return Err(BoundsError::InvalidRate(rc));
    }
    let m = (beta + 1 + alpha) as u64;
    let val = s as i64 + rc.complement().floor_mul(m);
    Ok((val.min((beta + 1) as i64)) as u32)
}

/// Diversity bound with `(beta+1)/s` independent precoders:
/// `min((beta+1)(s-1)/s + 1 + floor((1-Rc)(beta+1)/s), beta+1)`.
pub fn delta_multi_precoder(beta: u32, s: u32, rc: Rational) -> Result<u32, BoundsError> {
    if beta == 0 || s == 0 {
        return Err(BoundsError::InvalidConfig("beta and s must be >= 1".into()));
    }
    if (beta + 1) % s != 0 {
        return Err(BoundsError::InvalidConfig(format!(
            "s = {s} does not divide beta+1 = {}",
            beta + 1
        )));
    }
    if !rc.is_valid_rate() {
        return Err(BoundsError::InvalidRate(rc));
    }
    let groups = ((beta + 1) / s) as u64;
    let val = (beta + 1 - (beta + 1) / s) as i64 + 1 + rc.complement().floor_mul(groups);
    Ok((val.min((beta + 1) as i64)) as u32)
}

/// Achievable diversity with unequal per-slot spectral efficiencies
/// `m[0..beta]` and a spreading-`s` precoder combining the first slot with
/// the `s-1` last ones (`s = 1` means no precoding): `beta + 2 - i` for the
/// smallest `i` with `Rc <= sum(m'[..i]) / sum(m)`.
pub fn delta_unequal_m(beta: u32, s: u32, m: &[u32], rc: Rational) -> Result<u32, BoundsError> {
    if beta == 0 {
        return Err(BoundsError::InvalidConfig("beta must be >= 1".into()));
    }
    if m.len() != (beta + 1) as usize {
        return Err(BoundsError::InvalidConfig(format!(
            "slot plan has {} entries, expected beta+1 = {}",
            m.len(),
            beta + 1
        )));
    }
    if m.iter().all(|&b| b == 0) {
        return Err(BoundsError::InvalidConfig("slot plan is all zero".into()));
    }
    if s == 0 || s > beta + 1 {
        return Err(BoundsError::InvalidConfig(format!(
            "spreading s = {s} must satisfy 1 <= s <= beta+1"
        )));
    }
    if !rc.is_valid_rate() {
        return Err(BoundsError::InvalidRate(rc));
    }
    let total: i64 = m.iter().map(|&b| b as i64).sum();
    let len = m.len();
    // Spread plan: first entry absorbs the s-1 last slots.
    let mut spread: Vec<i64> = Vec::with_capacity(len + 1 - s as usize);
    let absorbed: i64 = (1..s as usize).map(|g| m[len - g] as i64).sum();
    spread.push(m[0] as i64 + absorbed);
    spread.extend(m[1..=len - s as usize].iter().map(|&b| b as i64));
    let mut prefix = 0i64;
    for (idx, &b) in spread.iter().enumerate() {
        prefix += b;
        if rc.cmp_frac(prefix, total) != std::cmp::Ordering::Greater {
            return Ok(beta + 2 - (idx as u32 + 1));
        }
    }
    unreachable!("rc <= 1 guarantees the loop terminates");
}

/// Largest coding rate keeping full diversity: `(s + alpha) / (beta+1+alpha)`,
/// capped at 1.
pub fn max_full_diversity_rate(beta: u32, alpha: u32, s: u32) -> Rational {
    let m = (beta + 1 + alpha) as i64;
    let r = Rational::new((s + alpha) as i64, m).expect("m >= 1");
    if r > Rational::ONE {
        Rational::ONE
    } else {
        r
    }
}
