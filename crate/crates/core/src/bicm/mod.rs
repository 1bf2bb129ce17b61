//! Transmit chain: convolutional encoding, puncturing, constrained
//! interleaving and Gray QAM mapping onto cooperation frames.

pub mod conv;
pub mod interleaver;
pub mod mapping;

pub use conv::{ConvCode, ConvError, PuncturePattern, Trellis};
pub use interleaver::{build_interleaver, InterleaverError, InterleaverPlan};
pub use mapping::{
    demap_llr_reference, gray_code, log_sum_exp, map_symbols, MappingError, QamMapper, SlotPlan,
};

use num_complex::Complex64;
use thiserror::Error;

use crate::bounds::EquivalentChannel;

#[derive(Debug, Error)]
pub enum BicmError {
    #[error(transparent)]
    Code(#[from] ConvError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Interleaver(#[from] InterleaverError),
}

/// The full transmit chain for one experiment: code, slot plan, constrained
/// interleaver and per-slot mappers.
#[derive(Clone, Debug)]
pub struct BicmChain {
    pub code: ConvCode,
    pub plan: SlotPlan,
    pub interleaver: InterleaverPlan,
    pub k_info: usize,
    pub n: usize,
}

impl BicmChain {
    /// Assemble the chain for an `n`-bit codeword over the given equivalent
    /// channel; the interleaver is seeded deterministically.
    pub fn build(
        code: ConvCode,
        plan: SlotPlan,
        eq: &EquivalentChannel,
        n: usize,
        seed: u64,
    ) -> Result<Self, BicmError> {
        let k_info = code.info_len_for_coded_len(n)?;
        let classes = code.output_classes(k_info);
        let interleaver = build_interleaver(n, &plan, eq, &classes, seed)?;
        Ok(BicmChain { code, plan, interleaver, k_info, n })
    }

    /// Encode, interleave and map one codeword onto cooperation frames.
    pub fn transmit(&self, info: &[u8]) -> Result<Vec<Vec<Complex64>>, BicmError> {
        let coded = self.code.encode(info)?;
        let positioned = self.interleaver.interleave(&coded);
        Ok(map_symbols(&positioned, &self.plan)?)
    }

    pub fn num_frames(&self) -> usize {
        self.n / self.plan.bits_per_frame()
    }
}
