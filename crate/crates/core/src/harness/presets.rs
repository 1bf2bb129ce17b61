//! Named experiment presets for the single-, two- and three-relay setups.

use super::{default_energies, ExperimentConfig, StopRule};
use crate::bicm::SlotPlan;
use crate::bounds::PrecodingStrategy;
use crate::channel::{GainNormalization, LinkGains, RelayMode};

fn base(
    name: &str,
    beta: u32,
    alpha: u32,
    code: &str,
    plan: SlotPlan,
    strategy: PrecodingStrategy,
    spreading: u32,
    n: usize,
) -> ExperimentConfig {
    let m = (beta + 1 + alpha) as usize;
    ExperimentConfig {
        name: name.to_string(),
        beta,
        alpha,
        energies: default_energies(m),
        gains: LinkGains::reliable_relay_links(20.0),
        relay_mode: RelayMode::Faded,
        normalization: GainNormalization::Instantaneous,
        code_name: code.to_string(),
        plan,
        strategy,
        spreading,
        n,
        n_iter: 10,
        snr_grid_db: (0..=12).map(|i| 2.0 * i as f64).collect(),
        stop: StopRule::default(),
        seed: 1,
    }
}

/// The four preset families:
///
/// * `E1-*`: single-relay frame, half-rate (23,35) code, 64-QAM, N = 1296,
///   without and with the 2x2 rotation.
/// * `E2-*`: two-relay 3-slot frame at R = 4/3 b/s/Hz, N = 1296: rate-1/3
///   code with 16-QAM, rate-2/3 code with QPSK and an s = 2 rotation, the
///   unequal (6;4;2) plan, and the orthogonal baseline.
/// * `E3-*`: three-relay frame, QPSK, half-rate (133,171) code, N = 1296:
///   full s = 4 precoding, single and double s = 2 rotations, and the
///   non-precoded alpha = 2 stretched frame.
/// * `E4-*`: two-relay frame, rate-2/3 code, BPSK, N = 1440, s in {1, 2}.
pub fn presets() -> Vec<ExperimentConfig> {
    let none = PrecodingStrategy::None;
    let single = PrecodingStrategy::SinglePrecoder;
    let multi = PrecodingStrategy::MultiPrecoder;
    vec![
        base("E1-s1", 1, 0, "rsc-23-35", SlotPlan::uniform(6, 2), none, 1, 1296),
        base("E1-s2", 1, 0, "rsc-23-35", SlotPlan::uniform(6, 2), single, 2, 1296),
        base("E2-rc13-16qam", 2, 0, "rsc-25-37-35", SlotPlan::uniform(4, 3), none, 1, 1296),
        base("E2-rc23-qpsk-s2", 2, 0, "rsc-2of3", SlotPlan::uniform(2, 3), single, 2, 1296),
        base("E2-unequal", 2, 0, "rsc-25-37-35", SlotPlan::new(vec![6, 4, 2]).unwrap(), none, 1, 1296),
        {
            let mut c = base(
                "E2-orthogonal",
                2,
                0,
                "rsc-2of3",
                SlotPlan::new(vec![6, 0, 0]).unwrap(),
                none,
                1,
                1296,
            );
            // pure relaying after the first slot
            c.energies = vec![1.0, 0.0, 0.0];
            c
        },
        base("E3-s4full", 3, 0, "rsc-133-171", SlotPlan::uniform(2, 4), single, 4, 1296),
        base("E3-s2single", 3, 0, "rsc-133-171", SlotPlan::uniform(2, 4), single, 2, 1296),
        base("E3-s2multi", 3, 0, "rsc-133-171", SlotPlan::uniform(2, 4), multi, 2, 1296),
        base("E3-alpha2", 3, 2, "rsc-133-171", SlotPlan::uniform(2, 6), none, 1, 1296),
        base("E4-s1", 2, 0, "rsc-2of3", SlotPlan::uniform(1, 3), none, 1, 1440),
        base("E4-s2", 2, 0, "rsc-2of3", SlotPlan::uniform(1, 3), single, 2, 1440),
    ]
}

pub fn preset_names() -> Vec<String> {
    presets().into_iter().map(|c| c.name).collect()
}

/// Presets whose name equals `pattern` or starts with `pattern` followed by
/// a dash (so `E2` selects the whole family).
pub fn presets_matching(pattern: &str) -> Vec<ExperimentConfig> {
    presets()
        .into_iter()
        .filter(|c| c.name == pattern || c.name.starts_with(&format!("{pattern}-")))
        .collect()
}
