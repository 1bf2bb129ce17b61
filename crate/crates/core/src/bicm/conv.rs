//! Recursive systematic convolutional codes with optional puncturing.
//!
//! Codes are identified by octal generator polynomials, feedback first.
//! Single-input codes `(g0; g1, ...)` emit the systematic bit plus one
//! parity per feedforward polynomial (`(23,35)` is the memory-4 half-rate
//! code). The rate-2/3 code is the two-input systematic recursive encoder
//! with parity transfer `[g1/g0, g2/g0]` realized on one shared register.
//! Encoding always appends the zero-driving tail, and tail bits count
//! toward the coded length.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, PartialEq)]
pub enum ConvError {
    #[error("unknown code '{0}' (known: rsc-23-35, rsc-133-171, rsc-25-37-35, rsc-2of3)")]
    UnknownCode(String),
    #[error("coded length {n} is not reachable with this code (got {got} bits at the closest step count)")]
    CodedLength { n: usize, got: usize },
    #[error("info length {k} must be positive and a multiple of {inputs} input bits per step")]
    InfoLength { k: usize, inputs: usize },
}

/// Periodic puncturing pattern: `keep[phase][output]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuncturePattern {
    pub keep: Vec<Vec<bool>>,
}

impl PuncturePattern {
    pub fn period(&self) -> usize {
        self.keep.len()
    }
}

/// Recursive systematic convolutional code with one or two input bits per
/// trellis step.
#[derive(Clone, Debug)]
pub struct ConvCode {
    name: String,
    feedback: u32,
    feedforward: Vec<u32>,
    inputs: usize,
    constraint: u32,
    rc: Rational,
    puncture: Option<PuncturePattern>,
}

fn octal_bits(poly: u32) -> u32 {
    32 - poly.leading_zeros()
}

impl ConvCode {
    /// Single-input RSC: outputs `[u, parity_1, ...]`.
    pub fn rsc(
        name: &str,
        feedback: u32,
        feedforward: &[u32],
        rc: Rational,
        puncture: Option<PuncturePattern>,
    ) -> Self {
        let constraint = feedforward
            .iter()
            .chain(std::iter::once(&feedback))
            .map(|&p| octal_bits(p))
            .max()
            .unwrap();
        ConvCode {
            name: name.to_string(),
            feedback,
            feedforward: feedforward.to_vec(),
            inputs: 1,
            constraint,
            rc,
            puncture,
        }
    }

    /// Two-input systematic RSC with a single shared parity: outputs
    /// `[u1, u2, p]` with `p(D) = (g1 u1 + g2 u2)/g0`.
    pub fn rsc_two_input(name: &str, feedback: u32, ff: [u32; 2], rc: Rational) -> Self {
        let constraint = ff
            .iter()
            .chain(std::iter::once(&feedback))
            .map(|&p| octal_bits(p))
            .max()
            .unwrap();
        ConvCode {
            name: name.to_string(),
            feedback,
            feedforward: ff.to_vec(),
            inputs: 2,
            constraint,
            rc,
            puncture: None,
        }
    }

    /// Half-rate (23,35) code.
    pub fn rsc_23_35() -> Self {
        Self::rsc("rsc-23-35", 0o23, &[0o35], Rational::new(1, 2).unwrap(), None)
    }

    /// Half-rate (133,171) code.
    pub fn rsc_133_171() -> Self {
        Self::rsc("rsc-133-171", 0o133, &[0o171], Rational::new(1, 2).unwrap(), None)
    }

    /// Rate-1/3 (25,37,35) code.
    pub fn rsc_25_37_35() -> Self {
        Self::rsc("rsc-25-37-35", 0o25, &[0o37, 0o35], Rational::new(1, 3).unwrap(), None)
    }

    /// Rate-2/3 (25,37,35) code: two information bits per step and one
    /// shared parity.
    pub fn rsc_2of3() -> Self {
        Self::rsc_two_input("rsc-2of3", 0o25, [0o37, 0o35], Rational::new(2, 3).unwrap())
    }

    pub fn by_name(name: &str) -> Result<Self, ConvError> {
        match name {
            "rsc-23-35" => Ok(Self::rsc_23_35()),
            "rsc-133-171" => Ok(Self::rsc_133_171()),
            "rsc-25-37-35" => Ok(Self::rsc_25_37_35()),
            // historical alias kept for config compatibility
            "rsc-2of3" | "rsc-2of3-punct" => Ok(Self::rsc_2of3()),
            other => Err(ConvError::UnknownCode(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn memory(&self) -> u32 {
        self.constraint - 1
    }

    pub fn rate(&self) -> Rational {
        self.rc
    }

    pub fn inputs_per_step(&self) -> usize {
        self.inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.inputs + if self.inputs == 1 { self.feedforward.len() } else { 1 }
    }

    pub fn puncture(&self) -> Option<&PuncturePattern> {
        self.puncture.as_ref()
    }

    fn taps(&self, poly: u32) -> Vec<u32> {
        let clen = self.constraint;
        (0..clen).map(|k| (poly >> (clen - 1 - k)) & 1).collect()
    }

    fn step_single(&self, state: u32, u: u32) -> (u32, u32) {
        // controller form: register holds the last nu recursive values,
        // bit k-1 = a_{t-k}
        let nu = self.memory();
        let fb = self.taps(self.feedback);
        let mut a = u;
        for k in 1..=nu {
            if fb[k as usize] == 1 {
                a ^= (state >> (k - 1)) & 1;
            }
        }
        let mut bits = u;
        for (j, poly) in self.feedforward.iter().enumerate() {
            let ff = self.taps(*poly);
            let mut o = ff[0] * a;
            for k in 1..=nu {
                if ff[k as usize] == 1 {
                    o ^= (state >> (k - 1)) & 1;
                }
            }
            bits |= (o & 1) << (j + 1);
        }
        let next = ((state << 1) | (a & 1)) & ((1 << nu) - 1);
        (next, bits)
    }

    fn step_double(&self, state: u32, combo: u32) -> (u32, u32) {
        // transposed direct form II on the shared register:
        // p = g1[0] u0 + g2[0] u1 + z_1,
        // z_i' = g1[i] u0 + g2[i] u1 + g0[i] p + z_{i+1}
        let nu = self.memory() as usize;
        let g0 = self.taps(self.feedback);
        let g1 = self.taps(self.feedforward[0]);
        let g2 = self.taps(self.feedforward[1]);
        let u0 = combo & 1;
        let u1 = (combo >> 1) & 1;
        let p = (g1[0] * u0) ^ (g2[0] * u1) ^ (state & 1);
        let mut next = 0u32;
        for i in 1..=nu {
            let z_next = if i < nu { (state >> i) & 1 } else { 0 };
            let zi = (g1[i] * u0) ^ (g2[i] * u1) ^ (g0[i] * p) ^ z_next;
            next |= (zi & 1) << (i - 1);
        }
        let bits = u0 | (u1 << 1) | ((p & 1) << 2);
        (next, bits)
    }

    fn step(&self, state: u32, combo: u32) -> (u32, u32) {
        match self.inputs {
            1 => self.step_single(state, combo),
            _ => self.step_double(state, combo),
        }
    }

    pub fn trellis(&self) -> Trellis {
        let nu = self.memory();
        let n_states = 1usize << nu;
        let n_combos = 1usize << self.inputs;
        let mut next = vec![0u16; n_states * n_combos];
        let mut out = vec![0u32; n_states * n_combos];
        for state in 0..n_states as u32 {
            for combo in 0..n_combos as u32 {
                let (nxt, bits) = self.step(state, combo);
                next[state as usize * n_combos + combo as usize] = nxt as u16;
                out[state as usize * n_combos + combo as usize] = bits;
            }
        }
        // Zero-driving tail by dynamic programming: Z_j = states from which
        // state 0 is reachable in j steps; the tail combo of a state at
        // tail step i is the smallest combo stepping into Z_{tail-i-1}.
        let mut reach = vec![vec![false; n_states]];
        reach[0][0] = true;
        let mut tail_steps = 0usize;
        while !reach[tail_steps].iter().all(|&r| r) {
            let prev = &reach[tail_steps];
            let mut cur = vec![false; n_states];
            for s in 0..n_states {
                for c in 0..n_combos {
                    if prev[next[s * n_combos + c] as usize] {
                        cur[s] = true;
                        break;
                    }
                }
            }
            reach.push(cur);
            tail_steps += 1;
            assert!(tail_steps <= nu as usize, "register must drain within the memory");
        }
        let mut tail_input = vec![0u8; tail_steps * n_states];
        for i in 0..tail_steps {
            let target = &reach[tail_steps - i - 1];
            for s in 0..n_states {
                // States outside reach[tail_steps - i] cannot occur at tail
                // step i; their entries are never read.
                let combo = (0..n_combos)
                    .find(|&c| target[next[s * n_combos + c] as usize])
                    .unwrap_or(0);
                tail_input[i * n_states + s] = combo as u8;
            }
        }
        Trellis {
            memory: nu,
            n_states,
            n_inputs: self.inputs,
            n_out: self.num_outputs(),
            next,
            out,
            tail_steps,
            tail_input,
        }
    }

    fn kept_at(&self, step: usize) -> usize {
        match &self.puncture {
            None => self.num_outputs(),
            Some(p) => p.keep[step % p.period()].iter().filter(|&&k| k).count(),
        }
    }

    /// Tail length in trellis steps.
    pub fn tail_steps(&self) -> usize {
        self.trellis().tail_steps
    }

    /// Number of coded bits emitted for `k_info` information bits
    /// (including the tail steps, after puncturing).
    pub fn coded_len(&self, k_info: usize) -> usize {
        assert_eq!(k_info % self.inputs, 0);
        let steps = k_info / self.inputs + self.tail_steps();
        (0..steps).map(|t| self.kept_at(t)).sum()
    }

    /// Information length (in bits) such that `coded_len(k) == n`, with the
    /// step count aligned to whole puncture periods.
    pub fn info_len_for_coded_len(&self, n: usize) -> Result<usize, ConvError> {
        let tail = self.tail_steps();
        let period = self.puncture.as_ref().map_or(1, PuncturePattern::period);
        let mut acc = 0usize;
        let mut steps = 0usize;
        while acc < n {
            acc += self.kept_at(steps);
            steps += 1;
        }
        // absorb trailing fully-punctured steps to complete the period
        while steps % period != 0 && self.kept_at(steps) == 0 {
            steps += 1;
        }
        if acc != n || steps % period != 0 || steps <= tail {
            return Err(ConvError::CodedLength { n, got: acc });
        }
        Ok((steps - tail) * self.inputs)
    }

    /// Encode with zero-tail termination; returns the punctured coded
    /// stream (step-major, output-index minor).
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>, ConvError> {
        if info.is_empty() || info.len() % self.inputs != 0 {
            return Err(ConvError::InfoLength { k: info.len(), inputs: self.inputs });
        }
        let trellis = self.trellis();
        let info_steps = info.len() / self.inputs;
        let steps = info_steps + trellis.tail_steps;
        let mut out = Vec::with_capacity(self.coded_len(info.len()));
        let mut state = 0usize;
        for t in 0..steps {
            let combo = if t < info_steps {
                let mut c = 0u32;
                for j in 0..self.inputs {
                    c |= u32::from(info[t * self.inputs + j]) << j;
                }
                c
            } else {
                u32::from(trellis.tail_input[(t - info_steps) * trellis.n_states + state])
            };
            let bits = trellis.out[state * (1 << self.inputs) + combo as usize];
            state = trellis.next[state * (1 << self.inputs) + combo as usize] as usize;
            for o in 0..trellis.n_out {
                if self.is_kept(t, o) {
                    out.push(((bits >> o) & 1) as u8);
                }
            }
        }
        debug_assert_eq!(state, 0, "tail must drive the register to zero");
        Ok(out)
    }

    pub fn is_kept(&self, step: usize, output: usize) -> bool {
        match &self.puncture {
            None => true,
            Some(p) => p.keep[step % p.period()][output],
        }
    }

    /// Class of each transmitted coded bit: `true` for systematic.
    pub fn output_classes(&self, k_info: usize) -> Vec<bool> {
        let steps = k_info / self.inputs + self.tail_steps();
        let mut classes = Vec::with_capacity(self.coded_len(k_info));
        for t in 0..steps {
            for o in 0..self.num_outputs() {
                if self.is_kept(t, o) {
                    classes.push(o < self.inputs);
                }
            }
        }
        classes
    }

    /// Free distance by Dijkstra over (state, puncture phase), minimized
    /// over the phase at which the error event starts.
    pub fn free_distance(&self) -> u32 {
        let trellis = self.trellis();
        let n_combos = 1usize << self.inputs;
        let period = self.puncture.as_ref().map_or(1, PuncturePattern::period);
        let weight = |bits: u32, phase: usize| -> u32 {
            (0..trellis.n_out)
                .filter(|&o| self.is_kept(phase, o))
                .map(|o| (bits >> o) & 1)
                .sum()
        };
        let idx = |state: usize, phase: usize| state * period + phase;
        let mut dist = vec![u32::MAX; trellis.n_states * period];
        let mut heap = BinaryHeap::new();
        let mut best = u32::MAX;
        for p0 in 0..period {
            for combo in 1..n_combos {
                let s1 = trellis.next[combo] as usize; // from state 0
                let w = weight(trellis.out[combo], p0);
                if s1 == 0 {
                    best = best.min(w);
                } else if w < dist[idx(s1, (p0 + 1) % period)] {
                    dist[idx(s1, (p0 + 1) % period)] = w;
                    heap.push(Reverse((w, s1, (p0 + 1) % period)));
                }
            }
        }
        while let Some(Reverse((d, s, p))) = heap.pop() {
            if d > dist[idx(s, p)] || d >= best {
                continue;
            }
            for combo in 0..n_combos {
                let nxt = trellis.next[s * n_combos + combo] as usize;
                let nd = d + weight(trellis.out[s * n_combos + combo], p);
                if nxt == 0 {
                    best = best.min(nd);
                } else if nd < dist[idx(nxt, (p + 1) % period)] {
                    dist[idx(nxt, (p + 1) % period)] = nd;
                    heap.push(Reverse((nd, nxt, (p + 1) % period)));
                }
            }
        }
        best
    }
}

/// Unrolled state machine of a code: transitions and packed output bits
/// per (state, input combo), plus the zero-driving tail schedule.
#[derive(Clone, Debug)]
pub struct Trellis {
    pub memory: u32,
    pub n_states: usize,
    /// Input bits per step.
    pub n_inputs: usize,
    pub n_out: usize,
    /// `next[state * 2^n_inputs + combo]`
    pub next: Vec<u16>,
    /// `out[state * 2^n_inputs + combo]`, bit `o` = output `o`
    pub out: Vec<u32>,
    pub tail_steps: usize,
    /// `tail_input[tail_step * n_states + state]`
    pub tail_input: Vec<u8>,
}

impl Trellis {
    pub fn n_combos(&self) -> usize {
        1 << self.n_inputs
    }
}
