//! Toy-blocklength Monte Carlo validation of superposition, multiplexing and index-coding
//! transmission schemes.
//!
//! Every trial draws fresh Gaussian subcodebooks, uniform messages and channel noise, and each
//! receiver runs maximum-likelihood (minimum Euclidean distance) decoding over the candidate
//! tuples consistent with what it knows. ML decoding stands in for joint-typicality decoding;
//! results track trends, not capacity.

mod run;
mod scheme;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::ChannelParams;
use crate::graphs::GraphError;

pub use run::{compare_decoders, run_sim, transmit};
pub use scheme::{scheme_for, Component, Layer, PartRef, SchemeSpec, Step, DEFAULT_SPLIT};

/// Largest number of unknown bits enumerated in one decoding step.
pub const MAX_CANDIDATE_BITS: u32 = 20;

/// Largest number of codeword samples cached per trial.
pub const MAX_CODEBOOK_SAMPLES: usize = 1 << 24;

/// Default cap on bits per message used by [`SimConfig::from_rates`].
pub const DEFAULT_BIT_CAP: u32 = 10;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("group {0} uses dirty paper coding, which the simulator does not implement")]
    Unsupported(u8),
    #[error("invalid scheme: {0}")]
    Scheme(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("receiver {receiver} step {step} enumerates {bits} unknown bits, limit {limit}")]
    CandidateGuard { receiver: usize, step: usize, bits: u32, limit: u32 },
    #[error("codebook cache would exceed {0} samples")]
    CodebookGuard(usize),
    #[error("layer {0} has zero power but carries bits")]
    ZeroPower(usize),
}

/// Bit string of at most 64 bits, stored right-aligned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitMessage {
    value: u64,
    len: u32,
}

impl BitMessage {
    /// Longest supported message.
    pub const MAX_LEN: u32 = 64;

    /// Message of `len` bits; `None` when `value` does not fit.
    pub fn new(value: u64, len: u32) -> Option<Self> {
        (len <= Self::MAX_LEN && (len == 64 || value >> len == 0)).then_some(BitMessage { value, len })
    }

    /// All-zero message of `len` bits.
    pub fn zeros(len: u32) -> Self {
        BitMessage { value: 0, len: len.min(Self::MAX_LEN) }
    }

    /// Integer value, most significant bit first.
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Length in bits.
    pub fn len(&self) -> u32 {
        self.len
    }

    /// True for the empty message.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl FromStr for BitMessage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.len() > Self::MAX_LEN as usize {
            return Err(format!("more than {} bits", Self::MAX_LEN));
        }
        let mut value = 0u64;
        for c in s.chars() {
            let bit = c.to_digit(2).ok_or_else(|| format!("invalid bit `{c}`"))?;
            value = value << 1 | bit as u64;
        }
        Ok(BitMessage { value, len: s.len() as u32 })
    }
}

impl fmt::Display for BitMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in (0..self.len).rev() {
            write!(f, "{}", self.value >> k & 1)?;
        }
        Ok(())
    }
}

/// Bitwise XOR after zero-extending the shorter operand on the left.
pub fn xor_pad(a: BitMessage, b: BitMessage) -> BitMessage {
    BitMessage { value: a.value ^ b.value, len: a.len.max(b.len) }
}

/// Whether receivers exploit side information while forming candidate sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeMode {
    /// Candidates are restricted to tuples consistent with the receiver's side information.
    Joint,
    /// Candidates ignore side information; an answer contradicting it counts as an error.
    Separate,
}

impl fmt::Display for DecodeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecodeMode::Joint => "joint",
            DecodeMode::Separate => "separate",
        })
    }
}

impl FromStr for DecodeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "joint" => Ok(DecodeMode::Joint),
            "separate" => Ok(DecodeMode::Separate),
            _ => Err(format!("unknown decoding mode `{s}`")),
        }
    }
}

/// Blocklength, message sizes, trial count, seed and channel of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub bits: Vec<u32>,
    pub trials: u64,
    pub seed: u64,
    pub channel: ChannelParams<f64>,
}

impl SimConfig {
    /// Message sizes `min(⌈n·R_i⌉, bit_cap)` for the given rates.
    pub fn from_rates(
        n: usize,
        rates: &[f64],
        bit_cap: u32,
        trials: u64,
        seed: u64,
        channel: ChannelParams<f64>,
    ) -> Result<Self, SimError> {
        if let Some(r) = rates.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
            return Err(SimError::Config(format!("rates must be finite and nonnegative, got {r}")));
        }
        let bits = rates.iter().map(|r| ((n as f64 * r).ceil() as u32).min(bit_cap)).collect();
        let cfg = SimConfig { n, bits, trials, seed, channel };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks `n ≥ 1`, one bit count per receiver and the 64-bit message limit.
    pub fn validate(&self) -> Result<(), SimError> {
        if self.n == 0 {
            return Err(SimError::Config("blocklength must be at least 1".into()));
        }
        if self.bits.len() != self.channel.num_receivers() {
            return Err(SimError::Config(format!(
                "{} bit counts for {} receivers",
                self.bits.len(),
                self.channel.num_receivers()
            )));
        }
        if let Some(b) = self.bits.iter().find(|b| **b > BitMessage::MAX_LEN) {
            return Err(SimError::Config(format!("{b} bits exceed the {}-bit message limit", BitMessage::MAX_LEN)));
        }
        Ok(())
    }

    /// Rates `bits_i / n` actually simulated.
    pub fn rates(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| b as f64 / self.n as f64).collect()
    }
}

/// Per-receiver error counts of one simulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimResult {
    pub errors: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
}

impl SimResult {
    /// Error fractions in `[0, 1]`.
    pub fn estimates(&self) -> Vec<f64> {
        self.errors.iter().map(|&e| if self.trials == 0 { 0.0 } else { e as f64 / self.trials as f64 }).collect()
    }

    /// 95% normal-approximation confidence half-widths.
    pub fn half_widths(&self) -> Vec<f64> {
        self.estimates()
            .iter()
            .map(|p| if self.trials == 0 { 0.0 } else { 1.96 * (p * (1.0 - p) / self.trials as f64).sqrt() })
            .collect()
    }

    /// Serializable report of this result under `cfg`.
    pub fn report(&self, cfg: &SimConfig, mode: DecodeMode) -> SimReport {
        SimReport {
            receiver_errors: self.estimates(),
            half_widths: self.half_widths(),
            trials: self.trials,
            seed: self.seed,
            config: ReportConfig { n: cfg.n, bits: cfg.bits.clone(), rates: cfg.rates(), channel: cfg.channel.clone(), mode },
        }
    }
}

/// Simulation report as written by the command-line tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub receiver_errors: Vec<f64>,
    pub half_widths: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub config: ReportConfig,
}

/// Configuration echoed in a [`SimReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub n: usize,
    pub bits: Vec<u32>,
    pub rates: Vec<f64>,
    pub channel: ChannelParams<f64>,
    pub mode: DecodeMode,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bm(s: &str) -> BitMessage {
        s.parse().unwrap()
    }

    #[test]
    fn xor_pads_on_the_left() {
        assert_eq!(xor_pad(bm("101"), bm("00110")).to_string(), "00011");
        assert_eq!(xor_pad(bm("1"), BitMessage::zeros(4)).to_string(), "0001");
        assert!(BitMessage::new(4, 2).is_none());
        assert!("10a".parse::<BitMessage>().is_err());
    }

    #[test]
    fn rates_to_bits() {
        let ch = ChannelParams::new(10.0, vec![1.0, 2.0, 4.0]).unwrap();
        let cfg = SimConfig::from_rates(16, &[0.5, 0.3, 2.0], 10, 1, 0, ch.clone()).unwrap();
        assert_eq!(cfg.bits, [8, 5, 10]);
        assert!(SimConfig::from_rates(0, &[0.1; 3], 10, 1, 0, ch.clone()).is_err());
        assert!(SimConfig::from_rates(4, &[0.1; 2], 10, 1, 0, ch).is_err());
    }
}
