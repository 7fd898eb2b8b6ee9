//! Order-statistics decoding.
//!
//! The decoder sorts the received vector by reliability, row-reduces the
//! generator onto the `k` most reliable independent positions, flips every
//! pattern of at most `s` basis bits, re-encodes, and keeps the candidate with
//! the smallest discrepancy to the hard decision.

mod cep;
mod decode;
mod mrb;

pub use cep::{estimate_cep, wilson_interval, CepEstimate, CepRun, WILSON_Z};
pub use decode::{decode, decode_counted, for_each_pattern, Decoded};
pub use mrb::{
    invert_permutation, reliability_permutation, reliability_permutation_counted, systematize,
    systematize_counted, MostReliableBasis,
};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

/// Candidate score.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Metric {
    /// Sum of `|y_i|` over positions where the candidate disagrees with the hard decision.
    #[default]
    Soft,
    /// Number of disagreeing positions.
    Hamming,
}

/// How candidates are generated and scored. Both modes return identical results.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Reprocessing {
    /// Every pattern is re-encoded from scratch and scored in full.
    #[default]
    Exhaustive,
    /// Candidates are the base codeword XOR the flipped rows; scoring stops
    /// once the partial sum reaches the best score so far.
    Fast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecoderConfig {
    /// Maximum test error pattern weight.
    pub s: usize,
    /// Quantization bits; only used in operation counts.
    pub q: u32,
    pub metric: Metric,
    pub reprocessing: Reprocessing,
}

impl DecoderConfig {
    pub const DEFAULT_Q: u32 = 8;

    pub fn new(s: usize) -> Self {
        Self {
            s,
            q: Self::DEFAULT_Q,
            metric: Metric::Soft,
            reprocessing: Reprocessing::Exhaustive,
        }
    }

    pub fn fast(mut self) -> Self {
        self.reprocessing = Reprocessing::Fast;
        self
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn with_q(mut self, q: u32) -> Self {
        self.q = q;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    Sort,
    Elimination,
    Reprocessing,
}

/// Sink for binary-operation counts.
pub trait OpCounter {
    fn add(&mut self, kind: OpKind, ops: u64);
}

/// Discards counts.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoCount;

impl OpCounter for NoCount {
    #[inline(always)]
    fn add(&mut self, _: OpKind, _: u64) {}
}

/// Per-stage totals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpTally {
    pub sort: u64,
    pub elimination: u64,
    pub reprocessing: u64,
}

impl OpTally {
    pub fn total(&self) -> u64 {
        self.sort + self.elimination + self.reprocessing
    }
}

impl OpCounter for OpTally {
    fn add(&mut self, kind: OpKind, ops: u64) {
        match kind {
            OpKind::Sort => self.sort += ops,
            OpKind::Elimination => self.elimination += ops,
            OpKind::Reprocessing => self.reprocessing += ops,
        }
    }
}

/// `|T| = Σ_{i=0}^{s} C(k, i)`.
pub fn tep_count(k: usize, s: usize) -> Result<BigUint> {
    if s > k {
        return Err(Error::domain(format!("order {s} exceeds k = {k}")));
    }
    let mut term = BigUint::one();
    let mut total = BigUint::one();
    for i in 1..=s {
        term = term * BigUint::from(k - i + 1) / BigUint::from(i);
        total += &term;
    }
    Ok(total)
}

/// Per-information-bit operations `log2(n)/r + n·k + ½|T|(n − q + q·n/k)`.
pub fn complexity_per_info_bit(n: usize, k: usize, s: usize, q: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("k must be >= 1"));
    }
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
    }
    let teps = tep_count(k, s)?.to_f64().unwrap_or(f64::INFINITY);
    let (nf, kf, qf) = (n as f64, k as f64, q as f64);
    let rate = kf / nf;
    Ok(nf.log2() / rate + nf * kf + 0.5 * teps * (nf - qf + qf * nf / kf))
}
