//! Monte Carlo codeword error probability.

use rand::Rng;
use rayon::prelude::*;

use super::{decode, DecoderConfig};
use crate::codec::bitmatrix::words_for;
use crate::codec::{transmit, unpack_bits, CodeSpec};
use crate::fb_bounds::SnrLinear;
use crate::rng::trial_rng;
use crate::scalar::Real;

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CepEstimate {
    pub errors: u64,
    pub trials: u64,
    pub cep: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl CepEstimate {
    pub fn from_counts(errors: u64, trials: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(errors, trials);
        Self {
            errors,
            trials,
            cep: if trials == 0 { 0.0 } else { errors as f64 / trials as f64 },
            ci_low,
            ci_high,
        }
    }

    /// True when the two 95% intervals are disjoint and `self` is the larger.
    pub fn clearly_above(&self, other: &CepEstimate) -> bool {
        self.ci_low > other.ci_high
    }
}

/// 95% Wilson score interval. With no errors the upper end is the one-sided
/// bound `1 − 0.05^{1/N}`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let nt = trials as f64;
    if errors == 0 {
        return (0.0, 1.0 - 0.05f64.powf(1.0 / nt));
    }
    let p = errors as f64 / nt;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / nt;
    let center = (p + z2 / (2.0 * nt)) / denom;
    let half = WILSON_Z / denom * (p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)).sqrt();
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

/// Monte Carlo limits for [`estimate_cep`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CepRun {
    pub max_trials: u64,
    /// Stop after this many errors; `None` runs all trials.
    pub target_errors: Option<u64>,
    pub seed: u64,
}

impl CepRun {
    pub fn new(max_trials: u64, seed: u64) -> Self {
        Self {
            max_trials,
            target_errors: None,
            seed,
        }
    }

    pub fn stop_after(mut self, errors: u64) -> Self {
        self.target_errors = Some(errors);
        self
    }
}

const BATCH: u64 = 1024;

/// One trial: random message, encode, transmit, decode. Returns whether the
/// decoded codeword differs from the transmitted one.
pub(crate) fn run_trial<T: Real>(
    code: &CodeSpec,
    config: &DecoderConfig,
    rho: SnrLinear<T>,
    seed: u64,
    trial: u64,
) -> bool {
    let mut rng = trial_rng(seed, trial);
    let k = code.k();
    let mut msg: Vec<u64> = (0..words_for(k)).map(|_| rng.random()).collect();
    if k % 64 != 0 {
        let last = msg.len() - 1;
        msg[last] &= (1u64 << (k % 64)) - 1;
    }
    let codeword = code.encode_packed(&msg);
    let bits = unpack_bits(&codeword, code.n());
    let y = transmit(&bits, rho, &mut rng);
    let decoded = decode(&y, code, config).expect("trial inputs are consistent");
    decoded.codeword != codeword
}

/// Runs independent trials until `target_errors` errors or `max_trials`.
///
/// Trial `i` uses stream `i` of `seed`; trials run in parallel batches and the
/// stopping point is the exact trial at which the target is reached, so the
/// estimate does not depend on the thread count.
pub fn estimate_cep<T: Real>(
    code: &CodeSpec,
    config: &DecoderConfig,
    rho: SnrLinear<T>,
    run: CepRun,
) -> CepEstimate {
    let mut errors = 0u64;
    let mut trials = 0u64;
    while trials < run.max_trials {
        let end = (trials + BATCH).min(run.max_trials);
        let outcomes: Vec<bool> = (trials..end)
            .into_par_iter()
            .map(|t| run_trial(code, config, rho, run.seed, t))
            .collect();
        for failed in outcomes {
            trials += 1;
            errors += failed as u64;
            if run.target_errors.is_some_and(|target| errors >= target) {
                return CepEstimate::from_counts(errors, trials);
            }
        }
    }
    CepEstimate::from_counts(errors, trials)
}
