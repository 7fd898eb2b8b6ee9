//! Order-s reprocessing over the most reliable basis.

use super::mrb::{reliability_permutation_counted, systematize_counted, MostReliableBasis};
use super::{DecoderConfig, Metric, OpCounter, OpKind, Reprocessing};
use crate::codec::bitmatrix::{get_bit, set_bit, words_for, xor_into};
use crate::codec::{unpack_bits, CodeSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct Decoded<T> {
    /// Information bits of the selected codeword.
    pub message: Vec<u8>,
    /// Selected codeword, packed, original position order.
    pub codeword: Vec<u64>,
    /// Score of the selected codeword under the configured metric.
    pub discrepancy: T,
    /// Enumeration index of the winning test error pattern.
    pub pattern_index: usize,
    /// Dependent-column swaps made while forming the basis.
    pub swap_count: usize,
}

/// Calls `visit` on every weight-`≤ s` subset of `0..k`: by weight, then
/// lexicographically. `visit` returns `false` to stop.
pub fn for_each_pattern(k: usize, s: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    for w in 0..=s.min(k) {
        let mut idx: Vec<usize> = (0..w).collect();
        loop {
            if !visit(&idx) {
                return;
            }
            let Some(i) = (0..w).rev().find(|&i| idx[i] < k - w + i) else {
                break;
            };
            idx[i] += 1;
            for j in i + 1..w {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}

pub fn decode<T: Real>(y: &[T], code: &CodeSpec, config: &DecoderConfig) -> Result<Decoded<T>> {
    decode_counted(y, code, config, &mut super::NoCount)
}

/// [`decode`] that reports binary operations to `ops`.
pub fn decode_counted<T: Real, C: OpCounter>(
    y: &[T],
    code: &CodeSpec,
    config: &DecoderConfig,
    ops: &mut C,
) -> Result<Decoded<T>> {
    let (n, k) = (code.n(), code.k());
    if y.len() != n {
        return Err(Error::domain(format!(
            "received vector has {} entries, code length is {n}",
            y.len()
        )));
    }
    if config.s > k {
        return Err(Error::domain(format!("order {} exceeds k = {k}", config.s)));
    }
    let perm = reliability_permutation_counted(y, ops);
    let mrb = systematize_counted(code, &perm, ops)?;
    let scorer = Scorer::new(y, config.metric, config.q as u64);

    let (mut best, mut best_disc, mut best_index) = (Vec::new(), T::infinity(), 0usize);
    match config.reprocessing {
        Reprocessing::Exhaustive => {
            let basis_hard = basis_hard_bits(&mrb, &scorer.hard, k);
            let mut info = vec![0u64; words_for(k)];
            let mut index = 0;
            for_each_pattern(k, config.s, |pattern| {
                info.copy_from_slice(&basis_hard);
                for &i in pattern {
                    info[i >> 6] ^= 1u64 << (i & 63);
                }
                let c = reencode(&mrb, &info, ops);
                let d = scorer.score(&c, ops);
                if d < best_disc {
                    best_disc = d;
                    best = c;
                    best_index = index;
                }
                index += 1;
                true
            });
        }
        Reprocessing::Fast => {
            let basis_hard = basis_hard_bits(&mrb, &scorer.hard, k);
            let base = mrb.g_sys().left_mul_packed(&basis_hard);
            let mut c = base.clone();
            let mut index = 0;
            for_each_pattern(k, config.s, |pattern| {
                c.copy_from_slice(&base);
                for &i in pattern {
                    xor_into(&mut c, mrb.g_sys().row(i));
                }
                if let Some(d) = scorer.score_bounded(&c, best_disc) {
                    best_disc = d;
                    best.clone_from(&c);
                    best_index = index;
                }
                index += 1;
                true
            });
        }
    }
    let message = unpack_bits(&code.message_of(&best), k);
    Ok(Decoded {
        message,
        codeword: best,
        discrepancy: best_disc,
        pattern_index: best_index,
        swap_count: mrb.swap_count(),
    })
}

/// Hard decisions at the basis positions, as a packed `k`-bit vector.
fn basis_hard_bits(mrb: &MostReliableBasis, hard: &[u64], k: usize) -> Vec<u64> {
    let mut out = vec![0u64; words_for(k)];
    for (i, &p) in mrb.basis_positions().iter().enumerate() {
        if get_bit(hard, p) {
            set_bit(&mut out, i, true);
        }
    }
    out
}

/// `info · G_sys`, charging `n` operations per accumulated row.
fn reencode<C: OpCounter>(mrb: &MostReliableBasis, info: &[u64], ops: &mut C) -> Vec<u64> {
    let g = mrb.g_sys();
    let mut c = vec![0u64; g.stride()];
    let mut rows = 0u64;
    for r in 0..g.rows() {
        if get_bit(info, r) {
            xor_into(&mut c, g.row(r));
            rows += 1;
        }
    }
    ops.add(OpKind::Reprocessing, rows * g.cols() as u64);
    c
}

struct Scorer<T> {
    hard: Vec<u64>,
    weight: Vec<T>,
    q: u64,
}

impl<T: Real> Scorer<T> {
    fn new(y: &[T], metric: Metric, q: u64) -> Self {
        let mut hard = vec![0u64; words_for(y.len())];
        for (i, &v) in y.iter().enumerate() {
            if v < T::zero() {
                set_bit(&mut hard, i, true);
            }
        }
        let weight = match metric {
            Metric::Soft => y.iter().map(|v| v.abs()).collect(),
            Metric::Hamming => vec![T::one(); y.len()],
        };
        Self {
            hard,
            weight,
            q,
        }
    }

    /// Sum of weights over positions where `c` disagrees with the hard decision;
    /// each accumulation is a `q`-bit addition.
    fn score<C: OpCounter>(&self, c: &[u64], ops: &mut C) -> T {
        let mut acc = T::zero();
        let mut disagreements = 0u64;
        for (w, (&cw, &hw)) in c.iter().zip(&self.hard).enumerate() {
            let mut diff = cw ^ hw;
            while diff != 0 {
                let b = diff.trailing_zeros() as usize;
                acc += self.weight[(w << 6) + b];
                disagreements += 1;
                diff &= diff - 1;
            }
        }
        ops.add(OpKind::Reprocessing, self.q * disagreements);
        acc
    }

    /// Score if strictly below `bound`; partial sums stop at `bound`.
    fn score_bounded(&self, c: &[u64], bound: T) -> Option<T> {
        let mut acc = T::zero();
        for (w, (&cw, &hw)) in c.iter().zip(&self.hard).enumerate() {
            let mut diff = cw ^ hw;
            while diff != 0 {
                let b = diff.trailing_zeros() as usize;
                acc += self.weight[(w << 6) + b];
                if acc >= bound {
                    return None;
                }
                diff &= diff - 1;
            }
        }
        (acc < bound).then_some(acc)
    }
}
