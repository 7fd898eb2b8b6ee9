//! Reliability ordering and the most reliable basis.

use super::{OpCounter, OpKind};
use crate::codec::bitmatrix::{get_bit, BitMatrix};
use crate::codec::CodeSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Indices sorted by descending `|y_i|`; equal magnitudes keep index order.
pub fn reliability_permutation<T: Real>(y: &[T]) -> Vec<usize> {
    reliability_permutation_counted(y, &mut super::NoCount)
}

pub fn reliability_permutation_counted<T: Real, C: OpCounter>(y: &[T], ops: &mut C) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..y.len()).collect();
    let mut comparisons = 0u64;
    idx.sort_by(|&a, &b| {
        comparisons += 1;
        y[b].abs()
            .partial_cmp(&y[a].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    ops.add(OpKind::Sort, comparisons);
    idx
}

pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Systematic generator on the `k` most reliable independent positions.
#[derive(Clone, Debug)]
pub struct MostReliableBasis {
    /// `permutation[j]` is the original position placed at slot `j`; the
    /// first `k` slots form the basis.
    permutation: Vec<usize>,
    /// Row-reduced generator in original column order: row `i` has a single
    /// one among the basis columns, at `permutation[i]`.
    g_sys: BitMatrix,
    swap_count: usize,
}

impl MostReliableBasis {
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn basis_positions(&self) -> &[usize] {
        &self.permutation[..self.g_sys.rows()]
    }

    pub fn g_sys(&self) -> &BitMatrix {
        &self.g_sys
    }

    pub fn swap_count(&self) -> usize {
        self.swap_count
    }

    /// `G_sys` with columns in slot order, so its leading `k×k` block is the identity.
    pub fn permuted_generator(&self) -> BitMatrix {
        self.g_sys.permute_columns(&self.permutation)
    }
}

pub fn systematize(code: &CodeSpec, permutation: &[usize]) -> Result<MostReliableBasis> {
    systematize_counted(code, permutation, &mut super::NoCount)
}

/// Gauss-Jordan elimination over the columns in `permutation` order. A column
/// that depends on the pivots found so far is swapped with the next
/// independent one.
pub fn systematize_counted<C: OpCounter>(
    code: &CodeSpec,
    permutation: &[usize],
    ops: &mut C,
) -> Result<MostReliableBasis> {
    let (n, k) = (code.n(), code.k());
    if permutation.len() != n {
        return Err(Error::domain(format!(
            "permutation has {} entries, code length is {n}",
            permutation.len()
        )));
    }
    let mut g = code.generator().clone();
    let mut perm = permutation.to_vec();
    let mut pivot = vec![0u64; g.stride()];
    let mut rank = 0;
    let mut swaps = 0;
    let mut slot = 0;
    while rank < k {
        if slot == n {
            return Err(Error::invalid("generator matrix is rank deficient"));
        }
        let col = perm[slot];
        let Some(r) = (rank..k).find(|&r| g.get(r, col)) else {
            slot += 1;
            continue;
        };
        g.swap_rows(rank, r);
        pivot.copy_from_slice(g.row(rank));
        for other in (0..k).filter(|&o| o != rank) {
            let row = g.row_mut(other);
            let mask = (get_bit(row, col) as u64).wrapping_neg();
            for (w, p) in row.iter_mut().zip(&pivot) {
                *w ^= p & mask;
            }
        }
        ops.add(OpKind::Elimination, ((k - 1) * n) as u64);
        if slot != rank {
            perm.swap(rank, slot);
            swaps += 1;
        }
        rank += 1;
        slot += 1;
    }
    Ok(MostReliableBasis {
        permutation: perm,
        g_sys: g,
        swap_count: swaps,
    })
}
