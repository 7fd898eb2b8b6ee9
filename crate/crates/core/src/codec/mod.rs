//! Binary linear block codes: field arithmetic, BCH construction, encoding,
//! BPSK mapping and the BI-AWGN channel.

pub mod bch;
pub mod bitmatrix;
pub mod channel;
pub mod format;
pub mod gf;

pub use bch::{bch_code, bch_generator, extend_code, extended_bch, Gf2Poly};
pub use bitmatrix::{pack_bits, unpack_bits, BitMatrix};
pub use channel::{hard_decision, modulate, transmit, transmit_seeded};
pub use format::{parse_code, write_code};
pub use gf::{build_field, FieldTables};

use crate::error::{Error, Result};
use bitmatrix::{get_bit, set_bit, words_for};

/// Origin of a constructed code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodeParent {
    pub m: u32,
    /// Designed error-correcting capability.
    pub t: usize,
    pub extended: bool,
}

/// Binary linear `(n, k)` code given by a full-rank generator matrix.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    n: usize,
    k: usize,
    generator: BitMatrix,
    parent: Option<CodeParent>,
    /// `k` columns on which `G` is invertible.
    info_set: Vec<usize>,
    /// Inverse of `G` restricted to `info_set`.
    recovery: BitMatrix,
}

impl CodeSpec {
    /// Validates that `generator` has full row rank.
    pub fn new(generator: BitMatrix, parent: Option<CodeParent>) -> Result<Self> {
        let (k, n) = (generator.rows(), generator.cols());
        if k == 0 || k > n {
            return Err(Error::invalid(format!("need 1 <= k <= n, got k={k}, n={n}")));
        }
        let mut reduced = generator.clone();
        let info_set = reduced.reduce();
        if info_set.len() != k {
            return Err(Error::invalid(format!(
                "generator rank {} is below k = {k}",
                info_set.len()
            )));
        }
        let recovery = generator
            .select_columns(&info_set)
            .inverse()
            .expect("pivot columns are independent");
        Ok(Self {
            n,
            k,
            generator,
            parent,
            info_set,
            recovery,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn parent(&self) -> Option<CodeParent> {
        self.parent
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k {
            return Err(Error::domain(format!(
                "message has {} bits, code dimension is {}",
                message.len(),
                self.k
            )));
        }
        Ok(unpack_bits(&self.encode_packed(&pack_bits(message)), self.n))
    }

    /// `message · G` on packed words.
    pub fn encode_packed(&self, message: &[u64]) -> Vec<u64> {
        self.generator.left_mul_packed(message)
    }

    /// Message of a codeword (packed); meaningful only for codewords.
    pub fn message_of(&self, codeword: &[u64]) -> Vec<u64> {
        let mut restricted = vec![0u64; words_for(self.k)];
        for (i, &c) in self.info_set.iter().enumerate() {
            if get_bit(codeword, c) {
                set_bit(&mut restricted, i, true);
            }
        }
        self.recovery.left_mul_packed(&restricted)
    }

    /// Membership test for a packed word.
    pub fn contains(&self, word: &[u64]) -> bool {
        self.encode_packed(&self.message_of(word)) == word
    }
}
