//! GF(2^m) arithmetic with log/antilog tables.

use crate::error::{Error, Result};

/// Default primitive polynomials, bit-encoded (`0b1011` is `x³ + x + 1`).
const PRIMITIVE_POLYS: [u32; 15] = [
    0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003,
    0x1100B,
];

pub const MIN_DEGREE: u32 = 2;
pub const MAX_DEGREE: u32 = 16;

/// Default primitive polynomial for GF(2^m).
pub fn default_primitive_poly(m: u32) -> Option<u32> {
    (MIN_DEGREE..=MAX_DEGREE)
        .contains(&m)
        .then(|| PRIMITIVE_POLYS[(m - MIN_DEGREE) as usize])
}

#[derive(Clone, Debug)]
pub struct FieldTables {
    m: u32,
    primitive_poly: u32,
    /// `antilog[i] = α^i`, doubled so products need no reduction.
    antilog: Vec<u16>,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u32>,
}

impl FieldTables {
    /// Field built from the default primitive polynomial.
    pub fn new(m: u32) -> Result<Self> {
        let poly = default_primitive_poly(m)
            .ok_or_else(|| Error::domain(format!("extension degree must be in 2..=16, got {m}")))?;
        Self::with_poly(m, poly)
    }

    /// Field built from a caller-supplied polynomial; rejected unless primitive.
    pub fn with_poly(m: u32, primitive_poly: u32) -> Result<Self> {
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&m) {
            return Err(Error::domain(format!("extension degree must be in 2..=16, got {m}")));
        }
        if primitive_poly >> m != 1 {
            return Err(Error::invalid(format!(
                "polynomial {primitive_poly:#x} does not have degree {m}"
            )));
        }
        let size = 1usize << m;
        let order = size - 1;
        let mut antilog = vec![0u16; 2 * order];
        let mut log = vec![0u32; size];
        let mut x: u32 = 1;
        for i in 0..order {
            if i > 0 && x == 1 {
                return Err(Error::invalid(format!(
                    "polynomial {primitive_poly:#x} is not primitive: α has order {i}"
                )));
            }
            antilog[i] = x as u16;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= primitive_poly;
            }
        }
        if x != 1 {
            return Err(Error::invalid(format!(
                "polynomial {primitive_poly:#x} is not primitive"
            )));
        }
        for i in 0..order {
            antilog[order + i] = antilog[i];
        }
        Ok(Self {
            m,
            primitive_poly,
            antilog,
            log,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// `2^m − 1`.
    pub fn order(&self) -> usize {
        (1usize << self.m) - 1
    }

    /// `α^i` for any integer exponent.
    pub fn alpha_pow(&self, i: i64) -> u16 {
        let ord = self.order() as i64;
        self.antilog[i.rem_euclid(ord) as usize]
    }

    /// Discrete log of a nonzero element.
    pub fn log(&self, x: u16) -> Option<u32> {
        (x != 0 && (x as usize) < self.log.len()).then(|| self.log[x as usize])
    }

    pub fn antilog(&self, i: usize) -> u16 {
        self.antilog[i % self.order()]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.antilog[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: u16) -> Option<u16> {
        let l = self.log(a)?;
        Some(self.antilog[(self.order() - l as usize) % self.order()])
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: u16) -> Option<usize> {
        let l = self.log(a)? as usize;
        let ord = self.order();
        Some(ord / gcd(ord, l))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn build_field(m: u32) -> Result<FieldTables> {
    FieldTables::new(m)
}
