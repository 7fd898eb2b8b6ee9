//! Binary BCH codes: generator polynomials, cyclic and extended generator matrices.

use super::bitmatrix::BitMatrix;
use super::gf::FieldTables;
use super::{CodeParent, CodeSpec};
use crate::error::{Error, Result};

/// Polynomial over GF(2); `coeffs[i]` is the coefficient of `x^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Poly {
    coeffs: Vec<u8>,
}

impl Gf2Poly {
    pub fn from_coeffs(mut coeffs: Vec<u8>) -> Self {
        for c in coeffs.iter_mut() {
            *c &= 1;
        }
        while coeffs.len() > 1 && coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0);
        }
        Self { coeffs }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1] }
    }

    /// `x^n + 1`.
    pub fn x_pow_plus_one(n: usize) -> Self {
        let mut coeffs = vec![0; n + 1];
        coeffs[0] = 1;
        coeffs[n] = 1;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0]
    }

    pub fn mul(&self, rhs: &Gf2Poly) -> Gf2Poly {
        let mut out = vec![0u8; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 1 {
                for (j, &b) in rhs.coeffs.iter().enumerate() {
                    out[i + j] ^= b;
                }
            }
        }
        Gf2Poly::from_coeffs(out)
    }

    /// Remainder of division by a nonzero polynomial.
    pub fn rem(&self, divisor: &Gf2Poly) -> Gf2Poly {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let d = divisor.degree();
        let mut r = self.coeffs.clone();
        while r.len() > d {
            let top = r.len() - 1;
            if r[top] == 1 {
                let shift = top - d;
                for (j, &b) in divisor.coeffs.iter().enumerate() {
                    r[shift + j] ^= b;
                }
            }
            r.pop();
        }
        Gf2Poly::from_coeffs(r)
    }
}

/// Cyclotomic coset of `i` modulo `2^m − 1`.
pub fn cyclotomic_coset(i: usize, order: usize) -> Vec<usize> {
    let mut coset = vec![i % order];
    let mut j = (2 * i) % order;
    while j != coset[0] {
        coset.push(j);
        j = (2 * j) % order;
    }
    coset
}

/// Minimal polynomial of `α^i`, `∏ (x + α^j)` over its coset.
pub fn minimal_polynomial(field: &FieldTables, i: usize) -> Gf2Poly {
    let coset = cyclotomic_coset(i, field.order());
    let mut poly: Vec<u16> = vec![1];
    for &j in &coset {
        let root = field.alpha_pow(j as i64);
        let mut next = vec![0u16; poly.len() + 1];
        for (d, &c) in poly.iter().enumerate() {
            next[d + 1] ^= c;
            next[d] ^= field.mul(c, root);
        }
        poly = next;
    }
    debug_assert!(poly.iter().all(|&c| c <= 1), "minimal polynomial not binary");
    Gf2Poly::from_coeffs(poly.into_iter().map(|c| c as u8).collect())
}

/// Generator of the narrow-sense binary BCH code of length `2^m − 1` and
/// designed capability `t`: the LCM of the minimal polynomials of `α, …, α^{2t}`.
pub fn bch_generator(field: &FieldTables, t: usize) -> Result<Gf2Poly> {
    if t == 0 {
        return Err(Error::domain("designed capability t must be >= 1"));
    }
    let n = field.order();
    let mut seen = vec![false; n];
    let mut g = Gf2Poly::one();
    for i in 1..=2 * t {
        let i = i % n;
        if seen[i] {
            continue;
        }
        for j in cyclotomic_coset(i, n) {
            seen[j] = true;
        }
        g = g.mul(&minimal_polynomial(field, i));
        if g.degree() >= n {
            break;
        }
    }
    if g.degree() >= n {
        return Err(Error::infeasible(format!(
            "t = {t} leaves no information bits at length {n}"
        )));
    }
    Ok(g)
}

/// Cyclic code with generator rows `x^i·g(x)`, `i = 0..k`.
pub fn cyclic_code(n: usize, g: &Gf2Poly, parent: Option<CodeParent>) -> Result<CodeSpec> {
    let deg = g.degree();
    if deg >= n {
        return Err(Error::infeasible("generator degree leaves no information bits"));
    }
    if !Gf2Poly::x_pow_plus_one(n).rem(g).is_zero() {
        return Err(Error::invalid("generator does not divide x^n + 1"));
    }
    let k = n - deg;
    let mut gm = BitMatrix::zeros(k, n);
    for r in 0..k {
        for (d, &c) in g.coeffs().iter().enumerate() {
            if c == 1 {
                gm.set(r, r + d, true);
            }
        }
    }
    CodeSpec::new(gm, parent)
}

/// Binary BCH code of length `2^m − 1` with designed capability `t`.
pub fn bch_code(m: u32, t: usize) -> Result<CodeSpec> {
    let field = FieldTables::new(m)?;
    let g = bch_generator(&field, t)?;
    cyclic_code(
        field.order(),
        &g,
        Some(CodeParent {
            m,
            t,
            extended: false,
        }),
    )
}

/// Appends an overall even-parity column.
pub fn extend_code(code: &CodeSpec) -> CodeSpec {
    let (n, k) = (code.n(), code.k());
    let mut gm = BitMatrix::zeros(k, n + 1);
    for r in 0..k {
        let mut parity = false;
        for c in 0..n {
            let b = code.generator().get(r, c);
            gm.set(r, c, b);
            parity ^= b;
        }
        gm.set(r, n, parity);
    }
    let parent = code.parent().map(|p| CodeParent {
        extended: true,
        ..p
    });
    CodeSpec::new(gm, parent).expect("extension preserves rank")
}

/// Extended BCH code of length `2^m`.
pub fn extended_bch(m: u32, t: usize) -> Result<CodeSpec> {
    Ok(extend_code(&bch_code(m, t)?))
}
