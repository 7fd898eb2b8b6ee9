//! Plain-text code files.
//!
//! ```text
//! n k
//! <row 0 as hex>
//! ...
//! <row k-1 as hex>
//! ```
//!
//! Each hex digit carries four consecutive columns, most significant bit
//! first, so the first digit's MSB is column 0. Rows are zero-padded to a
//! multiple of four columns. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use super::bitmatrix::BitMatrix;
use super::CodeSpec;
use crate::error::{Error, Result};

pub fn write_code(code: &CodeSpec) -> String {
    let g = code.generator();
    let mut out = format!("{} {}\n", code.n(), code.k());
    for r in 0..g.rows() {
        for chunk in 0..code.n().div_ceil(4) {
            let mut digit = 0u8;
            for b in 0..4 {
                let c = 4 * chunk + b;
                if c < code.n() && g.get(r, c) {
                    digit |= 8 >> b;
                }
            }
            let _ = write!(out, "{digit:x}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_code(text: &str) -> Result<CodeSpec> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing `n k` header".into(),
    })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let parse_dim = |s: &str| {
        s.parse::<usize>().map_err(|e| Error::Parse {
            line: hline,
            msg: format!("bad dimension `{s}`: {e}"),
        })
    };
    if dims.len() != 2 {
        return Err(Error::Parse {
            line: hline,
            msg: "header must be `n k`".into(),
        });
    }
    let (n, k) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
    let digits = n.div_ceil(4);
    let mut g = BitMatrix::zeros(k, n);
    for r in 0..k {
        let (line, row) = lines.next().ok_or(Error::Parse {
            line: hline + r + 1,
            msg: format!("expected {k} rows, found {r}"),
        })?;
        if row.len() != digits {
            return Err(Error::Parse {
                line,
                msg: format!("row must have {digits} hex digits, found {}", row.len()),
            });
        }
        for (chunk, ch) in row.chars().enumerate() {
            let d = ch.to_digit(16).ok_or_else(|| Error::Parse {
                line,
                msg: format!("`{ch}` is not a hex digit"),
            })?;
            for b in 0..4 {
                let c = 4 * chunk + b;
                let bit = (d >> (3 - b)) & 1 == 1;
                if c >= n {
                    if bit {
                        return Err(Error::Parse {
                            line,
                            msg: "padding bits must be zero".into(),
                        });
                    }
                } else {
                    g.set(r, c, bit);
                }
            }
        }
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse {
            line,
            msg: "unexpected trailing content".into(),
        });
    }
    CodeSpec::new(g, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::extended_bch;

    #[test]
    fn round_trip() {
        for (m, t) in [(3, 1), (7, 10)] {
            let code = extended_bch(m, t).unwrap();
            let text = write_code(&code);
            let back = parse_code(&text).unwrap();
            assert_eq!(back.generator(), code.generator());
        }
    }

    #[test]
    fn digit_layout() {
        let g = BitMatrix::from_bit_rows(5, &[vec![1, 0, 0, 1, 1]]);
        let code = CodeSpec::new(g, None).unwrap();
        assert_eq!(write_code(&code), "5 1\n98\n");
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_code(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_code("4 1\nzz\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_code("4 2\n9\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_code("5 1\n99\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_code("4 1\n9\n9\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_code("4 2\n9\n9\n"), Err(Error::Invalid(_))));
    }
}
