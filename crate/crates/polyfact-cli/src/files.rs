//! Text file formats for matrix polynomials and Jordan data.
//!
//! Both formats are whitespace-insensitive keyword streams; everything from
//! `#` to the end of a line is a comment. Numbers are decimal floating-point
//! literals (scientific notation allowed).
//!
//! Polynomial file:
//!
//! ```text
//! # optional comments
//! n 2
//! degree 2
//! kind Q          # optional: Q or G
//! coeff 0
//! 1 0
//! 0 1
//! coeff 1
//! 2 -3
//! -3 4
//! coeff 2
//! 2 -4
//! -4 8
//! ```
//!
//! `n` and `degree` must appear before the first `coeff`; the `coeff i`
//! blocks list the coefficient of `x^i` as `n` rows of `n` numbers and must
//! appear in ascending order, one block per index `0..=degree`.
//!
//! Jordan data file (for the `--jordan` option of `factor`):
//!
//! ```text
//! n 1
//! m 2
//! s
//! -1 0 -1 -2
//!  1 1  2  4
//!  1 1  1  3
//!  1 0  0  0
//! block real -1 4 0
//! ```
//!
//! `s` is the `2nm x 2nm` transformation matrix, row-major. Each `block`
//! line is either `block real <lambda> <size> <col_start>` or
//! `block complex <alpha> <beta> <size> <col_start>`, with `col_start` the
//! 0-based first column of the block in `s`; blocks must tile the columns in
//! order. Writers emit 17 significant digits so a write/read round trip is
//! exact.

use polyfact::eigenstructure::{JordanBlockDesc, JordanBlockKind, RealJordanData};
use polyfact::MatPoly;

use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyKind {
    Q,
    G,
}

#[derive(Debug, Clone)]
pub struct PolyFile {
    pub poly: MatPoly,
    pub kind: Option<PolyKind>,
}

struct Tokens<'a> {
    items: Vec<&'a str>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .map(|line| line.split('#').next().unwrap_or(""))
            .flat_map(|line| line.split_whitespace())
            .collect();
        Tokens { items, pos: 0 }
    }

    fn peek(&self) -> Option<&'a str> {
        self.items.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<&'a str> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_usize(&mut self, what: &str) -> Result<usize, String> {
        let t = self
            .next()
            .ok_or_else(|| format!("unexpected end of file, expected {what}"))?;
        t.parse::<usize>()
            .map_err(|_| format!("expected {what}, found '{t}'"))
    }

    fn expect_f64(&mut self, what: &str) -> Result<f64, String> {
        let t = self
            .next()
            .ok_or_else(|| format!("unexpected end of file, expected {what}"))?;
        t.parse::<f64>()
            .map_err(|_| format!("expected {what}, found '{t}'"))
    }
}

pub fn parse_poly(text: &str) -> Result<PolyFile, String> {
    let mut tokens = Tokens::new(text);
    let mut n: Option<usize> = None;
    let mut degree: Option<usize> = None;
    let mut kind: Option<PolyKind> = None;
    let mut coeffs: Vec<DMatrix<f64>> = Vec::new();

    while let Some(tok) = tokens.next() {
        match tok {
            "n" => n = Some(tokens.expect_usize("matrix dimension after 'n'")?),
            "degree" => degree = Some(tokens.expect_usize("degree after 'degree'")?),
            "kind" => {
                kind = Some(match tokens.next() {
                    Some("Q") => PolyKind::Q,
                    Some("G") => PolyKind::G,
                    other => return Err(format!("kind must be Q or G, found {other:?}")),
                })
            }
            "coeff" => {
                let n = n.ok_or("'coeff' before 'n'")?;
                let degree = degree.ok_or("'coeff' before 'degree'")?;
                let idx = tokens.expect_usize("coefficient index after 'coeff'")?;
                if idx != coeffs.len() {
                    return Err(format!(
                        "coefficient index {idx} out of order (expected {})",
                        coeffs.len()
                    ));
                }
                if idx > degree {
                    return Err(format!("coefficient index {idx} exceeds degree {degree}"));
                }
                let mut vals = Vec::with_capacity(n * n);
                for _ in 0..n * n {
                    vals.push(tokens.expect_f64("matrix entry")?);
                }
                coeffs.push(DMatrix::from_row_slice(n, n, &vals));
            }
            other => return Err(format!("unexpected token '{other}'")),
        }
    }

    let n = n.ok_or("missing 'n'")?;
    let degree = degree.ok_or("missing 'degree'")?;
    if coeffs.len() != degree + 1 {
        return Err(format!(
            "expected {} coefficient blocks for degree {degree}, found {}",
            degree + 1,
            coeffs.len()
        ));
    }
    let poly = MatPoly::new(coeffs).map_err(|e| e.to_string())?;
    debug_assert_eq!(poly.dim(), n);
    Ok(PolyFile { poly, kind })
}

/// Serialize with 17 significant digits (shortest double round trip).
pub fn write_poly(poly: &MatPoly, kind: Option<PolyKind>) -> String {
    let mut out = String::new();
    out.push_str(&format!("n {}\n", poly.dim()));
    out.push_str(&format!("degree {}\n", poly.degree()));
    if let Some(k) = kind {
        out.push_str(&format!(
            "kind {}\n",
            match k {
                PolyKind::Q => "Q",
                PolyKind::G => "G",
            }
        ));
    }
    for (i, c) in poly.coeffs().iter().enumerate() {
        out.push_str(&format!("coeff {i}\n"));
        for r in 0..poly.dim() {
            let row: Vec<String> = (0..poly.dim()).map(|j| format!("{:.16e}", c[(r, j)])).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

pub fn parse_jordan(text: &str) -> Result<RealJordanData, String> {
    let mut tokens = Tokens::new(text);
    let mut n: Option<usize> = None;
    let mut m: Option<usize> = None;
    let mut s: Option<DMatrix<f64>> = None;
    let mut blocks: Vec<JordanBlockDesc> = Vec::new();

    while let Some(tok) = tokens.next() {
        match tok {
            "n" => n = Some(tokens.expect_usize("dimension after 'n'")?),
            "m" => m = Some(tokens.expect_usize("half-degree after 'm'")?),
            "s" => {
                let n = n.ok_or("'s' before 'n'")?;
                let m = m.ok_or("'s' before 'm'")?;
                let size = 2 * n * m;
                let mut vals = Vec::with_capacity(size * size);
                for _ in 0..size * size {
                    vals.push(tokens.expect_f64("entry of S")?);
                }
                s = Some(DMatrix::from_row_slice(size, size, &vals));
            }
            "block" => {
                let kind = match tokens.next() {
                    Some("real") => {
                        let lambda = tokens.expect_f64("lambda")?;
                        JordanBlockKind::Real { lambda }
                    }
                    Some("complex") => {
                        let alpha = tokens.expect_f64("alpha")?;
                        let beta = tokens.expect_f64("beta")?;
                        JordanBlockKind::ComplexPair { alpha, beta }
                    }
                    other => return Err(format!("block kind must be real or complex, found {other:?}")),
                };
                let size = tokens.expect_usize("block size")?;
                let col_start = tokens.expect_usize("block col_start")?;
                blocks.push(JordanBlockDesc {
                    kind,
                    size,
                    col_start,
                });
            }
            other => return Err(format!("unexpected token '{other}'")),
        }
    }

    let s = s.ok_or("missing 's' matrix")?;
    RealJordanData::new(s, blocks).map_err(|e| e.to_string())
}
