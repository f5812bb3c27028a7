//! Plain-text frame files and `key: value` configs.
//!
//! ```text
//! # two vectors in C^2 with J = diag(1, -1)
//! dim 2
//! J
//! 1 0
//! 0 -1
//! vectors 2
//! 1 0  0 0
//! 0 0  1 0
//! ```
//!
//! Vector rows interleave real and imaginary parts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{KreinError, Result};
use crate::frame::fmt_f64;
use crate::krein::{KVector, SignatureSpace};
use crate::linalg::{CMatrix, CVector, C64};

#[derive(Debug, Clone)]
pub struct FrameFile {
    pub space: SignatureSpace,
    pub vectors: Vec<KVector>,
}

fn parse_err(line: usize, message: impl Into<String>) -> KreinError {
    KreinError::Parse { line, message: message.into() }
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn numbers(line_no: usize, line: &str, expected: usize) -> Result<Vec<f64>> {
    let vals = line
        .split_whitespace()
        .map(|tok| tok.parse::<f64>().map_err(|_| parse_err(line_no, format!("not a number: '{tok}'"))))
        .collect::<Result<Vec<f64>>>()?;
    if vals.len() != expected {
        return Err(parse_err(line_no, format!("expected {expected} numbers, found {}", vals.len())));
    }
    if let Some(v) = vals.iter().find(|v| !v.is_finite()) {
        return Err(parse_err(line_no, format!("non-finite value {v}")));
    }
    Ok(vals)
}

fn header(line_no: usize, line: &str, key: &str) -> Result<usize> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(key) {
        return Err(parse_err(line_no, format!("expected '{key} <count>', found '{line}'")));
    }
    let n = parts
        .next()
        .and_then(|t| t.parse::<usize>().ok())
        .ok_or_else(|| parse_err(line_no, format!("'{key}' needs a non-negative integer")))?;
    if parts.next().is_some() {
        return Err(parse_err(line_no, format!("trailing tokens after '{key} {n}'")));
    }
    Ok(n)
}

pub fn parse_frame_file(text: &str) -> Result<FrameFile> {
    let mut lines = content_lines(text);
    let mut next = |what: &str| lines.next().ok_or_else(|| parse_err(0, format!("unexpected end of file, expected {what}")));

    let (ln, line) = next("'dim <n>'")?;
    let dim = header(ln, line, "dim")?;
    if dim == 0 {
        return Err(parse_err(ln, "dim must be positive"));
    }

    let (j_line, line) = next("'J'")?;
    if line != "J" {
        return Err(parse_err(j_line, format!("expected 'J', found '{line}'")));
    }
    let mut j = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        let (ln, line) = next("a row of J")?;
        for (c, v) in numbers(ln, line, dim)?.into_iter().enumerate() {
            j[(r, c)] = C64::new(v, 0.0);
        }
    }
    let space = SignatureSpace::new(j).map_err(|e| parse_err(j_line, format!("invalid J: {e}")))?;

    let (ln, line) = next("'vectors <m>'")?;
    let m = header(ln, line, "vectors")?;
    let mut vectors = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = next("a vector row")?;
        let vals = numbers(ln, line, 2 * dim)?;
        let v = CVector::from_iterator(dim, vals.chunks(2).map(|p| C64::new(p[0], p[1])));
        vectors.push(KVector::new(v));
    }
    if let Some((ln, line)) = lines.next() {
        return Err(parse_err(ln, format!("unexpected content after the last vector: '{line}'")));
    }
    Ok(FrameFile { space, vectors })
}

pub fn write_frame_file(space: &SignatureSpace, vectors: &[KVector], comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(comment) = comment {
        for l in comment.lines() {
            let _ = writeln!(out, "# {l}");
        }
    }
    let n = space.dim();
    let _ = writeln!(out, "dim {n}");
    out.push_str("J\n");
    for r in 0..n {
        let row: Vec<String> = (0..n).map(|c| fmt_f64(space.j()[(r, c)].re)).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    let _ = writeln!(out, "vectors {}", vectors.len());
    for v in vectors {
        let row: Vec<String> = v.coords().iter().flat_map(|z| [fmt_f64(z.re), fmt_f64(z.im)]).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// `key: value` lines; later keys override earlier ones.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (ln, line) in content_lines(text) {
        let (k, v) = line
            .split_once(':')
            .ok_or_else(|| parse_err(ln, format!("expected 'key: value', found '{line}'")))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(parse_err(ln, "empty key"));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}
