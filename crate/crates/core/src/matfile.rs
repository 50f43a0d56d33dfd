//! Plain-text exchange format for MDS generators and CSS parity checks.
//!
//! ```text
//! # comments and blank lines are ignored
//! mds n=3 k=2 alpha=2 q=5
//! matrix gamma0 2 4
//! 1 0 0 0
//! 0 1 0 0
//! matrix gamma1 2 4
//! ...
//! ```
//!
//! CSS files use the header `css alpha=<a> k=<k> q=<q> beta=<b> r_z=<r>` followed
//! by the matrices `h_z` and `h_x`. Entries are exact integers in `[0, q)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::css::{CssCode, CssError};
use crate::field::{FieldError, FieldMatrix, PrimeField};
use crate::mds::{MdsCode, MdsError};

#[derive(Debug, Error)]
pub enum MatFileError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("header mismatch: {0}")]
    Header(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Mds(#[from] MdsError),
    #[error(transparent)]
    Css(#[from] CssError),
}

struct Parsed {
    kind: String,
    header: BTreeMap<String, u64>,
    matrices: Vec<(String, usize, usize, Vec<u32>)>,
}

fn write_matrix(out: &mut String, name: &str, m: &FieldMatrix) {
    writeln!(out, "matrix {name} {} {}", m.rows(), m.cols()).unwrap();
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(u32::to_string).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
}

pub fn write_mds(code: &MdsCode) -> String {
    let mut out = String::new();
    writeln!(out, "mds n={} k={} alpha={} q={}", code.n(), code.k(), code.alpha(), code.q()).unwrap();
    for (i, g) in code.generators().iter().enumerate() {
        write_matrix(&mut out, &format!("gamma{i}"), g);
    }
    out
}

pub fn write_css(code: &CssCode) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "css alpha={} k={} q={} beta={} r_z={}",
        code.alpha(),
        code.k(),
        code.q(),
        code.beta(),
        code.r_z()
    )
    .unwrap();
    write_matrix(&mut out, "h_z", code.h_z());
    write_matrix(&mut out, "h_x", code.h_x());
    out
}

fn parse(text: &str) -> Result<Parsed, MatFileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    let (hline, header_text) = lines.next().ok_or(MatFileError::Parse { line: 0, msg: "empty file".into() })?;
    let mut parts = header_text.split_whitespace();
    let kind = parts.next().unwrap_or_default().to_string();
    let mut header = BTreeMap::new();
    for kv in parts {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| MatFileError::Parse { line: hline, msg: format!("expected key=value, got `{kv}`") })?;
        let v = v
            .parse()
            .map_err(|_| MatFileError::Parse { line: hline, msg: format!("bad integer in `{kv}`") })?;
        header.insert(k.to_string(), v);
    }
    let mut matrices = Vec::new();
    while let Some((line, l)) = lines.next() {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let bad = |msg: String| MatFileError::Parse { line, msg };
        if toks.len() != 4 || toks[0] != "matrix" {
            return Err(bad(format!("expected `matrix <name> <rows> <cols>`, got `{l}`")));
        }
        let rows: usize = toks[2].parse().map_err(|_| bad("bad row count".into()))?;
        let cols: usize = toks[3].parse().map_err(|_| bad("bad column count".into()))?;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (rl, row) = lines
                .next()
                .ok_or_else(|| MatFileError::Parse { line, msg: format!("matrix {} is truncated", toks[1]) })?;
            let vals = row
                .split_whitespace()
                .map(str::parse::<u32>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| MatFileError::Parse { line: rl, msg: "bad matrix entry".into() })?;
            if vals.len() != cols {
                return Err(MatFileError::Parse { line: rl, msg: format!("expected {cols} entries, got {}", vals.len()) });
            }
            data.extend(vals);
        }
        matrices.push((toks[1].to_string(), rows, cols, data));
    }
    Ok(Parsed { kind, header, matrices })
}

fn get(h: &BTreeMap<String, u64>, key: &str) -> Result<u64, MatFileError> {
    h.get(key).copied().ok_or_else(|| MatFileError::Header(format!("missing `{key}`")))
}

fn to_matrix(field: PrimeField, (_, rows, cols, data): &(String, usize, usize, Vec<u32>)) -> Result<FieldMatrix, MatFileError> {
    let q = field.modulus();
    if let Some(e) = data.iter().find(|&&e| e >= q) {
        return Err(MatFileError::Header(format!("entry {e} is not reduced mod {q}")));
    }
    Ok(FieldMatrix::from_vec(field, *rows, *cols, data.clone())?)
}

/// Parses an MDS file; the MDS property is checked on load.
pub fn read_mds(text: &str) -> Result<MdsCode, MatFileError> {
    let p = parse(text)?;
    if p.kind != "mds" {
        return Err(MatFileError::Header(format!("expected an `mds` file, got `{}`", p.kind)));
    }
    let field = PrimeField::new(get(&p.header, "q")? as u32)?;
    let gens = p.matrices.iter().map(|m| to_matrix(field, m)).collect::<Result<Vec<_>, _>>()?;
    let code = MdsCode::load_generators(gens)?;
    let (n, k, alpha) = (get(&p.header, "n")?, get(&p.header, "k")?, get(&p.header, "alpha")?);
    if (n, k, alpha) != (code.n() as u64, code.k() as u64, code.alpha() as u64) {
        return Err(MatFileError::Header(format!(
            "header says n={n} k={k} alpha={alpha}, matrices give n={} k={} alpha={}",
            code.n(),
            code.k(),
            code.alpha()
        )));
    }
    Ok(code)
}

/// Parses a CSS file; the code is validated on load.
pub fn read_css(text: &str) -> Result<CssCode, MatFileError> {
    let p = parse(text)?;
    if p.kind != "css" {
        return Err(MatFileError::Header(format!("expected a `css` file, got `{}`", p.kind)));
    }
    let field = PrimeField::new(get(&p.header, "q")? as u32)?;
    let find = |name: &str| {
        p.matrices
            .iter()
            .find(|m| m.0 == name)
            .ok_or_else(|| MatFileError::Header(format!("missing matrix `{name}`")))
    };
    let h_z = to_matrix(field, find("h_z")?)?;
    let h_x = to_matrix(field, find("h_x")?)?;
    let code = CssCode::from_parts(get(&p.header, "k")? as usize, get(&p.header, "alpha")? as usize, h_x, h_z)?;
    if let Ok(beta) = get(&p.header, "beta") {
        if beta != code.beta() as u64 {
            return Err(MatFileError::Header(format!("beta={beta} but alpha implies {}", code.beta())));
        }
    }
    if let Ok(r_z) = get(&p.header, "r_z") {
        if r_z != code.r_z() as u64 {
            return Err(MatFileError::Header(format!("r_z={r_z} but alpha implies {}", code.r_z())));
        }
    }
    Ok(code)
}
