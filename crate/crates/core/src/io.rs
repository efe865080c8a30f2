//! Plain-text input formats. Blank lines and `#` comments are ignored;
//! every parse error names the file and the line.
//!
//! * SFT: `k`, then `k` rows of `k` entries in {0, 1}.
//! * Function table: `depth m`, then one `word value` line per admissible
//!   word, words written as in [`format_symbols`](crate::symbolic::format_symbols).
//! * Cocycle: one matrix per symbol and line, `d²` reals row-major.
//! * Flow spec: `sft <path>` (relative to the spec file), then a function
//!   table for the roof.
//! * Trigonometric polynomial: `n_1 … n_d re im` per line; missing
//!   partners `−n` are filled in by conjugation.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cocycle::MatrixCocycle;
use crate::embedding::TrigPolynomial;
use crate::error::{Error, Result};
use crate::potential::LocallyConstantFunction;
use crate::suspension::SuspensionFlow;
use crate::symbolic::Sft;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

struct Lines<'a> {
    path: &'a Path,
    items: Vec<(usize, Vec<&'a str>)>,
}

impl<'a> Lines<'a> {
    fn new(path: &'a Path, text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let body = l.split('#').next().unwrap_or("");
                let tokens: Vec<&str> = body.split_whitespace().collect();
                (!tokens.is_empty()).then_some((i + 1, tokens))
            })
            .collect();
        Self { path, items }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }

    fn last_line(&self) -> usize {
        self.items.last().map_or(1, |(l, _)| *l)
    }

    fn number<T: std::str::FromStr>(&self, line: usize, tok: &str) -> Result<T> {
        tok.parse()
            .map_err(|_| self.err(line, format!("cannot parse {tok:?} as a number")))
    }
}

/// Parses an SFT transition matrix.
pub fn parse_sft(path: &Path, text: &str) -> Result<Sft> {
    let lines = Lines::new(path, text);
    let Some((first, head)) = lines.items.first() else {
        return Err(lines.err(1, "empty file"));
    };
    if head.len() != 1 {
        return Err(lines.err(*first, "first line must hold the alphabet size"));
    }
    let k: usize = lines.number(*first, head[0])?;
    if k == 0 {
        return Err(lines.err(*first, "alphabet size must be positive"));
    }
    let rows = &lines.items[1..];
    if rows.len() != k {
        return Err(lines.err(lines.last_line(), format!("expected {k} matrix rows, found {}", rows.len())));
    }
    let mut matrix = Vec::with_capacity(k);
    for (line, tokens) in rows {
        if tokens.len() != k {
            return Err(lines.err(*line, format!("expected {k} entries, found {}", tokens.len())));
        }
        let row = tokens
            .iter()
            .map(|t| match *t {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                _ => Err(lines.err(*line, format!("entry {t:?} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        matrix.push(row);
    }
    Sft::new(matrix).map_err(|e| lines.err(*first, e.to_string()))
}

pub fn read_sft(path: &Path) -> Result<Sft> {
    parse_sft(path, &read(path)?)
}

fn parse_word(lines: &Lines<'_>, line: usize, tok: &str) -> Result<Vec<usize>> {
    if tok.contains('.') {
        tok.split('.').map(|s| lines.number(line, s)).collect()
    } else {
        tok.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| lines.err(line, format!("bad symbol {c:?} in word {tok:?}")))
            })
            .collect()
    }
}

fn parse_table_lines(lines: &Lines<'_>, items: &[(usize, Vec<&str>)], sft: &Sft) -> Result<LocallyConstantFunction> {
    let Some((first, head)) = items.first() else {
        return Err(lines.err(lines.last_line(), "missing `depth m` line"));
    };
    if head.len() != 2 || head[0] != "depth" {
        return Err(lines.err(*first, "expected `depth m`"));
    }
    let depth: usize = lines.number(*first, head[1])?;
    let mut entries = Vec::new();
    for (line, tokens) in &items[1..] {
        if tokens.len() != 2 {
            return Err(lines.err(*line, "expected `word value`"));
        }
        let word = parse_word(lines, *line, tokens[0])?;
        if word.len() != depth {
            return Err(lines.err(*line, format!("word {} does not have length {depth}", tokens[0])));
        }
        entries.push((word, lines.number::<f64>(*line, tokens[1])?));
    }
    LocallyConstantFunction::from_table(sft, depth, entries).map_err(|e| lines.err(*first, e.to_string()))
}

/// Parses a locally constant function table over `sft`.
pub fn parse_function_table(path: &Path, text: &str, sft: &Sft) -> Result<LocallyConstantFunction> {
    let lines = Lines::new(path, text);
    parse_table_lines(&lines, &lines.items, sft)
}

pub fn read_function_table(path: &Path, sft: &Sft) -> Result<LocallyConstantFunction> {
    parse_function_table(path, &read(path)?, sft)
}

/// Parses a cocycle file: one square matrix per line.
pub fn parse_cocycle(path: &Path, text: &str) -> Result<MatrixCocycle> {
    let lines = Lines::new(path, text);
    if lines.items.is_empty() {
        return Err(lines.err(1, "no matrices"));
    }
    let mut matrices = Vec::new();
    for (line, tokens) in &lines.items {
        let d = (tokens.len() as f64).sqrt().round() as usize;
        if d == 0 || d * d != tokens.len() {
            return Err(lines.err(*line, format!("{} entries do not form a square matrix", tokens.len())));
        }
        let values = tokens
            .iter()
            .map(|t| lines.number::<f64>(*line, t))
            .collect::<Result<Vec<_>>>()?;
        matrices.push(DMatrix::from_row_slice(d, d, &values));
    }
    MatrixCocycle::new(matrices).map_err(|e| lines.err(lines.items[0].0, e.to_string()))
}

pub fn read_cocycle(path: &Path) -> Result<MatrixCocycle> {
    parse_cocycle(path, &read(path)?)
}

/// Parses a flow spec, resolving the SFT path against `path`'s directory.
pub fn parse_flow_spec(path: &Path, text: &str) -> Result<SuspensionFlow> {
    parse_flow_spec_with(path, text, read_sft)
}

/// Parses a flow spec, loading the SFT named in it (joined to `path`'s
/// directory) through `load_sft`.
pub fn parse_flow_spec_with<L>(path: &Path, text: &str, load_sft: L) -> Result<SuspensionFlow>
where
    L: FnOnce(&Path) -> Result<Sft>,
{
    let lines = Lines::new(path, text);
    let Some((first, head)) = lines.items.first() else {
        return Err(lines.err(1, "empty file"));
    };
    if head.len() != 2 || head[0] != "sft" {
        return Err(lines.err(*first, "expected `sft <path>`"));
    }
    let sft_path: PathBuf = path.parent().unwrap_or(Path::new("")).join(head[1]);
    let sft = load_sft(&sft_path)?;
    let tau = parse_table_lines(&lines, &lines.items[1..], &sft)?;
    let roof_line = lines.items.get(1).map_or(*first, |(l, _)| *l);
    SuspensionFlow::new(sft, tau).map_err(|e| lines.err(roof_line, e.to_string()))
}

pub fn read_flow_spec(path: &Path) -> Result<SuspensionFlow> {
    parse_flow_spec(path, &read(path)?)
}

/// Parses a trigonometric polynomial.
pub fn parse_trig(path: &Path, text: &str) -> Result<TrigPolynomial> {
    let lines = Lines::new(path, text);
    let Some((first, head)) = lines.items.first() else {
        return Err(lines.err(1, "no coefficients"));
    };
    if head.len() < 3 {
        return Err(lines.err(*first, "expected `n_1 … n_d re im`"));
    }
    let dim = head.len() - 2;
    let mut coeffs: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
    for (line, tokens) in &lines.items {
        if tokens.len() != dim + 2 {
            return Err(lines.err(*line, format!("expected {dim} frequencies and two reals")));
        }
        let n = tokens[..dim]
            .iter()
            .map(|t| lines.number::<i64>(*line, t))
            .collect::<Result<Vec<_>>>()?;
        let c = Complex64::new(lines.number(*line, tokens[dim])?, lines.number(*line, tokens[dim + 1])?);
        if coeffs.insert(n.clone(), c).is_some() {
            return Err(lines.err(*line, format!("frequency {n:?} listed twice")));
        }
    }
    let listed: Vec<Vec<i64>> = coeffs.keys().cloned().collect();
    for n in listed {
        let m: Vec<i64> = n.iter().map(|k| -k).collect();
        if !coeffs.contains_key(&m) {
            let c = coeffs[&n].conj();
            coeffs.insert(m, c);
        }
    }
    TrigPolynomial::from_coefficients(dim, coeffs).map_err(|e| lines.err(*first, e.to_string()))
}

pub fn read_trig(path: &Path) -> Result<TrigPolynomial> {
    parse_trig(path, &read(path)?)
}
