//! Columnar text and JSON serialization of fields.
//!
//! Text layout: a header `# L=<L> n=<n>` followed by `n` rows `x re im`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::field::Field;
use super::grid::SpatialGrid;
use crate::{Error, Result, C64};

pub fn to_text(f: &Field) -> String {
    let grid = f.grid();
    let mut out = String::with_capacity(64 * f.len());
    let _ = writeln!(out, "# L={:e} n={}", grid.length(), grid.n());
    for (j, v) in f.values().iter().enumerate() {
        let _ = writeln!(out, "{:e} {:e} {:e}", grid.x(j), v.re, v.im);
    }
    out
}

fn parse_header(line: &str) -> Result<(f64, usize)> {
    let err = |msg: &str| Error::Parse { line: 1, msg: msg.to_string() };
    let rest = line.strip_prefix('#').ok_or_else(|| err("missing '#' header"))?;
    let mut length = None;
    let mut n = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("L=") {
            length = Some(v.parse::<f64>().map_err(|_| err("bad L"))?);
        } else if let Some(v) = tok.strip_prefix("n=") {
            n = Some(v.parse::<usize>().map_err(|_| err("bad n"))?);
        } else {
            return Err(err(&format!("unexpected header token '{tok}'")));
        }
    }
    match (length, n) {
        (Some(l), Some(n)) => Ok((l, n)),
        _ => Err(err("header needs L= and n=")),
    }
}

/// Parses the text format; grid positions must match `-L/2 + j h`.
pub fn from_text(text: &str) -> Result<Field> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
    let (length, n) = parse_header(header.trim())?;
    if n > 1 << 24 {
        return Err(Error::Parse { line: 1, msg: format!("n = {n} too large") });
    }
    let grid = SpatialGrid::new(length, n)?;
    let mut values = Vec::with_capacity(n);
    for (i, line) in lines {
        let lineno = i + 1;
        let perr = |msg: String| Error::Parse { line: lineno, msg };
        if line.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 3 {
            return Err(perr(format!("expected 3 columns, found {}", cols.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| perr(format!("bad number '{s}'")));
        let (x, re, im) = (num(cols[0])?, num(cols[1])?, num(cols[2])?);
        let j = values.len();
        if j >= n {
            return Err(perr(format!("more than n = {n} rows")));
        }
        if !(x - grid.x(j)).abs().le(&(1e-9 * grid.length().max(1.0))) {
            return Err(perr(format!("x = {x} does not match grid point {}", grid.x(j))));
        }
        if !re.is_finite() || !im.is_finite() {
            return Err(perr("non-finite sample".into()));
        }
        values.push(C64::new(re, im));
    }
    if values.len() != n {
        return Err(Error::Parse { line: 0, msg: format!("expected {n} rows, found {}", values.len()) });
    }
    Field::new(grid, values)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldJson {
    #[serde(rename = "L")]
    length: f64,
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// `{"L": .., "n": .., "re": [..], "im": [..]}`.
pub fn to_json(f: &Field) -> String {
    let doc = FieldJson {
        length: f.grid().length(),
        n: f.grid().n(),
        re: f.values().iter().map(|v| v.re).collect(),
        im: f.values().iter().map(|v| v.im).collect(),
    };
    serde_json::to_string(&doc).expect("field serializes")
}

pub fn from_json(text: &str) -> Result<Field> {
    let doc: FieldJson = serde_json::from_str(text)?;
    let grid = SpatialGrid::new(doc.length, doc.n)?;
    if doc.re.len() != doc.n || doc.im.len() != doc.n {
        return Err(Error::InvalidGrid(format!(
            "expected {} samples, found re={} im={}",
            doc.n,
            doc.re.len(),
            doc.im.len()
        )));
    }
    let values = doc.re.iter().zip(&doc.im).map(|(&r, &i)| C64::new(r, i)).collect();
    Field::new(grid, values)
}

pub fn read_field(path: &std::path::Path) -> Result<Field> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        from_json(&text)
    } else {
        from_text(&text)
    }
}

pub fn write_field(path: &std::path::Path, f: &Field) -> Result<()> {
    let text = if path.extension().is_some_and(|e| e == "json") { to_json(f) } else { to_text(f) };
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Field {
        let grid = SpatialGrid::new(8.0, 16).unwrap();
        Field::from_fn(grid, |x| C64::new((-x * x).exp(), 0.25 * x))
    }

    #[test]
    fn text_roundtrip() {
        let f = sample();
        let g = from_text(&to_text(&f)).unwrap();
        assert!(g.rel_err(&f) < 1e-15);
    }

    #[test]
    fn json_roundtrip() {
        let f = sample();
        assert_eq!(from_json(&to_json(&f)).unwrap(), f);
    }

    #[test]
    fn rejects_short_and_misaligned() {
        let text = to_text(&sample());
        let truncated: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(from_text(&truncated).is_err());
        let bad = text.replacen("-4e0", "-3.9e0", 1);
        assert!(matches!(from_text(&bad), Err(Error::Parse { .. })));
        assert!(from_text("# L=8 n=15\n").is_err());
        assert!(from_json("{\"L\":8,\"n\":16,\"re\":[],\"im\":[]}").is_err());
    }
}
