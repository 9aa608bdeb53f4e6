//! Binary formal contexts, in one of two text forms.
//!
//! Cross table: a header row of attribute names (its first cell, the corner,
//! is ignored), then one row per object: the object name followed by one cell
//! per attribute. Cells are tab-separated when the header contains a tab and
//! comma-separated otherwise. `x`, `X` and `1` mark an incidence; an empty
//! cell, `.`, `-` or `0` marks its absence. `#` starts a comment line.
//!
//! ```text
//! 	m1	m2
//! g1	x
//! g2	x	x
//! ```
//!
//! Burmeister: a first line `B`, a free name line, the object and attribute
//! counts, an optional blank line, then the object names, the attribute names
//! and one row of `X`/`.` per object.

#![allow(clippy::tabs_in_doc_comments)]

use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{numbered_lines, read_text};
use crate::pstruct::FormalContext;

fn cell(path: &Path, line: usize, c: &str) -> Result<bool> {
    match c.trim() {
        "x" | "X" | "1" => Ok(true),
        "" | "." | "-" | "0" => Ok(false),
        other => Err(Error::parse(
            path,
            line,
            format!("unexpected cell `{other}`"),
        )),
    }
}

fn parse_burmeister(lines: &[(usize, &str)], path: &Path) -> Result<FormalContext> {
    let mut it = lines.iter().copied();
    let mut next = |what: &str| {
        it.next().ok_or_else(|| {
            Error::parse(
                path,
                lines.last().map_or(1, |l| l.0),
                format!("missing {what}"),
            )
        })
    };
    next("`B` line")?;
    next("name line")?;
    let count = |(line, s): (usize, &str)| -> Result<usize> {
        s.trim()
            .parse()
            .map_err(|_| Error::parse(path, line, "expected a count"))
    };
    let n = count(next("object count")?)?;
    let m = count(next("attribute count")?)?;
    let mut body: Vec<(usize, &str)> = Vec::new();
    for l in it {
        if body.is_empty() && l.1.trim().is_empty() {
            continue;
        }
        body.push(l);
    }
    while body.last().is_some_and(|l| l.1.trim().is_empty()) {
        body.pop();
    }
    if body.len() != n + m + n {
        let line = body.last().map_or(lines.last().map_or(1, |l| l.0), |l| l.0);
        return Err(Error::parse(
            path,
            line,
            format!(
                "expected {} lines after the counts, found {}",
                n + m + n,
                body.len()
            ),
        ));
    }
    let objects: Vec<String> = body[..n].iter().map(|l| l.1.trim().to_string()).collect();
    let attributes: Vec<String> = body[n..n + m]
        .iter()
        .map(|l| l.1.trim().to_string())
        .collect();
    let mut incidence = Vec::new();
    for (g, &(line, row)) in body[n + m..].iter().enumerate() {
        let row = row.trim();
        if row.chars().count() != m {
            return Err(Error::parse(
                path,
                line,
                format!("row has {} cells, expected {m}", row.chars().count()),
            ));
        }
        for (a, c) in row.chars().enumerate() {
            if cell(path, line, &c.to_string())? {
                incidence.push((g, a));
            }
        }
    }
    FormalContext::new(objects, attributes, incidence)
        .map_err(|e| Error::parse(path, 1, e.to_string()))
}

fn parse_cross_table(lines: &[(usize, &str)], path: &Path) -> Result<FormalContext> {
    let Some(&(_, header)) = lines.first() else {
        return FormalContext::new(vec![], vec![], []);
    };
    let sep = if header.contains('\t') { '\t' } else { ',' };
    let attributes: Vec<String> = header
        .split(sep)
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    let mut objects = Vec::new();
    let mut incidence = Vec::new();
    for &(line, row) in &lines[1..] {
        let cells: Vec<&str> = row.split(sep).collect();
        if cells.len() != attributes.len() + 1 {
            return Err(Error::parse(
                path,
                line,
                format!(
                    "ragged row: {} cells, expected {}",
                    cells.len(),
                    attributes.len() + 1
                ),
            ));
        }
        let g = objects.len();
        objects.push(cells[0].trim().to_string());
        for (m, c) in cells[1..].iter().enumerate() {
            if cell(path, line, c)? {
                incidence.push((g, m));
            }
        }
    }
    FormalContext::new(objects, attributes, incidence)
        .map_err(|e| Error::parse(path, 1, e.to_string()))
}

pub fn parse_context(text: &str, path: &Path) -> Result<FormalContext> {
    let all: Vec<(usize, &str)> = numbered_lines(text).collect();
    let first = all
        .iter()
        .find(|l| !l.1.trim().is_empty() && !l.1.starts_with('#'));
    if first.is_some_and(|l| l.1.trim() == "B") {
        let start = all
            .iter()
            .position(|l| l.1.trim() == "B")
            .expect("found above");
        return parse_burmeister(&all[start..], path);
    }
    let lines: Vec<(usize, &str)> = all
        .into_iter()
        .filter(|l| !l.1.trim().is_empty() && !l.1.starts_with('#'))
        .collect();
    parse_cross_table(&lines, path)
}

pub fn load_context(path: impl AsRef<Path>) -> Result<FormalContext> {
    let path = path.as_ref();
    parse_context(&read_text(path)?, path)
}

/// Serializes a context as a tab-separated cross table.
pub fn write_context(ctx: &FormalContext) -> String {
    let mut out = String::new();
    for a in ctx.attributes() {
        out.push('\t');
        out.push_str(a);
    }
    out.push('\n');
    for (g, name) in ctx.objects().iter().enumerate() {
        out.push_str(name);
        for m in 0..ctx.attributes().len() {
            out.push('\t');
            if ctx.has(g, m) {
                out.push('x');
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE1: &str =
        "\tm1\tm2\tm3\tm4\ng1\tx\t\t\tx\ng2\t\t\tx\tx\ng3\t\tx\t\t\ng4\t\t\tx\tx\n";

    fn parse(text: &str) -> Result<FormalContext> {
        parse_context(text, Path::new("c.txt"))
    }

    #[test]
    fn cross_table() {
        let ctx = parse(TABLE1).unwrap();
        assert_eq!(ctx.objects().len(), 4);
        assert_eq!(ctx.attributes().len(), 4);
        assert_eq!(ctx.incidence_count(), 7);
        assert_eq!(parse(&write_context(&ctx)).unwrap(), ctx);
        let csv = parse("# comment\n,a,b\nx1,x,\nx2,,X\n").unwrap();
        assert_eq!(csv.incidence_count(), 2);
        assert!(csv.has(1, 1));
    }

    #[test]
    fn burmeister() {
        let text = "B\ntoy\n2\n3\n\ng1\ng2\na\nb\nc\nX.X\n.XX\n";
        let ctx = parse(text).unwrap();
        assert_eq!(ctx.attributes(), ["a", "b", "c"]);
        assert_eq!(ctx.incidence_count(), 4);
        assert!(parse("B\ntoy\n2\n3\n\ng1\ng2\na\nb\nc\nX.X\n").is_err());
        assert!(parse("B\ntoy\n1\n2\ng1\na\nb\nX\n").is_err());
    }

    #[test]
    fn ragged_and_bad_cells() {
        match parse("\ta\tb\ng1\tx\n").unwrap_err() {
            Error::Parse { line, msg, .. } => {
                assert_eq!(line, 2);
                assert!(msg.contains("ragged"));
            }
            e => panic!("{e}"),
        }
        assert!(parse("\ta\ng1\ty\n").is_err());
        assert!(parse("\ta\ng1\tx\ng1\t\n").is_err());
    }

    #[test]
    fn empty_table() {
        let ctx = parse("").unwrap();
        assert!(ctx.objects().is_empty() && ctx.attributes().is_empty());
    }
}
