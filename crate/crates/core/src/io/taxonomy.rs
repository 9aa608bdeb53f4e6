//! Taxonomy edge lists: one `child<TAB>parent` pair per line, a single
//! `root<TAB>-` line naming the root, `#` starting a comment line.
//!
//! ```text
//! # hospitals
//! *	-
//! CL	*
//! CH	*
//! H1	CH
//! ```

#![allow(clippy::tabs_in_doc_comments)]

use std::path::Path;

use crate::alphabet::Taxonomy;
use crate::error::{Error, Result};
use crate::io::{numbered_lines, read_text};

/// Parses an edge list. `path` only labels errors; `name` becomes the
/// taxonomy name. Edges may reference parents declared on later lines.
pub fn parse_taxonomy(name: &str, text: &str, path: &Path) -> Result<Taxonomy> {
    let mut root: Option<(usize, String)> = None;
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    for (line, raw) in numbered_lines(text) {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = l.split('\t').map(str::trim).collect();
        let [child, parent] = cols[..] else {
            return Err(Error::parse(
                path,
                line,
                format!("expected `child<TAB>parent`, got {} columns", cols.len()),
            ));
        };
        if child.is_empty() || parent.is_empty() {
            return Err(Error::parse(path, line, "empty node name"));
        }
        if parent == "-" {
            if let Some((first, r)) = &root {
                return Err(Error::parse(
                    path,
                    line,
                    format!("multiple roots: `{child}` here and `{r}` on line {first}"),
                ));
            }
            root = Some((line, child.to_string()));
        } else {
            edges.push((child.to_string(), parent.to_string()));
            lines.push(line);
        }
    }
    let Some((root_line, root)) = root else {
        return Err(Error::parse(path, 1, "no root line (`name<TAB>-`)"));
    };
    Taxonomy::from_edges(name, &root, &edges).map_err(|e| {
        let line = e.edge.map_or(root_line, |i| lines[i]);
        Error::parse(path, line, e.msg)
    })
}

/// Loads a taxonomy file; the file stem becomes the taxonomy name.
pub fn load_taxonomy(path: impl AsRef<Path>) -> Result<Taxonomy> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_taxonomy(&name, &read_text(path)?, path)
}

/// Serializes a taxonomy in the edge-list grammar, root first.
pub fn write_taxonomy(tax: &Taxonomy) -> String {
    let mut out = format!("{}\t-\n", tax.node_name(tax.root()));
    for (child, parent) in tax.edges() {
        out.push_str(tax.node_name(child));
        out.push('\t');
        out.push_str(tax.node_name(parent));
        out.push('\n');
    }
    out
}
