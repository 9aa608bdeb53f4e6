//! Concept output as JSON lines: one header record, then one record per
//! concept in ranking order.
//!
//! ```text
//! {"format":"seqlat-concepts","version":1,"objects":5,"concepts":8,"records":7,"rank_by":"stability","theta":null,"projection":null}
//! {"id":3,"extent":["g1","g2","g3","g4"],"support":4,"intent":["m6"],"stability":0.6875,"stability_num":"11","stability_den":"16","bound":0.875,"md":3,"parents":[7]}
//! ```
//!
//! `intent` is `null` for the synthetic top description, `md` is `null` for a
//! concept without direct descendants. Floats are rounded to six decimals; the
//! exact value is `stability_num / stability_den`.

use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_text;
use crate::lattice::{ConceptId, Lattice};
use crate::projection::ProjectionSpec;
use crate::pstruct::{object_names, PatternStructure};
use crate::stability::{rank_concepts, stable_filter, RankKey, StabilityReport};

pub const CONCEPTS_FORMAT: &str = "seqlat-concepts";
pub const LATTICE_FORMAT: &str = "seqlat-lattice";
pub const OUTPUT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputHeader {
    pub format: String,
    pub version: u32,
    pub objects: usize,
    pub concepts: usize,
    pub records: usize,
    pub rank_by: String,
    pub theta: Option<String>,
    pub projection: Option<ProjectionSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptRecord {
    pub id: ConceptId,
    pub extent: Vec<String>,
    pub support: usize,
    pub intent: Option<Vec<String>>,
    pub stability: f64,
    pub stability_num: String,
    pub stability_den: String,
    pub bound: f64,
    pub md: Option<usize>,
    pub parents: Vec<ConceptId>,
}

#[derive(Debug, Clone, Default)]
pub struct OutputOptions {
    pub rank_by: RankKey,
    /// Keep only concepts passing the stability-bound filter.
    pub theta: Option<BigRational>,
    /// Keep an empty-extent bottom concept.
    pub include_empty: bool,
    /// Recorded in the header.
    pub projection: Option<ProjectionSpec>,
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

pub fn concept_record<P: PatternStructure>(
    ps: &P,
    lat: &Lattice<P::Description>,
    report: &StabilityReport,
    id: ConceptId,
) -> ConceptRecord {
    let c = &lat.concepts()[id];
    let s = report.get(id);
    ConceptRecord {
        id,
        extent: object_names(ps, &c.extent),
        support: s.support,
        intent: ps.render(&c.intent),
        stability: round6(s.stability_f64()),
        stability_num: s.count.to_string(),
        stability_den: s.total.to_string(),
        bound: round6(s.bound_f64()),
        md: s.md,
        parents: lat.parents(id).to_vec(),
    }
}

/// Renders the header and the ranked (and optionally filtered) records.
/// Returns the text and the number of concept records.
pub fn render_concepts<P: PatternStructure>(
    ps: &P,
    lat: &Lattice<P::Description>,
    report: &StabilityReport,
    opts: &OutputOptions,
) -> Result<(String, usize)> {
    let mut ids = rank_concepts(report, lat, opts.rank_by, opts.include_empty)?;
    if let Some(theta) = &opts.theta {
        let keep = stable_filter(lat, theta)?;
        ids.retain(|c| keep.binary_search(c).is_ok());
    }
    let header = OutputHeader {
        format: CONCEPTS_FORMAT.into(),
        version: OUTPUT_VERSION,
        objects: ps.object_count(),
        concepts: lat.len(),
        records: ids.len(),
        rank_by: opts.rank_by.to_string(),
        theta: opts.theta.as_ref().map(ToString::to_string),
        projection: opts.projection.clone(),
    };
    let mut out = json_line(&header)?;
    for &id in &ids {
        out.push_str(&json_line(&concept_record(ps, lat, report, id))?);
    }
    Ok((out, ids.len()))
}

fn json_line<T: Serialize>(v: &T) -> Result<String> {
    let mut s =
        serde_json::to_string(v).map_err(|e| Error::input(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes [`render_concepts`] output to `path`; returns the record count.
pub fn write_concepts<P: PatternStructure>(
    path: impl AsRef<Path>,
    ps: &P,
    lat: &Lattice<P::Description>,
    report: &StabilityReport,
    opts: &OutputOptions,
) -> Result<usize> {
    let (text, n) = render_concepts(ps, lat, report, opts)?;
    write_text(path.as_ref(), &text)?;
    Ok(n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeRecord {
    pub id: ConceptId,
    pub extent: Vec<String>,
    pub intent: Option<Vec<String>>,
    pub parents: Vec<ConceptId>,
}

/// One record per concept in id order, after a header line.
pub fn dump_lattice<P: PatternStructure>(ps: &P, lat: &Lattice<P::Description>) -> String {
    let mut out = format!(
        "{{\"format\":\"{LATTICE_FORMAT}\",\"version\":{OUTPUT_VERSION},\"concepts\":{}}}\n",
        lat.len()
    );
    for c in lat.concepts() {
        let rec = LatticeRecord {
            id: c.id,
            extent: object_names(ps, &c.extent),
            intent: ps.render(&c.intent),
            parents: lat.parents(c.id).to_vec(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("plain record serializes"));
        out.push('\n');
    }
    out
}

/// Parses concept output back into its header and records.
pub fn parse_concepts(text: &str) -> Result<(OutputHeader, Vec<ConceptRecord>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty()).enumerate();
    let bad = |i: usize, e: serde_json::Error| Error::parse("<concepts>", i + 1, e.to_string());
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::parse("<concepts>", 1, "missing header"))?;
    let header: OutputHeader = serde_json::from_str(first).map_err(|e| bad(0, e))?;
    let records = lines
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| bad(i, e)))
        .collect::<Result<Vec<ConceptRecord>>>()?;
    Ok((header, records))
}
