//! Sequence datasets as JSON lines, one object per line:
//!
//! ```text
//! {"format":"seqlat-dataset","version":1}
//! {"id":"p1","events":[{"geo":"H1","proc":["a"]},{"geo":"H1","proc":["c","d"]}]}
//! ```
//!
//! The header line is optional. Each event maps every schema field to a value:
//! a node name for taxonomy fields, a list of strings for itemset fields and an
//! integer or `[lo,hi]` pair for interval fields. Interval fields may be left
//! out and then read as `[1,1]`. Objects keep file order.

use std::path::Path;

use serde_json::{json, Map, Value as Json};

use crate::alphabet::{AlphabetSchema, Element, FieldKind, Interval, ItemSet, Value};
use crate::error::{Error, Result};
use crate::io::{numbered_lines, read_text};
use crate::sequence::Sequence;

pub const DATASET_FORMAT: &str = "seqlat-dataset";
pub const DATASET_VERSION: u64 = 1;

fn event_value(
    schema: &AlphabetSchema,
    kind: &FieldKind,
    v: &Json,
) -> std::result::Result<Value, String> {
    match kind {
        FieldKind::Taxonomy(tax) => {
            let name = v.as_str().ok_or("taxonomy value must be a string")?;
            tax.node(name)
                .map(Value::Node)
                .ok_or_else(|| format!("unknown node `{name}` in taxonomy `{}`", tax.name()))
        }
        FieldKind::ItemSet => {
            let items = v
                .as_array()
                .ok_or("itemset value must be a list of strings")?;
            let names = items
                .iter()
                .map(|i| i.as_str().ok_or("itemset value must be a list of strings"))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(Value::Items(ItemSet::new(names)))
        }
        FieldKind::Interval => {
            let num = |j: &Json| -> std::result::Result<u32, String> {
                j.as_u64()
                    .and_then(|n| u32::try_from(n).ok())
                    .ok_or_else(|| "interval bounds must be positive integers".to_string())
            };
            let iv = match v {
                Json::Array(pair) if pair.len() == 2 => {
                    Interval::new(num(&pair[0])?, num(&pair[1])?)
                }
                Json::Number(_) => Interval::new(num(v)?, num(v)?),
                _ => return Err("interval value must be an integer or [lo,hi]".into()),
            }
            .map_err(|e| e.to_string())?;
            if iv.hi > schema.max_rep() {
                return Err(format!(
                    "interval [{},{}] exceeds max_rep {}",
                    iv.lo,
                    iv.hi,
                    schema.max_rep()
                ));
            }
            Ok(Value::Interval(iv))
        }
    }
}

fn parse_event(schema: &AlphabetSchema, ev: &Json) -> std::result::Result<Element, String> {
    let obj = ev.as_object().ok_or("each event must be an object")?;
    for key in obj.keys() {
        if schema.field_index(key).is_none() {
            return Err(format!("unknown field `{key}`"));
        }
    }
    let mut values = Vec::with_capacity(schema.fields().len());
    for f in schema.fields() {
        let v = match (obj.get(&f.name), &f.kind) {
            (Some(v), kind) => {
                event_value(schema, kind, v).map_err(|m| format!("field `{}`: {m}", f.name))?
            }
            (None, FieldKind::Interval) => Value::Interval(Interval::point(1)),
            (None, _) => return Err(format!("missing field `{}`", f.name)),
        };
        values.push(v);
    }
    Ok(Element::new(values))
}

/// Parses dataset text. `path` only labels errors.
pub fn parse_dataset(
    schema: &AlphabetSchema,
    text: &str,
    path: &Path,
) -> Result<Vec<(String, Sequence)>> {
    let mut out: Vec<(String, Sequence)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line, raw) in numbered_lines(text) {
        if raw.trim().is_empty() {
            continue;
        }
        let rec: Json = serde_json::from_str(raw)
            .map_err(|e| Error::parse(path, line, format!("malformed record: {e}")))?;
        let obj = rec
            .as_object()
            .ok_or_else(|| Error::parse(path, line, "record must be a JSON object"))?;
        if let Some(fmt) = obj.get("format") {
            if out.is_empty() && fmt == DATASET_FORMAT {
                let v = obj.get("version").and_then(Json::as_u64);
                if v != Some(DATASET_VERSION) {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("unsupported dataset version {v:?}"),
                    ));
                }
                continue;
            }
            return Err(Error::parse(path, line, "unexpected header record"));
        }
        let id = match obj.get("id") {
            Some(Json::String(s)) => s.clone(),
            Some(Json::Number(n)) => n.to_string(),
            _ => return Err(Error::parse(path, line, "record needs a string `id`")),
        };
        if !seen.insert(id.clone()) {
            return Err(Error::parse(
                path,
                line,
                format!("duplicate object id `{id}`"),
            ));
        }
        let events = obj
            .get("events")
            .and_then(Json::as_array)
            .ok_or_else(|| Error::parse(path, line, "record needs an `events` list"))?;
        let seq = events
            .iter()
            .enumerate()
            .map(|(k, ev)| {
                parse_event(schema, ev)
                    .map_err(|m| Error::parse(path, line, format!("event {k}: {m}")))
            })
            .collect::<Result<Sequence>>()?;
        if let Some(extra) = obj.keys().find(|k| *k != "id" && *k != "events") {
            return Err(Error::parse(path, line, format!("unknown key `{extra}`")));
        }
        out.push((id, seq));
    }
    Ok(out)
}

pub fn load_dataset(
    schema: &AlphabetSchema,
    path: impl AsRef<Path>,
) -> Result<Vec<(String, Sequence)>> {
    let path = path.as_ref();
    parse_dataset(schema, &read_text(path)?, path)
}

fn event_json(schema: &AlphabetSchema, e: &Element) -> Json {
    let mut m = Map::new();
    for (f, v) in schema.fields().iter().zip(&e.values) {
        let j = match (&f.kind, v) {
            (FieldKind::Taxonomy(t), Value::Node(n)) => json!(t.node_name(*n)),
            (_, Value::Items(items)) => json!(items.iter().collect::<Vec<_>>()),
            (_, Value::Interval(iv)) => json!([iv.lo, iv.hi]),
            (_, Value::Node(n)) => json!(n),
        };
        m.insert(f.name.clone(), j);
    }
    Json::Object(m)
}

/// Serializes objects in the dataset format, header included.
pub fn write_dataset(schema: &AlphabetSchema, objects: &[(String, Sequence)]) -> String {
    let mut out = format!("{{\"format\":\"{DATASET_FORMAT}\",\"version\":{DATASET_VERSION}}}\n");
    for (id, seq) in objects {
        let events: Vec<Json> = seq
            .elements()
            .iter()
            .map(|e| event_json(schema, e))
            .collect();
        let rec = json!({ "events": events }).to_string();
        out.push_str(&format!("{{\"id\":{},{}", json!(id), &rec[1..]));
        out.push('\n');
    }
    out
}
