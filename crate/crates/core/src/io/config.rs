//! Run configuration (TOML). Relative paths resolve against the config file's
//! directory.
//!
//! ```toml
//! dataset = "patients.jsonl"
//! output = "concepts.jsonl"
//! rank_by = "stability"
//! theta = 0.8
//!
//! [limits]
//! max_concepts = 1000000
//!
//! [[fields]]
//! name = "geo"
//! kind = "taxonomy"
//! taxonomy = "geo.tsv"
//! letter = "G"
//!
//! [[fields]]
//! name = "procedures"
//! kind = "itemset"
//!
//! [projection]
//! shorthand = "GP2"
//! ```
//!
//! The `[projection]` table takes either a `shorthand` or explicit `select`,
//! `require`, `min_len`, `rle` and `drop_items` keys; explicit keys override
//! what the shorthand expands to.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::alphabet::{AlphabetSchema, FieldKind, FieldSpec, DEFAULT_MAX_REP};
use crate::error::{Error, Result};
use crate::io::{read_text, taxonomy::load_taxonomy};
use crate::lattice::DEFAULT_MAX_CONCEPTS;
use crate::projection::ProjectionSpec;
use crate::stability::{parse_theta, RankKey};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shorthand: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub select: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub require: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rle: Option<bool>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub drop_items: BTreeMap<String, BTreeSet<String>>,
}

impl ProjectionConfig {
    pub fn resolve(&self, schema: &AlphabetSchema) -> Result<ProjectionSpec> {
        let mut spec = match &self.shorthand {
            Some(s) => ProjectionSpec::from_shorthand(schema, s)?,
            None => ProjectionSpec::identity(),
        };
        if let Some(sel) = &self.select {
            spec.select = Some(sel.clone());
        }
        if let Some(req) = &self.require {
            spec.require = req.clone();
        }
        if let Some(l) = self.min_len {
            spec.min_len = l;
        }
        if let Some(r) = self.rle {
            spec.rle = r;
        }
        if !self.drop_items.is_empty() {
            spec.drop_items = self.drop_items.clone();
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub name: String,
    /// `taxonomy`, `itemset` or `interval`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taxonomy: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub letter: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub require_when_selected: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_concepts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_objects: Option<usize>,
}

/// The config document as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub dataset: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_by: Option<String>,
    /// A number or a decimal string.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<toml::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rep: Option<u32>,
    #[serde(default)]
    pub limits: Limits,
    pub fields: Vec<FieldConfig>,
    #[serde(default)]
    pub projection: ProjectionConfig,
}

/// A loaded configuration with its schema built and paths resolved.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub schema: Arc<AlphabetSchema>,
    pub dataset: PathBuf,
    pub output: Option<PathBuf>,
    pub projection: ProjectionConfig,
    pub rank_by: RankKey,
    pub theta: Option<BigRational>,
    pub max_concepts: usize,
    pub max_objects: Option<usize>,
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = read_text(path)?;
        let file: ConfigFile = toml::from_str(&text).map_err(|e| {
            let line = e.span().map_or(1, |s| {
                text[..s.start.min(text.len())].matches('\n').count() + 1
            });
            Error::parse(path, line, e.message().to_string())
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_file(file, base)
    }

    pub fn from_file(file: ConfigFile, base: &Path) -> Result<Self> {
        let resolve = |p: &Path| {
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        let mut fields = Vec::with_capacity(file.fields.len());
        for f in &file.fields {
            let kind = match (f.kind.as_str(), &f.taxonomy) {
                ("taxonomy", Some(p)) => FieldKind::Taxonomy(Arc::new(load_taxonomy(resolve(p))?)),
                ("taxonomy", None) => {
                    return Err(Error::config(format!(
                        "field `{}` needs a `taxonomy` file",
                        f.name
                    )))
                }
                ("itemset" | "interval", Some(_)) => {
                    return Err(Error::config(format!(
                        "field `{}`: only taxonomy fields take a file",
                        f.name
                    )))
                }
                ("itemset", None) => FieldKind::ItemSet,
                ("interval", None) => FieldKind::Interval,
                (other, _) => {
                    return Err(Error::config(format!(
                    "field `{}`: unknown kind `{other}` (expected taxonomy, itemset or interval)",
                    f.name
                )))
                }
            };
            let mut spec = FieldSpec::new(f.name.clone(), kind);
            if let Some(l) = &f.letter {
                let mut chars = l.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if c.is_ascii_alphabetic() => spec = spec.with_letter(c),
                    _ => {
                        return Err(Error::config(format!(
                            "field `{}`: letter must be one ASCII letter",
                            f.name
                        )))
                    }
                }
            }
            if f.require_when_selected {
                spec = spec.required_when_selected();
            }
            fields.push(spec);
        }
        if fields.is_empty() {
            return Err(Error::config("the schema needs at least one field"));
        }
        let schema = AlphabetSchema::with_max_rep(fields, file.max_rep.unwrap_or(DEFAULT_MAX_REP))?;
        let rank_by = file
            .rank_by
            .as_deref()
            .map_or(Ok(RankKey::default()), str::parse)?;
        let theta = match &file.theta {
            None => None,
            Some(toml::Value::String(s)) => Some(parse_theta(s)?),
            Some(toml::Value::Float(f)) => Some(parse_theta(&f.to_string())?),
            Some(toml::Value::Integer(i)) => Some(parse_theta(&i.to_string())?),
            Some(other) => {
                return Err(Error::config(format!(
                    "theta must be a number, got {other}"
                )))
            }
        };
        let cfg = RunConfig {
            schema: Arc::new(schema),
            dataset: resolve(&file.dataset),
            output: file.output.as_deref().map(resolve),
            projection: file.projection,
            rank_by,
            theta,
            max_concepts: file.limits.max_concepts.unwrap_or(DEFAULT_MAX_CONCEPTS),
            max_objects: file.limits.max_objects,
        };
        cfg.projection_spec()?;
        Ok(cfg)
    }

    /// The projection spec, validated against the schema.
    pub fn projection_spec(&self) -> Result<ProjectionSpec> {
        let spec = self.projection.resolve(&self.schema)?;
        crate::projection::Projector::new(&self.schema, &spec)?;
        Ok(spec)
    }
}
