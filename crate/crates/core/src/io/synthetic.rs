//! Seeded generator for hospitalization-trajectory datasets.
//!
//! Each patient has a home hospital and follows one of a few care pathways
//! (a fixed list of diagnosis and procedure steps), with noise on the
//! hospital, diagnosis and procedures of every stay. Trajectory lengths follow
//! a geometric law truncated to `[min_length, max_length]`.
//!
//! Output: a geographic taxonomy, a diagnosis taxonomy, a dataset and a run
//! config wiring them together. Equal specs give byte-identical files.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::{
    AlphabetSchema, Element, FieldKind, FieldSpec, Interval, ItemSet, NodeId, Taxonomy, Value,
};
use crate::error::{Error, Result};
use crate::io::config::{ConfigFile, FieldConfig, Limits, ProjectionConfig};
use crate::io::dataset::write_dataset;
use crate::io::taxonomy::write_taxonomy;
use crate::io::write_text;
use crate::sequence::Sequence;

pub const GEO_FILE: &str = "geo.tsv";
pub const DIAG_FILE: &str = "diag.tsv";
pub const DATASET_FILE: &str = "patients.jsonl";
pub const CONFIG_FILE: &str = "config.toml";

fn d_patients() -> usize {
    100
}
fn d_mean_length() -> f64 {
    4.0
}
fn d_min_length() -> usize {
    1
}
fn d_max_length() -> usize {
    10
}
fn d_geo_levels() -> usize {
    4
}
fn d_diag_levels() -> usize {
    5
}
fn d_branching() -> usize {
    3
}
fn d_procedures() -> usize {
    12
}
fn d_max_procedures() -> usize {
    3
}
fn d_pathways() -> usize {
    4
}
fn d_noise() -> f64 {
    0.15
}
fn d_repeat_prob() -> f64 {
    0.2
}
fn d_projection() -> String {
    "GRP3".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    /// Required: there is no implicit seed.
    pub seed: u64,
    #[serde(default = "d_patients")]
    pub patients: usize,
    /// Mean trajectory length before truncation.
    #[serde(default = "d_mean_length")]
    pub mean_length: f64,
    #[serde(default = "d_min_length")]
    pub min_length: usize,
    #[serde(default = "d_max_length")]
    pub max_length: usize,
    /// Levels of the geographic taxonomy, root included.
    #[serde(default = "d_geo_levels")]
    pub geo_levels: usize,
    #[serde(default = "d_branching")]
    pub geo_branching: usize,
    /// Levels of the diagnosis taxonomy, root included.
    #[serde(default = "d_diag_levels")]
    pub diag_levels: usize,
    #[serde(default = "d_branching")]
    pub diag_branching: usize,
    /// Size of the procedure vocabulary.
    #[serde(default = "d_procedures")]
    pub procedures: usize,
    /// Most procedures in one pathway step.
    #[serde(default = "d_max_procedures")]
    pub max_procedures: usize,
    #[serde(default = "d_pathways")]
    pub pathways: usize,
    /// Per-stay perturbation probability.
    #[serde(default = "d_noise")]
    pub noise: f64,
    /// Probability that a stay repeats the previous one exactly.
    #[serde(default = "d_repeat_prob")]
    pub repeat_prob: f64,
    /// Projection written into the generated config.
    #[serde(default = "d_projection")]
    pub projection: String,
}

impl SyntheticSpec {
    pub fn with_seed(seed: u64) -> Self {
        SyntheticSpec {
            seed,
            patients: d_patients(),
            mean_length: d_mean_length(),
            min_length: d_min_length(),
            max_length: d_max_length(),
            geo_levels: d_geo_levels(),
            geo_branching: d_branching(),
            diag_levels: d_diag_levels(),
            diag_branching: d_branching(),
            procedures: d_procedures(),
            max_procedures: d_max_procedures(),
            pathways: d_pathways(),
            noise: d_noise(),
            repeat_prob: d_repeat_prob(),
            projection: d_projection(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = crate::io::read_text(path)?;
        toml::from_str(&text).map_err(|e| {
            let line = e.span().map_or(1, |s| {
                text[..s.start.min(text.len())].matches('\n').count() + 1
            });
            Error::parse(path, line, e.message().to_string())
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("patients", self.patients),
            ("min_length", self.min_length),
            ("max_length", self.max_length),
            ("geo_levels", self.geo_levels),
            ("geo_branching", self.geo_branching),
            ("diag_levels", self.diag_levels),
            ("diag_branching", self.diag_branching),
            ("procedures", self.procedures),
            ("max_procedures", self.max_procedures),
            ("pathways", self.pathways),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::config(format!(
                "synthetic spec: `{name}` must be positive"
            )));
        }
        if self.min_length > self.max_length {
            return Err(Error::config(
                "synthetic spec: min_length exceeds max_length",
            ));
        }
        if !self.mean_length.is_finite() || self.mean_length < self.min_length as f64 {
            return Err(Error::config(
                "synthetic spec: mean_length must be at least min_length",
            ));
        }
        for (name, p) in [("noise", self.noise), ("repeat_prob", self.repeat_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!(
                    "synthetic spec: `{name}` must lie in [0, 1]"
                )));
            }
        }
        if self.max_procedures > self.procedures {
            return Err(Error::config(
                "synthetic spec: max_procedures exceeds the vocabulary size",
            ));
        }
        Ok(())
    }
}

/// Generated file contents, keyed by their default file names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticFiles {
    pub geo_taxonomy: String,
    pub diag_taxonomy: String,
    pub dataset: String,
    pub config: String,
}

impl SyntheticFiles {
    /// Writes the four files into `dir` and returns their paths.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths = Vec::new();
        for (name, text) in [
            (GEO_FILE, &self.geo_taxonomy),
            (DIAG_FILE, &self.diag_taxonomy),
            (DATASET_FILE, &self.dataset),
            (CONFIG_FILE, &self.config),
        ] {
            let p = dir.join(name);
            write_text(&p, text)?;
            paths.push(p);
        }
        Ok(paths)
    }
}

/// A complete tree with `levels` levels (root included) and uniform branching.
/// Node names spell the path from the root: `G1`, `G1.2`, `G1.2.3`.
fn balanced_taxonomy(
    name: &str,
    prefix: &str,
    levels: usize,
    branching: usize,
) -> Result<Taxonomy> {
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut frontier = vec!["*".to_string()];
    for depth in 1..levels {
        let mut next = Vec::new();
        for parent in &frontier {
            for k in 1..=branching {
                let child = if depth == 1 {
                    format!("{prefix}{k}")
                } else {
                    format!("{parent}.{k}")
                };
                edges.push((child.clone(), parent.clone()));
                next.push(child);
            }
        }
        frontier = next;
    }
    Taxonomy::from_edges(name, "*", &edges).map_err(|e| Error::config(e.msg))
}

fn leaves(t: &Taxonomy) -> Vec<NodeId> {
    let deepest = t.max_depth();
    (0..t.len() as NodeId)
        .filter(|&n| t.depth(n) == deepest)
        .collect()
}

struct Step {
    diag: NodeId,
    procs: Vec<usize>,
}

/// Trajectory length: `min + Geometric(p)` with mean `mean`, redrawn while it
/// exceeds `max` (at most 64 times, then clamped).
fn draw_length(rng: &mut ChaCha8Rng, spec: &SyntheticSpec) -> usize {
    let extra_mean = spec.mean_length - spec.min_length as f64;
    let p = 1.0 / (extra_mean + 1.0);
    for _ in 0..64 {
        let mut k = 0;
        while !rng.random_bool(p) {
            k += 1;
        }
        let len = spec.min_length + k;
        if len <= spec.max_length {
            return len;
        }
    }
    spec.max_length
}

/// Generates the taxonomies, the dataset and a config using them.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticFiles> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let geo = Arc::new(balanced_taxonomy(
        "geo",
        "G",
        spec.geo_levels,
        spec.geo_branching,
    )?);
    let diag = Arc::new(balanced_taxonomy(
        "diag",
        "D",
        spec.diag_levels,
        spec.diag_branching,
    )?);
    let schema = AlphabetSchema::new(vec![
        FieldSpec::new("geo", FieldKind::Taxonomy(geo.clone())).with_letter('G'),
        FieldSpec::new("reason", FieldKind::Taxonomy(diag.clone()))
            .with_letter('R')
            .required_when_selected(),
        FieldSpec::new("procedures", FieldKind::ItemSet).with_letter('P'),
        FieldSpec::new("repetition", FieldKind::Interval).with_letter('I'),
    ])?;
    let vocab: Vec<String> = (1..=spec.procedures).map(|k| format!("p{k:02}")).collect();
    let hospitals = leaves(&geo);
    let diagnoses = leaves(&diag);

    let pathways: Vec<Vec<Step>> = (0..spec.pathways)
        .map(|_| {
            (0..spec.max_length)
                .map(|_| {
                    let n = rng.random_range(1..=spec.max_procedures);
                    let mut procs: Vec<usize> =
                        rand::seq::index::sample(&mut rng, spec.procedures, n).into_vec();
                    procs.sort_unstable();
                    Step {
                        diag: *diagnoses.choose(&mut rng).expect("non-empty"),
                        procs,
                    }
                })
                .collect()
        })
        .collect();

    let siblings = |t: &Taxonomy, pool: &[NodeId], n: NodeId| -> Vec<NodeId> {
        pool.iter()
            .copied()
            .filter(|&m| t.parent(m) == t.parent(n))
            .collect()
    };
    let element = |g: NodeId, d: NodeId, procs: &[usize]| {
        Element::new(vec![
            Value::Node(g),
            Value::Node(d),
            Value::Items(ItemSet::new(procs.iter().map(|&p| vocab[p].as_str()))),
            Value::Interval(Interval::point(1)),
        ])
    };

    let width = spec.patients.to_string().len();
    let mut objects = Vec::with_capacity(spec.patients);
    for pid in 0..spec.patients {
        let path = &pathways[rng.random_range(0..spec.pathways)];
        let home = *hospitals.choose(&mut rng).expect("non-empty");
        let start = if rng.random_bool(0.5) {
            0
        } else {
            rng.random_range(0..path.len())
        };
        let len = draw_length(&mut rng, spec);
        let mut events: Vec<Element> = Vec::with_capacity(len);
        for k in 0..len {
            if let Some(prev) = events.last() {
                if rng.random_bool(spec.repeat_prob) {
                    events.push(prev.clone());
                    continue;
                }
            }
            let step = &path[(start + k) % path.len()];
            let g = if rng.random_bool(spec.noise) {
                *siblings(&geo, &hospitals, home)
                    .choose(&mut rng)
                    .expect("home is a sibling of itself")
            } else {
                home
            };
            let d = if rng.random_bool(spec.noise) {
                *siblings(&diag, &diagnoses, step.diag)
                    .choose(&mut rng)
                    .expect("non-empty")
            } else {
                step.diag
            };
            let mut procs: Vec<usize> = step
                .procs
                .iter()
                .copied()
                .filter(|_| !rng.random_bool(spec.noise))
                .collect();
            if rng.random_bool(spec.noise) {
                procs.push(rng.random_range(0..spec.procedures));
            }
            procs.sort_unstable();
            procs.dedup();
            let mut e = element(g, d, &procs);
            if events.last() == Some(&e) {
                // Only deliberate repeats may duplicate the previous stay.
                let toggle = (0..spec.procedures).find(|p| !procs.contains(p));
                match toggle {
                    Some(p) => procs.push(p),
                    None => {
                        procs.pop();
                    }
                }
                procs.sort_unstable();
                e = element(g, d, &procs);
            }
            events.push(e);
        }
        objects.push((format!("pt{:0width$}", pid + 1), Sequence::new(events)));
    }

    let field =
        |name: &str, kind: &str, taxonomy: Option<&str>, letter: &str, req: bool| FieldConfig {
            name: name.into(),
            kind: kind.into(),
            taxonomy: taxonomy.map(PathBuf::from),
            letter: Some(letter.into()),
            require_when_selected: req,
        };
    let config = ConfigFile {
        dataset: DATASET_FILE.into(),
        output: Some("concepts.jsonl".into()),
        rank_by: Some("stability".into()),
        theta: None,
        max_rep: None,
        limits: Limits::default(),
        fields: vec![
            field("geo", "taxonomy", Some(GEO_FILE), "G", false),
            field("reason", "taxonomy", Some(DIAG_FILE), "R", true),
            field("procedures", "itemset", None, "P", false),
            field("repetition", "interval", None, "I", false),
        ],
        projection: ProjectionConfig {
            shorthand: Some(spec.projection.clone()),
            ..ProjectionConfig::default()
        },
    };
    let config = toml::to_string(&config)
        .map_err(|e| Error::config(format!("cannot render config: {e}")))?;

    Ok(SyntheticFiles {
        geo_taxonomy: write_taxonomy(&geo),
        diag_taxonomy: write_taxonomy(&diag),
        dataset: write_dataset(&schema, &objects),
        config,
    })
}
