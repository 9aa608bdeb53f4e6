//! File formats: taxonomies, sequence datasets, binary contexts, run
//! configs, concept output and the synthetic data generator.

use std::path::Path;

use crate::error::{Error, Result};

pub mod config;
pub mod context;
pub mod dataset;
pub mod output;
pub mod syntax;
pub mod synthetic;
pub mod taxonomy;

pub use config::{FieldConfig, ProjectionConfig, RunConfig};
pub use context::{load_context, parse_context, write_context};
pub use dataset::{load_dataset, parse_dataset, write_dataset};
pub use output::{
    dump_lattice, render_concepts, write_concepts, ConceptRecord, OutputHeader, OutputOptions,
};
pub use syntax::{parse_element, parse_sequence};
pub use synthetic::{generate, SyntheticFiles, SyntheticSpec};
pub use taxonomy::{load_taxonomy, parse_taxonomy, write_taxonomy};

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Lines without their terminators, numbered from 1.
pub(crate) fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
}
