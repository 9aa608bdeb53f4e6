//! Inputs shared by the criterion benches.

use std::path::PathBuf;

use seqlat_core::io::synthetic::CONFIG_FILE;
use seqlat_core::io::{generate, load_dataset, RunConfig, SyntheticSpec};
use seqlat_core::{Result, SequentialStructure};

/// Generates a seeded synthetic dataset under the system temp directory and
/// builds its pattern structure with the projection `shorthand`. Input
/// sequences are run-length encoded.
pub fn synthetic_structure(
    seed: u64,
    patients: usize,
    shorthand: &str,
) -> Result<SequentialStructure> {
    let mut spec = SyntheticSpec::with_seed(seed);
    spec.patients = patients;
    let dir: PathBuf = std::env::temp_dir().join(format!(
        "seqlat-bench-{seed}-{patients}-{}",
        std::process::id()
    ));
    generate(&spec)?.write_to(&dir)?;
    let mut cfg = RunConfig::load(dir.join(CONFIG_FILE))?;
    cfg.projection.shorthand = Some(shorthand.to_string());
    cfg.projection.rle = Some(true);
    let objects = load_dataset(&cfg.schema, &cfg.dataset)?;
    let ps = SequentialStructure::new(cfg.schema.clone(), &cfg.projection_spec()?, objects);
    let _ = std::fs::remove_dir_all(&dir);
    ps
}
