//! Command implementations behind the `seqlat` binary. Each command returns a
//! [`CommandOutcome`] instead of exiting, so tests can drive them directly.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use seqlat_core::io::synthetic::{generate, SyntheticSpec};
use seqlat_core::io::{
    load_context, load_dataset, parse_sequence, write_concepts, OutputOptions, RunConfig,
};
use seqlat_core::lattice::brute_force_concepts;
use seqlat_core::pstruct::{object_names, PatternStructure};
use seqlat_core::sequence::{render_pattern, run_length_encode};
use seqlat_core::stability::parse_theta;
use seqlat_core::{
    build_lattice, stability_exact, validate_lattice, AlphabetSchema, BuildOptions, Error,
    Projector, Result, Sequence, SequentialStructure,
};

/// Largest context `fca-check` will enumerate by brute force.
pub const FCA_CHECK_MAX_OBJECTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutcome {
    /// 0 success, 1 input or config error, 2 resource limit.
    pub exit_code: i32,
    /// Text printed before the summary (e.g. meet results).
    pub lines: Vec<String>,
    /// One machine-readable record.
    pub summary: Json,
}

impl CommandOutcome {
    fn ok(lines: Vec<String>, summary: Json) -> Self {
        CommandOutcome {
            exit_code: 0,
            lines,
            summary,
        }
    }

    fn failed(command: &str, err: &Error, mut extra: serde_json::Map<String, Json>) -> Self {
        let limit = err.is_limit();
        extra.insert("command".into(), json!(command));
        extra.insert(
            "status".into(),
            json!(if limit { "limit" } else { "error" }),
        );
        extra.insert("error".into(), json!(err.to_string()));
        CommandOutcome {
            exit_code: if limit { 2 } else { 1 },
            lines: Vec::new(),
            summary: Json::Object(extra),
        }
    }
}

/// Overrides applied on top of a run config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub min_len: Option<usize>,
    pub select: Option<Vec<String>>,
    pub require: Option<Vec<String>>,
    pub rle: Option<bool>,
    pub shorthand: Option<String>,
    pub theta: Option<String>,
    pub rank_by: Option<String>,
    pub max_concepts: Option<usize>,
    pub output: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        let p = &mut cfg.projection;
        if let Some(s) = &self.shorthand {
            p.shorthand = Some(s.clone());
            p.select = None;
            p.require = None;
            p.min_len = None;
            p.rle = None;
        }
        if let Some(l) = self.min_len {
            p.min_len = Some(l);
        }
        if let Some(sel) = &self.select {
            p.select = Some(sel.iter().cloned().collect::<BTreeSet<_>>());
        }
        if let Some(req) = &self.require {
            p.require = Some(req.iter().cloned().collect::<BTreeSet<_>>());
        }
        if let Some(r) = self.rle {
            p.rle = Some(r);
        }
        if let Some(t) = &self.theta {
            cfg.theta = Some(parse_theta(t)?);
        }
        if let Some(r) = &self.rank_by {
            cfg.rank_by = r.parse()?;
        }
        if let Some(m) = self.max_concepts {
            cfg.max_concepts = m;
        }
        if let Some(o) = &self.output {
            cfg.output = Some(o.clone());
        }
        cfg.projection_spec()?;
        Ok(())
    }
}

fn load_config(path: &Path, overrides: &Overrides) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    overrides.apply(&mut cfg)?;
    Ok(cfg)
}

fn ms(t: Instant) -> f64 {
    (t.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

#[derive(Debug, Clone, Default)]
pub struct MineArgs {
    pub config: PathBuf,
    pub overrides: Overrides,
    /// Re-derive every closure and cover edge after mining.
    pub validate: bool,
}

/// Load, project, mine, compute stability, rank and write.
pub fn cmd_mine(args: &MineArgs) -> CommandOutcome {
    let mut timing = serde_json::Map::new();
    match mine(args, &mut timing) {
        Ok(summary) => CommandOutcome::ok(Vec::new(), summary),
        Err(e) => {
            let mut extra = serde_json::Map::new();
            extra.insert("timing_ms".into(), Json::Object(timing));
            CommandOutcome::failed("mine", &e, extra)
        }
    }
}

fn mine(args: &MineArgs, timing: &mut serde_json::Map<String, Json>) -> Result<Json> {
    let t = Instant::now();
    let cfg = load_config(&args.config, &args.overrides)?;
    let spec = cfg.projection_spec()?;
    let objects = load_dataset(&cfg.schema, &cfg.dataset)?;
    if let Some(limit) = cfg.max_objects {
        if objects.len() > limit {
            return Err(Error::ObjectLimit {
                limit,
                found: objects.len(),
            });
        }
    }
    let ps = SequentialStructure::new(cfg.schema.clone(), &spec, objects)?;
    timing.insert("load".into(), json!(ms(t)));

    let t = Instant::now();
    let lat = build_lattice(
        &ps,
        BuildOptions {
            max_concepts: cfg.max_concepts,
        },
    )?;
    timing.insert("mine".into(), json!(ms(t)));

    if args.validate {
        let t = Instant::now();
        let violations = validate_lattice(&ps, &lat);
        timing.insert("validate".into(), json!(ms(t)));
        if let Some(v) = violations.first() {
            return Err(Error::InvalidLattice(format!(
                "{} violations, first: {v}",
                violations.len()
            )));
        }
    }

    let t = Instant::now();
    let report = stability_exact(&lat)?;
    timing.insert("stability".into(), json!(ms(t)));

    let t = Instant::now();
    let opts = OutputOptions {
        rank_by: cfg.rank_by,
        theta: cfg.theta.clone(),
        include_empty: false,
        projection: Some(spec.clone()),
    };
    let records = match &cfg.output {
        Some(out) => Some(write_concepts(out, &ps, &lat, &report, &opts)?),
        None => None,
    };
    timing.insert("write".into(), json!(ms(t)));

    let sizes: Vec<(usize, usize)> = (0..ps.object_count())
        .filter_map(|g| {
            ps.description(g)
                .pattern()
                .map(|p| (p.len(), p.element_count()))
        })
        .collect();
    let intent_sizes: Vec<(usize, usize)> = lat
        .concepts()
        .iter()
        .filter_map(|c| c.intent.pattern().map(|p| (p.len(), p.element_count())))
        .collect();
    let max =
        |v: &[(usize, usize)], f: fn(&(usize, usize)) -> usize| v.iter().map(f).max().unwrap_or(0);

    Ok(json!({
        "command": "mine",
        "status": "ok",
        "objects": ps.object_count(),
        "concepts": lat.len(),
        "edges": lat.edge_count(),
        "records": records,
        "output": cfg.output.as_ref().map(|p| p.display().to_string()),
        "projection": spec,
        "rank_by": cfg.rank_by.to_string(),
        "theta": cfg.theta.as_ref().map(ToString::to_string),
        "validated": args.validate,
        "description_sizes": {
            "max_object_sequences": max(&sizes, |s| s.0),
            "max_object_elements": max(&sizes, |s| s.1),
            "max_intent_sequences": max(&intent_sizes, |s| s.0),
            "max_intent_elements": max(&intent_sizes, |s| s.1),
        },
        "timing_ms": Json::Object(timing.clone()),
    }))
}

#[derive(Debug, Clone, Default)]
pub struct MeetArgs {
    /// Supplies the schema and, for object ids, the dataset.
    pub config: PathBuf,
    /// Inline `<...>` sequences or object ids from the dataset.
    pub a: String,
    pub b: String,
    pub overrides: Overrides,
}

fn resolve_sequence(
    schema: &AlphabetSchema,
    text: &str,
    dataset: &mut Option<Vec<(String, Sequence)>>,
    path: &Path,
) -> Result<Sequence> {
    if text.trim_start().starts_with('<') {
        return parse_sequence(schema, text);
    }
    if dataset.is_none() {
        *dataset = Some(load_dataset(schema, path)?);
    }
    dataset
        .as_ref()
        .expect("loaded above")
        .iter()
        .find(|(id, _)| id == text)
        .map(|(_, s)| s.clone())
        .ok_or_else(|| Error::Input(format!("unknown object id `{text}` in {}", path.display())))
}

/// Prints the projected pattern meet of two sequences.
pub fn cmd_meet(args: &MeetArgs) -> CommandOutcome {
    match meet(args) {
        Ok((lines, summary)) => CommandOutcome::ok(lines, summary),
        Err(e) => CommandOutcome::failed("meet", &e, serde_json::Map::new()),
    }
}

fn meet(args: &MeetArgs) -> Result<(Vec<String>, Json)> {
    let cfg = load_config(&args.config, &args.overrides)?;
    let spec = cfg.projection_spec()?;
    let schema = &cfg.schema;
    let projector = Projector::new(schema, &spec)?;
    let mut dataset = None;
    let mut describe = |text: &str| -> Result<_> {
        let raw = resolve_sequence(schema, text, &mut dataset, &cfg.dataset)?;
        let raw = if projector.rle() {
            run_length_encode(schema, &raw)?
        } else {
            raw
        };
        Ok(projector.describe(schema, &raw))
    };
    let da = describe(&args.a)?;
    let db = describe(&args.b)?;
    let m = projector.meet(schema, &da, &db);
    let lines = render_pattern(schema, &m);
    let summary = json!({
        "command": "meet",
        "status": "ok",
        "a": render_pattern(schema, &da),
        "b": render_pattern(schema, &db),
        "meet": lines,
        "projection": spec,
    });
    Ok((lines, summary))
}

/// Mines a binary context with the lattice engine and by brute force and
/// compares the two.
pub fn cmd_fca_check(path: &Path) -> CommandOutcome {
    match fca_check(path) {
        Ok(outcome) => outcome,
        Err(e) => CommandOutcome::failed("fca-check", &e, serde_json::Map::new()),
    }
}

fn fca_check(path: &Path) -> Result<CommandOutcome> {
    let ctx = load_context(path)?;
    let ps = ctx.as_pattern_structure();
    if ps.object_count() > FCA_CHECK_MAX_OBJECTS {
        return Err(Error::Input(format!(
            "fca-check enumerates every object subset; {} objects exceeds the limit of {FCA_CHECK_MAX_OBJECTS}",
            ps.object_count()
        )));
    }
    let lat = build_lattice(&ps, BuildOptions::default())?;
    let brute = brute_force_concepts(&ps, FCA_CHECK_MAX_OBJECTS)?;
    let report = stability_exact(&lat)?;

    let mut differences = Vec::new();
    for (extent, intent) in &brute {
        match lat.find_extent(extent) {
            Some(id) if lat.concepts()[id].intent == *intent => {}
            Some(id) => differences.push(json!({
                "extent": object_names(&ps, extent),
                "expected_intent": ps.render(intent),
                "engine_intent": ps.render(&lat.concepts()[id].intent),
            })),
            None => differences.push(json!({
                "extent": object_names(&ps, extent),
                "expected_intent": ps.render(intent),
                "engine_intent": null,
            })),
        }
    }
    if lat.len() != brute.len() && differences.is_empty() {
        differences
            .push(json!({ "engine_concepts": lat.len(), "brute_force_concepts": brute.len() }));
    }
    let violations: Vec<String> = validate_lattice(&ps, &lat)
        .iter()
        .map(ToString::to_string)
        .collect();
    let agree = differences.is_empty() && violations.is_empty();

    let concepts: Vec<Json> = lat
        .concepts()
        .iter()
        .map(|c| {
            let s = report.get(c.id);
            json!({
                "id": c.id,
                "extent": object_names(&ps, &c.extent),
                "intent": ps.render(&c.intent),
                "stability": s.stability_f64(),
                "stability_num": s.count.to_string(),
                "stability_den": s.total.to_string(),
            })
        })
        .collect();
    let summary = json!({
        "command": "fca-check",
        "status": if agree { "ok" } else { "disagree" },
        "agree": agree,
        "objects": ctx.objects().len(),
        "attributes": ctx.attributes().len(),
        "incidences": ctx.incidence_count(),
        "concepts": lat.len(),
        "brute_force_concepts": brute.len(),
        "differences": differences,
        "violations": violations,
        "stability": concepts,
    });
    Ok(CommandOutcome {
        exit_code: if agree { 0 } else { 1 },
        lines: Vec::new(),
        summary,
    })
}

#[derive(Debug, Clone, Default)]
pub struct GenArgs {
    /// TOML synthetic spec; without it, defaults with `seed` are used.
    pub spec: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub patients: Option<usize>,
}

/// Writes a synthetic dataset, its taxonomies and a config.
pub fn cmd_gen(args: &GenArgs) -> CommandOutcome {
    match gen(args) {
        Ok(summary) => CommandOutcome::ok(Vec::new(), summary),
        Err(e) => CommandOutcome::failed("gen", &e, serde_json::Map::new()),
    }
}

fn gen(args: &GenArgs) -> Result<Json> {
    let mut spec = match (&args.spec, args.seed) {
        (Some(p), _) => SyntheticSpec::load(p)?,
        (None, Some(seed)) => SyntheticSpec::with_seed(seed),
        (None, None) => return Err(Error::Config("gen needs a spec file or --seed".into())),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(n) = args.patients {
        spec.patients = n;
    }
    let files = generate(&spec)?;
    let paths = files.write_to(&args.out_dir)?;
    let mut checksums = serde_json::Map::new();
    for (p, text) in paths.iter().zip([
        &files.geo_taxonomy,
        &files.diag_taxonomy,
        &files.dataset,
        &files.config,
    ]) {
        let name = p
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        checksums.insert(name, json!(hex::encode(Sha256::digest(text.as_bytes()))));
    }
    Ok(json!({
        "command": "gen",
        "status": "ok",
        "seed": spec.seed,
        "patients": spec.patients,
        "paths": paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "sha256": checksums,
    }))
}

/// Applies `--threads`: caps rayon's global pool. Zero keeps the default.
pub fn configure_threads(threads: usize) -> Result<()> {
    if threads == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot set thread count: {e}")))
}
