//! Fixed worked examples loaded from the fixture files.

mod common;

use std::collections::BTreeSet;

use num_rational::BigRational;
use seqlat_core::io::{dump_lattice, load_context, load_dataset, parse_sequence};
use seqlat_core::lattice::brute_force_concepts;
use seqlat_core::pstruct::{object_names, objects_by_name};
use seqlat_core::sequence::{maximal_antichain, pattern_meet, render_pattern};
use seqlat_core::stability::{md, md_threshold, md_threshold_real, parse_theta};
use seqlat_core::{
    build_lattice, stability_exact, validate_lattice, BuildOptions, Description, Lattice, Pattern,
    PatternStructure, SequentialStructure,
};

use common::{fixture, toy_config};

fn toy(config: &str) -> SequentialStructure {
    let cfg = toy_config(config);
    let objects = load_dataset(&cfg.schema, &cfg.dataset).unwrap();
    SequentialStructure::new(cfg.schema.clone(), &cfg.projection_spec().unwrap(), objects).unwrap()
}

fn pattern(ps: &SequentialStructure, seqs: &[&str]) -> Pattern {
    maximal_antichain(
        ps.schema(),
        seqs.iter().map(|s| parse_sequence(ps.schema(), s).unwrap()),
    )
}

fn extents<D>(ps: &impl PatternStructure, lat: &Lattice<D>) -> BTreeSet<Vec<String>> {
    lat.concepts()
        .iter()
        .map(|c| object_names(ps, &c.extent))
        .collect()
}

fn names(xs: &[&[&str]]) -> BTreeSet<Vec<String>> {
    xs.iter()
        .map(|e| e.iter().map(|s| s.to_string()).collect())
        .collect()
}

#[test]
fn small_context_lattice_and_derivations() {
    let ctx = load_context(fixture("small.tsv")).unwrap();
    assert_eq!(ctx.incidence_count(), 7);
    assert_eq!(ctx.derive_object_names(&["g1", "g2"]).unwrap(), ["m4"]);
    assert_eq!(
        ctx.derive_attribute_names(&["m4"]).unwrap(),
        ["g1", "g2", "g4"]
    );
    let ps = ctx.as_pattern_structure();
    let lat = build_lattice(&ps, BuildOptions::default()).unwrap();
    assert_eq!(lat.len(), 6);
    let oracle = brute_force_concepts(&ps, 20).unwrap();
    let mined: BTreeSet<_> = lat
        .concepts()
        .iter()
        .map(|c| c.extent.ones().collect::<Vec<_>>())
        .collect();
    let expected: BTreeSet<_> = oracle
        .iter()
        .map(|(e, _)| e.ones().collect::<Vec<_>>())
        .collect();
    assert_eq!(mined, expected);
    assert_eq!(
        extents(&ps, &lat),
        names(&[
            &[],
            &["g1"],
            &["g3"],
            &["g2", "g4"],
            &["g1", "g2", "g4"],
            &["g1", "g2", "g3", "g4"]
        ])
    );
    assert!(validate_lattice(&ps, &lat).is_empty());
}

#[test]
fn star_context_stability() {
    let ctx = load_context(fixture("star.cxt")).unwrap();
    assert_eq!(ctx.incidence_count(), 9);
    let ps = ctx.as_pattern_structure();
    let lat = build_lattice(&ps, BuildOptions::default()).unwrap();
    assert_eq!(lat.len(), 8);
    let rep = stability_exact(&lat).unwrap();
    let ext = objects_by_name(&ps, &["g1", "g2", "g3", "g4"]).unwrap();
    let c = lat.find_extent(&ext).unwrap();
    assert_eq!(
        rep.get(c).stability(),
        BigRational::new(11.into(), 16.into())
    );
    assert_eq!(md(&lat, c).unwrap(), Some(3));
    assert_eq!(rep.get(c).bound(), BigRational::new(7.into(), 8.into()));
}

#[test]
fn threshold_at_097() {
    assert!((md_threshold_real(0.97) - 5.06).abs() < 0.005);
    assert_eq!(md_threshold(&parse_theta("0.97").unwrap()).unwrap(), 6);
}

#[test]
fn toy_meets() {
    let ps = toy("toy_identity.toml");
    let d = |g: usize| ps.description(g).pattern().unwrap().clone();
    let (p1, p2, p3) = (d(0), d(1), d(2));
    let m23 = pattern_meet(ps.schema(), &p2, &p3);
    let ss678 = pattern(
        &ps,
        &[
            "<[*,{c,d}];[CL,{b}];[CL,{a}]>",
            "<[CL,{}];[CL,{a,d}]>",
            "<[CL,{d}];[CL,{}]>",
        ],
    );
    assert_eq!(m23, ss678);
    let ss45 = pattern(&ps, &["<[*,{c,d}];[*,{b}]>", "<[*,{a}]>"]);
    assert_eq!(pattern_meet(ps.schema(), &m23, &p1), ss45);
    let ss4_12 = pattern(&ps, &["<[*,{c,d}];[*,{b}]>", "<[*,{a}];[*,{d}]>"]);
    assert_eq!(pattern_meet(ps.schema(), &p1, &p3), ss4_12);
    assert_eq!(pattern_meet(ps.schema(), &p1, &p1), p1);
}

#[test]
fn identity_lattice() {
    let ps = toy("toy_identity.toml");
    let lat = build_lattice(&ps, BuildOptions::default()).unwrap();
    assert_eq!(lat.len(), 8);
    assert_eq!(brute_force_concepts(&ps, 20).unwrap().len(), 8);
    let top = &lat.concepts()[lat.top()];
    let ss45 = pattern(&ps, &["<[*,{c,d}];[*,{b}]>", "<[*,{a}]>"]);
    assert_eq!(top.intent, Description::Pattern(ss45));
    let rep = stability_exact(&lat).unwrap();
    assert_eq!(
        rep.get(lat.top()).stability(),
        BigRational::new(1.into(), 8.into())
    );
}

#[test]
fn mlp3_lattice_matches_golden_dump() {
    let ps = toy("toy_mlp3.toml");
    let lat = build_lattice(&ps, BuildOptions::default()).unwrap();
    assert_eq!(lat.len(), 7);
    let pair = lat
        .find_extent(&objects_by_name(&ps, &["p2", "p3"]).unwrap())
        .unwrap();
    let intent = lat.concepts()[pair].intent.pattern().unwrap();
    assert_eq!(
        render_pattern(ps.schema(), intent),
        ["<[*,{c,d}];[CL,{b}];[CL,{a}]>"]
    );
    let path = fixture("toy_mlp3.lattice.jsonl");
    if std::env::var_os("SEQLAT_BLESS").is_some() {
        std::fs::write(&path, dump_lattice(&ps, &lat)).unwrap();
    }
    assert_eq!(
        dump_lattice(&ps, &lat),
        std::fs::read_to_string(path).unwrap()
    );
}

#[test]
fn require_geo_lattice() {
    let ps = toy("toy_geo.toml");
    let lat = build_lattice(&ps, BuildOptions::default()).unwrap();
    let expected = names(&[
        &[],
        &["p1"],
        &["p2"],
        &["p3"],
        &["p1", "p2"],
        &["p2", "p3"],
        &["p1", "p2", "p3"],
    ]);
    assert_eq!(extents(&ps, &lat), expected);
    let pair = lat
        .find_extent(&objects_by_name(&ps, &["p2", "p3"]).unwrap())
        .unwrap();
    let ss7_8_10 = pattern(
        &ps,
        &[
            "<[CL,{b}];[CL,{a}]>",
            "<[CL,{}];[CL,{a,d}]>",
            "<[CL,{d}];[CL,{}]>",
        ],
    );
    assert_eq!(lat.concepts()[pair].intent, Description::Pattern(ss7_8_10));
}
