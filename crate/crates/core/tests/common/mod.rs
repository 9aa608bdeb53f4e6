//! Shared helpers for the integration suites: fixture paths, a random corpus
//! of small sequence datasets and formal contexts, and brute-force oracles
//! that work on their own plain representation of events.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqlat_core::io::RunConfig;
use seqlat_core::lattice::Lattice;
use seqlat_core::pstruct::{extent_to_intent, PatternStructure};
use seqlat_core::{
    AlphabetSchema, Element, FieldKind, FieldSpec, FormalContext, ItemSet, Pattern, ProjectionSpec,
    Sequence, Taxonomy, Value,
};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn toy_config(name: &str) -> RunConfig {
    RunConfig::load(fixture(name)).expect("fixture config loads")
}

/// A plain event: taxonomy node name and item names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ev {
    pub node: String,
    pub items: BTreeSet<String>,
}

pub type Seq = Vec<Ev>;

/// A tiny alphabet: one taxonomy field `geo` and one itemset field `proc`.
#[derive(Debug, Clone)]
pub struct Mini {
    pub schema: Arc<AlphabetSchema>,
    /// child -> parent
    pub parent: BTreeMap<String, String>,
}

pub const ROOT: &str = "*";
pub const ITEMS: [&str; 3] = ["a", "b", "c"];

impl Mini {
    /// `chain` picks `* > A > B`; otherwise `A` and `B` are siblings under `*`.
    pub fn new(chain: bool) -> Self {
        let edges: Vec<(&str, &str)> = if chain {
            vec![("A", ROOT), ("B", "A")]
        } else {
            vec![("A", ROOT), ("B", ROOT)]
        };
        let tax = Taxonomy::from_edges("geo", ROOT, &edges).unwrap();
        let schema = AlphabetSchema::new(vec![
            FieldSpec::new("geo", FieldKind::Taxonomy(Arc::new(tax))),
            FieldSpec::new("proc", FieldKind::ItemSet),
        ])
        .unwrap();
        let parent = edges
            .iter()
            .map(|(c, p)| (c.to_string(), p.to_string()))
            .collect();
        Mini {
            schema: Arc::new(schema),
            parent,
        }
    }

    fn taxonomy(&self) -> &Taxonomy {
        match &self.schema.fields()[0].kind {
            FieldKind::Taxonomy(t) => t,
            _ => unreachable!(),
        }
    }

    pub fn element(&self, ev: &Ev) -> Element {
        let node = self.taxonomy().node(&ev.node).unwrap();
        Element::new(vec![
            Value::Node(node),
            Value::Items(ItemSet::new(ev.items.iter().map(String::as_str))),
        ])
    }

    pub fn sequence(&self, s: &[Ev]) -> Sequence {
        s.iter().map(|e| self.element(e)).collect()
    }

    pub fn plain(&self, s: &Sequence) -> Seq {
        s.elements()
            .iter()
            .map(|e| match (&e.values[0], &e.values[1]) {
                (Value::Node(n), Value::Items(items)) => Ev {
                    node: self.taxonomy().node_name(*n).to_string(),
                    items: items.iter().map(str::to_string).collect(),
                },
                v => panic!("unexpected values {v:?}"),
            })
            .collect()
    }

    pub fn plain_pattern(&self, p: &Pattern) -> BTreeSet<Seq> {
        p.sequences().iter().map(|s| self.plain(s)).collect()
    }

    fn ancestors(&self, node: &str) -> Vec<String> {
        let mut out = vec![node.to_string()];
        while let Some(p) = self.parent.get(out.last().unwrap()) {
            out.push(p.clone());
        }
        out
    }

    /// `a` is at least as general as `b`.
    pub fn ev_leq(&self, a: &Ev, b: &Ev) -> bool {
        self.ancestors(&b.node).contains(&a.node) && a.items.is_subset(&b.items)
    }

    pub fn ev_meet(&self, a: &Ev, b: &Ev) -> Ev {
        let up = self.ancestors(&b.node);
        let node = self
            .ancestors(&a.node)
            .into_iter()
            .find(|n| up.contains(n))
            .unwrap();
        Ev {
            node,
            items: a.items.intersection(&b.items).cloned().collect(),
        }
    }

    pub fn is_bottom(&self, e: &Ev) -> bool {
        e.node == ROOT && e.items.is_empty()
    }

    /// Every length-|x| window of `y`, compared element by element.
    pub fn embeds(&self, x: &[Ev], y: &[Ev]) -> bool {
        x.len() <= y.len()
            && (0..=y.len() - x.len())
                .any(|k| x.iter().zip(&y[k..]).all(|(a, b)| self.ev_leq(a, b)))
    }

    pub fn pattern_embeds(&self, x: &BTreeSet<Seq>, y: &BTreeSet<Seq>) -> bool {
        x.iter().all(|s| y.iter().any(|t| self.embeds(s, t)))
    }

    /// Maximal common contiguous subsequences of two sequence sets, from the
    /// element-wise meets of every pair of equal-length windows.
    pub fn meet_oracle(&self, xs: &BTreeSet<Seq>, ys: &BTreeSet<Seq>) -> BTreeSet<Seq> {
        let mut common = BTreeSet::new();
        for s in xs {
            for t in ys {
                for len in 1..=s.len().min(t.len()) {
                    for i in 0..=s.len() - len {
                        for j in 0..=t.len() - len {
                            let mut run = Vec::new();
                            for k in 0..len {
                                let m = self.ev_meet(&s[i + k], &t[j + k]);
                                if self.is_bottom(&m) {
                                    if !run.is_empty() {
                                        common.insert(std::mem::take(&mut run));
                                    }
                                } else {
                                    run.push(m);
                                }
                            }
                            if !run.is_empty() {
                                common.insert(run);
                            }
                        }
                    }
                }
            }
        }
        self.maximal(common)
    }

    pub fn maximal(&self, seqs: BTreeSet<Seq>) -> BTreeSet<Seq> {
        seqs.iter()
            .filter(|s| !seqs.iter().any(|t| t != *s && self.embeds(s, t)))
            .cloned()
            .collect()
    }

    pub fn random_ev(&self, rng: &mut impl Rng) -> Ev {
        let node = ["*", "A", "B"][rng.random_range(0..3)].to_string();
        let items = ITEMS
            .iter()
            .filter(|_| rng.random_bool(0.5))
            .map(|s| s.to_string())
            .collect();
        Ev { node, items }
    }
}

/// A mini dataset: 1 to 5 objects, sequences of 0 to 5 events.
#[derive(Debug, Clone)]
pub struct MiniDataset {
    pub mini: Mini,
    pub objects: Vec<Seq>,
}

impl MiniDataset {
    pub fn named(&self) -> Vec<(String, Sequence)> {
        self.objects
            .iter()
            .enumerate()
            .map(|(i, s)| (format!("o{i}"), self.mini.sequence(s)))
            .collect()
    }
}

fn ev_from(node: u8, mask: u8) -> Ev {
    Ev {
        node: ["*", "A", "B"][node as usize].to_string(),
        items: ITEMS
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, s)| s.to_string())
            .collect(),
    }
}

pub fn mini_dataset() -> impl Strategy<Value = MiniDataset> {
    let ev = (0u8..3, 0u8..8).prop_map(|(n, m)| ev_from(n, m));
    (
        any::<bool>(),
        prop::collection::vec(prop::collection::vec(ev, 0..=5), 1..=5),
    )
        .prop_map(|(chain, objects)| MiniDataset {
            mini: Mini::new(chain),
            objects,
        })
}

/// The seeded corpus used by the suites that want a fixed sample.
pub fn seeded_datasets(count: u64) -> Vec<MiniDataset> {
    (0..count)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mini = Mini::new(rng.random_bool(0.5));
            let n = rng.random_range(1..=5);
            let objects = (0..n)
                .map(|_| {
                    let len = rng.random_range(0..=5);
                    (0..len).map(|_| mini.random_ev(&mut rng)).collect()
                })
                .collect();
            MiniDataset { mini, objects }
        })
        .collect()
}

/// Random formal context with at most `max_objects` objects.
pub fn random_context(seed: u64, max_objects: usize) -> FormalContext {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = rng.random_range(0..=max_objects);
    let m = rng.random_range(1..=8);
    let density = rng.random_range(0.1..0.8);
    let mut inc = Vec::new();
    for i in 0..g {
        for j in 0..m {
            if rng.random_bool(density) {
                inc.push((i, j));
            }
        }
    }
    FormalContext::new(
        (0..g).map(|i| format!("g{i}")).collect(),
        (0..m).map(|j| format!("m{j}")).collect(),
        inc,
    )
    .unwrap()
}

/// Projections exercised by the suites, with a label for messages.
pub fn projections() -> Vec<(String, ProjectionSpec)> {
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    let mut out: Vec<(String, ProjectionSpec)> = (0..=5)
        .map(|l| (format!("mlp{l}"), ProjectionSpec::mlp(l)))
        .collect();
    let select_proc = ProjectionSpec {
        select: Some(set(&["proc"])),
        ..ProjectionSpec::default()
    };
    let select_geo = ProjectionSpec {
        select: Some(set(&["geo"])),
        ..ProjectionSpec::default()
    };
    let require_geo = ProjectionSpec {
        require: set(&["geo"]),
        ..ProjectionSpec::default()
    };
    let drop_b = ProjectionSpec {
        drop_items: [("proc".to_string(), set(&["b"]))].into(),
        ..ProjectionSpec::default()
    };
    out.push(("select-proc".into(), select_proc.clone()));
    out.push(("select-geo".into(), select_geo.clone()));
    out.push(("require-geo".into(), require_geo.clone()));
    out.push(("drop-b".into(), drop_b.clone()));
    out.push((
        "require-geo+mlp2".into(),
        ProjectionSpec {
            min_len: 2,
            ..require_geo.clone()
        },
    ));
    out.push((
        "select-proc+mlp3".into(),
        ProjectionSpec {
            min_len: 3,
            ..select_proc
        },
    ));
    out.push((
        "select-geo+require-geo".into(),
        ProjectionSpec {
            require: set(&["geo"]),
            ..select_geo
        },
    ));
    out.push((
        "drop-b+require-geo+mlp2".into(),
        ProjectionSpec {
            min_len: 2,
            ..ProjectionSpec {
                drop_items: drop_b.drop_items,
                ..require_geo
            }
        },
    ));
    out
}

/// Meet-closure of a set of patterns (the patterns themselves included).
pub fn meet_closure(schema: &AlphabetSchema, seeds: &[Pattern]) -> Vec<Pattern> {
    let mut all: BTreeSet<Pattern> = seeds.iter().cloned().collect();
    loop {
        let current: Vec<Pattern> = all.iter().cloned().collect();
        let before = all.len();
        for (i, x) in current.iter().enumerate() {
            for y in &current[i + 1..] {
                all.insert(seqlat_core::sequence::pattern_meet(schema, x, y));
            }
        }
        if all.len() == before {
            return all.into_iter().collect();
        }
    }
}

/// Exact stability of every concept by enumerating the subsets of its extent.
pub fn stability_oracle<P: PatternStructure>(
    ps: &P,
    lat: &Lattice<P::Description>,
) -> Vec<(u64, u64)> {
    lat.concepts()
        .iter()
        .map(|c| {
            let members: Vec<usize> = c.extent.ones().collect();
            let n = members.len();
            assert!(n < 20, "oracle limited to small extents");
            let mut count = 0u64;
            for mask in 0u64..1 << n {
                let mut sub = seqlat_core::ObjectSet::with_capacity(ps.object_count());
                for (k, &g) in members.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        sub.insert(g);
                    }
                }
                if extent_to_intent(ps, &sub) == c.intent {
                    count += 1;
                }
            }
            (count, 1u64 << n)
        })
        .collect()
}
