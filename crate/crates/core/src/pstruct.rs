//! Pattern structures `(G, (D, ⊓), δ)` and their Galois operators.
//!
//! The lattice engine is generic over [`PatternStructure`]. Two instances are
//! provided: [`SequentialStructure`] (projected sequential descriptions) and
//! [`ContextStructure`] (a binary formal context with set intersection).

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::alphabet::AlphabetSchema;
use crate::error::{Error, Result};
use crate::projection::{ProjectionSpec, Projector};
use crate::sequence::{pattern_leq, render_pattern, run_length_encode, Pattern, Sequence};

/// A set of object indices.
pub type ObjectSet = FixedBitSet;

pub trait PatternStructure: Sync {
    type Description: Clone + Eq + Hash + Debug + Send + Sync;

    fn object_count(&self) -> usize;
    fn object_name(&self, g: usize) -> &str;
    fn description(&self, g: usize) -> &Self::Description;
    fn meet(&self, a: &Self::Description, b: &Self::Description) -> Self::Description;
    /// Subsumption `a ⊑ b` (`a` is more general).
    fn leq(&self, a: &Self::Description, b: &Self::Description) -> bool;
    /// Description of the empty object set: neutral for the meet.
    fn top(&self) -> Self::Description;
    /// Text form of a description; `None` for the synthetic top.
    fn render(&self, d: &Self::Description) -> Option<Vec<String>>;

    fn object_index(&self, name: &str) -> Option<usize> {
        (0..self.object_count()).find(|&g| self.object_name(g) == name)
    }
}

/// `A^⋄`: the meet of the descriptions of `objects`, top for the empty set.
pub fn extent_to_intent<P: PatternStructure>(ps: &P, objects: &ObjectSet) -> P::Description {
    let mut it = objects.ones();
    let Some(first) = it.next() else {
        return ps.top();
    };
    it.fold(ps.description(first).clone(), |acc, g| {
        ps.meet(&acc, ps.description(g))
    })
}

/// `d^⋄`: every object whose description subsumes `d`.
pub fn intent_to_extent<P: PatternStructure>(ps: &P, d: &P::Description) -> ObjectSet {
    let mut out = ObjectSet::with_capacity(ps.object_count());
    for g in 0..ps.object_count() {
        if ps.leq(d, ps.description(g)) {
            out.insert(g);
        }
    }
    out
}

/// Resolves object names to an [`ObjectSet`].
pub fn objects_by_name<P: PatternStructure>(ps: &P, names: &[&str]) -> Result<ObjectSet> {
    let mut out = ObjectSet::with_capacity(ps.object_count());
    for name in names {
        let g = ps
            .object_index(name)
            .ok_or_else(|| Error::input(format!("unknown object id `{name}`")))?;
        out.insert(g);
    }
    Ok(out)
}

pub fn object_names<P: PatternStructure>(ps: &P, set: &ObjectSet) -> Vec<String> {
    set.ones().map(|g| ps.object_name(g).to_string()).collect()
}

/// A sequential description: either a pattern or the synthetic top `⊤_D`
/// (below every pattern in generality, `⊤ ⊓ x = x`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Description {
    Top,
    Pattern(Pattern),
}

impl Description {
    pub fn pattern(&self) -> Option<&Pattern> {
        match self {
            Description::Top => None,
            Description::Pattern(p) => Some(p),
        }
    }
}

/// Sequential pattern structure with object descriptions `ψ ∘ δ`.
#[derive(Debug, Clone)]
pub struct SequentialStructure {
    schema: Arc<AlphabetSchema>,
    spec: ProjectionSpec,
    projector: Projector,
    names: Vec<String>,
    index: HashMap<String, usize>,
    descriptions: Vec<Description>,
}

impl SequentialStructure {
    /// Projects every raw object sequence once (after run-length encoding when
    /// the spec asks for it). Object order is kept.
    pub fn new(
        schema: Arc<AlphabetSchema>,
        spec: &ProjectionSpec,
        objects: Vec<(String, Sequence)>,
    ) -> Result<Self> {
        let projector = Projector::new(&schema, spec)?;
        let mut names = Vec::with_capacity(objects.len());
        let mut index = HashMap::with_capacity(objects.len());
        let mut descriptions = Vec::with_capacity(objects.len());
        for (name, raw) in objects {
            if index.insert(name.clone(), names.len()).is_some() {
                return Err(Error::input(format!("duplicate object id `{name}`")));
            }
            for e in raw.elements() {
                schema.check(e)?;
            }
            let raw = if projector.rle() {
                run_length_encode(&schema, &raw)?
            } else {
                raw
            };
            descriptions.push(Description::Pattern(projector.describe(&schema, &raw)));
            names.push(name);
        }
        Ok(SequentialStructure {
            schema,
            spec: spec.clone(),
            projector,
            names,
            index,
            descriptions,
        })
    }

    pub fn schema(&self) -> &AlphabetSchema {
        &self.schema
    }

    pub fn spec(&self) -> &ProjectionSpec {
        &self.spec
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }
}

impl PatternStructure for SequentialStructure {
    type Description = Description;

    fn object_count(&self) -> usize {
        self.names.len()
    }

    fn object_name(&self, g: usize) -> &str {
        &self.names[g]
    }

    fn object_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn description(&self, g: usize) -> &Description {
        &self.descriptions[g]
    }

    fn meet(&self, a: &Description, b: &Description) -> Description {
        match (a, b) {
            (Description::Top, x) | (x, Description::Top) => x.clone(),
            (Description::Pattern(x), Description::Pattern(y)) => {
                Description::Pattern(self.projector.meet(&self.schema, x, y))
            }
        }
    }

    fn leq(&self, a: &Description, b: &Description) -> bool {
        match (a, b) {
            (_, Description::Top) => true,
            (Description::Top, _) => false,
            (Description::Pattern(x), Description::Pattern(y)) => pattern_leq(&self.schema, x, y),
        }
    }

    fn top(&self) -> Description {
        Description::Top
    }

    fn render(&self, d: &Description) -> Option<Vec<String>> {
        d.pattern().map(|p| render_pattern(&self.schema, p))
    }
}

/// A binary formal context `(G, M, I)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    rows: Vec<FixedBitSet>,
}

impl FormalContext {
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<String>,
        incidence: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        for (kind, names) in [("object", &objects), ("attribute", &attributes)] {
            for (i, n) in names.iter().enumerate() {
                if names[..i].contains(n) {
                    return Err(Error::input(format!("duplicate {kind} `{n}`")));
                }
            }
        }
        let mut rows = vec![FixedBitSet::with_capacity(attributes.len()); objects.len()];
        for (g, m) in incidence {
            if g >= objects.len() || m >= attributes.len() {
                return Err(Error::input(format!(
                    "incidence ({g},{m}) outside the context"
                )));
            }
            rows[g].insert(m);
        }
        Ok(FormalContext {
            objects,
            attributes,
            rows,
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn incidence_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn has(&self, g: usize, m: usize) -> bool {
        self.rows[g].contains(m)
    }

    pub fn row(&self, g: usize) -> &FixedBitSet {
        &self.rows[g]
    }

    /// `A'`: attributes shared by every object of `objects`.
    pub fn derive_objects(&self, objects: &ObjectSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.attributes.len());
        out.insert_range(..);
        for g in objects.ones() {
            out.intersect_with(&self.rows[g]);
        }
        out
    }

    /// `B'`: objects having every attribute of `attrs`.
    pub fn derive_attributes(&self, attrs: &FixedBitSet) -> ObjectSet {
        let mut out = ObjectSet::with_capacity(self.objects.len());
        for (g, row) in self.rows.iter().enumerate() {
            if attrs.is_subset(row) {
                out.insert(g);
            }
        }
        out
    }

    fn lookup(names: &[String], wanted: &[&str], kind: &str) -> Result<FixedBitSet> {
        let mut out = FixedBitSet::with_capacity(names.len());
        for w in wanted {
            let i = names
                .iter()
                .position(|n| n == w)
                .ok_or_else(|| Error::input(format!("unknown {kind} `{w}`")))?;
            out.insert(i);
        }
        Ok(out)
    }

    /// [`derive_objects`](Self::derive_objects) on names.
    pub fn derive_object_names(&self, objects: &[&str]) -> Result<Vec<String>> {
        let set = Self::lookup(&self.objects, objects, "object")?;
        Ok(self
            .derive_objects(&set)
            .ones()
            .map(|m| self.attributes[m].clone())
            .collect())
    }

    /// [`derive_attributes`](Self::derive_attributes) on names.
    pub fn derive_attribute_names(&self, attrs: &[&str]) -> Result<Vec<String>> {
        let set = Self::lookup(&self.attributes, attrs, "attribute")?;
        Ok(self
            .derive_attributes(&set)
            .ones()
            .map(|g| self.objects[g].clone())
            .collect())
    }

    /// The context viewed as a pattern structure over attribute sets.
    pub fn as_pattern_structure(&self) -> ContextStructure<'_> {
        ContextStructure { ctx: self }
    }
}

/// Classic FCA as a pattern structure: descriptions are attribute sets, the
/// meet is intersection and subsumption is inclusion.
#[derive(Debug, Clone, Copy)]
pub struct ContextStructure<'a> {
    ctx: &'a FormalContext,
}

impl ContextStructure<'_> {
    pub fn context(&self) -> &FormalContext {
        self.ctx
    }
}

impl PatternStructure for ContextStructure<'_> {
    type Description = FixedBitSet;

    fn object_count(&self) -> usize {
        self.ctx.objects.len()
    }

    fn object_name(&self, g: usize) -> &str {
        &self.ctx.objects[g]
    }

    fn description(&self, g: usize) -> &FixedBitSet {
        &self.ctx.rows[g]
    }

    fn meet(&self, a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
        let mut out = a.clone();
        out.intersect_with(b);
        out
    }

    fn leq(&self, a: &FixedBitSet, b: &FixedBitSet) -> bool {
        a.is_subset(b)
    }

    fn top(&self) -> FixedBitSet {
        let mut all = FixedBitSet::with_capacity(self.ctx.attributes.len());
        all.insert_range(..);
        all
    }

    fn render(&self, d: &FixedBitSet) -> Option<Vec<String>> {
        Some(d.ones().map(|m| self.ctx.attributes[m].clone()).collect())
    }
}
