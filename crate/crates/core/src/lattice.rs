//! Concept lattice construction (AddIntent over a semilattice of descriptions)
//! and structural checks.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::pstruct::{extent_to_intent, intent_to_extent, ObjectSet, PatternStructure};

pub const DEFAULT_MAX_CONCEPTS: usize = 1_000_000;

pub type ConceptId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept<D> {
    pub id: ConceptId,
    pub extent: ObjectSet,
    pub intent: D,
}

impl<D> Concept<D> {
    pub fn support(&self) -> usize {
        self.extent.count_ones(..)
    }
}

/// A concept lattice with its cover relation. Ids index into
/// [`concepts`](Lattice::concepts) and follow creation order.
#[derive(Debug, Clone)]
pub struct Lattice<D> {
    concepts: Vec<Concept<D>>,
    parents: Vec<Vec<ConceptId>>,
    children: Vec<Vec<ConceptId>>,
    object_count: usize,
    extent_index: HashMap<ObjectSet, ConceptId>,
}

impl<D> Lattice<D> {
    /// Assembles a lattice from concepts and cover edges `(parent, child)`
    /// without checking anything. Pair it with [`validate_lattice`].
    pub fn from_parts(
        object_count: usize,
        concepts: Vec<(ObjectSet, D)>,
        covers: impl IntoIterator<Item = (ConceptId, ConceptId)>,
    ) -> Result<Self> {
        let n = concepts.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (p, c) in covers {
            if p >= n || c >= n {
                return Err(Error::input(format!(
                    "cover edge ({p},{c}) references an unknown concept"
                )));
            }
            parents[c].push(p);
            children[p].push(c);
        }
        for v in parents.iter_mut().chain(children.iter_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        let concepts: Vec<Concept<D>> = concepts
            .into_iter()
            .enumerate()
            .map(|(id, (mut extent, intent))| {
                extent.grow(object_count);
                Concept { id, extent, intent }
            })
            .collect();
        let extent_index = concepts.iter().map(|c| (c.extent.clone(), c.id)).collect();
        Ok(Lattice {
            concepts,
            parents,
            children,
            object_count,
            extent_index,
        })
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn object_count(&self) -> usize {
        self.object_count
    }

    pub fn concepts(&self) -> &[Concept<D>] {
        &self.concepts
    }

    pub fn concept(&self, id: ConceptId) -> Result<&Concept<D>> {
        self.concepts
            .get(id)
            .ok_or_else(|| Error::input(format!("unknown concept id {id}")))
    }

    pub fn parents(&self, id: ConceptId) -> &[ConceptId] {
        &self.parents[id]
    }

    pub fn children(&self, id: ConceptId) -> &[ConceptId] {
        &self.children[id]
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// The concept whose extent is all of `G`.
    pub fn top(&self) -> ConceptId {
        (0..self.len())
            .max_by_key(|&c| (self.concepts[c].support(), std::cmp::Reverse(c)))
            .expect("lattice has at least one concept")
    }

    /// The concept with the smallest extent.
    pub fn bottom(&self) -> ConceptId {
        (0..self.len())
            .min_by_key(|&c| (self.concepts[c].support(), c))
            .expect("lattice has at least one concept")
    }

    pub fn find_extent(&self, extent: &ObjectSet) -> Option<ConceptId> {
        if extent.len() == self.object_count {
            return self.extent_index.get(extent).copied();
        }
        let mut e = extent.clone();
        e.grow(self.object_count);
        self.extent_index.get(&e).copied()
    }

    /// Every concept strictly below `id` (descendants), in DFS order.
    pub fn descendants(&self, id: ConceptId) -> Vec<ConceptId> {
        let mut seen = FixedBitSet::with_capacity(self.len());
        let mut stack = self.children[id].clone();
        let mut out = Vec::new();
        while let Some(c) = stack.pop() {
            if seen.put(c) {
                continue;
            }
            out.push(c);
            stack.extend_from_slice(&self.children[c]);
        }
        out
    }

    /// Concept ids sorted so that every concept precedes its ancestors.
    pub fn bottom_up_order(&self) -> Vec<ConceptId> {
        let mut ids: Vec<ConceptId> = (0..self.len()).collect();
        ids.sort_by_key(|&c| (self.concepts[c].support(), c));
        ids
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub max_concepts: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            max_concepts: DEFAULT_MAX_CONCEPTS,
        }
    }
}

struct Builder<'a, P: PatternStructure> {
    ps: &'a P,
    extents: Vec<ObjectSet>,
    intents: Vec<P::Description>,
    parents: Vec<Vec<ConceptId>>,
    children: Vec<Vec<ConceptId>>,
    index: HashMap<P::Description, ConceptId>,
    limit: usize,
}

impl<P: PatternStructure> Builder<'_, P> {
    fn create(&mut self, extent: ObjectSet, intent: P::Description) -> Result<ConceptId> {
        if self.intents.len() >= self.limit {
            return Err(Error::ConceptLimit { limit: self.limit });
        }
        let id = self.intents.len();
        self.index.insert(intent.clone(), id);
        self.extents.push(extent);
        self.intents.push(intent);
        self.parents.push(Vec::new());
        self.children.push(Vec::new());
        Ok(id)
    }

    fn link(&mut self, parent: ConceptId, child: ConceptId) {
        self.parents[child].push(parent);
        self.children[parent].push(child);
    }

    fn unlink(&mut self, parent: ConceptId, child: ConceptId) {
        self.parents[child].retain(|&p| p != parent);
        self.children[parent].retain(|&c| c != child);
    }

    /// Climbs from `generator` to the most general concept whose intent is
    /// still subsumed by `intent`.
    fn maximal_concept(&self, intent: &P::Description, mut generator: ConceptId) -> ConceptId {
        loop {
            let next = self.parents[generator]
                .iter()
                .copied()
                .find(|&p| self.ps.leq(intent, &self.intents[p]));
            match next {
                Some(p) => generator = p,
                None => return generator,
            }
        }
    }

    fn add_intent(&mut self, intent: P::Description, generator: ConceptId) -> Result<ConceptId> {
        if let Some(&c) = self.index.get(&intent) {
            return Ok(c);
        }
        let generator = self.maximal_concept(&intent, generator);
        if self.intents[generator] == intent {
            return Ok(generator);
        }
        let mut new_parents: Vec<ConceptId> = Vec::new();
        for candidate in self.parents[generator].clone() {
            let candidate = if self.ps.leq(&self.intents[candidate], &intent) {
                candidate
            } else {
                let m = self.ps.meet(&self.intents[candidate], &intent);
                self.add_intent(m, candidate)?
            };
            let mut keep = true;
            let mut i = 0;
            while i < new_parents.len() {
                let p = new_parents[i];
                if self.ps.leq(&self.intents[candidate], &self.intents[p]) {
                    keep = false;
                    break;
                }
                if self.ps.leq(&self.intents[p], &self.intents[candidate]) {
                    new_parents.swap_remove(i);
                } else {
                    i += 1;
                }
            }
            if keep {
                new_parents.push(candidate);
            }
        }
        let new = self.create(self.extents[generator].clone(), intent)?;
        for p in new_parents {
            self.unlink(p, generator);
            self.link(p, new);
        }
        self.link(new, generator);
        Ok(new)
    }

    fn add_object(&mut self, g: usize, start: ConceptId) -> Result<()> {
        let d = self.ps.description(g).clone();
        let c = self.add_intent(d, start)?;
        let mut stack = vec![c];
        while let Some(c) = stack.pop() {
            if self.extents[c].put(g) {
                continue;
            }
            stack.extend_from_slice(&self.parents[c]);
        }
        Ok(())
    }
}

/// Builds the complete concept lattice of `ps`, processing objects in index
/// order. Concept ids are assigned at creation.
pub fn build_lattice<P: PatternStructure>(
    ps: &P,
    opts: BuildOptions,
) -> Result<Lattice<P::Description>> {
    let n = ps.object_count();
    let mut b = Builder {
        ps,
        extents: Vec::new(),
        intents: Vec::new(),
        parents: Vec::new(),
        children: Vec::new(),
        index: HashMap::new(),
        limit: opts.max_concepts.max(1),
    };
    let bottom = b.create(ObjectSet::with_capacity(n), ps.top())?;
    for g in 0..n {
        b.add_object(g, bottom)?;
    }
    let Builder {
        extents,
        intents,
        mut parents,
        mut children,
        ..
    } = b;
    for v in parents.iter_mut().chain(children.iter_mut()) {
        v.sort_unstable();
    }
    let concepts: Vec<Concept<P::Description>> = extents
        .into_iter()
        .zip(intents)
        .enumerate()
        .map(|(id, (extent, intent))| Concept { id, extent, intent })
        .collect();
    let extent_index = concepts.iter().map(|c| (c.extent.clone(), c.id)).collect();
    Ok(Lattice {
        concepts,
        parents,
        children,
        object_count: n,
        extent_index,
    })
}

pub fn direct_descendants<D>(lat: &Lattice<D>, c: ConceptId) -> Result<&[ConceptId]> {
    lat.concept(c)?;
    Ok(lat.children(c))
}

/// Greatest common descendant: the concept whose extent is the intersection.
pub fn meet_concepts<D>(lat: &Lattice<D>, a: ConceptId, b: ConceptId) -> Result<ConceptId> {
    let mut e = lat.concept(a)?.extent.clone();
    e.intersect_with(&lat.concept(b)?.extent);
    lat.find_extent(&e)
        .ok_or_else(|| Error::InvalidLattice(format!("no concept with the extent of {a} ∧ {b}")))
}

/// Least common ancestor: the smallest extent containing both extents.
pub fn join_concepts<D>(lat: &Lattice<D>, a: ConceptId, b: ConceptId) -> Result<ConceptId> {
    let mut u = lat.concept(a)?.extent.clone();
    u.union_with(&lat.concept(b)?.extent);
    lat.concepts()
        .iter()
        .filter(|c| u.is_subset(&c.extent))
        .min_by_key(|c| (c.support(), c.id))
        .map(|c| c.id)
        .ok_or_else(|| Error::InvalidLattice(format!("no common ancestor of {a} and {b}")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The extent or intent is not closed under the Galois connection.
    NotClosed {
        concept: ConceptId,
        detail: String,
    },
    DuplicateExtent {
        first: ConceptId,
        second: ConceptId,
    },
    MissingCover {
        parent: ConceptId,
        child: ConceptId,
    },
    ExtraCover {
        parent: ConceptId,
        child: ConceptId,
    },
    /// Missing or duplicated top/bottom, or a broken concept list.
    Shape(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotClosed { concept, detail } => {
                write!(f, "concept {concept} is not closed: {detail}")
            }
            Violation::DuplicateExtent { first, second } => {
                write!(f, "concepts {first} and {second} share an extent")
            }
            Violation::MissingCover { parent, child } => {
                write!(f, "missing cover edge {parent} -> {child}")
            }
            Violation::ExtraCover { parent, child } => {
                write!(
                    f,
                    "edge {parent} -> {child} is not a cover (redundant or wrong direction)"
                )
            }
            Violation::Shape(s) => f.write_str(s),
        }
    }
}

/// Re-derives closures and the cover relation. An empty list means valid.
pub fn validate_lattice<P: PatternStructure>(
    ps: &P,
    lat: &Lattice<P::Description>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = lat.len();
    if n == 0 {
        out.push(Violation::Shape("lattice has no concepts".into()));
        return out;
    }
    for (i, c) in lat.concepts().iter().enumerate() {
        if c.id != i {
            out.push(Violation::Shape(format!(
                "concept at position {i} carries id {}",
                c.id
            )));
        }
        let intent = extent_to_intent(ps, &c.extent);
        if intent != c.intent {
            out.push(Violation::NotClosed {
                concept: i,
                detail: "intent differs from the meet of the extent".into(),
            });
        }
        if intent_to_extent(ps, &c.intent) != c.extent {
            out.push(Violation::NotClosed {
                concept: i,
                detail: "extent differs from the objects matching the intent".into(),
            });
        }
    }
    let mut seen: HashMap<&ObjectSet, ConceptId> = HashMap::new();
    for c in lat.concepts() {
        if let Some(&first) = seen.get(&c.extent) {
            out.push(Violation::DuplicateExtent {
                first,
                second: c.id,
            });
        } else {
            seen.insert(&c.extent, c.id);
        }
    }

    let mut all = ObjectSet::with_capacity(ps.object_count());
    all.insert_range(..);
    let tops = lat.concepts().iter().filter(|c| c.extent == all).count();
    if tops != 1 {
        out.push(Violation::Shape(format!(
            "expected one concept with extent G, found {tops}"
        )));
    }
    let roots = (0..n).filter(|&c| lat.parents(c).is_empty()).count();
    let sinks = (0..n).filter(|&c| lat.children(c).is_empty()).count();
    if roots != 1 {
        out.push(Violation::Shape(format!(
            "expected a unique top, found {roots} parentless concepts"
        )));
    }
    if sinks != 1 {
        out.push(Violation::Shape(format!(
            "expected a unique bottom, found {sinks} childless concepts"
        )));
    }

    // Expected covers: for each concept, the minimal strict supersets of its extent.
    let order = lat.bottom_up_order();
    for c in 0..n {
        let ext = &lat.concepts()[c].extent;
        let above: Vec<ConceptId> = order
            .iter()
            .copied()
            .filter(|&d| {
                d != c
                    && ext.is_subset(&lat.concepts()[d].extent)
                    && lat.concepts()[d].extent != *ext
            })
            .collect();
        let mut covers: Vec<ConceptId> = Vec::new();
        for &d in &above {
            let de = &lat.concepts()[d].extent;
            if !covers
                .iter()
                .any(|&k| lat.concepts()[k].extent.is_subset(de))
            {
                covers.push(d);
            }
        }
        covers.sort_unstable();
        for &p in &covers {
            if !lat.parents(c).contains(&p) {
                out.push(Violation::MissingCover {
                    parent: p,
                    child: c,
                });
            }
        }
        for &p in lat.parents(c) {
            if !covers.contains(&p) {
                out.push(Violation::ExtraCover {
                    parent: p,
                    child: c,
                });
            }
        }
        for &ch in lat.children(c) {
            if !lat.parents(ch).contains(&c) {
                out.push(Violation::Shape(format!(
                    "child list of {c} names {ch} without a matching parent link"
                )));
            }
        }
    }
    out
}

/// Enumerates every closed extent by brute force over the powerset of `G`.
/// Intended as a reference for small inputs.
pub fn brute_force_concepts<P: PatternStructure>(
    ps: &P,
    max_objects: usize,
) -> Result<Vec<(ObjectSet, P::Description)>> {
    let n = ps.object_count();
    if n > max_objects || n >= 64 {
        return Err(Error::input(format!(
            "brute-force enumeration refused: {n} objects exceeds the limit of {max_objects}"
        )));
    }
    let mut out = Vec::new();
    for mask in 0u64..1 << n {
        let mut a = ObjectSet::with_capacity(n);
        (0..n)
            .filter(|g| mask >> g & 1 == 1)
            .for_each(|g| a.insert(g));
        let d = extent_to_intent(ps, &a);
        if intent_to_extent(ps, &d) == a {
            out.push((a, d));
        }
    }
    Ok(out)
}
