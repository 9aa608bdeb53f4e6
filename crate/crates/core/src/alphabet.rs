//! The event alphabet: a product of taxonomy, itemset and interval fields.
//!
//! Every field is itself a meet-semilattice, and an [`Element`] is one value
//! per field. The meet of two elements is taken field by field:
//!
//! * taxonomy: deepest common ancestor,
//! * itemset: intersection,
//! * interval: convex hull (`[a,b] ⊓ [c,d] = [min(a,c), max(b,d)]`).
//!
//! The bottom of the alphabet (`⊥`) is the element whose fields are all
//! maximally general. It is an ordinary [`Element`]; [`AlphabetSchema::is_bottom`]
//! is the membership test.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::projection::ProjectionSpec;

/// Default upper end of the universal repetition interval `[1, max_rep]`.
pub const DEFAULT_MAX_REP: u32 = 1024;

pub type NodeId = u32;

/// A rooted tree of named nodes. Parents are more general than children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    name: String,
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    parent: Vec<NodeId>,
    depth: Vec<u32>,
}

/// Why an edge list does not describe a tree. `edge` indexes the offending edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyError {
    pub edge: Option<usize>,
    pub msg: String,
}

impl Taxonomy {
    /// Builds a taxonomy from `(child, parent)` edges. Edges may appear in any
    /// order; every parent must be the root or appear as a child somewhere.
    pub fn from_edges<S: AsRef<str>>(
        name: &str,
        root: &str,
        edges: &[(S, S)],
    ) -> Result<Taxonomy, TaxonomyError> {
        let mut names = vec![root.to_string()];
        let mut index = HashMap::new();
        index.insert(root.to_string(), 0);
        let mut parent_name: Vec<Option<(usize, &str)>> = vec![None];

        for (i, (child, parent)) in edges.iter().enumerate() {
            let (child, parent) = (child.as_ref(), parent.as_ref());
            let err = |msg: String| TaxonomyError { edge: Some(i), msg };
            if child == root {
                return Err(err(format!("root `{root}` cannot have a parent")));
            }
            if child == parent {
                return Err(err(format!("node `{child}` is its own parent")));
            }
            match index.get(child) {
                Some(&id) => {
                    let (_, prev) = parent_name[id as usize].expect("non-root has a parent");
                    return Err(err(if prev == parent {
                        format!("duplicate edge `{child}` -> `{parent}`")
                    } else {
                        format!("node `{child}` has two parents (`{prev}` and `{parent}`)")
                    }));
                }
                None => {
                    let id = names.len() as NodeId;
                    names.push(child.to_string());
                    index.insert(child.to_string(), id);
                    parent_name.push(Some((i, parent)));
                }
            }
        }

        let mut parent = vec![0; names.len()];
        for (id, p) in parent_name.iter().enumerate().skip(1) {
            let (edge, pname) = p.expect("non-root has a parent");
            parent[id] = *index.get(pname).ok_or_else(|| TaxonomyError {
                edge: Some(edge),
                msg: format!(
                    "orphan node `{}`: parent `{pname}` is not declared",
                    names[id]
                ),
            })?;
        }

        // Depths, detecting cycles: a walk that revisits a node on the current path never reaches the root.
        const UNSET: u32 = u32::MAX;
        let mut depth = vec![UNSET; names.len()];
        depth[0] = 0;
        let mut path = Vec::new();
        for start in 0..names.len() {
            let mut node = start;
            path.clear();
            while depth[node] == UNSET {
                if path.contains(&node) {
                    let (edge, _) = parent_name[node].expect("non-root");
                    return Err(TaxonomyError {
                        edge: Some(edge),
                        msg: format!("cycle through node `{}`", names[node]),
                    });
                }
                path.push(node);
                node = parent[node] as usize;
            }
            let mut d = depth[node];
            for &n in path.iter().rev() {
                d += 1;
                depth[n] = d;
            }
        }

        Ok(Taxonomy {
            name: name.to_string(),
            names,
            index,
            parent,
            depth,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    /// Looks a node up by name, failing with an error that names the taxonomy.
    pub fn node_or_err(&self, name: &str) -> Result<NodeId> {
        self.node(name).ok_or_else(|| {
            Error::input(format!("unknown node `{name}` in taxonomy `{}`", self.name))
        })
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.names[id as usize]
    }

    pub fn parent(&self, id: NodeId) -> NodeId {
        self.parent[id as usize]
    }

    pub fn depth(&self, id: NodeId) -> u32 {
        self.depth[id as usize]
    }

    pub fn max_depth(&self) -> u32 {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        (id as usize) < self.names.len()
    }

    /// Nodes in id order (root first), paired with their parent.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (1..self.names.len() as NodeId).map(|id| (id, self.parent(id)))
    }

    /// Deepest common ancestor (the taxonomy meet).
    pub fn meet(&self, mut a: NodeId, mut b: NodeId) -> NodeId {
        while self.depth(a) > self.depth(b) {
            a = self.parent(a);
        }
        while self.depth(b) > self.depth(a) {
            b = self.parent(b);
        }
        while a != b {
            a = self.parent(a);
            b = self.parent(b);
        }
        a
    }

    /// `a ⊑ b`: `a` is an ancestor of `b` or `b` itself.
    pub fn leq(&self, a: NodeId, mut b: NodeId) -> bool {
        let da = self.depth(a);
        if self.depth(b) < da {
            return false;
        }
        while self.depth(b) > da {
            b = self.parent(b);
        }
        a == b
    }
}

/// Checked [`Taxonomy::meet`] on node names.
pub fn taxonomy_meet<'t>(tax: &'t Taxonomy, a: &str, b: &str) -> Result<&'t str> {
    let m = tax.meet(tax.node_or_err(a)?, tax.node_or_err(b)?);
    Ok(tax.node_name(m))
}

/// Checked [`Taxonomy::leq`] on node names.
pub fn taxonomy_leq(tax: &Taxonomy, a: &str, b: &str) -> Result<bool> {
    Ok(tax.leq(tax.node_or_err(a)?, tax.node_or_err(b)?))
}

/// A finite set of item identifiers, kept sorted and deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemSet(Vec<Arc<str>>);

impl ItemSet {
    pub fn new<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<Arc<str>>,
    {
        let mut v: Vec<Arc<str>> = items.into_iter().map(Into::into).collect();
        v.sort();
        v.dedup();
        ItemSet(v)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|s| &**s)
    }

    pub fn contains(&self, item: &str) -> bool {
        self.0.binary_search_by(|x| (**x).cmp(item)).is_ok()
    }

    pub fn intersection(&self, other: &ItemSet) -> ItemSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(self.0.len().min(other.0.len()));
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        ItemSet(out)
    }

    pub fn difference(&self, other: &ItemSet) -> ItemSet {
        ItemSet(
            self.0
                .iter()
                .filter(|x| !other.contains(x))
                .cloned()
                .collect(),
        )
    }

    pub fn is_subset(&self, other: &ItemSet) -> bool {
        if self.0.len() > other.0.len() {
            return false;
        }
        let mut j = 0;
        for x in &self.0 {
            loop {
                if j == other.0.len() {
                    return false;
                }
                match other.0[j].cmp(x) {
                    std::cmp::Ordering::Less => j += 1,
                    std::cmp::Ordering::Equal => {
                        j += 1;
                        break;
                    }
                    std::cmp::Ordering::Greater => return false,
                }
            }
        }
        true
    }
}

/// A closed range of repetition counts, `1 <= lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: u32,
    pub hi: u32,
}

impl Interval {
    pub fn new(lo: u32, hi: u32) -> Result<Interval> {
        if lo == 0 || lo > hi {
            return Err(Error::input(format!(
                "invalid interval [{lo},{hi}]: need 1 <= lo <= hi"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(n: u32) -> Interval {
        Interval { lo: n, hi: n }
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// `self ⊑ other`: `self` contains `other`.
    pub fn contains(self, other: Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Node(NodeId),
    Items(ItemSet),
    Interval(Interval),
}

#[derive(Debug, Clone)]
pub enum FieldKind {
    Taxonomy(Arc<Taxonomy>),
    ItemSet,
    Interval,
}

impl FieldKind {
    pub fn label(&self) -> &'static str {
        match self {
            FieldKind::Taxonomy(_) => "taxonomy",
            FieldKind::ItemSet => "itemset",
            FieldKind::Interval => "interval",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FieldSpec {
    pub name: String,
    pub kind: FieldKind,
    /// Letter used by projection shorthands such as `GR2`.
    pub letter: char,
    /// Shorthands that select this field also require it to be informative.
    pub require_when_selected: bool,
}

impl FieldSpec {
    pub fn new(name: impl Into<String>, kind: FieldKind) -> Self {
        let name = name.into();
        let letter = name
            .chars()
            .next()
            .map(|c| c.to_ascii_uppercase())
            .unwrap_or('?');
        FieldSpec {
            name,
            kind,
            letter,
            require_when_selected: false,
        }
    }

    pub fn with_letter(mut self, letter: char) -> Self {
        self.letter = letter.to_ascii_uppercase();
        self
    }

    pub fn required_when_selected(mut self) -> Self {
        self.require_when_selected = true;
        self
    }
}

/// One event: a value per schema field, in schema order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub values: Vec<Value>,
}

impl Element {
    pub fn new(values: Vec<Value>) -> Self {
        Element { values }
    }
}

/// Ordered field list defining the alphabet `E`.
#[derive(Debug, Clone)]
pub struct AlphabetSchema {
    fields: Vec<FieldSpec>,
    max_rep: u32,
    bottom: Element,
}

impl AlphabetSchema {
    pub fn new(fields: Vec<FieldSpec>) -> Result<Self> {
        Self::with_max_rep(fields, DEFAULT_MAX_REP)
    }

    pub fn with_max_rep(fields: Vec<FieldSpec>, max_rep: u32) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::config("schema needs at least one field"));
        }
        if max_rep == 0 {
            return Err(Error::config("max_rep must be positive"));
        }
        for (i, f) in fields.iter().enumerate() {
            if f.name.is_empty() {
                return Err(Error::config("empty field name"));
            }
            if fields[..i].iter().any(|g| g.name == f.name) {
                return Err(Error::config(format!("duplicate field name `{}`", f.name)));
            }
            if fields[..i].iter().any(|g| g.letter == f.letter) {
                return Err(Error::config(format!(
                    "fields `{}` and another field share shorthand letter `{}`",
                    f.name, f.letter
                )));
            }
        }
        let bottom = Element::new(
            fields
                .iter()
                .map(|f| general_value(&f.kind, max_rep))
                .collect(),
        );
        Ok(AlphabetSchema {
            fields,
            max_rep,
            bottom,
        })
    }

    pub fn fields(&self) -> &[FieldSpec] {
        &self.fields
    }

    pub fn max_rep(&self) -> u32 {
        self.max_rep
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }

    pub fn field_index_or_err(&self, name: &str) -> Result<usize> {
        self.field_index(name)
            .ok_or_else(|| Error::config(format!("unknown field `{name}`")))
    }

    /// The single interval field, if the schema has exactly one.
    pub fn repetition_field(&self) -> Option<usize> {
        let mut it = self
            .fields
            .iter()
            .enumerate()
            .filter(|(_, f)| matches!(f.kind, FieldKind::Interval));
        match (it.next(), it.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }

    pub fn universal_interval(&self) -> Interval {
        Interval {
            lo: 1,
            hi: self.max_rep,
        }
    }

    /// The all-general element `⊥_E`.
    pub fn bottom(&self) -> &Element {
        &self.bottom
    }

    pub fn general_value(&self, field: usize) -> Value {
        self.bottom.values[field].clone()
    }

    pub fn is_general_value(&self, field: usize, v: &Value) -> bool {
        *v == self.bottom.values[field]
    }

    pub fn is_bottom(&self, e: &Element) -> bool {
        *e == self.bottom
    }

    /// Verifies that `e` has one well-formed value per field.
    pub fn check(&self, e: &Element) -> Result<()> {
        if e.values.len() != self.fields.len() {
            return Err(Error::input(format!(
                "schema mismatch: element has {} values, schema has {} fields",
                e.values.len(),
                self.fields.len()
            )));
        }
        for (f, v) in self.fields.iter().zip(&e.values) {
            let ok = match (&f.kind, v) {
                (FieldKind::Taxonomy(t), Value::Node(n)) => t.contains(*n),
                (FieldKind::ItemSet, Value::Items(_)) => true,
                (FieldKind::Interval, Value::Interval(iv)) => {
                    iv.lo >= 1 && iv.lo <= iv.hi && iv.hi <= self.max_rep
                }
                _ => false,
            };
            if !ok {
                return Err(Error::input(format!(
                    "schema mismatch: bad value for {} field `{}`",
                    f.kind.label(),
                    f.name
                )));
            }
        }
        Ok(())
    }

    /// Componentwise meet. Both elements must conform to the schema.
    pub fn meet(&self, a: &Element, b: &Element) -> Element {
        let values = self
            .fields
            .iter()
            .zip(a.values.iter().zip(&b.values))
            .map(|(f, (x, y))| meet_value(&f.kind, x, y))
            .collect();
        Element { values }
    }

    /// `a ⊑ b`, i.e. `a ⊓ b = a`, evaluated componentwise without allocating.
    pub fn leq(&self, a: &Element, b: &Element) -> bool {
        self.fields
            .iter()
            .zip(a.values.iter().zip(&b.values))
            .all(|(f, (x, y))| leq_value(&f.kind, x, y))
    }

    pub fn render_element(&self, e: &Element) -> String {
        let mut s = String::from("[");
        for (i, (f, v)) in self.fields.iter().zip(&e.values).enumerate() {
            if i > 0 {
                s.push(',');
            }
            match (&f.kind, v) {
                (FieldKind::Taxonomy(t), Value::Node(n)) => s.push_str(t.node_name(*n)),
                (_, Value::Items(items)) => {
                    s.push('{');
                    for (k, it) in items.iter().enumerate() {
                        if k > 0 {
                            s.push(',');
                        }
                        s.push_str(it);
                    }
                    s.push('}');
                }
                (_, Value::Interval(iv)) => s.push_str(&format!("[{},{}]", iv.lo, iv.hi)),
                (_, Value::Node(n)) => s.push_str(&format!("#{n}")),
            }
        }
        s.push(']');
        s
    }
}

fn general_value(kind: &FieldKind, max_rep: u32) -> Value {
    match kind {
        FieldKind::Taxonomy(t) => Value::Node(t.root()),
        FieldKind::ItemSet => Value::Items(ItemSet::default()),
        FieldKind::Interval => Value::Interval(Interval { lo: 1, hi: max_rep }),
    }
}

fn meet_value(kind: &FieldKind, x: &Value, y: &Value) -> Value {
    match (kind, x, y) {
        (FieldKind::Taxonomy(t), Value::Node(a), Value::Node(b)) => Value::Node(t.meet(*a, *b)),
        (_, Value::Items(a), Value::Items(b)) => Value::Items(a.intersection(b)),
        (_, Value::Interval(a), Value::Interval(b)) => Value::Interval(a.hull(*b)),
        _ => panic!("value kinds do not match the schema"),
    }
}

fn leq_value(kind: &FieldKind, x: &Value, y: &Value) -> bool {
    match (kind, x, y) {
        (FieldKind::Taxonomy(t), Value::Node(a), Value::Node(b)) => t.leq(*a, *b),
        (_, Value::Items(a), Value::Items(b)) => a.is_subset(b),
        (_, Value::Interval(a), Value::Interval(b)) => a.contains(*b),
        _ => panic!("value kinds do not match the schema"),
    }
}

/// Checked componentwise meet.
pub fn element_meet(schema: &AlphabetSchema, e1: &Element, e2: &Element) -> Result<Element> {
    schema.check(e1)?;
    schema.check(e2)?;
    Ok(schema.meet(e1, e2))
}

/// Checked `e1 ⊑ e2`.
pub fn element_leq(schema: &AlphabetSchema, e1: &Element, e2: &Element) -> Result<bool> {
    schema.check(e1)?;
    schema.check(e2)?;
    Ok(schema.leq(e1, e2))
}

pub fn is_bottom(schema: &AlphabetSchema, e: &Element) -> bool {
    schema.is_bottom(e)
}

/// A [`ProjectionSpec`] resolved against a schema, acting on single elements.
///
/// Applies, in order: item removal, blanking of non-selected fields, and
/// collapse to `⊥` when a required field is maximally general.
#[derive(Debug, Clone)]
pub struct ElementProjection {
    selected: Vec<bool>,
    required: Vec<bool>,
    drop_items: Vec<Option<ItemSet>>,
    identity: bool,
}

impl ElementProjection {
    pub fn identity(schema: &AlphabetSchema) -> Self {
        let n = schema.fields().len();
        ElementProjection {
            selected: vec![true; n],
            required: vec![false; n],
            drop_items: vec![None; n],
            identity: true,
        }
    }

    pub fn resolve(schema: &AlphabetSchema, spec: &ProjectionSpec) -> Result<Self> {
        let n = schema.fields().len();
        let mut selected = vec![spec.select.is_none(); n];
        if let Some(sel) = &spec.select {
            for name in sel {
                selected[schema.field_index_or_err(name)?] = true;
            }
        }
        let mut required = vec![false; n];
        for name in &spec.require {
            let i = schema.field_index_or_err(name)?;
            if !selected[i] {
                return Err(Error::config(format!(
                    "required field `{name}` is not selected"
                )));
            }
            required[i] = true;
        }
        let mut drop_items = vec![None; n];
        for (name, items) in &spec.drop_items {
            let i = schema.field_index_or_err(name)?;
            if !matches!(schema.fields()[i].kind, FieldKind::ItemSet) {
                return Err(Error::config(format!(
                    "drop_items names `{name}`, which is not an itemset field"
                )));
            }
            if !items.is_empty() {
                drop_items[i] = Some(ItemSet::new(items.iter().map(String::as_str)));
            }
        }
        let identity = selected.iter().all(|&s| s)
            && required.iter().all(|&r| !r)
            && drop_items.iter().all(Option::is_none);
        Ok(ElementProjection {
            selected,
            required,
            drop_items,
            identity,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn apply(&self, schema: &AlphabetSchema, e: &Element) -> Element {
        if self.identity {
            return e.clone();
        }
        let mut values = Vec::with_capacity(e.values.len());
        for (i, v) in e.values.iter().enumerate() {
            let v = if !self.selected[i] {
                schema.general_value(i)
            } else {
                match (&self.drop_items[i], v) {
                    (Some(drop), Value::Items(items)) => Value::Items(items.difference(drop)),
                    _ => v.clone(),
                }
            };
            if self.required[i] && schema.is_general_value(i, &v) {
                return schema.bottom().clone();
            }
            values.push(v);
        }
        Element { values }
    }
}

/// Projects one element (see [`ElementProjection`]).
pub fn project_element(
    schema: &AlphabetSchema,
    spec: &ProjectionSpec,
    e: &Element,
) -> Result<Element> {
    schema.check(e)?;
    Ok(ElementProjection::resolve(schema, spec)?.apply(schema, e))
}

/// Renders an element in the `[CH,{c,d}]` text syntax.
pub struct DisplayElement<'a>(pub &'a AlphabetSchema, pub &'a Element);

impl fmt::Display for DisplayElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.render_element(self.1))
    }
}
