//! Projections (interior operators) on the pattern semilattice.
//!
//! A [`Projector`] composes an alphabet projection (element-level field
//! blanking, item removal and required fields, followed by re-splitting at
//! `⊥`) with a Minimal-Length Projection. The alphabet part runs first so
//! that the length threshold applies to the final, possibly shortened, runs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::alphabet::{AlphabetSchema, ElementProjection, FieldKind};
use crate::error::{Error, Result};
use crate::sequence::{
    maximal_antichain, pattern_meet, pattern_meet_with, split_valid_runs, Pattern, Sequence,
};

/// Declarative projection settings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionSpec {
    /// Fields kept as-is; `None` keeps every field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub select: Option<BTreeSet<String>>,
    /// Fields that must be informative; an element where one is maximally
    /// general becomes `⊥`.
    #[serde(default)]
    pub require: BTreeSet<String>,
    /// Minimal-Length Projection threshold `ℓ`.
    #[serde(default)]
    pub min_len: usize,
    /// Run-length encode input sequences at ingestion.
    #[serde(default)]
    pub rle: bool,
    /// Items removed from itemset fields, keyed by field name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub drop_items: BTreeMap<String, BTreeSet<String>>,
}

impl ProjectionSpec {
    pub fn identity() -> Self {
        ProjectionSpec::default()
    }

    pub fn mlp(min_len: usize) -> Self {
        ProjectionSpec {
            min_len,
            ..ProjectionSpec::default()
        }
    }

    /// Expands names like `GR2` or `RPI3`: each letter selects the field with
    /// that shorthand letter, a trailing number sets `min_len`. Selected fields
    /// flagged `require_when_selected` become required, and selecting the
    /// interval field turns on run-length encoding.
    pub fn from_shorthand(schema: &AlphabetSchema, name: &str) -> Result<Self> {
        let name = name.trim();
        let split = name
            .find(|c: char| c.is_ascii_digit())
            .unwrap_or(name.len());
        let (letters, digits) = name.split_at(split);
        if letters.is_empty() {
            return Err(Error::config(format!(
                "projection shorthand `{name}` selects no field"
            )));
        }
        let min_len = if digits.is_empty() {
            0
        } else {
            digits.parse().map_err(|_| {
                Error::config(format!("bad length in projection shorthand `{name}`"))
            })?
        };
        let mut spec = ProjectionSpec {
            select: Some(BTreeSet::new()),
            min_len,
            ..ProjectionSpec::default()
        };
        for c in letters.chars() {
            let c = c.to_ascii_uppercase();
            let field = schema
                .fields()
                .iter()
                .find(|f| f.letter == c)
                .ok_or_else(|| {
                    Error::config(format!(
                        "projection shorthand `{name}`: no field has letter `{c}`"
                    ))
                })?;
            spec.select.as_mut().unwrap().insert(field.name.clone());
            if field.require_when_selected {
                spec.require.insert(field.name.clone());
            }
            if matches!(field.kind, FieldKind::Interval) {
                spec.rle = true;
            }
        }
        Ok(spec)
    }
}

/// A [`ProjectionSpec`] resolved against a schema.
#[derive(Debug, Clone)]
pub struct Projector {
    elements: ElementProjection,
    min_len: usize,
    rle: bool,
}

impl Projector {
    pub fn new(schema: &AlphabetSchema, spec: &ProjectionSpec) -> Result<Self> {
        if spec.rle && schema.repetition_field().is_none() {
            return Err(Error::config(
                "rle requested but the schema has no single interval (repetition) field",
            ));
        }
        Ok(Projector {
            elements: ElementProjection::resolve(schema, spec)?,
            min_len: spec.min_len,
            rle: spec.rle,
        })
    }

    pub fn identity(schema: &AlphabetSchema) -> Self {
        Projector {
            elements: ElementProjection::identity(schema),
            min_len: 0,
            rle: false,
        }
    }

    pub fn min_len(&self) -> usize {
        self.min_len
    }

    pub fn rle(&self) -> bool {
        self.rle
    }

    pub fn element_projection(&self) -> &ElementProjection {
        &self.elements
    }

    pub fn is_identity(&self) -> bool {
        self.elements.is_identity() && self.min_len <= 1
    }

    fn element_projection_opt(&self) -> Option<&ElementProjection> {
        (!self.elements.is_identity()).then_some(&self.elements)
    }

    /// Alphabet projection of a pattern.
    pub fn alphabet(&self, schema: &AlphabetSchema, d: &Pattern) -> Pattern {
        if self.elements.is_identity() {
            return d.clone();
        }
        let mut runs = Vec::new();
        for s in d.sequences() {
            let projected = s.elements().iter().map(|e| self.elements.apply(schema, e));
            split_valid_runs(schema, projected, 0, &mut runs);
        }
        maximal_antichain(schema, runs)
    }

    /// `ψ = MLP ∘ alphabet`.
    pub fn apply(&self, schema: &AlphabetSchema, d: &Pattern) -> Pattern {
        apply_mlp(self.min_len, &self.alphabet(schema, d))
    }

    /// Description of a raw input sequence: split at `⊥` (inputs may hold
    /// uninformative events), then project.
    pub fn describe(&self, schema: &AlphabetSchema, raw: &Sequence) -> Pattern {
        let mut runs = Vec::new();
        let projected = raw
            .elements()
            .iter()
            .map(|e| self.elements.apply(schema, e));
        split_valid_runs(schema, projected, self.min_len, &mut runs);
        maximal_antichain(schema, runs)
    }

    /// `x ⊓_ψ y = ψ(x ⊓ y)`, with the projection fused into the alignment
    /// loop. Equal to `self.apply(pattern_meet(x, y))` for any `x`, `y`.
    pub fn meet(&self, schema: &AlphabetSchema, x: &Pattern, y: &Pattern) -> Pattern {
        pattern_meet_with(schema, x, y, self.element_projection_opt(), self.min_len)
    }
}

/// Minimal-Length Projection: drops member sequences shorter than `min_len`.
pub fn apply_mlp(min_len: usize, d: &Pattern) -> Pattern {
    if d.sequences().iter().all(|s| s.len() >= min_len) {
        return d.clone();
    }
    let kept = d
        .sequences()
        .iter()
        .filter(|s| s.len() >= min_len)
        .cloned()
        .collect();
    Pattern::from_canonical(kept)
}

/// Alphabet projection of `d` under `spec` (its `min_len` is ignored).
pub fn apply_alphabet_projection(
    schema: &AlphabetSchema,
    spec: &ProjectionSpec,
    d: &Pattern,
) -> Result<Pattern> {
    Ok(Projector::new(schema, spec)?.alphabet(schema, d))
}

/// `ψ(pattern_meet(x, y))`, computed literally (unfused).
pub fn projected_meet(
    schema: &AlphabetSchema,
    spec: &ProjectionSpec,
    x: &Pattern,
    y: &Pattern,
) -> Result<Pattern> {
    let p = Projector::new(schema, spec)?;
    Ok(p.apply(schema, &pattern_meet(schema, x, y)))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::alphabet::tests::toy_schema;
    use crate::alphabet::{FieldSpec, Taxonomy};
    use crate::sequence::pattern_leq;
    use crate::sequence::tests::{toy_meet_closure, Toy};

    fn require_geo() -> ProjectionSpec {
        ProjectionSpec {
            require: BTreeSet::from(["geo".to_string()]),
            ..ProjectionSpec::default()
        }
    }

    fn drop_b() -> ProjectionSpec {
        ProjectionSpec {
            drop_items: [("proc".to_string(), BTreeSet::from(["b".to_string()]))].into(),
            ..ProjectionSpec::default()
        }
    }

    /// The projections exercised by the axiom checks.
    pub(crate) fn toy_specs() -> Vec<ProjectionSpec> {
        let mut specs: Vec<ProjectionSpec> = (0..=5).map(ProjectionSpec::mlp).collect();
        specs.push(ProjectionSpec {
            select: Some(BTreeSet::from(["geo".to_string()])),
            ..ProjectionSpec::default()
        });
        specs.push(ProjectionSpec {
            select: Some(BTreeSet::from(["proc".to_string()])),
            ..ProjectionSpec::default()
        });
        specs.push(require_geo());
        specs.push(drop_b());
        for l in [2, 3] {
            specs.push(ProjectionSpec {
                min_len: l,
                ..require_geo()
            });
            specs.push(ProjectionSpec {
                select: Some(BTreeSet::from(["proc".to_string()])),
                require: BTreeSet::from(["proc".to_string()]),
                min_len: l,
                ..ProjectionSpec::default()
            });
        }
        specs
    }

    #[test]
    fn mlp_examples() {
        let toy = Toy::new();
        assert_eq!(apply_mlp(3, &toy.of(&[6, 7, 8])), toy.of(&[6]));
        let d = toy.of(&[6, 7, 8]);
        assert_eq!(apply_mlp(0, &d), d);
        assert!(apply_mlp(5, &toy.of(&[6])).is_empty());
    }

    #[test]
    fn alphabet_projection_examples() {
        let toy = Toy::new();
        let s = &toy.s;
        let ss2 = toy.of(&[2]);
        assert_eq!(
            apply_alphabet_projection(s, &drop_b(), &ss2).unwrap(),
            toy.of(&[9])
        );
        assert_eq!(
            apply_alphabet_projection(s, &require_geo(), &toy.of(&[6])).unwrap(),
            toy.of(&[10])
        );
        let d = toy.of(&[6, 7, 8]);
        assert_eq!(
            apply_alphabet_projection(s, &ProjectionSpec::identity(), &d).unwrap(),
            d
        );
        let bad = ProjectionSpec {
            require: BTreeSet::from(["nope".to_string()]),
            ..ProjectionSpec::default()
        };
        assert!(matches!(
            apply_alphabet_projection(s, &bad, &d),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn projected_meet_examples() {
        let toy = Toy::new();
        let s = &toy.s;
        let (p1, p2, p3) = (toy.one(toy.p1()), toy.one(toy.p2()), toy.one(toy.p3()));
        assert_eq!(
            projected_meet(s, &ProjectionSpec::mlp(3), &p2, &p3).unwrap(),
            toy.of(&[6])
        );
        assert_eq!(
            projected_meet(s, &ProjectionSpec::identity(), &p2, &p3).unwrap(),
            pattern_meet(s, &p2, &p3)
        );
        let psi = Projector::new(s, &ProjectionSpec::mlp(2)).unwrap();
        let lhs = psi.apply(s, &pattern_meet(s, &p1, &p2));
        let rhs = psi.apply(s, &pattern_meet(s, &psi.apply(s, &p1), &p2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn projection_axioms_on_toy_closure() {
        let toy = Toy::new();
        let s = &toy.s;
        let closure = toy_meet_closure(&toy);
        for spec in toy_specs() {
            let psi = Projector::new(s, &spec).unwrap();
            for x in &closure {
                let px = psi.apply(s, x);
                assert_eq!(psi.apply(s, &px), px, "idempotent {spec:?}");
                assert!(pattern_leq(s, &px, x), "contractive {spec:?}");
                for y in &closure {
                    let py = psi.apply(s, y);
                    if pattern_leq(s, x, y) {
                        assert!(pattern_leq(s, &px, &py), "monotone {spec:?}");
                    }
                    let full = psi.apply(s, &pattern_meet(s, x, y));
                    assert_eq!(
                        psi.apply(s, &pattern_meet(s, &px, y)),
                        full,
                        "psi(x⊓y)=psi(psi(x)⊓y)"
                    );
                    assert_eq!(psi.meet(s, x, y), full, "fused meet");
                    assert_eq!(psi.meet(s, &px, &py), psi.meet(s, &py, &px));
                }
            }
        }
    }

    #[test]
    fn shorthand_expansion() {
        let geo = Taxonomy::from_edges("geo", "FR", &[("Lorraine", "FR")]).unwrap();
        let diag = Taxonomy::from_edges("diag", "ICD", &[("C34", "ICD")]).unwrap();
        let schema = AlphabetSchema::new(vec![
            FieldSpec::new("geo", FieldKind::Taxonomy(geo.into())),
            FieldSpec::new("reason", FieldKind::Taxonomy(diag.into())).required_when_selected(),
            FieldSpec::new("proc", FieldKind::ItemSet),
            FieldSpec::new("rep", FieldKind::Interval).with_letter('I'),
        ])
        .unwrap();
        let rpi3 = ProjectionSpec::from_shorthand(&schema, "RPI3").unwrap();
        assert_eq!(
            rpi3.select,
            Some(BTreeSet::from([
                "reason".into(),
                "proc".into(),
                "rep".into()
            ]))
        );
        assert_eq!(rpi3.require, BTreeSet::from(["reason".to_string()]));
        assert_eq!(rpi3.min_len, 3);
        assert!(rpi3.rle);
        let gr2 = ProjectionSpec::from_shorthand(&schema, "GR2").unwrap();
        assert_eq!(
            gr2.select,
            Some(BTreeSet::from(["geo".into(), "reason".into()]))
        );
        assert_eq!(gr2.min_len, 2);
        assert!(!gr2.rle);
        assert!(Projector::new(&schema, &gr2).is_ok());
        assert!(ProjectionSpec::from_shorthand(&schema, "GX2").is_err());
        assert!(ProjectionSpec::from_shorthand(&schema, "3").is_err());

        let spec = ProjectionSpec {
            rle: true,
            ..ProjectionSpec::default()
        };
        assert!(Projector::new(&toy_schema(), &spec).is_err());
    }
}
