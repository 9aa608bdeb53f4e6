//! Inline text form of elements and sequences, matching the rendering used in
//! output records: `<[H1,{a,b},[1,1]];[CH,{}]>`.
//!
//! Taxonomy values are node names, itemsets are `{item,...}` and intervals are
//! `[lo,hi]` or a single count `n` meaning `[n,n]`. An interval field may be
//! left out of an element entirely, which reads as `[1,1]`.

use crate::alphabet::{AlphabetSchema, Element, FieldKind, Interval, ItemSet, Value};
use crate::error::{Error, Result};
use crate::sequence::Sequence;

fn err(text: &str, msg: impl std::fmt::Display) -> Error {
    Error::input(format!("cannot parse `{text}`: {msg}"))
}

/// Splits on `sep` at nesting depth zero.
fn split_top(s: &str, sep: char) -> Option<Vec<&str>> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '[' | '{' | '<' => depth += 1,
            ']' | '}' | '>' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    (depth == 0).then(|| {
        parts.push(&s[start..]);
        parts
    })
}

fn parse_value(schema: &AlphabetSchema, kind: &FieldKind, text: &str) -> Result<Value> {
    let t = text.trim();
    match kind {
        FieldKind::Taxonomy(tax) => tax
            .node(t)
            .map(Value::Node)
            .ok_or_else(|| err(t, format!("unknown node in taxonomy `{}`", tax.name()))),
        FieldKind::ItemSet => {
            let inner = t
                .strip_prefix('{')
                .and_then(|r| r.strip_suffix('}'))
                .ok_or_else(|| err(t, "expected {item,...}"))?;
            Ok(Value::Items(ItemSet::new(
                inner.split(',').map(str::trim).filter(|s| !s.is_empty()),
            )))
        }
        FieldKind::Interval => {
            let num = |s: &str| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| err(t, "expected a positive integer"))
            };
            let iv = match t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                Some(inner) => {
                    let (lo, hi) = inner
                        .split_once(',')
                        .ok_or_else(|| err(t, "expected [lo,hi]"))?;
                    Interval::new(num(lo)?, num(hi)?)?
                }
                None => Interval::new(num(t)?, num(t)?)?,
            };
            if iv.hi > schema.max_rep() {
                return Err(err(t, format!("exceeds max_rep {}", schema.max_rep())));
            }
            Ok(Value::Interval(iv))
        }
    }
}

pub fn parse_element(schema: &AlphabetSchema, text: &str) -> Result<Element> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| err(t, "an element is written [value,...]"))?;
    let parts = split_top(inner, ',').ok_or_else(|| err(t, "unbalanced brackets"))?;
    let fields = schema.fields();
    let rep = schema.repetition_field();
    let values = if parts.len() == fields.len() {
        fields
            .iter()
            .zip(&parts)
            .map(|(f, p)| parse_value(schema, &f.kind, p))
            .collect::<Result<Vec<_>>>()?
    } else if rep.is_some() && parts.len() + 1 == fields.len() {
        let mut it = parts.iter();
        fields
            .iter()
            .enumerate()
            .map(|(i, f)| {
                if Some(i) == rep {
                    Ok(Value::Interval(Interval::point(1)))
                } else {
                    parse_value(
                        schema,
                        &f.kind,
                        it.next().expect("one value per non-interval field"),
                    )
                }
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        return Err(err(
            t,
            format!("expected {} values, found {}", fields.len(), parts.len()),
        ));
    };
    Ok(Element::new(values))
}

/// Parses `<e;e;...>`; `<>` is the empty sequence.
pub fn parse_sequence(schema: &AlphabetSchema, text: &str) -> Result<Sequence> {
    let t = text.trim();
    let inner = t
        .strip_prefix('<')
        .and_then(|r| r.strip_suffix('>'))
        .ok_or_else(|| err(t, "a sequence is written <element;...>"))?;
    if inner.trim().is_empty() {
        return Ok(Sequence::default());
    }
    let parts = split_top(inner, ';').ok_or_else(|| err(t, "unbalanced brackets"))?;
    parts.iter().map(|p| parse_element(schema, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::tests::{el, toy_schema};
    use crate::alphabet::FieldSpec;
    use crate::sequence::render_sequence;
    use crate::sequence::tests::Toy;

    #[test]
    fn roundtrip_through_rendering() {
        let toy = Toy::new();
        for s in [toy.p1(), toy.p2(), toy.p3(), toy.ss(3), toy.ss(7)] {
            let text = render_sequence(&toy.s, &s);
            assert_eq!(parse_sequence(&toy.s, &text).unwrap(), s, "{text}");
        }
        assert!(parse_sequence(&toy.s, "<>").unwrap().is_empty());
    }

    #[test]
    fn element_forms() {
        let s = toy_schema();
        assert_eq!(
            parse_element(&s, " [ H1 , { a , b } ] ").unwrap(),
            el(&s, "H1", &["a", "b"])
        );
        assert!(parse_element(&s, "[H9,{a}]")
            .unwrap_err()
            .to_string()
            .contains("unknown node"));
        assert!(parse_element(&s, "[H1]").is_err());
        assert!(parse_element(&s, "[H1,a]").is_err());
        assert!(parse_sequence(&s, "<[H1,{a}]").is_err());
        assert!(parse_sequence(&s, "<[H1,{a}];[H2,{b}>").is_err());
    }

    #[test]
    fn interval_values() {
        let s = AlphabetSchema::new(vec![
            FieldSpec::new("items", FieldKind::ItemSet),
            FieldSpec::new("rep", FieldKind::Interval),
        ])
        .unwrap();
        let iv = |e: &Element| match &e.values[1] {
            Value::Interval(i) => (i.lo, i.hi),
            v => panic!("{v:?}"),
        };
        assert_eq!(iv(&parse_element(&s, "[{a},[3,4]]").unwrap()), (3, 4));
        assert_eq!(iv(&parse_element(&s, "[{a},2]").unwrap()), (2, 2));
        assert_eq!(iv(&parse_element(&s, "[{a}]").unwrap()), (1, 1));
        assert!(parse_element(&s, "[{a},[4,3]]").is_err());
        assert!(parse_element(&s, "[{a},0]").is_err());
        assert!(parse_element(&s, "[{a},5000]").is_err());
    }
}
