//! Sequences over the alphabet and the sequential description semilattice.
//!
//! A [`Pattern`] stands for a downward-closed set of valid sequences and is
//! stored as the antichain of its maximal members. Only contiguous
//! subsequences take part in the order used for mining.

use rayon::prelude::*;

use crate::alphabet::{AlphabetSchema, Element, ElementProjection, Interval, Value};
use crate::error::{Error, Result};

/// Pair count above which [`pattern_meet`] fans out over the rayon pool.
const PARALLEL_PAIRS: usize = 64;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence {
    elements: Vec<Element>,
}

impl Sequence {
    pub fn new(elements: Vec<Element>) -> Self {
        Sequence { elements }
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn into_elements(self) -> Vec<Element> {
        self.elements
    }

    /// Valid: non-empty and free of `⊥`.
    pub fn is_valid(&self, schema: &AlphabetSchema) -> bool {
        !self.elements.is_empty() && !self.elements.iter().any(|e| schema.is_bottom(e))
    }
}

impl FromIterator<Element> for Sequence {
    fn from_iter<I: IntoIterator<Item = Element>>(iter: I) -> Self {
        Sequence::new(iter.into_iter().collect())
    }
}

fn check_sequence(schema: &AlphabetSchema, s: &Sequence) -> Result<()> {
    s.elements.iter().try_for_each(|e| schema.check(e))
}

/// A canonical antichain of maximal valid sequences. The empty antichain is
/// the most general description.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    seqs: Vec<Sequence>,
}

impl Pattern {
    pub fn empty() -> Self {
        Pattern::default()
    }

    pub fn sequences(&self) -> &[Sequence] {
        &self.seqs
    }

    pub fn len(&self) -> usize {
        self.seqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seqs.is_empty()
    }

    /// Total number of elements over all member sequences.
    pub fn element_count(&self) -> usize {
        self.seqs.iter().map(Sequence::len).sum()
    }

    /// Builds a pattern from sequences already known to form a canonical antichain.
    pub(crate) fn from_canonical(seqs: Vec<Sequence>) -> Self {
        debug_assert!(seqs.windows(2).all(|w| w[0] < w[1]));
        Pattern { seqs }
    }
}

/// Contiguous subsequence test, `t ≤ s`: some window of `s` dominates `t`
/// element by element.
pub fn contiguous_leq(schema: &AlphabetSchema, t: &Sequence, s: &Sequence) -> bool {
    let (t, s) = (&t.elements, &s.elements);
    if t.len() > s.len() {
        return false;
    }
    (0..=s.len() - t.len()).any(|k| t.iter().zip(&s[k..]).all(|(a, b)| schema.leq(a, b)))
}

/// Checked contiguous subsequence test.
pub fn is_subsequence_contiguous(
    schema: &AlphabetSchema,
    t: &Sequence,
    s: &Sequence,
) -> Result<bool> {
    check_sequence(schema, t)?;
    check_sequence(schema, s)?;
    Ok(contiguous_leq(schema, t, s))
}

/// Subsequence test with gaps allowed: an increasing index map `j_1 < … < j_k`
/// with `t_i ⊑ s_{j_i}`. Greedy earliest matching is exact here because the
/// match predicate depends only on the index pair.
pub fn is_subsequence_general(schema: &AlphabetSchema, t: &Sequence, s: &Sequence) -> Result<bool> {
    check_sequence(schema, t)?;
    check_sequence(schema, s)?;
    let mut it = s.elements.iter();
    Ok(t.elements
        .iter()
        .all(|a| it.by_ref().any(|b| schema.leq(a, b))))
}

/// Splits a run of elements at `⊥`, pushing every maximal valid run of
/// length at least `min_len.max(1)` into `out`.
pub(crate) fn split_valid_runs<I>(
    schema: &AlphabetSchema,
    elements: I,
    min_len: usize,
    out: &mut Vec<Sequence>,
) where
    I: IntoIterator<Item = Element>,
{
    let min_len = min_len.max(1);
    let mut run = Vec::new();
    for e in elements {
        if schema.is_bottom(&e) {
            if run.len() >= min_len {
                out.push(Sequence::new(std::mem::take(&mut run)));
            } else {
                run.clear();
            }
        } else {
            run.push(e);
        }
    }
    if run.len() >= min_len {
        out.push(Sequence::new(run));
    }
}

/// All alignments of `s` against `t`, each reduced to its valid runs.
///
/// `project` is applied to every aligned meet before splitting, and runs
/// shorter than `min_len` are dropped; with the identity projection and
/// `min_len = 0` this is the plain sequence meet.
pub(crate) fn alignment_runs(
    schema: &AlphabetSchema,
    s: &Sequence,
    t: &Sequence,
    project: Option<&ElementProjection>,
    min_len: usize,
    out: &mut Vec<Sequence>,
) {
    let (s, t) = (&s.elements, &t.elements);
    if s.is_empty() || t.is_empty() {
        return;
    }
    let (n, m) = (s.len() as isize, t.len() as isize);
    for offset in -(n - 1)..m {
        // s[i] is aligned with t[i + offset].
        let i0 = (-offset).max(0) as usize;
        let j0 = offset.max(0) as usize;
        let len = (s.len() - i0).min(t.len() - j0);
        if len < min_len {
            continue;
        }
        let meets = s[i0..i0 + len].iter().zip(&t[j0..j0 + len]).map(|(a, b)| {
            let m = schema.meet(a, b);
            match project {
                Some(p) => p.apply(schema, &m),
                None => m,
            }
        });
        split_valid_runs(schema, meets, min_len, out);
    }
}

/// The alignment-based meet of two sequences: the union of the valid runs of
/// every alignment, not yet reduced to an antichain.
pub fn sequence_meet(schema: &AlphabetSchema, s: &Sequence, t: &Sequence) -> Result<Vec<Sequence>> {
    check_sequence(schema, s)?;
    check_sequence(schema, t)?;
    let mut out = Vec::new();
    alignment_runs(schema, s, t, None, 0, &mut out);
    Ok(out)
}

/// Keeps the maximal sequences of `seqs` w.r.t. the contiguous order, in
/// canonical order. Invalid (empty or `⊥`-holding) inputs are dropped.
pub fn maximal_antichain<I>(schema: &AlphabetSchema, seqs: I) -> Pattern
where
    I: IntoIterator<Item = Sequence>,
{
    let mut all: Vec<Sequence> = seqs.into_iter().filter(|s| s.is_valid(schema)).collect();
    all.sort_unstable();
    all.dedup();
    if all.len() <= 1 {
        return Pattern::from_canonical(all);
    }
    let mut by_len: Vec<usize> = (0..all.len()).collect();
    by_len.sort_by_key(|&i| std::cmp::Reverse(all[i].len()));

    let mut keep = vec![false; all.len()];
    let mut kept: Vec<usize> = Vec::new();
    let mut g = 0;
    while g < by_len.len() {
        let len = all[by_len[g]].len();
        let mut h = g;
        while h < by_len.len() && all[by_len[h]].len() == len {
            h += 1;
        }
        let group = &by_len[g..h];
        let mut survivors = Vec::new();
        for &i in group {
            let s = &all[i];
            let dominated = kept.iter().any(|&k| contiguous_leq(schema, s, &all[k]))
                || group.iter().any(|&u| {
                    u != i
                        && s.elements
                            .iter()
                            .zip(&all[u].elements)
                            .all(|(a, b)| schema.leq(a, b))
                });
            if !dominated {
                survivors.push(i);
            }
        }
        for i in survivors {
            keep[i] = true;
            kept.push(i);
        }
        g = h;
    }
    let seqs = all
        .into_iter()
        .zip(keep)
        .filter_map(|(s, k)| k.then_some(s))
        .collect();
    Pattern::from_canonical(seqs)
}

/// Meet of two patterns, optionally fused with an element projection and a
/// minimal run length (see [`alignment_runs`]).
pub(crate) fn pattern_meet_with(
    schema: &AlphabetSchema,
    x: &Pattern,
    y: &Pattern,
    project: Option<&ElementProjection>,
    min_len: usize,
) -> Pattern {
    let pairs = x.seqs.len() * y.seqs.len();
    let runs: Vec<Sequence> = if pairs >= PARALLEL_PAIRS {
        x.seqs
            .par_iter()
            .flat_map_iter(|s| {
                let mut out = Vec::new();
                for t in &y.seqs {
                    alignment_runs(schema, s, t, project, min_len, &mut out);
                }
                out
            })
            .collect()
    } else {
        let mut out = Vec::new();
        for s in &x.seqs {
            for t in &y.seqs {
                alignment_runs(schema, s, t, project, min_len, &mut out);
            }
        }
        out
    };
    maximal_antichain(schema, runs)
}

/// `X ⊓ Y`: the maximal sequences among all pairwise sequence meets.
pub fn pattern_meet(schema: &AlphabetSchema, x: &Pattern, y: &Pattern) -> Pattern {
    pattern_meet_with(schema, x, y, None, 0)
}

/// `X ⊑ Y`: every member of `X` embeds contiguously in some member of `Y`.
pub fn pattern_leq(schema: &AlphabetSchema, x: &Pattern, y: &Pattern) -> bool {
    x.seqs
        .iter()
        .all(|s| y.seqs.iter().any(|t| contiguous_leq(schema, s, t)))
}

/// Collapses maximal runs of elements that agree on every non-interval field
/// into one element carrying the run length `[n,n]` in the repetition field.
pub fn run_length_encode(schema: &AlphabetSchema, raw: &Sequence) -> Result<Sequence> {
    let rep = schema.repetition_field().ok_or_else(|| {
        Error::config("run-length encoding needs exactly one interval field in the schema")
    })?;
    check_sequence(schema, raw)?;
    let same = |a: &Element, b: &Element| {
        a.values
            .iter()
            .zip(&b.values)
            .enumerate()
            .all(|(i, (x, y))| i == rep || x == y)
    };
    let close = |last: &mut Element, count: u32| -> Result<()> {
        if count > schema.max_rep() {
            return Err(Error::input(format!(
                "run of {count} repetitions exceeds max_rep {}",
                schema.max_rep()
            )));
        }
        last.values[rep] = Value::Interval(Interval::point(count));
        Ok(())
    };
    let mut out: Vec<Element> = Vec::with_capacity(raw.len());
    let mut count = 0u32;
    for e in &raw.elements {
        match out.last_mut() {
            Some(last) if same(last, e) => count += 1,
            _ => {
                if let Some(last) = out.last_mut() {
                    close(last, count)?;
                }
                out.push(e.clone());
                count = 1;
            }
        }
    }
    if let Some(last) = out.last_mut() {
        close(last, count)?;
    }
    Ok(Sequence::new(out))
}

/// Inverse of [`run_length_encode`]: unrolls `[n,n]` into `n` copies with `[1,1]`.
pub fn run_length_decode(schema: &AlphabetSchema, encoded: &Sequence) -> Result<Sequence> {
    let rep = schema.repetition_field().ok_or_else(|| {
        Error::config("run-length decoding needs exactly one interval field in the schema")
    })?;
    let mut out = Vec::new();
    for e in &encoded.elements {
        let Value::Interval(iv) = e.values[rep] else {
            return Err(Error::input("repetition field does not hold an interval"));
        };
        if iv.lo != iv.hi {
            return Err(Error::input(format!(
                "cannot unroll non-point interval [{},{}]",
                iv.lo, iv.hi
            )));
        }
        let mut unit = e.clone();
        unit.values[rep] = Value::Interval(Interval::point(1));
        out.extend(std::iter::repeat_n(unit, iv.lo as usize));
    }
    Ok(Sequence::new(out))
}

pub fn render_sequence(schema: &AlphabetSchema, s: &Sequence) -> String {
    let parts: Vec<String> = s
        .elements
        .iter()
        .map(|e| schema.render_element(e))
        .collect();
    format!("<{}>", parts.join(";"))
}

pub fn render_pattern(schema: &AlphabetSchema, p: &Pattern) -> Vec<String> {
    p.seqs.iter().map(|s| render_sequence(schema, s)).collect()
}
