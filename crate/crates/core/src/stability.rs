//! Exact concept stability, its descendant-based upper bound, the
//! threshold filter and concept ranking.

use std::cmp::Ordering;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{ConceptId, Lattice};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptStability {
    /// Subsets of the extent whose derivation is the intent.
    pub count: BigUint,
    /// `2^|extent|`.
    pub total: BigUint,
    /// `None` when the concept has no direct descendant.
    pub md: Option<usize>,
    pub support: usize,
}

impl ConceptStability {
    pub fn stability(&self) -> BigRational {
        BigRational::new(self.count.clone().into(), self.total.clone().into())
    }

    pub fn bound(&self) -> BigRational {
        bound_from_md(self.md)
    }

    pub fn stability_f64(&self) -> f64 {
        ratio_f64(&self.stability())
    }

    pub fn bound_f64(&self) -> f64 {
        ratio_f64(&self.bound())
    }
}

/// Per-concept stability, indexed by concept id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub concepts: Vec<ConceptStability>,
}

impl StabilityReport {
    pub fn get(&self, id: ConceptId) -> &ConceptStability {
        &self.concepts[id]
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }
}

pub fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn pow2(k: usize) -> BigUint {
    BigUint::one() << k
}

fn bound_from_md(md: Option<usize>) -> BigRational {
    match md {
        None => BigRational::one(),
        Some(k) => {
            let t = pow2(k);
            BigRational::new((&t - 1u32).into(), t.into())
        }
    }
}

/// `md(c)`: the smallest extent difference to a direct descendant.
pub fn md<D>(lat: &Lattice<D>, c: ConceptId) -> Result<Option<usize>> {
    let sup = lat.concept(c)?.support();
    Ok(lat
        .children(c)
        .iter()
        .map(|&d| sup - lat.concepts()[d].support())
        .min())
}

/// `1 − 2^{−md(c)}`, or 1 for a concept without direct descendants.
pub fn stability_bound<D>(lat: &Lattice<D>, c: ConceptId) -> Result<BigRational> {
    Ok(bound_from_md(md(lat, c)?))
}

fn structural_check<D>(lat: &Lattice<D>) -> Result<()> {
    if lat.is_empty() {
        return Err(Error::InvalidLattice("no concepts".into()));
    }
    for c in 0..lat.len() {
        let ext = &lat.concepts()[c].extent;
        for &k in lat.children(c) {
            let ke = &lat.concepts()[k].extent;
            if !ke.is_subset(ext) || ke == ext {
                return Err(Error::InvalidLattice(format!(
                    "edge {c} -> {k} does not shrink the extent"
                )));
            }
            if !lat.parents(k).contains(&c) {
                return Err(Error::InvalidLattice(format!(
                    "edge {c} -> {k} lacks its parent link"
                )));
            }
        }
    }
    let roots = (0..lat.len())
        .filter(|&c| lat.parents(c).is_empty())
        .count();
    if roots != 1 {
        return Err(Error::InvalidLattice(format!(
            "{roots} parentless concepts"
        )));
    }
    Ok(())
}

/// Exact stability of every concept by inclusion-exclusion over descendants:
/// `N(c) = 2^|Ext(c)| − Σ_{d < c} N(d)`.
pub fn stability_exact<D>(lat: &Lattice<D>) -> Result<StabilityReport> {
    structural_check(lat)?;
    let n = lat.len();
    let mut counts: Vec<Option<BigUint>> = vec![None; n];
    for c in lat.bottom_up_order() {
        let sup = lat.concepts()[c].support();
        let mut count = pow2(sup);
        for d in lat.descendants(c) {
            let nd = counts[d].as_ref().ok_or_else(|| {
                Error::InvalidLattice(format!("descendant {d} of {c} is not smaller"))
            })?;
            if *nd > count {
                return Err(Error::InvalidLattice(format!(
                    "negative subset count at concept {c}"
                )));
            }
            count -= nd;
        }
        counts[c] = Some(count);
    }
    let concepts = counts
        .into_iter()
        .enumerate()
        .map(|(c, count)| {
            let support = lat.concepts()[c].support();
            Ok(ConceptStability {
                count: count.expect("every concept visited"),
                total: pow2(support),
                md: md(lat, c)?,
                support,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityReport { concepts })
}

/// Smallest integer `md` with `1 − 2^{−md} ≥ θ`, i.e. `md ≥ −log₂(1−θ)`.
pub fn md_threshold(theta: &BigRational) -> Result<usize> {
    check_theta(theta)?;
    let mut k = 0usize;
    while bound_from_md(Some(k)) < *theta {
        k += 1;
    }
    Ok(k)
}

/// `−log₂(1−θ)` as a float, for display.
pub fn md_threshold_real(theta: f64) -> f64 {
    -(1.0 - theta).log2()
}

fn check_theta(theta: &BigRational) -> Result<()> {
    if *theta >= BigRational::one() || *theta < BigRational::zero() {
        return Err(Error::input(format!(
            "theta must lie in [0, 1), got {theta}"
        )));
    }
    Ok(())
}

/// Parses a decimal such as `0.97` into an exact rational.
pub fn parse_theta(s: &str) -> Result<BigRational> {
    let bad = || Error::input(format!("invalid theta `{s}`"));
    let s = s.trim();
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty()
        || !(int.chars().chain(frac.chars())).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigUint = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = BigUint::from(10u32).pow(frac.len() as u32);
    let theta = BigRational::new(digits.into(), den.into());
    check_theta(&theta)?;
    Ok(theta)
}

/// Concepts whose bound reaches `θ`: a superset of the θ-stable concepts.
/// Concepts without descendants have bound 1 and always pass.
pub fn stable_filter<D>(lat: &Lattice<D>, theta: &BigRational) -> Result<Vec<ConceptId>> {
    let k = md_threshold(theta)?;
    let mut out = Vec::new();
    for c in 0..lat.len() {
        if md(lat, c)?.is_none_or(|m| m >= k) {
            out.push(c);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankKey {
    #[default]
    Stability,
    Bound,
    Support,
}

impl FromStr for RankKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stability" => Ok(RankKey::Stability),
            "bound" => Ok(RankKey::Bound),
            "support" => Ok(RankKey::Support),
            _ => Err(Error::input(format!(
                "unknown rank key `{s}` (expected stability, bound or support)"
            ))),
        }
    }
}

impl std::fmt::Display for RankKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RankKey::Stability => "stability",
            RankKey::Bound => "bound",
            RankKey::Support => "support",
        })
    }
}

/// Orders concepts by `key` descending, then support descending, then id.
/// An empty-extent bottom is left out unless `include_empty` is set.
pub fn rank_concepts<D>(
    report: &StabilityReport,
    lat: &Lattice<D>,
    key: RankKey,
    include_empty: bool,
) -> Result<Vec<ConceptId>> {
    if report.len() != lat.len() {
        return Err(Error::input(format!(
            "report covers {} concepts, lattice has {}",
            report.len(),
            lat.len()
        )));
    }
    let mut ids: Vec<ConceptId> = (0..lat.len())
        .filter(|&c| include_empty || lat.concepts()[c].support() > 0 || lat.len() == 1)
        .collect();
    let primary = |a: &ConceptStability, b: &ConceptStability| -> Ordering {
        match key {
            // a/b vs c/d with positive denominators: compare a*d and c*b.
            RankKey::Stability => (&b.count * &a.total).cmp(&(&a.count * &b.total)),
            RankKey::Bound => b.bound().cmp(&a.bound()),
            RankKey::Support => Ordering::Equal,
        }
    };
    ids.sort_by(|&x, &y| {
        let (a, b) = (report.get(x), report.get(y));
        primary(a, b)
            .then(b.support.cmp(&a.support))
            .then(x.cmp(&y))
    });
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{brute_force_concepts, build_lattice, BuildOptions};
    use crate::projection::ProjectionSpec;
    use crate::pstruct::tests::{small_context, star_context, toy_structure};
    use crate::pstruct::{extent_to_intent, FormalContext, ObjectSet, PatternStructure};

    fn q(n: u64, d: u64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn set(n: usize, ids: &[usize]) -> ObjectSet {
        let mut s = ObjectSet::with_capacity(n);
        ids.iter().for_each(|&g| s.insert(g));
        s
    }

    /// Direct powerset enumeration of the stability numerator.
    fn brute_count<P: PatternStructure>(
        ps: &P,
        extent: &ObjectSet,
        intent: &P::Description,
    ) -> u64 {
        let members: Vec<usize> = extent.ones().collect();
        (0u64..1 << members.len())
            .filter(|mask| {
                let mut s = ObjectSet::with_capacity(ps.object_count());
                for (i, &g) in members.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        s.insert(g);
                    }
                }
                extent_to_intent(ps, &s) == *intent
            })
            .count() as u64
    }

    fn check_against_brute<P: PatternStructure>(ps: &P) {
        let lat = build_lattice(ps, BuildOptions::default()).unwrap();
        let rep = stability_exact(&lat).unwrap();
        let mut sum = BigUint::zero();
        for c in lat.concepts() {
            let s = rep.get(c.id);
            assert_eq!(
                s.count,
                BigUint::from(brute_count(ps, &c.extent, &c.intent))
            );
            assert!(s.stability() <= s.bound());
            sum += &s.count;
        }
        assert_eq!(sum, pow2(ps.object_count()));
    }

    #[test]
    fn small_context_values() {
        let ctx = small_context();
        let ps = ctx.as_pattern_structure();
        let lat = build_lattice(&ps, BuildOptions::default()).unwrap();
        let rep = stability_exact(&lat).unwrap();
        let sigma = |ids: &[usize]| rep.get(lat.find_extent(&set(4, ids)).unwrap()).stability();
        assert_eq!(sigma(&[0, 1, 3]), q(3, 8));
        assert_eq!(sigma(&[1, 3]), q(3, 4));
        assert_eq!(sigma(&[0, 1, 2, 3]), q(7, 16));
        assert_eq!(sigma(&[]), q(1, 1));
        check_against_brute(&ps);
    }

    #[test]
    fn star_context_values() {
        let ctx = star_context();
        let ps = ctx.as_pattern_structure();
        let lat = build_lattice(&ps, BuildOptions::default()).unwrap();
        let rep = stability_exact(&lat).unwrap();
        let m6 = lat.find_extent(&set(5, &[0, 1, 2, 3])).unwrap();
        assert_eq!(rep.get(m6).stability(), q(11, 16));
        assert!((rep.get(m6).stability_f64() - 0.6875).abs() < 1e-12);
        assert_eq!(stability_bound(&lat, m6).unwrap(), q(7, 8));
        assert_eq!(rep.get(m6).md, Some(3));
        for g in 0..4 {
            assert_eq!(
                rep.get(lat.find_extent(&set(5, &[g])).unwrap()).stability(),
                q(1, 2)
            );
        }
        assert_eq!(stability_bound(&lat, lat.bottom()).unwrap(), q(1, 1));
        check_against_brute(&ps);

        let ranked = rank_concepts(&rep, &lat, RankKey::Stability, false).unwrap();
        let nontrivial: Vec<_> = ranked
            .iter()
            .copied()
            .filter(|&c| c != lat.top() && lat.concepts()[c].support() > 1)
            .collect();
        assert_eq!(nontrivial[0], m6);
        assert!(!ranked.contains(&lat.bottom()));
        let by_support = rank_concepts(&rep, &lat, RankKey::Support, false).unwrap();
        assert_eq!(by_support[0], lat.top());
        assert!(rank_concepts(&rep, &lat, RankKey::Bound, true)
            .unwrap()
            .contains(&lat.bottom()));
    }

    #[test]
    fn shared_attribute_singletons() {
        let ctx = FormalContext::new(
            vec!["a".into(), "b".into()],
            vec!["common".into(), "pa".into(), "pb".into()],
            [(0, 0), (0, 1), (1, 0), (1, 2)],
        )
        .unwrap();
        let ps = ctx.as_pattern_structure();
        let lat = build_lattice(&ps, BuildOptions::default()).unwrap();
        let rep = stability_exact(&lat).unwrap();
        for g in 0..2 {
            assert_eq!(
                rep.get(lat.find_extent(&set(2, &[g])).unwrap()).stability(),
                q(1, 2)
            );
        }
    }

    #[test]
    fn filter_and_thresholds() {
        let ctx = star_context();
        let ps = ctx.as_pattern_structure();
        let lat = build_lattice(&ps, BuildOptions::default()).unwrap();
        let rep = stability_exact(&lat).unwrap();
        let m6 = lat.find_extent(&set(5, &[0, 1, 2, 3])).unwrap();

        let theta = parse_theta("0.97").unwrap();
        assert_eq!(theta, q(97, 100));
        assert_eq!(md_threshold(&theta).unwrap(), 6);
        assert!((md_threshold_real(0.97) - 5.06).abs() < 0.01);

        let kept = stable_filter(&lat, &parse_theta("0.8").unwrap()).unwrap();
        assert!(kept.contains(&m6));
        assert!(rep.get(m6).stability() < q(4, 5));
        assert_eq!(stable_filter(&lat, &q(0, 1)).unwrap().len(), lat.len());

        assert!(parse_theta("1").is_err());
        assert!(parse_theta("1.5").is_err());
        assert!(parse_theta("abc").is_err());
        assert!(stable_filter(&lat, &q(1, 1)).is_err());

        let half = lat
            .concepts()
            .iter()
            .find(|c| md(&lat, c.id).unwrap() == Some(1))
            .expect("a concept with a one-object child");
        assert_eq!(stability_bound(&lat, half.id).unwrap(), q(1, 2));

        for th in ["0", "0.3", "0.5", "0.75", "0.9", "0.97"] {
            let t = parse_theta(th).unwrap();
            let kept = stable_filter(&lat, &t).unwrap();
            for c in 0..lat.len() {
                if rep.get(c).stability() >= t {
                    assert!(
                        kept.contains(&c),
                        "theta {th}: stable concept {c} filtered out"
                    );
                }
            }
        }
    }

    #[test]
    fn rank_key_parsing() {
        assert_eq!("bound".parse::<RankKey>().unwrap(), RankKey::Bound);
        assert!("lift".parse::<RankKey>().is_err());
    }

    #[test]
    fn single_concept_lattice() {
        let ctx = FormalContext::new(vec!["g".into()], vec!["m".into()], [(0, 0)]).unwrap();
        let ps = ctx.as_pattern_structure();
        let lat = build_lattice(&ps, BuildOptions::default()).unwrap();
        assert_eq!(lat.len(), 1);
        let rep = stability_exact(&lat).unwrap();
        assert_eq!(
            rank_concepts(&rep, &lat, RankKey::Stability, false).unwrap(),
            vec![0]
        );
        assert_eq!(rep.get(0).stability(), q(2, 2));

        let ctx = FormalContext::new(vec![], vec!["m".into()], []).unwrap();
        let ps = ctx.as_pattern_structure();
        let lat = build_lattice(&ps, BuildOptions::default()).unwrap();
        let rep = stability_exact(&lat).unwrap();
        assert_eq!(
            rank_concepts(&rep, &lat, RankKey::Stability, false).unwrap(),
            vec![0]
        );
    }

    #[test]
    fn sequences_match_brute_and_projection_raises_stability() {
        let base_ps = toy_structure(&ProjectionSpec::identity());
        check_against_brute(&base_ps);
        let base = build_lattice(&base_ps, BuildOptions::default()).unwrap();
        let base_rep = stability_exact(&base).unwrap();
        assert_eq!(base_rep.get(base.top()).stability(), q(1, 8));

        let ps = toy_structure(&ProjectionSpec::mlp(3));
        check_against_brute(&ps);
        let lat = build_lattice(&ps, BuildOptions::default()).unwrap();
        assert_eq!(lat.len(), 7);
        let rep = stability_exact(&lat).unwrap();
        assert_eq!(rep.get(lat.top()).stability(), q(2, 8));
        for c in lat.concepts() {
            let b = base.find_extent(&c.extent).unwrap();
            assert!(rep.get(c.id).stability() >= base_rep.get(b).stability());
        }
        assert!(brute_force_concepts(&ps, 2).is_err());
    }
}
