//! Stanley–Reisner algebras over a Laurent coefficient ring with
//! designated units, and their freeness over that ring.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::fan::{is_complete, is_smooth, Fan};
use crate::ktheory::{character_ideal, character_monomial, stanley_reisner_ideal, CoefficientTag, RingPresentation};
use crate::lattice::{quotient_group, FgAbelianGroup, IntMatrix, SublatticeSpec};
use crate::laurent::{groebner_with, Exponents, GroebnerConfig, LaurentPoly, TermOrder, ZRank};

/// `A = ℤ[u₁^{±1}, …]` with a list of units `r₁, …, r_k ∈ A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientRingSpec {
    pub base_vars: Vec<String>,
    /// Relations among the base variables. Rank checks require none.
    pub extra_relations: Vec<LaurentPoly>,
    pub designated_units: Vec<LaurentPoly>,
}

impl CoefficientRingSpec {
    /// Checks that every unit is a signed monomial in the base variables.
    pub fn new(base_vars: Vec<String>, designated_units: Vec<LaurentPoly>) -> Result<Self> {
        for u in &designated_units {
            if u.arity() != base_vars.len() {
                return Err(Error::ArityMismatch { expected: base_vars.len(), got: u.arity() });
            }
            if u.as_unit_monomial().is_none() {
                return Err(Error::InvalidInput(format!("{} is not a signed monomial", u.display_with(&base_vars))));
            }
        }
        Ok(CoefficientRingSpec { base_vars, extra_relations: Vec::new(), designated_units })
    }

    /// Parses units written as `1`, `-1`, `u1`, `-u2`, `u1^-1*u2^3`.
    pub fn parse(base_vars: Vec<String>, units: &[&str]) -> Result<Self> {
        let parsed = units.iter().map(|s| parse_unit(s, &base_vars)).collect::<Result<Vec<_>>>()?;
        Self::new(base_vars, parsed)
    }
}

/// Parses a signed monomial in the named variables.
pub fn parse_unit(s: &str, vars: &[String]) -> Result<LaurentPoly> {
    let bad = || Error::InvalidInput(format!("cannot read unit {s:?}"));
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, t.strip_prefix('+').unwrap_or(t).trim()),
    };
    let mut exps = vec![0i64; vars.len()];
    if body != "1" {
        for factor in body.split('*') {
            let (name, power) = match factor.trim().split_once('^') {
                Some((n, p)) => (n.trim(), p.trim().parse::<i64>().map_err(|_| bad())?),
                None => (factor.trim(), 1),
            };
            let i = vars.iter().position(|v| v == name).ok_or_else(bad)?;
            exps[i] += power;
        }
    }
    Ok(LaurentPoly::monomial(exps, if neg { -1 } else { 1 }))
}

/// `A[t₁^{±1}, …, t_d^{±1}] / (Stanley–Reisner ideal, t_{χᵢ} − rᵢ)`.
///
/// Variables are the ray variables followed by the base variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundlePresentation {
    pub presentation: RingPresentation,
    pub fan_arity: usize,
    pub coefficients: CoefficientRingSpec,
    pub sr_relations: Vec<LaurentPoly>,
    pub unit_relations: Vec<LaurentPoly>,
    pub base_relations: Vec<LaurentPoly>,
    /// The characters `χᵢ` paired with the units, in order.
    pub characters: IntMatrix,
    /// `|M/M'|` when finite.
    pub index: Option<BigInt>,
    pub max_cones: usize,
    /// `t_χ − 1` for a basis of all characters, in the full variable set.
    pub augmentation: Vec<LaurentPoly>,
}

impl BundlePresentation {
    pub fn arity(&self) -> usize {
        self.presentation.arity()
    }

    fn base_positions(&self) -> Vec<usize> {
        (self.fan_arity..self.arity()).collect()
    }

    /// The relations with every base variable set to 1, in the ray
    /// variables only.
    pub fn specialize_units(&self) -> Vec<LaurentPoly> {
        let d = self.fan_arity;
        let images: Vec<LaurentPoly> = (0..self.arity())
            .map(|i| if i < d { LaurentPoly::var(d, i) } else { LaurentPoly::one(d) })
            .collect();
        self.presentation
            .relations
            .iter()
            .map(|r| r.substitute(&images).expect("base variables map to units"))
            .filter(|r| !r.is_zero())
            .collect()
    }
}

pub fn sr_algebra(f: &Fan, sub: &SublatticeSpec, a: &CoefficientRingSpec) -> Result<BundlePresentation> {
    if !is_smooth(f) {
        return Err(Error::NotSmooth);
    }
    if !is_complete(f) {
        return Err(Error::NotComplete);
    }
    let chars = sub.hermite_basis();
    if chars.rows() != a.designated_units.len() {
        return Err(Error::UnitArityMismatch { expected: chars.rows(), got: a.designated_units.len() });
    }
    let d = f.ray_count();
    let b = a.base_vars.len();
    let fan_pos: Vec<usize> = (0..d).collect();
    let base_pos: Vec<usize> = (d..d + b).collect();
    let sr: Vec<LaurentPoly> = stanley_reisner_ideal(f).iter().map(|p| p.embed(d + b, &fan_pos)).collect();
    let mut units = Vec::new();
    for (chi, r) in chars.row_vecs().iter().zip(&a.designated_units) {
        let t_chi = character_monomial(f, chi)?.embed(d + b, &fan_pos);
        units.push(&t_chi - &r.embed(d + b, &base_pos));
    }
    let base: Vec<LaurentPoly> = a.extra_relations.iter().map(|p| p.embed(d + b, &base_pos)).collect();

    let mut variables: Vec<String> = (1..=d).map(|j| format!("t{j}")).collect();
    for v in &a.base_vars {
        if variables.contains(v) {
            return Err(Error::InvalidInput(format!("base variable {v} clashes with a ray variable")));
        }
        variables.push(v.clone());
    }
    let mut annotations = BTreeMap::new();
    for j in 1..=d {
        annotations.insert(format!("t{j}"), format!("bundle class of the dual line bundle of ray {j}"));
    }
    for v in &a.base_vars {
        annotations.insert(v.clone(), "invertible class of the coefficient ring".to_string());
    }
    let relations: Vec<LaurentPoly> = sr.iter().chain(&units).chain(&base).cloned().collect();
    let index = quotient_group(f.lattice_rank(), sub)?.group.order();
    let augmentation = character_ideal(f, &SublatticeSpec::full(f.lattice_rank()))?
        .iter()
        .map(|p| p.embed(d + b, &fan_pos))
        .collect();
    Ok(BundlePresentation {
        presentation: RingPresentation {
            coefficient_tag: CoefficientTag::UserRing { base_vars: a.base_vars.clone() },
            variables,
            relations,
            annotations,
        },
        fan_arity: d,
        coefficients: a.clone(),
        sr_relations: sr,
        unit_relations: units,
        base_relations: base,
        characters: chars,
        index,
        max_cones: f.max_cones().len(),
        augmentation,
    })
}

/// Monomial basis of `A[x^{±1}] / (x^{aᵢ} − rᵢ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreenessReport {
    pub rank: ZRank,
    /// `ℤⁿ` modulo the exponent lattice.
    pub cosets: FgAbelianGroup,
    /// One exponent vector per coset when finite.
    pub basis: Vec<Exponents>,
    pub exponent_matrix: IntMatrix,
}

/// Splits a relation in `fan_arity + base` variables into its fan
/// exponent vector, rejecting anything but `±x^a ∓ r` with `r` a unit.
fn split_relation(rel: &LaurentPoly, fan_arity: usize) -> Result<Vec<i64>> {
    let shown = rel.to_string();
    let malformed = |why: &str| Error::MalformedRelation(format!("{shown}: {why}"));
    let terms: Vec<(&Exponents, &BigInt)> = rel.terms().collect();
    if terms.len() != 2 {
        return Err(malformed("expected a monomial minus a unit"));
    }
    if terms.iter().any(|(_, c)| !c.abs().is_one()) {
        return Err(malformed("coefficients must be ±1"));
    }
    let fan_part = |e: &Exponents| e[..fan_arity].iter().any(|x| *x != 0);
    let base_part = |e: &Exponents| e[fan_arity..].iter().any(|x| *x != 0);
    if terms.iter().any(|(e, _)| fan_part(e) && base_part(e)) {
        return Err(malformed("a term mixes ray and base variables"));
    }
    match (fan_part(terms[0].0), fan_part(terms[1].0)) {
        (true, true) => Err(malformed("both terms involve ray variables")),
        (true, false) => Ok(terms[0].0[..fan_arity].to_vec()),
        (false, true) => Ok(terms[1].0[..fan_arity].to_vec()),
        (false, false) => Ok(vec![0; fan_arity]),
    }
}

/// Each relation `x^{aᵢ} − rᵢ` lets `x^{aᵢ}` be traded for a unit of `A`,
/// so the quotient is free over `A` on one monomial per coset of the
/// lattice spanned by the `aᵢ`.
pub fn unit_monomial_freeness(a: &CoefficientRingSpec, fan_arity: usize, relations: &[LaurentPoly]) -> Result<FreenessReport> {
    let total = fan_arity + a.base_vars.len();
    let mut rows = Vec::with_capacity(relations.len());
    for r in relations {
        if r.arity() != total {
            return Err(Error::ArityMismatch { expected: total, got: r.arity() });
        }
        rows.push(split_relation(r, fan_arity)?);
    }
    let row_refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    let exponent_matrix =
        if rows.is_empty() { IntMatrix::zeros(0, fan_arity) } else { IntMatrix::from_i64_rows(&row_refs) };
    let q = quotient_group(fan_arity, &SublatticeSpec::new(fan_arity, exponent_matrix.clone())?)?;
    let basis: Vec<Exponents> = q
        .coset_representatives()
        .unwrap_or_default()
        .iter()
        .map(|c| c.iter().map(|x| i64::try_from(x).expect("small coset representative")).collect())
        .collect();
    let rank = if q.group.is_finite() { ZRank::Finite(basis.len()) } else { ZRank::Infinite };
    Ok(FreenessReport { rank, cosets: q.group, basis, exponent_matrix })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleRankReport {
    /// The ray-variable standard monomials form an `A`-basis.
    pub a_free: bool,
    pub a_rank: ZRank,
    pub standard_monomials: Vec<Exponents>,
    /// `#Δ_max × |M/M'|`, or `Infinite` for a positive-dimensional group.
    pub expected_rank: ZRank,
    /// `A`-rank after also setting every character of the torus to 1.
    pub augmented_rank: ZRank,
    pub matches_rank_law: bool,
}

/// `A`-rank of the bundle presentation by a Gröbner basis in which the
/// base variables are the least significant block.
pub fn bundle_rank_check(bp: &BundlePresentation, cfg: &GroebnerConfig) -> Result<BundleRankReport> {
    if !bp.base_relations.is_empty() {
        return Err(Error::NotSupported("coefficient rings with extra relations".into()));
    }
    let d = bp.fan_arity;
    let n = bp.arity();
    let base = bp.base_positions();
    let order = TermOrder::Blocks(vec![(0..d).collect(), base.clone()]);
    let gb = groebner_with(n, &bp.presentation.relations, order.clone(), cfg)?;
    let rel = gb.relative_report(&base);

    let mut augmented = bp.sr_relations.clone();
    augmented.extend(bp.augmentation.iter().cloned());
    let aug = groebner_with(n, &augmented, order, cfg)?.relative_report(&base);

    let expected_rank = match &bp.index {
        Some(k) => ZRank::Finite(bp.max_cones * usize::try_from(k).map_err(|_| Error::NotSupported("index too large".into()))?),
        None => ZRank::Infinite,
    };
    let matches_rank_law = rel.free && rel.rank == expected_rank && aug.free && aug.rank == ZRank::Finite(bp.max_cones);
    Ok(BundleRankReport {
        a_free: rel.free,
        a_rank: rel.rank,
        standard_monomials: rel.standard_monomials,
        expected_rank,
        augmented_rank: aug.rank,
        matches_rank_law,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::tests::{p1, p2};
    use crate::ktheory::k0_presentation;
    use crate::fan::StackyFan;
    use crate::laurent::groebner;

    fn cfg() -> GroebnerConfig {
        GroebnerConfig::default()
    }

    #[test]
    fn unit_parsing() {
        let vars = vec!["u1".to_string(), "u2".to_string()];
        assert_eq!(parse_unit("-u2", &vars).unwrap(), LaurentPoly::monomial(vec![0, 1], -1));
        assert_eq!(parse_unit("1", &vars).unwrap(), LaurentPoly::one(2));
        assert_eq!(parse_unit("u1^-1*u2^3", &vars).unwrap(), LaurentPoly::monomial(vec![-1, 3], 1));
        assert!(parse_unit("v", &vars).is_err());
        assert!(parse_unit("u1^x", &vars).is_err());
    }

    #[test]
    fn projective_line_bundle() {
        let a = CoefficientRingSpec::parse(vec!["u".into()], &["u"]).unwrap();
        let f = p1();
        let bp = sr_algebra(&f, &SublatticeSpec::full(1), &a).unwrap();
        assert_eq!(bp.presentation.relation_strings(), vec!["t1*t2 - t1 - t2 + 1", "t1^-1*t2 - u"]);
        let rep = bundle_rank_check(&bp, &cfg()).unwrap();
        assert!(rep.a_free);
        assert_eq!(rep.a_rank, ZRank::Finite(2));
        assert!(rep.matches_rank_law);
    }

    #[test]
    fn units_set_to_one_recover_the_fiber() {
        let a = CoefficientRingSpec::parse(vec!["u".into()], &["u"]).unwrap();
        let f = p1();
        let bp = sr_algebra(&f, &SublatticeSpec::full(1), &a).unwrap();
        let fiber = k0_presentation(&StackyFan::trivial(f)).unwrap();
        let lhs = groebner(2, &bp.specialize_units()).unwrap();
        let rhs = groebner(2, &fiber.relations).unwrap();
        assert!(lhs.ideal_equal(&rhs));
    }

    #[test]
    fn plane_bundle() {
        let a = CoefficientRingSpec::parse(vec!["u1".into(), "u2".into()], &["u1", "u2"]).unwrap();
        let f = p2();
        let bp = sr_algebra(&f, &SublatticeSpec::full(2), &a).unwrap();
        let rep = bundle_rank_check(&bp, &cfg()).unwrap();
        assert!(rep.a_free);
        assert_eq!(rep.a_rank, ZRank::Finite(3));
    }

    #[test]
    fn torus_case_is_augmented() {
        let a = CoefficientRingSpec::parse(vec!["u".into()], &[]).unwrap();
        let f = p1();
        let bp = sr_algebra(&f, &SublatticeSpec::zero(1), &a).unwrap();
        let rep = bundle_rank_check(&bp, &cfg()).unwrap();
        assert_eq!(rep.a_rank, ZRank::Infinite);
        assert_eq!(rep.expected_rank, ZRank::Infinite);
        assert_eq!(rep.augmented_rank, ZRank::Finite(2));
        assert!(rep.matches_rank_law);
    }

    #[test]
    fn unit_count_must_match() {
        let a = CoefficientRingSpec::parse(vec!["u".into()], &["u", "u"]).unwrap();
        assert_eq!(
            sr_algebra(&p1(), &SublatticeSpec::full(1), &a),
            Err(Error::UnitArityMismatch { expected: 1, got: 2 })
        );
    }

    #[test]
    fn monomial_unit_quotients() {
        let a = CoefficientRingSpec::parse(vec!["u".into(), "v".into()], &[]).unwrap();
        let vars = |s: &str| parse_unit(s, &["x".into(), "y".into(), "u".into(), "v".into()]).unwrap();
        let rel = |m: &str, r: &str| &vars(m) - &vars(r);
        let r = unit_monomial_freeness(&a, 2, &[rel("x^2", "u")]).unwrap();
        assert_eq!(r.rank, ZRank::Infinite);
        let r = unit_monomial_freeness(&a, 2, &[rel("x^2", "u"), rel("y^3", "v")]).unwrap();
        assert_eq!(r.rank, ZRank::Finite(6));
        let a1 = CoefficientRingSpec::parse(vec!["u".into()], &[]).unwrap();
        let one = |s: &str| parse_unit(s, &["x".into(), "u".into()]).unwrap();
        let r = unit_monomial_freeness(&a1, 1, &[&one("x^2") - &one("u")]).unwrap();
        assert_eq!(r.rank, ZRank::Finite(2));
        assert_eq!(r.basis, vec![vec![0], vec![1]]);
        let r = unit_monomial_freeness(&a1, 1, &[&one("x") - &one("u")]).unwrap();
        assert_eq!(r.rank, ZRank::Finite(1));
    }

    #[test]
    fn malformed_relations() {
        let a = CoefficientRingSpec::parse(vec!["u".into()], &[]).unwrap();
        let p = |s: &str| parse_unit(s, &["x".into(), "u".into()]).unwrap();
        let two_x = p("x").scale(&BigInt::from(2));
        for bad in [&two_x - &p("u"), &p("x") - &p("x^2"), &p("x*u") - &p("1"), p("x")] {
            assert!(matches!(unit_monomial_freeness(&a, 1, &[bad]), Err(Error::MalformedRelation(_))));
        }
    }
}
