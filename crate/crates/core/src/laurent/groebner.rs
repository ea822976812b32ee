use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::engine::{self, Budget, GroebnerConfig, Layout, Mono, Poly, Term};
use super::poly::{Exponents, LaurentPoly};
use crate::error::Result;
use crate::lattice::{smith_normal_form, IntMatrix, SmithDecomposition};

/// Monomial order on the internal ring. Every Laurent variable `tᵢ` comes
/// with its inverse `yᵢ`; within a block the inverses are compared first,
/// so normal forms favour nonnegative powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermOrder {
    /// One block: degree, then lexicographic on `y₁ > … > y_d > t₁ > … > t_d`.
    DegLex,
    /// Elimination order: blocks of Laurent variables, most significant
    /// first, each compared as in `DegLex`.
    Blocks(Vec<Vec<usize>>),
}

/// Internal polynomial ring `ℤ[t₁..t_d, y₁..y_d]` with `tᵢ = i`, `yᵢ = d + i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Ring {
    arity: usize,
    layout: Layout,
}

impl Ring {
    pub(crate) fn new(arity: usize, order: &TermOrder) -> Self {
        let blocks: Vec<Vec<usize>> = match order {
            TermOrder::DegLex => vec![(0..arity).collect()],
            TermOrder::Blocks(b) => b.clone(),
        };
        let internal: Vec<Vec<usize>> = blocks
            .iter()
            .filter(|b| !b.is_empty())
            .map(|b| b.iter().map(|&v| arity + v).chain(b.iter().copied()).collect())
            .collect();
        Ring { arity, layout: Layout::new(2 * arity, &internal) }
    }

    pub(crate) fn layout(&self) -> &Layout {
        &self.layout
    }

    fn mono(&self, e: &[i64], shift: &[i64], pos: u32) -> Mono {
        let d = self.arity;
        let mut x = vec![0u32; 2 * d];
        for i in 0..d {
            let v = e[i] + shift[i];
            if v >= 0 {
                x[i] = v as u32;
            } else {
                x[d + i] = (-v) as u32;
            }
        }
        Mono { pos, key: self.layout.key_from_exps(&x) }
    }

    /// Encodes a vector of Laurent polynomials at positions `offset..`.
    /// With `clear`, the whole vector is first multiplied by the monomial
    /// that makes every exponent nonnegative; this changes the element by a
    /// unit and is only suitable for generators.
    pub(crate) fn encode(&self, v: &[LaurentPoly], offset: u32, clear: bool) -> Poly {
        let d = self.arity;
        let mut shift = vec![0i64; d];
        if clear {
            for p in v {
                for (e, _) in p.terms() {
                    for i in 0..d {
                        shift[i] = shift[i].max(-e[i]);
                    }
                }
            }
        }
        let mut terms = Vec::new();
        for (k, p) in v.iter().enumerate() {
            assert_eq!(p.arity(), d, "arity mismatch");
            for (e, c) in p.terms() {
                terms.push(Term { m: self.mono(e, &shift, offset + k as u32), c: c.clone() });
            }
        }
        engine::normalize(terms)
    }

    pub(crate) fn exponents(&self, m: &Mono) -> Exponents {
        let x = self.layout.exps_from_key(&m.key);
        let d = self.arity;
        (0..d).map(|i| x[i] as i64 - x[d + i] as i64).collect()
    }

    /// Decodes positions `offset..offset+len` of an internal element.
    pub(crate) fn decode(&self, p: &Poly, offset: u32, len: usize) -> Vec<LaurentPoly> {
        let mut out = vec![LaurentPoly::zero(self.arity); len];
        for t in p {
            if t.m.pos >= offset && ((t.m.pos - offset) as usize) < len {
                out[(t.m.pos - offset) as usize].add_term(self.exponents(&t.m), t.c.clone());
            }
        }
        out
    }

    /// `tᵢyᵢ − 1` at position `pos`, for every variable.
    pub(crate) fn inverse_relations(&self, pos: u32) -> Vec<Poly> {
        let d = self.arity;
        (0..d)
            .map(|i| {
                let mut x = vec![0u32; 2 * d];
                x[i] = 1;
                x[d + i] = 1;
                engine::normalize(vec![
                    Term { m: Mono { pos, key: self.layout.key_from_exps(&x) }, c: BigInt::one() },
                    Term { m: Mono { pos, key: self.layout.one() }, c: -BigInt::one() },
                ])
            })
            .collect()
    }
}

/// Strong Gröbner basis over ℤ of an ideal of `ℤ[t₁^{±1}, …, t_d^{±1}]`,
/// computed in `ℤ[t, y]` modulo `tᵢyᵢ − 1`. Immutable once built.
#[derive(Clone)]
pub struct GroebnerBasis {
    ring: Ring,
    order: TermOrder,
    generators: Vec<LaurentPoly>,
    basis: Vec<Poly>,
    additive: OnceLock<Option<Additive>>,
}

/// The quotient as an abelian group: generated by the monomials under no
/// unit leading term, subject to `a·m = NF(a·m)` for each of them that is
/// under a leading term with coefficient `a`.
#[derive(Debug, Clone)]
struct Additive {
    support: Vec<Mono>,
    index: BTreeMap<Mono, usize>,
    snf: SmithDecomposition,
    /// Number of nonzero invariants.
    rank: usize,
}

impl fmt::Debug for GroebnerBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroebnerBasis")
            .field("arity", &self.ring.arity)
            .field("order", &self.order)
            .field("generators", &self.generators)
            .field("size", &self.basis.len())
            .finish()
    }
}

/// Strong Gröbner basis under the default order and step budget.
pub fn groebner(arity: usize, gens: &[LaurentPoly]) -> Result<GroebnerBasis> {
    groebner_with(arity, gens, TermOrder::DegLex, &GroebnerConfig::default())
}

pub fn groebner_with(arity: usize, gens: &[LaurentPoly], order: TermOrder, cfg: &GroebnerConfig) -> Result<GroebnerBasis> {
    let ring = Ring::new(arity, &order);
    let mut input: Vec<Poly> = ring.inverse_relations(0);
    input.extend(gens.iter().map(|g| ring.encode(std::slice::from_ref(g), 0, true)));
    let basis = engine::buchberger(ring.layout(), input, true, &Budget::new(cfg))?;
    Ok(GroebnerBasis { ring, order, generators: gens.to_vec(), basis, additive: OnceLock::new() })
}

/// ℤ-rank of a quotient, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ZRank {
    Finite(usize),
    Infinite,
}

impl ZRank {
    pub fn finite(self) -> Option<usize> {
        match self {
            ZRank::Finite(n) => Some(n),
            ZRank::Infinite => None,
        }
    }
}

impl fmt::Display for ZRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZRank::Finite(n) => write!(f, "{n}"),
            ZRank::Infinite => f.write_str("INFINITE"),
        }
    }
}

/// Additive structure of `ℤ[t^{±1}]/I` read off a strong Gröbner basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientReport {
    pub z_rank: ZRank,
    /// No torsion. When infinitely many monomials survive this is only the
    /// sufficient test that every leading coefficient is ±1.
    pub is_free: bool,
    /// Torsion invariants, when the quotient is spanned by finitely many
    /// monomials.
    pub torsion: Vec<BigInt>,
    /// An element `x ∉ I` and its order `n`, with `n·x ∈ I`.
    pub torsion_witness: Option<(LaurentPoly, BigInt)>,
    /// Monomials under no leading term, as Laurent exponents; empty when the
    /// rank is infinite.
    pub standard_monomials: Vec<Exponents>,
}

impl GroebnerBasis {
    pub fn arity(&self) -> usize {
        self.ring.arity
    }

    pub fn order(&self) -> &TermOrder {
        &self.order
    }

    pub fn generators(&self) -> &[LaurentPoly] {
        &self.generators
    }

    /// Number of elements of the internal basis, inverse relations included.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Leading terms of the internal basis as `(Laurent exponents, coefficient)`.
    pub fn leading_terms(&self) -> Vec<(Exponents, BigInt)> {
        self.basis.iter().map(|p| (self.ring.exponents(&p[0].m), p[0].c.clone())).collect()
    }

    /// The same basis scanned in a different order during reduction.
    /// Normal forms do not depend on it.
    pub fn permuted(&self, perm: &[usize]) -> GroebnerBasis {
        assert_eq!(perm.len(), self.basis.len(), "permutation length");
        let mut out = self.clone();
        out.basis = perm.iter().map(|&i| self.basis[i].clone()).collect();
        out.additive = OnceLock::new();
        out
    }

    pub fn normal_form(&self, p: &LaurentPoly) -> LaurentPoly {
        assert_eq!(p.arity(), self.ring.arity, "arity mismatch");
        let enc = self.ring.encode(std::slice::from_ref(p), 0, false);
        let r = engine::reduce(enc, &self.basis, &Budget::unlimited()).expect("unlimited budget");
        self.ring.decode(&r, 0, 1).pop().unwrap()
    }

    pub fn contains(&self, p: &LaurentPoly) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Each generator of either ideal lies in the other.
    pub fn ideal_equal(&self, other: &GroebnerBasis) -> bool {
        self.ring.arity == other.ring.arity
            && self.generators.iter().all(|g| other.contains(g))
            && other.generators.iter().all(|g| self.contains(g))
    }

    pub fn quotient_report(&self) -> QuotientReport {
        let leads: Vec<&Mono> = self.basis.iter().map(|p| &p[0].m).collect();
        let std = engine::standard_monomials(self.ring.layout(), &leads, 1);
        let z_rank = std.as_ref().map_or(ZRank::Infinite, |s| ZRank::Finite(s.len()));
        let standard_monomials = std.unwrap_or_default().iter().map(|m| self.ring.exponents(m)).collect();
        let unit_leads = self.basis.iter().all(|p| p[0].c.abs().is_one());
        let (is_free, torsion, torsion_witness) = match self.additive() {
            Some(a) => {
                let inv = &a.snf.invariants[..a.rank];
                let torsion: Vec<BigInt> = inv.iter().filter(|x| !x.is_one()).cloned().collect();
                let witness = inv.iter().position(|x| !x.is_one()).map(|i| {
                    let row = a.snf.v_inverse.row(i);
                    let mut p = LaurentPoly::zero(self.ring.arity);
                    for (m, c) in a.support.iter().zip(row) {
                        p.add_term(self.ring.exponents(m), c.clone());
                    }
                    (self.normal_form(&p), inv[i].clone())
                });
                (torsion.is_empty(), torsion, witness)
            }
            // finite rank but infinitely many torsion monomials: not finitely generated
            None if matches!(z_rank, ZRank::Finite(_)) => (false, Vec::new(), None),
            None => (unit_leads, Vec::new(), None),
        };
        QuotientReport { z_rank, is_free, torsion, torsion_witness, standard_monomials }
    }

    fn additive(&self) -> Option<&Additive> {
        self.additive.get_or_init(|| self.compute_additive()).as_ref()
    }

    fn compute_additive(&self) -> Option<Additive> {
        let unit: Vec<&Mono> = self.basis.iter().filter(|p| p[0].c.abs().is_one()).map(|p| &p[0].m).collect();
        let support = engine::standard_monomials(self.ring.layout(), &unit, 1)?;
        let index: BTreeMap<Mono, usize> = support.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for m in &support {
            let Some(a) = self
                .basis
                .iter()
                .filter(|p| p[0].m.pos == m.pos && engine::divides(&p[0].m.key, &m.key))
                .map(|p| p[0].c.abs())
                .min()
            else {
                continue;
            };
            let nf = engine::reduce(vec![Term { m: m.clone(), c: a.clone() }], &self.basis, &Budget::unlimited())
                .expect("unlimited budget");
            let mut row = vec![BigInt::zero(); support.len()];
            row[index[m]] = a;
            for t in nf {
                row[index[&t.m]] -= t.c;
            }
            rows.push(row);
        }
        let snf = smith_normal_form(&IntMatrix::from_rows(support.len(), &rows));
        let rank = snf.rank();
        Some(Additive { support, index, snf, rank })
    }

    /// Coordinates of `p` in `(ℤ[t^{±1}]/I) / torsion ≅ ℤⁿ`, in the basis
    /// returned by [`GroebnerBasis::z_basis`]. `None` unless that basis exists.
    pub fn free_coordinates(&self, p: &LaurentPoly) -> Option<Vec<BigInt>> {
        assert_eq!(p.arity(), self.ring.arity, "arity mismatch");
        let a = self.additive()?;
        let enc = self.ring.encode(std::slice::from_ref(p), 0, false);
        let nf = engine::reduce(enc, &self.basis, &Budget::unlimited()).expect("unlimited budget");
        let mut x = vec![BigInt::zero(); a.support.len()];
        for t in nf {
            x[a.index[&t.m]] += t.c;
        }
        Some(a.snf.v.left_apply(&x).split_off(a.rank))
    }

    /// Elements whose images form a ℤ-basis of the quotient modulo torsion,
    /// when the quotient is spanned by finitely many monomials.
    pub fn z_basis(&self) -> Option<Vec<LaurentPoly>> {
        let a = self.additive()?;
        Some(
            (a.rank..a.support.len())
                .map(|i| {
                    let mut p = LaurentPoly::zero(self.ring.arity);
                    for (m, c) in a.support.iter().zip(a.snf.v_inverse.row(i)) {
                        p.add_term(self.ring.exponents(m), c.clone());
                    }
                    self.normal_form(&p)
                })
                .collect(),
        )
    }

    /// Internal basis elements that only involve the variables `keep`,
    /// rewritten in a ring of arity `keep.len()`. Under an elimination order
    /// whose last block is `keep` these generate the elimination ideal.
    pub fn restrict_to(&self, keep: &[usize]) -> Vec<LaurentPoly> {
        let d = self.ring.arity;
        let mut out = Vec::new();
        for p in &self.basis {
            let exps: Vec<Exponents> = p.iter().map(|t| self.ring.exponents(&t.m)).collect();
            let raw: Vec<Vec<u32>> = p.iter().map(|t| self.ring.layout().exps_from_key(&t.m.key)).collect();
            let only_keep = raw.iter().all(|x| (0..d).all(|i| keep.contains(&i) || (x[i] == 0 && x[d + i] == 0)));
            if !only_keep {
                continue;
            }
            let mut q = LaurentPoly::zero(keep.len());
            for (e, t) in exps.iter().zip(p) {
                q.add_term(keep.iter().map(|&i| e[i]).collect(), t.c.clone());
            }
            if !q.is_zero() {
                out.push(q);
            }
        }
        out
    }
}

/// The quotient viewed as a module over the Laurent ring in the
/// coefficient variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeReport {
    /// Every basis element involving the other variables has a signed
    /// monomial in the coefficient variables as leading coefficient, and no
    /// basis element lives in the coefficient ring alone. Then the
    /// standard monomials form a basis over the coefficient ring.
    pub free: bool,
    pub rank: ZRank,
    /// Standard monomials in the other variables, as exponents over those
    /// variables in increasing index order.
    pub standard_monomials: Vec<Exponents>,
}

impl GroebnerBasis {
    /// Reads the quotient as a module over `ℤ[x_c^{±1} : c ∈ coefficients]`.
    /// Meaningful under an elimination order whose last block is
    /// `coefficients`.
    pub fn relative_report(&self, coefficients: &[usize]) -> RelativeReport {
        let d = self.ring.arity;
        let main: Vec<usize> = (0..d).filter(|i| !coefficients.contains(i)).collect();
        // internal slots of the main variables: tᵢ then yᵢ
        let slots: Vec<usize> = main.iter().copied().chain(main.iter().map(|&i| d + i)).collect();
        let project = |m: &Mono| -> Vec<u32> {
            let x = self.ring.layout().exps_from_key(&m.key);
            slots.iter().map(|&s| x[s]).collect()
        };
        let mut free = true;
        let mut leads: Vec<Vec<u32>> = Vec::new();
        for p in &self.basis {
            let lead = project(&p[0].m);
            if lead.iter().all(|&e| e == 0) {
                // only the inverse relations may live in the coefficient ring
                let x = self.ring.layout().exps_from_key(&p[0].m.key);
                let is_inverse = p.len() == 2 && coefficients.iter().any(|&c| x[c] == 1 && x[d + c] == 1);
                free &= is_inverse;
                continue;
            }
            let same: Vec<&Term> = p.iter().filter(|t| project(&t.m) == lead).collect();
            free &= same.len() == 1 && same[0].c.abs().is_one();
            leads.push(lead);
        }
        let divides = |a: &[u32], b: &[u32]| a.iter().zip(b).all(|(x, y)| x <= y);
        let k = slots.len();
        let bounded = (0..k).all(|v| leads.iter().any(|l| l[v] > 0 && (0..k).all(|w| w == v || l[w] == 0)));
        let mut standard = Vec::new();
        if bounded {
            let mut seen = std::collections::BTreeSet::new();
            let mut stack = vec![vec![0u32; k]];
            while let Some(m) = stack.pop() {
                if leads.iter().any(|l| divides(l, &m)) || !seen.insert(m.clone()) {
                    continue;
                }
                for v in 0..k {
                    let mut next = m.clone();
                    next[v] += 1;
                    stack.push(next);
                }
            }
            let n = main.len();
            standard = seen.iter().map(|m| (0..n).map(|i| m[i] as i64 - m[n + i] as i64).collect()).collect();
            standard.sort();
        }
        RelativeReport {
            free,
            rank: if bounded { ZRank::Finite(standard.len()) } else { ZRank::Infinite },
            standard_monomials: standard,
        }
    }
}

pub fn ideal_equal(a: &GroebnerBasis, b: &GroebnerBasis) -> bool {
    a.ideal_equal(b)
}

/// Generators of `I ∩ ℤ[t_keep^{±1}]` in a ring of arity `keep.len()`.
pub fn eliminate(arity: usize, gens: &[LaurentPoly], keep: &[usize], cfg: &GroebnerConfig) -> Result<Vec<LaurentPoly>> {
    let others: Vec<usize> = (0..arity).filter(|i| !keep.contains(i)).collect();
    let gb = groebner_with(arity, gens, TermOrder::Blocks(vec![others, keep.to_vec()]), cfg)?;
    Ok(gb.restrict_to(keep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn t() -> LaurentPoly {
        LaurentPoly::var(1, 0)
    }

    fn c(k: i64) -> LaurentPoly {
        LaurentPoly::constant(1, k)
    }

    #[test]
    fn principal_ideal_membership() {
        let gb = groebner(1, &[&t() - &c(1), &t().pow(2) - &c(1)]).unwrap();
        assert!(gb.normal_form(&(&t().pow(2) - &c(1))).is_zero());
        assert!(gb.contains(&(&t().pow(3) - &c(1))));
        let inv = LaurentPoly::monomial(vec![-5], 1);
        assert!(gb.contains(&(&inv - &c(1))));
    }

    #[test]
    fn square_staircase() {
        let sq = (&t() - &c(1)).pow(2);
        let gb = groebner(1, &[sq]).unwrap();
        assert_eq!(gb.normal_form(&t()), t());
        let rep = gb.quotient_report();
        assert_eq!(rep.z_rank, ZRank::Finite(2));
        assert!(rep.is_free);
        assert_eq!(rep.standard_monomials, vec![vec![0], vec![1]]);
        // t⁻¹ = 2 − t modulo (t − 1)²
        assert_eq!(gb.normal_form(&LaurentPoly::monomial(vec![-1], 1)), &c(2) - &t());
    }

    #[test]
    fn torsion_quotient() {
        let gb = groebner(1, &[c(2), &t() - &c(1)]).unwrap();
        let rep = gb.quotient_report();
        assert_eq!(rep.z_rank, ZRank::Finite(0));
        assert!(!rep.is_free);
        assert_eq!(rep.torsion_witness, Some((c(1), BigInt::from(2))));
        assert_eq!(rep.torsion, vec![BigInt::from(2)]);
        assert_eq!(gb.normal_form(&t().pow(7)), c(1));
        assert_eq!(gb.normal_form(&c(3)), c(1));
    }

    #[test]
    fn free_rank_three() {
        let one = c(1);
        let f = &(&one - &t()) * &(&one - &t().pow(2));
        let rep = groebner(1, &[f]).unwrap().quotient_report();
        assert_eq!(rep.z_rank, ZRank::Finite(3));
        assert!(rep.is_free);
    }

    #[test]
    fn zero_ideal() {
        let gb = groebner(1, &[]).unwrap();
        assert_eq!(gb.quotient_report().z_rank, ZRank::Infinite);
        assert!(gb.quotient_report().is_free);
        assert_eq!(gb.normal_form(&c(1)), c(1));
        let explicit_zero = groebner(1, &[LaurentPoly::zero(1)]).unwrap();
        assert!(gb.ideal_equal(&explicit_zero));
    }

    #[test]
    fn ideal_comparison() {
        let a = groebner(1, &[&t().pow(2) - &c(1), &t() - &c(1)]).unwrap();
        let b = groebner(1, &[&t() - &c(1)]).unwrap();
        let minus = groebner(1, &[&t() + &c(1)]).unwrap();
        assert!(a.ideal_equal(&b));
        assert!(!b.ideal_equal(&minus));
        assert_eq!(minus.normal_form(&(&t() - &c(1))), c(-2));
    }

    #[test]
    fn elimination_to_one_variable() {
        // ⟨(t₁−1)(t₂−1), t₁ − t₂⟩ ∩ ℤ[t₂^{±1}] = ⟨(t₂−1)²⟩
        let t1 = LaurentPoly::var(2, 0);
        let t2 = LaurentPoly::var(2, 1);
        let one = LaurentPoly::one(2);
        let gens = [&(&t1 - &one) * &(&t2 - &one), &t1 - &t2];
        let e = eliminate(2, &gens, &[1], &GroebnerConfig::default()).unwrap();
        let lhs = groebner(1, &e).unwrap();
        let rhs = groebner(1, &[(&t() - &c(1)).pow(2)]).unwrap();
        assert!(lhs.ideal_equal(&rhs));
    }

    #[test]
    fn step_budget_is_reported() {
        let t1 = LaurentPoly::var(3, 0);
        let t2 = LaurentPoly::var(3, 1);
        let t3 = LaurentPoly::var(3, 2);
        let one = LaurentPoly::one(3);
        let gens = [&t1.pow(5) - &t2.pow(3), &(&t2 * &t3).pow(2) - &one, &t3.pow(4) - &t1];
        let err = groebner_with(3, &gens, TermOrder::DegLex, &GroebnerConfig::with_budget(10)).unwrap_err();
        assert_eq!(err, Error::ResourceLimit { budget: 10 });
    }
}
