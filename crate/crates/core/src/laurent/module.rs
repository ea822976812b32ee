use super::engine::{self, Budget, GroebnerConfig, Mono, Poly};
use super::groebner::{Ring, TermOrder, ZRank};
use super::poly::LaurentPoly;
use crate::error::Result;

/// Element of a free module `Rᵃ` over the Laurent ring.
pub type LaurentVector = Vec<LaurentPoly>;

/// A submodule of `Rᵃ` with a strong Gröbner basis (position over term).
#[derive(Clone, Debug)]
pub struct Submodule {
    ring: Ring,
    rank: usize,
    basis: Vec<Poly>,
}

fn check_len(v: &[LaurentPoly], rank: usize) {
    assert_eq!(v.len(), rank, "vector length does not match module rank");
}

impl Submodule {
    pub fn new(arity: usize, rank: usize, gens: &[LaurentVector], cfg: &GroebnerConfig) -> Result<Self> {
        let ring = Ring::new(arity, &TermOrder::DegLex);
        let mut input: Vec<Poly> = (0..rank as u32).flat_map(|k| ring.inverse_relations(k)).collect();
        for g in gens {
            check_len(g, rank);
            input.push(ring.encode(g, 0, true));
        }
        let basis = engine::buchberger(ring.layout(), input, rank == 1, &Budget::new(cfg))?;
        Ok(Submodule { ring, rank, basis })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn normal_form(&self, v: &[LaurentPoly]) -> LaurentVector {
        check_len(v, self.rank);
        let r = engine::reduce(self.ring.encode(v, 0, false), &self.basis, &Budget::unlimited()).expect("unlimited budget");
        self.ring.decode(&r, 0, self.rank)
    }

    pub fn contains(&self, v: &[LaurentPoly]) -> bool {
        self.normal_form(v).iter().all(LaurentPoly::is_zero)
    }

    /// ℤ-rank of `Rᵃ / self`.
    pub fn quotient_rank(&self) -> ZRank {
        let leads: Vec<&Mono> = self.basis.iter().map(|p| &p[0].m).collect();
        match engine::standard_monomials(self.ring.layout(), &leads, self.rank as u32) {
            Some(s) => ZRank::Finite(s.len()),
            None => ZRank::Infinite,
        }
    }
}

/// Generators of `{x ∈ Rᵐ : Σ xⱼ·columns[j] ∈ N}` where `N ⊆ Rᵃ` is
/// generated by `sub`.
///
/// Computed by elimination: a basis of the module generated by
/// `(columns[j], eⱼ)` and `(n, 0)` in `Rᵃ ⊕ Rᵐ`, with the first summand
/// dominating, contains a basis of the elements with vanishing first
/// component.
pub fn module_kernel(
    arity: usize,
    target_rank: usize,
    columns: &[LaurentVector],
    sub: &[LaurentVector],
    cfg: &GroebnerConfig,
) -> Result<Vec<LaurentVector>> {
    let ring = Ring::new(arity, &TermOrder::DegLex);
    let a = target_rank;
    let m = columns.len();
    let zero = LaurentPoly::zero(arity);
    let one = LaurentPoly::one(arity);
    let mut input: Vec<Poly> = (0..(a + m) as u32).flat_map(|k| ring.inverse_relations(k)).collect();
    for (j, col) in columns.iter().enumerate() {
        check_len(col, a);
        let mut v = col.clone();
        v.extend((0..m).map(|k| if k == j { one.clone() } else { zero.clone() }));
        input.push(ring.encode(&v, 0, true));
    }
    for n in sub {
        check_len(n, a);
        input.push(ring.encode(n, 0, true));
    }
    let basis = engine::buchberger(ring.layout(), input, false, &Budget::new(cfg))?;
    let mut out: Vec<LaurentVector> = Vec::new();
    for p in &basis {
        if p[0].m.pos < a as u32 {
            continue;
        }
        let x = ring.decode(p, a as u32, m);
        if x.iter().any(|q| !q.is_zero()) && !out.contains(&x) {
            out.push(x);
        }
    }
    Ok(out)
}
