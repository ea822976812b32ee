use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::engine::GroebnerConfig;
use super::groebner::{groebner_with, TermOrder, ZRank};
use super::module::{module_kernel, LaurentVector, Submodule};
use super::poly::LaurentPoly;
use crate::error::{Error, Result};
use crate::fan::k_subsets;
use crate::lattice::{smith_normal_form, FgAbelianGroup, IntMatrix};

/// The module whose Koszul homology is taken.
#[derive(Debug, Clone)]
pub enum TorModule {
    /// `R / ⟨relations⟩`.
    Cyclic(Vec<LaurentPoly>),
    /// `Rᵏ / ⟨relations⟩`; only `k = 1` is supported.
    Presented { rank: usize, relations: Vec<LaurentVector> },
}

/// Homology in one degree, presented over the Laurent ring: the
/// generators live in `R^{C(r,s)}` and each relation is a column of
/// coefficients on the generators.
#[derive(Debug, Clone)]
pub struct TorDegree {
    pub s: usize,
    pub generators: Vec<LaurentVector>,
    pub relations: Vec<LaurentVector>,
    /// `None` when neither the cycles nor the boundaries have finite
    /// corank, so the ℤ-rank is not determined by this computation.
    pub z_rank: Option<ZRank>,
    /// Full abelian group structure, available when the module is a free
    /// ℤ-module of finite rank.
    pub group: Option<FgAbelianGroup>,
}

impl TorDegree {
    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct TorResult {
    pub base_arity: usize,
    /// Length `r` of the sequence; degrees above it vanish.
    pub length: usize,
    pub degrees: Vec<TorDegree>,
    /// Whether the sequence has vanishing higher Koszul homology on `R`
    /// itself. When it does not, the homology is still reported but is not
    /// a Tor computation.
    pub regular_sequence: bool,
    pub warnings: Vec<String>,
}

impl TorResult {
    pub fn degree(&self, s: usize) -> Option<&TorDegree> {
        self.degrees.iter().find(|d| d.s == s)
    }

    /// `true` for every `s` above the sequence length.
    pub fn vanishes(&self, s: usize) -> Option<bool> {
        if s > self.length {
            return Some(true);
        }
        self.degree(s).map(TorDegree::is_zero)
    }
}

/// Differential `Λˢ Rʳ → Λˢ⁻¹ Rʳ` as columns, `e_S ↦ Σₖ (−1)ᵏ eₛₖ · e_{S∖sₖ}`.
fn differential(arity: usize, seq: &[LaurentPoly], s: usize) -> Vec<LaurentVector> {
    let r = seq.len();
    let rows = k_subsets(r, s - 1);
    let index: BTreeMap<Vec<usize>, usize> = rows.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    k_subsets(r, s)
        .into_iter()
        .map(|set| {
            let mut col = vec![LaurentPoly::zero(arity); rows.len()];
            for (k, &i) in set.iter().enumerate() {
                let rest: Vec<usize> = set.iter().copied().filter(|&x| x != i).collect();
                let term = if k % 2 == 0 { seq[i].clone() } else { -&seq[i] };
                let row = index[&rest];
                col[row] = &col[row] + &term;
            }
            col
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> usize {
    k_subsets(n, k).len()
}

fn unit_vector(arity: usize, len: usize, k: usize, p: &LaurentPoly) -> LaurentVector {
    (0..len).map(|i| if i == k { p.clone() } else { LaurentPoly::zero(arity) }).collect()
}

fn homology(
    arity: usize,
    seq: &[LaurentPoly],
    rel: &[LaurentPoly],
    s: usize,
    cfg: &GroebnerConfig,
) -> Result<TorDegree> {
    let r = seq.len();
    let a = binomial(r, s);
    let cycles: Vec<LaurentVector> = if s == 0 {
        (0..a).map(|k| unit_vector(arity, a, k, &LaurentPoly::one(arity))).collect()
    } else {
        let below = binomial(r, s - 1);
        let sub: Vec<LaurentVector> =
            (0..below).flat_map(|k| rel.iter().map(move |g| unit_vector(arity, below, k, g))).collect();
        module_kernel(arity, below, &differential(arity, seq, s), &sub, cfg)?
    };
    let mut boundaries: Vec<LaurentVector> = if s < r { differential(arity, seq, s + 1) } else { Vec::new() };
    boundaries.extend((0..a).flat_map(|k| rel.iter().map(move |g| unit_vector(arity, a, k, g))));
    let bsub = Submodule::new(arity, a, &boundaries, cfg)?;
    let mut generators: Vec<LaurentVector> = Vec::new();
    for z in &cycles {
        let nf = bsub.normal_form(z);
        if nf.iter().any(|p| !p.is_zero()) && !generators.contains(&nf) {
            generators.push(nf);
        }
    }
    if generators.is_empty() {
        return Ok(TorDegree { s, generators, relations: Vec::new(), z_rank: Some(ZRank::Finite(0)), group: None });
    }
    let relations = module_kernel(arity, a, &generators, &boundaries, cfg)?;
    let mut zgens = generators.clone();
    zgens.extend(boundaries.iter().cloned());
    let zsub = Submodule::new(arity, a, &zgens, cfg)?;
    let z_rank = match (bsub.quotient_rank(), zsub.quotient_rank()) {
        (ZRank::Finite(b), ZRank::Finite(z)) => Some(ZRank::Finite(b - z)),
        (ZRank::Infinite, ZRank::Finite(_)) => Some(ZRank::Infinite),
        _ => None,
    };
    Ok(TorDegree { s, generators, relations, z_rank, group: None })
}

/// Koszul homology by integer linear algebra, for `R/I` free of finite
/// rank over ℤ. Returns the groups `H_0..H_top`.
fn finite_homology(arity: usize, seq: &[LaurentPoly], rel: &[LaurentPoly], top: usize, cfg: &GroebnerConfig) -> Result<Option<Vec<FgAbelianGroup>>> {
    let gb = groebner_with(arity, rel, TermOrder::DegLex, cfg)?;
    if !gb.quotient_report().is_free {
        return Ok(None);
    }
    let Some(basis) = gb.z_basis() else {
        return Ok(None);
    };
    let n = basis.len();
    // mult[i]: matrix of multiplication by seq[i] on the ℤ-basis
    let mult: Vec<IntMatrix> = seq
        .iter()
        .map(|e| {
            let mut m = IntMatrix::zeros(n, n);
            for (j, b) in basis.iter().enumerate() {
                let x = gb.free_coordinates(&(e * b)).expect("finite quotient");
                for (i, c) in x.into_iter().enumerate() {
                    m.set(i, j, c);
                }
            }
            m
        })
        .collect();
    let r = seq.len();
    let matrix = |s: usize| -> IntMatrix {
        // d_s : K_s → K_{s-1}
        let rows = k_subsets(r, s - 1);
        let cols = k_subsets(r, s);
        let mut d = IntMatrix::zeros(n * rows.len(), n * cols.len());
        for (ci, set) in cols.iter().enumerate() {
            for (k, &i) in set.iter().enumerate() {
                let rest: Vec<usize> = set.iter().copied().filter(|&x| x != i).collect();
                let ri = rows.iter().position(|x| *x == rest).unwrap();
                let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                for a in 0..n {
                    for b in 0..n {
                        let v = mult[i].get(a, b);
                        if !v.is_zero() {
                            d.set(ri * n + a, ci * n + b, v * &sign);
                        }
                    }
                }
            }
        }
        d
    };
    let mut groups = Vec::new();
    for s in 0..=top.min(r) {
        let dim = n * binomial(r, s);
        let rank_out = if s == 0 { 0 } else { matrix(s).rank() };
        let (rank_in, torsion) = if s < r {
            let snf = smith_normal_form(&matrix(s + 1));
            let t: Vec<BigInt> = snf.invariants.iter().filter(|x| *x > &BigInt::one()).cloned().collect();
            (snf.rank(), t)
        } else {
            (0, Vec::new())
        };
        groups.push(FgAbelianGroup { free_rank: dim - rank_out - rank_in, torsion });
    }
    Ok(Some(groups))
}

/// Homology of the Koszul complex on `sequence` tensored with the given
/// module, in degrees `0..=min(s_max, r)`.
pub fn koszul_tor(
    base_arity: usize,
    sequence: &[LaurentPoly],
    module: &TorModule,
    s_max: usize,
    cfg: &GroebnerConfig,
) -> Result<TorResult> {
    let rel: Vec<LaurentPoly> = match module {
        TorModule::Cyclic(r) => r.clone(),
        TorModule::Presented { rank: 1, relations } => relations.iter().map(|v| v[0].clone()).collect(),
        TorModule::Presented { rank, .. } => {
            return Err(Error::UnsupportedModule(format!("module of rank {rank} is not cyclic")));
        }
    };
    for p in sequence.iter().chain(&rel) {
        if p.arity() != base_arity {
            return Err(Error::ArityMismatch { expected: base_arity, got: p.arity() });
        }
    }
    let r = sequence.len();
    let top = s_max.min(r);
    let mut warnings = Vec::new();

    let mut regular = true;
    for s in 1..=r {
        if !homology(base_arity, sequence, &[], s, cfg)?.is_zero() {
            regular = false;
            warnings.push(format!("the sequence has nonzero Koszul homology on the free module in degree {s}"));
            break;
        }
    }

    let mut degrees = Vec::with_capacity(top + 1);
    for s in 0..=top {
        degrees.push(homology(base_arity, sequence, &rel, s, cfg)?);
    }
    if let Some(groups) = finite_homology(base_arity, sequence, &rel, top, cfg)? {
        for (d, g) in degrees.iter_mut().zip(groups) {
            if d.z_rank.is_some_and(|z| z != ZRank::Finite(g.free_rank)) || (d.is_zero() != g.is_trivial()) {
                warnings.push(format!("degree {}: presentation and integer linear algebra disagree", d.s));
            }
            d.group = Some(g);
        }
    }
    Ok(TorResult { base_arity, length: r, degrees, regular_sequence: regular, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> LaurentPoly {
        LaurentPoly::var(1, 0)
    }

    fn c(k: i64) -> LaurentPoly {
        LaurentPoly::constant(1, k)
    }

    fn cfg() -> GroebnerConfig {
        GroebnerConfig::default()
    }

    #[test]
    fn tor_of_augmentation_with_itself() {
        let e = &t() - &c(1);
        let res = koszul_tor(1, &[e.clone()], &TorModule::Cyclic(vec![e]), 3, &cfg()).unwrap();
        assert!(res.regular_sequence);
        assert_eq!(res.degrees.len(), 2);
        assert_eq!(res.degree(0).unwrap().group, Some(FgAbelianGroup::free(1)));
        assert_eq!(res.degree(1).unwrap().group, Some(FgAbelianGroup::free(1)));
        assert_eq!(res.degree(1).unwrap().z_rank, Some(ZRank::Finite(1)));
        assert_eq!(res.vanishes(2), Some(true));
        assert!(res.warnings.is_empty(), "{:?}", res.warnings);
    }

    #[test]
    fn free_module_is_acyclic() {
        let e = &t() - &c(1);
        let res = koszul_tor(1, &[e], &TorModule::Cyclic(vec![]), 1, &cfg()).unwrap();
        assert_eq!(res.degree(0).unwrap().z_rank, Some(ZRank::Finite(1)));
        assert!(res.degree(1).unwrap().is_zero());
    }

    #[test]
    fn non_projective_witness() {
        let one = c(1);
        let f = &(&one - &t()) * &(&one - &t().pow(2));
        let res = koszul_tor(1, &[&t() - &one], &TorModule::Cyclic(vec![f]), 1, &cfg()).unwrap();
        let h1 = res.degree(1).unwrap();
        assert!(!h1.is_zero());
        assert_eq!(h1.z_rank, Some(ZRank::Finite(1)));
        assert_eq!(h1.group, Some(FgAbelianGroup::free(1)));
        assert_eq!(res.degree(0).unwrap().z_rank, Some(ZRank::Finite(1)));
    }

    #[test]
    fn torsion_in_homology() {
        // H_0 of (t+1) on ℤ[t]/(t−1) is ℤ/2
        let res = koszul_tor(1, &[&t() + &c(1)], &TorModule::Cyclic(vec![&t() - &c(1)]), 1, &cfg()).unwrap();
        assert_eq!(res.degree(0).unwrap().group, Some(FgAbelianGroup::cyclic(2)));
        assert_eq!(res.degree(0).unwrap().z_rank, Some(ZRank::Finite(0)));
        assert!(res.degree(1).unwrap().is_zero());
    }

    #[test]
    fn non_cyclic_rejected() {
        let m = TorModule::Presented { rank: 2, relations: vec![] };
        assert!(matches!(koszul_tor(1, &[t()], &m, 1, &cfg()), Err(Error::UnsupportedModule(_))));
    }

    #[test]
    fn two_element_sequence() {
        let t1 = LaurentPoly::var(2, 0);
        let t2 = LaurentPoly::var(2, 1);
        let one = LaurentPoly::one(2);
        let seq = [&t1 - &one, &t2 - &one];
        let res = koszul_tor(2, &seq, &TorModule::Cyclic(vec![]), 2, &cfg()).unwrap();
        assert!(res.regular_sequence);
        assert_eq!(res.degree(0).unwrap().z_rank, Some(ZRank::Finite(1)));
        assert!(res.degree(1).unwrap().is_zero() && res.degree(2).unwrap().is_zero());
        // the repeated sequence is not regular
        let res = koszul_tor(2, &[&t1 - &one, &t1 - &one], &TorModule::Cyclic(vec![]), 2, &cfg()).unwrap();
        assert!(!res.regular_sequence);
        assert!(!res.warnings.is_empty());
    }
}
