use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::k0::{character_ideal, character_monomial, k0_presentation, stanley_reisner_ideal};
use crate::error::{Error, Result};
use crate::fan::{is_complete, is_smooth, ShellingOrder, StackyFan};
use crate::lattice::{quotient_group, IntMatrix, SublatticeSpec};
use crate::laurent::{
    groebner_with, koszul_tor, GroebnerConfig, LaurentPoly, TermOrder, TorModule, TorResult, ZRank,
};

/// How the cell classes were checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisMode {
    /// `G` finite: the products with one character per coset of `M/M'`
    /// form a ℤ-basis of the presentation.
    FiniteGroup,
    /// `G` of positive dimension: after setting every character to 1 the
    /// cell classes form a ℤ-basis.
    Augmented,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellBasisReport {
    pub mode: BasisMode,
    /// Number of products `multiplier × cell class` tested.
    pub products: usize,
    /// ℤ-rank of the quotient they were tested in.
    pub quotient_rank: usize,
    /// Determinant of their coordinates in a ℤ-basis of the quotient.
    pub determinant: BigInt,
}

#[derive(Debug, Clone)]
pub struct CellBasis {
    /// `∏_{ρ ∈ τᵢ} (1 − t_ρ)` for each position of the order.
    pub elements: Vec<LaurentPoly>,
    pub order: ShellingOrder,
    /// The characters `t_χ` multiplying the cell classes.
    pub multipliers: Vec<LaurentPoly>,
    pub report: CellBasisReport,
}

fn failed(msg: impl Into<String>) -> Error {
    Error::BasisCheckFailed(msg.into())
}

/// Cell classes of a shelling order, verified to be a basis by integer
/// linear algebra on normal forms.
pub fn cell_basis(sf: &StackyFan, so: &ShellingOrder, cfg: &GroebnerConfig) -> Result<CellBasis> {
    let f = &sf.fan;
    if !is_smooth(f) || !is_complete(f) {
        return Err(Error::NotCompleteOrSmooth);
    }
    let sub = sf
        .character_sublattice()
        .ok_or_else(|| Error::InvalidInput("cell basis needs the subgroup form; run the reduction first".into()))?;
    so.verify(f).map_err(failed)?;
    let d = f.ray_count();
    let one = LaurentPoly::one(d);
    let elements: Vec<LaurentPoly> = so
        .tau
        .iter()
        .map(|tau| tau.iter().fold(one.clone(), |acc, &j| &acc * &(&one - &LaurentPoly::var(d, j))))
        .collect();
    if elements.len() != f.max_cones().len() {
        return Err(failed("order does not cover every maximal cone"));
    }

    let q = quotient_group(f.lattice_rank(), &sub)?;
    let (mode, relations, multipliers) = match q.coset_representatives() {
        Some(reps) => {
            let mults = reps.iter().map(|chi| character_monomial(f, chi)).collect::<Result<Vec<_>>>()?;
            (BasisMode::FiniteGroup, k0_presentation(sf)?.relations, mults)
        }
        None => {
            let mut rel = stanley_reisner_ideal(f);
            rel.extend(character_ideal(f, &SublatticeSpec::full(f.lattice_rank()))?);
            (BasisMode::Augmented, rel, vec![one.clone()])
        }
    };

    let gb = groebner_with(d, &relations, TermOrder::DegLex, cfg)?;
    let rep = gb.quotient_report();
    if !rep.is_free {
        return Err(failed("quotient has torsion"));
    }
    let ZRank::Finite(n) = rep.z_rank else {
        return Err(failed("quotient has infinite rank"));
    };
    let products: Vec<LaurentPoly> =
        multipliers.iter().flat_map(|m| elements.iter().map(move |b| m * b)).collect();
    if products.len() != n {
        return Err(failed(format!("{} products for a quotient of rank {n}", products.len())));
    }
    let mut m = IntMatrix::zeros(n, n);
    for (j, p) in products.iter().enumerate() {
        let x = gb.free_coordinates(p).expect("finite free quotient");
        for (i, c) in x.into_iter().enumerate() {
            m.set(i, j, c);
        }
    }
    let determinant = m.det();
    if !determinant.abs().is_one() {
        return Err(failed(format!("determinant {determinant} is not a unit")));
    }
    Ok(CellBasis {
        elements,
        order: so.clone(),
        multipliers,
        report: CellBasisReport { mode, products: n, quotient_rank: n, determinant },
    })
}

#[derive(Debug, Clone)]
pub struct EdgeReport {
    pub tor: TorResult,
    /// Relations of the degree-zero homology, as an ideal of the ray ring.
    pub tor0_relations: Vec<LaurentPoly>,
    /// Degree-zero homology equals the K₀ presentation.
    pub edge_equal: bool,
    /// Homology vanishes in degrees `1..=s_max`.
    pub degenerates: bool,
}

/// Koszul homology of the character sequence `t_χ − 1` on the
/// Stanley–Reisner quotient, compared in degree zero with the K₀
/// presentation.
pub fn edge_and_tor(sf: &StackyFan, s_max: usize, cfg: &GroebnerConfig) -> Result<EdgeReport> {
    let f = &sf.fan;
    if !is_smooth(f) {
        return Err(Error::NotSmooth);
    }
    let sub = sf
        .character_sublattice()
        .ok_or_else(|| Error::InvalidInput("Tor needs the subgroup form; run the reduction first".into()))?;
    let d = f.ray_count();
    let seq = character_ideal(f, &sub)?;
    let tor = koszul_tor(d, &seq, &TorModule::Cyclic(stanley_reisner_ideal(f)), s_max, cfg)?;
    let h0 = tor.degree(0).expect("degree zero is always computed");
    let tor0_relations: Vec<LaurentPoly> = if h0.is_zero() {
        vec![LaurentPoly::one(d)]
    } else {
        h0.relations.iter().map(|col| col[0].clone()).collect()
    };
    let k0 = k0_presentation(sf)?;
    let a = groebner_with(d, &k0.relations, TermOrder::DegLex, cfg)?;
    let b = groebner_with(d, &tor0_relations, TermOrder::DegLex, cfg)?;
    let edge_equal = a.ideal_equal(&b);
    let degenerates = (1..=s_max).all(|s| tor.vanishes(s) == Some(true));
    Ok(EdgeReport { tor, tor0_relations, edge_equal, degenerates })
}
