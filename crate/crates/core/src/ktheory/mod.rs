//! Presentations of Grothendieck rings as quotients of Laurent polynomial
//! rings over ℤ.

mod cells;
mod k0;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Result;
use crate::lattice::FgAbelianGroup;
use crate::laurent::{groebner_with, GroebnerBasis, GroebnerConfig, LaurentPoly, QuotientReport, TermOrder};

pub use cells::{cell_basis, edge_and_tor, BasisMode, CellBasis, CellBasisReport, EdgeReport};
pub use k0::{
    character_ideal, character_monomial, k0_presentation, stanley_reisner_ideal,
    wps_coarse_presentations, wps_presentation,
};

/// What the quotient ring is an algebra over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoefficientTag {
    Integers,
    /// The graded coefficient ring `K_*(k)`, kept as a formal symbol; ranks
    /// refer to the degree-zero part.
    GradedKOfField,
    /// A Laurent ring in the named base variables, whose units are part of
    /// the relations.
    UserRing { base_vars: Vec<String> },
    Rational,
}

impl fmt::Display for CoefficientTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientTag::Integers => f.write_str("Z"),
            CoefficientTag::GradedKOfField => f.write_str("K_*(k)"),
            CoefficientTag::UserRing { base_vars } => write!(f, "Z[{}]", base_vars.join(", ")),
            CoefficientTag::Rational => f.write_str("Q"),
        }
    }
}

/// `coefficients[x₁^{±1}, …] / (relations)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingPresentation {
    pub coefficient_tag: CoefficientTag,
    pub variables: Vec<String>,
    pub relations: Vec<LaurentPoly>,
    /// Meaning of each variable.
    pub annotations: BTreeMap<String, String>,
}

impl RingPresentation {
    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    pub fn groebner(&self, cfg: &GroebnerConfig) -> Result<GroebnerBasis> {
        groebner_with(self.arity(), &self.relations, TermOrder::DegLex, cfg)
    }

    pub fn quotient_report(&self, cfg: &GroebnerConfig) -> Result<QuotientReport> {
        Ok(self.groebner(cfg)?.quotient_report())
    }

    pub fn relation_strings(&self) -> Vec<String> {
        self.relations.iter().map(|r| r.display_with(&self.variables)).collect()
    }
}

impl fmt::Display for RingPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = self.variables.iter().map(|v| format!("{v}^±1")).collect();
        write!(f, "{}[{}] / ({})", self.coefficient_tag, vars.join(", "), self.relation_strings().join(", "))
    }
}

/// `ℤ[G]` for a finitely generated abelian group `G`: one variable per
/// generator, `x^d − 1` for each torsion invariant `d`.
pub fn group_ring(g: &FgAbelianGroup) -> RingPresentation {
    let k = g.generator_count();
    let variables: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let relations = g
        .torsion
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut e = vec![0i64; k];
            e[g.free_rank + i] = i64::try_from(d).expect("torsion invariant fits in 64 bits");
            &LaurentPoly::monomial(e, 1) - &LaurentPoly::one(k)
        })
        .collect();
    let annotations = variables
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let meaning = if i < g.free_rank {
                format!("free generator {} of the character group", i + 1)
            } else {
                format!("generator of order {}", g.torsion[i - g.free_rank])
            };
            (v.clone(), meaning)
        })
        .collect();
    RingPresentation { coefficient_tag: CoefficientTag::Integers, variables, relations, annotations }
}

/// `p ⊗_ℤ ℤ[extra]`: adjoins the group-ring variables and relations.
pub fn tensor_split(p: &RingPresentation, extra: &FgAbelianGroup) -> RingPresentation {
    if extra.is_trivial() {
        return p.clone();
    }
    let g = group_ring(extra);
    let d = p.arity();
    let k = g.arity();
    let fresh: Vec<String> = (1..=k)
        .map(|i| {
            let mut name = format!("x{i}");
            while p.variables.contains(&name) {
                name.push('\'');
            }
            name
        })
        .collect();
    let mut out = p.clone();
    out.variables.extend(fresh.iter().cloned());
    let own: Vec<usize> = (0..d).collect();
    let theirs: Vec<usize> = (d..d + k).collect();
    out.relations = p
        .relations
        .iter()
        .map(|r| r.embed(d + k, &own))
        .chain(g.relations.iter().map(|r| r.embed(d + k, &theirs)))
        .collect();
    for (old, new) in g.variables.iter().zip(&fresh) {
        out.annotations.insert(new.clone(), format!("{} of the split factor", g.annotations[old]));
    }
    out
}
