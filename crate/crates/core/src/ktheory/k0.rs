use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::{tensor_split, CoefficientTag, RingPresentation};
use crate::error::{Error, Result};
use crate::fan::{is_smooth, minimal_nonfaces, stacky_reduction, Fan, GroupData, StackyFan};
use crate::lattice::SublatticeSpec;
use crate::laurent::LaurentPoly;

/// `∏ⱼ (tⱼ − 1)` over each minimal non-face.
pub fn stanley_reisner_ideal(f: &Fan) -> Vec<LaurentPoly> {
    let d = f.ray_count();
    let one = LaurentPoly::one(d);
    minimal_nonfaces(f)
        .iter()
        .map(|s| s.iter().fold(one.clone(), |acc, &j| &acc * &(&LaurentPoly::var(d, j) - &one)))
        .collect()
}

/// `t_χ = ∏ⱼ tⱼ^{−⟨χ, vⱼ⟩}`.
pub fn character_monomial(f: &Fan, chi: &[BigInt]) -> Result<LaurentPoly> {
    if chi.len() != f.lattice_rank() {
        return Err(Error::ArityMismatch { expected: f.lattice_rank(), got: chi.len() });
    }
    let exps: Vec<BigInt> = f.rays().iter().map(|v| -v.iter().zip(chi).map(|(a, b)| a * b).sum::<BigInt>()).collect();
    LaurentPoly::monomial_big(&exps, 1)
}

/// `t_χ − 1` for each Hermite basis vector `χ` of `sub`.
pub fn character_ideal(f: &Fan, sub: &SublatticeSpec) -> Result<Vec<LaurentPoly>> {
    if sub.ambient_rank != f.lattice_rank() {
        return Err(Error::ArityMismatch { expected: f.lattice_rank(), got: sub.ambient_rank });
    }
    let one = LaurentPoly::one(f.ray_count());
    sub.hermite_basis()
        .row_vecs()
        .iter()
        .map(|chi| Ok(&character_monomial(f, chi)? - &one))
        .collect()
}

fn ray_variables(f: &Fan) -> (Vec<String>, BTreeMap<String, String>) {
    let vars: Vec<String> = (1..=f.ray_count()).map(|j| format!("t{j}")).collect();
    let ann = vars.iter().enumerate().map(|(j, v)| (v.clone(), format!("dual line bundle of ray {}", j + 1))).collect();
    (vars, ann)
}

fn reduced_presentation(f: &Fan, sub: &SublatticeSpec) -> Result<RingPresentation> {
    let (variables, annotations) = ray_variables(f);
    let mut relations = stanley_reisner_ideal(f);
    relations.extend(character_ideal(f, sub)?);
    Ok(RingPresentation { coefficient_tag: CoefficientTag::Integers, variables, relations, annotations })
}

/// `ℤ[t₁^{±1}, …, t_d^{±1}] / (Stanley–Reisner ideal + character ideal)`.
///
/// `Beta` inputs are first rewritten in subgroup form; when the group has
/// a kernel acting trivially on the variety its group ring is tensored on.
pub fn k0_presentation(sf: &StackyFan) -> Result<RingPresentation> {
    if !is_smooth(&sf.fan) {
        return Err(Error::NotSmooth);
    }
    match &sf.group {
        GroupData::Beta { .. } => {
            let red = stacky_reduction(sf)?;
            let (f_sub, h_dual) = red.image_and_kernel()?;
            Ok(tensor_split(&reduced_presentation(&sf.fan, &f_sub)?, &h_dual))
        }
        _ => reduced_presentation(&sf.fan, &sf.character_sublattice().expect("reduced form")),
    }
}

fn one_minus_power(q: i64) -> LaurentPoly {
    &LaurentPoly::one(1) - &LaurentPoly::monomial(vec![q], 1)
}

/// `K_*(k)[t^{±1}] / ∏ᵢ (1 − t^{qᵢ})`.
pub fn wps_presentation(q: &[u32]) -> Result<RingPresentation> {
    if q.is_empty() || q.contains(&0) {
        return Err(Error::InvalidInput("weights must be positive and nonempty".into()));
    }
    let rel = q.iter().fold(LaurentPoly::one(1), |acc, &qi| &acc * &one_minus_power(qi.into()));
    Ok(RingPresentation {
        coefficient_tag: CoefficientTag::GradedKOfField,
        variables: vec!["t".into()],
        relations: vec![rel],
        annotations: [("t".to_string(), "tautological line bundle O(1)".to_string())].into(),
    })
}

/// The integral presentation `K_*(k)[t, t₀, …, t_n] / ((t−1)^{n+1}, tᵢ^{qᵢ} − 1)`
/// and the rational one `ℚ[t]/((t−1)^{n+1})`.
pub fn wps_coarse_presentations(q: &[u32]) -> Result<(RingPresentation, RingPresentation)> {
    if q.is_empty() || q.contains(&0) {
        return Err(Error::InvalidInput("weights must be positive and nonempty".into()));
    }
    let n1 = q.len();
    let arity = n1 + 1;
    let one = LaurentPoly::one(arity);
    let mut variables = vec!["t".to_string()];
    variables.extend((0..n1).map(|i| format!("t{i}")));
    let mut relations = vec![(&LaurentPoly::var(arity, 0) - &one).pow(n1 as u32)];
    for (i, &qi) in q.iter().enumerate() {
        let mut e = vec![0i64; arity];
        e[i + 1] = qi.into();
        relations.push(&LaurentPoly::monomial(e, 1) - &one);
    }
    let mut annotations: BTreeMap<String, String> = BTreeMap::new();
    annotations.insert("t".into(), "hyperplane class; assumes char k prime to every weight".into());
    for (i, qi) in q.iter().enumerate() {
        annotations.insert(format!("t{i}"), format!("character of μ_{qi} acting on coordinate {i}"));
    }
    let integral = RingPresentation { coefficient_tag: CoefficientTag::GradedKOfField, variables, relations, annotations };
    let rational = RingPresentation {
        coefficient_tag: CoefficientTag::Rational,
        variables: vec!["t".into()],
        relations: vec![(&LaurentPoly::var(1, 0) - &LaurentPoly::one(1)).pow(n1 as u32)],
        annotations: [("t".to_string(), "hyperplane class of the coarse space".to_string())].into(),
    };
    Ok((integral, rational))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::tests::{p1, p1xp1, p2};
    use crate::laurent::{eliminate, groebner, GroebnerConfig, ZRank};
    use crate::lattice::{FgAbelianGroup, IntMatrix};

    fn rank(p: &RingPresentation) -> ZRank {
        p.quotient_report(&GroebnerConfig::default()).unwrap().z_rank
    }

    fn mu(n: i64) -> SublatticeSpec {
        SublatticeSpec::new(1, IntMatrix::from_i64_rows(&[&[n]])).unwrap()
    }

    #[test]
    fn stanley_reisner_generators() {
        let show = |f: &Fan| -> Vec<String> { stanley_reisner_ideal(f).iter().map(|p| p.to_string()).collect() };
        assert_eq!(show(&p1()), vec!["t1*t2 - t1 - t2 + 1"]);
        assert_eq!(show(&p2()).len(), 1);
        assert_eq!(stanley_reisner_ideal(&p2())[0].len(), 8);
        assert_eq!(show(&p1xp1()), vec!["t1*t2 - t1 - t2 + 1", "t3*t4 - t3 - t4 + 1"]);
    }

    #[test]
    fn character_generators() {
        let f = p1();
        let full = character_ideal(&f, &SublatticeSpec::full(1)).unwrap();
        assert_eq!(full[0].to_string(), "t1^-1*t2 - 1");
        let doubled = character_ideal(&f, &mu(2)).unwrap();
        assert_eq!(doubled[0].to_string(), "t1^-2*t2^2 - 1");
        assert!(character_ideal(&f, &SublatticeSpec::zero(1)).unwrap().is_empty());
    }

    #[test]
    fn p1_mod_mu2_has_rank_four() {
        let sf = StackyFan::new(p1(), GroupData::Subgroup(mu(2))).unwrap();
        let p = k0_presentation(&sf).unwrap();
        assert_eq!(p.relations.len(), 2);
        assert_eq!(rank(&p), ZRank::Finite(4));
    }

    #[test]
    fn projective_plane_collapses_to_one_variable() {
        let p = k0_presentation(&StackyFan::trivial(p2())).unwrap();
        let e = eliminate(3, &p.relations, &[2], &GroebnerConfig::default()).unwrap();
        let t = LaurentPoly::var(1, 0);
        let cube = groebner(1, &[(&t - &LaurentPoly::one(1)).pow(3)]).unwrap();
        assert!(groebner(1, &e).unwrap().ideal_equal(&cube));
        assert_eq!(rank(&p), ZRank::Finite(3));
    }

    #[test]
    fn full_torus_keeps_only_stanley_reisner() {
        let p = k0_presentation(&StackyFan::full_torus(p1())).unwrap();
        assert_eq!(p.relations, stanley_reisner_ideal(&p1()));
        assert_eq!(rank(&p), ZRank::Infinite);
    }

    #[test]
    fn singular_fan_rejected() {
        let f = Fan::from_i64(2, &[&[1, 0], &[1, 2]], &[&[0, 1]]).unwrap();
        assert_eq!(k0_presentation(&StackyFan::trivial(f)), Err(Error::NotSmooth));
    }

    #[test]
    fn beta_form_of_weighted_line() {
        // ℂ² ∖ 0 with β = (1 2)
        let f = Fan::from_i64(2, &[&[1, 0], &[0, 1]], &[&[0], &[1]]).unwrap();
        let beta = StackyFan::new(
            f.clone(),
            GroupData::Beta { beta: IntMatrix::from_i64_rows(&[&[1, 2]]), target: FgAbelianGroup::free(1) },
        )
        .unwrap();
        let sub = StackyFan::new(
            f,
            GroupData::Subgroup(SublatticeSpec::new(2, IntMatrix::from_i64_rows(&[&[1, 2]])).unwrap()),
        )
        .unwrap();
        let a = k0_presentation(&beta).unwrap();
        let b = k0_presentation(&sub).unwrap();
        let cfg = GroebnerConfig::default();
        assert!(a.groebner(&cfg).unwrap().ideal_equal(&b.groebner(&cfg).unwrap()));
        assert_eq!(rank(&a), ZRank::Finite(3));
    }

    #[test]
    fn classifying_stack_presentation() {
        let point = Fan::from_i64(0, &[], &[]).unwrap();
        let sf = StackyFan::new(point, GroupData::Beta { beta: IntMatrix::zeros(1, 0), target: FgAbelianGroup::cyclic(2) })
            .unwrap();
        let p = k0_presentation(&sf).unwrap();
        assert_eq!(p.relation_strings(), vec!["x1^2 - 1"]);
        assert_eq!(rank(&p), ZRank::Finite(2));
    }

    #[test]
    fn weighted_projective_lines() {
        let p = wps_presentation(&[1, 2]).unwrap();
        assert_eq!(p.relation_strings(), vec!["t^3 - t^2 - t + 1"]);
        assert_eq!(rank(&p), ZRank::Finite(3));
        assert_eq!(rank(&wps_presentation(&[1]).unwrap()), ZRank::Finite(1));
        assert_eq!(rank(&wps_presentation(&[1, 1, 1]).unwrap()), ZRank::Finite(3));
        assert!(wps_presentation(&[0, 1]).is_err());
    }

    #[test]
    fn coarse_presentations() {
        let (a, b) = wps_coarse_presentations(&[1, 2]).unwrap();
        assert_eq!(rank(&a), ZRank::Finite(4));
        assert_eq!(b.coefficient_tag, CoefficientTag::Rational);
        let (a, _) = wps_coarse_presentations(&[1, 1]).unwrap();
        assert_eq!(rank(&a), ZRank::Finite(2));
        let (_, b) = wps_coarse_presentations(&[1, 1, 1]).unwrap();
        assert_eq!(rank(&b), ZRank::Finite(3));
    }
}
