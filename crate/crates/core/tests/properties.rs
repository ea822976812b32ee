use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toricstack::bundles::{bundle_rank_check, sr_algebra, unit_monomial_freeness, CoefficientRingSpec};
use toricstack::fan::{projective_space, Fan, GroupData, StackyFan};
use toricstack::ktheory::{character_monomial, k0_presentation, stanley_reisner_ideal, wps_presentation};
use toricstack::lattice::{kernel_lattice, minor_gcd, quotient_group, smith_normal_form, IntMatrix, SublatticeSpec};
use toricstack::laurent::{groebner, groebner_with, GroebnerConfig, LaurentPoly, TermOrder, ZRank};

const SEED: u64 = 0x7a11_5eed;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
    IntMatrix::from_rows(cols, &data)
}

fn is_unimodular(m: &IntMatrix) -> bool {
    m.det().abs().is_one()
}

#[test]
fn smith_identities_on_seeded_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..500 {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let a = random_matrix(&mut rng, r, c, 50);
        let s = smith_normal_form(&a);
        assert_eq!(&(&s.u * &a) * &s.v, s.d, "{a:?}");
        assert!(is_unimodular(&s.u) && is_unimodular(&s.v));
        assert_eq!(&s.v * &s.v_inverse, IntMatrix::identity(c));
        assert!(s.d.is_diagonal());
        let inv = &s.invariants;
        assert!(inv.iter().all(|x| !x.is_negative()));
        for k in 1..s.rank() {
            assert!((&inv[k] % &inv[k - 1]).is_zero(), "{inv:?}");
        }
        // d₁⋯d_k is the gcd of the k×k minors
        if r.min(c) <= 4 {
            let mut prod = BigInt::one();
            for k in 1..=r.min(c) {
                prod *= &inv[k - 1];
                assert_eq!(prod, minor_gcd(&a, k), "k = {k}, {a:?}");
            }
        }
    }
}

#[test]
fn kernels_are_saturated_and_complete() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    for _ in 0..200 {
        let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=6));
        let a = random_matrix(&mut rng, r, c, 6);
        let k = kernel_lattice(&a);
        assert_eq!(k.rows(), c - a.rank());
        for row in k.row_vecs() {
            assert!(a.apply(&row).iter().all(Zero::is_zero));
        }
        if k.rows() > 0 {
            // saturated: ℤ^c / kernel is torsion free
            assert!(smith_normal_form(&k).invariants.iter().all(|d| d.is_one()));
        }
    }
}

/// Size of `(ℤ/h)^n / (L mod h)` for `h·ℤⁿ ⊆ L`, by closing the generators
/// under addition.
fn brute_force_index(rows: &[Vec<i64>], n: usize, h: i64) -> usize {
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut stack = vec![vec![0i64; n]];
    while let Some(x) = stack.pop() {
        if !seen.insert(x.clone()) {
            continue;
        }
        for g in rows {
            let y: Vec<i64> = x.iter().zip(g).map(|(a, b)| (a + b).rem_euclid(h)).collect();
            if !seen.contains(&y) {
                stack.push(y);
            }
        }
    }
    (h as usize).pow(n as u32) / seen.len()
}

#[test]
fn quotient_orders_match_brute_force() {
    for entries in (0..4).map(|_| -3i64..=3).multi_cartesian() {
        let rows = vec![vec![entries[0], entries[1]], vec![entries[2], entries[3]]];
        let det = (entries[0] * entries[3] - entries[1] * entries[2]).abs();
        let sub = SublatticeSpec::new(2, IntMatrix::from_rows(2, &rows)).unwrap();
        let q = quotient_group(2, &sub).unwrap();
        if det == 0 {
            assert!(!q.group.is_finite());
            continue;
        }
        assert_eq!(q.group.order().unwrap(), BigInt::from(brute_force_index(&rows, 2, det)));
        assert_eq!(q.coset_representatives().unwrap().len() as i64, det);
    }
}

// a small cartesian power helper, to keep the exhaustive loops flat
trait MultiCartesian: Iterator + Sized {
    fn multi_cartesian(self) -> Vec<Vec<i64>>;
}

impl<I: Iterator<Item = std::ops::RangeInclusive<i64>>> MultiCartesian for I {
    fn multi_cartesian(self) -> Vec<Vec<i64>> {
        self.fold(vec![vec![]], |acc, r| {
            acc.iter().flat_map(|p| r.clone().map(move |x| [p.clone(), vec![x]].concat())).collect()
        })
    }
}

fn sub(n: usize, rows: &[&[i64]]) -> SublatticeSpec {
    SublatticeSpec::new(n, IntMatrix::from_i64_rows(rows)).unwrap()
}

fn golden() -> Vec<(&'static str, StackyFan)> {
    let p1 = projective_space(1);
    vec![
        ("P1/mu2", StackyFan::new(p1.clone(), GroupData::Subgroup(sub(1, &[&[2]]))).unwrap()),
        ("P1/mu3", StackyFan::new(p1.clone(), GroupData::Subgroup(sub(1, &[&[3]]))).unwrap()),
        ("P2/mu2", StackyFan::new(projective_space(2), GroupData::Subgroup(sub(2, &[&[1, 1], &[0, 2]]))).unwrap()),
        ("P1xP1/mu2", StackyFan::new(p1.product(&p1), GroupData::Subgroup(sub(2, &[&[1, 1], &[0, 2]]))).unwrap()),
    ]
}

fn random_poly(rng: &mut ChaCha8Rng, arity: usize) -> LaurentPoly {
    let mut p = LaurentPoly::zero(arity);
    for _ in 0..rng.gen_range(1..=5) {
        let e: Vec<i64> = (0..arity).map(|_| rng.gen_range(-3..=3)).collect();
        p = &p + &LaurentPoly::monomial(e, rng.gen_range(-9i64..=9));
    }
    p
}

#[test]
fn normal_forms_are_confluent() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let cfg = GroebnerConfig::default();
    for (name, sf) in golden() {
        let pres = k0_presentation(&sf).unwrap();
        let d = pres.arity();
        let gb = pres.groebner(&cfg).unwrap();
        let mut perm: Vec<usize> = (0..gb.len()).collect();
        perm.shuffle(&mut rng);
        let shuffled_basis = gb.permuted(&perm);
        let mut gens = pres.relations.clone();
        gens.shuffle(&mut rng);
        let regenerated = groebner_with(d, &gens, TermOrder::DegLex, &cfg).unwrap();
        for _ in 0..100 {
            let p = random_poly(&mut rng, d);
            let nf = gb.normal_form(&p);
            assert_eq!(shuffled_basis.normal_form(&p), nf, "{name}: {p}");
            assert_eq!(regenerated.normal_form(&p), nf, "{name}: {p}");
            assert_eq!(gb.normal_form(&nf), nf, "{name}: not idempotent on {p}");
            // adding an ideal element does not move the normal form
            let g = &pres.relations[rng.gen_range(0..pres.relations.len())];
            let moved = &p + &(g * &random_poly(&mut rng, d));
            assert_eq!(gb.normal_form(&moved), nf, "{name}: {p}");
        }
    }
}

#[test]
fn character_ideal_does_not_depend_on_the_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let cfg = GroebnerConfig::default();
    for (name, sf) in golden() {
        let reference = k0_presentation(&sf).unwrap().groebner(&cfg).unwrap();
        let h = sf.character_sublattice().unwrap().hermite_basis();
        let n = h.rows();
        for _ in 0..3 {
            // random unimodular change of basis
            let mut u = IntMatrix::identity(n);
            for _ in 0..6 {
                if n < 2 {
                    break;
                }
                let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if i != j {
                    let mut e = IntMatrix::identity(n);
                    e.set(i, j, rng.gen_range(-3i64..=3).into());
                    u = &e * &u;
                }
            }
            if rng.gen_bool(0.5) {
                let mut flip = IntMatrix::identity(n);
                flip.set(0, 0, BigInt::from(-1));
                u = &flip * &u;
            }
            let basis = &u * &h;
            let mut rel = stanley_reisner_ideal(&sf.fan);
            for chi in basis.row_vecs() {
                rel.push(&character_monomial(&sf.fan, &chi).unwrap() - &LaurentPoly::one(sf.fan.ray_count()));
            }
            let other = groebner_with(sf.fan.ray_count(), &rel, TermOrder::DegLex, &cfg).unwrap();
            assert!(other.ideal_equal(&reference), "{name} with basis {basis:?}");
        }
    }
}

fn weight_vectors(max_sum: u32) -> Vec<Vec<u32>> {
    // non-decreasing weight lists; the relation is a commutative product
    fn go(min: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for q in min..=left {
            cur.push(q);
            go(q, left - q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, max_sum, &mut Vec::new(), &mut out);
    out
}

#[test]
fn weighted_projective_ranks() {
    let cfg = GroebnerConfig::default();
    let t = LaurentPoly::var(1, 0);
    let one = LaurentPoly::one(1);
    let all = weight_vectors(12);
    assert!(all.len() > 200);
    for q in all {
        let p = wps_presentation(&q).unwrap();
        let expected = q.iter().fold(one.clone(), |acc, &qi| &acc * &(&one - &t.pow(qi)));
        assert_eq!(p.relations, vec![expected]);
        let rep = p.quotient_report(&cfg).unwrap();
        assert_eq!(rep.z_rank, ZRank::Finite(q.iter().sum::<u32>() as usize), "{q:?}");
        assert!(rep.is_free, "{q:?}");
    }
}

fn monomial_relation(a: &[i64], base: usize) -> LaurentPoly {
    let mut e = a.to_vec();
    e.extend(std::iter::repeat_n(0, base));
    let mut u = vec![0i64; a.len() + base];
    u[a.len()] = 1;
    &LaurentPoly::monomial(e, 1) - &LaurentPoly::monomial(u, 1)
}

fn check_freeness(rows: &[Vec<i64>], n: usize) {
    let a = CoefficientRingSpec::parse(vec!["u".into()], &["u"]).unwrap();
    let rels: Vec<LaurentPoly> = rows.iter().map(|r| monomial_relation(r, 1)).collect();
    let rep = unit_monomial_freeness(&a, n, &rels).unwrap();
    let m = IntMatrix::from_rows(n, rows);
    let full = minor_gcd(&m, n);
    if full.is_zero() {
        assert_eq!(rep.rank, ZRank::Infinite, "{rows:?}");
        return;
    }
    let h = i64::try_from(&full).unwrap();
    let count = brute_force_index(rows, n, h);
    assert_eq!(rep.rank, ZRank::Finite(count), "{rows:?}");
    assert_eq!(rep.basis.len(), count);
}

#[test]
fn unit_monomial_freeness_matches_coset_counts() {
    for n in 1..=2usize {
        for entries in (0..n * n).map(|_| -4i64..=4).multi_cartesian() {
            let rows: Vec<Vec<i64>> = entries.chunks(n).map(<[i64]>::to_vec).collect();
            check_freeness(&rows, n);
        }
    }
    // three variables: seeded sample, index capped to keep the brute force small
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let mut tested = 0;
    while tested < 400 {
        let rows: Vec<Vec<i64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(-4..=4)).collect()).collect();
        let det = minor_gcd(&IntMatrix::from_rows(3, &rows), 3);
        if det > BigInt::from(40) {
            continue;
        }
        check_freeness(&rows, 3);
        tested += 1;
    }
}

#[test]
fn bundle_rank_does_not_depend_on_the_units() {
    let cfg = GroebnerConfig::default();
    let p1 = projective_space(1);
    let cases: Vec<(Fan, SublatticeSpec)> = vec![
        (p1.clone(), SublatticeSpec::full(1)),
        (p1.clone(), sub(1, &[&[2]])),
        (projective_space(2), SublatticeSpec::full(2)),
        (p1.product(&p1), SublatticeSpec::full(2)),
    ];
    for (f, m) in cases {
        let n = m.hermite_basis().rows();
        let vars: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
        let mut ranks = BTreeSet::new();
        for choice in [["1"; 2], ["u1", "u1"], ["-u1", "u1^-1"], ["u1^2", "-1"]] {
            let units: Vec<String> = (0..n).map(|i| choice[i].replace("u1", &vars[i])).collect();
            let units: Vec<&str> = units.iter().map(String::as_str).collect();
            let a = CoefficientRingSpec::parse(vars.clone(), &units).unwrap();
            let bp = sr_algebra(&f, &m, &a).unwrap();
            let rep = bundle_rank_check(&bp, &cfg).unwrap();
            assert!(rep.a_free && rep.matches_rank_law, "{units:?}");
            ranks.insert(rep.a_rank);
        }
        assert_eq!(ranks.len(), 1);
    }
}

fn small_ideal() -> impl Strategy<Value = Vec<LaurentPoly>> {
    let term = (-2i64..=2, -3i64..=3).prop_map(|(e, c)| LaurentPoly::monomial(vec![e], c));
    let poly = prop::collection::vec(term, 1..4).prop_map(|ts| ts.iter().fold(LaurentPoly::zero(1), |a, t| &a + t));
    prop::collection::vec(poly, 1..3)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn ideal_equality_is_an_equivalence(a in small_ideal(), b in small_ideal(), shuffle in any::<u64>()) {
        let ga = groebner(1, &a).unwrap();
        let gb = groebner(1, &b).unwrap();
        prop_assert!(ga.ideal_equal(&ga));
        prop_assert_eq!(ga.ideal_equal(&gb), gb.ideal_equal(&ga));
        // a third presentation of the first ideal
        let mut c = a.clone();
        c.push(&a[0] * &LaurentPoly::monomial(vec![(shuffle % 5) as i64 - 2], 3));
        let k = (shuffle % c.len() as u64) as usize;
        c.rotate_left(k);
        let gc = groebner(1, &c).unwrap();
        prop_assert!(ga.ideal_equal(&gc));
        if gb.ideal_equal(&ga) {
            prop_assert!(gb.ideal_equal(&gc));
        }
    }

    #[test]
    fn smith_of_random_small_matrices(rows in prop::collection::vec(prop::collection::vec(-9i64..=9, 3), 1..4)) {
        let a = IntMatrix::from_rows(3, &rows);
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.rank(), a.rank());
        prop_assert_eq!(&(&s.u * &a) * &s.v, s.d);
    }

    #[test]
    fn quotient_rank_ignores_content(k in 1u32..5, c in 1i64..4) {
        // the rank is read over ℚ; a content c > 1 adds (t − 1)·(ℤ/c)[t^{±1}] as torsion
        let t = LaurentPoly::var(1, 0);
        let f = (&t - &LaurentPoly::one(1)).pow(k).scale(&BigInt::from(c));
        let rep = groebner(1, &[f]).unwrap().quotient_report();
        prop_assert_eq!(rep.z_rank, ZRank::Finite(k as usize));
        prop_assert_eq!(rep.is_free, c == 1);
    }
}
