//! Rational polyhedral fans: validation, face enumeration, smoothness and
//! completeness, shelling orders, and stacky fans.

mod lp;
mod shelling;
mod stacky;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

pub use shelling::{shelling_order, ShellingOrder};
pub use stacky::{stacky_reduction, GroupData, Reduction, StackyFan};

use crate::error::{Error, Result};
use crate::lattice::{smith_normal_form, IntMatrix};

/// A fan given by primitive rays in `ℤ^n` and its maximal cones (sets of
/// 0-based ray indices). The face lattice is derived on demand and cached.
#[derive(Clone)]
pub struct Fan {
    lattice_rank: usize,
    rays: Vec<Vec<BigInt>>,
    max_cones: Vec<Vec<usize>>,
    faces: OnceLock<BTreeSet<Vec<usize>>>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.lattice_rank == other.lattice_rank && self.rays == other.rays && self.max_cones == other.max_cones
    }
}

impl Eq for Fan {}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fan")
            .field("lattice_rank", &self.lattice_rank)
            .field("rays", &self.rays.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
            .field("max_cones", &self.max_cones)
            .finish()
    }
}

impl Fan {
    /// Builds a fan after shape checks only (lengths and index ranges).
    /// Geometric validity is reported by [`validate_fan`].
    ///
    /// An empty cone list is read as the fan consisting of the origin.
    pub fn new(lattice_rank: usize, rays: Vec<Vec<BigInt>>, max_cones: Vec<Vec<usize>>) -> Result<Self> {
        for (i, r) in rays.iter().enumerate() {
            if r.len() != lattice_rank {
                return Err(Error::InvalidInput(format!(
                    "ray {} has {} coordinates, lattice rank is {lattice_rank}",
                    i + 1,
                    r.len()
                )));
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for (c, cone) in max_cones.into_iter().enumerate() {
            let mut sorted = cone.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != cone.len() {
                return Err(Error::InvalidInput(format!("cone {} repeats a ray index", c + 1)));
            }
            if let Some(&bad) = sorted.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidInput(format!("cone {} references ray {} of {}", c + 1, bad + 1, rays.len())));
            }
            cones.push(sorted);
        }
        if cones.is_empty() {
            cones.push(Vec::new());
        }
        Ok(Fan { lattice_rank, rays, max_cones: cones, faces: OnceLock::new() })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(lattice_rank: usize, rays: &[&[i64]], max_cones: &[&[usize]]) -> Result<Self> {
        let rays = rays.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let cones = max_cones.iter().map(|c| c.to_vec()).collect();
        Self::new(lattice_rank, rays, cones)
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// Matrix whose rows are the rays of `cone`.
    pub fn ray_matrix(&self, cone: &[usize]) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> = cone.iter().map(|&i| self.rays[i].clone()).collect();
        IntMatrix::from_rows(self.lattice_rank, &rows)
    }

    pub fn cone_dim(&self, cone: &[usize]) -> usize {
        self.ray_matrix(cone).rank()
    }

    pub fn is_simplicial_cone(&self, cone: &[usize]) -> bool {
        self.cone_dim(cone) == cone.len()
    }

    /// Every face of every maximal cone, as sorted ray-index sets.
    pub fn faces(&self) -> &BTreeSet<Vec<usize>> {
        self.faces.get_or_init(|| {
            let mut out = BTreeSet::new();
            for cone in &self.max_cones {
                let simplicial = self.is_simplicial_cone(cone);
                for s in all_subsets(cone) {
                    if simplicial || self.is_face_of(&s, cone) {
                        out.insert(s);
                    }
                }
            }
            out
        })
    }

    /// Whether the rays `sub ⊆ cone` span a face of `cone`: no other ray of
    /// the cone lies in the minimal face through `Σ_{sub} v`.
    fn is_face_of(&self, sub: &[usize], cone: &[usize]) -> bool {
        if sub.is_empty() {
            return true;
        }
        let n = self.lattice_rank;
        let mut p = vec![BigInt::zero(); n];
        for &i in sub {
            for (x, y) in p.iter_mut().zip(&self.rays[i]) {
                *x += y;
            }
        }
        for &w in cone.iter().filter(|w| !sub.contains(w)) {
            // Σ λ_v v − c p = −w with λ, c ≥ 0
            let a: Vec<Vec<BigInt>> = (0..n)
                .map(|k| {
                    let mut row: Vec<BigInt> = cone.iter().map(|&v| self.rays[v][k].clone()).collect();
                    row.push(-p[k].clone());
                    row
                })
                .collect();
            let b: Vec<BigInt> = (0..n).map(|k| -self.rays[w][k].clone()).collect();
            if lp::feasible(&a, &b) {
                return false;
            }
        }
        true
    }

    fn is_strongly_convex(&self, cone: &[usize]) -> bool {
        if self.is_simplicial_cone(cone) {
            return true;
        }
        let n = self.lattice_rank;
        let mut a: Vec<Vec<BigInt>> =
            (0..n).map(|k| cone.iter().map(|&v| self.rays[v][k].clone()).collect()).collect();
        a.push(vec![BigInt::one(); cone.len()]);
        let mut b = vec![BigInt::zero(); n];
        b.push(BigInt::one());
        !lp::feasible(&a, &b)
    }

    /// True when `σ₁ ∩ σ₂` is the cone on their common rays and that cone is
    /// a face of both.
    fn meets_properly(&self, c1: &[usize], c2: &[usize]) -> bool {
        let common: Vec<usize> = c1.iter().copied().filter(|i| c2.contains(i)).collect();
        if !self.is_face_of(&common, c1) || !self.is_face_of(&common, c2) {
            return false;
        }
        let n = self.lattice_rank;
        let cols: Vec<(usize, bool, bool)> = c1
            .iter()
            .map(|&v| (v, true, !common.contains(&v)))
            .chain(c2.iter().map(|&w| (w, false, !common.contains(&w))))
            .collect();
        if cols.iter().all(|c| !c.2) {
            return true;
        }
        // Σ a v − Σ b w = 0, Σ (coefficients off the common face) = 1
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|k| {
                cols.iter()
                    .map(|&(r, first, _)| if first { self.rays[r][k].clone() } else { -self.rays[r][k].clone() })
                    .collect()
            })
            .collect();
        a.push(cols.iter().map(|c| if c.2 { BigInt::one() } else { BigInt::zero() }).collect());
        let mut b = vec![BigInt::zero(); n];
        b.push(BigInt::one());
        !lp::feasible(&a, &b)
    }

    /// Product fan on `ℤ^{n₁+n₂}`: rays of `self` then rays of `other`.
    pub fn product(&self, other: &Fan) -> Fan {
        let (n1, n2) = (self.lattice_rank, other.lattice_rank);
        let mut rays = Vec::new();
        for r in &self.rays {
            let mut v = r.clone();
            v.extend(std::iter::repeat_n(BigInt::zero(), n2));
            rays.push(v);
        }
        for r in &other.rays {
            let mut v = vec![BigInt::zero(); n1];
            v.extend(r.iter().cloned());
            rays.push(v);
        }
        let d1 = self.rays.len();
        let mut cones = Vec::new();
        for a in &self.max_cones {
            for b in &other.max_cones {
                let mut c = a.clone();
                c.extend(b.iter().map(|&i| i + d1));
                cones.push(c);
            }
        }
        Fan::new(n1 + n2, rays, cones).expect("product of well-formed fans is well formed")
    }
}

/// All subsets of a sorted index list, each sorted.
pub(crate) fn all_subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(1 << items.len());
    for mask in 0u64..(1u64 << items.len()) {
        out.push(items.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &i)| i).collect());
    }
    out
}

/// All `k`-subsets of `0..n`, lexicographic.
pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// One problem found by [`validate_fan`]. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationFailure {
    NotPrimitive { ray: usize },
    DuplicateRay { first: usize, second: usize },
    NotMaximal { cone: usize, contained_in: usize },
    NotStronglyConvex { cone: usize },
    BadOverlap { first: usize, second: usize },
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationFailure::NotPrimitive { ray } => write!(f, "ray {} is not primitive", ray + 1),
            ValidationFailure::DuplicateRay { first, second } => {
                write!(f, "rays {} and {} coincide", first + 1, second + 1)
            }
            ValidationFailure::NotMaximal { cone, contained_in } => {
                write!(f, "cone {} is contained in cone {}", cone + 1, contained_in + 1)
            }
            ValidationFailure::NotStronglyConvex { cone } => write!(f, "cone {} contains a line", cone + 1),
            ValidationFailure::BadOverlap { first, second } => {
                write!(f, "cones {} and {} do not meet in a common face", first + 1, second + 1)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks primitivity, distinctness, maximality, strong convexity and that
/// maximal cones meet along common faces.
pub fn validate_fan(f: &Fan) -> ValidationReport {
    let mut failures = Vec::new();
    for (i, r) in f.rays.iter().enumerate() {
        let g = r.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if !g.is_one() {
            failures.push(ValidationFailure::NotPrimitive { ray: i });
        }
    }
    for i in 0..f.rays.len() {
        for j in i + 1..f.rays.len() {
            if f.rays[i] == f.rays[j] {
                failures.push(ValidationFailure::DuplicateRay { first: i, second: j });
            }
        }
    }
    for (i, a) in f.max_cones.iter().enumerate() {
        if let Some(j) = f
            .max_cones
            .iter()
            .enumerate()
            .position(|(j, b)| j != i && a.iter().all(|x| b.contains(x)) && (a.len() < b.len() || j < i))
        {
            failures.push(ValidationFailure::NotMaximal { cone: i, contained_in: j });
        }
    }
    let mut convex = vec![true; f.max_cones.len()];
    for (i, c) in f.max_cones.iter().enumerate() {
        if !f.is_strongly_convex(c) {
            convex[i] = false;
            failures.push(ValidationFailure::NotStronglyConvex { cone: i });
        }
    }
    // overlap tests assume strong convexity and distinct rays
    let rays_ok = !failures
        .iter()
        .any(|e| matches!(e, ValidationFailure::DuplicateRay { .. } | ValidationFailure::NotPrimitive { .. }));
    if rays_ok {
        for i in 0..f.max_cones.len() {
            for j in i + 1..f.max_cones.len() {
                if convex[i] && convex[j] && !f.meets_properly(&f.max_cones[i], &f.max_cones[j]) {
                    failures.push(ValidationFailure::BadOverlap { first: i, second: j });
                }
            }
        }
    }
    ValidationReport { failures }
}

/// Whether `rayset` (0-based, any order) is exactly the ray set of a face of
/// some maximal cone. Out-of-range indices give `false`.
pub fn spans_cone(f: &Fan, rayset: &[usize]) -> bool {
    let mut s = rayset.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.iter().any(|&i| i >= f.ray_count()) {
        return false;
    }
    f.faces().contains(&s)
}

/// Inclusion-minimal ray sets that do not span a cone, sorted
/// lexicographically.
pub fn minimal_nonfaces(f: &Fan) -> Vec<Vec<usize>> {
    let faces = f.faces();
    let max_face = faces.iter().map(Vec::len).max().unwrap_or(0);
    let d = f.ray_count();
    let mut out = Vec::new();
    for k in 1..=(max_face + 1).min(d) {
        for s in k_subsets(d, k) {
            if faces.contains(&s) {
                continue;
            }
            let minimal = (0..k).all(|skip| {
                let sub: Vec<usize> = s.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &x)| x).collect();
                faces.contains(&sub)
            });
            if minimal {
                out.push(s);
            }
        }
    }
    out.sort();
    out
}

/// The fan of `Pⁿ`: rays `e₁, …, e_n, −Σeᵢ`, every `n` of them spanning a
/// maximal cone.
pub fn projective_space(n: usize) -> Fan {
    let mut rays: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(i64::from(i == j))).collect())
        .collect();
    rays.push(vec![BigInt::from(-1); n]);
    Fan::new(n, rays, k_subsets(n + 1, n)).expect("well-formed")
}

/// Every maximal cone is generated by part of a lattice basis.
pub fn is_smooth(f: &Fan) -> bool {
    f.max_cones.iter().all(|c| {
        if c.is_empty() {
            return true;
        }
        let snf = smith_normal_form(&f.ray_matrix(c));
        snf.rank() == c.len() && snf.invariants.iter().all(One::is_one)
    })
}

/// Pure full-dimensional fan whose codimension-one faces are each shared by
/// exactly two maximal cones, with connected facet-adjacency graph.
pub fn is_complete(f: &Fan) -> bool {
    let n = f.lattice_rank;
    if f.max_cones.iter().any(|c| f.cone_dim(c) != n) {
        return false;
    }
    let mut facet_owners: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (ci, c) in f.max_cones.iter().enumerate() {
        for face in facets_of(f, c) {
            facet_owners.entry(face).or_default().push(ci);
        }
    }
    if facet_owners.values().any(|owners| owners.len() != 2) {
        return false;
    }
    // connectivity over shared facets
    let m = f.max_cones.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for owners in facet_owners.values() {
        let (a, b) = (find(&mut parent, owners[0]), find(&mut parent, owners[1]));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..m).all(|i| find(&mut parent, i) == root)
}

/// Codimension-one faces of a full-dimensional cone.
pub(crate) fn facets_of(f: &Fan, cone: &[usize]) -> Vec<Vec<usize>> {
    let n = f.lattice_rank;
    if n == 0 {
        return Vec::new();
    }
    if f.is_simplicial_cone(cone) {
        return (0..cone.len())
            .map(|skip| cone.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &x)| x).collect())
            .collect();
    }
    all_subsets(cone)
        .into_iter()
        .filter(|s| f.cone_dim(s) == n - 1 && f.is_face_of(s, cone))
        .collect()
}
