//! Integer lattices: Smith/Hermite normal forms, kernels, sublattices and
//! finitely generated abelian groups.

mod matrix;
mod smith;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use matrix::IntMatrix;
pub use smith::{hermite_rows, smith_normal_form, SmithDecomposition};

use crate::error::{Error, Result};

/// `ℤ^free_rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with `d₁ | d₂ | …` and every `dᵢ ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FgAbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl FgAbelianGroup {
    pub fn trivial() -> Self {
        FgAbelianGroup { free_rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup { free_rank: rank, torsion: Vec::new() }
    }

    pub fn cyclic(order: u64) -> Self {
        Self::from_orders(0, &[BigInt::from(order)])
    }

    /// Normalizes an arbitrary list of cyclic orders (entries 0 count as
    /// free summands, ±1 are dropped) into invariant-factor form.
    pub fn from_orders(free_rank: usize, orders: &[BigInt]) -> Self {
        let diag = IntMatrix::diagonal(orders);
        let snf = smith_normal_form(&diag);
        let mut torsion = Vec::new();
        let mut free = free_rank;
        for d in &snf.invariants {
            if d.is_zero() {
                free += 1;
            } else if !d.is_one() {
                torsion.push(d.clone());
            }
        }
        FgAbelianGroup { free_rank: free, torsion }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Group order when finite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    /// Direct sum, renormalized.
    pub fn direct_sum(&self, other: &FgAbelianGroup) -> Self {
        let orders: Vec<BigInt> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        Self::from_orders(self.free_rank + other.free_rank, &orders)
    }

    /// Number of cyclic summands in the canonical decomposition.
    pub fn generator_count(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn is_valid(&self) -> bool {
        self.torsion.iter().all(|d| *d >= BigInt::from(2))
            && self.torsion.windows(2).all(|w| w[1].is_multiple_of(&w[0]))
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank == 1 {
            parts.push("Z".into());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// A subgroup of `ℤ^ambient_rank` given by generating rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublatticeSpec {
    pub ambient_rank: usize,
    pub generators: IntMatrix,
}

impl SublatticeSpec {
    pub fn new(ambient_rank: usize, generators: IntMatrix) -> Result<Self> {
        if generators.cols() != ambient_rank {
            return Err(Error::ArityMismatch { expected: ambient_rank, got: generators.cols() });
        }
        Ok(SublatticeSpec { ambient_rank, generators })
    }

    pub fn zero(ambient_rank: usize) -> Self {
        SublatticeSpec { ambient_rank, generators: IntMatrix::zeros(0, ambient_rank) }
    }

    pub fn full(ambient_rank: usize) -> Self {
        SublatticeSpec { ambient_rank, generators: IntMatrix::identity(ambient_rank) }
    }

    /// Canonical basis of the generated subgroup (Hermite rows).
    pub fn hermite_basis(&self) -> IntMatrix {
        hermite_rows(&self.generators)
    }

    pub fn rank(&self) -> usize {
        self.generators.rank()
    }

    /// Membership test via the quotient coordinates.
    pub fn contains(&self, x: &[BigInt]) -> bool {
        quotient_group(self.ambient_rank, self)
            .map(|q| q.coordinates(x).iter().all(Zero::is_zero))
            .unwrap_or(false)
    }
}

/// `ℤ^n / sub`, together with the change of basis that puts cosets in
/// canonical coordinates.
#[derive(Debug, Clone)]
pub struct QuotientGroup {
    pub group: FgAbelianGroup,
    ambient_rank: usize,
    /// Cyclic orders per coordinate after the change of basis `x ↦ x·V`;
    /// 0 marks a free coordinate.
    orders: Vec<BigInt>,
    v: IntMatrix,
    v_inverse: IntMatrix,
}

impl QuotientGroup {
    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    /// Canonical coordinates of the coset of `x`: one entry per ambient
    /// coordinate, reduced into `[0, d)` on torsion coordinates, `0` on
    /// coordinates killed by the sublattice, unchanged on free ones.
    pub fn coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.v.left_apply(x);
        y.into_iter()
            .zip(&self.orders)
            .map(|(yi, d)| if d.is_zero() { yi } else { yi.mod_floor(d) })
            .collect()
    }

    /// One representative per coset when the quotient is finite, in the
    /// lexicographic order of their canonical coordinates.
    pub fn coset_representatives(&self) -> Option<Vec<Vec<BigInt>>> {
        if !self.group.is_finite() {
            return None;
        }
        let mut reps: Vec<Vec<BigInt>> = vec![vec![]];
        for d in &self.orders {
            let mut next = Vec::new();
            for prefix in &reps {
                let mut k = BigInt::zero();
                while &k < d {
                    let mut p = prefix.clone();
                    p.push(k.clone());
                    next.push(p);
                    k += 1;
                }
            }
            reps = next;
        }
        Some(reps.iter().map(|y| self.v_inverse.left_apply(y)).collect())
    }
}

/// Basis of `{x ∈ ℤ^cols : a·x = 0}` as Hermite rows.
pub fn kernel_lattice(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let cols: Vec<usize> = (r..a.cols()).collect();
    let basis = snf.v.select_cols(&cols).transpose();
    hermite_rows(&basis)
}

/// The isomorphism type of `ℤ^n / ⟨rows of sub⟩`.
pub fn quotient_group(ambient_rank: usize, sub: &SublatticeSpec) -> Result<QuotientGroup> {
    if sub.ambient_rank != ambient_rank {
        return Err(Error::ArityMismatch { expected: ambient_rank, got: sub.ambient_rank });
    }
    let snf = smith_normal_form(&sub.generators);
    let mut orders = vec![BigInt::zero(); ambient_rank];
    for (i, d) in snf.invariants.iter().enumerate() {
        orders[i] = d.clone();
    }
    let free_rank = orders.iter().filter(|d| d.is_zero()).count();
    let torsion = orders.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect();
    Ok(QuotientGroup {
        group: FgAbelianGroup { free_rank, torsion },
        ambient_rank,
        orders,
        v: snf.v,
        v_inverse: snf.v_inverse,
    })
}

/// Characters of `G_β`: for `β: L → N` (columns are images of the basis of
/// `L`) returns `β*(N^∨) ⊆ L^∨`, whose quotient is the character group of
/// `G_β`.
pub fn gbeta_characters(beta: &IntMatrix) -> Result<SublatticeSpec> {
    let rank = beta.rank();
    if rank < beta.rows() {
        return Err(Error::NotFiniteIndex { rank, target_rank: beta.rows() });
    }
    Ok(SublatticeSpec { ambient_rank: beta.cols(), generators: hermite_rows(beta) })
}

/// Greatest common divisor of all `k × k` minors, computed by expansion.
/// Cheap only for the small matrices used in cross-checks.
pub fn minor_gcd(a: &IntMatrix, k: usize) -> BigInt {
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                go(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        go(0, n, k, &mut cur, &mut out);
        out
    }
    let mut g = BigInt::zero();
    for rs in subsets(a.rows(), k) {
        for cs in subsets(a.cols(), k) {
            let m = a.select_rows(&rs).select_cols(&cs);
            g = g.gcd(&m.det());
        }
    }
    g.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_lattice(&IntMatrix::from_i64_rows(&[&[1, 1]])), IntMatrix::from_i64_rows(&[&[1, -1]]));
        assert_eq!(kernel_lattice(&IntMatrix::from_i64_rows(&[&[1, 2]])), IntMatrix::from_i64_rows(&[&[2, -1]]));
        assert_eq!(kernel_lattice(&IntMatrix::from_i64_rows(&[&[0]])), IntMatrix::from_i64_rows(&[&[1]]));
    }

    #[test]
    fn quotient_examples() {
        let q = quotient_group(1, &SublatticeSpec::new(1, IntMatrix::from_i64_rows(&[&[2]])).unwrap()).unwrap();
        assert_eq!(q.group, FgAbelianGroup::cyclic(2));
        let q = quotient_group(2, &SublatticeSpec::new(2, IntMatrix::from_i64_rows(&[&[1, 1]])).unwrap()).unwrap();
        assert_eq!(q.group, FgAbelianGroup::free(1));
        let sub = SublatticeSpec::new(2, IntMatrix::from_i64_rows(&[&[2, 0], &[0, 3]])).unwrap();
        let q = quotient_group(2, &sub).unwrap();
        assert_eq!(q.group, FgAbelianGroup::cyclic(6));
        let reps = q.coset_representatives().unwrap();
        assert_eq!(reps.len(), 6);
        // representatives are pairwise inequivalent
        for (i, x) in reps.iter().enumerate() {
            for y in &reps[i + 1..] {
                let diff: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                assert!(!sub.contains(&diff));
            }
        }
    }

    #[test]
    fn quotient_arity_mismatch() {
        let sub = SublatticeSpec::zero(2);
        assert!(matches!(quotient_group(3, &sub), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn gbeta_examples() {
        let m = gbeta_characters(&IntMatrix::from_i64_rows(&[&[1, 2]])).unwrap();
        assert_eq!(m.generators, IntMatrix::from_i64_rows(&[&[1, 2]]));
        assert_eq!(quotient_group(2, &m).unwrap().group, FgAbelianGroup::free(1));

        let id = gbeta_characters(&IntMatrix::identity(3)).unwrap();
        assert!(quotient_group(3, &id).unwrap().group.is_trivial());

        let two = gbeta_characters(&IntMatrix::from_i64_rows(&[&[2]])).unwrap();
        assert_eq!(quotient_group(1, &two).unwrap().group, FgAbelianGroup::cyclic(2));

        let bad = IntMatrix::from_i64_rows(&[&[1, 1], &[2, 2]]);
        assert!(matches!(gbeta_characters(&bad), Err(Error::NotFiniteIndex { .. })));
    }

    #[test]
    fn coordinates_vanish_on_sublattice() {
        let sub = SublatticeSpec::new(3, IntMatrix::from_i64_rows(&[&[2, 4, 0], &[0, 3, 3]])).unwrap();
        let q = quotient_group(3, &sub).unwrap();
        assert!(q.coordinates(&b(&[2, 4, 0])).iter().all(Zero::is_zero));
        assert!(q.coordinates(&b(&[2, 7, 3])).iter().all(Zero::is_zero));
        assert!(!q.coordinates(&b(&[1, 0, 0])).iter().all(Zero::is_zero));
    }

    #[test]
    fn group_normalization() {
        let g = FgAbelianGroup::from_orders(0, &b(&[2, 3]));
        assert_eq!(g, FgAbelianGroup::cyclic(6));
        assert!(g.is_valid());
        let h = FgAbelianGroup::cyclic(2).direct_sum(&FgAbelianGroup::cyclic(4));
        assert_eq!(h.torsion, b(&[2, 4]));
        assert_eq!(h.order(), Some(BigInt::from(8)));
        assert_eq!(h.to_string(), "Z/2 + Z/4");
    }
}
