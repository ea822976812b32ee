use std::collections::BTreeMap;

use super::{is_complete, is_smooth, Fan};
use crate::error::{Error, Result};

/// An ordering `σ₁, …, σ_m` of the maximal cones with, for each position
/// `i`, the cone `τᵢ` (meet of `σᵢ` with the later cones sharing a facet)
/// and `τ'ᵢ` (the same with earlier cones).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellingOrder {
    /// `order[i]` is the index of the maximal cone placed at position `i`.
    pub order: Vec<usize>,
    pub tau: Vec<Vec<usize>>,
    pub tau_prime: Vec<Vec<usize>>,
}

struct Adjacency {
    /// `across[c][k]`: the maximal cone sharing the facet of `c` opposite its
    /// `k`-th ray.
    across: Vec<Vec<usize>>,
}

fn adjacency(f: &Fan) -> Adjacency {
    let mut owners: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (ci, c) in f.max_cones().iter().enumerate() {
        for skip in 0..c.len() {
            let facet: Vec<usize> = c.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &x)| x).collect();
            owners.entry(facet).or_default().push(ci);
        }
    }
    let across = f
        .max_cones()
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            (0..c.len())
                .map(|skip| {
                    let facet: Vec<usize> =
                        c.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &x)| x).collect();
                    owners[&facet].iter().copied().find(|&o| o != ci).expect("complete fan pairs every facet")
                })
                .collect()
        })
        .collect();
    Adjacency { across }
}

fn contains(cone: &[usize], sub: &[usize]) -> bool {
    sub.iter().all(|x| cone.contains(x))
}

/// Searches for an ordering of the maximal cones of a smooth complete fan
/// satisfying
///
/// * `τᵢ ⊆ σⱼ ⇒ i ≤ j`, and
/// * `τ'ᵢ ⊆ σⱼ ⇒ j ≤ i`.
///
/// Both conditions are decided at the moment a cone is placed, so the
/// search is a depth-first walk with lexicographic tie-break.
pub fn shelling_order(f: &Fan) -> Result<ShellingOrder> {
    if !is_smooth(f) || !is_complete(f) {
        return Err(Error::NotCompleteOrSmooth);
    }
    let cones = f.max_cones();
    let adj = adjacency(f);
    let m = cones.len();

    struct State<'a> {
        cones: &'a [Vec<usize>],
        adj: &'a Adjacency,
        placed: Vec<bool>,
        order: Vec<usize>,
        tau: Vec<Vec<usize>>,
        tau_prime: Vec<Vec<usize>>,
    }

    fn dfs(st: &mut State<'_>) -> bool {
        if st.order.len() == st.cones.len() {
            return true;
        }
        for c in 0..st.cones.len() {
            if st.placed[c] {
                continue;
            }
            let rays = &st.cones[c];
            let mut tau = Vec::new();
            let mut tau_prime = Vec::new();
            for (k, &r) in rays.iter().enumerate() {
                if st.placed[st.adj.across[c][k]] {
                    tau.push(r);
                } else {
                    tau_prime.push(r);
                }
            }
            // no earlier cone may contain τ; every cone containing τ' must be earlier
            let ok = st.cones.iter().enumerate().all(|(j, s)| {
                if j == c {
                    return true;
                }
                !(st.placed[j] && contains(s, &tau)) && (st.placed[j] || !contains(s, &tau_prime))
            });
            if !ok {
                continue;
            }
            st.placed[c] = true;
            st.order.push(c);
            st.tau.push(tau);
            st.tau_prime.push(tau_prime);
            if dfs(st) {
                return true;
            }
            st.placed[c] = false;
            st.order.pop();
            st.tau.pop();
            st.tau_prime.pop();
        }
        false
    }

    let mut st = State {
        cones,
        adj: &adj,
        placed: vec![false; m],
        order: Vec::with_capacity(m),
        tau: Vec::with_capacity(m),
        tau_prime: Vec::with_capacity(m),
    };
    if dfs(&mut st) {
        Ok(ShellingOrder { order: st.order, tau: st.tau, tau_prime: st.tau_prime })
    } else {
        Err(Error::NoOrderFound)
    }
}

impl ShellingOrder {
    /// Recomputes `τ`, `τ'` from their definition as intersections of cones
    /// and checks every condition on the ordering. Returns a description of
    /// the first violation.
    pub fn verify(&self, f: &Fan) -> std::result::Result<(), String> {
        let n = f.lattice_rank();
        let cones = f.max_cones();
        let m = cones.len();
        let mut seen = vec![false; m];
        if self.order.len() != m || self.tau.len() != m || self.tau_prime.len() != m {
            return Err("ordering does not cover the maximal cones".into());
        }
        for &c in &self.order {
            if c >= m || seen[c] {
                return Err("ordering is not a permutation".into());
            }
            seen[c] = true;
        }
        let meet = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().copied().filter(|x| b.contains(x)).collect() };
        for i in 0..m {
            let sigma = &cones[self.order[i]];
            let mut tau = sigma.clone();
            let mut tau_prime = sigma.clone();
            for j in 0..m {
                if j == i {
                    continue;
                }
                let other = &cones[self.order[j]];
                let common = meet(sigma, other);
                if f.cone_dim(&common) + 1 != n {
                    continue;
                }
                if j > i {
                    tau = meet(&tau, other);
                } else {
                    tau_prime = meet(&tau_prime, other);
                }
            }
            if tau != self.tau[i] || tau_prime != self.tau_prime[i] {
                return Err(format!("position {i}: stored τ/τ' differ from their definition"));
            }
            if !meet(&tau, &tau_prime).is_empty() {
                return Err(format!("position {i}: τ and τ' share a ray"));
            }
            if f.cone_dim(&tau) + f.cone_dim(&tau_prime) != n {
                return Err(format!("position {i}: dim τ + dim τ' ≠ {n}"));
            }
            for j in 0..m {
                let s = &cones[self.order[j]];
                if contains(s, &tau) && j < i {
                    return Err(format!("τ at position {i} lies in the earlier cone at position {j}"));
                }
                if contains(s, &tau_prime) && j > i {
                    return Err(format!("τ' at position {i} lies in the later cone at position {j}"));
                }
            }
        }
        Ok(())
    }
}
