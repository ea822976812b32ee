//! Strong Gröbner bases over ℤ for submodules of free modules over a
//! polynomial ring.
//!
//! Monomials are stored as *order keys*: for every block of variables the
//! key holds the block degree followed by the exponents in priority order.
//! Comparing keys lexicographically is then exactly the block
//! degree-lexicographic order, and divisibility is slot-wise `≤`.
//!
//! Module elements carry a position; positions are compared first, a smaller
//! position being the larger monomial (position over term).

use std::cell::Cell;
use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap};
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Cooperative cancellation flag shared with long-running computations.
#[derive(Clone, Debug, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, AtomicOrdering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(AtomicOrdering::Relaxed)
    }
}

/// Limits for a Gröbner computation.
#[derive(Clone, Debug)]
pub struct GroebnerConfig {
    /// Maximum number of reduction steps before giving up.
    pub step_budget: u64,
    pub cancel: Option<CancelToken>,
}

impl Default for GroebnerConfig {
    fn default() -> Self {
        GroebnerConfig { step_budget: 1_000_000, cancel: None }
    }
}

impl GroebnerConfig {
    pub fn with_budget(step_budget: u64) -> Self {
        GroebnerConfig { step_budget, cancel: None }
    }
}

pub(crate) struct Budget {
    limit: u64,
    used: Cell<u64>,
    cancel: Option<CancelToken>,
}

impl Budget {
    pub(crate) fn new(cfg: &GroebnerConfig) -> Self {
        Budget { limit: cfg.step_budget, used: Cell::new(0), cancel: cfg.cancel.clone() }
    }

    pub(crate) fn unlimited() -> Self {
        Budget { limit: u64::MAX, used: Cell::new(0), cancel: None }
    }

    fn tick(&self) -> Result<()> {
        let u = self.used.get() + 1;
        self.used.set(u);
        if u > self.limit {
            return Err(Error::ResourceLimit { budget: self.limit });
        }
        if u & 0xff == 0 && self.cancel.as_ref().is_some_and(CancelToken::is_cancelled) {
            return Err(Error::Cancelled);
        }
        Ok(())
    }
}

/// Variable layout and monomial order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Layout {
    nvars: usize,
    slot_of_var: Vec<usize>,
    /// For each block: its degree slot and the slots of its variables.
    blocks: Vec<(usize, Vec<usize>)>,
    key_len: usize,
}

pub(crate) type Key = Box<[u32]>;

impl Layout {
    /// `blocks` lists variable indices, most significant block first and,
    /// within a block, most significant variable first. Blocks must
    /// partition `0..nvars`.
    pub(crate) fn new(nvars: usize, blocks: &[Vec<usize>]) -> Self {
        let mut slot_of_var = vec![usize::MAX; nvars];
        let mut out_blocks = Vec::new();
        let mut slot = 0;
        for b in blocks {
            let deg_slot = slot;
            slot += 1;
            let mut slots = Vec::new();
            for &v in b {
                assert!(slot_of_var[v] == usize::MAX, "variable in two blocks");
                slot_of_var[v] = slot;
                slots.push(slot);
                slot += 1;
            }
            out_blocks.push((deg_slot, slots));
        }
        assert!(slot_of_var.iter().all(|&s| s != usize::MAX), "blocks must cover all variables");
        Layout { nvars, slot_of_var, blocks: out_blocks, key_len: slot }
    }

    pub(crate) fn nvars(&self) -> usize {
        self.nvars
    }

    pub(crate) fn key_from_exps(&self, exps: &[u32]) -> Key {
        let mut key = vec![0u32; self.key_len];
        for (v, &e) in exps.iter().enumerate() {
            key[self.slot_of_var[v]] = e;
        }
        for (d, slots) in &self.blocks {
            key[*d] = slots.iter().map(|&s| key[s]).sum();
        }
        key.into_boxed_slice()
    }

    pub(crate) fn exps_from_key(&self, key: &[u32]) -> Vec<u32> {
        self.slot_of_var.iter().map(|&s| key[s]).collect()
    }

    pub(crate) fn one(&self) -> Key {
        vec![0u32; self.key_len].into_boxed_slice()
    }

    fn lcm(&self, a: &[u32], b: &[u32]) -> Key {
        let mut key: Vec<u32> = a.iter().zip(b).map(|(x, y)| *x.max(y)).collect();
        for (d, slots) in &self.blocks {
            key[*d] = slots.iter().map(|&s| key[s]).sum();
        }
        key.into_boxed_slice()
    }

    fn coprime(&self, a: &[u32], b: &[u32]) -> bool {
        self.slot_of_var.iter().all(|&s| a[s] == 0 || b[s] == 0)
    }

    fn total_degree(&self, key: &[u32]) -> u32 {
        self.blocks.iter().map(|(d, _)| key[*d]).sum()
    }

    /// Whether `key` is a pure power of the variable `v`.
    fn is_pure_power_of(&self, key: &[u32], v: usize) -> bool {
        let s = self.slot_of_var[v];
        key[s] > 0 && self.slot_of_var.iter().all(|&t| t == s || key[t] == 0)
    }

    fn times_var(&self, key: &[u32], v: usize) -> Key {
        let mut k = key.to_vec();
        let s = self.slot_of_var[v];
        k[s] += 1;
        let d = self.blocks.iter().find(|(_, slots)| slots.contains(&s)).map(|(d, _)| *d).unwrap();
        k[d] += 1;
        k.into_boxed_slice()
    }
}

pub(crate) fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn key_mul(a: &[u32], b: &[u32]) -> Key {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn key_div(b: &[u32], a: &[u32]) -> Key {
    b.iter().zip(a).map(|(y, x)| y - x).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Mono {
    pub(crate) pos: u32,
    pub(crate) key: Key,
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        other.pos.cmp(&self.pos).then_with(|| self.key.cmp(&other.key))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Term {
    pub(crate) m: Mono,
    pub(crate) c: BigInt,
}

/// Terms sorted strictly decreasing, no zero coefficients.
pub(crate) type Poly = Vec<Term>;

pub(crate) fn normalize(mut terms: Vec<Term>) -> Poly {
    terms.sort_by(|a, b| b.m.cmp(&a.m));
    let mut out: Poly = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.m == t.m => last.c += t.c,
            _ => {
                if out.last().is_some_and(|l| l.c.is_zero()) {
                    out.pop();
                }
                out.push(t)
            }
        }
    }
    if out.last().is_some_and(|l| l.c.is_zero()) {
        out.pop();
    }
    out.retain(|t| !t.c.is_zero());
    out
}

/// `p + q · x^mult · g`, all inputs sorted decreasing.
fn add_scaled(p: &[Term], q: &BigInt, mult: &[u32], g: &[Term]) -> Poly {
    let mut out = Vec::with_capacity(p.len() + g.len());
    let mut i = 0;
    let mut gi = g.iter().map(|t| Term { m: Mono { pos: t.m.pos, key: key_mul(&t.m.key, mult) }, c: &t.c * q });
    let mut next_g = gi.next();
    while i < p.len() || next_g.is_some() {
        match (p.get(i), &next_g) {
            (Some(a), Some(b)) => match a.m.cmp(&b.m) {
                Ordering::Greater => {
                    out.push(a.clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(next_g.take().unwrap());
                    next_g = gi.next();
                }
                Ordering::Equal => {
                    let c = &a.c + &b.c;
                    if !c.is_zero() {
                        out.push(Term { m: a.m.clone(), c });
                    }
                    i += 1;
                    next_g = gi.next();
                }
            },
            (Some(a), None) => {
                out.push(a.clone());
                i += 1;
            }
            (None, Some(_)) => {
                out.push(next_g.take().unwrap());
                next_g = gi.next();
            }
            (None, None) => break,
        }
    }
    out
}

fn scale_mul(p: &[Term], q: &BigInt, mult: &[u32]) -> Poly {
    p.iter()
        .map(|t| Term { m: Mono { pos: t.m.pos, key: key_mul(&t.m.key, mult) }, c: &t.c * q })
        .collect()
}

/// Full normal form of `f` modulo `basis` with Euclidean coefficient
/// reduction: a term `c·m` is reduced by the divisor of `m` with the
/// smallest leading coefficient `a`, leaving `c mod a ∈ [0, a)`.
pub(crate) fn reduce(f: Poly, basis: &[Poly], budget: &Budget) -> Result<Poly> {
    let mut p = f;
    let mut i = 0;
    while i < p.len() {
        let lead = &p[i];
        let mut best: Option<&Poly> = None;
        for g in basis {
            let lg = &g[0];
            if lg.m.pos == lead.m.pos
                && divides(&lg.m.key, &lead.m.key)
                && best.is_none_or(|b| lg.c.abs() < b[0].c.abs())
            {
                best = Some(g);
                if lg.c.is_one() {
                    break;
                }
            }
        }
        let Some(g) = best else {
            i += 1;
            continue;
        };
        let lc = &g[0].c;
        let q = lead.c.div_floor(lc);
        if q.is_zero() {
            i += 1;
            continue;
        }
        budget.tick()?;
        let lead_mono = lead.m.clone();
        let mult = key_div(&lead.m.key, &g[0].m.key);
        let tail = add_scaled(&p[i..], &-q, &mult, g);
        p.truncate(i);
        p.extend(tail);
        // a nonzero remainder lies in [0, min LC) and is final
        if p.get(i).is_some_and(|t| t.m == lead_mono) {
            i += 1;
        }
    }
    Ok(p)
}

fn make_positive(mut p: Poly) -> Poly {
    if p.first().is_some_and(|t| t.c.is_negative()) {
        for t in p.iter_mut() {
            t.c = -std::mem::take(&mut t.c);
        }
    }
    p
}

/// Strong Gröbner basis of the submodule generated by `gens`.
///
/// `ideal` enables the coprime-leading-term criterion, valid only when
/// every element lives in a single position of a rank-one module.
pub(crate) fn buchberger(layout: &Layout, gens: Vec<Poly>, ideal: bool, budget: &Budget) -> Result<Vec<Poly>> {
    let mut basis: Vec<Poly> = Vec::new();
    let mut heap: BinaryHeap<Reverse<(u32, u64, usize, usize)>> = BinaryHeap::new();
    let mut seq = 0u64;

    let insert = |h: Poly, basis: &mut Vec<Poly>, heap: &mut BinaryHeap<Reverse<(u32, u64, usize, usize)>>, seq: &mut u64| {
        let h = make_positive(h);
        let idx = basis.len();
        for (j, g) in basis.iter().enumerate() {
            if g[0].m.pos != h[0].m.pos {
                continue;
            }
            let l = layout.lcm(&g[0].m.key, &h[0].m.key);
            heap.push(Reverse((layout.total_degree(&l), *seq, j, idx)));
            *seq += 1;
        }
        basis.push(h);
    };

    for g in gens {
        let r = reduce(normalize(g), &basis, budget)?;
        if !r.is_empty() {
            insert(r, &mut basis, &mut heap, &mut seq);
        }
    }

    while let Some(Reverse((_, _, i, j))) = heap.pop() {
        budget.tick()?;
        let (fi, fj) = (&basis[i], &basis[j]);
        let (a, b) = (fi[0].c.clone(), fj[0].c.clone());
        let (ki, kj) = (fi[0].m.key.clone(), fj[0].m.key.clone());
        let l = layout.lcm(&ki, &kj);
        let mi = key_div(&l, &ki);
        let mj = key_div(&l, &kj);

        let mut new_elems = Vec::new();
        let skip_s = ideal && layout.coprime(&ki, &kj) && a.gcd(&b).is_one();
        if !skip_s {
            let c = a.lcm(&b);
            let s = add_scaled(&scale_mul(fi, &(&c / &a), &mi), &-(&c / &b), &mj, fj);
            new_elems.push(s);
        }
        if !a.is_multiple_of(&b) && !b.is_multiple_of(&a) {
            let e = a.extended_gcd(&b);
            let g = add_scaled(&scale_mul(fi, &e.x, &mi), &e.y, &mj, fj);
            new_elems.push(g);
        }
        for s in new_elems {
            let r = reduce(s, &basis, budget)?;
            if !r.is_empty() {
                insert(r, &mut basis, &mut heap, &mut seq);
            }
        }
    }

    // minimal strong basis: drop elements whose leading term is divisible by
    // another's leading term
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&x, &y| basis[x][0].m.cmp(&basis[y][0].m).then(basis[x][0].c.cmp(&basis[y][0].c)).then(x.cmp(&y)));
    let mut kept: Vec<Poly> = Vec::new();
    for &x in &order {
        let lt = &basis[x][0];
        let redundant = kept.iter().any(|h| {
            h[0].m.pos == lt.m.pos && divides(&h[0].m.key, &lt.m.key) && lt.c.is_multiple_of(&h[0].c)
        });
        if !redundant {
            kept.push(basis[x].clone());
        }
    }
    // tail reduction
    for k in 0..kept.len() {
        let others: Vec<Poly> = kept.iter().enumerate().filter(|(o, _)| *o != k).map(|(_, p)| p.clone()).collect();
        let lead = kept[k][0].clone();
        let tail: Poly = kept[k][1..].to_vec();
        let mut reduced = vec![lead];
        reduced.extend(reduce(tail, &others, budget)?);
        kept[k] = reduced;
    }
    kept.sort_by(|x, y| x[0].m.cmp(&y[0].m));
    Ok(kept)
}

/// Module monomials outside the leading-term module, for positions
/// `0..npos`. `None` when infinitely many.
pub(crate) fn standard_monomials(layout: &Layout, leads: &[&Mono], npos: u32) -> Option<Vec<Mono>> {
    for pos in 0..npos {
        for v in 0..layout.nvars() {
            let bounded = leads.iter().any(|m| m.pos == pos && (m.key.iter().all(|&e| e == 0) || layout.is_pure_power_of(&m.key, v)));
            if !bounded {
                return None;
            }
        }
    }
    let in_lead = |m: &Mono| leads.iter().any(|l| l.pos == m.pos && divides(&l.key, &m.key));
    let mut seen: BTreeSet<Mono> = BTreeSet::new();
    let mut stack: Vec<Mono> = Vec::new();
    for pos in 0..npos {
        let one = Mono { pos, key: layout.one() };
        if !in_lead(&one) {
            stack.push(one);
        }
    }
    while let Some(m) = stack.pop() {
        if !seen.insert(m.clone()) {
            continue;
        }
        for v in 0..layout.nvars() {
            let next = Mono { pos: m.pos, key: layout.times_var(&m.key, v) };
            if !in_lead(&next) && !seen.contains(&next) {
                stack.push(next);
            }
        }
    }
    let mut out: Vec<Mono> = seen.into_iter().collect();
    out.sort();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(layout: &Layout, terms: &[(i64, &[u32])]) -> Poly {
        normalize(
            terms
                .iter()
                .map(|(c, e)| Term { m: Mono { pos: 0, key: layout.key_from_exps(e) }, c: BigInt::from(*c) })
                .collect(),
        )
    }

    #[test]
    fn key_order_is_deglex() {
        let l = Layout::new(2, &[vec![0, 1]]);
        let a = l.key_from_exps(&[2, 0]);
        let b = l.key_from_exps(&[1, 1]);
        let c = l.key_from_exps(&[0, 3]);
        assert!(a > b && c > a);
    }

    #[test]
    fn gb_over_integers_detects_torsion() {
        // ⟨2x, 3y⟩ ∋ 6xy, ⟨2x, 3x⟩ = ⟨x⟩
        let l = Layout::new(2, &[vec![0, 1]]);
        let gens = vec![poly(&l, &[(2, &[1, 0])]), poly(&l, &[(3, &[1, 0])])];
        let gb = buchberger(&l, gens, true, &Budget::unlimited()).unwrap();
        assert_eq!(gb, vec![poly(&l, &[(1, &[1, 0])])]);
    }

    #[test]
    fn reduction_uses_remainders() {
        let l = Layout::new(1, &[vec![0]]);
        let basis = vec![poly(&l, &[(3, &[1])])];
        let r = reduce(poly(&l, &[(7, &[2]), (5, &[0])]), &basis, &Budget::unlimited()).unwrap();
        assert_eq!(r, poly(&l, &[(1, &[2]), (5, &[0])]));
    }

    #[test]
    fn budget_exhaustion() {
        let l = Layout::new(2, &[vec![0, 1]]);
        let gens = vec![poly(&l, &[(1, &[3, 0]), (-1, &[0, 1])]), poly(&l, &[(1, &[1, 2]), (-1, &[0, 0])])];
        let cfg = GroebnerConfig::with_budget(2);
        assert!(matches!(buchberger(&l, gens, true, &Budget::new(&cfg)), Err(Error::ResourceLimit { budget: 2 })));
    }
}
