use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::Fan;
use crate::error::{Error, Result};
use crate::lattice::{gbeta_characters, kernel_lattice, quotient_group, FgAbelianGroup, IntMatrix, SublatticeSpec};

/// The group acting on the toric variety of a stacky fan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupData {
    /// `G` trivial: every character of `T` is a character of `T/G`.
    Trivial,
    /// `G = T`: no character relations.
    FullTorus,
    /// `G ⊆ T` cut out by the characters `M' = (T/G)^∨ ⊆ M`.
    Subgroup(SublatticeSpec),
    /// `β: L → N` with `N` finitely generated; columns of `beta` are the
    /// images of the basis of `L` in the coordinates of `target` (free
    /// coordinates first, then one per torsion invariant).
    Beta { beta: IntMatrix, target: FgAbelianGroup },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackyFan {
    pub fan: Fan,
    pub group: GroupData,
}

impl StackyFan {
    pub fn new(fan: Fan, group: GroupData) -> Result<Self> {
        let n = fan.lattice_rank();
        match &group {
            GroupData::Subgroup(sub) if sub.ambient_rank != n => {
                return Err(Error::ArityMismatch { expected: n, got: sub.ambient_rank });
            }
            GroupData::Beta { beta, target } => {
                if beta.cols() != n {
                    return Err(Error::ArityMismatch { expected: n, got: beta.cols() });
                }
                if beta.rows() != target.generator_count() {
                    return Err(Error::ArityMismatch { expected: target.generator_count(), got: beta.rows() });
                }
                if !target.is_valid() {
                    return Err(Error::InvalidInput("target torsion must be ≥ 2 in divisibility order".into()));
                }
            }
            _ => {}
        }
        Ok(StackyFan { fan, group })
    }

    pub fn trivial(fan: Fan) -> Self {
        StackyFan { fan, group: GroupData::Trivial }
    }

    pub fn full_torus(fan: Fan) -> Self {
        StackyFan { fan, group: GroupData::FullTorus }
    }

    /// `M' = (T/G)^∨` for the reduced forms; `None` for `Beta`.
    pub fn character_sublattice(&self) -> Option<SublatticeSpec> {
        let n = self.fan.lattice_rank();
        match &self.group {
            GroupData::Trivial => Some(SublatticeSpec::full(n)),
            GroupData::FullTorus => Some(SublatticeSpec::zero(n)),
            GroupData::Subgroup(s) => Some(s.clone()),
            GroupData::Beta { .. } => None,
        }
    }

    /// Character group `G^∨ = M / M'` of a reduced form.
    pub fn group_characters(&self) -> Option<FgAbelianGroup> {
        let sub = self.character_sublattice()?;
        quotient_group(self.fan.lattice_rank(), &sub).ok().map(|q| q.group)
    }

    pub fn is_reduced_form(&self) -> bool {
        !matches!(self.group, GroupData::Beta { .. })
    }
}

/// Output of [`stacky_reduction`].
#[derive(Debug, Clone)]
pub struct Reduction {
    /// `Σ'` on `L ⊕ ℤ^s`: every maximal cone of `Σ` joined with `τ`.
    pub fan: Fan,
    /// `M' = β'^*(ℤ^r)`, the characters cutting out `G_{β'}` in `T_{L⊕ℤ^s}`.
    pub characters: SublatticeSpec,
    /// Ray indices (in `fan`) of the extra cone `τ = ⟨e₁,…,e_s⟩`.
    pub tau: Vec<usize>,
    /// `Q: ℤ^s → ℤ^r`, a presentation of the target group.
    pub presentation: IntMatrix,
    /// Lift `B: L → ℤ^r` of `β`.
    pub lift: IntMatrix,
    /// `β' = B ⊕ Q`.
    pub beta_prime: IntMatrix,
    /// `G^∨` of the original stacky fan.
    pub group_characters: FgAbelianGroup,
}

impl Reduction {
    /// Rank `s` of the auxiliary lattice.
    pub fn extra_rank(&self) -> usize {
        self.tau.len()
    }

    /// Restricts the group action to the orbit closure `Y ≅ X_Σ` of `τ`.
    ///
    /// `G_{β'}` acts on `X_Σ` through `T_{L⊕ℤ^s} → T_L`. Returns the
    /// characters `(T_L/F)^∨ ⊆ L^∨` of the image `F`, and the character group
    /// `H^∨` of the kernel `H`. Errors with `NotSupported` when
    /// `G^∨ ≇ F^∨ ⊕ H^∨`, i.e. the extension does not split.
    pub fn image_and_kernel(&self) -> Result<(SublatticeSpec, FgAbelianGroup)> {
        let s = self.extra_rank();
        let total = self.fan.lattice_rank();
        let n = total - s;
        let gens = &self.characters.generators;
        let head = gens.select_cols(&(0..n).collect::<Vec<_>>());
        let tail = gens.select_cols(&(n..total).collect::<Vec<_>>());
        // M' ∩ (ℤ^n ⊕ 0): combinations of generators vanishing on the tail
        let combos = kernel_lattice(&tail.transpose());
        let f_sub = SublatticeSpec::new(n, crate::lattice::hermite_rows(&(&combos * &head)))?;
        let h_dual = quotient_group(s, &SublatticeSpec::new(s, tail)?)?.group;
        let f_dual = quotient_group(n, &f_sub)?.group;
        if f_dual.direct_sum(&h_dual) != self.group_characters {
            return Err(Error::NotSupported(format!(
                "non-split extension: G^∨ = {}, F^∨ = {f_dual}, H^∨ = {h_dual}",
                self.group_characters
            )));
        }
        Ok((f_sub, h_dual))
    }
}

/// Rewrites a stacky fan with `β: L → N` (`N` possibly with torsion) as a
/// subgroup of a torus acting on a larger toric variety.
///
/// With `ℤ^s →Q ℤ^r → N → 0` and a lift `B` of `β`, the fan `Σ'` on
/// `L ⊕ ℤ^s` joins `τ = ⟨e₁,…,e_s⟩` to every cone of `Σ`, and
/// `β' = B ⊕ Q`. The orbit closure of `τ` is `X_Σ`. When `N` is free the
/// input passes through with `s = 0`.
///
/// Reduced-form inputs pass through unchanged with their own characters.
pub fn stacky_reduction(sf: &StackyFan) -> Result<Reduction> {
    let n = sf.fan.lattice_rank();
    let (beta, target) = match &sf.group {
        GroupData::Beta { beta, target } => (beta.clone(), target.clone()),
        _ => {
            let characters = sf.character_sublattice().expect("reduced form");
            let group_characters = quotient_group(n, &characters)?.group;
            return Ok(Reduction {
                fan: sf.fan.clone(),
                characters,
                tau: Vec::new(),
                presentation: IntMatrix::zeros(0, 0),
                lift: IntMatrix::zeros(0, n),
                beta_prime: IntMatrix::zeros(0, n),
                group_characters,
            });
        }
    };
    let r = target.generator_count();
    let s = target.torsion.len();
    let f = target.free_rank;

    let mut q = IntMatrix::zeros(r, s);
    for (k, d) in target.torsion.iter().enumerate() {
        q.set(f + k, k, d.clone());
    }
    // smallest nonnegative lift on torsion coordinates
    let mut lift = beta.clone();
    for (k, d) in target.torsion.iter().enumerate() {
        for j in 0..n {
            let v = lift.get(f + k, j).mod_floor(d);
            lift.set(f + k, j, v);
        }
    }
    let beta_prime = lift.hstack(&q);
    let characters = gbeta_characters(&beta_prime)?;
    let group_characters = quotient_group(n + s, &characters)?.group;

    let mut rays: Vec<Vec<BigInt>> = sf
        .fan
        .rays()
        .iter()
        .map(|v| {
            let mut w = v.clone();
            w.extend(std::iter::repeat_n(BigInt::zero(), s));
            w
        })
        .collect();
    let d = rays.len();
    for k in 0..s {
        let mut e = vec![BigInt::zero(); n + s];
        e[n + k] = 1.into();
        rays.push(e);
    }
    let tau: Vec<usize> = (d..d + s).collect();
    let cones: Vec<Vec<usize>> = sf
        .fan
        .max_cones()
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.extend(tau.iter().copied());
            c
        })
        .collect();
    let fan = Fan::new(n + s, rays, cones)?;
    Ok(Reduction { fan, characters, tau, presentation: q, lift, beta_prime, group_characters })
}
