use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exponent vector of a Laurent monomial; entries may be negative.
pub type Exponents = Vec<i64>;

/// Element of `ℤ[t₁^{±1}, …, t_d^{±1}]`: a finite map from exponent vectors
/// to nonzero integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    arity: usize,
    terms: BTreeMap<Exponents, BigInt>,
}

impl LaurentPoly {
    pub fn zero(arity: usize) -> Self {
        LaurentPoly { arity, terms: BTreeMap::new() }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, BigInt::one())
    }

    pub fn constant(arity: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(vec![0; arity], c)
    }

    pub fn monomial(exps: Exponents, coeff: impl Into<BigInt>) -> Self {
        let arity = exps.len();
        let mut p = Self::zero(arity);
        p.add_term(exps, coeff.into());
        p
    }

    /// The variable `t_i` (0-based).
    pub fn var(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        Self::monomial(e, 1)
    }

    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Exponents, BigInt)>) -> Result<Self> {
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            if e.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, got: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, exps: Exponents, coeff: BigInt) {
        debug_assert_eq!(exps.len(), self.arity);
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[i64]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// `±t^e` if the polynomial is a signed monomial.
    pub fn as_unit_monomial(&self) -> Option<(Exponents, bool)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        c.abs().is_one().then(|| (e.clone(), c.is_negative()))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        LaurentPoly { arity: self.arity, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    /// Multiply by the monomial `t^e`.
    pub fn shift(&self, e: &[i64]) -> Self {
        LaurentPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(x, c)| (x.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.arity);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Re-embed into a ring of arity `new_arity`, sending `t_i ↦ t_{positions[i]}`.
    pub fn embed(&self, new_arity: usize, positions: &[usize]) -> Self {
        assert_eq!(positions.len(), self.arity);
        let mut p = Self::zero(new_arity);
        for (e, c) in &self.terms {
            let mut f = vec![0; new_arity];
            for (i, &x) in e.iter().enumerate() {
                f[positions[i]] += x;
            }
            p.add_term(f, c.clone());
        }
        p
    }

    /// Ring map `t_i ↦ images[i]`. Negative powers require the image to be a
    /// signed monomial.
    pub fn substitute(&self, images: &[LaurentPoly]) -> Result<Self> {
        if images.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: images.len() });
        }
        let target = images.first().map_or(0, |p| p.arity);
        let mut inverses: Vec<Option<LaurentPoly>> = Vec::with_capacity(images.len());
        for img in images {
            inverses.push(img.as_unit_monomial().map(|(e, neg)| {
                let inv: Exponents = e.iter().map(|x| -x).collect();
                LaurentPoly::monomial(inv, if neg { -1 } else { 1 })
            }));
        }
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut term = Self::constant(target, c.clone());
            for (i, &x) in e.iter().enumerate() {
                let factor = if x >= 0 {
                    images[i].pow(x as u32)
                } else {
                    let inv = inverses[i].as_ref().ok_or_else(|| {
                        Error::InvalidInput(format!("variable {} has a negative power but maps to a non-unit", i + 1))
                    })?;
                    inv.pow((-x) as u32)
                };
                term = &term * &factor;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// `∏ t_j^{e_j}` for an exponent vector given as big integers.
    pub fn monomial_big(exps: &[BigInt], coeff: impl Into<BigInt>) -> Result<Self> {
        let e: Exponents = exps
            .iter()
            .map(|x| i64::try_from(x).map_err(|_| Error::NotSupported("exponent exceeds 64 bits".into())))
            .collect::<Result<_>>()?;
        Ok(Self::monomial(e, coeff))
    }

    /// Terms ordered for display: larger `Σ|eᵢ|` first, then higher total
    /// degree, then lexicographically larger exponents.
    pub fn display_terms(&self) -> Vec<(&Exponents, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| {
            let da: i64 = a.0.iter().sum();
            let db: i64 = b.0.iter().sum();
            let wa: i64 = a.0.iter().map(|x| x.abs()).sum();
            let wb: i64 = b.0.iter().map(|x| x.abs()).sum();
            wb.cmp(&wa).then(db.cmp(&da)).then_with(|| b.0.cmp(a.0))
        });
        v
    }

    /// Human-readable form with the given variable names.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.display_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &x) in e.iter().enumerate() {
                let name = names.get(i).cloned().unwrap_or_else(|| format!("t{}", i + 1));
                match x {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{x}")),
                }
            }
            if factors.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    out.push_str(&format!("{mag}*"));
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }

    pub fn default_names(arity: usize) -> Vec<String> {
        (1..=arity).map(|i| format!("t{i}")).collect()
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&Self::default_names(self.arity)))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&Self::default_names(self.arity)))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-BigInt::one())
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = LaurentPoly::zero(self.arity);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1.iter().zip(e2).map(|(a, b)| a + b).collect(), c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
