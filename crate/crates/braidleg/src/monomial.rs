//! PBW-ordered monomials: canonical basis labels of the braided algebra.

use std::collections::BTreeMap;
use std::fmt;

use crate::context::Context;
use crate::error::{EngineError, Result};
use crate::gen::GenId;
use crate::qcoeff::QMono;
use crate::weight::{swap_factor, BraidWeight, MultiIndex};

/// A monomial is a finite exponent map over generators, stored in the fixed
/// PBW total order. Negative exponents are permitted only on the invertible
/// units `kappa`/`theta`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default, Hash)]
pub struct Monomial(BTreeMap<GenId, i64>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_gen(g: GenId, e: i64) -> Result<Self> {
        let mut m = Monomial::one();
        m.set_exp(g, e)?;
        Ok(m)
    }

    fn set_exp(&mut self, g: GenId, e: i64) -> Result<()> {
        if e == 0 {
            return Ok(());
        }
        if e < 0 && !g.invertible() {
            return Err(EngineError::NegativeExponent(g.to_string()));
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(g) {
            Entry::Vacant(v) => {
                v.insert(e);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += e;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
        Ok(())
    }

    pub fn exp(&self, g: &GenId) -> i64 {
        self.0.get(g).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GenId, &i64)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Componentwise weight sum.
    pub fn weight(&self, s: usize) -> BraidWeight {
        let mut w = BraidWeight::zero(s);
        for (g, &e) in &self.0 {
            w = w.add(&g.weight(s).scale(e));
        }
        w
    }

    /// The canonical word: generators in ascending PBW order with their
    /// exponents. The coefficient of a monomial is always understood
    /// relative to this word.
    pub fn word(&self) -> Vec<(GenId, i64)> {
        self.0.iter().map(|(g, &e)| (g.clone(), e)).collect()
    }

    /// Merge exponent maps (the product's basis label). Fails if a
    /// non-invertible generator would end up with a negative exponent.
    pub fn merge(&self, other: &Monomial) -> Result<Monomial> {
        let mut out = self.clone();
        for (g, &e) in &other.0 {
            if e == 0 {
                continue;
            }
            let slot = out.0.entry(g.clone()).or_insert(0);
            *slot += e;
            if *slot == 0 {
                out.0.remove(g);
            } else if *slot < 0 && !g.invertible() {
                return Err(EngineError::NegativeExponent(g.to_string()));
            }
        }
        Ok(out)
    }

    /// Braiding factor of the product `self * other` relative to the merged
    /// canonical monomial: every generator of `other` that sorts before a
    /// generator of `self` must cross it once. Reference implementation;
    /// the element product uses an annotation-cached equivalent.
    pub fn mul_factor(&self, other: &Monomial, ctx: &Context) -> QMono {
        let s = ctx.s();
        let mut factor = QMono::one();
        for (ga, &ea) in &self.0 {
            for (gb, &eb) in &other.0 {
                if gb < ga {
                    let c = swap_factor(&ga.weight(s), &gb.weight(s));
                    factor = factor.mul(&c.pow(ea * eb));
                }
            }
        }
        factor
    }

    /// Split off the coordinate prefix: the `x^N` exponents and the
    /// remaining monomial.
    pub fn split_x_prefix(&self, s: usize) -> (MultiIndex, Monomial) {
        let mut n = vec![0u32; s];
        let mut rest = Monomial::one();
        for (g, &e) in &self.0 {
            if let GenId::X(a) = g {
                n[(*a - 1) as usize] = e as u32;
            } else {
                rest.0.insert(g.clone(), e);
            }
        }
        (n, rest)
    }

    /// Total degree in the coordinate letters (positive `X` exponents).
    pub fn x_degree(&self) -> u64 {
        self.0
            .iter()
            .filter_map(|(g, &e)| match g {
                GenId::X(_) => Some(e as u64),
                _ => None,
            })
            .sum()
    }

    pub fn contains_x(&self) -> bool {
        self.0.keys().any(|g| matches!(g, GenId::X(_)))
    }

    /// True when no unit-of-measurement letter remains.
    pub fn units_free(&self) -> bool {
        !self
            .0
            .keys()
            .any(|g| matches!(g, GenId::Kappa(_) | GenId::Theta(_)))
    }

    pub fn validate(&self, ctx: &Context) -> Result<()> {
        for (g, &e) in &self.0 {
            g.validate(ctx)?;
            if e < 0 && !g.invertible() {
                return Err(EngineError::NegativeExponent(g.to_string()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (g, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}
