//! Elements: finite sums of PBW-ordered monomials with Laurent-polynomial
//! coefficients in the braiding variables. All operations are pure; values
//! are immutable and safe to share across threads.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::context::Context;
use crate::error::{EngineError, Result};
use crate::gen::GenId;
use crate::monomial::Monomial;
use crate::qcoeff::{format_rat, Assignment, QMono, QPoly, Rat};
use crate::weight::{swap_factor, BraidWeight};

const DEFAULT_MAX_TERMS: usize = 1_000_000;

/// Term cap, read once from `BRAIDLEG_MAX_TERMS`.
pub fn max_terms() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("BRAIDLEG_MAX_TERMS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_MAX_TERMS)
    })
}

/// A finite sum of monomials with nonzero `QPoly` coefficients.
///
/// Equality is syntactic on normal forms (map equality) and is the oracle
/// for every symbolic identity in the test suite.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct Element {
    terms: BTreeMap<Monomial, QPoly>,
}

impl Element {
    pub fn zero() -> Self {
        Element {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Element::scalar(Rat::one())
    }

    pub fn scalar(r: Rat) -> Self {
        let mut e = Element::zero();
        e.insert(Monomial::one(), QPoly::from_rat(r));
        e
    }

    pub fn from_qpoly(p: QPoly) -> Self {
        let mut e = Element::zero();
        e.insert(Monomial::one(), p);
        e
    }

    /// A bare generator with exponent 1. The caller is responsible for
    /// canonical index order; use [`crate::gen::canonical_bcap`] and friends
    /// for the symmetric families.
    pub fn gen(g: GenId) -> Result<Self> {
        Ok(Element::monomial(Monomial::from_gen(g, 1)?, QPoly::one()))
    }

    pub fn gen_pow(g: GenId, e: i64) -> Result<Self> {
        Ok(Element::monomial(Monomial::from_gen(g, e)?, QPoly::one()))
    }

    pub fn monomial(m: Monomial, c: QPoly) -> Self {
        let mut e = Element::zero();
        e.insert(m, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &QPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> QPoly {
        self.terms.get(m).cloned().unwrap_or_else(QPoly::zero)
    }

    fn insert(&mut self, m: Monomial, c: QPoly) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_size(&self) -> Result<()> {
        if self.terms.len() > max_terms() {
            return Err(EngineError::TooManyTerms { limit: max_terms() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.neg())
    }

    pub fn scale_rat(&self, r: &Rat) -> Element {
        if r.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.mul_rat(r)))
                .collect(),
        }
    }

    pub fn scale_qpoly(&self, p: &QPoly, ctx: &Context) -> Result<Element> {
        let p = ctx.reduce_poly(p)?;
        let mut out = Element::zero();
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.mul(&p));
        }
        Ok(out)
    }

    /// Multiply by a braiding monomial (a swap factor), applying the
    /// context's assignment.
    pub fn scale_mono(&self, q: &QMono, ctx: &Context) -> Result<Element> {
        let (scale, rest) = ctx.reduce_mono(q)?;
        let mut out = Element::zero();
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.mul_mono(&rest).mul_rat(&scale));
        }
        Ok(out)
    }

    /// Product in the braided algebra: distribute over terms, merge the
    /// exponent maps, and absorb the reordering swap factors into the
    /// coefficients. Letter degrees are annotated once per operand term, so
    /// the per-pair factor accumulation is allocation-free.
    pub fn mul(&self, other: &Element, ctx: &Context) -> Result<Element> {
        type LetterDegrees = Vec<(GenId, i64, Vec<i64>)>;
        let s = ctx.s();
        let annotate = |e: &Element| -> Vec<(Monomial, QPoly, LetterDegrees)> {
            e.terms
                .iter()
                .map(|(m, c)| {
                    let gens = m
                        .iter()
                        .map(|(g, &exp)| (g.clone(), exp, g.weight(s).xi_degree()))
                        .collect();
                    (m.clone(), c.clone(), gens)
                })
                .collect()
        };
        let aa = annotate(self);
        let bb = annotate(other);
        let mut out = Element::zero();
        for (ma, ca, ga) in &aa {
            for (mb, cb, gb) in &bb {
                let mut factor = QMono::one();
                for (gen_a, ea, dl) in ga {
                    for (gen_b, eb, dr) in gb {
                        if gen_b >= gen_a {
                            continue;
                        }
                        let mult = ea * eb;
                        for (a, &la) in dl.iter().enumerate() {
                            if la == 0 {
                                continue;
                            }
                            for (b, &rb) in dr.iter().enumerate() {
                                if rb != 0 && a != b {
                                    factor.mul_var(b as u32 + 1, a as u32 + 1, la * rb * mult);
                                }
                            }
                        }
                    }
                }
                let (scale, rest) = ctx.reduce_mono(&factor)?;
                let merged = ma.merge(mb)?;
                out.insert(merged, ca.mul(cb).mul_mono(&rest).mul_rat(&scale));
                out.check_size()?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32, ctx: &Context) -> Result<Element> {
        let mut acc = Element::one();
        for _ in 0..k {
            acc = acc.mul(self, ctx)?;
        }
        Ok(acc)
    }

    /// Normal form of a word: fold the letters left to right. The resulting
    /// coefficient is the accumulated adjacent-transposition factor, and the
    /// result is independent of the transposition schedule.
    pub fn normal_form_word(coeff: QPoly, word: &[(GenId, i64)], ctx: &Context) -> Result<Element> {
        let mut acc = Element::from_qpoly(ctx.reduce_poly(&coeff)?);
        for (g, e) in word {
            g.validate(ctx)?;
            let letter = Element::gen_pow(g.clone(), *e)?;
            acc = acc.mul(&letter, ctx)?;
        }
        Ok(acc)
    }

    /// Homogeneous weight of the element: `Ok(None)` for zero, the common
    /// weight when every monomial agrees, and an internal-consistency error
    /// otherwise.
    pub fn homogeneous_weight(&self, s: usize) -> Result<Option<BraidWeight>> {
        let mut found: Option<BraidWeight> = None;
        for m in self.terms.keys() {
            let w = m.weight(s);
            match &found {
                None => found = Some(w),
                Some(prev) if *prev == w => {}
                Some(prev) => {
                    return Err(EngineError::InternalConsistency(format!(
                        "inhomogeneous element: weights {prev} and {w} both occur"
                    )))
                }
            }
        }
        Ok(found)
    }

    pub fn is_homogeneous_of(&self, w: &BraidWeight, s: usize) -> bool {
        match self.homogeneous_weight(s) {
            Ok(None) => true,
            Ok(Some(got)) => got == *w,
            Err(_) => false,
        }
    }

    /// Homomorphic substitution. Every image must be weight-homogeneous with
    /// the replaced generator's weight; in a fully classical context (all
    /// braidings 1) the guard is vacuous and is skipped.
    pub fn substitute(&self, map: &BTreeMap<GenId, Element>, ctx: &Context) -> Result<Element> {
        let trivial = ctx.braiding_trivial();
        if !trivial {
            for (g, img) in map {
                let want = g.weight(ctx.s());
                match img.homogeneous_weight(ctx.s())? {
                    None => {} // zero image substitutes fine
                    Some(got) if got == want => {}
                    Some(got) => {
                        return Err(EngineError::SubstitutionWeight {
                            gen: g.to_string(),
                            got: got.to_string(),
                            want: want.to_string(),
                        })
                    }
                }
            }
        }
        let mut out = Element::zero();
        for (m, c) in &self.terms {
            let mut acc = Element::from_qpoly(c.clone());
            for (g, e) in m.word() {
                let factor = match map.get(&g) {
                    Some(img) => {
                        if e < 0 {
                            return Err(EngineError::Validation(format!(
                                "cannot substitute into negative power of {g}"
                            )));
                        }
                        img.pow(e as u32, ctx)?
                    }
                    None => Element::gen_pow(g, e)?,
                };
                acc = acc.mul(&factor, ctx)?;
            }
            out = out.add(&acc);
            out.check_size()?;
        }
        Ok(out)
    }

    /// Specialize every braiding variable, leaving generator monomials with
    /// rational coefficients.
    pub fn specialize_q(&self, assign: &Assignment) -> Result<Element> {
        let mut out = Element::zero();
        for (m, c) in &self.terms {
            out.insert(m.clone(), QPoly::from_rat(c.specialize(assign)?));
        }
        Ok(out)
    }

    /// Fully evaluate to a rational: braiding variables through `assign`,
    /// every generator through `values`. Errors on generators without a
    /// value.
    pub fn eval_scalar(
        &self,
        assign: &Assignment,
        values: &dyn Fn(&GenId) -> Option<Rat>,
    ) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.specialize(assign)?;
            for (g, &e) in m.iter() {
                let v = values(g).ok_or_else(|| {
                    EngineError::Validation(format!("no scalar value supplied for {g}"))
                })?;
                if v.is_zero() && e < 0 {
                    return Err(EngineError::Validation(format!(
                        "zero value for inverted generator {g}"
                    )));
                }
                let base = if e >= 0 { v.clone() } else { v.recip() };
                for _ in 0..e.unsigned_abs() {
                    t *= &base;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// The scalar value if this element is a pure scalar (no generators).
    pub fn as_scalar(&self) -> Option<QPoly> {
        if self.terms.is_empty() {
            return Some(QPoly::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Monomial::one()) {
                return Some(c.clone());
            }
        }
        None
    }

    /// Drop every monomial whose coordinate degree exceeds `cap`.
    pub fn truncate_x_degree(&self, cap: u64) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.x_degree() <= cap)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// True when no kappa/theta letter remains in any monomial.
    pub fn units_free(&self) -> bool {
        self.terms.keys().all(|m| m.units_free())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            for (qm, r) in c.terms() {
                if first {
                    first = false;
                } else {
                    write!(f, " + ")?;
                }
                write_term(f, r, qm, m)?;
            }
        }
        Ok(())
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, r: &Rat, qm: &QMono, m: &Monomial) -> fmt::Result {
    let mut lead = true;
    if !r.is_one() || (qm.is_one() && m.is_one()) {
        write!(f, "{}", format_rat(r))?;
        lead = false;
    }
    for (pair, e) in qm.exponents() {
        if !lead {
            write!(f, "*")?;
        }
        lead = false;
        if *e == 1 {
            write!(f, "{pair}")?;
        } else {
            write!(f, "{pair}^{e}")?;
        }
    }
    if !m.is_one() {
        if !lead {
            write!(f, "*")?;
        }
        write!(f, "{m}")?;
    }
    Ok(())
}

/// Convenience: the canonical element of a possibly non-canonical symmetric
/// generator reference (used by the parser and by pipeline code that sums
/// over unordered index tuples).
pub fn abar_elem(i: u32, j: u32, ctx: &Context) -> Result<Element> {
    let (g, f) = crate::gen::canonical_abar(i, j, ctx)?;
    Element::gen(g)?.scale_mono(&f, ctx)
}

pub fn bbar_elem(a: u32, b: u32, ctx: &Context) -> Result<Element> {
    let (g, f) = crate::gen::canonical_bbar(a, b, ctx)?;
    Element::gen(g)?.scale_mono(&f, ctx)
}

pub fn bcap_elem(list: &[u32], ctx: &Context) -> Result<Element> {
    let (g, f) = crate::gen::canonical_bcap(list, ctx)?;
    Element::gen(g)?.scale_mono(&f, ctx)
}

pub fn acap_elem(list: &[u32], ctx: &Context) -> Result<Element> {
    let (g, f) = crate::gen::canonical_acap(list, ctx)?;
    Element::gen(g)?.scale_mono(&f, ctx)
}

/// `x^N = x_s^{N_s} ... x_1^{N_1}` as an element (a single monomial).
pub fn x_power(n: &[u32], ctx: &Context) -> Result<Element> {
    let mut m = Monomial::one();
    for (idx, &e) in n.iter().enumerate() {
        if e > 0 {
            m = m.merge(&Monomial::from_gen(GenId::X(idx as u32 + 1), i64::from(e))?)?;
        }
    }
    let _ = ctx;
    Ok(Element::monomial(m, QPoly::one()))
}

/// Check the braiding relation `f g = swap(w_f, w_g) g f` exactly.
pub fn braiding_relation_holds(f: &Element, g: &Element, ctx: &Context) -> Result<bool> {
    let wf = match f.homogeneous_weight(ctx.s())? {
        Some(w) => w,
        None => return Ok(true),
    };
    let wg = match g.homogeneous_weight(ctx.s())? {
        Some(w) => w,
        None => return Ok(true),
    };
    let lhs = f.mul(g, ctx)?;
    let rhs = g.mul(f, ctx)?.scale_mono(&swap_factor(&wf, &wg), ctx)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcoeff::rat_int;

    fn ctx1() -> Context {
        Context::symbolic(1).unwrap()
    }

    #[test]
    fn word_p_x_normal_forms_with_factor() {
        let ctx = ctx1();
        let e =
            Element::normal_form_word(QPoly::one(), &[(GenId::P(1), 1), (GenId::X(1), 1)], &ctx)
                .unwrap();
        // q[2,1] x1 p1: stored as coefficient q[1,2]^-1 on monomial x1*p1
        let m = Monomial::from_gen(GenId::X(1), 1)
            .unwrap()
            .merge(&Monomial::from_gen(GenId::P(1), 1).unwrap())
            .unwrap();
        assert_eq!(e.coeff(&m), QPoly::from_mono(QMono::var(2, 1, 1)));
        assert_eq!(e.num_terms(), 1);
    }

    #[test]
    fn already_ordered_word_is_identity() {
        let ctx = ctx1();
        let e =
            Element::normal_form_word(QPoly::one(), &[(GenId::X(1), 1), (GenId::P(1), 1)], &ctx)
                .unwrap();
        let m = Monomial::from_gen(GenId::X(1), 1)
            .unwrap()
            .merge(&Monomial::from_gen(GenId::P(1), 1).unwrap())
            .unwrap();
        assert_eq!(e.coeff(&m), QPoly::one());
    }

    #[test]
    fn xpxp_word_example() {
        // x p x p = q[2,1] x^2 p^2 at s = 1
        let ctx = ctx1();
        let word = [
            (GenId::X(1), 1),
            (GenId::P(1), 1),
            (GenId::X(1), 1),
            (GenId::P(1), 1),
        ];
        let e = Element::normal_form_word(QPoly::one(), &word, &ctx).unwrap();
        let m = Monomial::from_gen(GenId::X(1), 2)
            .unwrap()
            .merge(&Monomial::from_gen(GenId::P(1), 2).unwrap())
            .unwrap();
        assert_eq!(e.num_terms(), 1);
        assert_eq!(e.coeff(&m), QPoly::from_mono(QMono::var(2, 1, 1)));
    }

    #[test]
    fn mul_by_one_is_identity() {
        let ctx = ctx1();
        let a = Element::normal_form_word(
            QPoly::from_rat(rat_int(3)),
            &[(GenId::P(1), 2), (GenId::X(1), 1)],
            &ctx,
        )
        .unwrap();
        assert_eq!(a.mul(&Element::one(), &ctx).unwrap(), a);
        assert_eq!(Element::one().mul(&a, &ctx).unwrap(), a);
    }

    #[test]
    fn specializing_ones_makes_mul_commutative() {
        let ctx = Context::ones(1).unwrap();
        let a = Element::normal_form_word(QPoly::one(), &[(GenId::P(1), 1)], &ctx).unwrap();
        let b = Element::normal_form_word(QPoly::one(), &[(GenId::X(1), 1)], &ctx).unwrap();
        assert_eq!(a.mul(&b, &ctx).unwrap(), b.mul(&a, &ctx).unwrap());
    }

    #[test]
    fn substitute_identity() {
        let ctx = Context::symbolic(2).unwrap();
        let e =
            Element::normal_form_word(QPoly::one(), &[(GenId::P(1), 1), (GenId::X(2), 2)], &ctx)
                .unwrap();
        let mut map = BTreeMap::new();
        map.insert(GenId::X(2), Element::gen(GenId::X(2)).unwrap());
        assert_eq!(e.substitute(&map, &ctx).unwrap(), e);
    }

    #[test]
    fn substitute_weight_guard_fires() {
        let ctx = Context::symbolic(1).unwrap();
        let e = Element::gen(GenId::X(1)).unwrap();
        let mut map = BTreeMap::new();
        map.insert(GenId::X(1), Element::gen(GenId::P(1)).unwrap());
        assert!(matches!(
            e.substitute(&map, &ctx),
            Err(EngineError::SubstitutionWeight { .. })
        ));
        // relaxed in the all-ones regime
        let ones = Context::ones(1).unwrap();
        assert!(e.substitute(&map, &ones).is_ok());
    }
}
