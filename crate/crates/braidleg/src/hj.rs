//! The braided Hamilton-Jacobi series: action coefficients `b_N^(m)` stepped
//! in time order by expanding `H(x, <p, S^t(x)>)` and extracting the
//! `t^m x^N` term.
//!
//! Time is a commutative bookkeeping index (the layer number), never a
//! generator. Products are truncated in coordinate degree; the internal
//! working degree exceeds the reported one by the number of time steps, so
//! every reported coefficient is exact. Layers depend sequentially on
//! earlier ones; the coefficients within a layer are independent.

use std::collections::BTreeMap;

use num_traits::One;

use crate::bracket::bracket;
use crate::context::Context;
use crate::element::{x_power, Element};
use crate::error::{EngineError, Result};
use crate::gen::GenId;
use crate::qcoeff::{factorial, multi_factorial, Rat};
use crate::weight::{mi_total, BraidWeight, MultiIndex};

/// One Hamiltonian coefficient: either the free generator `T[K;L]` scaled
/// by a rational, or a numeric specialization.
#[derive(Clone, Debug, PartialEq)]
pub enum HamValue {
    Symbolic(Rat),
    Numeric(Rat),
}

/// Degree-bounded Hamiltonian table `H = sum x^K p^L / (K! L!) T_{K,L}`.
#[derive(Clone, Debug, Default)]
pub struct HamTable {
    pub entries: BTreeMap<(MultiIndex, MultiIndex), HamValue>,
}

impl HamTable {
    pub fn new() -> Self {
        HamTable::default()
    }

    pub fn insert(&mut self, k: MultiIndex, l: MultiIndex, v: HamValue) {
        self.entries.insert((k, l), v);
    }

    pub fn validate(&self, ctx: &Context) -> Result<()> {
        for (k, l) in self.entries.keys() {
            ctx.check_multi_index(k)?;
            ctx.check_multi_index(l)?;
        }
        Ok(())
    }

    /// The coefficient as an element: `scale * T[K;L]` or a scalar.
    fn coeff_element(&self, k: &MultiIndex, l: &MultiIndex) -> Result<Element> {
        match self.entries.get(&(k.clone(), l.clone())) {
            Some(HamValue::Symbolic(scale)) => {
                Ok(Element::gen(GenId::TCoef(k.clone(), l.clone()))?.scale_rat(scale))
            }
            Some(HamValue::Numeric(v)) => Ok(Element::scalar(v.clone())),
            None => Ok(Element::zero()),
        }
    }

    /// The whole Hamiltonian as a single element
    /// `sum_{K,L} x^K p^L / (K! L!) T_{K,L}`.
    pub fn as_element(&self, ctx: &Context) -> Result<Element> {
        let mut acc = Element::zero();
        for (k, l) in self.entries.keys() {
            let norm = (multi_factorial(k) * multi_factorial(l)).recip();
            let mut term = x_power(k, ctx)?;
            // p^L = p_s^{L_s} ... p_1^{L_1}
            for i in (1..=ctx.s()).rev() {
                let e = l[i - 1];
                if e > 0 {
                    term = term.mul(&Element::gen_pow(GenId::P(i as u32), i64::from(e))?, ctx)?;
                }
            }
            term = term.mul(&self.coeff_element(k, l)?, ctx)?;
            acc = acc.add(&term.scale_rat(&norm));
        }
        Ok(acc)
    }
}

/// Time-layered table of action coefficients.
#[derive(Clone, Debug)]
pub struct HJSeries {
    /// `(m, N) -> b_N^(m)`; populated through the working degree.
    pub coeffs: BTreeMap<(u32, MultiIndex), Element>,
    pub s: usize,
    pub mmax: u32,
    /// Reported coordinate-degree bound; coefficients with `|N|` up to this
    /// bound are exact.
    pub deg: u32,
    /// Internal truncation bound (`deg + mmax`).
    pub work_deg: u32,
    /// Highest computed time order.
    pub cur: u32,
}

impl HJSeries {
    pub fn coeff(&self, m: u32, n: &[u32]) -> Element {
        self.coeffs
            .get(&(m, n.to_vec()))
            .cloned()
            .unwrap_or_else(Element::zero)
    }

    /// The reported coefficients: `|N| <= deg`, sorted by `(m, N)`.
    pub fn reported(&self) -> impl Iterator<Item = (&(u32, MultiIndex), &Element)> {
        self.coeffs
            .iter()
            .filter(move |((_, n), _)| mi_total(n) <= self.deg)
    }

    /// The t-layer `m` as a sum `sum_N x^N / N! b_N^(m)`.
    fn layer_element(&self, m: u32, ctx: &Context) -> Result<Element> {
        let mut acc = Element::zero();
        for ((lm, n), b) in &self.coeffs {
            if *lm != m {
                continue;
            }
            let xn = x_power(n, ctx)?;
            let term = xn.mul(b, ctx)?.scale_rat(&multi_factorial(n).recip());
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

/// Evolve a seed layer: iterate the coefficient recursion up to `mmax`.
///
/// Seeds map `N -> b_N^(0)`; in a braided context each seed must be
/// weight-homogeneous of weight `(-N, 0)`.
pub fn hj_evolve(
    seed: &BTreeMap<MultiIndex, Element>,
    ham: &HamTable,
    mmax: u32,
    deg: u32,
    ctx: &Context,
) -> Result<HJSeries> {
    ham.validate(ctx)?;
    let s = ctx.s();
    let trivial = ctx.braiding_trivial();
    let mut series = HJSeries {
        coeffs: BTreeMap::new(),
        s,
        mmax,
        deg,
        work_deg: deg + mmax,
        cur: 0,
    };
    for (n, e) in seed {
        ctx.check_multi_index(n)?;
        if !trivial {
            let want = seed_weight(n, s);
            if !e.is_homogeneous_of(&want, s) {
                return Err(EngineError::Validation(format!(
                    "seed coefficient for N = ({}) is not homogeneous of weight x^-N",
                    crate::weight::mi_string(n)
                )));
            }
        }
        if !e.is_zero() {
            series.coeffs.insert((0, n.clone()), e.clone());
        }
    }
    for _ in 0..mmax {
        hj_step(&mut series, ham, ctx)?;
    }
    Ok(series)
}

fn seed_weight(n: &[u32], s: usize) -> BraidWeight {
    let mut w = BraidWeight::zero(s);
    for (slot, &v) in w.x.iter_mut().zip(n) {
        *slot = -i64::from(v);
    }
    w
}

/// Compute layer `cur + 1` from the layers `<= cur`.
///
/// The `t^m` slice of `H(x, <p, S^t(x)>)` is a braided scalar; every
/// monomial therefore factors as `x^N * R_N` with `R_N` of weight
/// `(-N, 0)`. A monomial of nonzero weight, or a residual coordinate letter
/// after stripping, signals a braiding bug and aborts with an
/// internal-consistency error.
pub fn hj_step(series: &mut HJSeries, ham: &HamTable, ctx: &Context) -> Result<()> {
    let s = ctx.s();
    let m = series.cur;
    if m >= series.mmax {
        return Err(EngineError::Truncation(format!(
            "layer {} beyond the configured time order {}",
            m + 1,
            series.mmax
        )));
    }
    let xcap = u64::from(series.work_deg);

    // d[i][t] = [t^t] of <p_i, S^t(x)>, i.e. the bracket of p_i with the
    // t-layer divided by t! (the graded entries carry the series
    // normalization)
    let mut d: Vec<Vec<Element>> = Vec::with_capacity(s);
    for i in 1..=s {
        let p = Element::gen(GenId::P(i as u32))?;
        let mut per_t = Vec::with_capacity(m as usize + 1);
        for t in 0..=m {
            let layer = series.layer_element(t, ctx)?;
            let norm = factorial(u64::from(t)).recip();
            per_t.push(
                bracket(&p, &layer, ctx)?
                    .truncate_x_degree(xcap)
                    .scale_rat(&norm),
            );
        }
        d.push(per_t);
    }

    // H(x, d) restricted to the t^m slice
    let mut hm = Element::zero();
    for (k, l) in ham.entries.keys() {
        let norm = (multi_factorial(k) * multi_factorial(l)).recip();
        // graded product over t: start with x^K, multiply the bracket
        // series in descending letter order (p^L convention), then T.
        let mut graded: Vec<Element> = vec![x_power(k, ctx)?];
        for i in (1..=s).rev() {
            for _ in 0..l[i - 1] {
                graded = graded_mul_t(&graded, &d[i - 1], m, xcap, ctx)?;
            }
        }
        if let Some(slice) = graded.into_iter().nth(m as usize) {
            let term = slice.mul(&ham.coeff_element(k, l)?, ctx)?;
            hm = hm.add(&term.scale_rat(&norm));
        }
    }

    // extract: b_N^(m+1) = -m! N! x^-N [t^m x^N] H
    //
    // The slice is a braided scalar whenever the coefficients carry their
    // assigned weights; with numerically specialized coefficients the weight
    // bookkeeping is only meaningful in the all-ones regime, where the check
    // is vacuous and skipped.
    let check_weights = !ctx.braiding_trivial();
    let mut grouped: BTreeMap<MultiIndex, Element> = BTreeMap::new();
    for (mono, coeff) in hm.terms() {
        if check_weights && !mono.weight(s).is_zero() {
            return Err(EngineError::InternalConsistency(format!(
                "Hamilton-Jacobi slice contains the non-scalar monomial {mono}"
            )));
        }
        let (n, rest) = mono.split_x_prefix(s);
        if rest.contains_x() {
            return Err(EngineError::InternalConsistency(format!(
                "residual coordinate letters after stripping in {mono}"
            )));
        }
        let slot = grouped.entry(n).or_insert_with(Element::zero);
        *slot = slot.add(&Element::monomial(rest, coeff.clone()));
    }
    let mfac = factorial(u64::from(m));
    for (n, e) in grouped {
        if mi_total(&n) > series.work_deg {
            continue;
        }
        let b = e.scale_rat(&(-(mfac.clone() * multi_factorial(&n))));
        if !b.is_zero() {
            series.coeffs.insert((m + 1, n), b);
        }
    }
    series.cur = m + 1;
    Ok(())
}

/// Convolve two t-graded element lists, keeping orders `<= tcap` and
/// coordinate degrees `<= xcap`.
fn graded_mul_t(
    a: &[Element],
    b: &[Element],
    tcap: u32,
    xcap: u64,
    ctx: &Context,
) -> Result<Vec<Element>> {
    let len = (tcap as usize + 1).min(a.len() + b.len());
    let mut out = vec![Element::zero(); len];
    for (ta, ea) in a.iter().enumerate() {
        if ea.is_zero() {
            continue;
        }
        for (tb, eb) in b.iter().enumerate() {
            if ta + tb >= len || eb.is_zero() {
                continue;
            }
            let prod = ea.mul(eb, ctx)?.truncate_x_degree(xcap);
            out[ta + tb] = out[ta + tb].add(&prod);
        }
    }
    Ok(out)
}

/// A braiding violation found by a verifier.
#[derive(Clone, Debug)]
pub struct Violation {
    pub what: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.what)
    }
}

/// Check that every reported coefficient commutes with each phase-space and
/// Planck generator exactly as its assigned weight `(-N, 0)` dictates:
/// `g b = swap(w_g, (-N,0)) b g`. The contract is an empty report.
pub fn verify_hj_braiding(series: &HJSeries, ctx: &Context) -> Result<Vec<Violation>> {
    let s = ctx.s();
    let mut violations = Vec::new();
    let mut gens: Vec<GenId> = Vec::new();
    for k in 1..=s as u32 {
        gens.push(GenId::P(k));
        gens.push(GenId::X(k));
        for i in 1..=s as u32 {
            gens.push(GenId::H(k, i));
        }
    }
    for ((m, n), b) in series.reported() {
        let want = seed_weight(n, s);
        if !b.is_homogeneous_of(&want, s) {
            violations.push(Violation {
                what: format!(
                    "b[{m};{}] is not weight-homogeneous of x^-N",
                    crate::weight::mi_string(n)
                ),
            });
            continue;
        }
        for g in &gens {
            let ge = Element::gen(g.clone())?;
            let lhs = ge.mul(b, ctx)?;
            let factor = crate::weight::swap_factor(&g.weight(s), &want);
            let rhs = b.mul(&ge, ctx)?.scale_mono(&factor, ctx)?;
            if lhs != rhs {
                violations.push(Violation {
                    what: format!(
                        "braiding of {g} with b[{m};{}] deviates from the weight rule",
                        crate::weight::mi_string(n)
                    ),
                });
            }
        }
    }
    Ok(violations)
}

/// Convenience constructor for the common polynomial seed given by a
/// coefficient table of elements.
pub fn seed_from_exprs(entries: &[(MultiIndex, Element)]) -> BTreeMap<MultiIndex, Element> {
    let mut out = BTreeMap::new();
    for (n, e) in entries {
        if !e.is_zero() {
            out.insert(n.clone(), e.clone());
        }
    }
    out
}

/// Harmonic-oscillator table `H = p^2/2 + x^2/2` at `s = 1`
/// (`T[0;2] = T[2;0] = 1`), numeric.
pub fn harmonic_table_1d() -> HamTable {
    let mut t = HamTable::new();
    t.insert(vec![0], vec![2], HamValue::Numeric(Rat::one()));
    t.insert(vec![2], vec![0], HamValue::Numeric(Rat::one()));
    t
}
