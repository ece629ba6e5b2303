//! The braided Hamiltonian coefficient flow: evolve the coefficient tables
//! of the momentum and coordinate generating series
//!
//! ```text
//! dP_i/dt = <H, p_i>,   dX_a/dt = <H, x_a>,
//! ```
//!
//! with the right-hand sides evaluated at `x -> X(t,eps)`, `p -> P(t,eps)`.
//! Both `t` and the `eps` multi-index are commutative bookkeeping;
//! coefficients live in the algebra generated by the flow seeds, the Planck
//! generators and the Hamiltonian coefficients.

use std::collections::BTreeMap;

use crate::bracket::bracket;
use crate::context::Context;
use crate::element::{braiding_relation_holds, Element};
use crate::error::{EngineError, Result};
use crate::gen::GenId;
use crate::hj::{HamTable, Violation};
use crate::qcoeff::{factorial, multi_factorial};
use crate::weight::{mi_total, BraidWeight, MultiIndex};

/// Coefficient tables of the evolved series.
#[derive(Clone, Debug)]
pub struct FlowSeries {
    /// `(i, n, M) -> P_{i,M}^(n)`
    pub p: BTreeMap<(u32, u32, MultiIndex), Element>,
    /// `(a, m, N) -> X_{a,N}^(m)`
    pub x: BTreeMap<(u32, u32, MultiIndex), Element>,
    pub s: usize,
    pub nmax: u32,
    pub deg: u32,
}

impl FlowSeries {
    pub fn pcoeff(&self, i: u32, n: u32, m: &[u32]) -> Element {
        self.p
            .get(&(i, n, m.to_vec()))
            .cloned()
            .unwrap_or_else(Element::zero)
    }

    pub fn xcoeff(&self, a: u32, m: u32, n: &[u32]) -> Element {
        self.x
            .get(&(a, m, n.to_vec()))
            .cloned()
            .unwrap_or_else(Element::zero)
    }
}

/// Graded series in `(t, eps)`: component elements keyed by the time order
/// and the eps multi-index, representing `sum t^n eps^M / (n! M!) c_{n,M}`
/// with the normalization factored *into* the stored component, i.e. the
/// stored value at `(n, M)` is `c_{n,M} / (n! M!)`.
type Graded = BTreeMap<(u32, MultiIndex), Element>;

fn graded_mul(a: &Graded, b: &Graded, tcap: u32, dcap: u32, ctx: &Context) -> Result<Graded> {
    let mut out: Graded = BTreeMap::new();
    for ((ta, ma), ea) in a {
        for ((tb, mb), eb) in b {
            let t = ta + tb;
            if t > tcap {
                continue;
            }
            let m: MultiIndex = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            if mi_total(&m) > dcap {
                continue;
            }
            let prod = ea.mul(eb, ctx)?;
            if prod.is_zero() {
                continue;
            }
            let slot = out.entry((t, m)).or_insert_with(Element::zero);
            *slot = slot.add(&prod);
        }
    }
    out.retain(|_, e| !e.is_zero());
    Ok(out)
}

fn graded_const(e: Element) -> Graded {
    let mut g = Graded::new();
    if !e.is_zero() {
        g.insert((0, Vec::new()), e);
    }
    g
}

/// Substitute the coordinate and momentum letters of `e` by graded series,
/// truncating at time order `tcap` and eps degree `dcap`. Letters other
/// than `x`/`p` stay in place as constants of the grading.
fn graded_substitute(
    e: &Element,
    xser: &[Graded],
    pser: &[Graded],
    tcap: u32,
    dcap: u32,
    s: usize,
    ctx: &Context,
) -> Result<Graded> {
    // the zero-length eps index of constants is normalized to length s here
    let zero_eps = vec![0u32; s];
    let norm_keys = |g: Graded| -> Graded {
        g.into_iter()
            .map(|((t, m), e)| {
                let m = if m.is_empty() { zero_eps.clone() } else { m };
                ((t, m), e)
            })
            .collect()
    };
    let mut out: Graded = BTreeMap::new();
    for (mono, coeff) in e.terms() {
        let mut acc = norm_keys(graded_const(Element::from_qpoly(coeff.clone())));
        for (g, exp) in mono.word() {
            let factor: Graded = match &g {
                GenId::X(a) => xser[(*a - 1) as usize].clone(),
                GenId::P(i) => pser[(*i - 1) as usize].clone(),
                _ => norm_keys(graded_const(Element::gen_pow(g.clone(), exp)?)),
            };
            let reps = match g {
                GenId::X(_) | GenId::P(_) => exp,
                _ => 1,
            };
            if matches!(g, GenId::X(_) | GenId::P(_)) && exp < 0 {
                return Err(EngineError::Validation(
                    "cannot substitute into a negative phase-space power".into(),
                ));
            }
            for _ in 0..reps {
                acc = graded_mul(&acc, &factor, tcap, dcap, ctx)?;
            }
        }
        for (k, v) in acc {
            let slot = out.entry(k).or_insert_with(Element::zero);
            *slot = slot.add(&v);
        }
    }
    out.retain(|_, e| !e.is_zero());
    Ok(out)
}

/// Evolve the flow from the `n = 0` seed tables. Seeds map `(index, M)` to
/// the coefficient element; in a braided context a momentum seed must have
/// weight `p^{1_i}` and a coordinate seed `x^{1_a}`.
pub fn ham_evolve(
    seed_p: &BTreeMap<(u32, MultiIndex), Element>,
    seed_x: &BTreeMap<(u32, MultiIndex), Element>,
    ham: &HamTable,
    nmax: u32,
    deg: u32,
    ctx: &Context,
) -> Result<FlowSeries> {
    ham.validate(ctx)?;
    let s = ctx.s();
    let trivial = ctx.braiding_trivial();
    let mut flow = FlowSeries {
        p: BTreeMap::new(),
        x: BTreeMap::new(),
        s,
        nmax,
        deg,
    };
    for ((i, m), e) in seed_p {
        ctx.check_s_index(*i)?;
        ctx.check_multi_index(m)?;
        if !trivial && !e.is_homogeneous_of(&GenId::P(*i).weight(s), s) {
            return Err(EngineError::Validation(format!(
                "momentum seed ({i}, {m:?}) does not behave like p{i}"
            )));
        }
        if !e.is_zero() {
            flow.p.insert((*i, 0, m.clone()), e.clone());
        }
    }
    for ((a, n), e) in seed_x {
        ctx.check_s_index(*a)?;
        ctx.check_multi_index(n)?;
        if !trivial && !e.is_homogeneous_of(&GenId::X(*a).weight(s), s) {
            return Err(EngineError::Validation(format!(
                "coordinate seed ({a}, {n:?}) does not behave like x{a}"
            )));
        }
        if !e.is_zero() {
            flow.x.insert((*a, 0, n.clone()), e.clone());
        }
    }

    // right-hand sides <H, p_i> and <H, x_a>
    let h = ham.as_element(ctx)?;
    let mut rhs_p = Vec::with_capacity(s);
    let mut rhs_x = Vec::with_capacity(s);
    for k in 1..=s as u32 {
        rhs_p.push(bracket(&h, &Element::gen(GenId::P(k))?, ctx)?);
        rhs_x.push(bracket(&h, &Element::gen(GenId::X(k))?, ctx)?);
    }

    for n in 0..nmax {
        // assemble the graded series from the layers computed so far
        let mut xser = Vec::with_capacity(s);
        let mut pser = Vec::with_capacity(s);
        for k in 1..=s as u32 {
            let mut gx = Graded::new();
            let mut gp = Graded::new();
            for ((idx, t, m), e) in &flow.x {
                if *idx == k && *t <= n {
                    let norm = (factorial(u64::from(*t)) * multi_factorial(m)).recip();
                    gx.insert((*t, m.clone()), e.scale_rat(&norm));
                }
            }
            for ((idx, t, m), e) in &flow.p {
                if *idx == k && *t <= n {
                    let norm = (factorial(u64::from(*t)) * multi_factorial(m)).recip();
                    gp.insert((*t, m.clone()), e.scale_rat(&norm));
                }
            }
            xser.push(gx);
            pser.push(gp);
        }
        // layer n+1 from the t^n slice of the substituted right-hand sides
        let scale = factorial(u64::from(n));
        for k in 1..=s as u32 {
            let subbed = graded_substitute(&rhs_p[(k - 1) as usize], &xser, &pser, n, deg, s, ctx)?;
            for ((t, m), e) in subbed {
                if t == n {
                    let v = e.scale_rat(&(scale.clone() * multi_factorial(&m)));
                    if !v.is_zero() {
                        flow.p.insert((k, n + 1, m), v);
                    }
                }
            }
            let subbed = graded_substitute(&rhs_x[(k - 1) as usize], &xser, &pser, n, deg, s, ctx)?;
            for ((t, m), e) in subbed {
                if t == n {
                    let v = e.scale_rat(&(scale.clone() * multi_factorial(&m)));
                    if !v.is_zero() {
                        flow.x.insert((k, n + 1, m), v);
                    }
                }
            }
        }
    }
    Ok(flow)
}

/// Verify that all stored coefficients satisfy the pairwise braiding
/// relations dictated by their assigned weights (`P` behaves like `p_i`,
/// `X` like `x_a`), among themselves and against the Planck and Hamiltonian
/// generators. Contract: an empty violation list.
pub fn verify_flow_braiding(
    flow: &FlowSeries,
    ham: &HamTable,
    ctx: &Context,
) -> Result<Vec<Violation>> {
    let s = flow.s;
    let mut violations = Vec::new();

    let mut entries: Vec<(String, BraidWeight, Element)> = Vec::new();
    for ((i, n, m), e) in &flow.p {
        entries.push((
            format!("P[{i};{};{n}]", crate::weight::mi_string(m)),
            GenId::P(*i).weight(s),
            e.clone(),
        ));
    }
    for ((a, m, n), e) in &flow.x {
        entries.push((
            format!("X[{a};{};{m}]", crate::weight::mi_string(n)),
            GenId::X(*a).weight(s),
            e.clone(),
        ));
    }

    // weight homogeneity first
    for (name, w, e) in &entries {
        if !e.is_homogeneous_of(w, s) {
            violations.push(Violation {
                what: format!("{name} is not homogeneous of its assigned weight"),
            });
        }
    }

    // pairwise relations among the coefficients
    for (ia, (na, _, ea)) in entries.iter().enumerate() {
        for (nb, _, eb) in entries.iter().skip(ia) {
            if !braiding_relation_holds(ea, eb, ctx)? {
                violations.push(Violation {
                    what: format!("braiding relation fails between {na} and {nb}"),
                });
            }
        }
    }

    // against the Planck generators and the Hamiltonian coefficients
    let mut others: Vec<Element> = Vec::new();
    for a in 1..=s as u32 {
        for i in 1..=s as u32 {
            others.push(Element::gen(GenId::H(a, i))?);
        }
    }
    for (k, l) in ham.entries.keys() {
        others.push(Element::gen(GenId::TCoef(k.clone(), l.clone()))?);
    }
    for (name, _, e) in &entries {
        for o in &others {
            if !braiding_relation_holds(e, o, ctx)? {
                violations.push(Violation {
                    what: format!("braiding relation fails between {name} and a fixed generator"),
                });
            }
        }
    }
    Ok(violations)
}
