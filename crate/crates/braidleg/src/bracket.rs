//! The braided Poisson bracket: a bilinear q-biderivation on the algebra,
//! "not divided by the Planck constant".
//!
//! On generators: `<p_i, x_a> = h[a,i]`, `<x_a, p_i> = -q[i,s+a] h[a,i]`,
//! `<p,p> = <x,x> = 0`. On monomials the bracket sums over every pair of a
//! phase-space letter of the left argument and one of the right argument;
//! the braiding factor of a pair is obtained by explicitly transposing the
//! two chosen letters to the front of the concatenated word. Generators
//! other than `p`/`x` pass outward: out of the left argument to the left,
//! out of the right argument to the right.

use crate::context::Context;
use crate::element::Element;
use crate::error::{EngineError, Result};
use crate::gen::GenId;
use crate::monomial::Monomial;
use crate::qcoeff::{QMono, QPoly, Rat};
use crate::weight::swap_factor;

/// One phase-space letter (with multiplicity expanded away).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Letter {
    X(u32),
    P(u32),
}

impl Letter {
    fn xi_index(self, s: usize) -> u32 {
        match self {
            Letter::P(i) => i,
            Letter::X(a) => s as u32 + a,
        }
    }

    fn gen(self) -> GenId {
        match self {
            Letter::X(a) => GenId::X(a),
            Letter::P(i) => GenId::P(i),
        }
    }
}

/// Bracket of a pair of letters: `None` when it vanishes, otherwise the
/// resulting Planck generator with its scalar braiding factor.
fn letter_bracket(a: Letter, b: Letter, s: usize) -> Option<(QPoly, GenId)> {
    match (a, b) {
        (Letter::P(i), Letter::X(al)) => Some((QPoly::one(), GenId::H(al, i))),
        (Letter::X(al), Letter::P(i)) => {
            // <x_a, p_i> = -q[i, s+a] h[a,i]
            let q = QMono::var(i, s as u32 + al, 1);
            Some((
                QPoly::from_mono_rat(q, -Rat::from_integer(1.into())),
                GenId::H(al, i),
            ))
        }
        _ => None,
    }
}

type RestWord = Vec<(GenId, i64)>;

/// Split a canonical monomial into its phase-space letters (left-to-right
/// canonical order, exponents expanded) and the residual non-phase word.
fn split_letters(m: &Monomial) -> Result<(Vec<Letter>, RestWord)> {
    let mut letters = Vec::new();
    let mut rest = Vec::new();
    for (g, e) in m.word() {
        match g {
            GenId::X(a) => {
                for _ in 0..e {
                    letters.push(Letter::X(a));
                }
            }
            GenId::P(i) => {
                for _ in 0..e {
                    letters.push(Letter::P(i));
                }
            }
            other => rest.push((other, e)),
        }
    }
    Ok((letters, rest))
}

/// Factor for moving the `u`-th letter of the left word to the very front
/// and the `v`-th letter of the right word to the second position: each
/// adjacent transposition that carries letter `c` leftward past letter `d`
/// contributes `q[c', d']` in the phase-space indices.
fn front_factor(left: &[Letter], u: usize, right: &[Letter], v: usize, s: usize) -> QMono {
    let mut f = QMono::one();
    let cu = left[u].xi_index(s);
    for d in left.iter().take(u) {
        f.mul_var(cu, d.xi_index(s), 1);
    }
    let cv = right[v].xi_index(s);
    for d in right.iter().take(v) {
        f.mul_var(cv, d.xi_index(s), 1);
    }
    for (t, d) in left.iter().enumerate() {
        if t != u {
            f.mul_var(cv, d.xi_index(s), 1);
        }
    }
    f
}

fn word_without(letters: &[Letter], skip: usize) -> Vec<(GenId, i64)> {
    letters
        .iter()
        .enumerate()
        .filter(|(t, _)| *t != skip)
        .map(|(_, l)| (l.gen(), 1))
        .collect()
}

/// Bracket of two normal-formed elements.
pub fn bracket(f: &Element, g: &Element, ctx: &Context) -> Result<Element> {
    let mut out = Element::zero();
    for (mf, cf) in f.terms() {
        for (mg, cg) in g.terms() {
            out = out.add(&bracket_monomials(cf, mf, cg, mg, ctx)?);
        }
    }
    Ok(out)
}

fn bracket_monomials(
    cf: &QPoly,
    mf: &Monomial,
    cg: &QPoly,
    mg: &Monomial,
    ctx: &Context,
) -> Result<Element> {
    let s = ctx.s();
    let (lf, rest_f) = split_letters(mf)?;
    let (lg, rest_g) = split_letters(mg)?;
    if lf.is_empty() || lg.is_empty() {
        return Ok(Element::zero());
    }

    // Pull the non-phase letters of the left argument out to the left:
    // f = C * rest_f * letters_f with C the swap factor of the two blocks.
    let rest_f_mono = rest_f.iter().try_fold(Monomial::one(), |m, (g, e)| {
        m.merge(&Monomial::from_gen(g.clone(), *e)?)
    })?;
    let letters_weight = lf.iter().fold(crate::weight::BraidWeight::zero(s), |w, l| {
        w.add(&l.gen().weight(s))
    });
    let pullout = swap_factor(&letters_weight, &rest_f_mono.weight(s));

    let mut out = Element::zero();
    for (u, &a) in lf.iter().enumerate() {
        for (v, &b) in lg.iter().enumerate() {
            let Some((scalar, h)) = letter_bracket(a, b, s) else {
                continue;
            };
            let q = front_factor(&lf, u, &lg, v, s);
            let mut word: Vec<(GenId, i64)> = Vec::new();
            word.extend(rest_f.iter().cloned());
            word.push((h, 1));
            word.extend(word_without(&lf, u));
            word.extend(word_without(&lg, v));
            word.extend(rest_g.iter().cloned());
            let coeff = cf.mul(cg).mul(&scalar).mul_mono(&q).mul_mono(&pullout);
            out = out.add(&Element::normal_form_word(coeff, &word, ctx)?);
        }
    }
    Ok(out)
}

/// The braided Jacobi sum
/// `<F,<G,H>> + q_{G,F} q_{H,F} <G,<H,F>> + q_{H,F} q_{H,G} <H,<F,G>>`
/// for monomial arguments in the phase-space and Planck generators.
/// The contract is that it normal-forms to zero.
pub fn q_jacobi_sum(f: &Element, g: &Element, h: &Element, ctx: &Context) -> Result<Element> {
    let s = ctx.s();
    let wf = single_monomial_weight(f, s)?;
    let wg = single_monomial_weight(g, s)?;
    let wh = single_monomial_weight(h, s)?;

    let q_gf = swap_factor(&wf, &wg); // F G = q_{G,F} G F
    let q_hf = swap_factor(&wf, &wh);
    let q_hg = swap_factor(&wg, &wh);

    let t1 = bracket(f, &bracket(g, h, ctx)?, ctx)?;
    let t2 = bracket(g, &bracket(h, f, ctx)?, ctx)?.scale_mono(&q_gf.mul(&q_hf), ctx)?;
    let t3 = bracket(h, &bracket(f, g, ctx)?, ctx)?.scale_mono(&q_hf.mul(&q_hg), ctx)?;
    Ok(t1.add(&t2).add(&t3))
}

fn single_monomial_weight(e: &Element, s: usize) -> Result<crate::weight::BraidWeight> {
    if e.num_terms() != 1 {
        return Err(EngineError::Validation(
            "Jacobi check takes monomial arguments".into(),
        ));
    }
    let (m, _) = e.terms().next().unwrap();
    for (g, _) in m.iter() {
        match g {
            GenId::X(_) | GenId::P(_) | GenId::H(..) => {}
            other => {
                return Err(EngineError::Validation(format!(
                    "Jacobi check restricted to phase-space and Planck generators, found {other}"
                )))
            }
        }
    }
    Ok(m.weight(s))
}
