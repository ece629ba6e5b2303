//! Property tests: ring laws of the coefficient arithmetic, swap-factor
//! algebra, schedule independence of the normal form, associativity of the
//! braided product, parse/print round trips, and the classical shadow of
//! the bracket against a commutative differentiation oracle.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use braidleg::classical::CPoly;
use braidleg::context::Context;
use braidleg::element::Element;
use braidleg::gen::GenId;
use braidleg::qcoeff::{rat_int, Assignment, QMono, QPoly, Rat};
use braidleg::verify::randomized_normal_form;
use braidleg::weight::{swap_factor, BraidWeight};
use braidleg::Monomial;

fn arb_qmono() -> impl Strategy<Value = QMono> {
    prop::collection::vec(((1u32..=5, 1u32..=6), -3i64..=3), 0..4).prop_map(|entries| {
        let mut m = QMono::one();
        for ((i, d), e) in entries {
            let j = i + d; // guarantees i < j <= 11
            m.mul_var(i, j, e);
        }
        m
    })
}

fn arb_qpoly() -> impl Strategy<Value = QPoly> {
    prop::collection::vec((arb_qmono(), -6i64..=6), 0..4).prop_map(|terms| {
        let mut p = QPoly::zero();
        for (m, c) in terms {
            p = p.add(&QPoly::from_mono_rat(m, rat_int(c)));
        }
        p
    })
}

fn arb_weight(s: usize) -> impl Strategy<Value = BraidWeight> {
    (
        prop::collection::vec(-3i64..=3, s),
        prop::collection::vec(-3i64..=3, s),
    )
        .prop_map(|(x, p)| BraidWeight { x, p })
}

proptest! {
    #[test]
    fn qpoly_ring_laws(a in arb_qpoly(), b in arb_qpoly(), c in arb_qpoly()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
    }

    #[test]
    fn qpoly_specialization_is_a_ring_homomorphism(a in arb_qpoly(), b in arb_qpoly()) {
        let ones = Assignment::AllOnes;
        let lhs = a.mul(&b).specialize(&ones).unwrap();
        let rhs = a.specialize(&ones).unwrap() * b.specialize(&ones).unwrap();
        prop_assert_eq!(lhs, rhs);
        let lhs = a.add(&b).specialize(&ones).unwrap();
        let rhs = a.specialize(&ones).unwrap() + b.specialize(&ones).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn swap_factor_group_laws(l in arb_weight(2), r in arb_weight(2), extra in arb_weight(2)) {
        prop_assert!(swap_factor(&l, &r).mul(&swap_factor(&r, &l)).is_one());
        prop_assert!(swap_factor(&l, &l).is_one());
        let lhs = swap_factor(&l.add(&extra), &r);
        let rhs = swap_factor(&l, &r).mul(&swap_factor(&extra, &r));
        prop_assert_eq!(lhs, rhs);
        // the zero weight commutes with everything
        prop_assert!(swap_factor(&BraidWeight::zero(2), &r).is_one());
    }
}

fn arb_word(s: u32) -> impl Strategy<Value = Vec<(GenId, i64)>> {
    let letter = prop_oneof![
        (1..=s).prop_map(GenId::X),
        (1..=s).prop_map(GenId::P),
        (1..=s, 1..=s).prop_map(|(a, i)| GenId::H(a, i)),
        (1..=s).prop_map(GenId::Kappa),
        (1..=s).prop_map(GenId::Theta),
    ];
    prop::collection::vec(
        (letter, prop_oneof![Just(1i64), Just(2i64), Just(-1i64)]),
        1..6,
    )
    .prop_map(|word| {
        word.into_iter()
            .map(|(g, e)| {
                let e = if e < 0 && !g.invertible() { 1 } else { e };
                (g, e)
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_schedule_independent(word in arb_word(2), seed in 0u64..1000) {
        let ctx = Context::symbolic(2).unwrap();
        let engine = Element::normal_form_word(QPoly::one(), &word, &ctx).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let oracle = randomized_normal_form(&word, &ctx, &mut rng).unwrap();
        prop_assert_eq!(engine, oracle);
    }

    #[test]
    fn product_satisfies_weight_swap_rule(wa in arb_word(2), wb in arb_word(2)) {
        // f g = swap(w_f, w_g) g f for monomials
        let ctx = Context::symbolic(2).unwrap();
        let f = Element::normal_form_word(QPoly::one(), &wa, &ctx).unwrap();
        let g = Element::normal_form_word(QPoly::one(), &wb, &ctx).unwrap();
        prop_assert!(braidleg::element::braiding_relation_holds(&f, &g, &ctx).unwrap());
    }

    #[test]
    fn printer_parser_roundtrip(wa in arb_word(2), c in -5i64..=5, q in arb_qmono()) {
        let ctx = Context::symbolic(2).unwrap();
        // clamp the braiding variables into range for s = 2
        let mut qm = QMono::one();
        for (pair, e) in q.exponents() {
            if pair.hi <= 4 {
                qm.mul_var(pair.lo, pair.hi, *e);
            }
        }
        let coeff = QPoly::from_mono_rat(qm, rat_int(if c == 0 { 1 } else { c }));
        let e = Element::normal_form_word(coeff, &wa, &ctx).unwrap();
        let printed = e.to_string();
        if !e.is_zero() {
            let back = braidleg::parse::parse_element(&printed, &ctx).unwrap();
            prop_assert_eq!(e, back);
        }
    }
}

#[test]
fn braided_product_associative_on_random_triples() {
    // 50 random triples at s = 2, degree <= 3: (a b) c = a (b c) exactly
    let ctx = Context::symbolic(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20240817);
    use rand::Rng;
    let mut random_elem = |rng: &mut ChaCha8Rng| -> Element {
        let mut acc = Element::zero();
        for _ in 0..rng.gen_range(1..=3) {
            let mut word = Vec::new();
            for _ in 0..rng.gen_range(1..=3usize) {
                let idx = rng.gen_range(1..=2u32);
                word.push(match rng.gen_range(0..4) {
                    0 => (GenId::X(idx), 1),
                    1 => (GenId::P(idx), 1),
                    2 => (GenId::H(idx, rng.gen_range(1..=2u32)), 1),
                    _ => (GenId::Kappa(idx), -1),
                });
            }
            let coeff = QPoly::from_rat(rat_int(rng.gen_range(-3i64..=3)));
            acc = acc.add(&Element::normal_form_word(coeff, &word, &ctx).unwrap());
        }
        acc
    };
    for case in 0..50 {
        let a = random_elem(&mut rng);
        let b = random_elem(&mut rng);
        let c = random_elem(&mut rng);
        let lhs = a.mul(&b, &ctx).unwrap().mul(&c, &ctx).unwrap();
        let rhs = a.mul(&b.mul(&c, &ctx).unwrap(), &ctx).unwrap();
        assert_eq!(lhs, rhs, "associativity failed on triple {case}");
    }
}

/// Commutative differentiation oracle for the bracket's classical shadow:
/// with all braidings 1 and the Planck pairing the identity, the bracket is
/// `<f,g> = sum_i (df/dp_i dg/dx_i - df/dx_i dg/dp_i)`.
#[test]
fn bracket_matches_commutative_poisson_oracle() {
    let s = 2usize;
    let ctx = Context::ones(s).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    use rand::Rng;

    // commutative variables: 0..s = p's, s..2s = x's
    let nv = 2 * s;
    let mut random_poly = |rng: &mut ChaCha8Rng| -> CPoly {
        let mut p = CPoly::zero(nv);
        for _ in 0..rng.gen_range(1..=4) {
            let mut e = vec![0u32; nv];
            for _ in 0..rng.gen_range(0..=3usize) {
                e[rng.gen_range(0..nv)] += 1;
            }
            p.add_term(e, rat_int(rng.gen_range(-3i64..=3)));
        }
        p
    };

    let to_element = |p: &CPoly, ctx: &Context| -> Element {
        let mut acc = Element::zero();
        for (e, r) in p.terms() {
            let mut word = Vec::new();
            for a in (1..=s).rev() {
                if e[s + a - 1] > 0 {
                    word.push((GenId::X(a as u32), i64::from(e[s + a - 1])));
                }
            }
            for i in (1..=s).rev() {
                if e[i - 1] > 0 {
                    word.push((GenId::P(i as u32), i64::from(e[i - 1])));
                }
            }
            acc = acc
                .add(&Element::normal_form_word(QPoly::from_rat(r.clone()), &word, ctx).unwrap());
        }
        acc
    };

    let eval = |e: &Element, point: &[Rat]| -> Rat {
        e.eval_scalar(&Assignment::AllOnes, &|g| match g {
            GenId::H(a, i) => Some(if a == i { rat_int(1) } else { rat_int(0) }),
            GenId::P(i) => Some(point[(*i - 1) as usize].clone()),
            GenId::X(a) => Some(point[s + (*a - 1) as usize].clone()),
            _ => None,
        })
        .unwrap()
    };

    for _case in 0..20 {
        let f = random_poly(&mut rng);
        let g = random_poly(&mut rng);
        let fe = to_element(&f, &ctx);
        let ge = to_element(&g, &ctx);
        let br = braidleg::bracket::bracket(&fe, &ge, &ctx).unwrap();

        let mut oracle = CPoly::zero(nv);
        for i in 0..s {
            let t1 = f.deriv(i).mul_trunc(&g.deriv(s + i), 40);
            let t2 = f.deriv(s + i).mul_trunc(&g.deriv(i), 40);
            oracle = oracle.add(&t1).sub(&t2);
        }

        // compare at a few sample points
        for k in 0..3i64 {
            let point: Vec<Rat> = (0..nv).map(|v| rat_int((v as i64) + k - 2)).collect();
            let got = eval(&br, &point);
            let want = {
                let mut acc = rat_int(0);
                for (e, r) in oracle.terms() {
                    let mut t = r.clone();
                    for (v, &exp) in e.iter().enumerate() {
                        for _ in 0..exp {
                            t *= point[v].clone();
                        }
                    }
                    acc += t;
                }
                acc
            };
            assert_eq!(got, want);
        }
    }
}

/// Weight-checked substitution composes like commutative series when all
/// braidings are 1: substituting `x -> y + y^2` into an action polynomial
/// reproduces the polynomial composition.
#[test]
fn substitution_matches_commutative_composition() {
    let ctx = Context::ones(1).unwrap();
    // S = sum_N x^N / N! b_N with numeric b = (0, 0, 1, -2, 3)
    let b = [0i64, 0, 1, -2, 3];
    let mut series = Element::zero();
    let mut cpoly = CPoly::zero(1);
    for (n, &bn) in b.iter().enumerate() {
        if bn == 0 {
            continue;
        }
        let coeff = rat_int(bn) * braidleg::qcoeff::factorial(n as u64).recip();
        series = series.add(
            &Element::normal_form_word(
                QPoly::from_rat(coeff.clone()),
                &[(GenId::X(1), n as i64)],
                &ctx,
            )
            .unwrap(),
        );
        cpoly.add_term(vec![n as u32], coeff);
    }
    // x -> x + x^2
    let image = braidleg::parse::parse_element("x1 + x1^2", &ctx).unwrap();
    let mut map = BTreeMap::new();
    map.insert(GenId::X(1), image);
    let substituted = series.substitute(&map, &ctx).unwrap();

    let composed = cpoly.compose(
        &[CPoly::var(1, 0).add(&CPoly::var(1, 0).pow_trunc(2, 16))],
        16,
    );
    // compare coefficientwise
    for k in 0..=10u32 {
        let want = composed.coeff(&[k]);
        let got = substituted
            .coeff(&Monomial::from_gen(GenId::X(1), i64::from(k)).unwrap())
            .as_rat()
            .unwrap();
        assert_eq!(got, want, "coefficient of x^{k}");
    }
}
