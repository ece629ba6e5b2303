//! Randomized and enumerated verification suites. Each suite is
//! deterministic given its seed; the CLI exposes them under `verify
//! --suite` and the acceptance tests drive them directly.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bracket::q_jacobi_sum;
use crate::context::Context;
use crate::element::{braiding_relation_holds, Element};
use crate::error::{EngineError, Result};
use crate::gen::GenId;
use crate::legendre::{classical_check, reduce_hessian_pairs_s1, LegendreEngine, Role};
use crate::monomial::Monomial;
use crate::qcoeff::{rat, rat_int, QMono, QPoly, Rat};
use crate::weight::{swap_factor, BraidWeight};

/// Outcome of one suite: cases run, cases passed, human-readable notes.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub passed: usize,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.cases == self.passed
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {}/{} identities hold{}",
            self.name,
            self.passed,
            self.cases,
            if self.notes.is_empty() {
                String::new()
            } else {
                format!(" ({})", self.notes.join("; "))
            }
        )
    }
}

/// Independent letter-level reordering oracle: compute the factor `C` with
/// `word(left) word(right) = C word(right) word(left)` by literally bubble
/// sorting the concatenated letter list, one adjacent transposition at a
/// time. Negative weight entries become inverse letters.
pub fn transposition_oracle(left: &BraidWeight, right: &BraidWeight) -> QMono {
    #[derive(Clone, Copy)]
    struct Letter {
        xi: u32,
        sign: i64,
        block: u8, // 0 = left block, 1 = right block
    }
    let letters_of = |w: &BraidWeight, block: u8| -> Vec<Letter> {
        let mut out = Vec::new();
        for (k, &e) in w.xi_degree().iter().enumerate() {
            for _ in 0..e.unsigned_abs() {
                out.push(Letter {
                    xi: k as u32 + 1,
                    sign: e.signum(),
                    block,
                });
            }
        }
        out
    };
    let mut word = letters_of(left, 0);
    word.extend(letters_of(right, 1));
    let mut factor = QMono::one();
    // move every right-block letter in front of every left-block letter
    while let Some(i) = word
        .windows(2)
        .position(|w| w[0].block == 0 && w[1].block == 1)
    {
        // adjacent swap: xi_c xi_d -> xi_d xi_c contributes q[d, c]^{s_c s_d}
        let (c, d) = (word[i], word[i + 1]);
        factor.mul_var(d.xi, c.xi, c.sign * d.sign);
        word.swap(i, i + 1);
    }
    factor
}

/// Suite: the closed-form swap factor against the transposition oracle on
/// random weight pairs.
pub fn suite_swap_oracle(s: usize, cases: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    for _ in 0..cases {
        let mut rand_weight = || -> BraidWeight {
            BraidWeight {
                x: (0..s).map(|_| rng.gen_range(-3i64..=3)).collect(),
                p: (0..s).map(|_| rng.gen_range(-3i64..=3)).collect(),
            }
        };
        let l = rand_weight();
        let r = rand_weight();
        if swap_factor(&l, &r) == transposition_oracle(&l, &r) {
            passed += 1;
        }
    }
    Ok(SuiteReport {
        name: "swap-oracle".into(),
        cases,
        passed,
        notes: vec![format!("s={s}, seed={seed}")],
    })
}

/// Randomized-schedule normal form of a letter word: repeatedly pick a
/// random out-of-order adjacent pair and transpose it, tracking factors.
/// Used to confirm that the engine's normal form is independent of the
/// transposition schedule.
pub fn randomized_normal_form(
    word: &[(GenId, i64)],
    ctx: &Context,
    rng: &mut ChaCha8Rng,
) -> Result<Element> {
    let s = ctx.s();
    // expand to single letters with signs
    let mut letters: Vec<(GenId, i64)> = Vec::new();
    for (g, e) in word {
        if *e < 0 && !g.invertible() {
            return Err(EngineError::NegativeExponent(g.to_string()));
        }
        for _ in 0..e.unsigned_abs() {
            letters.push((g.clone(), e.signum()));
        }
    }
    let mut coeff = QPoly::one();
    loop {
        let inversions: Vec<usize> = letters
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0].0 > w[1].0)
            .map(|(i, _)| i)
            .collect();
        if inversions.is_empty() {
            break;
        }
        let i = inversions[rng.gen_range(0..inversions.len())];
        let wl = letters[i].0.weight(s).scale(letters[i].1);
        let wr = letters[i + 1].0.weight(s).scale(letters[i + 1].1);
        coeff = coeff.mul_mono(&swap_factor(&wl, &wr));
        letters.swap(i, i + 1);
    }
    let mut mono = Monomial::one();
    for (g, sgn) in &letters {
        mono = mono.merge(&Monomial::from_gen(g.clone(), *sgn)?)?;
    }
    Element::monomial(mono, QPoly::one()).scale_qpoly(&ctx.reduce_poly(&coeff)?, ctx)
}

fn random_phase_monomial(
    s: usize,
    max_letters: usize,
    rng: &mut ChaCha8Rng,
    ctx: &Context,
) -> Result<Element> {
    let n = rng.gen_range(1..=max_letters);
    let mut word = Vec::new();
    for _ in 0..n {
        let idx = rng.gen_range(1..=s as u32);
        match rng.gen_range(0..3) {
            0 => word.push((GenId::P(idx), 1)),
            1 => word.push((GenId::X(idx), 1)),
            _ => word.push((GenId::H(idx, rng.gen_range(1..=s as u32)), 1)),
        }
    }
    Element::normal_form_word(QPoly::one(), &word, ctx)
}

/// Suite: the braided Jacobi identity on random monomial triples in the
/// phase-space and Planck generators, generic symbolic braiding.
pub fn suite_jacobi(s: usize, cases: usize, seed: u64) -> Result<SuiteReport> {
    let ctx = Context::symbolic(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    for _ in 0..cases {
        let f = random_phase_monomial(s, 3, &mut rng, &ctx)?;
        let g = random_phase_monomial(s, 3, &mut rng, &ctx)?;
        let h = random_phase_monomial(s, 3, &mut rng, &ctx)?;
        if q_jacobi_sum(&f, &g, &h, &ctx)?.is_zero() {
            passed += 1;
        }
    }
    Ok(SuiteReport {
        name: "jacobi".into(),
        cases,
        passed,
        notes: vec![format!("s={s}, seed={seed}")],
    })
}

/// Suite: every braiding relation of the phase-space taxonomy holds as an
/// engine identity `f g = swap(w_f, w_g) g f`, with the side conditions
/// applied where the corresponding display assumes them; where a relation
/// carries an explicitly printed braiding product, the closed-form swap
/// factor is additionally matched against that product.
pub fn suite_relations(s: usize) -> Result<SuiteReport> {
    let generic = Context::symbolic(s)?;
    let side = Context::side_conditions(s)?;
    let mut cases = 0;
    let mut passed = 0;
    let mut notes = Vec::new();

    // printed product forms: the swap factor of the assigned weights must
    // reduce to the displayed q-monomial under the stated side conditions
    {
        let n1: Vec<u32> = (0..s).map(|k| if k == 0 { 2 } else { 1 }).collect();
        let k_t: Vec<u32> = (0..s).map(|k| k as u32 + 1).collect();
        let l_t: Vec<u32> = (0..s).map(|k| if k == s - 1 { 2 } else { 1 }).collect();
        let mut closed = |name: &str, got: QMono, want: QMono, ctx: &Context| -> Result<()> {
            cases += 1;
            let (sg, rg) = ctx.reduce_mono(&got)?;
            let (sw, rw) = ctx.reduce_mono(&want)?;
            if sg == sw && rg == rw {
                passed += 1;
            } else {
                notes.push(format!("{name} printed product mismatch"));
            }
            Ok(())
        };
        for i in 1..=s as u32 {
            // p_i past an action coefficient: prod_a q[s+a, i]^{-N_a}
            let mut want = QMono::one();
            for a in 1..=s as u32 {
                want.mul_var(s as u32 + a, i, -i64::from(n1[(a - 1) as usize]));
            }
            let got = swap_factor(
                &GenId::P(i).weight(s),
                &GenId::BSeed(0, n1.clone()).weight(s),
            );
            closed("p vs bseed product", got, want.clone(), &generic)?;
            // the Planck generator picks up the same product when the
            // coordinates commute among themselves
            let goth = swap_factor(
                &GenId::H(1, i).weight(s),
                &GenId::BSeed(0, n1.clone()).weight(s),
            );
            closed("h vs bseed product (side)", goth, want, &side)?;
            // x_b commutes with the action coefficients under the side
            // conditions
            let gotx = swap_factor(
                &GenId::X(i).weight(s),
                &GenId::BSeed(0, n1.clone()).weight(s),
            );
            closed("x vs bseed trivial (side)", gotx, QMono::one(), &side)?;
            // p_i past a Hamiltonian coefficient under the side
            // conditions: prod_mu q[s+mu, i]^{-K_mu}
            let mut want = QMono::one();
            for mu in 1..=s as u32 {
                want.mul_var(s as u32 + mu, i, -i64::from(k_t[(mu - 1) as usize]));
            }
            let gott = swap_factor(
                &GenId::P(i).weight(s),
                &GenId::TCoef(k_t.clone(), l_t.clone()).weight(s),
            );
            closed("p vs T product (side)", gott, want, &side)?;
        }
        // action coefficients commute among themselves under the side
        // conditions
        let got = swap_factor(
            &GenId::BSeed(0, n1.clone()).weight(s),
            &GenId::BSeed(1, l_t.clone()).weight(s),
        );
        closed("b vs b' trivial (side)", got, QMono::one(), &side)?;
    }

    let mut check = |name: &str, f: &Element, g: &Element, ctx: &Context| -> Result<()> {
        cases += 1;
        if braiding_relation_holds(f, g, ctx)? {
            passed += 1;
        } else {
            notes.push(format!("{name} failed"));
        }
        Ok(())
    };

    let n1: Vec<u32> = (0..s).map(|k| if k == 0 { 2 } else { 1 }).collect();
    let n2: Vec<u32> = (0..s).map(|k| if k == s - 1 { 3 } else { 0 }).collect();
    let bseed = Element::gen(GenId::BSeed(0, n1.clone()))?;
    let bseed2 = Element::gen(GenId::BSeed(2, n2.clone()))?;
    let tcoef = Element::gen(GenId::TCoef(n1.clone(), n2.clone()))?;
    let tcoef2 = Element::gen(GenId::TCoef(n2.clone(), n1.clone()))?;
    let pbar = Element::gen(GenId::PBar(1, n2.clone(), 1))?;
    let xbar = Element::gen(GenId::XBar(1.min(s as u32), n1.clone(), 0))?;
    let pbar2 = Element::gen(GenId::PBar(s as u32, n1.clone(), 2))?;
    let xbar2 = Element::gen(GenId::XBar(s as u32, n2.clone(), 1))?;

    for i in 1..=s as u32 {
        let p = Element::gen(GenId::P(i))?;
        let x = Element::gen(GenId::X(i))?;
        // action-coefficient braidings: the x and h lines assume the side
        // conditions; the p line is unconditional
        check("p vs bseed", &p, &bseed, &generic)?;
        check("x vs bseed (side)", &x, &bseed, &side)?;
        for a in 1..=s as u32 {
            let h = Element::gen(GenId::H(a, i))?;
            check("h vs bseed (side)", &h, &bseed, &side)?;
            check("h vs T", &h, &tcoef, &generic)?;
            check("h vs h", &h, &Element::gen(GenId::H(i, a))?, &generic)?;
            check("h vs b", &h, &bseed, &generic)?;
        }
        // Hamiltonian-coefficient braidings (stated under side conditions,
        // valid generically as weight rules)
        check("p vs T (side)", &p, &tcoef, &side)?;
        check("x vs T (side)", &x, &tcoef, &side)?;
        check("p vs T", &p, &tcoef, &generic)?;
        check("x vs T", &x, &tcoef, &generic)?;
        // flow-coefficient braidings
        check("pbar vs xbar", &pbar, &xbar, &generic)?;
        check("pbar vs pbar", &pbar, &pbar2, &generic)?;
        check("xbar vs xbar", &xbar, &xbar2, &generic)?;
        for a in 1..=s as u32 {
            let h = Element::gen(GenId::H(a, i))?;
            check("pbar vs h", &pbar, &h, &generic)?;
            check("xbar vs h", &xbar, &h, &generic)?;
        }
        check("pbar vs T", &pbar, &tcoef, &generic)?;
        check("xbar vs T", &xbar, &tcoef, &generic)?;
    }
    check("T vs T'", &tcoef, &tcoef2, &generic)?;
    check("b vs b' (side)", &bseed, &bseed2, &side)?;
    check("b vs T", &bseed, &tcoef, &generic)?;

    Ok(SuiteReport {
        name: "relations".into(),
        cases,
        passed,
        notes,
    })
}

/// Suite: Hamilton-Jacobi braiding preservation with generic seeds under
/// the side conditions.
pub fn suite_hj_braiding(s: usize, mmax: u32, deg: u32) -> Result<SuiteReport> {
    let ctx = Context::side_conditions(s)?;
    let mut ham = crate::hj::HamTable::new();
    // a generic low-degree table with symbolic coefficients
    let zero = vec![0u32; s];
    let mut e1 = vec![0u32; s];
    e1[0] = 1;
    let mut e_last = vec![0u32; s];
    e_last[s - 1] = 1;
    ham.insert(
        zero.clone(),
        {
            let mut l = vec![0u32; s];
            l[0] = 2;
            l
        },
        crate::hj::HamValue::Symbolic(Rat::from_integer(1.into())),
    );
    ham.insert(
        {
            let mut k = vec![0u32; s];
            k[s - 1] = 2;
            k
        },
        zero.clone(),
        crate::hj::HamValue::Symbolic(Rat::from_integer(1.into())),
    );
    ham.insert(
        e1,
        e_last,
        crate::hj::HamValue::Symbolic(Rat::from_integer(1.into())),
    );

    let mut seed = BTreeMap::new();
    for total in 2..=deg {
        for n in crate::legendre::multi_indices_of_total(s, total) {
            seed.insert(n.clone(), Element::gen(GenId::BSeed(0, n))?);
        }
    }
    let series = crate::hj::hj_evolve(&seed, &ham, mmax, deg, &ctx)?;
    let violations = crate::hj::verify_hj_braiding(&series, &ctx)?;
    let cases = series.reported().count();
    Ok(SuiteReport {
        name: "hj-braiding".into(),
        cases,
        passed: cases - violations.len().min(cases),
        notes: violations.iter().take(5).map(|v| v.to_string()).collect(),
    })
}

/// Suite: Hamiltonian flow braiding preservation, generic symbolic
/// braiding, seeds as free flow generators.
pub fn suite_flow_braiding(s: usize, nmax: u32, deg: u32) -> Result<SuiteReport> {
    let ctx = Context::symbolic(s)?;
    let mut ham = crate::hj::HamTable::new();
    let zero = vec![0u32; s];
    let mut l2 = vec![0u32; s];
    l2[0] = 1;
    l2[s - 1] += 1;
    let mut k2 = vec![0u32; s];
    k2[0] = 2;
    ham.insert(
        zero.clone(),
        l2,
        crate::hj::HamValue::Symbolic(Rat::from_integer(1.into())),
    );
    ham.insert(
        k2,
        zero,
        crate::hj::HamValue::Symbolic(Rat::from_integer(1.into())),
    );

    let mut seed_p = BTreeMap::new();
    let mut seed_x = BTreeMap::new();
    for k in 1..=s as u32 {
        let m0 = vec![0u32; s];
        seed_p.insert(
            (k, m0.clone()),
            Element::gen(GenId::PBar(k, m0.clone(), 0))?,
        );
        let unit = crate::weight::mi_unit(s, k);
        seed_x.insert((k, unit.clone()), Element::gen(GenId::XBar(k, unit, 0))?);
    }
    let flow = crate::hamsys::ham_evolve(&seed_p, &seed_x, &ham, nmax, deg, &ctx)?;
    let violations = crate::hamsys::verify_flow_braiding(&flow, &ham, &ctx)?;
    let cases = flow.p.len() + flow.x.len();
    Ok(SuiteReport {
        name: "flow-braiding".into(),
        cases,
        passed: cases - violations.len().min(cases),
        notes: violations.iter().take(5).map(|v| v.to_string()).collect(),
    })
}

/// Random one-dimensional action tables for the Legendre suites:
/// `b_2 in {1,-1,2,-2,1/2}`, higher coefficients integers in `[-3,3]`.
pub fn random_b_tables_1d(count: usize, seed: u64) -> Vec<Vec<Rat>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b2_choices = [rat_int(1), rat_int(-1), rat_int(2), rat_int(-2), rat(1, 2)];
    (0..count)
        .map(|_| {
            let mut t = vec![b2_choices[rng.gen_range(0..b2_choices.len())].clone()];
            for _ in 0..4 {
                t.push(rat_int(rng.gen_range(-3i64..=3)));
            }
            t
        })
        .collect()
}

/// Suite: the two independent one-dimensional Legendre oracles agree.
pub fn suite_legendre_oracles(count: usize, rmax: usize, seed: u64) -> Result<SuiteReport> {
    let tables = random_b_tables_1d(count, seed);
    let mut passed = 0;
    for b in &tables {
        let chain = crate::classical::legendre_1d_chain(b, rmax)?;
        let inv = crate::classical::legendre_1d_inversion(b, rmax)?;
        if chain == inv {
            passed += 1;
        }
    }
    Ok(SuiteReport {
        name: "legendre-oracles".into(),
        cases: tables.len(),
        passed,
        notes: vec![format!("through a_{rmax}, seed={seed}")],
    })
}

/// Suite: the braided pipeline at the classical point against the series
/// oracle, one-dimensional random tables.
pub fn suite_legendre_classical_1d(count: usize, rmax: usize, seed: u64) -> Result<SuiteReport> {
    let ctx = Context::ones(1)?;
    let tables = random_b_tables_1d(count, seed);
    let mut passed = 0;
    let mut notes = Vec::new();
    for (i, b) in tables.iter().enumerate() {
        let mut table = crate::classical::CoeffTable::new();
        for (k, v) in b.iter().enumerate() {
            if !num_traits::Zero::is_zero(v) {
                table.insert(vec![k as u32 + 2], v.clone());
            }
        }
        if table.is_empty() {
            table.insert(vec![2], b[0].clone());
        }
        let report = classical_check(1, &table, rmax, &ctx)?;
        if report.ok() {
            passed += 1;
        } else {
            notes.push(format!("table {i}: {:?}", report.mismatches));
        }
    }
    notes.push(format!("r_max={rmax}, seed={seed}"));
    Ok(SuiteReport {
        name: "legendre-classical".into(),
        cases: tables.len(),
        passed,
        notes,
    })
}

/// Suite: classical pipeline check at `s = 2` on random cubic
/// perturbations of the unit Hessian.
pub fn suite_legendre_classical_2d(count: usize, rmax: usize, seed: u64) -> Result<SuiteReport> {
    let ctx = Context::ones(2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut notes = Vec::new();
    for case in 0..count {
        // unit Hessian, randomness only in the cubic layer
        let mut table = crate::classical::CoeffTable::new();
        table.insert(vec![2, 0], rat_int(1));
        table.insert(vec![0, 2], rat_int(1));
        for n in crate::legendre::multi_indices_of_total(2, 3) {
            let v = rng.gen_range(-2i64..=2);
            if v != 0 {
                table.insert(n, rat_int(v));
            }
        }
        let report = classical_check(2, &table, rmax, &ctx)?;
        if report.ok() {
            passed += 1;
        } else {
            notes.push(format!("case {case}: {:?}", report.mismatches));
        }
    }
    notes.push(format!("r_max={rmax}, seed={seed}"));
    Ok(SuiteReport {
        name: "legendre-classical-2d".into(),
        cases: count,
        passed,
        notes,
    })
}

/// Suite: unit cancellation and braiding covariance of the cap images at
/// generic symbolic braiding. Covariance means weight equality with the cap
/// generator plus matching swap factors against a representative of every
/// generator class; a pair of full engine products per image double-checks
/// the weight rule at the product level.
pub fn suite_cap_covariance(s: usize, rmax: usize) -> Result<SuiteReport> {
    let ctx = Context::symbolic(s)?;
    let mut eng = LegendreEngine::new(&ctx);
    let mut cases = 0;
    let mut passed = 0;
    let mut notes = Vec::new();

    // one representative weight per generator class
    let n1: Vec<u32> = (0..s).map(|k| if k == 0 { 2 } else { 1 }).collect();
    let class_reps: Vec<GenId> = vec![
        GenId::X(1),
        GenId::P(s as u32),
        GenId::H(1, s as u32),
        GenId::BSeed(0, n1.clone()),
        GenId::TCoef(n1.clone(), n1.clone()),
        GenId::USym(n1.clone(), 1, s as u32),
        GenId::ABar(1, s as u32),
        GenId::BBar(1, s as u32),
        GenId::BCap(vec![1; 3]),
        GenId::ACap(vec![1; 3]),
        GenId::PBar(1, n1.clone(), 1),
        GenId::XBar(s as u32, n1.clone(), 0),
        GenId::Kappa(1),
        GenId::Theta(s as u32),
    ];
    let product_reps = [GenId::P(1), GenId::H(1, 1)];

    for r in 1..=rmax {
        for list in sorted_lists(s as u32, r + 2) {
            cases += 1;
            let img = eng.cap_image(Role::Forward, &list)?;
            let want = GenId::ACap(list.clone()).weight(s);
            let mut ok = img.units_free() && img.is_homogeneous_of(&want, s);
            if ok {
                for rep in &class_reps {
                    let w = rep.weight(s);
                    if swap_factor(&want, &w)
                        != swap_factor(&img.homogeneous_weight(s)?.unwrap(), &w)
                    {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                for rep in &product_reps {
                    if !braiding_relation_holds(&img, &Element::gen(rep.clone())?, &ctx)? {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                passed += 1;
            } else {
                notes.push(format!("cap {list:?}"));
            }
        }
    }
    Ok(SuiteReport {
        name: "cap-covariance".into(),
        cases,
        passed,
        notes,
    })
}

/// Nondecreasing index lists of the given length over `1..=s`.
pub fn sorted_lists(s: u32, len: usize) -> Vec<Vec<u32>> {
    fn rec(s: u32, len: usize, min: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if len == 0 {
            out.push(acc.clone());
            return;
        }
        for k in min..=s {
            acc.push(k);
            rec(s, len - 1, k, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(s, len, 1, &mut Vec::new(), &mut out);
    out
}

/// Suite: round trip of the transformation on cap generators at the
/// classical braiding point (`s = 1`), exact; the generic-braiding round
/// trip is executed and reported in the notes without being counted.
pub fn suite_roundtrip(rmax: usize) -> Result<SuiteReport> {
    let ctx = Context::ones(1)?;
    let mut eng = LegendreEngine::new(&ctx);
    let mut cases = 0;
    let mut passed = 0;
    let mut notes = Vec::new();
    for r in 1..=rmax {
        let list = vec![1u32; r + 2];
        cases += 1;
        let fwd = eng.a_hash(&list)?;
        let back = eng.inverse_legendre_map(&fwd)?;
        let reduced = reduce_hessian_pairs_s1(&back);
        if reduced == Element::gen(GenId::ACap(list.clone()))? {
            passed += 1;
        } else {
            notes.push(format!("round trip failed at r={r}"));
        }
    }
    // generic braiding: report only
    let gctx = Context::symbolic(1)?;
    let mut geng = LegendreEngine::new(&gctx);
    let list = vec![1u32; 3];
    let fwd = geng.a_hash(&list)?;
    match geng.inverse_legendre_map(&fwd) {
        Ok(back) => {
            let same = back == Element::gen(GenId::ACap(list))?;
            notes.push(format!(
                "generic-braiding round trip at r=1 {} (reported, not asserted)",
                if same { "closes" } else { "does not close" }
            ));
        }
        Err(e) => notes.push(format!("generic-braiding round trip: {e}")),
    }
    Ok(SuiteReport {
        name: "roundtrip".into(),
        cases,
        passed,
        notes,
    })
}

/// Suite: bracketing-algebra normal form on random words - termination
/// under the caps, the exact double-application identity, and
/// commutativity of the eta-degree-zero truncation at the all-ones point.
pub fn suite_epoche(s: usize, words: usize, seed: u64) -> Result<SuiteReport> {
    use crate::epoche::*;
    let ctx = Context::symbolic(s)?;
    let ones = Context::ones(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = 0;
    let mut passed = 0;
    let mut notes = Vec::new();
    let mut schedule_probes = 0usize;
    let mut schedule_disagreements = 0usize;

    let random_tree = |rng: &mut ChaCha8Rng| -> Tree {
        fn rec(rng: &mut ChaCha8Rng, leaves: u32, s: usize) -> Tree {
            if leaves == 1 {
                Tree::leaf(rng.gen_range(1..=2 * s as u32))
            } else {
                let left = rng.gen_range(1..leaves);
                Tree::Node(
                    Box::new(rec(rng, left, s)),
                    Box::new(rec(rng, leaves - left, s)),
                )
            }
        }
        let leaves = rng.gen_range(1..=3u32);
        rec(rng, leaves, s)
    };

    for _ in 0..words {
        let len = rng.gen_range(1..=5usize);
        let mut word = EpochElement::one();
        let mut trees = Vec::new();
        for _ in 0..len {
            let t = random_tree(&mut rng);
            trees.push(t.clone());
            word = word.mul_raw(&EpochElement::hbar(t));
        }
        cases += 1;
        let mut ok = true;
        // termination and sortedness under the caps
        let nf = epoche_normal_form(&word, 6, 4, &ctx)?;
        for m in nf.terms.keys() {
            let w: Vec<_> = m.gens.iter().map(|(t, _)| t.clone()).collect();
            if !w.windows(2).all(|p| p[0] <= p[1]) {
                ok = false;
            }
        }
        // eta degree nondecreasing
        if nf.min_eta_degree().unwrap_or(0) < word.min_eta_degree().unwrap_or(0) {
            ok = false;
        }
        // double application on the first two trees
        if trees.len() >= 2 && double_application_residual(&trees[0], &trees[1], &ctx)?.is_zero() {
            // ok
        } else if trees.len() >= 2 {
            ok = false;
        }
        // eta-cap-zero truncation at the all-ones point is commutative
        if trees.len() >= 2 {
            let a = EpochElement::hbar(trees[0].clone());
            let b = EpochElement::hbar(trees[1].clone());
            let ab = epoche_normal_form(&a.mul_raw(&b), 6, 0, &ones)?;
            let ba = epoche_normal_form(&b.mul_raw(&a), 6, 0, &ones)?;
            if ab != ba {
                ok = false;
            }
        }
        if ok {
            passed += 1;
        } else {
            notes.push("word case failed".into());
        }
        // confluence probe at generic braidings: randomized reduction
        // schedules, agreement reported but not asserted
        let deterministic = epoche_normal_form(&word, 6, 4, &ctx)?;
        let randomized = epoche_normal_form_randomized(&word, 6, 4, &ctx, &mut rng)?;
        if randomized != deterministic {
            schedule_disagreements += 1;
        }
        schedule_probes += 1;
    }
    notes.push(format!(
        "randomized-schedule confluence probe: {}/{} agree (reported, not asserted)",
        schedule_probes - schedule_disagreements,
        schedule_probes
    ));
    Ok(SuiteReport {
        name: "epoche".into(),
        cases,
        passed,
        notes,
    })
}

/// Dispatch by suite name, used by the CLI.
pub fn run_suite(name: &str, s: usize, seed: u64, cases: usize) -> Result<SuiteReport> {
    match name {
        "jacobi" => suite_jacobi(s.max(1), cases, seed),
        "swap-oracle" => suite_swap_oracle(s.max(1), cases.max(1), seed),
        "relations" => suite_relations(s.max(1)),
        "hj-braiding" => suite_hj_braiding(s.max(1), 3, 4),
        "flow-braiding" => suite_flow_braiding(s.max(1), 2, 2),
        "legendre-oracles" => suite_legendre_oracles(cases, 8, seed),
        "legendre-classical" => suite_legendre_classical_1d(cases, 4, seed),
        "legendre-classical-2d" => suite_legendre_classical_2d(cases.min(5), 2, seed),
        "cap-covariance" => suite_cap_covariance(s.max(1), 2),
        "roundtrip" => suite_roundtrip(2),
        "epoche" => suite_epoche(s.max(1), cases, seed),
        other => Err(EngineError::Validation(format!("unknown suite '{other}'"))),
    }
}
