//! Classical (all-braidings-one) series oracles in exact rational
//! arithmetic. These are the independent reference computations that the
//! braided pipelines are checked against: commutative multivariate
//! polynomials, series inversion, the two one-dimensional Legendre-series
//! routes, and the tangent series driving the harmonic action table.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{EngineError, Result};
use crate::qcoeff::{factorial, multi_factorial, rat_int, Rat};
use crate::weight::{mi_total, MultiIndex};

/// Commutative polynomial over the rationals in `nvars` variables with
/// nonnegative exponents. Sparse, exact, deterministic ordering.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CPoly {
    pub nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl CPoly {
    pub fn zero(nvars: usize) -> Self {
        CPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, r: Rat) -> Self {
        let mut p = CPoly::zero(nvars);
        p.add_term(vec![0; nvars], r);
        p
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        let mut p = CPoly::zero(nvars);
        p.add_term(e, Rat::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, e: Vec<u32>, r: Rat) {
        if r.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(r);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += r;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &CPoly) -> CPoly {
        let mut out = self.clone();
        for (e, r) in &other.terms {
            out.add_term(e.clone(), r.clone());
        }
        out
    }

    pub fn neg(&self) -> CPoly {
        CPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, r)| (e.clone(), -r.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &CPoly) -> CPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &Rat) -> CPoly {
        if r.is_zero() {
            return CPoly::zero(self.nvars);
        }
        CPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.clone() * r.clone()))
                .collect(),
        }
    }

    /// Product truncated at total degree `cap`.
    pub fn mul_trunc(&self, other: &CPoly, cap: u32) -> CPoly {
        let mut out = CPoly::zero(self.nvars);
        for (ea, ra) in &self.terms {
            let da: u32 = ea.iter().sum();
            if da > cap {
                continue;
            }
            for (eb, rb) in &other.terms {
                let db: u32 = eb.iter().sum();
                if da + db > cap {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ra.clone() * rb.clone());
            }
        }
        out
    }

    pub fn pow_trunc(&self, k: u32, cap: u32) -> CPoly {
        let mut acc = CPoly::constant(self.nvars, Rat::one());
        for _ in 0..k {
            acc = acc.mul_trunc(self, cap);
        }
        acc
    }

    pub fn truncate(&self, cap: u32) -> CPoly {
        CPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= cap)
                .map(|(e, r)| (e.clone(), r.clone()))
                .collect(),
        }
    }

    pub fn deriv(&self, k: usize) -> CPoly {
        let mut out = CPoly::zero(self.nvars);
        for (e, r) in &self.terms {
            if e[k] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[k] -= 1;
            out.add_term(e2, r.clone() * rat_int(i64::from(e[k])));
        }
        out
    }

    /// Substitute each variable by the given polynomial, truncating at total
    /// degree `cap`.
    pub fn compose(&self, images: &[CPoly], cap: u32) -> CPoly {
        let nv = images.first().map(|p| p.nvars).unwrap_or(self.nvars);
        let mut out = CPoly::zero(nv);
        for (e, r) in &self.terms {
            let mut term = CPoly::constant(nv, r.clone());
            for (k, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    term = term.mul_trunc(&images[k].pow_trunc(exp, cap), cap);
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&vec![0; self.nvars])
    }
}

/// Taylor table of a formal action: map multi-index -> coefficient `b_N`
/// relative to the normalization `S(x) = sum_N x^N / N! b_N`.
pub type CoeffTable = BTreeMap<MultiIndex, Rat>;

/// Assemble the polynomial `sum_N x^N/N! b_N` from a coefficient table.
pub fn series_from_table(s: usize, table: &CoeffTable) -> CPoly {
    let mut p = CPoly::zero(s);
    for (n, b) in table {
        p.add_term(n.clone(), b.clone() / multi_factorial(n));
    }
    p
}

/// Read coefficients `a_M = M! [p^M] f` back out of a polynomial.
pub fn table_from_series(f: &CPoly, max_total: u32) -> CoeffTable {
    let mut out = CoeffTable::new();
    for (e, r) in f.terms() {
        if e.iter().sum::<u32>() <= max_total {
            out.insert(e.clone(), r.clone() * multi_factorial(e));
        }
    }
    out
}

/// The tangent series: exact rational coefficients `c_k` of
/// `tan t = sum_k c_k t^k`, via `tan' = 1 + tan^2`.
pub fn tan_series(order: usize) -> Vec<Rat> {
    let mut c = vec![Rat::zero(); order + 1];
    if order >= 1 {
        c[1] = Rat::one();
    }
    for k in 1..order {
        // (k+1) c_{k+1} = [t^k](1 + tan^2)
        let mut conv = Rat::zero();
        for i in 0..=k {
            conv += c[i].clone() * c[k - i].clone();
        }
        c[k + 1] = conv / rat_int((k + 1) as i64);
    }
    c
}

/// One-dimensional Legendre coefficients through the chain
/// `u = 1/S''`, `w_0 = u`, `w_{m+1} = u w_m'`, `a_{m+2} = -w_m(0)`.
///
/// `b[k]` holds `b_{k+2}` (the table starts at the quadratic coefficient);
/// the result `a[k]` likewise holds `a_{k+2}`, up to `a_{rmax}`.
pub fn legendre_1d_chain(b: &[Rat], rmax: usize) -> Result<Vec<Rat>> {
    if b.is_empty() || b[0].is_zero() {
        return Err(EngineError::DegenerateHessian("b_2 = 0".into()));
    }
    let cap = rmax as u32; // work precision in x
                           // S''(x) = sum_k b_{k+2} x^k / k!
    let mut sxx = CPoly::zero(1);
    for (k, bk) in b.iter().enumerate() {
        sxx.add_term(vec![k as u32], bk.clone() / factorial(k as u64));
    }
    let u = reciprocal_series(&sxx, cap)?;
    let mut a = Vec::new();
    let mut w = u.clone();
    for _m in 0..=rmax.saturating_sub(2) {
        a.push(-w.constant_term());
        w = u.mul_trunc(&w.deriv(0), cap);
    }
    Ok(a)
}

/// Multiplicative inverse of a series with nonzero constant term, truncated
/// at total degree `cap`. Newton iteration; the degree of accuracy doubles
/// each round.
fn reciprocal_series(f: &CPoly, cap: u32) -> Result<CPoly> {
    let c0 = f.constant_term();
    if c0.is_zero() {
        return Err(EngineError::DegenerateHessian(
            "series has no constant term".into(),
        ));
    }
    let mut inv = CPoly::constant(f.nvars, c0.recip());
    let mut reached = 0u32;
    while reached < cap {
        reached = (2 * reached + 1).min(cap);
        let two = CPoly::constant(f.nvars, rat_int(2));
        let t = two.sub(&f.mul_trunc(&inv, reached));
        inv = inv.mul_trunc(&t, reached);
    }
    Ok(inv)
}

/// One-dimensional Legendre coefficients by formal inversion of
/// `p = S'(x)` and direct evaluation of `-p x~(p) + S(x~(p))`.
/// Same input/output layout as [`legendre_1d_chain`].
pub fn legendre_1d_inversion(b: &[Rat], rmax: usize) -> Result<Vec<Rat>> {
    if b.is_empty() || b[0].is_zero() {
        return Err(EngineError::DegenerateHessian("b_2 = 0".into()));
    }
    let mut table = CoeffTable::new();
    for (k, bk) in b.iter().enumerate() {
        if !bk.is_zero() {
            table.insert(vec![(k + 2) as u32], bk.clone());
        }
    }
    if table.is_empty() {
        table.insert(vec![2], b[0].clone());
    }
    let out = legendre_multidim(1, &table, rmax as u32)?;
    let mut a = Vec::new();
    for m in 2..=rmax as u32 {
        a.push(out.get(&vec![m]).cloned().unwrap_or_else(Rat::zero));
    }
    Ok(a)
}

/// Multidimensional formal Legendre transformation on Taylor tables:
/// invert `p = grad S(x)` as a formal series and evaluate
/// `S~(p) = -p.x~(p) + S(x~(p))`, exactly, through total degree `rmax`.
///
/// The input table must start at quadratic order with an invertible Hessian.
pub fn legendre_multidim(s: usize, b: &CoeffTable, rmax: u32) -> Result<CoeffTable> {
    for n in b.keys() {
        if n.len() != s {
            return Err(EngineError::Dimension(format!(
                "coefficient index length {} != s = {}",
                n.len(),
                s
            )));
        }
        if mi_total(n) < 2 {
            return Err(EngineError::Validation(
                "action table must start at quadratic order".into(),
            ));
        }
    }
    let sx = series_from_table(s, b);
    // Hessian matrix B_{ij} = b_{1_i + 1_j}
    let mut hess = vec![vec![Rat::zero(); s]; s];
    for (i, row) in hess.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let mut n = vec![0u32; s];
            n[i] += 1;
            n[j] += 1;
            *slot = b.get(&n).cloned().unwrap_or_else(Rat::zero);
        }
    }
    let inv = invert_matrix(&hess).ok_or_else(|| {
        EngineError::DegenerateHessian("quadratic form is singular over the rationals".into())
    })?;

    let cap = rmax.saturating_sub(1); // degree of x~(p)
                                      // p_i = sum_j B_{ij} x_j + g_i(x), with g the superlinear part
    let grads: Vec<CPoly> = (0..s).map(|i| sx.deriv(i)).collect();
    let highers: Vec<CPoly> = (0..s)
        .map(|i| {
            let mut lin = CPoly::zero(s);
            for j in 0..s {
                let mut e = vec![0u32; s];
                e[j] = 1;
                lin.add_term(e, hess[i][j].clone());
            }
            grads[i].sub(&lin)
        })
        .collect();

    // x~ = B^{-1} (p - g(x~)) by fixed-point iteration; each round gains one
    // degree of accuracy.
    let mut xt: Vec<CPoly> = (0..s)
        .map(|i| {
            let mut lin = CPoly::zero(s);
            for j in 0..s {
                let mut e = vec![0u32; s];
                e[j] = 1;
                lin.add_term(e, inv[i][j].clone());
            }
            lin
        })
        .collect();
    for _round in 0..cap {
        let gx: Vec<CPoly> = highers.iter().map(|g| g.compose(&xt, cap)).collect();
        let mut next = Vec::with_capacity(s);
        for inv_row in inv.iter().take(s) {
            let mut acc = CPoly::zero(s);
            for j in 0..s {
                let pj = CPoly::var(s, j).sub(&gx[j]);
                acc = acc.add(&pj.scale(&inv_row[j]));
            }
            next.push(acc.truncate(cap));
        }
        xt = next;
    }

    // S~(p) = -sum_i p_i x~_i + S(x~)
    let mut st = sx.compose(&xt, rmax);
    for (i, xi) in xt.iter().enumerate() {
        let pi = CPoly::var(s, i);
        st = st.sub(&pi.mul_trunc(xi, rmax));
    }
    st = st.truncate(rmax);
    Ok(table_from_series(&st, rmax))
}

/// Exact inverse of a square rational matrix by Gauss-Jordan elimination.
pub fn invert_matrix(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &p;
            inv[col][j] /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let av = a[col][j].clone() * f.clone();
                    a[r][j] -= av;
                    let iv = inv[col][j].clone() * f.clone();
                    inv[r][j] -= iv;
                }
            }
        }
    }
    Some(inv)
}

/// Commutative Hamilton-Jacobi coefficient recursion
/// `b_N^{(m+1)} = -m! N! [t^m x^N] H(x, S_x)`, as an independent oracle.
/// `ham` maps `(K, L)` to the value of `T_{K,L}`.
pub fn hj_layers_commutative(
    s: usize,
    ham: &BTreeMap<(MultiIndex, MultiIndex), Rat>,
    seed: &CoeffTable,
    mmax: u32,
    deg: u32,
) -> Result<Vec<CoeffTable>> {
    let cap = deg + mmax;
    let mut layers: Vec<CoeffTable> = vec![seed.clone()];
    for m in 0..mmax {
        // t-graded gradient series: grads[mu][m'] = d/dx_mu of layer m'
        let grads: Vec<Vec<CPoly>> = (0..s)
            .map(|mu| {
                layers
                    .iter()
                    .map(|tab| series_from_table(s, tab).deriv(mu))
                    .collect()
            })
            .collect();
        // H(x, S_x) as a t-graded series, needed through t^m
        let mut hval: Vec<CPoly> = (0..=m as usize).map(|_| CPoly::zero(s)).collect();
        for ((k, l), t_kl) in ham {
            let mut base = CPoly::zero(s);
            base.add_term(
                k.clone(),
                (multi_factorial(k) * multi_factorial(l)).recip() * t_kl.clone(),
            );
            let mut graded: Vec<CPoly> = vec![base];
            for i in 0..s {
                for _ in 0..l[i] {
                    // multiply by the t-graded series sum_{m'} t^{m'}/m'! grad_i^{(m')}
                    let mut next: Vec<CPoly> = (0..=m as usize).map(|_| CPoly::zero(s)).collect();
                    for (ta, poly) in graded.iter().enumerate() {
                        for tb in 0..layers.len() {
                            if ta + tb > m as usize {
                                break;
                            }
                            let f = factorial(tb as u64).recip();
                            let contrib = poly.mul_trunc(&grads[i][tb].scale(&f), cap);
                            next[ta + tb] = next[ta + tb].add(&contrib);
                        }
                    }
                    graded = next;
                }
            }
            for (t, poly) in graded.iter().enumerate() {
                if t <= m as usize {
                    hval[t] = hval[t].add(poly);
                }
            }
        }
        // new layer from the t^m slice
        let mfac = factorial(u64::from(m));
        let mut layer = CoeffTable::new();
        for (e, r) in hval[m as usize].terms() {
            if e.iter().sum::<u32>() > cap {
                continue;
            }
            let val = -(mfac.clone() * multi_factorial(e)) * r.clone();
            if !val.is_zero() {
                layer.insert(e.clone(), val);
            }
        }
        layers.push(layer);
    }
    Ok(layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcoeff::rat;

    #[test]
    fn tan_series_matches_known_values() {
        let c = tan_series(7);
        assert_eq!(c[1], rat_int(1));
        assert_eq!(c[3], rat(1, 3));
        assert_eq!(c[5], rat(2, 15));
        assert_eq!(c[7], rat(17, 315));
        assert!(c[2].is_zero() && c[4].is_zero() && c[6].is_zero());
    }

    #[test]
    fn pure_quadratic_transforms_to_negative_reciprocal() {
        // b = (1): S = x^2/2 -> a = (-1)
        let a = legendre_1d_chain(&[rat_int(1)], 2).unwrap();
        assert_eq!(a, vec![rat_int(-1)]);
        // b = (2,0,0): S~ = -p^2/(2 b_2)
        let a = legendre_1d_chain(&[rat_int(2), rat_int(0), rat_int(0)], 4).unwrap();
        assert_eq!(a, vec![rat(-1, 2), rat_int(0), rat_int(0)]);
    }

    #[test]
    fn cubic_example_both_routes() {
        // b = (1,1): a_2 = -1, a_3 = 1, a_4 = -3
        let want = vec![rat_int(-1), rat_int(1), rat_int(-3)];
        assert_eq!(
            legendre_1d_chain(&[rat_int(1), rat_int(1)], 4).unwrap(),
            want
        );
        assert_eq!(
            legendre_1d_inversion(&[rat_int(1), rat_int(1)], 4).unwrap(),
            want
        );
    }

    #[test]
    fn degenerate_hessian_rejected() {
        assert!(matches!(
            legendre_1d_chain(&[rat_int(0), rat_int(1)], 4),
            Err(EngineError::DegenerateHessian(_))
        ));
    }

    #[test]
    fn multidim_identity_quadratic() {
        // S = (x1^2 + x2^2)/2 -> S~ = -(p1^2 + p2^2)/2
        let mut b = CoeffTable::new();
        b.insert(vec![2, 0], rat_int(1));
        b.insert(vec![0, 2], rat_int(1));
        let out = legendre_multidim(2, &b, 4).unwrap();
        assert_eq!(out.get(&vec![2, 0]), Some(&rat_int(-1)));
        assert_eq!(out.get(&vec![0, 2]), Some(&rat_int(-1)));
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn multidim_bilinear_self_dual() {
        // S = x1 x2 -> S~ = -p1 p2
        let mut b = CoeffTable::new();
        b.insert(vec![1, 1], rat_int(1));
        let out = legendre_multidim(2, &b, 4).unwrap();
        assert_eq!(out.get(&vec![1, 1]), Some(&rat_int(-1)));
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn multidim_reduces_to_1d() {
        let b1 = vec![rat_int(2), rat(1, 2), rat_int(-1), rat_int(3)];
        let chain = legendre_1d_chain(&b1, 7).unwrap();
        let inv = legendre_1d_inversion(&b1, 7).unwrap();
        assert_eq!(chain, inv);
    }

    #[test]
    fn commutative_hj_harmonic_matches_tangent() {
        // H = p^2/2 + x^2/2, seed 0: b_2^{(m)} = -m! [t^m] tan t
        let mut ham = BTreeMap::new();
        ham.insert((vec![0], vec![2]), rat_int(1));
        ham.insert((vec![2], vec![0]), rat_int(1));
        let layers = hj_layers_commutative(1, &ham, &CoeffTable::new(), 5, 2).unwrap();
        let tan = tan_series(5);
        for m in 1..=5usize {
            let got = layers[m].get(&vec![2]).cloned().unwrap_or_else(Rat::zero);
            let want = -factorial(m as u64) * tan[m].clone();
            assert_eq!(got, want, "order {m}");
        }
        assert_eq!(
            layers[5].get(&vec![2]).cloned().unwrap(),
            rat_int(-16),
            "b_2^(5) = -16"
        );
    }
}
