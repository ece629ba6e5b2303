//! The generator taxonomy, assigned braiding weights, and the PBW order.
//!
//! Coordinates come first in the PBW order so that extracting the `x^N`
//! prefix of a normal-formed monomial is a prefix read. Within the `X` and
//! `P` tags the order is descending index, which makes the canonical word of
//! a monomial match the conventions `x^N = x_s^{N_s} ... x_1^{N_1}` and
//! `p^N = p_s^{N_s} ... p_1^{N_1}`.

use std::cmp::Ordering;
use std::fmt;

use crate::context::Context;
use crate::error::{EngineError, Result};
use crate::qcoeff::QMono;
use crate::weight::{mi_string, BraidWeight, MultiIndex};

/// Identity of a single generator.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum GenId {
    /// Coordinate `x_a`.
    X(u32),
    /// Momentum `p_i`.
    P(u32),
    /// Braided Planck constant `h[a,i]`, behaves like `x^{1_a} p^{1_i}`.
    H(u32, u32),
    /// Action seed coefficient `bseed[m;N]`, behaves like `x^{-N}`.
    BSeed(u32, MultiIndex),
    /// Hamiltonian coefficient `T[K;L]`, behaves like `x^{-K} p^{-L}`.
    TCoef(MultiIndex, MultiIndex),
    /// Hessian-chain symbol `u[N;a,b]`, behaves like `x^{-N+1_a+1_b}`.
    USym(MultiIndex, u32, u32),
    /// Momentum-side quadratic datum `a[i,j]`, behaves like `p^{-1_i-1_j}`.
    ABar(u32, u32),
    /// Coordinate-side quadratic datum `b[a,b]`, behaves like `x^{-1_a-1_b}`.
    BBar(u32, u32),
    /// Coordinate-side Taylor datum `B[i,j,k,...]` (>= 3 indices),
    /// behaves like `p^{sum of units}`.
    BCap(Vec<u32>),
    /// Momentum-side Taylor datum `A[a,b,l,...]` (>= 3 indices),
    /// behaves like `x^{sum of units}`.
    ACap(Vec<u32>),
    /// Flow coefficient `pbar[i;M;n]`, behaves like `p^{1_i}`.
    PBar(u32, MultiIndex, u32),
    /// Flow coefficient `xbar[a;N;m]`, behaves like `x^{1_a}`.
    XBar(u32, MultiIndex, u32),
    /// Momentum unit of measurement `kappa<i>`, invertible, like `p^{-1_i}`.
    Kappa(u32),
    /// Coordinate unit of measurement `theta<a>`, invertible, like `x^{-1_a}`.
    Theta(u32),
}

impl GenId {
    fn rank(&self) -> u8 {
        match self {
            GenId::X(_) => 0,
            GenId::P(_) => 1,
            GenId::H(..) => 2,
            GenId::BSeed(..) => 3,
            GenId::TCoef(..) => 4,
            GenId::USym(..) => 5,
            GenId::ABar(..) => 6,
            GenId::BBar(..) => 7,
            GenId::BCap(_) => 8,
            GenId::ACap(_) => 9,
            GenId::PBar(..) => 10,
            GenId::XBar(..) => 11,
            GenId::Kappa(_) => 12,
            GenId::Theta(_) => 13,
        }
    }

    /// Only the units of measurement may carry negative exponents.
    pub fn invertible(&self) -> bool {
        matches!(self, GenId::Kappa(_) | GenId::Theta(_))
    }

    pub fn validate(&self, ctx: &Context) -> Result<()> {
        match self {
            GenId::X(a) | GenId::Theta(a) => ctx.check_s_index(*a),
            GenId::P(i) | GenId::Kappa(i) => ctx.check_s_index(*i),
            GenId::H(a, i) | GenId::USym(_, a, i) => {
                ctx.check_s_index(*a)?;
                ctx.check_s_index(*i)?;
                if let GenId::USym(n, _, _) = self {
                    ctx.check_multi_index(n)?;
                }
                Ok(())
            }
            GenId::ABar(i, j) | GenId::BBar(i, j) => {
                ctx.check_s_index(*i)?;
                ctx.check_s_index(*j)
            }
            GenId::BSeed(_, n) => ctx.check_multi_index(n),
            GenId::TCoef(k, l) => {
                ctx.check_multi_index(k)?;
                ctx.check_multi_index(l)
            }
            GenId::BCap(list) | GenId::ACap(list) => {
                if list.len() < 3 {
                    return Err(EngineError::Validation(format!(
                        "{self} needs at least 3 indices"
                    )));
                }
                for &k in list {
                    ctx.check_s_index(k)?;
                }
                Ok(())
            }
            GenId::PBar(i, m, _) => {
                ctx.check_s_index(*i)?;
                ctx.check_multi_index(m)
            }
            GenId::XBar(a, n, _) => {
                ctx.check_s_index(*a)?;
                ctx.check_multi_index(n)
            }
        }
    }

    /// The assigned braiding weight.
    pub fn weight(&self, s: usize) -> BraidWeight {
        let mut w = BraidWeight::zero(s);
        match self {
            GenId::X(a) => w.x[(*a - 1) as usize] = 1,
            GenId::P(i) => w.p[(*i - 1) as usize] = 1,
            GenId::H(a, i) => {
                w.x[(*a - 1) as usize] = 1;
                w.p[(*i - 1) as usize] = 1;
            }
            GenId::BSeed(_, n) => {
                for (slot, &v) in w.x.iter_mut().zip(n) {
                    *slot = -i64::from(v);
                }
            }
            GenId::TCoef(k, l) => {
                for (slot, &v) in w.x.iter_mut().zip(k) {
                    *slot = -i64::from(v);
                }
                for (slot, &v) in w.p.iter_mut().zip(l) {
                    *slot = -i64::from(v);
                }
            }
            GenId::USym(n, a, b) => {
                for (slot, &v) in w.x.iter_mut().zip(n) {
                    *slot = -i64::from(v);
                }
                w.x[(*a - 1) as usize] += 1;
                w.x[(*b - 1) as usize] += 1;
            }
            GenId::ABar(i, j) => {
                w.p[(*i - 1) as usize] -= 1;
                w.p[(*j - 1) as usize] -= 1;
            }
            GenId::BBar(a, b) => {
                w.x[(*a - 1) as usize] -= 1;
                w.x[(*b - 1) as usize] -= 1;
            }
            GenId::BCap(list) => {
                for &k in list {
                    w.p[(k - 1) as usize] += 1;
                }
            }
            GenId::ACap(list) => {
                for &a in list {
                    w.x[(a - 1) as usize] += 1;
                }
            }
            GenId::PBar(i, _, _) => w.p[(*i - 1) as usize] = 1,
            GenId::XBar(a, _, _) => w.x[(*a - 1) as usize] = 1,
            GenId::Kappa(i) => w.p[(*i - 1) as usize] = -1,
            GenId::Theta(a) => w.x[(*a - 1) as usize] = -1,
        }
        w
    }
}

impl PartialOrd for GenId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GenId {
    fn cmp(&self, other: &Self) -> Ordering {
        let r = self.rank().cmp(&other.rank());
        if r != Ordering::Equal {
            return r;
        }
        use GenId::*;
        match (self, other) {
            // Descending index inside X, P and the units, so that the
            // canonical word reads x_s ... x_1 p_s ... p_1 ... kappa_s ...
            (X(a), X(b)) | (P(a), P(b)) | (Kappa(a), Kappa(b)) | (Theta(a), Theta(b)) => b.cmp(a),
            (H(a, i), H(b, j)) => (a, i).cmp(&(b, j)),
            (BSeed(m, n), BSeed(m2, n2)) => (m, n).cmp(&(m2, n2)),
            (TCoef(k, l), TCoef(k2, l2)) => (k, l).cmp(&(k2, l2)),
            (USym(n, a, b), USym(n2, a2, b2)) => (n, a, b).cmp(&(n2, a2, b2)),
            (ABar(i, j), ABar(i2, j2)) | (BBar(i, j), BBar(i2, j2)) => (i, j).cmp(&(i2, j2)),
            (BCap(l), BCap(l2)) | (ACap(l), ACap(l2)) => l.cmp(l2),
            (PBar(i, m, n), PBar(i2, m2, n2)) => (i, m, n).cmp(&(i2, m2, n2)),
            (XBar(a, n, m), XBar(a2, n2, m2)) => (a, n, m).cmp(&(a2, n2, m2)),
            _ => unreachable!("rank already distinguished the tags"),
        }
    }
}

impl fmt::Display for GenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenId::X(a) => write!(f, "x{a}"),
            GenId::P(i) => write!(f, "p{i}"),
            GenId::H(a, i) => write!(f, "h[{a},{i}]"),
            GenId::BSeed(m, n) => write!(f, "bseed[{m};{}]", mi_string(n)),
            GenId::TCoef(k, l) => write!(f, "T[{};{}]", mi_string(k), mi_string(l)),
            GenId::USym(n, a, b) => write!(f, "u[{};{a},{b}]", mi_string(n)),
            GenId::ABar(i, j) => write!(f, "a[{i},{j}]"),
            GenId::BBar(a, b) => write!(f, "b[{a},{b}]"),
            GenId::BCap(list) => write!(
                f,
                "B[{}]",
                list.iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            GenId::ACap(list) => write!(
                f,
                "A[{}]",
                list.iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            GenId::PBar(i, m, n) => write!(f, "pbar[{i};{};{n}]", mi_string(m)),
            GenId::XBar(a, n, m) => write!(f, "xbar[{a};{};{m}]", mi_string(n)),
            GenId::Kappa(i) => write!(f, "kappa{i}"),
            GenId::Theta(a) => write!(f, "theta{a}"),
        }
    }
}

/// Canonicalization of the symmetric generator families. Returns the
/// canonical generator together with the braiding factor absorbed into the
/// coefficient.
///
/// The pair symbols obey `a[i,j] = q[j,i] a[j,i]` and
/// `b[a,b] = q[s+b,s+a] b[b,a]`; the capital families permute by
/// `B[...,v,u,...] = q[v,u] B[...,u,v,...]` (with coordinate-shifted
/// variables for `A`), so an arbitrary index list is bubble-sorted ascending
/// while the adjacent-swap factors accumulate.
pub fn canonical_abar(i: u32, j: u32, ctx: &Context) -> Result<(GenId, QMono)> {
    ctx.check_s_index(i)?;
    ctx.check_s_index(j)?;
    if i <= j {
        Ok((GenId::ABar(i, j), QMono::one()))
    } else {
        // a[i,j] with i > j: a[i,j] = q[j,i] a[j,i]
        Ok((GenId::ABar(j, i), QMono::var(j, i, 1)))
    }
}

pub fn canonical_bbar(a: u32, b: u32, ctx: &Context) -> Result<(GenId, QMono)> {
    ctx.check_s_index(a)?;
    ctx.check_s_index(b)?;
    let s = ctx.s() as u32;
    if a <= b {
        Ok((GenId::BBar(a, b), QMono::one()))
    } else {
        Ok((GenId::BBar(b, a), QMono::var(s + b, s + a, 1)))
    }
}

pub fn canonical_bcap(list: &[u32], ctx: &Context) -> Result<(GenId, QMono)> {
    let (sorted, factor) = sort_with_factor(list, ctx, false)?;
    let g = GenId::BCap(sorted);
    g.validate(ctx)?;
    Ok((g, factor))
}

pub fn canonical_acap(list: &[u32], ctx: &Context) -> Result<(GenId, QMono)> {
    let (sorted, factor) = sort_with_factor(list, ctx, true)?;
    let g = GenId::ACap(sorted);
    g.validate(ctx)?;
    Ok((g, factor))
}

/// Bubble sort ascending; each adjacent swap of entries `(v, u)` with
/// `v > u` contributes `q[v', u']` where the primed indices are the raw
/// entries for the momentum family and `s + entry` for the coordinate one.
fn sort_with_factor(list: &[u32], ctx: &Context, coordinate: bool) -> Result<(Vec<u32>, QMono)> {
    for &k in list {
        ctx.check_s_index(k)?;
    }
    let shift = if coordinate { ctx.s() as u32 } else { 0 };
    let mut v = list.to_vec();
    let mut factor = QMono::one();
    let n = v.len();
    for pass in 0..n {
        for t in 0..n - 1 - pass {
            if v[t] > v[t + 1] {
                factor.mul_var(shift + v[t], shift + v[t + 1], 1);
                v.swap(t, t + 1);
            }
        }
    }
    Ok((v, factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::swap_factor;

    #[test]
    fn pbw_order_places_coordinates_first() {
        let s2_x2 = GenId::X(2);
        let s2_x1 = GenId::X(1);
        let p1 = GenId::P(1);
        let h = GenId::H(1, 1);
        assert!(s2_x2 < s2_x1); // descending index within X
        assert!(s2_x1 < p1);
        assert!(p1 < h);
        assert!(h < GenId::Kappa(1));
    }

    #[test]
    fn weight_table_examples() {
        // h[2,1] at s = 2 -> x-part (0,1), p-part (1,0)
        let w = GenId::H(2, 1).weight(2);
        assert_eq!(w.x, vec![0, 1]);
        assert_eq!(w.p, vec![1, 0]);

        // T[2,0;0,1] -> ((-2,0),(0,-1))
        let w = GenId::TCoef(vec![2, 0], vec![0, 1]).weight(2);
        assert_eq!(w.x, vec![-2, 0]);
        assert_eq!(w.p, vec![0, -1]);

        // kappa1 at s = 2 -> ((0,0),(-1,0))
        let w = GenId::Kappa(1).weight(2);
        assert_eq!(w.x, vec![0, 0]);
        assert_eq!(w.p, vec![-1, 0]);
    }

    #[test]
    fn swap_factor_on_gen_weights_matches_defining_relation() {
        // p_i x_a = q[s+a,i] x_a p_i
        let s = 2;
        let c = swap_factor(&GenId::P(1).weight(s), &GenId::X(2).weight(s));
        assert_eq!(c, QMono::var(4, 1, 1));
    }

    #[test]
    fn bcap_canonicalization_sorts_ascending() {
        let ctx = Context::symbolic(2).unwrap();
        let (g, f) = canonical_bcap(&[2, 1, 1], &ctx).unwrap();
        assert_eq!(g, GenId::BCap(vec![1, 1, 2]));
        // two adjacent swaps of (2,1): factor q[2,1]^2 = q[1,2]^-2
        assert_eq!(f, QMono::var(2, 1, 2));
    }

    #[test]
    fn abar_canonicalization() {
        let ctx = Context::symbolic(2).unwrap();
        let (g, f) = canonical_abar(2, 1, &ctx).unwrap();
        assert_eq!(g, GenId::ABar(1, 2));
        assert_eq!(f, QMono::var(1, 2, 1));
        let (g, f) = canonical_abar(1, 2, &ctx).unwrap();
        assert_eq!(g, GenId::ABar(1, 2));
        assert!(f.is_one());
    }
}
