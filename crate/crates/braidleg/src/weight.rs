//! Braiding weights and the swap factor.
//!
//! Every generator carries a pair of signed multi-indices `(x-part, p-part)`
//! stating that it commutes with everything exactly as the formal word
//! `x^M p^N` would. The swap factor of two weights is the unique braiding
//! monomial `C` with `f g = C g f` for `f`, `g` of those weights; it is
//! bimultiplicative in each argument and `C(w1,w2) C(w2,w1) = 1`.
//!
//! The factor is derived from the defining relations of the quantum affine
//! space (`xi_a xi_b = q[b,a] xi_b xi_a`, so a single adjacent transposition
//! of letters `a` left of `b` contributes `q[b,a]`): moving every letter of
//! the right word past every letter of the left word gives
//!
//! ```text
//! C(wL, wR) = prod_{a,b in [2s]} q[b,a]^( dL_a * dR_b )
//! ```
//!
//! where `d` is the signed letter-degree vector of a weight (`d_k = p-part_k`
//! for `k <= s`, `d_{s+a} = x-part_a`).

use std::fmt;

use crate::context::Context;
use crate::error::{EngineError, Result};
use crate::qcoeff::QMono;

/// Nonnegative multi-index of length `s`.
pub type MultiIndex = Vec<u32>;

pub fn mi_zero(s: usize) -> MultiIndex {
    vec![0; s]
}

pub fn mi_unit(s: usize, k: u32) -> MultiIndex {
    let mut m = vec![0; s];
    m[(k - 1) as usize] = 1;
    m
}

pub fn mi_add(a: &[u32], b: &[u32]) -> MultiIndex {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn mi_total(a: &[u32]) -> u32 {
    a.iter().sum()
}

/// Format a multi-index as a comma list, e.g. `2,0,1`.
pub fn mi_string(a: &[u32]) -> String {
    a.iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Signed braiding weight: the pair `(x-part, p-part)`, each of length `s`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct BraidWeight {
    pub x: Vec<i64>,
    pub p: Vec<i64>,
}

impl BraidWeight {
    pub fn zero(s: usize) -> Self {
        BraidWeight {
            x: vec![0; s],
            p: vec![0; s],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.iter().all(|&v| v == 0) && self.p.iter().all(|&v| v == 0)
    }

    pub fn add(&self, other: &BraidWeight) -> BraidWeight {
        BraidWeight {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect(),
            p: self.p.iter().zip(&other.p).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> BraidWeight {
        BraidWeight {
            x: self.x.iter().map(|a| a * k).collect(),
            p: self.p.iter().map(|a| a * k).collect(),
        }
    }

    /// Signed letter-degree over the `2s` phase-space indices:
    /// momenta first, then coordinates.
    pub fn xi_degree(&self) -> Vec<i64> {
        let mut d = Vec::with_capacity(self.p.len() + self.x.len());
        d.extend_from_slice(&self.p);
        d.extend_from_slice(&self.x);
        d
    }

    pub fn from_unsigned(x: &[u32], p: &[u32]) -> Self {
        BraidWeight {
            x: x.iter().map(|&v| i64::from(v)).collect(),
            p: p.iter().map(|&v| i64::from(v)).collect(),
        }
    }

    pub fn check_dim(&self, ctx: &Context) -> Result<()> {
        if self.x.len() != ctx.s() || self.p.len() != ctx.s() {
            return Err(EngineError::Dimension(format!(
                "weight over s = {} used in context with s = {}",
                self.x.len(),
                ctx.s()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for BraidWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x:{:?}, p:{:?})", self.x, self.p)
    }
}

/// The braiding monomial `C` with `f g = C g f` when `f` has weight `left`
/// and `g` has weight `right`.
pub fn swap_factor(left: &BraidWeight, right: &BraidWeight) -> QMono {
    let dl = left.xi_degree();
    let dr = right.xi_degree();
    debug_assert_eq!(dl.len(), dr.len());
    let mut out = QMono::one();
    for (a, &la) in dl.iter().enumerate() {
        for (b, &rb) in dr.iter().enumerate() {
            if a == b {
                continue;
            }
            let e = la * rb;
            if e != 0 {
                // q[b,a]^e with 1-based indices
                out.mul_var(b as u32 + 1, a as u32 + 1, e);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(x: Vec<i64>, p: Vec<i64>) -> BraidWeight {
        BraidWeight { x, p }
    }

    #[test]
    fn momentum_past_coordinate() {
        // p_i x_a = q[s+a, i] x_a p_i at s = 2, i = 1, a = 2
        let wp = w(vec![0, 0], vec![1, 0]);
        let wx = w(vec![0, 1], vec![0, 0]);
        assert_eq!(swap_factor(&wp, &wx), QMono::var(4, 1, 1));
    }

    #[test]
    fn self_swap_is_one() {
        let v = w(vec![1, -2], vec![3, 0]);
        assert!(swap_factor(&v, &v).is_one());
    }

    #[test]
    fn antisymmetry_and_bimultiplicativity() {
        let a = w(vec![1, 0], vec![0, 2]);
        let b = w(vec![-1, 1], vec![1, 0]);
        let c = w(vec![0, 3], vec![-2, 1]);
        assert!(swap_factor(&a, &b).mul(&swap_factor(&b, &a)).is_one());
        let lhs = swap_factor(&a.add(&b), &c);
        let rhs = swap_factor(&a, &c).mul(&swap_factor(&b, &c));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn momentum_past_planck_generator() {
        // p_i h_{a,j} = q[s+a,i] q[j,i] h_{a,j} p_i at s = 2, i = 1, a = 2, j = 2
        let wp = w(vec![0, 0], vec![1, 0]);
        let wh = w(vec![0, 1], vec![0, 1]);
        let expect = QMono::var(4, 1, 1).mul(&QMono::var(2, 1, 1));
        assert_eq!(swap_factor(&wp, &wh), expect);
    }
}
