//! Exact arithmetic in the coefficient ring: Laurent polynomials over the
//! rationals in the formal braiding variables `q[i,j]`, `1 <= i < j <= 2s`.
//!
//! Only canonical pairs `i < j` are stored; a reference to `q[j,i]` enters as
//! exponent `-1` on the pair `(i,j)`. Values are immutable after
//! construction and freely shareable between threads.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{EngineError, Result};

/// Exact rational scalar used throughout the engine.
pub type Rat = num_rational::BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// n! as an exact rational.
pub fn factorial(n: u64) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

/// N! = N_1! N_2! ... N_s! for a multi-index.
pub fn multi_factorial(n: &[u32]) -> Rat {
    n.iter()
        .map(|&k| factorial(u64::from(k)))
        .fold(Rat::one(), |a, b| a * b)
}

/// A canonical braiding-variable index pair `i < j`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct VarPair {
    pub lo: u32,
    pub hi: u32,
}

impl VarPair {
    /// Canonicalize an arbitrary ordered pair. Returns the pair together
    /// with the orientation sign: `+1` if `(i, j)` was already canonical,
    /// `-1` if it referred to the inverse variable. `i == j` is rejected
    /// (that variable is identically 1 and never stored).
    pub fn canon(i: u32, j: u32) -> Option<(VarPair, i64)> {
        if i == j || i == 0 || j == 0 {
            return None;
        }
        if i < j {
            Some((VarPair { lo: i, hi: j }, 1))
        } else {
            Some((VarPair { lo: j, hi: i }, -1))
        }
    }
}

impl fmt::Display for VarPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q[{},{}]", self.lo, self.hi)
    }
}

/// A multiplicative monomial in the braiding variables: a sparse exponent
/// vector, stored as a sorted pair list. This is the value type of every
/// swap factor; the group structure (product, inverse, powers) is exact.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default, Hash)]
pub struct QMono(Vec<(VarPair, i64)>);

impl QMono {
    pub fn one() -> Self {
        QMono(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// `q[i,j]^e` with automatic canonicalization of the pair order.
    pub fn var(i: u32, j: u32, e: i64) -> Self {
        let mut m = QMono::one();
        m.mul_var(i, j, e);
        m
    }

    /// Multiply by `q[i,j]^e` in place.
    pub fn mul_var(&mut self, i: u32, j: u32, e: i64) {
        if e == 0 {
            return;
        }
        if let Some((pair, sign)) = VarPair::canon(i, j) {
            match self.0.binary_search_by(|(p, _)| p.cmp(&pair)) {
                Ok(idx) => {
                    self.0[idx].1 += sign * e;
                    if self.0[idx].1 == 0 {
                        self.0.remove(idx);
                    }
                }
                Err(idx) => self.0.insert(idx, (pair, sign * e)),
            }
        }
        // i == j contributes q[i,i] = 1: nothing stored.
    }

    pub fn mul(&self, other: &QMono) -> QMono {
        if self.0.is_empty() {
            return other.clone();
        }
        if other.0.is_empty() {
            return self.clone();
        }
        // sorted merge
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = self.0[i].1 + other.0[j].1;
                    if e != 0 {
                        out.push((self.0[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        QMono(out)
    }

    pub fn inv(&self) -> QMono {
        QMono(self.0.iter().map(|&(p, e)| (p, -e)).collect())
    }

    pub fn pow(&self, k: i64) -> QMono {
        if k == 0 {
            return QMono::one();
        }
        QMono(self.0.iter().map(|&(p, e)| (p, e * k)).collect())
    }

    pub fn exponents(&self) -> impl Iterator<Item = (&VarPair, &i64)> {
        self.0.iter().map(|(p, e)| (p, e))
    }

    pub fn specialize(&self, assign: &Assignment) -> Result<Rat> {
        let mut acc = Rat::one();
        for &(pair, e) in &self.0 {
            let v = assign.value(pair)?;
            if v.is_zero() {
                return Err(EngineError::ZeroAssignment {
                    i: pair.lo,
                    j: pair.hi,
                });
            }
            acc *= rat_pow(&v, e);
        }
        Ok(acc)
    }
}

fn rat_pow(v: &Rat, e: i64) -> Rat {
    let mut acc = Rat::one();
    let b = if e >= 0 { v.clone() } else { v.recip() };
    for _ in 0..e.unsigned_abs() {
        acc *= &b;
    }
    acc
}

impl fmt::Display for QMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (pair, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{pair}")?;
            } else {
                write!(f, "{pair}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Total assignment of braiding variables used by specialization.
#[derive(Clone, Debug)]
pub enum Assignment {
    /// Every pair maps to 1.
    AllOnes,
    /// Explicit values; missing pairs are an error.
    Map(BTreeMap<VarPair, Rat>),
}

impl Assignment {
    pub fn value(&self, pair: VarPair) -> Result<Rat> {
        match self {
            Assignment::AllOnes => Ok(Rat::one()),
            Assignment::Map(m) => m
                .get(&pair)
                .cloned()
                .ok_or(EngineError::IncompleteAssignment {
                    i: pair.lo,
                    j: pair.hi,
                }),
        }
    }
}

/// Exact Laurent polynomial in the braiding variables over the rationals.
///
/// Invariants: no stored term has a zero rational coefficient, and every
/// exponent vector stores only canonical `i < j` pairs. Addition and
/// multiplication are commutative and associative.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default, Hash)]
pub struct QPoly(BTreeMap<QMono, Rat>);

impl QPoly {
    pub fn zero() -> Self {
        QPoly(BTreeMap::new())
    }

    pub fn one() -> Self {
        QPoly::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        let mut t = BTreeMap::new();
        if !r.is_zero() {
            t.insert(QMono::one(), r);
        }
        QPoly(t)
    }

    pub fn from_mono(m: QMono) -> Self {
        let mut t = BTreeMap::new();
        t.insert(m, Rat::one());
        QPoly(t)
    }

    pub fn from_mono_rat(m: QMono, r: Rat) -> Self {
        let mut t = BTreeMap::new();
        if !r.is_zero() {
            t.insert(m, r);
        }
        QPoly(t)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1
            && self
                .0
                .get(&QMono::one())
                .map(|r| r.is_one())
                .unwrap_or(false)
    }

    /// The rational value, if this polynomial is a constant.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.0.is_empty() {
            return Some(Rat::zero());
        }
        if self.0.len() == 1 {
            if let Some(r) = self.0.get(&QMono::one()) {
                return Some(r.clone());
            }
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QMono, &Rat)> {
        self.0.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.0.len()
    }

    fn add_term(&mut self, m: QMono, r: Rat) {
        if r.is_zero() {
            return;
        }
        match self.0.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(r);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += r;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let mut out = self.clone();
        for (m, r) in &other.0 {
            out.add_term(m.clone(), r.clone());
        }
        out
    }

    pub fn neg(&self) -> QPoly {
        QPoly(
            self.0
                .iter()
                .map(|(m, r)| (m.clone(), -r.clone()))
                .collect(),
        )
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        let mut out = QPoly::zero();
        for (ma, ra) in &self.0 {
            for (mb, rb) in &other.0 {
                out.add_term(ma.mul(mb), ra.clone() * rb.clone());
            }
        }
        out
    }

    pub fn mul_rat(&self, r: &Rat) -> QPoly {
        if r.is_zero() {
            return QPoly::zero();
        }
        QPoly(
            self.0
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * r.clone()))
                .collect(),
        )
    }

    pub fn mul_mono(&self, m: &QMono) -> QPoly {
        QPoly(self.0.iter().map(|(q, c)| (q.mul(m), c.clone())).collect())
    }

    /// Exact rational value under a total assignment of the braiding
    /// variables. Assigning every pair to 1 sums the rational coefficients.
    pub fn specialize(&self, assign: &Assignment) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (m, r) in &self.0 {
            acc += m.specialize(assign)? * r.clone();
        }
        Ok(acc)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, r) in &self.0 {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write_coeff_term(f, r, m)?;
        }
        Ok(())
    }
}

/// Shared formatting of `rational * q-monomial` used by both `QPoly` and the
/// element printer.
pub fn write_coeff_term(f: &mut fmt::Formatter<'_>, r: &Rat, m: &QMono) -> fmt::Result {
    if m.is_one() {
        return write!(f, "{}", format_rat(r));
    }
    let mut lead = true;
    if !r.is_one() {
        write!(f, "{}", format_rat(r))?;
        lead = false;
    }
    for (pair, e) in m.exponents() {
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
    Ok(())
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sign-aware display helpers for printers that join terms with `+`/`-`.
pub fn rat_is_negative(r: &Rat) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_pair_cancels() {
        // q[1,3] * q[3,1] = 1
        let a = QPoly::from_mono(QMono::var(1, 3, 1));
        let b = QPoly::from_mono(QMono::var(3, 1, 1));
        assert!(a.mul(&b).is_one());
    }

    #[test]
    fn exponent_addition() {
        // q[1,3]^2 * (1/2) q[1,3]^-1 = (1/2) q[1,3]
        let a = QPoly::from_mono(QMono::var(1, 3, 2));
        let b = QPoly::from_mono_rat(QMono::var(1, 3, -1), rat(1, 2));
        let p = a.mul(&b);
        assert_eq!(p, QPoly::from_mono_rat(QMono::var(1, 3, 1), rat(1, 2)));
    }

    #[test]
    fn ring_identity_difference_of_squares() {
        // (q12 + q13)(q12 - q13) = q12^2 - q13^2
        let q12 = QPoly::from_mono(QMono::var(1, 2, 1));
        let q13 = QPoly::from_mono(QMono::var(1, 3, 1));
        let lhs = q12.add(&q13).mul(&q12.sub(&q13));
        let rhs = QPoly::from_mono(QMono::var(1, 2, 2)).sub(&QPoly::from_mono(QMono::var(1, 3, 2)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn specialize_examples() {
        // q[1,2]^-3 at q[1,2] -> 1 gives 1
        let a = QPoly::from_mono(QMono::var(1, 2, -3));
        assert_eq!(a.specialize(&Assignment::AllOnes).unwrap(), rat_int(1));

        // 2 q[1,2] + 3 at 1 gives 5
        let b =
            QPoly::from_mono_rat(QMono::var(1, 2, 1), rat_int(2)).add(&QPoly::from_rat(rat_int(3)));
        assert_eq!(b.specialize(&Assignment::AllOnes).unwrap(), rat_int(5));

        // q[1,2]^2 at 1/2 gives 1/4
        let c = QPoly::from_mono(QMono::var(1, 2, 2));
        let mut m = BTreeMap::new();
        m.insert(VarPair { lo: 1, hi: 2 }, rat(1, 2));
        assert_eq!(c.specialize(&Assignment::Map(m)).unwrap(), rat(1, 4));
    }

    #[test]
    fn specialize_missing_pair_errors() {
        let a = QPoly::from_mono(QMono::var(1, 2, 1));
        let m = Assignment::Map(BTreeMap::new());
        assert!(matches!(
            a.specialize(&m),
            Err(EngineError::IncompleteAssignment { i: 1, j: 2 })
        ));
    }

    #[test]
    fn specialize_zero_with_negative_exponent_errors() {
        let a = QPoly::from_mono(QMono::var(1, 2, -1));
        let mut m = BTreeMap::new();
        m.insert(VarPair { lo: 1, hi: 2 }, rat_int(0));
        assert!(matches!(
            a.specialize(&Assignment::Map(m)),
            Err(EngineError::ZeroAssignment { .. })
        ));
    }
}
