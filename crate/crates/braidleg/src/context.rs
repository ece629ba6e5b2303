//! Shared computation context: the number of degrees of freedom `s` and the
//! braiding-variable assignment. `s` lives here, not in the values.

use std::collections::BTreeMap;

use num_traits::One;

use crate::error::{EngineError, Result};
use crate::qcoeff::{Assignment, QMono, QPoly, Rat, VarPair};

/// How the braiding variables are interpreted during a computation.
#[derive(Clone, Debug, PartialEq)]
pub enum QAssignment {
    /// All `q[i,j]` stay formal.
    Symbolic,
    /// Every `q[i,j]` is 1; braiding collapses, all weights commute.
    Ones,
    /// Some pairs carry fixed rational values, the rest stay formal.
    /// Used e.g. for the side conditions `q[i,j] = 1` among momenta and
    /// `q[s+a,s+b] = 1` among coordinates.
    Pairs(BTreeMap<VarPair, Rat>),
}

/// Computation context shared by every module. Immutable.
#[derive(Clone, Debug)]
pub struct Context {
    s: usize,
    q: QAssignment,
}

impl Context {
    pub fn symbolic(s: usize) -> Result<Self> {
        Self::new(s, QAssignment::Symbolic)
    }

    pub fn ones(s: usize) -> Result<Self> {
        Self::new(s, QAssignment::Ones)
    }

    pub fn new(s: usize, q: QAssignment) -> Result<Self> {
        if s == 0 {
            return Err(EngineError::Validation("s must be >= 1".into()));
        }
        if let QAssignment::Pairs(map) = &q {
            for pair in map.keys() {
                if pair.lo == 0 || pair.hi as usize > 2 * s || pair.lo >= pair.hi {
                    return Err(EngineError::IndexOutOfRange(format!(
                        "assignment pair ({},{}) outside 1..{}",
                        pair.lo,
                        pair.hi,
                        2 * s
                    )));
                }
            }
        }
        Ok(Context { s, q })
    }

    /// The side conditions used when coordinates commute among themselves
    /// and momenta commute among themselves: `q[i,j] = 1` for `i,j <= s` and
    /// `q[s+a,s+b] = 1` for `a,b <= s`; cross pairs stay formal.
    pub fn side_conditions(s: usize) -> Result<Self> {
        let mut map = BTreeMap::new();
        for i in 1..=s as u32 {
            for j in (i + 1)..=s as u32 {
                map.insert(VarPair { lo: i, hi: j }, Rat::one());
            }
        }
        for a in (s as u32 + 1)..=(2 * s as u32) {
            for b in (a + 1)..=(2 * s as u32) {
                map.insert(VarPair { lo: a, hi: b }, Rat::one());
            }
        }
        Self::new(s, QAssignment::Pairs(map))
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Number of phase-space letters, `2s`.
    pub fn nvars(&self) -> usize {
        2 * self.s
    }

    pub fn q_assignment(&self) -> &QAssignment {
        &self.q
    }

    /// True when every braiding variable is pinned to 1, so that all swap
    /// factors are trivially 1 and the weight discipline carries no
    /// information (classical regime).
    pub fn braiding_trivial(&self) -> bool {
        match &self.q {
            QAssignment::Ones => true,
            QAssignment::Symbolic => self.s == 0,
            QAssignment::Pairs(map) => {
                let n = 2 * self.s as u32;
                let mut pairs = 0usize;
                for (p, v) in map {
                    if !v.is_one() {
                        return false;
                    }
                    if p.hi <= n {
                        pairs += 1;
                    }
                }
                pairs == (n as usize) * (n as usize - 1) / 2
            }
        }
    }

    pub fn check_xi_index(&self, k: u32) -> Result<()> {
        if k == 0 || k as usize > 2 * self.s {
            return Err(EngineError::IndexOutOfRange(format!(
                "phase-space index {k} outside 1..{}",
                2 * self.s
            )));
        }
        Ok(())
    }

    pub fn check_s_index(&self, k: u32) -> Result<()> {
        if k == 0 || k as usize > self.s {
            return Err(EngineError::IndexOutOfRange(format!(
                "index {k} outside 1..{}",
                self.s
            )));
        }
        Ok(())
    }

    pub fn check_multi_index(&self, n: &[u32]) -> Result<()> {
        if n.len() != self.s {
            return Err(EngineError::Dimension(format!(
                "multi-index length {} != s = {}",
                n.len(),
                self.s
            )));
        }
        Ok(())
    }

    /// Apply the assignment to a braid-factor monomial, splitting it into a
    /// rational scale times the residual formal monomial.
    pub fn reduce_mono(&self, m: &QMono) -> Result<(Rat, QMono)> {
        match &self.q {
            QAssignment::Symbolic => Ok((Rat::one(), m.clone())),
            QAssignment::Ones => Ok((Rat::one(), QMono::one())),
            QAssignment::Pairs(map) => {
                let mut scale = Rat::one();
                let mut rest = QMono::one();
                for (pair, &e) in m.exponents() {
                    match map.get(pair) {
                        Some(v) => {
                            if num_traits::Zero::is_zero(v) {
                                return Err(EngineError::ZeroAssignment {
                                    i: pair.lo,
                                    j: pair.hi,
                                });
                            }
                            scale *= pow_rat(v, e);
                        }
                        None => rest.mul_var(pair.lo, pair.hi, e),
                    }
                }
                Ok((scale, rest))
            }
        }
    }

    /// Apply the assignment to a full coefficient polynomial.
    pub fn reduce_poly(&self, p: &QPoly) -> Result<QPoly> {
        match &self.q {
            QAssignment::Symbolic => Ok(p.clone()),
            _ => {
                let mut out = QPoly::zero();
                for (m, r) in p.terms() {
                    let (scale, rest) = self.reduce_mono(m)?;
                    out = out.add(&QPoly::from_mono_rat(rest, scale * r.clone()));
                }
                Ok(out)
            }
        }
    }

    /// The total assignment for final specialization, when one exists.
    pub fn full_assignment(&self) -> Option<Assignment> {
        match &self.q {
            QAssignment::Ones => Some(Assignment::AllOnes),
            QAssignment::Symbolic => None,
            QAssignment::Pairs(_) => None,
        }
    }
}

fn pow_rat(v: &Rat, e: i64) -> Rat {
    let base = if e >= 0 { v.clone() } else { v.recip() };
    let mut acc = Rat::one();
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcoeff::rat_int;

    #[test]
    fn side_conditions_reduce() {
        let ctx = Context::side_conditions(2).unwrap();
        // q[1,2] (momentum-momentum) reduces to 1, q[1,3] stays formal.
        let (scale, rest) = ctx.reduce_mono(&QMono::var(1, 2, 5)).unwrap();
        assert_eq!(scale, rat_int(1));
        assert!(rest.is_one());
        let (scale, rest) = ctx.reduce_mono(&QMono::var(1, 3, 1)).unwrap();
        assert_eq!(scale, rat_int(1));
        assert_eq!(rest, QMono::var(1, 3, 1));
        assert!(!ctx.braiding_trivial());
        assert!(Context::ones(2).unwrap().braiding_trivial());
    }
}
