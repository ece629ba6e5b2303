//! Expression parser for the textual element grammar.
//!
//! ```text
//! element := term (('+'|'-') term)*
//! term    := rational ('*' factor)* | factor ('*' factor)*
//! factor  := q[i,j] | p<i> | x<a> | h[a,i] | a[i,j] | b[a,b]
//!          | B[i,j,k,...] | A[a,b,l,...] | T[K;L] | bseed[m;N]
//!          | u[N;a,b] | pbar[i;M;n] | xbar[a;N;m]
//!          | kappa<i> | theta<a>
//!          with an optional integer exponent `^e` on any factor
//!          (negative exponents only on q, kappa, theta)
//! ```
//!
//! Multi-indices are comma lists (`T[2,0;0,1]`). Out-of-order symmetric
//! indices are accepted and normalized, e.g. `B[2,1,1]` becomes `B[1,1,2]`
//! with the symmetry braiding factor absorbed into the coefficient. The
//! printer emits canonical PBW order, and `parse(format(e)) == e`.

use crate::context::Context;
use crate::element::{abar_elem, acap_elem, bbar_elem, bcap_elem, Element};
use crate::error::{EngineError, Result};
use crate::gen::GenId;
use crate::qcoeff::{QMono, QPoly, Rat};

pub fn parse_element(text: &str, ctx: &Context) -> Result<Element> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        ctx,
    };
    p.skip_ws();
    let e = p.parse_sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a Context,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> EngineError {
        EngineError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(
            self.peek(),
            Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')
        ) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn parse_sum(&mut self) -> Result<Element> {
        let mut acc = self.parse_term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    self.skip_ws();
                    acc = acc.add(&self.parse_term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    self.skip_ws();
                    acc = acc.sub(&self.parse_term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Element> {
        self.skip_ws();
        let mut coeff = Rat::from_integer(1.into());
        let mut have_any = false;
        let mut acc = Element::one();

        if let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == b'-' {
                coeff = self.parse_rational()?;
                have_any = true;
            }
        }
        acc = acc.scale_rat(&coeff);

        loop {
            self.skip_ws();
            let at_factor = match self.peek() {
                Some(c) if c.is_ascii_alphabetic() => true,
                Some(b'*') => {
                    self.pos += 1;
                    self.skip_ws();
                    true
                }
                _ => false,
            };
            if !at_factor {
                break;
            }
            let f = self.parse_factor()?;
            acc = acc.mul(&f, self.ctx)?;
            have_any = true;
        }
        if !have_any {
            return Err(self.err("expected a term"));
        }
        Ok(acc)
    }

    fn parse_rational(&mut self) -> Result<Rat> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos = start;
            return Err(self.err("expected a number"));
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let mut text = std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .to_string();
        if self.peek() == Some(b'/') {
            // lookahead: only a fraction when digits follow
            if matches!(self.src.get(self.pos + 1), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
                let dstart = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let den = std::str::from_utf8(&self.src[dstart..self.pos]).unwrap();
                if den.chars().all(|c| c == '0') {
                    return Err(self.err("zero denominator"));
                }
                text = format!("{text}/{den}");
            }
        }
        text.parse::<Rat>()
            .map_err(|_| self.err("malformed rational"))
    }

    fn parse_int(&mut self) -> Result<i64> {
        let start = self.pos;
        if matches!(self.peek(), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("integer out of range"))
    }

    fn parse_u32(&mut self) -> Result<u32> {
        let v = self.parse_int()?;
        u32::try_from(v).map_err(|_| self.err("expected a nonnegative index"))
    }

    fn parse_index_list(&mut self) -> Result<Vec<u32>> {
        let mut out = vec![self.parse_u32()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            out.push(self.parse_u32()?);
        }
        Ok(out)
    }

    fn parse_multi_index(&mut self) -> Result<Vec<u32>> {
        let list = self.parse_index_list()?;
        self.ctx.check_multi_index(&list)?;
        Ok(list)
    }

    fn parse_exponent(&mut self) -> Result<i64> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.parse_int()
        } else {
            Ok(1)
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .to_string()
    }

    fn parse_factor(&mut self) -> Result<Element> {
        let word = self.ident();
        match word.as_str() {
            "q" => {
                self.expect(b'[')?;
                let i = self.parse_u32()?;
                self.expect(b',')?;
                let j = self.parse_u32()?;
                self.expect(b']')?;
                self.ctx.check_xi_index(i)?;
                self.ctx.check_xi_index(j)?;
                if i == j {
                    return Err(self.err("q[i,i] is identically 1; use plain rationals"));
                }
                let e = self.parse_exponent()?;
                let poly = QPoly::from_mono(QMono::var(i, j, e));
                Ok(Element::from_qpoly(self.ctx.reduce_poly(&poly)?))
            }
            "p" => {
                let i = self.parse_u32()?;
                self.ctx.check_s_index(i)?;
                self.gen_power(GenId::P(i))
            }
            "x" => {
                let a = self.parse_u32()?;
                self.ctx.check_s_index(a)?;
                self.gen_power(GenId::X(a))
            }
            "kappa" => {
                let i = self.parse_u32()?;
                self.ctx.check_s_index(i)?;
                self.gen_power(GenId::Kappa(i))
            }
            "theta" => {
                let a = self.parse_u32()?;
                self.ctx.check_s_index(a)?;
                self.gen_power(GenId::Theta(a))
            }
            "h" => {
                self.expect(b'[')?;
                let a = self.parse_u32()?;
                self.expect(b',')?;
                let i = self.parse_u32()?;
                self.expect(b']')?;
                let g = GenId::H(a, i);
                g.validate(self.ctx)?;
                self.gen_power(g)
            }
            "a" => {
                self.expect(b'[')?;
                let i = self.parse_u32()?;
                self.expect(b',')?;
                let j = self.parse_u32()?;
                self.expect(b']')?;
                let base = abar_elem(i, j, self.ctx)?;
                self.element_power(base)
            }
            "b" => {
                self.expect(b'[')?;
                let a = self.parse_u32()?;
                self.expect(b',')?;
                let b = self.parse_u32()?;
                self.expect(b']')?;
                let base = bbar_elem(a, b, self.ctx)?;
                self.element_power(base)
            }
            "B" => {
                self.expect(b'[')?;
                let list = self.parse_index_list()?;
                self.expect(b']')?;
                let base = bcap_elem(&list, self.ctx)?;
                self.element_power(base)
            }
            "A" => {
                self.expect(b'[')?;
                let list = self.parse_index_list()?;
                self.expect(b']')?;
                let base = acap_elem(&list, self.ctx)?;
                self.element_power(base)
            }
            "T" => {
                self.expect(b'[')?;
                let k = self.parse_multi_index()?;
                self.expect(b';')?;
                let l = self.parse_multi_index()?;
                self.expect(b']')?;
                let g = GenId::TCoef(k, l);
                g.validate(self.ctx)?;
                self.gen_power(g)
            }
            "bseed" => {
                self.expect(b'[')?;
                let m = self.parse_u32()?;
                self.expect(b';')?;
                let n = self.parse_multi_index()?;
                self.expect(b']')?;
                let g = GenId::BSeed(m, n);
                g.validate(self.ctx)?;
                self.gen_power(g)
            }
            "u" => {
                self.expect(b'[')?;
                let n = self.parse_multi_index()?;
                self.expect(b';')?;
                let a = self.parse_u32()?;
                self.expect(b',')?;
                let b = self.parse_u32()?;
                self.expect(b']')?;
                let g = GenId::USym(n, a, b);
                g.validate(self.ctx)?;
                self.gen_power(g)
            }
            "pbar" => {
                self.expect(b'[')?;
                let i = self.parse_u32()?;
                self.expect(b';')?;
                let m = self.parse_multi_index()?;
                self.expect(b';')?;
                let n = self.parse_u32()?;
                self.expect(b']')?;
                let g = GenId::PBar(i, m, n);
                g.validate(self.ctx)?;
                self.gen_power(g)
            }
            "xbar" => {
                self.expect(b'[')?;
                let a = self.parse_u32()?;
                self.expect(b';')?;
                let n = self.parse_multi_index()?;
                self.expect(b';')?;
                let m = self.parse_u32()?;
                self.expect(b']')?;
                let g = GenId::XBar(a, n, m);
                g.validate(self.ctx)?;
                self.gen_power(g)
            }
            "" => Err(self.err("expected a factor")),
            other => Err(self.err(&format!("unknown generator '{other}'"))),
        }
    }

    fn gen_power(&mut self, g: GenId) -> Result<Element> {
        let e = self.parse_exponent()?;
        if e < 0 && !g.invertible() {
            return Err(EngineError::NegativeExponent(g.to_string()));
        }
        Element::gen_pow(g, e)
    }

    fn element_power(&mut self, base: Element) -> Result<Element> {
        let e = self.parse_exponent()?;
        if e < 0 {
            return Err(self.err("negative exponent on a non-invertible generator"));
        }
        base.pow(e as u32, self.ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::Monomial;

    #[test]
    fn parse_p1_x2_normal_forms() {
        let ctx = Context::symbolic(2).unwrap();
        let e = parse_element("p1*x2", &ctx).unwrap();
        let m = Monomial::from_gen(GenId::X(2), 1)
            .unwrap()
            .merge(&Monomial::from_gen(GenId::P(1), 1).unwrap())
            .unwrap();
        assert_eq!(e.num_terms(), 1);
        assert_eq!(e.coeff(&m), QPoly::from_mono(QMono::var(4, 1, 1)));
    }

    #[test]
    fn parse_single_monomial_with_coefficient() {
        let ctx = Context::symbolic(3).unwrap();
        let e = parse_element("3/2 * q[1,3]^-2 * h[2,1]", &ctx).unwrap();
        assert_eq!(e.num_terms(), 1);
        let m = Monomial::from_gen(GenId::H(2, 1), 1).unwrap();
        assert_eq!(
            e.coeff(&m),
            QPoly::from_mono_rat(QMono::var(1, 3, -2), crate::qcoeff::rat(3, 2))
        );
    }

    #[test]
    fn parse_bcap_normalizes_with_braid_factor() {
        let ctx = Context::symbolic(2).unwrap();
        let e = parse_element("B[2,1,1]", &ctx).unwrap();
        let m = Monomial::from_gen(GenId::BCap(vec![1, 1, 2]), 1).unwrap();
        assert_eq!(e.num_terms(), 1);
        assert_eq!(e.coeff(&m), QPoly::from_mono(QMono::var(2, 1, 2)));
    }

    #[test]
    fn roundtrip_print_parse() {
        let ctx = Context::symbolic(2).unwrap();
        for src in [
            "p1*x2",
            "3/2*q[1,3]^-2*h[2,1] + x1^2*p2",
            "B[2,1,1] - 2*A[1,2,2]",
            "T[2,0;0,1]*bseed[0;1,1] + u[1,0;1,2]",
            "kappa1^-3*theta2^2*pbar[1;2,0;0]*xbar[2;0,1;1]",
            "q[2,3]*q[1,4]^-1*h[1,1]^2",
        ] {
            let e = parse_element(src, &ctx).unwrap();
            let printed = e.to_string();
            let back = parse_element(&printed, &ctx).unwrap();
            assert_eq!(e, back, "roundtrip failed for {src}: printed {printed}");
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let ctx = Context::symbolic(1).unwrap();
        match parse_element("p1*??", &ctx) {
            Err(EngineError::Syntax { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(
            parse_element("p7", &ctx),
            Err(EngineError::IndexOutOfRange(_))
        ));
        assert!(matches!(
            parse_element("y1", &ctx),
            Err(EngineError::Syntax { .. })
        ));
        assert!(matches!(
            parse_element("p1^-1", &ctx),
            Err(EngineError::NegativeExponent(_))
        ));
    }
}
