//! Text form of [`HomPoly`]: signed monomials `c*x^i*y^j*z^k`, unit
//! exponents and unit coefficients omitted, zero written as `0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::hompoly::{Exps, HomPoly};
use crate::error::{Error, Result};

const VARS: [char; 3] = ['x', 'y', 'z'];

pub fn format_poly(p: &HomPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (e, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let a = c.abs();
        let mut factors: Vec<String> = Vec::new();
        let is_const = e.iter().all(|&x| x == 0);
        if !a.is_one() || is_const {
            factors.push(a.to_string());
        }
        for v in 0..3 {
            match e[v] {
                0 => {}
                1 => factors.push(VARS[v].to_string()),
                n => factors.push(format!("{}^{}", VARS[v], n)),
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{} at byte {}", msg, self.pos))
    }

    fn digits(&mut self) -> Result<&str> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits"))
    }

    fn factor(&mut self, coeff: &mut BigRational, exps: &mut Exps) -> Result<()> {
        match self.peek() {
            Some(b'0'..=b'9') => {
                let n: BigInt = self.digits()?.parse().map_err(|_| self.err("bad integer"))?;
                let mut value = BigRational::from_integer(n);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let d: BigInt = self.digits()?.parse().map_err(|_| self.err("bad integer"))?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    value /= BigRational::from_integer(d);
                }
                *coeff *= value;
            }
            Some(c @ (b'x' | b'y' | b'z')) => {
                self.pos += 1;
                let v = (c - b'x') as usize;
                let mut n = 1u32;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    n = self.digits()?.parse().map_err(|_| self.err("bad exponent"))?;
                }
                exps[v] += n;
            }
            _ => return Err(self.err("expected a number or a variable")),
        }
        Ok(())
    }
}

pub fn parse_poly(s: &str) -> Result<HomPoly> {
    let cleaned: Vec<u8> = s.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut cur = Cursor { s: &cleaned, pos: 0 };
    let mut terms: Vec<(Exps, BigRational)> = Vec::new();
    loop {
        let mut coeff = BigRational::one();
        match cur.peek() {
            Some(b'-') => {
                coeff = -coeff;
                cur.pos += 1;
            }
            Some(b'+') => cur.pos += 1,
            _ if terms.is_empty() => {}
            None => break,
            _ => return Err(cur.err("expected + or -")),
        }
        let mut exps = [0u32; 3];
        cur.factor(&mut coeff, &mut exps)?;
        while cur.peek() == Some(b'*') {
            cur.pos += 1;
            cur.factor(&mut coeff, &mut exps)?;
        }
        terms.push((exps, coeff));
        if cur.peek().is_none() {
            break;
        }
    }
    let degree = terms[0].0.iter().sum();
    let p = HomPoly::from_terms(degree, terms)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats() {
        let p = HomPoly::from_int_terms(2, &[([2, 0, 0], 1), ([0, 2, 0], -1)]).unwrap();
        assert_eq!(format_poly(&p), "x^2 - y^2");
        let q = HomPoly::from_terms(
            3,
            [([1, 1, 1], BigRational::new(BigInt::from(-3), BigInt::from(2)))],
        )
        .unwrap();
        assert_eq!(format_poly(&q), "-3/2*x*y*z");
        assert_eq!(format_poly(&HomPoly::zero(4)), "0");
        assert_eq!(format_poly(&HomPoly::constant(BigRational::one())), "1");
    }

    #[test]
    fn parses() {
        let p = parse_poly(" 2*x*y - z^2 + x*2*y ").unwrap();
        assert_eq!(p.to_string(), "4*x*y - z^2");
        assert!(parse_poly("x + y^2").is_err());
        assert!(parse_poly("x +").is_err());
        assert!(parse_poly("1/0*x").is_err());
        assert!(parse_poly("0").unwrap().is_zero());
    }

    fn arb_poly() -> impl Strategy<Value = HomPoly> {
        (0u32..5).prop_flat_map(|d| {
            prop::collection::vec((0..=d, 0..=d, -20i64..20, 1i64..6), 0..8).prop_map(move |ts| {
                let terms = ts.into_iter().filter(|(i, j, _, _)| i + j <= d).map(|(i, j, n, m)| {
                    ([i, j, d - i - j], BigRational::new(BigInt::from(n), BigInt::from(m)))
                });
                HomPoly::from_terms(d, terms).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip(p in arb_poly()) {
            let q = parse_poly(&format_poly(&p)).unwrap();
            if p.is_zero() {
                prop_assert!(q.is_zero());
            } else {
                prop_assert_eq!(q, p);
            }
        }
    }
}
