use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exponent triple `(i, j, k)` of the monomial `x^i y^j z^k`.
pub type Exps = [u32; 3];

/// Homogeneous polynomial in `x, y, z` with exact rational coefficients.
///
/// Terms are stored sparsely, without zero coefficients, sorted descending
/// in graded lex order with `x > y > z`. Since every term has the same total
/// degree this is plain lex order on `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomPoly {
    degree: u32,
    terms: Vec<(Exps, BigRational)>,
}

/// Number of monomials of degree `d` in three variables.
pub(crate) fn monomial_count(d: u32) -> usize {
    let d = d as usize;
    (d + 1) * (d + 2) / 2
}

/// Dense position of `x^i y^j z^(d-i-j)`; ascending index is descending order.
#[inline]
pub(crate) fn dense_index(d: u32, i: u32, j: u32) -> usize {
    let r = (d - i) as usize;
    r * (r + 1) / 2 + (r - j as usize)
}

pub(crate) fn dense_exps(d: u32) -> Vec<Exps> {
    let mut out = Vec::with_capacity(monomial_count(d));
    for i in (0..=d).rev() {
        for j in (0..=d - i).rev() {
            out.push([i, j, d - i - j]);
        }
    }
    out
}

/// Rational product that skips the gcd reduction for integers.
#[inline]
pub(crate) fn rat_mul(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

/// Rational sum that skips the gcd reduction for integers.
#[inline]
pub(crate) fn rat_add(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() + b.numer())
    } else {
        a + b
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl HomPoly {
    /// The zero polynomial, carrying degree marker `degree`.
    pub fn zero(degree: u32) -> Self {
        HomPoly { degree, terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    /// The coordinate function `x` (0), `y` (1) or `z` (2).
    pub fn var(v: usize) -> Self {
        let mut e = [0; 3];
        e[v] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn monomial(exps: Exps, c: BigRational) -> Self {
        let degree = exps.iter().sum();
        if c.is_zero() {
            return Self::zero(degree);
        }
        HomPoly { degree, terms: vec![(exps, c)] }
    }

    /// Linear form `c0 x + c1 y + c2 z`.
    pub fn linear<T: Clone + Into<BigInt>>(c: &[T; 3]) -> Self {
        let terms = (0..3).map(|v| {
            let mut e = [0; 3];
            e[v] = 1;
            (e, BigRational::from_integer(c[v].clone().into()))
        });
        Self::from_terms(1, terms).expect("linear terms are homogeneous")
    }

    /// Builds a polynomial from arbitrary terms; like terms are combined.
    pub fn from_terms(
        degree: u32,
        terms: impl IntoIterator<Item = (Exps, BigRational)>,
    ) -> Result<Self> {
        let mut map: HashMap<Exps, BigRational> = HashMap::new();
        for (e, c) in terms {
            if e.iter().sum::<u32>() != degree {
                return Err(Error::InvalidInput(format!(
                    "monomial {:?} is not of degree {}",
                    e, degree
                )));
            }
            *map.entry(e).or_insert_with(BigRational::zero) += c;
        }
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by_key(|t| std::cmp::Reverse(t.0));
        Ok(HomPoly { degree, terms })
    }

    /// Builds from integer coefficients.
    pub fn from_int_terms(degree: u32, terms: &[(Exps, i64)]) -> Result<Self> {
        Self::from_terms(degree, terms.iter().map(|(e, c)| (*e, rat(*c))))
    }

    pub(crate) fn from_dense(degree: u32, dense: Vec<BigRational>) -> Self {
        let terms = dense_exps(degree)
            .into_iter()
            .zip(dense)
            .filter(|(_, c)| !c.is_zero())
            .collect();
        HomPoly { degree, terms }
    }

    pub(crate) fn from_dense_int(degree: u32, dense: Vec<BigInt>, denom: &BigInt) -> Self {
        let terms = dense_exps(degree)
            .into_iter()
            .zip(dense)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| {
                if denom.is_one() {
                    (e, BigRational::from_integer(c))
                } else {
                    (e, BigRational::new(c, denom.clone()))
                }
            })
            .collect();
        HomPoly { degree, terms }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[(Exps, BigRational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero and of degree 0.
    pub fn is_constant(&self) -> bool {
        self.degree == 0 && !self.is_zero()
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn coeff(&self, e: &Exps) -> BigRational {
        self.terms
            .binary_search_by(|t| e.cmp(&t.0))
            .map(|k| self.terms[k].1.clone())
            .unwrap_or_else(|_| BigRational::zero())
    }

    /// Scales to leading coefficient 1. Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            Some(lc) if !lc.is_one() => self.scale(&lc.recip()),
            _ => self.clone(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.degree);
        }
        HomPoly {
            degree: self.degree,
            terms: self.terms.iter().map(|(e, v)| (*e, rat_mul(v, c))).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        HomPoly {
            degree: self.degree,
            terms: self.terms.iter().map(|(e, v)| (*e, -v)).collect(),
        }
    }

    /// Sum of two polynomials of the same degree. A zero operand of any
    /// degree is accepted.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.degree != other.degree {
            return Err(Error::InvalidInput(format!(
                "cannot add degree {} and degree {}",
                self.degree, other.degree
            )));
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut a, mut b) = (self.terms.iter().peekable(), other.terms.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => match y.0.cmp(&x.0) {
                    std::cmp::Ordering::Less => out.push(a.next().unwrap().clone()),
                    std::cmp::Ordering::Greater => out.push(b.next().unwrap().clone()),
                    std::cmp::Ordering::Equal => {
                        let s = rat_add(&x.1, &y.1);
                        if !s.is_zero() {
                            out.push((x.0, s));
                        }
                        a.next();
                        b.next();
                    }
                },
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, Some(_)) => out.push(b.next().unwrap().clone()),
                (None, None) => break,
            }
        }
        Ok(HomPoly { degree: self.degree, terms: out })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Integer numerators over a common denominator: `self = Σ n_t m_t / den`.
    pub(crate) fn integer_parts(&self) -> (Vec<(Exps, BigInt)>, BigInt) {
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            if !c.denom().is_one() {
                den = den.lcm(c.denom());
            }
        }
        let nums = self
            .terms
            .iter()
            .map(|(e, c)| {
                let n = if c.denom() == &den {
                    c.numer().clone()
                } else {
                    c.numer() * (&den / c.denom())
                };
                (*e, n)
            })
            .collect();
        (nums, den)
    }

    /// Rational content and primitive integer part: `self = content · prim`,
    /// with the leading coefficient of `prim` positive.
    pub fn content_and_primitive(&self) -> (BigRational, Vec<(Exps, BigInt)>) {
        let (nums, den) = self.integer_parts();
        let mut g = BigInt::zero();
        for (_, n) in &nums {
            g = g.gcd(n);
            if g.is_one() {
                break;
            }
        }
        if g.is_zero() {
            return (BigRational::zero(), nums);
        }
        if nums[0].1.is_negative() {
            g = -g;
        }
        let prim = if g.is_one() {
            nums
        } else {
            nums.into_iter().map(|(e, n)| (e, n / &g)).collect()
        };
        (BigRational::new(g, den), prim)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let degree = self.degree + other.degree;
        if self.is_zero() || other.is_zero() {
            return Self::zero(degree);
        }
        let (a, da) = self.integer_parts();
        let (b, db) = other.integer_parts();
        let dense = mul_int_dense(&a, &b, degree);
        Self::from_dense_int(degree, dense, &(da * db))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Partial derivative with respect to variable `v`.
    pub fn derivative(&self, v: usize) -> Self {
        let degree = self.degree.saturating_sub(1);
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[v] > 0)
            .map(|(e, c)| {
                let mut e2 = *e;
                e2[v] -= 1;
                (e2, c * rat(e[v] as i64))
            })
            .collect();
        HomPoly { degree, terms }
    }

    /// Value at rational coordinates.
    pub fn eval(&self, pt: &[BigRational; 3]) -> BigRational {
        let pows = powers(pt, self.degree);
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            acc += c * &pows[0][e[0] as usize] * &pows[1][e[1] as usize] * &pows[2][e[2] as usize];
        }
        acc
    }

    /// Value at integer coordinates.
    pub fn eval_int(&self, pt: &[BigInt; 3]) -> BigRational {
        let (nums, den) = self.integer_parts();
        BigRational::new(eval_int_terms(&nums, pt, self.degree), den)
    }

    /// Whether the polynomial vanishes at integer coordinates.
    pub fn vanishes_at_int(&self, pt: &[BigInt; 3]) -> bool {
        let (nums, _) = self.integer_parts();
        eval_int_terms(&nums, pt, self.degree).is_zero()
    }

    /// Value at float coordinates.
    pub fn eval_f64(&self, pt: &[f64; 3]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            acc += crate::scalar::ratio_to_f64(c)
                * pt[0].powi(e[0] as i32)
                * pt[1].powi(e[1] as i32)
                * pt[2].powi(e[2] as i32);
        }
        acc
    }

    /// Substitutes `x ↦ g[0], y ↦ g[1], z ↦ g[2]`. The `g[i]` must share one
    /// degree.
    pub fn subst(&self, g: &[HomPoly; 3]) -> Result<Self> {
        let dg = g
            .iter()
            .find(|p| !p.is_zero())
            .map(|p| p.degree)
            .unwrap_or(g[0].degree);
        if g.iter().any(|p| !p.is_zero() && p.degree != dg) {
            return Err(Error::InvalidInput("substituted components differ in degree".into()));
        }
        let degree = self.degree * dg;
        if self.is_zero() {
            return Ok(Self::zero(degree));
        }
        let mut pows: [Vec<HomPoly>; 3] = Default::default();
        for v in 0..3 {
            let maxe = self.terms.iter().map(|(e, _)| e[v]).max().unwrap_or(0);
            let mut list = vec![HomPoly::one()];
            for k in 1..=maxe {
                let next = list[k as usize - 1].mul(&g[v]);
                list.push(next);
            }
            pows[v] = list;
        }
        let mut xy: HashMap<(u32, u32), HomPoly> = HashMap::new();
        let mut dense = vec![BigRational::zero(); monomial_count(degree)];
        let mut any = false;
        for (e, c) in &self.terms {
            let head = xy
                .entry((e[0], e[1]))
                .or_insert_with(|| pows[0][e[0] as usize].mul(&pows[1][e[1] as usize]))
                .clone();
            let prod = head.mul(&pows[2][e[2] as usize]);
            for (pe, pc) in &prod.terms {
                let slot = &mut dense[dense_index(degree, pe[0], pe[1])];
                *slot = rat_add(slot, &rat_mul(pc, c));
                any = true;
            }
        }
        if !any {
            return Ok(Self::zero(degree));
        }
        Ok(Self::from_dense(degree, dense))
    }

    /// Substitutes a linear change of variables `x_i ↦ Σ_j m[i][j] x_j`.
    pub fn linear_subst(&self, m: &[[i64; 3]; 3]) -> Self {
        let forms = [0, 1, 2].map(|i| HomPoly::linear(&m[i]));
        self.subst(&forms).expect("linear forms share degree 1")
    }

    /// Exact quotient `self / b`.
    pub fn div_exact(&self, b: &Self) -> Result<Self> {
        if b.is_zero() {
            return Err(Error::InvalidInput("division by zero polynomial".into()));
        }
        if self.is_zero() {
            return Ok(Self::zero(self.degree.saturating_sub(b.degree)));
        }
        if b.degree > self.degree {
            return Err(Error::NonExactDivision);
        }
        let qd = self.degree - b.degree;
        let (ca, a) = self.content_and_primitive();
        let (cb, bp) = b.content_and_primitive();
        // Gauss: a primitive divisor of an integer polynomial leaves an
        // integer quotient.
        let mut rem = vec![BigInt::zero(); monomial_count(self.degree)];
        for (e, n) in a {
            rem[dense_index(self.degree, e[0], e[1])] = n;
        }
        let (le, lc) = (bp[0].0, bp[0].1.clone());
        let mut q = vec![BigInt::zero(); monomial_count(qd)];
        let exps = dense_exps(self.degree);
        for (idx, e) in exps.iter().enumerate() {
            if rem[idx].is_zero() {
                continue;
            }
            if e[0] < le[0] || e[1] < le[1] || e[2] < le[2] {
                return Err(Error::NonExactDivision);
            }
            let (qc, r) = rem[idx].div_rem(&lc);
            if !r.is_zero() {
                return Err(Error::NonExactDivision);
            }
            let qe = [e[0] - le[0], e[1] - le[1], e[2] - le[2]];
            for (be, bc) in &bp {
                let t = dense_index(self.degree, qe[0] + be[0], qe[1] + be[1]);
                rem[t] -= &qc * bc;
            }
            q[dense_index(qd, qe[0], qe[1])] = qc;
        }
        let quot = Self::from_dense_int(qd, q, &BigInt::one());
        Ok(quot.scale(&(ca / cb)))
    }

    /// Minimum exponent of each variable over all terms.
    pub fn monomial_content(&self) -> Exps {
        let mut m = [u32::MAX; 3];
        for (e, _) in &self.terms {
            for v in 0..3 {
                m[v] = m[v].min(e[v]);
            }
        }
        if self.is_zero() {
            [0; 3]
        } else {
            m
        }
    }

    /// Divides by the monomial `x^m0 y^m1 z^m2`, which must divide every term.
    pub fn shift_down(&self, m: &Exps) -> Self {
        let degree = self.degree - m.iter().sum::<u32>();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| ([e[0] - m[0], e[1] - m[1], e[2] - m[2]], c.clone()))
            .collect();
        HomPoly { degree, terms }
    }

    /// Multiplies by the monomial `x^m0 y^m1 z^m2`.
    pub fn shift_up(&self, m: &Exps) -> Self {
        let degree = self.degree + m.iter().sum::<u32>();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| ([e[0] + m[0], e[1] + m[1], e[2] + m[2]], c.clone()))
            .collect();
        HomPoly { degree, terms }
    }

    /// Largest coefficient height in bits (numerator or denominator).
    pub fn height_bits(&self) -> u64 {
        self.terms
            .iter()
            .map(|(_, c)| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

pub(crate) fn powers<T: Clone + One>(pt: &[T; 3], d: u32) -> [Vec<T>; 3]
where
    for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
{
    std::array::from_fn(|v| {
        let mut list = Vec::with_capacity(d as usize + 1);
        list.push(T::one());
        for k in 1..=d as usize {
            let next = &list[k - 1] * &pt[v];
            list.push(next);
        }
        list
    })
}

pub(crate) fn eval_int_terms(terms: &[(Exps, BigInt)], pt: &[BigInt; 3], d: u32) -> BigInt {
    let pows = powers(pt, d);
    let mut acc = BigInt::zero();
    for (e, c) in terms {
        acc += c * &pows[0][e[0] as usize] * &pows[1][e[1] as usize] * &pows[2][e[2] as usize];
    }
    acc
}

/// Products with fewer term pairs than this use the schoolbook loop.
const KRONECKER_THRESHOLD: usize = 400;

pub(crate) fn mul_int_dense(a: &[(Exps, BigInt)], b: &[(Exps, BigInt)], degree: u32) -> Vec<BigInt> {
    if a.len() * b.len() < KRONECKER_THRESHOLD {
        mul_int_schoolbook(a, b, degree)
    } else {
        mul_int_kronecker(a, b, degree)
    }
}

fn mul_int_schoolbook(a: &[(Exps, BigInt)], b: &[(Exps, BigInt)], degree: u32) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); monomial_count(degree)];
    for (ea, ca) in a {
        for (eb, cb) in b {
            acc[dense_index(degree, ea[0] + eb[0], ea[1] + eb[1])] += ca * cb;
        }
    }
    acc
}

/// Multiplies by Kronecker substitution: the coefficient of `x^i y^j` goes
/// to slot `i·(degree+1) + j` of one big integer, with slots wide enough
/// that the balanced digits of the product are its coefficients.
fn mul_int_kronecker(a: &[(Exps, BigInt)], b: &[(Exps, BigInt)], degree: u32) -> Vec<BigInt> {
    let stride = degree as usize + 1;
    let max_bits = |t: &[(Exps, BigInt)]| t.iter().map(|(_, c)| c.bits()).max().unwrap_or(0);
    let pairs = a.len().min(b.len()) as u64;
    let need = max_bits(a) + max_bits(b) + (64 - pairs.leading_zeros()) as u64 + 2;
    let width = need.div_ceil(32) as usize;
    let pack = |t: &[(Exps, BigInt)]| -> BigInt {
        let slots = t.iter().map(|(e, _)| e[0] as usize * stride + e[1] as usize).max().unwrap_or(0) + 1;
        let mut pos = vec![0u32; slots * width];
        let mut neg = vec![0u32; slots * width];
        for (e, c) in t {
            let at = (e[0] as usize * stride + e[1] as usize) * width;
            let digits = c.magnitude().to_u32_digits();
            let target = if c.is_negative() { &mut neg } else { &mut pos };
            target[at..at + digits.len()].copy_from_slice(&digits);
        }
        BigInt::from(BigUint::new(pos)) - BigInt::from(BigUint::new(neg))
    };
    let product = pack(a) * pack(b);
    let negative = product.is_negative();
    let digits = product.magnitude().to_u32_digits();
    let full = BigUint::one() << (32 * width);
    let half = BigUint::one() << (32 * width - 1);
    let mut out = vec![BigInt::zero(); monomial_count(degree)];
    let mut carry = false;
    for slot in 0..stride * stride {
        let lo = (slot * width).min(digits.len());
        let hi = ((slot + 1) * width).min(digits.len());
        if lo == hi && !carry {
            break;
        }
        let mut r = BigUint::new(digits[lo..hi].to_vec());
        if carry {
            r += 1u32;
        }
        let c = if r >= half {
            carry = true;
            BigInt::from(r) - BigInt::from(full.clone())
        } else {
            carry = false;
            BigInt::from(r)
        };
        if c.is_zero() {
            continue;
        }
        let (i, j) = ((slot / stride) as u32, (slot % stride) as u32);
        debug_assert!(i + j <= degree);
        out[dense_index(degree, i, j)] = if negative { -c } else { c };
    }
    out
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::poly::text::format_poly(self))
    }
}

impl std::str::FromStr for HomPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        crate::poly::text::parse_poly(s)
    }
}

impl serde::Serialize for HomPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for HomPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> HomPoly {
        s.parse().unwrap()
    }

    #[test]
    fn dense_index_matches_order() {
        for d in 0..6 {
            let exps = dense_exps(d);
            assert_eq!(exps.len(), monomial_count(d));
            for (k, e) in exps.iter().enumerate() {
                assert_eq!(dense_index(d, e[0], e[1]), k);
            }
            for w in exps.windows(2) {
                assert!(w[0] > w[1]);
            }
        }
    }

    #[test]
    fn products() {
        assert_eq!(p("x + y").mul(&p("x - y")), p("x^2 - y^2"));
        assert_eq!(HomPoly::one().mul(&p("3*x*y - z^2")), p("3*x*y - z^2"));
        assert_eq!(p("y*z").mul(&p("x*z")).mul(&p("x*y")), p("x^2*y^2*z^2"));
        assert_eq!(p("1/2*x").mul(&p("2/3*y")), p("1/3*x*y"));
    }

    #[test]
    fn exact_division() {
        assert_eq!(p("x^2*y*z").div_exact(&p("x")).unwrap(), p("x*y*z"));
        assert_eq!(p("x^2 - y^2").div_exact(&p("x - y")).unwrap(), p("x + y"));
        assert_eq!(p("x^2*y^2*z^2").div_exact(&p("x*y*z")).unwrap(), p("x*y*z"));
        assert_eq!(p("x^2 - y^2").div_exact(&p("2*x - 2*y")).unwrap(), p("1/2*x + 1/2*y"));
        assert_eq!(p("x^2 + y^2").div_exact(&p("x + y")), Err(Error::NonExactDivision));
        assert_eq!(p("x^2").div_exact(&p("2*x + y")), Err(Error::NonExactDivision));
    }

    #[test]
    fn evaluation() {
        let one = BigInt::one();
        assert_eq!(p("x + y + z").eval_int(&[one.clone(), one.clone(), one.clone()]), rat(3));
        let e0 = [BigInt::one(), BigInt::zero(), BigInt::zero()];
        assert!(p("y*z").vanishes_at_int(&e0));
        let q = [BigInt::from(2), BigInt::one(), BigInt::one()];
        assert_eq!(p("x^2 - y^2").eval_int(&q), rat(3));
        assert_eq!(p("x^2 - y^2").eval(&[rat(2), rat(1), rat(1)]), rat(3));
        assert_eq!(p("x^2 - y^2").eval_f64(&[2.0, 1.0, 1.0]), 3.0);
    }

    #[test]
    fn substitution() {
        let sigma = [p("y*z"), p("x*z"), p("x*y")];
        let sq = p("x").subst(&sigma).unwrap();
        assert_eq!(sq, p("y*z"));
        let line = p("x + y + z").subst(&sigma).unwrap();
        assert_eq!(line, p("x*y + x*z + y*z"));
        let m = [[1, 1, 0], [0, 1, 0], [0, 0, 1]];
        assert_eq!(p("x*y").linear_subst(&m), p("x*y + y^2"));
    }

    #[test]
    fn derivatives_and_pow() {
        assert_eq!(p("x^3 + x*y*z").derivative(0), p("3*x^2 + y*z"));
        assert_eq!(p("x^3").derivative(1), HomPoly::zero(2));
        assert_eq!(p("x + y").pow(3), p("x^3 + 3*x^2*y + 3*x*y^2 + y^3"));
    }

    #[test]
    fn homogeneity_is_enforced() {
        assert!(HomPoly::from_int_terms(2, &[([1, 1, 0], 1), ([1, 0, 0], 1)]).is_err());
        assert!(p("x + y").add(&p("x^2")).is_err());
    }

    fn arb_int_terms() -> impl proptest::strategy::Strategy<Value = (u32, Vec<(Exps, BigInt)>)> {
        use proptest::prelude::*;
        (0u32..9).prop_flat_map(|d| {
            let coeff = prop_oneof![
                (-5i64..5).prop_map(BigInt::from),
                any::<i128>().prop_map(|v| BigInt::from(v) << 70u32),
            ];
            prop::collection::vec((0..=d, 0..=d, coeff), 0..40).prop_map(move |ts| {
                let mut seen = std::collections::HashSet::new();
                let terms = ts
                    .into_iter()
                    .filter(|(i, j, c)| i + j <= d && !c.is_zero() && seen.insert((*i, *j)))
                    .map(|(i, j, c)| ([i, j, d - i - j], c))
                    .collect();
                (d, terms)
            })
        })
    }

    proptest::proptest! {
        #[test]
        fn kronecker_matches_schoolbook((da, a) in arb_int_terms(), (db, b) in arb_int_terms()) {
            let d = da + db;
            proptest::prop_assert_eq!(mul_int_kronecker(&a, &b, d), mul_int_schoolbook(&a, &b, d));
        }
    }
}
