//! Greatest common divisors of homogeneous polynomials.
//!
//! Monomial content is split off first. What remains is tested for
//! coprimality by restricting to random lines modulo a 61-bit prime: a
//! common factor of degree `e` restricts to a common binary form of degree
//! `e` on any line not contained in it, so a constant gcd of the restrictions
//! certifies a constant gcd over `Q`. When the certificate fails the gcd is
//! computed exactly by a primitive remainder sequence in `Z[y][x]` after
//! dehomogenizing at `z = 1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hompoly::{Exps, HomPoly};
use crate::error::{Error, Result};

/// Mersenne prime `2^61 - 1`.
pub const MODULUS: u64 = (1u64 << 61) - 1;

const CERTIFICATE_TRIES: usize = 3;

/// Normalized gcd of two polynomials (leading coefficient 1).
pub fn poly_gcd(a: &HomPoly, b: &HomPoly) -> Result<HomPoly> {
    gcd_many(&[a.clone(), b.clone()])
}

/// Normalized gcd of a list of polynomials; zero entries are ignored.
pub fn gcd_many(polys: &[HomPoly]) -> Result<HomPoly> {
    let nonzero: Vec<&HomPoly> = polys.iter().filter(|p| !p.is_zero()).collect();
    if nonzero.is_empty() {
        return Err(Error::InvalidInput("gcd of zero polynomials".into()));
    }
    if nonzero.len() == 1 {
        return Ok(nonzero[0].monic());
    }
    let mut mono = [u32::MAX; 3];
    for p in &nonzero {
        let m = p.monomial_content();
        for v in 0..3 {
            mono[v] = mono[v].min(m[v]);
        }
    }
    let mono_poly = HomPoly::monomial(mono, BigRational::one());
    let reduced: Vec<HomPoly> = nonzero
        .iter()
        .map(|p| p.shift_down(&p.monomial_content()))
        .collect();
    if reduced.iter().any(|p| p.degree() == 0) {
        return Ok(mono_poly);
    }
    if certify_coprime(&reduced) {
        return Ok(mono_poly);
    }
    let mut g = dehomogenize(&reduced[0]);
    for p in &reduced[1..] {
        if bp_degree_total(&g) == 0 {
            break;
        }
        g = bp_gcd(&g, &dehomogenize(p));
    }
    Ok(homogenize(&g).shift_up(&mono).monic())
}

/// Whether `p` and `q` share no nonconstant factor.
pub fn coprime(p: &HomPoly, q: &HomPoly) -> Result<bool> {
    Ok(poly_gcd(p, q)?.degree() == 0)
}

// ---------------------------------------------------------------------------
// modular certificate

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

fn submod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MODULUS - b
    }
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn invmod(a: u64) -> u64 {
    powmod(a, MODULUS - 2)
}

fn reduce(n: &BigInt) -> u64 {
    n.mod_floor(&BigInt::from(MODULUS)).to_u64().expect("reduced below modulus")
}

/// Univariate polynomial mod p, ascending coefficients, trimmed.
type ModPoly = Vec<u64>;

fn trim(p: &mut ModPoly) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn modpoly_rem(a: &ModPoly, b: &ModPoly) -> ModPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let inv = invmod(b[db]);
    while r.len() > db {
        let top = r.len() - 1;
        let f = mulmod(r[top], inv);
        let shift = top - db;
        for (k, bc) in b.iter().enumerate() {
            r[shift + k] = submod(r[shift + k], mulmod(f, *bc));
        }
        trim(&mut r);
    }
    r
}

fn modpoly_gcd_degree(polys: &[ModPoly]) -> usize {
    let mut g: ModPoly = Vec::new();
    for p in polys {
        let mut a = g;
        let mut b = p.clone();
        while !b.is_empty() {
            let r = modpoly_rem(&a, &b);
            a = b;
            b = r;
        }
        g = a;
        if g.len() == 1 {
            return 0;
        }
    }
    g.len().saturating_sub(1)
}

/// Newton interpolation at nodes `0, 1, ..., n-1`, returning ascending
/// monomial coefficients.
fn interpolate(values: &[u64]) -> ModPoly {
    let n = values.len();
    let mut dd = values.to_vec();
    for level in 1..n {
        for k in (level..n).rev() {
            let num = submod(dd[k], dd[k - 1]);
            dd[k] = mulmod(num, invmod(level as u64));
        }
    }
    let mut poly: ModPoly = vec![0; n];
    for k in (0..n).rev() {
        // poly = poly * (s - k) + dd[k]
        let mut next = vec![0u64; n];
        for (m, c) in poly.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if m + 1 < n {
                next[m + 1] = addmod(next[m + 1], *c);
            }
            next[m] = submod(next[m], mulmod(*c, k as u64 % MODULUS));
        }
        next[0] = addmod(next[0], dd[k]);
        poly = next;
    }
    trim(&mut poly);
    poly
}

fn eval_mod(terms: &[(Exps, u64)], pt: &[u64; 3], d: u32) -> u64 {
    let pows: [Vec<u64>; 3] = std::array::from_fn(|v| {
        let mut l = vec![1u64; d as usize + 1];
        for k in 1..=d as usize {
            l[k] = mulmod(l[k - 1], pt[v]);
        }
        l
    });
    let mut acc = 0u64;
    for (e, c) in terms {
        let m = mulmod(
            mulmod(pows[0][e[0] as usize], pows[1][e[1] as usize]),
            pows[2][e[2] as usize],
        );
        acc = addmod(acc, mulmod(*c, m));
    }
    acc
}

/// Restriction `s ↦ p(base + s·dir)` as an ascending polynomial in `s`.
fn restrict(p: &HomPoly, base: &[u64; 3], dir: &[u64; 3]) -> ModPoly {
    let (nums, _) = p.integer_parts();
    let terms: Vec<(Exps, u64)> = nums.iter().map(|(e, n)| (*e, reduce(n))).collect();
    let values: Vec<u64> = (0..=p.degree() as u64)
        .map(|s| {
            let pt = std::array::from_fn(|v| addmod(base[v], mulmod(s, dir[v])));
            eval_mod(&terms, &pt, p.degree())
        })
        .collect();
    interpolate(&values)
}

fn certify_coprime(polys: &[HomPoly]) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9_7f4a_7c15 ^ polys.len() as u64);
    'tries: for _ in 0..CERTIFICATE_TRIES {
        let base: [u64; 3] = std::array::from_fn(|_| rng.random_range(1..MODULUS));
        let dir: [u64; 3] = std::array::from_fn(|_| rng.random_range(1..MODULUS));
        let mut restrictions = Vec::with_capacity(polys.len());
        let mut order_at_dir = usize::MAX;
        for p in polys {
            let r = restrict(p, &base, &dir);
            if r.is_empty() {
                continue 'tries;
            }
            order_at_dir = order_at_dir.min(p.degree() as usize - (r.len() - 1));
            restrictions.push(r);
        }
        if order_at_dir == 0 && modpoly_gcd_degree(&restrictions) == 0 {
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// exact fallback: primitive PRS over Z[y][x]

/// Polynomial in `y` over `Z`, ascending, trimmed.
type ZPoly = Vec<BigInt>;
/// Polynomial in `x` over `Z[y]`, ascending, trimmed.
type BPoly = Vec<ZPoly>;

fn zp_trim(p: &mut ZPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn zp_mul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    zp_trim(&mut out);
    out
}

fn zp_sub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out: ZPoly = (0..n)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_default();
            match b.get(k) {
                Some(y) => x - y,
                None => x,
            }
        })
        .collect();
    zp_trim(&mut out);
    out
}

fn zp_int_content(p: &ZPoly) -> BigInt {
    let mut g = BigInt::zero();
    for c in p {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Primitive part with positive leading coefficient.
fn zp_prim(p: &ZPoly) -> ZPoly {
    if p.is_empty() {
        return Vec::new();
    }
    let mut g = zp_int_content(p);
    if p.last().unwrap().is_negative() {
        g = -g;
    }
    p.iter().map(|c| c / &g).collect()
}

/// Exact quotient in `Z[y]`; `None` when `b` does not divide `a`.
fn zp_div_exact(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    if a.is_empty() {
        return Some(Vec::new());
    }
    if a.len() < b.len() {
        return None;
    }
    let mut r = a.clone();
    let lb = b.last().unwrap();
    let mut q = vec![BigInt::zero(); a.len() - b.len() + 1];
    for k in (0..q.len()).rev() {
        let top = &r[k + b.len() - 1];
        let (qc, rem) = top.div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        for (m, bc) in b.iter().enumerate() {
            r[k + m] -= &qc * bc;
        }
        q[k] = qc;
    }
    if r.iter().all(|c| c.is_zero()) {
        zp_trim(&mut q);
        Some(q)
    } else {
        None
    }
}

fn zp_prem(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut r = a.clone();
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - b.len();
        let mut next: ZPoly = r.iter().map(|c| c * &lb).collect();
        for (m, bc) in b.iter().enumerate() {
            next[shift + m] -= &lr * bc;
        }
        zp_trim(&mut next);
        r = next;
    }
    r
}

fn zp_gcd(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() {
        return zp_prim(b);
    }
    if b.is_empty() {
        return zp_prim(a);
    }
    let g = zp_int_content(a).gcd(&zp_int_content(b));
    let (mut x, mut y) = (zp_prim(a), zp_prim(b));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = zp_prem(&x, &y);
        x = y;
        y = zp_prim(&r);
    }
    if x.len() == 1 {
        return vec![g];
    }
    x.iter().map(|c| c * &g).collect()
}

fn bp_trim(p: &mut BPoly) {
    while p.last().is_some_and(|c| c.is_empty()) {
        p.pop();
    }
}

fn bp_content(p: &BPoly) -> ZPoly {
    let mut g: ZPoly = Vec::new();
    for c in p {
        g = zp_gcd(&g, c);
        if g.len() == 1 && g[0].is_one() {
            break;
        }
    }
    g
}

fn bp_prim(p: &BPoly) -> BPoly {
    let c = bp_content(p);
    let mut out: BPoly = p
        .iter()
        .map(|x| zp_div_exact(x, &c).expect("content divides every coefficient"))
        .collect();
    bp_trim(&mut out);
    out
}

fn bp_prem(a: &BPoly, b: &BPoly) -> BPoly {
    let mut r = a.clone();
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - b.len();
        let mut next: BPoly = r.iter().map(|c| zp_mul(c, &lb)).collect();
        for (m, bc) in b.iter().enumerate() {
            next[shift + m] = zp_sub(&next[shift + m], &zp_mul(&lr, bc));
        }
        bp_trim(&mut next);
        r = next;
    }
    r
}

fn bp_degree_total(p: &BPoly) -> usize {
    p.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_empty())
        .map(|(i, c)| i + c.len() - 1)
        .max()
        .unwrap_or(0)
}

fn bp_gcd(a: &BPoly, b: &BPoly) -> BPoly {
    if a.is_empty() {
        return b.clone();
    }
    if b.is_empty() {
        return a.clone();
    }
    let content = zp_gcd(&bp_content(a), &bp_content(b));
    let (mut x, mut y) = (bp_prim(a), bp_prim(b));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = bp_prem(&x, &y);
        x = y;
        y = if r.is_empty() { r } else { bp_prim(&r) };
    }
    if x.len() == 1 {
        return vec![content];
    }
    x.iter().map(|c| zp_mul(c, &content)).collect()
}

fn dehomogenize(p: &HomPoly) -> BPoly {
    let (_, prim) = p.content_and_primitive();
    let dx = prim.iter().map(|(e, _)| e[0]).max().unwrap_or(0) as usize;
    let mut out: BPoly = vec![Vec::new(); dx + 1];
    for (e, c) in prim {
        let row = &mut out[e[0] as usize];
        if row.len() <= e[1] as usize {
            row.resize(e[1] as usize + 1, BigInt::zero());
        }
        row[e[1] as usize] = c;
    }
    for row in out.iter_mut() {
        zp_trim(row);
    }
    bp_trim(&mut out);
    out
}

fn homogenize(p: &BPoly) -> HomPoly {
    let d = bp_degree_total(p) as u32;
    let terms = p.iter().enumerate().flat_map(|(i, row)| {
        row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(j, c)| {
            let (i, j) = (i as u32, j as u32);
            ([i, j, d - i - j], BigRational::from_integer(c.clone()))
        })
    });
    HomPoly::from_terms(d, terms).expect("homogenized terms share degree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> HomPoly {
        s.parse().unwrap()
    }

    fn is_prime(n: u64) -> bool {
        // deterministic Miller-Rabin for 64-bit inputs
        if n < 2 {
            return false;
        }
        let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
        let powm = |mut a: u64, mut e: u64| {
            let mut r = 1u64;
            while e > 0 {
                if e & 1 == 1 {
                    r = mulm(r, a);
                }
                a = mulm(a, a);
                e >>= 1;
            }
            r
        };
        let (mut d, mut s) = (n - 1, 0);
        while d % 2 == 0 {
            d /= 2;
            s += 1;
        }
        'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            if a % n == 0 {
                continue;
            }
            let mut x = powm(a, d);
            if x == 1 || x == n - 1 {
                continue;
            }
            for _ in 1..s {
                x = mulm(x, x);
                if x == n - 1 {
                    continue 'witness;
                }
            }
            return false;
        }
        true
    }

    #[test]
    fn modulus_is_prime() {
        assert!(is_prime(MODULUS));
        assert!(!is_prime(MODULUS - 2));
    }

    #[test]
    fn interpolation_recovers_coefficients() {
        let poly: ModPoly = vec![5, 0, 3, 7];
        let vals: Vec<u64> = (0..4u64)
            .map(|s| {
                poly.iter()
                    .rev()
                    .fold(0u64, |acc, c| addmod(mulmod(acc, s), *c))
            })
            .collect();
        assert_eq!(interpolate(&vals), poly);
    }

    #[test]
    fn basic_gcds() {
        assert_eq!(poly_gcd(&p("x^2*y"), &p("x*y^2")).unwrap(), p("x*y"));
        assert_eq!(poly_gcd(&p("x^2 - y^2"), &p("x^2 - x*y")).unwrap(), p("x - y"));
        assert_eq!(poly_gcd(&p("y*z"), &p("x*z + x*y")).unwrap(), HomPoly::one());
        assert_eq!(poly_gcd(&p("3*x + 6*y"), &HomPoly::zero(1)).unwrap(), p("x + 2*y"));
        assert!(poly_gcd(&HomPoly::zero(1), &HomPoly::zero(2)).is_err());
    }

    #[test]
    fn fallback_finds_nonmonomial_factor() {
        let f = p("x^2 + 3*x*y - 2*z^2");
        let a = f.mul(&p("x + y + z"));
        let b = f.mul(&p("x - 5*y"));
        assert_eq!(poly_gcd(&a, &b).unwrap(), f.monic());
        let c = p("x*y - z^2").pow(2).mul(&p("y + z"));
        let d = p("x*y - z^2").mul(&p("y + z")).mul(&p("x"));
        assert_eq!(poly_gcd(&c, &d).unwrap(), p("x*y^2 + x*y*z - y*z^2 - z^3"));
    }

    #[test]
    fn gcd_many_over_lists() {
        let l = p("x + y - z");
        let polys = [
            l.mul(&p("x^2 + x*z")),
            l.mul(&p("y^3*z + y*z^3")),
            HomPoly::zero(5),
        ];
        assert_eq!(gcd_many(&polys).unwrap(), l);
    }

    fn arb_poly(max_d: u32) -> impl Strategy<Value = HomPoly> {
        (0..=max_d).prop_flat_map(|d| {
            prop::collection::vec((0..=d, 0..=d, -9i64..10), 1..7).prop_map(move |ts| {
                let terms: Vec<_> = ts
                    .into_iter()
                    .filter(|(i, j, _)| i + j <= d)
                    .map(|(i, j, c)| ([i, j, d - i - j], c))
                    .collect();
                HomPoly::from_int_terms(d, &terms).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn gcd_scales_by_common_factor(
            a in arb_poly(3), b in arb_poly(3), c in arb_poly(2)
        ) {
            prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
            let g = poly_gcd(&a, &b).unwrap();
            let gc = poly_gcd(&a.mul(&c), &b.mul(&c)).unwrap();
            prop_assert_eq!(gc, g.mul(&c).monic());
        }

        #[test]
        fn gcd_divides_both(a in arb_poly(4), b in arb_poly(4)) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            let g = poly_gcd(&a, &b).unwrap();
            prop_assert!(a.div_exact(&g).is_ok());
            prop_assert!(b.div_exact(&g).is_ok());
        }

        #[test]
        fn mul_then_divide(a in arb_poly(4), b in arb_poly(4)) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!(a.mul(&b).div_exact(&b).unwrap(), a);
        }
    }
}
