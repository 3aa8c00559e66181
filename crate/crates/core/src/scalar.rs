//! Arithmetic modes.
//!
//! Polynomial algebra is always exact (`BigRational` coefficients). Point
//! transport and class bookkeeping run either in exact mode (integer
//! projective coordinates, rational class coefficients) or in float mode
//! (unit-norm `f64` coordinates, `f64` coefficients). The [`Mode`] trait
//! bundles the two choices so walk code is written once.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default tolerance for float-mode comparisons against zero.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Coefficients of Picard-Manin classes.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// `2^-k`.
    fn pow2_neg(k: u32) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Exact zero test. Coefficients of boundary classes legitimately get
    /// far below any geometric tolerance, so no epsilon is applied here.
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
    fn is_negative(&self) -> bool;
    /// Exact values serialize as `"p/q"` strings, floats as numbers.
    fn to_json(&self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value) -> Option<Self>;
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn pow2_neg(k: u32) -> Self {
        BigRational::new_raw(BigInt::one(), BigInt::one() << k as usize)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        v.as_str()?.parse().ok()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn pow2_neg(k: u32) -> Self {
        0.5f64.powi(k as i32)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        v.as_f64()
    }
}

/// Converts a rational to the nearest-ish `f64` without overflowing on huge
/// numerators and denominators.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (ToPrimitive::to_f64(r.numer()), ToPrimitive::to_f64(r.denom())) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n = ToPrimitive::to_f64(&(r.numer() >> shift_n as usize)).unwrap_or(0.0);
    let d = ToPrimitive::to_f64(&(r.denom() >> shift_d as usize)).unwrap_or(1.0);
    (n / d) * 2f64.powi((shift_n - shift_d) as i32)
}

/// Homogeneous coordinates of projective points.
pub trait Coord: Clone + Debug + PartialEq + Send + Sync + 'static {
    /// Registry lookup key: the canonical coordinates themselves in exact
    /// mode, a grid cell in float mode.
    type Key: Hash + Eq + Clone + Debug + Send + Sync;

    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn mul_i64(&self, k: i64) -> Self;
    /// Zero test; float mode compares against `tol` after normalization.
    fn is_zero_tol(&self, tol: f64) -> bool;
    fn to_f64(&self) -> f64;
    fn to_json(&self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value) -> Option<Self>;

    /// Brings a triple to canonical form. Returns `false` for the zero triple.
    fn normalize(v: &mut [Self; 3], tol: f64) -> bool;
    /// Key under which a normalized triple is stored.
    fn home_key(v: &[Self; 3], cell: f64) -> Self::Key;
    /// Keys that may hold a match for `v` (including its home key).
    fn keys(v: &[Self; 3], cell: f64) -> Vec<Self::Key>;
    /// `f64` coordinates of a projectively rescaled copy.
    fn triple_to_f64(v: &[Self; 3]) -> [f64; 3] {
        std::array::from_fn(|i| v[i].to_f64())
    }
    /// `m · v` for an integer matrix.
    fn apply_mat(m: &[[i64; 3]; 3], v: &[Self; 3]) -> [Self; 3];
    /// Which coordinates count as zero; float mode compares against `tol`
    /// relative to the largest coordinate.
    fn zero_flags(v: &[Self; 3], tol: f64) -> [bool; 3];
    /// Removes cheap common factors without reaching normal form.
    fn reduce_partial(_v: &mut [Self; 3]) {}
    /// Projective distance between two normalized triples.
    fn distance(a: &[Self; 3], b: &[Self; 3]) -> f64;
    /// Whether two normalized triples denote the same point.
    fn same_point(a: &[Self; 3], b: &[Self; 3], tol: f64) -> bool;
}

impl Coord for BigInt {
    type Key = [BigInt; 3];

    fn zero() -> Self {
        Zero::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn mul_i64(&self, k: i64) -> Self {
        self * k
    }
    fn is_zero_tol(&self, _tol: f64) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        v.as_str()?.parse().ok()
    }

    fn normalize(v: &mut [Self; 3], _tol: f64) -> bool {
        let Some(first) = v.iter().position(|c| !Zero::is_zero(c)) else {
            return false;
        };
        let mut g = <BigInt as Zero>::zero();
        for c in v.iter() {
            if !Zero::is_zero(c) {
                g = if Zero::is_zero(&g) { c.abs() } else { gcd_int(&g, c) };
                if g.is_one() {
                    break;
                }
            }
        }
        if v[first].is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for c in v.iter_mut() {
                *c = &*c / &g;
            }
        }
        true
    }
    fn home_key(v: &[Self; 3], _cell: f64) -> Self::Key {
        v.clone()
    }
    fn triple_to_f64(v: &[Self; 3]) -> [f64; 3] {
        int_triple_to_f64(v)
    }
    fn apply_mat(m: &[[i64; 3]; 3], v: &[Self; 3]) -> [Self; 3] {
        std::array::from_fn(|i| &v[0] * m[i][0] + &v[1] * m[i][1] + &v[2] * m[i][2])
    }
    fn zero_flags(v: &[Self; 3], _tol: f64) -> [bool; 3] {
        std::array::from_fn(|i| Zero::is_zero(&v[i]))
    }
    fn reduce_partial(v: &mut [Self; 3]) {
        strip_small_primes(v)
    }
    fn keys(v: &[Self; 3], _cell: f64) -> Vec<Self::Key> {
        vec![v.clone()]
    }
    fn distance(a: &[Self; 3], b: &[Self; 3]) -> f64 {
        let mut fa = int_triple_to_f64(a);
        let mut fb = int_triple_to_f64(b);
        <f64 as Coord>::normalize(&mut fa, 0.0);
        <f64 as Coord>::normalize(&mut fb, 0.0);
        <f64 as Coord>::distance(&fa, &fb)
    }
    fn same_point(a: &[Self; 3], b: &[Self; 3], _tol: f64) -> bool {
        a == b
    }
}

impl Coord for f64 {
    type Key = [i64; 3];

    fn zero() -> Self {
        0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn mul_i64(&self, k: i64) -> Self {
        self * k as f64
    }
    fn is_zero_tol(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        v.as_f64()
    }

    fn normalize(v: &mut [Self; 3], tol: f64) -> bool {
        let scale = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale == 0.0 || !scale.is_finite() {
            return false;
        }
        let scaled: [f64; 3] = std::array::from_fn(|i| v[i] / scale);
        let norm = scaled.iter().map(|c| c * c).sum::<f64>().sqrt();
        let mut unit: [f64; 3] = std::array::from_fn(|i| scaled[i] / norm);
        let first = unit.iter().position(|c| c.abs() > tol).unwrap_or(0);
        if unit[first] < 0.0 {
            for c in unit.iter_mut() {
                *c = -*c;
            }
        }
        for c in unit.iter_mut() {
            if *c == 0.0 {
                // canonical signed zero
                *c = 0.0;
            }
        }
        *v = unit;
        true
    }
    fn home_key(v: &[Self; 3], cell: f64) -> Self::Key {
        std::array::from_fn(|i| (v[i] / cell).floor() as i64)
    }
    fn apply_mat(m: &[[i64; 3]; 3], v: &[Self; 3]) -> [Self; 3] {
        std::array::from_fn(|i| m[i][0] as f64 * v[0] + m[i][1] as f64 * v[1] + m[i][2] as f64 * v[2])
    }
    fn zero_flags(v: &[Self; 3], tol: f64) -> [bool; 3] {
        let scale = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        std::array::from_fn(|i| v[i].abs() <= tol * scale)
    }
    fn reduce_partial(v: &mut [Self; 3]) {
        let scale = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale > 0.0 && scale.is_finite() {
            for c in v.iter_mut() {
                *c /= scale;
            }
        }
    }
    fn keys(v: &[Self; 3], cell: f64) -> Vec<Self::Key> {
        // The representative of a projective point is only defined up to
        // sign near the normalization boundary, so both signs are probed.
        let mut out = Vec::with_capacity(54);
        for sign in [1.0, -1.0] {
            let base: [i64; 3] = std::array::from_fn(|i| (sign * v[i] / cell).floor() as i64);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        out.push([base[0] + dx, base[1] + dy, base[2] + dz]);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
    fn distance(a: &[Self; 3], b: &[Self; 3]) -> f64 {
        let minus = (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt();
        let plus = (0..3).map(|i| (a[i] + b[i]).powi(2)).sum::<f64>().sqrt();
        minus.min(plus)
    }
    fn same_point(a: &[Self; 3], b: &[Self; 3], tol: f64) -> bool {
        Self::distance(a, b) <= tol
    }
}

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Divides out small primes common to all three coordinates.
/// Size above which [`gcd_int`] switches from the binary gcd to Lehmer's.
const LEHMER_THRESHOLD_BITS: u64 = 2048;

/// Nonnegative gcd of two integers.
pub fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    let (a, b) = (a.magnitude(), b.magnitude());
    if a.bits().min(b.bits()) < LEHMER_THRESHOLD_BITS {
        return BigInt::from(a.gcd(b));
    }
    BigInt::from(lehmer_gcd(a, b))
}

/// Lehmer's gcd with 63-bit leading digits.
fn lehmer_gcd(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut u, mut v) = if a >= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    while v.bits() > 128 {
        let shift = u.bits() - 63;
        let mut x = (&u >> shift).to_u64().unwrap_or(0) as i128;
        let mut y = (&v >> shift).to_u64().unwrap_or(0) as i128;
        let (mut ca, mut cb, mut cc, mut cd) = (1i128, 0i128, 0i128, 1i128);
        while y + cc > 0 && y + cd > 0 && x + ca >= 0 && x + cb >= 0 {
            let q = (x + ca) / (y + cc);
            if q != (x + cb) / (y + cd) {
                break;
            }
            (ca, cc) = (cc, ca - q * cc);
            (cb, cd) = (cd, cb - q * cd);
            (x, y) = (y, x - q * y);
        }
        if cb == 0 {
            let r = &u % &v;
            u = v;
            v = r;
        } else {
            let nu = signed_combination(ca, &u, cb, &v);
            let nv = signed_combination(cc, &u, cd, &v);
            u = nu;
            v = nv;
        }
    }
    if v.is_zero() {
        return u;
    }
    let r = &u % &v;
    v.gcd(&r)
}

/// `s*a + t*b` for cofactors of opposite signs whose combination is nonnegative.
fn signed_combination(s: i128, a: &BigUint, t: i128, b: &BigUint) -> BigUint {
    let (pos, p, neg, n) = if t <= 0 { (s, a, -t, b) } else { (t, b, -s, a) };
    p * BigUint::from(pos as u128) - n * BigUint::from(neg as u128)
}

fn strip_small_primes(v: &mut [BigInt; 3]) {
    if v.iter().all(Zero::is_zero) {
        return;
    }
    let twos = v.iter().filter(|c| !Zero::is_zero(*c)).filter_map(|c| c.trailing_zeros()).min().unwrap_or(0);
    if twos > 0 {
        for c in v.iter_mut() {
            *c = &*c >> twos as usize;
        }
    }
    for &p in &SMALL_PRIMES[1..] {
        loop {
            let divisible = v.iter().all(|c| (c % p).is_zero());
            if !divisible {
                break;
            }
            for c in v.iter_mut() {
                *c = &*c / p;
            }
        }
    }
}

/// Projectively rescaled `f64` image of an integer triple; safe for
/// coordinates far beyond the `f64` range.
pub fn int_triple_to_f64(v: &[BigInt; 3]) -> [f64; 3] {
    let bits = v.iter().map(|c| c.bits()).max().unwrap_or(0);
    let shift = bits.saturating_sub(60) as usize;
    std::array::from_fn(|i| ToPrimitive::to_f64(&(&v[i] >> shift)).unwrap_or(0.0))
}

/// An arithmetic mode: exact or float.
pub trait Mode: Clone + Copy + Debug + Send + Sync + 'static {
    type Scalar: Scalar;
    type Coord: Coord;
    const NAME: &'static str;
    const EXACT: bool;

    fn coord_from_int(v: &BigInt) -> Self::Coord;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Exact;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Float;

impl Mode for Exact {
    type Scalar = BigRational;
    type Coord = BigInt;
    const NAME: &'static str = "exact";
    const EXACT: bool = true;

    fn coord_from_int(v: &BigInt) -> BigInt {
        v.clone()
    }
}

impl Mode for Float {
    type Scalar = f64;
    type Coord = f64;
    const NAME: &'static str = "float";
    const EXACT: bool = false;

    fn coord_from_int(v: &BigInt) -> f64 {
        ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(words: &[u32]) -> BigUint {
        BigUint::new(words.to_vec())
    }

    proptest! {
        #[test]
        fn lehmer_matches_binary_gcd(
            a in prop::collection::vec(any::<u32>(), 1..160),
            b in prop::collection::vec(any::<u32>(), 1..160),
            c in prop::collection::vec(any::<u32>(), 1..40),
        ) {
            let (a, b, c) = (big(&a), big(&b), big(&c));
            let (x, y) = (&a * &c, &b * &c);
            prop_assert_eq!(lehmer_gcd(&x, &y), x.gcd(&y));
            prop_assert_eq!(lehmer_gcd(&a, &b), a.gcd(&b));
        }
    }

    #[test]
    fn gcd_int_is_signless() {
        let a = BigInt::from(3u8).pow(4000) * BigInt::from(-10);
        let b = BigInt::from(3u8).pow(3000) * BigInt::from(14);
        assert_eq!(gcd_int(&a, &b), BigInt::from(3u8).pow(3000) * BigInt::from(2));
        assert_eq!(gcd_int(&b, &BigInt::from(0)), b.abs());
    }

    #[test]
    fn exact_normal_form() {
        let mut v = [BigInt::from(0), BigInt::from(-4), BigInt::from(6)];
        assert!(<BigInt as Coord>::normalize(&mut v, 0.0));
        assert_eq!(v, [BigInt::from(0), BigInt::from(2), BigInt::from(-3)]);
        let mut z = [BigInt::from(0), BigInt::from(0), BigInt::from(0)];
        assert!(!<BigInt as Coord>::normalize(&mut z, 0.0));
    }

    #[test]
    fn float_normal_form_is_projective() {
        let mut a = [2.0, -1.0, 2.0];
        let mut b = [-4.0, 2.0, -4.0];
        <f64 as Coord>::normalize(&mut a, 1e-9);
        <f64 as Coord>::normalize(&mut b, 1e-9);
        assert_eq!(a, b);
        assert!((a[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn huge_rational_to_f64() {
        let r = BigRational::new(BigInt::one(), BigInt::one() << 2000usize);
        assert_eq!(ratio_to_f64(&r), 0.0);
        let r = BigRational::new(BigInt::from(3) << 1100usize, BigInt::one() << 1101usize);
        assert!((ratio_to_f64(&r) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn pow2_neg_agrees() {
        for k in [0u32, 1, 7, 40] {
            let e = <BigRational as Scalar>::pow2_neg(k);
            assert_eq!(Scalar::to_f64(&e), <f64 as Scalar>::pow2_neg(k));
        }
    }
}
