use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::registry::{PointId, PointRegistry};
use crate::error::{Error, Result};
use crate::scalar::{Coord, Scalar};

/// A finitely supported class `a_L [L] − Σ a_p [E_p]` in the canonical
/// basis. Coefficients `a_p` are stored as written, so nef-type classes have
/// `a_p ≥ 0`; `[E_p]` itself has `a_p = −1`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeilClassVector<S: Scalar> {
    a_l: S,
    coeffs: BTreeMap<PointId, S>,
}

impl<S: Scalar> WeilClassVector<S> {
    pub fn zero() -> Self {
        WeilClassVector { a_l: S::zero(), coeffs: BTreeMap::new() }
    }

    /// The class `[L]` of a line.
    pub fn line() -> Self {
        WeilClassVector { a_l: S::one(), coeffs: BTreeMap::new() }
    }

    /// The exceptional class `[E_p]`.
    pub fn exceptional(p: PointId) -> Self {
        let mut c = Self::zero();
        c.coeffs.insert(p, S::one().neg());
        c
    }

    pub fn from_parts(a_l: S, coeffs: impl IntoIterator<Item = (PointId, S)>) -> Self {
        let mut c = WeilClassVector { a_l, coeffs: BTreeMap::new() };
        for (p, v) in coeffs {
            c.add_coeff(p, &v);
        }
        c
    }

    pub fn a_l(&self) -> &S {
        &self.a_l
    }

    /// `a_p`, zero off the support.
    pub fn coeff(&self, p: PointId) -> S {
        self.coeffs.get(&p).cloned().unwrap_or_else(S::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (PointId, &S)> {
        self.coeffs.iter().map(|(p, v)| (*p, v))
    }

    /// `a_p` if `p` is in the support.
    pub fn get(&self, p: PointId) -> Option<&S> {
        self.coeffs.get(&p)
    }

    /// Sets `a_p`, removing it from the support on `None`.
    pub fn set_coeff(&mut self, p: PointId, v: Option<S>) {
        match v {
            Some(v) if !v.is_zero() => {
                self.coeffs.insert(p, v);
            }
            _ => {
                self.coeffs.remove(&p);
            }
        }
    }

    pub fn set_a_l(&mut self, v: S) {
        self.a_l = v;
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.coeffs.contains_key(&p)
    }

    pub fn is_zero(&self) -> bool {
        self.a_l.is_zero() && self.coeffs.is_empty()
    }

    /// Adds `v` to `a_p`, dropping exact zeros.
    pub fn add_coeff(&mut self, p: PointId, v: &S) {
        if v.is_zero() {
            return;
        }
        let sum = match self.coeffs.get(&p) {
            Some(old) => old.add(v),
            None => v.clone(),
        };
        if sum.is_zero() {
            self.coeffs.remove(&p);
        } else {
            self.coeffs.insert(p, sum);
        }
    }

    pub fn add_a_l(&mut self, v: &S) {
        self.a_l = self.a_l.add(v);
    }

    /// `self += k · other`.
    pub fn add_scaled(&mut self, other: &Self, k: &S) {
        if k.is_zero() {
            return;
        }
        self.a_l = self.a_l.add(&other.a_l.mul(k));
        for (p, v) in &other.coeffs {
            self.add_coeff(*p, &v.mul(k));
        }
    }

    pub fn scaled(&self, k: &S) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, k);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &S::one().neg());
        out
    }

    /// Intersection form `a_L a'_L − Σ a_p a'_p`.
    pub fn intersect(&self, other: &Self) -> S {
        let (small, large) = if self.coeffs.len() <= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = self.a_l.mul(&other.a_l);
        for (p, v) in &small.coeffs {
            if let Some(w) = large.coeffs.get(p) {
                acc = acc.sub(&v.mul(w));
            }
        }
        acc
    }

    pub fn self_intersection(&self) -> S {
        self.intersect(self)
    }

    /// Euclidean norm in the canonical basis, scaled to avoid underflow.
    pub fn l2_norm(&self) -> f64 {
        scaled_norm(std::iter::once(self.a_l.to_f64()).chain(self.coeffs.values().map(|v| v.to_f64())))
    }

    /// Euclidean distance `‖c − c'‖` over the union of supports.
    pub fn l2_dist(&self, other: &Self) -> f64 {
        self.sub(other).l2_norm()
    }

    /// Hyperbolic distance `cosh⁻¹⟨ĉ, ĉ'⟩` between the normalizations to
    /// self-intersection 1.
    pub fn hyp_dist(&self, other: &Self) -> Result<f64> {
        let line = Self::line();
        for c in [self, other] {
            let s = c.self_intersection().to_f64();
            if s <= 0.0 {
                return Err(Error::NotTimelike(s));
            }
            if c.intersect(&line).to_f64() <= 0.0 {
                return Err(Error::InvalidInput("class is not future-directed".into()));
            }
        }
        let num = self.intersect(other).to_f64();
        let den = (self.self_intersection().to_f64() * other.self_intersection().to_f64()).sqrt();
        Ok((num / den).max(1.0).acosh())
    }

    /// Serializable form with explicit point coordinates.
    pub fn dump<C: Coord>(&self, registry: &PointRegistry<C>) -> ClassDump {
        ClassDump {
            a_l: self.a_l.to_json(),
            entries: self
                .coeffs
                .iter()
                .map(|(p, v)| ClassEntry {
                    point: registry.coords(*p).clone().map(|c| c.to_json()),
                    coeff: v.to_json(),
                })
                .collect(),
        }
    }
}

pub(crate) fn scaled_norm(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = values.clone().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * values.map(|v| (v / m) * (v / m)).sum::<f64>().sqrt()
}

/// Class with point coordinates in place of registry ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassDump {
    pub a_l: Value,
    pub entries: Vec<ClassEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub point: [Value; 3],
    pub coeff: Value,
}

impl ClassDump {
    /// Rebuilds the class inside `registry`, registering its points.
    pub fn load<S: Scalar, C: Coord>(&self, registry: &mut PointRegistry<C>) -> Result<WeilClassVector<S>> {
        let bad = || Error::Parse("malformed class dump".into());
        let a_l = S::from_json(&self.a_l).ok_or_else(bad)?;
        let mut c = WeilClassVector { a_l, coeffs: BTreeMap::new() };
        for e in &self.entries {
            let coords: Vec<C> = e.point.iter().map(C::from_json).collect::<Option<_>>().ok_or_else(bad)?;
            let coords: [C; 3] = coords.try_into().map_err(|_| bad())?;
            let (id, _) = registry.register(coords)?;
            c.add_coeff(id, &S::from_json(&e.coeff).ok_or_else(bad)?);
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_integer(BigInt::from(n))
    }

    fn e(k: u32) -> PointId {
        PointId(k)
    }

    #[test]
    fn intersection_examples() {
        let l = WeilClassVector::<Q>::line();
        assert_eq!(l.intersect(&l), q(1));
        let ep = WeilClassVector::<Q>::from_parts(q(0), [(e(0), q(1))]);
        assert_eq!(ep.self_intersection(), q(-1));
        assert_eq!(WeilClassVector::<Q>::exceptional(e(3)).self_intersection(), q(-1));
        let quad = WeilClassVector::from_parts(q(2), [(e(0), q(1)), (e(1), q(1)), (e(2), q(1))]);
        assert_eq!(quad.self_intersection(), q(1));
        assert_eq!(l.intersect(&quad), q(2));
    }

    #[test]
    fn distances() {
        let l = WeilClassVector::<Q>::line();
        let quad = WeilClassVector::from_parts(q(2), [(e(0), q(1)), (e(1), q(1)), (e(2), q(1))]);
        assert_eq!(l.hyp_dist(&l).unwrap(), 0.0);
        assert!((l.hyp_dist(&quad).unwrap() - 2f64.acosh()).abs() < 1e-12);
        assert!((2f64.acosh() - 1.3169578969248166).abs() < 1e-15);
        assert_eq!(quad.l2_dist(&quad), 0.0);
        assert_eq!(l.l2_dist(&quad), 2.0);
        let ep = WeilClassVector::<Q>::exceptional(e(0));
        assert!(matches!(ep.hyp_dist(&l), Err(Error::NotTimelike(_))));
        let tiny = WeilClassVector::<f64>::from_parts(1e-300, [(e(0), 1e-300)]);
        assert!((tiny.l2_norm() - 1e-300 * 2f64.sqrt()).abs() < 1e-310);
    }

    #[test]
    fn exact_zeros_are_dropped() {
        let mut c = WeilClassVector::<f64>::from_parts(1.0, [(e(0), 1e-30)]);
        c.add_coeff(e(0), &-1e-30);
        assert_eq!(c.support_len(), 0);
        c.add_coeff(e(1), &1e-300);
        assert_eq!(c.support_len(), 1);
    }

    #[test]
    fn dump_round_trip() {
        let mut reg: PointRegistry<BigInt> = PointRegistry::new(0.0);
        let (p, _) = reg.register([1, 2, 3].map(BigInt::from)).unwrap();
        let c = WeilClassVector::from_parts(Q::new(BigInt::from(3), BigInt::from(4)), [(p, q(-2))]);
        let d = c.dump(&reg);
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(text, r#"{"a_l":"3/4","entries":[{"point":["1","2","3"],"coeff":"-2"}]}"#);
        let mut fresh: PointRegistry<BigInt> = PointRegistry::new(0.0);
        let back: WeilClassVector<Q> = d.load(&mut fresh).unwrap();
        assert_eq!(back.dump(&fresh), d);
    }

    fn arb_class() -> impl Strategy<Value = WeilClassVector<Q>> {
        (-20i64..20, prop::collection::vec((0u32..10, -20i64..20), 0..8))
            .prop_map(|(a, cs)| WeilClassVector::from_parts(q(a), cs.into_iter().map(|(p, v)| (e(p), q(v)))))
    }

    proptest! {
        #[test]
        fn norm_identity(c in arb_class()) {
            // ‖c‖² = ⟨c,c⟩ + 2 Σ a_p²
            let sum_sq = c.support().fold(q(0), |acc, (_, v)| acc + v * v);
            let lhs = c.a_l() * c.a_l() + &sum_sq;
            prop_assert_eq!(lhs, c.self_intersection() + q(2) * sum_sq);
            let n = c.l2_norm();
            let exact: f64 = (c.a_l() * c.a_l() + c.support().fold(q(0), |acc, (_, v)| acc + v * v)).to_f64();
            prop_assert!((n * n - exact).abs() <= 1e-9 * exact.max(1.0));
        }

        #[test]
        fn bilinear_and_symmetric(a in arb_class(), b in arb_class(), c in arb_class()) {
            prop_assert_eq!(a.intersect(&b), b.intersect(&a));
            let mut ab = a.clone();
            ab.add_scaled(&b, &q(3));
            prop_assert_eq!(ab.intersect(&c), a.intersect(&c) + q(3) * b.intersect(&c));
        }
    }
}
