use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::linear::LinearMap;
use crate::error::{Error, Result};
use crate::poly::{gcd_many, is_squarefree, jacobian_det, HomPoly, ProjPoint};

/// A birational map of the plane: a coprime triple of forms of one degree,
/// optionally carrying its inverse.
///
/// Triples are kept in a normal form (integer, primitive, positive leading
/// coefficient on the first nonzero component) so equal maps compare equal.
#[derive(Clone, Debug)]
pub struct BirMap {
    comps: [HomPoly; 3],
    inverse: Option<Box<[HomPoly; 3]>>,
    jac: OnceLock<HomPoly>,
}

impl PartialEq for BirMap {
    fn eq(&self, other: &Self) -> bool {
        self.comps == other.comps
    }
}

/// Scales a triple to integer coefficients with unit content and a positive
/// leading coefficient on its first nonzero component.
pub fn normalize_triple(t: [HomPoly; 3]) -> [HomPoly; 3] {
    let mut den = BigInt::from(1);
    let mut num = BigInt::zero();
    for p in &t {
        let (c, _) = p.content_and_primitive();
        if c.is_zero() {
            continue;
        }
        den = num_integer::lcm(den, c.denom().clone());
        num = num_integer::gcd(num, c.numer().clone());
    }
    if num.is_zero() {
        return t;
    }
    let lead_negative = t
        .iter()
        .find(|p| !p.is_zero())
        .and_then(|p| p.leading_coeff())
        .is_some_and(|c| c.is_negative());
    let mut factor = BigRational::new(den, num);
    if lead_negative {
        factor = -factor;
    }
    if factor.is_one() {
        return t;
    }
    t.map(|p| p.scale(&factor))
}

/// Divides a raw triple by the gcd of its components and normalizes.
/// Returns the cancelled triple and the gcd.
pub fn cancel(raw: [HomPoly; 3]) -> Result<([HomPoly; 3], HomPoly)> {
    if raw.iter().all(|p| p.is_zero()) {
        return Err(Error::DegenerateComposition);
    }
    let g = gcd_many(&raw)?;
    let reduced = if g.degree() == 0 {
        raw
    } else {
        let mut out = raw.clone();
        for (o, p) in out.iter_mut().zip(&raw) {
            *o = p.div_exact(&g)?;
        }
        out
    };
    let nonzero: Vec<&HomPoly> = reduced.iter().filter(|p| !p.is_zero()).collect();
    if nonzero.windows(2).all(|w| proportional(w[0], w[1])) {
        return Err(Error::DegenerateComposition);
    }
    Ok((normalize_triple(reduced), g))
}

/// Whether two nonzero polynomials differ by a constant factor.
fn proportional(p: &HomPoly, q: &HomPoly) -> bool {
    let (a, b) = (p.terms(), q.terms());
    if a.len() != b.len() || a.iter().zip(b).any(|(s, t)| s.0 != t.0) {
        return false;
    }
    let (a0, b0) = (&a[0].1, &b[0].1);
    a.iter().zip(b).all(|(s, t)| &s.1 * b0 == &t.1 * a0)
}

fn identity_triple() -> [HomPoly; 3] {
    [HomPoly::var(0), HomPoly::var(1), HomPoly::var(2)]
}

fn substitute(f: &[HomPoly; 3], g: &[HomPoly; 3]) -> Result<[HomPoly; 3]> {
    Ok([f[0].subst(g)?, f[1].subst(g)?, f[2].subst(g)?])
}

impl BirMap {
    /// Validates and normalizes a triple: common degree `d ≥ 1`, coprime
    /// components, nonzero Jacobian.
    pub fn new(comps: [HomPoly; 3]) -> Result<Self> {
        let d = comps.iter().map(|p| p.degree()).max().unwrap_or(0);
        if d == 0 || comps.iter().any(|p| !p.is_zero() && p.degree() != d) {
            return Err(Error::InvalidInput("components must share a degree d ≥ 1".into()));
        }
        let comps = comps.map(|p| if p.is_zero() { HomPoly::zero(d) } else { p });
        let g = gcd_many(&comps)?;
        if g.degree() != 0 {
            return Err(Error::InvalidInput(format!("components share the factor {}", g)));
        }
        let jac = jacobian_det(&comps)?;
        if jac.is_zero() {
            return Err(Error::InvalidInput("Jacobian vanishes identically".into()));
        }
        let map = BirMap { comps: normalize_triple(comps), inverse: None, jac: OnceLock::new() };
        let _ = map.jac.set(jac);
        Ok(map)
    }

    /// Validates a map together with a claimed inverse.
    pub fn with_inverse(comps: [HomPoly; 3], inverse: [HomPoly; 3]) -> Result<Self> {
        let f = BirMap::new(comps)?;
        let g = BirMap::new(inverse)?;
        let fg = cancel(substitute(&f.comps, &g.comps)?)?.0;
        let gf = cancel(substitute(&g.comps, &f.comps)?)?.0;
        if fg != identity_triple() || gf != identity_triple() {
            return Err(Error::InvalidInput("claimed inverse does not invert the map".into()));
        }
        Ok(BirMap { comps: f.comps, inverse: Some(Box::new(g.comps)), jac: f.jac })
    }

    /// Trusted construction from normalized, coprime parts.
    pub(crate) fn from_parts(comps: [HomPoly; 3], inverse: Option<[HomPoly; 3]>) -> Self {
        BirMap { comps, inverse: inverse.map(Box::new), jac: OnceLock::new() }
    }

    pub fn identity() -> Self {
        Self::from_parts(identity_triple(), Some(identity_triple()))
    }

    /// The standard quadratic involution `(yz, xz, xy)`.
    pub fn sigma() -> Self {
        let s: [HomPoly; 3] = [
            HomPoly::from_int_terms(2, &[([0, 1, 1], 1)]).expect("monomial"),
            HomPoly::from_int_terms(2, &[([1, 0, 1], 1)]).expect("monomial"),
            HomPoly::from_int_terms(2, &[([1, 1, 0], 1)]).expect("monomial"),
        ];
        Self::from_parts(s.clone(), Some(s))
    }

    pub fn from_linear(l: &LinearMap) -> Self {
        let inv = l.inverse().components();
        Self::from_parts(normalize_triple(l.components()), Some(normalize_triple(inv)))
    }

    pub fn degree(&self) -> u32 {
        self.comps[0].degree()
    }

    pub fn components(&self) -> &[HomPoly; 3] {
        &self.comps
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn inverse(&self) -> Result<BirMap> {
        let inv = self.inverse.as_ref().ok_or(Error::MissingInverse)?;
        Ok(BirMap::from_parts((**inv).clone(), Some(self.comps.clone())))
    }

    pub fn jacobian(&self) -> &HomPoly {
        self.jac
            .get_or_init(|| jacobian_det(&self.comps).expect("components share a degree"))
    }

    pub fn is_identity(&self) -> bool {
        self.comps == identity_triple()
    }

    /// `f ∘ g` with common factors cancelled.
    pub fn compose(f: &BirMap, g: &BirMap) -> Result<BirMap> {
        let (comps, _) = cancel(substitute(&f.comps, &g.comps)?)?;
        let inverse = match (&f.inverse, &g.inverse) {
            (Some(fi), Some(gi)) => Some(cancel(substitute(gi, fi)?)?.0),
            _ => None,
        };
        Ok(BirMap::from_parts(comps, inverse))
    }

    /// Degree of the gcd removed when composing `f ∘ g`.
    pub fn composition_drop(f: &BirMap, g: &BirMap) -> Result<u32> {
        let (_, gcd) = cancel(substitute(&f.comps, &g.comps)?)?;
        Ok(gcd.degree())
    }

    pub fn evaluate(&self, pt: &ProjPoint<BigInt>) -> Result<ProjPoint<BigInt>> {
        let values: [BigRational; 3] = std::array::from_fn(|i| self.comps[i].eval_int(pt.coords()));
        if values.iter().all(|v| v.is_zero()) {
            return Err(Error::IndeterminatePoint(pt.to_string()));
        }
        let den = values
            .iter()
            .fold(BigInt::from(1), |acc, v| num_integer::lcm(acc, v.denom().clone()));
        let ints = values.map(|v| (v * BigRational::from_integer(den.clone())).to_integer());
        ProjPoint::new(ints, 0.0)
    }

    pub fn evaluate_f64(&self, pt: &ProjPoint<f64>, tol: f64) -> Result<ProjPoint<f64>> {
        let values: [f64; 3] = std::array::from_fn(|i| self.comps[i].eval_f64(pt.coords()));
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale <= tol {
            return Err(Error::IndeterminatePoint(format!("{:?}", pt.coords())));
        }
        ProjPoint::new(values, tol)
    }

    /// Whether every base point is a proper point of the plane, decided by
    /// squarefreeness of the Jacobian of the inverse.
    pub fn has_only_proper_base_points(&self) -> Result<bool> {
        let inv = self.inverse.as_ref().ok_or(Error::MissingInverse)?;
        if inv[0].degree() == 1 {
            return Ok(true);
        }
        is_squarefree(&jacobian_det(inv)?)
    }
}
