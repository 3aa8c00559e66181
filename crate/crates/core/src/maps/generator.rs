use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::birmap::{normalize_triple, BirMap};
use super::linear::{adjugate, apply_f64, apply_int, column, combine, det, Mat3};
use crate::error::{Error, Result};
use crate::poly::{HomPoly, ProjPoint};

/// Default retry budget of [`sample_generators`].
pub const SAMPLING_BUDGET: usize = 1000;

/// The quadratic map `a ∘ σ ∘ b` given by two invertible integer matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadratic {
    a: Mat3,
    b: Mat3,
    adj_a: Mat3,
    adj_b: Mat3,
}

fn sigma_int(u: &[BigInt; 3]) -> [BigInt; 3] {
    [&u[1] * &u[2], &u[0] * &u[2], &u[0] * &u[1]]
}

fn sigma_poly(u: &[HomPoly; 3]) -> [HomPoly; 3] {
    [u[1].mul(&u[2]), u[0].mul(&u[2]), u[0].mul(&u[1])]
}

impl Quadratic {
    pub fn new(a: Mat3, b: Mat3) -> Result<Self> {
        if det(&a) == 0 || det(&b) == 0 {
            return Err(Error::InvalidInput("conjugating matrices must be invertible".into()));
        }
        Ok(Quadratic { a, b, adj_a: adjugate(&a), adj_b: adjugate(&b) })
    }

    pub fn a(&self) -> &Mat3 {
        &self.a
    }

    pub fn b(&self) -> &Mat3 {
        &self.b
    }

    pub fn adj_a(&self) -> &Mat3 {
        &self.adj_a
    }

    pub fn adj_b(&self) -> &Mat3 {
        &self.adj_b
    }

    /// The inverse map `b⁻¹ ∘ σ ∘ a⁻¹`.
    pub fn inverse(&self) -> Quadratic {
        Quadratic { a: self.adj_b, b: self.adj_a, adj_a: self.b, adj_b: self.a }
    }

    /// Raw components `a · σ(b · x)`.
    pub fn components(&self) -> [HomPoly; 3] {
        let id = [HomPoly::var(0), HomPoly::var(1), HomPoly::var(2)];
        self.prepend_raw(&id)
    }

    /// Raw triple of `self ∘ w` computed as `a · σ(b · w)`, without gcd
    /// cancellation.
    pub fn prepend_raw(&self, w: &[HomPoly; 3]) -> [HomPoly; 3] {
        combine(&self.a, &sigma_poly(&combine(&self.b, w)))
    }

    /// Base points `b⁻¹(e_i)`: the columns of `adj(b)`.
    pub fn base_points(&self) -> [ProjPoint<BigInt>; 3] {
        std::array::from_fn(|i| {
            ProjPoint::new(column(&self.adj_b, i).map(BigInt::from), 0.0).expect("invertible")
        })
    }

    /// Base points of the inverse, `a(e_j)`: the columns of `a`.
    pub fn inverse_base_points(&self) -> [ProjPoint<BigInt>; 3] {
        std::array::from_fn(|j| {
            ProjPoint::new(column(&self.a, j).map(BigInt::from), 0.0).expect("invertible")
        })
    }

    /// Linear forms whose product is the Jacobian up to a constant: the
    /// rows of `b`. Each is contracted onto an inverse base point.
    pub fn jacobian_lines(&self) -> [[i64; 3]; 3] {
        self.b
    }

    /// Constant factor of the Jacobian: `2 det(a) det(b)`.
    pub fn jacobian_constant(&self) -> i128 {
        2 * det(&self.a) * det(&self.b)
    }

    /// Image of an integer point; `None` at base points.
    pub fn eval_int(&self, p: &[BigInt; 3]) -> Option<[BigInt; 3]> {
        let v = apply_int(&self.a, &sigma_int(&apply_int(&self.b, p)));
        if v.iter().all(num_traits::Zero::is_zero) {
            None
        } else {
            Some(v)
        }
    }

    pub fn eval_f64(&self, p: &[f64; 3]) -> [f64; 3] {
        let u = apply_f64(&self.b, p);
        apply_f64(&self.a, &[u[1] * u[2], u[0] * u[2], u[0] * u[1]])
    }
}

/// A quadratic generator `g = a ∘ σ ∘ b` with its inverse and base points.
#[derive(Clone, Debug)]
pub struct GeneratorData {
    quad: Quadratic,
    map: BirMap,
    base: [ProjPoint<BigInt>; 3],
    inverse_base: [ProjPoint<BigInt>; 3],
}

impl PartialEq for GeneratorData {
    fn eq(&self, other: &Self) -> bool {
        self.quad == other.quad
    }
}

impl GeneratorData {
    pub fn new(a: Mat3, b: Mat3) -> Result<Self> {
        let quad = Quadratic::new(a, b)?;
        let comps = normalize_triple(quad.components());
        let inv = normalize_triple(quad.inverse().components());
        let map = BirMap::from_parts(comps, Some(inv));
        Ok(GeneratorData {
            base: quad.base_points(),
            inverse_base: quad.inverse_base_points(),
            quad,
            map,
        })
    }

    /// The standard involution, `a = b = I`.
    pub fn sigma() -> Self {
        Self::new(super::linear::IDENTITY, super::linear::IDENTITY).expect("identity is invertible")
    }

    pub fn quadratic(&self) -> &Quadratic {
        &self.quad
    }

    /// The map of `g` (inverse = false) or `g⁻¹` (inverse = true).
    pub fn letter_map(&self, inverse: bool) -> Quadratic {
        if inverse {
            self.quad.inverse()
        } else {
            self.quad.clone()
        }
    }

    pub fn map(&self) -> &BirMap {
        &self.map
    }

    pub fn base_points(&self) -> &[ProjPoint<BigInt>; 3] {
        &self.base
    }

    pub fn inverse_base_points(&self) -> &[ProjPoint<BigInt>; 3] {
        &self.inverse_base
    }

    /// Indices `(i, k)` of the base points of `g` on the line contracted to
    /// the inverse base point `q_j`.
    pub fn correspondence(j: usize) -> (usize, usize) {
        match j {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    }

    pub fn to_json(&self) -> GeneratorJson {
        let pts = |ps: &[ProjPoint<BigInt>; 3]| -> Vec<[String; 3]> {
            ps.iter().map(|p| p.coords().clone().map(|c| c.to_string())).collect()
        };
        let inv = self.map.inverse().expect("generators carry inverses");
        GeneratorJson {
            a: self.quad.a,
            b: self.quad.b,
            components: Some(self.map.components().clone().map(|p| p.to_string())),
            inverse_components: Some(inv.components().clone().map(|p| p.to_string())),
            base_points: Some(pts(&self.base)),
            inverse_base_points: Some(pts(&self.inverse_base)),
        }
    }

    /// Rebuilds from JSON; derived fields, when present, must match the
    /// recomputed ones.
    pub fn from_json(j: &GeneratorJson) -> Result<Self> {
        let g = GeneratorData::new(j.a, j.b)?;
        let recomputed = g.to_json();
        let mismatch = |what: &str| Error::InvalidInput(format!("{} do not match the matrices", what));
        if let Some(c) = &j.components {
            let parsed = c.clone().map(|s| s.parse::<HomPoly>());
            let parsed: Vec<HomPoly> = parsed.into_iter().collect::<Result<_>>()?;
            let ours = g.map.components();
            if parsed.len() != 3 || normalize_triple([parsed[0].clone(), parsed[1].clone(), parsed[2].clone()]) != *ours {
                return Err(mismatch("components"));
            }
        }
        if j.inverse_components.is_some() && j.inverse_components != recomputed.inverse_components {
            return Err(mismatch("inverse components"));
        }
        if j.base_points.is_some() && j.base_points != recomputed.base_points {
            return Err(mismatch("base points"));
        }
        if j.inverse_base_points.is_some() && j.inverse_base_points != recomputed.inverse_base_points {
            return Err(mismatch("inverse base points"));
        }
        Ok(g)
    }
}

/// Serialized generator: matrices plus derived data for audit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub a: Mat3,
    pub b: Mat3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse_components: Option<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_points: Option<Vec<[String; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse_base_points: Option<Vec<[String; 3]>>,
}

/// Whether the base points of all generators and inverses are pairwise
/// distinct.
pub fn base_points_distinct(gens: &[GeneratorData]) -> bool {
    let mut all: Vec<&ProjPoint<BigInt>> = Vec::with_capacity(6 * gens.len());
    for g in gens {
        all.extend(g.base_points().iter());
        all.extend(g.inverse_base_points().iter());
    }
    for i in 0..all.len() {
        for j in 0..i {
            if all[i] == all[j] {
                return false;
            }
        }
    }
    true
}

/// Whether no three of the base points of all generators and inverses are
/// collinear.
pub fn base_points_in_general_position(gens: &[GeneratorData]) -> bool {
    let mut all: Vec<&[BigInt; 3]> = Vec::with_capacity(6 * gens.len());
    for g in gens {
        all.extend(g.base_points().iter().map(|p| p.coords()));
        all.extend(g.inverse_base_points().iter().map(|p| p.coords()));
    }
    let n = all.len();
    for i in 0..n {
        for j in 0..i {
            for k in 0..j {
                let (a, b, c) = (all[i], all[j], all[k]);
                let d = &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0])
                    + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0]);
                if d.sign() == num_bigint::Sign::NoSign {
                    return false;
                }
            }
        }
    }
    true
}

fn random_matrix<R: Rng>(rng: &mut R, height: i64) -> Mat3 {
    std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-height..=height)))
}

/// Samples `r` generators `a_i ∘ σ ∘ b_i` with integer entries in
/// `[-height, height]`, rejecting singular matrices and tuples whose base
/// points are not pairwise distinct or have three on a line.
pub fn sample_generators<R: Rng>(r: usize, height: i64, rng: &mut R) -> Result<Vec<GeneratorData>> {
    sample_generators_with_budget(r, height, rng, SAMPLING_BUDGET)
}

pub fn sample_generators_with_budget<R: Rng>(
    r: usize,
    height: i64,
    rng: &mut R,
    budget: usize,
) -> Result<Vec<GeneratorData>> {
    if r < 2 {
        return Err(Error::InvalidInput("at least two generators are required".into()));
    }
    let height = height.max(0);
    for _ in 0..budget {
        let mut gens = Vec::with_capacity(r);
        for _ in 0..r {
            let mut tries = 0;
            let (a, b) = loop {
                let a = random_matrix(rng, height);
                let b = random_matrix(rng, height);
                if det(&a) != 0 && det(&b) != 0 {
                    break (a, b);
                }
                tries += 1;
                if tries >= budget {
                    return Err(Error::SamplingExhausted(budget));
                }
            };
            gens.push(GeneratorData::new(a, b)?);
        }
        if base_points_distinct(&gens) && base_points_in_general_position(&gens) {
            return Ok(gens);
        }
    }
    Err(Error::SamplingExhausted(budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::linear::IDENTITY;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sigma_data() {
        let s = GeneratorData::sigma();
        assert_eq!(s.map(), &BirMap::sigma());
        for i in 0..3 {
            assert_eq!(s.base_points()[i], ProjPoint::coordinate(i));
            assert_eq!(s.inverse_base_points()[i], ProjPoint::coordinate(i));
        }
    }

    #[test]
    fn sampled_generators_vanish_at_base_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gens = sample_generators(2, 5, &mut rng).unwrap();
        assert_eq!(gens.len(), 2);
        assert!(base_points_distinct(&gens));
        for g in &gens {
            assert_eq!(g.map().degree(), 2);
            for p in g.base_points() {
                assert!(g.map().components().iter().all(|c| c.vanishes_at_int(p.coords())));
                assert!(g.quadratic().eval_int(p.coords()).is_none());
            }
            let inv = g.map().inverse().unwrap();
            for q in g.inverse_base_points() {
                assert!(inv.components().iter().all(|c| c.vanishes_at_int(q.coords())));
            }
            assert!(BirMap::compose(g.map(), &inv).unwrap().is_identity());
        }
    }

    #[test]
    fn structured_and_polynomial_evaluation_agree() {
        let g = GeneratorData::new([[1, 2, 0], [0, 1, -1], [3, 0, 1]], [[2, 0, 1], [1, 1, 0], [0, -1, 1]]).unwrap();
        let p = ProjPoint::from_ints([3, -2, 7]).unwrap();
        let direct = g.map().evaluate(&p).unwrap();
        let structured = ProjPoint::new(g.quadratic().eval_int(p.coords()).unwrap(), 0.0).unwrap();
        assert_eq!(direct, structured);
    }

    #[test]
    fn identity_conjugators_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gens = vec![GeneratorData::new(IDENTITY, IDENTITY).unwrap(); 2];
        assert!(!base_points_distinct(&gens));
        assert_eq!(
            sample_generators_with_budget(2, 0, &mut rng, 50).err(),
            Some(Error::SamplingExhausted(50))
        );
    }

    #[test]
    fn json_round_trip_and_tamper_detection() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let gens = sample_generators(2, 4, &mut rng).unwrap();
        let j = gens[0].to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: GeneratorJson = serde_json::from_str(&text).unwrap();
        assert_eq!(GeneratorData::from_json(&back).unwrap(), gens[0]);
        let mut tampered = back.clone();
        tampered.base_points.as_mut().unwrap()[0][0] = "12345".into();
        assert!(GeneratorData::from_json(&tampered).is_err());
        let bare = GeneratorJson { components: None, inverse_components: None, base_points: None, inverse_base_points: None, ..back };
        assert!(GeneratorData::from_json(&bare).is_ok());
    }
}
