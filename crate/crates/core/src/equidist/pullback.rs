use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::curve::PlaneCurve;
use crate::error::{Error, Result};
use crate::maps::word::jacobian_factors;
use crate::maps::{format_word, GeneratorData, Letter, WordChain, DEFAULT_DEGREE_CAP};
use crate::picard::{OperatorSet, PointId, PointRegistry, WeilClassVector};
use crate::poly::{gcd_many, multiplicity_at, HomPoly};
use crate::scalar::{Coord, Exact};

mod poly_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::poly::text::{format_poly, parse_poly};
    use crate::poly::HomPoly;

    pub fn serialize<S: Serializer>(p: &HomPoly, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_poly(p))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<HomPoly, D::Error> {
        let s = String::deserialize(d)?;
        parse_poly(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemovedFactor {
    #[serde(with = "poly_text")]
    pub factor: HomPoly,
    pub degree: u32,
    pub exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasePointMultiplicity {
    pub point: [Value; 3],
    /// Multiplicity of the strict transform at the point.
    pub nu: u32,
    /// Multiplicity of the word's linear system at the point.
    pub system: i64,
}

/// Pullback of a curve by the composed map `W = γ_1 ∘ … ∘ γ_n` of a word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PullbackCurveReport {
    pub word: String,
    #[serde(with = "poly_text")]
    pub curve: HomPoly,
    /// Degree of `h ∘ W`.
    pub raw_degree: u32,
    #[serde(with = "poly_text")]
    pub strict_transform: HomPoly,
    pub strict_degree: u32,
    pub base_points: Vec<BasePointMultiplicity>,
    /// Factors of `h ∘ W` dividing the Jacobian of `W`.
    pub removed: Vec<RemovedFactor>,
}

impl PullbackCurveReport {
    /// `deg(h ∘ W) = deg h̃ + Σ degree × exponent`.
    pub fn degrees_balance(&self) -> bool {
        let removed: u32 = self.removed.iter().map(|f| f.degree * f.exponent).sum();
        self.raw_degree == self.strict_degree + removed
    }

    /// `Σ ν_p²` over the listed base points.
    pub fn bound_lhs(&self) -> u64 {
        self.base_points.iter().map(|b| (b.nu as u64).pow(2)).sum()
    }

    /// `(deg h̃)²`.
    pub fn bound_rhs(&self) -> u64 {
        (self.strict_degree as u64).pow(2)
    }
}

/// One base point `q` of a word, with the multiplicity of the strict
/// transform at `q` and the intersection `⟨[C], W_* E_q⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LelongRow {
    pub point: [Value; 3],
    pub nu_poly: u32,
    pub nu_class: i64,
    pub difference: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LelongTable {
    pub word: String,
    pub rows: Vec<LelongRow>,
}

impl LelongTable {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.difference == 0)
    }
}

/// Generator operators and a point registry shared by many pullbacks over
/// one tuple.
#[derive(Clone, Debug)]
pub struct CurveWorkspace {
    gens: Vec<GeneratorData>,
    ops: OperatorSet,
    registry: PointRegistry<BigInt>,
    degree_cap: u64,
}

impl CurveWorkspace {
    pub fn new(gens: &[GeneratorData]) -> Result<Self> {
        let mut registry = PointRegistry::new(0.0);
        let ops = OperatorSet::new::<Exact>(gens, &mut registry)?;
        Ok(CurveWorkspace { gens: gens.to_vec(), ops, registry, degree_cap: DEFAULT_DEGREE_CAP })
    }

    /// Shares operators and points with an existing computation.
    pub fn from_parts(gens: &[GeneratorData], ops: OperatorSet, registry: PointRegistry<BigInt>) -> Self {
        CurveWorkspace { gens: gens.to_vec(), ops, registry, degree_cap: DEFAULT_DEGREE_CAP }
    }

    pub fn with_degree_cap(mut self, cap: u64) -> Self {
        self.degree_cap = cap;
        self
    }

    pub fn registry(&self) -> &PointRegistry<BigInt> {
        &self.registry
    }

    /// `W* [L]`; its support is the set of base points of `W`.
    pub fn linear_system(&mut self, word: &[Letter]) -> Result<WeilClassVector<BigRational>> {
        self.ops.pullback_word::<Exact>(word, &WeilClassVector::line(), &mut self.registry, true)
    }

    pub fn pullback(&mut self, word: &[Letter], curve: &PlaneCurve) -> Result<PullbackCurveReport> {
        Ok(self.pullback_with_ids(word, curve)?.0)
    }

    /// [`Self::pullback`] with the registry ids of the listed base points.
    pub(crate) fn pullback_with_ids(
        &mut self,
        word: &[Letter],
        curve: &PlaneCurve,
    ) -> Result<(PullbackCurveReport, Vec<PointId>)> {
        let chain = WordChain::new(&self.gens, word, self.degree_cap)?;
        let raw = curve.equation().subst(chain.map())?;
        let raw_degree = raw.degree();
        let mut current = raw;
        let mut gcds = Vec::new();
        if !word.is_empty() {
            let jac = jacobian_factors(&self.gens, &chain, word)?
                .iter()
                .fold(HomPoly::one(), |acc, f| acc.mul(f));
            loop {
                let g = gcd_many(&[current.clone(), jac.clone()])?;
                if g.degree() == 0 {
                    break;
                }
                current = current.div_exact(&g)?;
                gcds.push(g);
            }
        }
        if current.degree() == 0 {
            return Err(Error::CurveContracted);
        }
        let strict = current.monic();
        let mut removed = Vec::new();
        for (i, g) in gcds.iter().enumerate() {
            let factor = match gcds.get(i + 1) {
                Some(next) => g.div_exact(next)?,
                None => g.clone(),
            };
            if factor.degree() > 0 {
                removed.push(RemovedFactor { degree: factor.degree(), factor: factor.monic(), exponent: i as u32 + 1 });
            }
        }
        let system = self.linear_system(word)?;
        let ids = system.support().map(|(p, _)| p).collect();
        let base_points = system
            .support()
            .map(|(p, m)| BasePointMultiplicity {
                point: self.point_json(p),
                nu: multiplicity_at(&strict, &self.registry.point(p)),
                system: integer(m),
            })
            .collect();
        let report = PullbackCurveReport {
            word: format_word(word),
            curve: curve.equation().clone(),
            raw_degree,
            strict_degree: strict.degree(),
            strict_transform: strict,
            base_points,
            removed,
        };
        Ok((report, ids))
    }

    /// Multiplicities of a strict transform at the base points of `W`
    /// against `⟨[C], W_* E_q⟩ = c·a_L − Σ a_p mult_p(h)`.
    pub fn lelong(&mut self, word: &[Letter], curve: &PlaneCurve, report: &PullbackCurveReport) -> Result<LelongTable> {
        let system = self.linear_system(word)?;
        let c = BigRational::from_integer(BigInt::from(curve.degree()));
        let mut rows = Vec::new();
        for (q, _) in system.support() {
            let image = self.ops.pushforward_word::<Exact>(
                word,
                &WeilClassVector::exceptional(q),
                &mut self.registry,
                false,
            )?;
            let mut value = &c * image.a_l();
            for (p, a) in image.support() {
                let m = multiplicity_at(curve.equation(), &self.registry.point(p));
                value -= a * BigRational::from_integer(BigInt::from(m));
            }
            if !value.is_integer() {
                return Err(Error::InvariantViolation(format!("non-integral multiplicity {}", value)));
            }
            let nu_class = integer(&value);
            let nu_poly = multiplicity_at(&report.strict_transform, &self.registry.point(q));
            rows.push(LelongRow { point: self.point_json(q), nu_poly, nu_class, difference: nu_poly as i64 - nu_class });
        }
        Ok(LelongTable { word: format_word(word), rows })
    }

    fn point_json(&self, p: PointId) -> [Value; 3] {
        self.registry.coords(p).clone().map(|c| Coord::to_json(&c))
    }
}

fn integer(v: &BigRational) -> i64 {
    if v.is_zero() {
        return 0;
    }
    v.to_integer().to_i64().unwrap_or(i64::MAX)
}

/// Strict transform of `curve` under the map of `word`.
pub fn pullback_curve(gens: &[GeneratorData], word: &[Letter], curve: &PlaneCurve) -> Result<PullbackCurveReport> {
    CurveWorkspace::new(gens)?.pullback(word, curve)
}

/// Both routes to the multiplicities of the strict transform at every base
/// point of `word`.
pub fn lelong_crosscheck(gens: &[GeneratorData], word: &[Letter], curve: &PlaneCurve) -> Result<LelongTable> {
    let mut ws = CurveWorkspace::new(gens)?;
    let report = ws.pullback(word, curve)?;
    ws.lelong(word, curve, &report)
}

/// `Σ ν_p² ≤ (deg h̃)²` for each report.
pub fn guedj_bound_check(reports: &[PullbackCurveReport]) -> Vec<bool> {
    reports.iter().map(|r| r.bound_lhs() <= r.bound_rhs()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{parse_word, reduced_words};
    use crate::testutil::{contracted_line, fixture};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SIGMA: Letter = Letter { gen: 0, inv: false };

    fn curve(s: &str) -> PlaneCurve {
        s.parse().unwrap()
    }

    #[test]
    fn sigma_pulls_a_generic_line_to_a_conic() {
        let gens = [GeneratorData::sigma()];
        let r = pullback_curve(&gens, &[SIGMA], &curve("x + y + z")).unwrap();
        assert_eq!(r.strict_transform, "x*y + x*z + y*z".parse().unwrap());
        assert_eq!(r.strict_degree, 2);
        assert!(r.removed.is_empty());
        assert_eq!(r.base_points.len(), 3);
        assert!(r.base_points.iter().all(|b| b.nu == 1 && b.system == 1));
        assert_eq!((r.bound_lhs(), r.bound_rhs()), (3, 4));
        assert_eq!(guedj_bound_check(&[r]), vec![true]);
    }

    #[test]
    fn sigma_contracts_a_coordinate_line() {
        let gens = [GeneratorData::sigma()];
        assert!(matches!(pullback_curve(&gens, &[SIGMA], &curve("x")), Err(Error::CurveContracted)));
    }

    #[test]
    fn line_through_one_base_point() {
        let gens = [GeneratorData::sigma()];
        let c = curve("x + z");
        let r = pullback_curve(&gens, &[SIGMA], &c).unwrap();
        // (x + z)∘σ = y(x + z)
        assert_eq!(r.strict_transform, "x + z".parse().unwrap());
        assert_eq!(r.removed.len(), 1);
        assert_eq!(r.removed[0].factor, "y".parse().unwrap());
        assert!(r.degrees_balance());
        let nus: Vec<u32> = r.base_points.iter().map(|b| b.nu).collect();
        assert_eq!(nus, vec![0, 1, 0]);
        let t = lelong_crosscheck(&gens, &[SIGMA], &c).unwrap();
        assert!(t.passed(), "{:?}", t);
        assert_eq!(t.rows.iter().map(|r| r.nu_class).collect::<Vec<_>>(), vec![0, 1, 0]);
    }

    #[test]
    fn sigma_lelong_values() {
        let gens = [GeneratorData::sigma()];
        let t = lelong_crosscheck(&gens, &[SIGMA], &curve("x + y + z")).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows.iter().all(|r| r.nu_poly == 1 && r.nu_class == 1));
    }

    #[test]
    fn empty_word_is_the_identity() {
        let gens = fixture();
        let c = curve("x^2 + 3*y*z - z^2");
        let r = pullback_curve(&gens, &[], &c).unwrap();
        assert_eq!(r.strict_transform, c.equation().monic());
        assert!(r.base_points.is_empty() && r.removed.is_empty());
        assert!(lelong_crosscheck(&gens, &[], &c).unwrap().rows.is_empty());
        assert_eq!(guedj_bound_check(&[r]), vec![true]);
    }

    #[test]
    fn short_words_on_the_fixture() {
        let gens = fixture();
        let mut ws = CurveWorkspace::new(&gens).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let curves = [PlaneCurve::random(1, 5, &mut rng).unwrap(), PlaneCurve::random(2, 5, &mut rng).unwrap()];
        for w in reduced_words(2, 2) {
            for c in &curves {
                let r = ws.pullback(&w, c).unwrap();
                assert!(r.degrees_balance());
                assert_eq!(r.raw_degree, c.degree() << w.len());
                let t = ws.lelong(&w, c, &r).unwrap();
                assert!(t.passed(), "{} {:?}", format_word(&w), t);
                assert!(r.bound_lhs() <= r.bound_rhs());
            }
        }
    }

    #[test]
    fn contracted_components() {
        let gens = fixture();
        let line = contracted_line(&gens, 0);
        let word = parse_word("a").unwrap();
        let mut ws = CurveWorkspace::new(&gens).unwrap();
        assert!(matches!(ws.pullback(&word, &line), Err(Error::CurveContracted)));

        // the class route sees the contracted line as an exceptional curve
        // over one base point, the strict transform in the plane does not
        let conic = PlaneCurve::new(line.equation().mul(&"x + 2*y - z".parse().unwrap())).unwrap();
        let r = ws.pullback(&word, &conic).unwrap();
        assert!(r.degrees_balance());
        assert_eq!(r.strict_degree, 2);
        assert_eq!(r.removed.iter().map(|f| f.degree * f.exponent).sum::<u32>(), 2);
        let t = ws.lelong(&word, &conic, &r).unwrap();
        let diffs: Vec<i64> = t.rows.iter().map(|r| r.difference).collect();
        assert_eq!(diffs.iter().sum::<i64>(), 1);
        assert!(diffs.iter().all(|&d| d == 0 || d == 1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn stripping_is_idempotent(seed in 0u64..1000, k in 0usize..4) {
            let gens = fixture();
            let words = reduced_words(2, 2);
            let w = &words[(seed as usize) % words.len()];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = PlaneCurve::random(1 + (k as u32 % 2), 3, &mut rng).unwrap();
            let mut ws = CurveWorkspace::new(&gens).unwrap();
            let r = ws.pullback(w, &c).unwrap();
            let again = ws.pullback(&[], &PlaneCurve::new(r.strict_transform.clone()).unwrap()).unwrap();
            prop_assert_eq!(&again.strict_transform, &r.strict_transform);
            if !w.is_empty() {
                let chain = WordChain::new(&gens, w, 256).unwrap();
                let jac = jacobian_factors(&gens, &chain, w).unwrap()
                    .iter().fold(HomPoly::one(), |acc, f| acc.mul(f));
                prop_assert_eq!(gcd_many(&[r.strict_transform.clone(), jac]).unwrap().degree(), 0);
            }
        }
    }
}
