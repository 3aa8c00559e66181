//! Convergence diagnostics computed from walk reports.
//!
//! Float pairings use the polarization identity
//! `⟨a,b⟩ = (⟨a,a⟩ + ⟨b,b⟩ − ⟨a−b,a−b⟩)/2` with the exact self-intersections
//! `⟨θ,θ⟩ = 4^{-k}` of prefix classes: shared coefficients cancel in `a − b`
//! before any rounding, so pairings of order `4^{-ℓ}` keep full relative
//! precision.

use serde::{Deserialize, Serialize};

use super::itinerary::Itinerary;
use super::report::{run_walk, ArithMode, Checkpoint, RunOptions, WalkReport};
use crate::error::{Error, Result};
use crate::maps::word::reduce;
use crate::maps::{word_map, Letter};
use crate::picard::{PointRegistry, WeilClassVector};
use crate::scalar::{Exact, Float, Mode, Scalar};

/// `4^{-k}` as `f64`.
fn quarter_pow(k: usize) -> f64 {
    (-2.0 * k as f64).exp2()
}

/// `⟨a, b⟩` for prefix classes tracked to lengths `ka`, `kb`.
fn pairing<M: Mode>(a: &WeilClassVector<M::Scalar>, ka: usize, b: &WeilClassVector<M::Scalar>, kb: usize) -> f64 {
    if M::EXACT {
        a.intersect(b).to_f64()
    } else {
        let d = a.sub(b).self_intersection().to_f64();
        (quarter_pow(ka) + quarter_pow(kb) - d) / 2.0
    }
}

fn fresh_registry<M: Mode>(report: &WalkReport) -> PointRegistry<M::Coord> {
    PointRegistry::new(if M::EXACT { 0.0 } else { report.options.config.tolerance })
}

/// Least-squares slope and intercept of `ys` against `xs`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyRow {
    pub n: usize,
    pub n_next: usize,
    pub reduced_len_next: usize,
    /// `‖θ_{n_next} − θ_n‖`.
    pub distance: f64,
    /// `⟨θ_{n_next}, θ_{n_next}⟩`.
    pub self_intersection: f64,
    /// `4^{-ℓ}` at `n_next`.
    pub expected_self_intersection: f64,
    /// Exact equality of the two, in exact mode.
    pub self_intersection_exact: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchySeries {
    pub rows: Vec<CauchyRow>,
    /// Least-squares slope of `log2 distance` per checkpoint interval over
    /// rows with positive distance.
    pub log2_slope: Option<f64>,
}

impl CauchySeries {
    /// Whether the fitted increments shrink by at least `factor` every
    /// `intervals` checkpoint intervals.
    pub fn decays_by(&self, factor: f64, intervals: usize) -> bool {
        self.log2_slope.is_some_and(|s| s <= -factor.log2() / intervals as f64)
    }
}

/// Distances between consecutive checkpoint classes and their
/// self-intersections.
pub fn cauchy_diagnostic(report: &WalkReport) -> Result<CauchySeries> {
    match report.mode {
        ArithMode::Exact => cauchy_in::<Exact>(report),
        ArithMode::Float => cauchy_in::<Float>(report),
    }
}

fn cauchy_in<M: Mode>(report: &WalkReport) -> Result<CauchySeries> {
    let mut reg = fresh_registry::<M>(report);
    let classes = report.load_checkpoints::<M>(&mut reg)?;
    let cps = &report.checkpoints;
    let mut rows = Vec::new();
    for i in 1..cps.len() {
        let len = cps[i].reduced_len;
        let s = classes[i].self_intersection();
        let exact = M::EXACT.then(|| s == M::Scalar::pow2_neg(2 * len as u32));
        rows.push(CauchyRow {
            n: cps[i - 1].n,
            n_next: cps[i].n,
            reduced_len_next: len,
            distance: classes[i].l2_dist(&classes[i - 1]),
            self_intersection: s.to_f64(),
            expected_self_intersection: quarter_pow(len),
            self_intersection_exact: exact,
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.distance > 0.0)
        .map(|(i, r)| (i as f64, r.distance.log2()))
        .unzip();
    let log2_slope = least_squares(&xs, &ys).map(|(s, _)| s);
    Ok(CauchySeries { rows, log2_slope })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramFailure {
    pub m: usize,
    pub n: usize,
    pub observed: String,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramCheck {
    pub pairs: usize,
    /// Exact mismatches; always empty in float mode.
    pub failures: Vec<GramFailure>,
    /// Largest relative deviation over the checked pairs.
    pub max_rel_error: f64,
}

impl GramCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `⟨θ_m, θ_n⟩ · deg_m · deg_n = 2^{|middle|}` for every pair of checkpoints
/// `m > n`, where `middle = f_{n+1} … f_m` reduced. Float pairs are checked
/// only when both classes are fully tracked.
pub fn gram_check(report: &WalkReport) -> Result<GramCheck> {
    match report.mode {
        ArithMode::Exact => gram_in::<Exact>(report),
        ArithMode::Float => gram_in::<Float>(report),
    }
}

fn gram_in<M: Mode>(report: &WalkReport) -> Result<GramCheck> {
    let mut reg = fresh_registry::<M>(report);
    let classes = report.load_checkpoints::<M>(&mut reg)?;
    let letters = report.letter_sequence()?;
    let cps = &report.checkpoints;
    let mut out = GramCheck { pairs: 0, failures: Vec::new(), max_rel_error: 0.0 };
    for m in 0..cps.len() {
        for n in 0..m {
            let (a, b) = (&cps[m], &cps[n]);
            if a.tracked_len != a.reduced_len || b.tracked_len != b.reduced_len {
                continue;
            }
            let middle = reduce(&letters[b.n..a.n]).len();
            let shift = (a.reduced_len + b.reduced_len - middle) as u32;
            let expected = M::Scalar::pow2_neg(shift);
            out.pairs += 1;
            if M::EXACT {
                let observed = classes[m].intersect(&classes[n]);
                if observed != expected {
                    out.failures.push(GramFailure {
                        m: a.n,
                        n: b.n,
                        observed: observed.to_json().to_string(),
                        expected: expected.to_json().to_string(),
                    });
                }
                let rel = ((observed.to_f64() - expected.to_f64()) / expected.to_f64()).abs();
                out.max_rel_error = out.max_rel_error.max(rel);
            } else {
                let observed = pairing::<M>(&classes[m], a.tracked_len, &classes[n], b.tracked_len);
                let e = expected.to_f64();
                out.max_rel_error = out.max_rel_error.max(((observed - e) / e).abs());
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryComparison {
    /// Checkpoint step at which the classes are compared.
    pub n: usize,
    /// `⟨θ_n^A, θ_n^B⟩`.
    pub pairing: f64,
    /// The same pairing as an exact rational, in exact mode.
    pub pairing_exact: Option<String>,
    pub reduced_len_a: usize,
    pub reduced_len_b: usize,
    /// Same-seed controls `4^{-ℓ}`.
    pub control_a: f64,
    pub control_b: f64,
    /// `⟨θ^A, [L]⟩` and `⟨θ^B, [L]⟩`.
    pub line_pairing_a: f64,
    pub line_pairing_b: f64,
}

impl BoundaryComparison {
    /// The larger of the two same-seed controls.
    pub fn control(&self) -> f64 {
        self.control_a.max(self.control_b)
    }
}

fn same_tuple(a: &WalkReport, b: &WalkReport) -> Result<()> {
    let key = |r: &WalkReport| r.generators.iter().map(|g| (g.a, g.b)).collect::<Vec<_>>();
    if key(a) != key(b) {
        return Err(Error::Incompatible("reports use different generator tuples".into()));
    }
    if a.mode != b.mode {
        return Err(Error::Incompatible(format!("reports use modes {} and {}", a.mode, b.mode)));
    }
    Ok(())
}

/// `⟨θ^A, θ^B⟩` at the last checkpoint step present in both reports.
pub fn boundary_compare(a: &WalkReport, b: &WalkReport) -> Result<BoundaryComparison> {
    same_tuple(a, b)?;
    match a.mode {
        ArithMode::Exact => compare_in::<Exact>(a, b),
        ArithMode::Float => compare_in::<Float>(a, b),
    }
}

fn compare_in<M: Mode>(a: &WalkReport, b: &WalkReport) -> Result<BoundaryComparison> {
    let n = a
        .checkpoints
        .iter()
        .rev()
        .map(|c| c.n)
        .find(|&n| b.checkpoint_at(n).is_some())
        .ok_or_else(|| Error::Incompatible("no common checkpoint".into()))?;
    let (ca, cb) = (a.checkpoint_at(n).expect("found"), b.checkpoint_at(n).expect("found"));
    let mut reg = fresh_registry::<M>(a);
    let ta: WeilClassVector<M::Scalar> = ca.theta.load(&mut reg)?;
    let tb: WeilClassVector<M::Scalar> = cb.theta.load(&mut reg)?;
    let line = WeilClassVector::<M::Scalar>::line();
    Ok(BoundaryComparison {
        n,
        pairing: pairing::<M>(&ta, ca.tracked_len, &tb, cb.tracked_len),
        pairing_exact: M::EXACT.then(|| ta.intersect(&tb).to_json().to_string()),
        reduced_len_a: ca.reduced_len,
        reduced_len_b: cb.reduced_len,
        control_a: quarter_pow(ca.reduced_len),
        control_b: quarter_pow(cb.reduced_len),
        line_pairing_a: ta.intersect(&line).to_f64(),
        line_pairing_b: tb.intersect(&line).to_f64(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub n: usize,
    pub reduced_len: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricFit {
    pub c: f64,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma45Report {
    /// `r_n = ⟨(f_1 ∘ … ∘ f_n)*θ', [L]⟩ / deg(f_1 ∘ … ∘ f_n)` for the
    /// partner's final class `θ'`.
    pub ratio: Vec<RatioPoint>,
    /// The same ratio with `θ'` replaced by the reflected walk's own limit
    /// approximant.
    pub diagonal: Vec<RatioPoint>,
    /// `s_n = ⟨(f^n)_* θ_N, [L]⟩ = deg_n ⟨θ_N, θ_n⟩`.
    pub pushforward: Vec<RatioPoint>,
    pub ratio_floor: f64,
    /// `s_n ≈ C ρ^n`.
    pub fit: Option<GeometricFit>,
}

/// Lower-bound and decay witnesses along a walk against an independent
/// partner walk over the same tuple.
///
/// `(f_1 ∘ … ∘ f_n)*θ'` pairs with `[L]` as `θ'` pairs with
/// `(f_n^{-1} ∘ … ∘ f_1^{-1})*[L]`, the class of the reflected walk with
/// letters `f_1^{-1}, f_2^{-1}, …`, which is run here with the report's
/// options.
pub fn lemma45_diagnostics(report: &WalkReport, partner: &WalkReport) -> Result<Lemma45Report> {
    same_tuple(report, partner)?;
    match report.mode {
        ArithMode::Exact => lemma45_in::<Exact>(report, partner),
        ArithMode::Float => lemma45_in::<Float>(report, partner),
    }
}

fn lemma45_in<M: Mode>(report: &WalkReport, partner: &WalkReport) -> Result<Lemma45Report> {
    let gens = report.generator_data()?;
    let letters = report.letter_sequence()?;
    let reflected: Vec<Letter> = letters.iter().map(|l| l.inverse()).collect();
    let options = RunOptions { steps: reflected.len(), ..report.options.clone() };
    let mirror = run_walk::<M>(&gens, &Itinerary::explicit(&reflected), &options)?;

    let mut reg = fresh_registry::<M>(report);
    let other = partner.final_checkpoint();
    let theta_other: WeilClassVector<M::Scalar> = other.theta.load(&mut reg)?;
    let mirror_classes = mirror.load_checkpoints::<M>(&mut reg)?;
    let own_classes = report.load_checkpoints::<M>(&mut reg)?;

    let point = |c: &Checkpoint, value: f64| RatioPoint { n: c.n, reduced_len: c.reduced_len, value };
    let mirror_last = mirror.checkpoints.len() - 1;
    let mut ratio = Vec::new();
    let mut diagonal = Vec::new();
    for (c, cls) in mirror.checkpoints.iter().zip(&mirror_classes) {
        ratio.push(point(c, pairing::<M>(&theta_other, other.tracked_len, cls, c.tracked_len)));
        let last = &mirror.checkpoints[mirror_last];
        diagonal.push(point(c, pairing::<M>(&mirror_classes[mirror_last], last.tracked_len, cls, c.tracked_len)));
    }

    let own_last = report.checkpoints.len() - 1;
    let last = &report.checkpoints[own_last];
    let mut pushforward = Vec::new();
    for (c, cls) in report.checkpoints.iter().zip(&own_classes) {
        if c.tracked_len != c.reduced_len {
            continue;
        }
        let v = if M::EXACT {
            let deg = M::Scalar::one().div(&M::Scalar::pow2_neg(c.reduced_len as u32));
            own_classes[own_last].intersect(cls).mul(&deg).to_f64()
        } else {
            pairing::<M>(&own_classes[own_last], last.tracked_len, cls, c.tracked_len) * (c.reduced_len as f64).exp2()
        };
        pushforward.push(point(c, v));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        pushforward.iter().filter(|p| p.value > 0.0).map(|p| (p.n as f64, p.value.ln())).unzip();
    let fit = least_squares(&xs, &ys).map(|(slope, icept)| GeometricFit { c: icept.exp(), rho: slope.exp() });
    let ratio_floor = ratio.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    Ok(Lemma45Report { ratio, diagonal, pushforward, ratio_floor, fit })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeCheck {
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

/// Compares `⟨c_n, [L]⟩ = 2^{ℓ_n}` at every checkpoint of reduced length
/// `≤ max_len` with the degree of the explicitly composed map.
pub fn degree_crosscheck(report: &WalkReport, max_len: usize) -> Result<DegreeCheck> {
    let gens = report.generator_data()?;
    let mut out = DegreeCheck { checked: 0, skipped: 0, failures: Vec::new() };
    for c in &report.checkpoints {
        if c.reduced_len > max_len {
            out.skipped += 1;
            continue;
        }
        let word = crate::maps::parse_word(&c.word)?;
        // the map f_ℓ ∘ … ∘ f_1 is the word read right to left
        let composed: Vec<Letter> = word.into_iter().rev().collect();
        let deg = word_map(&gens, &composed, u64::MAX)?.degree() as u64;
        let class_deg = match report.mode {
            ArithMode::Exact => class_degree::<Exact>(report, c)?,
            ArithMode::Float => class_degree::<Float>(report, c)?,
        };
        out.checked += 1;
        let expected = 1u64 << c.reduced_len;
        if deg != expected || (class_deg - expected as f64).abs() > 1e-6 * expected as f64 {
            out.failures.push(format!(
                "step {}: word {} has degree {}, class degree {}, expected {}",
                c.n, c.word, deg, class_deg, expected
            ));
        }
    }
    Ok(out)
}

fn class_degree<M: Mode>(report: &WalkReport, c: &Checkpoint) -> Result<f64> {
    let mut reg = fresh_registry::<M>(report);
    let theta: WeilClassVector<M::Scalar> = c.theta.load(&mut reg)?;
    Ok(theta.a_l().to_f64() * (c.reduced_len as f64).exp2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{sample_generators, GeneratorData};
    use crate::testutil::fixture;
    use crate::walk::{WalkConfig, WalkState};
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exact_run(gens: &[GeneratorData], seed: u64, steps: usize) -> WalkReport {
        run_walk::<Exact>(gens, &Itinerary::uniform(gens.len(), seed), &RunOptions::new(steps, 1)).unwrap()
    }

    #[test]
    fn least_squares_line() {
        let (s, c) = least_squares(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((s - 2.0).abs() < 1e-12 && (c - 1.0).abs() < 1e-12);
        assert!(least_squares(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn exact_gram_identities() {
        let gens = fixture();
        let rep = exact_run(&gens, 4, 9);
        let g = gram_check(&rep).unwrap();
        assert!(g.passed(), "{:?}", g.failures);
        assert_eq!(g.pairs, 45);
        assert_eq!(g.max_rel_error, 0.0);
    }

    #[test]
    fn float_gram_identities() {
        let gens = fixture();
        let rep = run_walk::<Float>(&gens, &Itinerary::uniform(2, 4), &RunOptions::new(40, 4)).unwrap();
        let g = gram_check(&rep).unwrap();
        assert!(g.pairs > 0);
        assert!(g.max_rel_error < 1e-9, "{}", g.max_rel_error);
    }

    #[test]
    fn cauchy_rows_are_exact() {
        let gens = fixture();
        let rep = exact_run(&gens, 5, 8);
        let s = cauchy_diagnostic(&rep).unwrap();
        assert_eq!(s.rows.len(), 8);
        assert!(s.rows.iter().all(|r| r.self_intersection_exact == Some(true)));
    }

    #[test]
    fn boundary_comparison_controls() {
        let gens = fixture();
        let a = exact_run(&gens, 6, 7);
        let same = boundary_compare(&a, &a).unwrap();
        let len = a.final_checkpoint().reduced_len;
        assert_eq!(same.pairing, quarter_pow(len));
        assert_eq!(same.line_pairing_a, 1.0);
        assert_eq!(same.control(), quarter_pow(len));

        let b = exact_run(&gens, 7, 7);
        let cmp = boundary_compare(&a, &b).unwrap();
        let wa = parse(&a.final_checkpoint().word);
        let wb = parse(&b.final_checkpoint().word);
        let common = wa.iter().zip(&wb).take_while(|(x, y)| x == y).count();
        assert_eq!(cmp.pairing, quarter_pow(common));

        let other = sample_generators(2, 5, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let c = exact_run(&other, 6, 3);
        assert!(matches!(boundary_compare(&a, &c), Err(Error::Incompatible(_))));
    }

    fn parse(w: &str) -> Vec<Letter> {
        crate::maps::parse_word(w).unwrap()
    }

    #[test]
    fn ratio_matches_literal_pullback() {
        let gens = fixture();
        let rep = exact_run(&gens, 8, 5);
        let partner = exact_run(&gens, 9, 6);
        let lem = lemma45_diagnostics(&rep, &partner).unwrap();
        let state = WalkState::<Exact>::new(&gens, WalkConfig::default()).unwrap();
        let ops = state.operators();
        let mut reg = state.registry().clone();
        let theta: WeilClassVector<BigRational> = partner.final_checkpoint().theta.load(&mut reg).unwrap();
        let letters = rep.letter_sequence().unwrap();
        for p in &lem.ratio {
            let pulled = ops.pullback_word::<Exact>(&letters[..p.n], &theta, &mut reg, false).unwrap();
            let deg = BigRational::pow2_neg(reduce(&letters[..p.n]).len() as u32);
            let expected = pulled.intersect(&WeilClassVector::line()).mul(&deg);
            assert_eq!(p.value, expected.to_f64(), "step {}", p.n);
        }
        assert!(lem.ratio_floor > 0.0);
        assert_eq!(lem.diagonal.last().unwrap().value, quarter_pow(lem.diagonal.last().unwrap().reduced_len));
        assert_eq!(lem.pushforward.last().unwrap().value, 1.0 / (lem.pushforward.last().unwrap().reduced_len as f64).exp2());
    }

    #[test]
    fn degrees_agree_with_composition() {
        let gens = fixture();
        let rep = exact_run(&gens, 10, 4);
        let d = degree_crosscheck(&rep, 3).unwrap();
        assert!(d.failures.is_empty(), "{:?}", d.failures);
        assert_eq!(d.checked + d.skipped, rep.checkpoints.len());
        assert!(d.checked >= 4);
    }
}
