use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::curve::PlaneCurve;
use super::pullback::CurveWorkspace;
use crate::error::{Error, Result};
use crate::maps::{format_word, GeneratorData, Letter, DEFAULT_DEGREE_CAP};
use crate::picard::WeilClassVector;
use crate::scalar::Exact;
use crate::walk::{Itinerary, WalkConfig, WalkState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EquidistOptions {
    /// Longest prefix whose curve pullback is computed.
    pub max_len: usize,
    /// The reference class is the walk class at `max_len + limit_extra`.
    pub limit_extra: usize,
    /// Itinerary letters consumed while looking for the reference length.
    pub step_cap: usize,
    pub degree_cap: u64,
}

impl Default for EquidistOptions {
    fn default() -> Self {
        EquidistOptions { max_len: 6, limit_extra: 6, step_cap: 100_000, degree_cap: DEFAULT_DEGREE_CAP }
    }
}

/// One prefix length. Fields other than `len` and `word` are empty when the
/// pullback failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistRow {
    pub len: usize,
    /// Degree of the strict transform.
    pub degree: Option<u32>,
    /// `‖u_ℓ − θ_ℓ‖`.
    pub distance: Option<f64>,
    /// `‖u_ℓ − θ_ref‖`.
    pub distance_to_limit: Option<f64>,
    pub bound_lhs: Option<u64>,
    pub bound_rhs: Option<u64>,
    /// Walk prefix `f_1 … f_ℓ`.
    pub word: String,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistSeries {
    pub curve: String,
    pub limit_len: usize,
    pub limit_word: String,
    pub rows: Vec<EquidistRow>,
}

impl EquidistSeries {
    /// Whether `distance_to_limit` is defined and strictly decreasing over
    /// the lengths `from..=to`.
    pub fn strictly_decreasing(&self, from: usize, to: usize) -> bool {
        let vals: Option<Vec<f64>> = (from..=to)
            .map(|l| self.rows.iter().find(|r| r.len == l).and_then(|r| r.distance_to_limit))
            .collect();
        vals.is_some_and(|v| v.windows(2).all(|w| w[1] < w[0]))
    }

    /// `Σ ν_p² ≤ (deg h̃)²` on every computed row.
    pub fn bound_holds(&self) -> bool {
        self.rows.iter().all(|r| match (r.bound_lhs, r.bound_rhs) {
            (Some(l), Some(h)) => l <= h,
            _ => true,
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// The reduced word reached when the walk first has reduced length `n`.
fn reduced_prefix(itinerary: &Itinerary, n: usize, step_cap: usize) -> Result<Vec<Letter>> {
    let letters = match itinerary {
        Itinerary::Explicit { .. } => {
            let all = itinerary.letters(0).and_then(|_| {
                let Itinerary::Explicit { letters } = itinerary else { unreachable!() };
                crate::maps::parse_word(letters)
            })?;
            all.into_iter().take(step_cap).collect()
        }
        _ => itinerary.letters(step_cap)?,
    };
    let mut w: Vec<Letter> = Vec::with_capacity(n);
    if n == 0 {
        return Ok(w);
    }
    for l in letters {
        if w.last() == Some(&l.inverse()) {
            w.pop();
        } else {
            w.push(l);
        }
        if w.len() == n {
            return Ok(w);
        }
    }
    Err(Error::InvalidInput(format!("itinerary did not reach reduced length {} within {} steps", n, step_cap)))
}

fn rational(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Distances between the normalized strict-transform classes
/// `u_ℓ = (deg h̃·[L] − Σ ν_p E_p)/(c·2^ℓ)` of the curve pulled back by
/// `f_ℓ ∘ … ∘ f_1` and the walk classes, both the class `θ_ℓ` of the same
/// prefix and a deeper reference `θ_ref`.
pub fn equidist_diagnostic(
    gens: &[GeneratorData],
    itinerary: &Itinerary,
    curve: &PlaneCurve,
    options: &EquidistOptions,
) -> Result<EquidistSeries> {
    let limit_len = options.max_len + options.limit_extra;
    let word = reduced_prefix(itinerary, limit_len, options.step_cap)?;
    let config = WalkConfig { exact_len_cap: limit_len.max(WalkConfig::default().exact_len_cap), ..Default::default() };
    let mut state = WalkState::<Exact>::new(gens, config)?;
    let mut thetas = vec![state.theta().clone()];
    for &l in &word {
        state.step(l)?;
        if state.reduced_len() <= options.max_len {
            thetas.push(state.theta().clone());
        }
    }
    let limit = state.theta().clone();
    let mut ws = CurveWorkspace::from_parts(gens, state.operators().clone(), state.registry().clone())
        .with_degree_cap(options.degree_cap);

    let mut rows = Vec::with_capacity(options.max_len + 1);
    for len in 0..=options.max_len {
        let composed: Vec<Letter> = word[..len].iter().rev().copied().collect();
        let mut row = EquidistRow {
            len,
            degree: None,
            distance: None,
            distance_to_limit: None,
            bound_lhs: None,
            bound_rhs: None,
            word: format_word(&word[..len]),
            error: None,
        };
        match ws.pullback_with_ids(&composed, curve) {
            Ok((report, ids)) => {
                let scale = rational((curve.degree() as u64) << len);
                let u = WeilClassVector::from_parts(
                    rational(report.strict_degree as u64) / &scale,
                    ids.iter().zip(&report.base_points).map(|(&p, b)| (p, rational(b.nu as u64) / &scale)),
                );
                row.degree = Some(report.strict_degree);
                row.distance = Some(u.l2_dist(&thetas[len]));
                row.distance_to_limit = Some(u.l2_dist(&limit));
                row.bound_lhs = Some(report.bound_lhs());
                row.bound_rhs = Some(report.bound_rhs());
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        rows.push(row);
    }
    Ok(EquidistSeries { curve: curve.to_string(), limit_len, limit_word: format_word(&word), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{contracted_line, fixture};

    fn opts(max_len: usize) -> EquidistOptions {
        EquidistOptions { max_len, limit_extra: 4, ..Default::default() }
    }

    #[test]
    fn generic_line_tracks_the_walk() {
        let gens = fixture();
        let line = PlaneCurve::line([3, -7, 11]).unwrap();
        let s = equidist_diagnostic(&gens, &Itinerary::uniform(2, 1), &line, &opts(4)).unwrap();
        assert_eq!(s.rows.len(), 5);
        assert_eq!(s.rows[0].distance, Some(0.0));
        assert!(s.rows.iter().all(|r| r.distance == Some(0.0)));
        // ‖θ_ℓ − θ_N‖² = 4^{-ℓ} − 4^{-N} along one reduced word
        for r in &s.rows {
            let expected = ((-2.0 * r.len as f64).exp2() - (-2.0 * s.limit_len as f64).exp2()).sqrt();
            assert!((r.distance_to_limit.unwrap() - expected).abs() < 1e-12);
        }
        assert!(s.strictly_decreasing(0, 4));
        assert!(s.bound_holds());
        assert_eq!(s.limit_word.len(), 8);
    }

    #[test]
    fn constant_itinerary_first_step() {
        let gens = fixture();
        let line = PlaneCurve::line([1, 2, 5]).unwrap();
        let a = Letter::new(0, false);
        let s = equidist_diagnostic(&gens, &Itinerary::constant(a), &line, &opts(1)).unwrap();
        assert_eq!(s.rows[1].word, "a");
        assert_eq!(s.rows[1].degree, Some(2));
        assert_eq!(s.rows[1].distance, Some(0.0));
        assert_eq!(s.limit_word, "aaaaa");
    }

    #[test]
    fn contracted_curves_are_recorded() {
        let gens = fixture();
        let x = contracted_line(&gens, 0);
        let it = Itinerary::explicit(&crate::maps::parse_word("aa").unwrap());
        let s = equidist_diagnostic(&gens, &it, &x, &EquidistOptions { max_len: 1, limit_extra: 1, ..Default::default() })
            .unwrap();
        assert_eq!(s.rows[0].distance, Some(0.0));
        assert!(s.rows[1].error.as_deref().unwrap().contains("contracted"));
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("len,degree,distance,distance_to_limit,bound_lhs,bound_rhs,word,error"));
    }

    #[test]
    fn unreachable_length() {
        let gens = fixture();
        let it = Itinerary::explicit(&crate::maps::parse_word("aA").unwrap());
        let line = PlaneCurve::line([1, 1, 1]).unwrap();
        assert!(equidist_diagnostic(&gens, &it, &line, &opts(1)).is_err());
    }
}
