//! Exhaustive identities over all reduced words of bounded length.
//!
//! Words `w = γ_1 … γ_n` stand for the maps `γ_1 ∘ … ∘ γ_n`. Polynomial
//! triples are built by prepending letters, pullback classes `w*[L]` by
//! appending them.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::birmap::cancel;
use crate::maps::word::{invert_word, letter_quad, reduce};
use crate::maps::{format_word, GeneratorData, Letter, DEFAULT_DEGREE_CAP};
use crate::picard::{OperatorSet, PointRegistry, WeilClassVector};
use crate::poly::{gcd_many, HomPoly};
use crate::scalar::{Exact, Scalar};

/// Failures listed in a report beyond the counts.
const FAILURE_LIST_LIMIT: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `deg(w) = 2^|w|` for the composed polynomial map.
    PolynomialDegree,
    /// `⟨w*[L], [L]⟩` equals the polynomial degree.
    ClassDegree,
    /// `d² − Σ m_p² = 1` and `Σ m_p = 3(d − 1)`.
    Noether,
    /// `⟨w*b, w*b'⟩ = ⟨b, b'⟩` on a fixed basket.
    Isometry,
    /// `⟨w*b, b'⟩ = ⟨b, w_* b'⟩` on the basket.
    Adjoint,
    /// `⟨w*[L], v*[L]⟩ = 2^|v w⁻¹|` for every pair of words.
    Gram,
}

pub const ALL_CHECKS: [Check; 6] =
    [Check::PolynomialDegree, Check::ClassDegree, Check::Noether, Check::Isometry, Check::Adjoint, Check::Gram];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckFailure {
    pub check: Check,
    pub word: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub max_len: usize,
    pub words: usize,
    pub tallies: Vec<(Check, Tally)>,
    pub failures: Vec<CrosscheckFailure>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.tallies.iter().all(|(_, t)| t.failed == 0)
    }

    pub fn tally(&self, check: Check) -> Tally {
        self.tallies.iter().find(|(c, _)| *c == check).map(|(_, t)| t.clone()).unwrap_or_default()
    }
}

struct Recorder {
    tallies: HashMap<Check, Tally>,
    failures: Vec<CrosscheckFailure>,
}

impl Recorder {
    fn record(&mut self, check: Check, word: &[Letter], ok: bool, detail: impl FnOnce() -> String) {
        let t = self.tallies.entry(check).or_default();
        if ok {
            t.passed += 1;
        } else {
            t.failed += 1;
            if self.failures.len() < FAILURE_LIST_LIMIT {
                self.failures.push(CrosscheckFailure { check, word: format_word(word), detail: detail() });
            }
        }
    }
}

type Class = WeilClassVector<BigRational>;

fn int(n: i64) -> BigRational {
    BigRational::from_i64(n)
}

/// Runs every [`Check`] over all reduced words of length `≤ max_len`.
pub fn crosscheck(gens: &[GeneratorData], max_len: usize) -> Result<CrosscheckReport> {
    let top = if max_len >= 64 { u64::MAX } else { 1u64 << max_len };
    if top > DEFAULT_DEGREE_CAP {
        return Err(Error::DegreeCap { degree: top, cap: DEFAULT_DEGREE_CAP });
    }
    let mut rec = Recorder { tallies: HashMap::new(), failures: Vec::new() };
    let letters: Vec<Letter> = (0..2 * gens.len()).map(Letter::from_index).collect();

    let mut poly_degree: HashMap<Vec<Letter>, u32> = HashMap::new();
    let id = [HomPoly::var(0), HomPoly::var(1), HomPoly::var(2)];
    let mut stack: Vec<(Vec<Letter>, [HomPoly; 3])> = vec![(Vec::new(), id)];
    while let Some((word, map)) = stack.pop() {
        poly_degree.insert(word.clone(), map[0].degree());
        if word.len() == max_len {
            continue;
        }
        for &l in &letters {
            if word.first() == Some(&l.inverse()) {
                continue;
            }
            let mut child = Vec::with_capacity(word.len() + 1);
            child.push(l);
            child.extend_from_slice(&word);
            let raw = letter_quad(gens, l)?.prepend_raw(&map);
            // leaves only need the degree after cancellation
            let step = if child.len() == max_len {
                gcd_many(&raw).map(|g| (raw[0].degree() - g.degree(), None))
            } else {
                cancel(raw).map(|(t, _)| (t[0].degree(), Some(t)))
            };
            match step {
                Ok((d, next)) => {
                    rec.record(Check::PolynomialDegree, &child, d == 1 << child.len(), || {
                        format!("degree {} instead of {}", d, 1u32 << child.len())
                    });
                    match next {
                        Some(t) => stack.push((child, t)),
                        None => {
                            poly_degree.insert(child, d);
                        }
                    }
                }
                Err(e) => rec.record(Check::PolynomialDegree, &child, false, || e.to_string()),
            }
        }
    }

    let mut registry = PointRegistry::<BigInt>::new(0.0);
    let ops = match OperatorSet::new::<Exact>(gens, &mut registry) {
        Ok(ops) => ops,
        Err(e) => {
            rec.record(Check::ClassDegree, &[], false, || format!("operator construction failed: {}", e));
            return Ok(finish(rec, max_len, poly_degree.len()));
        }
    };
    let basket = basket(&ops, gens.len());
    let basket_gram: Vec<Vec<BigRational>> =
        basket.iter().map(|b| basket.iter().map(|c| b.intersect(c)).collect()).collect();
    let line = Class::line();

    let mut classes: Vec<(Vec<Letter>, Class)> = Vec::new();
    let mut stack: Vec<(Vec<Letter>, Option<Class>, Vec<Class>)> =
        vec![(Vec::new(), Some(Class::line()), basket.clone())];
    while let Some((word, class, pulled)) = stack.pop() {
        if let Some(c) = &class {
            check_class(&mut rec, &word, c, &line, poly_degree.get(&word).copied());
            classes.push((word.clone(), c.clone()));
        }
        let mut ok = true;
        for (i, a) in pulled.iter().enumerate() {
            for (j, b) in pulled.iter().enumerate().skip(i) {
                ok &= a.intersect(b) == basket_gram[i][j];
            }
        }
        rec.record(Check::Isometry, &word, ok, || "basket Gram matrix changed".into());
        let mut adjoint_ok = true;
        for d in &basket {
            match ops.pushforward_word::<Exact>(&word, d, &mut registry, false) {
                Ok(pushed) => {
                    for (b, pb) in basket.iter().zip(&pulled) {
                        adjoint_ok &= pb.intersect(d) == b.intersect(&pushed);
                    }
                }
                Err(_) => adjoint_ok = false,
            }
        }
        rec.record(Check::Adjoint, &word, adjoint_ok, || "⟨w*b, d⟩ ≠ ⟨b, w_* d⟩".into());

        if word.len() == max_len {
            continue;
        }
        for &l in &letters {
            if word.last() == Some(&l.inverse()) {
                continue;
            }
            let mut child = word.clone();
            child.push(l);
            let child_class = match &class {
                Some(c) => match ops.apply_pullback::<Exact>(l, c, &mut registry, true) {
                    Ok(c) => Some(c),
                    Err(e) => {
                        rec.record(Check::ClassDegree, &child, false, || e.to_string());
                        None
                    }
                },
                None => None,
            };
            let child_pulled: Result<Vec<Class>> =
                pulled.iter().map(|b| ops.apply_pullback::<Exact>(l, b, &mut registry, false)).collect();
            stack.push((child, child_class, child_pulled?));
        }
    }

    for (i, (v, cv)) in classes.iter().enumerate() {
        for (w, cw) in &classes[i..] {
            let mut joined = v.clone();
            joined.extend(invert_word(w));
            let expected = int(1 << reduce(&joined).len());
            let got = cv.intersect(cw);
            rec.record(Check::Gram, v, got == expected, || {
                format!("⟨·, {}*[L]⟩ = {} instead of {}", format_word(w), got, expected)
            });
        }
    }
    Ok(finish(rec, max_len, poly_degree.len()))
}

fn check_class(rec: &mut Recorder, word: &[Letter], c: &Class, line: &Class, poly: Option<u32>) {
    let d = c.intersect(line);
    let expected = poly.map_or_else(|| int(1 << word.len()), |p| int(p as i64));
    rec.record(Check::ClassDegree, word, d == expected, || format!("class degree {} instead of {}", d, expected));
    let squares = c.support().fold(BigRational::from_i64(0), |acc, (_, m)| acc.add(&m.mul(m)));
    let sum = c.support().fold(BigRational::from_i64(0), |acc, (_, m)| acc.add(m));
    let a = c.a_l();
    let ok = a.mul(a).sub(&squares) == int(1) && sum == a.sub(&int(1)).mul(&int(3));
    rec.record(Check::Noether, word, ok, || format!("d = {}, Σm² = {}, Σm = {}", a, squares, sum));
}

/// `[L]`, two exceptional classes and a mixed class on generator points.
fn basket(ops: &OperatorSet, r: usize) -> Vec<Class> {
    let p = ops.op(Letter::new(0, false)).base_ids()[0];
    let q = ops.op(Letter::new(r - 1, false)).inverse_base_ids()[1];
    let s = ops.op(Letter::new(r - 1, true)).base_ids()[2];
    vec![
        Class::line(),
        Class::exceptional(p),
        Class::exceptional(q),
        Class::from_parts(int(3), [(p, int(1)), (q, int(2)), (s, int(-1))]),
    ]
}

fn finish(rec: Recorder, max_len: usize, words: usize) -> CrosscheckReport {
    let tallies = ALL_CHECKS.iter().map(|c| (*c, rec.tallies.get(c).cloned().unwrap_or_default())).collect();
    CrosscheckReport { max_len, words, tallies, failures: rec.failures }
}
