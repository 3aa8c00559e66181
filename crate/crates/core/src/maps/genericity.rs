//! Finite certificates for the genericity of a generator tuple.
//!
//! Three checks are run over every reduced word of bounded length:
//! polynomial degree multiplicativity (words built by prepending letters and
//! cancelling common factors), the strict class-level pullback of `[L]`
//! (words built by appending letters, no transported point may collide or
//! fall on a contracted line), and proper base points for every letter.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::birmap::{cancel, BirMap};
use super::generator::GeneratorData;
use super::word::{format_word, letter_quad, Letter};
use super::DEFAULT_DEGREE_CAP;
use crate::error::{Error, Result};
use crate::picard::{OperatorSet, PointRegistry, WeilClassVector};
use crate::poly::HomPoly;
use crate::scalar::{Exact, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericityFailure {
    pub word: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub max_len: usize,
    pub words_checked: usize,
    pub failures: Vec<GenericityFailure>,
}

impl GenericityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_genericity(gens: &[GeneratorData], max_len: usize) -> Result<GenericityReport> {
    check_genericity_with_cap(gens, max_len, DEFAULT_DEGREE_CAP)
}

pub fn check_genericity_with_cap(gens: &[GeneratorData], max_len: usize, degree_cap: u64) -> Result<GenericityReport> {
    let top = if max_len >= 64 { u64::MAX } else { 1u64 << max_len };
    if top > degree_cap {
        return Err(Error::DegreeCap { degree: top, cap: degree_cap });
    }
    let mut failures = Vec::new();
    let mut fail = |w: &[Letter], reason: String| failures.push(GenericityFailure { word: format_word(w), reason });

    for (k, g) in gens.iter().enumerate() {
        for (inv, map) in [(false, g.map().clone()), (true, g.map().inverse()?)] {
            let l = Letter::new(k, inv);
            match map.has_only_proper_base_points() {
                Ok(true) => {}
                Ok(false) => fail(&[l], "infinitely near base points".into()),
                Err(e) => fail(&[l], e.to_string()),
            }
        }
    }

    let letters: Vec<Letter> = (0..2 * gens.len()).map(Letter::from_index).collect();
    let id = [HomPoly::var(0), HomPoly::var(1), HomPoly::var(2)];
    let mut words_checked = 0;
    let mut stack: Vec<(Vec<Letter>, [HomPoly; 3])> = vec![(Vec::new(), id)];
    while let Some((word, map)) = stack.pop() {
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
            words_checked += 1;
            let quad = letter_quad(gens, l)?;
            match cancel(quad.prepend_raw(&map)) {
                Ok((t, _)) => {
                    let expected = 1u32 << child.len();
                    if t[0].degree() != expected {
                        fail(&child, format!("degree {} instead of {}", t[0].degree(), expected));
                    }
                    stack.push((child, t));
                }
                Err(e) => fail(&child, e.to_string()),
            }
        }
    }

    let mut registry = PointRegistry::<BigInt>::new(0.0);
    match OperatorSet::new::<Exact>(gens, &mut registry) {
        Ok(ops) => {
            let mut stack: Vec<(Vec<Letter>, WeilClassVector<BigRational>)> =
                vec![(Vec::new(), WeilClassVector::line())];
            let line = WeilClassVector::<BigRational>::line();
            while let Some((word, class)) = stack.pop() {
                if word.len() == max_len {
                    continue;
                }
                for &l in &letters {
                    if word.last() == Some(&l.inverse()) {
                        continue;
                    }
                    let mut child = word.clone();
                    child.push(l);
                    match ops.apply_pullback::<Exact>(l, &class, &mut registry, true) {
                        Ok(c) => {
                            let expected = BigRational::from_i64(1 << child.len());
                            let deg = c.intersect(&line);
                            if deg != expected {
                                fail(&child, format!("class degree {} instead of {}", deg, expected));
                            }
                            stack.push((child, c));
                        }
                        Err(e) => fail(&child, e.to_string()),
                    }
                }
            }
        }
        Err(e) => fail(&[], format!("operator construction failed: {}", e)),
    }

    failures.sort_by(|a, b| (a.word.len(), &a.word).cmp(&(b.word.len(), &b.word)));
    failures.dedup();
    Ok(GenericityReport { max_len, words_checked, failures })
}

/// Whether the composed map of `word` has degree `2^len`.
pub fn word_is_degree_multiplicative(gens: &[GeneratorData], word: &[Letter]) -> Result<bool> {
    let map: BirMap = super::word::word_map(gens, word, u64::MAX)?;
    Ok(map.degree() as u64 == 1u64 << word.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampled_tuple_is_certified() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gens = crate::maps::sample_generators(2, 5, &mut rng).unwrap();
        let report = check_genericity(&gens, 3).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!(report.words_checked, 4 + 12 + 36);
    }

    #[test]
    fn repeated_sigma_fails() {
        let gens = vec![GeneratorData::sigma(), GeneratorData::sigma()];
        let report = check_genericity(&gens, 2).unwrap();
        assert!(!report.passed());
        assert!(report.failures.iter().any(|f| f.word == "aB"));
        assert!(report.failures.iter().any(|f| f.word == "aa"));
    }

    #[test]
    fn degree_cap_guard() {
        let gens = vec![GeneratorData::sigma(), GeneratorData::sigma()];
        assert!(matches!(check_genericity_with_cap(&gens, 9, 256), Err(Error::DegreeCap { .. })));
    }

    #[test]
    fn single_word_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gens = crate::maps::sample_generators(2, 5, &mut rng).unwrap();
        let w = crate::maps::parse_word("abA").unwrap();
        assert!(word_is_degree_multiplicative(&gens, &w).unwrap());
    }
}
