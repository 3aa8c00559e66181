use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::word::{format_word, parse_word, Letter};

/// Source of the letters `f_1, f_2, ...` of a walk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Itinerary {
    /// Uniform over the `2r` letters, driven by a seeded ChaCha8 stream.
    Uniform { r: usize, seed: u64 },
    /// The same letter at every step.
    Constant { letter: String },
    /// A fixed finite sequence.
    Explicit { letters: String },
}

impl Itinerary {
    pub fn uniform(r: usize, seed: u64) -> Self {
        Itinerary::Uniform { r, seed }
    }

    pub fn constant(letter: Letter) -> Self {
        Itinerary::Constant { letter: letter.to_string() }
    }

    pub fn explicit(letters: &[Letter]) -> Self {
        Itinerary::Explicit { letters: format_word(letters) }
    }

    /// The first `n` letters.
    pub fn letters(&self, n: usize) -> Result<Vec<Letter>> {
        match self {
            Itinerary::Uniform { r, seed } => {
                if *r == 0 {
                    return Err(Error::InvalidInput("uniform itinerary over zero generators".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..n).map(|_| Letter::from_index(rng.random_range(0..2 * r))).collect())
            }
            Itinerary::Constant { letter } => {
                let w = parse_word(letter)?;
                let [l] = w.as_slice() else {
                    return Err(Error::InvalidInput(format!("{:?} is not a single letter", letter)));
                };
                Ok(vec![*l; n])
            }
            Itinerary::Explicit { letters } => {
                let w = parse_word(letters)?;
                if w.len() < n {
                    return Err(Error::InvalidInput(format!("itinerary has {} letters, {} requested", w.len(), n)));
                }
                Ok(w[..n].to_vec())
            }
        }
    }

    /// Seed of a uniform itinerary.
    pub fn seed(&self) -> Option<u64> {
        match self {
            Itinerary::Uniform { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_prefix_stable() {
        let it = Itinerary::uniform(2, 7);
        let a = it.letters(50).unwrap();
        assert_eq!(a, it.letters(50).unwrap());
        assert_eq!(&a[..20], &it.letters(20).unwrap()[..]);
        assert!(a.iter().all(|l| l.gen < 2));
        assert_ne!(a, Itinerary::uniform(2, 8).letters(50).unwrap());
    }

    #[test]
    fn uniform_hits_every_letter() {
        let a = Itinerary::uniform(3, 1).letters(600).unwrap();
        let mut counts = [0usize; 6];
        for l in a {
            counts[l.index()] += 1;
        }
        assert!(counts.iter().all(|&c| c > 60), "{:?}", counts);
    }

    #[test]
    fn constant_and_explicit() {
        let g = Letter::new(1, true);
        assert_eq!(Itinerary::constant(g).letters(3).unwrap(), vec![g; 3]);
        let w = parse_word("abBA").unwrap();
        let it = Itinerary::explicit(&w);
        assert_eq!(it.letters(4).unwrap(), w);
        assert!(it.letters(5).is_err());
        let json = serde_json::to_string(&it).unwrap();
        assert_eq!(json, r#"{"kind":"explicit","letters":"abBA"}"#);
        assert_eq!(serde_json::from_str::<Itinerary>(&json).unwrap(), it);
    }
}
