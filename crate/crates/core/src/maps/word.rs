use std::fmt;

use serde::{Deserialize, Serialize};

use super::birmap::{cancel, BirMap};
use super::generator::GeneratorData;
use super::linear::combine;
use crate::error::{Error, Result};
use crate::poly::{jacobian_det, HomPoly};

/// A generator `g_i` or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    /// Dense index `2·gen + inv`.
    pub fn index(self) -> usize {
        2 * self.gen + self.inv as usize
    }

    pub fn from_index(k: usize) -> Self {
        Letter { gen: k / 2, inv: k % 2 == 1 }
    }
}

impl fmt::Display for Letter {
    /// `a, b, c, ...` for generators, upper case for inverses.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = (b'a' + self.gen as u8) as char;
        if self.inv {
            write!(f, "{}", c.to_ascii_uppercase())
        } else {
            write!(f, "{}", c)
        }
    }
}

pub fn format_word(w: &[Letter]) -> String {
    w.iter().map(|l| l.to_string()).collect()
}

pub fn parse_word(s: &str) -> Result<Vec<Letter>> {
    s.chars()
        .map(|c| match c {
            'a'..='z' => Ok(Letter::new((c as u8 - b'a') as usize, false)),
            'A'..='Z' => Ok(Letter::new((c as u8 - b'A') as usize, true)),
            _ => Err(Error::Parse(format!("bad letter {:?}", c))),
        })
        .collect()
}

pub fn is_reduced(w: &[Letter]) -> bool {
    w.windows(2).all(|p| p[1] != p[0].inverse())
}

/// Free reduction.
pub fn reduce(w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// The inverse word: reversed, each letter inverted.
pub fn invert_word(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| l.inverse()).collect()
}

/// All reduced words of length `≤ max_len` over `r` generators, by length
/// then letter index.
pub fn reduced_words(r: usize, max_len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for k in 0..2 * r {
                let l = Letter::from_index(k);
                if w.last() != Some(&l.inverse()) {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// The composed map of a word `[γ_1, ..., γ_n]`, i.e. `γ_1 ∘ ... ∘ γ_n`,
/// built right to left by prepending one quadratic map at a time.
pub struct WordChain {
    /// `suffixes[k]` is the triple of `γ_{k+1} ∘ ... ∘ γ_n`, so
    /// `suffixes[n]` is the identity and `suffixes[0]` the whole word.
    pub suffixes: Vec<[HomPoly; 3]>,
    /// Degree of the gcd cancelled at each prepend, indexed like `suffixes`.
    pub drops: Vec<u32>,
}

impl WordChain {
    pub fn new(gens: &[GeneratorData], word: &[Letter], degree_cap: u64) -> Result<Self> {
        let n = word.len();
        let id = [HomPoly::var(0), HomPoly::var(1), HomPoly::var(2)];
        let mut suffixes = vec![id; n + 1];
        let mut drops = vec![0; n + 1];
        for k in (0..n).rev() {
            let quad = letter_quad(gens, word[k])?;
            let next_degree = 2 * suffixes[k + 1][0].degree() as u64;
            if next_degree > degree_cap {
                return Err(Error::DegreeCap { degree: next_degree, cap: degree_cap });
            }
            let (t, g) = cancel(quad.prepend_raw(&suffixes[k + 1]))?;
            suffixes[k] = t;
            drops[k] = g.degree();
        }
        Ok(WordChain { suffixes, drops })
    }

    pub fn map(&self) -> &[HomPoly; 3] {
        &self.suffixes[0]
    }

    pub fn degree(&self) -> u32 {
        self.suffixes[0][0].degree()
    }

    /// Whether no prepend cancelled a common factor.
    pub fn is_degree_multiplicative(&self) -> bool {
        self.drops.iter().all(|&d| d == 0)
    }
}

pub(crate) fn letter_quad(gens: &[GeneratorData], l: Letter) -> Result<super::generator::Quadratic> {
    gens.get(l.gen)
        .map(|g| g.letter_map(l.inv))
        .ok_or_else(|| Error::InvalidInput(format!("letter {} names a missing generator", l)))
}

/// The composed birational map of a word, with its inverse.
pub fn word_map(gens: &[GeneratorData], word: &[Letter], degree_cap: u64) -> Result<BirMap> {
    let fwd = WordChain::new(gens, word, degree_cap)?;
    let back = WordChain::new(gens, &invert_word(word), degree_cap)?;
    Ok(BirMap::from_parts(fwd.suffixes[0].clone(), Some(back.suffixes[0].clone())))
}

/// Factors whose product is the Jacobian of the word map up to a nonzero
/// constant. When every prepend is degree-multiplicative these are the
/// chain-rule factors `l ∘ (γ_{k+1} ∘ ... ∘ γ_n)` for the rows `l` of each
/// `b_k`; otherwise the Jacobian itself.
pub fn jacobian_factors(gens: &[GeneratorData], chain: &WordChain, word: &[Letter]) -> Result<Vec<HomPoly>> {
    if word.is_empty() {
        return Ok(Vec::new());
    }
    if !chain.is_degree_multiplicative() {
        return Ok(vec![jacobian_det(chain.map())?]);
    }
    let mut out = Vec::with_capacity(3 * word.len());
    for (k, &l) in word.iter().enumerate() {
        let quad = letter_quad(gens, l)?;
        let rows = quad.jacobian_lines();
        let suffix = &chain.suffixes[k + 1];
        out.extend(combine(&rows, suffix));
    }
    Ok(out)
}
