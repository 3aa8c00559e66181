use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::poly::hompoly::dense_exps;
use crate::poly::text::parse_poly;
use crate::poly::{is_squarefree, HomPoly};

/// Retry budget of [`PlaneCurve::random`].
const RANDOM_TRIES: usize = 100;

/// A reduced plane curve `h = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneCurve {
    h: HomPoly,
}

impl PlaneCurve {
    /// Rejects constant and non-squarefree equations.
    pub fn new(h: HomPoly) -> Result<Self> {
        if h.is_zero() || h.degree() == 0 {
            return Err(Error::InvalidInput("a curve needs a nonconstant equation".into()));
        }
        if !is_squarefree(&h)? {
            return Err(Error::InvalidInput(format!("{} has a repeated factor", h)));
        }
        Ok(PlaneCurve { h })
    }

    /// The line `c_0 x + c_1 y + c_2 z = 0`.
    pub fn line(c: [i64; 3]) -> Result<Self> {
        Self::new(HomPoly::linear(&c))
    }

    /// A curve with uniform integer coefficients in `[-height, height]`.
    pub fn random<R: Rng>(degree: u32, height: i64, rng: &mut R) -> Result<Self> {
        if degree == 0 || height < 1 {
            return Err(Error::InvalidInput("random curves need degree ≥ 1 and height ≥ 1".into()));
        }
        for _ in 0..RANDOM_TRIES {
            let terms: Vec<_> = dense_exps(degree)
                .into_iter()
                .map(|e| (e, rng.random_range(-height..=height)))
                .collect();
            let h = HomPoly::from_int_terms(degree, &terms)?;
            if h.is_zero() {
                continue;
            }
            if let Ok(c) = Self::new(h) {
                return Ok(c);
            }
        }
        Err(Error::SamplingExhausted(RANDOM_TRIES))
    }

    pub fn equation(&self) -> &HomPoly {
        &self.h
    }

    pub fn degree(&self) -> u32 {
        self.h.degree()
    }
}

impl FromStr for PlaneCurve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_poly(s)?)
    }
}

impl fmt::Display for PlaneCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.h.fmt(f)
    }
}
