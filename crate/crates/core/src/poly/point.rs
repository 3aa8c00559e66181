use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::scalar::Coord;

/// A point of the projective plane in canonical normal form.
///
/// Exact coordinates are coprime integers with the first nonzero one
/// positive, so projective equality is coordinate equality. Float
/// coordinates have unit norm with the first nonzero one positive.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint<C: Coord> {
    coords: [C; 3],
}

impl<C: Coord> ProjPoint<C> {
    pub fn new(mut coords: [C; 3], tol: f64) -> Result<Self> {
        if !C::normalize(&mut coords, tol) {
            return Err(Error::InvalidInput("the zero triple is not a point".into()));
        }
        Ok(ProjPoint { coords })
    }

    /// Wraps coordinates already in normal form.
    pub(crate) fn from_normalized(coords: [C; 3]) -> Self {
        ProjPoint { coords }
    }

    pub fn coords(&self) -> &[C; 3] {
        &self.coords
    }

    pub fn into_coords(self) -> [C; 3] {
        self.coords
    }

    /// Index of the first nonzero coordinate.
    pub fn chart(&self, tol: f64) -> usize {
        self.coords.iter().position(|c| !c.is_zero_tol(tol)).unwrap_or(0)
    }

    pub fn to_f64(&self) -> [f64; 3] {
        C::triple_to_f64(&self.coords)
    }
}

impl ProjPoint<BigInt> {
    pub fn from_ints(v: [i64; 3]) -> Result<Self> {
        Self::new(v.map(BigInt::from), 0.0)
    }

    /// Coordinate point `e_i`.
    pub fn coordinate(i: usize) -> Self {
        let mut v = [0i64; 3];
        v[i] = 1;
        Self::from_ints(v).expect("coordinate points are nonzero")
    }
}

impl<C: Coord + fmt::Display> fmt::Display for ProjPoint<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {} : {}]", self.coords[0], self.coords[1], self.coords[2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_forms() {
        let p = ProjPoint::from_ints([-2, 4, 0]).unwrap();
        assert_eq!(p, ProjPoint::from_ints([1, -2, 0]).unwrap());
        assert_eq!(p.to_string(), "[1 : -2 : 0]");
        assert!(ProjPoint::from_ints([0, 0, 0]).is_err());
        assert_eq!(ProjPoint::coordinate(2).chart(0.0), 2);
        let q = ProjPoint::new([0.0, -3.0, 4.0], 1e-9).unwrap();
        assert_eq!(q.coords(), &[0.0, 0.6, -0.8]);
    }
}
