use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::poly::HomPoly;

/// Integer 3×3 matrix, row-major.
pub type Mat3 = [[i64; 3]; 3];

pub const IDENTITY: Mat3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

pub fn det(m: &Mat3) -> i128 {
    let m: [[i128; 3]; 3] = m.map(|r| r.map(i128::from));
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Adjugate matrix: `m · adj(m) = det(m) · I`, the projective inverse.
pub fn adjugate(m: &Mat3) -> Mat3 {
    let c = |r1: usize, r2: usize, c1: usize, c2: usize| m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1];
    [
        [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
        [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
        [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
    ]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Result<Mat3> {
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s: i64 = 0;
            for k in 0..3 {
                s = a[i][k]
                    .checked_mul(b[k][j])
                    .and_then(|t| s.checked_add(t))
                    .ok_or_else(|| Error::InvalidInput("matrix entry overflow".into()))?;
            }
            out[i][j] = s;
        }
    }
    Ok(out)
}

pub fn apply_int(m: &Mat3, v: &[BigInt; 3]) -> [BigInt; 3] {
    std::array::from_fn(|i| &v[0] * m[i][0] + &v[1] * m[i][1] + &v[2] * m[i][2])
}

pub fn apply_f64(m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| m[i][0] as f64 * v[0] + m[i][1] as f64 * v[1] + m[i][2] as f64 * v[2])
}

/// Column `j` of `m`, i.e. the image of the coordinate point `e_j`.
pub fn column(m: &Mat3, j: usize) -> [i64; 3] {
    [m[0][j], m[1][j], m[2][j]]
}

/// The triple `m · f`, i.e. `(Σ_j m[0][j] f_j, ...)`.
pub fn combine(m: &Mat3, f: &[HomPoly; 3]) -> [HomPoly; 3] {
    std::array::from_fn(|i| {
        let mut acc = HomPoly::zero(f[0].degree());
        for j in 0..3 {
            if m[i][j] != 0 {
                let term = f[j].scale(&num_rational::BigRational::from_integer(m[i][j].into()));
                acc = acc.add(&term).expect("components share a degree");
            }
        }
        acc
    })
}

/// An invertible linear map of the plane with its projective inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    m: Mat3,
    adj: Mat3,
}

impl LinearMap {
    pub fn new(m: Mat3) -> Result<Self> {
        if det(&m) == 0 {
            return Err(Error::InvalidInput("singular matrix".into()));
        }
        Ok(LinearMap { m, adj: adjugate(&m) })
    }

    pub fn identity() -> Self {
        LinearMap { m: IDENTITY, adj: IDENTITY }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    /// Adjugate matrix, a representative of the inverse in PGL₃.
    pub fn inverse_matrix(&self) -> &Mat3 {
        &self.adj
    }

    pub fn inverse(&self) -> LinearMap {
        LinearMap { m: self.adj, adj: self.m }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        LinearMap::new(mat_mul(&self.m, &other.m)?)
    }

    /// Components `(Σ m[0][j] x_j, ...)`.
    pub fn components(&self) -> [HomPoly; 3] {
        [0, 1, 2].map(|i| HomPoly::linear(&self.m[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn adjugate_inverts(m in prop::array::uniform3(prop::array::uniform3(-9i64..10))) {
            let d = det(&m) as i64;
            let p = mat_mul(&m, &adjugate(&m)).unwrap();
            for (i, row) in p.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    prop_assert_eq!(*v, if i == j { d } else { 0 });
                }
            }
        }
    }

    #[test]
    fn singular_rejected() {
        assert!(LinearMap::new([[1, 2, 3], [2, 4, 6], [0, 0, 1]]).is_err());
        let a = LinearMap::new([[1, 1, 0], [0, 1, 0], [0, 0, 2]]).unwrap();
        let b = LinearMap::new([[0, 1, 0], [1, 0, 0], [0, 0, 1]]).unwrap();
        assert_eq!(a.compose(&b).unwrap().matrix(), &[[1, 1, 0], [1, 0, 0], [0, 0, 2]]);
    }
}
