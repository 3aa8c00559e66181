//! Homogeneous polynomials in three variables.

pub mod gcd;
pub mod hompoly;
pub mod multiplicity;
pub mod point;
pub mod text;

pub use gcd::{coprime, gcd_many, poly_gcd};
pub use hompoly::{Exps, HomPoly};
pub use multiplicity::multiplicity_at;
pub use point::ProjPoint;

use crate::error::{Error, Result};

/// Determinant of the Jacobian matrix `(∂f_i/∂x_j)`.
pub fn jacobian_det(f: &[HomPoly; 3]) -> Result<HomPoly> {
    let d = f[0].degree();
    if d == 0 || f.iter().any(|p| p.degree() != d) {
        return Err(Error::InvalidInput("components must share a degree d ≥ 1".into()));
    }
    let j: [[HomPoly; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|v| f[i].derivative(v)));
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| -> Result<HomPoly> {
        j[r1][c1].mul(&j[r2][c2]).sub(&j[r1][c2].mul(&j[r2][c1]))
    };
    let t0 = j[0][0].mul(&minor(1, 2, 1, 2)?);
    let t1 = j[0][1].mul(&minor(1, 2, 0, 2)?);
    let t2 = j[0][2].mul(&minor(1, 2, 0, 1)?);
    let det = t0.sub(&t1)?.add(&t2)?;
    if det.is_zero() {
        Ok(HomPoly::zero(3 * d - 3))
    } else {
        Ok(det)
    }
}

/// Whether `p` has no repeated factor: `gcd(p, ∂p/∂x, ∂p/∂y, ∂p/∂z)` is
/// constant.
pub fn is_squarefree(p: &HomPoly) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::InvalidInput("squarefreeness of the zero polynomial".into()));
    }
    if p.degree() == 0 {
        return Ok(true);
    }
    let g = gcd_many(&[p.clone(), p.derivative(0), p.derivative(1), p.derivative(2)])?;
    Ok(g.degree() == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> HomPoly {
        s.parse().unwrap()
    }

    #[test]
    fn jacobians() {
        let id = [p("x"), p("y"), p("z")];
        assert_eq!(jacobian_det(&id).unwrap(), p("1"));
        let sigma = [p("y*z"), p("x*z"), p("x*y")];
        assert_eq!(jacobian_det(&sigma).unwrap(), p("2*x*y*z"));
        let quad = [p("x^2 + y*z"), p("3*x*y - z^2"), p("y^2 + x*z")];
        assert_eq!(jacobian_det(&quad).unwrap().degree(), 3);
        assert!(jacobian_det(&[p("x"), p("y^2"), p("z")]).is_err());
    }

    #[test]
    fn squarefree_examples() {
        assert!(is_squarefree(&p("x*y*z")).unwrap());
        assert!(!is_squarefree(&p("x^2*y")).unwrap());
        let sq = p("x + y").pow(2).mul(&p("z - x"));
        assert!(!is_squarefree(&sq).unwrap());
        assert!(is_squarefree(&p("x^2 + y^2 - z^2")).unwrap());
    }

    fn arb_nonconstant() -> impl Strategy<Value = HomPoly> {
        (1u32..3).prop_flat_map(|d| {
            prop::collection::vec((0..=d, 0..=d, -5i64..6), 1..5).prop_map(move |ts| {
                let terms: Vec<_> = ts
                    .into_iter()
                    .filter(|(i, j, _)| i + j <= d)
                    .map(|(i, j, c)| ([i, j, d - i - j], c))
                    .collect();
                HomPoly::from_int_terms(d, &terms).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn square_times_anything_is_not_squarefree(a in arb_nonconstant(), b in arb_nonconstant()) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            prop_assert!(!is_squarefree(&a.pow(2).mul(&b)).unwrap());
        }

        #[test]
        fn jacobian_degree(
            c in prop::collection::vec(-3i64..4, 18)
        ) {
            let exps = hompoly::dense_exps(2);
            let f: [HomPoly; 3] = std::array::from_fn(|k| {
                let terms: Vec<_> = exps.iter().zip(&c[6 * k..6 * k + 6]).map(|(e, v)| (*e, *v)).collect();
                HomPoly::from_int_terms(2, &terms).unwrap()
            });
            prop_assume!(f.iter().all(|q| !q.is_zero()));
            let j = jacobian_det(&f).unwrap();
            prop_assert_eq!(j.degree(), 3);
        }
    }
}
