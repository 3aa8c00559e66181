use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::hompoly::{powers, HomPoly};
use super::point::ProjPoint;

/// Multiplicity of the curve `p = 0` at `pt`: the order of the lowest
/// nonvanishing Taylor term in the affine chart of the first nonzero
/// coordinate of `pt`. Zero iff the curve misses the point.
///
/// Partial derivatives in the two chart variables commute with
/// dehomogenization, so order-`k` Taylor coefficients are the order-`k`
/// partials evaluated at the homogeneous integer coordinates. Each
/// coefficient `∂_u^i ∂_v^j p / (i! j!)` is summed term by term from
/// binomials and precomputed powers.
pub fn multiplicity_at(p: &HomPoly, pt: &ProjPoint<BigInt>) -> u32 {
    assert!(!p.is_zero(), "multiplicity of the zero polynomial");
    let w = pt.chart(0.0);
    let (u, v) = match w {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let (terms, _) = p.integer_parts();
    let pows = powers(pt.coords(), p.degree());
    let binom = binomials(p.degree() as usize);
    for k in 0..=p.degree() as usize {
        for i in 0..=k {
            let j = k - i;
            let mut acc = BigInt::zero();
            for (e, c) in &terms {
                let (a, b) = (e[u] as usize, e[v] as usize);
                if a < i || b < j {
                    continue;
                }
                let factor = &binom[a][i] * &binom[b][j];
                acc += c * factor * &pows[u][a - i] * &pows[v][b - j] * &pows[w][e[w] as usize];
            }
            if !acc.is_zero() {
                return k as u32;
            }
        }
    }
    unreachable!("a nonzero form has a nonvanishing Taylor term of order at most its degree")
}

fn binomials(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut row = vec![BigInt::one(); m + 1];
        for r in 1..m {
            row[r] = &rows[m - 1][r - 1] + &rows[m - 1][r];
        }
        rows.push(row);
    }
    rows
}
