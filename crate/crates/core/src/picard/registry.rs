use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::ProjPoint;
use crate::scalar::Coord;

/// Dense identifier of a registered point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointId(pub u32);

/// Grid cell size of the float registry, in multiples of the tolerance.
const CELL_FACTOR: f64 = 1000.0;

/// Bidirectional map between canonical points and dense ids, scoped to one
/// walk or computation.
///
/// Exact points are matched by their normal form. Float points within the
/// tolerance of a registered point receive its id; the smallest distance
/// seen between a new point and a distinct registered neighbour is kept as
/// a health metric.
#[derive(Clone, Debug)]
pub struct PointRegistry<C: Coord> {
    points: Vec<[C; 3]>,
    index: HashMap<C::Key, Vec<PointId>>,
    tol: f64,
    cell: f64,
    min_sep: Option<f64>,
}

impl<C: Coord> PointRegistry<C> {
    pub fn new(tol: f64) -> Self {
        PointRegistry {
            points: Vec::new(),
            index: HashMap::new(),
            tol,
            cell: (tol * CELL_FACTOR).max(f64::MIN_POSITIVE),
            min_sep: None,
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest separation observed between distinct near neighbours.
    pub fn min_separation(&self) -> Option<f64> {
        self.min_sep
    }

    pub fn coords(&self, id: PointId) -> &[C; 3] {
        &self.points[id.0 as usize]
    }

    pub fn point(&self, id: PointId) -> ProjPoint<C> {
        ProjPoint::from_normalized(self.coords(id).clone())
    }

    /// Id of an already normalized triple, if registered.
    pub fn lookup(&self, v: &[C; 3]) -> Option<PointId> {
        let mut best: Option<(f64, PointId)> = None;
        for key in C::keys(v, self.cell) {
            if let Some(ids) = self.index.get(&key) {
                for &id in ids {
                    let w = &self.points[id.0 as usize];
                    if C::same_point(v, w, self.tol) {
                        let d = C::distance(v, w);
                        if best.is_none_or(|(bd, _)| d < bd) {
                            best = Some((d, id));
                        }
                    }
                }
            }
        }
        best.map(|(_, id)| id)
    }

    /// Nearest registered point to a normalized triple within the probing
    /// radius, with its distance.
    pub fn nearest(&self, v: &[C; 3]) -> Option<(f64, PointId)> {
        let mut best: Option<(f64, PointId)> = None;
        for key in C::keys(v, self.cell) {
            if let Some(ids) = self.index.get(&key) {
                for &id in ids {
                    let d = C::distance(v, &self.points[id.0 as usize]);
                    if best.is_none_or(|(b, _)| d < b) {
                        best = Some((d, id));
                    }
                }
            }
        }
        best
    }

    /// Registers a point given by raw coordinates; returns its id and
    /// whether it was new.
    pub fn register(&mut self, mut v: [C; 3]) -> Result<(PointId, bool)> {
        if !C::normalize(&mut v, self.tol) {
            return Err(Error::InvalidInput("the zero triple is not a point".into()));
        }
        Ok(self.register_normalized(v))
    }

    pub fn register_point(&mut self, p: &ProjPoint<C>) -> PointId {
        self.register_normalized(p.coords().clone()).0
    }

    /// Registers an already normalized triple.
    pub fn register_normalized(&mut self, v: [C; 3]) -> (PointId, bool) {
        let mut best: Option<(f64, PointId)> = None;
        for key in C::keys(&v, self.cell) {
            let Some(ids) = self.index.get(&key) else { continue };
            for &id in ids {
                let w = &self.points[id.0 as usize];
                let d = C::distance(&v, w);
                if C::same_point(&v, w, self.tol) {
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, id));
                    }
                } else {
                    self.min_sep = Some(self.min_sep.map_or(d, |m| m.min(d)));
                }
            }
        }
        if let Some((_, id)) = best {
            return (id, false);
        }
        let id = PointId(self.points.len() as u32);
        self.index.entry(C::home_key(&v, self.cell)).or_default().push(id);
        self.points.push(v);
        (id, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn exact_ids_are_canonical() {
        let mut r: PointRegistry<BigInt> = PointRegistry::new(0.0);
        let (a, new_a) = r.register([2, 4, -6].map(BigInt::from)).unwrap();
        let (b, new_b) = r.register([-1, -2, 3].map(BigInt::from)).unwrap();
        assert!(new_a && !new_b);
        assert_eq!(a, b);
        let (c, _) = r.register([1, 2, 4].map(BigInt::from)).unwrap();
        assert_ne!(a, c);
        assert_eq!(r.len(), 2);
        assert_eq!(r.coords(a), &[1, 2, -3].map(BigInt::from));
        assert_eq!(r.lookup(&[1, 2, 4].map(BigInt::from)), Some(c));
        assert!(r.register([0, 0, 0].map(BigInt::from)).is_err());
    }

    #[test]
    fn float_points_merge_within_tolerance() {
        let mut r: PointRegistry<f64> = PointRegistry::new(1e-9);
        let (a, _) = r.register([1.0, 2.0, 3.0]).unwrap();
        let (b, new_b) = r.register([1.0 + 1e-12, 2.0, 3.0]).unwrap();
        assert_eq!(a, b);
        assert!(!new_b);
        let (c, new_c) = r.register([1.0 + 1e-7, 2.0, 3.0]).unwrap();
        assert!(new_c);
        assert_ne!(a, c);
        let sep = r.min_separation().unwrap();
        assert!(sep > 0.0 && sep < 1e-7);
        // the projective antipode is the same point
        let (d, _) = r.register([-1.0, -2.0, -3.0]).unwrap();
        assert_eq!(d, a);
    }

    #[test]
    fn float_sign_boundary() {
        let mut r: PointRegistry<f64> = PointRegistry::new(1e-9);
        let (a, _) = r.register([1e-10, 1.0, 1.0]).unwrap();
        let (b, _) = r.register([-1e-10, 1.0, 1.0]).unwrap();
        assert_eq!(a, b);
    }
}
