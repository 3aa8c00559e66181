use std::collections::HashSet;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::class::WeilClassVector;
use super::registry::{PointId, PointRegistry};
use crate::error::{Error, Result};
use crate::maps::generator::GeneratorData;
use crate::maps::linear::Mat3;
use crate::maps::word::Letter;
use crate::scalar::{Coord, Mode, Scalar};

/// Direction of a point transport.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Evaluate the inverse of the letter.
    Pullback,
    /// Evaluate the letter itself.
    Pushforward,
}

/// Outcome of transporting a point through one letter.
#[derive(Clone, Debug, PartialEq)]
pub enum Transported<C> {
    Point([C; 3]),
    /// The point is the `j`-th inverse base point of the letter.
    Table(usize),
}

/// Pullback data of one letter `g = a ∘ σ ∘ b`.
#[derive(Clone, Debug)]
pub struct GeneratorOperator {
    letter: Letter,
    adj_a: Mat3,
    adj_b: Mat3,
    base: [PointId; 3],
    inv_base: [PointId; 3],
}

impl GeneratorOperator {
    pub fn letter(&self) -> Letter {
        self.letter
    }

    /// Registered base points of the letter map.
    pub fn base_ids(&self) -> &[PointId; 3] {
        &self.base
    }

    /// Registered base points of the inverse map.
    pub fn inverse_base_ids(&self) -> &[PointId; 3] {
        &self.inv_base
    }

    /// `g*[L] = 2[L] − Σ E_{p_i}`.
    pub fn line_image<S: Scalar>(&self) -> WeilClassVector<S> {
        WeilClassVector::from_parts(S::from_i64(2), self.base.iter().map(|&p| (p, S::one())))
    }

    /// `g*[E_{q_j}] = [L] − E_{p_i} − E_{p_k}`.
    pub fn table_image<S: Scalar>(&self, j: usize) -> WeilClassVector<S> {
        let (i, k) = GeneratorData::correspondence(j);
        WeilClassVector::from_parts(S::one(), [(self.base[i], S::one()), (self.base[k], S::one())])
    }

    pub fn table_index(&self, p: PointId) -> Option<usize> {
        self.inv_base.iter().position(|&q| q == p)
    }

    /// `p ↦ adj(b) · σ(adj(a) · p)` on raw coordinates, left unnormalized.
    pub fn transport_raw<C: Coord>(&self, p: &[C; 3], tol: f64) -> Result<Transported<C>> {
        let u = C::apply_mat(&self.adj_a, p);
        let zeros = C::zero_flags(&u, tol);
        match zeros.iter().filter(|&&z| z).count() {
            0 => {}
            1 => {
                return Err(Error::DegenerateConfiguration(format!(
                    "point {} lies on a line contracted by {}⁻¹",
                    show(p),
                    self.letter
                )))
            }
            3 => return Err(Error::InvalidInput("the zero triple is not a point".into())),
            _ => {
                let j = zeros.iter().position(|&z| !z).expect("one nonzero coordinate");
                return Ok(Transported::Table(j));
            }
        }
        let s = [u[1].mul(&u[2]), u[0].mul(&u[2]), u[0].mul(&u[1])];
        let mut w = C::apply_mat(&self.adj_b, &s);
        C::reduce_partial(&mut w);
        Ok(Transported::Point(w))
    }
}

fn show<C: Coord>(p: &[C; 3]) -> String {
    let f = C::triple_to_f64(p);
    format!("[{:.6e} : {:.6e} : {:.6e}]", f[0], f[1], f[2])
}

/// Operators for every letter of a generator tuple over one registry.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    ops: Vec<GeneratorOperator>,
}

impl OperatorSet {
    /// Registers all base points and builds the operators. In exact mode the
    /// operators are checked on a basket of random classes.
    pub fn new<M: Mode>(gens: &[GeneratorData], registry: &mut PointRegistry<M::Coord>) -> Result<Self> {
        let mut ops = Vec::with_capacity(2 * gens.len());
        for k in 0..2 * gens.len() {
            let letter = Letter::from_index(k);
            let quad = gens[letter.gen].letter_map(letter.inv);
            let mut ids = |pts: [crate::poly::ProjPoint<BigInt>; 3]| -> Result<[PointId; 3]> {
                let mut out = [PointId(0); 3];
                for (slot, p) in out.iter_mut().zip(pts) {
                    *slot = registry.register(p.coords().clone().map(|c| M::coord_from_int(&c)))?.0;
                }
                Ok(out)
            };
            let base = ids(quad.base_points())?;
            let inv_base = ids(quad.inverse_base_points())?;
            ops.push(GeneratorOperator { letter, adj_a: *quad.adj_a(), adj_b: *quad.adj_b(), base, inv_base });
        }
        let set = OperatorSet { ops };
        if M::EXACT {
            set.self_check::<M>(registry)?;
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// The operator computing pullback by `letter`.
    pub fn op(&self, letter: Letter) -> &GeneratorOperator {
        &self.ops[letter.index()]
    }

    fn directed(&self, letter: Letter, dir: Direction) -> &GeneratorOperator {
        match dir {
            Direction::Pullback => self.op(letter),
            Direction::Pushforward => self.op(letter.inverse()),
        }
    }

    /// Image of a registered point under `letter⁻¹` (pullback) or `letter`
    /// (pushforward), registered.
    pub fn transport_point<C: Coord>(
        &self,
        letter: Letter,
        p: PointId,
        dir: Direction,
        registry: &mut PointRegistry<C>,
    ) -> Result<PointId> {
        let op = self.directed(letter, dir);
        match op.transport_raw(registry.coords(p), registry.tolerance())? {
            Transported::Point(w) => Ok(registry.register(w)?.0),
            Transported::Table(_) => Err(Error::IndeterminatePoint(format!(
                "point {} is a base point of the evaluated map",
                show(registry.coords(p))
            ))),
        }
    }

    /// `letter* c`. In strict mode a transported point that coincides with
    /// another transported point or with a base point of the letter is an
    /// error instead of an aggregation.
    pub fn apply_pullback<M: Mode>(
        &self,
        letter: Letter,
        class: &WeilClassVector<M::Scalar>,
        registry: &mut PointRegistry<M::Coord>,
        strict: bool,
    ) -> Result<WeilClassVector<M::Scalar>> {
        apply_op::<M>(self.op(letter), class, registry, strict)
    }

    /// `letter_* c = (letter⁻¹)* c`.
    pub fn apply_pushforward<M: Mode>(
        &self,
        letter: Letter,
        class: &WeilClassVector<M::Scalar>,
        registry: &mut PointRegistry<M::Coord>,
        strict: bool,
    ) -> Result<WeilClassVector<M::Scalar>> {
        apply_op::<M>(self.op(letter.inverse()), class, registry, strict)
    }

    /// `w* c` for `w = γ_1 ∘ ... ∘ γ_n`, applying `γ_1*` first.
    pub fn pullback_word<M: Mode>(
        &self,
        word: &[Letter],
        class: &WeilClassVector<M::Scalar>,
        registry: &mut PointRegistry<M::Coord>,
        strict: bool,
    ) -> Result<WeilClassVector<M::Scalar>> {
        let mut c = class.clone();
        for &l in word {
            c = self.apply_pullback::<M>(l, &c, registry, strict)?;
        }
        Ok(c)
    }

    /// `w_* c`, applying `γ_n_*` first.
    pub fn pushforward_word<M: Mode>(
        &self,
        word: &[Letter],
        class: &WeilClassVector<M::Scalar>,
        registry: &mut PointRegistry<M::Coord>,
        strict: bool,
    ) -> Result<WeilClassVector<M::Scalar>> {
        let mut c = class.clone();
        for &l in word.iter().rev() {
            c = self.apply_pushforward::<M>(l, &c, registry, strict)?;
        }
        Ok(c)
    }

    fn self_check<M: Mode>(&self, registry: &PointRegistry<M::Coord>) -> Result<()> {
        let mut reg = registry.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let fail = |what: &str, l: Letter| Err(Error::Incompatible(format!("operator {} failed {}", l, what)));
        let line = WeilClassVector::<M::Scalar>::line();
        for op in &self.ops {
            let img = apply_op::<M>(op, &line, &mut reg, false)?;
            if img != op.line_image() || img.self_intersection() != M::Scalar::one() {
                return fail("the line image check", op.letter);
            }
        }
        let mut pool: Vec<PointId> = self.ops.iter().flat_map(|op| op.base.iter().copied()).collect();
        while pool.len() < self.ops.len() * 3 + 8 {
            let raw: [i64; 3] = std::array::from_fn(|_| rng.random_range(-50..=50));
            let Ok((id, _)) = reg.register(raw.map(|v| M::coord_from_int(&BigInt::from(v)))) else { continue };
            let clean = self.ops.iter().all(|op| op.transport_raw(reg.coords(id), reg.tolerance()).is_ok());
            if clean {
                pool.push(id);
            }
        }
        for _ in 0..4 {
            let mut c = WeilClassVector::<M::Scalar>::zero();
            c.add_a_l(&M::Scalar::from_i64(rng.random_range(-5..=5)));
            for _ in 0..4 {
                let p = pool[rng.random_range(0..pool.len())];
                c.add_coeff(p, &M::Scalar::from_i64(rng.random_range(-5..=5)));
            }
            for op in &self.ops {
                let inv = &self.ops[op.letter.inverse().index()];
                let up = match apply_op::<M>(op, &c, &mut reg, false) {
                    Ok(v) => v,
                    Err(e) if e.is_degeneracy() => continue,
                    Err(e) => return Err(e),
                };
                let back = apply_op::<M>(inv, &up, &mut reg, false)?;
                if back != c {
                    return fail("the inverse round trip", op.letter);
                }
                if up.self_intersection() != c.self_intersection() {
                    return fail("the isometry check", op.letter);
                }
            }
        }
        Ok(())
    }
}

fn apply_op<M: Mode>(
    op: &GeneratorOperator,
    class: &WeilClassVector<M::Scalar>,
    registry: &mut PointRegistry<M::Coord>,
    strict: bool,
) -> Result<WeilClassVector<M::Scalar>> {
    let mut out = op.line_image::<M::Scalar>().scaled(class.a_l());
    let mut seen: HashSet<PointId> = op.base.iter().copied().collect();
    for (p, a_p) in class.support() {
        let minus = a_p.neg();
        if let Some(j) = op.table_index(p) {
            out.add_scaled(&op.table_image(j), &minus);
            continue;
        }
        let id = match op.transport_raw(registry.coords(p), registry.tolerance())? {
            Transported::Point(w) => registry.register(w)?.0,
            Transported::Table(j) => {
                // float coordinates within tolerance of an inverse base point
                out.add_scaled(&op.table_image(j), &minus);
                continue;
            }
        };
        if strict && !seen.insert(id) {
            return Err(Error::DegenerateConfiguration(format!(
                "transported point {} collides under {}*",
                show(registry.coords(id)),
                op.letter
            )));
        }
        out.add_coeff(id, a_p);
    }
    Ok(out)
}
