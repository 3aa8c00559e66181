//! The reduced-word class stack.
//!
//! Frame `k` holds the `k`-th letter of the reduced word `f_1 … f_ℓ` (in
//! order of application) together with an undo log for the normalized class
//! `θ = c / 2^ℓ`, where `c = (f_ℓ ∘ … ∘ f_1)*[L]`. Pushing a letter `g`
//! updates `θ ← θ − 2^{-(ℓ+1)} Σ_i (f_ℓ ∘ … ∘ f_1)*[E_{p_i(g)}]`; popping
//! replays the undo log, so cancellation restores the previous class bit for
//! bit.
//!
//! Newly transported points of a walk converge geometrically to a limit
//! point of the plane. In float mode the class is therefore tracked only up
//! to a resolution depth: the first push whose new points come within
//! `health_factor · tolerance` of a registered point (or of each other) fixes
//! that depth, and deeper frames carry no class update. The reduced word and
//! the degree `2^ℓ` stay exact at every depth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{format_word, GeneratorData, Letter};
use crate::picard::{OperatorSet, PointId, PointRegistry, Transported, WeilClassVector};
use crate::scalar::{Coord, Mode, Scalar};

/// Float tolerance of walks; transported points are accurate to about
/// `1e-13` at the depths a float walk can resolve.
pub const DEFAULT_WALK_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WalkConfig {
    /// Treat transported points landing on base points or on the current
    /// support as degeneracies instead of aggregating them.
    pub strict: bool,
    /// Largest reduced length allowed in exact mode.
    pub exact_len_cap: usize,
    /// Largest number of steps allowed in float mode.
    pub float_step_cap: usize,
    /// Float zero and matching tolerance.
    pub tolerance: f64,
    /// Float separation below `health_factor · tolerance` ends class
    /// tracking at the current depth.
    pub health_factor: f64,
    /// Check the exact-mode invariants after every step.
    pub verify: bool,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            strict: true,
            exact_len_cap: 16,
            float_step_cap: 5000,
            tolerance: DEFAULT_WALK_TOLERANCE,
            health_factor: 10.0,
            verify: true,
        }
    }
}

/// Events that a strict walk would have refused.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkCounters {
    /// Transported points that matched a point already in the support.
    pub merges: usize,
    /// Transported points that landed on a base point of a lower letter.
    pub table_hits: usize,
    /// Float pushes beyond the resolution depth, without class update.
    pub truncated_pushes: usize,
}

#[derive(Clone, Debug)]
struct Frame<S> {
    letter: Letter,
    undo: Vec<(PointId, Option<S>)>,
    prev_a_l: S,
    increment: f64,
    applied: bool,
}

/// Result of a single step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub popped: bool,
    /// `‖θ_{n+1} − θ_n‖` in the canonical basis.
    pub increment: f64,
}

enum Pulled<C, S: Scalar> {
    Point([C; 3]),
    Class(WeilClassVector<S>),
}

/// State of one walk: operators, registry, frames and the current `θ`.
#[derive(Clone, Debug)]
pub struct WalkState<M: Mode> {
    ops: OperatorSet,
    registry: PointRegistry<M::Coord>,
    frames: Vec<Frame<M::Scalar>>,
    theta: WeilClassVector<M::Scalar>,
    config: WalkConfig,
    steps: usize,
    counters: WalkCounters,
    resolution_depth: Option<usize>,
}

impl<M: Mode> WalkState<M> {
    pub fn new(gens: &[GeneratorData], config: WalkConfig) -> Result<Self> {
        let mut registry = PointRegistry::new(if M::EXACT { 0.0 } else { config.tolerance });
        let ops = OperatorSet::new::<M>(gens, &mut registry)?;
        Ok(WalkState {
            ops,
            registry,
            frames: Vec::new(),
            theta: WeilClassVector::line(),
            config,
            steps: 0,
            counters: WalkCounters::default(),
            resolution_depth: None,
        })
    }

    pub fn reduced_len(&self) -> usize {
        self.frames.len()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// The reduced word `f_1 … f_ℓ` in order of application.
    pub fn word(&self) -> Vec<Letter> {
        self.frames.iter().map(|f| f.letter).collect()
    }

    /// `θ_n = c_n / 2^{ℓ_n}`.
    pub fn theta(&self) -> &WeilClassVector<M::Scalar> {
        &self.theta
    }

    /// `c_n = (f^n)*[L]`. Overflows in float mode for very long words.
    pub fn class(&self) -> WeilClassVector<M::Scalar> {
        let deg = M::Scalar::one().div(&M::Scalar::pow2_neg(self.frames.len() as u32));
        self.theta.scaled(&deg)
    }

    pub fn registry(&self) -> &PointRegistry<M::Coord> {
        &self.registry
    }

    pub fn operators(&self) -> &OperatorSet {
        &self.ops
    }

    pub fn counters(&self) -> &WalkCounters {
        &self.counters
    }

    pub fn config(&self) -> &WalkConfig {
        &self.config
    }

    /// Number of frames carrying a class update. They always form a prefix
    /// of the stack, so `θ` is the class of that prefix.
    pub fn tracked_len(&self) -> usize {
        self.frames.iter().take_while(|f| f.applied).count()
    }

    /// Deepest frame carrying a class update, once float resolution ran out.
    pub fn resolution_depth(&self) -> Option<usize> {
        self.resolution_depth
    }

    /// Appends `letter` to the itinerary: pops on cancellation, pushes
    /// otherwise.
    pub fn step(&mut self, letter: Letter) -> Result<StepOutcome> {
        if letter.gen >= self.ops.len() / 2 {
            return Err(Error::InvalidInput(format!("letter {} outside the generator tuple", letter)));
        }
        if !M::EXACT && self.steps >= self.config.float_step_cap {
            return Err(Error::InvalidInput(format!("float step cap {} reached", self.config.float_step_cap)));
        }
        let outcome = if self.frames.last().is_some_and(|f| f.letter == letter.inverse()) {
            let frame = self.frames.pop().expect("nonempty stack");
            for (p, old) in frame.undo.into_iter().rev() {
                self.theta.set_coeff(p, old);
            }
            self.theta.set_a_l(frame.prev_a_l);
            StepOutcome { popped: true, increment: frame.increment }
        } else {
            let increment = self.push(letter)?;
            StepOutcome { popped: false, increment }
        };
        self.steps += 1;
        if M::EXACT && self.config.verify {
            self.verify()?;
        }
        Ok(outcome)
    }

    fn push(&mut self, letter: Letter) -> Result<f64> {
        let len = self.frames.len();
        if M::EXACT && len >= self.config.exact_len_cap {
            return Err(Error::ExactLengthCap { len: len + 1, cap: self.config.exact_len_cap });
        }
        let w = M::Scalar::pow2_neg(len as u32 + 1);
        let prev_a_l = self.theta.a_l().clone();
        let mut frame = Frame { letter, undo: Vec::new(), prev_a_l, increment: 0.0, applied: false };
        if w.is_zero() || self.resolution_depth.is_some_and(|d| len >= d) {
            self.counters.truncated_pushes += 1;
            self.frames.push(frame);
            return Ok(0.0);
        }
        let mut pulled = Vec::with_capacity(3);
        for p in *self.ops.op(letter).base_ids() {
            pulled.push(self.pull_exceptional(p)?);
        }
        if !M::EXACT && !self.resolved(&pulled) {
            self.resolution_depth = Some(len);
            self.counters.truncated_pushes += 1;
            self.frames.push(frame);
            return Ok(0.0);
        }
        let mut delta = WeilClassVector::<M::Scalar>::zero();
        for item in pulled {
            match item {
                Pulled::Point(v) => {
                    let (q, _) = self.registry.register_normalized(v);
                    if self.theta.contains(q) || delta.contains(q) {
                        if self.config.strict {
                            return Err(Error::DegenerateConfiguration(format!(
                                "transported base point of {} collides with {} after word {}",
                                letter,
                                show_point(self.registry.coords(q)),
                                format_word(&self.word())
                            )));
                        }
                        self.counters.merges += 1;
                    }
                    delta.add_coeff(q, &w);
                }
                Pulled::Class(c) => delta.add_scaled(&c, &w.neg()),
            }
        }
        for (q, v) in delta.support() {
            frame.undo.push((q, self.theta.get(q).cloned()));
            self.theta.add_coeff(q, v);
        }
        self.theta.add_a_l(delta.a_l());
        frame.increment = delta.l2_norm();
        frame.applied = true;
        let increment = frame.increment;
        self.frames.push(frame);
        Ok(increment)
    }

    /// Whether the new points are resolved: each either matches a registered
    /// point outside the support or keeps the health separation from the
    /// registry and from the other new points.
    fn resolved(&self, pulled: &[Pulled<M::Coord, M::Scalar>]) -> bool {
        let tol = self.config.tolerance;
        let threshold = self.config.health_factor * tol;
        let points: Vec<&[M::Coord; 3]> = pulled
            .iter()
            .filter_map(|p| match p {
                Pulled::Point(v) => Some(v),
                Pulled::Class(_) => None,
            })
            .collect();
        for (i, v) in points.iter().enumerate() {
            match self.registry.nearest(v) {
                Some((d, id)) if d <= tol && self.theta.contains(id) => return false,
                Some((d, _)) if d > tol && d < threshold => return false,
                _ => {}
            }
            if points[..i].iter().any(|u| M::Coord::distance(u, v) < threshold) {
                return false;
            }
        }
        true
    }

    /// `(f_ℓ ∘ … ∘ f_1)*[E_p]`, by transporting `p` through `f_ℓ*` first.
    /// A point image is returned normalized and unregistered.
    fn pull_exceptional(&mut self, p: PointId) -> Result<Pulled<M::Coord, M::Scalar>> {
        let tol = self.registry.tolerance();
        let mut v = self.registry.coords(p).clone();
        for k in (0..self.frames.len()).rev() {
            let op = self.ops.op(self.frames[k].letter);
            let moved = op.transport_raw(&v, tol).map_err(|e| self.annotate(e, k))?;
            match moved {
                Transported::Point(u) => v = u,
                Transported::Table(j) => {
                    if self.config.strict {
                        return Err(Error::DegenerateConfiguration(format!(
                            "transported point {} is a base point of {}⁻¹ (letter {} of word {})",
                            show_point(&v),
                            self.frames[k].letter,
                            k + 1,
                            format_word(&self.word())
                        )));
                    }
                    self.counters.table_hits += 1;
                    let mut c = op.table_image::<M::Scalar>(j);
                    for kk in (0..k).rev() {
                        c = self.ops.apply_pullback::<M>(self.frames[kk].letter, &c, &mut self.registry, false)?;
                    }
                    return Ok(Pulled::Class(c));
                }
            }
        }
        if !M::Coord::normalize(&mut v, tol) {
            return Err(Error::DegenerateConfiguration("transport produced the zero triple".into()));
        }
        Ok(Pulled::Point(v))
    }

    fn annotate(&self, e: Error, k: usize) -> Error {
        match e {
            Error::DegenerateConfiguration(msg) => Error::DegenerateConfiguration(format!(
                "{} (letter {} of word {})",
                msg,
                k + 1,
                format_word(&self.word())
            )),
            other => other,
        }
    }

    fn verify(&self) -> Result<()> {
        let len = self.frames.len() as u32;
        let expected = M::Scalar::pow2_neg(2 * len);
        let s = self.theta.self_intersection();
        if s != expected {
            return Err(Error::InvariantViolation(format!(
                "self-intersection {} instead of 4^-{} after word {}",
                s.to_f64(),
                len,
                format_word(&self.word())
            )));
        }
        if let Some((p, _)) = self.theta.support().find(|(_, v)| v.is_negative()) {
            return Err(Error::InvariantViolation(format!(
                "negative multiplicity at {} after word {}",
                show_point(self.registry.coords(p)),
                format_word(&self.word())
            )));
        }
        if self.counters.table_hits == 0 && *self.theta.a_l() != M::Scalar::one() {
            return Err(Error::InvariantViolation(format!(
                "degree of word {} is not 2^{}",
                format_word(&self.word()),
                len
            )));
        }
        Ok(())
    }
}

fn show_point<C: Coord>(p: &[C; 3]) -> String {
    let f = C::triple_to_f64(p);
    format!("[{:.6e} : {:.6e} : {:.6e}]", f[0], f[1], f[2])
}
