//! Walk runs and their serializable reports.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::itinerary::Itinerary;
use super::state::{WalkConfig, WalkCounters, WalkState};
use crate::error::{Error, Result};
use crate::maps::{format_word, parse_word, GeneratorData, GeneratorJson};
use crate::picard::{ClassDump, ClassEntry, PointRegistry, WeilClassVector};
use crate::scalar::{Exact, Float, Mode, Scalar};

/// Arithmetic mode selected at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithMode {
    Exact,
    Float,
}

impl fmt::Display for ArithMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArithMode::Exact => Exact::NAME,
            ArithMode::Float => Float::NAME,
        })
    }
}

impl FromStr for ArithMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ArithMode::Exact),
            "float" => Ok(ArithMode::Float),
            _ => Err(Error::Parse(format!("unknown mode {:?}", s))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunOptions {
    pub steps: usize,
    /// Interval between class dumps; `0` keeps only the first and last.
    pub checkpoint_every: usize,
    pub config: WalkConfig,
}

impl RunOptions {
    pub fn new(steps: usize, checkpoint_every: usize) -> Self {
        RunOptions { steps, checkpoint_every, ..Default::default() }
    }

    fn is_checkpoint(&self, n: usize) -> bool {
        n == 0 || (self.checkpoint_every > 0 && n.is_multiple_of(self.checkpoint_every))
    }
}

/// One CSV row per step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: usize,
    pub reduced_len: usize,
    /// `log2 deg_n = ℓ_n`.
    pub log2_deg: usize,
    /// `‖θ_n − θ_{n−1}‖`.
    pub cauchy_increment: f64,
    /// `ℓ_n log 2 / n`.
    pub drift_estimate: f64,
    /// `⟨θ_n, θ_n⟩`.
    pub self_intersection: f64,
    pub health_min_separation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: usize,
    pub reduced_len: usize,
    /// Length of the prefix whose class updates are included in `theta`;
    /// below `reduced_len` only past a float resolution depth.
    pub tracked_len: usize,
    /// Reduced word `f_1 … f_ℓ` in order of application.
    pub word: String,
    pub theta: ClassDump,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortKind {
    Degeneracy,
    LengthCap,
    InvariantViolation,
    Other,
}

/// Why and where a walk stopped early.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbortRecord {
    /// Index of the step that failed.
    pub step: usize,
    pub letter: String,
    /// Reduced word before the failing step.
    pub word: String,
    pub kind: AbortKind,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkSummary {
    pub steps_completed: usize,
    pub final_reduced_len: usize,
    pub final_word: String,
    pub drift_estimate: f64,
    pub support_size: usize,
    /// Largest coefficients `α_p` of the final `θ`.
    pub top_coefficients: Vec<ClassEntry>,
    pub counters: WalkCounters,
    pub resolution_depth: Option<usize>,
    pub min_separation: Option<f64>,
    pub registry_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkReport {
    pub mode: ArithMode,
    pub generators: Vec<GeneratorJson>,
    pub itinerary: Itinerary,
    pub options: RunOptions,
    /// Letters consumed by completed steps.
    pub letters: String,
    pub records: Vec<StepRecord>,
    pub checkpoints: Vec<Checkpoint>,
    pub summary: WalkSummary,
    pub abort: Option<AbortRecord>,
}

/// Number of coefficients listed in the summary.
const TOP_COEFFICIENTS: usize = 10;

pub fn run_walk<M: Mode>(gens: &[GeneratorData], itinerary: &Itinerary, options: &RunOptions) -> Result<WalkReport> {
    if let Itinerary::Uniform { r, .. } = itinerary {
        if *r != gens.len() {
            return Err(Error::Incompatible(format!("itinerary over {} generators, tuple has {}", r, gens.len())));
        }
    }
    if !M::EXACT && options.steps > options.config.float_step_cap {
        return Err(Error::InvalidInput(format!(
            "{} steps exceed the float step cap {}",
            options.steps, options.config.float_step_cap
        )));
    }
    let letters = itinerary.letters(options.steps)?;
    if let Some(l) = letters.iter().find(|l| l.gen >= gens.len()) {
        return Err(Error::Incompatible(format!("letter {} outside a tuple of {} generators", l, gens.len())));
    }
    let mut state = WalkState::<M>::new(gens, options.config.clone())?;
    let mut records = vec![record(&state, 0.0)];
    let mut checkpoints = vec![checkpoint(&state)];
    let mut abort = None;
    for (i, &l) in letters.iter().enumerate() {
        let word = format_word(&state.word());
        match state.step(l) {
            Ok(outcome) => {
                records.push(record(&state, outcome.increment));
                if options.is_checkpoint(state.steps()) {
                    checkpoints.push(checkpoint(&state));
                }
            }
            Err(e) => {
                let kind = match &e {
                    Error::ExactLengthCap { .. } => AbortKind::LengthCap,
                    Error::InvariantViolation(_) => AbortKind::InvariantViolation,
                    e if e.is_degeneracy() => AbortKind::Degeneracy,
                    _ => AbortKind::Other,
                };
                abort = Some(AbortRecord { step: i + 1, letter: l.to_string(), word, kind, error: e.to_string() });
                break;
            }
        }
    }
    if checkpoints.last().is_some_and(|c| c.n != state.steps()) {
        checkpoints.push(checkpoint(&state));
    }
    let summary = summarize(&state);
    Ok(WalkReport {
        mode: if M::EXACT { ArithMode::Exact } else { ArithMode::Float },
        generators: gens.iter().map(GeneratorData::to_json).collect(),
        itinerary: itinerary.clone(),
        options: options.clone(),
        letters: format_word(&letters[..state.steps()]),
        records,
        checkpoints,
        summary,
        abort,
    })
}

/// [`run_walk`] with the mode chosen at run time.
pub fn run_walk_in(
    mode: ArithMode,
    gens: &[GeneratorData],
    itinerary: &Itinerary,
    options: &RunOptions,
) -> Result<WalkReport> {
    match mode {
        ArithMode::Exact => run_walk::<Exact>(gens, itinerary, options),
        ArithMode::Float => run_walk::<Float>(gens, itinerary, options),
    }
}

fn record<M: Mode>(state: &WalkState<M>, increment: f64) -> StepRecord {
    let n = state.steps();
    let len = state.reduced_len();
    StepRecord {
        n,
        reduced_len: len,
        log2_deg: len,
        cauchy_increment: increment,
        drift_estimate: if n == 0 { 0.0 } else { len as f64 * std::f64::consts::LN_2 / n as f64 },
        self_intersection: state.theta().self_intersection().to_f64(),
        health_min_separation: state.registry().min_separation(),
    }
}

fn checkpoint<M: Mode>(state: &WalkState<M>) -> Checkpoint {
    Checkpoint {
        n: state.steps(),
        reduced_len: state.reduced_len(),
        tracked_len: state.tracked_len(),
        word: format_word(&state.word()),
        theta: state.theta().dump(state.registry()),
    }
}

fn summarize<M: Mode>(state: &WalkState<M>) -> WalkSummary {
    let mut top: Vec<_> = state.theta().support().map(|(p, v)| (p, v.to_f64())).collect();
    top.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let top_coefficients = top
        .iter()
        .take(TOP_COEFFICIENTS)
        .map(|&(p, _)| ClassEntry {
            point: state.registry().coords(p).clone().map(|c| crate::scalar::Coord::to_json(&c)),
            coeff: state.theta().coeff(p).to_json(),
        })
        .collect();
    let n = state.steps();
    let len = state.reduced_len();
    WalkSummary {
        steps_completed: n,
        final_reduced_len: len,
        final_word: format_word(&state.word()),
        drift_estimate: if n == 0 { 0.0 } else { len as f64 * std::f64::consts::LN_2 / n as f64 },
        support_size: state.theta().support_len(),
        top_coefficients,
        counters: state.counters().clone(),
        resolution_depth: state.resolution_depth(),
        min_separation: state.registry().min_separation(),
        registry_size: state.registry().len(),
    }
}

impl WalkReport {
    /// Generators rebuilt from the stored matrices.
    pub fn generator_data(&self) -> Result<Vec<GeneratorData>> {
        self.generators.iter().map(|g| GeneratorData::new(g.a, g.b)).collect()
    }

    pub fn completed(&self) -> bool {
        self.abort.is_none()
    }

    pub fn final_checkpoint(&self) -> &Checkpoint {
        self.checkpoints.last().expect("a report always holds the initial checkpoint")
    }

    pub fn checkpoint_at(&self, n: usize) -> Option<&Checkpoint> {
        self.checkpoints.iter().find(|c| c.n == n)
    }

    /// Letters consumed by the walk, in order.
    pub fn letter_sequence(&self) -> Result<Vec<crate::maps::Letter>> {
        parse_word(&self.letters)
    }

    /// Loads every checkpoint class into `registry`.
    pub fn load_checkpoints<M: Mode>(
        &self,
        registry: &mut PointRegistry<M::Coord>,
    ) -> Result<Vec<WeilClassVector<M::Scalar>>> {
        self.checkpoints.iter().map(|c| c.theta.load::<M::Scalar, M::Coord>(registry)).collect()
    }

    /// Per-step CSV with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Letter;
    use crate::testutil::fixture;

    #[test]
    fn empty_walk_holds_the_line() {
        let gens = fixture();
        let rep = run_walk::<Exact>(&gens, &Itinerary::uniform(2, 0), &RunOptions::new(0, 1)).unwrap();
        assert_eq!(rep.records.len(), 1);
        assert_eq!(rep.records[0].log2_deg, 0);
        assert_eq!(rep.checkpoints.len(), 1);
        let mut reg = PointRegistry::new(0.0);
        let theta = rep.load_checkpoints::<Exact>(&mut reg).unwrap();
        assert_eq!(theta[0], WeilClassVector::line());
        assert!(rep.completed());
    }

    #[test]
    fn runs_are_deterministic() {
        let gens = fixture();
        let it = Itinerary::uniform(2, 11);
        for mode in [ArithMode::Exact, ArithMode::Float] {
            let a = run_walk_in(mode, &gens, &it, &RunOptions::new(10, 3)).unwrap();
            let b = run_walk_in(mode, &gens, &it, &RunOptions::new(10, 3)).unwrap();
            assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
            assert_eq!(a.checkpoints.iter().map(|c| c.n).collect::<Vec<_>>(), vec![0, 3, 6, 9, 10]);
            let back = WalkReport::from_json(&a.to_json().unwrap()).unwrap();
            assert_eq!(back, a);
        }
    }

    #[test]
    fn csv_layout() {
        let gens = fixture();
        let rep = run_walk::<Float>(&gens, &Itinerary::uniform(2, 2), &RunOptions::new(5, 0)).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,reduced_len,log2_deg,cauchy_increment,drift_estimate,self_intersection,health_min_separation"
        );
        assert_eq!(lines.count(), 6);
    }

    #[test]
    fn length_cap_is_recorded() {
        let gens = fixture();
        let mut opts = RunOptions::new(6, 1);
        opts.config.exact_len_cap = 2;
        let rep = run_walk::<Exact>(&gens, &Itinerary::constant(Letter::new(0, false)), &opts).unwrap();
        let abort = rep.abort.as_ref().unwrap();
        assert_eq!(abort.kind, AbortKind::LengthCap);
        assert_eq!(abort.step, 3);
        assert_eq!(abort.word, "aa");
        assert_eq!(rep.summary.steps_completed, 2);
        assert_eq!(rep.final_checkpoint().n, 2);
        assert_eq!(rep.letters, "aa");
    }

    #[test]
    fn rejects_bad_inputs() {
        let gens = fixture();
        let mut opts = RunOptions::new(20, 0);
        opts.config.float_step_cap = 10;
        assert!(run_walk::<Float>(&gens, &Itinerary::uniform(2, 0), &opts).is_err());
        assert!(run_walk::<Exact>(&gens, &Itinerary::uniform(3, 0), &RunOptions::new(1, 0)).is_err());
        let far = Itinerary::constant(Letter::new(4, false));
        assert!(run_walk::<Exact>(&gens, &far, &RunOptions::new(1, 0)).is_err());
        assert_eq!("float".parse::<ArithMode>().unwrap(), ArithMode::Float);
        assert!("double".parse::<ArithMode>().is_err());
    }
}
