use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use birwalk_core::crosscheck::{crosscheck, CrosscheckReport};
use birwalk_core::equidist::{equidist_diagnostic, EquidistOptions, EquidistSeries, PlaneCurve};
use birwalk_core::maps::genericity::check_genericity_with_cap;
use birwalk_core::maps::{sample_generators, GeneratorData, GeneratorJson, GenericityReport};
use birwalk_core::walk::{
    boundary_compare, cauchy_diagnostic, degree_crosscheck, run_walk_in, AbortKind, ArithMode, BoundaryComparison,
    CauchySeries, DegreeCheck, Itinerary, RunOptions, WalkConfig, WalkReport,
};
use birwalk_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{GeneratorSpec, RunConfig};
use crate::VERSION_STAMP;

/// Overall result of a command, ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Ok,
    /// A run stopped on a degenerate configuration or a resource cap.
    Degeneracy,
    /// An identity that must hold failed.
    InvariantViolation,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Degeneracy => 1,
            Outcome::InvariantViolation => 2,
        }
    }
}

/// Exit code of a failed command: `1` for degeneracies, `2` for invariant
/// violations, `3` for anything else.
pub fn error_exit_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<Error>() {
        Some(Error::InvariantViolation(_)) => 2,
        Some(err) if err.is_degeneracy() => 1,
        _ => 3,
    }
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value)?;
    fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn csv_writer(dir: &Path, name: &str) -> Result<csv::Writer<BufWriter<File>>> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleArtifact {
    pub version: String,
    pub spec: GeneratorSpec,
    /// Tuples drawn before one passed its certificate.
    pub attempts: usize,
    pub generators: Vec<GeneratorJson>,
    pub certificate: GenericityReport,
}

fn sample_certified(config: &RunConfig, r: usize, height: i64, seed: u64) -> Result<(Vec<GeneratorData>, GenericityReport, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=config.sampling_retries.max(1) {
        let gens = sample_generators(r, height, &mut rng)?;
        let cert = check_genericity_with_cap(&gens, config.certificate_len, config.caps.degree_cap)?;
        if cert.passed() {
            return Ok((gens, cert, attempt));
        }
    }
    Err(Error::SamplingExhausted(config.sampling_retries).into())
}

/// The tuple named by the config, with its certificate when sampled.
pub fn resolve_generators(config: &RunConfig) -> Result<(Vec<GeneratorData>, Option<GenericityReport>)> {
    match &config.generators {
        GeneratorSpec::Sample { r, height, seed } => {
            let (gens, cert, _) = sample_certified(config, *r, *height, *seed)?;
            Ok((gens, Some(cert)))
        }
        GeneratorSpec::Explicit { generators } => {
            let gens = generators.iter().map(GeneratorData::from_json).collect::<birwalk_core::Result<_>>()?;
            Ok((gens, None))
        }
        GeneratorSpec::File { path } => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let artifact: SampleArtifact =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let gens = artifact.generators.iter().map(GeneratorData::from_json).collect::<birwalk_core::Result<_>>()?;
            Ok((gens, Some(artifact.certificate)))
        }
    }
}

/// Samples a certified tuple and writes `generators.json`.
pub fn cmd_sample(config: &RunConfig) -> Result<(SampleArtifact, Outcome)> {
    let GeneratorSpec::Sample { r, height, seed } = config.generators.clone() else {
        bail!(Error::InvalidInput("sample needs a generator spec of kind \"sample\"".into()));
    };
    let (gens, certificate, attempts) = sample_certified(config, r, height, seed)?;
    let artifact = SampleArtifact {
        version: VERSION_STAMP.into(),
        spec: config.generators.clone(),
        attempts,
        generators: gens.iter().map(GeneratorData::to_json).collect(),
        certificate,
    };
    write_json(&config.output_dir, "generators.json", &artifact)?;
    Ok((artifact, Outcome::Ok))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub report: WalkReport,
    pub cauchy: CauchySeries,
    /// Exact mode only.
    pub degree_check: Option<DegreeCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkArtifact {
    pub version: String,
    pub config: RunConfig,
    pub generators: Vec<GeneratorJson>,
    pub certificate: Option<GenericityReport>,
    pub trials: Vec<TrialResult>,
}

#[derive(Serialize)]
struct DriftRow {
    trial: usize,
    seed: u64,
    steps_completed: usize,
    final_reduced_len: usize,
    drift_estimate: f64,
    aborted: bool,
}

#[derive(Serialize)]
struct CauchyCsvRow {
    trial: usize,
    seed: u64,
    n: usize,
    n_next: usize,
    reduced_len_next: usize,
    distance: f64,
    self_intersection: f64,
    expected_self_intersection: f64,
}

fn walk_options(config: &RunConfig) -> RunOptions {
    RunOptions {
        steps: config.steps,
        checkpoint_every: config.checkpoint_every,
        config: WalkConfig {
            exact_len_cap: config.caps.exact_len,
            float_step_cap: config.caps.float_steps,
            tolerance: config.tolerance,
            ..Default::default()
        },
    }
}

/// Runs the configured trials in parallel and writes `walk.json`, one step
/// CSV per trial, `drift.csv` and `cauchy.csv`.
pub fn cmd_walk(config: &RunConfig) -> Result<(WalkArtifact, Outcome)> {
    let (gens, certificate) = resolve_generators(config)?;
    let options = walk_options(config);
    let seeds = config.trial_seeds();
    let trials: Vec<TrialResult> = seeds
        .par_iter()
        .enumerate()
        .map(|(trial, &seed)| -> Result<TrialResult> {
            let report = run_walk_in(config.mode, &gens, &Itinerary::uniform(gens.len(), seed), &options)?;
            let cauchy = cauchy_diagnostic(&report)?;
            let degree_check = match config.mode {
                ArithMode::Exact => Some(degree_crosscheck(&report, config.max_len)?),
                ArithMode::Float => None,
            };
            Ok(TrialResult { trial, seed, report, cauchy, degree_check })
        })
        .collect::<Result<_>>()?;

    let mut outcome = Outcome::Ok;
    for t in &trials {
        if let Some(a) = &t.report.abort {
            let o = match a.kind {
                AbortKind::InvariantViolation => Outcome::InvariantViolation,
                _ => Outcome::Degeneracy,
            };
            outcome = outcome.max(o);
        }
        if t.degree_check.as_ref().is_some_and(|d| !d.failures.is_empty()) {
            outcome = Outcome::InvariantViolation;
        }
    }

    let dir = &config.output_dir;
    let mut drift = csv_writer(dir, "drift.csv")?;
    let mut cauchy = csv_writer(dir, "cauchy.csv")?;
    for t in &trials {
        let s = &t.report.summary;
        drift.serialize(DriftRow {
            trial: t.trial,
            seed: t.seed,
            steps_completed: s.steps_completed,
            final_reduced_len: s.final_reduced_len,
            drift_estimate: s.drift_estimate,
            aborted: t.report.abort.is_some(),
        })?;
        for r in &t.cauchy.rows {
            cauchy.serialize(CauchyCsvRow {
                trial: t.trial,
                seed: t.seed,
                n: r.n,
                n_next: r.n_next,
                reduced_len_next: r.reduced_len_next,
                distance: r.distance,
                self_intersection: r.self_intersection,
                expected_self_intersection: r.expected_self_intersection,
            })?;
        }
        let file = File::create(dir.join(format!("trial_{}.csv", t.trial)))?;
        t.report.write_csv(BufWriter::new(file))?;
    }
    drift.flush()?;
    cauchy.flush()?;

    let artifact = WalkArtifact {
        version: VERSION_STAMP.into(),
        config: config.clone(),
        generators: gens.iter().map(GeneratorData::to_json).collect(),
        certificate,
        trials,
    };
    write_json(dir, "walk.json", &artifact)?;
    Ok((artifact, outcome))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckArtifact {
    pub version: String,
    pub generators: Vec<GeneratorJson>,
    pub report: CrosscheckReport,
}

/// Exhaustive identities over reduced words up to `max_len`; writes
/// `crosscheck.json`. Failures on a tuple that fails its own genericity
/// certificate count as degeneracies, otherwise as invariant violations.
pub fn cmd_crosscheck(config: &RunConfig) -> Result<(CrosscheckArtifact, Outcome)> {
    let (gens, _) = resolve_generators(config)?;
    let report = crosscheck(&gens, config.max_len)?;
    let outcome = if report.passed() {
        Outcome::Ok
    } else if check_genericity_with_cap(&gens, config.max_len, config.caps.degree_cap)?.passed() {
        Outcome::InvariantViolation
    } else {
        Outcome::Degeneracy
    };
    let artifact = CrosscheckArtifact {
        version: VERSION_STAMP.into(),
        generators: gens.iter().map(GeneratorData::to_json).collect(),
        report,
    };
    write_json(&config.output_dir, "crosscheck.json", &artifact)?;
    Ok((artifact, outcome))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistTrial {
    pub trial: usize,
    pub seed: u64,
    pub series: EquidistSeries,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistArtifact {
    pub version: String,
    pub generators: Vec<GeneratorJson>,
    pub curve: String,
    pub trials: Vec<EquidistTrial>,
    /// Rows that failed, as `trial:len: error`.
    pub warnings: Vec<String>,
}

/// Curve-pullback distance and bound series per trial; writes
/// `equidist.json` and `equidist_trial_<i>.csv`.
pub fn cmd_equidist(config: &RunConfig) -> Result<(EquidistArtifact, Outcome)> {
    if config.mode != ArithMode::Exact {
        bail!(Error::InvalidInput("curve pullbacks run in exact mode only".into()));
    }
    let (gens, _) = resolve_generators(config)?;
    let curve: PlaneCurve = config.equidist.curve.parse()?;
    let options = EquidistOptions {
        max_len: config.equidist.max_len,
        limit_extra: config.equidist.limit_extra,
        degree_cap: config.caps.degree_cap,
        ..Default::default()
    };
    let seeds = config.trial_seeds();
    let trials: Vec<EquidistTrial> = seeds
        .par_iter()
        .enumerate()
        .map(|(trial, &seed)| -> Result<EquidistTrial> {
            let series = equidist_diagnostic(&gens, &Itinerary::uniform(gens.len(), seed), &curve, &options)?;
            Ok(EquidistTrial { trial, seed, series })
        })
        .collect::<Result<_>>()?;

    let mut outcome = Outcome::Ok;
    let mut warnings = Vec::new();
    for t in &trials {
        if !t.series.bound_holds() {
            outcome = Outcome::Degeneracy;
        }
        for r in &t.series.rows {
            if let Some(e) = &r.error {
                warnings.push(format!("{}:{}: {}", t.trial, r.len, e));
            }
        }
        let file = File::create(config.output_dir.join(format!("equidist_trial_{}.csv", t.trial)))
            .or_else(|_| {
                fs::create_dir_all(&config.output_dir)?;
                File::create(config.output_dir.join(format!("equidist_trial_{}.csv", t.trial)))
            })?;
        t.series.write_csv(BufWriter::new(file))?;
    }
    let artifact = EquidistArtifact {
        version: VERSION_STAMP.into(),
        generators: gens.iter().map(GeneratorData::to_json).collect(),
        curve: curve.to_string(),
        trials,
        warnings,
    };
    write_json(&config.output_dir, "equidist.json", &artifact)?;
    Ok((artifact, outcome))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparePair {
    pub trial: usize,
    pub seed_a: u64,
    pub seed_b: u64,
    pub comparison: BoundaryComparison,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareArtifact {
    pub version: String,
    pub pairs: Vec<ComparePair>,
}

/// Pairs the final classes of trial `i` of two walk artifacts for every `i`
/// present in both; writes `compare.json`.
pub fn cmd_compare(a: &Path, b: &Path, out: &Path) -> Result<(CompareArtifact, Outcome)> {
    let load = |p: &Path| -> Result<WalkArtifact> {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
    };
    let (wa, wb) = (load(a)?, load(b)?);
    let pairs = wa
        .trials
        .iter()
        .zip(&wb.trials)
        .map(|(ta, tb)| -> Result<ComparePair> {
            Ok(ComparePair {
                trial: ta.trial,
                seed_a: ta.seed,
                seed_b: tb.seed,
                comparison: boundary_compare(&ta.report, &tb.report)?,
            })
        })
        .collect::<Result<_>>()?;
    let artifact = CompareArtifact { version: VERSION_STAMP.into(), pairs };
    write_json(out, "compare.json", &artifact)?;
    Ok((artifact, Outcome::Ok))
}
