//! Monte Carlo estimation of decoding failure rates.
//!
//! Trial `t` draws its error and any tie-breaking randomness from
//! `trial_rng(seed, t)`, and counts are merged as integers, so results do not
//! depend on the number of worker threads. Every decoder in an experiment
//! sees the same sequence of errors.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bp::{BpConfig, BpVariant, TannerGraph};
use crate::codes::{build_bb, build_rotated_surface, BbParams, CssCode};
use crate::detmodel::{bb_circuit_model, code_capacity_model, pheno_model, surface_circuit_model, DetectorModel};
use crate::error::{check_dim, Error, Result};
use crate::gf2::{mat_vec_t, BitVec, SparseBinMatrix};
use crate::noise::{make_trial, trial_rng};
use crate::postproc::{DcConfig, DecoderKind, MaskingMode, Pipeline, SecondRunPriors};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Success,
    /// The estimate matches the syndrome but differs from the error by a
    /// nontrivial logical.
    LogicalFailure,
    /// The estimate does not reproduce the syndrome.
    NonConvergent,
}

pub fn check_success(e: &BitVec, e_hat: &BitVec, h: &SparseBinMatrix, o: &SparseBinMatrix) -> Result<Outcome> {
    check_dim("estimate length", e.len(), e_hat.len())?;
    let residual = e.xor(e_hat)?;
    if !mat_vec_t(&residual, h)?.is_zero() {
        return Ok(Outcome::NonConvergent);
    }
    if !mat_vec_t(&residual, o)?.is_zero() {
        return Ok(Outcome::LogicalFailure);
    }
    Ok(Outcome::Success)
}

/// Wilson score interval at 95% for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (k as f64, n as f64);
    let phat = k / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0.0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo.min(phat), hi.max(phat))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureStats {
    pub trials: u64,
    pub failures_logical: u64,
    pub failures_nonconvergent: u64,
    pub failure_rate: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

impl FailureStats {
    pub fn from_counts(trials: u64, failures_logical: u64, failures_nonconvergent: u64) -> Self {
        let failures = failures_logical + failures_nonconvergent;
        assert!(failures <= trials, "more failures than trials");
        let (ci95_low, ci95_high) = wilson_interval(failures, trials);
        FailureStats {
            trials,
            failures_logical,
            failures_nonconvergent,
            failure_rate: if trials == 0 { 0.0 } else { failures as f64 / trials as f64 },
            ci95_low,
            ci95_high,
        }
    }

    pub fn from_outcomes(outcomes: &[Outcome]) -> Self {
        let count = |o| outcomes.iter().filter(|&&x| x == o).count() as u64;
        Self::from_counts(
            outcomes.len() as u64,
            count(Outcome::LogicalFailure),
            count(Outcome::NonConvergent),
        )
    }

    pub fn failures(&self) -> u64 {
        self.failures_logical + self.failures_nonconvergent
    }

    pub fn overlaps(&self, other: &FailureStats) -> bool {
        self.ci95_low <= other.ci95_high && other.ci95_low <= self.ci95_high
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CodeSpec {
    Surface { d: usize },
    Bb(BbParams),
}

impl CodeSpec {
    pub fn build(&self) -> Result<CssCode> {
        match self {
            CodeSpec::Surface { d } => build_rotated_surface(*d),
            CodeSpec::Bb(p) => build_bb(p),
        }
    }

    /// Comma-free name used in output records.
    pub fn name(&self) -> String {
        match self {
            CodeSpec::Surface { d } => format!("surface-d{d}"),
            CodeSpec::Bb(p) if BbParams::standard(p.l, p.m).ok().as_ref() == Some(p) => {
                format!("bb-l{}-m{}", p.l, p.m)
            }
            CodeSpec::Bb(p) => p.label().replace(',', "."),
        }
    }

    /// Default number of syndrome rounds: the code distance when known.
    pub fn default_rounds(&self) -> Option<usize> {
        match self {
            CodeSpec::Surface { d } => Some(*d),
            CodeSpec::Bb(p) => p.known_distance(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    CodeCapacity,
    Phenomenological,
    /// The BB syndrome circuit for BB codes, the four-layer surface circuit
    /// for surface codes.
    CircuitLevel,
}

impl NoiseModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseModel::CodeCapacity => "code-capacity",
            NoiseModel::Phenomenological => "phenomenological",
            NoiseModel::CircuitLevel => "circuit-level",
        }
    }

    pub fn has_rounds(&self) -> bool {
        *self != NoiseModel::CodeCapacity
    }
}

impl std::str::FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "code-capacity" => Ok(NoiseModel::CodeCapacity),
            "phenomenological" | "pheno" => Ok(NoiseModel::Phenomenological),
            "circuit-level" | "circuit" => Ok(NoiseModel::CircuitLevel),
            _ => Err(Error::InvalidArgument(format!("unknown noise model {s:?}"))),
        }
    }
}

/// Iteration cap used when none is configured: `n` in code capacity, 1000
/// for detector models.
pub fn default_max_iter(noise: NoiseModel, model: &DetectorModel) -> usize {
    match noise {
        NoiseModel::CodeCapacity => model.num_mechanisms(),
        _ => 1000,
    }
}

pub fn build_model(code: &CodeSpec, noise: NoiseModel, p: f64, rounds: Option<usize>) -> Result<DetectorModel> {
    let rounds = || {
        rounds
            .or_else(|| code.default_rounds())
            .ok_or_else(|| Error::InvalidArgument("number of rounds required for this code".into()))
    };
    match (noise, code) {
        (NoiseModel::CodeCapacity, _) => code_capacity_model(&code.build()?, p),
        (NoiseModel::Phenomenological, _) => pheno_model(&code.build()?, rounds()?, p),
        (NoiseModel::CircuitLevel, CodeSpec::Bb(params)) => bb_circuit_model(params, rounds()?, p),
        (NoiseModel::CircuitLevel, CodeSpec::Surface { d }) => surface_circuit_model(*d, rounds()?, p),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub code: CodeSpec,
    pub noise: NoiseModel,
    pub rates: Vec<f64>,
    /// Syndrome rounds; defaults to the code distance. Ignored in code capacity.
    pub rounds: Option<usize>,
    pub decoders: Vec<DecoderKind>,
    pub bp_variant: BpVariant,
    /// Defaults per [`default_max_iter`].
    pub max_iter: Option<usize>,
    pub second_run_priors: SecondRunPriors,
    pub masking_mode: MaskingMode,
    pub trials: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rates.is_empty() || self.decoders.is_empty() {
            return Err(Error::InvalidArgument("at least one rate and one decoder are required".into()));
        }
        if let Some(p) = self.rates.iter().find(|p| !(**p > 0.0 && **p < 0.5)) {
            return Err(Error::InvalidArgument(format!("rate {p} outside (0, 0.5)")));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    fn rounds_for_output(&self) -> Option<usize> {
        if self.noise.has_rounds() {
            self.rounds.or_else(|| self.code.default_rounds())
        } else {
            None
        }
    }
}

/// Per-trial outcomes for one decoder on one model, in trial order.
pub fn run_outcomes(
    model: &DetectorModel,
    kind: DecoderKind,
    bp: BpConfig,
    dc: DcConfig,
    trials: u64,
    seed: u64,
) -> Result<Vec<Outcome>> {
    let h = Arc::new(model.dcm.clone());
    let graph = Arc::new(TannerGraph::new(&h));
    let ddm = model.ddm.clone().map(Arc::new);
    let proto = Pipeline::with_graph(kind, graph, h, ddm, bp, dc)?;
    (0..trials)
        .into_par_iter()
        .map_init(
            || proto.clone(),
            |pipe, t| {
                let mut rng = trial_rng(seed, t);
                let sample = make_trial(model, &mut rng);
                let res = pipe.decode(&sample.syndrome, &model.priors, &mut rng)?;
                check_success(&sample.error, &res.estimate, &model.dcm, &model.observables)
            },
        )
        .collect()
}

/// One output row: a (rate, decoder) point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub code: String,
    pub noise: String,
    pub decoder: String,
    pub p: f64,
    #[serde(rename = "T")]
    pub rounds: Option<usize>,
    pub trials: u64,
    pub fail_logical: u64,
    pub fail_nonconv: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "code,noise,decoder,p,T,trials,fail_logical,fail_nonconv,rate,ci_low,ci_high,seed";

impl PointRecord {
    pub fn csv_row(&self) -> String {
        let rounds = self.rounds.map(|t| t.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.code,
            self.noise,
            self.decoder,
            self.p,
            rounds,
            self.trials,
            self.fail_logical,
            self.fail_nonconv,
            self.rate,
            self.ci_low,
            self.ci_high,
            self.seed
        )
    }

    pub fn stats(&self) -> FailureStats {
        FailureStats::from_counts(self.trials, self.fail_logical, self.fail_nonconv)
    }
}

pub fn to_csv(records: &[PointRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// One file per (code, noise, decoder) curve: columns `p rate ci_low ci_high`
/// sorted by `p`. Returns `(file name, contents)` pairs.
pub fn plot_data(records: &[PointRecord]) -> Vec<(String, String)> {
    let mut curves: std::collections::BTreeMap<(String, String, String), Vec<&PointRecord>> = Default::default();
    for r in records {
        curves
            .entry((r.code.clone(), r.noise.clone(), r.decoder.clone()))
            .or_default()
            .push(r);
    }
    curves
        .into_iter()
        .map(|((code, noise, decoder), mut pts)| {
            pts.sort_by(|a, b| a.p.total_cmp(&b.p));
            let mut body = String::from("# p failure_rate ci_low ci_high\n");
            for r in pts {
                let _ = writeln!(body, "{} {} {} {}", r.p, r.rate, r.ci_low, r.ci_high);
            }
            (format!("{code}_{noise}_{decoder}.dat"), body)
        })
        .collect()
}

/// Runs every (rate, decoder) point, rates outermost. `threads = None` uses
/// the global pool.
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<PointRecord>> {
    cfg.validate()?;
    let work = || -> Result<Vec<PointRecord>> {
        let mut records = Vec::new();
        for &p in &cfg.rates {
            let model = build_model(&cfg.code, cfg.noise, p, cfg.rounds)?;
            let bp = BpConfig {
                max_iter: cfg.max_iter.unwrap_or_else(|| default_max_iter(cfg.noise, &model)),
                variant: cfg.bp_variant,
            };
            let dc = DcConfig {
                second_run_priors: cfg.second_run_priors,
                masking_mode: cfg.masking_mode,
            };
            for &kind in &cfg.decoders {
                let outcomes = run_outcomes(&model, kind, bp, dc, cfg.trials, cfg.seed)?;
                let s = FailureStats::from_outcomes(&outcomes);
                records.push(PointRecord {
                    code: cfg.code.name(),
                    noise: cfg.noise.as_str().into(),
                    decoder: kind.as_str().into(),
                    p,
                    rounds: cfg.rounds_for_output(),
                    trials: s.trials,
                    fail_logical: s.failures_logical,
                    fail_nonconv: s.failures_nonconvergent,
                    rate: s.failure_rate,
                    ci_low: s.ci95_low,
                    ci_high: s.ci95_high,
                    seed: cfg.seed,
                });
            }
        }
        Ok(records)
    };
    match threads {
        None => work(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start {t} worker threads: {e}")))?
            .install(work),
    }
}

/// Failure statistics of a single-rate, single-decoder configuration.
pub fn run_trials(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<FailureStats> {
    if cfg.rates.len() != 1 || cfg.decoders.len() != 1 {
        return Err(Error::InvalidArgument("run_trials takes exactly one rate and one decoder".into()));
    }
    Ok(run_experiment(cfg, threads)?[0].stats())
}
