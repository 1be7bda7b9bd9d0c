//! Degeneracy cutting, OSD-0 and the composed decoding pipelines.
//!
//! Degeneracy cutting takes the soft output of a failed BP run and, for every
//! row of a degeneracy matrix (`H_X` in code capacity, a detector degeneracy
//! matrix otherwise), removes the supported variable with the lowest error
//! probability. BP is then rerun once on the reduced graph.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bp::{BpConfig, BpDecoder, BpOutput, TannerGraph};
use crate::error::{check_dim, Error, Result};
use crate::gf2::{self, BitVec, SparseBinMatrix};

/// Priors fed to the BP run after cutting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SecondRunPriors {
    /// The first run's soft output, with cut variables set to 0.
    Posterior,
    /// The original priors, with cut variables set to 0.
    ResetToPrior,
}

/// How cut variables are removed from the second BP run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskingMode {
    DeleteColumns,
    ZeroPriors,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DcConfig {
    pub second_run_priors: SecondRunPriors,
    pub masking_mode: MaskingMode,
}

impl DcConfig {
    pub fn new(second_run_priors: SecondRunPriors) -> Self {
        DcConfig {
            second_run_priors,
            masking_mode: MaskingMode::ZeroPriors,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    Bp,
    BpDc,
    BpOsd,
    BpDcOsd,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 4] = [
        DecoderKind::Bp,
        DecoderKind::BpDc,
        DecoderKind::BpOsd,
        DecoderKind::BpDcOsd,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DecoderKind::Bp => "bp",
            DecoderKind::BpDc => "bp-dc",
            DecoderKind::BpOsd => "bp-osd",
            DecoderKind::BpDcOsd => "bp-dc-osd",
        }
    }

    pub fn uses_dc(&self) -> bool {
        matches!(self, DecoderKind::BpDc | DecoderKind::BpDcOsd)
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DecoderKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown decoder {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeStatus {
    ConvergedFirstBp,
    ConvergedAfterDc,
    /// No BP run matched the syndrome and OSD-0 supplied the estimate.
    SolvedByOsd,
    Failed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageStats {
    pub first_bp_iterations: usize,
    pub second_bp_iterations: Option<usize>,
    pub osd_invoked: bool,
}

impl StageStats {
    pub fn total_bp_iterations(&self) -> usize {
        self.first_bp_iterations + self.second_bp_iterations.unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub estimate: BitVec,
    pub status: DecodeStatus,
    pub cut_indices: Vec<usize>,
    pub stats: StageStats,
}

impl DecodeResult {
    pub fn succeeded(&self) -> bool {
        self.status != DecodeStatus::Failed
    }
}

/// For each row of `h_deg`, the supported index with the smallest soft value.
///
/// Exact ties are broken by a uniform draw from `rng`. Only entries of `soft`
/// inside some row's support are read. The result is sorted and duplicate-free.
pub fn dc_cut_indices<R: Rng + ?Sized>(
    h_deg: &SparseBinMatrix,
    soft: &[f64],
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_dim("degeneracy matrix columns vs soft output", h_deg.cols(), soft.len())?;
    let mut cut = vec![false; h_deg.cols()];
    let mut tied = Vec::new();
    for (r, row) in h_deg.row_supports().iter().enumerate() {
        if row.is_empty() {
            return Err(Error::InvalidArgument(format!("degeneracy row {r} is empty")));
        }
        let lowest = row.iter().map(|&i| soft[i]).fold(f64::INFINITY, f64::min);
        tied.clear();
        tied.extend(row.iter().copied().filter(|&i| soft[i] == lowest));
        let pick = match tied.len() {
            0 => return Err(Error::InvalidArgument(format!("degeneracy row {r} has NaN soft values"))),
            1 => tied[0],
            t => tied[rng.gen_range(0..t)],
        };
        cut[pick] = true;
    }
    Ok(cut
        .iter()
        .enumerate()
        .filter_map(|(i, &c)| c.then_some(i))
        .collect())
}

/// OSD-0: pivots columns in order of decreasing soft value (ties by index)
/// and solves `ê · Hᵀ = s` on the chosen pivots. `None` if inconsistent.
pub fn osd0_decode(h: &SparseBinMatrix, s: &BitVec, soft: &[f64]) -> Result<Option<BitVec>> {
    check_dim("OSD soft output length", h.cols(), soft.len())?;
    let mut order: Vec<usize> = (0..h.cols()).collect();
    order.sort_by(|&a, &b| soft[b].total_cmp(&soft[a]).then(a.cmp(&b)));
    gf2::solve(h, s, &order)
}

/// A decoding pipeline bound to one check matrix (and, for DC, one
/// degeneracy matrix). Holds its own BP buffers.
#[derive(Clone, Debug)]
pub struct Pipeline {
    kind: DecoderKind,
    h: Arc<SparseBinMatrix>,
    h_deg: Option<Arc<SparseBinMatrix>>,
    bp: BpDecoder,
    bp_config: BpConfig,
    dc: DcConfig,
}

impl Pipeline {
    pub fn new(
        kind: DecoderKind,
        h: Arc<SparseBinMatrix>,
        h_deg: Option<Arc<SparseBinMatrix>>,
        bp_config: BpConfig,
        dc: DcConfig,
    ) -> Result<Self> {
        Self::with_graph(kind, Arc::new(TannerGraph::new(&h)), h, h_deg, bp_config, dc)
    }

    /// As [`Pipeline::new`] but reusing an already built Tanner graph of `h`.
    pub fn with_graph(
        kind: DecoderKind,
        graph: Arc<TannerGraph>,
        h: Arc<SparseBinMatrix>,
        h_deg: Option<Arc<SparseBinMatrix>>,
        bp_config: BpConfig,
        dc: DcConfig,
    ) -> Result<Self> {
        if kind.uses_dc() {
            let deg = h_deg
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument(format!("{kind} needs a degeneracy matrix")))?;
            check_dim("degeneracy matrix columns", h.cols(), deg.cols())?;
        }
        check_dim("Tanner graph variables", h.cols(), graph.vars())?;
        Ok(Pipeline {
            kind,
            bp: BpDecoder::new(graph, bp_config)?,
            h,
            h_deg,
            bp_config,
            dc,
        })
    }

    pub fn kind(&self) -> DecoderKind {
        self.kind
    }

    pub fn decode<R: Rng + ?Sized>(
        &mut self,
        s: &BitVec,
        priors: &[f64],
        rng: &mut R,
    ) -> Result<DecodeResult> {
        let first = self.bp.decode(s, priors)?;
        let mut stats = StageStats {
            first_bp_iterations: first.iterations,
            ..StageStats::default()
        };
        if first.converged {
            return Ok(DecodeResult {
                estimate: first.hard,
                status: DecodeStatus::ConvergedFirstBp,
                cut_indices: Vec::new(),
                stats,
            });
        }
        match self.kind {
            DecoderKind::Bp => Ok(DecodeResult {
                estimate: first.hard,
                status: DecodeStatus::Failed,
                cut_indices: Vec::new(),
                stats,
            }),
            DecoderKind::BpOsd => {
                stats.osd_invoked = true;
                let (estimate, status) = match osd0_decode(&self.h, s, &first.soft)? {
                    Some(e) => (e, DecodeStatus::SolvedByOsd),
                    None => (first.hard, DecodeStatus::Failed),
                };
                Ok(DecodeResult {
                    estimate,
                    status,
                    cut_indices: Vec::new(),
                    stats,
                })
            }
            DecoderKind::BpDc | DecoderKind::BpDcOsd => {
                let h_deg = self.h_deg.clone().expect("checked at construction");
                let cuts = dc_cut_indices(&h_deg, &first.soft, rng)?;
                let second = self.second_run(s, priors, &first, &cuts)?;
                stats.second_bp_iterations = Some(second.iterations);
                if second.converged {
                    return Ok(DecodeResult {
                        estimate: second.hard,
                        status: DecodeStatus::ConvergedAfterDc,
                        cut_indices: cuts,
                        stats,
                    });
                }
                if self.kind == DecoderKind::BpDc {
                    return Ok(DecodeResult {
                        estimate: second.hard,
                        status: DecodeStatus::Failed,
                        cut_indices: cuts,
                        stats,
                    });
                }
                stats.osd_invoked = true;
                let reduced = self.h.delete_columns(&cuts);
                let reduced_soft = BitVecPositions::drop(&second.soft, &cuts);
                let solved = match osd0_decode(&reduced, s, &reduced_soft)? {
                    Some(e) => Some(e.expand_positions(&cuts)),
                    // the cut graph cannot explain the syndrome: fall back to all columns
                    None => osd0_decode(&self.h, s, &second.soft)?,
                };
                let (estimate, status) = match solved {
                    Some(e) => (e, DecodeStatus::SolvedByOsd),
                    None => (second.hard, DecodeStatus::Failed),
                };
                Ok(DecodeResult {
                    estimate,
                    status,
                    cut_indices: cuts,
                    stats,
                })
            }
        }
    }

    fn second_run(&mut self, s: &BitVec, priors: &[f64], first: &BpOutput, cuts: &[usize]) -> Result<BpOutput> {
        let mut second_priors = match self.dc.second_run_priors {
            SecondRunPriors::Posterior => first.soft.clone(),
            SecondRunPriors::ResetToPrior => priors.to_vec(),
        };
        match self.dc.masking_mode {
            MaskingMode::ZeroPriors => {
                for &i in cuts {
                    second_priors[i] = 0.0;
                }
                self.bp.decode(s, &second_priors)
            }
            MaskingMode::DeleteColumns => {
                let reduced = self.h.delete_columns(cuts);
                let mut bp = BpDecoder::for_matrix(&reduced, self.bp_config)?;
                let out = bp.decode(s, &BitVecPositions::drop(&second_priors, cuts))?;
                Ok(BpOutput {
                    soft: BitVecPositions::restore(&out.soft, cuts, 0.0),
                    hard: out.hard.expand_positions(cuts),
                    converged: out.converged,
                    iterations: out.iterations,
                })
            }
        }
    }
}

struct BitVecPositions;

impl BitVecPositions {
    fn drop(values: &[f64], removed: &[usize]) -> Vec<f64> {
        let mut gone = vec![false; values.len()];
        for &r in removed {
            gone[r] = true;
        }
        values
            .iter()
            .zip(&gone)
            .filter_map(|(&v, &g)| (!g).then_some(v))
            .collect()
    }

    fn restore(values: &[f64], removed: &[usize], fill: f64) -> Vec<f64> {
        let len = values.len() + removed.len();
        let mut gone = vec![false; len];
        for &r in removed {
            gone[r] = true;
        }
        let mut it = values.iter();
        gone.iter()
            .map(|&g| if g { fill } else { *it.next().expect("length matches") })
            .collect()
    }
}

fn one_shot(
    kind: DecoderKind,
    h: &SparseBinMatrix,
    h_deg: Option<&SparseBinMatrix>,
    s: &BitVec,
    priors: &[f64],
    bp_config: BpConfig,
    dc: DcConfig,
    rng_seed: u64,
) -> Result<DecodeResult> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng_seed);
    Pipeline::new(
        kind,
        Arc::new(h.clone()),
        h_deg.map(|d| Arc::new(d.clone())),
        bp_config,
        dc,
    )?
    .decode(s, priors, &mut rng)
}

pub fn bp_dc_decode(
    h: &SparseBinMatrix,
    h_deg: &SparseBinMatrix,
    s: &BitVec,
    priors: &[f64],
    bp_config: BpConfig,
    dc: DcConfig,
    rng_seed: u64,
) -> Result<DecodeResult> {
    one_shot(DecoderKind::BpDc, h, Some(h_deg), s, priors, bp_config, dc, rng_seed)
}

pub fn bp_osd_decode(h: &SparseBinMatrix, s: &BitVec, priors: &[f64], bp_config: BpConfig) -> Result<DecodeResult> {
    let dc = DcConfig::new(SecondRunPriors::Posterior);
    one_shot(DecoderKind::BpOsd, h, None, s, priors, bp_config, dc, 0)
}

pub fn bp_dc_osd_decode(
    h: &SparseBinMatrix,
    h_deg: &SparseBinMatrix,
    s: &BitVec,
    priors: &[f64],
    bp_config: BpConfig,
    dc: DcConfig,
    rng_seed: u64,
) -> Result<DecodeResult> {
    one_shot(DecoderKind::BpDcOsd, h, Some(h_deg), s, priors, bp_config, dc, rng_seed)
}
