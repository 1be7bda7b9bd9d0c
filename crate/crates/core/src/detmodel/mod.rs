//! Detector error models: which detectors and logical observables each
//! independent error mechanism flips, with what prior, and which
//! combinations of mechanisms are trivial.

mod bb_circuit;
mod circuit;
mod pheno;
mod surface_circuit;
mod trivial;

use serde::{Deserialize, Serialize};

pub use bb_circuit::{
    bb_circuit_dcm_matrices, bb_circuit_model, build_bb_circuit, build_bb_circuit_dcm, build_bb_circuit_ddm,
    build_bb_circuit_ddm_with, needs_extra_ddm_block, BbCircuit,
};
pub use circuit::{
    combine_odd_parity, enumerate_fault_mechanisms, CliffordCircuit, ErrorMechanism, FaultEnumeration,
    FaultEnumerator, Op, Signature, Timestep,
};
pub use pheno::{build_pheno_dcm, build_pheno_ddm, pheno_model};
pub use surface_circuit::{build_surface_circuit, surface_circuit_model, SurfaceCircuit};
pub use trivial::find_low_weight_trivial;

use crate::codes::CssCode;
use crate::error::{check_dim, Error, Result};
use crate::gf2::{mat_mat_t, SparseBinMatrix};

/// Smallest prior kept after grouping, so that every LLR stays finite.
pub const MIN_PRIOR: f64 = 1e-12;

pub const CODE_CAPACITY_LABEL: &str = "code-capacity";
pub const PHENO_LABEL: &str = pheno::NOISE_LABEL;
pub const CIRCUIT_BB_LABEL: &str = bb_circuit::NOISE_LABEL;
pub const CIRCUIT_SURFACE_LABEL: &str = surface_circuit::NOISE_LABEL;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub noise: String,
    pub code: String,
    pub rounds: Option<usize>,
    pub p: f64,
    /// Elementary circuit faults discarded for flipping nothing.
    pub dropped_faults: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct DetectorModel {
    pub dcm: SparseBinMatrix,
    pub observables: SparseBinMatrix,
    pub priors: Vec<f64>,
    pub ddm: Option<SparseBinMatrix>,
    pub meta: ModelMeta,
}

impl DetectorModel {
    /// Checks shapes and clamps priors up to [`MIN_PRIOR`].
    pub fn new(
        dcm: SparseBinMatrix,
        observables: SparseBinMatrix,
        mut priors: Vec<f64>,
        ddm: Option<SparseBinMatrix>,
        meta: ModelMeta,
    ) -> Result<Self> {
        check_dim("observable matrix columns", dcm.cols(), observables.cols())?;
        check_dim("prior count", dcm.cols(), priors.len())?;
        for (j, p) in priors.iter_mut().enumerate() {
            if !(p.is_finite() && *p >= 0.0 && *p < 1.0) {
                return Err(Error::InvalidArgument(format!("prior {j} = {p} outside [0, 1)")));
            }
            *p = p.max(MIN_PRIOR);
        }
        let model = DetectorModel {
            dcm,
            observables,
            priors,
            ddm: None,
            meta,
        };
        match ddm {
            Some(d) => model.with_ddm(d),
            None => Ok(model),
        }
    }

    pub fn from_enumeration(en: &FaultEnumeration, meta: ModelMeta) -> Result<Self> {
        let n = en.mechanisms.len();
        let dcm = SparseBinMatrix::from_row_supports(
            n,
            transpose_supports(en.num_detectors, en.mechanisms.iter().map(|m| m.detector_flips.support())),
        )?;
        let obs = SparseBinMatrix::from_row_supports(
            n,
            transpose_supports(en.num_observables, en.mechanisms.iter().map(|m| m.observable_flips.support())),
        )?;
        let priors = en.mechanisms.iter().map(|m| m.probability).collect();
        let meta = ModelMeta {
            dropped_faults: Some(en.dropped_faults),
            ..meta
        };
        DetectorModel::new(dcm, obs, priors, None, meta)
    }

    /// Attaches a degeneracy matrix after checking that every row flips no
    /// detector and no observable.
    pub fn with_ddm(mut self, ddm: SparseBinMatrix) -> Result<Self> {
        check_dim("degeneracy matrix columns", self.dcm.cols(), ddm.cols())?;
        if !mat_mat_t(&ddm, &self.dcm)?.is_zero() {
            return Err(Error::InvalidArgument("degeneracy rows flip detectors".into()));
        }
        if !mat_mat_t(&ddm, &self.observables)?.is_zero() {
            return Err(Error::InvalidArgument("degeneracy rows flip observables".into()));
        }
        if let Some(r) = ddm.row_supports().iter().position(|r| r.is_empty()) {
            return Err(Error::InvalidArgument(format!("degeneracy row {r} is empty")));
        }
        self.ddm = Some(ddm);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let copy = DetectorModel::new(
            self.dcm.clone(),
            self.observables.clone(),
            self.priors.clone(),
            self.ddm.clone(),
            self.meta.clone(),
        )?;
        if copy.priors != self.priors {
            return Err(Error::Internal("priors below the clamp".into()));
        }
        Ok(())
    }

    pub fn num_detectors(&self) -> usize {
        self.dcm.rows()
    }

    pub fn num_mechanisms(&self) -> usize {
        self.dcm.cols()
    }

    pub fn num_observables(&self) -> usize {
        self.observables.rows()
    }
}

/// Code-capacity model: data errors only, decoded against `H_Z` with `H_X`
/// as degeneracy matrix.
pub fn code_capacity_model(code: &CssCode, p: f64) -> Result<DetectorModel> {
    DetectorModel::new(
        code.hz.clone(),
        code.oz.clone(),
        vec![p; code.n],
        Some(code.hx.clone()),
        ModelMeta {
            noise: CODE_CAPACITY_LABEL.into(),
            code: code.label.clone(),
            rounds: None,
            p,
            dropped_faults: None,
        },
    )
}

fn transpose_supports<'a>(rows: usize, cols: impl Iterator<Item = &'a [usize]>) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); rows];
    for (j, c) in cols.enumerate() {
        for &i in c {
            out[i].push(j);
        }
    }
    out
}
