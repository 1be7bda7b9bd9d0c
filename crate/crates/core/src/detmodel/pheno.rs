//! Phenomenological noise: data errors before every round plus measurement
//! errors, with a final noiseless readout.
//!
//! Column layout per round `t`: `n` data columns then `m_Z` measurement
//! columns; one more block of `n` data columns precedes the final readout.

use super::{DetectorModel, ModelMeta};
use crate::codes::CssCode;
use crate::error::{Error, Result};
use crate::gf2::{MatrixBuilder, SparseBinMatrix};

pub const NOISE_LABEL: &str = "phenomenological";

fn check_rounds(rounds: usize) -> Result<()> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("at least one round is required".into()));
    }
    Ok(())
}

pub fn build_pheno_dcm(code: &CssCode, rounds: usize, p: f64) -> Result<DetectorModel> {
    check_rounds(rounds)?;
    let (n, mz) = (code.n, code.mz());
    let stride = n + mz;
    let cols = rounds * stride + n;
    let id = SparseBinMatrix::identity(mz);
    let mut dcm = MatrixBuilder::new(mz * (rounds + 1), cols);
    let mut obs = MatrixBuilder::new(code.k, cols);
    for t in 0..=rounds {
        let c0 = t * stride;
        dcm.add_block(t * mz, c0, &code.hz)?;
        obs.add_block(0, c0, &code.oz)?;
        if t < rounds {
            dcm.add_block(t * mz, c0 + n, &id)?;
            dcm.add_block((t + 1) * mz, c0 + n, &id)?;
        }
    }
    DetectorModel::new(
        dcm.build(),
        obs.build(),
        vec![p; cols],
        None,
        ModelMeta {
            noise: NOISE_LABEL.into(),
            code: code.label.clone(),
            rounds: Some(rounds),
            p,
            dropped_faults: None,
        },
    )
}

pub fn build_pheno_ddm(code: &CssCode, rounds: usize) -> Result<SparseBinMatrix> {
    check_rounds(rounds)?;
    let (n, mx, mz) = (code.n, code.mx(), code.mz());
    let stride = n + mz;
    let per_round = mx + n;
    let id = SparseBinMatrix::identity(n);
    let hzt = code.hz.transpose();
    let mut ddm = MatrixBuilder::new(rounds * per_round + mx, rounds * stride + n);
    for t in 0..rounds {
        let (r0, c0) = (t * per_round, t * stride);
        ddm.add_block(r0, c0, &code.hx)?;
        ddm.add_block(r0 + mx, c0, &id)?;
        ddm.add_block(r0 + mx, c0 + n, &hzt)?;
        ddm.add_block(r0 + mx, c0 + stride, &id)?;
    }
    ddm.add_block(rounds * per_round, rounds * stride, &code.hx)?;
    Ok(ddm.build())
}

pub fn pheno_model(code: &CssCode, rounds: usize, p: f64) -> Result<DetectorModel> {
    build_pheno_dcm(code, rounds, p)?.with_ddm(build_pheno_ddm(code, rounds)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::build_rotated_surface;

    #[test]
    fn surface_d3_one_round() {
        let code = build_rotated_surface(3).unwrap();
        let m = pheno_model(&code, 1, 0.01).unwrap();
        assert_eq!(m.dcm.rows(), 8);
        assert_eq!(m.dcm.cols(), 22);
        let ddm = m.ddm.as_ref().unwrap();
        assert_eq!(ddm.rows(), 9 + 4 + 4);
    }
}
