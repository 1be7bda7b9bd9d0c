//! Circuit-level model for the rotated surface code using the common
//! four-layer CNOT order: X checks visit NW, NE, SW, SE and Z checks visit
//! NW, SW, NE, SE.
//!
//! Qubits: data `0..n`, X ancillas `n..n+m_X`, Z ancillas after those. Each
//! round is an initialisation layer, four CNOT layers and a measurement
//! layer; the data is read out noiselessly in Z at the end.

use std::collections::BTreeSet;

use super::circuit::{CliffordCircuit, FaultEnumerator, Op};
use super::trivial::find_low_weight_trivial;
use super::{DetectorModel, ModelMeta};
use crate::codes::{build_rotated_surface, CssCode, SurfaceLayout};
use crate::error::{Error, Result};
use crate::gf2::SparseBinMatrix;

pub const NOISE_LABEL: &str = "surface-circuit-standard";

const X_ORDER: [usize; 4] = [0, 1, 2, 3];
const Z_ORDER: [usize; 4] = [0, 2, 1, 3];
const STEPS_PER_ROUND: usize = 6;

#[derive(Clone, Debug)]
pub struct SurfaceCircuit {
    pub circuit: CliffordCircuit,
    pub code: CssCode,
    pub rounds: usize,
}

pub fn build_surface_circuit(d: usize, rounds: usize) -> Result<SurfaceCircuit> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("at least one round is required".into()));
    }
    let layout = SurfaceLayout::new(d)?;
    let code = build_rotated_surface(d)?;
    let (n, mx, mz) = (code.n, code.mx(), code.mz());
    let xa = |i: usize| n + i;
    let za = |i: usize| n + mx + i;
    let data_idle = |busy: &[bool]| (0..n).filter(|&q| !busy[q]).map(Op::Idle).collect::<Vec<_>>();

    let mut c = CliffordCircuit::new(n + mx + mz);
    let mut meas = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let mut init: Vec<Op> = (0..mx).map(|i| Op::InitX(xa(i))).collect();
        init.extend((0..mz).map(|i| Op::InitZ(za(i))));
        init.extend((0..n).map(Op::Idle));
        c.push_step(init, false)?;
        for layer in 0..4 {
            let mut ops = Vec::new();
            let mut busy = vec![false; n];
            for (i, pl) in layout.x_plaquettes.iter().enumerate() {
                match pl.corners()[X_ORDER[layer]] {
                    Some(q) => {
                        busy[q] = true;
                        ops.push(Op::Cnot(xa(i), q));
                    }
                    None => ops.push(Op::Idle(xa(i))),
                }
            }
            for (i, pl) in layout.z_plaquettes.iter().enumerate() {
                match pl.corners()[Z_ORDER[layer]] {
                    Some(q) => {
                        busy[q] = true;
                        ops.push(Op::Cnot(q, za(i)));
                    }
                    None => ops.push(Op::Idle(za(i))),
                }
            }
            ops.extend(data_idle(&busy));
            c.push_step(ops, false)?;
        }
        let mut ops: Vec<Op> = (0..mz).map(|i| Op::MeasZ(za(i))).collect();
        ops.extend((0..mx).map(|i| Op::MeasX(xa(i))));
        ops.extend((0..n).map(Op::Idle));
        let ms = c.push_step(ops, false)?;
        meas.push(ms[..mz].to_vec());
    }
    let fin = c.push_step((0..n).map(Op::MeasZ).collect(), true)?;

    for t in 0..=rounds {
        for i in 0..mz {
            let mut det = Vec::new();
            if t > 0 {
                det.push(meas[t - 1][i]);
            }
            if t < rounds {
                det.push(meas[t][i]);
            } else {
                det.extend(code.hz.row(i).iter().map(|&q| fin[q]));
            }
            c.add_detector(det)?;
        }
    }
    for j in 0..code.k {
        c.add_observable(code.oz.row(j).iter().map(|&q| fin[q]).collect())?;
    }
    Ok(SurfaceCircuit { circuit: c, code, rounds })
}

/// Enumerated detector model with a degeneracy matrix made of the X
/// stabilizers applied to the data between rounds plus every trivial error
/// of weight at most 3.
pub fn surface_circuit_model(d: usize, rounds: usize, p: f64) -> Result<DetectorModel> {
    let sc = build_surface_circuit(d, rounds)?;
    let fe = FaultEnumerator::new(&sc.circuit);
    let en = fe.enumerate(p)?;
    let model = DetectorModel::from_enumeration(
        &en,
        ModelMeta {
            noise: NOISE_LABEL.into(),
            code: sc.code.label.clone(),
            rounds: Some(rounds),
            p,
            dropped_faults: None,
        },
    )?;

    let mut rows: BTreeSet<Vec<usize>> = BTreeSet::new();
    // data errors just before each round's CNOTs, and before the readout
    let slots = (0..rounds)
        .map(|t| t * STEPS_PER_ROUND)
        .chain(std::iter::once(rounds * STEPS_PER_ROUND - 1));
    for step in slots {
        for stab in sc.code.hx.row_supports() {
            let mut cols = Vec::new();
            for &q in stab {
                let sig = fe.x_signature(step, q);
                let j = en
                    .position(&sig)
                    .ok_or_else(|| Error::Internal(format!("data qubit {q} after step {step} has no mechanism")))?;
                match cols.iter().position(|&c| c == j) {
                    Some(x) => {
                        cols.swap_remove(x);
                    }
                    None => cols.push(j),
                }
            }
            cols.sort_unstable();
            if !cols.is_empty() {
                rows.insert(cols);
            }
        }
    }
    for v in find_low_weight_trivial(&model.dcm, &model.observables, 3)? {
        rows.insert(v.support().to_vec());
    }
    let ddm = SparseBinMatrix::from_row_supports(model.dcm.cols(), rows.into_iter().collect())?;
    model.with_ddm(ddm)
}
