//! Syndrome extraction circuit for bivariate bicycle codes and the explicit
//! block forms of its detector check and degeneracy matrices.
//!
//! Qubit numbering: left data `0..h`, right data `h..2h`, X ancillas
//! `2h..3h`, Z ancillas `3h..4h`, where `h = lm`. Each round has eight
//! layers; layer 0 runs once before the first round and a noiseless Z
//! readout of the data follows the last.

use super::circuit::{CliffordCircuit, FaultEnumerator, Op, Signature};
use super::{DetectorModel, ModelMeta};
use crate::codes::{build_bb, BbParams, CssCode};
use crate::error::{Error, Result};
use crate::gf2::{MatrixBuilder, SparseBinMatrix};

pub const NOISE_LABEL: &str = "circuit-bb";

#[derive(Clone, Debug)]
pub struct BbCircuit {
    pub circuit: CliffordCircuit,
    pub code: CssCode,
    pub params: BbParams,
    pub rounds: usize,
}

impl BbCircuit {
    /// Index of layer `layer` (1..=8) of round `round` (0-based).
    pub fn step_index(round: usize, layer: usize) -> usize {
        debug_assert!((1..=8).contains(&layer));
        1 + 8 * round + (layer - 1)
    }
}

fn inverse_perm(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &j) in perm.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

pub fn build_bb_circuit(p: &BbParams, rounds: usize) -> Result<BbCircuit> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("at least one round is required".into()));
    }
    let code = build_bb(p)?;
    let h = p.half();
    let (l, r, x, z) = (0, h, 2 * h, 3 * h);
    let a: Vec<Vec<usize>> = p.a.iter().map(|&t| p.perm(t)).collect();
    let b: Vec<Vec<usize>> = p.b.iter().map(|&t| p.perm(t)).collect();
    let at: Vec<Vec<usize>> = a.iter().map(|v| inverse_perm(v)).collect();
    let bt: Vec<Vec<usize>> = b.iter().map(|v| inverse_perm(v)).collect();

    let mut c = CliffordCircuit::new(4 * h);
    let per = |f: &dyn Fn(usize) -> Vec<Op>| (0..h).flat_map(f).collect::<Vec<_>>();

    c.push_step(
        per(&|i| vec![Op::Idle(x + i), Op::InitZ(z + i), Op::Idle(l + i), Op::Idle(r + i)]),
        false,
    )?;
    let mut meas = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        c.push_step(
            per(&|i| vec![Op::InitX(x + i), Op::Cnot(r + at[0][i], z + i), Op::Idle(l + i)]),
            false,
        )?;
        // X-side target and Z-side control for layers 2..=6
        let middle: [(usize, &[usize], usize, &[usize]); 5] = [
            (l, &a[1], r, &at[2]),
            (r, &b[1], l, &bt[0]),
            (r, &b[0], l, &bt[1]),
            (r, &b[2], l, &bt[2]),
            (l, &a[0], r, &at[1]),
        ];
        for (xs, xp, zs, zp) in middle {
            c.push_step(
                per(&|i| vec![Op::Cnot(x + i, xs + xp[i]), Op::Cnot(zs + zp[i], z + i)]),
                false,
            )?;
        }
        let ms = c.push_step(
            per(&|i| vec![Op::Cnot(x + i, l + a[2][i]), Op::MeasZ(z + i), Op::Idle(r + i)]),
            false,
        )?;
        meas.push(ms);
        c.push_step(
            per(&|i| vec![Op::MeasX(x + i), Op::InitZ(z + i), Op::Idle(l + i), Op::Idle(r + i)]),
            false,
        )?;
    }
    let fin = c.push_step((0..2 * h).map(Op::MeasZ).collect(), true)?;

    for t in 0..=rounds {
        for i in 0..h {
            let mut d = Vec::new();
            if t > 0 {
                d.push(meas[t - 1][i]);
            }
            if t < rounds {
                d.push(meas[t][i]);
            } else {
                d.extend(code.hz.row(i).iter().map(|&q| fin[q]));
            }
            c.add_detector(d)?;
        }
    }
    for j in 0..code.k {
        c.add_observable(code.oz.row(j).iter().map(|&q| fin[q]).collect())?;
    }
    Ok(BbCircuit {
        circuit: c,
        code,
        params: p.clone(),
        rounds,
    })
}

struct Blocks {
    h: usize,
    a: [SparseBinMatrix; 3],
    b: [SparseBinMatrix; 3],
    abar: [SparseBinMatrix; 3],
    bbar: [SparseBinMatrix; 3],
    a_sum: SparseBinMatrix,
    b_sum: SparseBinMatrix,
}

impl Blocks {
    fn new(p: &BbParams) -> Result<Self> {
        p.validate()?;
        let a = p.a_terms();
        let b = p.b_terms();
        let bar = |t: &[SparseBinMatrix; 3]| -> Result<[SparseBinMatrix; 3]> {
            Ok([t[1].add(&t[2])?, t[2].add(&t[0])?, t[0].add(&t[1])?])
        };
        Ok(Blocks {
            h: p.half(),
            abar: bar(&a)?,
            bbar: bar(&b)?,
            a_sum: a[0].add(&a[1])?.add(&a[2])?,
            b_sum: b[0].add(&b[1])?.add(&b[2])?,
            a,
            b,
        })
    }
}

fn t(m: &SparseBinMatrix) -> SparseBinMatrix {
    m.transpose()
}

fn col_range(m: &SparseBinMatrix, start: usize, len: usize) -> SparseBinMatrix {
    let rows = m
        .row_supports()
        .iter()
        .map(|r| {
            r.iter()
                .filter(|&&j| j >= start && j < start + len)
                .map(|&j| j - start)
                .collect()
        })
        .collect();
    SparseBinMatrix::from_row_supports(len, rows).expect("indices stay in range")
}

/// The explicit detector check matrix and observable matrix, ten column
/// blocks of size `h` per round followed by one block of `2h` data columns.
pub fn bb_circuit_dcm_matrices(p: &BbParams, rounds: usize) -> Result<(SparseBinMatrix, SparseBinMatrix)> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("at least one round is required".into()));
    }
    let code = build_bb(p)?;
    let bl = Blocks::new(p)?;
    let h = bl.h;
    let n = 2 * h;
    let (a, b, abar, bbar) = (&bl.a, &bl.b, &bl.abar, &bl.bbar);
    let id = SparseBinMatrix::identity(h);
    let a2t = t(&a[1]);
    let abar2t = t(&abar[1]);

    let now: [Option<SparseBinMatrix>; 10] = [
        Some(t(&bl.b_sum)),
        Some(t(&bl.a_sum)),
        Some(id.clone()),
        Some(t(&bbar[0])),
        Some(t(&abar[0])),
        Some(t(&b[2])),
        Some(a2t.clone()),
        Some(a2t.mul(&t(&bbar[1]))?),
        Some(a2t.mul(&t(&b[2]))?),
        None,
    ];
    let next: [Option<SparseBinMatrix>; 10] = [
        None,
        None,
        Some(id.clone()),
        Some(t(&b[0])),
        Some(t(&a[0])),
        Some(t(&bbar[2])),
        Some(abar2t.clone()),
        Some(abar2t.mul(&t(&b[1]))?),
        Some(abar2t.mul(&t(&bbar[2]))?),
        Some(abar2t.mul(&t(&bl.b_sum))?),
    ];

    let ol = col_range(&code.oz, 0, h);
    let or = col_range(&code.oz, h, h);
    let ol_abar2 = ol.mul(&abar2t)?;
    let obs: [Option<SparseBinMatrix>; 10] = [
        Some(ol.clone()),
        Some(or.clone()),
        None,
        Some(ol.clone()),
        Some(or.clone()),
        Some(ol.clone()),
        Some(or.clone()),
        Some(ol_abar2.add(&or.mul(&t(&bbar[1]))?)?),
        Some(ol_abar2.add(&or.mul(&t(&b[2]))?)?),
        Some(ol_abar2),
    ];

    let cols = 5 * n * rounds + n;
    let mut dcm = MatrixBuilder::new(h * (rounds + 1), cols);
    let mut o = MatrixBuilder::new(code.k, cols);
    for r in 0..rounds {
        let c0 = 5 * n * r;
        for blk in 0..10 {
            let c = c0 + blk * h;
            if let Some(m) = &now[blk] {
                dcm.add_block(r * h, c, m)?;
            }
            if let Some(m) = &next[blk] {
                dcm.add_block((r + 1) * h, c, m)?;
            }
            if let Some(m) = &obs[blk] {
                o.add_block(0, c, m)?;
            }
        }
    }
    dcm.add_block(rounds * h, 5 * n * rounds, &code.hz)?;
    o.add_block(0, 5 * n * rounds, &code.oz)?;
    Ok((dcm.build(), o.build()))
}

/// Whether the parameters are those of the tabulated [[108,8,10]] code, whose
/// degeneracy matrix needs one more row block per round.
pub fn needs_extra_ddm_block(p: &BbParams) -> bool {
    p.l == 9 && p.m == 6 && p.known_distance() == Some(10)
}

pub fn build_bb_circuit_ddm(p: &BbParams, rounds: usize) -> Result<SparseBinMatrix> {
    build_bb_circuit_ddm_with(p, rounds, needs_extra_ddm_block(p))
}

/// Explicit detector degeneracy matrix; `extra_block` appends the row block
/// `A₁²A₃ + A₁A₃² + I` on the tenth column block of every round.
pub fn build_bb_circuit_ddm_with(p: &BbParams, rounds: usize, extra_block: bool) -> Result<SparseBinMatrix> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("at least one round is required".into()));
    }
    let bl = Blocks::new(p)?;
    let h = bl.h;
    let n = 2 * h;
    let (a, b) = (&bl.a, &bl.b);
    let id = SparseBinMatrix::identity(h);

    // (column block 1..=12, matrix) per row block
    let mut layout: Vec<Vec<(usize, SparseBinMatrix)>> = vec![
        vec![(1, bl.a_sum.clone()), (2, bl.b_sum.clone())],
        vec![(1, id.clone()), (3, b[0].clone()), (4, id.clone())],
        vec![(2, id.clone()), (3, a[0].clone()), (5, id.clone())],
        vec![(3, b[1].clone()), (4, id.clone()), (6, id.clone())],
        vec![(3, a[2].clone()), (5, id.clone()), (7, id.clone())],
        vec![(3, b[2].clone()), (6, id.clone()), (11, id.clone())],
        vec![(3, a[1].clone()), (7, id.clone()), (12, id.clone())],
        vec![(1, a[1].clone()), (7, b[1].clone()), (8, id.clone())],
        vec![(7, b[0].clone()), (8, id.clone()), (9, id.clone())],
        vec![(7, b[2].clone()), (9, id.clone()), (10, id.clone())],
        vec![(10, id.clone()), (11, bl.abar[1].clone())],
    ];
    if extra_block {
        let a1sq = a[0].mul(&a[0])?;
        let e = a1sq.mul(&a[2])?.add(&a[0].mul(&a[2])?.mul(&a[2])?)?.add(&id)?;
        layout.push(vec![(10, e)]);
    }

    let per_round = layout.len() * h;
    let cols = 5 * n * rounds + n;
    let mut ddm = MatrixBuilder::new(per_round * rounds + h, cols);
    for r in 0..rounds {
        let col_of = |blk: usize| match blk {
            1..=10 => 5 * n * r + (blk - 1) * h,
            11 => 5 * n * (r + 1),
            _ => 5 * n * (r + 1) + h,
        };
        for (rb, entries) in layout.iter().enumerate() {
            for (blk, m) in entries {
                ddm.add_block(r * per_round + rb * h, col_of(*blk), m)?;
            }
        }
    }
    let code = build_bb(p)?;
    ddm.add_block(per_round * rounds, 5 * n * rounds, &code.hx)?;
    Ok(ddm.build())
}

/// Explicit detector model for the BB circuit at rate `rate`. Each column's
/// prior is that of the enumerated error mechanism with the same signature.
pub fn build_bb_circuit_dcm(p: &BbParams, rounds: usize, rate: f64) -> Result<DetectorModel> {
    let bc = build_bb_circuit(p, rounds)?;
    let (dcm, obs) = bb_circuit_dcm_matrices(p, rounds)?;
    let en = FaultEnumerator::new(&bc.circuit).enumerate(rate)?;
    let priors = (0..dcm.cols())
        .map(|j| {
            let sig = Signature {
                detectors: dcm.col(j).to_vec(),
                observables: obs.col(j).to_vec(),
            };
            en.find(&sig).map(|m| m.probability).ok_or_else(|| {
                Error::Internal(format!("explicit column {j} matches no enumerated fault"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DetectorModel::new(
        dcm,
        obs,
        priors,
        None,
        ModelMeta {
            noise: NOISE_LABEL.into(),
            code: bc.code.label.clone(),
            rounds: Some(rounds),
            p: rate,
            dropped_faults: Some(en.dropped_faults),
        },
    )
}

/// The explicit model with its degeneracy matrix attached.
pub fn bb_circuit_model(p: &BbParams, rounds: usize, rate: f64) -> Result<DetectorModel> {
    let model = build_bb_circuit_dcm(p, rounds, rate)?;
    model.with_ddm(build_bb_circuit_ddm(p, rounds)?)
}
