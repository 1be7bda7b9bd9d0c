//! Clifford circuits with Z-basis detectors and an X-frame fault enumerator.
//!
//! Only the X component of a Pauli fault can flip a Z-basis measurement, so
//! the enumerator tracks X frames alone. Propagation rules, applied in time
//! order:
//!
//! | operation   | X on input becomes                      |
//! |-------------|-----------------------------------------|
//! | `Idle`      | X on the same qubit                     |
//! | `InitZ/X`   | discarded (the qubit is re-prepared)    |
//! | `MeasZ`     | flips the outcome, X stays on the qubit |
//! | `MeasX`     | X stays on the qubit                    |
//! | `CNOT(c,t)` | X on c becomes X on c and t; X on t stays |
//!
//! The enumerator runs this table backwards once, so the detectors and
//! observables flipped by an X after any step are known before faults are
//! visited.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::gf2::BitVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    InitZ(usize),
    InitX(usize),
    Cnot(usize, usize),
    Idle(usize),
    MeasZ(usize),
    MeasX(usize),
}

impl Op {
    fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Op::Cnot(c, t) => (c, Some(t)),
            Op::InitZ(q) | Op::InitX(q) | Op::Idle(q) | Op::MeasZ(q) | Op::MeasX(q) => (q, None),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Timestep {
    pub ops: Vec<Op>,
    /// Faults are not injected after operations of a noiseless step.
    pub noiseless: bool,
}

#[derive(Clone, Debug)]
pub struct CliffordCircuit {
    num_qubits: usize,
    steps: Vec<Timestep>,
    /// Measurement index of each operation that measures, per step.
    meas_index: Vec<Vec<Option<usize>>>,
    num_measurements: usize,
    detectors: Vec<Vec<usize>>,
    observables: Vec<Vec<usize>>,
}

impl CliffordCircuit {
    pub fn new(num_qubits: usize) -> Self {
        CliffordCircuit {
            num_qubits,
            steps: Vec::new(),
            meas_index: Vec::new(),
            num_measurements: 0,
            detectors: Vec::new(),
            observables: Vec::new(),
        }
    }

    /// Appends a timestep and returns the measurement indices it creates, in
    /// operation order.
    pub fn push_step(&mut self, ops: Vec<Op>, noiseless: bool) -> Result<Vec<usize>> {
        let mut used = vec![false; self.num_qubits];
        for op in &ops {
            let (a, b) = op.qubits();
            for q in std::iter::once(a).chain(b) {
                if q >= self.num_qubits {
                    return Err(Error::InvalidArgument(format!(
                        "qubit {q} out of range in step {}",
                        self.steps.len()
                    )));
                }
                if std::mem::replace(&mut used[q], true) {
                    return Err(Error::InvalidArgument(format!(
                        "qubit {q} used twice in step {}",
                        self.steps.len()
                    )));
                }
            }
        }
        let mut created = Vec::new();
        let idx = ops
            .iter()
            .map(|op| match op {
                Op::MeasZ(_) | Op::MeasX(_) => {
                    let m = self.num_measurements;
                    self.num_measurements += 1;
                    created.push(m);
                    Some(m)
                }
                _ => None,
            })
            .collect();
        self.meas_index.push(idx);
        self.steps.push(Timestep { ops, noiseless });
        Ok(created)
    }

    /// A detector is the parity of a set of measurement outcomes.
    pub fn add_detector(&mut self, measurements: Vec<usize>) -> Result<usize> {
        self.check_measurements(&measurements)?;
        self.detectors.push(measurements);
        Ok(self.detectors.len() - 1)
    }

    pub fn add_observable(&mut self, measurements: Vec<usize>) -> Result<usize> {
        self.check_measurements(&measurements)?;
        self.observables.push(measurements);
        Ok(self.observables.len() - 1)
    }

    fn check_measurements(&self, ms: &[usize]) -> Result<()> {
        match ms.iter().find(|&&m| m >= self.num_measurements) {
            Some(m) => Err(Error::InvalidArgument(format!(
                "measurement {m} does not exist ({} recorded)",
                self.num_measurements
            ))),
            None => Ok(()),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn steps(&self) -> &[Timestep] {
        &self.steps
    }

    pub fn num_measurements(&self) -> usize {
        self.num_measurements
    }

    pub fn detectors(&self) -> &[Vec<usize>] {
        &self.detectors
    }

    pub fn observables(&self) -> &[Vec<usize>] {
        &self.observables
    }

    /// Number of `MeasZ` operations in the circuit.
    pub fn count_meas_z(&self) -> usize {
        self.steps
            .iter()
            .flat_map(|s| &s.ops)
            .filter(|op| matches!(op, Op::MeasZ(_)))
            .count()
    }
}

/// Probability that an odd number of independent events occur.
pub fn combine_odd_parity(ps: &[f64]) -> f64 {
    (1.0 - ps.iter().map(|p| 1.0 - 2.0 * p).product::<f64>()) / 2.0
}

/// Detector and observable flips of a fault, as indices into the circuit's
/// detector and observable lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub detectors: Vec<usize>,
    pub observables: Vec<usize>,
}

impl Signature {
    pub fn is_empty(&self) -> bool {
        self.detectors.is_empty() && self.observables.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorMechanism {
    pub detector_flips: BitVec,
    pub observable_flips: BitVec,
    pub probability: f64,
    pub constituents: usize,
}

#[derive(Clone, Debug)]
pub struct FaultEnumeration {
    pub mechanisms: Vec<ErrorMechanism>,
    /// Elementary faults whose signature is empty.
    pub dropped_faults: usize,
    pub num_detectors: usize,
    pub num_observables: usize,
    index: HashMap<Signature, usize>,
}

impl FaultEnumeration {
    pub fn find(&self, sig: &Signature) -> Option<&ErrorMechanism> {
        self.index.get(sig).map(|&i| &self.mechanisms[i])
    }

    pub fn position(&self, sig: &Signature) -> Option<usize> {
        self.index.get(sig).copied()
    }
}

/// Backward X-frame table of a circuit.
#[derive(Clone, Debug)]
pub struct FaultEnumerator<'a> {
    circuit: &'a CliffordCircuit,
    /// Detector-or-observable targets of each measurement; observables are
    /// offset by the detector count.
    meas_targets: Vec<Vec<u32>>,
    /// `after[s][q]`: targets flipped by an X on `q` right after step `s`.
    after: Vec<Vec<Vec<u32>>>,
}

impl<'a> FaultEnumerator<'a> {
    pub fn new(circuit: &'a CliffordCircuit) -> Self {
        let nd = circuit.detectors.len();
        let mut meas_targets = vec![Vec::new(); circuit.num_measurements];
        for (d, ms) in circuit.detectors.iter().enumerate() {
            for &m in ms {
                toggle(&mut meas_targets[m], d as u32);
            }
        }
        for (o, ms) in circuit.observables.iter().enumerate() {
            for &m in ms {
                toggle(&mut meas_targets[m], (nd + o) as u32);
            }
        }
        for t in &mut meas_targets {
            t.sort_unstable();
        }

        let nq = circuit.num_qubits;
        let steps = circuit.steps.len();
        let mut after = vec![vec![Vec::new(); nq]; steps];
        for s in (1..steps).rev() {
            let mut before = after[s].clone();
            for (op, m) in circuit.steps[s].ops.iter().zip(&circuit.meas_index[s]) {
                match *op {
                    Op::InitZ(q) | Op::InitX(q) => before[q].clear(),
                    Op::MeasZ(q) => {
                        let m = m.expect("measurement index recorded");
                        before[q] = sym_diff(&after[s][q], &meas_targets[m]);
                    }
                    Op::MeasX(_) | Op::Idle(_) => {}
                    Op::Cnot(c, t) => before[c] = sym_diff(&after[s][c], &after[s][t]),
                }
            }
            after[s - 1] = before;
        }
        FaultEnumerator {
            circuit,
            meas_targets,
            after,
        }
    }

    /// Flips caused by an X error on `qubit` immediately after step `step`.
    pub fn x_signature(&self, step: usize, qubit: usize) -> Signature {
        self.split(&self.after[step][qubit])
    }

    fn split(&self, targets: &[u32]) -> Signature {
        let nd = self.circuit.detectors.len();
        let cut = targets.partition_point(|&t| (t as usize) < nd);
        Signature {
            detectors: targets[..cut].iter().map(|&t| t as usize).collect(),
            observables: targets[cut..].iter().map(|&t| t as usize - nd).collect(),
        }
    }

    /// Visits every elementary fault of the standard circuit noise model at
    /// rate `p` and groups them by signature.
    pub fn enumerate(&self, p: f64) -> Result<FaultEnumeration> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::InvalidArgument(format!("circuit noise rate {p} outside [0, 0.5]")));
        }
        let mut groups: BTreeMap<Vec<u32>, (f64, usize)> = BTreeMap::new();
        let mut dropped = 0usize;
        let mut add = |targets: Vec<u32>, q: f64| {
            if targets.is_empty() {
                dropped += 1;
            } else {
                let g = groups.entry(targets).or_insert((1.0, 0));
                g.0 *= 1.0 - 2.0 * q;
                g.1 += 1;
            }
        };
        for (s, step) in self.circuit.steps.iter().enumerate() {
            if step.noiseless {
                continue;
            }
            let after = &self.after[s];
            for (op, m) in step.ops.iter().zip(&self.circuit.meas_index[s]) {
                match *op {
                    Op::Idle(q) => {
                        // X and Y carry an X component; Z does not.
                        add(after[q].clone(), p / 3.0);
                        add(after[q].clone(), p / 3.0);
                        add(Vec::new(), p / 3.0);
                    }
                    Op::Cnot(c, t) => {
                        for pc in 0..4u8 {
                            for pt in 0..4u8 {
                                if pc == 0 && pt == 0 {
                                    continue;
                                }
                                // Pauli labels 0..4 = I, X, Y, Z
                                let xc = pc == 1 || pc == 2;
                                let xt = pt == 1 || pt == 2;
                                let sig = match (xc, xt) {
                                    (false, false) => Vec::new(),
                                    (true, false) => after[c].clone(),
                                    (false, true) => after[t].clone(),
                                    (true, true) => sym_diff(&after[c], &after[t]),
                                };
                                add(sig, p / 15.0);
                            }
                        }
                    }
                    Op::InitZ(q) => add(after[q].clone(), p),
                    Op::MeasZ(_) => add(self.meas_targets[m.expect("measurement index")].clone(), p),
                    // a |−⟩ preparation or a flipped X outcome has no Z-basis effect
                    Op::InitX(_) | Op::MeasX(_) => add(Vec::new(), p),
                }
            }
        }

        let nd = self.circuit.detectors.len();
        let no = self.circuit.observables.len();
        let mut mechanisms = Vec::with_capacity(groups.len());
        let mut index = HashMap::with_capacity(groups.len());
        for (targets, (prod, count)) in groups {
            let sig = self.split(&targets);
            mechanisms.push(ErrorMechanism {
                detector_flips: BitVec::from_sorted_unchecked(nd, sig.detectors.clone()),
                observable_flips: BitVec::from_sorted_unchecked(no, sig.observables.clone()),
                probability: (1.0 - prod) / 2.0,
                constituents: count,
            });
            index.insert(sig, mechanisms.len() - 1);
        }
        Ok(FaultEnumeration {
            mechanisms,
            dropped_faults: dropped,
            num_detectors: nd,
            num_observables: no,
            index,
        })
    }
}

pub fn enumerate_fault_mechanisms(c: &CliffordCircuit, p: f64) -> Result<FaultEnumeration> {
    FaultEnumerator::new(c).enumerate(p)
}

fn toggle(v: &mut Vec<u32>, x: u32) {
    match v.iter().position(|&y| y == x) {
        Some(i) => {
            v.swap_remove(i);
        }
        None => v.push(x),
    }
}

fn sym_diff(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
