//! Flooding-schedule belief propagation in the log-likelihood-ratio domain.
//!
//! Messages are LLRs `log((1-p)/p)`. Finite messages are clamped to
//! `±LLR_CLAMP`. A prior of exactly 0 (or 1) becomes an infinite LLR: such a
//! variable contributes a neutral factor to every check it touches and its
//! soft output stays exactly 0 (or 1), which is what prior masking relies on.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::gf2::{BitVec, SparseBinMatrix};

pub const LLR_CLAMP: f64 = 35.0;
pub const DEFAULT_MIN_SUM_SCALE: f64 = 0.625;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BpVariant {
    ProductSum,
    MinSum { scale: f64 },
}

impl BpVariant {
    pub fn min_sum() -> Self {
        BpVariant::MinSum {
            scale: DEFAULT_MIN_SUM_SCALE,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            BpVariant::ProductSum => "product-sum",
            BpVariant::MinSum { .. } => "min-sum",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpConfig {
    pub max_iter: usize,
    pub variant: BpVariant,
}

/// Tanner graph with edges stored check-major.
#[derive(Clone, Debug)]
pub struct TannerGraph {
    checks: usize,
    vars: usize,
    // edges of check c are check_start[c]..check_start[c+1]
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
    // edges of variable v are var_edges[var_start[v]..var_start[v+1]]
    var_start: Vec<usize>,
    var_edges: Vec<usize>,
}

impl TannerGraph {
    pub fn new(h: &SparseBinMatrix) -> Self {
        let mut check_start = Vec::with_capacity(h.rows() + 1);
        let mut edge_var = Vec::with_capacity(h.nnz());
        check_start.push(0);
        for c in 0..h.rows() {
            edge_var.extend_from_slice(h.row(c));
            check_start.push(edge_var.len());
        }
        let mut var_start = vec![0; h.cols() + 1];
        for &v in &edge_var {
            var_start[v + 1] += 1;
        }
        for v in 0..h.cols() {
            var_start[v + 1] += var_start[v];
        }
        let mut fill = var_start.clone();
        let mut var_edges = vec![0; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v]] = e;
            fill[v] += 1;
        }
        TannerGraph {
            checks: h.rows(),
            vars: h.cols(),
            check_start,
            edge_var,
            var_start,
            var_edges,
        }
    }

    pub fn checks(&self) -> usize {
        self.checks
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn edges(&self) -> usize {
        self.edge_var.len()
    }

    fn check_edges(&self, c: usize) -> std::ops::Range<usize> {
        self.check_start[c]..self.check_start[c + 1]
    }

    fn var_edge_list(&self, v: usize) -> &[usize] {
        &self.var_edges[self.var_start[v]..self.var_start[v + 1]]
    }

    /// Syndrome of `hard` against this graph.
    fn syndrome_matches(&self, hard: &[bool], s: &[bool]) -> bool {
        (0..self.checks).all(|c| {
            let parity = self
                .check_edges(c)
                .fold(false, |acc, e| acc ^ hard[self.edge_var[e]]);
            parity == s[c]
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BpOutput {
    pub soft: Vec<f64>,
    pub hard: BitVec,
    pub converged: bool,
    pub iterations: usize,
}

/// `1` where `soft ≥ 0.5`.
pub fn hard_decision(soft: &[f64]) -> BitVec {
    BitVec::from_bools(&soft.iter().map(|&p| p >= 0.5).collect::<Vec<_>>())
}

pub fn prob_to_llr(p: f64) -> f64 {
    let llr = ((1.0 - p) / p).ln();
    clamp_finite(llr)
}

fn llr_to_prob(llr: f64) -> f64 {
    1.0 / (1.0 + llr.exp())
}

#[inline]
fn clamp_finite(x: f64) -> f64 {
    if x.is_finite() {
        x.clamp(-LLR_CLAMP, LLR_CLAMP)
    } else {
        x
    }
}

/// A decoder bound to one Tanner graph. Owns its message buffers, so each
/// concurrent worker needs its own instance; the graph itself is shared.
#[derive(Clone, Debug)]
pub struct BpDecoder {
    graph: Arc<TannerGraph>,
    config: BpConfig,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    prior_llr: Vec<f64>,
    tanh_buf: Vec<f64>,
    suffix_buf: Vec<f64>,
    edge_updates: u64,
}

impl BpDecoder {
    pub fn new(graph: Arc<TannerGraph>, config: BpConfig) -> Result<Self> {
        if config.max_iter == 0 {
            return Err(Error::InvalidArgument("BP needs at least one iteration".into()));
        }
        if let BpVariant::MinSum { scale } = config.variant {
            if !(scale > 0.0 && scale <= 1.0) {
                return Err(Error::InvalidArgument(format!("min-sum scale {scale} outside (0, 1]")));
            }
        }
        let edges = graph.edges();
        Ok(BpDecoder {
            v2c: vec![0.0; edges],
            c2v: vec![0.0; edges],
            prior_llr: vec![0.0; graph.vars()],
            tanh_buf: Vec::new(),
            suffix_buf: Vec::new(),
            graph,
            config,
            edge_updates: 0,
        })
    }

    pub fn for_matrix(h: &SparseBinMatrix, config: BpConfig) -> Result<Self> {
        Self::new(Arc::new(TannerGraph::new(h)), config)
    }

    pub fn config(&self) -> &BpConfig {
        &self.config
    }

    pub fn graph(&self) -> &Arc<TannerGraph> {
        &self.graph
    }

    /// Total edge updates performed by this instance so far; one update is a
    /// check-to-variable plus variable-to-check refresh of a single edge.
    pub fn edge_updates(&self) -> u64 {
        self.edge_updates
    }

    pub fn decode(&mut self, s: &BitVec, priors: &[f64]) -> Result<BpOutput> {
        self.run(s, priors, self.config.max_iter, true)
    }

    /// Runs exactly `iterations` flooding iterations without the syndrome
    /// stopping rule, so the soft output is the fixed-point estimate after
    /// that many rounds (exact marginals on a tree once `iterations` reaches
    /// its diameter). `converged` reports whether the final hard decision
    /// matches `s`.
    pub fn decode_fixed(&mut self, s: &BitVec, priors: &[f64], iterations: usize) -> Result<BpOutput> {
        if iterations == 0 {
            return Err(Error::InvalidArgument("BP needs at least one iteration".into()));
        }
        self.run(s, priors, iterations, false)
    }

    fn run(&mut self, s: &BitVec, priors: &[f64], max_iter: usize, early_stop: bool) -> Result<BpOutput> {
        let g = Arc::clone(&self.graph);
        check_dim("BP syndrome length", g.checks(), s.len())?;
        check_dim("BP prior length", g.vars(), priors.len())?;
        if let Some(p) = priors.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidArgument(format!("prior {p} outside [0, 1]")));
        }
        let syndrome = s.to_bools();

        for (llr, &p) in self.prior_llr.iter_mut().zip(priors) {
            *llr = prob_to_llr(p);
        }
        let mut hard: Vec<bool> = priors.iter().map(|&p| p >= 0.5).collect();
        if early_stop && g.syndrome_matches(&hard, &syndrome) {
            return Ok(BpOutput {
                soft: priors.to_vec(),
                hard: BitVec::from_bools(&hard),
                converged: true,
                iterations: 0,
            });
        }

        for (e, &v) in g.edge_var.iter().enumerate() {
            self.v2c[e] = self.prior_llr[v];
        }
        let mut soft = vec![0.0; g.vars()];
        for iter in 1..=max_iter {
            self.check_update(&g, &syndrome)?;
            self.variable_update(&g, &mut soft);
            self.edge_updates += g.edges() as u64;
            for (h, &p) in hard.iter_mut().zip(&soft) {
                *h = p >= 0.5;
            }
            if early_stop && g.syndrome_matches(&hard, &syndrome) {
                return Ok(BpOutput {
                    soft,
                    hard: BitVec::from_bools(&hard),
                    converged: true,
                    iterations: iter,
                });
            }
        }
        Ok(BpOutput {
            converged: !early_stop && g.syndrome_matches(&hard, &syndrome),
            soft,
            hard: BitVec::from_bools(&hard),
            iterations: max_iter,
        })
    }

    fn check_update(&mut self, g: &TannerGraph, syndrome: &[bool]) -> Result<()> {
        match self.config.variant {
            BpVariant::ProductSum => {
                for c in 0..g.checks() {
                    let edges = g.check_edges(c);
                    let deg = edges.len();
                    let t = &mut self.tanh_buf;
                    t.clear();
                    t.extend(self.v2c[edges.clone()].iter().map(|&m| (0.5 * m).tanh()));
                    // suffix products, then a running prefix
                    let suffix = &mut self.suffix_buf;
                    suffix.clear();
                    suffix.resize(deg + 1, 1.0);
                    for k in (0..deg).rev() {
                        suffix[k] = suffix[k + 1] * t[k];
                    }
                    let sign = if syndrome[c] { -1.0 } else { 1.0 };
                    let mut prefix = 1.0;
                    for (k, e) in edges.enumerate() {
                        let prod = sign * prefix * suffix[k + 1];
                        let msg = 2.0 * prod.atanh();
                        self.c2v[e] = if msg.is_nan() {
                            return Err(Error::Internal(format!("non-finite message at check {c}")));
                        } else {
                            msg.clamp(-LLR_CLAMP, LLR_CLAMP)
                        };
                        prefix *= t[k];
                    }
                }
            }
            BpVariant::MinSum { scale } => {
                for c in 0..g.checks() {
                    let edges = g.check_edges(c);
                    let mut negative = syndrome[c];
                    let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, usize::MAX);
                    for e in edges.clone() {
                        let m = self.v2c[e];
                        negative ^= m < 0.0;
                        let a = m.abs();
                        if a < min1 {
                            min2 = min1;
                            min1 = a;
                            arg = e;
                        } else if a < min2 {
                            min2 = a;
                        }
                    }
                    for e in edges {
                        let m = self.v2c[e];
                        let mag = if e == arg { min2 } else { min1 };
                        let neg = negative ^ (m < 0.0);
                        let msg = scale * if neg { -mag } else { mag };
                        self.c2v[e] = if msg.is_nan() {
                            return Err(Error::Internal(format!("non-finite message at check {c}")));
                        } else {
                            msg.clamp(-LLR_CLAMP, LLR_CLAMP)
                        };
                    }
                }
            }
        }
        Ok(())
    }

    fn variable_update(&mut self, g: &TannerGraph, soft: &mut [f64]) {
        for (v, p) in soft.iter_mut().enumerate() {
            let edges = g.var_edge_list(v);
            let prior = self.prior_llr[v];
            let total = edges.iter().fold(prior, |acc, &e| acc + self.c2v[e]);
            if prior.is_infinite() {
                // masked or forced variable: posterior is pinned to the prior
                for &e in edges {
                    self.v2c[e] = prior;
                }
                *p = llr_to_prob(prior);
            } else {
                for &e in edges {
                    self.v2c[e] = clamp_finite(total - self.c2v[e]);
                }
                *p = llr_to_prob(total);
            }
        }
    }
}

/// One-shot decode: builds the Tanner graph and runs BP.
pub fn bp_decode(
    h: &SparseBinMatrix,
    s: &BitVec,
    priors: &[f64],
    max_iter: usize,
    variant: BpVariant,
) -> Result<BpOutput> {
    BpDecoder::for_matrix(h, BpConfig { max_iter, variant })?.decode(s, priors)
}
