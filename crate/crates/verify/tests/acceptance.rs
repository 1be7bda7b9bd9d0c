//! One PASS/FAIL line per acceptance criterion, with the measured values
//! underneath. Exits nonzero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use qldpc_dc::bp::{BpConfig, BpDecoder, BpVariant};
use qldpc_dc::codes::{build_bb, build_rotated_surface, BbParams, CssCode};
use qldpc_dc::detmodel::{
    bb_circuit_dcm_matrices, bb_circuit_model, build_bb_circuit, build_bb_circuit_ddm, build_bb_circuit_ddm_with,
    find_low_weight_trivial, pheno_model, BbCircuit, FaultEnumerator,
};
use qldpc_dc::gf2::{self, BitVec, SparseBinMatrix};
use qldpc_dc::postproc::{dc_cut_indices, DcConfig, DecoderKind, MaskingMode, Pipeline, SecondRunPriors};
use qldpc_dc::sim::{check_success, run_experiment, CodeSpec, ExperimentConfig, NoiseModel, PointRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{dense_vec_mul_t, exhaustive_posterior, random_dense, random_forest_checks};

type R = Result<(), Box<dyn std::error::Error + Send + Sync>>;

#[derive(Default)]
struct Report {
    lines: Vec<String>,
    failed: bool,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.failed |= !ok;
        self.lines.push(format!("    [{}] {}", if ok { "ok" } else { "FAIL" }, what.into()));
    }

    fn note(&mut self, what: impl Into<String>) {
        self.lines.push(format!("    {}", what.into()));
    }

    fn timed(&mut self, start: Instant, budget: Duration) {
        let t = start.elapsed();
        self.check(t < budget, format!("runtime {:.2?} (budget {:?})", t, budget));
    }
}

fn main() {
    let criteria: [(&str, fn(&mut Report) -> R); 9] = [
        ("code construction", c1_codes),
        ("CSS and detector-model orthogonality", c2_orthogonality),
        ("BP matches exact posteriors on trees", c3_bp_oracle),
        ("weight bounds", c4_weights),
        ("low-weight trivial errors", c5_trivial),
        ("fault enumerator cross-check", c6_enumerator),
        ("statistical ordering of decoders", c7_statistics),
        ("degeneracy-cutting contracts", c8_dc_contracts),
        ("deterministic CLI runs", c9_determinism),
    ];
    let mut failures = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut report = Report::default();
        match panic::catch_unwind(AssertUnwindSafe(|| f(&mut report))) {
            Ok(Ok(())) => {}
            Ok(Err(e)) => report.check(false, format!("error: {e}")),
            Err(_) => report.check(false, "panicked"),
        }
        let verdict = if report.failed { "FAIL" } else { "PASS" };
        failures += usize::from(report.failed);
        println!("criterion {} {verdict}: {title} ({:.1?})", i + 1, start.elapsed());
        for line in &report.lines {
            println!("{line}");
        }
    }
    println!("{} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

fn all_codes() -> Vec<CssCode> {
    let mut codes: Vec<CssCode> = [3, 5, 7].iter().map(|&d| build_rotated_surface(d).unwrap()).collect();
    for p in [BbParams::bb72(), BbParams::bb108(), BbParams::bb144()] {
        codes.push(build_bb(&p).unwrap());
    }
    codes
}

fn c1_codes(r: &mut Report) -> R {
    let start = Instant::now();
    for (p, n, k, l, m) in [
        (BbParams::bb72(), 72, 12, 6, 6),
        (BbParams::bb108(), 108, 8, 9, 6),
        (BbParams::bb144(), 144, 12, 12, 6),
    ] {
        let code = build_bb(&p)?;
        let rank_k = n - gf2::rank(&code.hx) - gf2::rank(&code.hz);
        r.check(
            code.n == n && code.k == k && rank_k == k && (p.l, p.m) == (l, m),
            format!(
                "(l, m) = ({}, {}): n = {}, k = {} (rank gives {rank_k}), expected [[{n},{k}]]",
                p.l, p.m, code.n, code.k
            ),
        );
        r.check(
            code.max_check_row_weight() == 6 && code.max_check_col_weight() == 3,
            format!(
                "{}: check row weight {}, column weight {}",
                code.label,
                code.max_check_row_weight(),
                code.max_check_col_weight()
            ),
        );
    }
    for d in [3, 5, 7] {
        let code = build_rotated_surface(d)?;
        let rank_k = code.n - gf2::rank(&code.hx) - gf2::rank(&code.hz);
        r.check(
            code.n == d * d && code.k == 1 && rank_k == 1,
            format!("surface d = {d}: [[{}, {}]]", code.n, code.k),
        );
    }
    r.timed(start, Duration::from_secs(5));
    Ok(())
}

fn orthogonal(a: &SparseBinMatrix, b: &SparseBinMatrix) -> bool {
    gf2::mat_mat_t(a, b).map(|m| m.is_zero()).unwrap_or(false)
}

fn c2_orthogonality(r: &mut Report) -> R {
    for code in all_codes() {
        let ok = orthogonal(&code.hz, &code.hx) && orthogonal(&code.oz, &code.hx) && orthogonal(&code.ox, &code.hz);
        r.check(ok, format!("{}: H_Z H_X^T, O_Z H_X^T, O_X H_Z^T vanish", code.label));
    }
    let pheno_cases = [
        (build_rotated_surface(3)?, 3),
        (build_rotated_surface(5)?, 5),
        (build_bb(&BbParams::bb72())?, 6),
    ];
    for (code, t) in &pheno_cases {
        let m = pheno_model(code, *t, 0.01)?;
        let ddm = m.ddm.as_ref().ok_or("missing DDM")?;
        r.check(
            orthogonal(ddm, &m.dcm) && orthogonal(ddm, &m.observables),
            format!("phenomenological {} T = {t}: DDM against DCM and observables", code.label),
        );
    }
    for (p, t) in [(BbParams::bb72(), 1), (BbParams::bb72(), 2), (BbParams::bb72(), 6), (BbParams::bb108(), 2), (BbParams::bb144(), 2)] {
        let m = bb_circuit_model(&p, t, 0.001)?;
        let ddm = m.ddm.as_ref().ok_or("missing DDM")?;
        r.check(
            orthogonal(ddm, &m.dcm) && orthogonal(ddm, &m.observables),
            format!("circuit-level {} T = {t}: DDM against DCM and observables", build_bb(&p)?.label),
        );
    }
    Ok(())
}

fn c3_bp_oracle(r: &mut Report) -> R {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let instances = 200;
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let n = rng.gen_range(2..=16);
        let checks = rng.gen_range(1..n);
        let h = random_forest_checks(&mut rng, n, checks);
        let priors: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..=0.49)).collect();
        let e: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(0.5))).collect();
        let s = dense_vec_mul_t(&e, &h);
        let exact = exhaustive_posterior(&h, &s, &priors);
        if exact.iter().any(|x| !x.is_finite()) {
            return Err("oracle posterior is not finite".into());
        }
        let m = SparseBinMatrix::from_dense(&h)?;
        let mut bp = BpDecoder::for_matrix(
            &m,
            BpConfig {
                max_iter: n,
                variant: BpVariant::ProductSum,
            },
        )?;
        let sv = BitVec::from_bools(&s.iter().map(|&b| b == 1).collect::<Vec<_>>());
        let out = bp.decode_fixed(&sv, &priors, n)?;
        for (a, b) in out.soft.iter().zip(&exact) {
            let d = (a - b).abs();
            worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
        }
    }
    r.check(worst < 1e-9, format!("{instances} forests, n <= 16: max |BP - exact| = {worst:.2e}"));
    Ok(())
}

fn c4_weights(r: &mut Report) -> R {
    for (code, t) in [
        (build_rotated_surface(3)?, 3),
        (build_rotated_surface(5)?, 5),
        (build_bb(&BbParams::bb72())?, 6),
    ] {
        let (rw, cw) = (code.max_check_row_weight(), code.max_check_col_weight());
        let m = pheno_model(&code, t, 0.01)?;
        let ddm = m.ddm.as_ref().ok_or("missing DDM")?;
        let ddm_bound = rw.max(cw + 2);
        r.check(
            m.dcm.max_row_weight() <= rw + 2
                && m.dcm.max_col_weight() <= cw
                && ddm.max_row_weight() <= ddm_bound
                && ddm.max_col_weight() <= ddm_bound,
            format!(
                "phenomenological {} T = {t} (r = {rw}, c = {cw}): DCM row {} col {}, DDM row {} col {}",
                code.label,
                m.dcm.max_row_weight(),
                m.dcm.max_col_weight(),
                ddm.max_row_weight(),
                ddm.max_col_weight()
            ),
        );
    }
    // a single round has no interior rounds, so the bulk weights cannot appear
    let (dcm1, _) = bb_circuit_dcm_matrices(&BbParams::bb72(), 1)?;
    let ddm1 = build_bb_circuit_ddm(&BbParams::bb72(), 1)?;
    r.note(format!(
        "circuit-level bb72 T = 1 (boundary only): DCM row {} col {}, DDM row {} col {}",
        dcm1.max_row_weight(),
        dcm1.max_col_weight(),
        ddm1.max_row_weight(),
        ddm1.max_col_weight()
    ));
    r.note("left-data columns of an interior round meet A (3) + I + A2 + I + (A3 + A1) (2) = 8 rows of the explicit layout");
    for t in [2, 3, 6] {
        let (dcm, _) = bb_circuit_dcm_matrices(&BbParams::bb72(), t)?;
        r.check(
            dcm.max_row_weight() == 35 && dcm.max_col_weight() == 6,
            format!("circuit-level bb72 T = {t}: DCM row {} (want 35), col {} (want 6)", dcm.max_row_weight(), dcm.max_col_weight()),
        );
        let ddm = build_bb_circuit_ddm(&BbParams::bb72(), t)?;
        let col_w = ddm.col_weights();
        let hist: BTreeSet<usize> = col_w.iter().copied().collect();
        r.check(ddm.max_row_weight() == 6, format!("circuit-level bb72 T = {t}: DDM row weight {} (want 6)", ddm.max_row_weight()));
        r.check(
            ddm.max_col_weight() == 7,
            format!(
                "circuit-level bb72 T = {t}: DDM column weight {} (want 7), column weights present {hist:?}",
                ddm.max_col_weight()
            ),
        );
    }
    Ok(())
}

fn c5_trivial(r: &mut Report) -> R {
    let start = Instant::now();
    let p = BbParams::bb72();
    let model = bb_circuit_model(&p, 2, 0.001)?;
    let ddm = model.ddm.as_ref().ok_or("missing DDM")?;
    let rows: BTreeSet<&[usize]> = ddm.row_supports().iter().map(Vec::as_slice).collect();
    let found = find_low_weight_trivial(&model.dcm, &model.observables, 3)?;
    let light = found.iter().filter(|v| v.weight() < 3).count();
    let missing = found.iter().filter(|v| v.weight() == 3 && !rows.contains(v.support())).count();
    r.check(light == 0, format!("bb72 T = 2: {light} trivial errors of weight 1 or 2"));
    r.check(
        missing == 0 && !found.is_empty(),
        format!("bb72 T = 2: {} weight-3 trivial errors, {missing} not rows of the DDM", found.len()),
    );

    let p = BbParams::bb108();
    let (dcm, obs) = bb_circuit_dcm_matrices(&p, 2)?;
    let found = find_low_weight_trivial(&dcm, &obs, 3)?;
    let uncovered = |ddm: &SparseBinMatrix| {
        let rows: BTreeSet<&[usize]> = ddm.row_supports().iter().map(Vec::as_slice).collect();
        found.iter().filter(|v| !rows.contains(v.support())).count()
    };
    let without = uncovered(&build_bb_circuit_ddm_with(&p, 2, false)?);
    let with = uncovered(&build_bb_circuit_ddm(&p, 2)?);
    r.check(without > 0, format!("bb108 T = 2 without the extra block: {without} trivial errors uncovered"));
    r.check(with == 0, format!("bb108 T = 2 with the extra block: {with} uncovered"));
    r.timed(start, Duration::from_secs(600));
    Ok(())
}

fn c6_enumerator(r: &mut Report) -> R {
    let p = BbParams::bb72();
    let bc = build_bb_circuit(&p, 2)?;
    let fe = FaultEnumerator::new(&bc.circuit);
    let rate = 0.001;
    let en = fe.enumerate(rate)?;
    let (dcm, obs) = bb_circuit_dcm_matrices(&p, 2)?;
    let mut explicit: Vec<(Vec<usize>, Vec<usize>)> =
        (0..dcm.cols()).map(|j| (dcm.col(j).to_vec(), obs.col(j).to_vec())).collect();
    let mut enumerated: Vec<(Vec<usize>, Vec<usize>)> = en
        .mechanisms
        .iter()
        .map(|m| (m.detector_flips.support().to_vec(), m.observable_flips.support().to_vec()))
        .collect();
    explicit.sort();
    enumerated.sort();
    r.check(
        explicit == enumerated,
        format!("bb72 T = 2: {} explicit columns vs {} enumerated signatures, equal as multisets", explicit.len(), enumerated.len()),
    );

    // X on the first right-data control after layer 1 of round 0
    let h = p.half();
    let a1 = p.perm(p.a[0]);
    let target = a1.iter().position(|&j| j == 0).ok_or("A1 is not a permutation")?;
    let sig = fe.x_signature(BbCircuit::step_index(0, 1), h + target);
    let mech = en.find(&sig).ok_or("worked signature is not a mechanism")?;
    let closed = 0.5 * (1.0 - (1.0 - 2.0 * rate / 15.0).powi(8));
    let diff = (mech.probability - closed).abs();
    r.check(
        mech.constituents == 8 && diff < 1e-12,
        format!(
            "worked grouping: {} constituents, probability {:.15e} vs closed form {closed:.15e} (|diff| = {diff:.1e})",
            mech.constituents, mech.probability
        ),
    );
    Ok(())
}

fn rec(recs: &[PointRecord], d: DecoderKind) -> &PointRecord {
    recs.iter().find(|x| x.decoder == d.as_str()).expect("decoder present")
}

fn describe(x: &PointRecord) -> String {
    format!("{} {:.4} [{:.4}, {:.4}]", x.decoder, x.rate, x.ci_low, x.ci_high)
}

fn c7_statistics(r: &mut Report) -> R {
    let start = Instant::now();
    let surface = ExperimentConfig {
        code: CodeSpec::Surface { d: 3 },
        noise: NoiseModel::CodeCapacity,
        rates: vec![0.05],
        rounds: None,
        decoders: DecoderKind::ALL.to_vec(),
        bp_variant: BpVariant::ProductSum,
        max_iter: None,
        second_run_priors: SecondRunPriors::Posterior,
        masking_mode: MaskingMode::ZeroPriors,
        trials: 10_000,
        seed: 20240601,
    };
    let recs = run_experiment(&surface, None)?;
    let (bp, dc, osd, dcosd) = (
        rec(&recs, DecoderKind::Bp),
        rec(&recs, DecoderKind::BpDc),
        rec(&recs, DecoderKind::BpOsd),
        rec(&recs, DecoderKind::BpDcOsd),
    );
    r.check(
        dc.rate < bp.rate && !dc.stats().overlaps(&bp.stats()),
        format!("surface d = 3, p = 0.05: {} below {} with disjoint CIs", describe(dc), describe(bp)),
    );
    r.check(
        dcosd.stats().overlaps(&osd.stats()),
        format!("surface d = 3, p = 0.05: {} and {} CIs overlap", describe(dcosd), describe(osd)),
    );

    let bb = ExperimentConfig {
        code: CodeSpec::Bb(BbParams::bb72()),
        decoders: vec![DecoderKind::Bp, DecoderKind::BpDc],
        bp_variant: BpVariant::min_sum(),
        max_iter: Some(72),
        second_run_priors: SecondRunPriors::ResetToPrior,
        ..surface
    };
    let recs = run_experiment(&bb, None)?;
    let (bp, dc) = (rec(&recs, DecoderKind::Bp), rec(&recs, DecoderKind::BpDc));
    r.check(
        dc.rate < bp.rate && !dc.stats().overlaps(&bp.stats()),
        format!("bb72 code capacity, p = 0.05, min-sum, reset priors: {} below {} with disjoint CIs", describe(dc), describe(bp)),
    );
    r.timed(start, Duration::from_secs(15 * 60));
    Ok(())
}

fn c8_dc_contracts(r: &mut Report) -> R {
    // cut locality: values outside every degeneracy row cannot matter
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut mismatches = 0;
    let cases = 500;
    for _ in 0..cases {
        let (m, n) = (rng.gen_range(1..6), rng.gen_range(6..24));
        let mut d = random_dense(&mut rng, m, n, 0.25);
        for row in &mut d {
            if row.iter().all(|&b| b == 0) {
                row[rng.gen_range(0..n)] = 1;
            }
        }
        let h_deg = SparseBinMatrix::from_dense(&d)?;
        let soft: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let mut poisoned = soft.clone();
        for (j, p) in poisoned.iter_mut().enumerate() {
            if h_deg.col(j).is_empty() {
                *p = if j % 2 == 0 { f64::NAN } else { -1e300 };
            }
        }
        let seed = rng.gen::<u64>();
        let a = dc_cut_indices(&h_deg, &soft, &mut ChaCha8Rng::seed_from_u64(seed))?;
        let b = dc_cut_indices(&h_deg, &poisoned, &mut ChaCha8Rng::seed_from_u64(seed))?;
        mismatches += usize::from(a != b);
    }
    r.check(mismatches == 0, format!("sentinel poisoning: {mismatches} of {cases} cut sets changed"));

    // ZeroPriors against DeleteColumns, and the iteration budget
    let code = build_bb(&BbParams::bb72())?;
    let t_iter = 72;
    let p = 0.05;
    let priors = vec![p; code.n];
    let mut sample = ChaCha8Rng::seed_from_u64(500);
    let trials: Vec<(BitVec, BitVec)> = (0..500)
        .map(|_| {
            let e = BitVec::from_bools(&(0..code.n).map(|_| sample.gen_bool(p)).collect::<Vec<_>>());
            let s = gf2::mat_vec_t(&e, &code.hz).unwrap();
            (e, s)
        })
        .collect();
    let (hz, hx) = (Arc::new(code.hz.clone()), Arc::new(code.hx.clone()));
    let mut differ = 0;
    let mut over_budget = 0;
    let mut second_runs = 0;
    for variant in [BpVariant::ProductSum, BpVariant::min_sum()] {
        for srp in [SecondRunPriors::Posterior, SecondRunPriors::ResetToPrior] {
            let bp = BpConfig { max_iter: t_iter, variant };
            let make = |masking_mode| {
                Pipeline::new(
                    DecoderKind::BpDcOsd,
                    hz.clone(),
                    Some(hx.clone()),
                    bp,
                    DcConfig {
                        second_run_priors: srp,
                        masking_mode,
                    },
                )
            };
            let (mut zero, mut del) = (make(MaskingMode::ZeroPriors)?, make(MaskingMode::DeleteColumns)?);
            for (t, (e, s)) in trials.iter().enumerate() {
                let a = zero.decode(s, &priors, &mut ChaCha8Rng::seed_from_u64(t as u64))?;
                let b = del.decode(s, &priors, &mut ChaCha8Rng::seed_from_u64(t as u64))?;
                let same_outcome = check_success(e, &a.estimate, &code.hz, &code.oz)?
                    == check_success(e, &b.estimate, &code.hz, &code.oz)?;
                differ += usize::from(a != b || !same_outcome);
                for x in [&a, &b] {
                    over_budget += usize::from(x.stats.total_bp_iterations() > 2 * t_iter);
                }
                second_runs += usize::from(a.stats.second_bp_iterations.is_some());
            }
        }
    }
    r.check(
        differ == 0 && second_runs > 0,
        format!("ZeroPriors vs DeleteColumns on 500 bb72 trials x 4 settings: {differ} differ ({second_runs} reached DC)"),
    );
    r.check(over_budget == 0, format!("{over_budget} decodes exceeded 2 T_iter = {} BP iterations", 2 * t_iter));

    // tie-breaking: chi-square over 4000 seeds on one row of four exact ties
    let h_deg = SparseBinMatrix::from_row_supports(4, vec![vec![0, 1, 2, 3]])?;
    let soft = [0.25; 4];
    let mut counts = [0usize; 4];
    for seed in 0..4000u64 {
        let cut = dc_cut_indices(&h_deg, &soft, &mut ChaCha8Rng::seed_from_u64(seed))?;
        counts[cut[0]] += 1;
    }
    let expected = 1000.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // survival function of chi-square with 3 degrees of freedom
    let p_value = {
        let x = chi2 / 2.0;
        (-x).exp() * (2.0 * x.sqrt() / std::f64::consts::PI.sqrt()) + erfc(x.sqrt())
    };
    r.check(p_value > 0.001, format!("tie counts {counts:?}: chi-square {chi2:.3}, p-value {p_value:.4}"));
    Ok(())
}

/// Complementary error function (Numerical Recipes `erfcc`, relative error
/// below 1.2e-7).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let poly = -z * z - 1.26551223
        + t * (1.00002368
            + t * (0.37409196
                + t * (0.09678418
                    + t * (-0.18628806
                        + t * (0.27886807 + t * (-1.13520398 + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277))))))));
    let r = t * poly.exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

fn c9_determinism(r: &mut Report) -> R {
    let dir = tempfile::tempdir()?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let run = |cmd: &str, extra: &[&str], out: &str| {
        let mut args = vec!["qldpc-dc", cmd];
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--out", out]);
        qldpc_dc_cli::run_from_args(args)
    };
    let cases: [(&str, &str, Vec<&str>); 3] = [
        (
            "simulate",
            "surface d = 3 code capacity, all decoders",
            vec![
                "--code", "surface:3", "--noise", "code-capacity", "--p", "0.06", "--decoder", "bp,bp-dc,bp-osd,bp-dc-osd",
                "--dc-second-priors", "posterior", "--trials", "2000", "--seed", "11",
            ],
        ),
        (
            "sweep",
            "bb72 phenomenological T = 2, min-sum",
            vec![
                "--code", "bb:6,6", "--noise", "phenomenological", "--rounds", "2", "--p", "0.01,0.02", "--decoder",
                "bp,bp-dc-osd", "--dc-second-priors", "reset", "--bp-variant", "min-sum", "--max-iter", "40", "--trials",
                "200", "--seed", "12", "--format", "jsonl",
            ],
        ),
        (
            "sweep",
            "surface d = 3 circuit level T = 2",
            vec![
                "--code", "surface:3", "--noise", "circuit-level", "--rounds", "2", "--p", "0.002,0.004", "--decoder",
                "bp-osd", "--trials", "300", "--seed", "13",
            ],
        ),
    ];
    for (i, (cmd, what, args)) in cases.iter().enumerate() {
        let outs: Vec<String> = ["1", "1", "4"]
            .iter()
            .enumerate()
            .map(|(j, threads)| -> Result<String, Box<dyn std::error::Error + Send + Sync>> {
                let out = path(&format!("run{i}_{j}"));
                let mut a = args.clone();
                a.extend_from_slice(&["--threads", threads]);
                run(cmd, &a, &out)?;
                Ok(out)
            })
            .collect::<Result<_, _>>()?;
        let replayed = path(&format!("run{i}_replay"));
        let manifest = format!("{}.manifest.json", outs[0]);
        run(cmd, &["--replay", &manifest, "--threads", "3"], &replayed)?;
        let bytes = fs::read(&outs[0])?;
        let same_repeat = bytes == fs::read(&outs[1])?;
        let same_threads = bytes == fs::read(&outs[2])?;
        let same_replay = bytes == fs::read(&replayed)?;
        r.check(
            !bytes.is_empty() && same_repeat && same_threads && same_replay,
            format!(
                "{cmd}, {what}: repeat {}, threads 1 vs 4 {}, replay {}",
                verdict(same_repeat),
                verdict(same_threads),
                verdict(same_replay)
            ),
        );
    }
    r.note("outputs compared byte for byte");
    Ok(())
}

fn verdict(same: bool) -> &'static str {
    if same {
        "identical"
    } else {
        "DIFFERENT"
    }
}
