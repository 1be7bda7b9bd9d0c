mod common;

use qldpc_dc::bp::BpVariant;
use qldpc_dc::codes::{build_rotated_surface, BbParams};
use qldpc_dc::gf2::{self, BitVec};
use qldpc_dc::postproc::{DecoderKind, MaskingMode, SecondRunPriors};
use qldpc_dc::sim::{
    check_success, run_experiment, run_trials, to_csv, wilson_interval, CodeSpec, ExperimentConfig, FailureStats,
    NoiseModel, Outcome,
};

use common::*;

fn surface_config(rate: f64, decoder: DecoderKind, trials: u64) -> ExperimentConfig {
    ExperimentConfig {
        code: CodeSpec::Surface { d: 3 },
        noise: NoiseModel::CodeCapacity,
        rates: vec![rate],
        rounds: None,
        decoders: vec![decoder],
        bp_variant: BpVariant::ProductSum,
        max_iter: None,
        second_run_priors: SecondRunPriors::Posterior,
        masking_mode: MaskingMode::ZeroPriors,
        trials,
        seed: 12345,
    }
}

#[test]
fn success_criterion_cases() {
    let code = build_rotated_surface(3).unwrap();
    let e = BitVec::from_support(9, vec![0, 4]).unwrap();
    let ok = |e_hat: &BitVec| check_success(&e, e_hat, &code.hz, &code.oz).unwrap();
    assert_eq!(ok(&e), Outcome::Success);
    assert_eq!(ok(&e.xor(&code.hx.row_vec(1)).unwrap()), Outcome::Success);
    assert_eq!(ok(&e.xor(&code.ox.row_vec(0)).unwrap()), Outcome::LogicalFailure);
    assert_eq!(ok(&e.xor(&BitVec::from_support(9, vec![2]).unwrap()).unwrap()), Outcome::NonConvergent);
    assert!(check_success(&e, &BitVec::zeros(8), &code.hz, &code.oz).is_err());
}

/// On d = 3 every residual is classified against brute-force coset
/// membership.
#[test]
fn success_criterion_matches_exhaustive_cosets() {
    let code = build_rotated_surface(3).unwrap();
    let stabilizers = exhaustive_span(&code.hx.to_dense(), 9);
    let hz = code.hz.to_dense();
    let zero = BitVec::zeros(9);
    for bits in 0u32..512 {
        let r: Vec<u8> = (0..9).map(|i| (bits >> i & 1) as u8).collect();
        let expected = if dense_vec_mul_t(&r, &hz).iter().any(|&b| b == 1) {
            Outcome::NonConvergent
        } else if stabilizers.contains(&r) {
            Outcome::Success
        } else {
            Outcome::LogicalFailure
        };
        let rv = BitVec::from_bools(&r.iter().map(|&b| b == 1).collect::<Vec<_>>());
        assert_eq!(check_success(&zero, &rv, &code.hz, &code.oz).unwrap(), expected, "{r:?}");
    }
}

/// Closed-form Wilson bounds at k = 3, n = 40, computed independently.
#[test]
fn wilson_closed_form() {
    let (k, n, z) = (3.0f64, 40.0f64, 1.959963984540054f64);
    let ph = k / n;
    let c = (ph + z * z / (2.0 * n)) / (1.0 + z * z / n);
    let w = z / (1.0 + z * z / n) * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt();
    let (lo, hi) = wilson_interval(3, 40);
    assert!((lo - (c - w)).abs() < 1e-15 && (hi - (c + w)).abs() < 1e-15);
    let s = FailureStats::from_counts(40, 2, 1);
    assert_eq!(s.failures(), 3);
    assert!((s.failure_rate - 0.075).abs() < 1e-15);
}

#[test]
fn vanishing_noise_never_fails() {
    for decoder in DecoderKind::ALL {
        let s = run_trials(&surface_config(1e-12, decoder, 100), Some(2)).unwrap();
        assert_eq!(s.failures(), 0);
        assert_eq!(s.ci95_low, 0.0);
    }
}

#[test]
fn bp_osd_on_d3_beats_physical_rate_reproducibly() {
    let cfg = surface_config(0.05, DecoderKind::BpOsd, 10_000);
    let a = run_trials(&cfg, Some(4)).unwrap();
    let b = run_trials(&cfg, Some(4)).unwrap();
    assert_eq!(a, b);
    assert!(a.failure_rate < 0.05, "{a:?}");
    assert_eq!(a.failures_nonconvergent, 0);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let mut cfg = surface_config(0.08, DecoderKind::BpDc, 600);
    cfg.decoders = DecoderKind::ALL.to_vec();
    cfg.rates = vec![0.04, 0.08];
    let one = to_csv(&run_experiment(&cfg, Some(1)).unwrap());
    let three = to_csv(&run_experiment(&cfg, Some(3)).unwrap());
    assert_eq!(one, three);
    assert_eq!(one.lines().count(), 1 + 2 * 4);

    let pheno = ExperimentConfig {
        code: CodeSpec::Bb(BbParams::bb72()),
        noise: NoiseModel::Phenomenological,
        rounds: Some(2),
        bp_variant: BpVariant::min_sum(),
        max_iter: Some(50),
        rates: vec![0.01],
        ..surface_config(0.01, DecoderKind::BpDcOsd, 60)
    };
    assert_eq!(
        to_csv(&run_experiment(&pheno, Some(1)).unwrap()),
        to_csv(&run_experiment(&pheno, Some(4)).unwrap())
    );
}

#[test]
fn code_capacity_rows_leave_rounds_empty() {
    let recs = run_experiment(&surface_config(0.05, DecoderKind::Bp, 10), None).unwrap();
    assert_eq!(recs[0].rounds, None);
    assert!(recs[0].csv_row().starts_with("surface-d3,code-capacity,bp,0.05,,10,"));
}

#[test]
fn invalid_configs_are_rejected() {
    for bad in [
        ExperimentConfig { rates: vec![0.0], ..surface_config(0.05, DecoderKind::Bp, 10) },
        ExperimentConfig { rates: vec![0.5], ..surface_config(0.05, DecoderKind::Bp, 10) },
        ExperimentConfig { trials: 0, ..surface_config(0.05, DecoderKind::Bp, 10) },
        ExperimentConfig { decoders: vec![], ..surface_config(0.05, DecoderKind::Bp, 10) },
        ExperimentConfig { max_iter: Some(0), ..surface_config(0.05, DecoderKind::Bp, 10) },
    ] {
        assert!(run_experiment(&bad, Some(1)).is_err());
    }
}

#[test]
fn sampled_syndromes_are_consistent() {
    let code = build_rotated_surface(5).unwrap();
    let model = qldpc_dc::detmodel::pheno_model(&code, 2, 0.05).unwrap();
    for t in 0..50 {
        let mut rng = qldpc_dc::noise::trial_rng(1, t);
        let s = qldpc_dc::noise::make_trial(&model, &mut rng);
        assert_eq!(gf2::mat_vec_t(&s.error, &model.dcm).unwrap(), s.syndrome);
    }
}
