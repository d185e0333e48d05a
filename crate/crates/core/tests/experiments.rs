use sparsir_core::experiments::{n_for_gamma, SdpSettings};
use sparsir_core::{
    fit_decay, run_curve, run_curve_with_workers, stability_diagnostic, CurveConfig, Link, Method, ModelSpec,
    SirMode, SparsityRule,
};

fn counts(c: &sparsir_core::EfficiencyCurve) -> Vec<(usize, usize, bool, usize, usize)> {
    c.points.iter().map(|p| (p.n, p.successes, p.skipped, p.unconverged, p.numerical_failures)).collect()
}

#[test]
fn curves_are_reproducible_across_worker_counts() {
    let mut cfg = CurveConfig::new(ModelSpec::named(Link::SinPlusIdentity), 30, vec![2.0, 8.0]);
    cfg.reps = 40;
    cfg.master_seed = 77;
    let one = run_curve_with_workers(&cfg, 1).unwrap();
    let four = run_curve_with_workers(&cfg, 4).unwrap();
    assert_eq!(counts(&one), counts(&four));
    assert_eq!(counts(&run_curve(&cfg).unwrap()), counts(&one));

    cfg.method = Method::Sdp;
    cfg.reps = 10;
    assert_eq!(counts(&run_curve_with_workers(&cfg, 1).unwrap()), counts(&run_curve_with_workers(&cfg, 3).unwrap()));
}

#[test]
fn zero_gamma_is_skipped_not_failed() {
    let mut cfg = CurveConfig::new(ModelSpec::named(Link::Linear), 25, vec![0.0, 1.0]);
    cfg.reps = 5;
    let c = run_curve(&cfg).unwrap();
    assert_eq!(c.s, 5);
    assert!(c.points[0].skipped);
    assert_eq!(c.points[0].success_rate(), None);
    assert_eq!(c.points[1].n, n_for_gamma(1.0, 5, 25));
}

#[test]
fn whitened_points_need_more_rows_than_columns() {
    let mut cfg = CurveConfig::new(ModelSpec::named(Link::Linear), 100, vec![1.0, 5.0]);
    cfg.mode = SirMode::Whitened;
    cfg.reps = 3;
    let c = run_curve(&cfg).unwrap();
    // n = ⌈10 ln 90⌉ = 45 <= p.
    assert!(c.points[0].skipped);
    assert!(!c.points[1].skipped);
}

#[test]
fn success_grows_with_gamma_for_every_benchmark() {
    for link in Link::benchmarks() {
        let mut cfg = CurveConfig::new(ModelSpec::named(link.clone()), 100, vec![2.0, 30.0]);
        cfg.reps = 200;
        cfg.master_seed = 5;
        let c = run_curve(&cfg).unwrap();
        let (lo, hi) = (c.points[0].success_rate().unwrap(), c.points[1].success_rate().unwrap());
        assert!(hi > lo, "{}: {lo} -> {hi}", link.name());
    }
}

#[test]
fn sdp_curve_counts_solver_outcomes() {
    let mut cfg = CurveConfig::new(ModelSpec::named(Link::Linear), 20, vec![20.0]);
    cfg.method = Method::Sdp;
    cfg.sparsity = SparsityRule::Explicit(3);
    cfg.reps = 10;
    cfg.sdp = SdpSettings { max_iter: 1, ..SdpSettings::default() };
    let c = run_curve(&cfg).unwrap();
    assert_eq!(c.points[0].unconverged, 10);
    assert_eq!(c.points[0].successes, 0);
}

#[test]
fn stability_linear_decays_and_null_is_flat() {
    let grid = [5, 10, 20, 40];
    let lin = stability_diagnostic(&ModelSpec::named(Link::Linear), &grid, 400_000, 1).unwrap();
    for w in lin.mean_decay.windows(2) {
        assert!(w[1] <= w[0], "{:?}", lin.mean_decay);
    }
    // m(Y) = Y/2 and Var(Y) = 2, so Var[m(Y)] = 1/2.
    assert!((lin.total_variance - 0.5).abs() < 0.01, "{}", lin.total_variance);
    let fit = fit_decay(&lin, 0).unwrap();
    assert!(fit.kappa < 0.0 && fit.kappa_upper95 >= fit.kappa);

    let null = ModelSpec::new(Link::custom("noise", |_u, e| e), 1.0).unwrap();
    let d = stability_diagnostic(&null, &grid, 400_000, 1).unwrap();
    for (m, se) in d.mean_decay.iter().zip(&d.mean_decay_se) {
        assert!(*m <= 3.0 * se + 1e-4, "{m} vs se {se}");
    }
}

#[test]
fn stability_is_deterministic() {
    let m = ModelSpec::named(Link::Cubic);
    assert_eq!(stability_diagnostic(&m, &[4, 8], 50_000, 9).unwrap(), stability_diagnostic(&m, &[4, 8], 50_000, 9).unwrap());
}
