use super::*;
use crate::problem::{FeasibleSet, Objective};
use crate::steps::StepKind;

fn cfg() -> AlgoConfig {
    AlgoConfig::params1()
}

#[test]
fn rho_examples() {
    let f = [1.0, 0.5];
    let r = compute_rho(&f, &[0.5, 0.2], &f, &[0.5, 0.2], false, Acceptance::Standard).unwrap();
    assert!((r - 1.0).abs() < 1e-15);
    assert_eq!(compute_rho(&f, &f, &f, &f, true, Acceptance::Strict).unwrap(), 0.0);
    let r = compute_rho(&[1.0], &[0.5], &[1.0], &[0.75], false, Acceptance::Standard).unwrap();
    assert!((r - 2.0).abs() < 1e-15);
    let r = compute_rho(&[1.0, 1.0], &[0.5, 0.9], &[1.0, 1.0], &[0.5, 0.8], false, Acceptance::Strict).unwrap();
    assert!((r - 0.5).abs() < 1e-12);
    let err = compute_rho(&[1.0], &[0.5], &[1.0], &[1.0], false, Acceptance::Standard).unwrap_err();
    assert!(matches!(err, Error::DegenerateDenominator(_)));
}

#[test]
fn classification_examples() {
    let c = cfg();
    assert_eq!(classify_iteration(0.5, true, &c), Classification::Successful);
    assert_eq!(classify_iteration(0.5, false, &c), Classification::Successful);
    assert_eq!(classify_iteration(0.2, false, &c), Classification::ModelImproving);
    assert_eq!(classify_iteration(0.2, true, &c), Classification::Acceptable);
    assert_eq!(classify_iteration(0.05, true, &c), Classification::Inacceptable);
    assert_eq!(classify_iteration(f64::NEG_INFINITY, true, &c), Classification::Inacceptable);
}

#[test]
fn radius_updates() {
    let c = AlgoConfig::default();
    let s = TrustRegionState::new(vec![0.5, 0.5], 0.1, vec![1.0, 2.0]);
    let trial = [0.6, 0.5];
    let ft = [0.5, 1.0];
    let up = update_state(&s, Classification::Successful, 0.9, &trial, &ft, &c);
    assert!((up.delta - 0.2).abs() < 1e-15);
    assert_eq!(up.x, trial.to_vec());
    assert_eq!(up.phi_current, 1.0);
    let mut big = s.clone();
    big.delta = 0.4;
    assert_eq!(update_state(&big, Classification::Successful, 0.9, &trial, &ft, &c).delta, 0.5);
    let c1 = cfg();
    let down = update_state(&s, Classification::Inacceptable, 0.05, &trial, &ft, &c1);
    assert!((down.delta - 0.051).abs() < 1e-15);
    assert_eq!(down.x, s.x);
    let acc = update_state(&s, Classification::Acceptable, 0.2, &trial, &ft, &c1);
    assert!((acc.delta - 0.075).abs() < 1e-15);
    assert_eq!(acc.x, trial.to_vec());
    let mi = update_state(&s, Classification::ModelImproving, 0.2, &trial, &ft, &c1);
    assert_eq!(mi.delta, 0.1);
    assert_eq!(mi.x, s.x);
    assert!(mi.last_was_model_improving);
}

#[test]
fn stopping_examples() {
    let c = AlgoConfig::default();
    let base = StopCheck {
        t: 0,
        expensive_evals: 0,
        delta: 0.1,
        last_step_norm: None,
        criticality_cap: false,
    };
    assert_eq!(check_stopping(&base, 100, &c), None);
    assert_eq!(check_stopping(&StopCheck { delta: 1e-7, ..base }, 100, &c), Some(StopReason::RadiusMin));
    let small = StopCheck {
        delta: 5e-4,
        last_step_norm: Some(1e-9),
        ..base
    };
    assert_eq!(check_stopping(&small, 100, &c), Some(StopReason::RadiusCritSmallStep));
    let all = StopCheck {
        t: 100,
        expensive_evals: 100,
        delta: 1e-9,
        last_step_norm: Some(0.0),
        criticality_cap: true,
    };
    assert_eq!(check_stopping(&all, 100, &c), Some(StopReason::MaxIterations));
    assert_eq!(check_stopping(&StopCheck { t: 3, ..all }, 100, &c), Some(StopReason::BudgetExhausted));
    assert_eq!(
        check_stopping(&StopCheck { criticality_cap: true, ..base }, 100, &c),
        Some(StopReason::CriticalityLoopCap)
    );
}

#[test]
fn criticality_exit_radius_arithmetic() {
    // With ω̃ = 0.01 the first certification passes (0.1 ≤ 2000·0.01) and
    // the radius is restored to min(max(0.1, 1000·0.01), 0.1).
    let c = cfg();
    let omega = 0.01_f64;
    let delta = 0.1_f64;
    assert!(delta <= c.mu * omega);
    assert_eq!(delta.max(c.beta_c * omega).min(delta), 0.1);
}

fn convex_pair(cheap: bool) -> MOProblem {
    let mk = |name: &'static str, a: [f64; 2]| {
        let f = move |x: &[f64]| (x[0] - a[0]).powi(2) + (x[1] - a[1]).powi(2);
        if cheap {
            Objective::cheap(name, f).with_gradient(move |x: &[f64]| vec![2.0 * (x[0] - a[0]), 2.0 * (x[1] - a[1])])
        } else {
            Objective::expensive(name, f)
        }
    };
    MOProblem::new(FeasibleSet::unconstrained(2), vec![mk("a", [0.0, 0.0]), mk("b", [1.0, 0.5])]).unwrap()
}

fn segment_distance(x: &[f64]) -> f64 {
    let t = ((x[0] * 1.0 + x[1] * 0.5) / 1.25).clamp(0.0, 1.0);
    (x[0] - t).abs().max((x[1] - 0.5 * t).abs())
}

#[test]
fn cheap_convex_problem_converges_to_pareto_segment() {
    let prob = convex_pair(true);
    let mut c = AlgoConfig::default();
    c.diagnostics = Diagnostics {
        validate: true,
        true_omega_each_iteration: false,
        true_omega_final: true,
    };
    let report = run(&prob, &c, &[2.0, -1.5], 1).unwrap();
    assert_eq!(report.total_expensive_evals, 0);
    assert!(report.violations.is_empty(), "{:?}", report.violations);
    assert!(report.final_omega_true.unwrap() <= 1e-3, "{report:?}");
    assert!(segment_distance(&report.final_x) <= 1e-2, "{:?}", report.final_x);
    assert!(report.final_delta <= c.stopping.delta_crit);
}

#[test]
fn expensive_convex_problem_with_each_step_kind() {
    let prob = convex_pair(false);
    for kind in [
        StepKind::ModifiedParetoCauchy,
        StepKind::StrictParetoCauchy,
        StepKind::ExactParetoCauchy,
        StepKind::PascolettiSerafini,
    ] {
        let mut c = AlgoConfig::default();
        c.step = StepConfig::with_kind(kind);
        c.diagnostics.validate = true;
        c.diagnostics.true_omega_final = true;
        c.stopping.max_expensive = Some(300);
        let report = run(&prob, &c, &[2.0, -1.5], 2).unwrap();
        assert!(report.violations.is_empty(), "{kind:?}: {:?}", report.violations);
        assert!(report.final_omega_true.unwrap() <= 0.05, "{kind:?}: {report:?}");
        assert!(!report.stop_reason.is_error(), "{kind:?}: {:?}", report.stop_reason);
    }
}

#[test]
fn zero_budget_stops_immediately() {
    let prob = convex_pair(false);
    let mut c = AlgoConfig::default();
    c.stopping.max_expensive = Some(0);
    let report = run(&prob, &c, &[0.3, 0.3], 0).unwrap();
    assert_eq!(report.stop_reason, StopReason::BudgetExhausted);
    assert!(report.iterations.is_empty());
    assert_eq!(report.total_expensive_evals, 0);
}

#[test]
fn report_round_trips_and_is_deterministic() {
    let prob = convex_pair(false);
    let mut c = AlgoConfig::default();
    c.stopping.max_expensive = Some(40);
    let a = run(&prob, &c, &[1.5, 1.5], 9).unwrap();
    let b = run(&prob, &c, &[1.5, 1.5], 9).unwrap();
    let ja = a.to_json().unwrap();
    assert_eq!(ja, b.to_json().unwrap());
    assert_eq!(RunReport::from_json(&ja).unwrap(), a);
    let mut csv = Vec::new();
    a.write_iterations_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("t,class,rho,omega_m,delta,evals,step_norm\n"));
    assert_eq!(text.lines().count(), a.iterations.len() + 1);
}

#[test]
fn config_json_fills_defaults() {
    let c: AlgoConfig = serde_json::from_str(r#"{"nu_p": 0.1, "stopping": {"max_crit_loops": 2}}"#).unwrap();
    assert_eq!(c.nu_p, 0.1);
    assert_eq!(c.stopping.max_crit_loops, 2);
    assert_eq!(c.mu, 2e3);
    assert_eq!(c.stopping.delta_min, 1e-6);
    assert!(c.validate().is_ok());
    let bad = AlgoConfig {
        mu: 1.0,
        ..AlgoConfig::default()
    };
    assert!(bad.validate().is_err());
}
