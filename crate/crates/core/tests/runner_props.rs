//! Runner configuration and report determinism.

use g2frames::bundle7::Profile;
use g2frames::models::ModelName;
use g2frames::runner::{self, list_suites, ModelConfig, RunConfig, RunOptions, Space, SuiteId, Tolerances};
use g2frames::Branch;
use proptest::prelude::*;

fn config() -> impl Strategy<Value = RunConfig> {
    let profile = prop_oneof![
        (0.2f64..2.0, 0.5f64..2.0, 0.5f64..2.0).prop_map(|(s, c0, c1)| Profile::Bs { s, c0, c1 }),
        (0.5f64..2.0, 0.5f64..2.0).prop_map(|(lambda, mu)| Profile::Constant { lambda, mu }),
    ];
    (
        prop::sample::select(ModelName::ALL.to_vec()),
        0.5f64..2.0,
        prop::sample::select(vec![Space::M, Space::X, Space::P]),
        prop::sample::select(Branch::BOTH.to_vec()),
        profile,
        1usize..40,
        any::<u64>(),
        1e-12f64..1e-3,
    )
        .prop_map(|(name, kappa, space, branch, profile, probes, seed, tol)| {
            let profile = match (space, profile) {
                (Space::P, Profile::Bs { c0, c1, .. }) => Profile::Constant { lambda: c0, mu: c1 },
                (_, p) => p,
            };
            RunConfig {
                model: ModelConfig { name, kappa },
                space,
                branch: (space != Space::M).then_some(branch),
                profile: (space != Space::M).then_some(profile),
                probes,
                seed,
                tolerances: Tolerances::default().uniform(tol),
                suites: None,
                report: None,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn configs_round_trip_through_json(cfg in config()) {
        let text = cfg.to_json();
        let back = RunConfig::from_json(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_json(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn reports_do_not_depend_on_scheduling(cfg in config(), probes in 2usize..8) {
        let cfg = RunConfig { probes, ..cfg };
        prop_assume!(cfg.validate().is_ok());
        let par = runner::run(&cfg, RunOptions::default()).unwrap().to_json();
        let again = runner::run(&cfg, RunOptions::default()).unwrap().to_json();
        let seq = runner::run(&cfg, RunOptions { sequential: true }).unwrap().to_json();
        prop_assert_eq!(&par, &again);
        prop_assert_eq!(&par, &seq);
    }
}

fn parse(text: &str) -> RunConfig {
    RunConfig::from_json(text).unwrap()
}

#[test]
fn sphere_bs_report_is_parallel() {
    let cfg = parse(
        r#"{"model": {"name": "sphere4"}, "space": "X", "branch": "-",
            "profile": {"kind": "bs", "s": 1, "c0": 1, "c1": 1}}"#,
    );
    let rep = runner::run(&cfg, RunOptions::default()).unwrap();
    assert!(rep.pass, "{:?}", rep.failures().collect::<Vec<_>>());
    assert_eq!(rep.torsion_class.as_deref(), Some("parallel"));
    assert!((rep.environment.conventions.sphere_anchor_s - 1.0).abs() < 1e-9);
}

#[test]
fn hyperbolic_p_tuning_report_is_pure_w3() {
    let cfg = parse(
        r#"{"model": {"name": "hyperbolic4"}, "space": "P", "branch": "-",
            "profile": {"kind": "constant", "lambda": 1, "mu": 1.4142135623730951}}"#,
    );
    let rep = runner::run(&cfg, RunOptions::default()).unwrap();
    assert!(rep.pass);
    let label = rep.torsion_class.unwrap();
    assert!(label.starts_with("pure W3"), "{label}");
    let tau_record = rep
        .records
        .iter()
        .find(|r| r.check_id.contains("closed-vs-numeric"))
        .unwrap();
    assert!(tau_record.max_residual < 1e-8);
}

#[test]
fn flat_constant_report_is_parallel() {
    let cfg = parse(
        r#"{"model": {"name": "flat"}, "space": "X", "branch": "+",
            "profile": {"kind": "constant", "lambda": 1, "mu": 1}}"#,
    );
    let rep = runner::run(&cfg, RunOptions::default()).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.torsion_class.as_deref(), Some("parallel"));
}

#[test]
fn tight_tolerances_fail_without_erroring() {
    let mut cfg = parse(r#"{"model": {"name": "fubiniStudy"}, "space": "M"}"#);
    cfg.tolerances = Tolerances::default().uniform(1e-30);
    let rep = runner::run(&cfg, RunOptions::default()).unwrap();
    assert!(!rep.pass);
    assert!(rep.failures().count() > 0);
}

#[test]
fn every_suite_is_listed_once() {
    let listed = list_suites();
    assert_eq!(listed.len(), SuiteId::ALL.len());
    let ids: Vec<&str> = listed.iter().map(|s| s.id.as_str()).collect();
    for want in [
        "cocalibration-P",
        "torsion-X-closed-vs-numeric",
        "radial-incompleteness",
        "corollaries-P",
    ] {
        assert!(ids.contains(&want), "{want} missing from {ids:?}");
    }
    assert!(listed.iter().all(|s| !s.anchor.is_empty()));
}

#[test]
fn records_carry_anchors_and_pass_is_a_conjunction() {
    let cfg = parse(
        r#"{"model": {"name": "productS2H2"}, "space": "M",
            "suites": ["frames4-invariants", "model-flags", "metric-from-phi", "lemma-two-of-three"], "probes": 5}"#,
    );
    let rep = runner::run(&cfg, RunOptions::default()).unwrap();
    assert!(rep.records.iter().all(|r| !r.anchor.is_empty()));
    assert_eq!(rep.pass, rep.records.iter().all(|r| r.pass));
    assert!(rep.pass);
}
