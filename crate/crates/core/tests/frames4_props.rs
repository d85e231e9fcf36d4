//! Frame calculus on the model charts against finite-difference curvature.

mod common;

use g2frames::frames4::{curvature, levi_civita, orthonormal_coframe, singer_thorpe, FramePoint, MetricField};
use g2frames::models::{get_model, model, ModelName};
use g2frames::{Branch, Jet};
use proptest::prelude::*;

fn any_model() -> impl Strategy<Value = ModelName> {
    prop::sample::select(ModelName::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn structure_equations_hold_at_random_points(name in any_model(), seed in any::<u64>()) {
        let spec = model(name, 1.0).unwrap();
        for x in spec.probe_points(3, seed) {
            let fp = FramePoint::new(&spec.metric, &x, 2).unwrap();
            prop_assert!(fp.cartan_residual().unwrap() < 1e-10);
            prop_assert!(fp.omega.values().skew_defect() < 1e-12);
            for b in Branch::BOTH {
                let dp = fp.duality(b).unwrap();
                prop_assert!(dp.bianchi_residual().unwrap() < 1e-10);
                prop_assert!(dp.structure_residual().unwrap() < 1e-10);
                prop_assert!(dp.curvature_residual().unwrap() < 1e-10);
            }
            let st = fp.singer_thorpe().unwrap();
            prop_assert!(st.asymmetry() < 1e-10);
            prop_assert!(st.trace_defect() < 1e-10);
        }
    }

    #[test]
    fn scalar_curvature_matches_finite_differences(name in any_model(), seed in any::<u64>()) {
        let spec = model(name, 1.0).unwrap();
        let x = spec.probe_points(1, seed)[0];
        let st = singer_thorpe(&orthonormal_coframe(&spec.metric), &x).unwrap();
        let fd = common::scalar_curvature(&spec.metric, &x, 1e-3);
        prop_assert!((st.scal - fd).abs() < 1e-4 * (1.0 + fd.abs()), "{name}: {} vs {fd}", st.scal);
    }

    #[test]
    fn conformally_flat_metrics_have_no_weyl_curvature(
        a in prop::collection::vec(-0.5f64..0.5, 4),
        q in -0.3f64..0.3,
        x in prop::collection::vec(-0.5f64..0.5, 4),
    ) {
        // e^{2u} δ with u = a·x + q|x|²
        let metric = MetricField::conformal(move |y: &[Jet]| {
            let mut u = Jet::constant(0.0);
            for i in 0..4 {
                u = &u + &(&y[i] * a[i]) + &(&y[i] * &y[i]) * q;
            }
            (u * 2.0).exp()
        });
        let st = singer_thorpe(&orthonormal_coframe(&metric), &x).unwrap();
        prop_assert!(st.w_plus.norm() < 1e-9, "{}", st.w_plus.norm());
        prop_assert!(st.w_minus.norm() < 1e-9, "{}", st.w_minus.norm());
        let fd = common::scalar_curvature(&metric, &[x[0], x[1], x[2], x[3]], 1e-3);
        prop_assert!((st.scal - fd).abs() < 1e-4 * (1.0 + fd.abs()));
    }

    #[test]
    fn normalized_scalar_curvature_is_constant_on_the_catalog(name in any_model(), seed in any::<u64>()) {
        let spec = model(name, 1.0).unwrap();
        prop_assume!(spec.expected.s_constant);
        let want = spec.expected.s.unwrap();
        for x in spec.probe_points(4, seed) {
            let st = FramePoint::new(&spec.metric, &x, 2).unwrap().singer_thorpe().unwrap();
            prop_assert!((st.s - want).abs() < 1e-9, "{name}: {} vs {want}", st.s);
        }
    }

    #[test]
    fn flags_agree_with_the_table(name in any_model(), seed in any::<u64>()) {
        let spec = model(name, 1.0).unwrap();
        let e = spec.expected;
        for x in spec.probe_points(4, seed) {
            let f = FramePoint::new(&spec.metric, &x, 2).unwrap().singer_thorpe().unwrap().flags(1e-7);
            prop_assert_eq!((f.einstein, f.sd, f.asd, f.scalar_flat), (e.einstein, e.sd, e.asd, e.scalar_flat));
        }
    }
}

#[test]
fn sphere_scaling() {
    for kappa in [0.5, 1.0, 2.0] {
        let spec = model(ModelName::Sphere4, kappa).unwrap();
        let x = [0.1 * kappa, -0.05 * kappa, 0.2 * kappa, 0.0];
        let st = singer_thorpe(&orthonormal_coframe(&spec.metric), &x).unwrap();
        assert!((st.s - 1.0 / (kappa * kappa)).abs() < 1e-7, "κ = {kappa}: s = {}", st.s);
        // independent finite-difference curvature
        let fd = common::scalar_curvature(&spec.metric, &x, 1e-3 * kappa) / 12.0;
        assert!(
            (fd - 1.0 / (kappa * kappa)).abs() < 1e-4 * (1.0 + fd.abs()),
            "κ = {kappa}: fd {fd}"
        );
    }
}

#[test]
fn constant_curvature_sectional_values() {
    let w = |name| levi_civita(&orthonormal_coframe(&model(name, 1.0).unwrap().metric));
    let x = [0.2, 0.1, -0.3, 0.15];
    for (name, k) in [
        (ModelName::Sphere4, 1.0),
        (ModelName::Hyperbolic4, -1.0),
        (ModelName::Flat, 0.0),
    ] {
        let r = curvature(&w(name));
        for (a, b) in [(0, 1), (0, 3), (1, 2), (2, 3)] {
            let v = r.sectional(&x, a, b).unwrap();
            assert!((v - k).abs() < 1e-10, "{name} ({a},{b}): {v}");
        }
    }
}

#[test]
fn product_has_opposite_curvatures_on_its_factors() {
    let spec = model(ModelName::ProductS2H2, 1.0).unwrap();
    let r = curvature(&levi_civita(&orthonormal_coframe(&spec.metric)));
    let x = [0.1, 0.2, -0.1, 0.3];
    let (k1, k2) = (r.sectional(&x, 0, 1).unwrap(), r.sectional(&x, 2, 3).unwrap());
    assert!((k1 + k2).abs() < 1e-10 && k1.abs() > 0.5, "{k1} {k2}");
    assert!(r.sectional(&x, 0, 2).unwrap().abs() < 1e-10);
}

#[test]
fn unknown_models_and_bad_scales_are_rejected() {
    assert!(get_model("torus", None).is_err());
    assert!(get_model("sphere4", Some(0.0)).is_err());
    assert!(get_model("sphere4", Some(-1.0)).is_err());
    assert!(get_model("fubiniStudy", None).is_ok());
}
