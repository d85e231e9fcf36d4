//! Acceptance run: ten criteria at their stated tolerances, one line each.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use g2frames::branch::duality_basis;
use g2frames::bundle7::{
    build_chart_p, build_chart_x, geodesic_trace, lemma_check, length_of_radius, LemmaPair, Profile, RadialFn,
};
use g2frames::frames4::{predicates, FramePoint};
use g2frames::g2point::{classify, metric_from_phi, standard_phi, Signature, TorsionClass, DIM};
use g2frames::models::{expected_table, model, ModelName, ModelSpec};
use g2frames::runner::{self, suites::x_fiber_radius, RunConfig, RunOptions};
use g2frames::{Branch, GeomResult, Multivector};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> GeomResult<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn max(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn fiber_points(rng: &mut ChaCha8Rng, n: usize, p: &Profile) -> Vec<[f64; 3]> {
    let radius = x_fiber_radius(p);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = common::ball_point(rng, 3, radius);
        if p.values(v.iter().map(|c| c * c).sum()).is_ok() {
            out.push([v[0], v[1], v[2]]);
        }
    }
    out
}

fn frame_calculus() -> GeomResult<Outcome> {
    let start = Instant::now();
    let mut worst = [0.0f64; 4];
    for name in ModelName::ALL {
        let spec = model(name, 1.0)?;
        let per_point: Vec<GeomResult<[f64; 4]>> = spec
            .probe_points(50, 11)
            .par_iter()
            .map(|x| {
                let fp = FramePoint::new(&spec.metric, x, 2)?;
                let mut bianchi = 0.0f64;
                for b in Branch::BOTH {
                    bianchi = bianchi.max(fp.duality(b)?.bianchi_residual()?);
                }
                let st = fp.singer_thorpe()?;
                Ok([fp.cartan_residual()?, bianchi, st.asymmetry(), st.trace_defect()])
            })
            .collect();
        for r in per_point {
            let r = r?;
            for i in 0..4 {
                worst[i] = worst[i].max(r[i]);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst.iter().all(|&w| w < 1e-8) && elapsed < Duration::from_secs(10),
        format!(
            "cartan {:.1e}, bianchi {:.1e}, asymmetry {:.1e}, trace {:.1e}, {:.2}s",
            worst[0],
            worst[1],
            worst[2],
            worst[3],
            elapsed.as_secs_f64()
        ),
    )
}

fn flag_table() -> GeomResult<Outcome> {
    let mut mismatches = Vec::new();
    for (name, want) in expected_table() {
        let spec = model(name, 1.0)?;
        for x in spec.probe_points(50, 12) {
            let f = predicates(&FramePoint::new(&spec.metric, &x, 2)?.singer_thorpe()?, 1e-7);
            let sign_ok = match want.s_sign {
                0 => f.s.abs() < 1e-7,
                sg => f.s.signum() as i8 == sg,
            };
            let value_ok = want.s.is_none_or(|s| (f.s - s).abs() < 1e-7);
            if (f.einstein, f.sd, f.asd, f.scalar_flat) != (want.einstein, want.sd, want.asd, want.scalar_flat)
                || !sign_ok
                || !value_ok
            {
                mismatches.push(format!("{name} at {x:?}"));
                break;
            }
        }
    }
    // s of the unit sphere and the hyperbolic ball, from finite-difference curvature
    let mut oracle_gap = 0.0f64;
    for (name, s) in [(ModelName::Sphere4, 1.0), (ModelName::Hyperbolic4, -1.0)] {
        let spec = model(name, 1.0)?;
        let x = [0.1, -0.2, 0.15, 0.05];
        oracle_gap = oracle_gap.max((common::scalar_curvature(&spec.metric, &x, 1e-3) / 12.0 - s).abs());
    }
    outcome(
        mismatches.is_empty() && oracle_gap < 1e-4,
        if mismatches.is_empty() {
            format!("6 rows × 50 points, finite-difference s gap {oracle_gap:.1e}")
        } else {
            format!("mismatch: {}", mismatches.join("; "))
        },
    )
}

fn metric_recovery() -> GeomResult<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (mut gram, mut m_err, mut split) = (0.0f64, 0.0f64, 0usize);
    let trials = 50;
    for k in 0..trials {
        let (l, mu): (f64, f64) = (rng.random_range(0.3..3.0), rng.random_range(0.3..3.0));
        let b = if k % 2 == 0 { Branch::Plus } else { Branch::Minus };
        let st = standard_phi(l, mu, b)?;
        let rec = metric_from_phi(&st.phi, &st.orientation)?;
        for i in 0..DIM {
            for j in 0..DIM {
                let want = if i != j {
                    0.0
                } else if i < 3 {
                    l * l
                } else {
                    mu * mu
                };
                gram = gram.max((rec.gram[(i, j)] - want).abs());
            }
        }
        m_err = m_err.max((rec.m - l.powi(3) * mu.powi(4)).abs() / (l.powi(3) * mu.powi(4)));
        let e3 = duality_basis(DIM, [4, 5, 6, 7], b)[2].clone();
        let flip = Multivector::basis(DIM, &[3])
            .wedge(&e3)
            .scale(2.0 * b.sign() * l * mu * mu);
        if metric_from_phi(&st.phi.add(&flip), &st.orientation)?.signature == Signature::Split {
            split += 1;
        }
    }
    outcome(
        gram < 1e-10 && m_err < 1e-10 && split == trials,
        format!("gram {gram:.1e}, m relative {m_err:.1e}, split {split}/{trials}"),
    )
}

fn random_profile(rng: &mut ChaCha8Rng, k: usize, s: f64) -> Profile {
    match k % 5 {
        0 => Profile::Bs {
            s,
            c0: rng.random_range(0.6..1.5),
            c1: rng.random_range(0.5..2.0),
        },
        1 => Profile::Bs {
            s: rng.random_range(-1.0..1.0),
            c0: rng.random_range(0.6..1.5),
            c1: rng.random_range(1.0..3.0),
        },
        2 => Profile::Custom {
            lambda: RadialFn::Power {
                scale: rng.random_range(0.5..2.0),
                rate: rng.random_range(0.0..0.5),
                exponent: rng.random_range(-1.0..1.0),
            },
            mu: RadialFn::Power {
                scale: rng.random_range(0.5..2.0),
                rate: rng.random_range(0.0..0.5),
                exponent: rng.random_range(-1.0..1.0),
            },
        },
        3 => Profile::Custom {
            lambda: RadialFn::Polynomial {
                coefficients: vec![
                    rng.random_range(0.5..2.0),
                    rng.random_range(0.0..0.3),
                    rng.random_range(0.0..0.1),
                ],
            },
            mu: RadialFn::Polynomial {
                coefficients: vec![rng.random_range(0.5..2.0), rng.random_range(-0.05..0.3)],
            },
        },
        _ => Profile::Constant {
            lambda: rng.random_range(0.5..2.0),
            mu: rng.random_range(0.5..2.0),
        },
    }
}

fn x_torsion() -> GeomResult<Outcome> {
    let cases = [
        (ModelName::Sphere4, Branch::Minus),
        (ModelName::Hyperbolic4, Branch::Minus),
        (ModelName::FubiniStudy, Branch::Minus),
        (ModelName::ComplexHyperbolic, Branch::Minus),
        (ModelName::Flat, Branch::Plus),
        (ModelName::ProductS2H2, Branch::Plus),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut jobs = Vec::new();
    for (name, branch) in cases {
        let spec = model(name, 1.0)?;
        let s = spec.expected.s.unwrap_or(0.0);
        for k in 0..10 {
            let profile = random_profile(&mut rng, k, s);
            let base = spec.probe_points(20, 100 + k as u64);
            let fiber = fiber_points(&mut rng, 20, &profile);
            jobs.push((spec.clone(), branch, profile, base, fiber));
        }
    }
    let results: Vec<GeomResult<(f64, f64)>> = jobs
        .par_iter()
        .map(|(spec, branch, profile, base, fiber)| {
            let chart = build_chart_x(spec, *branch, profile.clone())?;
            let (mut diff, mut tau0) = (0.0f64, 0.0f64);
            for (x, a) in base.iter().zip(fiber) {
                let p = chart.point(*x, *a)?;
                let num = p.torsion_numeric(1e-8)?;
                let cl = p.torsion_closed(1e-7)?;
                diff = diff.max(cl.max_difference(&num));
                tau0 = tau0.max(num.tau0.abs()).max(cl.tau0.abs());
            }
            Ok((diff, tau0))
        })
        .collect();
    let (mut diff, mut tau0) = (0.0f64, 0.0f64);
    for r in results {
        let (d, t) = r?;
        diff = diff.max(d);
        tau0 = tau0.max(t);
    }
    outcome(
        diff < 1e-6 && tau0 < 1e-6,
        format!("6 models × 10 profiles × 20 points, closed-vs-numeric {diff:.1e}, |τ0| {tau0:.1e}"),
    )
}

fn bs_parallel() -> GeomResult<Outcome> {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for name in [
        ModelName::Sphere4,
        ModelName::FubiniStudy,
        ModelName::Hyperbolic4,
        ModelName::ComplexHyperbolic,
    ] {
        let spec: ModelSpec = model(name, 1.0)?;
        let s = spec.expected.s.expect("constant s");
        let profile = Profile::Bs { s, c0: 1.0, c1: 1.0 };
        let chart = build_chart_x(&spec, Branch::Minus, profile.clone())?;
        let fiber = fiber_points(&mut rng, 20, &profile);
        for (x, a) in spec.probe_points(20, 15).iter().zip(&fiber) {
            let t = chart.point(*x, *a)?.torsion_numeric(1e-8)?;
            worst = worst.max(max(t.norms()));
        }
    }
    outcome(worst < 1e-6, format!("max torsion norm {worst:.1e}"))
}

fn lemma() -> GeomResult<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let s = rng.random_range(0.2..2.0) * if k % 2 == 0 { 1.0 } else { -1.0 };
        let (c0, c1) = (rng.random_range(0.5..2.0), rng.random_range(0.2..2.0));
        let rep = lemma_check(s, c0, c1, 100, k)?;
        assert_eq!(rep.residuals.len(), LemmaPair::ALL.len());
        worst = worst.max(rep.max_residual());
    }
    outcome(
        worst < 1e-8,
        format!("20 triples × 3 pairs, third condition {worst:.1e}"),
    )
}

fn p_cocalibrated() -> GeomResult<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut jobs = Vec::new();
    for name in ModelName::ALL {
        let spec = model(name, 1.0)?;
        for b in Branch::BOTH {
            let (l, mu) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
            let u: Vec<[f64; 3]> = (0..20)
                .map(|_| {
                    let v = common::ball_point(&mut rng, 3, 2.5);
                    [v[0], v[1], v[2]]
                })
                .collect();
            jobs.push((spec.clone(), b, l, mu, u));
        }
    }
    let results: Vec<GeomResult<[f64; 3]>> = jobs
        .par_iter()
        .map(|(spec, b, l, mu, u)| {
            let chart = build_chart_p(spec, *b, *l, *mu)?;
            let (mut dpsi, mut dphi, mut tau0) = (0.0f64, f64::INFINITY, 0.0f64);
            for (x, u) in spec.probe_points(20, 17).iter().zip(u) {
                let p = chart.point(*x, *u)?;
                let st = p.structure()?;
                dpsi = dpsi.max(st.norm(&p.dpsi_numeric()?));
                dphi = dphi.min(st.norm(&p.dphi_numeric()?));
                // τ0 from the closed formula with s read off the catalog
                let s = spec.expected.s.expect("constant s");
                let want = b.sign() * 6.0 / (7.0 * l * mu * mu) * (mu * mu + 2.0 * s * l * l);
                tau0 = tau0.max((p.torsion_numeric(1e-8)?.tau0 - want).abs());
            }
            Ok([dpsi, dphi, tau0])
        })
        .collect();
    let (mut dpsi, mut dphi, mut tau0) = (0.0f64, f64::INFINITY, 0.0f64);
    for r in results {
        let r = r?;
        dpsi = dpsi.max(r[0]);
        dphi = dphi.min(r[1]);
        tau0 = tau0.max(r[2]);
    }
    outcome(
        dpsi < 1e-9 && dphi > 1e-3 && tau0 < 1e-8,
        format!("‖dψ‖ {dpsi:.1e}, min ‖dφ‖ {dphi:.2e}, τ0 {tau0:.1e}"),
    )
}

fn corollaries() -> GeomResult<Outcome> {
    let base = [0.12, -0.3, 0.2, 0.05];
    let us = [[0.3, -0.7, 1.1], [-1.4, 0.2, 0.5], [0.0, 0.0, 0.0], [2.0, 0.9, -0.6]];
    let (mut np, mut tau0, mut w3, mut pure) = (0.0f64, 0.0f64, 0.0f64, true);
    for l in [0.6, 1.0, 1.7] {
        let sphere = build_chart_p(&model(ModelName::Sphere4, 1.0)?, Branch::Minus, l, 5f64.sqrt() * l)?;
        let hyp = model(ModelName::Hyperbolic4, 1.0)?;
        for u in us {
            np = np.max(sphere.point(base, u)?.nearly_parallel_residual()?);
            for b in Branch::BOTH {
                let p = build_chart_p(&hyp, b, l, 2f64.sqrt() * l)?.point(base, u)?;
                let t = p.torsion_numeric(1e-8)?;
                tau0 = tau0.max(t.tau0.abs());
                pure &= classify(&t, 1e-6).pure() == Some(TorsionClass::W3);
                if b == Branch::Plus {
                    w3 = w3.max(p.w3_tuning_residual(1e-8)?);
                }
            }
        }
    }
    outcome(
        np < 1e-8 && tau0 < 1e-8 && pure && w3 < 1e-8,
        format!("nearly parallel {np:.1e}, tuned τ0 {tau0:.1e}, pure W3 {pure}, τ3 formula {w3:.1e}"),
    )
}

fn incompleteness() -> GeomResult<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let (mut gap, mut drift) = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let (s, c0, c1) = (
            -rng.random_range(0.3..2.0),
            rng.random_range(0.5..1.5),
            rng.random_range(0.3..2.0),
        );
        let p = Profile::Bs { s, c0, c1 };
        let (len, _) = length_of_radius(&p)?;
        gap = gap.max((len - common::radius_length_oracle(s, c0, c1, 2_000_000)).abs());
        let r0 = p.r0().expect("disk");
        let g0 = rng.random_range(-0.9..0.9) * (2.0 * r0).sqrt();
        let tr = geodesic_trace(r0, g0, 0.0, 10.0, 1000)?;
        drift = drift.max(max(tr.g.iter().map(|g| (g - g0).abs())));
    }
    // unit disk: ∫₀¹ (1 − t²)^{-1/4} dt = √π Γ(3/4) / (2Γ(5/4))
    let (unit, _) = length_of_radius(&Profile::Bs {
        s: -1.0,
        c0: 1.0,
        c1: 1.0,
    })?;
    let exact = 1.772_453_850_905_516 * 1.225_416_702_465_177_6 / (2.0 * 0.906_402_477_055_477_1);
    gap = gap.max((unit - exact).abs());
    outcome(
        gap < 1e-6 && drift == 0.0,
        format!("length vs oracle {gap:.1e}, equilibrium drift {drift:.1e}"),
    )
}

fn determinism() -> GeomResult<Outcome> {
    let configs = [
        r#"{"model": {"name": "sphere4"}, "space": "X", "branch": "-",
            "profile": {"kind": "bs", "s": 1, "c0": 1, "c1": 1}, "seed": 7}"#,
        r#"{"model": {"name": "hyperbolic4"}, "space": "P", "branch": "-",
            "profile": {"kind": "constant", "lambda": 1, "mu": 1.4142135623730951},
            "suites": ["identities-P", "cocalibration-P", "torsion-P-closed-vs-numeric", "corollaries-P"], "seed": 3}"#,
        r#"{"model": {"name": "complexHyperbolic"}, "space": "X", "branch": "-",
            "profile": {"kind": "bs", "s": -1, "c0": 1, "c1": 1}, "seed": 5}"#,
        r#"{"model": {"name": "productS2H2"}, "space": "M",
            "suites": ["frames4-invariants", "model-flags", "metric-from-phi", "lemma-two-of-three"]}"#,
    ];
    let mut identical = true;
    for text in configs {
        let cfg = RunConfig::from_json(text)?;
        let a = runner::run(&cfg, RunOptions::default())?.to_json();
        let b = runner::run(&cfg, RunOptions::default())?.to_json();
        let c = runner::run(&cfg, RunOptions { sequential: true })?.to_json();
        identical &= a == b && a == c;
    }
    outcome(
        identical,
        format!("{} configs, repeated and sequential runs byte-identical", configs.len()),
    )
}

type Criterion = (&'static str, fn() -> GeomResult<Outcome>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("frame calculus", frame_calculus),
        ("model flag table", flag_table),
        ("metric from phi", metric_recovery),
        ("torsion on the vector bundle", x_torsion),
        ("parallel radial profiles", bs_parallel),
        ("two conditions imply the third", lemma),
        ("cocalibrated principal bundle", p_cocalibrated),
        ("tuned principal bundle", corollaries),
        ("finite fiber radius", incompleteness),
        ("deterministic reports", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail) = match f() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<32} {}  {} [{:.2}s]",
            k + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            detail,
            t.elapsed().as_secs_f64()
        );
    }
    let total = start.elapsed();
    let in_time = total < Duration::from_secs(60);
    println!(
        "total wall-clock {:.2}s {}",
        total.as_secs_f64(),
        if in_time { "PASS" } else { "FAIL (limit 60s)" }
    );
    if failed > 0 || !in_time {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
