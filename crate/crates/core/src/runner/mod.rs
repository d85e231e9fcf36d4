//! Configuration-driven verification runs with deterministic JSON reports.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{ModelConfig, RunConfig, Space, Tolerances};
pub use report::{Comparator, Conventions, Environment, ProbeDomain, Record, Report};
pub use suites::{list_suites, SuiteId, SuiteInfo};

use crate::branch::Branch;
use crate::error::GeomResult;
use crate::frames4::{orthonormal_coframe, singer_thorpe};
use crate::g2point::{standard_phi, Classification};
use crate::models::{model, ModelName};

use suites::Context;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub sequential: bool,
}

/// Conventions realized by this build, with the sphere anchor measured now.
pub fn conventions(orientation_flipped: bool) -> GeomResult<Conventions> {
    let sphere = model(ModelName::Sphere4, 1.0)?;
    let st = singer_thorpe(&orthonormal_coframe(&sphere.metric), &[0.0; 4])?;
    let w14 = [
        standard_phi(1.0, 1.0, Branch::Plus)?.w14_eigenvalue(),
        standard_phi(1.0, 1.0, Branch::Minus)?.w14_eigenvalue(),
    ];
    Ok(Conventions {
        structure_equations: "dθ + θ∧ω = 0, ρ = dω + ω∧ω".into(),
        curvature_pairing: "(α, e) = <α, e>/2".into(),
        singer_thorpe_blocks: "A = −(ρ⁺, e⁺), B = −(ρ⁺, e⁻), B* = (ρ⁻, e⁺), C = (ρ⁻, e⁻)".into(),
        induced_connection: "ω¹ = ω₃₂ + sω₁₀, ω² = ω₁₃ − sω₀₂, ω³ = ω₂₁ − sω₀₃ (0-based, s = branch sign)".into(),
        sphere_anchor_s: st.s,
        sphere_anchor_trace_a: st.a.trace(),
        orientation_flipped,
        w14_eigenvalue: w14,
        torsion_equations: "dφ = τ0ψ + ¾τ1∧φ + *τ3, dψ = τ1∧ψ + τ2∧φ".into(),
    })
}

/// Runs every selected suite and assembles the report.
pub fn run(cfg: &RunConfig, opts: RunOptions) -> GeomResult<Report> {
    cfg.validate()?;
    let spec = model(cfg.model.name, cfg.model.kappa)?;
    let ctx = Context {
        cfg,
        spec,
        parallel: !opts.sequential,
    };
    let mut records = Vec::new();
    let mut norms: Option<[f64; 4]> = None;
    for suite in cfg.suites() {
        let out = ctx.run(suite);
        records.extend(out.records);
        if let Some(n) = out.norms {
            let acc = norms.get_or_insert([0.0; 4]);
            for i in 0..4 {
                acc[i] = acc[i].max(n[i]);
            }
        }
    }
    let torsion_class = norms.map(|n| Classification::from_norms(n, cfg.tolerances.torsion).label());
    let pass = !records.is_empty() && records.iter().all(|r| r.pass);
    Ok(Report {
        tool: "g2frames".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        environment: Environment {
            seed: cfg.seed,
            probes: cfg.probes,
            probe_domain: ProbeDomain {
                base: ctx.spec.safe_box,
                fiber_radius: ctx.fiber_radius(),
            },
            conventions: conventions(ctx.spec.orientation_flipped)?,
        },
        records,
        torsion_class,
        pass,
    })
}
