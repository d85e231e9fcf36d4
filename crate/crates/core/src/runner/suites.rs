//! Suite registry and per-suite evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branch::{duality_basis, Branch};
use crate::bundle7::{
    build_chart_p, build_chart_x, geodesic_trace, lemma_check, length_midpoint, length_of_radius, so3, LemmaPair,
    Profile,
};
use crate::error::{GeomError, GeomResult};
use crate::exterior::Multivector;
use crate::frames4::FramePoint;
use crate::g2point::{classify, metric_from_phi, standard_phi, Signature, TorsionClass, DIM};
use crate::models::{ModelName, ModelSpec};

use super::config::{RunConfig, Space, Tolerances};
use super::report::{Comparator, Record};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SuiteId {
    #[serde(rename = "frames4-invariants")]
    Frames4Invariants,
    #[serde(rename = "model-flags")]
    ModelFlags,
    #[serde(rename = "metric-from-phi")]
    MetricFromPhi,
    #[serde(rename = "structure-X")]
    StructureX,
    #[serde(rename = "torsion-X-closed-vs-numeric")]
    TorsionX,
    #[serde(rename = "bryant-salamon-parallel")]
    BryantSalamonParallel,
    #[serde(rename = "lemma-two-of-three")]
    LemmaTwoOfThree,
    #[serde(rename = "radial-incompleteness")]
    RadialIncompleteness,
    #[serde(rename = "identities-P")]
    IdentitiesP,
    #[serde(rename = "cocalibration-P")]
    CocalibrationP,
    #[serde(rename = "torsion-P-closed-vs-numeric")]
    TorsionP,
    #[serde(rename = "corollaries-P")]
    CorollariesP,
}

/// What a suite needs from the configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Requirement {
    Base,
    Chart(Space),
    Bs,
    Disk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteInfo {
    pub id: SuiteId,
    pub anchor: &'static str,
    pub description: &'static str,
}

impl SuiteId {
    pub const ALL: [SuiteId; 12] = [
        SuiteId::Frames4Invariants,
        SuiteId::ModelFlags,
        SuiteId::MetricFromPhi,
        SuiteId::StructureX,
        SuiteId::TorsionX,
        SuiteId::BryantSalamonParallel,
        SuiteId::LemmaTwoOfThree,
        SuiteId::RadialIncompleteness,
        SuiteId::IdentitiesP,
        SuiteId::CocalibrationP,
        SuiteId::TorsionP,
        SuiteId::CorollariesP,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteId::Frames4Invariants => "frames4-invariants",
            SuiteId::ModelFlags => "model-flags",
            SuiteId::MetricFromPhi => "metric-from-phi",
            SuiteId::StructureX => "structure-X",
            SuiteId::TorsionX => "torsion-X-closed-vs-numeric",
            SuiteId::BryantSalamonParallel => "bryant-salamon-parallel",
            SuiteId::LemmaTwoOfThree => "lemma-two-of-three",
            SuiteId::RadialIncompleteness => "radial-incompleteness",
            SuiteId::IdentitiesP => "identities-P",
            SuiteId::CocalibrationP => "cocalibration-P",
            SuiteId::TorsionP => "torsion-P-closed-vs-numeric",
            SuiteId::CorollariesP => "corollaries-P",
        }
    }

    pub fn requirement(self) -> Requirement {
        match self {
            SuiteId::Frames4Invariants | SuiteId::ModelFlags | SuiteId::MetricFromPhi | SuiteId::LemmaTwoOfThree => {
                Requirement::Base
            }
            SuiteId::StructureX | SuiteId::TorsionX => Requirement::Chart(Space::X),
            SuiteId::BryantSalamonParallel => Requirement::Bs,
            SuiteId::RadialIncompleteness => Requirement::Disk,
            SuiteId::IdentitiesP | SuiteId::CocalibrationP | SuiteId::TorsionP | SuiteId::CorollariesP => {
                Requirement::Chart(Space::P)
            }
        }
    }

    pub fn anchor(self) -> &'static str {
        match self {
            SuiteId::Frames4Invariants => "structure equations, Bianchi identity and curvature blocks on the base",
            SuiteId::ModelFlags => "Einstein, self-duality and scalar curvature of the catalog models",
            SuiteId::MetricFromPhi => "metric λ²g_V + μ²g_H induced by φ",
            SuiteId::StructureX => "closed structure system for dφ, dψ on Λ²±T*M",
            SuiteId::TorsionX => "torsion forms τ0..τ3 of the radial structure on Λ²±T*M",
            SuiteId::BryantSalamonParallel => "radial profile with constant λμ giving holonomy G2",
            SuiteId::LemmaTwoOfThree => "any two of {λμ constant, τ1 = 0, τ2 = 0} imply the third",
            SuiteId::RadialIncompleteness => "finite length ∫ dt/⁴√(2r0 − t²) of a fiber radius",
            SuiteId::IdentitiesP => "algebraic and differential identities of the canonical forms on P±",
            SuiteId::CocalibrationP => "P± with constant λ, μ is cocalibrated and never calibrated",
            SuiteId::TorsionP => "closed τ0 and τ3 on P±",
            SuiteId::CorollariesP => "nearly parallel and pure W3 tunings of (λ, μ) on P±",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            SuiteId::Frames4Invariants => {
                "Cartan, Bianchi, induced-connection residuals and A/C symmetry at probe points"
            }
            SuiteId::ModelFlags => "curvature predicates and s against the expected table",
            SuiteId::MetricFromPhi => {
                "recovered Gram matrix and volume normalizer for random (λ, μ); split signature after a sign flip"
            }
            SuiteId::StructureX => "tautological identities and jet dφ, dψ against the closed system",
            SuiteId::TorsionX => "closed-form torsion against the numeric decomposition; τ0 = 0",
            SuiteId::BryantSalamonParallel => "all torsion norms vanish for the bs profile",
            SuiteId::LemmaTwoOfThree => "random (s, c0, c1), each pair imposed, third checked on 100 samples",
            SuiteId::RadialIncompleteness => "adaptive Simpson length against a midpoint oracle; geodesic equilibrium",
            SuiteId::IdentitiesP => "canonical-form identities at probe points",
            SuiteId::CocalibrationP => "‖dψ‖ small, ‖dφ‖ bounded below, 7τ0·Vol = dφ∧φ, closed τ0",
            SuiteId::TorsionP => "closed torsion against the numeric decomposition; τ3 in W3",
            SuiteId::CorollariesP => "sphere4 on P− with μ² = 5sλ²; μ² = −2sλ² on negative s models",
        }
    }

    pub fn info(self) -> SuiteInfo {
        SuiteInfo {
            id: self,
            anchor: self.anchor(),
            description: self.description(),
        }
    }
}

pub fn list_suites() -> Vec<SuiteInfo> {
    SuiteId::ALL.iter().map(|s| s.info()).collect()
}

/// One aggregated quantity at one probe.
#[derive(Clone, Debug)]
struct Metric {
    id: String,
    value: f64,
    tol: f64,
    cmp: Comparator,
}

fn below(id: impl Into<String>, value: f64, tol: f64) -> Metric {
    Metric {
        id: id.into(),
        value,
        tol,
        cmp: Comparator::Below,
    }
}

fn above(id: impl Into<String>, value: f64, tol: f64) -> Metric {
    Metric {
        id: id.into(),
        value,
        tol,
        cmp: Comparator::Above,
    }
}

fn worse(cmp: Comparator, acc: f64, v: f64) -> f64 {
    if v.is_nan() || acc.is_nan() {
        return f64::NAN;
    }
    match cmp {
        Comparator::Below => acc.max(v),
        Comparator::Above => acc.min(v),
    }
}

/// Per-probe output: metrics plus optional torsion norms.
type Probe = GeomResult<(Vec<Metric>, Option<[f64; 4]>)>;

pub(crate) struct SuiteOutput {
    pub records: Vec<Record>,
    pub norms: Option<[f64; 4]>,
}

fn aggregate(suite: SuiteId, results: Vec<Probe>) -> SuiteOutput {
    let mut order: Vec<(String, Comparator, f64, f64)> = Vec::new();
    let mut first_error: Option<(usize, GeomError)> = None;
    let mut norms: Option<[f64; 4]> = None;
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok((metrics, n)) => {
                for m in metrics {
                    match order.iter_mut().find(|(id, ..)| *id == m.id) {
                        Some(e) => e.2 = worse(m.cmp, e.2, m.value),
                        None => order.push((m.id, m.cmp, m.value, m.tol)),
                    }
                }
                if let Some(n) = n {
                    let acc = norms.get_or_insert([0.0; 4]);
                    for i in 0..4 {
                        acc[i] = worse(Comparator::Below, acc[i], n[i]);
                    }
                }
            }
            Err(e) => {
                if first_error.is_none() {
                    first_error = Some((k, e));
                }
            }
        }
    }
    let anchor = suite.anchor();
    let mut records: Vec<Record> = order
        .into_iter()
        .map(|(id, cmp, v, tol)| {
            let id = format!("{}/{}", suite.as_str(), id);
            match cmp {
                Comparator::Below => Record::below(id, anchor, v, tol),
                Comparator::Above => Record::above(id, anchor, v, tol),
            }
        })
        .collect();
    if let Some((k, e)) = first_error {
        records.push(Record::failed(
            format!("{}/evaluation", suite.as_str()),
            anchor,
            0.0,
            format!("probe {k}: {e}"),
        ));
    }
    SuiteOutput { records, norms }
}

/// Evaluates `f` at `0..n`, in parallel when asked; results keep index order.
fn map_probes<F>(n: usize, parallel: bool, f: F) -> Vec<Probe>
where
    F: Fn(usize) -> Probe + Sync + Send,
{
    if parallel {
        (0..n).into_par_iter().map(&f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

pub(crate) struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub spec: ModelSpec,
    pub parallel: bool,
}

const P_FIBER_RADIUS: f64 = 2.5;
const FIBER_STREAM: u64 = 0x5eed_f1be;
const PARAM_STREAM: u64 = 0x9a4a_3e7e;

/// Radius of the ball from which fiber coordinates on X are drawn.
pub fn x_fiber_radius(p: &Profile) -> f64 {
    let cap = crate::bundle7::xchart::FIBER_BOUND;
    match p.r0() {
        Some(r0) => cap.min(0.95 * r0.sqrt()),
        None => cap,
    }
}

fn ball_points(n: usize, radius: f64, seed: u64, accept: impl Fn(&[f64; 3]) -> bool) -> GeomResult<Vec<[f64; 3]>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n {
        tries += 1;
        if tries > 1000 * n + 1000 {
            return Err(GeomError::InvalidParameter {
                name: "profile".into(),
                reason: "could not sample fiber points inside the profile domain".into(),
            });
        }
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-radius..radius));
        if v.iter().map(|c| c * c).sum::<f64>() < radius * radius && accept(&v) {
            out.push(v);
        }
    }
    Ok(out)
}

impl Context<'_> {
    fn tol(&self) -> Tolerances {
        self.cfg.tolerances
    }

    fn branch(&self) -> Branch {
        self.cfg.branch.unwrap_or(Branch::Minus)
    }

    fn base_points(&self) -> Vec<[f64; 4]> {
        self.spec.probe_points(self.cfg.probes, self.cfg.seed)
    }

    fn x_points(&self, p: &Profile) -> GeomResult<Vec<([f64; 4], [f64; 3])>> {
        let a = ball_points(self.cfg.probes, x_fiber_radius(p), self.cfg.seed ^ FIBER_STREAM, |v| {
            p.values(v.iter().map(|c| c * c).sum()).is_ok()
        })?;
        Ok(self.base_points().into_iter().zip(a).collect())
    }

    fn p_points(&self) -> GeomResult<Vec<([f64; 4], [f64; 3])>> {
        let u = ball_points(self.cfg.probes, P_FIBER_RADIUS, self.cfg.seed ^ FIBER_STREAM, |v| {
            so3::check_chart(v).is_ok()
        })?;
        Ok(self.base_points().into_iter().zip(u).collect())
    }

    fn constant_profile(&self) -> (f64, f64) {
        match self.cfg.profile {
            Some(Profile::Constant { lambda, mu }) => (lambda, mu),
            _ => (1.0, 1.0),
        }
    }

    pub fn fiber_radius(&self) -> Option<f64> {
        match (self.cfg.space, &self.cfg.profile) {
            (Space::X, Some(p)) => Some(x_fiber_radius(p)),
            (Space::P, _) => Some(P_FIBER_RADIUS),
            _ => None,
        }
    }

    pub fn run(&self, suite: SuiteId) -> SuiteOutput {
        let results = match self.probes(suite) {
            Ok(r) => r,
            Err(e) => vec![Err(e)],
        };
        aggregate(suite, results)
    }

    fn probes(&self, suite: SuiteId) -> GeomResult<Vec<Probe>> {
        let t = self.tol();
        let par = self.parallel;
        let n = self.cfg.probes;
        let spec = &self.spec;
        Ok(match suite {
            SuiteId::Frames4Invariants => {
                let pts = self.base_points();
                map_probes(n, par, |k| {
                    let fp = FramePoint::new(&spec.metric, &pts[k], 2)?;
                    let mut m = vec![below("cartan", fp.cartan_residual()?, t.residual)];
                    let (mut st_res, mut bi, mut cu) = (0.0f64, 0.0f64, 0.0f64);
                    for b in Branch::BOTH {
                        let dp = fp.duality(b)?;
                        st_res = st_res.max(dp.structure_residual()?);
                        bi = bi.max(dp.bianchi_residual()?);
                        cu = cu.max(dp.curvature_residual()?);
                    }
                    let st = fp.singer_thorpe()?;
                    m.push(below("bianchi", bi, t.residual));
                    m.push(below("induced-structure", st_res, t.residual));
                    m.push(below("induced-curvature", cu, t.residual));
                    m.push(below("singer-thorpe-asymmetry", st.asymmetry(), t.residual));
                    m.push(below("singer-thorpe-trace", st.trace_defect(), t.residual));
                    Ok((m, None))
                })
            }
            SuiteId::ModelFlags => {
                let pts = self.base_points();
                let e = spec.expected;
                map_probes(n, par, |k| {
                    let st = FramePoint::new(&spec.metric, &pts[k], 2)?.singer_thorpe()?;
                    let f = st.flags(t.flags);
                    let sign_ok = match e.s_sign {
                        0 => f.s.abs() < t.flags,
                        sgn => f.s.signum() as i8 == sgn,
                    };
                    let ok =
                        (f.einstein, f.sd, f.asd, f.scalar_flat) == (e.einstein, e.sd, e.asd, e.scalar_flat) && sign_ok;
                    let mut m = vec![below("flag-mismatches", if ok { 0.0 } else { 1.0 }, 0.5)];
                    if let Some(s) = e.s {
                        m.push(below("s-value", (f.s - s).abs(), t.flags));
                    }
                    Ok((m, None))
                })
            }
            SuiteId::MetricFromPhi => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed ^ PARAM_STREAM);
                let params: Vec<(f64, f64, Branch)> = (0..n)
                    .map(|_| {
                        let b = if rng.random_bool(0.5) {
                            Branch::Plus
                        } else {
                            Branch::Minus
                        };
                        (rng.random_range(0.3..3.0), rng.random_range(0.3..3.0), b)
                    })
                    .collect();
                map_probes(n, par, |k| {
                    let (l, mu, b) = params[k];
                    let st = standard_phi(l, mu, b)?;
                    let rec = metric_from_phi(&st.phi, &st.orientation)?;
                    let mut gram = 0.0f64;
                    for i in 0..DIM {
                        for j in 0..DIM {
                            let want = match (i == j, i < 3) {
                                (false, _) => 0.0,
                                (true, true) => l * l,
                                (true, false) => mu * mu,
                            };
                            gram = gram.max((rec.gram[(i, j)] - want).abs());
                        }
                    }
                    let m_rel = (rec.m - l.powi(3) * mu.powi(4)).abs() / (l.powi(3) * mu.powi(4));
                    // e³ ↦ −e³ in the pairing term only
                    let e3 = duality_basis(DIM, [4, 5, 6, 7], b)[2].clone();
                    let f3e3 = Multivector::basis(DIM, &[3]).wedge(&e3);
                    let flipped_phi = st.phi.add(&f3e3.scale(2.0 * b.sign() * l * mu * mu));
                    let flipped = metric_from_phi(&flipped_phi, &st.orientation)?;
                    Ok((
                        vec![
                            below("gram", gram, t.metric),
                            below("volume-normalizer-relative", m_rel, t.metric),
                            below(
                                "flipped-not-split",
                                if flipped.signature == Signature::Split {
                                    0.0
                                } else {
                                    1.0
                                },
                                0.5,
                            ),
                        ],
                        None,
                    ))
                })
            }
            SuiteId::StructureX => {
                let profile = self.cfg.profile.clone().expect("validated");
                let chart = build_chart_x(spec, self.branch(), profile.clone())?;
                let pts = self.x_points(&profile)?;
                map_probes(n, par, |k| {
                    let p = chart.point(pts[k].0, pts[k].1)?;
                    let mut m: Vec<Metric> = p
                        .identity_residuals()?
                        .into_iter()
                        .map(|(name, v)| below(format!("identity {name}"), v, t.residual))
                        .collect();
                    let (dphi, dpsi) = p.structure_system()?;
                    m.push(below(
                        "dphi-closed-vs-jet",
                        dphi.sub(&p.dphi_numeric()?).max_abs(),
                        t.residual,
                    ));
                    m.push(below(
                        "dpsi-closed-vs-jet",
                        dpsi.sub(&p.dpsi_numeric()?).max_abs(),
                        t.residual,
                    ));
                    Ok((m, None))
                })
            }
            SuiteId::TorsionX | SuiteId::BryantSalamonParallel => {
                let profile = self.cfg.profile.clone().expect("validated");
                let chart = build_chart_x(spec, self.branch(), profile.clone())?;
                let pts = self.x_points(&profile)?;
                map_probes(n, par, |k| {
                    let p = chart.point(pts[k].0, pts[k].1)?;
                    let num = p.torsion_numeric(t.residual)?;
                    let norms = num.norms();
                    if suite == SuiteId::BryantSalamonParallel {
                        let worst = norms.iter().fold(0.0f64, |a, b| a.max(*b));
                        return Ok((vec![below("all-torsion-norms", worst, t.torsion)], Some(norms)));
                    }
                    let mut m = vec![
                        below("tau0-vanishes", num.tau0.abs(), t.torsion),
                        below(
                            "decomposition-residual",
                            num.residual_dphi.max(num.residual_dpsi),
                            t.residual,
                        ),
                    ];
                    let wrong = match p.branch {
                        Branch::Plus => p.singer_thorpe.w_plus.norm(),
                        Branch::Minus => p.singer_thorpe.w_minus.norm(),
                    };
                    m.push(below("duality-hypothesis", wrong, t.flags));
                    if wrong < t.flags {
                        let cl = p.torsion_closed(t.flags)?;
                        m.push(below("closed-vs-numeric", cl.max_difference(&num), t.torsion));
                    }
                    Ok((m, Some(norms)))
                })
            }
            SuiteId::LemmaTwoOfThree => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed ^ PARAM_STREAM);
                let params: Vec<(f64, f64, f64)> = (0..n)
                    .map(|_| {
                        let s: f64 = rng.random_range(0.2..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                        (s, rng.random_range(0.5..2.0), rng.random_range(0.2..2.0))
                    })
                    .collect();
                let seed = self.cfg.seed;
                map_probes(n, par, |k| {
                    let (s, c0, c1) = params[k];
                    let rep = lemma_check(s, c0, c1, 100, seed.wrapping_add(k as u64))?;
                    let mut m = Vec::new();
                    for pair in LemmaPair::ALL {
                        let third = rep.residuals.iter().find(|(p, _)| *p == pair).map_or(f64::NAN, |x| x.1);
                        let imposed = rep.imposed.iter().find(|(p, _)| *p == pair).map_or(f64::NAN, |x| x.1);
                        m.push(below(format!("third/{}", pair.as_str()), third, t.residual));
                        m.push(below(format!("imposed/{}", pair.as_str()), imposed, t.residual));
                    }
                    Ok((m, None))
                })
            }
            SuiteId::RadialIncompleteness => {
                let profile = self.cfg.profile.clone().expect("validated");
                let (len, _) = length_of_radius(&profile)?;
                let oracle = length_midpoint(&profile, 1_000_000)?;
                let r0 = profile.r0().expect("disk profile");
                let g0 = 0.4 * (2.0 * r0).sqrt();
                let eq = geodesic_trace(r0, g0, 0.0, 5.0, 500)?;
                let drift = eq.g.iter().fold(0.0f64, |a, g| a.max((g - g0).abs()));
                let moving = geodesic_trace(r0, 0.0, 0.2 * (2.0 * r0).sqrt(), 1.0, 1000)?;
                vec![Ok((
                    vec![
                        below("length-vs-midpoint-oracle", (len - oracle).abs(), t.torsion),
                        below("length-finite", if len.is_finite() { 0.0 } else { 1.0 }, 0.5),
                        below("geodesic-equilibrium-drift", drift, t.strict),
                        below("geodesic-left-disk", if moving.stayed_inside { 0.0 } else { 1.0 }, 0.5),
                    ],
                    None,
                ))]
            }
            SuiteId::IdentitiesP | SuiteId::CocalibrationP | SuiteId::TorsionP => {
                let (l, mu) = self.constant_profile();
                let chart = build_chart_p(spec, self.branch(), l, mu)?;
                let pts = self.p_points()?;
                map_probes(n, par, |k| {
                    let p = chart.point(pts[k].0, pts[k].1)?;
                    match suite {
                        SuiteId::IdentitiesP => Ok((
                            p.identity_residuals()?
                                .into_iter()
                                .map(|(name, v)| below(format!("identity {name}"), v, t.residual))
                                .collect(),
                            None,
                        )),
                        SuiteId::CocalibrationP => {
                            let st = p.structure()?;
                            let num = p.torsion_numeric(t.residual)?;
                            Ok((
                                vec![
                                    below("dpsi-vanishes", st.norm(&p.dpsi_numeric()?), t.strict),
                                    above("dphi-witness", st.norm(&p.dphi_numeric()?), t.witness),
                                    below("seven-tau0-vol", p.seven_tau0_residual(t.residual)?, t.strict),
                                    below("tau0-closed", (num.tau0 - p.tau0_closed()).abs(), t.residual),
                                ],
                                None,
                            ))
                        }
                        _ => {
                            let st = p.structure()?;
                            let num = p.torsion_numeric(t.residual)?;
                            let cl = p.torsion_closed()?;
                            let in_w3 = st.norm(&cl.tau3.wedge(&st.phi)).max(st.norm(&cl.tau3.wedge(&st.psi)));
                            Ok((
                                vec![
                                    below("closed-vs-numeric", cl.max_difference(&num), t.residual),
                                    below(
                                        "tau1-tau2-vanish",
                                        st.norm(&num.tau1).max(st.norm(&num.tau2)),
                                        t.residual,
                                    ),
                                    below("tau3-in-w3", in_w3, t.residual),
                                ],
                                Some(num.norms()),
                            ))
                        }
                    }
                })
            }
            SuiteId::CorollariesP => self.corollaries()?,
        })
    }

    fn corollaries(&self) -> GeomResult<Vec<Probe>> {
        let t = self.tol();
        let (l, _) = self.constant_profile();
        let s = self.spec.expected.s.unwrap_or(0.0);
        let pts = self.p_points()?;
        let n = self.cfg.probes;
        let branch = self.branch();
        let name = self.spec.name;
        if s > 0.0 && name == ModelName::Sphere4 {
            let chart = build_chart_p(&self.spec, branch, l, (5.0 * s).sqrt() * l)?;
            return Ok(map_probes(n, self.parallel, |k| {
                let p = chart.point(pts[k].0, pts[k].1)?;
                let num = p.torsion_numeric(t.residual)?;
                let want = branch.sign() * 6.0 / (5.0 * l);
                Ok((
                    vec![
                        below("nearly-parallel", p.nearly_parallel_residual()?, t.residual),
                        below("tau0-six-fifths", (num.tau0 - want).abs(), t.residual),
                    ],
                    Some(num.norms()),
                ))
            }));
        }
        if s < 0.0 && self.spec.expected.einstein {
            let chart = build_chart_p(&self.spec, branch, l, (-2.0 * s).sqrt() * l)?;
            let asd = self.spec.expected.asd && branch == Branch::Plus;
            return Ok(map_probes(n, self.parallel, |k| {
                let p = chart.point(pts[k].0, pts[k].1)?;
                let num = p.torsion_numeric(t.residual)?;
                let pure = classify(&num, t.torsion).pure() == Some(TorsionClass::W3);
                let mut m = vec![
                    below("tau0-tuned", num.tau0.abs(), t.residual),
                    below("not-pure-w3", if pure { 0.0 } else { 1.0 }, 0.5),
                ];
                if asd {
                    m.push(below("tau3-formula", p.w3_tuning_residual(t.residual)?, t.residual));
                }
                Ok((m, Some(num.norms())))
            }));
        }
        Err(GeomError::InvalidParameter {
            name: "model".into(),
            reason: format!("no tuning applies to {name} (needs sphere4, or an Einstein model with s < 0)"),
        })
    }
}
