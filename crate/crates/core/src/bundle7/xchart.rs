//! The total space `X± = Λ²±T*M` in base coordinates `x` and fiber coordinates `a`.

use crate::branch::{duality_basis, Branch};
use crate::error::{GeomError, GeomResult};
use crate::exterior::{check, d, hat, MatrixForm, Multivector};
use crate::frames4::{FramePoint, SingerThorpe};
use crate::g2point::{standard_phi, torsion_decompose, G2Structure, TorsionForms, DIM};
use crate::jet::Jet;
use crate::models::ModelSpec;

use super::profile::Profile;
use super::{
    combine, cross, dot, fiber_coordinates, horizontal, lift_form, lift_matrix, row_times, times_column, AdaptedFrame,
};

/// Fiber probes are kept inside `|a| ≤ FIBER_BOUND`.
pub const FIBER_BOUND: f64 = 3.0;

#[derive(Clone, Debug)]
pub struct ChartX {
    pub model: ModelSpec,
    pub branch: Branch,
    pub profile: Profile,
}

pub fn build_chart_x(model: &ModelSpec, branch: Branch, profile: Profile) -> GeomResult<ChartX> {
    profile.validate()?;
    Ok(ChartX {
        model: model.clone(),
        branch,
        profile,
    })
}

/// A fiber coordinate with `r = a·a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberPointX {
    pub a: [f64; 3],
    pub r: f64,
}

impl FiberPointX {
    pub fn new(a: [f64; 3]) -> Self {
        FiberPointX {
            a,
            r: a.iter().map(|c| c * c).sum(),
        }
    }
}

/// Everything needed at one point of `X±`.
#[derive(Clone, Debug)]
pub struct XPoint {
    pub base: [f64; 4],
    pub fiber: FiberPointX,
    pub branch: Branch,
    /// Fiber coordinates as chart jets.
    pub a: Vec<Jet>,
    pub r: Jet,
    pub lambda: Jet,
    pub mu: Jet,
    pub eta: Vec<Multivector<Jet>>,
    pub omega: MatrixForm<Jet>,
    pub rho: MatrixForm<Jet>,
    /// `f = da − aω`.
    pub f: Vec<Multivector<Jet>>,
    /// `h = (f²³, f³¹, f¹²)`.
    pub h: Vec<Multivector<Jet>>,
    pub beta: Multivector<Jet>,
    pub vol: Multivector<Jet>,
    pub phi: Multivector<Jet>,
    pub psi: Multivector<Jet>,
    /// The coframe `(f, θ)`.
    pub frame: AdaptedFrame,
    pub profile: Profile,
    pub singer_thorpe: SingerThorpe,
    /// `ρ^∧` in the base orthonormal frame, on the horizontal labels.
    rho_hat: Vec<Multivector>,
}

impl ChartX {
    pub fn point(&self, base: [f64; 4], a: [f64; 3]) -> GeomResult<XPoint> {
        let fiber = FiberPointX::new(a);
        if fiber.r.sqrt() > FIBER_BOUND {
            return Err(GeomError::ChartBound(format!(
                "|a| = {} exceeds {FIBER_BOUND}",
                fiber.r.sqrt()
            )));
        }
        self.profile.values(fiber.r)?;
        let fp = FramePoint::new(&self.model.metric, &base, 2)?;
        let dp = fp.duality(self.branch)?;
        let st = fp.singer_thorpe()?;
        let eta: Vec<Multivector<Jet>> = dp.eta.entries().iter().map(lift_form).collect();
        let omega = lift_matrix(&dp.omega_p);
        let rho_base = dp.rho_p()?;
        let rho = lift_matrix(rho_base);
        let rho_hat = hat(rho_base)?.iter().map(|r| horizontal(&fp.to_frame(r))).collect();
        let (aj, _) = fiber_coordinates(&a, &base, 1);
        let f: Vec<Multivector<Jet>> = (0..3)
            .map(|j| {
                let mut fj = Multivector::basis_with(DIM, &[j + 1], Jet::constant(1.0)).expect("label");
                for (i, ai) in aj.iter().enumerate() {
                    fj = fj.sub(&omega.get(i, j).times(ai));
                }
                fj
            })
            .collect();
        let h = cross(&f);
        let beta = f[0].wedge(&f[1]).wedge(&f[2]);
        let th: Vec<Multivector<Jet>> = fp.theta.iter().map(lift_form).collect();
        let vol = th[0].wedge(&th[1]).wedge(&th[2]).wedge(&th[3]);
        let r = aj.iter().fold(Jet::constant(0.0), |acc, c| acc + c.square());
        let (lambda, mu) = self.profile.jets(&r)?;
        let sgn = self.branch.sign();
        let phi = beta
            .times(&lambda.powf(3.0))
            .sub(&dot(&eta, &f).times(&(&lambda * &mu.square())).scale(sgn));
        let psi = vol
            .times(&mu.powf(4.0))
            .sub(&dot(&eta, &h).times(&(lambda.square() * mu.square())));
        let covectors: Vec<Multivector> = f.iter().chain(th.iter()).map(|c| c.values()).collect();
        Ok(XPoint {
            base,
            fiber,
            branch: self.branch,
            a: aj,
            r,
            lambda,
            mu,
            eta,
            omega,
            rho,
            f,
            h,
            beta,
            vol,
            phi,
            psi,
            frame: AdaptedFrame::new(&covectors)?,
            profile: self.profile.clone(),
            singer_thorpe: st,
            rho_hat,
        })
    }

    /// Numeric torsion at a point, by decomposing jet derivatives of `(φ, ψ)`.
    pub fn torsion_numeric(&self, base: [f64; 4], a: [f64; 3], tol: f64) -> GeomResult<TorsionForms> {
        self.point(base, a)?.torsion_numeric(tol)
    }

    /// Closed-form torsion at a point.
    pub fn torsion_closed(&self, base: [f64; 4], a: [f64; 3], hypothesis_tol: f64) -> GeomResult<TorsionForms> {
        self.point(base, a)?.torsion_closed(hypothesis_tol)
    }
}

/// Profile values and first `r`-derivatives of the products used in the closed forms.
struct Radial {
    l: f64,
    m: f64,
    /// `∂_r` of `λ³`, `λμ²`, `μ⁴`, `λ²μ²`, `λ²μ⁴`, `μ²/λ²`.
    d_l3: f64,
    d_lm2: f64,
    d_m4: f64,
    d_l2m2: f64,
    d_l2m4: f64,
    d_ratio: f64,
}

impl XPoint {
    pub fn values(&self) -> (f64, f64) {
        (self.lambda.value(), self.mu.value())
    }

    /// The linear structure at the point, in the adapted coframe.
    pub fn structure(&self) -> GeomResult<G2Structure> {
        let (l, m) = self.values();
        standard_phi(l, m, self.branch)
    }

    pub fn phi_adapted(&self) -> Multivector {
        self.frame.express_jet(&self.phi)
    }

    pub fn psi_adapted(&self) -> Multivector {
        self.frame.express_jet(&self.psi)
    }

    pub fn dphi_numeric(&self) -> GeomResult<Multivector> {
        Ok(self.frame.express_jet(&d(&self.phi)?))
    }

    pub fn dpsi_numeric(&self) -> GeomResult<Multivector> {
        Ok(self.frame.express_jet(&d(&self.psi)?))
    }

    fn radial(&self) -> GeomResult<Radial> {
        let r = Jet::variable(1, 1, 0, self.fiber.r);
        let (lj, mj) = self.profile.jets(&r)?;
        let prof = |lm: &dyn Fn(&Jet, &Jet) -> Jet| -> GeomResult<f64> { Ok(lm(&lj, &mj).partial(0)) };
        let (l, m) = self.values();
        Ok(Radial {
            l,
            m,
            d_l3: prof(&|l, _| l.powf(3.0))?,
            d_lm2: prof(&|l, m| l * &m.square())?,
            d_m4: prof(&|_, m| m.powf(4.0))?,
            d_l2m2: prof(&|l, m| l.square() * m.square())?,
            d_l2m4: prof(&|l, m| l.square() * m.powf(4.0))?,
            d_ratio: prof(&|l, m| m.square() * l.square().recip())?,
        })
    }

    /// Basis values of `(f, η, h, β, vol, ρ)` in the adapted coframe.
    fn frame_values(&self) -> (Vec<Multivector>, Vec<Multivector>, MatrixForm<f64>) {
        let f: Vec<Multivector> = (1..=3).map(|i| Multivector::basis(DIM, &[i])).collect();
        let e = duality_basis(DIM, [4, 5, 6, 7], self.branch).to_vec();
        let rho = check(&self.rho_hat).expect("three 2-forms");
        (f, e, rho)
    }

    /// `(dφ, dψ)` from the closed structure system, in the adapted coframe.
    pub fn structure_system(&self) -> GeomResult<(Multivector, Multivector)> {
        let p = self.radial()?;
        let (f, e, rho) = self.frame_values();
        let h = cross(&f);
        let beta = f[0].wedge(&f[1]).wedge(&f[2]);
        let vol = Multivector::basis(DIM, &[4, 5, 6, 7]);
        let a = self.fiber.a;
        let dr = combine(&f, &a).scale(2.0);
        let rho_a = times_column(&rho, &a);
        let sgn = self.branch.sign();
        let dphi = dr
            .wedge(&beta)
            .scale(p.d_l3)
            .add(&dot(&h, &rho_a).scale(p.l.powi(3)))
            .sub(&dr.wedge(&dot(&e, &f)).scale(sgn * p.d_lm2));
        let efr = row_times(&row_times(&e, &check(&f)?), &rho);
        let dpsi = dr
            .wedge(&vol)
            .scale(p.d_m4)
            .sub(&dr.wedge(&dot(&e, &h)).scale(p.d_l2m2))
            .add(&combine(&efr, &a).scale(p.l * p.l * p.m * p.m));
        Ok((dphi, dpsi))
    }

    /// Requires the duality hypothesis: ASD base for `+`, SD base for `−`.
    pub fn check_hypothesis(&self, tol: f64) -> GeomResult<()> {
        let st = &self.singer_thorpe;
        let (w, name) = match self.branch {
            Branch::Plus => (st.w_plus.norm(), "anti-self-dual base required on X+ (W+ ≠ 0)"),
            Branch::Minus => (st.w_minus.norm(), "self-dual base required on X- (W- ≠ 0)"),
        };
        if w > tol {
            return Err(GeomError::HypothesisViolated(format!("{name}: |W| = {w:e}")));
        }
        Ok(())
    }

    /// The closed-form torsion of the radial structure.
    pub fn torsion_closed(&self, hypothesis_tol: f64) -> GeomResult<TorsionForms> {
        self.check_hypothesis(hypothesis_tol)?;
        let p = self.radial()?;
        let (f, e, rho) = self.frame_values();
        let s = self.singer_thorpe.s;
        let sgn = self.branch.sign();
        let a = self.fiber.a;
        let (l, m) = (p.l, p.m);
        let dr = combine(&f, &a).scale(2.0);
        let tau1 = dr.scale(2.0 / (3.0 * l * l * m.powi(4)) * (p.d_l2m4 - s * l.powi(4) * m * m));
        let h = cross(&f);
        let tau2 = combine(&h, &a)
            .scale(4.0 * l.powi(3) / (3.0 * m * m))
            .add(&combine(&e, &a).scale(sgn * 2.0 * l / 3.0))
            .scale(-sgn * (p.d_ratio - 2.0 * s));
        let rho_b = rho.add(&check(&e)?.scale(sgn * s));
        let tau3 = dot(&f, &times_column(&rho_b, &a)).scale(-sgn * l * l);
        let st = self.structure()?;
        let mut t = TorsionForms::new(0.0, tau1, tau2, tau3, st.metric);
        let (rphi, rpsi) = st.reconstruct(&t);
        let (dphi, dpsi) = self.structure_system()?;
        t.residual_dphi = st.norm(&dphi.sub(&rphi));
        t.residual_dpsi = st.norm(&dpsi.sub(&rpsi));
        Ok(t)
    }

    pub fn torsion_numeric(&self, tol: f64) -> GeomResult<TorsionForms> {
        torsion_decompose(&self.structure()?, &self.dphi_numeric()?, &self.dpsi_numeric()?, tol)
    }

    /// Residuals of the tautological identities, in the adapted coframe.
    pub fn identity_residuals(&self) -> GeomResult<Vec<(&'static str, f64)>> {
        let n = DIM;
        let ex = |a: &Multivector<Jet>| self.frame.express_jet(a);
        let mut out = Vec::new();
        let dr = d(&Multivector::scalar(n, self.r.clone()))?;
        let fa = self
            .f
            .iter()
            .zip(&self.a)
            .fold(Multivector::zeros(n, 1), |acc, (fi, ai)| acc.add(&fi.times(ai)));
        out.push(("dr = 2fa^t", ex(&dr.sub(&fa.scale(2.0))).max_abs()));
        let eta_a = self
            .eta
            .iter()
            .zip(&self.a)
            .fold(Multivector::zeros(n, 2), |acc, (e, ai)| acc.add(&e.times(ai)));
        out.push((
            "d(ηa^t) = ηf^t",
            ex(&d(&eta_a)?.sub(&dot(&self.eta, &self.f))).max_abs(),
        ));
        let rho_a: Vec<Multivector<Jet>> = (0..3)
            .map(|i| {
                (0..3).fold(Multivector::zeros(n, 2), |acc, j| {
                    acc.add(&self.rho.get(i, j).times(&self.a[j]))
                })
            })
            .collect();
        out.push(("dβ = hρa^t", ex(&d(&self.beta)?.sub(&dot(&self.h, &rho_a))).max_abs()));
        let third = dot(&self.h, &self.f).scale(1.0 / 3.0);
        out.push(("β = ⅓hf^t", ex(&self.beta.sub(&third)).max_abs()));
        Ok(out)
    }
}
