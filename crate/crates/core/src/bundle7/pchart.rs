//! The principal bundle `P±` in base coordinates `x` and exponential coordinates `u` of SO(3).

use crate::branch::Branch;
use crate::error::{GeomError, GeomResult};
use crate::exterior::{check, d, hat, MatrixForm, Multivector};
use crate::frames4::{FramePoint, SingerThorpe};
use crate::g2point::{standard_phi, torsion_decompose, G2Structure, TorsionForms, DIM};
use crate::jet::Jet;
use crate::models::ModelSpec;

use super::so3::{check_chart, exp_hat};
use super::{cross, dot, fiber_coordinates, lift_form, lift_matrix, row_times, star_horizontal, AdaptedFrame};

#[derive(Clone, Debug)]
pub struct ChartP {
    pub model: ModelSpec,
    pub branch: Branch,
    pub lambda: f64,
    pub mu: f64,
}

pub fn build_chart_p(model: &ModelSpec, branch: Branch, lambda: f64, mu: f64) -> GeomResult<ChartP> {
    for (name, v) in [("lambda", lambda), ("mu", mu)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(GeomError::NonPositiveParameter { name, value: v });
        }
    }
    Ok(ChartP {
        model: model.clone(),
        branch,
        lambda,
        mu,
    })
}

/// Everything needed at one point of `P±`.
#[derive(Clone, Debug)]
pub struct PPoint {
    pub base: [f64; 4],
    pub u: [f64; 3],
    pub branch: Branch,
    pub lambda: f64,
    pub mu: f64,
    /// `exp(ǔ)`.
    pub g: MatrixForm<Jet>,
    /// `ηg`.
    pub eta: MatrixForm<Jet>,
    /// `gᵀω_P g + gᵀdg`.
    pub omega: MatrixForm<Jet>,
    /// `gᵀρ_P g`.
    pub rho: MatrixForm<Jet>,
    /// `f = ω^∧`.
    pub f: Vec<Multivector<Jet>>,
    pub beta: Multivector<Jet>,
    pub vol: Multivector<Jet>,
    pub phi: Multivector<Jet>,
    pub psi: Multivector<Jet>,
    /// The coframe `(f gᵀ, θ)`.
    pub frame: AdaptedFrame,
    pub singer_thorpe: SingerThorpe,
}

/// Point values of the canonical forms in the adapted coframe.
#[derive(Clone, Debug)]
pub struct AdaptedForms {
    pub f: Vec<Multivector>,
    pub eta: Vec<Multivector>,
    pub omega: MatrixForm<f64>,
    pub rho: MatrixForm<f64>,
    pub rho_hat: Vec<Multivector>,
    pub beta: Multivector,
    pub vol: Multivector,
}

impl ChartP {
    pub fn point(&self, base: [f64; 4], u: [f64; 3]) -> GeomResult<PPoint> {
        check_chart(&u)?;
        let fp = FramePoint::new(&self.model.metric, &base, 2)?;
        let dp = fp.duality(self.branch)?;
        let st = fp.singer_thorpe()?;
        let (uj, _) = fiber_coordinates(&u, &base, 2);
        let g = exp_hat(&uj);
        let gt = g.transpose();
        let dg = g.map(|e| d(e).expect("chart jets"));
        let eta = lift_matrix(&dp.eta).mul(&g);
        let omega = gt.mul(&lift_matrix(&dp.omega_p)).mul(&g).add(&gt.mul(&dg));
        let rho = gt.mul(&lift_matrix(dp.rho_p()?)).mul(&g);
        let f = hat(&omega)?;
        let beta = f[0].wedge(&f[1]).wedge(&f[2]);
        let th: Vec<Multivector<Jet>> = fp.theta.iter().map(lift_form).collect();
        let vol = th[0].wedge(&th[1]).wedge(&th[2]).wedge(&th[3]);
        let (l, m) = (self.lambda, self.mu);
        let sgn = self.branch.sign();
        let ef = dot(eta.entries(), &f);
        let phi = beta.scale(l.powi(3)).sub(&ef.scale(sgn * l * m * m));
        let eof = eta.mul(&omega).mul(&MatrixForm::column(f.clone())?);
        let psi = vol.scale(m.powi(4)).sub(&eof.scalar_entry().scale(0.5 * l * l * m * m));
        // F = f gᵀ
        let fv: Vec<Multivector> = f.iter().map(|c| c.values()).collect();
        let gv = g.values();
        let mut covectors: Vec<Multivector> = (0..3)
            .map(|i| {
                (0..3).fold(Multivector::zeros(DIM, 1), |acc, k| {
                    acc.add(&fv[k].scale(gv.get(i, k).coeffs()[0]))
                })
            })
            .collect();
        covectors.extend(th.iter().map(|c| c.values()));
        Ok(PPoint {
            base,
            u,
            branch: self.branch,
            lambda: l,
            mu: m,
            g,
            eta,
            omega,
            rho,
            f,
            beta,
            vol,
            phi,
            psi,
            frame: AdaptedFrame::new(&covectors)?,
            singer_thorpe: st,
        })
    }
}

fn matrix_close(a: &MatrixForm<f64>, b: &MatrixForm<f64>) -> f64 {
    a.sub(b).max_abs()
}

fn rows_close(a: &[Multivector], b: &[Multivector]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max(x.sub(y).max_abs()))
}

impl PPoint {
    pub fn structure(&self) -> GeomResult<G2Structure> {
        standard_phi(self.lambda, self.mu, self.branch)
    }

    fn express_matrix(&self, m: &MatrixForm<Jet>) -> MatrixForm<f64> {
        m.map(|e| self.frame.express_jet(e))
    }

    pub fn adapted(&self) -> AdaptedForms {
        let rho = self.express_matrix(&self.rho);
        AdaptedForms {
            f: self.f.iter().map(|c| self.frame.express_jet(c)).collect(),
            eta: self.express_matrix(&self.eta).entries().to_vec(),
            omega: self.express_matrix(&self.omega),
            rho_hat: hat(&rho).expect("3×3"),
            rho,
            beta: self.frame.express_jet(&self.beta),
            vol: self.frame.express_jet(&self.vol),
        }
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

    /// `dφ = −(λ³/2)fρf^t ∓ λμ²η(½ωf^t + ρ̂^t)` and `dψ = 0`.
    pub fn structure_system(&self) -> (Multivector, Multivector) {
        let a = self.adapted();
        let (l, m) = (self.lambda, self.mu);
        let sgn = self.branch.sign();
        let fcol = MatrixForm::column(a.f.clone()).expect("column");
        let frf = MatrixForm::row(a.f.clone()).expect("row").mul(&a.rho).mul(&fcol);
        let of = a.omega.mul(&fcol);
        let inner: Vec<Multivector> = of
            .entries()
            .iter()
            .zip(&a.rho_hat)
            .map(|(x, r)| x.scale(0.5).add(r))
            .collect();
        let dphi = frf
            .scalar_entry()
            .scale(-0.5 * l.powi(3))
            .sub(&dot(&a.eta, &inner).scale(sgn * l * m * m));
        (dphi, Multivector::zeros(DIM, 5))
    }

    pub fn torsion_numeric(&self, tol: f64) -> GeomResult<TorsionForms> {
        torsion_decompose(&self.structure()?, &self.dphi_numeric()?, &self.dpsi_numeric()?, tol)
    }

    /// `τ0 = ±(6/7λμ²)(μ² + 2sλ²)` with `s` read at the base point.
    pub fn tau0_closed(&self) -> f64 {
        let (l, m, s) = (self.lambda, self.mu, self.singer_thorpe.s);
        self.branch.sign() * 6.0 / (7.0 * l * m * m) * (m * m + 2.0 * s * l * l)
    }

    /// `τ3 = λ²(*_Mρ̂)f^t − (1/7)((μ² − 12sλ²)ηf^t ∓ (30sλ⁴/μ² − 6λ²)β)`.
    pub fn tau3_closed(&self) -> GeomResult<Multivector> {
        let a = self.adapted();
        let (l, m, s) = (self.lambda, self.mu, self.singer_thorpe.s);
        let sgn = self.branch.sign();
        let star: Vec<Multivector> = a.rho_hat.iter().map(star_horizontal).collect::<GeomResult<_>>()?;
        let rest = dot(&a.eta, &a.f)
            .scale(m * m - 12.0 * s * l * l)
            .sub(&a.beta.scale(sgn * (30.0 * s * l.powi(4) / (m * m) - 6.0 * l * l)));
        Ok(dot(&star, &a.f).scale(l * l).sub(&rest.scale(1.0 / 7.0)))
    }

    pub fn torsion_closed(&self) -> GeomResult<TorsionForms> {
        let st = self.structure()?;
        let mut t = TorsionForms::new(
            self.tau0_closed(),
            Multivector::zeros(DIM, 1),
            Multivector::zeros(DIM, 2),
            self.tau3_closed()?,
            st.metric,
        );
        let (rphi, rpsi) = st.reconstruct(&t);
        let (dphi, dpsi) = self.structure_system();
        t.residual_dphi = st.norm(&dphi.sub(&rphi));
        t.residual_dpsi = st.norm(&dpsi.sub(&rpsi));
        Ok(t)
    }

    /// `‖7τ0·Vol − dφ∧φ‖` with `τ0` from the numeric decomposition.
    pub fn seven_tau0_residual(&self, tol: f64) -> GeomResult<f64> {
        let st = self.structure()?;
        let t = self.torsion_numeric(tol)?;
        let lhs = st.volume().scale(7.0 * t.tau0);
        Ok(lhs.sub(&self.dphi_numeric()?.wedge(&st.phi)).max_abs())
    }

    /// `‖dφ ∓ (6/5λ)ψ‖`, vanishing on the nearly parallel tuning.
    pub fn nearly_parallel_residual(&self) -> GeomResult<f64> {
        let c = self.branch.sign() * 6.0 / (5.0 * self.lambda);
        let st = self.structure()?;
        Ok(st.norm(&self.dphi_numeric()?.sub(&st.psi.scale(c))))
    }

    /// `‖τ3 ∓ (1/2λ)(φ − 7λ³β)‖` with `τ3` from the numeric decomposition.
    pub fn w3_tuning_residual(&self, tol: f64) -> GeomResult<f64> {
        let st = self.structure()?;
        let t = self.torsion_numeric(tol)?;
        let beta = Multivector::basis(DIM, &[1, 2, 3]);
        let want = st
            .phi
            .sub(&beta.scale(7.0 * self.lambda.powi(3)))
            .scale(self.branch.sign() / (2.0 * self.lambda));
        Ok(st.norm(&t.tau3.sub(&want)))
    }

    /// Residuals of the algebraic and differential identities of the canonical forms.
    pub fn identity_residuals(&self) -> GeomResult<Vec<(&'static str, f64)>> {
        let a = self.adapted();
        let sgn = self.branch.sign();
        let fcol = MatrixForm::column(a.f.clone())?;
        let frow = MatrixForm::row(a.f.clone())?;
        let ecol = MatrixForm::row(a.eta.clone())?;
        let half_fw: Vec<Multivector> = row_times(&a.f, &a.omega).iter().map(|x| x.scale(0.5)).collect();
        let mut out = Vec::new();
        out.push(("½fω = (ω²³,ω³¹,ω¹²)", rows_close(&half_fw, &cross(&a.f))));
        let df: Vec<Multivector> = self
            .f
            .iter()
            .map(|c| d(c).map(|x| self.frame.express_jet(&x)))
            .collect::<GeomResult<_>>()?;
        let rhs: Vec<Multivector> = df.iter().zip(&half_fw).map(|(x, y)| x.add(y)).collect();
        out.push(("ρ̂ = df + ½fω", rows_close(&a.rho_hat, &rhs)));
        let rho_hat_col = MatrixForm::column(a.rho_hat.clone())?;
        out.push((
            "ωρ̂^t = −ρf^t",
            matrix_close(&a.omega.mul(&rho_hat_col), &a.rho.mul(&fcol).scale(-1.0)),
        ));
        let fwf = frow.mul(&a.omega).mul(&fcol);
        out.push(("β = ⅙fωf^t", a.beta.sub(&fwf.scalar_entry().scale(1.0 / 6.0)).max_abs()));
        let ftf = fcol.mul(&frow);
        let mut two_beta = MatrixForm::zeros(3, 3, DIM, 3);
        for i in 0..3 {
            two_beta.set(i, i, a.beta.scale(2.0));
        }
        out.push(("ωf^tf = 2β1₃", matrix_close(&a.omega.mul(&ftf), &two_beta)));
        out.push(("ωωf^t = 0", a.omega.mul(&a.omega).mul(&fcol).max_abs()));
        let ef = ecol.mul(&fcol);
        let ef = ef.scalar_entry();
        let frf = frow.mul(&a.rho).mul(&fcol);
        let erho = dot(&a.eta, &a.rho_hat);
        out.push((
            "fρf^tηf^t = −2βηρ̂^t",
            frf.scalar_entry()
                .wedge(ef)
                .add(&a.beta.wedge(&erho).scale(2.0))
                .max_abs(),
        ));
        let ewf = ecol.mul(&a.omega).mul(&fcol);
        out.push((
            "ηωf^tηf^t = ±12βvol",
            ewf.scalar_entry()
                .wedge(ef)
                .sub(&a.beta.wedge(&a.vol).scale(12.0 * sgn))
                .max_abs(),
        ));
        out.push(("ηf^tηf^t = 0", ef.wedge(ef).max_abs()));
        out.push((
            "ηρ̂^tηf^t = ±2vol fρ̂^t",
            erho.wedge(ef)
                .sub(&a.vol.wedge(&dot(&a.f, &a.rho_hat)).scale(2.0 * sgn))
                .max_abs(),
        ));
        let deta = self.eta.map(|e| d(e).expect("chart jets"));
        out.push((
            "dη = η∧ω",
            matrix_close(
                &self.express_matrix(&deta),
                &self.express_matrix(&self.eta.mul(&self.omega)),
            ),
        ));
        let dw = self
            .omega
            .map(|e| d(e).expect("chart jets"))
            .add(&self.omega.mul(&self.omega));
        out.push(("ρ = dω + ω∧ω", matrix_close(&self.express_matrix(&dw), &a.rho)));
        out.push(("η∧ρ = 0", ecol.mul(&a.rho).max_abs()));
        let ewf_jet = self.eta.mul(&self.omega).mul(&MatrixForm::column(self.f.clone())?);
        out.push((
            "d(ηωf^t) = 0",
            self.frame.express_jet(&d(ewf_jet.scalar_entry())?).max_abs(),
        ));
        out.push((
            "ηρ̂^t = −6s vol",
            erho.add(&a.vol.scale(6.0 * self.singer_thorpe.s)).max_abs(),
        ));
        out.push(("ω = f̌", matrix_close(&a.omega, &check(&a.f)?)));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{model, ModelName};

    const X: [f64; 4] = [0.1, -0.25, 0.3, 0.07];
    const U: [f64; 3] = [0.5, -0.9, 0.4];

    fn point(m: ModelName, b: Branch, l: f64, mu: f64) -> PPoint {
        build_chart_p(&model(m, 1.0).unwrap(), b, l, mu)
            .unwrap()
            .point(X, U)
            .unwrap()
    }

    #[test]
    fn forms_are_standard_in_the_adapted_frame() {
        for b in Branch::BOTH {
            let p = point(ModelName::FubiniStudy, b, 1.3, 0.7);
            let st = p.structure().unwrap();
            assert!(p.phi_adapted().sub(&st.phi).max_abs() < 1e-12, "{b:?}");
            assert!(p.psi_adapted().sub(&st.psi).max_abs() < 1e-12, "{b:?}");
        }
    }

    #[test]
    fn identities_hold() {
        for m in ModelName::ALL {
            for b in Branch::BOTH {
                let p = point(m, b, 0.9, 1.4);
                for (name, r) in p.identity_residuals().unwrap() {
                    assert!(r < 1e-9, "{m} {b:?} {name}: {r}");
                }
            }
        }
    }

    #[test]
    fn structure_system_matches_jets() {
        for m in [ModelName::ProductS2H2, ModelName::ComplexHyperbolic] {
            for b in Branch::BOTH {
                let p = point(m, b, 1.1, 0.8);
                let (dphi, dpsi) = p.structure_system();
                assert!(dphi.sub(&p.dphi_numeric().unwrap()).max_abs() < 1e-10, "{m} {b:?}");
                assert!(dpsi.sub(&p.dpsi_numeric().unwrap()).max_abs() < 1e-10, "{m} {b:?}");
            }
        }
    }

    #[test]
    fn closed_torsion_matches_numeric() {
        for m in ModelName::ALL {
            for b in Branch::BOTH {
                let p = point(m, b, 0.8, 1.3);
                let num = p.torsion_numeric(1e-9).unwrap();
                let cl = p.torsion_closed().unwrap();
                assert!(
                    (num.tau0 - cl.tau0).abs() < 1e-9,
                    "{m} {b:?} τ0 {} vs {}",
                    num.tau0,
                    cl.tau0
                );
                assert!(num.max_difference(&cl) < 1e-9, "{m} {b:?}\n{num:?}\n{cl:?}");
            }
        }
    }

    #[test]
    fn chart_bound_rejected() {
        let c = build_chart_p(&model(ModelName::Flat, 1.0).unwrap(), Branch::Plus, 1.0, 1.0).unwrap();
        assert!(matches!(c.point(X, [0.0, 0.0, 3.1]), Err(GeomError::ChartBound(_))));
        assert!(build_chart_p(&model(ModelName::Flat, 1.0).unwrap(), Branch::Plus, 0.0, 1.0).is_err());
    }
    #[test]
    fn nearly_parallel_sphere() {
        let l = 0.7;
        let p = point(ModelName::Sphere4, Branch::Minus, l, (5.0f64).sqrt() * l);
        assert!(p.nearly_parallel_residual().unwrap() < 1e-9);
        let t = p.torsion_numeric(1e-9).unwrap();
        assert!((t.tau0 + 6.0 / (5.0 * l)).abs() < 1e-9);
    }

    #[test]
    fn hyperbolic_w3_tuning() {
        let l = 1.2;
        for b in Branch::BOTH {
            let p = point(ModelName::Hyperbolic4, b, l, (2.0f64).sqrt() * l);
            let t = p.torsion_numeric(1e-9).unwrap();
            assert!(t.tau0.abs() < 1e-9);
            assert_eq!(
                crate::g2point::classify(&t, 1e-8).pure(),
                Some(crate::g2point::TorsionClass::W3)
            );
        }
        let p = point(ModelName::Hyperbolic4, Branch::Plus, l, (2.0f64).sqrt() * l);
        assert!(p.w3_tuning_residual(1e-9).unwrap() < 1e-9);
    }

    #[test]
    fn cocalibrated_not_calibrated() {
        for m in ModelName::ALL {
            for b in Branch::BOTH {
                let p = point(m, b, 1.0, 1.0);
                assert!(p.dpsi_numeric().unwrap().max_abs() < 1e-10, "{m}");
                assert!(p.dphi_numeric().unwrap().max_abs() > 1e-3, "{m}");
                assert!(p.seven_tau0_residual(1e-9).unwrap() < 1e-9, "{m}");
            }
        }
    }
}
