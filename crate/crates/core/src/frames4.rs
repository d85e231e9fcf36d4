//! Moving frames on a Riemannian 4-chart.
//!
//! Conventions: `θ` is a row of 1-forms and `ω` a skew matrix of 1-forms with
//! `dθ + θ∧ω = 0`, products contracting row-by-column. Curvature is
//! `ρ = dω + ω∧ω`; for constant sectional curvature `K` this gives
//! `ρ[a][b] = K θ^a∧θ^b`.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::branch::{duality_basis, duality_triple, Branch};
use crate::error::{GeomError, GeomResult};
use crate::exterior::{check, d, FormField, MatrixForm, Multivector};
use crate::jet::{check_order, Jet};

pub const DIM: usize = 4;

type MetricFn = dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync;

/// A symmetric 4×4 matrix of scalar fields.
#[derive(Clone)]
pub struct MetricField {
    eval: Arc<MetricFn>,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MetricField")
    }
}

impl MetricField {
    /// Entries in row-major order, written in jet arithmetic.
    pub fn new(f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static) -> Self {
        MetricField { eval: Arc::new(f) }
    }

    /// `c(x)·δ`.
    pub fn conformal(f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static) -> Self {
        MetricField::new(move |x| {
            let c = f(x);
            let mut g = vec![Jet::constant(0.0); 16];
            for i in 0..DIM {
                g[i * DIM + i] = c.clone();
            }
            g
        })
    }

    pub fn euclidean() -> Self {
        MetricField::conformal(|_| Jet::constant(1.0))
    }

    /// The metric in coordinates `y` with `x_i = y_{perm[i]}`.
    pub fn permuted(&self, perm: [usize; DIM]) -> Self {
        let inner = self.clone();
        MetricField::new(move |y| {
            let x: Vec<Jet> = (0..DIM).map(|i| y[perm[i]].clone()).collect();
            let g = (inner.eval)(&x);
            // g'_{ab} = g_{ij} with a = perm[i], b = perm[j]
            let mut out = vec![Jet::constant(0.0); 16];
            for i in 0..DIM {
                for j in 0..DIM {
                    out[perm[i] * DIM + perm[j]] = g[i * DIM + j].clone();
                }
            }
            out
        })
    }

    pub fn jet(&self, point: &[f64], order: usize) -> GeomResult<Vec<Vec<Jet>>> {
        if point.len() != DIM {
            return Err(GeomError::DimensionMismatch {
                expected: DIM,
                got: point.len(),
            });
        }
        check_order(order)?;
        let g = (self.eval)(&Jet::coordinates(point, order));
        assert_eq!(g.len(), DIM * DIM, "metric entries");
        Ok((0..DIM).map(|i| g[i * DIM..(i + 1) * DIM].to_vec()).collect())
    }

    pub fn value(&self, point: &[f64]) -> GeomResult<[[f64; DIM]; DIM]> {
        let g = self.jet(point, 0)?;
        let mut out = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                out[i][j] = g[i][j].value();
            }
        }
        Ok(out)
    }
}

/// Coframe, connection and curvature jets at one point.
#[derive(Clone, Debug)]
pub struct FramePoint {
    pub point: Vec<f64>,
    /// `θ^a = Σ_i E[a][i] dx^i`.
    pub e: Vec<Vec<Jet>>,
    /// `dx^i = Σ_a E⁻¹[i][a] θ^a`.
    pub e_inv: Vec<Vec<Jet>>,
    pub theta: Vec<Multivector<Jet>>,
    /// Levi-Civita connection in the coordinate coframe, one order below `θ`.
    pub omega: MatrixForm<Jet>,
    /// Curvature, two orders below `θ`; absent if the metric order was below 2.
    pub rho: Option<MatrixForm<Jet>>,
}

fn cholesky(g: &[Vec<Jet>], point: &[f64]) -> GeomResult<Vec<Vec<Jet>>> {
    let mut l = vec![vec![Jet::constant(0.0); DIM]; DIM];
    for j in 0..DIM {
        let mut diag = g[j][j].clone();
        for k in 0..j {
            diag = diag - l[j][k].square();
        }
        if !(diag.value() > 0.0) {
            return Err(GeomError::NotPositiveDefinite { point: point.to_vec() });
        }
        let ljj = diag.sqrt();
        let inv = ljj.recip();
        for i in j + 1..DIM {
            let mut s = g[i][j].clone();
            for k in 0..j {
                s = s - &l[i][k] * &l[j][k];
            }
            l[i][j] = s * &inv;
        }
        l[j][j] = ljj;
    }
    Ok(l)
}

fn lower_inverse(l: &[Vec<Jet>]) -> Vec<Vec<Jet>> {
    let mut inv = vec![vec![Jet::constant(0.0); DIM]; DIM];
    for i in 0..DIM {
        let r = l[i][i].recip();
        for j in 0..i {
            let mut s = Jet::constant(0.0);
            for k in j..i {
                s = s + &l[i][k] * &inv[k][j];
            }
            inv[i][j] = -(s * &r);
        }
        inv[i][i] = r;
    }
    inv
}

fn one_form(coeffs: &[Jet]) -> Multivector<Jet> {
    let mut out = Multivector::zeros(coeffs.len(), 1);
    out.coeffs_mut().clone_from_slice(coeffs);
    out
}

/// Images of the coordinate covectors in the frame basis: `dx^i ↦ Σ_a E⁻¹[i][a] e^a`.
fn frame_images(e_inv: &[Vec<Jet>]) -> Vec<Multivector<Jet>> {
    e_inv.iter().map(|row| one_form(row)).collect()
}

impl FramePoint {
    /// Evaluates everything from metric jets of order `metric_order`.
    pub fn new(metric: &MetricField, point: &[f64], metric_order: usize) -> GeomResult<Self> {
        if metric_order == 0 {
            return Err(GeomError::JetOrderUnavailable { requested: 1, max: 0 });
        }
        let g = metric.jet(point, metric_order)?;
        let l = cholesky(&g, point)?;
        let l_inv = lower_inverse(&l);
        let e: Vec<Vec<Jet>> = (0..DIM).map(|a| (0..DIM).map(|i| l[i][a].clone()).collect()).collect();
        let e_inv: Vec<Vec<Jet>> = (0..DIM)
            .map(|i| (0..DIM).map(|a| l_inv[a][i].clone()).collect())
            .collect();
        let theta: Vec<Multivector<Jet>> = e.iter().map(|row| one_form(row)).collect();
        let images = frame_images(&e_inv);
        // c[k] = dθ^k in the frame basis
        let c: Vec<Multivector<Jet>> = theta
            .iter()
            .map(|t| d(t)?.substitute(&images))
            .collect::<GeomResult<_>>()?;
        let cc = |k: usize, p: usize, q: usize| c[k].get(&[p + 1, q + 1]);
        let mut omega = MatrixForm::zeros(DIM, DIM, DIM, 1);
        for p in 0..DIM {
            for k in 0..DIM {
                if p == k {
                    continue;
                }
                let mut w = Multivector::zeros(DIM, 1);
                for q in 0..DIM {
                    let x = (cc(p, k, q) - cc(k, p, q) - cc(q, p, k)).scale(0.5);
                    if !x.is_zero() {
                        w = w.add(&theta[q].times(&x));
                    }
                }
                omega.set(p, k, w);
            }
        }
        let rho = if metric_order >= 2 {
            let domega = omega.map(|w| d(w).expect("connection jets carry order ≥ 1"));
            Some(domega.add(&omega.mul(&omega)))
        } else {
            None
        };
        Ok(FramePoint {
            point: point.to_vec(),
            e,
            e_inv,
            theta,
            omega,
            rho,
        })
    }

    pub fn theta_row(&self) -> MatrixForm<Jet> {
        MatrixForm::row(self.theta.clone()).expect("four 1-forms")
    }

    /// Rewrites a coordinate-basis form in the orthonormal frame at the point.
    pub fn to_frame(&self, a: &Multivector<Jet>) -> Multivector {
        let images: Vec<Multivector> = self
            .e_inv
            .iter()
            .map(|row| Multivector::from_coeffs(DIM, 1, row.iter().map(|j| j.value()).collect()))
            .collect();
        a.values().substitute(&images).expect("frame images")
    }

    pub fn rho(&self) -> GeomResult<&MatrixForm<Jet>> {
        self.rho
            .as_ref()
            .ok_or(GeomError::JetOrderUnavailable { requested: 2, max: 1 })
    }

    /// `max |dθ + θ∧ω|` at the point.
    pub fn cartan_residual(&self) -> GeomResult<f64> {
        let dtheta: Vec<Multivector<Jet>> = self.theta.iter().map(d).collect::<GeomResult<_>>()?;
        let lhs = MatrixForm::row(dtheta)?.add(&self.theta_row().mul(&self.omega));
        Ok(lhs.values().max_abs())
    }

    /// SD/ASD 2-forms, induced connection and curvature for one branch.
    pub fn duality(&self, branch: Branch) -> GeomResult<DualityPoint> {
        let eta = duality_triple(&self.theta, branch);
        let s = branch.sign();
        let induce = |m: &MatrixForm<Jet>| -> GeomResult<MatrixForm<Jet>> {
            let w = |i: usize, j: usize| m.get(i, j).clone();
            check(&[
                w(3, 2).add(&w(1, 0).scale(s)),
                w(1, 3).sub(&w(0, 2).scale(s)),
                w(2, 1).sub(&w(0, 3).scale(s)),
            ])
        };
        let omega_p = induce(&self.omega)?;
        let rho_p = match &self.rho {
            Some(r) => Some(induce(r)?),
            None => None,
        };
        Ok(DualityPoint {
            branch,
            eta: MatrixForm::row(eta.to_vec())?,
            omega_p,
            rho_p,
        })
    }

    /// Singer–Thorpe blocks from both branches' curvature.
    pub fn singer_thorpe(&self) -> GeomResult<SingerThorpe> {
        let rho = self.rho()?;
        let plus = self.duality(Branch::Plus)?;
        let minus = self.duality(Branch::Minus)?;
        let rp: Vec<Multivector> = rho_hat(plus.rho_p()?).iter().map(|r| self.to_frame(r)).collect();
        let rm: Vec<Multivector> = rho_hat(minus.rho_p()?).iter().map(|r| self.to_frame(r)).collect();
        let ep = duality_basis(DIM, [1, 2, 3, 4], Branch::Plus);
        let em = duality_basis(DIM, [1, 2, 3, 4], Branch::Minus);
        let block = |r: &[Multivector], e: &[Multivector; 3]| Matrix3::from_fn(|i, j| pairing(&r[i], &e[j]));
        let a_t = block(&rp, &ep);
        let bb_t = block(&rp, &em);
        let b_t = block(&rm, &ep);
        let c_t = block(&rm, &em);
        let mut scal = 0.0;
        for a in 0..DIM {
            for b in 0..DIM {
                if a != b {
                    scal += self.to_frame(rho.get(a, b)).get(&[a + 1, b + 1]);
                }
            }
        }
        Ok(SingerThorpe::from_blocks(-a_t, -bb_t, b_t, c_t, scal))
    }
}

/// `ρ^∧` of a skew 3×3 matrix.
fn rho_hat(m: &MatrixForm<Jet>) -> Vec<Multivector<Jet>> {
    crate::exterior::hat(m).expect("3×3 matrix")
}

/// Coefficient of a 2-form along a norm-`√2` basis element: `⟨α, e⟩ / 2`.
pub fn pairing(alpha: &Multivector, e: &Multivector) -> f64 {
    alpha.inner(e, &[1.0; DIM]) / 2.0
}

/// The induced bundle data of one branch at a point.
#[derive(Clone, Debug)]
pub struct DualityPoint {
    pub branch: Branch,
    /// `η`, a 1×3 row of 2-forms.
    pub eta: MatrixForm<Jet>,
    /// Connection with `dη = η∧ω_P`.
    pub omega_p: MatrixForm<Jet>,
    pub rho_p: Option<MatrixForm<Jet>>,
}

impl DualityPoint {
    pub fn rho_p(&self) -> GeomResult<&MatrixForm<Jet>> {
        self.rho_p
            .as_ref()
            .ok_or(GeomError::JetOrderUnavailable { requested: 2, max: 1 })
    }

    /// `max |dη − η∧ω_P|`.
    pub fn structure_residual(&self) -> GeomResult<f64> {
        let deta: Vec<Multivector<Jet>> = self.eta.entries().iter().map(d).collect::<GeomResult<_>>()?;
        let r = MatrixForm::row(deta)?.sub(&self.eta.mul(&self.omega_p));
        Ok(r.values().max_abs())
    }

    /// `max |η∧ρ_P|`.
    pub fn bianchi_residual(&self) -> GeomResult<f64> {
        Ok(self.eta.mul(self.rho_p()?).values().max_abs())
    }

    /// `max |ρ_P − (dω_P + ω_P∧ω_P)|`.
    pub fn curvature_residual(&self) -> GeomResult<f64> {
        let dw = self.omega_p.map(|w| d(w).expect("connection jets carry order ≥ 1"));
        let r = self.rho_p()?.sub(&dw.add(&self.omega_p.mul(&self.omega_p)));
        Ok(r.values().max_abs())
    }
}

/// Curvature operator blocks against the SD/ASD splitting.
#[derive(Clone, Debug, PartialEq)]
pub struct SingerThorpe {
    pub a: Matrix3<f64>,
    /// Matrix of `B*`, read off the self-dual curvature.
    pub b: Matrix3<f64>,
    /// The same block read off the anti-self-dual curvature.
    pub b_dual: Matrix3<f64>,
    pub c: Matrix3<f64>,
    pub w_plus: Matrix3<f64>,
    pub w_minus: Matrix3<f64>,
    pub scal: f64,
    /// `Scal / 12`.
    pub s: f64,
}

impl SingerThorpe {
    pub fn from_blocks(a: Matrix3<f64>, b: Matrix3<f64>, b_dual: Matrix3<f64>, c: Matrix3<f64>, scal: f64) -> Self {
        let id = Matrix3::identity();
        SingerThorpe {
            w_plus: a - id * (a.trace() / 3.0),
            w_minus: c - id * (c.trace() / 3.0),
            a,
            b,
            b_dual,
            c,
            scal,
            s: scal / 12.0,
        }
    }

    pub fn asymmetry(&self) -> f64 {
        (self.a - self.a.transpose())
            .abs()
            .max()
            .max((self.c - self.c.transpose()).abs().max())
    }

    /// `max(|tr A − Scal/4|, |tr C − Scal/4|)`.
    pub fn trace_defect(&self) -> f64 {
        let q = self.scal / 4.0;
        (self.a.trace() - q).abs().max((self.c.trace() - q).abs())
    }

    pub fn flags(&self, tol: f64) -> Flags {
        Flags {
            einstein: self.b.norm() < tol,
            sd: self.w_minus.norm() < tol,
            asd: self.w_plus.norm() < tol,
            scalar_flat: self.scal.abs() < tol,
            s: self.s,
        }
    }
}

/// Geometric predicates at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Flags {
    pub einstein: bool,
    /// `W₋ = 0`.
    pub sd: bool,
    /// `W₊ = 0`.
    pub asd: bool,
    pub scalar_flat: bool,
    pub s: f64,
}

pub fn predicates(st: &SingerThorpe, tol: f64) -> Flags {
    st.flags(tol)
}

/// The orthonormal coframe of a metric, as a field.
#[derive(Clone, Debug)]
pub struct Coframe {
    pub metric: MetricField,
}

pub fn orthonormal_coframe(metric: &MetricField) -> Coframe {
    Coframe { metric: metric.clone() }
}

impl Coframe {
    /// Frame data at a point; `order` is the jet order of `θ`.
    pub fn at(&self, point: &[f64], order: usize) -> GeomResult<FramePoint> {
        FramePoint::new(&self.metric, point, order.max(1))
    }

    /// `θ^a` as form fields.
    pub fn theta(&self) -> Vec<FormField> {
        (0..DIM)
            .map(|a| {
                let m = self.metric.clone();
                FormField::from_fn(DIM, 1, move |p, order| {
                    Ok(FramePoint::new(&m, p, order.max(1))?.theta[a].truncate_to(order))
                })
            })
            .collect()
    }
}

/// The Levi-Civita connection of a coframe, as a field.
#[derive(Clone, Debug)]
pub struct ConnectionMatrix {
    pub coframe: Coframe,
}

pub fn levi_civita(c: &Coframe) -> ConnectionMatrix {
    ConnectionMatrix { coframe: c.clone() }
}

impl ConnectionMatrix {
    pub fn at(&self, point: &[f64], order: usize) -> GeomResult<MatrixForm<Jet>> {
        Ok(FramePoint::new(&self.coframe.metric, point, order + 1)?.omega)
    }

    /// `max |dθ + θ∧ω|` at a point.
    pub fn residual(&self, point: &[f64]) -> GeomResult<f64> {
        FramePoint::new(&self.coframe.metric, point, 1)?.cartan_residual()
    }

    pub fn entry(&self, i: usize, j: usize) -> FormField {
        let m = self.coframe.metric.clone();
        FormField::from_fn(DIM, 1, move |p, order| {
            Ok(FramePoint::new(&m, p, order + 1)?.omega.get(i, j).clone())
        })
    }
}

/// The curvature of a connection, as a field.
#[derive(Clone, Debug)]
pub struct CurvatureMatrix {
    pub connection: ConnectionMatrix,
}

pub fn curvature(w: &ConnectionMatrix) -> CurvatureMatrix {
    CurvatureMatrix { connection: w.clone() }
}

impl CurvatureMatrix {
    pub fn at(&self, point: &[f64], order: usize) -> GeomResult<MatrixForm<Jet>> {
        Ok(FramePoint::new(&self.connection.coframe.metric, point, order + 2)?
            .rho()?
            .clone())
    }

    /// Sectional curvature of the frame plane `(e_a, e_b)`.
    pub fn sectional(&self, point: &[f64], a: usize, b: usize) -> GeomResult<f64> {
        let fp = FramePoint::new(&self.connection.coframe.metric, point, 2)?;
        Ok(fp.to_frame(fp.rho()?.get(a, b)).get(&[a + 1, b + 1]))
    }
}

/// Induced bundle data for one branch, as a field.
#[derive(Clone, Debug)]
pub struct DualityBases {
    pub coframe: Coframe,
    pub branch: Branch,
}

pub fn duality_bases(c: &Coframe, branch: Branch) -> DualityBases {
    DualityBases {
        coframe: c.clone(),
        branch,
    }
}

impl DualityBases {
    /// Jets with `η` at `order`, `ω_P` at `order − 1` and `ρ_P` at `order − 2`.
    pub fn at(&self, point: &[f64], order: usize) -> GeomResult<DualityPoint> {
        FramePoint::new(&self.coframe.metric, point, order.max(1))?.duality(self.branch)
    }
}

pub fn singer_thorpe(c: &Coframe, point: &[f64]) -> GeomResult<SingerThorpe> {
    FramePoint::new(&c.metric, point, 2)?.singer_thorpe()
}

/// Truncation helper for jet-valued forms.
pub trait TruncateForm {
    fn truncate_to(&self, order: usize) -> Self;
}

impl TruncateForm for Multivector<Jet> {
    fn truncate_to(&self, order: usize) -> Self {
        self.map(|c| c.truncate(order))
    }
}

impl TruncateForm for MatrixForm<Jet> {
    fn truncate_to(&self, order: usize) -> Self {
        self.map(|e| e.truncate_to(order))
    }
}
