//! Linear G2 structures on a 7-dimensional space.
//!
//! The adapted basis labels vertical covectors `f¹, f², f³` as `1..=3` and
//! horizontal ones `θ⁴..θ⁷` as `4..=7`; the orientation is `o = e^{1234567}`.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::branch::{duality_basis, Branch};
use crate::error::{GeomError, GeomResult};
use crate::exterior::Multivector;

pub const DIM: usize = 7;
pub const DEFAULT_TOL: f64 = 1e-9;

const BASE: [usize; 4] = [4, 5, 6, 7];

fn e(labels: &[usize]) -> Multivector {
    Multivector::basis(DIM, labels)
}

/// The orientation form `o`.
pub fn orientation() -> Multivector {
    e(&[1, 2, 3, 4, 5, 6, 7])
}

/// `λ³f¹²³ ∓ λμ² Σ fⁱ∧eⁱ` with `eⁱ` the duality triple of the branch.
pub fn phi_form(lambda: f64, mu: f64, branch: Branch) -> Multivector {
    let eta = duality_basis(DIM, BASE, branch);
    let mut pair = Multivector::zeros(DIM, 3);
    for (i, ei) in eta.iter().enumerate() {
        pair = pair.add(&e(&[i + 1]).wedge(ei));
    }
    e(&[1, 2, 3])
        .scale(lambda.powi(3))
        .sub(&pair.scale(branch.sign() * lambda * mu * mu))
}

/// `μ⁴e⁴⁵⁶⁷ − λ²μ²(e¹∧f²³ + e²∧f³¹ + e³∧f¹²)`.
pub fn psi_form(lambda: f64, mu: f64, branch: Branch) -> Multivector {
    let eta = duality_basis(DIM, BASE, branch);
    let h = [e(&[2, 3]), e(&[3, 1]), e(&[1, 2])];
    let mut pair = Multivector::zeros(DIM, 4);
    for (ei, hi) in eta.iter().zip(&h) {
        pair = pair.add(&ei.wedge(hi));
    }
    e(&[4, 5, 6, 7])
        .scale(mu.powi(4))
        .sub(&pair.scale(lambda * lambda * mu * mu))
}

/// Eigen-split data of a G2 structure used by the torsion decomposition.
#[derive(Clone, Debug)]
struct Projectors {
    // Λ² = W7 ⊕ W14 under τ ↦ *(τ∧φ), orthonormal coordinates
    w14: DMatrix<f64>,
    w14_eigenvalue: f64,
    w7_eigenvalue: f64,
    // null space of τ ↦ (τ∧φ, τ∧ψ) on Λ³
    w27: DMatrix<f64>,
    // v ↦ ⅓*((*(v∧ψ))∧ψ) equals this multiple of the identity
    tau1_scale: f64,
}

/// A linear G2 structure `(φ, ψ)` in its adapted basis.
#[derive(Clone, Debug)]
pub struct G2Structure {
    pub phi: Multivector,
    pub psi: Multivector,
    pub lambda: f64,
    pub mu: f64,
    pub branch: Branch,
    /// Diagonal of the induced metric in the adapted basis.
    pub metric: [f64; DIM],
    /// Normalizer with `Vol = m·o`.
    pub m: f64,
    pub orientation: Multivector,
    proj: Projectors,
}

/// The standard structure with parameters `λ, μ > 0`.
pub fn standard_phi(lambda: f64, mu: f64, branch: Branch) -> GeomResult<G2Structure> {
    if !(lambda > 0.0) {
        return Err(GeomError::NonPositiveParameter {
            name: "lambda",
            value: lambda,
        });
    }
    if !(mu > 0.0) {
        return Err(GeomError::NonPositiveParameter { name: "mu", value: mu });
    }
    let (l2, m2) = (lambda * lambda, mu * mu);
    let metric = [l2, l2, l2, m2, m2, m2, m2];
    let phi = phi_form(lambda, mu, branch);
    let psi = phi.hodge(&metric, 1)?;
    let proj = projectors(&phi, &psi, &metric)?;
    Ok(G2Structure {
        phi,
        psi,
        lambda,
        mu,
        branch,
        metric,
        m: lambda.powi(3) * mu.powi(4),
        orientation: orientation(),
        proj,
    })
}

impl G2Structure {
    pub fn hodge(&self, a: &Multivector) -> Multivector {
        a.hodge(&self.metric, 1).expect("adapted metric is positive")
    }

    pub fn norm(&self, a: &Multivector) -> f64 {
        a.norm_with(&self.metric)
    }

    /// The volume form `m·o` of the induced metric.
    pub fn volume(&self) -> Multivector {
        self.orientation.scale(self.m)
    }

    /// Eigenvalue of `τ ↦ *(τ∧φ)` on the 14-dimensional summand of `Λ²`.
    pub fn w14_eigenvalue(&self) -> f64 {
        self.proj.w14_eigenvalue
    }

    pub fn w7_eigenvalue(&self) -> f64 {
        self.proj.w7_eigenvalue
    }

    /// Scalar `c` with `⅓*((*(v∧ψ))∧ψ) = c·v`.
    pub fn tau1_scale(&self) -> f64 {
        self.proj.tau1_scale
    }

    /// Orthogonal projection of a 2-form onto the 14-dimensional summand.
    pub fn project_w2(&self, a: &Multivector) -> Multivector {
        let v = DVector::from_vec(a.to_orthonormal(&self.metric));
        let p = &self.proj.w14 * v;
        Multivector::from_orthonormal(DIM, 2, p.as_slice(), &self.metric)
    }

    /// Orthogonal projection of a 3-form onto the 27-dimensional summand.
    pub fn project_w3(&self, a: &Multivector) -> Multivector {
        let v = DVector::from_vec(a.to_orthonormal(&self.metric));
        let p = &self.proj.w27 * v;
        Multivector::from_orthonormal(DIM, 3, p.as_slice(), &self.metric)
    }

    /// `(dφ, dψ)` assembled from torsion forms by the classification equations.
    pub fn reconstruct(&self, t: &TorsionForms) -> (Multivector, Multivector) {
        let dphi = self
            .psi
            .scale(t.tau0)
            .add(&t.tau1.wedge(&self.phi).scale(0.75))
            .add(&self.hodge(&t.tau3));
        let dpsi = t.tau1.wedge(&self.psi).add(&t.tau2.wedge(&self.phi));
        (dphi, dpsi)
    }
}

fn to_matrix(cols: Vec<Vec<f64>>) -> DMatrix<f64> {
    let (r, c) = (cols[0].len(), cols.len());
    DMatrix::from_fn(r, c, |i, j| cols[j][i])
}

fn projectors(phi: &Multivector, psi: &Multivector, metric: &[f64; DIM]) -> GeomResult<Projectors> {
    let n2 = crate::exterior::binomial(DIM, 2);
    let mut cols = Vec::with_capacity(n2);
    for i in 0..n2 {
        let mut v = vec![0.0; n2];
        v[i] = 1.0;
        let a = Multivector::from_orthonormal(DIM, 2, &v, metric);
        cols.push(a.wedge(phi).hodge(metric, 1)?.to_orthonormal(metric));
    }
    let t = to_matrix(cols);
    let t = (&t + t.transpose()) * 0.5;
    let eig = SymmetricEigen::new(t);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    let mid = vals[n2 / 2];
    let in14: Vec<usize> = (0..n2)
        .filter(|&i| (eig.eigenvalues[i] - mid).abs() < 1e-8 * (1.0 + mid.abs()))
        .collect();
    if in14.len() != 14 {
        return Err(GeomError::DegenerateForm { rank: in14.len() });
    }
    let w14_eigenvalue = in14.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / 14.0;
    let w7_eigenvalue = (0..n2)
        .filter(|i| !in14.contains(i))
        .map(|i| eig.eigenvalues[i])
        .sum::<f64>()
        / 7.0;
    let mut w14 = DMatrix::zeros(n2, n2);
    for &i in &in14 {
        let v = eig.eigenvectors.column(i);
        w14 += &v * v.transpose();
    }

    let n3 = crate::exterior::binomial(DIM, 3);
    let mut rows = Vec::with_capacity(n3);
    for i in 0..n3 {
        let mut v = vec![0.0; n3];
        v[i] = 1.0;
        let a = Multivector::from_orthonormal(DIM, 3, &v, metric);
        let mut col = a.wedge(phi).to_orthonormal(metric);
        col.extend(a.wedge(psi).to_orthonormal(metric));
        rows.push(col);
    }
    let m = to_matrix(rows);
    let gram = &m * m.transpose();
    let inv = gram.try_inverse().ok_or(GeomError::DegenerateForm { rank: 0 })?;
    let w27 = DMatrix::identity(n3, n3) - m.transpose() * inv * &m;

    let v = Multivector::basis(DIM, &[1]);
    let k = v
        .wedge(psi)
        .hodge(metric, 1)?
        .wedge(psi)
        .hodge(metric, 1)?
        .scale(1.0 / 3.0);
    let tau1_scale = k.get(&[1]);

    Ok(Projectors {
        w14,
        w14_eigenvalue,
        w7_eigenvalue,
        w27,
        tau1_scale,
    })
}

/// Signature of the bilinear form induced by a 3-form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Signature {
    /// Definite, the G2 case.
    Riemannian,
    /// Signature (3, 4), the split case.
    Split,
    /// Any other nondegenerate signature `(positive, negative)`.
    Other(usize, usize),
}

#[derive(Clone, Debug)]
pub struct RecoveredMetric {
    pub gram: DMatrix<f64>,
    pub m: f64,
    pub signature: Signature,
    /// Sign `σ` in `B(u, v) = 6σ·m·g(u, v)`.
    pub sign: f64,
}

/// `B(u, v)` = coefficient of `(u⌟φ)∧(v⌟φ)∧φ` against `o`.
pub fn bilinear_form(phi: &Multivector, o: &Multivector) -> GeomResult<DMatrix<f64>> {
    if phi.dim() != DIM || phi.degree() != 3 {
        return Err(GeomError::DegreeMismatch {
            expected: 3,
            got: phi.degree(),
        });
    }
    let ot = o.top();
    if ot == 0.0 {
        return Err(GeomError::DegreeMismatch {
            expected: DIM,
            got: o.degree(),
        });
    }
    let contractions: Vec<Multivector> = (0..DIM)
        .map(|i| {
            let mut v = [0.0; DIM];
            v[i] = 1.0;
            phi.interior(&v)
        })
        .collect::<GeomResult<_>>()?;
    let mut b = DMatrix::zeros(DIM, DIM);
    for i in 0..DIM {
        for j in i..DIM {
            let v = contractions[i].wedge(&contractions[j]).wedge(phi).top() / ot;
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    Ok(b)
}

/// Recovers `g_φ` and `m` from `φ` and an orientation form.
pub fn metric_from_phi(phi: &Multivector, o: &Multivector) -> GeomResult<RecoveredMetric> {
    let b = bilinear_form(phi, o)?;
    let eig = SymmetricEigen::new(b.clone());
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let thresh = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let pos = eig.eigenvalues.iter().filter(|&&x| x > thresh).count();
    let neg = eig.eigenvalues.iter().filter(|&&x| x < -thresh).count();
    if pos + neg < DIM {
        return Err(GeomError::DegenerateForm { rank: pos + neg });
    }
    let (signature, sign) = match (pos, neg) {
        (7, 0) => (Signature::Riemannian, 1.0),
        (0, 7) => (Signature::Riemannian, -1.0),
        (3, 4) => (Signature::Split, 1.0),
        (4, 3) => (Signature::Split, -1.0),
        (p, q) => (Signature::Other(p, q), 1.0),
    };
    let det = eig.eigenvalues.iter().product::<f64>().abs();
    let m = (det / 6f64.powi(7)).powf(1.0 / 9.0);
    let gram = b / (6.0 * sign * m);
    Ok(RecoveredMetric {
        gram,
        m,
        signature,
        sign,
    })
}

/// The four torsion forms with reconstruction diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionForms {
    pub tau0: f64,
    pub tau1: Multivector,
    pub tau2: Multivector,
    pub tau3: Multivector,
    /// `‖dφ − τ0ψ − ¾τ1∧φ − *τ3‖`.
    pub residual_dphi: f64,
    /// `‖dψ − τ1∧ψ − τ2∧φ‖`.
    pub residual_dpsi: f64,
    metric: [f64; DIM],
}

impl TorsionForms {
    pub fn new(tau0: f64, tau1: Multivector, tau2: Multivector, tau3: Multivector, metric: [f64; DIM]) -> Self {
        TorsionForms {
            tau0,
            tau1,
            tau2,
            tau3,
            residual_dphi: 0.0,
            residual_dpsi: 0.0,
            metric,
        }
    }

    pub fn zero(metric: [f64; DIM]) -> Self {
        TorsionForms::new(
            0.0,
            Multivector::zeros(DIM, 1),
            Multivector::zeros(DIM, 2),
            Multivector::zeros(DIM, 3),
            metric,
        )
    }

    /// Norms `(|τ0|, ‖τ1‖, ‖τ2‖, ‖τ3‖)` in the induced metric.
    pub fn norms(&self) -> [f64; 4] {
        [
            self.tau0.abs(),
            self.tau1.norm_with(&self.metric),
            self.tau2.norm_with(&self.metric),
            self.tau3.norm_with(&self.metric),
        ]
    }

    /// Largest coefficient difference against another decomposition.
    pub fn max_difference(&self, o: &TorsionForms) -> f64 {
        [
            (self.tau0 - o.tau0).abs(),
            self.tau1.sub(&o.tau1).max_abs(),
            self.tau2.sub(&o.tau2).max_abs(),
            self.tau3.sub(&o.tau3).max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// `‖τ2∧φ − c·*τ2‖` with `c` the W14 eigenvalue.
    pub fn w2_residual(&self, s: &G2Structure) -> f64 {
        s.norm(
            &self
                .tau2
                .wedge(&s.phi)
                .sub(&s.hodge(&self.tau2).scale(s.w14_eigenvalue())),
        )
    }

    /// `‖τ3∧φ‖ + ‖τ3∧ψ‖`.
    pub fn w3_residual(&self, s: &G2Structure) -> f64 {
        s.norm(&self.tau3.wedge(&s.phi)) + s.norm(&self.tau3.wedge(&s.psi))
    }
}

/// Splits `(dφ, dψ)`, given in the adapted basis of `s`, into torsion forms.
/// Residuals are recorded but not enforced.
pub fn torsion_components(s: &G2Structure, dphi: &Multivector, dpsi: &Multivector) -> GeomResult<TorsionForms> {
    if dphi.dim() != DIM || dphi.degree() != 4 {
        return Err(GeomError::DegreeMismatch {
            expected: 4,
            got: dphi.degree(),
        });
    }
    if dpsi.dim() != DIM || dpsi.degree() != 5 {
        return Err(GeomError::DegreeMismatch {
            expected: 5,
            got: dpsi.degree(),
        });
    }
    let tau0 = dphi.wedge(&s.phi).top() / (7.0 * s.m);
    let tau1 = s
        .hodge(&s.hodge(dpsi).wedge(&s.psi))
        .scale(1.0 / (3.0 * s.tau1_scale()));
    let rest = dpsi.sub(&tau1.wedge(&s.psi));
    let tau2 = s.project_w2(&s.hodge(&rest).scale(1.0 / s.w14_eigenvalue()));
    let tau3_raw = s.hodge(&dphi.sub(&s.psi.scale(tau0)).sub(&tau1.wedge(&s.phi).scale(0.75)));
    let tau3 = s.project_w3(&tau3_raw);
    let mut t = TorsionForms::new(tau0, tau1, tau2, tau3, s.metric);
    let (rphi, rpsi) = s.reconstruct(&t);
    t.residual_dphi = s.norm(&dphi.sub(&rphi));
    t.residual_dpsi = s.norm(&dpsi.sub(&rpsi));
    Ok(t)
}

/// [`torsion_components`], failing when either reconstruction residual exceeds `tol`.
pub fn torsion_decompose(
    s: &G2Structure,
    dphi: &Multivector,
    dpsi: &Multivector,
    tol: f64,
) -> GeomResult<TorsionForms> {
    let t = torsion_components(s, dphi, dpsi)?;
    let residual = t.residual_dphi.max(t.residual_dpsi);
    if residual > tol {
        return Err(GeomError::ResidualExceeded {
            check: "torsion reconstruction",
            residual,
            tolerance: tol,
        });
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorsionClass {
    W0,
    W1,
    W2,
    W3,
}

impl fmt::Display for TorsionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}", *self as u8)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Classification {
    pub classes: Vec<TorsionClass>,
    pub parallel: bool,
    pub calibrated: bool,
    pub cocalibrated: bool,
    pub nearly_parallel_candidate: bool,
}

impl Classification {
    /// Classification from the norms `(|τ0|, ‖τ1‖, ‖τ2‖, ‖τ3‖)`.
    pub fn from_norms(norms: [f64; 4], tol: f64) -> Self {
        let all = [TorsionClass::W0, TorsionClass::W1, TorsionClass::W2, TorsionClass::W3];
        let present: Vec<bool> = norms.iter().map(|&n| n > tol).collect();
        let classes: Vec<TorsionClass> = all.iter().zip(&present).filter(|(_, &p)| p).map(|(c, _)| *c).collect();
        Classification {
            parallel: classes.is_empty(),
            calibrated: !present[0] && !present[1] && !present[3],
            cocalibrated: !present[1] && !present[2],
            nearly_parallel_candidate: classes == [TorsionClass::W0],
            classes,
        }
    }

    pub fn pure(&self) -> Option<TorsionClass> {
        match self.classes.as_slice() {
            [c] => Some(*c),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        if self.parallel {
            return "parallel".to_string();
        }
        let mut parts = Vec::new();
        match self.pure() {
            Some(c) => parts.push(format!("pure {c}")),
            None => parts.push(self.classes.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("+")),
        }
        if self.nearly_parallel_candidate {
            parts.push("nearly parallel candidate".into());
        }
        if self.cocalibrated {
            parts.push("cocalibrated".into());
        }
        parts.push(
            if self.calibrated {
                "calibrated"
            } else {
                "calibrated: no"
            }
            .into(),
        );
        parts.join(", ")
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn classify(t: &TorsionForms, tol: f64) -> Classification {
    Classification::from_norms(t.norms(), tol)
}
