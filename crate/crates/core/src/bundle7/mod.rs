//! G2 structures on the 7-dimensional bundles over a 4-dimensional model.
//!
//! Chart labels `1..=3` are fiber directions and `4..=7` base directions; jet
//! variables `0..3` and `3..7` correspond.

pub mod pchart;
pub mod profile;
pub mod radial;
pub mod so3;
pub mod xchart;

pub use pchart::{build_chart_p, ChartP, PPoint};
pub use profile::{bs_profile, lemma_check, LemmaPair, LemmaReport, Profile, RadialFn};
pub use radial::{geodesic_trace, length_midpoint, length_of_radius, radial_geometry, GeodesicTrace, RadialGeometry};
pub use xchart::{build_chart_x, ChartX, FiberPointX, XPoint};

use nalgebra::SMatrix;

use crate::error::{GeomError, GeomResult};
use crate::exterior::{MatrixForm, Multivector};
use crate::g2point::DIM;
use crate::jet::Jet;

const BASE_VARS: [usize; 4] = [3, 4, 5, 6];
const BASE_LABELS: [usize; 4] = [4, 5, 6, 7];

/// A base jet re-expressed in the 7 chart variables.
pub fn lift_jet(j: &Jet) -> Jet {
    j.embed(DIM, &BASE_VARS)
}

/// A base form pulled back to the 7-chart.
pub fn lift_form(a: &Multivector<Jet>) -> Multivector<Jet> {
    a.map(lift_jet).embed(DIM, &BASE_LABELS)
}

pub fn lift_matrix(m: &MatrixForm<Jet>) -> MatrixForm<Jet> {
    m.map(lift_form)
}

/// A base-frame value placed on the horizontal labels.
pub fn horizontal(a: &Multivector) -> Multivector {
    a.embed(DIM, &BASE_LABELS)
}

/// Fiber coordinates as order-`order` jets in the 7 chart variables.
pub fn fiber_coordinates(v: &[f64; 3], base: &[f64; 4], order: usize) -> (Vec<Jet>, Vec<f64>) {
    let point: Vec<f64> = v.iter().chain(base.iter()).copied().collect();
    let coords = Jet::coordinates(&point, order);
    (coords[..3].to_vec(), point)
}

/// `*_M` on a form supported on the horizontal labels, for the orthonormal base coframe.
/// Vertical components below `1e-12·max|a|` are treated as rounding and dropped.
pub fn star_horizontal(a: &Multivector) -> GeomResult<Multivector> {
    let floor = 1e-12 * a.max_abs().max(1.0);
    let mut base = Multivector::zeros(4, a.degree());
    for (labels, c) in a.terms() {
        if labels.iter().any(|&l| l < 4) {
            if c.abs() <= floor {
                continue;
            }
            return Err(GeomError::InvalidParameter {
                name: "form".into(),
                reason: "has vertical components".into(),
            });
        }
        let l: Vec<usize> = labels.iter().map(|l| l - 3).collect();
        base = base.add(&Multivector::basis_with(4, &l, *c)?);
    }
    Ok(horizontal(&base.hodge(&[1.0; 4], 1)?))
}

/// An adapted coframe `(ε¹, …, ε⁷)` at a point, given by its coordinate-basis values.
#[derive(Clone, Debug)]
pub struct AdaptedFrame {
    /// Row `k` holds `ε^k` in the coordinate basis.
    pub matrix: SMatrix<f64, 7, 7>,
    images: Vec<Multivector>,
}

impl AdaptedFrame {
    pub fn new(covectors: &[Multivector]) -> GeomResult<Self> {
        let m = SMatrix::<f64, 7, 7>::from_fn(|k, j| covectors[k].coeffs()[j]);
        let inv = m.try_inverse().ok_or(GeomError::DegenerateForm { rank: 6 })?;
        // dx^j = Σ_k inv[j][k] ε^k
        let images = (0..DIM)
            .map(|j| Multivector::from_coeffs(DIM, 1, (0..DIM).map(|k| inv[(j, k)]).collect()))
            .collect();
        Ok(AdaptedFrame { matrix: m, images })
    }

    /// Value of a coordinate-basis form in the adapted coframe.
    pub fn express(&self, a: &Multivector) -> Multivector {
        a.substitute(&self.images).expect("seven images")
    }

    pub fn express_jet(&self, a: &Multivector<Jet>) -> Multivector {
        self.express(&a.values())
    }
}

/// `Σ_i x_i ∧ y_i` over two rows of forms.
pub fn dot<T: crate::exterior::Coeff>(x: &[Multivector<T>], y: &[Multivector<T>]) -> Multivector<T> {
    let mut out = x[0].wedge(&y[0]);
    for i in 1..x.len() {
        out = out.add(&x[i].wedge(&y[i]));
    }
    out
}

/// `Σ_i x_i c_i` for scalar coefficients.
pub fn combine(x: &[Multivector], c: &[f64]) -> Multivector {
    let mut out = x[0].scale(c[0]);
    for i in 1..x.len() {
        out = out.add(&x[i].scale(c[i]));
    }
    out
}

/// `(x²x³, x³x¹, x¹x²)`.
pub fn cross<T: crate::exterior::Coeff>(x: &[Multivector<T>]) -> Vec<Multivector<T>> {
    vec![x[1].wedge(&x[2]), x[2].wedge(&x[0]), x[0].wedge(&x[1])]
}

/// Row times matrix: `(x M)_j = Σ_i x_i ∧ M_ij`.
pub fn row_times<T: crate::exterior::Coeff>(x: &[Multivector<T>], m: &MatrixForm<T>) -> Vec<Multivector<T>> {
    let row = MatrixForm::row(x.to_vec()).expect("row");
    row.mul(m).entries().to_vec()
}

/// Matrix times column of scalars: `(M a^t)_i = Σ_j M_ij a_j`.
pub fn times_column(m: &MatrixForm<f64>, a: &[f64]) -> Vec<Multivector> {
    let (r, c) = m.shape();
    (0..r)
        .map(|i| {
            let e: Vec<Multivector> = (0..c).map(|j| m.get(i, j).clone()).collect();
            combine(&e, a)
        })
        .collect()
}

/// Value and first derivative of a univariate expression in `r`.
pub fn radial_derivative(r: f64, f: impl Fn(&Jet) -> GeomResult<Jet>) -> GeomResult<(f64, f64)> {
    let j = f(&Jet::variable(1, 1, 0, r))?;
    Ok((j.value(), j.partial(0)))
}
