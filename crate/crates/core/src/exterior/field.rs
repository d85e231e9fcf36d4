//! Scalar and form fields on a chart, evaluated as Taylor jets.

use std::fmt;
use std::sync::Arc;

use super::{slots, tables, Multivector};
use crate::error::{GeomError, GeomResult};
use crate::jet::{check_order, Jet};

type ScalarFn = dyn Fn(&[f64], usize) -> GeomResult<Jet> + Send + Sync;
type FormFn = dyn Fn(&[f64], usize) -> GeomResult<Multivector<Jet>> + Send + Sync;

/// A smooth function on a `d`-dimensional chart.
#[derive(Clone)]
pub struct ScalarField {
    arity: usize,
    eval: Arc<ScalarFn>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField(arity={})", self.arity)
    }
}

impl ScalarField {
    /// A field written in jet arithmetic over the coordinate functions.
    pub fn new(arity: usize, f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static) -> Self {
        ScalarField {
            arity,
            eval: Arc::new(move |p, order| Ok(f(&Jet::coordinates(p, order)))),
        }
    }

    /// A field given directly by its jet evaluator.
    pub fn from_jet_fn(arity: usize, f: impl Fn(&[f64], usize) -> GeomResult<Jet> + Send + Sync + 'static) -> Self {
        ScalarField {
            arity,
            eval: Arc::new(f),
        }
    }

    pub fn constant(arity: usize, v: f64) -> Self {
        ScalarField::new(arity, move |_| Jet::constant(v))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn jet(&self, point: &[f64], order: usize) -> GeomResult<Jet> {
        check_point(self.arity, point)?;
        check_order(order)?;
        (self.eval)(point, order)
    }

    pub fn value(&self, point: &[f64]) -> GeomResult<f64> {
        Ok(self.jet(point, 0)?.value())
    }
}

/// A differential `k`-form on a `d`-dimensional chart, in the coordinate coframe.
#[derive(Clone)]
pub struct FormField {
    dim: usize,
    degree: usize,
    eval: Arc<FormFn>,
}

impl fmt::Debug for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormField(dim={}, degree={})", self.dim, self.degree)
    }
}

fn check_point(dim: usize, point: &[f64]) -> GeomResult<()> {
    if point.len() != dim {
        return Err(GeomError::DimensionMismatch {
            expected: dim,
            got: point.len(),
        });
    }
    Ok(())
}

impl FormField {
    pub fn from_fn(
        dim: usize,
        degree: usize,
        f: impl Fn(&[f64], usize) -> GeomResult<Multivector<Jet>> + Send + Sync + 'static,
    ) -> Self {
        FormField {
            dim,
            degree,
            eval: Arc::new(f),
        }
    }

    /// `Σ c_I dx^I` from per-multi-index coefficient fields (labels `1..=dim`).
    pub fn from_coefficients(dim: usize, degree: usize, terms: Vec<(Vec<usize>, ScalarField)>) -> GeomResult<Self> {
        for (labels, c) in &terms {
            if labels.len() != degree {
                return Err(GeomError::DegreeMismatch {
                    expected: degree,
                    got: labels.len(),
                });
            }
            if c.arity() != dim {
                return Err(GeomError::DimensionMismatch {
                    expected: dim,
                    got: c.arity(),
                });
            }
            Multivector::basis_with(dim, labels, 0.0)?;
        }
        Ok(FormField::from_fn(dim, degree, move |p, order| {
            let mut out = Multivector::zeros(dim, degree);
            for (labels, c) in &terms {
                let term = Multivector::basis_with(dim, labels, c.jet(p, order)?)?;
                out = out.add(&term);
            }
            Ok(out)
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient jets of order `order` at `point`.
    pub fn jet(&self, point: &[f64], order: usize) -> GeomResult<Multivector<Jet>> {
        check_point(self.dim, point)?;
        check_order(order)?;
        let out = (self.eval)(point, order)?;
        if out.degree() != self.degree || out.dim() != self.dim {
            return Err(GeomError::DegreeMismatch {
                expected: self.degree,
                got: out.degree(),
            });
        }
        Ok(out)
    }

    pub fn value(&self, point: &[f64]) -> GeomResult<Multivector> {
        Ok(self.jet(point, 0)?.values())
    }

    /// Value of `dα` at `point`.
    pub fn dform(&self, point: &[f64]) -> GeomResult<Multivector> {
        Ok(d(&self.jet(point, 1)?)?.values())
    }

    /// The exterior derivative as a field.
    pub fn d(&self) -> FormField {
        let inner = self.clone();
        FormField::from_fn(self.dim, self.degree + 1, move |p, order| d(&inner.jet(p, order + 1)?))
    }

    pub fn wedge(&self, o: &FormField) -> GeomResult<FormField> {
        if self.dim != o.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                got: o.dim,
            });
        }
        let (a, b) = (self.clone(), o.clone());
        Ok(FormField::from_fn(self.dim, self.degree + o.degree, move |p, order| {
            Ok(a.jet(p, order)?.wedge(&b.jet(p, order)?))
        }))
    }

    pub fn add(&self, o: &FormField) -> GeomResult<FormField> {
        if self.dim != o.dim || self.degree != o.degree {
            return Err(GeomError::DegreeMismatch {
                expected: self.degree,
                got: o.degree,
            });
        }
        let (a, b) = (self.clone(), o.clone());
        Ok(FormField::from_fn(self.dim, self.degree, move |p, order| {
            Ok(a.jet(p, order)?.add(&b.jet(p, order)?))
        }))
    }
}

/// Exterior derivative of a jet-valued form; the result has one order less.
///
/// The coefficient jets must be expressed in the chart's own coordinates
/// (jet variable `i` ↔ basis covector `dx^{i+1}`).
pub fn d(form: &Multivector<Jet>) -> GeomResult<Multivector<Jet>> {
    let (n, k) = (form.dim(), form.degree());
    let mut out = Multivector::zeros(n, k + 1);
    if k + 1 > n {
        return Ok(out);
    }
    let t = tables(n);
    let src = slots(n, k);
    for (&mask, c) in src.iter().zip(form.coeffs()) {
        if c.is_constant() {
            continue;
        }
        if c.nvars() != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: c.nvars(),
            });
        }
        for v in 0..n {
            let bit = 1u8 << v;
            if mask & bit != 0 {
                continue;
            }
            let dc = c.diff(v)?;
            if dc.is_zero() {
                continue;
            }
            let sign = super::reorder_sign(bit, mask);
            let s = t.slot_of[(mask | bit) as usize] as usize;
            let slot = &mut out.coeffs_mut()[s];
            *slot = if sign > 0 { slot.add_jet(&dc) } else { slot.sub_jet(&dc) };
        }
    }
    Ok(out)
}
