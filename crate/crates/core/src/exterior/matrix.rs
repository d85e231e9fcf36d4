//! Matrices whose entries are forms, and the `∨ / ∧` isomorphism between
//! rows of three forms and skew 3×3 matrices.

use super::{Coeff, Multivector};
use crate::error::{GeomError, GeomResult};

/// A `rows × cols` matrix of forms of a common degree on an `n`-space.
///
/// Products contract with the wedge product and no hidden transpositions:
/// `(A·B)(i,j) = Σ_k A(i,k) ∧ B(k,j)`.
#[derive(Clone, PartialEq)]
pub struct MatrixForm<T = f64> {
    rows: usize,
    cols: usize,
    entries: Vec<Multivector<T>>,
}

impl<T: Coeff> std::fmt::Debug for MatrixForm<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MatrixForm")
            .field("shape", &(self.rows, self.cols))
            .field("entries", &self.entries)
            .finish()
    }
}

impl<T: Coeff> MatrixForm<T> {
    pub fn zeros(rows: usize, cols: usize, n: usize, degree: usize) -> Self {
        MatrixForm {
            rows,
            cols,
            entries: vec![Multivector::zeros(n, degree); rows * cols],
        }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Multivector<T>>) -> GeomResult<Self> {
        if entries.len() != rows * cols || entries.is_empty() {
            return Err(GeomError::ShapeMismatch {
                left: (rows, cols),
                right: (entries.len(), 1),
            });
        }
        let (n, k) = (entries[0].dim(), entries[0].degree());
        for e in &entries {
            if e.dim() != n {
                return Err(GeomError::DimensionMismatch {
                    expected: n,
                    got: e.dim(),
                });
            }
            if e.degree() != k {
                return Err(GeomError::DegreeMismatch {
                    expected: k,
                    got: e.degree(),
                });
            }
        }
        Ok(MatrixForm { rows, cols, entries })
    }

    /// A `1 × m` row.
    pub fn row(entries: Vec<Multivector<T>>) -> GeomResult<Self> {
        let m = entries.len();
        MatrixForm::from_entries(1, m, entries)
    }

    /// An `m × 1` column.
    pub fn column(entries: Vec<Multivector<T>>) -> GeomResult<Self> {
        let m = entries.len();
        MatrixForm::from_entries(m, 1, entries)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn degree(&self) -> usize {
        self.entries[0].degree()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].dim()
    }

    pub fn get(&self, i: usize, j: usize) -> &Multivector<T> {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Multivector<T>) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Multivector<T>] {
        &self.entries
    }

    pub fn try_mul(&self, o: &Self) -> GeomResult<Self> {
        if self.cols != o.rows {
            return Err(GeomError::ShapeMismatch {
                left: self.shape(),
                right: o.shape(),
            });
        }
        let n = self.dim();
        let k = self.degree() + o.degree();
        let mut out = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = Multivector::zeros(n, k);
                for l in 0..self.cols {
                    acc = acc.add(&self.get(i, l).try_wedge(o.get(l, j))?);
                }
                out.push(acc);
            }
        }
        Ok(MatrixForm {
            rows: self.rows,
            cols: o.cols,
            entries: out,
        })
    }

    /// Matrix product with wedge-multiplied entries. Panics on shape mismatch.
    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("matrix-of-forms product")
    }

    fn zip(&self, o: &Self, f: impl Fn(&Multivector<T>, &Multivector<T>) -> Multivector<T>) -> Self {
        assert_eq!(self.shape(), o.shape(), "matrix-of-forms shapes");
        MatrixForm {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|e| e.scale(s))
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&Multivector<T>) -> Multivector<U>) -> MatrixForm<U> {
        MatrixForm {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        MatrixForm {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn values(&self) -> MatrixForm<f64> {
        self.map(|e| e.values())
    }

    /// The single entry of a `1 × 1` matrix.
    pub fn scalar_entry(&self) -> &Multivector<T> {
        assert_eq!(self.shape(), (1, 1));
        &self.entries[0]
    }
}

impl MatrixForm<f64> {
    /// Largest entry-coefficient magnitude of `A + Aᵗ`.
    pub fn skew_defect(&self) -> f64 {
        self.add(&self.transpose())
            .entries
            .iter()
            .fold(0.0, |m, e| m.max(e.max_abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.max_abs()))
    }
}

/// `α ↦ α̌`: the skew matrix `[[0, −α³, α²], [α³, 0, −α¹], [−α², α¹, 0]]`.
pub fn check<T: Coeff>(a: &[Multivector<T>]) -> GeomResult<MatrixForm<T>> {
    if a.len() != 3 {
        return Err(GeomError::ShapeMismatch {
            left: (1, 3),
            right: (1, a.len()),
        });
    }
    let z = Multivector::zeros(a[0].dim(), a[0].degree());
    let entries = vec![
        z.clone(),
        a[2].neg(),
        a[1].clone(),
        a[2].clone(),
        z.clone(),
        a[0].neg(),
        a[1].neg(),
        a[0].clone(),
        z,
    ];
    MatrixForm::from_entries(3, 3, entries)
}

/// `A ↦ A^∧ = (a₃₂, −a₃₁, a₂₁)`, the left inverse of [`check`].
pub fn hat<T: Coeff>(m: &MatrixForm<T>) -> GeomResult<Vec<Multivector<T>>> {
    if m.shape() != (3, 3) {
        return Err(GeomError::ShapeMismatch {
            left: (3, 3),
            right: m.shape(),
        });
    }
    Ok(vec![m.get(2, 1).clone(), m.get(2, 0).neg(), m.get(1, 0).clone()])
}
