//! Dense exterior algebra on `n ≤ 8` dimensional spaces.
//!
//! A [`Multivector`] of degree `k` stores one coefficient per strictly
//! increasing multi-index, i.e. `C(n, k)` slots. Basis covectors are labelled
//! `1..=n`. Coefficients are generic over [`Coeff`], so the same code handles
//! pointwise values (`f64`) and Taylor jets of form fields ([`Jet`]).

mod field;
mod matrix;

pub use field::{d, FormField, ScalarField};
pub use matrix::{check, hat, MatrixForm};

use std::fmt;
use std::sync::OnceLock;

use crate::error::{GeomError, GeomResult};
use crate::jet::Jet;

pub const MAX_DIM: usize = 8;

/// Coefficient ring for multivectors.
pub trait Coeff: Clone + Send + Sync + fmt::Debug + 'static {
    fn zero() -> Self;
    fn from_f64(v: f64) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn scaled(&self, s: f64) -> Self;
    fn value(&self) -> f64;
    fn is_exact_zero(&self) -> bool;
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn scaled(&self, s: f64) -> Self {
        self * s
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Coeff for Jet {
    fn zero() -> Self {
        Jet::constant(0.0)
    }
    fn from_f64(v: f64) -> Self {
        Jet::constant(v)
    }
    fn plus(&self, o: &Self) -> Self {
        self.add_jet(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub_jet(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul_jet(o)
    }
    fn scaled(&self, s: f64) -> Self {
        self.scale(s)
    }
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

/// Index tables for one ambient dimension.
struct Tables {
    // masks of each degree, increasing order
    slots: Vec<Vec<u8>>,
    // mask -> slot within its degree
    slot_of: [u16; 256],
    // wedge[k1][k2] = (slot a, slot b, slot out, sign)
    wedge: Vec<Vec<Vec<(u16, u16, u16, i8)>>>,
}

fn reorder_sign(a: u8, b: u8) -> i8 {
    // sign of e^A ∧ e^B relative to e^(A∪B): count pairs i∈A, j∈B with i > j
    let mut inv = 0u32;
    for i in 0..8 {
        if a & (1 << i) != 0 {
            inv += (b & ((1u16 << i) - 1) as u8).count_ones();
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

fn build_tables(n: usize) -> Tables {
    let mut slots = vec![Vec::new(); n + 1];
    let mut slot_of = [u16::MAX; 256];
    let full: u16 = 1 << n;
    // increasing lexicographic order of the sorted index lists
    let mut masks: Vec<u8> = (0..full).map(|m| m as u8).collect();
    masks.sort_by_key(|&m| {
        let mut idx: Vec<u32> = (0..8).filter(|i| m & (1 << i) != 0).collect();
        idx.resize(8, 99);
        (m.count_ones(), idx)
    });
    for m in masks {
        let k = m.count_ones() as usize;
        slot_of[m as usize] = slots[k].len() as u16;
        slots[k].push(m);
    }
    let mut wedge = vec![vec![Vec::new(); n + 1]; n + 1];
    for k1 in 0..=n {
        for k2 in 0..=(n - k1) {
            let mut t = Vec::new();
            for (ia, &a) in slots[k1].iter().enumerate() {
                for (ib, &b) in slots[k2].iter().enumerate() {
                    if a & b != 0 {
                        continue;
                    }
                    let out = slot_of[(a | b) as usize];
                    t.push((ia as u16, ib as u16, out, reorder_sign(a, b)));
                }
            }
            wedge[k1][k2] = t;
        }
    }
    Tables { slots, slot_of, wedge }
}

fn slots(n: usize, k: usize) -> &'static [u8] {
    tables(n).slots.get(k).map_or(&[], |v| v.as_slice())
}

fn tables(n: usize) -> &'static Tables {
    static CACHE: OnceLock<Vec<Tables>> = OnceLock::new();
    &CACHE.get_or_init(|| (0..=MAX_DIM).map(build_tables).collect())[n]
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn mask_of(labels: &[usize], n: usize) -> GeomResult<Option<(u8, i8)>> {
    let mut mask = 0u8;
    let mut sign = 1i8;
    for &l in labels {
        if l == 0 || l > n {
            return Err(GeomError::DimensionMismatch { expected: n, got: l });
        }
        let bit = 1u8 << (l - 1);
        if mask & bit != 0 {
            return Ok(None);
        }
        sign *= reorder_sign(mask, bit);
        mask |= bit;
    }
    Ok(Some((mask, sign)))
}

fn labels_of(mask: u8) -> Vec<usize> {
    (0..8).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

/// A homogeneous element of `Λ^k` over an `n`-dimensional space.
#[derive(Clone, PartialEq)]
pub struct Multivector<T = f64> {
    n: usize,
    k: usize,
    c: Vec<T>,
}

impl<T: Coeff> fmt::Debug for Multivector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ^{}(R^{})[", self.k, self.n)?;
        let mut first = true;
        for (labels, c) in self.terms() {
            if c.is_exact_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{:?} e{:?}", c, labels)?;
        }
        write!(f, "]")
    }
}

impl<T: Coeff> Multivector<T> {
    pub fn zeros(n: usize, k: usize) -> Self {
        assert!(n <= MAX_DIM, "ambient dimension {n} exceeds {MAX_DIM}");
        Multivector {
            n,
            k,
            c: vec![T::zero(); binomial(n, k)],
        }
    }

    pub fn scalar(n: usize, v: T) -> Self {
        Multivector { n, k: 0, c: vec![v] }
    }

    /// `coef · e^{labels}`, with labels in any order (sign-normalized).
    pub fn basis_with(n: usize, labels: &[usize], coef: T) -> GeomResult<Self> {
        let mut out = Multivector::zeros(n, labels.len());
        if labels.len() > n {
            return Ok(out);
        }
        if let Some((mask, sign)) = mask_of(labels, n)? {
            let s = tables(n).slot_of[mask as usize] as usize;
            out.c[s] = coef.scaled(sign as f64);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[T] {
        &self.c
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.c
    }

    /// Coefficient of `e^{labels}` (any order, sign-normalized).
    pub fn get(&self, labels: &[usize]) -> T {
        if labels.len() != self.k {
            return T::zero();
        }
        match mask_of(labels, self.n) {
            Ok(Some((mask, sign))) => self.c[tables(self.n).slot_of[mask as usize] as usize].scaled(sign as f64),
            _ => T::zero(),
        }
    }

    pub fn set(&mut self, labels: &[usize], v: T) {
        assert_eq!(labels.len(), self.k);
        let (mask, sign) = mask_of(labels, self.n)
            .expect("label in range")
            .expect("distinct labels");
        self.c[tables(self.n).slot_of[mask as usize] as usize] = v.scaled(sign as f64);
    }

    /// `(sorted labels, coefficient)` for every slot.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &T)> + '_ {
        slots(self.n, self.k)
            .iter()
            .zip(&self.c)
            .map(|(&m, c)| (labels_of(m), c))
    }

    fn check_same(&self, o: &Self) -> GeomResult<()> {
        if self.n != o.n {
            return Err(GeomError::DimensionMismatch {
                expected: self.n,
                got: o.n,
            });
        }
        if self.k != o.k {
            return Err(GeomError::DegreeMismatch {
                expected: self.k,
                got: o.k,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> GeomResult<Self> {
        self.check_same(o)?;
        Ok(Multivector {
            n: self.n,
            k: self.k,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a.plus(b)).collect(),
        })
    }

    /// Sum of two forms of equal shape. Panics on shape mismatch.
    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("multivector sum")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check_same(o).expect("multivector difference");
        Multivector {
            n: self.n,
            k: self.k,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a.minus(b)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Multivector {
            n: self.n,
            k: self.k,
            c: self.c.iter().map(|a| a.scaled(s)).collect(),
        }
    }

    /// Multiplication by a 0-form coefficient.
    pub fn times(&self, s: &T) -> Self {
        Multivector {
            n: self.n,
            k: self.k,
            c: self.c.iter().map(|a| a.times(s)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn try_wedge(&self, o: &Self) -> GeomResult<Self> {
        if self.n != o.n {
            return Err(GeomError::DimensionMismatch {
                expected: self.n,
                got: o.n,
            });
        }
        let k = self.k + o.k;
        if k > self.n {
            return Ok(Multivector::zeros(self.n, k));
        }
        let mut out: Self = Multivector::zeros(self.n, k);
        let table = &tables(self.n).wedge[self.k][o.k];
        let az: Vec<bool> = self.c.iter().map(|x| x.is_exact_zero()).collect();
        let bz: Vec<bool> = o.c.iter().map(|x| x.is_exact_zero()).collect();
        for &(ia, ib, io, sign) in table {
            let (ia, ib, io) = (ia as usize, ib as usize, io as usize);
            if az[ia] || bz[ib] {
                continue;
            }
            let p = self.c[ia].times(&o.c[ib]);
            out.c[io] = if sign > 0 {
                out.c[io].plus(&p)
            } else {
                out.c[io].minus(&p)
            };
        }
        Ok(out)
    }

    /// Exterior product. Panics if the ambient dimensions differ.
    pub fn wedge(&self, o: &Self) -> Self {
        self.try_wedge(o).expect("wedge of forms on different spaces")
    }

    /// Contraction with a vector given by its components in the dual basis.
    pub fn interior(&self, v: &[f64]) -> GeomResult<Self> {
        if v.len() != self.n {
            return Err(GeomError::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        if self.k == 0 {
            return Ok(Multivector::zeros(self.n, 0));
        }
        let t = tables(self.n);
        let mut out: Self = Multivector::zeros(self.n, self.k - 1);
        for (&m, c) in slots(self.n, self.k).iter().zip(&self.c) {
            if c.is_exact_zero() {
                continue;
            }
            let mut pos = 0;
            for i in 0..self.n {
                if m & (1 << i) == 0 {
                    continue;
                }
                if v[i] != 0.0 {
                    let rest = m & !(1 << i);
                    let s = t.slot_of[rest as usize] as usize;
                    let sgn = if pos % 2 == 0 { v[i] } else { -v[i] };
                    out.c[s] = out.c[s].plus(&c.scaled(sgn));
                }
                pos += 1;
            }
        }
        Ok(out)
    }

    /// Hodge star for the diagonal metric `diag(g)` and orientation `±1`
    /// (the sign of the basis volume form `e^{1..n}`).
    pub fn hodge(&self, metric_diag: &[f64], orientation: i8) -> GeomResult<Self> {
        if metric_diag.len() != self.n {
            return Err(GeomError::DimensionMismatch {
                expected: self.n,
                got: metric_diag.len(),
            });
        }
        if self.k > self.n {
            return Err(GeomError::DegreeMismatch {
                expected: self.n,
                got: self.k,
            });
        }
        if let Some((i, &v)) = metric_diag.iter().enumerate().find(|(_, &g)| !(g > 0.0)) {
            return Err(GeomError::NonPositiveMetric { index: i + 1, value: v });
        }
        let t = tables(self.n);
        let full: u8 = ((1u16 << self.n) - 1) as u8;
        let sqrt_det: f64 = metric_diag.iter().product::<f64>().sqrt();
        let mut out: Self = Multivector::zeros(self.n, self.n - self.k);
        for (&m, c) in slots(self.n, self.k).iter().zip(&self.c) {
            if c.is_exact_zero() {
                continue;
            }
            let comp = full & !m;
            let inv_norm: f64 = (0..self.n)
                .filter(|i| m & (1 << i) != 0)
                .map(|i| 1.0 / metric_diag[i])
                .product();
            let f = reorder_sign(m, comp) as f64 * inv_norm * sqrt_det * orientation as f64;
            let s = t.slot_of[comp as usize] as usize;
            out.c[s] = out.c[s].plus(&c.scaled(f));
        }
        Ok(out)
    }

    /// Linear substitution of basis covectors: `e^i ↦ images[i-1]` (1-forms on
    /// a possibly different space), extended multiplicatively.
    pub fn substitute(&self, images: &[Multivector<T>]) -> GeomResult<Self> {
        if images.len() != self.n {
            return Err(GeomError::DimensionMismatch {
                expected: self.n,
                got: images.len(),
            });
        }
        let m = images.first().map_or(self.n, |x| x.n);
        if let Some(bad) = images.iter().find(|x| x.k != 1 || x.n != m) {
            return Err(GeomError::DegreeMismatch {
                expected: 1,
                got: bad.k,
            });
        }
        if self.k > m {
            return Ok(Multivector::zeros(m, self.k));
        }
        let mut out = Multivector::zeros(m, self.k);
        for (&mask, c) in slots(self.n, self.k).iter().zip(&self.c) {
            if c.is_exact_zero() {
                continue;
            }
            let mut acc = Multivector::scalar(m, c.clone());
            for i in 0..self.n {
                if mask & (1 << i) != 0 {
                    acc = acc.wedge(&images[i]);
                }
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Re-labels the basis into a larger space: `e^i ↦ e^{map[i-1]}`.
    pub fn embed(&self, n_new: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.n);
        let mut out: Self = Multivector::zeros(n_new, self.k);
        for (&mask, c) in slots(self.n, self.k).iter().zip(&self.c) {
            let labels: Vec<usize> = labels_of(mask).iter().map(|&l| map[l - 1]).collect();
            let (nm, sign) = mask_of(&labels, n_new).unwrap().expect("injective label map");
            let s = tables(n_new).slot_of[nm as usize] as usize;
            out.c[s] = out.c[s].plus(&c.scaled(sign as f64));
        }
        out
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Multivector<U> {
        Multivector {
            n: self.n,
            k: self.k,
            c: self.c.iter().map(f).collect(),
        }
    }

    /// Pointwise value of a jet-valued form.
    pub fn values(&self) -> Multivector<f64> {
        self.map(|c| c.value())
    }

    /// Coefficient of the top form `e^{1..n}` (zero unless `k = n`).
    pub fn top(&self) -> T {
        if self.k == self.n {
            self.c[0].clone()
        } else {
            T::zero()
        }
    }
}

impl Multivector<f64> {
    /// `e^{labels}` with unit coefficient.
    pub fn basis(n: usize, labels: &[usize]) -> Self {
        Multivector::basis_with(n, labels, 1.0).expect("labels in range")
    }

    pub fn from_terms(n: usize, k: usize, terms: &[(f64, &[usize])]) -> Self {
        let mut out = Multivector::zeros(n, k);
        for (c, l) in terms {
            assert_eq!(l.len(), k);
            out = out.add(&Multivector::basis_with(n, l, *c).expect("labels in range"));
        }
        out
    }

    pub fn from_coeffs(n: usize, k: usize, c: Vec<f64>) -> Self {
        assert_eq!(c.len(), binomial(n, k));
        Multivector { n, k, c }
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `⟨a, b⟩` for the diagonal metric.
    pub fn inner(&self, o: &Self, metric_diag: &[f64]) -> f64 {
        let w = self.orthonormal_weights(metric_diag);
        self.c.iter().zip(&o.c).zip(&w).map(|((a, b), w)| a * b * w * w).sum()
    }

    pub fn norm_with(&self, metric_diag: &[f64]) -> f64 {
        self.inner(self, metric_diag).max(0.0).sqrt()
    }

    /// Per-slot factors `Π_{i∈I} g_ii^{-1/2}` turning coefficients into
    /// components in the orthonormal coframe.
    pub fn orthonormal_weights(&self, metric_diag: &[f64]) -> Vec<f64> {
        slots(self.n, self.k)
            .iter()
            .map(|&m| {
                (0..self.n)
                    .filter(|i| m & (1 << i) != 0)
                    .map(|i| metric_diag[i].powf(-0.5))
                    .product()
            })
            .collect()
    }

    pub fn to_orthonormal(&self, metric_diag: &[f64]) -> Vec<f64> {
        let w = self.orthonormal_weights(metric_diag);
        self.c.iter().zip(&w).map(|(a, w)| a * w).collect()
    }

    pub fn from_orthonormal(n: usize, k: usize, v: &[f64], metric_diag: &[f64]) -> Self {
        let z = Multivector::<f64>::zeros(n, k);
        let w = z.orthonormal_weights(metric_diag);
        Multivector {
            n,
            k,
            c: v.iter().zip(&w).map(|(a, w)| a / w).collect(),
        }
    }
}
