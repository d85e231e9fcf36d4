//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] stores the Taylor coefficients `c_α = ∂^α f(p) / α!` of a scalar
//! function around a point `p`, for every multi-index `|α| ≤ order`, in `nvars`
//! variables. Arithmetic is exact up to truncation, so derivatives obtained from
//! a jet carry no discretization error. Differentiating a jet lowers its order
//! by one; binary operations between jets of different orders truncate to the
//! smaller one.
//!
//! A jet with zero variables is a plain constant and combines with any other
//! jet by broadcasting.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::GeomError;

/// Largest number of chart variables a jet may carry.
pub const MAX_VARS: usize = 8;
/// Largest Taylor order supported.
pub const MAX_ORDER: usize = 3;

type Exponents = [u8; MAX_VARS];

/// Monomial bookkeeping shared by all jets of one `(nvars, order)` shape.
pub struct Layout {
    nvars: usize,
    order: usize,
    monos: Vec<Exponents>,
    degree: Vec<u8>,
    mul: Vec<(u16, u16, u16)>,
    // per variable: (source slot, target slot in the order-1 layout, factor)
    deriv: Vec<Vec<(u16, u16, f64)>>,
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Layout {
        let mut monos: Vec<Exponents> = Vec::new();
        for deg in 0..=order {
            let mut cur = [0u8; MAX_VARS];
            enumerate(nvars, deg, 0, &mut cur, &mut monos);
        }
        let degree: Vec<u8> = monos.iter().map(|m| m.iter().sum()).collect();
        let find = |m: &Exponents, list: &[Exponents]| list.iter().position(|x| x == m);

        let mut mul = Vec::new();
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                if (degree[i] + degree[j]) as usize > order {
                    continue;
                }
                let mut s = [0u8; MAX_VARS];
                for v in 0..MAX_VARS {
                    s[v] = a[v] + b[v];
                }
                let k = find(&s, &monos).expect("monomial closed under product");
                mul.push((i as u16, j as u16, k as u16));
            }
        }

        let mut deriv = vec![Vec::new(); nvars];
        if order > 0 {
            let lower: Vec<Exponents> = monos
                .iter()
                .zip(&degree)
                .filter(|(_, &d)| (d as usize) < order)
                .map(|(m, _)| *m)
                .collect();
            for (v, table) in deriv.iter_mut().enumerate() {
                for (i, m) in monos.iter().enumerate() {
                    if m[v] == 0 {
                        continue;
                    }
                    let mut t = *m;
                    t[v] -= 1;
                    let k = find(&t, &lower).expect("lowered monomial present");
                    table.push((i as u16, k as u16, m[v] as f64));
                }
            }
        }

        Layout {
            nvars,
            order,
            monos,
            degree,
            mul,
            deriv,
        }
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    fn index_of(&self, m: &Exponents) -> Option<usize> {
        self.monos.iter().position(|x| x == m)
    }

    /// Number of coefficients of total degree at most `order`.
    fn prefix(&self, order: usize) -> usize {
        self.degree.iter().take_while(|&&d| d as usize <= order).count()
    }
}

fn enumerate(nvars: usize, remaining: usize, pos: usize, cur: &mut Exponents, out: &mut Vec<Exponents>) {
    if nvars == 0 {
        if remaining == 0 {
            out.push(*cur);
        }
        return;
    }
    if pos == nvars - 1 {
        cur[pos] = remaining as u8;
        out.push(*cur);
        cur[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e as u8;
        enumerate(nvars, remaining - e, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

fn layouts() -> &'static [Layout] {
    static CACHE: OnceLock<Vec<Layout>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let mut v = Vec::new();
        for n in 0..=MAX_VARS {
            for p in 0..=MAX_ORDER {
                v.push(Layout::build(n, if n == 0 { 0 } else { p }));
            }
        }
        v
    })
}

fn layout(nvars: usize, order: usize) -> &'static Layout {
    debug_assert!(nvars <= MAX_VARS && order <= MAX_ORDER);
    &layouts()[nvars * (MAX_ORDER + 1) + order]
}

/// Checks that an order can be served, reporting the missing order otherwise.
pub fn check_order(requested: usize) -> Result<(), GeomError> {
    if requested > MAX_ORDER {
        Err(GeomError::JetOrderUnavailable {
            requested,
            max: MAX_ORDER,
        })
    } else {
        Ok(())
    }
}

#[derive(Clone)]
pub struct Jet {
    layout: &'static Layout,
    c: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            write!(f, "Jet({})", self.c[0])
        } else {
            write!(
                f,
                "Jet[n={}, order={}]({:?})",
                self.layout.nvars, self.layout.order, self.c
            )
        }
    }
}

impl Jet {
    pub fn constant(value: f64) -> Jet {
        Jet {
            layout: layout(0, 0),
            c: vec![value],
        }
    }

    /// The coordinate function `x_var` around a point whose `var` coordinate is `value`.
    pub fn variable(nvars: usize, order: usize, var: usize, value: f64) -> Jet {
        assert!(var < nvars && nvars <= MAX_VARS && order <= MAX_ORDER);
        let l = layout(nvars, order);
        let mut c = vec![0.0; l.len()];
        c[0] = value;
        if order > 0 {
            let mut e = [0u8; MAX_VARS];
            e[var] = 1;
            c[l.index_of(&e).unwrap()] = 1.0;
        }
        Jet { layout: l, c }
    }

    /// Coordinate jets for every variable of a chart point.
    pub fn coordinates(point: &[f64], order: usize) -> Vec<Jet> {
        (0..point.len())
            .map(|i| Jet::variable(point.len(), order, i, point[i]))
            .collect()
    }

    /// Builds a jet from raw Taylor coefficients in layout order.
    pub fn from_coefficients(nvars: usize, order: usize, coeffs: Vec<f64>) -> Jet {
        let l = layout(nvars, order);
        assert_eq!(coeffs.len(), l.len(), "coefficient count");
        Jet { layout: l, c: coeffs }
    }

    pub fn is_constant(&self) -> bool {
        self.layout.nvars == 0
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0.0)
    }

    /// Taylor coefficient of the monomial with the given exponents.
    pub fn taylor(&self, exponents: &[u8]) -> f64 {
        let mut e = [0u8; MAX_VARS];
        e[..exponents.len()].copy_from_slice(exponents);
        if self.is_constant() {
            return if e.iter().all(|&x| x == 0) { self.c[0] } else { 0.0 };
        }
        self.layout.index_of(&e).map_or(0.0, |i| self.c[i])
    }

    /// Partial derivative `∂^α f(p)` for the multi-index `α`.
    pub fn derivative(&self, exponents: &[u8]) -> f64 {
        let fact: f64 = exponents
            .iter()
            .map(|&e| (1..=e as u32).product::<u32>() as f64)
            .product();
        self.taylor(exponents) * fact
    }

    /// First partial derivative with respect to `var` at the base point.
    pub fn partial(&self, var: usize) -> f64 {
        if self.is_constant() || self.order() == 0 {
            return 0.0;
        }
        let mut e = [0u8; MAX_VARS];
        e[var] = 1;
        self.taylor(&e)
    }

    /// Restriction to a lower order.
    pub fn truncate(&self, order: usize) -> Jet {
        if self.is_constant() || order >= self.order() {
            return self.clone();
        }
        let l = layout(self.nvars(), order);
        Jet {
            layout: l,
            c: self.c[..self.layout.prefix(order)].to_vec(),
        }
    }

    /// The jet of `∂f/∂x_var`, one order lower.
    pub fn diff(&self, var: usize) -> Result<Jet, GeomError> {
        if self.is_constant() {
            return Ok(Jet::constant(0.0));
        }
        if self.order() == 0 {
            return Err(GeomError::JetOrderUnavailable { requested: 1, max: 0 });
        }
        let l = layout(self.nvars(), self.order() - 1);
        let mut c = vec![0.0; l.len()];
        for &(src, dst, k) in &self.layout.deriv[var] {
            c[dst as usize] += k * self.c[src as usize];
        }
        Ok(Jet { layout: l, c })
    }

    /// Re-expresses the jet in a chart with `nvars` variables, old variable
    /// `v` becoming new variable `map[v]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Jet {
        if self.is_constant() {
            return self.clone();
        }
        assert_eq!(map.len(), self.nvars());
        let l = layout(nvars, self.order());
        let mut c = vec![0.0; l.len()];
        for (i, m) in self.layout.monos.iter().enumerate() {
            if self.c[i] == 0.0 {
                continue;
            }
            let mut e = [0u8; MAX_VARS];
            for (v, &nv) in map.iter().enumerate() {
                e[nv] += m[v];
            }
            c[l.index_of(&e).unwrap()] += self.c[i];
        }
        Jet { layout: l, c }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            layout: self.layout,
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    fn shift(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    fn zip(&self, o: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        if self.is_constant() && o.is_constant() {
            return Jet::constant(f(self.c[0], o.c[0]));
        }
        if self.is_constant() {
            let mut out = o.scale(0.0);
            for (i, x) in o.c.iter().enumerate() {
                out.c[i] = f(if i == 0 { self.c[0] } else { 0.0 }, *x);
            }
            return out;
        }
        if o.is_constant() {
            let mut out = self.clone();
            for (i, x) in self.c.iter().enumerate() {
                out.c[i] = f(*x, if i == 0 { o.c[0] } else { 0.0 });
            }
            return out;
        }
        assert_eq!(self.nvars(), o.nvars(), "jets live on different charts");
        let order = self.order().min(o.order());
        let l = layout(self.nvars(), order);
        let c = (0..l.len()).map(|i| f(self.c[i], o.c[i])).collect();
        Jet { layout: l, c }
    }

    pub fn add_jet(&self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub_jet(&self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a - b)
    }

    pub fn mul_jet(&self, o: &Jet) -> Jet {
        if self.is_constant() {
            return o.scale(self.c[0]);
        }
        if o.is_constant() {
            return self.scale(o.c[0]);
        }
        assert_eq!(self.nvars(), o.nvars(), "jets live on different charts");
        let order = self.order().min(o.order());
        let l = layout(self.nvars(), order);
        let mut c = vec![0.0; l.len()];
        for &(i, j, k) in &l.mul {
            c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        Jet { layout: l, c }
    }

    /// `f(self)` for a univariate `f` given its derivatives at the base value
    /// (`derivs[k] = f^(k)(value)` for `k = 0..=order`).
    pub fn compose(&self, derivs: &[f64]) -> Jet {
        if self.is_constant() || self.order() == 0 {
            return Jet {
                layout: self.layout,
                c: vec![derivs[0]],
            };
        }
        let p = self.order();
        assert!(derivs.len() > p);
        let mut h = self.clone();
        h.c[0] = 0.0;
        let mut fact = 1.0;
        let mut coef = vec![0.0; p + 1];
        for k in 0..=p {
            if k > 0 {
                fact *= k as f64;
            }
            coef[k] = derivs[k] / fact;
        }
        let mut r = Jet {
            layout: self.layout,
            c: {
                let mut v = vec![0.0; self.layout.len()];
                v[0] = coef[p];
                v
            },
        };
        for k in (0..p).rev() {
            r = r.mul_jet(&h).shift(coef[k]);
        }
        r
    }

    fn order_hint(&self) -> usize {
        if self.is_constant() {
            0
        } else {
            self.order()
        }
    }

    pub fn powf(&self, a: f64) -> Jet {
        let x = self.value();
        let mut d = Vec::with_capacity(self.order_hint() + 1);
        let mut k = 1.0;
        for i in 0..=self.order_hint() {
            d.push(k * x.powf(a - i as f64));
            k *= a - i as f64;
        }
        self.compose(&d)
    }

    pub fn recip(&self) -> Jet {
        self.powf(-1.0)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn square(&self) -> Jet {
        self.mul_jet(self)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(&vec![e; self.order_hint() + 1])
    }

    pub fn ln(&self) -> Jet {
        let x = self.value();
        let mut d = vec![x.ln()];
        let mut k = 1.0;
        for i in 1..=self.order_hint() {
            d.push(k / x.powi(i as i32));
            k *= -(i as f64);
        }
        self.compose(&d)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cyc = [s, c, -s, -c];
        let d: Vec<f64> = (0..=self.order_hint()).map(|i| cyc[i % 4]).collect();
        self.compose(&d)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cyc = [c, -s, -c, s];
        let d: Vec<f64> = (0..=self.order_hint()).map(|i| cyc[i % 4]).collect();
        self.compose(&d)
    }

    /// Evaluates the power series `Σ coeffs[k] x^k` by Horner's rule.
    pub fn series(&self, coeffs: &[f64]) -> Jet {
        let mut r = Jet::constant(*coeffs.last().unwrap_or(&0.0));
        for &c in coeffs.iter().rev().skip(1) {
            r = r.mul_jet(self).shift(c);
        }
        r
    }

    /// Largest coefficient magnitude, used for residual norms.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

macro_rules! jet_binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, o: Jet) -> Jet {
                self.$f(&o)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, o: &Jet) -> Jet {
                self.$f(o)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, o: Jet) -> Jet {
                self.$f(&o)
            }
        }
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $m(self, o: &Jet) -> Jet {
                self.$f(o)
            }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $m(self, o: f64) -> Jet {
                self.$f(&Jet::constant(o))
            }
        }
        impl $tr<f64> for &Jet {
            type Output = Jet;
            fn $m(self, o: f64) -> Jet {
                self.$f(&Jet::constant(o))
            }
        }
        impl $tr<Jet> for f64 {
            type Output = Jet;
            fn $m(self, o: Jet) -> Jet {
                Jet::constant(self).$f(&o)
            }
        }
        impl $tr<&Jet> for f64 {
            type Output = Jet;
            fn $m(self, o: &Jet) -> Jet {
                Jet::constant(self).$f(o)
            }
        }
    };
}

impl Jet {
    fn div_jet(&self, o: &Jet) -> Jet {
        self.mul_jet(&o.recip())
    }
}

jet_binop!(Add, add, add_jet);
jet_binop!(Sub, sub, sub_jet);
jet_binop!(Mul, mul, mul_jet);
jet_binop!(Div, div, div_jet);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Sum of jets; the empty sum is the constant zero.
pub fn sum<'a>(items: impl IntoIterator<Item = &'a Jet>) -> Jet {
    items.into_iter().fold(Jet::constant(0.0), |acc, x| acc.add_jet(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn layout_sizes_are_binomial() {
        assert_eq!(layout(7, 3).len(), 120);
        assert_eq!(layout(4, 2).len(), 15);
        assert_eq!(layout(1, 3).len(), 4);
        assert_eq!(layout(0, 0).len(), 1);
    }

    #[test]
    fn polynomial_derivatives_are_exact() {
        let x = Jet::coordinates(&[0.3, -1.2], 3);
        // f = x^2 y + 3 y^3
        let f = &x[0] * &x[0] * &x[1] + 3.0 * &x[1] * &x[1] * &x[1];
        assert!(close(f.value(), 0.09 * -1.2 + 3.0 * -1.728, 1e-15));
        assert!(close(f.partial(0), 2.0 * 0.3 * -1.2, 1e-15));
        assert!(close(f.partial(1), 0.09 + 9.0 * 1.44, 1e-15));
        assert!(close(f.derivative(&[1, 1]), 0.6, 1e-15));
        assert!(close(f.derivative(&[0, 3]), 18.0, 1e-15));
        assert!(close(f.derivative(&[2, 1]), 2.0, 1e-15));
    }

    #[test]
    fn elementary_functions_match_closed_derivatives() {
        let x = Jet::variable(1, 3, 0, 0.7);
        let s = x.sin();
        assert!(close(s.derivative(&[3]), -(0.7f64).cos(), 1e-14));
        let r = x.sqrt();
        assert!(close(r.derivative(&[2]), -0.25 * 0.7f64.powf(-1.5), 1e-14));
        let l = x.ln();
        assert!(close(l.derivative(&[3]), 2.0 / 0.7f64.powi(3), 1e-13));
        let q = (&x * &x).recip();
        assert!(close(q.derivative(&[1]), -2.0 / 0.7f64.powi(3), 1e-13));
        let e = x.exp();
        assert!(close(e.derivative(&[2]), 0.7f64.exp(), 1e-14));
    }

    #[test]
    fn truncation_is_consistent() {
        let x = Jet::coordinates(&[0.2, 0.5, -0.4], 3);
        let f = (&x[0] * &x[1] + x[2].exp()).sqrt();
        let x2 = Jet::coordinates(&[0.2, 0.5, -0.4], 2);
        let g = (&x2[0] * &x2[1] + x2[2].exp()).sqrt();
        assert_eq!(f.truncate(2).coefficients().len(), g.coefficients().len());
        for (a, b) in f.truncate(2).coefficients().iter().zip(g.coefficients()) {
            assert!(close(*a, *b, 1e-14));
        }
    }

    #[test]
    fn mixed_partials_commute() {
        let x = Jet::coordinates(&[0.4, 0.9], 3);
        let f = (&x[0] * &x[1]).sin() / (1.0 + &x[0] * &x[0]);
        let a = f.diff(0).unwrap().diff(1).unwrap();
        let b = f.diff(1).unwrap().diff(0).unwrap();
        for (p, q) in a.coefficients().iter().zip(b.coefficients()) {
            assert!((p - q).abs() < 1e-13);
        }
    }

    #[test]
    fn embed_moves_variables() {
        let x = Jet::coordinates(&[0.5, 2.0], 2);
        let f = &x[0] * &x[1];
        let g = f.embed(5, &[3, 1]);
        assert_eq!(g.nvars(), 5);
        assert!(close(g.partial(3), 2.0, 1e-15));
        assert!(close(g.partial(1), 0.5, 1e-15));
        assert!(close(g.derivative(&[0, 1, 0, 1, 0]), 1.0, 1e-15));
    }

    #[test]
    fn order_beyond_maximum_is_reported() {
        match check_order(4) {
            Err(GeomError::JetOrderUnavailable { requested, max }) => {
                assert_eq!((requested, max), (4, MAX_ORDER))
            }
            other => panic!("unexpected {other:?}"),
        }
        let x = Jet::variable(1, 0, 0, 1.0);
        assert!(x.diff(0).is_err());
    }
}
