//! The exponential chart `u ↦ exp(ǔ)` of SO(3).

use std::f64::consts::PI;

use crate::error::{GeomError, GeomResult};
use crate::exterior::{check, MatrixForm, Multivector};
use crate::jet::Jet;

/// Radius of the admissible ball of exponential coordinates.
pub const CHART_RADIUS: f64 = PI - 0.1;
const TERMS: usize = 20;

fn coefficients(shift: usize) -> Vec<f64> {
    // Σ (−x)^k / (2k + shift)!
    let mut out = Vec::with_capacity(TERMS);
    let mut fact: f64 = (1..=shift).map(|i| i as f64).product();
    for k in 0..TERMS {
        if k > 0 {
            let n = 2 * k + shift;
            fact *= (n - 1) as f64 * n as f64;
        }
        out.push(if k % 2 == 0 { 1.0 } else { -1.0 } / fact);
    }
    out
}

pub fn check_chart(u: &[f64; 3]) -> GeomResult<()> {
    let n = u.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(n < CHART_RADIUS) {
        return Err(GeomError::ChartBound(format!(
            "|u| = {n} outside the exponential chart |u| < π − 0.1"
        )));
    }
    Ok(())
}

/// `exp(ǔ) = 1 + A(|u|²)ǔ + B(|u|²)ǔ²` with `A = sin t / t`, `B = (1 − cos t)/t²`.
pub fn exp_hat(u: &[Jet]) -> MatrixForm<Jet> {
    let n = u[0].nvars().max(u[1].nvars()).max(u[2].nvars());
    let x = u.iter().fold(Jet::constant(0.0), |acc, c| acc + c.square());
    let a = x.series(&coefficients(1));
    let b = x.series(&coefficients(2));
    let uc = check(&u.iter().map(|c| Multivector::scalar(n, c.clone())).collect::<Vec<_>>()).expect("three 0-forms");
    let u2 = uc.mul(&uc);
    let mut out = MatrixForm::zeros(3, 3, n, 0);
    for i in 0..3 {
        for j in 0..3 {
            let mut e = uc.get(i, j).times(&a).add(&u2.get(i, j).times(&b));
            if i == j {
                e = e.add(&Multivector::scalar(n, Jet::constant(1.0)));
            }
            out.set(i, j, e);
        }
    }
    out
}

/// Value of [`exp_hat`].
pub fn rotation(u: &[f64; 3]) -> [[f64; 3]; 3] {
    let g = exp_hat(&u.map(Jet::constant));
    std::array::from_fn(|i| std::array::from_fn(|j| g.get(i, j).top().value()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_match_closed_forms() {
        for t in [0.0f64, 0.3, 1.7, 3.0] {
            let x = Jet::constant(t * t);
            let a = x.series(&coefficients(1)).value();
            let b = x.series(&coefficients(2)).value();
            let (ea, eb) = if t == 0.0 {
                (1.0, 0.5)
            } else {
                (t.sin() / t, (1.0 - t.cos()) / (t * t))
            };
            assert!((a - ea).abs() < 1e-14 && (b - eb).abs() < 1e-14, "{t}");
        }
    }

    #[test]
    fn rotations_are_orthogonal_with_axis_fixed() {
        let u = [0.4, -1.1, 0.9];
        let g = rotation(&u);
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| g[k][i] * g[k][j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
            let gu: f64 = (0..3).map(|k| g[i][k] * u[k]).sum();
            assert!((gu - u[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn chart_bound() {
        assert!(check_chart(&[0.0, 3.1, 0.0]).is_err());
        assert!(check_chart(&[1.0, 1.0, 1.0]).is_ok());
    }
}
