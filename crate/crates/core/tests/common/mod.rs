//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the jet or frame machinery: curvature comes from
//! central differences of metric values, lengths from plain Riemann sums.

#![allow(dead_code)]

use g2frames::frames4::MetricField;

pub const N: usize = 4;

type Mat = [[f64; N]; N];

fn inverse(g: &Mat) -> Mat {
    let m = nalgebra::Matrix4::from_fn(|i, j| g[i][j]);
    let inv = m.try_inverse().expect("metric is invertible");
    std::array::from_fn(|i| std::array::from_fn(|j| inv[(i, j)]))
}

fn shifted(x: &[f64; N], k: usize, h: f64) -> [f64; N] {
    let mut y = *x;
    y[k] += h;
    y
}

/// Christoffel symbols `Γ^l_{ij}` by central differences of the metric.
pub fn christoffel(metric: &MetricField, x: &[f64; N], h: f64) -> [[[f64; N]; N]; N] {
    let g = metric.value(x).unwrap();
    let gi = inverse(&g);
    let dg: Vec<Mat> = (0..N)
        .map(|k| {
            let p = metric.value(&shifted(x, k, h)).unwrap();
            let m = metric.value(&shifted(x, k, -h)).unwrap();
            std::array::from_fn(|i| std::array::from_fn(|j| (p[i][j] - m[i][j]) / (2.0 * h)))
        })
        .collect();
    std::array::from_fn(|l| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                (0..N)
                    .map(|m| 0.5 * gi[l][m] * (dg[i][m][j] + dg[j][m][i] - dg[m][i][j]))
                    .sum()
            })
        })
    })
}

/// Scalar curvature from nested central differences, Richardson-extrapolated in `h`.
pub fn scalar_curvature(metric: &MetricField, x: &[f64; N], h: f64) -> f64 {
    (4.0 * scalar_curvature_at_step(metric, x, 0.5 * h) - scalar_curvature_at_step(metric, x, h)) / 3.0
}

fn scalar_curvature_at_step(metric: &MetricField, x: &[f64; N], h: f64) -> f64 {
    let gam = christoffel(metric, x, h);
    let dgam: Vec<[[[f64; N]; N]; N]> = (0..N)
        .map(|k| {
            let p = christoffel(metric, &shifted(x, k, h), h);
            let m = christoffel(metric, &shifted(x, k, -h), h);
            std::array::from_fn(|l| {
                std::array::from_fn(|i| std::array::from_fn(|j| (p[l][i][j] - m[l][i][j]) / (2.0 * h)))
            })
        })
        .collect();
    // R^l_{ijk} = ∂_j Γ^l_{ik} − ∂_k Γ^l_{ij} + Γ^l_{jm}Γ^m_{ik} − Γ^l_{km}Γ^m_{ij}
    let riem = |l: usize, i: usize, j: usize, k: usize| -> f64 {
        let mut v = dgam[j][l][i][k] - dgam[k][l][i][j];
        for m in 0..N {
            v += gam[l][j][m] * gam[m][i][k] - gam[l][k][m] * gam[m][i][j];
        }
        v
    };
    let gi = inverse(&metric.value(x).unwrap());
    let mut scal = 0.0;
    for i in 0..N {
        for k in 0..N {
            let ric: f64 = (0..N).map(|l| riem(l, i, l, k)).sum();
            scal += gi[i][k] * ric;
        }
    }
    scal
}

/// Midpoint sum of `∫₀^√(2r0) c0 (c1 + 2c0²s t²/2)^{-1/4} dt` after `t = √(2r0)(1 − v²)`.
pub fn radius_length_oracle(s: f64, c0: f64, c1: f64, cells: usize) -> f64 {
    let r0 = -c1 / (2.0 * c0 * c0 * s);
    let a = (2.0 * r0).sqrt();
    let h = 1.0 / cells as f64;
    let mut sum = 0.0;
    for k in 0..cells {
        let v = (k as f64 + 0.5) * h;
        let t = a * (1.0 - v * v);
        let q = c1 + c0 * c0 * s * t * t;
        sum += c0 * q.max(0.0).powf(-0.25) * 2.0 * a * v;
    }
    sum * h
}

/// Uniform random point in a ball of `dim` coordinates.
pub fn ball_point<R: rand::Rng>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-radius..radius)).collect();
        if v.iter().map(|c| c * c).sum::<f64>() < radius * radius {
            return v;
        }
    }
}
