//! Length of a fiber radius and radial geodesics on the bounded-disk profiles.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, GeomResult};

use super::profile::Profile;

pub const QUADRATURE_TOL: f64 = 1e-8;
const MAX_DEPTH: u32 = 50;

fn disk(p: &Profile) -> GeomResult<(f64, f64, f64)> {
    match *p {
        Profile::Bs { s, c0, c1 } if s < 0.0 && c1 > 0.0 => Ok((c0, c1, p.r0().expect("s < 0"))),
        _ => Err(GeomError::InvalidParameter {
            name: "profile".into(),
            reason: "radial geometry needs a profile with s < 0 and c1 > 0".into(),
        }),
    }
}

struct Simpson<'a> {
    f: &'a dyn Fn(f64) -> f64,
    evals: usize,
    worst: f64,
    failed: bool,
}

impl Simpson<'_> {
    fn eval(&mut self, x: f64) -> f64 {
        self.evals += 1;
        (self.f)(x)
    }

    #[allow(clippy::too_many_arguments)]
    fn step(&mut self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (self.eval(lm), self.eval(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let err = left + right - whole;
        if err.abs() <= 15.0 * tol {
            return left + right + err / 15.0;
        }
        if depth == 0 {
            self.failed = true;
            self.worst = self.worst.max(err.abs());
            return left + right + err / 15.0;
        }
        self.step(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + self.step(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature on `[a, b]`; returns the value and the number of evaluations.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> GeomResult<(f64, usize)> {
    let mut s = Simpson {
        f,
        evals: 3,
        worst: 0.0,
        failed: false,
    };
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let v = s.step(a, b, fa, fm, fb, whole, tol, MAX_DEPTH);
    if s.failed || !v.is_finite() {
        return Err(GeomError::QuadratureFailed { error: s.worst });
    }
    Ok((v, s.evals))
}

/// `∫₀^√(2r0) λ(t²/2) dt` with `t = √(2r0) sin θ`.
pub fn length_of_radius(p: &Profile) -> GeomResult<(f64, usize)> {
    let (c0, c1, r0) = disk(p)?;
    let a = (2.0 * r0).sqrt();
    // 2c0²s·r + c1 = c1 cos²θ along the substitution
    let f = move |th: f64| {
        let c = th.cos().max(0.0);
        if c == 0.0 {
            return 0.0;
        }
        c0 * (c1 * c * c).powf(-0.25) * a * c
    };
    adaptive_simpson(&f, 0.0, std::f64::consts::FRAC_PI_2, QUADRATURE_TOL)
}

/// Midpoint sum of the same length with `t = √(2r0)(1 − v²)`, `n` cells.
pub fn length_midpoint(p: &Profile, n: usize) -> GeomResult<f64> {
    let (c0, c1, r0) = disk(p)?;
    let a = (2.0 * r0).sqrt();
    let h = 1.0 / n as f64;
    let sum: f64 = (0..n)
        .map(|k| {
            let v = (k as f64 + 0.5) * h;
            // 2c0²s·r + c1 = c1·v²(2 − v²)
            c0 * (c1 * v * v * (2.0 - v * v)).powf(-0.25) * 2.0 * a * v
        })
        .sum();
    Ok(sum * h)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GeodesicTrace {
    pub times: Vec<f64>,
    pub g: Vec<f64>,
    pub g_dot: Vec<f64>,
    /// `√(2r0)`.
    pub bound: f64,
    pub stayed_inside: bool,
}

impl GeodesicTrace {
    pub fn max_abs(&self) -> f64 {
        self.g.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// RK4 for `g̈(2r0 − g²) = ġ²g` over `[0, t_end]` in `steps` steps.
pub fn geodesic_trace(r0: f64, g0: f64, g_dot0: f64, t_end: f64, steps: usize) -> GeomResult<GeodesicTrace> {
    if !(r0 > 0.0) {
        return Err(GeomError::NonPositiveParameter { name: "r0", value: r0 });
    }
    if steps == 0 {
        return Err(GeomError::InvalidParameter {
            name: "steps".into(),
            reason: "must be positive".into(),
        });
    }
    let bound = (2.0 * r0).sqrt();
    let rhs = |g: f64, v: f64| (v, v * v * g / (2.0 * r0 - g * g));
    let h = t_end / steps as f64;
    let mut tr = GeodesicTrace {
        times: vec![0.0],
        g: vec![g0],
        g_dot: vec![g_dot0],
        bound,
        stayed_inside: g0.abs() < bound,
    };
    let (mut g, mut v) = (g0, g_dot0);
    for k in 1..=steps {
        if !tr.stayed_inside {
            break;
        }
        let (k1g, k1v) = rhs(g, v);
        let (k2g, k2v) = rhs(g + 0.5 * h * k1g, v + 0.5 * h * k1v);
        let (k3g, k3v) = rhs(g + 0.5 * h * k2g, v + 0.5 * h * k2v);
        let (k4g, k4v) = rhs(g + h * k3g, v + h * k3v);
        g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        tr.times.push(k as f64 * h);
        tr.g.push(g);
        tr.g_dot.push(v);
        tr.stayed_inside = g.is_finite() && g.abs() < bound;
    }
    Ok(tr)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RadialGeometry {
    pub r0: f64,
    pub length_of_radius: f64,
    pub evaluations: usize,
    pub geodesic_trace: GeodesicTrace,
}

pub fn radial_geometry(p: &Profile, g0: f64, g_dot0: f64, t_end: f64, steps: usize) -> GeomResult<RadialGeometry> {
    let (_, _, r0) = disk(p)?;
    let (length, evaluations) = length_of_radius(p)?;
    Ok(RadialGeometry {
        r0,
        length_of_radius: length,
        evaluations,
        geodesic_trace: geodesic_trace(r0, g0, g_dot0, t_end, steps)?,
    })
}
