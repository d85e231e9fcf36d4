//! Catalog of explicit 4-dimensional chart metrics with their expected invariants.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, GeomResult};
use crate::frames4::{orthonormal_coframe, singer_thorpe, MetricField, DIM};
use crate::jet::Jet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ModelName {
    Flat,
    Sphere4,
    Hyperbolic4,
    FubiniStudy,
    ComplexHyperbolic,
    #[serde(rename = "productS2H2")]
    ProductS2H2,
}

impl ModelName {
    pub const ALL: [ModelName; 6] = [
        ModelName::Flat,
        ModelName::Sphere4,
        ModelName::Hyperbolic4,
        ModelName::FubiniStudy,
        ModelName::ComplexHyperbolic,
        ModelName::ProductS2H2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::Flat => "flat",
            ModelName::Sphere4 => "sphere4",
            ModelName::Hyperbolic4 => "hyperbolic4",
            ModelName::FubiniStudy => "fubiniStudy",
            ModelName::ComplexHyperbolic => "complexHyperbolic",
            ModelName::ProductS2H2 => "productS2H2",
        }
    }

    /// Whether the curvature scale `κ` changes the metric.
    pub fn uses_kappa(self) -> bool {
        matches!(self, ModelName::Sphere4 | ModelName::Hyperbolic4)
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = GeomError;

    fn from_str(s: &str) -> GeomResult<Self> {
        ModelName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| GeomError::UnknownModel(s.to_string()))
    }
}

/// Probe domain of a chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum SafeBox {
    /// `|x| < radius`.
    Ball { radius: f64 },
    /// `|(x1, x2)| < first` and `|(x3, x4)| < second`.
    Disks { first: f64, second: f64 },
}

impl SafeBox {
    pub fn contains(&self, x: &[f64]) -> bool {
        let n = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
        match *self {
            SafeBox::Ball { radius } => n(x) < radius,
            SafeBox::Disks { first, second } => n(&x[..2]) < first && n(&x[2..]) < second,
        }
    }

    fn bound(&self) -> f64 {
        match *self {
            SafeBox::Ball { radius } => radius,
            SafeBox::Disks { first, second } => first.max(second),
        }
    }

    /// `n` points drawn uniformly by rejection from the bounding cube.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<[f64; DIM]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = self.bound();
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let x: [f64; DIM] = std::array::from_fn(|_| rng.random_range(-b..b));
            if self.contains(&x) {
                out.push(x);
            }
        }
        out
    }
}

/// Expected invariants of a model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Expected {
    pub einstein: bool,
    pub sd: bool,
    pub asd: bool,
    pub scalar_flat: bool,
    pub s_sign: i8,
    pub s_constant: bool,
    /// Exact `s` when constant.
    pub s: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub name: ModelName,
    pub kappa: f64,
    pub metric: MetricField,
    pub safe_box: SafeBox,
    pub expected: Expected,
    /// Set when registration swapped two coordinates to realize the expected orientation.
    pub orientation_flipped: bool,
}

fn norm2(x: &[Jet]) -> Jet {
    x.iter().fold(Jet::constant(0.0), |acc, c| acc + c.square())
}

/// Real form of the Kähler metric with Hermitian matrix `(N δ − ε z̄_j z_k) / N²`, `N = 1 + ε|z|²`,
/// in coordinates `(x1, y1, x2, y2)`, scaled by 2.
fn kahler(eps: f64) -> MetricField {
    MetricField::new(move |y| {
        let (a, b) = ([&y[0], &y[2]], [&y[1], &y[3]]);
        let n = norm2(y) * eps + 1.0;
        let w = n.square().recip() * 2.0;
        let mut g = vec![Jet::constant(0.0); 16];
        for j in 0..2 {
            for k in 0..2 {
                let re = a[j] * a[k] + b[j] * b[k];
                let im = a[j] * b[k] - b[j] * a[k];
                let mut p = re * (-eps);
                if j == k {
                    p = p + &n;
                }
                let p = p * &w;
                let q = im * (-eps) * &w;
                g[2 * j * DIM + 2 * k] = p.clone();
                g[(2 * j + 1) * DIM + 2 * k + 1] = p;
                g[2 * j * DIM + 2 * k + 1] = q.clone();
                g[(2 * j + 1) * DIM + 2 * k] = -q;
            }
        }
        g
    })
}

fn product_s2h2() -> MetricField {
    MetricField::new(|x| {
        let sph = (norm2(&x[..2]) + 1.0).square().recip() * 4.0;
        let hyp = (-norm2(&x[2..]) + 1.0).square().recip() * 4.0;
        let mut g = vec![Jet::constant(0.0); 16];
        for i in 0..DIM {
            g[i * DIM + i] = if i < 2 { sph.clone() } else { hyp.clone() };
        }
        g
    })
}

fn expected(einstein: bool, sd: bool, asd: bool, s: Option<f64>) -> Expected {
    let sv = s.unwrap_or(0.0);
    Expected {
        einstein,
        sd,
        asd,
        scalar_flat: sv == 0.0,
        s_sign: if sv > 0.0 {
            1
        } else if sv < 0.0 {
            -1
        } else {
            0
        },
        s_constant: s.is_some(),
        s,
    }
}

/// Expected flags for a model at curvature scale `κ`.
pub fn expected_row(name: ModelName, kappa: f64) -> Expected {
    let k2 = kappa * kappa;
    match name {
        ModelName::Flat => expected(true, true, true, Some(0.0)),
        ModelName::Sphere4 => expected(true, true, true, Some(1.0 / k2)),
        ModelName::Hyperbolic4 => expected(true, true, true, Some(-1.0 / k2)),
        ModelName::FubiniStudy => expected(true, true, false, Some(1.0)),
        ModelName::ComplexHyperbolic => expected(true, true, false, Some(-1.0)),
        ModelName::ProductS2H2 => expected(false, true, true, Some(0.0)),
    }
}

/// The six rows at `κ = 1`.
pub fn expected_table() -> Vec<(ModelName, Expected)> {
    ModelName::ALL.iter().map(|&m| (m, expected_row(m, 1.0))).collect()
}

const FLIP: [usize; DIM] = [1, 0, 2, 3];
const REGISTRATION_TOL: f64 = 1e-7;

/// Looks up a model; `kappa` defaults to 1 and must be positive.
pub fn get_model(name: &str, kappa: Option<f64>) -> GeomResult<ModelSpec> {
    let name: ModelName = name.parse()?;
    model(name, kappa.unwrap_or(1.0))
}

pub fn model(name: ModelName, kappa: f64) -> GeomResult<ModelSpec> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(GeomError::NonPositiveParameter {
            name: "kappa",
            value: kappa,
        });
    }
    let k2 = kappa * kappa;
    let (metric, safe_box) = match name {
        ModelName::Flat => (MetricField::euclidean(), SafeBox::Ball { radius: 1.0 }),
        ModelName::Sphere4 => (
            MetricField::conformal(move |x| (norm2(x) + 1.0).square().recip() * (4.0 * k2)),
            SafeBox::Ball { radius: 1.5 },
        ),
        ModelName::Hyperbolic4 => (
            MetricField::conformal(move |x| (-norm2(x) + 1.0).square().recip() * (4.0 * k2)),
            SafeBox::Ball { radius: 0.8 },
        ),
        ModelName::FubiniStudy => (kahler(1.0), SafeBox::Ball { radius: 1.5 }),
        ModelName::ComplexHyperbolic => (kahler(-1.0), SafeBox::Ball { radius: 0.7 }),
        ModelName::ProductS2H2 => (
            product_s2h2(),
            SafeBox::Disks {
                first: 1.5,
                second: 0.8,
            },
        ),
    };
    let expected = expected_row(name, kappa);
    let mut spec = ModelSpec {
        name,
        kappa,
        metric,
        safe_box,
        expected,
        orientation_flipped: false,
    };
    if expected.sd != expected.asd {
        let p = [0.11, -0.07, 0.05, 0.13];
        let f = singer_thorpe(&orthonormal_coframe(&spec.metric), &p)?.flags(REGISTRATION_TOL);
        if f.sd != expected.sd && f.asd == expected.sd {
            spec.metric = spec.metric.permuted(FLIP);
            spec.orientation_flipped = true;
        }
    }
    Ok(spec)
}

impl ModelSpec {
    pub fn probe_points(&self, n: usize, seed: u64) -> Vec<[f64; DIM]> {
        let pts = self.safe_box.sample(n, seed);
        if self.orientation_flipped {
            pts.into_iter().map(|x| [x[1], x[0], x[2], x[3]]).collect()
        } else {
            pts
        }
    }

    pub fn catalog() -> Vec<ModelSpec> {
        ModelName::ALL
            .iter()
            .map(|&m| model(m, 1.0).expect("catalog models register"))
            .collect()
    }
}
