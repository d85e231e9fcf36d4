//! Radial profiles `λ(r)`, `μ(r)` and the two-of-three lemma.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, GeomResult};
use crate::jet::Jet;

/// A positive function of `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind", deny_unknown_fields)]
pub enum RadialFn {
    Constant {
        value: f64,
    },
    /// `scale · (1 + rate·r)^exponent`.
    Power {
        scale: f64,
        rate: f64,
        exponent: f64,
    },
    /// `Σ c_k r^k`.
    Polynomial {
        coefficients: Vec<f64>,
    },
}

impl RadialFn {
    pub fn jet(&self, r: &Jet) -> Jet {
        match self {
            RadialFn::Constant { value } => Jet::constant(*value),
            RadialFn::Power { scale, rate, exponent } => (r * *rate + 1.0).powf(*exponent) * *scale,
            RadialFn::Polynomial { coefficients } => r.series(coefficients),
        }
    }

    fn validate(&self, name: &'static str) -> GeomResult<()> {
        let bad = |reason: &str| {
            Err(GeomError::InvalidParameter {
                name: name.into(),
                reason: reason.into(),
            })
        };
        match self {
            RadialFn::Constant { value } if !(*value > 0.0) => {
                Err(GeomError::NonPositiveParameter { name, value: *value })
            }
            RadialFn::Power { scale, .. } if !(*scale > 0.0) => {
                Err(GeomError::NonPositiveParameter { name, value: *scale })
            }
            RadialFn::Polynomial { coefficients } if coefficients.is_empty() => bad("no coefficients"),
            RadialFn::Polynomial { coefficients } if !(coefficients[0] > 0.0) => bad("must be positive at r = 0"),
            _ => Ok(()),
        }
    }
}

/// The fiber profile of the 3-form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind", deny_unknown_fields)]
pub enum Profile {
    /// `μ² = (2c0²sr + c1)^½`, `λ² = c0²(2c0²sr + c1)^{-½}`.
    Bs {
        s: f64,
        c0: f64,
        c1: f64,
    },
    Constant {
        lambda: f64,
        mu: f64,
    },
    Custom {
        lambda: RadialFn,
        mu: RadialFn,
    },
}

/// The Bryant–Salamon type profile.
pub fn bs_profile(s: f64, c0: f64, c1: f64) -> GeomResult<Profile> {
    let p = Profile::Bs { s, c0, c1 };
    p.validate()?;
    Ok(p)
}

impl Profile {
    /// The profile with disk radius `r0`, i.e. `c1 = −2c0²s·r0`.
    pub fn bs_disk(s: f64, c0: f64, r0: f64) -> GeomResult<Profile> {
        bs_profile(s, c0, -2.0 * c0 * c0 * s * r0)
    }

    pub fn validate(&self) -> GeomResult<()> {
        match self {
            Profile::Bs { s, c0, c1 } => {
                if !(*c0 > 0.0) {
                    return Err(GeomError::NonPositiveParameter { name: "c0", value: *c0 });
                }
                if *c1 <= 0.0 && *s <= 0.0 {
                    return Err(GeomError::InvalidParameter {
                        name: "c1".into(),
                        reason: format!("empty domain: c1 = {c1} and s = {s} leave 2c0²sr + c1 ≤ 0 for all r ≥ 0"),
                    });
                }
                Ok(())
            }
            Profile::Constant { lambda, mu } => {
                if !(*lambda > 0.0) {
                    return Err(GeomError::NonPositiveParameter {
                        name: "lambda",
                        value: *lambda,
                    });
                }
                if !(*mu > 0.0) {
                    return Err(GeomError::NonPositiveParameter { name: "mu", value: *mu });
                }
                Ok(())
            }
            Profile::Custom { lambda, mu } => {
                lambda.validate("lambda")?;
                mu.validate("mu")
            }
        }
    }

    /// Upper end of the domain in `r`, when bounded.
    pub fn r0(&self) -> Option<f64> {
        match *self {
            Profile::Bs { s, c0, c1 } if s < 0.0 => Some(-c1 / (2.0 * c0 * c0 * s)),
            _ => None,
        }
    }

    /// Lower end of the domain in `r` (nonzero only when `c1 < 0 < s`).
    pub fn r_min(&self) -> f64 {
        match *self {
            Profile::Bs { s, c0, c1 } if s > 0.0 && c1 <= 0.0 => -c1 / (2.0 * c0 * c0 * s),
            _ => 0.0,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Profile::Constant { .. }) || matches!(self, Profile::Bs { s, .. } if *s == 0.0)
    }

    /// `(λ, μ)` as functions of an `r` jet, rejecting points outside the domain.
    pub fn jets(&self, r: &Jet) -> GeomResult<(Jet, Jet)> {
        let (l, m) = match self {
            Profile::Bs { s, c0, c1 } => {
                let q = r * (2.0 * c0 * c0 * s) + *c1;
                if !(q.value() > 0.0) {
                    return Err(GeomError::OutsideDomain(format!(
                        "2c0²sr + c1 = {} ≤ 0 at r = {}",
                        q.value(),
                        r.value()
                    )));
                }
                (q.powf(-0.25) * *c0, q.powf(0.25))
            }
            Profile::Constant { lambda, mu } => (Jet::constant(*lambda), Jet::constant(*mu)),
            Profile::Custom { lambda, mu } => (lambda.jet(r), mu.jet(r)),
        };
        for (name, v) in [("lambda", l.value()), ("mu", m.value())] {
            if !(v > 0.0) {
                return Err(GeomError::OutsideDomain(format!(
                    "{name}(r) = {v} ≤ 0 at r = {}",
                    r.value()
                )));
            }
        }
        Ok((l, m))
    }

    pub fn values(&self, r: f64) -> GeomResult<(f64, f64)> {
        let (l, m) = self.jets(&Jet::constant(r))?;
        Ok((l.value(), m.value()))
    }

    /// Residuals of the three radial conditions at `r`:
    /// `|∂_r(λμ)|`, `|τ1 coefficient|`, `|∂_r(μ²/λ²) − 2s|`.
    pub fn lemma_residuals(&self, s: f64, r: f64) -> GeomResult<[f64; 3]> {
        let r = Jet::variable(1, 1, 0, r);
        let (l, m) = self.jets(&r)?;
        let lm = &l * &m;
        let l2 = l.square();
        let m2 = m.square();
        let l2m4 = &l2 * &m2.square();
        let tau1 = (l2m4.partial(0) - s * l2.value().powi(2) * m2.value()) * 2.0 / (3.0 * l2m4.value());
        let tau2 = (&m2 * &l2.recip()).partial(0) - 2.0 * s;
        Ok([lm.partial(0).abs(), tau1.abs(), tau2.abs()])
    }
}

/// Which two radial conditions are imposed by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum LemmaPair {
    /// `λμ = c0` and `τ1 = 0`; `τ2` is checked.
    ConstantProductTau1,
    /// `λμ = c0` and `τ2 = 0`; `τ1` is checked.
    ConstantProductTau2,
    /// `τ1 = τ2 = 0`; constancy of `λμ` is checked.
    Tau1Tau2,
}

impl LemmaPair {
    pub const ALL: [LemmaPair; 3] = [
        LemmaPair::ConstantProductTau1,
        LemmaPair::ConstantProductTau2,
        LemmaPair::Tau1Tau2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaPair::ConstantProductTau1 => "constantProductTau1",
            LemmaPair::ConstantProductTau2 => "constantProductTau2",
            LemmaPair::Tau1Tau2 => "tau1Tau2",
        }
    }

    /// Index into [`Profile::lemma_residuals`] of the condition left to verify.
    pub fn checked(self) -> usize {
        match self {
            LemmaPair::ConstantProductTau1 => 2,
            LemmaPair::ConstantProductTau2 => 1,
            LemmaPair::Tau1Tau2 => 0,
        }
    }

    /// A profile satisfying the two imposed conditions.
    ///
    /// Solved directly from the imposed pair: `λμ = c0` with `(μ²)' = sc0²/μ²`,
    /// `λμ = c0` with `(μ⁴)' = 2sc0²`, and `μ² = λ²q`, `λ'/λ = −s/(2q)` with `q = 2sr + c1`.
    pub fn profile(self, s: f64, c0: f64, c1: f64) -> Profile {
        let q = |rate: f64, e: f64, scale: f64| RadialFn::Power {
            scale: scale * c1.powf(e),
            rate: rate / c1,
            exponent: e,
        };
        match self {
            LemmaPair::ConstantProductTau1 => Profile::Custom {
                lambda: q(2.0 * c0 * c0 * s, -0.25, c0),
                mu: q(2.0 * c0 * c0 * s, 0.25, 1.0),
            },
            LemmaPair::ConstantProductTau2 => Profile::Bs { s, c0, c1 },
            LemmaPair::Tau1Tau2 => Profile::Custom {
                lambda: q(2.0 * s, -0.25, c0),
                mu: q(2.0 * s, 0.25, c0),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaReport {
    pub s: f64,
    pub c0: f64,
    pub c1: f64,
    /// Largest residual of the checked condition, per pair.
    pub residuals: Vec<(LemmaPair, f64)>,
    /// Largest residual among the imposed conditions, per pair.
    pub imposed: Vec<(LemmaPair, f64)>,
}

impl LemmaReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

/// Imposes each pair of conditions and measures the third on `samples` values of `r`.
pub fn lemma_check(s: f64, c0: f64, c1: f64, samples: usize, seed: u64) -> GeomResult<LemmaReport> {
    if !(c0 > 0.0) {
        return Err(GeomError::NonPositiveParameter { name: "c0", value: c0 });
    }
    if !(c1 > 0.0) {
        return Err(GeomError::NonPositiveParameter { name: "c1", value: c1 });
    }
    // keep 2sr + c1 and 2c0²sr + c1 positive
    let r_max = if s < 0.0 {
        0.9 * c1 / (2.0 * (-s) * c0.max(1.0).powi(2))
    } else {
        5.0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rs: Vec<f64> = (0..samples).map(|_| rng.random_range(0.0..r_max)).collect();
    let mut residuals = Vec::new();
    let mut imposed = Vec::new();
    for pair in LemmaPair::ALL {
        let p = pair.profile(s, c0, c1);
        let (mut third, mut other) = (0.0f64, 0.0f64);
        for &r in &rs {
            let res = p.lemma_residuals(s, r)?;
            for (k, v) in res.iter().enumerate() {
                if k == pair.checked() {
                    third = third.max(*v);
                } else {
                    other = other.max(*v);
                }
            }
        }
        residuals.push((pair, third));
        imposed.push((pair, other));
    }
    Ok(LemmaReport {
        s,
        c0,
        c1,
        residuals,
        imposed,
    })
}
