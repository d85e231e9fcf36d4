use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::branch::Branch;
use crate::bundle7::Profile;
use crate::error::{GeomError, GeomResult};
use crate::models::ModelName;

use super::suites::{Requirement, SuiteId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    /// The base 4-manifold.
    M,
    /// `Λ²±T*M`.
    X,
    /// The principal SO(3) bundle.
    P,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::M => "M",
            Space::X => "X",
            Space::P => "P",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ModelConfig {
    pub name: ModelName,
    #[serde(default = "one")]
    pub kappa: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct Tolerances {
    /// Pointwise identities and closed-vs-numeric agreement.
    pub residual: f64,
    /// Cocalibration and the `7τ0·Vol = dφ∧φ` check.
    pub strict: f64,
    /// Vanishing torsion and the radius-length oracle.
    pub torsion: f64,
    /// Recovered metric entries.
    pub metric: f64,
    /// Curvature predicates and the duality hypothesis.
    pub flags: f64,
    /// Lower bound for non-vanishing witnesses.
    pub witness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-8,
            strict: 1e-9,
            torsion: 1e-6,
            metric: 1e-10,
            flags: 1e-7,
            witness: 1e-3,
        }
    }
}

impl Tolerances {
    /// Sets every upper-bound tolerance to `tol`.
    pub fn uniform(self, tol: f64) -> Self {
        Tolerances {
            residual: tol,
            strict: tol,
            torsion: tol,
            metric: tol,
            flags: tol,
            witness: self.witness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub space: Space,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Profile>,
    #[serde(default = "default_probes")]
    pub probes: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<SuiteId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

fn default_probes() -> usize {
    20
}

fn invalid(name: &str, reason: impl Into<String>) -> GeomError {
    GeomError::InvalidParameter {
        name: name.into(),
        reason: reason.into(),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> GeomResult<RunConfig> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| invalid("config", e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> GeomResult<()> {
        if !(self.model.kappa > 0.0) || !self.model.kappa.is_finite() {
            return Err(invalid(
                "model.kappa",
                format!("must be positive, got {}", self.model.kappa),
            ));
        }
        if self.probes == 0 {
            return Err(invalid("probes", "must be positive"));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.residual", t.residual),
            ("tolerances.strict", t.strict),
            ("tolerances.torsion", t.torsion),
            ("tolerances.metric", t.metric),
            ("tolerances.flags", t.flags),
            ("tolerances.witness", t.witness),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if let Some(p) = &self.profile {
            p.validate().map_err(|e| invalid("profile", e.to_string()))?;
        }
        match self.space {
            Space::M => {}
            Space::X => {
                self.require_branch()?;
                if self.profile.is_none() {
                    return Err(invalid("profile", "required for space X"));
                }
            }
            Space::P => {
                self.require_branch()?;
                match &self.profile {
                    Some(Profile::Constant { .. }) => {}
                    Some(_) => return Err(invalid("profile", "space P supports constant profiles only")),
                    None => return Err(invalid("profile", "required for space P")),
                }
            }
        }
        for id in self.suites() {
            if id == SuiteId::CorollariesP
                && !matches!(
                    self.model.name,
                    ModelName::Sphere4 | ModelName::Hyperbolic4 | ModelName::ComplexHyperbolic
                )
            {
                return Err(invalid(
                    "suites",
                    format!("suite {} needs sphere4 or an Einstein model with s < 0", id.as_str()),
                ));
            }
            match id.requirement() {
                Requirement::Base => {}
                Requirement::Chart(space) if space == self.space => {}
                Requirement::Chart(space) => {
                    return Err(invalid("suites", format!("suite {} needs space {space}", id.as_str())))
                }
                Requirement::Disk => match self.profile {
                    Some(Profile::Bs { s, c1, .. }) if s < 0.0 && c1 > 0.0 => {}
                    _ => {
                        return Err(invalid(
                            "suites",
                            format!("suite {} needs a bs profile with s < 0", id.as_str()),
                        ))
                    }
                },
                Requirement::Bs => {
                    if !matches!(self.profile, Some(Profile::Bs { .. })) || self.space != Space::X {
                        return Err(invalid(
                            "suites",
                            format!("suite {} needs space X with a bs profile", id.as_str()),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn require_branch(&self) -> GeomResult<Branch> {
        self.branch
            .ok_or_else(|| invalid("branch", format!("required for space {}", self.space)))
    }

    /// The suites to run: explicit, or the defaults for the space.
    pub fn suites(&self) -> Vec<SuiteId> {
        if let Some(s) = &self.suites {
            return s.clone();
        }
        match self.space {
            Space::M => vec![SuiteId::Frames4Invariants, SuiteId::ModelFlags],
            Space::X => {
                let mut v = vec![SuiteId::StructureX, SuiteId::TorsionX];
                if let Some(Profile::Bs { s, c1, .. }) = self.profile {
                    v.push(SuiteId::BryantSalamonParallel);
                    if s < 0.0 && c1 > 0.0 {
                        v.push(SuiteId::RadialIncompleteness);
                    }
                }
                v
            }
            Space::P => vec![SuiteId::IdentitiesP, SuiteId::CocalibrationP, SuiteId::TorsionP],
        }
    }
}
