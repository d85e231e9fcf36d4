//! Self-dual / anti-self-dual branch selection and the associated 2-form triples.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exterior::{Coeff, Multivector};

/// `+` selects self-dual 2-forms, `−` anti-self-dual ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn opposite(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn parse(s: &str) -> Option<Branch> {
        match s {
            "+" | "plus" | "sd" => Some(Branch::Plus),
            "-" | "minus" | "asd" => Some(Branch::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

/// The triple `(θ⁰θ¹ ± θ²θ³, θ⁰θ² ∓ θ¹θ³, θ⁰θ³ ± θ¹θ²)` built from four 1-forms.
///
/// For an oriented orthonormal coframe these are eigenforms of the Hodge star
/// with eigenvalue `±1`, each of norm `√2`.
pub fn duality_triple<T: Coeff>(theta: &[Multivector<T>], branch: Branch) -> [Multivector<T>; 3] {
    assert_eq!(theta.len(), 4, "a 4-dimensional coframe");
    let s = branch.sign();
    let w = |i: usize, j: usize| theta[i].wedge(&theta[j]);
    [
        w(0, 1).add(&w(2, 3).scale(s)),
        w(0, 2).sub(&w(1, 3).scale(s)),
        w(0, 3).add(&w(1, 2).scale(s)),
    ]
}

/// [`duality_triple`] for the basis covectors with the given labels.
pub fn duality_basis(n: usize, labels: [usize; 4], branch: Branch) -> [Multivector; 3] {
    let theta: Vec<Multivector> = labels.iter().map(|&l| Multivector::basis(n, &[l])).collect();
    duality_triple(&theta, branch)
}
