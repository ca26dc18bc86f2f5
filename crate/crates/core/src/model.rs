//! Bundles the objects every verification step needs for one choice of
//! `q` and `c`.

use std::sync::Arc;

use num_rational::BigRational;
use thiserror::Error;

use crate::arith::{IntPolynomial, RationalFunction, Var};
use crate::sphere::{Sphere, SphereError};
use crate::symmetry::{Decomposition, GeneratorAction, Projectors, SymmetryError, Transposition};

type RF = RationalFunction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("q = {0} makes the denominator {1} vanish; q must be generic")]
    DegenerateQ(String, String),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
}

/// Values of `q` and `c`; either may stay symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub q: RF,
    pub c: RF,
}

impl Params {
    pub fn symbolic() -> Self {
        Params {
            q: RF::var(Var::Q),
            c: RF::var(Var::C),
        }
    }

    pub fn with_q(mut self, q: &BigRational) -> Self {
        self.q = RF::from_ratio(q);
        self
    }

    pub fn with_c(mut self, c: &BigRational) -> Self {
        self.c = RF::from_ratio(c);
        self
    }

    pub fn classical(&self) -> Self {
        Params {
            q: RF::one(),
            c: self.c.clone(),
        }
    }

    pub fn q_is_symbolic(&self) -> bool {
        self.q == RF::var(Var::Q)
    }
}

/// Polynomials in `q` that appear as denominators: `q`, `1+q²`, `1+q⁴`,
/// `1+q²+q⁴`, `1-q+q²`, `1+q+q²`.
pub fn generic_denominators() -> Vec<IntPolynomial> {
    let q = RF::var(Var::Q);
    let one = RF::one();
    [
        q.clone(),
        &one + &q.pow(2),
        &one + &q.pow(4),
        &(&one + &q.pow(2)) + &q.pow(4),
        &(&one - &q) + &q.pow(2),
        &(&one + &q) + &q.pow(2),
    ]
    .into_iter()
    .map(|r| r.numerator().clone())
    .collect()
}

/// Rejects a bound `q` at which one of [`generic_denominators`] vanishes.
pub fn check_generic_q(q: &BigRational) -> Result<(), ModelError> {
    let mut point = std::collections::BTreeMap::new();
    point.insert(Var::Q, q.clone());
    for d in generic_denominators() {
        let v = d.eval(&point).expect("univariate in q");
        if v == BigRational::from_integer(0.into()) {
            return Err(ModelError::DegenerateQ(q.to_string(), d.to_string()));
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Model {
    pub params: Params,
    pub action: GeneratorAction,
    pub decomposition: Decomposition,
    pub projectors: Arc<Projectors>,
    pub sphere: Arc<Sphere>,
}

impl Model {
    pub fn new(params: Params) -> Result<Self, ModelError> {
        let decomposition = Decomposition::new(params.q.clone())?;
        let projectors = Arc::new(Projectors::new(&decomposition));
        let sphere = Arc::new(Sphere::new(&decomposition, params.c.clone())?);
        Ok(Model {
            action: GeneratorAction::new(params.q.clone()),
            params,
            decomposition,
            projectors,
            sphere,
        })
    }

    pub fn symbolic() -> Self {
        Self::new(Params::symbolic()).expect("the generic model is well defined")
    }

    pub fn q(&self) -> &RF {
        &self.params.q
    }

    /// Same model with different projectors (used for mutation runs).
    pub fn with_projectors(&self, projectors: Projectors) -> Model {
        Model {
            projectors: Arc::new(projectors),
            ..self.clone()
        }
    }

    /// `S = q⁻⁴P₀ − q⁻²P₁ + q²P₂`.
    pub fn yang_baxter(&self) -> Transposition {
        Transposition::yang_baxter(self.q(), self.projectors.clone())
    }

    pub fn transposition(&self, x: RF, y: RF, z: RF) -> Transposition {
        Transposition::new(x, y, z, self.projectors.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_q_only() {
        assert!(check_generic_q(&BigRational::from_integer(0.into())).is_err());
        assert!(check_generic_q(&BigRational::new(3.into(), 2.into())).is_ok());
        assert!(check_generic_q(&BigRational::from_integer(1.into())).is_ok());
    }
}
