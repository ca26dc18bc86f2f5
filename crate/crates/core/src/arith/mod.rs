//! Exact arithmetic in the field `Q(q, x, y, z, c, s, delta)`.
//!
//! Everything downstream (tensor coefficients, projector entries, rewrite
//! rules, linear solves) is expressed with [`RationalFunction`], which keeps
//! numerator and denominator coprime with a positive leading denominator
//! coefficient. Two values are equal as functions iff they are structurally
//! equal.

mod poly;
mod rational;

use std::fmt;

use thiserror::Error;

pub use poly::IntPolynomial;
pub use rational::RationalFunction;

/// Number of variables known to the kernel.
pub const NVARS: usize = 7;

const VAR_NAMES: [&str; NVARS] = ["q", "x", "y", "z", "c", "s", "delta"];

/// A variable of the coefficient field.
///
/// The set is fixed: `q` is the deformation parameter, `x, y, z` are the
/// spectral coefficients of a general transposition, `c` is the sphere
/// constant, `s` and `delta` parametrise `s*S + delta*P0`. The declaration
/// order is also the lexicographic priority of the monomial order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u8);

impl Var {
    pub const Q: Var = Var(0);
    pub const X: Var = Var(1);
    pub const Y: Var = Var(2);
    pub const Z: Var = Var(3);
    pub const C: Var = Var(4);
    pub const S: Var = Var(5);
    pub const DELTA: Var = Var(6);

    pub fn name(self) -> &'static str {
        VAR_NAMES[self.0 as usize]
    }

    pub fn from_name(name: &str) -> Option<Var> {
        VAR_NAMES.iter().position(|n| *n == name).map(|i| Var(i as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = Var> {
        (0..NVARS as u8).map(Var)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A power product of the kernel variables.
///
/// Ordering is lexicographic on the exponent vector with `q` most
/// significant, which is the global monomial order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial([u16; NVARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; NVARS])
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u16) -> Self {
        let mut m = [0; NVARS];
        m[v.index()] = e;
        Monomial(m)
    }

    pub fn exponent(&self, v: Var) -> u16 {
        self.0[v.index()]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).expect("monomial exponent overflow");
        }
        Monomial(m)
    }

    /// `self / other` if `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(other.0.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(Monomial(m))
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(other.0.iter()) {
            *a = (*a).min(*b);
        }
        Monomial(m)
    }

    /// Same monomial with the exponent of `v` set to zero.
    pub fn without(&self, v: Var) -> Monomial {
        let mut m = self.0;
        m[v.index()] = 0;
        Monomial(m)
    }

    /// Bit `i` set iff variable `i` occurs.
    pub fn var_mask(&self) -> u8 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0u8, |acc, (i, _)| acc | (1 << i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, u16)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (Var(i as u8), e))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (v, e) in self.iter() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}^{}", v, e)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("substitution {bindings} makes the denominator vanish")]
    ZeroDenominator { bindings: String },
    #[error("pole at {point}")]
    Pole { point: String },
    #[error("variable `{0}` is not bound")]
    UnboundVariable(&'static str),
}
