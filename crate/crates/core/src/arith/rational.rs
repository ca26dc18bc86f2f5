use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{ArithError, IntPolynomial, Monomial, Var};

/// Element of the fraction field of `Z[q, x, y, z, c, s, delta]`.
///
/// Invariants: the denominator is non-zero, numerator and denominator are
/// coprime, and the leading coefficient of the denominator is positive.
/// Zero is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: IntPolynomial,
    den: IntPolynomial,
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction {
            num: IntPolynomial::zero(),
            den: IntPolynomial::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(IntPolynomial::constant(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_poly(IntPolynomial::constant(n))
    }

    pub fn from_ratio(r: &BigRational) -> Self {
        Self::new(
            IntPolynomial::constant(r.numer().clone()),
            IntPolynomial::constant(r.denom().clone()),
        )
        .expect("BigRational has a non-zero denominator")
    }

    pub fn from_poly(p: IntPolynomial) -> Self {
        RationalFunction {
            num: p,
            den: IntPolynomial::one(),
        }
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(IntPolynomial::var(v))
    }

    /// The deformation parameter `q`.
    pub fn q() -> Self {
        Self::var(Var::Q)
    }

    /// Canonical `num / den`.
    pub fn new(num: IntPolynomial, den: IntPolynomial) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: IntPolynomial, den: IntPolynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_one() {
            return RationalFunction { num, den };
        }
        let g = IntPolynomial::gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        if den.leading_is_negative() {
            num = num.neg();
            den = den.neg();
        }
        RationalFunction { num, den }
    }

    pub fn numerator(&self) -> &IntPolynomial {
        &self.num
    }

    pub fn denominator(&self) -> &IntPolynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The value as an exact rational number when no variable occurs.
    pub fn as_rational(&self) -> Option<BigRational> {
        Some(BigRational::new(self.num.constant_value()?, self.den.constant_value()?))
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    /// Size measure used for pivot selection.
    pub fn size(&self) -> u64 {
        self.num.size() + self.den.size()
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let (mut num, mut den) = (self.den.clone(), self.num.clone());
        if den.leading_is_negative() {
            num = num.neg();
            den = den.neg();
        }
        Ok(RationalFunction { num, den })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ArithError> {
        Ok(self * &other.inv()?)
    }

    /// Integer power; negative exponents invert.
    ///
    /// Panics on a negative power of zero.
    pub fn pow(&self, e: i32) -> Self {
        let base = if e < 0 {
            self.inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let e = e.unsigned_abs();
        RationalFunction {
            num: base.num.pow(e),
            den: base.den.pow(e),
        }
    }

    /// Simultaneous substitution of variables by rational functions.
    pub fn substitute(&self, bindings: &BTreeMap<Var, RationalFunction>) -> Result<Self, ArithError> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let mut cache = HashMap::new();
        let num = substitute_poly(&self.num, bindings, &mut cache);
        let den = substitute_poly(&self.den, bindings, &mut cache);
        if den.is_zero() {
            let offending: Vec<String> = bindings
                .iter()
                .filter(|(v, _)| self.den.contains_var(**v))
                .map(|(v, r)| format!("{} -> {}", v, r))
                .collect();
            return Err(ArithError::ZeroDenominator {
                bindings: format!("{{{}}}", offending.join(", ")),
            });
        }
        num.checked_div(&den)
    }

    /// Exact value at a rational point; every occurring variable must be bound.
    pub fn eval(&self, point: &BTreeMap<Var, BigRational>) -> Result<BigRational, ArithError> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            let desc: Vec<String> = point.iter().map(|(v, r)| format!("{}={}", v, r)).collect();
            return Err(ArithError::Pole { point: desc.join(", ") });
        }
        Ok(self.num.eval(point)? / d)
    }
}

fn substitute_poly(
    p: &IntPolynomial,
    bindings: &BTreeMap<Var, RationalFunction>,
    cache: &mut HashMap<(Var, u16), RationalFunction>,
) -> RationalFunction {
    let mut acc = RationalFunction::zero();
    for (m, c) in p.terms() {
        let mut kept = Monomial::one();
        let mut t = RationalFunction::from_bigint(c.clone());
        for (v, e) in m.iter() {
            match bindings.get(&v) {
                Some(value) => {
                    let pw = cache.entry((v, e)).or_insert_with(|| value.pow(e as i32)).clone();
                    t = &t * &pw;
                }
                None => kept = kept.mul(&Monomial::var_pow(v, e)),
            }
        }
        if !kept.is_one() {
            t = &t * &RationalFunction::from_poly(IntPolynomial::term(kept, BigInt::one()));
        }
        acc += t;
    }
    acc
}

impl fmt::Display for RationalFunction {
    /// `(1 - q^2)/(1 + q^4)`, `q/(2*c)`; parentheses only where needed to
    /// parse back.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num = if self.num.len() > 1 {
            format!("({})", self.num)
        } else {
            self.num.to_string()
        };
        let den = self.den.to_string();
        if self.den.len() > 1 || den.contains('*') || den.starts_with('-') {
            write!(f, "{}/({})", num, den)
        } else {
            write!(f, "{}/{}", num, den)
        }
    }
}

impl FromStr for RationalFunction {
    type Err = crate::parse::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::parse::parse_scalar(s)
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }

    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        RationalFunction::one()
    }
}

impl From<i64> for RationalFunction {
    fn from(n: i64) -> Self {
        RationalFunction::from_int(n)
    }
}

impl From<Var> for RationalFunction {
    fn from(v: Var) -> Self {
        RationalFunction::var(v)
    }
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;

    fn add(self, other: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            return RationalFunction::canonical(num, self.den.clone());
        }
        let g = IntPolynomial::gcd(&self.den, &other.den);
        let d1 = self.den.div_exact(&g).unwrap();
        let d2 = other.den.div_exact(&g).unwrap();
        let num = self.num.mul(&d2).add(&other.num.mul(&d1));
        if num.is_zero() {
            return RationalFunction::zero();
        }
        // Inputs are reduced, so any common factor of num and the new
        // denominator divides g.
        let h = IntPolynomial::gcd(&num, &g);
        let (num, g) = if h.is_one() {
            (num, g)
        } else {
            (num.div_exact(&h).unwrap(), g.div_exact(&h).unwrap())
        };
        let mut den = d1.mul(&d2).mul(&g);
        let mut num = num;
        if den.leading_is_negative() {
            num = num.neg();
            den = den.neg();
        }
        RationalFunction { num, den }
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;

    fn sub(self, other: &RationalFunction) -> RationalFunction {
        self + &(-other)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;

    fn mul(self, other: &RationalFunction) -> RationalFunction {
        if self.is_zero() || other.is_zero() {
            return RationalFunction::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return RationalFunction::from_poly(self.num.mul(&other.num));
        }
        let g1 = IntPolynomial::gcd(&self.num, &other.den);
        let g2 = IntPolynomial::gcd(&other.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = other.den.div_exact(&g1).unwrap();
        let n2 = other.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        let mut num = n1.mul(&n2);
        let mut den = d1.mul(&d2);
        if den.leading_is_negative() {
            num = num.neg();
            den = den.neg();
        }
        RationalFunction { num, den }
    }
}

impl<'a> Div<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;

    /// Panics on division by zero; use [`RationalFunction::checked_div`]
    /// when the divisor is not known to be non-zero.
    fn div(self, other: &RationalFunction) -> RationalFunction {
        self.checked_div(other).expect("division by zero")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;

    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;

    fn neg(self) -> RationalFunction {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, other: RationalFunction) -> RationalFunction {
                (&self).$method(&other)
            }
        }
        impl<'a> $tr<&'a RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, other: &RationalFunction) -> RationalFunction {
                (&self).$method(other)
            }
        }
        impl<'a> $tr<RationalFunction> for &'a RationalFunction {
            type Output = RationalFunction;
            fn $method(self, other: RationalFunction) -> RationalFunction {
                self.$method(&other)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&RationalFunction> for RationalFunction {
    fn add_assign(&mut self, other: &RationalFunction) {
        *self = &*self + other;
    }
}

impl AddAssign for RationalFunction {
    fn add_assign(&mut self, other: RationalFunction) {
        *self = &*self + &other;
    }
}

impl SubAssign<&RationalFunction> for RationalFunction {
    fn sub_assign(&mut self, other: &RationalFunction) {
        *self = &*self - other;
    }
}

impl MulAssign<&RationalFunction> for RationalFunction {
    fn mul_assign(&mut self, other: &RationalFunction) {
        *self = &*self * other;
    }
}

impl Sum for RationalFunction {
    fn sum<I: Iterator<Item = RationalFunction>>(iter: I) -> Self {
        iter.fold(RationalFunction::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a RationalFunction> for RationalFunction {
    fn sum<I: Iterator<Item = &'a RationalFunction>>(iter: I) -> Self {
        iter.fold(RationalFunction::zero(), |acc, x| &acc + x)
    }
}

impl Product for RationalFunction {
    fn product<I: Iterator<Item = RationalFunction>>(iter: I) -> Self {
        iter.fold(RationalFunction::one(), |acc, x| acc * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> RationalFunction {
        RationalFunction::q()
    }

    fn int(n: i64) -> RationalFunction {
        RationalFunction::from_int(n)
    }

    #[test]
    fn telescoping_sum() {
        let d = int(1) + q().pow(4);
        let a = &int(1) / &d;
        let b = &q().pow(4) / &d;
        assert_eq!(a + b, int(1));
    }

    #[test]
    fn additive_identity() {
        let a = (int(1) - q().pow(2)) / (int(1) + q().pow(4));
        assert_eq!(&a + &RationalFunction::zero(), a);
    }

    #[test]
    fn laurent_difference() {
        // q^2 + (-q^-2) = (q^4 - 1)/q^2
        let r = q().pow(2) + -(q().pow(-2));
        assert_eq!(r.numerator().to_string(), "-1 + q^4");
        assert_eq!(r.denominator().to_string(), "q^2");
    }

    #[test]
    fn monomial_inverse() {
        let r = q().pow(2).inv().unwrap();
        assert!(r.numerator().is_one());
        assert_eq!(r.denominator().to_string(), "q^2");
        assert_eq!(q().pow(-4) * q().pow(4), int(1));
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!((int(1) - q().pow(2)) * (int(1) + q().pow(2)), int(1) - q().pow(4));
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        assert_eq!(RationalFunction::zero().inv(), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn canonical_sign_and_content() {
        let a = RationalFunction::new(
            IntPolynomial::var(Var::Q).scale(&BigInt::from(2)),
            IntPolynomial::constant(BigInt::from(-4)),
        )
        .unwrap();
        assert_eq!(a.to_string(), "-q/2");
    }

    #[test]
    fn display_format() {
        let a = (int(1) - q().pow(2)) / (int(1) + q().pow(4));
        assert_eq!(a.to_string(), "(1 - q^2)/(1 + q^4)");
        assert_eq!(q().pow(-2).to_string(), "1/q^2");
    }

    #[test]
    fn substitution_examples() {
        let x = RationalFunction::var(Var::X);
        let y = RationalFunction::var(Var::Y);
        let q4 = q().pow(4);
        let form = &x * &x + &(&q4 + &q().pow(-4)) * &(&x * &y) + &y * &y;
        let mut b = BTreeMap::new();
        b.insert(Var::X, -(&q4 * &y));
        assert!(form.substitute(&b).unwrap().is_zero());
        assert_eq!(form.substitute(&BTreeMap::new()).unwrap(), form);
        let mut classical = BTreeMap::new();
        classical.insert(Var::Q, int(1));
        assert_eq!(q().substitute(&classical).unwrap(), int(1));
    }

    #[test]
    fn substitution_into_pole_names_binding() {
        let a = int(1) / (q() - int(1));
        let mut b = BTreeMap::new();
        b.insert(Var::Q, int(1));
        match a.substitute(&b) {
            Err(ArithError::ZeroDenominator { bindings }) => assert!(bindings.contains("q -> 1")),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn evaluation() {
        let mut p = BTreeMap::new();
        p.insert(Var::Q, BigRational::from_integer(BigInt::from(2)));
        let a = int(1) / (int(1) + q().pow(4));
        assert_eq!(a.eval(&p).unwrap(), BigRational::new(1.into(), 17.into()));
        p.insert(Var::Q, BigRational::one());
        assert_eq!(q().pow(-4).eval(&p).unwrap(), BigRational::one());
        p.insert(Var::Q, BigRational::zero());
        assert!(matches!(q().pow(-4).eval(&p), Err(ArithError::Pole { .. })));
        assert!(matches!(
            RationalFunction::var(Var::C).eval(&p),
            Err(ArithError::UnboundVariable("c"))
        ));
    }
}
