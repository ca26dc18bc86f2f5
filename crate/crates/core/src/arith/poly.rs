use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ArithError, Monomial, Var};

/// Multivariate polynomial with arbitrary-precision integer coefficients.
///
/// Terms are kept sorted by ascending [`Monomial`] with no zero
/// coefficients, so the leading term under the global order is the last one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    terms: Vec<(Monomial, BigInt)>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            IntPolynomial { terms: vec![(m, c)] }
        }
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), BigInt::one())
    }

    /// Builds a polynomial from unsorted terms, merging duplicates.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(terms: I) -> Self {
        let mut map: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_insert_with(BigInt::zero) += c;
        }
        IntPolynomial {
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    // Emptiness is `is_zero`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, BigInt)> {
        self.terms.last()
    }

    pub fn var_mask(&self) -> u8 {
        self.terms.iter().fold(0, |acc, (m, _)| acc | m.var_mask())
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.var_mask() & (1 << v.index()) != 0
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.iter().map(|(m, _)| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Self {
        IntPolynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        IntPolynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        IntPolynomial {
            terms: self.terms.iter().map(|(a, c)| (a.mul(m), c * k)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, true)
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                Ordering::Less => {
                    out.push((*ma, ca.clone()));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((*mb, if negate { -cb } else { cb.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { ca - cb } else { ca + cb };
                    if !c.is_zero() {
                        out.push((*ma, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(
            other.terms[j..]
                .iter()
                .map(|(m, c)| (*m, if negate { -c } else { c.clone() })),
        );
        IntPolynomial { terms: out }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, c);
        }
        let mut prod: Vec<(Monomial, BigInt)> = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                prod.push((ma.mul(mb), ca * cb));
            }
        }
        prod.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(Monomial, BigInt)> = Vec::with_capacity(prod.len());
        for (m, c) in prod {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        IntPolynomial { terms: out }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        assert!(!divisor.is_zero(), "exact division by the zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if divisor.terms.len() == 1 {
            let (dm, dc) = &divisor.terms[0];
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                let (qc, r) = c.div_rem(dc);
                if !r.is_zero() {
                    return None;
                }
                out.push((m.checked_div(dm)?, qc));
            }
            // Dividing by a monomial preserves the order.
            return Some(IntPolynomial { terms: out });
        }
        let (lm, lc) = divisor.leading().unwrap().clone();
        let mut rem = self.clone();
        let mut quotient = Vec::new();
        while let Some((rm, rc)) = rem.leading().cloned() {
            let m = rm.checked_div(&lm)?;
            let (qc, r) = rc.div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            rem = rem.sub(&divisor.mul_term(&m, &qc));
            quotient.push((m, qc));
        }
        quotient.reverse();
        Some(IntPolynomial { terms: quotient })
    }

    /// Gcd of the integer coefficients (non-negative).
    pub fn integer_content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Coefficients of `self` as a polynomial in `v`, lowest power first.
    pub fn to_univariate(&self, v: Var) -> Vec<IntPolynomial> {
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, BigInt)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            buckets[m.exponent(v) as usize].push((m.without(v), c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut t| {
                t.sort_unstable_by_key(|t| t.0);
                IntPolynomial { terms: t }
            })
            .collect()
    }

    pub fn from_univariate(v: Var, coeffs: &[IntPolynomial]) -> Self {
        let mut acc = Self::zero();
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&c.mul_term(&Monomial::var_pow(v, i as u16), &BigInt::one()));
            }
        }
        acc
    }

    /// Sign-normalised copy: leading coefficient positive.
    pub fn normalized_sign(&self) -> Self {
        match self.leading() {
            Some((_, c)) if c.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

    pub fn leading_is_negative(&self) -> bool {
        matches!(self.leading(), Some((_, c)) if c.is_negative())
    }

    /// Content with respect to `v`: gcd of the coefficients of the powers of `v`.
    pub fn content_in(&self, v: Var) -> Self {
        let coeffs = self.to_univariate(v);
        let mut g = Self::zero();
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            g = Self::gcd(&g, c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Greatest common divisor over `Z[q, x, ...]`, normalised to a positive
    /// leading coefficient.
    ///
    /// Content extraction followed by a primitive pseudo-remainder sequence
    /// in one variable, recursing into the coefficient ring.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return b.normalized_sign();
        }
        if b.is_zero() {
            return a.normalized_sign();
        }
        if a.terms.len() == 1 || b.terms.len() == 1 {
            return Self::gcd_with_term(a, b);
        }
        let mask_a = a.var_mask();
        let mask_b = b.var_mask();
        for v in Var::all() {
            let bit = 1 << v.index();
            if mask_a & bit != 0 && mask_b & bit == 0 {
                return Self::gcd(&a.content_in(v), b);
            }
            if mask_b & bit != 0 && mask_a & bit == 0 {
                return Self::gcd(a, &b.content_in(v));
            }
        }
        // Both have the same variables; a and b are not constants here.
        let v = Var::all()
            .find(|v| mask_a & (1 << v.index()) != 0)
            .expect("non-constant polynomial");
        let ca = a.content_in(v);
        let cb = b.content_in(v);
        let content = Self::gcd(&ca, &cb);
        let pa = a.div_exact(&ca).expect("content divides");
        let pb = b.div_exact(&cb).expect("content divides");
        let g = Self::primitive_prs(pa, pb, v);
        content.mul(&g).normalized_sign()
    }

    fn gcd_with_term(a: &Self, b: &Self) -> Self {
        let mut g = BigInt::zero();
        let mut m: Option<Monomial> = None;
        for (tm, tc) in a.terms.iter().chain(b.terms.iter()) {
            g = g.gcd(tc);
            m = Some(match m {
                None => *tm,
                Some(prev) => prev.gcd(tm),
            });
        }
        Self::term(m.unwrap_or_default(), g)
    }

    fn primitive_prs(a: Self, b: Self, v: Var) -> Self {
        let (mut f, mut g) = if a.degree_in(v) >= b.degree_in(v) {
            (a, b)
        } else {
            (b, a)
        };
        loop {
            if g.degree_in(v) == 0 {
                // g is primitive of degree zero in v, hence a unit.
                return Self::one();
            }
            let r = Self::pseudo_remainder(&f, &g, v);
            if r.is_zero() {
                return g.normalized_sign();
            }
            if r.degree_in(v) == 0 {
                return Self::one();
            }
            let cr = r.content_in(v);
            f = g;
            g = r.div_exact(&cr).expect("content divides");
        }
    }

    /// Pseudo-remainder of `f` by `g` with respect to `v`.
    pub fn pseudo_remainder(f: &Self, g: &Self, v: Var) -> Self {
        let gc = g.to_univariate(v);
        let n = gc.len() - 1;
        let lc = gc[n].clone();
        let mut r = f.to_univariate(v);
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
        let m = r.len().saturating_sub(1);
        if r.is_empty() || m < n {
            return f.clone();
        }
        let mut e = (m - n + 1) as u32;
        while !r.is_empty() && r.len() > n {
            let deg = r.len() - 1;
            let top = r[deg].clone();
            let shift = deg - n;
            for c in r.iter_mut() {
                *c = c.mul(&lc);
            }
            for (i, gci) in gc.iter().enumerate() {
                if !gci.is_zero() {
                    r[i + shift] = r[i + shift].sub(&top.mul(gci));
                }
            }
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
            e -= 1;
        }
        let rem = Self::from_univariate(v, &r);
        if e > 0 {
            rem.mul(&lc.pow(e))
        } else {
            rem
        }
    }

    pub fn eval(&self, point: &BTreeMap<Var, BigRational>) -> Result<BigRational, ArithError> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (v, e) in m.iter() {
                let x = point.get(&v).ok_or(ArithError::UnboundVariable(v.name()))?;
                t *= num_traits::pow(x.clone(), e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Number of terms plus coefficient bit lengths; used to rank pivots.
    pub fn size(&self) -> u64 {
        self.terms.iter().map(|(_, c)| 1 + c.bits() / 64).sum()
    }
}

impl fmt::Display for IntPolynomial {
    /// Terms in ascending monomial order, e.g. `1 - q^2 + 2*q^4*c`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", abs, m)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> IntPolynomial {
        IntPolynomial::var(Var::Q)
    }

    fn int(n: i64) -> IntPolynomial {
        IntPolynomial::constant(BigInt::from(n))
    }

    #[test]
    fn gcd_univariate() {
        // (1 + q^2)(1 - q) and (1 + q^2)(2 + q)
        let common = int(1).add(&q().pow(2));
        let a = common.mul(&int(1).sub(&q()));
        let b = common.mul(&int(2).add(&q()));
        assert_eq!(IntPolynomial::gcd(&a, &b), common);
    }

    #[test]
    fn gcd_extracts_integer_content_and_monomials() {
        let a = q().pow(3).scale(&BigInt::from(6));
        let b = q()
            .pow(2)
            .scale(&BigInt::from(-4))
            .add(&q().pow(5).scale(&BigInt::from(8)));
        assert_eq!(IntPolynomial::gcd(&a, &b), q().pow(2).scale(&BigInt::from(2)));
    }

    #[test]
    fn gcd_bivariate() {
        let c = IntPolynomial::var(Var::C);
        let f1 = c.add(&q().pow(2)); // c + q^2
        let f2 = c.sub(&int(1)); // c - 1
        let f3 = q().add(&int(3));
        let a = f1.mul(&f2).mul(&f3);
        let b = f1.mul(&f3).mul(&f3).mul(&c);
        assert_eq!(IntPolynomial::gcd(&a, &b), f1.mul(&f3).normalized_sign());
    }

    #[test]
    fn gcd_variable_only_in_one_argument() {
        let c = IntPolynomial::var(Var::C);
        let a = c.mul(&q().add(&int(1))).add(&q().add(&int(1)).scale(&BigInt::from(2)));
        let b = q().pow(2).sub(&int(1));
        assert_eq!(IntPolynomial::gcd(&a, &b), q().add(&int(1)));
    }

    #[test]
    fn exact_division_detects_remainder() {
        let a = q().pow(2).sub(&int(1));
        assert_eq!(a.div_exact(&q().sub(&int(1))), Some(q().add(&int(1))));
        assert_eq!(a.div_exact(&q().add(&int(2))), None);
    }

    #[test]
    fn display_is_ascending() {
        let p = int(1).sub(&q().pow(2)).add(&q().pow(4).scale(&BigInt::from(3)));
        assert_eq!(p.to_string(), "1 - q^2 + 3*q^4");
    }
}
