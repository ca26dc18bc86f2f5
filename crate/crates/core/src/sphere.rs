//! The quantum sphere `k(S²_q) = T(V) / (V₁, v₀ − c)` as a rewriting system.
//!
//! Rewrite rules are obtained by row-reducing the four ideal generators over
//! the words of degree at most two, listed in descending degree-lex order
//! (`u < v < w`). The pivots are the left-hand sides `wv, wu, vv, vu`, and
//! the irreducible words are `uᵃvᵉwᵇ` with `e ≤ 1`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use thiserror::Error;

use crate::arith::{ArithError, RationalFunction, Var};
use crate::linalg::Matrix;
use crate::parse::Combination;
use crate::symmetry::Decomposition;
use crate::tensor::{Letter, Space, TensorElement, Word};

type RF = RationalFunction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SphereError {
    #[error("the sphere constant c must be non-zero")]
    ZeroC,
    #[error("row reduction of the relations produced leading words {0}, expected wv, wu, vv, vu")]
    UnexpectedLeadingWords(String),
    #[error("`{0}` contains a differential letter; only u, v, w are allowed here")]
    NotAlgebraWord(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// The monomial `uᵃ vᵉ wᵇ` with `e ∈ {0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pbw {
    pub a: u32,
    pub e: u32,
    pub b: u32,
}

impl Pbw {
    pub const ONE: Pbw = Pbw { a: 0, e: 0, b: 0 };

    pub fn new(a: u32, e: u32, b: u32) -> Self {
        assert!(e <= 1, "normal monomials have at most one v");
        Pbw { a, e, b }
    }

    pub fn degree(&self) -> u32 {
        self.a + self.e + self.b
    }

    pub fn word(&self) -> Word {
        let mut l = vec![Letter::U; self.a as usize];
        l.extend(std::iter::repeat_n(Letter::V, self.e as usize));
        l.extend(std::iter::repeat_n(Letter::W, self.b as usize));
        Word(l)
    }

    /// Reads a word of the shape `u*v?w*`.
    pub fn from_word(w: &Word) -> Option<Pbw> {
        let l = w.letters();
        let a = l.iter().take_while(|x| **x == Letter::U).count();
        let e = l[a..].iter().take_while(|x| **x == Letter::V).count();
        let b = l[a + e..].iter().take_while(|x| **x == Letter::W).count();
        (e <= 1 && a + e + b == l.len()).then(|| Pbw::new(a as u32, e as u32, b as u32))
    }

    /// All normal monomials of degree at most `d`, in increasing order.
    pub fn up_to(d: u32) -> Vec<Pbw> {
        let mut out = Vec::new();
        for n in 0..=d {
            for e in 0..=1u32.min(n) {
                for a in (0..=n - e).rev() {
                    out.push(Pbw::new(a, e, n - e - a));
                }
            }
        }
        out.sort();
        out
    }
}

impl PartialOrd for Pbw {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pbw {
    /// Degree-lex on the underlying words.
    fn cmp(&self, other: &Self) -> Ordering {
        deglex(&self.word(), &other.word())
    }
}

impl fmt::Display for Pbw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.word())
    }
}

pub fn deglex(a: &Word, b: &Word) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// An element of `k(S²_q)` in the normal basis.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NormalForm {
    terms: BTreeMap<Pbw, RF>,
}

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm::default()
    }

    pub fn one() -> Self {
        Self::scalar(RF::one())
    }

    pub fn scalar(c: RF) -> Self {
        Self::term(Pbw::ONE, c)
    }

    pub fn monomial(m: Pbw) -> Self {
        Self::term(m, RF::one())
    }

    pub fn term(m: Pbw, c: RF) -> Self {
        let mut n = Self::zero();
        n.add_term(m, c);
        n
    }

    pub fn letter(l: Letter) -> Self {
        match l {
            Letter::U => Self::monomial(Pbw::new(1, 0, 0)),
            Letter::V => Self::monomial(Pbw::new(0, 1, 0)),
            Letter::W => Self::monomial(Pbw::new(0, 0, 1)),
            _ => panic!("differential letter in the algebra"),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Pbw, &RF)> {
        self.terms.iter()
    }

    // Emptiness is `is_zero`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Pbw) -> RF {
        self.terms.get(m).cloned().unwrap_or_else(RF::zero)
    }

    /// Highest degree of a term, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn add_term(&mut self, m: Pbw, c: RF) {
        if c.is_zero() {
            return;
        }
        let s = self.coefficient(&m) + c;
        if s.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, s);
        }
    }

    pub fn add_scaled(&mut self, other: &NormalForm, k: &RF) {
        if k.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(*m, c * k);
        }
    }

    pub fn add(&self, other: &NormalForm) -> NormalForm {
        let mut r = self.clone();
        r.add_scaled(other, &RF::one());
        r
    }

    pub fn sub(&self, other: &NormalForm) -> NormalForm {
        let mut r = self.clone();
        r.add_scaled(other, &RF::from_int(-1));
        r
    }

    pub fn scale(&self, k: &RF) -> NormalForm {
        let mut r = NormalForm::zero();
        r.add_scaled(self, k);
        r
    }

    pub fn to_combination(&self) -> Combination {
        self.terms.iter().map(|(m, c)| (m.word(), c.clone())).collect()
    }

    pub fn substitute(&self, bindings: &BTreeMap<Var, RF>) -> Result<NormalForm, ArithError> {
        let mut r = NormalForm::zero();
        for (m, c) in &self.terms {
            r.add_term(*m, c.substitute(bindings)?);
        }
        Ok(r)
    }
}

impl fmt::Display for NormalForm {
    /// `(c)*1 + (q^2)*u.v`, terms in degree-lex order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if *m == Pbw::ONE {
                    format!("({})", c)
                } else {
                    format!("({})*{}", c, m)
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `lhs → rhs` with `lhs` a two-letter word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: NormalForm,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// One overlap ambiguity `xyz` with both of its resolutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlap {
    pub word: Word,
    /// Rewrite `xy` first.
    pub left: NormalForm,
    /// Rewrite `yz` first.
    pub right: NormalForm,
}

impl Overlap {
    pub fn resolves(&self) -> bool {
        self.left == self.right
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfluenceReport {
    pub overlaps: Vec<Overlap>,
}

impl ConfluenceReport {
    pub fn confluent(&self) -> bool {
        self.overlaps.iter().all(|o| o.resolves())
    }
}

const LEADING_WORDS: [[Letter; 2]; 4] = [
    [Letter::W, Letter::V],
    [Letter::W, Letter::U],
    [Letter::V, Letter::V],
    [Letter::V, Letter::U],
];

/// The sphere algebra for given `q` and `c`.
#[derive(Debug)]
pub struct Sphere {
    q: RF,
    c: RF,
    generators: Vec<Combination>,
    rules: BTreeMap<Word, NormalForm>,
    memo: Mutex<HashMap<Word, NormalForm>>,
}

impl Clone for Sphere {
    fn clone(&self) -> Self {
        Sphere {
            q: self.q.clone(),
            c: self.c.clone(),
            generators: self.generators.clone(),
            rules: self.rules.clone(),
            memo: Mutex::new(HashMap::new()),
        }
    }
}

impl Sphere {
    pub fn new(dec: &Decomposition, c: RF) -> Result<Self, SphereError> {
        if c.is_zero() {
            return Err(SphereError::ZeroC);
        }
        let mut generators: Vec<Combination> = dec
            .span(1)
            .iter()
            .map(|x| x.terms().map(|(w, k)| (w.clone(), k.clone())).collect())
            .collect();
        let mut g0: Combination = dec.v0().terms().map(|(w, k)| (w.clone(), k.clone())).collect();
        g0.insert(Word::empty(), -c.clone());
        generators.push(g0);

        let mut columns: Vec<Word> = Word::all(&[Space::Base, Space::Base]);
        columns.extend(Word::all(&[Space::Base]));
        columns.push(Word::empty());
        columns.sort_by(|a, b| deglex(b, a));
        let rows = generators
            .iter()
            .map(|g| {
                columns
                    .iter()
                    .map(|w| g.get(w).cloned().unwrap_or_else(RF::zero))
                    .collect()
            })
            .collect();
        let mut m = Matrix::from_rows(rows);
        let pivots = m.rref();
        let leading: Vec<Word> = pivots.iter().map(|&j| columns[j].clone()).collect();
        let expected: Vec<Word> = LEADING_WORDS.iter().map(|l| Word::from_letters(l)).collect();
        if leading != expected {
            let names: Vec<String> = leading.iter().map(|w| w.to_string()).collect();
            return Err(SphereError::UnexpectedLeadingWords(names.join(", ")));
        }
        let mut rules = BTreeMap::new();
        for (r, &j) in pivots.iter().enumerate() {
            let mut rhs = NormalForm::zero();
            for (k, w) in columns.iter().enumerate() {
                if k == j || m.get(r, k).is_zero() {
                    continue;
                }
                let p = Pbw::from_word(w).expect("pivot columns are eliminated from other rows");
                rhs.add_term(p, -m.get(r, k).clone());
            }
            rules.insert(columns[j].clone(), rhs);
        }
        Ok(Sphere {
            q: dec.q().clone(),
            c,
            generators,
            rules,
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn q(&self) -> &RF {
        &self.q
    }

    pub fn c(&self) -> &RF {
        &self.c
    }

    /// The ideal generators: the three spin-1 vectors and `v₀ − c`.
    pub fn generators(&self) -> &[Combination] {
        &self.generators
    }

    pub fn rules(&self) -> Vec<Rule> {
        self.rules
            .iter()
            .map(|(l, r)| Rule {
                lhs: l.clone(),
                rhs: r.clone(),
            })
            .collect()
    }

    pub fn rule(&self, lhs: &Word) -> Option<&NormalForm> {
        self.rules.get(lhs)
    }

    /// Normal form of a single word in `u, v, w`.
    pub fn reduce_word(&self, w: &Word) -> Result<NormalForm, SphereError> {
        if w.letters().iter().any(|l| l.space() != Space::Base) {
            return Err(SphereError::NotAlgebraWord(w.to_string()));
        }
        let mut memo = self.memo.lock().unwrap_or_else(|e| e.into_inner());
        Ok(self.nf(w, &mut memo))
    }

    fn nf(&self, w: &Word, memo: &mut HashMap<Word, NormalForm>) -> NormalForm {
        if let Some(p) = Pbw::from_word(w) {
            return NormalForm::monomial(p);
        }
        if let Some(r) = memo.get(w) {
            return r.clone();
        }
        let l = w.letters();
        let k = (1..l.len())
            .find(|&i| self.rules.contains_key(&Word::from_letters(&l[i - 1..i + 1])))
            .expect("a non-normal word contains a left-hand side");
        let r = self.rewrite_at(w, k - 1, memo);
        memo.insert(w.clone(), r.clone());
        r
    }

    /// Applies the rule at letters `i, i+1`, then normalises.
    fn rewrite_at(&self, w: &Word, i: usize, memo: &mut HashMap<Word, NormalForm>) -> NormalForm {
        let l = w.letters();
        let rhs = &self.rules[&Word::from_letters(&l[i..i + 2])];
        let pre = Word::from_letters(&l[..i]);
        let post = Word::from_letters(&l[i + 2..]);
        let mut out = NormalForm::zero();
        for (m, c) in rhs.terms() {
            let nw = pre.concat(&m.word()).concat(&post);
            out.add_scaled(&self.nf(&nw, memo), c);
        }
        out
    }

    pub fn reduce(&self, x: &TensorElement) -> Result<NormalForm, SphereError> {
        let mut out = NormalForm::zero();
        for (w, c) in x.terms() {
            out.add_scaled(&self.reduce_word(w)?, c);
        }
        Ok(out)
    }

    pub fn reduce_combination(&self, x: &Combination) -> Result<NormalForm, SphereError> {
        let mut out = NormalForm::zero();
        for (w, c) in x {
            out.add_scaled(&self.reduce_word(w)?, c);
        }
        Ok(out)
    }

    pub fn multiply(&self, a: &NormalForm, b: &NormalForm) -> NormalForm {
        let mut memo = self.memo.lock().unwrap_or_else(|e| e.into_inner());
        let mut out = NormalForm::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                let w = ma.word().concat(&mb.word());
                out.add_scaled(&self.nf(&w, &mut memo), &(ca * cb));
            }
        }
        out
    }

    /// Resolves every overlap `xyz` where `xy` and `yz` are both left-hand
    /// sides, rewriting each side first.
    pub fn confluence_check(&self) -> ConfluenceReport {
        let mut memo = self.memo.lock().unwrap_or_else(|e| e.into_inner());
        let mut overlaps = Vec::new();
        for l1 in self.rules.keys() {
            for l2 in self.rules.keys() {
                if l1.letters()[1] != l2.letters()[0] {
                    continue;
                }
                let w = Word(vec![l1.letters()[0], l1.letters()[1], l2.letters()[1]]);
                let left = self.rewrite_at(&w, 0, &mut memo);
                let right = self.rewrite_at(&w, 1, &mut memo);
                overlaps.push(Overlap { word: w, left, right });
            }
        }
        ConfluenceReport { overlaps }
    }

    /// Number of normal monomials of degree at most `d`.
    pub fn filtered_dimension(d: u32) -> usize {
        Pbw::up_to(d).len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expression;
    use Letter::*;

    fn q() -> RF {
        RF::var(Var::Q)
    }

    fn sphere() -> Sphere {
        Sphere::new(&Decomposition::new(q()).unwrap(), RF::var(Var::C)).unwrap()
    }

    #[test]
    fn basic_reductions() {
        let s = sphere();
        let vu = s.reduce_word(&Word(vec![V, U])).unwrap();
        assert_eq!(vu.to_string(), "(q^2)*u.v");
        let v0 = Decomposition::new(q()).unwrap().v0().clone();
        assert_eq!(s.reduce(&v0).unwrap(), NormalForm::scalar(RF::var(Var::C)));
        let wvu = s.reduce_word(&Word(vec![W, V, U])).unwrap();
        // wv -> q^2 vw, then wu -> q^4 uw + (const), then vu -> q^2 uv.
        let mut expected = NormalForm::term(Pbw::new(1, 1, 1), q().pow(8));
        let k = RF::var(Var::C) * q().pow(3) * (RF::one() - q().pow(2)) / (RF::one() + q().pow(2));
        expected.add_term(Pbw::new(0, 1, 0), k);
        assert_eq!(wvu, expected);
    }

    #[test]
    fn generators_vanish_and_overlaps_resolve() {
        let s = sphere();
        for g in s.generators() {
            assert!(s.reduce_combination(g).unwrap().is_zero());
        }
        let report = s.confluence_check();
        let words: Vec<String> = report.overlaps.iter().map(|o| o.word.to_string()).collect();
        assert_eq!(words.len(), 4);
        for w in ["w.v.u", "w.v.v", "v.v.u", "v.v.v"] {
            assert!(words.contains(&w.to_string()));
        }
        assert!(report.confluent());
    }

    #[test]
    fn dimensions() {
        assert_eq!(Sphere::filtered_dimension(0), 1);
        assert_eq!(Sphere::filtered_dimension(1), 4);
        for d in 0..7 {
            assert_eq!(Sphere::filtered_dimension(d), ((d + 1) * (d + 1)) as usize);
        }
    }

    #[test]
    fn unit_and_normal_products() {
        let s = sphere();
        let b = s.reduce(&parse_expression("w.u + q*v.w").unwrap()).unwrap();
        assert_eq!(s.multiply(&NormalForm::one(), &b), b);
        assert_eq!(s.multiply(&b, &NormalForm::one()), b);
        let uw = s.multiply(&NormalForm::letter(U), &NormalForm::letter(W));
        assert_eq!(uw, NormalForm::monomial(Pbw::new(1, 0, 1)));
    }
}
