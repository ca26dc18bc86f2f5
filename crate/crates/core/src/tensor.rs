//! Tensor words over `V = span(u, v, w)` and `V' = span(du, dv, dw)`, their
//! linear combinations, and exact sparse linear operators between
//! basis-labelled tensor spaces.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::arith::{ArithError, RationalFunction};

/// Which of the two three-dimensional spaces a tensor leg lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Space {
    /// `V`, spanned by `u, v, w`.
    Base,
    /// `V'`, spanned by `du, dv, dw`.
    Diff,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Base => f.write_str("V"),
            Space::Diff => f.write_str("V'"),
        }
    }
}

/// Sequence of spaces, one per tensor leg.
pub type Signature = Vec<Space>;

pub fn signature_string(sig: &[Space]) -> String {
    if sig.is_empty() {
        return "k".to_string();
    }
    sig.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("⊗")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    U,
    V,
    W,
    DU,
    DV,
    DW,
}

const LETTER_NAMES: [&str; 6] = ["u", "v", "w", "du", "dv", "dw"];

impl Letter {
    pub const BASE: [Letter; 3] = [Letter::U, Letter::V, Letter::W];
    pub const DIFF: [Letter; 3] = [Letter::DU, Letter::DV, Letter::DW];

    /// The letter with basis index `i` (0 = u, 1 = v, 2 = w) in `space`.
    pub fn new(space: Space, i: usize) -> Letter {
        match space {
            Space::Base => Self::BASE[i],
            Space::Diff => Self::DIFF[i],
        }
    }

    pub fn space(self) -> Space {
        match self {
            Letter::U | Letter::V | Letter::W => Space::Base,
            _ => Space::Diff,
        }
    }

    /// Basis index inside its space.
    pub fn index(self) -> usize {
        (self as usize) % 3
    }

    /// H-weight: 2, 0, -2 for u, v, w and their differentials.
    pub fn weight(self) -> i32 {
        2 - 2 * self.index() as i32
    }

    /// Same basis index, moved to `space`.
    pub fn in_space(self, space: Space) -> Letter {
        Letter::new(space, self.index())
    }

    pub fn name(self) -> &'static str {
        LETTER_NAMES[self as usize]
    }

    pub fn from_name(name: &str) -> Option<Letter> {
        LETTER_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| [Letter::U, Letter::V, Letter::W, Letter::DU, Letter::DV, Letter::DW][i])
    }

    pub fn letters_of(space: Space) -> [Letter; 3] {
        match space {
            Space::Base => Self::BASE,
            Space::Diff => Self::DIFF,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A basis tensor: a finite sequence of letters. The empty word is the unit
/// scalar.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters(letters: &[Letter]) -> Word {
        Word(letters.to_vec())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signature(&self) -> Signature {
        self.0.iter().map(|l| l.space()).collect()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut l = self.0.clone();
        l.extend_from_slice(&other.0);
        Word(l)
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    /// Same basis indices with the spaces taken from `sig`.
    pub fn relabel(&self, sig: &[Space]) -> Word {
        debug_assert_eq!(sig.len(), self.len());
        Word(self.0.iter().zip(sig).map(|(l, s)| l.in_space(*s)).collect())
    }

    /// All `3^n` basis words of a signature in lexicographic order.
    pub fn all(sig: &[Space]) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for s in sig {
            let mut next = Vec::with_capacity(out.len() * 3);
            for w in &out {
                for l in Letter::letters_of(*s) {
                    let mut x = w.0.clone();
                    x.push(l);
                    next.push(Word(x));
                }
            }
            out = next;
        }
        out
    }

    /// Total H-weight.
    pub fn weight(&self) -> i32 {
        self.0.iter().map(|l| l.weight()).sum()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<&str> = self.0.iter().map(|l| l.name()).collect();
        f.write_str(&parts.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("signature mismatch at legs {start}..{end}: expected {expected}, found {found}")]
    SignatureMismatch {
        start: usize,
        end: usize,
        expected: String,
        found: String,
    },
    #[error("leg position {position} out of range for an operator on {arity} legs applied to {len} legs")]
    PositionOutOfRange { position: usize, arity: usize, len: usize },
    #[error("term {word} has signature {found}, element has signature {expected}")]
    MixedSignature {
        word: String,
        expected: String,
        found: String,
    },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

fn mismatch(start: usize, expected: &[Space], found: &[Space]) -> TensorError {
    TensorError::SignatureMismatch {
        start,
        end: start + found.len(),
        expected: signature_string(expected),
        found: signature_string(found),
    }
}

/// Finite linear combination of words sharing one signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorElement {
    signature: Signature,
    terms: BTreeMap<Word, RationalFunction>,
}

impl TensorElement {
    pub fn zero(signature: &[Space]) -> Self {
        TensorElement {
            signature: signature.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(word: Word) -> Self {
        Self::term(word, RationalFunction::one())
    }

    pub fn term(word: Word, coeff: RationalFunction) -> Self {
        let mut e = Self::zero(&word.signature());
        e.add_term(word, coeff);
        e
    }

    pub fn scalar(c: RationalFunction) -> Self {
        Self::term(Word::empty(), c)
    }

    /// Builds an element from terms; every word must have `signature`.
    pub fn from_terms<I>(signature: &[Space], terms: I) -> Result<Self, TensorError>
    where
        I: IntoIterator<Item = (Word, RationalFunction)>,
    {
        let mut e = Self::zero(signature);
        for (w, c) in terms {
            if w.signature() != signature {
                return Err(TensorError::MixedSignature {
                    word: w.to_string(),
                    expected: signature_string(signature),
                    found: signature_string(&w.signature()),
                });
            }
            e.add_term(w, c);
        }
        Ok(e)
    }

    /// Convenience constructor from letter slices; panics on a signature
    /// mismatch, so it is meant for literal data.
    pub fn from_pairs(terms: &[(&[Letter], RationalFunction)]) -> Self {
        let sig = Word::from_letters(terms[0].0).signature();
        Self::from_terms(&sig, terms.iter().map(|(l, c)| (Word::from_letters(l), c.clone())))
            .expect("literal tensor data has a consistent signature")
    }

    pub fn signature(&self) -> &[Space] {
        &self.signature
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &RationalFunction)> {
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

    pub fn coefficient_of(&self, word: &Word) -> RationalFunction {
        self.terms.get(word).cloned().unwrap_or_else(RationalFunction::zero)
    }

    /// Adds `c * word`; the word must already have the element's signature.
    pub fn add_term(&mut self, word: Word, c: RationalFunction) {
        debug_assert_eq!(word.signature(), self.signature);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &TensorElement, k: &RationalFunction) -> Result<(), TensorError> {
        if other.signature != self.signature {
            return Err(mismatch(0, &self.signature, &other.signature));
        }
        if k.is_zero() {
            return Ok(());
        }
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c * k);
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorElement) -> Result<TensorElement, TensorError> {
        let mut r = self.clone();
        r.add_scaled(other, &RationalFunction::one())?;
        Ok(r)
    }

    pub fn sub(&self, other: &TensorElement) -> Result<TensorElement, TensorError> {
        let mut r = self.clone();
        r.add_scaled(other, &RationalFunction::from_int(-1))?;
        Ok(r)
    }

    pub fn scale(&self, k: &RationalFunction) -> TensorElement {
        if k.is_zero() {
            return Self::zero(&self.signature);
        }
        TensorElement {
            signature: self.signature.clone(),
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * k)).collect(),
        }
    }

    pub fn neg(&self) -> TensorElement {
        self.scale(&RationalFunction::from_int(-1))
    }

    /// Tensor product: concatenation of words, product of coefficients.
    pub fn tensor(&self, other: &TensorElement) -> TensorElement {
        let mut sig = self.signature.clone();
        sig.extend_from_slice(&other.signature);
        let mut r = Self::zero(&sig);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                r.add_term(a.concat(b), ca * cb);
            }
        }
        r
    }

    /// Same coefficients with every word relabelled to `sig`.
    pub fn relabel(&self, sig: &[Space]) -> TensorElement {
        TensorElement {
            signature: sig.to_vec(),
            terms: self.terms.iter().map(|(w, c)| (w.relabel(sig), c.clone())).collect(),
        }
    }

    /// Applies a fallible map to every coefficient (e.g. a substitution).
    pub fn try_map_coefficients<F>(&self, mut f: F) -> Result<TensorElement, ArithError>
    where
        F: FnMut(&RationalFunction) -> Result<RationalFunction, ArithError>,
    {
        let mut r = Self::zero(&self.signature);
        for (w, c) in &self.terms {
            r.add_term(w.clone(), f(c)?);
        }
        Ok(r)
    }
}

impl fmt::Display for TensorElement {
    /// `(q^2)*du.v + (-1)*dv.u`, terms in lexicographic word order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if w.is_empty() {
                write!(f, "({})", c)?;
            } else {
                write!(f, "({})*{}", c, w)?;
            }
        }
        Ok(())
    }
}

/// Sparse matrix between two basis-labelled tensor spaces, stored column by
/// column: domain word to image element. Absent columns are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearOperator {
    domain: Signature,
    codomain: Signature,
    columns: BTreeMap<Word, TensorElement>,
}

impl LinearOperator {
    pub fn zero(domain: &[Space], codomain: &[Space]) -> Self {
        LinearOperator {
            domain: domain.to_vec(),
            codomain: codomain.to_vec(),
            columns: BTreeMap::new(),
        }
    }

    pub fn identity(sig: &[Space]) -> Self {
        Self::relabeling(sig, sig)
    }

    /// Keeps basis indices and swaps spaces, e.g. `a.db -> da.b` from
    /// `V⊗V'` to `V'⊗V`.
    pub fn relabeling(domain: &[Space], codomain: &[Space]) -> Self {
        assert_eq!(domain.len(), codomain.len(), "relabeling preserves the number of legs");
        Self::from_fn(domain, codomain, |w| TensorElement::basis(w.relabel(codomain)))
    }

    pub fn from_fn<F>(domain: &[Space], codomain: &[Space], mut f: F) -> Self
    where
        F: FnMut(&Word) -> TensorElement,
    {
        let mut op = Self::zero(domain, codomain);
        for w in Word::all(domain) {
            let img = f(&w);
            op.set_column(w, img).expect("image has the codomain signature");
        }
        op
    }

    pub fn domain(&self) -> &[Space] {
        &self.domain
    }

    pub fn codomain(&self) -> &[Space] {
        &self.codomain
    }

    pub fn set_column(&mut self, word: Word, image: TensorElement) -> Result<(), TensorError> {
        if word.signature() != self.domain {
            return Err(mismatch(0, &self.domain, &word.signature()));
        }
        if image.signature() != self.codomain.as_slice() {
            return Err(mismatch(0, &self.codomain, image.signature()));
        }
        if image.is_zero() {
            self.columns.remove(&word);
        } else {
            self.columns.insert(word, image);
        }
        Ok(())
    }

    pub fn column(&self, word: &Word) -> TensorElement {
        self.columns
            .get(word)
            .cloned()
            .unwrap_or_else(|| TensorElement::zero(&self.codomain))
    }

    /// Non-zero columns.
    pub fn columns(&self) -> impl Iterator<Item = (&Word, &TensorElement)> {
        self.columns.iter()
    }

    pub fn entry(&self, from: &Word, to: &Word) -> RationalFunction {
        self.columns
            .get(from)
            .map(|c| c.coefficient_of(to))
            .unwrap_or_else(RationalFunction::zero)
    }

    /// Copy with the matrix entry `(to, from)` replaced by `value`.
    pub fn with_entry(&self, from: &Word, to: &Word, value: RationalFunction) -> Self {
        let mut col = self.column(from);
        let old = col.coefficient_of(to);
        col.add_term(to.clone(), &value - &old);
        let mut op = self.clone();
        op.set_column(from.clone(), col).expect("signatures preserved");
        op
    }

    pub fn is_zero(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn apply(&self, x: &TensorElement) -> Result<TensorElement, TensorError> {
        if x.signature() != self.domain.as_slice() {
            return Err(mismatch(0, &self.domain, x.signature()));
        }
        let mut r = TensorElement::zero(&self.codomain);
        for (w, c) in x.terms() {
            if let Some(img) = self.columns.get(w) {
                r.add_scaled(img, c)?;
            }
        }
        Ok(r)
    }

    /// Applies the operator to legs `position..position + arity` (0-based),
    /// identity elsewhere.
    pub fn apply_at_legs(&self, position: usize, x: &TensorElement) -> Result<TensorElement, TensorError> {
        let k = self.domain.len();
        let n = x.signature().len();
        if position + k > n {
            return Err(TensorError::PositionOutOfRange {
                position,
                arity: k,
                len: n,
            });
        }
        let legs = &x.signature()[position..position + k];
        if legs != self.domain.as_slice() {
            return Err(mismatch(position, &self.domain, legs));
        }
        let mut sig = x.signature()[..position].to_vec();
        sig.extend_from_slice(&self.codomain);
        sig.extend_from_slice(&x.signature()[position + k..]);
        let mut r = TensorElement::zero(&sig);
        for (w, c) in x.terms() {
            let Some(img) = self.columns.get(&w.slice(position, position + k)) else {
                continue;
            };
            let pre = w.slice(0, position);
            let post = w.slice(position + k, n);
            for (m, cm) in img.terms() {
                r.add_term(pre.concat(m).concat(&post), c * cm);
            }
        }
        Ok(r)
    }

    /// `self ∘ g`: apply `g` first.
    pub fn compose(&self, g: &LinearOperator) -> Result<LinearOperator, TensorError> {
        if g.codomain != self.domain {
            return Err(mismatch(0, &self.domain, &g.codomain));
        }
        let mut op = Self::zero(&g.domain, &self.codomain);
        for (w, col) in &g.columns {
            op.set_column(w.clone(), self.apply(col)?)?;
        }
        Ok(op)
    }

    /// `id_left ⊗ self ⊗ id_right`.
    pub fn tensor_with_identity(&self, left: &[Space], right: &[Space]) -> LinearOperator {
        let mut dom = left.to_vec();
        dom.extend_from_slice(&self.domain);
        dom.extend_from_slice(right);
        let mut cod = left.to_vec();
        cod.extend_from_slice(&self.codomain);
        cod.extend_from_slice(right);
        let pos = left.len();
        let mut op = Self::zero(&dom, &cod);
        for w in Word::all(&dom) {
            let img = self
                .apply_at_legs(pos, &TensorElement::basis(w.clone()))
                .expect("padded signature matches");
            op.set_column(w, img).expect("padded signature matches");
        }
        op
    }

    pub fn scale(&self, k: &RationalFunction) -> LinearOperator {
        let mut op = Self::zero(&self.domain, &self.codomain);
        for (w, col) in &self.columns {
            op.set_column(w.clone(), col.scale(k)).expect("same signature");
        }
        op
    }

    pub fn add(&self, other: &LinearOperator) -> Result<LinearOperator, TensorError> {
        self.add_scaled(other, &RationalFunction::one())
    }

    pub fn sub(&self, other: &LinearOperator) -> Result<LinearOperator, TensorError> {
        self.add_scaled(other, &RationalFunction::from_int(-1))
    }

    /// `self + k * other`.
    pub fn add_scaled(&self, other: &LinearOperator, k: &RationalFunction) -> Result<LinearOperator, TensorError> {
        if self.domain != other.domain {
            return Err(mismatch(0, &self.domain, &other.domain));
        }
        if self.codomain != other.codomain {
            return Err(mismatch(0, &self.codomain, &other.codomain));
        }
        let mut op = self.clone();
        for (w, col) in &other.columns {
            let mut c = op.column(w);
            c.add_scaled(col, k)?;
            op.set_column(w.clone(), c)?;
        }
        Ok(op)
    }

    /// Same matrix read between relabelled spaces.
    pub fn relabel(&self, domain: &[Space], codomain: &[Space]) -> LinearOperator {
        let mut op = Self::zero(domain, codomain);
        for (w, col) in &self.columns {
            op.set_column(w.relabel(domain), col.relabel(codomain))
                .expect("relabelled signatures");
        }
        op
    }

    pub fn try_map_coefficients<F>(&self, mut f: F) -> Result<LinearOperator, ArithError>
    where
        F: FnMut(&RationalFunction) -> Result<RationalFunction, ArithError>,
    {
        let mut op = Self::zero(&self.domain, &self.codomain);
        for (w, col) in &self.columns {
            op.set_column(w.clone(), col.try_map_coefficients(&mut f)?)
                .expect("same signature");
        }
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Var;
    use Letter::*;

    fn q() -> RationalFunction {
        RationalFunction::var(Var::Q)
    }

    fn int(n: i64) -> RationalFunction {
        RationalFunction::from_int(n)
    }

    #[test]
    fn coefficient_read_off() {
        let x = TensorElement::from_pairs(&[(&[DU, V], q().pow(2)), (&[DV, U], int(-1))]);
        assert_eq!(x.coefficient_of(&Word(vec![DV, U])), int(-1));
        assert_eq!(x.to_string(), "(q^2)*du.v + (-1)*dv.u");
    }

    #[test]
    fn identity_and_zero() {
        let sig = [Space::Base, Space::Diff];
        let x = TensorElement::from_pairs(&[(&[U, DV], q()), (&[W, DU], int(3))]);
        assert_eq!(LinearOperator::identity(&sig).apply(&x).unwrap(), x);
        assert!(LinearOperator::zero(&sig, &sig).apply(&x).unwrap().is_zero());
    }

    #[test]
    fn legwise_application_and_errors() {
        let sig = [Space::Base, Space::Diff];
        let swap = LinearOperator::relabeling(&sig, &[Space::Diff, Space::Base]);
        let x = TensorElement::basis(Word(vec![W, U, DV]));
        let y = swap.apply_at_legs(1, &x).unwrap();
        assert_eq!(y, TensorElement::basis(Word(vec![W, DU, V])));
        assert!(matches!(
            swap.apply_at_legs(0, &x),
            Err(TensorError::SignatureMismatch { start: 0, .. })
        ));
        assert!(matches!(
            swap.apply_at_legs(2, &x),
            Err(TensorError::PositionOutOfRange { .. })
        ));
    }

    #[test]
    fn padding_matches_legwise_application() {
        let sig = [Space::Base, Space::Base];
        let op = LinearOperator::from_fn(&sig, &sig, |w| TensorElement::term(Word(vec![w.0[1], w.0[0]]), q()));
        let padded = op.tensor_with_identity(&[Space::Base], &[]);
        for w in Word::all(&[Space::Base; 3]) {
            let x = TensorElement::basis(w);
            assert_eq!(padded.apply(&x).unwrap(), op.apply_at_legs(1, &x).unwrap());
        }
    }

    #[test]
    fn mixed_signature_rejected() {
        let r = TensorElement::from_terms(&[Space::Base], vec![(Word(vec![U]), int(1)), (Word(vec![DU]), int(1))]);
        assert!(matches!(r, Err(TensorError::MixedSignature { .. })));
    }

    #[test]
    fn word_enumeration() {
        let all = Word::all(&[Space::Diff, Space::Base]);
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].to_string(), "du.u");
        assert_eq!(all[8].to_string(), "dw.w");
        assert_eq!(Word::empty().to_string(), "1");
    }
}
