//! One-sided cotangent modules over the quantum sphere.
//!
//! The right module is `V'⊗k(S²_q)` modulo the submodule `M_r` generated by
//! `r = d v̄₀ = (q³+q)du.w + dv.v + (q+q⁻¹)dw.u`; the left module is
//! `k(S²_q)⊗V'` modulo `M_l`, generated by `l = dv₀`. Both are handled
//! degreewise by exact linear algebra over the filtration.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::arith::RationalFunction;
use crate::linalg::Matrix;
use crate::sphere::{NormalForm, Pbw, Sphere, SphereError};
use crate::symmetry::{Decomposition, Transposition};
use crate::tensor::{Letter, Space, TensorElement, TensorError, Word};

type RF = RationalFunction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("`{word}` is not a {side} module word: expected exactly one differential, {place}")]
    BadShape {
        word: String,
        side: &'static str,
        place: &'static str,
    },
    #[error("expected a {expected} module element, got a {found} one")]
    WrongSide {
        expected: &'static str,
        found: &'static str,
    },
    #[error("the transposition is not invertible")]
    NotInvertible,
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// `V'⊗k(S²_q)`, the algebra acting from the right.
    Right,
    /// `k(S²_q)⊗V'`, the algebra acting from the left.
    Left,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Right => "right",
            Side::Left => "left",
        }
    }
}

/// Coordinate label in a free module: the differential and a normal
/// monomial.
pub type ModuleBasis = (Letter, Pbw);

/// An element of `V'⊗k(S²_q)` or `k(S²_q)⊗V'`, one normal form per
/// differential `du, dv, dw`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleElement {
    side: Side,
    components: [NormalForm; 3],
}

impl ModuleElement {
    pub fn zero(side: Side) -> Self {
        ModuleElement {
            side,
            components: Default::default(),
        }
    }

    /// `dx ⊗ f` (right) or `f ⊗ dx` (left).
    pub fn single(side: Side, dx: Letter, f: NormalForm) -> Self {
        assert_eq!(dx.space(), Space::Diff, "a differential letter");
        let mut m = Self::zero(side);
        m.components[dx.index()] = f;
        m
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn component(&self, dx: Letter) -> &NormalForm {
        &self.components[dx.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn add_scaled(&mut self, other: &ModuleElement, k: &RF) {
        assert_eq!(self.side, other.side, "same side");
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.add_scaled(b, k);
        }
    }

    pub fn add(&self, other: &ModuleElement) -> ModuleElement {
        let mut r = self.clone();
        r.add_scaled(other, &RF::one());
        r
    }

    pub fn sub(&self, other: &ModuleElement) -> ModuleElement {
        let mut r = self.clone();
        r.add_scaled(other, &RF::from_int(-1));
        r
    }

    pub fn scale(&self, k: &RF) -> ModuleElement {
        let mut r = Self::zero(self.side);
        r.add_scaled(self, k);
        r
    }

    /// Highest filtration degree of a component.
    pub fn degree(&self) -> Option<u32> {
        self.components.iter().filter_map(|c| c.degree()).max()
    }

    /// The algebra action on the free side: `m·f` for right elements,
    /// `f·m` for left ones.
    pub fn act(&self, sphere: &Sphere, f: &NormalForm) -> ModuleElement {
        let components = match self.side {
            Side::Right => self.components.clone().map(|c| sphere.multiply(&c, f)),
            Side::Left => self.components.clone().map(|c| sphere.multiply(f, &c)),
        };
        ModuleElement {
            side: self.side,
            components,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (ModuleBasis, &RF)> {
        Letter::DIFF
            .into_iter()
            .flat_map(move |dx| self.components[dx.index()].terms().map(move |(m, c)| ((dx, *m), c)))
    }

    pub fn coefficient(&self, b: &ModuleBasis) -> RF {
        self.components[b.0.index()].coefficient(&b.1)
    }

    /// Reads `dx.a1...an` (right) or `a1...an.dx` (left) words, reducing
    /// the algebra part.
    pub fn from_tensor(side: Side, sphere: &Sphere, x: &TensorElement) -> Result<Self, ModuleError> {
        let mut out = Self::zero(side);
        for (w, c) in x.terms() {
            let l = w.letters();
            let diffs = l.iter().filter(|x| x.space() == Space::Diff).count();
            let (dx, rest) = match side {
                Side::Right if diffs == 1 && l[0].space() == Space::Diff => (l[0], &l[1..]),
                Side::Left if diffs == 1 && l[l.len() - 1].space() == Space::Diff => {
                    (l[l.len() - 1], &l[..l.len() - 1])
                }
                _ => {
                    return Err(ModuleError::BadShape {
                        word: w.to_string(),
                        side: side.name(),
                        place: match side {
                            Side::Right => "in first position",
                            Side::Left => "in last position",
                        },
                    })
                }
            };
            let f = sphere.reduce_word(&Word::from_letters(rest))?;
            out.components[dx.index()].add_scaled(&f, c);
        }
        Ok(out)
    }

    /// The same element as a combination of tensor words.
    pub fn to_tensor_terms(&self) -> Vec<(Word, RF)> {
        self.terms()
            .map(|((dx, m), c)| {
                let w = match self.side {
                    Side::Right => Word(vec![dx]).concat(&m.word()),
                    Side::Left => m.word().concat(&Word(vec![dx])),
                };
                (w, c.clone())
            })
            .collect()
    }

    /// Coordinates over `basis`; coefficients outside it are ignored.
    pub fn coordinates(&self, basis: &[ModuleBasis]) -> Vec<RF> {
        basis.iter().map(|b| self.coefficient(b)).collect()
    }

    pub fn substitute(
        &self,
        bindings: &BTreeMap<crate::arith::Var, RF>,
    ) -> Result<ModuleElement, crate::arith::ArithError> {
        let mut components: [NormalForm; 3] = Default::default();
        for (i, c) in self.components.iter().enumerate() {
            components[i] = c.substitute(bindings)?;
        }
        Ok(ModuleElement {
            side: self.side,
            components,
        })
    }
}

impl fmt::Display for ModuleElement {
    /// `(q^2)*du.u + (1)*dv.v`; words written with the differential first
    /// (right) or last (left).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.to_tensor_terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = terms.iter().map(|(w, c)| format!("({})*{}", c, w)).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// All coordinate labels `(dx, m)` with `deg m ≤ d`.
pub fn free_basis(d: u32) -> Vec<ModuleBasis> {
    let monos = Pbw::up_to(d);
    Letter::DIFF
        .iter()
        .flat_map(|dx| monos.iter().map(move |m| (*dx, *m)))
        .collect()
}

/// H-weight of a coordinate label.
fn weight(b: &ModuleBasis) -> i32 {
    b.0.weight() + b.1.word().weight()
}

/// Outcome of a membership test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `x = gen · g` with `g = Σ coefficients[m] m`.
    Member {
        g: NormalForm,
    },
    NonMember {
        certificate: Certificate,
    },
}

/// A linear functional on the free module vanishing on the tested
/// submodule slice and not on the tested element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub functional: Vec<(ModuleBasis, RF)>,
}

impl Certificate {
    pub fn evaluate(&self, x: &ModuleElement) -> RF {
        self.functional.iter().map(|(b, c)| c * &x.coefficient(b)).sum()
    }

    /// Independent re-check: zero on every element of `basis`, non-zero on
    /// `x`.
    pub fn validate(&self, basis: &[ModuleElement], x: &ModuleElement) -> bool {
        basis.iter().all(|b| self.evaluate(b).is_zero()) && !self.evaluate(x).is_zero()
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .functional
            .iter()
            .map(|((dx, m), c)| {
                let w = Word(vec![*dx]).concat(&m.word());
                format!("[{}] {}", w, c)
            })
            .collect();
        f.write_str(&parts.join("; "))
    }
}

/// The cotangent module data for one side.
#[derive(Clone, Debug)]
pub struct Cotangent<'a> {
    sphere: &'a Sphere,
    side: Side,
    generator: ModuleElement,
}

impl<'a> Cotangent<'a> {
    pub fn new(sphere: &'a Sphere, dec: &Decomposition, side: Side) -> Self {
        let gen_tensor = match side {
            Side::Right => dec.dv0_bar(),
            Side::Left => dec.dv0(),
        };
        let generator = ModuleElement::from_tensor(side, sphere, &gen_tensor).expect("generator has the module shape");
        Cotangent {
            sphere,
            side,
            generator,
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn sphere(&self) -> &Sphere {
        self.sphere
    }

    /// `r` (right) or `l` (left).
    pub fn generator(&self) -> &ModuleElement {
        &self.generator
    }

    /// `{gen · m : m normal, deg m ≤ d}`, spanning the submodule up to
    /// filtration `d + 1`.
    pub fn submodule_basis(&self, d: u32) -> Vec<ModuleElement> {
        Pbw::up_to(d)
            .into_iter()
            .map(|m| self.generator.act(self.sphere, &NormalForm::monomial(m)))
            .collect()
    }

    /// Decides whether `x` lies in `gen · F_d`.
    pub fn membership_test(&self, x: &ModuleElement, d: u32) -> Result<Membership, ModuleError> {
        if x.side() != self.side {
            return Err(ModuleError::WrongSide {
                expected: self.side.name(),
                found: x.side().name(),
            });
        }
        let monos = Pbw::up_to(d);
        let gens = self.submodule_basis(d);
        let top = (d + 1).max(x.degree().unwrap_or(0));
        let basis = free_basis(top);
        let cols: Vec<Vec<RF>> = gens.iter().map(|g| g.coordinates(&basis)).collect();
        let a = Matrix::from_columns(&cols, basis.len());
        let b = x.coordinates(&basis);
        if let Some(sol) = a.solve(&b) {
            let mut g = NormalForm::zero();
            for (m, c) in monos.iter().zip(sol) {
                g.add_term(*m, c);
            }
            return Ok(Membership::Member { g });
        }
        let y = a.separating_functional(&b).expect("b is outside the column space");
        let functional = basis.into_iter().zip(y).filter(|(_, c)| !c.is_zero()).collect();
        Ok(Membership::NonMember {
            certificate: Certificate { functional },
        })
    }

    /// `dim (V'⊗F_d) / (M ∩ V'⊗F_d)`, with the intersection computed from
    /// `gen · F_d` as the kernel of the projection to degree `d + 1`.
    pub fn filtered_dimension(&self, d: u32) -> usize {
        let gens = self.submodule_basis(d);
        let basis = free_basis(d + 1);
        let free = 3 * Pbw::up_to(d).len();
        let mut inside = 0;
        let mut weights: Vec<i32> = basis.iter().map(weight).collect();
        weights.sort();
        weights.dedup();
        // Everything is weight-homogeneous, so work block by block.
        for wt in weights {
            let rows: Vec<usize> = (0..basis.len()).filter(|&i| weight(&basis[i]) == wt).collect();
            let block: Vec<Vec<RF>> = gens
                .iter()
                .map(|g| rows.iter().map(|&i| g.coefficient(&basis[i])).collect::<Vec<RF>>())
                .filter(|v| v.iter().any(|x| !x.is_zero()))
                .collect();
            if block.is_empty() {
                continue;
            }
            let high: Vec<usize> = rows
                .iter()
                .enumerate()
                .filter(|(_, &i)| basis[i].1.degree() == d + 1)
                .map(|(k, _)| k)
                .collect();
            let full = Matrix::from_rows(block.clone());
            let top = Matrix::from_rows(
                block
                    .iter()
                    .map(|v| high.iter().map(|&k| v[k].clone()).collect())
                    .collect(),
            );
            let top_rank = if high.is_empty() { 0 } else { top.rank() };
            inside += full.rank() - top_rank;
        }
        free - inside
    }
}

/// Moves the differential of every word to the front with the given
/// transposition and reduces the algebra part: `f⊗dx⊗g ↦ dx'⊗(f'g)`.
pub fn rho_reduce(sphere: &Sphere, t: &Transposition, x: &TensorElement) -> Result<ModuleElement, ModuleError> {
    if !t.is_invertible() {
        return Err(ModuleError::NotInvertible);
    }
    let mut out = ModuleElement::zero(Side::Right);
    for (w, c) in x.terms() {
        let pos = differential_position(w)?;
        let moved = t.move_to_front(&TensorElement::basis(w.clone()), pos)?;
        out.add_scaled(&ModuleElement::from_tensor(Side::Right, sphere, &moved)?, c);
    }
    Ok(out)
}

/// Mirror of [`rho_reduce`]: moves the differential to the back.
pub fn rho_reduce_left(sphere: &Sphere, t: &Transposition, x: &TensorElement) -> Result<ModuleElement, ModuleError> {
    if !t.is_invertible() {
        return Err(ModuleError::NotInvertible);
    }
    let mut out = ModuleElement::zero(Side::Left);
    for (w, c) in x.terms() {
        let pos = differential_position(w)?;
        let n = w.len();
        let mut y = TensorElement::basis(w.clone());
        for p in pos..n - 1 {
            y = t.apply_at(p, &y)?;
        }
        out.add_scaled(&ModuleElement::from_tensor(Side::Left, sphere, &y)?, c);
    }
    Ok(out)
}

fn differential_position(w: &Word) -> Result<usize, ModuleError> {
    let pos: Vec<usize> = (0..w.len())
        .filter(|&i| w.letters()[i].space() == Space::Diff)
        .collect();
    match pos.as_slice() {
        [p] => Ok(*p),
        _ => Err(ModuleError::BadShape {
            word: w.to_string(),
            side: "bimodule",
            place: "anywhere",
        }),
    }
}

/// Applies a transposition to a left module element `f⊗dx`, producing the
/// right module element obtained by moving `dx` past the normal monomial
/// word of `f`.
pub fn transpose_left(sphere: &Sphere, t: &Transposition, m: &ModuleElement) -> Result<ModuleElement, ModuleError> {
    if m.side() != Side::Left {
        return Err(ModuleError::WrongSide {
            expected: "left",
            found: m.side().name(),
        });
    }
    let mut x_terms = Vec::new();
    for (w, c) in m.to_tensor_terms() {
        x_terms.push((w, c));
    }
    let mut out = ModuleElement::zero(Side::Right);
    for (w, c) in x_terms {
        out.add_scaled(&rho_reduce(sphere, t, &TensorElement::basis(w))?, &c);
    }
    Ok(out)
}

/// Applies a transposition to a right module element `dx⊗f`, moving `dx`
/// to the back.
pub fn transpose_right(sphere: &Sphere, t: &Transposition, m: &ModuleElement) -> Result<ModuleElement, ModuleError> {
    if m.side() != Side::Right {
        return Err(ModuleError::WrongSide {
            expected: "right",
            found: m.side().name(),
        });
    }
    let mut out = ModuleElement::zero(Side::Left);
    for (w, c) in m.to_tensor_terms() {
        out.add_scaled(&rho_reduce_left(sphere, t, &TensorElement::basis(w))?, &c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Var;
    use crate::symmetry::Projectors;
    use std::sync::Arc;
    use Letter::*;

    fn q() -> RF {
        RF::var(Var::Q)
    }

    struct Fixture {
        dec: Decomposition,
        sphere: Sphere,
    }

    fn fixture() -> Fixture {
        let dec = Decomposition::new(q()).unwrap();
        let sphere = Sphere::new(&dec, RF::var(Var::C)).unwrap();
        Fixture { dec, sphere }
    }

    #[test]
    fn right_action_examples() {
        let f = fixture();
        let du1 = ModuleElement::single(Side::Right, DU, NormalForm::one());
        let u = NormalForm::letter(U);
        assert_eq!(
            du1.act(&f.sphere, &u),
            ModuleElement::single(Side::Right, DU, u.clone())
        );
        let dv_v = ModuleElement::single(Side::Right, DU, NormalForm::letter(V));
        assert_eq!(
            dv_v.act(&f.sphere, &u),
            ModuleElement::single(Side::Right, DU, NormalForm::term(Pbw::new(1, 1, 0), q().pow(2)))
        );
        let cot = Cotangent::new(&f.sphere, &f.dec, Side::Right);
        assert_eq!(cot.generator().act(&f.sphere, &NormalForm::one()), *cot.generator());
        assert!(!cot.generator().is_zero());
    }

    #[test]
    fn submodule_bases() {
        let f = fixture();
        let cot = Cotangent::new(&f.sphere, &f.dec, Side::Right);
        assert_eq!(cot.submodule_basis(0), vec![cot.generator().clone()]);
        assert_eq!(cot.submodule_basis(1).len(), 4);
    }

    #[test]
    fn membership_of_generator_multiple() {
        let f = fixture();
        let cot = Cotangent::new(&f.sphere, &f.dec, Side::Right);
        let x = cot.generator().act(&f.sphere, &NormalForm::letter(U));
        match cot.membership_test(&x, 1).unwrap() {
            Membership::Member { g } => assert_eq!(g, NormalForm::letter(U)),
            other => panic!("{:?}", other),
        }
        let y = ModuleElement::single(Side::Right, DU, NormalForm::letter(U));
        match cot.membership_test(&y, 1).unwrap() {
            Membership::NonMember { certificate } => {
                assert!(certificate.validate(&cot.submodule_basis(1), &y))
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn rho_examples() {
        let f = fixture();
        let p = Arc::new(Projectors::new(&f.dec));
        let s = Transposition::yang_baxter(&q(), p);
        let x = TensorElement::basis(Word(vec![DU]));
        assert_eq!(
            rho_reduce(&f.sphere, &s, &x).unwrap(),
            ModuleElement::single(Side::Right, DU, NormalForm::one())
        );
        let x = TensorElement::basis(Word(vec![U, DU]));
        assert_eq!(
            rho_reduce(&f.sphere, &s, &x).unwrap(),
            ModuleElement::single(Side::Right, DU, NormalForm::term(Pbw::new(1, 0, 0), q().pow(2)))
        );
    }

    #[test]
    fn low_degree_dimensions() {
        let f = fixture();
        let right = Cotangent::new(&f.sphere, &f.dec, Side::Right);
        let left = Cotangent::new(&f.sphere, &f.dec, Side::Left);
        assert_eq!(right.filtered_dimension(0), 3);
        for d in 0..3 {
            assert_eq!(right.filtered_dimension(d), left.filtered_dimension(d));
        }
    }
}
