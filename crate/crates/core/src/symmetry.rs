//! The `U_q(sl(2))` action on `V` and `V'`, the spin decomposition of
//! `V⊗V`, projectors in every placement, and covariant transpositions.

use std::sync::Arc;

use thiserror::Error;

use crate::arith::RationalFunction;
use crate::linalg::Matrix;
use crate::tensor::{Letter, LinearOperator, Space, TensorElement, TensorError, Word};

type RF = RationalFunction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("the spin decomposition is singular at q = {0}")]
    SingularDecomposition(String),
    #[error("q must be non-zero")]
    ZeroQ,
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    X,
    Y,
    K,
    KInv,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::X, Generator::Y, Generator::K, Generator::KInv];

    pub fn name(self) -> &'static str {
        match self {
            Generator::X => "X",
            Generator::Y => "Y",
            Generator::K => "K",
            Generator::KInv => "K^-1",
        }
    }
}

/// A coproduct of the form `Δ(X) = X⊗K^a + K^b⊗X`, `Δ(Y) = Y⊗K^c + K^d⊗Y`,
/// `Δ(K) = K⊗K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coproduct {
    pub name: &'static str,
    /// `(b, a)`: powers of K to the left and right of X.
    pub x: (i32, i32),
    /// `(d, c)`: powers of K to the left and right of Y.
    pub y: (i32, i32),
}

impl Coproduct {
    pub const CANDIDATES: [Coproduct; 4] = [
        Coproduct {
            name: "X⊗K + 1⊗X, Y⊗1 + K^-1⊗Y",
            x: (0, 1),
            y: (-1, 0),
        },
        Coproduct {
            name: "X⊗1 + K⊗X, Y⊗K^-1 + 1⊗Y",
            x: (1, 0),
            y: (0, -1),
        },
        Coproduct {
            name: "X⊗K^-1 + 1⊗X, Y⊗1 + K⊗Y",
            x: (0, -1),
            y: (1, 0),
        },
        Coproduct {
            name: "X⊗1 + K^-1⊗X, Y⊗K + 1⊗Y",
            x: (-1, 0),
            y: (0, 1),
        },
    ];

    /// The only candidate compatible with the listed spin spans; see
    /// [`select_coproduct`].
    pub const STANDARD: Coproduct = Self::CANDIDATES[3];
}

/// The action of `X, Y, K^{±1}` on the letters of `V` (and identically on
/// `V'`): `X: u→0, v→-(q+q⁻¹)u, w→v`, `Y: u→-v, v→(q+q⁻¹)w, w→0`,
/// `K = q^H` with weights `2, 0, -2`.
#[derive(Clone, Debug)]
pub struct GeneratorAction {
    q: RF,
}

impl GeneratorAction {
    pub fn new(q: RF) -> Self {
        GeneratorAction { q }
    }

    pub fn q(&self) -> &RF {
        &self.q
    }

    /// Image of a single letter, as `(letter, coefficient)` pairs.
    pub fn act_letter(&self, g: Generator, l: Letter) -> Vec<(Letter, RF)> {
        let s = l.space();
        let qq = &self.q + &self.q.pow(-1);
        match (g, l.index()) {
            (Generator::X, 0) | (Generator::Y, 2) => vec![],
            (Generator::X, 1) => vec![(Letter::new(s, 0), -qq)],
            (Generator::X, 2) => vec![(Letter::new(s, 1), RF::one())],
            (Generator::Y, 0) => vec![(Letter::new(s, 1), RF::from_int(-1))],
            (Generator::Y, 1) => vec![(Letter::new(s, 2), qq)],
            (Generator::K, _) => vec![(l, self.q.pow(l.weight()))],
            (Generator::KInv, _) => vec![(l, self.q.pow(-l.weight()))],
            _ => unreachable!(),
        }
    }

    fn k_power(&self, l: Letter, e: i32) -> RF {
        self.q.pow(l.weight() * e)
    }

    /// The generator acting on a tensor space through the iterated coproduct.
    pub fn operator(&self, g: Generator, sig: &[Space], cop: &Coproduct) -> LinearOperator {
        LinearOperator::from_fn(sig, sig, |w| {
            let letters = w.letters();
            let n = letters.len();
            let mut out = TensorElement::zero(sig);
            match g {
                Generator::K | Generator::KInv => {
                    let e = if g == Generator::K { 1 } else { -1 };
                    let c = letters.iter().map(|l| self.k_power(*l, e)).product::<RF>();
                    out.add_term(w.clone(), c);
                }
                Generator::X | Generator::Y => {
                    let (left, right) = if g == Generator::X { cop.x } else { cop.y };
                    for i in 0..n {
                        let mut scal = RF::one();
                        for l in &letters[..i] {
                            scal = &scal * &self.k_power(*l, left);
                        }
                        for l in &letters[i + 1..] {
                            scal = &scal * &self.k_power(*l, right);
                        }
                        for (img, c) in self.act_letter(g, letters[i]) {
                            let mut nw = letters.to_vec();
                            nw[i] = img;
                            out.add_term(Word(nw), &c * &scal);
                        }
                    }
                }
            }
            out
        })
    }

    /// Applies a generator to an element of any signature.
    pub fn apply(&self, g: Generator, x: &TensorElement, cop: &Coproduct) -> TensorElement {
        self.operator(g, x.signature(), cop)
            .apply(x)
            .expect("operator built on the element's signature")
    }
}

pub const VV: [Space; 2] = [Space::Base, Space::Base];

/// The explicit spin decomposition `V⊗V = V₀ ⊕ V₁ ⊕ V₂`.
///
/// Basis order: `v₀`, the three spin-1 vectors, the five spin-2 vectors,
/// exactly as listed (no normalisation).
#[derive(Clone, Debug)]
pub struct Decomposition {
    q: RF,
    vectors: Vec<TensorElement>,
    basis: Matrix,
    dual: Matrix,
}

pub const SPIN_RANGES: [std::ops::Range<usize>; 3] = [0..1, 1..4, 4..9];

impl Decomposition {
    pub fn new(q: RF) -> Result<Self, SymmetryError> {
        if q.is_zero() {
            return Err(SymmetryError::ZeroQ);
        }
        use Letter::{U, V, W};
        let one = RF::one;
        let int = RF::from_int;
        let q2 = q.pow(2);
        let q3q = &q.pow(3) + &q;
        let qqi = &q + &q.pow(-1);
        let el = |terms: &[(&[Letter], RF)]| TensorElement::from_pairs(terms);
        let vectors = vec![
            el(&[(&[U, W], q3q.clone()), (&[V, V], one()), (&[W, U], qqi)]),
            el(&[(&[U, V], q2.clone()), (&[V, U], int(-1))]),
            el(&[(&[U, W], q3q.clone()), (&[W, U], -q3q.clone()), (&[V, V], &one() - &q2)]),
            el(&[(&[W, V], one()), (&[V, W], -q2.clone())]),
            el(&[(&[U, U], one())]),
            el(&[(&[U, V], one()), (&[V, U], q2.clone())]),
            el(&[(&[U, W], one()), (&[V, V], -q.clone()), (&[W, U], q.pow(4))]),
            el(&[(&[V, W], one()), (&[W, V], q2.clone())]),
            el(&[(&[W, W], one())]),
        ];
        let words = Word::all(&VV);
        let cols: Vec<Vec<RF>> = vectors
            .iter()
            .map(|v| words.iter().map(|w| v.coefficient_of(w)).collect())
            .collect();
        let basis = Matrix::from_columns(&cols, 9);
        let dual = basis
            .inverse()
            .ok_or_else(|| SymmetryError::SingularDecomposition(q.to_string()))?;
        Ok(Decomposition {
            q,
            vectors,
            basis,
            dual,
        })
    }

    pub fn q(&self) -> &RF {
        &self.q
    }

    /// `v₀ = (q³+q)u.w + v.v + (q+q⁻¹)w.u`.
    pub fn v0(&self) -> &TensorElement {
        &self.vectors[0]
    }

    /// `dv₀ = (q³+q)u.dw + v.dv + (q+q⁻¹)w.du` in `V⊗V'`.
    pub fn dv0(&self) -> TensorElement {
        self.vectors[0].relabel(&Placement::VDiff.domain())
    }

    /// `d v̄₀ = (q³+q)du.w + dv.v + (q+q⁻¹)dw.u` in `V'⊗V`.
    pub fn dv0_bar(&self) -> TensorElement {
        self.vectors[0].relabel(&Placement::VDiff.codomain())
    }

    /// The listed vectors of the spin-`i` component, in `V⊗V`.
    pub fn span(&self, spin: usize) -> &[TensorElement] {
        &self.vectors[SPIN_RANGES[spin].clone()]
    }

    /// All nine basis vectors with their spin.
    pub fn vectors(&self) -> impl Iterator<Item = (usize, &TensorElement)> {
        self.vectors.iter().enumerate().map(|(k, v)| {
            let spin = SPIN_RANGES.iter().position(|r| r.contains(&k)).unwrap();
            (spin, v)
        })
    }

    pub fn basis_matrix(&self) -> &Matrix {
        &self.basis
    }

    /// Coordinates of a two-leg element in the span basis. Only basis
    /// indices matter, so any placement may be passed.
    pub fn coordinates(&self, x: &TensorElement) -> Vec<RF> {
        assert_eq!(x.signature().len(), 2, "two-leg element");
        let words = Word::all(&VV);
        let v: Vec<RF> = words
            .iter()
            .map(|w| x.coefficient_of(&w.relabel(x.signature())))
            .collect();
        self.dual.mul_vec(&v)
    }

    /// `P_i` on `V⊗V` as `B D_i B⁻¹`.
    fn base_projector(&self, spin: usize) -> LinearOperator {
        let words = Word::all(&VV);
        let mut op = LinearOperator::zero(&VV, &VV);
        for (j, w) in words.iter().enumerate() {
            let mut img = TensorElement::zero(&VV);
            for k in SPIN_RANGES[spin].clone() {
                img.add_scaled(&self.vectors[k], self.dual.get(k, j))
                    .expect("same signature");
            }
            op.set_column(w.clone(), img).expect("same signature");
        }
        op
    }
}

/// The four ways of placing two legs, each with the transposed codomain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Placement {
    /// `V⊗V → V⊗V`
    VV,
    /// `V⊗V' → V'⊗V`
    VDiff,
    /// `V'⊗V → V⊗V'`
    DiffV,
    /// `V'⊗V' → V'⊗V'`
    DiffDiff,
}

impl Placement {
    pub const ALL: [Placement; 4] = [Placement::VV, Placement::VDiff, Placement::DiffV, Placement::DiffDiff];

    pub fn domain(self) -> [Space; 2] {
        match self {
            Placement::VV => [Space::Base, Space::Base],
            Placement::VDiff => [Space::Base, Space::Diff],
            Placement::DiffV => [Space::Diff, Space::Base],
            Placement::DiffDiff => [Space::Diff, Space::Diff],
        }
    }

    pub fn codomain(self) -> [Space; 2] {
        let [a, b] = self.domain();
        [b, a]
    }

    pub fn from_domain(sig: &[Space]) -> Option<Placement> {
        Self::ALL.into_iter().find(|p| p.domain() == sig)
    }

    pub fn name(self) -> &'static str {
        match self {
            Placement::VV => "V⊗V",
            Placement::VDiff => "V⊗V'",
            Placement::DiffV => "V'⊗V",
            Placement::DiffDiff => "V'⊗V'",
        }
    }

    pub fn from_name(s: &str) -> Option<Placement> {
        match s {
            "VV" | "V.V" | "V⊗V" => Some(Placement::VV),
            "VdV" | "VD" | "V.V'" | "V⊗V'" => Some(Placement::VDiff),
            "dVV" | "DV" | "V'.V" | "V'⊗V" => Some(Placement::DiffV),
            "dVdV" | "DD" | "V'.V'" | "V'⊗V'" => Some(Placement::DiffDiff),
            _ => None,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Projectors `P₀, P₁, P₂` in all placements. In a mixed placement,
/// `P_i(a⊗db)` is the projection of `a⊗b` with the `d` moved to the first
/// leg.
#[derive(Clone, Debug)]
pub struct Projectors {
    ops: [[LinearOperator; 4]; 3],
}

impl Projectors {
    pub fn new(dec: &Decomposition) -> Self {
        Self::from_base([dec.base_projector(0), dec.base_projector(1), dec.base_projector(2)])
    }

    /// Builds all placements from three operators on `V⊗V`.
    pub fn from_base(base: [LinearOperator; 3]) -> Self {
        let ops = base.map(|b| Placement::ALL.map(|p| b.relabel(&p.domain(), &p.codomain())));
        Projectors { ops }
    }

    pub fn get(&self, spin: usize, p: Placement) -> &LinearOperator {
        &self.ops[spin][p.index()]
    }

    pub fn base(&self, spin: usize) -> &LinearOperator {
        self.get(spin, Placement::VV)
    }

    /// The three base operators with one matrix entry of `P_spin` replaced.
    pub fn with_base_entry(&self, spin: usize, from: &Word, to: &Word, value: RF) -> Self {
        let mut base = [self.base(0).clone(), self.base(1).clone(), self.base(2).clone()];
        base[spin] = base[spin].with_entry(from, to, value);
        Self::from_base(base)
    }

    /// Applies `P_spin` to legs `pos, pos+1`, choosing the placement from
    /// the element's signature.
    pub fn apply_at(&self, spin: usize, pos: usize, x: &TensorElement) -> Result<TensorElement, TensorError> {
        let p = placement_at(pos, x)?;
        self.get(spin, p).apply_at_legs(pos, x)
    }
}

fn placement_at(pos: usize, x: &TensorElement) -> Result<Placement, TensorError> {
    let sig = x.signature();
    if pos + 2 > sig.len() {
        return Err(TensorError::PositionOutOfRange {
            position: pos,
            arity: 2,
            len: sig.len(),
        });
    }
    Ok(Placement::from_domain(&sig[pos..pos + 2]).expect("every two-leg signature is a placement"))
}

/// A covariant transposition `x P₀ + y P₁ + z P₂`, available in every
/// placement.
#[derive(Clone, Debug)]
pub struct Transposition {
    spectrum: [RF; 3],
    projectors: Arc<Projectors>,
    ops: [LinearOperator; 4],
}

impl Transposition {
    pub fn new(x: RF, y: RF, z: RF, projectors: Arc<Projectors>) -> Self {
        let ops = Placement::ALL.map(|p| {
            projectors
                .get(0, p)
                .scale(&x)
                .add_scaled(projectors.get(1, p), &y)
                .and_then(|o| o.add_scaled(projectors.get(2, p), &z))
                .expect("projectors share signatures")
        });
        Transposition {
            spectrum: [x, y, z],
            projectors,
            ops,
        }
    }

    /// `S = q⁻⁴P₀ − q⁻²P₁ + q²P₂`.
    pub fn yang_baxter(q: &RF, projectors: Arc<Projectors>) -> Self {
        Self::new(q.pow(-4), -q.pow(-2), q.pow(2), projectors)
    }

    /// `s S + δ P₀`.
    pub fn shifted(q: &RF, s: &RF, delta: &RF, inverse: bool, projectors: Arc<Projectors>) -> Self {
        let e = if inverse { -1 } else { 1 };
        let [a, b, c] = [q.pow(-4 * e), -q.pow(-2 * e), q.pow(2 * e)];
        Self::new(&(s * &a) + delta, s * &b, s * &c, projectors)
    }

    pub fn spectrum(&self) -> &[RF; 3] {
        &self.spectrum
    }

    pub fn projectors(&self) -> &Arc<Projectors> {
        &self.projectors
    }

    pub fn is_invertible(&self) -> bool {
        self.spectrum.iter().all(|c| !c.is_zero())
    }

    /// Reciprocal spectrum; `None` when some eigenvalue vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let [x, y, z] = &self.spectrum;
        Some(Self::new(
            x.inv().ok()?,
            y.inv().ok()?,
            z.inv().ok()?,
            self.projectors.clone(),
        ))
    }

    pub fn scaled(&self, k: &RF) -> Self {
        let [x, y, z] = &self.spectrum;
        Self::new(x * k, y * k, z * k, self.projectors.clone())
    }

    pub fn operator(&self, p: Placement) -> &LinearOperator {
        &self.ops[p.index()]
    }

    pub fn apply(&self, x: &TensorElement) -> Result<TensorElement, TensorError> {
        self.apply_at(0, x)
    }

    /// Applies to legs `pos, pos+1`, choosing the placement from `x`.
    pub fn apply_at(&self, pos: usize, x: &TensorElement) -> Result<TensorElement, TensorError> {
        let p = placement_at(pos, x)?;
        self.operator(p).apply_at_legs(pos, x)
    }

    /// `T^{12} T^{23} ... T^{k,k+1}` with the rightmost factor applied
    /// first: moves leg `k` to the front.
    pub fn move_to_front(&self, x: &TensorElement, k: usize) -> Result<TensorElement, TensorError> {
        let mut y = x.clone();
        for pos in (0..k).rev() {
            y = self.apply_at(pos, &y)?;
        }
        Ok(y)
    }

    /// `T^{k,k+1} ... T^{12}`: moves leg 0 to position `k`.
    pub fn move_to_back(&self, x: &TensorElement, k: usize) -> Result<TensorElement, TensorError> {
        let mut y = x.clone();
        for pos in 0..k {
            y = self.apply_at(pos, &y)?;
        }
        Ok(y)
    }

    /// Substitutes variables in the spectrum, keeping the projectors.
    pub fn substitute(
        &self,
        bindings: &std::collections::BTreeMap<crate::arith::Var, RF>,
    ) -> Result<Self, crate::arith::ArithError> {
        let [x, y, z] = &self.spectrum;
        Ok(Self::new(
            x.substitute(bindings)?,
            y.substitute(bindings)?,
            z.substitute(bindings)?,
            self.projectors.clone(),
        ))
    }
}

/// The classical flip `a⊗b ↦ b⊗a` in a placement.
pub fn flip(p: Placement) -> LinearOperator {
    LinearOperator::from_fn(&p.domain(), &p.codomain(), |w| {
        TensorElement::basis(Word(vec![w.0[1], w.0[0]]))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovarianceReport {
    pub covariant: bool,
    /// `(generator, domain word)` pairs where `op g ≠ g op`.
    pub failures: Vec<(Generator, Word)>,
}

/// Checks `op ∘ g = g ∘ op` for `g ∈ {X, Y, K, K⁻¹}` acting through the
/// coproduct on domain and codomain.
pub fn covariance_check(op: &LinearOperator, action: &GeneratorAction, cop: &Coproduct) -> CovarianceReport {
    let mut failures = Vec::new();
    for g in Generator::ALL {
        let gd = action.operator(g, op.domain(), cop);
        let gc = action.operator(g, op.codomain(), cop);
        let lhs = op.compose(&gd).expect("signatures");
        let rhs = gc.compose(op).expect("signatures");
        for w in Word::all(op.domain()) {
            if lhs.column(&w) != rhs.column(&w) {
                failures.push((g, w));
            }
        }
    }
    CovarianceReport {
        covariant: failures.is_empty(),
        failures,
    }
}

/// Outcome of testing one coproduct candidate against the listed spans.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoproductFit {
    pub coproduct: Coproduct,
    pub kills_v0: bool,
    pub spans_stable: bool,
}

impl CoproductFit {
    pub fn fits(&self) -> bool {
        self.kills_v0 && self.spans_stable
    }
}

/// Tests every candidate: `X.v₀ = Y.v₀ = 0`, `K.v₀ = v₀`, and `X, Y, K`
/// preserve the spin-1 and spin-2 spans.
pub fn select_coproduct(action: &GeneratorAction, dec: &Decomposition) -> Vec<CoproductFit> {
    Coproduct::CANDIDATES
        .iter()
        .map(|cop| {
            let v0 = dec.v0();
            let kills_v0 = action.apply(Generator::X, v0, cop).is_zero()
                && action.apply(Generator::Y, v0, cop).is_zero()
                && action.apply(Generator::K, v0, cop) == *v0;
            let spans_stable = (1..3).all(|spin| {
                let span = dec.span(spin);
                [Generator::X, Generator::Y, Generator::K].iter().all(|&g| {
                    span.iter().all(|b| {
                        let img = action.apply(g, b, cop);
                        let c = dec.coordinates(&img);
                        c.iter()
                            .enumerate()
                            .all(|(k, x)| x.is_zero() || SPIN_RANGES[spin].contains(&k))
                    })
                })
            });
            CoproductFit {
                coproduct: *cop,
                kills_v0,
                spans_stable,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Var;
    use crate::parse::parse_expression;
    use Letter::*;

    fn q() -> RF {
        RF::var(Var::Q)
    }

    fn setup() -> (Decomposition, Arc<Projectors>) {
        let dec = Decomposition::new(q()).unwrap();
        let p = Arc::new(Projectors::new(&dec));
        (dec, p)
    }

    #[test]
    fn only_one_coproduct_fits() {
        let (dec, _) = setup();
        let action = GeneratorAction::new(q());
        let fits: Vec<_> = select_coproduct(&action, &dec)
            .into_iter()
            .filter(|f| f.fits())
            .map(|f| f.coproduct)
            .collect();
        assert_eq!(fits, vec![Coproduct::STANDARD]);
    }

    #[test]
    fn projector_algebra() {
        let (_, p) = setup();
        for pl in Placement::ALL {
            let mut sum = LinearOperator::zero(&pl.domain(), &pl.codomain());
            for i in 0..3 {
                sum = sum.add(p.get(i, pl)).unwrap();
            }
            assert_eq!(sum, LinearOperator::relabeling(&pl.domain(), &pl.codomain()));
        }
        for i in 0..3 {
            for j in 0..3 {
                let pij = p.base(i).compose(p.base(j)).unwrap();
                if i == j {
                    assert_eq!(&pij, p.base(i));
                } else {
                    assert!(pij.is_zero());
                }
            }
        }
    }

    #[test]
    fn yang_baxter_examples() {
        let (dec, p) = setup();
        let s = Transposition::yang_baxter(&q(), p);
        let udu = TensorElement::basis(Word(vec![U, DU]));
        assert_eq!(
            s.apply(&udu).unwrap(),
            TensorElement::term(Word(vec![DU, U]), q().pow(2))
        );
        let x = parse_expression("q^2*u.dv - v.du").unwrap();
        let y = parse_expression("q^2*du.v - dv.u").unwrap();
        assert_eq!(s.apply(&x).unwrap(), y.scale(&-q().pow(-2)));
        assert_eq!(s.apply(&dec.dv0()).unwrap(), dec.dv0_bar().scale(&q().pow(-4)));
        let inv = s.inverse().unwrap();
        let composed = s.operator(Placement::VV).compose(inv.operator(Placement::VV)).unwrap();
        assert_eq!(composed, LinearOperator::identity(&VV));
    }

    #[test]
    fn covariance() {
        let (_, p) = setup();
        let action = GeneratorAction::new(q());
        let s = Transposition::yang_baxter(&q(), p.clone());
        for pl in Placement::ALL {
            assert!(covariance_check(s.operator(pl), &action, &Coproduct::STANDARD).covariant);
            assert!(covariance_check(p.get(1, pl), &action, &Coproduct::STANDARD).covariant);
        }
        assert!(!covariance_check(&flip(Placement::VDiff), &action, &Coproduct::STANDARD).covariant);
    }

    #[test]
    fn general_transposition_on_spin_two_line() {
        let (_, p) = setup();
        let [x, y, z] = [Var::X, Var::Y, Var::Z].map(RF::var);
        let t = Transposition::new(x, y, z.clone(), p);
        let udu = TensorElement::basis(Word(vec![U, DU]));
        assert_eq!(t.apply(&udu).unwrap(), TensorElement::term(Word(vec![DU, U]), z));
    }
}
