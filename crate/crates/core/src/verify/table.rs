//! Projector images in the mixed placement `V⊗V' → V'⊗V`, both the full
//! table and the named entries with their closed-form constants.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith::{RationalFunction, Var};
use crate::model::Model;
use crate::parse::parse_expression;
use crate::symmetry::Placement;
use crate::tensor::{TensorElement, Word};

type RF = RationalFunction;

/// The closed-form constants of the projector table, as functions of `q`.
#[derive(Clone, Debug)]
pub struct TableConstants {
    pub beta_p: RF,
    pub alpha_p: RF,
    pub alpha_bar_p: RF,
    pub beta_bar_p: RF,
    pub alpha_1: RF,
    pub alpha_1p: RF,
    pub beta_1: RF,
    pub beta_1p: RF,
    pub gamma_1: RF,
    pub gamma_1p: RF,
}

impl TableConstants {
    pub fn new(q: &RF) -> Self {
        let one = RF::one();
        let q2 = q.pow(2);
        let q4 = q.pow(4);
        let t = &(&one + &q2) + &q4;
        let beta_p = &one / &(&one + &q4);
        TableConstants {
            alpha_p: &q2 * &beta_p,
            alpha_bar_p: -beta_p.clone(),
            beta_bar_p: &q2 * &beta_p,
            alpha_1: &q2 / &t,
            alpha_1p: &q.pow(3) / &(&(&one + &q2) * &t),
            beta_1: &(&one - &q2) * &beta_p,
            beta_1p: &(q * &beta_p) / &(&one + &q2),
            gamma_1: -(&(q * &(&one + &q2).pow(2)) * &beta_p) / t.clone(),
            gamma_1p: &beta_p / &t,
            beta_p,
        }
    }

    pub fn named(&self) -> Vec<(&'static str, &RF)> {
        vec![
            ("beta'", &self.beta_p),
            ("alpha'", &self.alpha_p),
            ("alpha_bar'", &self.alpha_bar_p),
            ("beta_bar'", &self.beta_bar_p),
            ("alpha_1", &self.alpha_1),
            ("alpha_1'", &self.alpha_1p),
            ("beta_1", &self.beta_1),
            ("beta_1'", &self.beta_1p),
            ("gamma_1", &self.gamma_1),
            ("gamma_1'", &self.gamma_1p),
        ]
    }
}

/// One named projector image: `computed` from the model, `expected` from
/// the closed-form constants.
#[derive(Clone, Debug)]
pub struct NamedImage {
    pub label: String,
    pub computed: TensorElement,
    pub expected: TensorElement,
}

impl NamedImage {
    pub fn matches(&self) -> bool {
        self.computed == self.expected
    }
}

/// Parses a literal written in symbolic `q` and binds `q`.
pub(crate) fn lit(text: &str, q: &RF) -> TensorElement {
    let x = parse_expression(text).expect("literal expression");
    let mut b = BTreeMap::new();
    b.insert(Var::Q, q.clone());
    x.try_map_coefficients(|c| c.substitute(&b))
        .expect("literals have no poles at a generic q")
}

/// The named images: single basis words under `P_i`, and the three
/// expansions of `P_i` on the first two legs of `u ⊗ d v̄₀`.
pub fn named_images(model: &Model) -> Vec<NamedImage> {
    let q = model.q();
    let k = TableConstants::new(q);
    let p = &model.projectors;
    let dec = &model.decomposition;
    let dv0_bar = dec.dv0_bar();
    let spin1 = lit("(q^3+q)*(du.w - dw.u) + (1-q^2)*dv.v", q);
    let spin2 = lit("du.w - q*dv.v + q^4*dw.u", q);
    let sym = lit("du.v + q^2*dv.u", q);
    let anti = lit("q^2*du.v - dv.u", q);
    let qqi = q + &q.pow(-1);
    let q3q = &q.pow(3) + q;
    let u = TensorElement::basis(Word(vec![crate::tensor::Letter::U]));
    let v = TensorElement::basis(Word(vec![crate::tensor::Letter::V]));
    let w = TensorElement::basis(Word(vec![crate::tensor::Letter::W]));

    let single = |spin: usize, word: &str, expected: TensorElement| {
        let x = parse_expression(word).expect("basis word");
        NamedImage {
            label: format!("P{}({})", spin, word),
            computed: p.get(spin, Placement::VDiff).apply(&x).expect("placement"),
            expected,
        }
    };
    let mut out = vec![
        single(0, "v.dv", dv0_bar.scale(&k.alpha_1)),
        single(0, "u.dw", dv0_bar.scale(&k.alpha_1p)),
        single(2, "u.du", lit("du.u", q)),
        single(2, "u.dv", sym.scale(&k.beta_p)),
        single(2, "v.du", sym.scale(&k.beta_bar_p)),
        single(2, "v.dv", spin2.scale(&k.gamma_1)),
        single(2, "u.dw", spin2.scale(&k.gamma_1p)),
        single(1, "v.dv", spin1.scale(&k.beta_1)),
        single(1, "v.du", anti.scale(&k.alpha_bar_p)),
        single(1, "u.dv", anti.scale(&k.alpha_p)),
        single(1, "u.dw", spin1.scale(&k.beta_1p)),
    ];
    let x = u.tensor(&dv0_bar.relabel(&[crate::tensor::Space::Diff, crate::tensor::Space::Base]));
    let expansions = [
        (0, dv0_bar.tensor(&u).scale(&(&qqi * &k.alpha_1p))),
        (
            1,
            anti.tensor(&v)
                .scale(&k.alpha_p)
                .add(&spin1.tensor(&u).scale(&(&k.beta_1p * &qqi)))
                .expect("same signature"),
        ),
        (
            2,
            lit("du.u", q)
                .tensor(&w)
                .scale(&q3q)
                .add(&sym.tensor(&v).scale(&k.beta_p))
                .and_then(|e| e.add(&spin2.tensor(&u).scale(&(&k.gamma_1p * &qqi))))
                .expect("same signature"),
        ),
    ];
    for (spin, expected) in expansions {
        out.push(NamedImage {
            label: format!("P{}^12(u.dv0_bar)", spin),
            computed: p.apply_at(spin, 0, &x).expect("placement"),
            expected,
        });
    }
    out
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TableRow {
    pub spin: usize,
    pub input: String,
    pub image: String,
}

/// Every non-zero image `P_i(word)` for the basis words of a placement.
pub fn full_table(model: &Model, placement: Placement) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for spin in 0..3 {
        let op = model.projectors.get(spin, placement);
        for w in Word::all(&placement.domain()) {
            let img = op.column(&w);
            if !img.is_zero() {
                rows.push(TableRow {
                    spin,
                    input: w.to_string(),
                    image: img.to_string(),
                });
            }
        }
    }
    rows
}
