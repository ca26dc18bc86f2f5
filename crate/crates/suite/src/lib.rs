//! The nine acceptance criteria as functions of a model, so the mutation
//! criterion can rerun the others on perturbed projectors.
//!
//! Expected values are transcribed here as text and parsed, rather than
//! taken from the kernel's own tables.

use std::collections::BTreeMap;

use qsphere::arith::{RationalFunction as RF, Var};
use qsphere::cotangent::{rho_reduce, transpose_left, Cotangent, Membership, ModuleElement, Side};
use qsphere::linalg::Matrix;
use qsphere::model::{Model, Params};
use qsphere::parse::parse_expression;
use qsphere::sphere::Sphere;
use qsphere::symmetry::{Placement, Transposition};
use qsphere::tensor::{Letter, LinearOperator, Space, TensorElement, Word};
use qsphere::verify::{run_check, Profile, Status};

const B: Space = Space::Base;
const D: Space = Space::Diff;

#[derive(Clone, Debug)]
pub struct Clause {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct Verdict {
    pub clauses: Vec<Clause>,
}

impl Verdict {
    fn check(&mut self, name: impl Into<String>, holds: bool, detail: impl Into<String>) {
        self.clauses.push(Clause {
            name: name.into(),
            holds,
            detail: detail.into(),
        });
    }

    pub fn pass(&self) -> bool {
        !self.clauses.is_empty() && self.clauses.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| !c.holds)
    }
}

pub struct Criterion {
    pub number: usize,
    pub title: &'static str,
    pub run: fn(&Model) -> Verdict,
}

pub const CRITERIA: [Criterion; 9] = [
    Criterion {
        number: 1,
        title: "spectral law of S on the nine spin vectors",
        run: spectral_law,
    },
    Criterion {
        number: 2,
        title: "braid relation and minimal polynomial",
        run: braid_and_minimal_polynomial,
    },
    Criterion {
        number: 3,
        title: "projector coefficient table",
        run: projector_table,
    },
    Criterion {
        number: 4,
        title: "reordering identities for S and S^-1",
        run: reordering_identities,
    },
    Criterion {
        number: 5,
        title: "constraint on a general transposition",
        run: transposition_constraint,
    },
    Criterion {
        number: 6,
        title: "classification endgame",
        run: classification,
    },
    Criterion {
        number: 7,
        title: "S(mu12(u dv0)) is not in M_r",
        run: non_flatness,
    },
    Criterion {
        number: 8,
        title: "flatness probes",
        run: flatness,
    },
    Criterion {
        number: 9,
        title: "mutation robustness",
        run: mutation,
    },
];

/// Parses text written in symbolic `q` and binds `q` to the model's value.
pub fn expr(m: &Model, text: &str) -> TensorElement {
    let x = parse_expression(text).unwrap_or_else(|e| panic!("{}: {}", text, e));
    let mut b = BTreeMap::new();
    b.insert(Var::Q, m.q().clone());
    x.try_map_coefficients(|c| c.substitute(&b)).expect("generic q")
}

fn scalar(m: &Model, text: &str) -> RF {
    let x = expr(m, text);
    x.coefficient_of(&Word::empty())
}

const SPIN_VECTORS: [(usize, &str); 9] = [
    (0, "(q^3+q)*u.w + v.v + (q+1/q)*w.u"),
    (1, "q^2*u.v - v.u"),
    (1, "(q^3+q)*(u.w - w.u) + (1-q^2)*v.v"),
    (1, "w.v - q^2*v.w"),
    (2, "u.u"),
    (2, "u.v + q^2*v.u"),
    (2, "u.w - q*v.v + q^4*w.u"),
    (2, "v.w + q^2*w.v"),
    (2, "w.w"),
];

const EIGENVALUES: [&str; 3] = ["q^-4", "-q^-2", "q^2"];

fn spectral_law(m: &Model) -> Verdict {
    let mut v = Verdict::default();
    let s = m.yang_baxter();
    for (spin, text) in SPIN_VECTORS {
        let x = expr(m, text);
        let lambda = scalar(m, EIGENVALUES[spin]);
        let on_vv = s.apply(&x).map(|y| y == x.scale(&lambda)).unwrap_or(false);
        let mixed = x.relabel(&[B, D]);
        let on_mixed = s
            .apply(&mixed)
            .map(|y| y == x.relabel(&[D, B]).scale(&lambda))
            .unwrap_or(false);
        v.check(
            format!("S = {} on {}", EIGENVALUES[spin], text),
            on_vv && on_mixed,
            format!("V.V: {}, V.V': {}", on_vv, on_mixed),
        );
    }
    v
}

fn braid_and_minimal_polynomial(m: &Model) -> Verdict {
    let mut v = Verdict::default();
    let s = m.yang_baxter();
    let mut bad = Vec::new();
    for w in Word::all(&[B, B, B]) {
        let x = TensorElement::basis(w.clone());
        let run = |order: [usize; 3]| order.iter().try_fold(x.clone(), |acc, &p| s.apply_at(p, &acc));
        if run([0, 1, 0]).ok() != run([1, 0, 1]).ok() {
            bad.push(w.to_string());
        }
    }
    v.check("S12 S23 S12 = S23 S12 S23 on 27 words", bad.is_empty(), bad.join(", "));

    let op = s.operator(Placement::VV);
    let id = LinearOperator::identity(&[B, B]);
    let factor = |k: usize| op.sub(&id.scale(&scalar(m, EIGENVALUES[k]))).expect("signature");
    let cubic = factor(2)
        .compose(&factor(1))
        .and_then(|x| x.compose(&factor(0)))
        .expect("signature");
    v.check("(S - q^2)(S + q^-2)(S - q^-4) = 0", cubic.is_zero(), "");
    let s2 = op.compose(op).expect("signature");
    let words = Word::all(&[B, B]);
    let flat = |o: &LinearOperator| -> Vec<RF> {
        words
            .iter()
            .flat_map(|a| words.iter().map(move |b| o.entry(a, b)))
            .collect()
    };
    let rank = Matrix::from_rows(vec![flat(&id), flat(op), flat(&s2)]).rank();
    v.check(
        "no quadratic annihilates S (I, S, S^2 independent)",
        rank == 3,
        format!("rank {}", rank),
    );
    v
}

const CONSTANTS: [(&str, &str); 10] = [
    ("beta'", "1/(1+q^4)"),
    ("alpha'", "q^2/(1+q^4)"),
    ("alpha_bar'", "-1/(1+q^4)"),
    ("beta_bar'", "q^2/(1+q^4)"),
    ("alpha_1", "q^2/(1+q^2+q^4)"),
    ("alpha_1'", "q^3/((1+q^2)*(1+q^2+q^4))"),
    ("beta_1", "(1-q^2)/(1+q^4)"),
    ("beta_1'", "q/((1+q^2)*(1+q^4))"),
    ("gamma_1", "-q*(1+q^2)^2/((1+q^2+q^4)*(1+q^4))"),
    ("gamma_1'", "1/((1+q^4)*(1+q^2+q^4))"),
];

fn with_constants(text: &str) -> String {
    // Longest names first so that `alpha_1'` is not read as `alpha_1`.
    let mut names: Vec<&(&str, &str)> = CONSTANTS.iter().collect();
    names.sort_by_key(|(n, _)| std::cmp::Reverse(n.len()));
    let mut out = text.to_string();
    for (i, (name, _)) in names.iter().enumerate() {
        out = out.replace(&format!("{{{}}}", name), &format!("\u{1}{}\u{1}", i));
    }
    for (i, (_, value)) in names.iter().enumerate() {
        out = out.replace(&format!("\u{1}{}\u{1}", i), &format!("({})", value));
    }
    out
}

const TABLE: [(usize, &str, &str); 11] = [
    (0, "v.dv", "{alpha_1}*((q^3+q)*du.w + dv.v + (q+1/q)*dw.u)"),
    (0, "u.dw", "{alpha_1'}*((q^3+q)*du.w + dv.v + (q+1/q)*dw.u)"),
    (2, "u.du", "du.u"),
    (2, "u.dv", "{beta'}*(du.v + q^2*dv.u)"),
    (2, "v.du", "{beta_bar'}*(du.v + q^2*dv.u)"),
    (2, "v.dv", "{gamma_1}*(du.w - q*dv.v + q^4*dw.u)"),
    (2, "u.dw", "{gamma_1'}*(du.w - q*dv.v + q^4*dw.u)"),
    (1, "v.dv", "{beta_1}*((q^3+q)*(du.w - dw.u) + (1-q^2)*dv.v)"),
    (1, "v.du", "{alpha_bar'}*(q^2*du.v - dv.u)"),
    (1, "u.dv", "{alpha'}*(q^2*du.v - dv.u)"),
    (1, "u.dw", "{beta_1'}*((q^3+q)*(du.w - dw.u) + (1-q^2)*dv.v)"),
];

const EXPANSIONS: [(usize, &str); 3] = [
    (0, "(q+1/q)*{alpha_1'}*((q^3+q)*du.w + dv.v + (q+1/q)*dw.u).u"),
    (
        1,
        "{alpha'}*(q^2*du.v - dv.u).v + {beta_1'}*(q+1/q)*((q^3+q)*(du.w - dw.u) + (1-q^2)*dv.v).u",
    ),
    (
        2,
        "(q^3+q)*du.u.w + {beta'}*(du.v + q^2*dv.u).v + {gamma_1'}*(q+1/q)*(du.w - q*dv.v + q^4*dw.u).u",
    ),
];

fn projector_table(m: &Model) -> Verdict {
    let mut v = Verdict::default();
    for (spin, input, expected) in TABLE {
        let got = m
            .projectors
            .get(spin, Placement::VDiff)
            .apply(&expr(m, input))
            .expect("placement");
        let want = expr(m, &with_constants(expected));
        v.check(format!("P{}({})", spin, input), got == want, got.to_string());
    }
    let x = expr(m, "u.((q^3+q)*du.w + dv.v + (q+1/q)*dw.u)");
    for (spin, expected) in EXPANSIONS {
        let got = m.projectors.apply_at(spin, 0, &x).expect("placement");
        let want = expr(m, &with_constants(expected));
        v.check(format!("P{}^12(u d v0_bar)", spin), got == want, got.to_string());
    }
    v
}

fn reordering_identities(m: &Model) -> Verdict {
    let mut v = Verdict::default();
    let s = m.yang_baxter();
    let x = expr(m, "u.u.du");
    let left = ModuleElement::from_tensor(Side::Left, &m.sphere, &x).expect("left word");
    let one = transpose_left(&m.sphere, &s, &left).expect("pipeline");
    let two = rho_reduce(&m.sphere, &s, &x).expect("pipeline");
    v.check("both sides agree on u.u.du", one == two, one.to_string());
    match run_check(m, &Profile::quick(), "prop1") {
        Ok(r) => {
            for w in &r.witnesses {
                if let Some(h) = w.holds {
                    v.check(w.label.clone(), h, w.value.to_string());
                }
            }
        }
        Err(e) => v.check("prop1 check ran", false, e.to_string()),
    }
    v
}

fn transposition_constraint(m: &Model) -> Verdict {
    let mut v = Verdict::default();
    let (y, z) = (RF::var(Var::Y), RF::var(Var::Z));
    let t = m.transposition(RF::var(Var::X), y.clone(), z.clone());
    let x = expr(m, "(q^2*u.v - v.u).du");
    let moved = match t.move_to_front(&x, 2) {
        Ok(r) => r,
        Err(e) => {
            v.check("transposition applies", false, e.to_string());
            return v;
        }
    };
    let coeff = moved.coefficient_of(&Word::from_letters(&[Letter::DV, Letter::U, Letter::U]));
    let want = scalar(m, "-q^4*(1/(1+q^4))^2*(z^2 + (q^4+q^-4)*z*y + y^2)");
    v.check("dv.u.u coefficient", coeff == want, coeff.to_string());
    for root in ["-q^4*y", "-q^-4*y"] {
        let mut b = BTreeMap::new();
        b.insert(Var::Z, scalar(m, root));
        let at = coeff.substitute(&b).expect("polynomial in z");
        v.check(format!("vanishes at z = {}", root), at.is_zero(), at.to_string());
    }
    v
}

fn classification(m: &Model) -> Verdict {
    let mut v = Verdict::default();
    match run_check(m, &Profile::quick(), "prop2_classification") {
        Ok(r) => {
            for w in &r.witnesses {
                if let Some(h) = w.holds {
                    v.check(w.label.clone(), h, w.value.to_string());
                }
            }
            v.check(
                "classification check verified",
                r.status == Status::Verified,
                r.status.name(),
            );
        }
        Err(e) => v.check("classification check ran", false, e.to_string()),
    }
    v
}

const U_DV0: &str = "u.((q^3+q)*u.dw + v.dv + (q+1/q)*w.du)";

/// `S(mu12(u dv0))`, and the projector pieces `mu23 P_i^23 (d v0_bar ⊗ u)`.
fn prop3_parts(m: &Model, t: &Transposition) -> Option<(ModuleElement, [ModuleElement; 3])> {
    let x = expr(m, U_DV0);
    let left = ModuleElement::from_tensor(Side::Left, &m.sphere, &x).ok()?;
    let image = transpose_left(&m.sphere, t, &left).ok()?;
    let y = expr(m, "((q^3+q)*du.w + dv.v + (q+1/q)*dw.u).u");
    let part = |spin| {
        let p = m.projectors.apply_at(spin, 1, &y).ok()?;
        ModuleElement::from_tensor(Side::Right, &m.sphere, &p).ok()
    };
    Some((image, [part(0)?, part(1)?, part(2)?]))
}

fn non_flatness(m: &Model) -> Verdict {
    let mut v = Verdict::default();
    let s = m.yang_baxter();
    let Some((image, [a0, _a1, a2])) = prop3_parts(m, &s) else {
        v.check("pipeline runs", false, "");
        return v;
    };
    let gamma_inv = scalar(m, "q^4");
    let alpha_inv = scalar(m, "q^-2");
    let literal = a0.scale(&gamma_inv).add(&a2.scale(&alpha_inv));
    let detail = if image == literal {
        String::new()
    } else {
        // Report the scalar that relates the two sides, if there is one.
        let ratio = image
            .terms()
            .next()
            .map(|(b, c)| c / &literal.coefficient(&b))
            .filter(|r| image == literal.scale(r));
        match ratio {
            Some(r) => format!("computed side = ({}) x stated side", r),
            None => format!("computed {}", image),
        }
    };
    v.check(
        "S(mu12(u dv0)) = gamma^-1 mu23 P0_23(d v0_bar u) + alpha^-1 mu23 P2_23(d v0_bar u)",
        image == literal,
        detail,
    );
    v.check("P0 component non-zero", !a0.is_zero(), a0.to_string());
    v.check("P2 component non-zero", !a2.is_zero(), a2.to_string());

    let d = 4;
    let cot = Cotangent::new(&m.sphere, &m.decomposition, Side::Right);
    match cot.membership_test(&image, d) {
        Ok(Membership::NonMember { certificate }) => {
            let valid = certificate.validate(&cot.submodule_basis(d), &image);
            v.check(
                "non-member of M_r with re-validated certificate",
                valid,
                certificate.to_string(),
            );
        }
        Ok(Membership::Member { g }) => v.check("non-member of M_r", false, format!("member, g = {}", g)),
        Err(e) => v.check("membership decided", false, e.to_string()),
    }

    match Model::new(m.params.classical()) {
        Ok(cl) => {
            let flip = cl.transposition(RF::one(), -RF::one(), RF::one());
            let x = expr(&cl, U_DV0);
            let decided = rho_reduce(&cl.sphere, &flip, &x).ok().and_then(|e| {
                Cotangent::new(&cl.sphere, &cl.decomposition, Side::Right)
                    .membership_test(&e, d)
                    .ok()
            });
            let member = matches!(decided, Some(Membership::Member { .. }));
            v.check(
                "q = 1 with the flip: member",
                member,
                format!("{:?}", decided.map(|r| matches!(r, Membership::Member { .. }))),
            );
        }
        Err(e) => v.check("classical model", false, e.to_string()),
    }
    v
}

fn flatness(m: &Model) -> Verdict {
    let mut v = Verdict::default();
    let report = m.sphere.confluence_check();
    v.check(
        "four overlaps, all resolved",
        report.overlaps.len() == 4 && report.confluent(),
        format!("{} overlaps", report.overlaps.len()),
    );
    let dims: Vec<usize> = (0..=6).map(Sphere::filtered_dimension).collect();
    let squares: Vec<usize> = (1..=7).map(|n| n * n).collect();
    v.check(
        "algebra dimensions (d+1)^2 for d <= 6",
        dims == squares,
        format!("{:?}", dims),
    );
    let cl = Model::new(Params {
        q: RF::one(),
        c: m.params.c.clone(),
    })
    .expect("q = 1 model");
    for side in [Side::Right, Side::Left] {
        let a = Cotangent::new(&m.sphere, &m.decomposition, side);
        let b = Cotangent::new(&cl.sphere, &cl.decomposition, side);
        let ga: Vec<usize> = (0..=5).map(|d| a.filtered_dimension(d)).collect();
        let gb: Vec<usize> = (0..=5).map(|d| b.filtered_dimension(d)).collect();
        v.check(
            format!("{} module dimensions equal q = 1 for d <= 5", side.name()),
            ga == gb,
            format!("{:?} vs {:?}", ga, gb),
        );
    }
    v
}

/// Clause names that hold for `m` among criteria 1 to 7.
fn holding_clauses(m: &Model) -> Vec<(usize, String)> {
    CRITERIA[..7]
        .iter()
        .flat_map(|c| {
            (c.run)(m)
                .clauses
                .into_iter()
                .filter(|cl| cl.holds)
                .map(move |cl| (c.number, cl.name))
        })
        .collect()
}

/// A perturbation counts as caught when some clause of criteria 1 to 7 that
/// holds for the unperturbed model stops holding.
fn mutation(m: &Model) -> Verdict {
    let mut v = Verdict::default();
    let baseline = holding_clauses(m);
    let mut total = 0;
    let mut missed = Vec::new();
    let mut first_hits: BTreeMap<usize, usize> = BTreeMap::new();
    for spin in 0..3 {
        let base = m.projectors.base(spin);
        let entries: Vec<(Word, Word, RF)> = base
            .columns()
            .flat_map(|(from, img)| {
                img.terms()
                    .map(|(to, c)| (from.clone(), to.clone(), c.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        for (from, to, value) in entries {
            total += 1;
            let mutated = m.with_projectors(m.projectors.with_base_entry(spin, &from, &to, &value * m.q()));
            let hit = CRITERIA[..7].iter().find(|c| {
                (c.run)(&mutated)
                    .failures()
                    .any(|f| baseline.iter().any(|(n, name)| *n == c.number && *name == f.name))
            });
            match hit {
                Some(c) => *first_hits.entry(c.number).or_default() += 1,
                None => missed.push(format!("P{} [{} -> {}]", spin, from, to)),
            }
        }
    }
    v.check(
        format!("all {} single-coefficient perturbations caught", total),
        missed.is_empty() && total > 0,
        if missed.is_empty() {
            format!("first catching criterion: {:?}", first_hits)
        } else {
            format!("missed: {}", missed.join(", "))
        },
    );
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_substitute_longest_name_first() {
        let text = with_constants("{alpha_1'} + {alpha_1}");
        assert_eq!(text, "(q^3/((1+q^2)*(1+q^2+q^4))) + (q^2/(1+q^2+q^4))");
    }

    #[test]
    fn every_perturbation_is_caught() {
        let v = mutation(&Model::symbolic());
        let clause = &v.clauses[0];
        assert!(clause.holds, "{}", clause.detail);
        assert!(clause.name.contains("all 45"), "{}", clause.name);
    }

    #[test]
    fn literal_decomposition_is_off_by_a_power_of_q() {
        let v = non_flatness(&Model::symbolic());
        let failed: Vec<_> = v.failures().collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].detail, "computed side = (1/q^4) x stated side");
    }
}
