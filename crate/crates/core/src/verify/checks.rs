use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::table::{lit, named_images, TableConstants};
use super::{run_spec, CheckSpec, Context, Outcome, Status};
use crate::arith::{IntPolynomial, RationalFunction, Var};
use crate::cotangent::{
    rho_reduce, rho_reduce_left, transpose_left, transpose_right, Cotangent, Membership, ModuleElement, Side,
};
use crate::linalg::Matrix;
use crate::model::{Model, Params};
use crate::sphere::{NormalForm, Pbw, Sphere};
use crate::symmetry::{covariance_check, flip, select_coproduct, Coproduct, Generator, Placement, Transposition};
use crate::tensor::{Letter, LinearOperator, Space, TensorElement, Word};

type RF = RationalFunction;

const B: Space = Space::Base;
const D: Space = Space::Diff;

pub(crate) const ALL: &[CheckSpec] = &[
    CheckSpec {
        name: "field_axioms",
        anchor: "exact arithmetic in Q(q, c, ...) is a field with canonical representatives",
        run: field_axioms,
    },
    CheckSpec {
        name: "coproduct_covariance",
        anchor: "the coproduct is fixed by the spin decomposition; P_i and S commute with the quantum group action",
        run: coproduct_covariance,
    },
    CheckSpec {
        name: "projector_algebra",
        anchor: "P_0, P_1, P_2 are orthogonal idempotents of ranks 1, 3, 5 summing to the identity",
        run: projector_algebra,
    },
    CheckSpec {
        name: "spectral_law",
        anchor: "S = q^-4 P_0 - q^-2 P_1 + q^2 P_2 is scalar on each spin component",
        run: spectral_law,
    },
    CheckSpec {
        name: "braid_relation",
        anchor: "S12 S23 S12 = S23 S12 S23 on three legs",
        run: braid_relation,
    },
    CheckSpec {
        name: "minimal_polynomial",
        anchor: "(S - q^2)(S + q^-2)(S - q^-4) = 0 and no quadratic annihilates S",
        run: minimal_polynomial,
    },
    CheckSpec {
        name: "projector_table",
        anchor: "closed-form images of the projectors on V (x) V'",
        run: projector_table,
    },
    CheckSpec {
        name: "confluence",
        anchor: "the sphere rewriting system is confluent and compatible with specialising q",
        run: confluence,
    },
    CheckSpec {
        name: "prop1",
        anchor: "S mu12 = mu23 S12 S23 and S mu23 = mu12 S23 S12, also for S^-1; fails for a generic transposition",
        run: prop1,
    },
    CheckSpec {
        name: "prop2_constraint",
        anchor: "dv.u.u coefficient of T12 T23 ((q^2 uv - vu) du) for T = x P0 + y P1 + z P2",
        run: prop2_constraint,
    },
    CheckSpec {
        name: "prop2_classification",
        anchor: "for T = s S + delta P0 the two obstructions vanish iff s delta = 0; centrality leaves s = +-1; same for S^-1",
        run: prop2_classification,
    },
    CheckSpec {
        name: "prop3",
        anchor: "S(mu12(u dv0)) splits over P0 and P2 and is not in the submodule generated by d v0_bar",
        run: prop3,
    },
    CheckSpec {
        name: "flatness",
        anchor: "filtered dimensions of the algebra and of both cotangent modules agree with q = 1",
        run: flatness,
    },
    CheckSpec {
        name: "rho_classical",
        anchor: "at q = 1 the flip moves f dv0 into the submodule generated by d v0_bar",
        run: rho_classical,
    },
    CheckSpec {
        name: "mutation",
        anchor: "scaling any single projector coefficient by q is detected by the core checks",
        run: mutation,
    },
];

/// Checks rerun under mutation, in order.
pub const CORE_CHECKS: &[&str] = &[
    "spectral_law",
    "braid_relation",
    "minimal_polynomial",
    "projector_table",
    "prop1",
    "prop2_constraint",
    "prop2_classification",
    "prop3",
];

fn qv() -> RF {
    RF::var(Var::Q)
}

fn bind(x: &RF, v: Var, value: &RF) -> RF {
    let mut b = BTreeMap::new();
    b.insert(v, value.clone());
    x.substitute(&b).expect("no poles at the bound point")
}

/// A closed form written in symbolic `q`, bound to the model's `q`.
fn at_q(model: &Model, x: RF) -> RF {
    bind(&x, Var::Q, model.q())
}

fn basis(l: &[Letter]) -> TensorElement {
    TensorElement::basis(Word::from_letters(l))
}

fn pretty(x: &impl std::fmt::Display) -> Value {
    Value::String(x.to_string())
}

fn eigenvalues(q: &RF) -> [RF; 3] {
    [q.pow(-4), -q.pow(-2), q.pow(2)]
}

fn is_classical(model: &Model) -> bool {
    model.q().is_one() || *model.q() == -RF::one()
}

// ---------------------------------------------------------------- arithmetic

fn random_rf(rng: &mut ChaCha8Rng) -> RF {
    let vars = [Var::Q, Var::C, Var::X];
    let poly = |rng: &mut ChaCha8Rng| {
        let mut p = RF::zero();
        for _ in 0..rng.gen_range(1..=3) {
            let mut t = RF::from_int(rng.gen_range(-4..=4));
            for v in vars {
                t = t * RF::var(v).pow(rng.gen_range(0..3));
            }
            p += t;
        }
        p
    };
    let num = poly(rng);
    loop {
        let den = poly(rng);
        if !den.is_zero() {
            return num / den;
        }
    }
}

// `a - a` and `a / a` are the point.
#[allow(clippy::eq_op)]
fn field_axioms(_: &Context, out: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let rounds = 40;
    let mut failures: Vec<String> = Vec::new();
    let point: BTreeMap<Var, BigRational> = [
        (Var::Q, BigRational::new(3.into(), 2.into())),
        (Var::C, BigRational::new((-2).into(), 5.into())),
        (Var::X, BigRational::from_integer(7.into())),
    ]
    .into_iter()
    .collect();
    let q_image = &RF::var(Var::C) + &RF::from_int(2);
    let mut sub = BTreeMap::new();
    sub.insert(Var::Q, q_image);
    for i in 0..rounds {
        let (a, b, c) = (random_rf(&mut rng), random_rf(&mut rng), random_rf(&mut rng));
        let mut fail = |what: &str, ok: bool| {
            if !ok {
                failures.push(format!("round {}: {}", i, what));
            }
        };
        fail("a+b=b+a", &a + &b == &b + &a);
        fail("ab=ba", &a * &b == &b * &a);
        fail("(a+b)+c=a+(b+c)", &(&a + &b) + &c == &a + &(&b + &c));
        fail("(ab)c=a(bc)", &(&a * &b) * &c == &a * &(&b * &c));
        fail("a(b+c)=ab+ac", &a * &(&b + &c) == &(&a * &b) + &(&a * &c));
        fail("a+0=a", &a + &RF::zero() == a);
        fail("a*1=a", &a * &RF::one() == a);
        fail("a-a=0", (&a - &a).is_zero());
        if !a.is_zero() {
            fail("a/a=1", (&a / &a).is_one());
            fail("(ab)/a=b", &(&a * &b) / &a == b);
        }
        if let (Ok(ea), Ok(eb), Ok(eab)) = (a.eval(&point), b.eval(&point), (&a * &b).eval(&point)) {
            fail("eval(ab)=eval(a)eval(b)", eab == ea * eb);
        }
        if let (Ok(sa), Ok(sb), Ok(sab)) = (a.substitute(&sub), b.substitute(&sub), (&a + &b).substitute(&sub)) {
            fail("subst(a+b)=subst(a)+subst(b)", sab == &sa + &sb);
        }
    }
    out.info("random triples", rounds);
    out.assert("axiom failures", failures.is_empty(), json!(failures));
    // Canonical form: equal values have identical representations.
    let q = qv();
    let one = RF::one();
    let lhs = &(&q.pow(2) - &one) / &(&q - &one);
    out.assert(
        "(q^2-1)/(q-1) is stored as q+1",
        lhs.to_string() == "1 + q",
        pretty(&lhs),
    );
    let neg = &RF::from_int(-1) / &(&one - &q);
    out.assert(
        "-1/(1-q) is stored as 1/(-1 + q)",
        neg == &one / &(&q - &one),
        pretty(&neg),
    );
}

// ---------------------------------------------------------------- symmetry

fn coproduct_covariance(ctx: &Context, out: &mut Outcome) {
    let m = ctx.model;
    let fits = select_coproduct(&m.action, &m.decomposition);
    let table: Vec<Value> = fits
        .iter()
        .map(|f| json!({"coproduct": f.coproduct.name, "kills_v0": f.kills_v0, "spans_stable": f.spans_stable}))
        .collect();
    let fitting: Vec<&Coproduct> = fits.iter().filter(|f| f.fits()).map(|f| &f.coproduct).collect();
    out.assert(
        "exactly one candidate coproduct fits",
        fitting.len() == 1 && *fitting[0] == Coproduct::STANDARD,
        json!(table),
    );
    let cop = Coproduct::STANDARD;
    let s = m.yang_baxter();
    let mut bad = Vec::new();
    for p in Placement::ALL {
        for spin in 0..3 {
            if !covariance_check(m.projectors.get(spin, p), &m.action, &cop).covariant {
                bad.push(format!("P{} on {}", spin, p.name()));
            }
        }
        if !covariance_check(s.operator(p), &m.action, &cop).covariant {
            bad.push(format!("S on {}", p.name()));
        }
    }
    out.assert("P_i and S are covariant in every placement", bad.is_empty(), json!(bad));
    let generic = m.transposition(RF::var(Var::X), RF::var(Var::Y), RF::var(Var::Z));
    out.assert(
        "x P0 + y P1 + z P2 is covariant",
        covariance_check(generic.operator(Placement::VDiff), &m.action, &cop).covariant,
        "V.V' -> V'.V",
    );
    let fr = covariance_check(&flip(Placement::VDiff), &m.action, &cop);
    if is_classical(m) {
        out.info("flip covariant at q = +-1", fr.covariant);
    } else {
        let first = fr
            .failures
            .first()
            .map(|(g, w)| format!("{} on {}", g.name(), w))
            .unwrap_or_default();
        out.assert("the flip is not covariant", !fr.covariant, first);
    }
    let k = m.action.apply(Generator::K, m.decomposition.v0(), &cop);
    out.assert("K v0 = v0", k == *m.decomposition.v0(), pretty(&k));
}

fn projector_algebra(ctx: &Context, out: &mut Outcome) {
    let p = &ctx.model.projectors;
    let mut bad = Vec::new();
    for pl in [Placement::VV, Placement::DiffDiff] {
        let sig = pl.domain();
        let mut sum = LinearOperator::zero(&sig, &sig);
        for i in 0..3 {
            sum = sum.add(p.get(i, pl)).expect("same signature");
            for j in 0..3 {
                let prod = p.get(i, pl).compose(p.get(j, pl)).expect("same signature");
                let want = if i == j {
                    p.get(i, pl).clone()
                } else {
                    LinearOperator::zero(&sig, &sig)
                };
                if prod != want {
                    bad.push(format!("P{} P{} on {}", i, j, pl.name()));
                }
            }
        }
        if sum != LinearOperator::identity(&sig) {
            bad.push(format!("sum on {}", pl.name()));
        }
    }
    // Mixed placements: V'.V -> V.V' after V.V' -> V'.V.
    let dom = Placement::VDiff.domain();
    for i in 0..3 {
        for j in 0..3 {
            let prod = p
                .get(i, Placement::DiffV)
                .compose(p.get(j, Placement::VDiff))
                .expect("signatures chain");
            let want = if i == j {
                p.base(i).relabel(&dom, &dom)
            } else {
                LinearOperator::zero(&dom, &dom)
            };
            if prod != want {
                bad.push(format!("P{} P{} across mixed placements", i, j));
            }
        }
    }
    out.assert(
        "orthogonal idempotents summing to the identity",
        bad.is_empty(),
        json!(bad),
    );
    let ranks: Vec<String> = (0..3)
        .map(|i| {
            let op = p.base(i);
            Word::all(op.domain())
                .iter()
                .map(|w| op.entry(w, w))
                .sum::<RF>()
                .to_string()
        })
        .collect();
    out.assert("traces are 1, 3, 5", ranks == ["1", "3", "5"], json!(ranks));
}

fn spectral_law(ctx: &Context, out: &mut Outcome) {
    let m = ctx.model;
    let s = m.yang_baxter();
    let ev = eigenvalues(m.q());
    let mut bad = Vec::new();
    let mut checked = 0;
    for (spin, v) in m.decomposition.vectors() {
        for (dom, cod) in [([B, B], [B, B]), ([B, D], [D, B]), ([D, B], [B, D]), ([D, D], [D, D])] {
            let x = v.relabel(&dom);
            let got = s.apply(&x).expect("placement exists");
            let want = v.relabel(&cod).scale(&ev[spin]);
            checked += 1;
            if got != want {
                bad.push(json!({"vector": x.to_string(), "got": got.to_string(), "expected": want.to_string()}));
            }
        }
    }
    out.info("vector/placement pairs checked", checked);
    out.assert("S is scalar on every spin component", bad.is_empty(), json!(bad));
    let got = s.apply(&basis(&[Letter::U, Letter::DU])).expect("placement");
    let want = basis(&[Letter::DU, Letter::U]).scale(&ev[2]);
    out.assert("S(u.du) = q^2 du.u", got == want, pretty(&got));
    // Specialising q to 1 gives the classical flip.
    match Model::new(Params::symbolic().classical()) {
        Ok(cl) => {
            let s1 = cl.yang_baxter();
            let flips = Placement::ALL.iter().all(|&p| *s1.operator(p) == flip(p));
            out.assert("S at q = 1 is the flip", flips, flips);
        }
        Err(e) => out.abort("classical model", e),
    }
}

fn braid_relation(ctx: &Context, out: &mut Outcome) {
    let s = ctx.model.yang_baxter();
    let mut failing = Vec::new();
    let mut checked = 0;
    for sig in [[B, B, B], [B, B, D], [B, D, B], [D, B, B]] {
        for w in Word::all(&sig) {
            let x = TensorElement::basis(w.clone());
            let run = |order: [usize; 3]| order.iter().try_fold(x.clone(), |acc, &pos| s.apply_at(pos, &acc));
            checked += 1;
            match (run([0, 1, 0]), run([1, 0, 1])) {
                (Ok(l), Ok(r)) if l == r => {}
                (Ok(l), Ok(r)) => {
                    failing.push(json!({"word": w.to_string(), "lhs": l.to_string(), "rhs": r.to_string()}))
                }
                (Err(e), _) | (_, Err(e)) => return out.abort("apply", e),
            }
        }
    }
    out.info("words checked", checked);
    out.assert(
        "S12 S23 S12 = S23 S12 S23 on every word",
        failing.is_empty(),
        json!(failing),
    );
}

fn minimal_polynomial(ctx: &Context, out: &mut Outcome) {
    let m = ctx.model;
    let s = m.yang_baxter();
    let sig = [B, B];
    let op = s.operator(Placement::VV);
    let id = LinearOperator::identity(&sig);
    let ev = eigenvalues(m.q());
    let factor = |k: usize| op.sub(&id.scale(&ev[k])).expect("same signature");
    let cubic = factor(0)
        .compose(&factor(1))
        .and_then(|x| x.compose(&factor(2)))
        .expect("same signature");
    out.assert("(S - q^-4)(S + q^-2)(S - q^2) = 0", cubic.is_zero(), cubic.is_zero());
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let quad = factor(i).compose(&factor(j)).expect("same signature");
        let names = ["q^-4", "-q^-2", "q^2"];
        out.assert(
            format!("(S - ({}))(S - ({})) != 0", names[i], names[j]),
            !quad.is_zero(),
            !quad.is_zero(),
        );
    }
    let s2 = op.compose(op).expect("same signature");
    let words = Word::all(&sig);
    let flat = |o: &LinearOperator| -> Vec<RF> {
        words
            .iter()
            .flat_map(|a| words.iter().map(move |b| o.entry(a, b)))
            .collect()
    };
    let rank = Matrix::from_rows(vec![flat(&id), flat(op), flat(&s2)]).rank();
    out.assert("I, S, S^2 are linearly independent", rank == 3, rank);
    match s.inverse() {
        Some(inv) => {
            let prod = inv.operator(Placement::VV).compose(op).expect("same signature");
            out.assert("S^-1 S = I", prod == id, prod == id);
        }
        None => out.abort("inverse", "S has a zero eigenvalue"),
    }
}

fn projector_table(ctx: &Context, out: &mut Outcome) {
    let k = TableConstants::new(ctx.model.q());
    for (name, value) in k.named() {
        out.info(name, value.to_string());
    }
    for img in named_images(ctx.model) {
        let value = if img.matches() {
            pretty(&img.computed)
        } else {
            json!({"computed": img.computed.to_string(), "expected": img.expected.to_string()})
        };
        out.assert(img.label.clone(), img.matches(), value);
    }
}

// ---------------------------------------------------------------- sphere

fn confluence(ctx: &Context, out: &mut Outcome) {
    let m = ctx.model;
    let sphere = &m.sphere;
    let rules: Vec<String> = sphere.rules().iter().map(|r| r.to_string()).collect();
    out.info("rules", json!(rules));
    let report = sphere.confluence_check();
    let overlaps: Vec<Value> = report
        .overlaps
        .iter()
        .map(|o| json!({"word": o.word.to_string(), "resolves": o.resolves(), "normal_form": o.left.to_string()}))
        .collect();
    out.assert(
        "all four overlaps resolve",
        report.confluent() && report.overlaps.len() == 4,
        json!(overlaps),
    );
    let gens_ok = sphere
        .generators()
        .iter()
        .all(|g| sphere.reduce_combination(g).map(|n| n.is_zero()).unwrap_or(false));
    out.assert("every ideal generator reduces to 0", gens_ok, gens_ok);
    let vu = sphere
        .reduce_word(&Word::from_letters(&[Letter::V, Letter::U]))
        .expect("algebra word");
    let want = NormalForm::term(Pbw::new(1, 1, 0), m.q().pow(2));
    out.assert("v.u -> q^2 u.v", vu == want, pretty(&vu));
    match sphere.reduce(m.decomposition.v0()) {
        Ok(v0) => {
            out.assert("v0 -> c", v0 == NormalForm::scalar(sphere.c().clone()), pretty(&v0));
        }
        Err(e) => out.abort("reduce v0", e),
    }
    if m.params.q_is_symbolic() {
        // Reduction commutes with binding q.
        let q0 = RF::from_ratio(&BigRational::new(3.into(), 2.into()));
        let mut b = BTreeMap::new();
        b.insert(Var::Q, q0.clone());
        match Model::new(Params {
            q: q0,
            c: m.params.c.clone(),
        }) {
            Ok(sm) => {
                let mut mismatches = Vec::new();
                for w in Word::all(&[B, B, B]) {
                    let generic = sphere.reduce_word(&w).expect("algebra word");
                    let special = sm.sphere.reduce_word(&w).expect("algebra word");
                    if generic.substitute(&b).ok() != Some(special) {
                        mismatches.push(w.to_string());
                    }
                }
                out.assert(
                    "normal forms of degree-3 words commute with q = 3/2",
                    mismatches.is_empty(),
                    json!(mismatches),
                );
            }
            Err(e) => out.abort("specialised model", e),
        }
    }
}

// ---------------------------------------------------------------- propositions

/// Compares both sides of the two reordering identities on all 27 words.
/// Returns the first failing word for each identity.
fn prop1_failures(sphere: &Sphere, t: &Transposition) -> Result<[Option<Value>; 2], String> {
    let mut first: [Option<Value>; 2] = [None, None];
    for w in Word::all(&[B, B, D]) {
        let x = TensorElement::basis(w.clone());
        let left = ModuleElement::from_tensor(Side::Left, sphere, &x).map_err(|e| e.to_string())?;
        let lhs = transpose_left(sphere, t, &left).map_err(|e| e.to_string())?;
        let rhs = rho_reduce(sphere, t, &x).map_err(|e| e.to_string())?;
        if lhs != rhs {
            first[0] = Some(json!({"word": w.to_string(), "lhs": lhs.to_string(), "rhs": rhs.to_string()}));
            break;
        }
    }
    for w in Word::all(&[D, B, B]) {
        let x = TensorElement::basis(w.clone());
        let right = ModuleElement::from_tensor(Side::Right, sphere, &x).map_err(|e| e.to_string())?;
        let lhs = transpose_right(sphere, t, &right).map_err(|e| e.to_string())?;
        let rhs = rho_reduce_left(sphere, t, &x).map_err(|e| e.to_string())?;
        if lhs != rhs {
            first[1] = Some(json!({"word": w.to_string(), "lhs": lhs.to_string(), "rhs": rhs.to_string()}));
            break;
        }
    }
    Ok(first)
}

fn prop1(ctx: &Context, out: &mut Outcome) {
    let m = ctx.model;
    let s = m.yang_baxter();
    let Some(s_inv) = s.inverse() else {
        return out.abort("inverse", "S has a zero eigenvalue");
    };
    for (name, t) in [("S", &s), ("S^-1", &s_inv)] {
        match prop1_failures(&m.sphere, t) {
            Ok([a, b]) => {
                out.assert(
                    format!("{} mu12 = mu23 {}12 {}23 on V.V.V'", name, name, name),
                    a.is_none(),
                    a.unwrap_or(json!("27 words")),
                );
                out.assert(
                    format!("{} mu23 = mu12 {}23 {}12 on V'.V.V", name, name, name),
                    b.is_none(),
                    b.unwrap_or(json!("27 words")),
                );
            }
            Err(e) => return out.abort(format!("{} pipeline", name), e),
        }
    }
    let generic = m.transposition(RF::var(Var::X), RF::var(Var::Y), RF::var(Var::Z));
    match prop1_failures(&m.sphere, &generic) {
        Ok([a, _]) => {
            let found = a.is_some();
            out.assert(
                "x P0 + y P1 + z P2 breaks the first identity",
                found,
                a.unwrap_or(json!("no failing word")),
            );
        }
        Err(e) => out.abort("generic pipeline", e),
    }
}

fn antisym(model: &Model) -> TensorElement {
    lit("q^2*u.v - v.u", model.q())
}

fn prop2_constraint(ctx: &Context, out: &mut Outcome) {
    let m = ctx.model;
    let (x, y, z) = (RF::var(Var::X), RF::var(Var::Y), RF::var(Var::Z));
    let t = m.transposition(x, y.clone(), z.clone());
    let input = antisym(m).tensor(&basis(&[Letter::DU]));
    let moved = match t.move_to_front(&input, 2) {
        Ok(v) => v,
        Err(e) => return out.abort("apply", e),
    };
    let coeff = moved.coefficient_of(&Word::from_letters(&[Letter::DV, Letter::U, Letter::U]));
    let q = qv();
    let beta = RF::one() / (RF::one() + q.pow(4));
    let expected = at_q(
        m,
        -(q.pow(4) * beta.pow(2)) * (z.pow(2) + (q.pow(4) + q.pow(-4)) * &z * &y + y.pow(2)),
    );
    let diff = &coeff - &expected;
    out.assert(
        "coefficient = -q^4 (1+q^4)^-2 (z^2 + (q^4+q^-4) z y + y^2)",
        diff.is_zero(),
        if diff.is_zero() {
            pretty(&coeff)
        } else {
            json!({"computed": coeff.to_string(), "difference": diff.to_string()})
        },
    );
    for (label, root) in [("z = -q^4 y", -(q.pow(4) * &y)), ("z = -q^-4 y", -(q.pow(-4) * &y))] {
        let v = bind(&coeff, Var::Z, &at_q(m, root));
        out.assert(format!("{} annihilates it", label), v.is_zero(), pretty(&v));
    }
}

/// `I₁` (v₀-coordinate of the du-part) and `I₂` (dw.u.u coefficient) of
/// `T12 T23 ((q²uv − vu)⊗dv)`.
pub(crate) fn obstructions(model: &Model, t: &Transposition) -> Result<(RF, RF), String> {
    let input = antisym(model).tensor(&basis(&[Letter::DV]));
    let y = t.move_to_front(&input, 2).map_err(|e| e.to_string())?;
    let mut du_part = TensorElement::zero(&[B, B]);
    for (w, c) in y.terms() {
        if w.letters()[0] == Letter::DU {
            du_part.add_term(w.slice(1, 3), c.clone());
        }
    }
    let i1 = model.decomposition.coordinates(&du_part)[0].clone();
    let i2 = y.coefficient_of(&Word::from_letters(&[Letter::DW, Letter::U, Letter::U]));
    Ok((i1, i2))
}

/// Checks that `s·δ` lies in the ideal `(I₁, I₂)`: each `I_k = δ(a_k s + b_k δ)`
/// with `det [a b] ≠ 0`, so `A I₁ + B I₂ = s δ` for explicit `A, B`.
fn ideal_certificate(i1: &RF, i2: &RF, out: &mut Outcome, branch: &str) {
    let (s, d) = (RF::var(Var::S), RF::var(Var::DELTA));
    let mut lin = Vec::new();
    for (k, ik) in [i1, i2].into_iter().enumerate() {
        let l = ik / &d;
        let den = l.denominator();
        if den.contains_var(Var::S) || den.contains_var(Var::DELTA) {
            out.assert(
                format!("{}: I{} is polynomial in s, delta", branch, k + 1),
                false,
                pretty(ik),
            );
            return;
        }
        let mut b1 = BTreeMap::new();
        b1.insert(Var::S, RF::one());
        b1.insert(Var::DELTA, RF::zero());
        let mut b2 = BTreeMap::new();
        b2.insert(Var::S, RF::zero());
        b2.insert(Var::DELTA, RF::one());
        let a = l.substitute(&b1).expect("polynomial");
        let b = l.substitute(&b2).expect("polynomial");
        if &(&a * &s) + &(&b * &d) != l {
            out.assert(
                format!("{}: I{} = delta (a s + b delta)", branch, k + 1),
                false,
                pretty(ik),
            );
            return;
        }
        lin.push((a, b));
    }
    let (a1, b1) = &lin[0];
    let (a2, b2) = &lin[1];
    let det = &(a1 * b2) - &(a2 * b1);
    if det.is_zero() {
        out.assert(format!("{}: I1, I2 independent", branch), false, "determinant 0");
        return;
    }
    let ca = b2 / &det;
    let cb = -(b1 / &det);
    let combo = &(&ca * i1) + &(&cb * i2);
    out.assert(
        format!("{}: A I1 + B I2 = s delta", branch),
        combo == &s * &d,
        json!({"A": ca.to_string(), "B": cb.to_string()}),
    );
}

/// Returns the coefficients of `T12 T23 (v₀⊗dx) − dx⊗v₀` over all `dx`.
fn centrality_defect(model: &Model, t: &Transposition) -> Result<Vec<RF>, String> {
    let v0 = model.decomposition.v0();
    let mut coeffs = Vec::new();
    for dx in Letter::DIFF {
        let d = basis(&[dx]);
        let moved = t.move_to_front(&v0.tensor(&d), 2).map_err(|e| e.to_string())?;
        let defect = moved.sub(&d.tensor(v0)).map_err(|e| e.to_string())?;
        coeffs.extend(defect.terms().map(|(_, c)| c.clone()));
    }
    Ok(coeffs)
}

fn prop2_classification(ctx: &Context, out: &mut Outcome) {
    let m = ctx.model;
    let q = m.q().clone();
    let (s, d) = (RF::var(Var::S), RF::var(Var::DELTA));
    for (branch, inverse) in [("S", false), ("S^-1", true)] {
        let t = Transposition::shifted(&q, &s, &d, inverse, m.projectors.clone());
        let (i1, i2) = match obstructions(m, &t) {
            Ok(v) => v,
            Err(e) => return out.abort(format!("{}: obstructions", branch), e),
        };
        out.info(format!("{}: I1", branch), i1.to_string());
        out.info(format!("{}: I2", branch), i2.to_string());
        let at_zero = bind(&i1, Var::DELTA, &RF::zero()).is_zero() && bind(&i2, Var::DELTA, &RF::zero()).is_zero();
        out.assert(format!("{}: I1 = I2 = 0 when delta = 0", branch), at_zero, at_zero);
        ideal_certificate(&i1, &i2, out, branch);

        // Centrality with delta = 0: the common zeros in s are exactly +-1.
        let t0 = Transposition::shifted(&q, &s, &RF::zero(), inverse, m.projectors.clone());
        let coeffs = match centrality_defect(m, &t0) {
            Ok(v) => v,
            Err(e) => return out.abort(format!("{}: centrality", branch), e),
        };
        let g = coeffs
            .iter()
            .fold(IntPolynomial::zero(), |g, c| IntPolynomial::gcd(&g, c.numerator()));
        let s2m1 = IntPolynomial::var(Var::S).pow(2).sub(&IntPolynomial::one());
        let rest = g.div_exact(&s2m1);
        let exact = matches!(&rest, Some(r) if !r.contains_var(Var::S));
        out.assert(
            format!("{}: centrality defect has gcd (s^2 - 1) in s", branch),
            exact,
            pretty(&g),
        );
        for (label, value, passes) in [("s = 1", 1, true), ("s = -1", -1, true), ("s = 2", 2, false)] {
            let sv = RF::from_int(value);
            let tv = Transposition::shifted(&q, &sv, &RF::zero(), inverse, m.projectors.clone());
            match centrality_defect(m, &tv) {
                Ok(c) => {
                    let central = c.iter().all(|x| x.is_zero());
                    out.assert(
                        format!(
                            "{}: {} {} the centrality filter",
                            branch,
                            label,
                            if passes { "passes" } else { "fails" }
                        ),
                        central == passes,
                        central,
                    );
                }
                Err(e) => return out.abort(format!("{}: centrality", branch), e),
            }
        }
        if !inverse {
            reference_forms(m, &i1, &i2, out);
        }
    }
}

/// The closed forms of `I₁, I₂` as printed in the source of the problem,
/// compared for information only.
fn reference_forms(m: &Model, i1: &RF, i2: &RF, out: &mut Outcome) {
    let q = m.q();
    let k = TableConstants::new(q);
    let (s, d) = (RF::var(Var::S), RF::var(Var::DELTA));
    let one = RF::one();
    let q3q = &q.pow(3) + q;
    let qqi = q + &q.pow(-1);
    let one_q2 = &one + &q.pow(2);
    let alpha_1pp = &q.pow(-2) * &k.alpha_1p;
    let sd = &s * &d;
    let i0 = &(&(&q3q * &k.alpha_1) * &(&k.alpha_1p * &d.pow(2)))
        + &(&k.alpha_1
            * &(&(&(&(&RF::from_int(2) * &q.pow(-3)) * &(&one_q2 * &k.alpha_1p))
                + &(&k.beta_1 - &(&(&q.pow(8) * &one_q2) * &k.gamma_1p)))
                - &one))
            * &sd;
    let p1 = &(&(&q3q * &alpha_1pp) * &i0)
        + &(&(&(&qqi * &k.alpha_1) * &k.alpha_1p)
            * &(&(&(&q.pow(6) - &(&qqi * &k.beta_p)) + &(&q.pow(2) * &k.gamma_1p)) * &sd));
    let p2 = &(&qqi * &i0) + &(&(&q3q * &k.alpha_1) * &(&(&k.beta_p + &(&q.pow(6) * &k.gamma_1p)) * &sd));
    out.info("printed I1 matches the recomputed I1", p1 == *i1);
    out.info("printed I2 matches the recomputed I2", p2 == *i2);
}

fn u_dv0(m: &Model) -> TensorElement {
    basis(&[Letter::U]).tensor(&m.decomposition.dv0())
}

/// `S(mu12(u⊗dv₀))` computed two ways; errors when they disagree.
fn prop3_element(m: &Model, t: &Transposition) -> Result<(ModuleElement, ModuleElement), String> {
    let x = u_dv0(m);
    let left = ModuleElement::from_tensor(Side::Left, &m.sphere, &x).map_err(|e| e.to_string())?;
    let a = transpose_left(&m.sphere, t, &left).map_err(|e| e.to_string())?;
    let b = rho_reduce(&m.sphere, t, &x).map_err(|e| e.to_string())?;
    Ok((a, b))
}

fn prop3(ctx: &Context, out: &mut Outcome) {
    let m = ctx.model;
    let d = ctx.profile.filtration;
    let s = m.yang_baxter();
    let (x, via_chain) = match prop3_element(m, &s) {
        Ok(v) => v,
        Err(e) => return out.abort("pipeline", e),
    };
    out.assert(
        "S(mu12(u dv0)) agrees with mu23 S12 S23 (u dv0)",
        x == via_chain,
        pretty(&x),
    );

    let y = m.decomposition.dv0_bar().tensor(&basis(&[Letter::U]));
    let mut comps = Vec::new();
    for spin in 0..3 {
        let c = m
            .projectors
            .apply_at(spin, 1, &y)
            .map_err(|e| e.to_string())
            .and_then(|t| ModuleElement::from_tensor(Side::Right, &m.sphere, &t).map_err(|e| e.to_string()));
        match c {
            Ok(c) => comps.push(c),
            Err(e) => return out.abort("components", e),
        }
    }
    out.assert("mu23 P0_23 (d v0_bar u) != 0", !comps[0].is_zero(), pretty(&comps[0]));
    out.assert("mu23 P1_23 (d v0_bar u) = 0", comps[1].is_zero(), pretty(&comps[1]));
    out.assert("mu23 P2_23 (d v0_bar u) != 0", !comps[2].is_zero(), pretty(&comps[2]));
    let [gamma, _, alpha] = eigenvalues(m.q());
    let corrected = comps[0].add(&comps[2].scale(&(&gamma / &alpha)));
    out.assert(
        "S(mu12(u dv0)) = gamma (gamma^-1 A0 + alpha^-1 A2) with gamma = q^-4, alpha = q^2",
        x == corrected,
        pretty(&corrected),
    );
    let literal = comps[0]
        .scale(&gamma.inv().expect("q != 0"))
        .add(&comps[2].scale(&alpha.inv().expect("q != 0")));
    out.info(
        "equals gamma^-1 A0 + alpha^-1 A2 without the overall gamma",
        x == literal,
    );
    out.info(
        "ratio of the two scalars gamma^-1 / alpha^-1",
        (&alpha / &gamma).to_string(),
    );

    let cot = Cotangent::new(&m.sphere, &m.decomposition, Side::Right);
    let branches: Vec<(&str, Option<Transposition>)> = vec![
        ("S", Some(s.clone())),
        ("-S", Some(s.scaled(&-RF::one()))),
        ("S^-1", s.inverse()),
        ("-S^-1", s.inverse().map(|i| i.scaled(&-RF::one()))),
    ];
    for (name, t) in branches {
        let Some(t) = t else {
            return out.abort(name, "not invertible");
        };
        let elem = if name == "S" {
            x.clone()
        } else {
            match prop3_element(m, &t) {
                Ok((a, b)) if a == b => a,
                Ok(_) => {
                    out.assert(format!("{}: both paths agree", name), false, name);
                    continue;
                }
                Err(e) => return out.abort(name, e),
            }
        };
        match cot.membership_test(&elem, d) {
            Ok(Membership::NonMember { certificate }) => {
                let valid = certificate.validate(&cot.submodule_basis(d), &elem);
                out.assert(
                    format!("{}: not in M_r up to degree {}; certificate re-validated", name, d),
                    valid,
                    json!({"certificate": certificate.to_string(), "value": certificate.evaluate(&elem).to_string()}),
                );
            }
            Ok(Membership::Member { g }) => {
                out.assert(
                    format!("{}: not in M_r", name),
                    false,
                    json!({"member_with_g": g.to_string()}),
                );
            }
            Err(e) => return out.abort(name, e),
        }
    }

    // Classical sanity: at q = 1 the flip gives a member.
    match Model::new(m.params.classical()) {
        Ok(cl) => {
            let flip_t = cl.transposition(RF::one(), -RF::one(), RF::one());
            let elem = match rho_reduce(&cl.sphere, &flip_t, &u_dv0(&cl)) {
                Ok(e) => e,
                Err(e) => return out.abort("classical", e),
            };
            let ccot = Cotangent::new(&cl.sphere, &cl.decomposition, Side::Right);
            match ccot.membership_test(&elem, d) {
                Ok(Membership::Member { g }) => {
                    out.assert("q = 1, flip: member", true, json!({"g": g.to_string()}));
                }
                Ok(Membership::NonMember { certificate }) => {
                    out.assert("q = 1, flip: member", false, certificate.to_string());
                }
                Err(e) => out.abort("classical", e),
            };
        }
        Err(e) => out.abort("classical model", e),
    }
}

// ---------------------------------------------------------------- flatness

fn flatness(ctx: &Context, out: &mut Outcome) {
    let m = ctx.model;
    let algebra: Vec<usize> = (0..=ctx.profile.algebra_degree)
        .map(Sphere::filtered_dimension)
        .collect();
    let closed: Vec<usize> = (0..=ctx.profile.algebra_degree)
        .map(|d| ((d + 1) * (d + 1)) as usize)
        .collect();
    out.assert("algebra dimensions are (d+1)^2", algebra == closed, json!(algebra));
    let cl = match Model::new(m.params.classical()) {
        Ok(c) => c,
        Err(e) => return out.abort("classical model", e),
    };
    let mut series = BTreeMap::new();
    for side in [Side::Right, Side::Left] {
        let gen = Cotangent::new(&m.sphere, &m.decomposition, side);
        let cls = Cotangent::new(&cl.sphere, &cl.decomposition, side);
        let a: Vec<usize> = (0..=ctx.profile.module_degree)
            .map(|d| gen.filtered_dimension(d))
            .collect();
        let b: Vec<usize> = (0..=ctx.profile.module_degree)
            .map(|d| cls.filtered_dimension(d))
            .collect();
        out.assert(
            format!("{} module dimensions match q = 1", side.name()),
            a == b,
            json!({"generic": a, "classical": b}),
        );
        series.insert(side, a);
    }
    out.info(
        "left and right series coincide",
        series[&Side::Left] == series[&Side::Right],
    );
}

fn rho_classical(ctx: &Context, out: &mut Outcome) {
    let cl = match Model::new(ctx.model.params.classical()) {
        Ok(c) => c,
        Err(e) => return out.abort("classical model", e),
    };
    let t = cl.transposition(RF::one(), -RF::one(), RF::one());
    out.assert(
        "x P0 + y P1 + z P2 with (1, -1, 1) is the flip at q = 1",
        *t.operator(Placement::VDiff) == flip(Placement::VDiff),
        true,
    );
    let cot = Cotangent::new(&cl.sphere, &cl.decomposition, Side::Right);
    let dv0 = cl.decomposition.dv0();
    let top = ctx.profile.filtration.saturating_sub(1);
    let mut non_members = Vec::new();
    let monos = Pbw::up_to(top);
    for f in &monos {
        let x = TensorElement::basis(f.word()).tensor(&dv0);
        let decided = rho_reduce(&cl.sphere, &t, &x)
            .map_err(|e| e.to_string())
            .and_then(|e| cot.membership_test(&e, f.degree()).map_err(|e| e.to_string()));
        match decided {
            Ok(Membership::Member { .. }) => {}
            Ok(Membership::NonMember { .. }) => non_members.push(f.to_string()),
            Err(e) => return out.abort("rho", e),
        }
    }
    out.info("monomials tested", monos.len());
    out.assert(
        "rho(f dv0) lies in M_r for every monomial f",
        non_members.is_empty(),
        json!(non_members),
    );
}

// ---------------------------------------------------------------- mutation

fn mutation(ctx: &Context, out: &mut Outcome) {
    let m = ctx.model;
    if is_classical(m) {
        return out.abort("mutation", "scaling by q = +-1 is not a perturbation");
    }
    let mut caught = 0;
    let mut missed = Vec::new();
    let mut by_check: BTreeMap<&str, usize> = BTreeMap::new();
    let mut backups: BTreeMap<&str, usize> = BTreeMap::new();
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
            let mutated = m.with_projectors(m.projectors.with_base_entry(spin, &from, &to, &value * m.q()));
            let mctx = Context {
                model: &mutated,
                profile: ctx.profile,
            };
            let refutes = |name: &&&str| {
                let spec = ALL.iter().find(|c| c.name == **name).expect("registered");
                run_spec(spec, &mctx).status == Status::Refuted
            };
            match CORE_CHECKS.iter().find(refutes) {
                Some(name) => {
                    caught += 1;
                    *by_check.entry(name).or_default() += 1;
                }
                None => missed.push(format!("P{} [{} -> {}]", spin, from, to)),
            }
            // Which check would catch it if the first one were absent.
            let backup = CORE_CHECKS.iter().skip(1).find(refutes).copied().unwrap_or("none");
            *backups.entry(backup).or_default() += 1;
        }
    }
    out.info("mutations caught, by first refuting check", json!(by_check));
    out.info("first refuting check with the spectral law left out", json!(backups));
    out.assert(
        "every single-coefficient mutation is refuted",
        missed.is_empty() && caught > 0,
        json!({"caught": caught, "missed": missed}),
    );
}
