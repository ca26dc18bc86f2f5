use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;

use qsphere::arith::{RationalFunction as RF, Var};
use qsphere::model::Model;
use qsphere::parse::{parse_expression, parse_scalar};
use qsphere::sphere::{NormalForm, Pbw};
use qsphere::symmetry::Placement;
use qsphere::tensor::{Letter, Space, TensorElement, Word};

fn model() -> &'static Model {
    static M: OnceLock<Model> = OnceLock::new();
    M.get_or_init(Model::symbolic)
}

fn arb_poly() -> impl Strategy<Value = RF> {
    prop::collection::vec((-5i64..=5, 0i32..3, 0i32..2), 1..4).prop_map(|terms| {
        terms
            .into_iter()
            .map(|(k, a, b)| RF::from_int(k) * RF::var(Var::Q).pow(a) * RF::var(Var::C).pow(b))
            .sum()
    })
}

fn arb_rf() -> impl Strategy<Value = RF> {
    (
        arb_poly(),
        arb_poly().prop_filter("non-zero denominator", |d| !d.is_zero()),
    )
        .prop_map(|(n, d)| n / d)
}

fn arb_nonzero() -> impl Strategy<Value = RF> {
    arb_rf().prop_filter("non-zero", |x| !x.is_zero())
}

fn arb_element(sig: Vec<Space>) -> impl Strategy<Value = TensorElement> {
    let words = Word::all(&sig);
    let n = words.len();
    prop::collection::vec((0..n, arb_poly()), 0..5).prop_map(move |terms| {
        let mut x = TensorElement::zero(&sig);
        for (i, c) in terms {
            x.add_term(words[i].clone(), c);
        }
        x
    })
}

fn arb_normal_form(max_degree: u32) -> impl Strategy<Value = NormalForm> {
    let monos = Pbw::up_to(max_degree);
    let n = monos.len();
    prop::collection::vec((0..n, -3i64..=3), 1..4).prop_map(move |terms| {
        let mut f = NormalForm::zero();
        for (i, k) in terms {
            f.add_term(monos[i], RF::from_int(k));
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in arb_rf(), b in arb_rf(), c in arb_rf()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn inverses(a in arb_nonzero(), b in arb_rf()) {
        prop_assert!((&a * &a.inv().unwrap()).is_one());
        prop_assert_eq!(&(&b * &a) / &a, b);
    }

    #[test]
    fn representation_is_canonical(a in arb_rf(), k in arb_nonzero()) {
        // Same value reached by a different route has the same form.
        let detour = &(&a * &k) / &k;
        prop_assert_eq!(detour.to_string(), a.to_string());
        prop_assert_eq!(detour.numerator(), a.numerator());
        prop_assert_eq!(detour.denominator(), a.denominator());
    }

    #[test]
    fn substitution_is_a_homomorphism(a in arb_rf(), b in arb_rf(), image in arb_poly()) {
        let mut bind = BTreeMap::new();
        bind.insert(Var::Q, &image + &RF::var(Var::C));
        if let (Ok(sa), Ok(sb)) = (a.substitute(&bind), b.substitute(&bind)) {
            if let Ok(sum) = (&a + &b).substitute(&bind) {
                prop_assert_eq!(sum, &sa + &sb);
            }
            if let Ok(prod) = (&a * &b).substitute(&bind) {
                prop_assert_eq!(prod, &sa * &sb);
            }
        }
    }

    #[test]
    fn scalar_render_parse_round_trip(a in arb_rf()) {
        prop_assert_eq!(parse_scalar(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn element_render_parse_round_trip(x in arb_element(vec![Space::Base, Space::Diff, Space::Base])) {
        prop_assume!(!x.is_zero());
        prop_assert_eq!(parse_expression(&x.to_string()).unwrap(), x);
    }

    #[test]
    fn transposition_is_linear(
        x in arb_element(vec![Space::Base, Space::Diff]),
        y in arb_element(vec![Space::Base, Space::Diff]),
        k in arb_rf(),
    ) {
        let s = model().yang_baxter();
        let combo = x.add(&y.scale(&k)).unwrap();
        let lhs = s.apply(&combo).unwrap();
        let rhs = s.apply(&x).unwrap().add(&s.apply(&y).unwrap().scale(&k)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn legs_act_locally(
        x in arb_element(vec![Space::Base, Space::Diff]),
        l in prop::sample::select(Letter::BASE.to_vec()),
    ) {
        let s = model().yang_baxter();
        let tail = TensorElement::basis(Word(vec![l]));
        let on_front = s.apply_at(0, &x.tensor(&tail)).unwrap();
        prop_assert_eq!(on_front, s.apply(&x).unwrap().tensor(&tail));
        let on_back = s.apply_at(1, &tail.tensor(&x)).unwrap();
        prop_assert_eq!(on_back, tail.tensor(&s.apply(&x).unwrap()));
    }

    #[test]
    fn projectors_are_idempotent_on_elements(x in arb_element(vec![Space::Base, Space::Base]), spin in 0usize..3) {
        let p = model().projectors.get(spin, Placement::VV);
        let once = p.apply(&x).unwrap();
        prop_assert_eq!(p.apply(&once).unwrap(), once);
    }

    #[test]
    fn sphere_product_is_associative(
        a in arb_normal_form(2),
        b in arb_normal_form(2),
        c in arb_normal_form(1),
    ) {
        let s = &model().sphere;
        prop_assert_eq!(s.multiply(&s.multiply(&a, &b), &c), s.multiply(&a, &s.multiply(&b, &c)));
    }

    #[test]
    fn reduction_is_idempotent_and_multiplicative(
        w1 in prop::collection::vec(prop::sample::select(Letter::BASE.to_vec()), 0..4),
        w2 in prop::collection::vec(prop::sample::select(Letter::BASE.to_vec()), 0..3),
    ) {
        let s = &model().sphere;
        let (a, b) = (Word(w1), Word(w2));
        let ab = s.reduce_word(&a.concat(&b)).unwrap();
        prop_assert_eq!(&ab, &s.multiply(&s.reduce_word(&a).unwrap(), &s.reduce_word(&b).unwrap()));
        let again = s.reduce_combination(&ab.to_combination()).unwrap();
        prop_assert_eq!(again, ab);
    }
}
