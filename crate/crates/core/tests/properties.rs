//! Property tests checking library routines against the reference oracles.

mod common;

use std::collections::BTreeSet;

use ccsynth::automata::word_automaton;
use ccsynth::closure::{commutation_automaton, project, trace_equivalent};
use ccsynth::compose::sync_product;
use ccsynth::formula::{eval_on_lasso, parse_ltl};
use ccsynth::localize::project_spec;
use ccsynth::{LassoWord, Ltl, Property};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ltl_without_release() -> impl Strategy<Value = Ltl> {
    let leaf = prop_oneof![
        Just(Ltl::True),
        Just(Ltl::False),
        prop::sample::select(vec!["a", "b", "c"]).prop_map(Ltl::atom),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Ltl::not),
            inner.clone().prop_map(Ltl::next),
            inner.clone().prop_map(Ltl::eventually),
            inner.clone().prop_map(Ltl::always),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.until(b)),
        ]
    })
}

fn lasso(max: usize) -> impl Strategy<Value = ccsynth::Word> {
    let letter = prop::sample::select(vec!["a", "b", "c"]).prop_map(Property::new);
    (
        prop::collection::vec(letter.clone(), 0..=max),
        prop::collection::vec(letter, 1..=max),
    )
        .prop_map(|(u, v)| LassoWord::new(u, v))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn printed_formulas_parse_back(f in ltl_without_release()) {
        let text = f.to_string();
        prop_assert_eq!(parse_ltl(&text, &props(&["a", "b", "c"])).unwrap(), f);
    }

    #[test]
    fn negation_normal_form_keeps_meaning(f in ltl_without_release(), w in lasso(3)) {
        let nnf = f.to_nnf();
        prop_assert!(nnf.is_nnf());
        prop_assert_eq!(eval_on_lasso(&nnf, &w), eval_on_lasso(&f, &w));
    }

    #[test]
    fn library_membership_matches_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = props(&["a", "b", "c"]);
        let m = random_mixed(&mut rng, 5, &sigma, 0.3);
        for w in all_lassos(&sigma, 2, 2, true) {
            prop_assert_eq!(m.accepts(&w), mixed_accepts(&m, &w), "word {}", w);
            prop_assert_eq!(m.buchi().accepts(&w), buchi_accepts(m.buchi(), &w), "word {}", w);
        }
    }

    #[test]
    fn reduction_preserves_language(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = props(&["a", "b", "c"]);
        let m = random_mixed(&mut rng, 6, &sigma, 0.35);
        let r = m.reduce();
        prop_assert!(r.num_states() <= m.num_states());
        for w in all_lassos(&sigma, 3, 2, true) {
            prop_assert_eq!(mixed_accepts(&r, &w), mixed_accepts(&m, &w), "word {}", w);
        }
    }

    #[test]
    fn reduced_projection_keeps_language(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = props(&["a", "b", "c"]);
        let b = random_buchi(&mut rng, 5, &sigma, 0.3);
        let sigma_i = props(&["a", "b"]);
        let b_i = project_spec(&b, &sigma_i);
        let r = b_i.reduce();
        for v in all_lassos(&sigma_i, 3, 2, true) {
            prop_assert_eq!(mixed_accepts(&r, &v), mixed_accepts(&b_i, &v), "word {}", v);
        }
    }

    #[test]
    fn single_component_product_is_the_component(seed in any::<u64>(), w in lasso(3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = props(&["a", "b", "c"]);
        let m = random_mixed(&mut rng, 4, &sigma, 0.4);
        let p = sync_product(vec![m.clone()]).unwrap();
        prop_assert_eq!(p.accepts(&w).unwrap(), mixed_accepts(&m, &w));
    }

    #[test]
    fn commutation_words_are_trace_equivalent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = distribution(&[&["a", "b"], &["a", "c"], &["d"]]);
        let c = commutation_automaton(&d);
        if let Some(w) = random_accepted_lasso(&mut rng, &c, 12) {
            let first = w.map(|p| p.0.clone());
            let second = w.map(|p| p.1.clone());
            prop_assert!(trace_equivalent(&first, &second, &d));
            // a cut inside a swap gadget leaves one letter pending
            for s in d.alphabets() {
                let n = 4 * w.span();
                let (x, y) = (project_finite(&first.unroll(n), s), project_finite(&second.unroll(n), s));
                let (short, long) = if x.len() <= y.len() { (x, y) } else { (y, x) };
                prop_assert!(long.len() - short.len() <= 1);
                prop_assert_eq!(&long[..short.len()], &short[..]);
            }
        }
    }

    #[test]
    fn word_automaton_accepts_exactly_its_word(w in lasso(3), x in lasso(3)) {
        let sigma: BTreeSet<Property> = props(&["a", "b", "c"]);
        let a = word_automaton(&w, sigma.iter().cloned()).unwrap();
        prop_assert!(mixed_accepts(&a, &w));
        prop_assert_eq!(mixed_accepts(&a, &x), w.same_word(&x));
        let fin = LassoWord::finite(w.prefix.clone());
        let af = word_automaton(&fin, sigma).unwrap();
        prop_assert!(mixed_accepts(&af, &fin));
        prop_assert!(!mixed_accepts(&af, &w));
    }

    #[test]
    fn projection_of_lasso_matches_unrolling(w in lasso(4)) {
        let s = props(&["a", "c"]);
        let p = project(&w, &s);
        let n = 6 * w.span();
        let expected = project_finite(&w.unroll(n), &s);
        let got = p.unroll(expected.len());
        prop_assert_eq!(&got[..], &expected[..got.len().min(expected.len())]);
        prop_assert_eq!(p.is_finite(), !w.period.iter().any(|x| s.contains(x)));
    }
}
