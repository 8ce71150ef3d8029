//! Randomized invariants of the counter system, the logic and the reductions.

mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;

use tmc::counter::{apply, apply_unchecked, Transition};
use tmc::eltl::{canonicalize, check_witness, cut_graph, eval_on_lasso, syntax_tree, unwinding, CutFunction};
use tmc::guards::context_of;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn transitions_conserve_and_grow(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ta = random_ta(&mut r, 6, 12);
        let mut s = random_config(&mut r, &ta);
        for _ in 0..20 {
            let Some(t) = random_transition(&mut r, &ta, &s) else { break };
            let next = apply(&ta, &s, t).unwrap();
            prop_assert_eq!(next.total(), s.total());
            prop_assert!(next.g.iter().zip(&s.g).all(|(a, b)| a >= b));
            prop_assert!(context_of(&ta, &s).is_subset(&context_of(&ta, &next)));
            let iterated = (0..t.factor).fold(s.clone(), |c, _| apply_unchecked(&ta, &c, Transition::new(t.rule, 1)));
            prop_assert_eq!(&iterated, &next);
            s = next;
        }
    }

    #[test]
    fn canonical_form_is_equivalent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ta = random_ta(&mut r, 5, 10);
        let phi = random_formula(&mut r, &ta, 3);
        let canon = canonicalize(&phi).to_formula();
        for _ in 0..4 {
            let s = random_config(&mut r, &ta);
            if let Some(lasso) = random_lasso(&mut r, &ta, &s) {
                prop_assert_eq!(eval_on_lasso(&lasso, &phi), eval_on_lasso(&lasso, &canon), "{:?}", phi);
            }
        }
    }

    #[test]
    fn witnesses_are_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ta = random_ta(&mut r, 5, 10);
        let phi = random_formula(&mut r, &ta, 3);
        let c = canonicalize(&phi);
        let tree = syntax_tree(&c);
        let graph = cut_graph(&tree);
        let s = random_config(&mut r, &ta);
        let Some(lasso) = random_lasso(&mut r, &ta, &s) else { return Ok(()) };
        if let Some((long, zeta)) = unwinding(&lasso, &c, &tree, &graph) {
            prop_assert!(eval_on_lasso(&lasso, &phi));
            prop_assert_eq!(check_witness(&long, &c, &tree, &graph, &zeta), Ok(()));
            prop_assert!(eval_on_lasso(&long, &phi));
        } else {
            prop_assert!(!eval_on_lasso(&lasso, &phi));
        }
        let long = lasso.unrolled(2, 2);
        for _ in 0..20 {
            let values: Vec<usize> = (0..graph.vertices.len()).map(|_| r.gen_range(0..long.len())).collect();
            let mut values = values;
            values[graph.loop_start()] = long.loop_start();
            values[graph.loop_end()] = long.len() - 1;
            let Ok(zeta) = CutFunction::new(&graph, &long, values) else { continue };
            if check_witness(&long, &c, &tree, &graph, &zeta).is_ok() {
                prop_assert!(eval_on_lasso(&long, &phi), "{:?}", phi);
            }
        }
    }

    #[test]
    fn reductions_hold(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut tally = ReductionTally::default();
        check_reduction_instance(&mut r, &mut tally).map_err(TestCaseError::fail)?;
    }
}
