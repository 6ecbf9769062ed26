mod common;

use abelian_imp::unity::{Decision, Pipeline};
use abelian_imp::ximp::{ximp_search, XimpQuery};
use common::*;
use num_traits::Zero;
use proptest::prelude::*;

const FAMILIES: [Family; 8] =
    [Family::Z2, Family::Z3, Family::Z4, Family::Z8, Family::Z9, Family::Z6, Family::Z2Z4, Family::Z2Z3Z4];

fn case() -> impl Strategy<Value = Case> {
    (any::<u64>(), 0usize..FAMILIES.len()).prop_map(|(seed, f)| random_case(&mut rng(seed), 0, FAMILIES[f]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decide_matches_vanishing(case in case(), seed in any::<u64>()) {
        let p = Pipeline::new(case.instance.clone()).unwrap();
        for f in test_polys(&mut rng(seed), &case, 4, 2) {
            let d = p.decide(&f, Some(100_000)).unwrap();
            prop_assert_eq!(d.is_member(), vanishes_on(&f, &case.solutions), "{} on {}", f, case.json);
            match d {
                Decision::Member { certificate } => prop_assert!(certificate.verify_for(&f).unwrap()),
                Decision::NonMember { witness, .. } => {
                    let w = witness.expect("witness within cap");
                    prop_assert!(case.solutions.contains(&w));
                    prop_assert!(!eval_at(&f, &w).is_zero());
                }
            }
        }
    }

    #[test]
    fn solutions_lift_into_the_unity_variety(case in case()) {
        let p = Pipeline::new(case.instance.clone()).unwrap();
        let Some(basis) = p.basis() else {
            prop_assert!(case.solutions.is_empty());
            return Ok(());
        };
        for x in case.solutions.iter().take(200) {
            let point = p.lift_solution(x).unwrap();
            for g in &basis.basis {
                prop_assert!(g.evaluate(&point).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn ximp_answers_vanish(case in case(), seed in any::<u64>()) {
        let p = Pipeline::new(case.instance.clone()).unwrap();
        let polys = test_polys(&mut rng(seed), &case, 3, 2);
        if let Some(c) = ximp_search(&p, &XimpQuery { polys: polys.clone(), pin: None }).unwrap() {
            for x in &case.solutions {
                let v = polys.iter().zip(&c).fold(rat(0), |acc, (g, ci)| acc + ci * eval_at(g, x));
                prop_assert!(v.is_zero());
            }
        }
    }
}
