use abelian_imp::arithmetic::PrimePower;
use abelian_imp::zpm::{canonical_form, kernel_generators, solve_congruences, CongruenceSolution, ZpmMatrix};
use proptest::prelude::*;

/// A small system over Z_4, Z_8, Z_3 or Z_9 with at most three unknowns.
fn system() -> impl Strategy<Value = (PrimePower, usize, Vec<Vec<i128>>, Vec<i128>)> {
    (prop::sample::select(vec![(2u64, 2u32), (2, 3), (3, 1), (3, 2)]), 1usize..=3, 0usize..=3).prop_flat_map(
        |((p, m), cols, rows)| {
            let s = PrimePower::new(p, m).unwrap();
            let q = s.modulus() as i128;
            (
                Just(s),
                Just(cols),
                prop::collection::vec(prop::collection::vec(0..q, cols), rows),
                prop::collection::vec(0..q, rows),
            )
        },
    )
}

fn points(q: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|x| (0..q).map(move |v| [x.clone(), vec![v]].concat())).collect();
    }
    out
}

fn apply(s: PrimePower, rows: &[Vec<i128>], x: &[u64]) -> Vec<u64> {
    rows.iter().map(|r| s.reduce(r.iter().zip(x).map(|(&a, &b)| a * b as i128).sum())).collect()
}

proptest! {
    #[test]
    fn solver_agrees_with_enumeration((s, cols, rows, b) in system()) {
        let h = ZpmMatrix::new(s, cols, rows.clone()).unwrap();
        let target: Vec<u64> = b.iter().map(|&v| s.reduce(v)).collect();
        let exists = points(s.modulus(), cols).iter().any(|x| apply(s, &rows, x) == target);
        match solve_congruences(&h, &b).unwrap() {
            CongruenceSolution::Solution(x) => {
                prop_assert!(exists);
                prop_assert_eq!(apply(s, &rows, &x), target);
            }
            CongruenceSolution::Unsat(w) => {
                prop_assert!(!exists);
                prop_assert!(w.verify(&h, &target));
            }
        }
    }

    #[test]
    fn kernel_is_exact((s, cols, rows, _b) in system()) {
        let h = ZpmMatrix::new(s, cols, rows.clone()).unwrap();
        let k = kernel_generators(&h);
        for g in &k.generators {
            prop_assert!(apply(s, &rows, g).iter().all(|&v| v == 0));
        }
        for x in points(s.modulus(), cols) {
            prop_assert_eq!(k.contains(&x), apply(s, &rows, &x).iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn canonical_form_depends_on_span_only((s, cols, rows, _b) in system(), mult in 0i128..9, pick in 0usize..3) {
        prop_assume!(!rows.is_empty());
        let h = ZpmMatrix::new(s, cols, rows.clone()).unwrap();
        let mut other = rows.clone();
        other.reverse();
        let extra: Vec<i128> = rows[pick % rows.len()].iter().map(|&a| a * mult).collect();
        other.push(extra);
        let h2 = ZpmMatrix::new(s, cols, other).unwrap();
        prop_assert_eq!(canonical_form(&h), canonical_form(&h2));
        for x in points(s.modulus(), cols) {
            prop_assert_eq!(h.row_span_contains(&x), h2.row_span_contains(&x));
        }
    }
}
