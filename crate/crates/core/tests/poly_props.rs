use std::cmp::Ordering;

use abelian_imp::arithmetic::{CyclotomicField, PrimePower, Rational};
use abelian_imp::poly::{
    divide, interpolate, parse_polynomial, reduce_periodic, Monomial, MonomialOrder, MultivariatePolynomial, OrderKind,
};
use proptest::prelude::*;

const NAMES: [&str; 3] = ["a", "b", "c"];

fn names() -> Vec<String> {
    NAMES.iter().map(|s| s.to_string()).collect()
}

fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec(0u32..4, 3).prop_map(Monomial)
}

fn poly() -> impl Strategy<Value = MultivariatePolynomial> {
    prop::collection::vec((monomial(), -9i64..=9, 1i64..=3), 0..6).prop_map(|terms| {
        let q = CyclotomicField::rationals();
        let vars = MultivariatePolynomial::vars_from(&names());
        terms.into_iter().fold(MultivariatePolynomial::zero(vars.clone()), |acc, (m, n, d)| {
            &acc + &MultivariatePolynomial::monomial(vars.clone(), m, q.from_rational(Rational::new(n.into(), d.into())))
        })
    })
}

fn order() -> impl Strategy<Value = MonomialOrder> {
    (prop::bool::ANY, Just(vec![0usize, 1, 2]).prop_shuffle()).prop_map(|(lex, perm)| {
        MonomialOrder::with_priority(if lex { OrderKind::Lex } else { OrderKind::Grlex }, perm).unwrap()
    })
}

proptest! {
    #[test]
    fn order_is_total_and_multiplicative(o in order(), a in monomial(), b in monomial(), c in monomial()) {
        let ab = o.compare(&a, &b).unwrap();
        prop_assert_eq!(ab.reverse(), o.compare(&b, &a).unwrap());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        let mul = |x: &Monomial| Monomial(x.0.iter().zip(&c.0).map(|(u, v)| u + v).collect());
        prop_assert_eq!(o.compare(&mul(&a), &mul(&b)).unwrap(), ab);
        prop_assert_ne!(o.compare(&mul(&a), &a).unwrap(), Ordering::Less);
    }

    #[test]
    fn division_recombines(f in poly(), gs in prop::collection::vec(poly(), 1..4), o in order()) {
        let gs: Vec<_> = gs.into_iter().filter(|g| !g.is_zero()).collect();
        prop_assume!(!gs.is_empty());
        let d = divide(&f, &gs, &o).unwrap();
        let mut back = d.remainder.clone();
        for (q, g) in d.quotients.iter().zip(&gs) {
            back = &back + &(q * g);
        }
        prop_assert_eq!(back, f);
        let lms: Vec<Monomial> = gs.iter().map(|g| g.leading_term(&o).unwrap().0.clone()).collect();
        for (m, _) in d.remainder.terms() {
            prop_assert!(lms.iter().all(|lm| !lm.divides(m)));
        }
        prop_assert_eq!(divide(&d.remainder, &gs, &o).unwrap().remainder, d.remainder);
    }

    #[test]
    fn display_round_trips(f in poly()) {
        prop_assert_eq!(parse_polynomial(&f.to_string(), Some(&names())).unwrap(), f);
    }

    #[test]
    fn evaluation_is_a_ring_map(f in poly(), g in poly(), x in prop::collection::vec(-5i64..=5, 3)) {
        let pt: Vec<Rational> = x.iter().map(|&v| Rational::from_integer(v.into())).collect();
        let ev = |p: &MultivariatePolynomial| p.evaluate_rational(&pt).unwrap();
        prop_assert_eq!(ev(&(&f * &g)), ev(&f) * ev(&g));
        prop_assert_eq!(ev(&(&f + &g)), ev(&f) + ev(&g));
    }

    #[test]
    fn interpolation_hits_nodes(vals in prop::collection::vec(-20i64..=20, 8)) {
        let s = PrimePower::new(2, 3).unwrap();
        let f = CyclotomicField::new(&[s]).unwrap();
        let points: Vec<_> =
            (0..8).map(|a| (f.omega_power(s, a as i128).unwrap(), f.from_int(vals[a]))).collect();
        let poly = interpolate(&points, "X").unwrap();
        prop_assert!(poly.degree().unwrap_or(0) < 8);
        for (x, y) in &points {
            prop_assert_eq!(&poly.evaluate(std::slice::from_ref(x)).unwrap(), y);
        }
    }

    #[test]
    fn periodic_reduction_preserves_root_values(f in poly(), e in prop::collection::vec(0i128..12, 3)) {
        // a^3 = 1, b^4 = 1, c unrestricted.
        let (s3, s4) = (PrimePower::new(3, 1).unwrap(), PrimePower::new(2, 2).unwrap());
        let field = CyclotomicField::new(&[s4, s3]).unwrap();
        let pt = vec![field.omega_power(s3, e[0]).unwrap(), field.omega_power(s4, e[1]).unwrap(), field.from_int(e[2] as i64)];
        let r = reduce_periodic(&f, &[Some(3), Some(4), None]);
        prop_assert!(r.degree_in(0) < 3 && r.degree_in(1) < 4);
        prop_assert_eq!(r.evaluate(&pt).unwrap(), f.evaluate(&pt).unwrap());
    }
}

#[test]
fn zero_divisor_is_rejected() {
    let vars = MultivariatePolynomial::vars_from(&names());
    let f = MultivariatePolynomial::var(vars.clone(), 0);
    assert!(divide(&f, &[MultivariatePolynomial::zero(vars)], &MonomialOrder::lex()).is_err());
}
