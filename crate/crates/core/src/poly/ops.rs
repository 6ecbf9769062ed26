use std::sync::Arc;

use super::monomial::Monomial;
use super::polynomial::MultivariatePolynomial;
use crate::arithmetic::{CyclotomicField, CyclotomicNumber};
use crate::error::{invalid, Error, Result};

/// Default cap on the projected number of expanded terms in `substitute_reduce`.
pub const DEFAULT_TERM_GUARD: u64 = 1_000_000;

/// Lagrange interpolation through `points` as a polynomial in the single variable `var`.
pub fn interpolate(points: &[(CyclotomicNumber, CyclotomicNumber)], var: &str) -> Result<MultivariatePolynomial> {
    let vars = Arc::new(vec![var.to_string()]);
    for i in 0..points.len() {
        for j in 0..i {
            if points[i].0 == points[j].0 {
                return invalid(format!("duplicate interpolation node {}", points[i].0));
            }
        }
    }
    let q = CyclotomicField::rationals();
    // Dense coefficient vector, lowest degree first.
    let mut acc: Vec<CyclotomicNumber> = vec![q.zero(); points.len()];
    for (i, (xi, yi)) in points.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = vec![q.one()];
        let mut denom = q.one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            // basis *= (x - xj)
            let mut next = vec![q.zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] = &next[k + 1] + b;
                next[k] = &next[k] - &(b * xj);
            }
            basis = next;
            denom = &denom * &(xi - xj);
        }
        let scale = yi * &denom.inverse()?;
        for (k, b) in basis.iter().enumerate() {
            acc[k] = &acc[k] + &(b * &scale);
        }
    }
    MultivariatePolynomial::from_terms(vars, acc.into_iter().enumerate().map(|(k, c)| (Monomial(vec![k as u32]), c)))
}

/// Reduces every exponent of variable `v` modulo `periods[v]`, i.e. works
/// modulo `x_v^{periods[v]} - 1`.
pub fn reduce_periodic(p: &MultivariatePolynomial, periods: &[Option<u32>]) -> MultivariatePolynomial {
    let mut out = MultivariatePolynomial::zero(p.vars_arc().clone());
    for (m, c) in p.terms() {
        out.add_term(reduce_monomial(m, periods), c);
    }
    out
}

fn reduce_monomial(m: &Monomial, periods: &[Option<u32>]) -> Monomial {
    Monomial(
        m.0.iter()
            .zip(periods)
            .map(|(&e, per)| match per {
                Some(n) if *n > 0 => e % n,
                _ => e,
            })
            .collect(),
    )
}

fn mul_periodic(a: &MultivariatePolynomial, b: &MultivariatePolynomial, periods: &[Option<u32>]) -> MultivariatePolynomial {
    let mut out = MultivariatePolynomial::zero(a.vars_arc().clone());
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            out.add_term(reduce_monomial(&ma.mul(mb), periods), &(ca * cb));
        }
    }
    out
}

/// Substitutes `replacements[i]` for the i-th variable of `p`, reducing modulo
/// `x^{period} - 1` for every target variable with a period while expanding.
///
/// The replacements all live over one target variable list. The reduction is
/// sound for ideal membership whenever each `x^{period} - 1` is in the ideal,
/// which holds for the unity bases: there `x ≡ ω^c·∏y^β` and `y^{order} ≡ 1`.
pub fn substitute_reduce(
    p: &MultivariatePolynomial,
    replacements: &[MultivariatePolynomial],
    periods: &[Option<u32>],
    guard: u64,
) -> Result<MultivariatePolynomial> {
    if replacements.len() != p.vars().len() {
        return invalid(format!(
            "{} replacement polynomials for {} variables",
            replacements.len(),
            p.vars().len()
        ));
    }
    let Some(first) = replacements.first() else {
        return Ok(p.clone());
    };
    let target = first.vars_arc().clone();
    if replacements.iter().any(|r| r.vars() != target.as_slice()) {
        return invalid("replacement polynomials use different variable lists");
    }
    if periods.len() != target.len() {
        return invalid("one period entry is needed per target variable");
    }

    // Projected size: per term, the product of capped power sizes.
    let caps: Vec<u64> = replacements
        .iter()
        .map(|r| {
            let mut cap = 1u64;
            for v in 0..target.len() {
                if r.degree_in(v) > 0 {
                    cap = cap.saturating_mul(periods[v].map(u64::from).unwrap_or(u64::MAX));
                }
            }
            cap
        })
        .collect();
    let mut projected = 0u64;
    for (m, _) in p.terms() {
        let mut t = 1u64;
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                let n = replacements[i].num_terms() as u64;
                let raw = n.checked_pow(e).unwrap_or(u64::MAX);
                t = t.saturating_mul(raw.min(caps[i]));
            }
        }
        projected = projected.saturating_add(t);
    }
    if projected > guard {
        return Err(Error::GuardRefusal { what: format!("substitution projected to expand to {projected} terms"), bound: guard });
    }

    let one = MultivariatePolynomial::constant(target.clone(), CyclotomicField::rationals().one());
    let mut powers: Vec<Vec<MultivariatePolynomial>> = vec![vec![one.clone()]; replacements.len()];
    let mut out = MultivariatePolynomial::zero(target.clone());
    for (m, c) in p.terms() {
        let mut t = MultivariatePolynomial::constant(target.clone(), c.clone());
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            while powers[i].len() <= e as usize {
                let last = powers[i].last().expect("nonempty");
                let next = mul_periodic(last, &replacements[i], periods);
                powers[i].push(next);
            }
            t = mul_periodic(&t, &powers[i][e as usize], periods);
        }
        out = &out + &t;
    }
    Ok(out)
}
