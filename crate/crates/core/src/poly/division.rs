use std::collections::BTreeMap;

use serde::Serialize;

use super::monomial::{Monomial, MonomialOrder};
use super::polynomial::MultivariatePolynomial;
use crate::arithmetic::CyclotomicNumber;
use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Division {
    pub quotients: Vec<MultivariatePolynomial>,
    pub remainder: MultivariatePolynomial,
}

struct Divisor {
    lm: Monomial,
    lc_inv: CyclotomicNumber,
    tail: Vec<(Monomial, CyclotomicNumber)>,
}

fn prepare(g: &MultivariatePolynomial, order: &MonomialOrder) -> Result<Divisor> {
    let Some((lm, lc)) = g.leading_term(order) else {
        return invalid("division by the zero polynomial");
    };
    let tail = g.terms().filter(|(m, _)| *m != lm).map(|(m, c)| (m.clone(), c.clone())).collect();
    Ok(Divisor { lm: lm.clone(), lc_inv: lc.inverse()?, tail })
}

/// Multivariate division. Each step looks at the current leading term and
/// divides by the first basis element whose leading monomial divides it;
/// otherwise the term moves to the remainder.
pub fn divide(f: &MultivariatePolynomial, basis: &[MultivariatePolynomial], order: &MonomialOrder) -> Result<Division> {
    let vars = f.vars_arc().clone();
    let mut divisors = Vec::with_capacity(basis.len());
    for g in basis {
        if g.vars() != f.vars() {
            return invalid("divisor and dividend use different variable lists");
        }
        divisors.push(prepare(g, order)?);
    }
    if !order.priority.is_empty() && order.priority.len() != vars.len() {
        return invalid("order priority list does not match the variable count");
    }
    // Working polynomial keyed by order key, so the leading term is the last entry.
    let mut work: BTreeMap<Vec<u32>, (Monomial, CyclotomicNumber)> =
        f.terms().map(|(m, c)| (order.key(m), (m.clone(), c.clone()))).collect();
    let mut quotients = vec![MultivariatePolynomial::zero(vars.clone()); basis.len()];
    let mut remainder = MultivariatePolynomial::zero(vars.clone());
    while let Some((_, (m, c))) = work.pop_last() {
        let hit = divisors.iter().enumerate().find_map(|(i, d)| m.div(&d.lm).map(|u| (i, u)));
        match hit {
            None => remainder.add_term(m, &c),
            Some((i, u)) => {
                let t = &c * &divisors[i].lc_inv;
                for (tm, tc) in &divisors[i].tail {
                    let mm = tm.mul(&u);
                    let delta = -&(&t * tc);
                    let key = order.key(&mm);
                    match work.get_mut(&key) {
                        Some(entry) => {
                            let v = &entry.1 + &delta;
                            if v.is_zero() {
                                work.remove(&key);
                            } else {
                                entry.1 = v;
                            }
                        }
                        None => {
                            work.insert(key, (mm, delta));
                        }
                    }
                }
                quotients[i].add_term(u, &t);
            }
        }
    }
    Ok(Division { quotients, remainder })
}

/// `divide(..).remainder`, skipping quotient bookkeeping.
pub fn reduce(f: &MultivariatePolynomial, basis: &[MultivariatePolynomial], order: &MonomialOrder) -> Result<MultivariatePolynomial> {
    Ok(divide(f, basis, order)?.remainder)
}

pub fn s_polynomial(f: &MultivariatePolynomial, g: &MultivariatePolynomial, order: &MonomialOrder) -> Result<MultivariatePolynomial> {
    let (Some((fm, fc)), Some((gm, gc))) = (f.leading_term(order), g.leading_term(order)) else {
        return invalid("S-polynomial of a zero polynomial");
    };
    let gamma = fm.lcm(gm);
    let uf = gamma.div(fm).expect("lcm is divisible");
    let ug = gamma.div(gm).expect("lcm is divisible");
    Ok(&f.mul_term(&uf, &fc.inverse()?) - &g.mul_term(&ug, &gc.inverse()?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BuchbergerFailure {
    pub pair: (usize, usize),
    pub remainder: MultivariatePolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BuchbergerReport {
    /// Pairs skipped because their leading monomials are coprime.
    pub shortcut_pairs: Vec<(usize, usize)>,
    pub checked_pairs: usize,
    pub failure: Option<BuchbergerFailure>,
}

impl BuchbergerReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks the S-pair criterion, stopping at the first pair with nonzero remainder.
pub fn buchberger_check(basis: &[MultivariatePolynomial], order: &MonomialOrder) -> Result<BuchbergerReport> {
    let mut lms = Vec::with_capacity(basis.len());
    for g in basis {
        match g.leading_term(order) {
            Some((m, _)) => lms.push(m.clone()),
            None => return invalid("Groebner basis check on a zero polynomial"),
        }
    }
    let mut report = BuchbergerReport { shortcut_pairs: Vec::new(), checked_pairs: 0, failure: None };
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            if lms[i].is_coprime(&lms[j]) {
                report.shortcut_pairs.push((i, j));
                continue;
            }
            report.checked_pairs += 1;
            let r = reduce(&s_polynomial(&basis[i], &basis[j], order)?, basis, order)?;
            if !r.is_zero() {
                report.failure = Some(BuchbergerFailure { pair: (i, j), remainder: r });
                return Ok(report);
            }
        }
    }
    Ok(report)
}
