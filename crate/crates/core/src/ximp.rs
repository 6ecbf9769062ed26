//! χIMP search and degree-truncated Gröbner bases in the original coordinates.
//!
//! Every `g_i` is transformed and reduced by the unity basis to `r_i`, so
//! `Σ c_i g_i ∈ I(P)` iff `Σ c_i r_i = 0`. The remainders are split into
//! rational coordinates (monomial, tensor-basis index) and the coefficient
//! system is solved over ℚ. Because I(P) is the vanishing ideal of rational
//! points, ℚ-solutions span all cyclotomic ones.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arithmetic::{CyclotomicField, Rational};
use crate::error::{invalid, Error, Result};
use crate::instance::Instance;
use crate::poly::{divide, Monomial, MonomialOrder, MultivariatePolynomial};
use crate::unity::Pipeline;

type Key = (Monomial, Vec<u32>);
type SparseVec = BTreeMap<Key, Rational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XimpQuery {
    pub polys: Vec<MultivariatePolynomial>,
    /// Index whose coefficient is fixed to 1.
    pub pin: Option<usize>,
}

/// Splits `r` into rational coordinates. The coefficients are first written in
/// `field` so that equal numbers from different fields share keys.
fn coordinates(r: &MultivariatePolynomial, field: &CyclotomicField) -> Result<SparseVec> {
    let r = r.embed_coefficients(field)?;
    let mut v = SparseVec::new();
    for (m, c) in r.terms() {
        for (exps, q) in c.terms() {
            v.insert((m.clone(), exps), q.clone());
        }
    }
    Ok(v)
}

/// Remainders of original monomials, built multiplicatively: since normal
/// forms modulo a Gröbner basis are unique, `r(u·x) = r(r(u)·r(x))`.
struct Remainders<'a> {
    pipeline: &'a Pipeline,
    field: CyclotomicField,
    cache: HashMap<Monomial, MultivariatePolynomial>,
}

impl<'a> Remainders<'a> {
    fn new(pipeline: &'a Pipeline) -> Result<Self> {
        let basis = pipeline.basis().ok_or_else(|| Error::InvalidState("the instance is unsatisfiable".into()))?;
        Ok(Remainders { pipeline, field: basis.field.clone(), cache: HashMap::new() })
    }

    fn of_monomial(&mut self, u: &Monomial) -> Result<MultivariatePolynomial> {
        if let Some(r) = self.cache.get(u) {
            return Ok(r.clone());
        }
        let vars = self.pipeline.instance.coordinate_names();
        let r = match u.0.iter().position(|&e| e > 0) {
            Some(i) if u.0.iter().sum::<u32>() > 1 => {
                let mut rest = u.clone();
                rest.0[i] -= 1;
                let mut single = Monomial(vec![0; u.0.len()]);
                single.0[i] = 1;
                let product = &self.of_monomial(&rest)? * &self.of_monomial(&single)?;
                let basis = self.pipeline.basis().expect("satisfiable");
                divide(&product, &basis.basis, &basis.order())?.remainder
            }
            _ => {
                let g = MultivariatePolynomial::monomial(Arc::new(vars), u.clone(), CyclotomicField::rationals().one());
                self.pipeline.remainder(&g)?.embed_coefficients(&self.field)?
            }
        };
        self.cache.insert(u.clone(), r.clone());
        Ok(r)
    }

    fn of(&mut self, g: &MultivariatePolynomial) -> Result<SparseVec> {
        self.pipeline.check_degree(g)?;
        let basis = self.pipeline.basis().expect("satisfiable");
        let mut acc = MultivariatePolynomial::zero(basis.vars.clone());
        for (m, c) in g.terms() {
            acc = &acc + &self.of_monomial(m)?.scale(&c.embed(&self.field)?);
        }
        coordinates(&acc, &self.field)
    }
}

fn axpy(target: &mut SparseVec, scale: &Rational, src: &SparseVec) {
    for (k, s) in src {
        let entry = target.entry(k.clone()).or_insert_with(Rational::zero);
        *entry -= scale * s;
        if entry.is_zero() {
            target.remove(k);
        }
    }
}

/// Column echelon basis with bookkeeping of how each basis vector combines
/// the inserted columns. Basis vector k vanishes at the pivots of 0..k.
struct Echelon {
    rows: Vec<(Key, SparseVec, BTreeMap<usize, Rational>)>,
}

impl Echelon {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    /// Reduces column `v` (tagged `index`). Returns `None` after adding it to
    /// the basis, or `Some(λ)` with `v = Σ λ_i col_i` over earlier columns.
    fn insert(&mut self, index: usize, mut v: SparseVec) -> Option<BTreeMap<usize, Rational>> {
        // combo tracks v − (original column) in terms of inserted columns.
        let mut combo: BTreeMap<usize, Rational> = BTreeMap::new();
        for (pivot, row, row_combo) in &self.rows {
            let Some(a) = v.get(pivot).cloned() else { continue };
            let f = &a / &row[pivot];
            axpy(&mut v, &f, row);
            for (i, c) in row_combo {
                let entry = combo.entry(*i).or_insert_with(Rational::zero);
                *entry -= &f * c;
                if entry.is_zero() {
                    combo.remove(i);
                }
            }
        }
        if v.is_empty() {
            // 0 = col + combo, so col = −combo.
            return Some(combo.into_iter().map(|(i, c)| (i, -c)).collect());
        }
        let pivot = v.keys().next().expect("nonzero").clone();
        combo.insert(index, Rational::one());
        self.rows.push((pivot, v, combo));
        None
    }
}

fn check_rational(polys: &[MultivariatePolynomial]) -> Result<()> {
    if polys.iter().all(|g| g.is_rational()) {
        Ok(())
    } else {
        invalid("χIMP inputs must have rational coefficients")
    }
}

/// Finds c with `Σ c_i g_i ∈ I(P)`: pinned, the basic solution with
/// `c_pin = 1` over the greedy basis of the other columns; unpinned, the null
/// vector of the first column that depends on earlier ones. `None` if no such
/// (nonzero, resp. pinned) vector exists.
pub fn ximp_search(pipeline: &Pipeline, query: &XimpQuery) -> Result<Option<Vec<Rational>>> {
    let l = query.polys.len();
    if let Some(p) = query.pin {
        if p >= l {
            return invalid(format!("pin index {p} out of range for {l} polynomials"));
        }
    }
    check_rational(&query.polys)?;
    let unit = |i: usize| {
        let mut c = vec![Rational::zero(); l];
        c[i] = Rational::one();
        c
    };
    if !pipeline.is_sat() {
        return Ok(match query.pin {
            Some(p) => Some(unit(p)),
            None => (l > 0).then(|| unit(0)),
        });
    }
    let mut remainders = Remainders::new(pipeline)?;
    let cols: Vec<SparseVec> = query.polys.iter().map(|g| remainders.of(g)).collect::<Result<_>>()?;
    let mut ech = Echelon::new();
    match query.pin {
        None => {
            for (i, col) in cols.into_iter().enumerate() {
                if let Some(lambda) = ech.insert(i, col) {
                    let mut c = unit(i);
                    for (k, v) in lambda {
                        c[k] = -v;
                    }
                    return Ok(Some(c));
                }
            }
            Ok(None)
        }
        Some(p) => {
            let mut cols: Vec<Option<SparseVec>> = cols.into_iter().map(Some).collect();
            let target = cols[p].take().expect("pin column");
            for (i, col) in cols.into_iter().enumerate() {
                if let Some(col) = col {
                    ech.insert(i, col);
                }
            }
            Ok(ech.insert(p, target).map(|lambda| {
                let mut c = unit(p);
                for (k, v) in lambda {
                    c[k] = -v;
                }
                c
            }))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedBasis {
    pub degree: u32,
    pub vars: Vec<String>,
    /// Grlex over `vars`; each element is monic in its leading monomial.
    pub basis: Vec<MultivariatePolynomial>,
}

impl TruncatedBasis {
    pub fn order(&self) -> MonomialOrder {
        MonomialOrder::grlex()
    }
}

/// All monomials of total degree at most `d` in `n` variables, ascending grlex.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == cur.len() {
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, d, &mut vec![0; n], &mut out);
    let order = MonomialOrder::grlex();
    out.sort_by_key(|m| order.key(m));
    out
}

/// Sweeps the monomials of degree ≤ d upwards in grlex. Each monomial u not
/// divisible by a known leading monomial is tested with a pinned χIMP query
/// over u and every monomial below it; a hit yields a basis element with
/// leading monomial u.
///
/// The queries share one incremental echelon basis: with the lower monomials
/// listed in ascending order, the greedy basis of a query is exactly the set
/// of lower monomials whose remainders were independent when they were swept,
/// so every query's basic solution is read off the running elimination.
pub fn truncated_gb(pipeline: &Pipeline, d: u32) -> Result<TruncatedBasis> {
    let vars_list = pipeline.instance.coordinate_names();
    let vars = Arc::new(vars_list.clone());
    let q = CyclotomicField::rationals();
    if !pipeline.is_sat() {
        let one = MultivariatePolynomial::constant(vars, q.one());
        return Ok(TruncatedBasis { degree: d, vars: vars_list, basis: vec![one] });
    }
    let mut remainders = Remainders::new(pipeline)?;
    let monomials = monomials_up_to(vars.len(), d);
    let mut ech = Echelon::new();
    let mut basis: Vec<MultivariatePolynomial> = Vec::new();
    let mut lms: Vec<Monomial> = Vec::new();
    for (k, u) in monomials.iter().enumerate() {
        if lms.iter().any(|lm| lm.divides(u)) {
            continue;
        }
        let g = MultivariatePolynomial::monomial(vars.clone(), u.clone(), q.one());
        let r = remainders.of(&g)?;
        if let Some(lambda) = ech.insert(k, r) {
            let mut b = g;
            for (i, c) in lambda {
                b.add_term(monomials[i].clone(), &q.from_rational(-c));
            }
            lms.push(u.clone());
            basis.push(b);
        }
    }
    Ok(TruncatedBasis { degree: d, vars: vars_list, basis })
}

pub fn ximp_for_instance(instance: &Instance, query: &XimpQuery) -> Result<Option<Vec<Rational>>> {
    ximp_search(&Pipeline::new(instance.clone())?, query)
}

pub fn truncated_gb_for_instance(instance: &Instance, d: u32) -> Result<TruncatedBasis> {
    truncated_gb(&Pipeline::new(instance.clone())?, d)
}
