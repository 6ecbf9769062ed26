//! Randomized corpus and self-contained oracles shared by the integration tests.
//!
//! Nothing here goes through the library's normalization or brute force:
//! instances keep their own constraint data, solutions are found by plain
//! enumeration, and linear algebra over ℚ uses a local elimination.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use abelian_imp::arithmetic::{CyclotomicField, Rational};
use abelian_imp::instance::Instance;
use abelian_imp::poly::{Monomial, MultivariatePolynomial};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Z2,
    Z3,
    Z4,
    Z8,
    Z9,
    Z6,
    Z2Z4,
    Z2Z3Z4,
}

pub const FAMILIES: [Family; 8] =
    [Family::Z2, Family::Z3, Family::Z4, Family::Z8, Family::Z9, Family::Z6, Family::Z2Z4, Family::Z2Z3Z4];

impl Family {
    /// Cyclic factor orders of every variable.
    pub fn factors(self) -> Vec<u64> {
        match self {
            Family::Z2 => vec![2],
            Family::Z3 => vec![3],
            Family::Z4 => vec![4],
            Family::Z8 => vec![8],
            Family::Z9 => vec![9],
            Family::Z6 => vec![6],
            Family::Z2Z4 => vec![2, 4],
            Family::Z2Z3Z4 => vec![2, 3, 4],
        }
    }

    pub fn max_vars(self) -> usize {
        match self {
            Family::Z2Z3Z4 => 3,
            Family::Z2Z4 => 4,
            _ => 5,
        }
    }

    fn header(self) -> (String, Value) {
        match self {
            Family::Z2Z4 => ("group".into(), json!([[2, 1], [2, 2]])),
            Family::Z2Z3Z4 => ("group".into(), json!([[2, 1], [3, 1], [2, 2]])),
            f => ("modulus".into(), json!(f.factors()[0])),
        }
    }
}

/// A constraint over coordinate indices, kept in a directly checkable form.
#[derive(Clone, Debug)]
pub enum Check {
    Linear { coords: Vec<usize>, coeffs: Vec<i64>, constant: i64, modulus: u64 },
    Set { coords: Vec<usize>, tuples: HashSet<Vec<u64>> },
}

impl Check {
    pub fn holds(&self, x: &[u64]) -> bool {
        match self {
            Check::Linear { coords, coeffs, constant, modulus } => {
                let n = *modulus as i128;
                let s: i128 = coords.iter().zip(coeffs).map(|(&k, &c)| c as i128 * x[k] as i128).sum::<i128>() - *constant as i128;
                s.rem_euclid(n) == 0
            }
            Check::Set { coords, tuples } => {
                let t: Vec<u64> = coords.iter().map(|&k| x[k]).collect();
                tuples.contains(&t)
            }
        }
    }

    fn coords(&self) -> &[usize] {
        match self {
            Check::Linear { coords, .. } | Check::Set { coords, .. } => coords,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Case {
    pub id: usize,
    pub family: Family,
    pub json: String,
    pub instance: Instance,
    pub moduli: Vec<u64>,
    pub names: Vec<String>,
    pub num_vars: usize,
    pub checks: Vec<Check>,
    pub solutions: Vec<Vec<u64>>,
}

/// Coset `base + ⟨gens⟩` in `∏ Z_{sig}`, by closure.
fn coset(sig: &[u64], base: &[u64], gens: &[Vec<u64>]) -> HashSet<Vec<u64>> {
    let zero = vec![0u64; sig.len()];
    let mut group: HashSet<Vec<u64>> = HashSet::from([zero.clone()]);
    let mut frontier = vec![zero];
    while let Some(s) = frontier.pop() {
        for g in gens {
            let t: Vec<u64> = s.iter().zip(g).zip(sig).map(|((a, b), n)| (a + b) % n).collect();
            if group.insert(t.clone()) {
                frontier.push(t);
            }
        }
    }
    group.into_iter().map(|s| s.iter().zip(base).zip(sig).map(|((a, b), n)| (a + b) % n).collect()).collect()
}

/// Splits a flat coordinate tuple into per-variable JSON entries.
fn entries(flat: &[u64], widths: &[usize]) -> Vec<Value> {
    let mut out = Vec::new();
    let mut pos = 0;
    for &w in widths {
        if w == 1 {
            out.push(json!(flat[pos]));
        } else {
            out.push(json!(flat[pos..pos + w].to_vec()));
        }
        pos += w;
    }
    out
}

pub fn solutions_by_enumeration(moduli: &[u64], checks: &[Check]) -> Vec<Vec<u64>> {
    let n = moduli.len();
    // Check each constraint at the depth where its last coordinate is assigned.
    let mut at: Vec<Vec<&Check>> = vec![Vec::new(); n];
    for c in checks {
        match c.coords().iter().max() {
            Some(&k) => at[k].push(c),
            None => at[0].push(c),
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut x = vec![0u64; n];
    fn rec(d: usize, moduli: &[u64], at: &[Vec<&Check>], x: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        for a in 0..moduli[d] {
            x[d] = a;
            if at[d].iter().all(|c| c.holds(x)) {
                if d + 1 == moduli.len() {
                    out.push(x.clone());
                } else {
                    rec(d + 1, moduli, at, x, out);
                }
            }
        }
    }
    rec(0, moduli, &at, &mut x, &mut out);
    out
}

pub fn random_case(rng: &mut ChaCha8Rng, id: usize, family: Family) -> Case {
    let factors = family.factors();
    let width = factors.len();
    let num_vars = rng.gen_range(1..=family.max_vars());
    let var_names: Vec<String> = (0..num_vars).map(|i| format!("v{}", i + 1)).collect();
    let mut moduli = Vec::new();
    let mut names = Vec::new();
    for v in &var_names {
        for (k, &n) in factors.iter().enumerate() {
            moduli.push(n);
            names.push(if width == 1 { v.clone() } else { format!("{v}.{k}") });
        }
    }
    let num_constraints = rng.gen_range(0..=4);
    let mut checks = Vec::new();
    let mut constraints = Vec::new();
    for _ in 0..num_constraints {
        let arity = rng.gen_range(1..=num_vars.min(3));
        let mut scope: Vec<usize> = (0..num_vars).collect();
        scope.shuffle(rng);
        scope.truncate(arity);
        let coords: Vec<usize> = scope.iter().flat_map(|&v| v * width..(v + 1) * width).collect();
        let sig: Vec<u64> = coords.iter().map(|&k| moduli[k]).collect();
        let scope_names: Vec<&str> = scope.iter().map(|&v| var_names[v].as_str()).collect();
        let kind = rng.gen_range(0..3);
        if kind == 0 && width == 1 {
            let n = sig[0];
            let coeffs: Vec<i64> = (0..arity).map(|_| rng.gen_range(-(n as i64)..n as i64)).collect();
            let constant = rng.gen_range(0..n as i64);
            constraints.push(json!({"scope": scope_names, "relation": {"linear": {"coeffs": coeffs, "const": constant}}}));
            checks.push(Check::Linear { coords, coeffs, constant, modulus: n });
        } else {
            let base: Vec<u64> = sig.iter().map(|&n| rng.gen_range(0..n)).collect();
            let ngens = rng.gen_range(0..=2);
            let gens: Vec<Vec<u64>> = (0..ngens).map(|_| sig.iter().map(|&n| rng.gen_range(0..n)).collect()).collect();
            let widths = vec![width; arity];
            if kind == 1 {
                let set = coset(&sig, &base, &gens);
                let mut tuples: Vec<Vec<u64>> = set.iter().cloned().collect();
                tuples.sort();
                let json_tuples: Vec<Value> = tuples.iter().map(|t| Value::Array(entries(t, &widths))).collect();
                constraints.push(json!({"scope": scope_names, "relation": {"tuples": json_tuples}}));
                checks.push(Check::Set { coords, tuples: set });
            } else {
                let set = coset(&sig, &base, &gens);
                let json_gens: Vec<Value> = gens.iter().map(|g| Value::Array(entries(g, &widths))).collect();
                constraints.push(json!({"scope": scope_names,
                    "relation": {"coset": {"base": entries(&base, &widths), "gens": json_gens}}}));
                checks.push(Check::Set { coords, tuples: set });
            }
        }
    }
    let (key, header) = family.header();
    let mut obj = serde_json::Map::new();
    obj.insert(key, header);
    obj.insert("variables".into(), Value::Array(var_names.iter().map(|v| json!({"name": v})).collect()));
    obj.insert("constraints".into(), Value::Array(constraints));
    let json = Value::Object(obj).to_string();
    let instance = Instance::from_json(&json).unwrap_or_else(|e| panic!("generated instance rejected: {e}\n{json}"));
    assert_eq!(instance.coordinate_names(), names, "coordinate naming");
    let solutions = solutions_by_enumeration(&moduli, &checks);
    Case { id, family, json, instance, moduli, names, num_vars, checks, solutions }
}

/// `count` instances cycling through the families, with a fixed seed.
pub fn corpus(count: usize, seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_case(&mut rng, i, FAMILIES[i % FAMILIES.len()])).collect()
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Exact evaluation of a rational-coefficient polynomial at an integer point.
pub fn eval_at(f: &MultivariatePolynomial, x: &[u64]) -> Rational {
    let mut acc = Rational::zero();
    for (m, c) in f.terms() {
        let mut t = c.to_rational().expect("rational coefficient");
        for (&e, &v) in m.exps().iter().zip(x) {
            for _ in 0..e {
                t *= rat(v as i64);
            }
        }
        acc += t;
    }
    acc
}

pub fn vanishes_on(f: &MultivariatePolynomial, sols: &[Vec<u64>]) -> bool {
    sols.iter().all(|x| eval_at(f, x).is_zero())
}

pub fn random_monomial(rng: &mut ChaCha8Rng, n: usize, max_deg: u32) -> Monomial {
    let d = rng.gen_range(0..=max_deg);
    let mut e = vec![0u32; n];
    for _ in 0..d {
        e[rng.gen_range(0..n)] += 1;
    }
    Monomial(e)
}

pub fn poly_from(names: &[String], terms: &[(Monomial, Rational)]) -> MultivariatePolynomial {
    let q = CyclotomicField::rationals();
    MultivariatePolynomial::from_terms(
        MultivariatePolynomial::vars_from(names),
        terms.iter().map(|(m, c)| (m.clone(), q.from_rational(c.clone()))),
    )
    .unwrap()
}

pub fn random_sparse(rng: &mut ChaCha8Rng, names: &[String], max_deg: u32) -> MultivariatePolynomial {
    let k = rng.gen_range(1..=4);
    let terms: Vec<(Monomial, Rational)> = (0..k)
        .map(|_| (random_monomial(rng, names.len(), max_deg), Rational::new(rng.gen_range(-5..=5).into(), rng.gen_range(1..=3).into())))
        .collect();
    poly_from(names, &terms)
}

/// Reduced row echelon form over ℚ; returns pivot columns.
pub fn rref(a: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    pivots
}

/// Basis of `{c : A c = 0}` for an `rows × cols` matrix.
pub fn nullspace(a: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut m = a.to_vec();
    let pivots = rref(&mut m, cols);
    let mut out = Vec::new();
    for f in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); cols];
        v[f] = Rational::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -m[r][f].clone();
        }
        out.push(v);
    }
    out
}

/// Evaluation matrix: one row per solution, one column per polynomial.
pub fn evaluation_matrix(polys: &[MultivariatePolynomial], sols: &[Vec<u64>]) -> Vec<Vec<Rational>> {
    sols.iter().map(|x| polys.iter().map(|g| eval_at(g, x)).collect()).collect()
}

/// A random polynomial of degree ≤ `max_deg` that vanishes on `sols`, if the
/// sampled monomials admit one.
pub fn random_member(rng: &mut ChaCha8Rng, names: &[String], sols: &[Vec<u64>], max_deg: u32) -> Option<MultivariatePolynomial> {
    let mut monos: Vec<Monomial> = (0..12).map(|_| random_monomial(rng, names.len(), max_deg)).collect();
    monos.sort();
    monos.dedup();
    VanishingSpace::from_monomials(names, sols, monos).random_member(rng)
}

/// At least `count` test polynomials: alternating sparse and vanishing ones.
pub fn test_polys(rng: &mut ChaCha8Rng, case: &Case, count: usize, max_deg: u32) -> Vec<MultivariatePolynomial> {
    let mut out = Vec::new();
    for i in 0..count {
        let f = if i % 2 == 1 { random_member(rng, &case.names, &case.solutions, max_deg) } else { None };
        out.push(f.unwrap_or_else(|| random_sparse(rng, &case.names, max_deg)));
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exponent vectors of total degree at most `d` in `n` variables.
pub fn all_monomials(n: usize, d: u32) -> Vec<Monomial> {
    if n == 0 {
        return vec![Monomial(Vec::new())];
    }
    let mut out = Vec::new();
    for e in 0..=d {
        for mut rest in all_monomials(n - 1, d - e) {
            rest.0.insert(0, e);
            out.push(rest);
        }
    }
    out
}

/// The polynomials of degree ≤ d vanishing on a solution set, described by a
/// row basis of the evaluation matrix over all monomials: `f` vanishes iff its
/// coefficient vector is orthogonal to every row.
pub struct VanishingSpace {
    names: Vec<String>,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    rows: Vec<(usize, Vec<Rational>)>,
    kernel: Vec<Vec<Rational>>,
}

impl VanishingSpace {
    pub fn new(names: &[String], sols: &[Vec<u64>], d: u32) -> Self {
        Self::from_monomials(names, sols, all_monomials(names.len(), d))
    }

    pub fn from_monomials(names: &[String], sols: &[Vec<u64>], monomials: Vec<Monomial>) -> Self {
        let cols = monomials.len();
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        let mut test = SpanTest::new(&rows, &pivots, cols);
        for x in sols {
            if rows.len() == cols {
                break;
            }
            let ints: Vec<i128> =
                monomials.iter().map(|m| m.exps().iter().zip(x).map(|(&e, &xi)| (xi as i128).pow(e)).product()).collect();
            if test.contains(&ints, &rows, &pivots) {
                continue;
            }
            rows.push(ints.iter().map(|&a| Rational::from_integer(a.into())).collect());
            pivots = rref(&mut rows, cols);
            rows.truncate(pivots.len());
            test = SpanTest::new(&rows, &pivots, cols);
        }
        let kernel = nullspace(&rows, cols);
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let rows = pivots.into_iter().zip(rows).collect();
        VanishingSpace { names: names.to_vec(), monomials, index, rows, kernel }
    }

    pub fn dimension(&self) -> usize {
        self.kernel.len()
    }

    pub fn vanishes(&self, f: &MultivariatePolynomial) -> bool {
        let mut c = vec![Rational::zero(); self.monomials.len()];
        for (m, q) in f.terms() {
            c[self.index[m]] = q.to_rational().expect("rational coefficient");
        }
        self.rows.iter().all(|(_, r)| r.iter().zip(&c).fold(Rational::zero(), |acc, (a, b)| acc + a * b).is_zero())
    }

    /// A random nonzero combination of a few kernel vectors, if any exist.
    pub fn random_member(&self, rng: &mut ChaCha8Rng) -> Option<MultivariatePolynomial> {
        if self.kernel.is_empty() {
            return None;
        }
        let mut coeffs = vec![Rational::zero(); self.monomials.len()];
        while coeffs.iter().all(|c| c.is_zero()) {
            for _ in 0..rng.gen_range(1..=4) {
                let v = self.kernel.choose(rng).expect("nonempty kernel");
                let w = rat(rng.gen_range(-3..=3));
                for (c, x) in coeffs.iter_mut().zip(v) {
                    *c += &w * x;
                }
            }
        }
        let terms: Vec<(Monomial, Rational)> =
            self.monomials.iter().cloned().zip(coeffs).filter(|(_, c)| !c.is_zero()).collect();
        Some(poly_from(&self.names, &terms))
    }
}

/// Membership test for the row space of a matrix in reduced echelon form: `v`
/// lies in it iff `v[c] = Σ_i v[p_i]·R[i][c]` for every non-pivot column c.
/// Each such equation is scaled to integers; overflow falls back to ℚ.
struct SpanTest {
    checks: Vec<(usize, Option<(i128, Vec<i128>)>)>,
}

impl SpanTest {
    fn new(rows: &[Vec<Rational>], pivots: &[usize], cols: usize) -> Self {
        let checks = (0..cols)
            .filter(|c| !pivots.contains(c))
            .map(|c| {
                let den = rows.iter().fold(num_bigint::BigInt::one(), |l, r| num_integer::Integer::lcm(&l, r[c].denom()));
                let scaled: Option<Vec<i128>> =
                    rows.iter().map(|r| i128::try_from(r[c].numer() * (&den / r[c].denom())).ok()).collect();
                (c, scaled.and_then(|s| Some((i128::try_from(den).ok()?, s))))
            })
            .collect();
        SpanTest { checks }
    }

    fn contains(&self, v: &[i128], rows: &[Vec<Rational>], pivots: &[usize]) -> bool {
        self.checks.iter().all(|(c, scaled)| {
            let fast = scaled.as_ref().and_then(|(den, coef)| {
                let mut acc: i128 = 0;
                for (&p, &n) in pivots.iter().zip(coef) {
                    acc = acc.checked_add(v[p].checked_mul(n)?)?;
                }
                Some(den.checked_mul(v[*c])? == acc)
            });
            fast.unwrap_or_else(|| {
                let lhs = Rational::from_integer(v[*c].into());
                let rhs = pivots
                    .iter()
                    .zip(rows)
                    .fold(Rational::zero(), |acc, (&p, r)| acc + Rational::from_integer(v[p].into()) * &r[*c]);
                lhs == rhs
            })
        })
    }
}
