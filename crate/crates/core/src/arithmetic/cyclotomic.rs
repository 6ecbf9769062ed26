//! Exact arithmetic in the compositum `Q(ω_{p_1^{m_1}}, …, ω_{p_s^{m_s}})`.
//!
//! For distinct primes the compositum is the tensor product
//! `Q[t_1,…,t_s] / (Φ_{p_1^{m_1}}(t_1), …, Φ_{p_s^{m_s}}(t_s))`, so an element
//! is a rational combination of monomials `t_1^{e_1}⋯t_s^{e_s}` with
//! `0 <= e_i < φ(p_i^{m_i})`. Coefficients are kept in a sorted sparse list
//! indexed by the mixed-radix encoding of the exponent vector; every stored
//! coefficient is nonzero, which makes the representation canonical.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::modint::PrimePower;
use super::qlinear;
use super::rational::{format_rational, Rational};
use crate::error::{invalid, Error, Result};

/// Largest tensor dimension `∏ φ(p_i^{m_i})` accepted for a field.
pub const MAX_FIELD_DIM: usize = 1 << 16;

const MUL_TABLE_MAX_DIM: usize = 256;

/// Coefficients of `Φ_{p^m}(t) = Σ_{j<p} t^{j·p^{m-1}}`, constant term first.
pub fn cyclotomic_modulus(p: u64, m: u32) -> Result<Vec<i64>> {
    let s = PrimePower::new(p, m)?;
    let step = s.p_pow(m - 1) as usize;
    let mut coeffs = vec![0i64; s.totient() as usize + 1];
    for j in 0..p as usize {
        coeffs[j * step] = 1;
    }
    Ok(coeffs)
}

type Expansion = Vec<(u32, bool)>;

#[derive(Debug)]
struct FieldTables {
    sorts: Vec<PrimePower>,
    strides: Vec<u32>,
    dim: usize,
    /// `reductions[s][e]` for `0 <= e < p^m`: `t^e` written in the basis of
    /// sort `s`, each entry `(exponent, negated)`.
    reductions: Vec<Vec<Expansion>>,
    decoded: Vec<Vec<u32>>,
    mul_table: Option<Vec<Expansion>>,
}

impl FieldTables {
    fn build(sorts: Vec<PrimePower>) -> Result<FieldTables> {
        for w in sorts.windows(2) {
            if w[0].p >= w[1].p {
                return invalid("cyclotomic sorts must have distinct primes in ascending order");
            }
        }
        let phis: Vec<u32> = sorts.iter().map(|s| s.totient() as u32).collect();
        let mut dim = 1usize;
        for &f in &phis {
            dim = dim.saturating_mul(f as usize);
        }
        if dim > MAX_FIELD_DIM {
            return invalid(format!("cyclotomic field of dimension {dim} is too large"));
        }
        let mut strides = vec![0u32; sorts.len()];
        let mut acc = 1u32;
        for i in (0..sorts.len()).rev() {
            strides[i] = acc;
            acc *= phis[i];
        }
        let reductions = sorts
            .iter()
            .map(|s| {
                let q = s.modulus() as u32;
                let phi = s.totient() as u32;
                let step = s.p_pow(s.m - 1) as u32;
                (0..q)
                    .map(|e| {
                        if e < phi {
                            vec![(e, false)]
                        } else {
                            // t^{φ + r} = -Σ_{j=0}^{p-2} t^{r + j p^{m-1}}
                            let r = e - phi;
                            (0..(s.p as u32 - 1)).map(|j| (r + j * step, true)).collect()
                        }
                    })
                    .collect()
            })
            .collect();
        let decoded = (0..dim)
            .map(|idx| {
                sorts
                    .iter()
                    .enumerate()
                    .map(|(i, _)| (idx as u32 / strides[i]) % phis[i])
                    .collect()
            })
            .collect();
        let mut tables = FieldTables { sorts, strides, dim, reductions, decoded, mul_table: None };
        if dim <= MUL_TABLE_MAX_DIM {
            let mut table = Vec::with_capacity(dim * dim);
            for i in 0..dim {
                for j in 0..dim {
                    let sum: Vec<u64> = (0..tables.sorts.len())
                        .map(|s| (tables.decoded[i][s] + tables.decoded[j][s]) as u64)
                        .collect();
                    table.push(tables.expand(&sum));
                }
            }
            tables.mul_table = Some(table);
        }
        Ok(tables)
    }

    /// Expands `∏ t_s^{exps[s]}` (arbitrary nonnegative exponents) in the basis.
    fn expand(&self, exps: &[u64]) -> Expansion {
        let mut out: Expansion = vec![(0, false)];
        for (s, &e) in exps.iter().enumerate() {
            let q = self.sorts[s].modulus();
            let red = &self.reductions[s][(e % q) as usize];
            if red.len() == 1 {
                let (ex, neg) = red[0];
                for t in out.iter_mut() {
                    t.0 += ex * self.strides[s];
                    t.1 ^= neg;
                }
            } else {
                let mut next = Vec::with_capacity(out.len() * red.len());
                for &(idx, sign) in &out {
                    for &(ex, neg) in red {
                        next.push((idx + ex * self.strides[s], sign ^ neg));
                    }
                }
                out = next;
            }
        }
        out
    }

    fn product_of_basis(&self, i: u32, j: u32) -> std::borrow::Cow<'_, Expansion> {
        match &self.mul_table {
            Some(t) => std::borrow::Cow::Borrowed(&t[i as usize * self.dim + j as usize]),
            None => {
                let sum: Vec<u64> = (0..self.sorts.len())
                    .map(|s| (self.decoded[i as usize][s] + self.decoded[j as usize][s]) as u64)
                    .collect();
                std::borrow::Cow::Owned(self.expand(&sum))
            }
        }
    }
}

/// A compositum of prime-power cyclotomic fields; cheap to clone.
#[derive(Clone, Debug)]
pub struct CyclotomicField(Arc<FieldTables>);

impl PartialEq for CyclotomicField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.sorts == other.0.sorts
    }
}

impl Eq for CyclotomicField {}

impl CyclotomicField {
    /// Field generated by roots of unity of the given orders. Sorts are
    /// sorted; repeated primes are merged to the larger exponent.
    pub fn new(sorts: &[PrimePower]) -> Result<Self> {
        let mut sorted = sorts.to_vec();
        sorted.sort();
        let mut merged: Vec<PrimePower> = Vec::new();
        for s in sorted {
            match merged.last_mut() {
                Some(last) if last.p == s.p => last.m = last.m.max(s.m),
                _ => merged.push(s),
            }
        }
        Ok(CyclotomicField(Arc::new(FieldTables::build(merged)?)))
    }

    pub fn rationals() -> Self {
        CyclotomicField::new(&[]).expect("the rational field is always valid")
    }

    pub fn sorts(&self) -> &[PrimePower] {
        &self.0.sorts
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn sort_index(&self, p: u64) -> Option<usize> {
        self.0.sorts.iter().position(|s| s.p == p)
    }

    /// Whether every sort of `other` embeds into this field.
    pub fn contains(&self, other: &CyclotomicField) -> bool {
        other
            .sorts()
            .iter()
            .all(|s| self.sorts().iter().any(|t| t.p == s.p && t.m >= s.m))
    }

    pub fn union(&self, other: &CyclotomicField) -> Result<CyclotomicField> {
        if self.contains(other) {
            return Ok(self.clone());
        }
        if other.contains(self) {
            return Ok(other.clone());
        }
        let mut sorts = self.sorts().to_vec();
        sorts.extend_from_slice(other.sorts());
        CyclotomicField::new(&sorts)
    }

    pub fn zero(&self) -> CyclotomicNumber {
        CyclotomicNumber { field: self.clone(), terms: Vec::new() }
    }

    pub fn one(&self) -> CyclotomicNumber {
        self.from_rational(Rational::one())
    }

    pub fn from_rational(&self, q: Rational) -> CyclotomicNumber {
        let terms = if q.is_zero() { Vec::new() } else { vec![(0, q)] };
        CyclotomicNumber { field: self.clone(), terms }
    }

    pub fn from_int(&self, n: i64) -> CyclotomicNumber {
        self.from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `ω_{p^m}^a` for a sort of this field (or a sort `(p, k)` with `k <= m`,
    /// which is read as `ω_{p^m}^{a·p^{m-k}}`).
    pub fn omega_power(&self, sort: PrimePower, a: i128) -> Result<CyclotomicNumber> {
        let Some(s) = self.sort_index(sort.p) else {
            return invalid(format!("sort {sort} is not part of this cyclotomic field"));
        };
        let own = self.0.sorts[s];
        if own.m < sort.m {
            return invalid(format!("sort {sort} is not part of this cyclotomic field"));
        }
        let scale = own.p_pow(own.m - sort.m) as i128;
        let e = sort.reduce(a) as i128 * scale;
        let mut exps = vec![0u64; self.0.sorts.len()];
        exps[s] = own.reduce(e);
        Ok(self.from_expansion(&self.0.expand(&exps), &Rational::one()))
    }

    /// Builds an element from arbitrary (unreduced) exponent vectors.
    pub fn from_terms<I>(&self, terms: I) -> Result<CyclotomicNumber>
    where
        I: IntoIterator<Item = (Vec<u64>, Rational)>,
    {
        let mut acc = Accumulator::new(self.dim());
        for (exps, c) in terms {
            if exps.len() != self.0.sorts.len() {
                return invalid("exponent vector length does not match the field sorts");
            }
            for (idx, neg) in self.0.expand(&exps) {
                acc.add(idx, &c, neg);
            }
        }
        Ok(acc.finish(self))
    }

    fn from_expansion(&self, exp: &Expansion, c: &Rational) -> CyclotomicNumber {
        let mut acc = Accumulator::new(self.dim());
        for &(idx, neg) in exp {
            acc.add(idx, c, neg);
        }
        acc.finish(self)
    }
}

struct Accumulator {
    dense: Vec<Rational>,
    touched: Vec<u32>,
}

impl Accumulator {
    fn new(dim: usize) -> Self {
        Accumulator { dense: vec![Rational::zero(); dim], touched: Vec::new() }
    }

    fn add(&mut self, idx: u32, c: &Rational, neg: bool) {
        let slot = &mut self.dense[idx as usize];
        if slot.is_zero() {
            self.touched.push(idx);
        }
        if neg {
            *slot -= c;
        } else {
            *slot += c;
        }
    }

    fn finish(mut self, field: &CyclotomicField) -> CyclotomicNumber {
        self.touched.sort_unstable();
        self.touched.dedup();
        let terms = self
            .touched
            .into_iter()
            .filter_map(|i| {
                let v = std::mem::take(&mut self.dense[i as usize]);
                (!v.is_zero()).then_some((i, v))
            })
            .collect();
        CyclotomicNumber { field: field.clone(), terms }
    }
}

/// An exact element of a [`CyclotomicField`].
#[derive(Clone, Debug)]
pub struct CyclotomicNumber {
    field: CyclotomicField,
    terms: Vec<(u32, Rational)>,
}

impl CyclotomicNumber {
    pub fn field(&self) -> &CyclotomicField {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Nonzero coefficients with their exponent vectors, in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<u32>, &Rational)> + '_ {
        self.terms
            .iter()
            .map(move |(idx, c)| (self.field.0.decoded[*idx as usize].clone(), c))
    }

    /// Coordinates in the tensor basis (dense, length `field.dim()`).
    pub fn coordinates(&self) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.field.dim()];
        for (idx, c) in &self.terms {
            v[*idx as usize] = c.clone();
        }
        v
    }

    pub fn to_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    /// Re-expresses this element in a field containing its own.
    pub fn embed(&self, target: &CyclotomicField) -> Result<CyclotomicNumber> {
        if &self.field == target {
            return Ok(self.clone());
        }
        if !target.contains(&self.field) {
            return invalid("target field does not contain the element's field");
        }
        if self.field.dim() == 1 {
            return Ok(CyclotomicNumber { field: target.clone(), terms: self.terms.clone() });
        }
        let src = &self.field.0;
        let mut acc = Accumulator::new(target.dim());
        for (idx, c) in &self.terms {
            let mut exps = vec![0u64; target.0.sorts.len()];
            for (s, sort) in src.sorts.iter().enumerate() {
                let t = target.sort_index(sort.p).expect("checked by contains");
                let tm = target.0.sorts[t].m;
                exps[t] = src.decoded[*idx as usize][s] as u64 * sort.p.pow(tm - sort.m);
            }
            for (k, neg) in target.0.expand(&exps) {
                acc.add(k, c, neg);
            }
        }
        Ok(acc.finish(target))
    }

    fn unify(a: &CyclotomicNumber, b: &CyclotomicNumber) -> (CyclotomicNumber, CyclotomicNumber) {
        let field = a.field.union(&b.field).expect("union of valid cyclotomic fields");
        (a.embed(&field).expect("union contains a"), b.embed(&field).expect("union contains b"))
    }

    pub fn scale(&self, q: &Rational) -> CyclotomicNumber {
        if q.is_zero() {
            return self.field.zero();
        }
        CyclotomicNumber {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(i, c)| (*i, c * q)).collect(),
        }
    }

    fn add_impl(&self, other: &CyclotomicNumber, negate_other: bool) -> CyclotomicNumber {
        if self.field != other.field && !(self.field.dim() == 1 || other.field.dim() == 1) {
            let (a, b) = Self::unify(self, other);
            return a.add_impl(&b, negate_other);
        }
        let field = if self.field.dim() >= other.field.dim() { &self.field } else { &other.field };
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ka = self.terms.get(i).map(|t| t.0);
            let kb = other.terms.get(j).map(|t| t.0);
            match (ka, kb) {
                (Some(x), Some(y)) if x == y => {
                    let v = if negate_other {
                        &self.terms[i].1 - &other.terms[j].1
                    } else {
                        &self.terms[i].1 + &other.terms[j].1
                    };
                    if !v.is_zero() {
                        terms.push((x, v));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
                (Some(_), None) => {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
                (_, Some(y)) => {
                    let c = &other.terms[j].1;
                    terms.push((y, if negate_other { -c.clone() } else { c.clone() }));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        CyclotomicNumber { field: field.clone(), terms }
    }

    fn mul_impl(&self, other: &CyclotomicNumber) -> CyclotomicNumber {
        if let Some(q) = other.to_rational() {
            return self.scale(&q);
        }
        if let Some(q) = self.to_rational() {
            return other.scale(&q);
        }
        if self.field != other.field {
            let (a, b) = Self::unify(self, other);
            return a.mul_impl(&b);
        }
        let tables = &self.field.0;
        let mut acc = Accumulator::new(tables.dim);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                let prod = a * b;
                for &(k, neg) in tables.product_of_basis(*i, *j).iter() {
                    acc.add(k, &prod, neg);
                }
            }
        }
        acc.finish(&self.field)
    }

    pub fn pow(&self, mut e: u64) -> CyclotomicNumber {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse, found by solving the rational linear system
    /// `(multiplication by self) · b = 1` in the tensor basis.
    pub fn inverse(&self) -> Result<CyclotomicNumber> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.to_rational() {
            return Ok(self.field.from_rational(q.recip()));
        }
        let dim = self.field.dim();
        let mut matrix = vec![vec![Rational::zero(); dim]; dim];
        for j in 0..dim {
            let basis = CyclotomicNumber { field: self.field.clone(), terms: vec![(j as u32, Rational::one())] };
            for (i, c) in (self * &basis).terms {
                matrix[i as usize][j] = c;
            }
        }
        let mut rhs = vec![Rational::zero(); dim];
        rhs[0] = Rational::one();
        let sol = qlinear::solve(&matrix, &rhs, dim)
            .ok_or_else(|| Error::Internal("multiplication matrix of a nonzero element is singular".into()))?;
        let terms = sol
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as u32, c))
            .collect();
        Ok(CyclotomicNumber { field: self.field.clone(), terms })
    }
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.field == other.field {
            return self.terms == other.terms;
        }
        if self.terms.is_empty() || other.terms.is_empty() {
            return self.terms.is_empty() && other.terms.is_empty();
        }
        let (a, b) = Self::unify(self, other);
        a.terms == b.terms
    }
}

impl Eq for CyclotomicNumber {}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&CyclotomicNumber> for &CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $method(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
                let f: fn(&CyclotomicNumber, &CyclotomicNumber) -> CyclotomicNumber = $body;
                f(self, rhs)
            }
        }
        impl $tr<CyclotomicNumber> for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $method(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CyclotomicNumber> for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $method(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_impl(b, false));
forward_binop!(Sub, sub, |a, b| a.add_impl(b, true));
forward_binop!(Mul, mul, |a, b| a.mul_impl(b));

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(i, c)| (*i, -c.clone())).collect(),
        }
    }
}

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        -&self
    }
}

impl fmt::Display for CyclotomicNumber {
    /// Text form: rational coefficients times powers of `w<q>`, the
    /// primitive `q`-th root of unity of each sort.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let sorts = self.field.sorts();
        for (n, (exps, c)) in self.terms().enumerate() {
            let mut atoms = Vec::new();
            for (s, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => atoms.push(format!("w{}", sorts[s].modulus())),
                    _ => atoms.push(format!("w{}^{}", sorts[s].modulus(), e)),
                }
            }
            let negative = c < &Rational::zero();
            let mag = if negative { -c.clone() } else { c.clone() };
            if n == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            if atoms.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", atoms.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), atoms.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exps: Vec<u64>,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct NumberRepr {
    terms: Vec<TermRepr>,
    sorts: Vec<PrimePower>,
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        NumberRepr {
            terms: self
                .terms()
                .map(|(exps, c)| TermRepr {
                    exps: exps.into_iter().map(u64::from).collect(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
            sorts: self.field.sorts().to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CyclotomicNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = NumberRepr::deserialize(deserializer)?;
        let field = CyclotomicField::new(&repr.sorts).map_err(D::Error::custom)?;
        let terms = repr
            .terms
            .into_iter()
            .map(|t| {
                let num: BigInt = t.num.parse().map_err(|_| D::Error::custom("bad numerator"))?;
                let den: BigInt = t.den.parse().map_err(|_| D::Error::custom("bad denominator"))?;
                if den.is_zero() {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok((t.exps, Rational::new(num, den)))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        field.from_terms(terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::rational::{int, rat};

    fn pp(p: u64, m: u32) -> PrimePower {
        PrimePower::new(p, m).unwrap()
    }

    #[test]
    fn cyclotomic_moduli() {
        assert_eq!(cyclotomic_modulus(2, 1).unwrap(), vec![1, 1]);
        assert_eq!(cyclotomic_modulus(2, 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(cyclotomic_modulus(3, 1).unwrap(), vec![1, 1, 1]);
        assert_eq!(cyclotomic_modulus(3, 2).unwrap(), vec![1, 0, 0, 1, 0, 0, 1]);
        assert!(cyclotomic_modulus(6, 1).is_err());
    }

    #[test]
    fn small_identities() {
        let f = CyclotomicField::new(&[pp(2, 2), pp(3, 1)]).unwrap();
        let i = f.omega_power(pp(2, 2), 1).unwrap();
        assert_eq!(&i * &i, f.from_int(-1));
        let w = f.omega_power(pp(3, 1), 1).unwrap();
        let one = f.one();
        assert_eq!((&one + &w) * (&one + &w.pow(2)), one);
        let a = &i + &w;
        assert_eq!(&a + &f.zero(), a);
    }

    #[test]
    fn omega_power_examples() {
        let f = CyclotomicField::new(&[pp(2, 2)]).unwrap();
        assert_eq!(f.omega_power(pp(2, 1), 1).unwrap(), f.from_int(-1));
        assert_eq!(f.omega_power(pp(2, 2), 2).unwrap(), f.from_int(-1));
        assert_eq!(f.omega_power(pp(2, 2), 5).unwrap(), f.omega_power(pp(2, 2), 1).unwrap());
        assert!(f.omega_power(pp(3, 1), 1).is_err());
    }

    #[test]
    fn inverses() {
        let f = CyclotomicField::new(&[pp(3, 1)]).unwrap();
        let w = f.omega_power(pp(3, 1), 1).unwrap();
        assert_eq!(w.inverse().unwrap(), f.omega_power(pp(3, 1), 2).unwrap());
        assert_eq!(f.from_int(2).inverse().unwrap(), f.from_rational(rat(1, 2)));
        // 1 + ω₃ = -ω₃², so its inverse is -ω₃
        let a = &f.one() + &w;
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_one());
        assert_eq!(inv, -w.clone());
        assert_eq!(f.zero().inverse(), Err(Error::DivisionByZero));
    }

    #[test]
    fn mixed_signature_unification() {
        let f4 = CyclotomicField::new(&[pp(2, 2)]).unwrap();
        let f3 = CyclotomicField::new(&[pp(3, 1)]).unwrap();
        let f2 = CyclotomicField::new(&[pp(2, 1)]).unwrap();
        let i = f4.omega_power(pp(2, 2), 1).unwrap();
        let w = f3.omega_power(pp(3, 1), 1).unwrap();
        let prod = &i * &w;
        assert_eq!(prod.field().sorts(), &[pp(2, 2), pp(3, 1)]);
        // ω_2 = -1 embeds as ω_4^2
        let m1 = f2.omega_power(pp(2, 1), 1).unwrap();
        assert_eq!(m1.to_rational(), Some(int(-1)));
        assert_eq!(&i * &i, m1);
    }

    #[test]
    fn serde_roundtrip_and_text() {
        let f = CyclotomicField::new(&[pp(2, 2), pp(3, 1)]).unwrap();
        let x = &f.omega_power(pp(2, 2), 1).unwrap().scale(&rat(3, 2)) - &f.from_int(1);
        let js = serde_json::to_string(&x).unwrap();
        assert_eq!(
            js,
            r#"{"terms":[{"exps":[0,0],"num":"-1","den":"1"},{"exps":[1,0],"num":"3","den":"2"}],"sorts":[[2,2],[3,1]]}"#
        );
        let back: CyclotomicNumber = serde_json::from_str(&js).unwrap();
        assert_eq!(back, x);
        assert_eq!(x.to_string(), "-1 + 3/2*w4");
    }
}
