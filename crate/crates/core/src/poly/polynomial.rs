use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::monomial::{Monomial, MonomialOrder};
use crate::arithmetic::{CyclotomicField, CyclotomicNumber, Rational};
use crate::error::{invalid, Error, Result};

/// Sparse polynomial over cyclotomic coefficients. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultivariatePolynomial {
    vars: Arc<Vec<String>>,
    terms: BTreeMap<Monomial, CyclotomicNumber>,
}

impl MultivariatePolynomial {
    pub fn zero(vars: Arc<Vec<String>>) -> Self {
        MultivariatePolynomial { vars, terms: BTreeMap::new() }
    }

    pub fn vars_from<S: AsRef<str>>(names: &[S]) -> Arc<Vec<String>> {
        Arc::new(names.iter().map(|s| s.as_ref().to_string()).collect())
    }

    pub fn constant(vars: Arc<Vec<String>>, c: CyclotomicNumber) -> Self {
        let n = vars.len();
        Self::monomial(vars, Monomial::one(n), c)
    }

    pub fn from_rational(vars: Arc<Vec<String>>, q: Rational) -> Self {
        Self::constant(vars, CyclotomicField::rationals().from_rational(q))
    }

    pub fn monomial(vars: Arc<Vec<String>>, m: Monomial, c: CyclotomicNumber) -> Self {
        assert_eq!(m.len(), vars.len(), "monomial length must match the variable count");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultivariatePolynomial { vars, terms }
    }

    /// The variable `vars[i]` with coefficient one.
    pub fn var(vars: Arc<Vec<String>>, i: usize) -> Self {
        let n = vars.len();
        Self::monomial(vars, Monomial::var(n, i, 1), CyclotomicField::rationals().one())
    }

    pub fn from_terms<I>(vars: Arc<Vec<String>>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, CyclotomicNumber)>,
    {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            if m.len() != p.vars.len() {
                return invalid("monomial length does not match the variable count");
            }
            p.add_term(m, &c);
        }
        Ok(p)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn vars_arc(&self) -> &Arc<Vec<String>> {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &CyclotomicNumber)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&CyclotomicNumber> {
        self.terms.get(m)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: &CyclotomicNumber) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &CyclotomicNumber)> {
        self.terms.iter().max_by(|a, b| order.key(a.0).cmp(&order.key(b.0)))
    }

    /// Terms sorted descending by `order`.
    pub fn sorted_terms(&self, order: &MonomialOrder) -> Vec<(&Monomial, &CyclotomicNumber)> {
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| order.key(b.0).cmp(&order.key(a.0)));
        ts
    }

    /// The constant value, if this polynomial is constant.
    pub fn as_constant(&self) -> Option<CyclotomicNumber> {
        match self.terms.len() {
            0 => Some(CyclotomicField::rationals().zero()),
            1 => {
                let (m, c) = self.terms.iter().next().expect("one term");
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Whether every coefficient is rational.
    pub fn is_rational(&self) -> bool {
        self.terms.values().all(|c| c.to_rational().is_some())
    }

    /// Smallest field containing every coefficient.
    pub fn coefficient_field(&self) -> Result<CyclotomicField> {
        let mut f = CyclotomicField::rationals();
        for c in self.terms.values() {
            f = f.union(c.field())?;
        }
        Ok(f)
    }

    /// Re-expresses every coefficient in `field`.
    pub fn embed_coefficients(&self, field: &CyclotomicField) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| Ok((m.clone(), c.embed(field)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(MultivariatePolynomial { vars: self.vars.clone(), terms })
    }

    pub fn scale(&self, c: &CyclotomicNumber) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars.clone());
        }
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect();
        MultivariatePolynomial { vars: self.vars.clone(), terms }
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        if num_traits::Zero::is_zero(q) {
            return Self::zero(self.vars.clone());
        }
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), a.scale(q))).collect();
        MultivariatePolynomial { vars: self.vars.clone(), terms }
    }

    /// `c·x^m·self`.
    pub fn mul_term(&self, m: &Monomial, c: &CyclotomicNumber) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars.clone());
        }
        let terms = self.terms.iter().map(|(a, b)| (a.mul(m), b * c)).collect();
        MultivariatePolynomial { vars: self.vars.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.vars.clone(), CyclotomicField::rationals().one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    fn check_vars(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variable lists: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    /// Same polynomial over a different variable list, matching by name.
    pub fn with_vars(&self, vars: Arc<Vec<String>>) -> Result<Self> {
        if vars == self.vars {
            return Ok(MultivariatePolynomial { vars, terms: self.terms.clone() });
        }
        let map: Vec<Option<usize>> = self.vars.iter().map(|v| vars.iter().position(|w| w == v)).collect();
        let mut out = Self::zero(vars.clone());
        for (m, c) in &self.terms {
            let mut e = vec![0u32; vars.len()];
            for (i, &k) in m.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => e[j] += k,
                    None => return invalid(format!("variable {:?} is not in the target variable list", self.vars[i])),
                }
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[CyclotomicNumber]) -> Result<CyclotomicNumber> {
        if point.len() != self.vars.len() {
            return invalid(format!("point has {} coordinates for {} variables", point.len(), self.vars.len()));
        }
        let mut acc = CyclotomicField::rationals().zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &x.pow(e as u64);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    pub fn evaluate_rational(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.vars.len() {
            return invalid(format!("point has {} coordinates for {} variables", point.len(), self.vars.len()));
        }
        let mut acc = Rational::from_integer(0.into());
        for (m, c) in &self.terms {
            let Some(mut t) = c.to_rational() else {
                return invalid("rational evaluation of a polynomial with irrational coefficients");
            };
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }
}

impl Add<&MultivariatePolynomial> for &MultivariatePolynomial {
    type Output = MultivariatePolynomial;
    fn add(self, rhs: &MultivariatePolynomial) -> MultivariatePolynomial {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Sub<&MultivariatePolynomial> for &MultivariatePolynomial {
    type Output = MultivariatePolynomial;
    fn sub(self, rhs: &MultivariatePolynomial) -> MultivariatePolynomial {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl Mul<&MultivariatePolynomial> for &MultivariatePolynomial {
    type Output = MultivariatePolynomial;
    fn mul(self, rhs: &MultivariatePolynomial) -> MultivariatePolynomial {
        self.check_vars(rhs);
        let mut out = MultivariatePolynomial::zero(self.vars.clone());
        for (a, c) in &self.terms {
            for (b, d) in &rhs.terms {
                out.add_term(a.mul(b), &(c * d));
            }
        }
        out
    }
}

impl Neg for &MultivariatePolynomial {
    type Output = MultivariatePolynomial;
    fn neg(self) -> MultivariatePolynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        MultivariatePolynomial { vars: self.vars.clone(), terms }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $method:ident) => {
        impl $tr<MultivariatePolynomial> for MultivariatePolynomial {
            type Output = MultivariatePolynomial;
            fn $method(self, rhs: MultivariatePolynomial) -> MultivariatePolynomial {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&MultivariatePolynomial> for MultivariatePolynomial {
            type Output = MultivariatePolynomial;
            fn $method(self, rhs: &MultivariatePolynomial) -> MultivariatePolynomial {
                (&self).$method(rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for MultivariatePolynomial {
    type Output = MultivariatePolynomial;
    fn neg(self) -> MultivariatePolynomial {
        -&self
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coef: CyclotomicNumber,
    exps: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    vars: Vec<String>,
    terms: Vec<TermRepr>,
}

impl Serialize for MultivariatePolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            vars: self.vars.as_ref().clone(),
            terms: self
                .sorted_terms(&MonomialOrder::grlex())
                .into_iter()
                .map(|(m, c)| TermRepr { coef: c.clone(), exps: m.0.clone() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultivariatePolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PolyRepr::deserialize(deserializer)?;
        let vars = Arc::new(repr.vars);
        MultivariatePolynomial::from_terms(vars, repr.terms.into_iter().map(|t| (Monomial(t.exps), t.coef)))
            .map_err(|e: Error| D::Error::custom(e.to_string()))
    }
}
