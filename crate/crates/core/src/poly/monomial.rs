use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Exponent vector over a declared variable list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize, e: u32) -> Self {
        let mut v = vec![0; n];
        v[i] = e;
        Monomial(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| a == 0 || b == 0)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(&a, &b)| a.max(b)).collect())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other`, if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        other.divides(self).then(|| Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Lex,
    Grlex,
}

/// A monomial order. Variables are ranked by `priority` (highest first);
/// an empty priority list means declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub priority: Vec<usize>,
}

impl MonomialOrder {
    pub fn lex() -> Self {
        MonomialOrder { kind: OrderKind::Lex, priority: Vec::new() }
    }

    pub fn grlex() -> Self {
        MonomialOrder { kind: OrderKind::Grlex, priority: Vec::new() }
    }

    pub fn with_priority(kind: OrderKind, priority: Vec<usize>) -> Result<Self> {
        let mut sorted = priority.clone();
        sorted.sort();
        if sorted.iter().enumerate().any(|(i, &v)| i != v) {
            return invalid("variable priority must be a permutation of the variable indices");
        }
        Ok(MonomialOrder { kind, priority })
    }

    /// A key whose lexicographic order is this monomial order.
    pub fn key(&self, m: &Monomial) -> Vec<u32> {
        let mut key = Vec::with_capacity(m.len() + 1);
        if self.kind == OrderKind::Grlex {
            key.push(m.degree());
        }
        if self.priority.is_empty() {
            key.extend_from_slice(&m.0);
        } else {
            key.extend(self.priority.iter().map(|&i| m.0[i]));
        }
        key
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Result<Ordering> {
        if a.len() != b.len() {
            return invalid(format!("comparing monomials over {} and {} variables", a.len(), b.len()));
        }
        if !self.priority.is_empty() && self.priority.len() != a.len() {
            return invalid("order priority list does not match the variable count");
        }
        Ok(self.key(a).cmp(&self.key(b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_examples() {
        let a = Monomial(vec![2, 1]);
        let b = Monomial(vec![1, 3]);
        assert_eq!(MonomialOrder::lex().compare(&a, &b).unwrap(), Ordering::Greater);
        assert_eq!(MonomialOrder::grlex().compare(&a, &b).unwrap(), Ordering::Less);
        assert_eq!(MonomialOrder::grlex().compare(&a, &a).unwrap(), Ordering::Equal);
        assert!(MonomialOrder::lex().compare(&a, &Monomial(vec![1])).is_err());
        let rev = MonomialOrder::with_priority(OrderKind::Lex, vec![1, 0]).unwrap();
        assert_eq!(rev.compare(&a, &b).unwrap(), Ordering::Less);
    }

    #[test]
    fn divisibility() {
        let a = Monomial(vec![1, 0, 2]);
        let b = Monomial(vec![2, 1, 2]);
        assert!(a.divides(&b));
        assert_eq!(b.div(&a), Some(Monomial(vec![1, 1, 0])));
        assert_eq!(a.div(&b), None);
        assert_eq!(a.lcm(&Monomial(vec![0, 3, 1])), Monomial(vec![1, 3, 2]));
        assert!(Monomial(vec![1, 0]).is_coprime(&Monomial(vec![0, 2])));
    }
}
