//! Linear algebra over `Z_{p^m}` via the Howell normal form.

use serde::Serialize;

use crate::arithmetic::{ModInt, PrimePower};
use crate::error::{invalid, Result};

/// Dense matrix over `Z_{p^m}`; every entry is kept reduced into `[0, p^m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ZpmMatrix {
    #[serde(rename = "mod")]
    modulus: PrimePower,
    cols: usize,
    rows: Vec<Vec<u64>>,
}

impl ZpmMatrix {
    pub fn new(modulus: PrimePower, cols: usize, rows: Vec<Vec<i128>>) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return invalid(format!("row {i} has {} entries, expected {cols}", r.len()));
            }
            out.push(r.into_iter().map(|v| modulus.reduce(v)).collect());
        }
        Ok(ZpmMatrix { modulus, cols, rows: out })
    }

    pub(crate) fn from_reduced(modulus: PrimePower, cols: usize, rows: Vec<Vec<u64>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        ZpmMatrix { modulus, cols, rows }
    }

    pub fn identity(modulus: PrimePower, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
            .collect();
        ZpmMatrix { modulus, cols: n, rows }
    }

    pub fn empty(modulus: PrimePower, cols: usize) -> Self {
        ZpmMatrix { modulus, cols, rows: Vec::new() }
    }

    pub fn modulus(&self) -> PrimePower {
        self.modulus
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> ModInt {
        ModInt::new(self.rows[i][j] as i128, self.modulus)
    }

    pub fn transpose(&self) -> ZpmMatrix {
        let rows = (0..self.cols)
            .map(|j| self.rows.iter().map(|r| r[j]).collect())
            .collect();
        ZpmMatrix { modulus: self.modulus, cols: self.rows.len(), rows }
    }

    pub fn mul_vec(&self, x: &[u64]) -> Result<Vec<u64>> {
        if x.len() != self.cols {
            return invalid(format!("vector of length {} for a matrix with {} columns", x.len(), self.cols));
        }
        Ok(self.rows.iter().map(|r| dot(self.modulus, r, x)).collect())
    }

    /// Stacks the rows of `other` below these rows.
    pub fn stack(&self, other: &ZpmMatrix) -> Result<ZpmMatrix> {
        if self.modulus != other.modulus || self.cols != other.cols {
            return invalid("stacked matrices must share modulus and column count");
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(ZpmMatrix { modulus: self.modulus, cols: self.cols, rows })
    }

    /// Whether `x` lies in the row span (as a subgroup of `Z_{p^m}^cols`).
    pub fn row_span_contains(&self, x: &[u64]) -> bool {
        let h = canonical_form(self);
        reduce_by_howell(&h, x).iter().all(|&v| v == 0)
    }
}

pub(crate) fn dot(s: PrimePower, a: &[u64], b: &[u64]) -> u64 {
    let q = s.modulus() as u128;
    (a.iter().zip(b).map(|(&x, &y)| x as u128 * y as u128 % q).sum::<u128>() % q) as u64
}

fn axpy(s: PrimePower, target: &mut [u64], t: u64, row: &[u64]) {
    // target -= t * row
    if t == 0 {
        return;
    }
    for (a, &b) in target.iter_mut().zip(row) {
        *a = s.sub(*a, s.mul(t, b));
    }
}

fn scale(s: PrimePower, row: &mut [u64], t: u64) {
    for a in row.iter_mut() {
        *a = s.mul(*a, t);
    }
}

/// Howell form of `rows` restricted to the first `sweep` columns; the
/// remaining columns ride along under the same row operations. Returns the
/// surviving rows and their pivot columns.
fn howell(s: PrimePower, mut pool: Vec<Vec<u64>>, sweep: usize) -> (Vec<Vec<u64>>, Vec<usize>) {
    let nonzero = |r: &Vec<u64>| r[..sweep].iter().any(|&v| v != 0);
    pool.retain(nonzero);
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut pivots = Vec::new();
    for c in 0..sweep {
        let best = pool
            .iter()
            .enumerate()
            .filter(|(_, r)| r[c] != 0)
            .min_by_key(|(i, r)| (s.valuation(r[c]), *i))
            .map(|(i, _)| i);
        let Some(idx) = best else { continue };
        let mut pivot = pool.remove(idx);
        let v = s.valuation(pivot[c]);
        let pv = s.p_pow(v);
        let unit = pivot[c] / pv;
        scale(s, &mut pivot, s.inverse(unit).expect("unit part is invertible"));
        for r in pool.iter_mut() {
            if r[c] != 0 {
                let t = r[c] / pv;
                axpy(s, r, t, &pivot);
            }
        }
        if v > 0 {
            let mut extra = pivot.clone();
            scale(s, &mut extra, s.p_pow(s.m - v));
            pool.push(extra);
        }
        pool.retain(nonzero);
        out.push(pivot);
        pivots.push(c);
    }
    for i in 0..out.len() {
        let c = pivots[i];
        let pv = out[i][c];
        let (above, rest) = out.split_at_mut(i);
        for r in above.iter_mut() {
            let t = r[c] / pv;
            axpy(s, r, t, &rest[0]);
        }
    }
    (out, pivots)
}

fn pivot_of(row: &[u64]) -> usize {
    row.iter().position(|&v| v != 0).expect("Howell rows are nonzero")
}

fn reduce_by_howell(h: &ZpmMatrix, x: &[u64]) -> Vec<u64> {
    let s = h.modulus;
    let mut x: Vec<u64> = x.iter().map(|&v| v % s.modulus()).collect();
    for r in &h.rows {
        let c = pivot_of(r);
        if x[c].is_multiple_of(r[c]) {
            let t = x[c] / r[c];
            axpy(s, &mut x, t, r);
        } else {
            return x;
        }
    }
    x
}

/// The Howell normal form: a function of the row span only.
pub fn canonical_form(m: &ZpmMatrix) -> ZpmMatrix {
    let (rows, _) = howell(m.modulus, m.rows.clone(), m.cols);
    ZpmMatrix { modulus: m.modulus, cols: m.cols, rows }
}

/// Row combination `λ` with `λ·H ≡ 0` and `λ·b ≡ c ≢ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnsatWitness {
    pub modulus: PrimePower,
    pub combination: Vec<u64>,
    pub contradiction: u64,
}

impl UnsatWitness {
    /// Recomputes `λ·(H|b)` and checks that it reads `0 … 0 | c` with `c ≠ 0`.
    pub fn verify(&self, h: &ZpmMatrix, b: &[u64]) -> bool {
        if self.combination.len() != h.num_rows() || b.len() != h.num_rows() || h.modulus != self.modulus {
            return false;
        }
        let ht = h.transpose();
        let lhs_zero = ht.rows.iter().all(|col| dot(self.modulus, col, &self.combination) == 0);
        let c = dot(self.modulus, b, &self.combination);
        lhs_zero && c == self.contradiction && c != 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CongruenceSolution {
    Solution(Vec<u64>),
    Unsat(UnsatWitness),
}

/// Solves `H x ≡ b`. Free coordinates are set to zero.
pub fn solve_congruences(h: &ZpmMatrix, b: &[i128]) -> Result<CongruenceSolution> {
    let s = h.modulus;
    let r = h.num_rows();
    let n = h.cols;
    if b.len() != r {
        return invalid(format!("right-hand side has {} entries for {r} congruences", b.len()));
    }
    let b: Vec<u64> = b.iter().map(|&v| s.reduce(v)).collect();
    let aug: Vec<Vec<u64>> = (0..r)
        .map(|i| {
            let mut row = h.rows[i].clone();
            row.push(b[i]);
            row.extend((0..r).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    let (rows, pivots) = howell(s, aug, n + 1);
    if let Some(k) = pivots.iter().position(|&c| c == n) {
        let witness = UnsatWitness {
            modulus: s,
            combination: rows[k][n + 1..].to_vec(),
            contradiction: rows[k][n],
        };
        return Ok(CongruenceSolution::Unsat(witness));
    }
    let mut x = vec![0u64; n];
    for (row, &c) in rows.iter().zip(&pivots).rev() {
        let partial = dot(s, &row[c + 1..n], &x[c + 1..]);
        let t = s.sub(row[n], partial);
        if !t.is_multiple_of(row[c]) {
            return Err(crate::Error::Internal("Howell back substitution hit a non-divisible entry".into()));
        }
        x[c] = t / row[c];
    }
    if h.mul_vec(&x)? != b {
        return Err(crate::Error::Internal("congruence solution failed verification".into()));
    }
    Ok(CongruenceSolution::Solution(x))
}

/// A subgroup of `Z_{p^m}^arity` given by generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SubgroupDescription {
    pub modulus: PrimePower,
    pub arity: usize,
    pub generators: Vec<Vec<u64>>,
}

impl SubgroupDescription {
    pub fn new(modulus: PrimePower, arity: usize, generators: Vec<Vec<i128>>) -> Result<Self> {
        let m = ZpmMatrix::new(modulus, arity, generators)?;
        Ok(SubgroupDescription { modulus, arity, generators: m.rows })
    }

    pub fn trivial(modulus: PrimePower, arity: usize) -> Self {
        SubgroupDescription { modulus, arity, generators: Vec::new() }
    }

    pub fn full(modulus: PrimePower, arity: usize) -> Self {
        SubgroupDescription { modulus, arity, generators: ZpmMatrix::identity(modulus, arity).rows }
    }

    pub fn generator_matrix(&self) -> ZpmMatrix {
        ZpmMatrix::from_reduced(self.modulus, self.arity, self.generators.clone())
    }

    /// Canonical generator matrix (Howell form); equal subgroups give equal forms.
    pub fn canonical(&self) -> ZpmMatrix {
        canonical_form(&self.generator_matrix())
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        x.len() == self.arity && self.generator_matrix().row_span_contains(x)
    }

    /// `log_p` of the subgroup order, read off the Howell form.
    pub fn order_log(&self) -> u32 {
        self.canonical().rows.iter().map(|r| self.modulus.m - self.modulus.valuation(r[pivot_of(r)])).sum()
    }

    /// All elements, in lexicographic order. Refuses groups larger than `cap`.
    pub fn expand(&self, cap: u64) -> Result<Vec<Vec<u64>>> {
        let log = self.order_log();
        match self.modulus.p.checked_pow(log) {
            Some(n) if n <= cap => {}
            _ => {
                return Err(crate::Error::GuardRefusal { what: "subgroup expansion".into(), bound: cap });
            }
        }
        let h = self.canonical();
        let s = self.modulus;
        let mut elems = vec![vec![0u64; self.arity]];
        for r in &h.rows {
            let ord = s.p_pow(s.m - s.valuation(r[pivot_of(r)]));
            let mut next = Vec::with_capacity(elems.len() * ord as usize);
            for e in &elems {
                let mut cur = e.clone();
                for _ in 0..ord {
                    next.push(cur.clone());
                    for (a, &b) in cur.iter_mut().zip(r) {
                        *a = s.add(*a, b);
                    }
                }
            }
            elems = next;
        }
        elems.sort();
        Ok(elems)
    }
}

/// Generators of `{x : H x ≡ 0}`, with redundant generators removed.
pub fn kernel_generators(h: &ZpmMatrix) -> SubgroupDescription {
    let s = h.modulus;
    let n = h.cols;
    let r = h.num_rows();
    let ht = h.transpose();
    let aug: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut row = ht.rows[i].clone();
            row.extend((0..n).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    let (rows, _) = howell(s, aug, r + n);
    let gens: Vec<Vec<u64>> = rows
        .into_iter()
        .filter(|row| row[..r].iter().all(|&v| v == 0))
        .map(|row| row[r..].to_vec())
        .collect();
    SubgroupDescription { modulus: s, arity: n, generators: prune_generators(s, n, gens) }
}

fn prune_generators(s: PrimePower, n: usize, mut gens: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    let target = canonical_form(&ZpmMatrix::from_reduced(s, n, gens.clone()));
    let mut i = gens.len();
    while i > 0 {
        i -= 1;
        let mut trial = gens.clone();
        trial.remove(i);
        if canonical_form(&ZpmMatrix::from_reduced(s, n, trial.clone())) == target {
            gens = trial;
        }
    }
    gens
}

/// A matrix whose kernel is exactly the subgroup generated by `sub`.
pub fn annihilator(sub: &SubgroupDescription) -> ZpmMatrix {
    let k = kernel_generators(&sub.generator_matrix());
    canonical_form(&k.generator_matrix())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64, m: u32) -> PrimePower {
        PrimePower::new(p, m).unwrap()
    }

    fn mat(s: PrimePower, rows: &[&[i128]]) -> ZpmMatrix {
        ZpmMatrix::new(s, rows[0].len(), rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn canonical_form_examples() {
        let z4 = z(2, 2);
        assert_eq!(canonical_form(&ZpmMatrix::identity(z4, 3)), ZpmMatrix::identity(z4, 3));
        assert_eq!(canonical_form(&mat(z4, &[&[2], &[2]])).rows, vec![vec![2]]);
        assert_eq!(canonical_form(&mat(z4, &[&[3, 1]])).rows, vec![vec![1, 3]]);
    }

    #[test]
    fn canonical_form_adds_howell_rows() {
        // span of (2,1) over Z_4 contains (0,2), which must appear as its own row
        let h = canonical_form(&mat(z(2, 2), &[&[2, 1]]));
        assert_eq!(h.rows, vec![vec![2, 1], vec![0, 2]]);
    }

    #[test]
    fn congruence_examples() {
        let z4 = z(2, 2);
        let h = mat(z4, &[&[2]]);
        match solve_congruences(&h, &[1]).unwrap() {
            CongruenceSolution::Unsat(w) => {
                assert!(w.verify(&h, &[1]));
                assert_eq!((w.combination.clone(), w.contradiction), (vec![2], 2));
            }
            other => panic!("expected UNSAT, got {other:?}"),
        }
        assert_eq!(solve_congruences(&h, &[2]).unwrap(), CongruenceSolution::Solution(vec![1]));
        let h = mat(z4, &[&[1]]);
        assert_eq!(solve_congruences(&h, &[3]).unwrap(), CongruenceSolution::Solution(vec![3]));
        assert!(solve_congruences(&h, &[1, 2]).is_err());
    }

    #[test]
    fn kernel_examples() {
        let z4 = z(2, 2);
        let k = kernel_generators(&mat(z4, &[&[1, 2]]));
        assert_eq!(k.generators, vec![vec![2, 1]]);
        assert_eq!(k.expand(100).unwrap(), vec![vec![0, 0], vec![0, 2], vec![2, 1], vec![2, 3]]);
        let k = kernel_generators(&ZpmMatrix::identity(z(3, 2), 2));
        assert!(k.generators.is_empty());
        let k = kernel_generators(&mat(z4, &[&[0, 0, 0]]));
        assert_eq!(k.generators, ZpmMatrix::identity(z4, 3).rows);
    }

    #[test]
    fn annihilator_examples() {
        let z4 = z(2, 2);
        let s = SubgroupDescription::new(z4, 2, vec![vec![2, 1]]).unwrap();
        assert_eq!(annihilator(&s).rows, vec![vec![1, 2]]);
        assert_eq!(annihilator(&SubgroupDescription::full(z4, 2)).num_rows(), 0);
        let zero = SubgroupDescription::new(z4, 1, vec![vec![0]]).unwrap();
        assert_eq!(annihilator(&zero).rows, vec![vec![1]]);
    }
}
