//! Finite Abelian groups as sums of cyclic groups, the affine operation,
//! coset relations and their decomposition by prime.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arithmetic::{factorize, ModInt, PrimePower};
use crate::error::{invalid, Error, Result};
use crate::zpm::SubgroupDescription;

/// A direct sum of prime-power cyclic groups, factors sorted by `(p, ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    factors: Vec<PrimePower>,
}

impl AbelianGroup {
    pub fn new(mut factors: Vec<PrimePower>) -> Self {
        factors.sort();
        AbelianGroup { factors }
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().map(|f| f.modulus()).product()
    }

    /// Distinct primes in ascending order.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.factors.iter().map(|f| f.p).collect();
        ps.dedup();
        ps
    }

    /// Largest exponent among the factors of prime `p` (the `m_r` of that prime).
    pub fn max_exponent(&self, p: u64) -> Option<u32> {
        self.factors.iter().filter(|f| f.p == p).map(|f| f.m).max()
    }

    pub fn element(&self, values: &[i128]) -> Result<GroupElement> {
        if values.len() != self.factors.len() {
            return invalid(format!("element has {} components, group has {} factors", values.len(), self.factors.len()));
        }
        Ok(GroupElement { values: values.iter().zip(&self.factors).map(|(&v, &f)| ModInt::new(v, f)).collect() })
    }

    /// Componentwise `a - b + c`.
    pub fn affine_op(&self, a: &GroupElement, b: &GroupElement, c: &GroupElement) -> Result<GroupElement> {
        for e in [a, b, c] {
            if e.values.len() != self.factors.len() || e.values.iter().zip(&self.factors).any(|(v, f)| v.modulus() != *f) {
                return invalid("affine operation on elements of a different group");
            }
        }
        let values = a.values.iter().zip(&b.values).zip(&c.values).map(|((&x, &y), &z)| x - y + z).collect();
        Ok(GroupElement { values })
    }

    /// The CRT bijection between the factors and `Z_n`, for pairwise coprime factors.
    pub fn crt_map(&self) -> Result<CrtMap> {
        CrtMap::new(&self.factors)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "Z_1");
        }
        let parts: Vec<String> = self.factors.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub values: Vec<ModInt>,
}

impl GroupElement {
    pub fn residues(&self) -> Vec<u64> {
        self.values.iter().map(|v| v.value()).collect()
    }
}

/// Prime-power decomposition of `Z_n`.
pub fn decompose(n: u64) -> Result<AbelianGroup> {
    if n == 0 {
        return invalid("cyclic group order must be at least 1");
    }
    let factors = factorize(n)
        .into_iter()
        .map(|(p, e)| PrimePower::new(p, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(AbelianGroup::new(factors))
}

/// Refines a sum of cyclic groups of arbitrary orders into prime-power factors.
pub fn decompose_orders(orders: &[u64]) -> Result<AbelianGroup> {
    let mut factors = Vec::new();
    for &n in orders {
        factors.extend_from_slice(decompose(n)?.factors());
    }
    Ok(AbelianGroup::new(factors))
}

/// `π(a_1, …, a_k) = Σ (n/q_i)·a_i mod n` for pairwise coprime `q_i` with
/// product `n`, and its inverse `x ↦ (x·(n/q_i)⁻¹ mod q_i)_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrtMap {
    moduli: Vec<u64>,
    n: u64,
    weights: Vec<u64>,
    inverse_weights: Vec<u64>,
}

impl CrtMap {
    pub fn new(factors: &[PrimePower]) -> Result<Self> {
        let moduli: Vec<u64> = factors.iter().map(|f| f.modulus()).collect();
        for i in 0..factors.len() {
            for j in i + 1..factors.len() {
                if factors[i].p == factors[j].p {
                    return invalid(format!("factors {} and {} are not coprime", factors[i], factors[j]));
                }
            }
        }
        let n: u64 = moduli.iter().product();
        let weights: Vec<u64> = moduli.iter().map(|q| n / q).collect();
        let inverse_weights = weights
            .iter()
            .zip(factors)
            .map(|(&w, f)| f.inverse(w % f.modulus()).expect("coprime weight"))
            .collect();
        Ok(CrtMap { moduli, n, weights, inverse_weights })
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn to_integer(&self, components: &[u64]) -> u64 {
        let n = self.n as u128;
        (components.iter().zip(&self.weights).map(|(&a, &w)| a as u128 * w as u128).sum::<u128>() % n) as u64
    }

    pub fn from_integer(&self, x: u64) -> Vec<u64> {
        self.moduli
            .iter()
            .zip(&self.inverse_weights)
            .map(|(&q, &iw)| ((x % q) as u128 * iw as u128 % q as u128) as u64)
            .collect()
    }

    /// Full table `(components, π(components))` in lexicographic order of components.
    pub fn table(&self) -> Vec<(Vec<u64>, u64)> {
        let mut out = vec![(Vec::new(), 0u64)];
        for &q in &self.moduli {
            out = out
                .into_iter()
                .flat_map(|(c, _)| (0..q).map(move |a| (c.iter().copied().chain([a]).collect(), 0)))
                .collect();
        }
        out.into_iter().map(|(c, _)| { let v = self.to_integer(&c); (c, v) }).collect()
    }
}

/// `x ↦ p^{m-ℓ}·x` from `Z_{p^ℓ}` into `Z_{p^m}`.
pub fn embed_prime_power(target_m: u32, x: ModInt) -> Result<ModInt> {
    let src = x.modulus();
    if src.m > target_m {
        return invalid(format!("cannot embed {src} into a smaller cyclic group"));
    }
    let target = PrimePower::new(src.p, target_m)?;
    Ok(ModInt::new(x.value() as i128 * src.p_pow(target_m - src.m) as i128, target))
}

/// Inverse of [`embed_prime_power`], defined on `p^{m-ℓ}Z_{p^m}`.
pub fn unembed_prime_power(l: u32, y: ModInt) -> Result<ModInt> {
    let target = y.modulus();
    if l > target.m {
        return invalid("source exponent exceeds the ambient exponent");
    }
    let src = PrimePower::new(target.p, l)?;
    let scale = target.p_pow(target.m - l);
    if !y.value().is_multiple_of(scale) {
        return invalid(format!("{} is not in the image of {src} in {target}", y.value()));
    }
    Ok(ModInt::new((y.value() / scale) as i128, src))
}

/// `a - b + c` on tuples over `Z_{n_1} × ⋯ × Z_{n_k}`.
pub fn affine_tuple(orders: &[u64], a: &[u64], b: &[u64], c: &[u64]) -> Vec<u64> {
    orders
        .iter()
        .enumerate()
        .map(|(i, &n)| ((a[i] as u128 + n as u128 - b[i] as u128 + c[i] as u128) % n as u128) as u64)
        .collect()
}

fn add_tuple(orders: &[u64], a: &[u64], b: &[u64]) -> Vec<u64> {
    orders.iter().enumerate().map(|(i, &n)| ((a[i] as u128 + b[i] as u128) % n as u128) as u64).collect()
}

fn sub_tuple(orders: &[u64], a: &[u64], b: &[u64]) -> Vec<u64> {
    orders.iter().enumerate().map(|(i, &n)| ((a[i] as u128 + n as u128 - b[i] as u128) % n as u128) as u64).collect()
}

/// Additive order of a tuple in `Z_{n_1} × ⋯ × Z_{n_k}`.
pub fn element_order(orders: &[u64], a: &[u64]) -> u64 {
    orders.iter().zip(a).fold(1u64, |acc, (&n, &v)| {
        let o = n / num_integer::gcd(n, v);
        num_integer::lcm(acc, o)
    })
}

/// A coset `base + ⟨generators⟩` inside `Z_{n_1} × ⋯ × Z_{n_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CosetRelation {
    pub signature: Vec<u64>,
    pub base: Vec<u64>,
    pub generators: Vec<Vec<u64>>,
}

/// One prime's share of a relation over prime-power coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeBlock {
    pub prime: u64,
    pub positions: Vec<usize>,
    pub relation: CosetRelation,
}

impl CosetRelation {
    pub fn new(signature: Vec<u64>, base: Vec<i128>, generators: Vec<Vec<i128>>) -> Result<Self> {
        if signature.contains(&0) {
            return invalid("relation coordinates must have positive order");
        }
        let reduce = |t: &[i128], what: &str| -> Result<Vec<u64>> {
            if t.len() != signature.len() {
                return invalid(format!("{what} has {} entries for a relation of arity {}", t.len(), signature.len()));
            }
            Ok(t.iter().zip(&signature).map(|(&v, &n)| v.rem_euclid(n as i128) as u64).collect())
        };
        let base = reduce(&base, "base")?;
        let generators = generators.iter().map(|g| reduce(g, "generator")).collect::<Result<Vec<_>>>()?;
        Ok(CosetRelation { signature, base, generators })
    }

    /// The full relation `Z_{n_1} × ⋯ × Z_{n_k}`.
    pub fn full(signature: Vec<u64>) -> Self {
        let k = signature.len();
        let generators = (0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect();
        CosetRelation { base: vec![0; k], signature, generators }
    }

    pub fn arity(&self) -> usize {
        self.signature.len()
    }

    fn is_prime_power_signature(&self) -> bool {
        self.signature.iter().all(|&n| factorize(n).len() <= 1)
    }

    /// Splits every coordinate of composite order into its prime-power
    /// components (through the inverse CRT map). Returns the refined relation
    /// and, per new coordinate, `(original coordinate, component index)`.
    pub fn refine(&self) -> Result<(CosetRelation, Vec<(usize, usize)>)> {
        let mut signature = Vec::new();
        let mut origin = Vec::new();
        let mut maps = Vec::new();
        for (i, &n) in self.signature.iter().enumerate() {
            let g = decompose(n)?;
            let crt = g.crt_map()?;
            for (k, f) in g.factors().iter().enumerate() {
                signature.push(f.modulus());
                origin.push((i, k));
            }
            maps.push(crt);
        }
        let split = |t: &[u64]| -> Vec<u64> {
            t.iter().zip(&maps).flat_map(|(&v, crt)| crt.from_integer(v)).collect()
        };
        let rel = CosetRelation {
            signature,
            base: split(&self.base),
            generators: self.generators.iter().map(|g| split(g)).collect(),
        };
        Ok((rel, origin))
    }

    /// Whether `t` lies in the coset. Decided prime by prime with Howell forms.
    pub fn contains(&self, t: &[u64]) -> Result<bool> {
        if t.len() != self.arity() {
            return invalid(format!("tuple of length {} for a relation of arity {}", t.len(), self.arity()));
        }
        if !self.is_prime_power_signature() {
            let (refined, _) = self.refine()?;
            let maps: Vec<CrtMap> = self
                .signature
                .iter()
                .map(|&n| decompose(n).and_then(|g| g.crt_map()))
                .collect::<Result<_>>()?;
            let split: Vec<u64> = t.iter().zip(&maps).flat_map(|(&v, crt)| crt.from_integer(v)).collect();
            return refined.contains(&split);
        }
        for block in decompose_relation_by_sort(self)? {
            let (base, sub) = block.relation.embedded()?;
            let sort = sub.modulus;
            let x: Vec<u64> = block
                .positions
                .iter()
                .zip(&block.relation.signature)
                .enumerate()
                .map(|(j, (&pos, &n))| {
                    let scaled = (t[pos] % n) * (sort.modulus() / n);
                    sort.sub(scaled, base[j])
                })
                .collect();
            if !sub.contains(&x) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// For a single-prime relation: the base and subgroup after embedding
    /// each coordinate `Z_{p^ℓ}` into `Z_{p^M}`, `M` the largest exponent.
    pub fn embedded(&self) -> Result<(Vec<u64>, SubgroupDescription)> {
        self.embedded_into(None)
    }

    pub fn embedded_into(&self, target: Option<u32>) -> Result<(Vec<u64>, SubgroupDescription)> {
        let sorts = self
            .signature
            .iter()
            .map(|&n| PrimePower::from_modulus(n))
            .collect::<Result<Vec<_>>>()?;
        let Some(first) = sorts.first() else {
            return invalid("cannot embed a relation of arity 0");
        };
        if sorts.iter().any(|s| s.p != first.p) {
            return invalid("embedding requires a single-prime relation");
        }
        let max_m = sorts.iter().map(|s| s.m).max().unwrap_or(1);
        let m = target.unwrap_or(max_m);
        if m < max_m {
            return invalid("target exponent below the relation's coordinate exponents");
        }
        let sort = PrimePower::new(first.p, m)?;
        let scale: Vec<u64> = sorts.iter().map(|s| sort.modulus() / s.modulus()).collect();
        let lift = |t: &[u64]| -> Vec<i128> { t.iter().zip(&scale).map(|(&v, &c)| (v * c) as i128).collect() };
        let base = lift(&self.base).into_iter().map(|v| v as u64).collect();
        let sub = SubgroupDescription::new(sort, self.arity(), self.generators.iter().map(|g| lift(g)).collect())?;
        Ok((base, sub))
    }

    /// All tuples of the coset in lexicographic order (desk scale only).
    pub fn expand(&self, cap: usize) -> Result<Vec<Vec<u64>>> {
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let zero = vec![0u64; self.arity()];
        seen.insert(zero.clone());
        let mut frontier = vec![zero];
        while let Some(x) = frontier.pop() {
            for g in &self.generators {
                let y = add_tuple(&self.signature, &x, g);
                if seen.insert(y.clone()) {
                    if seen.len() > cap {
                        return Err(Error::GuardRefusal { what: "relation expansion".into(), bound: cap as u64 });
                    }
                    frontier.push(y);
                }
            }
        }
        let mut out: Vec<Vec<u64>> = seen.into_iter().map(|d| add_tuple(&self.signature, &self.base, &d)).collect();
        out.sort();
        Ok(out)
    }
}

/// Recognizes an explicit tuple set as a coset, or reports a triple whose
/// affine image leaves the set.
pub fn coset_from_tuples(tuples: &[Vec<u64>], signature: &[u64]) -> Result<CosetRelation> {
    if tuples.is_empty() {
        return invalid("relation has no tuples");
    }
    if signature.contains(&0) {
        return invalid("relation coordinates must have positive order");
    }
    let mut sorted: Vec<Vec<u64>> = Vec::with_capacity(tuples.len());
    for t in tuples {
        if t.len() != signature.len() {
            return invalid(format!("tuple {t:?} does not match a signature of arity {}", signature.len()));
        }
        if t.iter().zip(signature).any(|(&v, &n)| v >= n) {
            return invalid(format!("tuple {t:?} has an entry outside its cyclic group"));
        }
        sorted.push(t.clone());
    }
    sorted.sort();
    sorted.dedup();
    let set: HashSet<&Vec<u64>> = sorted.iter().collect();
    let a0 = &sorted[0];
    for b in &sorted {
        for a in &sorted {
            let image = affine_tuple(signature, a0, a, b);
            if !set.contains(&image) {
                return Err(Error::NotAffineInvariant {
                    context: "tuple relation".into(),
                    witness: [a0.clone(), a.clone(), b.clone()],
                    image,
                });
            }
        }
    }
    let mut diffs: Vec<(u64, Vec<u64>)> =
        sorted.iter().map(|a| sub_tuple(signature, a, a0)).map(|d| (element_order(signature, &d), d)).collect();
    diffs.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
    let mut generated: HashSet<Vec<u64>> = HashSet::from([vec![0u64; signature.len()]]);
    let mut generators = Vec::new();
    for (ord, d) in diffs {
        if generated.contains(&d) {
            continue;
        }
        let mut next = generated.clone();
        for x in &generated {
            let mut y = x.clone();
            for _ in 1..ord {
                y = add_tuple(signature, &y, &d);
                next.insert(y.clone());
            }
        }
        generated = next;
        generators.push(d);
    }
    Ok(CosetRelation { signature: signature.to_vec(), base: a0.clone(), generators })
}

/// Projects a relation over prime-power coordinates onto each prime's
/// coordinates; the relation is the product of the projections.
pub fn decompose_relation_by_sort(r: &CosetRelation) -> Result<Vec<PrimeBlock>> {
    let mut by_prime: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, &n) in r.signature.iter().enumerate() {
        match factorize(n).as_slice() {
            [(p, _)] => by_prime.entry(*p).or_default().push(i),
            [] => {}
            _ => return invalid(format!("coordinate {i} has composite order {n}; refine the relation first")),
        }
    }
    Ok(by_prime
        .into_iter()
        .map(|(prime, positions)| {
            let pick = |t: &[u64]| positions.iter().map(|&i| t[i]).collect::<Vec<u64>>();
            let relation = CosetRelation {
                signature: pick(&r.signature),
                base: pick(&r.base),
                generators: r.generators.iter().map(|g| pick(g)).filter(|g| g.iter().any(|&v| v != 0)).collect(),
            };
            PrimeBlock { prime, positions, relation }
        })
        .collect())
}
