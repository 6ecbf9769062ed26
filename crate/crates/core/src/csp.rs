//! Multi-sorted CSP instances over prime-power cyclic sorts.
//!
//! Normalization splits every coordinate `Z_n` into its prime-power
//! components, embeds a component `Z_{p^ℓ}` into the largest sort
//! `Z_{p^m}` of its prime, and rewrites every constraint as a system of
//! congruences over a single prime.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arithmetic::{ModInt, PrimePower};
use crate::error::{invalid, Error, Result};
use crate::groups::{decompose, decompose_relation_by_sort, CosetRelation, CrtMap};
use crate::instance::{Instance, Relation};
use crate::zpm::{annihilator, dot, kernel_generators, solve_congruences, CongruenceSolution, UnsatWitness, ZpmMatrix};

/// A variable of the normalized instance: one prime-power component of a coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormVariable {
    pub name: String,
    /// The per-prime sort `Z_{p^m}` the component is embedded into.
    pub sort: PrimePower,
    /// `ℓ`: the component ranges over `p^{m-ℓ}·Z_{p^m}`.
    pub exponent: u32,
    pub coordinate: usize,
    pub component: usize,
}

impl NormVariable {
    /// `p^{m-ℓ}`, the embedding factor.
    pub fn scale(&self) -> u64 {
        self.sort.p_pow(self.sort.m - self.exponent)
    }
}

/// How a coordinate of the raw instance maps to normalized variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoordinateMap {
    pub name: String,
    pub modulus: u64,
    pub components: Vec<usize>,
    #[serde(skip)]
    pub crt: CrtMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub coordinates: Vec<CoordinateMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ConstraintKind {
    /// Derived from the raw constraint with this index.
    Relation(usize),
    /// `p^ℓ·x ≡ 0` for an embedded variable.
    Membership,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormConstraint {
    pub kind: ConstraintKind,
    pub sort: PrimePower,
    pub scope: Vec<usize>,
    /// The constraint's solution coset in `Z_{p^m}^scope`; `None` if empty.
    pub relation: Option<CosetRelation>,
    /// Congruences `rows · x_scope ≡ rhs`.
    pub rows: Vec<Vec<u64>>,
    pub rhs: Vec<u64>,
}

impl NormConstraint {
    fn holds(&self, values: &[u64]) -> bool {
        let x: Vec<u64> = self.scope.iter().map(|&v| values[v]).collect();
        self.rows.iter().zip(&self.rhs).all(|(r, &b)| dot(self.sort, r, &x) == b)
    }
}

/// A normalized instance. Every constraint lives over one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct McspInstance {
    pub variables: Vec<NormVariable>,
    pub constraints: Vec<NormConstraint>,
    pub provenance: Provenance,
    /// The per-prime sorts `Z_{p^m}`, ascending by prime.
    pub sorts: Vec<PrimePower>,
}

/// Values of the normalized variables, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub values: Vec<u64>,
}

/// Infeasibility proof for one prime: `λ·(H | b) = (0 … 0 | c)` with `c ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnsatCertificate {
    pub sort: PrimePower,
    pub variables: Vec<String>,
    pub matrix: ZpmMatrix,
    pub rhs: Vec<u64>,
    pub witness: UnsatWitness,
}

impl UnsatCertificate {
    pub fn verify(&self) -> bool {
        self.witness.verify(&self.matrix, &self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(Assignment),
    Unsat(UnsatCertificate),
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }
}

/// The congruence system of one prime over its own variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSystem {
    pub sort: PrimePower,
    /// Global indices of the variables, in declaration order.
    pub vars: Vec<usize>,
    pub matrix: ZpmMatrix,
    pub rhs: Vec<u64>,
}

impl PrimeSystem {
    pub fn local_index(&self, var: usize) -> Option<usize> {
        self.vars.iter().position(|&v| v == var)
    }

    /// Solves with extra pins `x_local ≡ value`.
    pub fn solve_with_pins(&self, pins: &[(usize, u64)]) -> Result<CongruenceSolution> {
        let n = self.vars.len();
        let mut rows: Vec<Vec<i128>> = self.matrix.rows().iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
        let mut rhs: Vec<i128> = self.rhs.iter().map(|&v| v as i128).collect();
        for &(j, v) in pins {
            let mut r = vec![0i128; n];
            r[j] = 1;
            rows.push(r);
            rhs.push(v as i128);
        }
        let m = ZpmMatrix::new(self.sort, n, rows)?;
        solve_congruences(&m, &rhs)
    }

    fn certificate(&self, inst: &McspInstance, pins: &[(usize, u64)], witness: UnsatWitness) -> UnsatCertificate {
        let n = self.vars.len();
        let mut rows: Vec<Vec<i128>> = self.matrix.rows().iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
        let mut rhs = self.rhs.clone();
        for &(j, v) in pins {
            let mut r = vec![0i128; n];
            r[j] = 1;
            rows.push(r);
            rhs.push(v);
        }
        UnsatCertificate {
            sort: self.sort,
            variables: self.vars.iter().map(|&v| inst.variables[v].name.clone()).collect(),
            matrix: ZpmMatrix::new(self.sort, n, rows).expect("well-formed rows"),
            rhs,
            witness,
        }
    }
}

fn congruence_coset(sort: PrimePower, row: Vec<u64>, b: u64) -> Result<Option<CosetRelation>> {
    let k = row.len();
    let h = ZpmMatrix::new(sort, k, vec![row.iter().map(|&v| v as i128).collect()])?;
    match solve_congruences(&h, &[b as i128])? {
        CongruenceSolution::Unsat(_) => Ok(None),
        CongruenceSolution::Solution(x) => {
            let gens = kernel_generators(&h).generators;
            Ok(Some(CosetRelation { signature: vec![sort.modulus(); k], base: x, generators: gens }))
        }
    }
}

/// Normalizes a validated raw instance.
pub fn normalize_instance(inst: &Instance) -> Result<McspInstance> {
    let mut max_exp: BTreeMap<u64, u32> = BTreeMap::new();
    let mut groups = Vec::new();
    for c in &inst.coordinates {
        let g = decompose(c.modulus)?;
        for f in g.factors() {
            let e = max_exp.entry(f.p).or_insert(0);
            *e = (*e).max(f.m);
        }
        groups.push(g);
    }
    let sorts: Vec<PrimePower> =
        max_exp.iter().map(|(&p, &m)| PrimePower::new(p, m)).collect::<Result<_>>()?;
    let sort_of = |p: u64| sorts.iter().copied().find(|s| s.p == p).expect("prime collected above");

    let mut variables = Vec::new();
    let mut coordinates = Vec::new();
    for (ci, (c, g)) in inst.coordinates.iter().zip(&groups).enumerate() {
        let mut comps = Vec::new();
        for (k, f) in g.factors().iter().enumerate() {
            let name = if g.factors().len() == 1 { c.name.clone() } else { format!("{}#{}", c.name, f.p) };
            comps.push(variables.len());
            variables.push(NormVariable { name, sort: sort_of(f.p), exponent: f.m, coordinate: ci, component: k });
        }
        coordinates.push(CoordinateMap { name: c.name.clone(), modulus: c.modulus, components: comps, crt: g.crt_map()? });
    }

    let mut constraints = Vec::new();
    for rc in &inst.constraints {
        let kind = ConstraintKind::Relation(rc.index);
        match &rc.relation {
            Relation::Linear { coeffs, constant, modulus } => {
                let g = decompose(*modulus)?;
                for f in g.factors() {
                    let sort = sort_of(f.p);
                    let q = f.modulus();
                    let w = (modulus / q) as i128;
                    let scale = (sort.modulus() / q) as i128;
                    let scope: Vec<usize> = rc
                        .coordinates
                        .iter()
                        .map(|&k| {
                            let pos = groups[k].factors().iter().position(|h| h.p == f.p).expect("same modulus");
                            coordinates[k].components[pos]
                        })
                        .collect();
                    let row: Vec<u64> = coeffs.iter().map(|&c| sort.reduce(c as i128 * w)).collect();
                    let b = sort.reduce((*constant as i128).rem_euclid(q as i128) * scale);
                    let relation = congruence_coset(sort, row.clone(), b)?;
                    constraints.push(NormConstraint { kind: kind.clone(), sort, scope, relation, rows: vec![row], rhs: vec![b] });
                }
            }
            _ => match rc.coset(inst)? {
                None => {
                    let p = rc
                        .coordinates
                        .iter()
                        .flat_map(|&k| groups[k].factors().iter().map(|f| f.p))
                        .next()
                        .or_else(|| sorts.first().map(|s| s.p))
                        .unwrap_or(2);
                    let sort = sorts.iter().copied().find(|s| s.p == p).unwrap_or(PrimePower::new(p, 1)?);
                    constraints.push(NormConstraint { kind, sort, scope: vec![], relation: None, rows: vec![vec![]], rhs: vec![1] });
                }
                Some(rel) => {
                    let (refined, origin) = rel.refine()?;
                    for block in decompose_relation_by_sort(&refined)? {
                        let sort = sort_of(block.prime);
                        let (base, sub) = block.relation.embedded_into(Some(sort.m))?;
                        let h = annihilator(&sub);
                        let rhs = h.mul_vec(&base)?;
                        let scope: Vec<usize> = block
                            .positions
                            .iter()
                            .map(|&pos| {
                                let (i, k) = origin[pos];
                                coordinates[rc.coordinates[i]].components[k]
                            })
                            .collect();
                        let relation = CosetRelation {
                            signature: vec![sort.modulus(); scope.len()],
                            base,
                            generators: sub.generators.clone(),
                        };
                        constraints.push(NormConstraint {
                            kind: kind.clone(),
                            sort,
                            scope,
                            relation: Some(relation),
                            rows: h.rows().to_vec(),
                            rhs,
                        });
                    }
                }
            },
        }
    }
    for (vi, v) in variables.iter().enumerate() {
        if v.exponent < v.sort.m {
            let row = vec![v.sort.p_pow(v.exponent)];
            let sub = crate::zpm::SubgroupDescription::new(v.sort, 1, vec![vec![v.scale() as i128]])?;
            let relation = CosetRelation { signature: vec![v.sort.modulus()], base: vec![0], generators: sub.generators };
            constraints.push(NormConstraint {
                kind: ConstraintKind::Membership,
                sort: v.sort,
                scope: vec![vi],
                relation: Some(relation),
                rows: vec![row],
                rhs: vec![0],
            });
        }
    }
    Ok(McspInstance { variables, constraints, provenance: Provenance { coordinates }, sorts })
}

impl McspInstance {
    pub fn from_instance(inst: &Instance) -> Result<Self> {
        normalize_instance(inst)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        normalize_instance(&Instance::from_json(text)?)
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Sorts that carry at least one variable or constraint.
    fn active_sorts(&self) -> Vec<PrimePower> {
        let mut out: Vec<PrimePower> = self.variables.iter().map(|v| v.sort).collect();
        out.extend(self.constraints.iter().map(|c| c.sort));
        out.sort();
        out.dedup();
        out
    }

    pub fn prime_system(&self, sort: PrimePower) -> Result<PrimeSystem> {
        let vars: Vec<usize> = (0..self.variables.len()).filter(|&v| self.variables[v].sort == sort).collect();
        let n = vars.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for c in self.constraints.iter().filter(|c| c.sort == sort) {
            for (r, &b) in c.rows.iter().zip(&c.rhs) {
                let mut full = vec![0i128; n];
                for (&v, &a) in c.scope.iter().zip(r) {
                    let j = vars.iter().position(|&u| u == v).ok_or_else(|| {
                        Error::Internal(format!("constraint scope variable {v} is not of sort {sort}"))
                    })?;
                    full[j] += a as i128;
                }
                rows.push(full);
                rhs.push(b);
            }
        }
        Ok(PrimeSystem { sort, vars, matrix: ZpmMatrix::new(sort, n, rows)?, rhs })
    }

    pub fn prime_systems(&self) -> Result<Vec<PrimeSystem>> {
        self.active_sorts().into_iter().map(|s| self.prime_system(s)).collect()
    }

    fn solve_inner(&self, pin: Option<(usize, u64)>) -> Result<SolveOutcome> {
        let mut values = vec![0u64; self.variables.len()];
        for sys in self.prime_systems()? {
            let pins: Vec<(usize, u64)> = pin.and_then(|(v, a)| sys.local_index(v).map(|j| (j, a))).into_iter().collect();
            match sys.solve_with_pins(&pins)? {
                CongruenceSolution::Solution(x) => {
                    for (&v, &a) in sys.vars.iter().zip(&x) {
                        values[v] = a;
                    }
                }
                CongruenceSolution::Unsat(w) => return Ok(SolveOutcome::Unsat(sys.certificate(self, &pins, w))),
            }
        }
        Ok(SolveOutcome::Sat(Assignment { values }))
    }

    pub fn solve(&self) -> Result<SolveOutcome> {
        self.solve_inner(None)
    }

    pub fn solve_pinned(&self, var: usize, value: ModInt) -> Result<SolveOutcome> {
        let Some(v) = self.variables.get(var) else {
            return invalid(format!("no variable with index {var}"));
        };
        if value.modulus() != v.sort {
            return invalid(format!("value for {:?} must lie in {}, got {}", v.name, v.sort, value.modulus()));
        }
        self.solve_inner(Some((var, value.value())))
    }

    pub fn value_set(&self, var: usize) -> Result<Vec<u64>> {
        let Some(v) = self.variables.get(var) else {
            return invalid(format!("no variable with index {var}"));
        };
        let mut out = Vec::new();
        for a in 0..v.sort.modulus() {
            if self.solve_pinned(var, ModInt::new(a as i128, v.sort))?.is_sat() {
                out.push(a);
            }
        }
        Ok(out)
    }

    /// All solutions in lexicographic order, by backtracking with constraints
    /// checked once their scope is assigned. `cap` bounds the search nodes.
    pub fn enumerate_solutions(&self, cap: u64) -> Result<Vec<Assignment>> {
        let n = self.variables.len();
        let mut ready: Vec<Vec<&NormConstraint>> = vec![Vec::new(); n + 1];
        for c in &self.constraints {
            let last = c.scope.iter().copied().max().map_or(0, |m| m + 1);
            ready[last].push(c);
        }
        let mut out = Vec::new();
        let mut values = vec![0u64; n];
        let mut nodes = 0u64;
        fn rec(
            depth: usize,
            inst: &McspInstance,
            ready: &[Vec<&NormConstraint>],
            values: &mut Vec<u64>,
            out: &mut Vec<Assignment>,
            nodes: &mut u64,
            cap: u64,
        ) -> Result<()> {
            if !ready[depth].iter().all(|c| c.holds(values)) {
                return Ok(());
            }
            if depth == values.len() {
                out.push(Assignment { values: values.clone() });
                return Ok(());
            }
            for a in 0..inst.variables[depth].sort.modulus() {
                *nodes += 1;
                if *nodes > cap {
                    return Err(Error::GuardRefusal { what: "solution enumeration nodes".into(), bound: cap });
                }
                values[depth] = a;
                rec(depth + 1, inst, ready, values, out, nodes, cap)?;
            }
            Ok(())
        }
        rec(0, self, &ready, &mut values, &mut out, &mut nodes, cap)?;
        Ok(out)
    }

    /// Maps normalized values back to coordinate values of the raw instance.
    pub fn to_original(&self, a: &Assignment) -> Result<Vec<u64>> {
        self.provenance
            .coordinates
            .iter()
            .map(|c| {
                let comps = c
                    .components
                    .iter()
                    .map(|&v| {
                        let var = &self.variables[v];
                        let x = ModInt::new(a.values[v] as i128, var.sort);
                        crate::groups::unembed_prime_power(var.exponent, x).map(|m| m.value())
                    })
                    .collect::<Result<Vec<u64>>>()?;
                Ok(c.crt.to_integer(&comps))
            })
            .collect()
    }

    /// Maps coordinate values of the raw instance to normalized values.
    pub fn from_original(&self, coords: &[u64]) -> Result<Assignment> {
        if coords.len() != self.provenance.coordinates.len() {
            return invalid("coordinate vector has the wrong length");
        }
        let mut values = vec![0u64; self.variables.len()];
        for (c, &x) in self.provenance.coordinates.iter().zip(coords) {
            for (&v, a) in c.components.iter().zip(c.crt.from_integer(x % c.modulus)) {
                values[v] = a * self.variables[v].scale();
            }
        }
        Ok(Assignment { values })
    }
}
