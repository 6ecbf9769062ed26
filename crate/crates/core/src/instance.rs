//! Raw CSP instances as written in instance files, and a direct brute-force
//! solver that works on the raw description only.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{factorize, PrimePower, Rational};
use crate::error::{invalid, Error, Result};
use crate::groups::{coset_from_tuples, CosetRelation};

/// Default bound on search nodes for brute-force enumerators.
pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SortSpec {
    Cyclic(u64),
    Group(Vec<PrimePower>),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Tuple(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RawRelation {
    Tuples(Vec<Vec<Entry>>),
    Linear {
        coeffs: Vec<i64>,
        #[serde(rename = "const", default)]
        constant: i64,
    },
    Coset {
        base: Vec<Entry>,
        #[serde(default)]
        gens: Vec<Vec<Entry>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawVariable {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sort: Option<SortSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawConstraint {
    pub scope: Vec<String>,
    pub relation: RawRelation,
}

/// The instance file format.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<PrimePower>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sorts: Option<BTreeMap<String, SortSpec>>,
    pub variables: Vec<RawVariable>,
    #[serde(default)]
    pub constraints: Vec<RawConstraint>,
}

/// A cyclic coordinate `Z_n` of some variable; polynomials are written over
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coordinate {
    pub name: String,
    pub modulus: u64,
    pub variable: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Variable {
    pub name: String,
    pub coordinates: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// Explicit tuples over the flattened coordinates of the scope.
    Tuples(Vec<Vec<u64>>),
    /// `Σ coeffs_i·x_i ≡ constant (mod modulus)`.
    Linear { coeffs: Vec<i64>, constant: i64, modulus: u64 },
    Coset(CosetRelation),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub index: usize,
    pub scope: Vec<usize>,
    /// Flattened coordinate scope.
    pub coordinates: Vec<usize>,
    pub relation: Relation,
}

impl Constraint {
    pub fn label(&self, inst: &Instance) -> String {
        let names: Vec<&str> = self.scope.iter().map(|&v| inst.variables[v].name.as_str()).collect();
        format!("constraint #{} on ({})", self.index, names.join(", "))
    }

    /// The relation as a coset over the coordinate orders of its scope, or
    /// `None` when the relation is empty.
    pub fn coset(&self, inst: &Instance) -> Result<Option<CosetRelation>> {
        let signature: Vec<u64> = self.coordinates.iter().map(|&c| inst.coordinates[c].modulus).collect();
        match &self.relation {
            Relation::Tuples(ts) if ts.is_empty() => Ok(None),
            Relation::Tuples(ts) => match coset_from_tuples(ts, &signature) {
                Err(Error::NotAffineInvariant { witness, image, .. }) => {
                    Err(Error::NotAffineInvariant { context: self.label(inst), witness, image })
                }
                other => other.map(Some),
            },
            Relation::Coset(c) => Ok(Some(c.clone())),
            Relation::Linear { .. } => Err(Error::Internal("linear relations are handled as congruences".into())),
        }
    }
}

/// A validated instance: variables split into cyclic coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub variables: Vec<Variable>,
    pub coordinates: Vec<Coordinate>,
    pub constraints: Vec<Constraint>,
}

fn resolve_sort(
    spec: &SortSpec,
    named: &BTreeMap<String, SortSpec>,
    depth: usize,
) -> Result<Vec<u64>> {
    match spec {
        SortSpec::Cyclic(0) => invalid("cyclic sort of order 0"),
        SortSpec::Cyclic(n) => Ok(vec![*n]),
        SortSpec::Group(fs) if fs.is_empty() => invalid("group sort with no factors"),
        SortSpec::Group(fs) => Ok(fs.iter().map(|f| f.modulus()).collect()),
        SortSpec::Named(name) => {
            if depth > 8 {
                return invalid(format!("sort {name:?} refers to itself"));
            }
            match named.get(name) {
                Some(s) => resolve_sort(s, named, depth + 1),
                None => invalid(format!("unknown sort {name:?}")),
            }
        }
    }
}

fn flatten_entry(e: &Entry, moduli: &[u64], ctx: &dyn Fn() -> String) -> Result<Vec<i64>> {
    match (e, moduli.len()) {
        (Entry::Int(v), 1) => Ok(vec![*v]),
        (Entry::Tuple(vs), k) if vs.len() == k => Ok(vs.clone()),
        (Entry::Int(_), k) => invalid(format!("{}: expected a {k}-component array", ctx())),
        (Entry::Tuple(vs), k) => invalid(format!("{}: expected {k} components, got {}", ctx(), vs.len())),
    }
}

impl RawInstance {
    pub fn from_json(text: &str) -> Result<RawInstance> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("instance: {e}")))
    }

    pub fn validate(&self) -> Result<Instance> {
        let named = self.sorts.clone().unwrap_or_default();
        let default_sort = match (&self.group, self.modulus) {
            (Some(_), Some(_)) => return invalid("give either \"group\" or \"modulus\", not both"),
            (Some(g), None) => Some(SortSpec::Group(g.clone())),
            (None, Some(n)) => Some(SortSpec::Cyclic(n)),
            (None, None) => None,
        };
        let mut variables = Vec::new();
        let mut coordinates = Vec::new();
        let mut by_name = HashMap::new();
        for (vi, v) in self.variables.iter().enumerate() {
            if v.name.is_empty() || v.name.contains(|c: char| c.is_whitespace() || "+-*/^(),".contains(c)) {
                return invalid(format!("variable name {:?} is not a valid identifier", v.name));
            }
            if by_name.insert(v.name.clone(), vi).is_some() {
                return invalid(format!("variable {:?} declared twice", v.name));
            }
            let sort = match (&v.sort, &default_sort) {
                (Some(s), _) => s,
                (None, Some(s)) => s,
                (None, None) => return invalid(format!("variable {:?} has no sort and the instance has no group", v.name)),
            };
            let moduli = resolve_sort(sort, &named, 0).map_err(|e| match e {
                Error::InvalidParameter(m) => Error::InvalidParameter(format!("variable {:?}: {m}", v.name)),
                other => other,
            })?;
            if moduli.iter().any(|&n| n > crate::arithmetic::modint::MAX_MODULUS) {
                return invalid(format!("variable {:?}: cyclic order too large", v.name));
            }
            let mut idx = Vec::new();
            for (k, &n) in moduli.iter().enumerate() {
                let name = if moduli.len() == 1 { v.name.clone() } else { format!("{}.{k}", v.name) };
                idx.push(coordinates.len());
                coordinates.push(Coordinate { name, modulus: n, variable: vi });
            }
            variables.push(Variable { name: v.name.clone(), coordinates: idx });
        }
        let mut seen_coords = HashSet::new();
        for c in &coordinates {
            if !seen_coords.insert(c.name.clone()) {
                return invalid(format!("coordinate name {:?} is ambiguous", c.name));
            }
        }
        let mut constraints = Vec::new();
        for (ci, c) in self.constraints.iter().enumerate() {
            let label = || format!("constraint #{ci}");
            let mut scope = Vec::new();
            for name in &c.scope {
                match by_name.get(name) {
                    Some(&v) => scope.push(v),
                    None => return invalid(format!("{}: unknown variable {name:?}", label())),
                }
            }
            let coord_scope: Vec<usize> = scope.iter().flat_map(|&v| variables[v].coordinates.clone()).collect();
            let moduli_of = |v: usize| -> Vec<u64> {
                variables[v].coordinates.iter().map(|&k| coordinates[k].modulus).collect()
            };
            let flatten = |tuple: &[Entry], what: &str| -> Result<Vec<i64>> {
                if tuple.len() != scope.len() {
                    return invalid(format!("{}: {what} has {} entries for a scope of {}", label(), tuple.len(), scope.len()));
                }
                let mut out = Vec::new();
                for (e, &v) in tuple.iter().zip(&scope) {
                    let ctx = || format!("{}: entry for {:?}", label(), variables[v].name);
                    out.extend(flatten_entry(e, &moduli_of(v), &ctx)?);
                }
                Ok(out)
            };
            let signature: Vec<u64> = coord_scope.iter().map(|&k| coordinates[k].modulus).collect();
            let relation = match &c.relation {
                RawRelation::Tuples(ts) => {
                    let mut rows = Vec::new();
                    for t in ts {
                        let flat = flatten(t, "tuple")?;
                        if flat.iter().zip(&signature).any(|(&x, &n)| x < 0 || x as u64 >= n) {
                            return invalid(format!("{}: tuple {flat:?} has an entry outside its domain", label()));
                        }
                        rows.push(flat.into_iter().map(|x| x as u64).collect());
                    }
                    Relation::Tuples(rows)
                }
                RawRelation::Linear { coeffs, constant } => {
                    if coeffs.len() != scope.len() {
                        return invalid(format!("{}: {} coefficients for a scope of {}", label(), coeffs.len(), scope.len()));
                    }
                    let mut modulus = None;
                    for &v in &scope {
                        let ms = moduli_of(v);
                        if ms.len() != 1 || modulus.is_some_and(|n| n != ms[0]) {
                            return invalid(format!(
                                "{}: linear relations need all scope variables over the same cyclic group",
                                label()
                            ));
                        }
                        modulus = Some(ms[0]);
                    }
                    let Some(modulus) = modulus else {
                        return invalid(format!("{}: linear relation with an empty scope", label()));
                    };
                    Relation::Linear { coeffs: coeffs.clone(), constant: *constant, modulus }
                }
                RawRelation::Coset { base, gens } => {
                    let base = flatten(base, "base")?.into_iter().map(i128::from).collect();
                    let gens = gens
                        .iter()
                        .map(|g| Ok(flatten(g, "generator")?.into_iter().map(i128::from).collect()))
                        .collect::<Result<Vec<Vec<i128>>>>()?;
                    Relation::Coset(CosetRelation::new(signature.clone(), base, gens)?)
                }
            };
            constraints.push(Constraint { index: ci, scope, coordinates: coord_scope, relation });
        }
        Ok(Instance { variables, coordinates, constraints })
    }
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Instance> {
        RawInstance::from_json(text)?.validate()
    }

    pub fn coordinate_names(&self) -> Vec<String> {
        self.coordinates.iter().map(|c| c.name.clone()).collect()
    }

    pub fn coordinate_index(&self, name: &str) -> Option<usize> {
        self.coordinates.iter().position(|c| c.name == name)
    }

    /// Number of points of the full search space, saturating.
    pub fn search_space(&self) -> u64 {
        self.coordinates.iter().fold(1u64, |acc, c| acc.saturating_mul(c.modulus))
    }

    /// Distinct primes over all coordinates.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.coordinates.iter().flat_map(|c| factorize(c.modulus)).map(|(p, _)| p).collect();
        ps.sort();
        ps.dedup();
        ps
    }
}

#[derive(Clone)]
enum Checker {
    Set(HashSet<Vec<u64>>),
    Linear { coeffs: Vec<i64>, constant: i64, modulus: u64 },
    Coset { base: Vec<u64>, diffs: HashSet<Vec<u64>>, orders: Vec<u64> },
}

impl Checker {
    fn accepts(&self, t: &[u64]) -> bool {
        match self {
            Checker::Set(s) => s.contains(t),
            Checker::Linear { coeffs, constant, modulus } => {
                let n = *modulus as i128;
                let lhs: i128 = coeffs.iter().zip(t).map(|(&c, &x)| c as i128 * x as i128).sum();
                (lhs - *constant as i128).rem_euclid(n) == 0
            }
            Checker::Coset { base, diffs, orders } => {
                let d: Vec<u64> = t.iter().zip(base).zip(orders).map(|((&x, &b), &n)| (x + n - b) % n).collect();
                diffs.contains(&d)
            }
        }
    }
}

fn closure(orders: &[u64], gens: &[Vec<u64>], cap: u64) -> Result<HashSet<Vec<u64>>> {
    let zero = vec![0u64; orders.len()];
    let mut seen = HashSet::from([zero.clone()]);
    let mut stack = vec![zero];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y: Vec<u64> = x.iter().zip(g).zip(orders).map(|((&a, &b), &n)| (a + b) % n).collect();
            if seen.insert(y.clone()) {
                if seen.len() as u64 > cap {
                    return Err(Error::GuardRefusal { what: "oracle subgroup closure".into(), bound: cap });
                }
                stack.push(y);
            }
        }
    }
    Ok(seen)
}

/// All solutions as coordinate-value vectors, in lexicographic order of the
/// coordinates. Works directly on the raw relations and never touches the
/// normalization pipeline. `cap` bounds the number of search nodes.
pub fn brute_force_solutions(inst: &Instance, cap: u64) -> Result<Vec<Vec<u64>>> {
    let n = inst.coordinates.len();
    let mut checkers: Vec<Vec<(Vec<usize>, Checker)>> = vec![Vec::new(); n + 1];
    for c in &inst.constraints {
        let orders: Vec<u64> = c.coordinates.iter().map(|&k| inst.coordinates[k].modulus).collect();
        let checker = match &c.relation {
            Relation::Tuples(ts) => Checker::Set(ts.iter().cloned().collect()),
            Relation::Linear { coeffs, constant, modulus } => {
                Checker::Linear { coeffs: coeffs.clone(), constant: *constant, modulus: *modulus }
            }
            Relation::Coset(r) => Checker::Coset {
                base: r.base.clone(),
                diffs: closure(&orders, &r.generators, cap)?,
                orders,
            },
        };
        let last = c.coordinates.iter().copied().max().map_or(0, |m| m + 1);
        checkers[last].push((c.coordinates.clone(), checker));
    }
    let mut out = Vec::new();
    let mut nodes = 0u64;
    let mut cur = vec![0u64; n];
    fn rec(
        depth: usize,
        inst: &Instance,
        checkers: &[Vec<(Vec<usize>, Checker)>],
        cur: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        nodes: &mut u64,
        cap: u64,
    ) -> Result<()> {
        let ok = checkers[depth].iter().all(|(scope, ch)| {
            let t: Vec<u64> = scope.iter().map(|&k| cur[k]).collect();
            ch.accepts(&t)
        });
        if !ok {
            return Ok(());
        }
        if depth == cur.len() {
            out.push(cur.clone());
            return Ok(());
        }
        for v in 0..inst.coordinates[depth].modulus {
            *nodes += 1;
            if *nodes > cap {
                return Err(Error::GuardRefusal { what: "brute-force search nodes".into(), bound: cap });
            }
            cur[depth] = v;
            rec(depth + 1, inst, checkers, cur, out, nodes, cap)?;
        }
        Ok(())
    }
    rec(0, inst, &checkers, &mut cur, &mut out, &mut nodes, cap)?;
    Ok(out)
}

/// Whether `f` (with rational coefficients, written over the coordinates)
/// vanishes on every brute-force solution; otherwise the first point where
/// it does not.
pub fn vanishing_oracle(
    inst: &Instance,
    f: &crate::poly::MultivariatePolynomial,
    cap: u64,
) -> Result<std::result::Result<(), Vec<u64>>> {
    let map = coordinate_positions(inst, f)?;
    for sol in brute_force_solutions(inst, cap)? {
        let point: Vec<Rational> = map.iter().map(|&k| Rational::from_integer(sol[k].into())).collect();
        if !f.evaluate_rational(&point)?.is_zero() {
            return Ok(Err(sol));
        }
    }
    Ok(Ok(()))
}

/// For each variable of `f`, the index of the coordinate of that name.
pub fn coordinate_positions(inst: &Instance, f: &crate::poly::MultivariatePolynomial) -> Result<Vec<usize>> {
    f.vars()
        .iter()
        .map(|v| inst.coordinate_index(v).ok_or_else(|| Error::InvalidParameter(format!("polynomial variable {v:?} is not a coordinate of the instance"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_flattens() {
        let inst = Instance::from_json(
            r#"{"group":[[2,1],[2,2]],
                "variables":[{"name":"a"},{"name":"b","sort":3}],
                "constraints":[{"scope":["a","b"],"relation":{"tuples":[[[0,1],2],[[1,0],0]]}}]}"#,
        )
        .unwrap();
        assert_eq!(inst.coordinate_names(), vec!["a.0", "a.1", "b"]);
        assert_eq!(inst.constraints[0].relation, Relation::Tuples(vec![vec![0, 1, 2], vec![1, 0, 0]]));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Instance::from_json(r#"{"variables":[{"name":"x"}]}"#).is_err());
        assert!(Instance::from_json(r#"{"modulus":4,"variables":[{"name":"x"},{"name":"x"}]}"#).is_err());
        let e = Instance::from_json(
            r#"{"modulus":4,"variables":[{"name":"x"}],"constraints":[{"scope":["y"],"relation":{"tuples":[[0]]}}]}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("\"y\""));
        assert!(matches!(RawInstance::from_json("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn brute_force_examples() {
        let inst = Instance::from_json(
            r#"{"modulus":2,"variables":[{"name":"x1"},{"name":"x2"}],
                "constraints":[{"scope":["x1","x2"],"relation":{"linear":{"coeffs":[1,1],"const":1}}}]}"#,
        )
        .unwrap();
        assert_eq!(brute_force_solutions(&inst, DEFAULT_CAP).unwrap(), vec![vec![0, 1], vec![1, 0]]);
        let free = Instance::from_json(r#"{"modulus":2,"variables":[{"name":"x1"},{"name":"x2"}]}"#).unwrap();
        assert_eq!(brute_force_solutions(&free, DEFAULT_CAP).unwrap().len(), 4);
        assert!(matches!(brute_force_solutions(&free, 3), Err(Error::GuardRefusal { .. })));
        let unsat = Instance::from_json(
            r#"{"modulus":4,"variables":[{"name":"x"}],
                "constraints":[{"scope":["x"],"relation":{"linear":{"coeffs":[2],"const":1}}}]}"#,
        )
        .unwrap();
        assert!(brute_force_solutions(&unsat, DEFAULT_CAP).unwrap().is_empty());
        let coset = Instance::from_json(
            r#"{"modulus":4,"variables":[{"name":"x"},{"name":"y"}],
                "constraints":[{"scope":["x","y"],"relation":{"coset":{"base":[1,0],"gens":[[2,1]]}}}]}"#,
        )
        .unwrap();
        assert_eq!(
            brute_force_solutions(&coset, DEFAULT_CAP).unwrap(),
            vec![vec![1, 0], vec![1, 2], vec![3, 1], vec![3, 3]]
        );
    }
}
