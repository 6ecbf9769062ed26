//! Roots-of-unity reformulation of affine instances and the IMP decision.
//!
//! A per-prime parametrization `x_j = c_j + Σ α_ij y_i` becomes, after
//! replacing every value a by `ω^a`, the basis
//! `x_j − ω^{c_j}·∏ Y_i^{β_ij}` together with `Y_i^{o_i} − 1`, where `o_i` is
//! the order of parameter i and `β_ij = α_ij / p^{m−o_i}`. Under lex with all
//! x's above all y's the leading monomials are `x_j` and `Y_i^{o_i}`, pairwise
//! coprime, so the set is a Gröbner basis of the transformed ideal.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::arithmetic::{rat, CyclotomicField, CyclotomicNumber, PrimePower};
use crate::csp::{Assignment, McspInstance, SolveOutcome, UnsatCertificate};
use crate::echelon::{parametrize, EchelonOutcome, EchelonSystem};
use crate::error::{invalid, Error, Result};
use crate::instance::Instance;
use crate::poly::{
    divide, interpolate, substitute_reduce, Monomial, MonomialOrder, MultivariatePolynomial, DEFAULT_TERM_GUARD,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SortBasis {
    pub sort: PrimePower,
    /// Indices into the union basis.
    pub elements: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnityBasis {
    /// x's of every sort (ascending prime), then y's.
    pub vars: Arc<Vec<String>>,
    #[serde(skip)]
    pub field: CyclotomicField,
    pub per_sort: Vec<SortBasis>,
    pub basis: Vec<MultivariatePolynomial>,
    /// Exponent period of each variable: the x's are roots of unity of their
    /// component order, the y's of their parameter order.
    pub periods: Vec<Option<u32>>,
    #[serde(skip)]
    pub systems: Vec<EchelonSystem>,
}

impl UnityBasis {
    pub fn order(&self) -> MonomialOrder {
        MonomialOrder::lex()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

/// Builds G′ from per-prime parametrizations over pairwise distinct primes.
pub fn build_unity_basis(systems: &[EchelonSystem]) -> Result<UnityBasis> {
    let mut systems = systems.to_vec();
    systems.sort_by_key(|e| e.sort.p);
    if systems.windows(2).any(|w| w[0].sort.p == w[1].sort.p) {
        return invalid("unity basis needs parametrizations over distinct primes");
    }
    let sorts: Vec<PrimePower> = systems.iter().map(|e| e.sort).collect();
    let field = CyclotomicField::new(&sorts)?;
    let mut names: Vec<String> = systems.iter().flat_map(|e| e.x.iter().cloned()).collect();
    let x_count = names.len();
    names.extend(systems.iter().flat_map(|e| e.y.iter().cloned()));
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
        return invalid(format!("variable name {dup:?} occurs twice in the unity basis"));
    }
    let vars = Arc::new(names);
    let n = vars.len();
    let mut periods = vec![None; n];
    let one = field.one();
    let mut basis = Vec::new();
    let mut per_sort = Vec::new();
    let (mut x_off, mut y_off) = (0usize, x_count);
    for e in &systems {
        let s = e.sort;
        let mut elements = Vec::new();
        for (j, &c) in e.c.iter().enumerate() {
            let mut exps = vec![0u32; n];
            for (i, row) in e.alpha.iter().enumerate() {
                let beta = (row[j] / s.p_pow(e.shift(i))) % e.y_orders[i];
                exps[y_off + i] = beta as u32;
            }
            let x = MultivariatePolynomial::var(vars.clone(), x_off + j);
            let f = MultivariatePolynomial::monomial(vars.clone(), Monomial(exps), field.omega_power(s, c as i128)?);
            elements.push(basis.len());
            basis.push(&x - &f);
            periods[x_off + j] = Some(s.modulus() as u32);
        }
        for (i, &o) in e.y_orders.iter().enumerate() {
            let y_pow = MultivariatePolynomial::monomial(vars.clone(), Monomial::var(n, y_off + i, o as u32), one.clone());
            elements.push(basis.len());
            basis.push(&y_pow - &MultivariatePolynomial::constant(vars.clone(), one.clone()));
            periods[y_off + i] = Some(o as u32);
        }
        per_sort.push(SortBasis { sort: s, elements });
        x_off += e.x.len();
        y_off += e.y.len();
    }
    Ok(UnityBasis { vars, field, per_sort, basis, periods, systems })
}

/// φ_q and φ_q⁻¹ for one component order `q = p^ℓ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SortTransform {
    pub sort: PrimePower,
    /// Interpolates `(a, ω_q^a)` for `a < q`.
    pub phi: MultivariatePolynomial,
    /// Interpolates `(ω_q^a, a)`.
    pub phi_inv: MultivariatePolynomial,
}

/// Everything needed to replay `p ↦ p′`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransformRecord {
    pub sorts: Vec<SortTransform>,
    /// Sort of every normalized variable, in unity-basis order.
    pub variable_sorts: Vec<PrimePower>,
    pub systems: Vec<EchelonSystem>,
    /// Original coordinates, in instance order.
    pub coordinates: Vec<String>,
    /// Replacement of each coordinate over the unity-basis variables.
    pub replacements: Vec<MultivariatePolynomial>,
    pub periods: Vec<Option<u32>>,
}

/// `δ_a(X) = (1/q)·Σ_t ω_q^{−at} X^t`, the indicator of `X = ω_q^a` on q-th roots of unity.
fn root_indicator(
    field: &CyclotomicField,
    vars: &Arc<Vec<String>>,
    var: usize,
    q: PrimePower,
    a: u64,
) -> Result<MultivariatePolynomial> {
    let n = vars.len();
    let inv_q = rat(1, q.modulus() as i64);
    let mut terms = Vec::new();
    for t in 0..q.modulus() {
        let c = field.omega_power(q, -((a * t) as i128))?.scale(&inv_q);
        terms.push((Monomial::var(n, var, t as u32), c));
    }
    MultivariatePolynomial::from_terms(vars.clone(), terms)
}

fn sort_transform(field: &CyclotomicField, q: PrimePower) -> Result<SortTransform> {
    let rationals = CyclotomicField::rationals();
    let mut fwd = Vec::new();
    let mut inv = Vec::new();
    for a in 0..q.modulus() {
        let w = field.omega_power(q, a as i128)?;
        fwd.push((rationals.from_int(a as i64), w.clone()));
        inv.push((w, rationals.from_int(a as i64)));
    }
    Ok(SortTransform { sort: q, phi: interpolate(&fwd, "a")?, phi_inv: interpolate(&inv, "x")? })
}

fn build_record(norm: &McspInstance, inst: &Instance, basis: &UnityBasis) -> Result<TransformRecord> {
    let vars = &basis.vars;
    let field = &basis.field;
    let index_of = |v: usize| -> Result<usize> {
        basis
            .var_index(&norm.variables[v].name)
            .ok_or_else(|| Error::Internal(format!("variable {} missing from the unity basis", norm.variables[v].name)))
    };
    let mut sorts: Vec<SortTransform> = Vec::new();
    let mut replacements = Vec::new();
    for cmap in &norm.provenance.coordinates {
        let comps: Vec<(usize, PrimePower)> = cmap
            .components
            .iter()
            .map(|&v| {
                let nv = &norm.variables[v];
                Ok((index_of(v)?, PrimePower::new(nv.sort.p, nv.exponent)?))
            })
            .collect::<Result<_>>()?;
        for &(_, q) in &comps {
            if !sorts.iter().any(|s| s.sort == q) {
                sorts.push(sort_transform(field, q)?);
            }
        }
        let replacement = if let [(idx, q)] = comps[..] {
            let st = sorts.iter().find(|s| s.sort == q).expect("just inserted");
            let mut r = MultivariatePolynomial::zero(vars.clone());
            for (m, c) in st.phi_inv.terms() {
                r.add_term(Monomial::var(vars.len(), idx, m.0[0]), &c.embed(field)?);
            }
            r
        } else {
            // Composite coordinate: Σ_v v·∏_i δ_{a_i(v)}(X_i) with a(v) the CRT components.
            let mut r = MultivariatePolynomial::zero(vars.clone());
            for value in 0..cmap.modulus {
                let mut term = MultivariatePolynomial::from_rational(vars.clone(), rat(value as i64, 1));
                if value == 0 {
                    continue;
                }
                for (&(idx, q), a) in comps.iter().zip(cmap.crt.from_integer(value)) {
                    term = &term * &root_indicator(field, vars, idx, q, a)?;
                }
                r = &r + &term;
            }
            r
        };
        replacements.push(replacement);
    }
    sorts.sort_by_key(|s| (s.sort.p, s.sort.m));
    let mut periods = basis.periods.clone();
    // An embedded component only takes p^ℓ-th roots of unity.
    for (v, nv) in norm.variables.iter().enumerate() {
        periods[index_of(v)?] = Some(nv.sort.p_pow(nv.exponent) as u32);
    }
    let mut variable_sorts = vec![PrimePower::new(2, 1)?; basis.systems.iter().map(|e| e.x.len()).sum()];
    for (v, nv) in norm.variables.iter().enumerate() {
        variable_sorts[index_of(v)?] = nv.sort;
    }
    Ok(TransformRecord {
        sorts,
        variable_sorts,
        systems: basis.systems.clone(),
        coordinates: inst.coordinate_names(),
        replacements,
        periods,
    })
}

/// `p′(x) = p(φ⁻¹(x))`, reduced modulo `x^{period} − 1`.
///
/// The reduction stays inside the ideal: on the unity basis each x equals a
/// product of ω-powers and y's whose orders divide the x's period, and each
/// `y^{o} − 1` is a basis element, so `x^{period} − 1` lies in ⟨G′⟩.
pub fn transform_poly(p: &MultivariatePolynomial, record: &TransformRecord, guard: u64) -> Result<MultivariatePolynomial> {
    let vars = Arc::new(record.coordinates.clone());
    let p = p.with_vars(vars)?;
    substitute_reduce(&p, &record.replacements, &record.periods, guard)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MembershipCertificate {
    /// `p′ = Σ h_g·g` over the unity basis.
    Cofactors {
        transformed: MultivariatePolynomial,
        basis: Vec<MultivariatePolynomial>,
        cofactors: Vec<MultivariatePolynomial>,
        record: Box<TransformRecord>,
    },
    /// The instance has no solutions.
    Unsat(UnsatCertificate),
}

impl MembershipCertificate {
    /// Recombination (or witness) check.
    pub fn verify(&self) -> bool {
        match self {
            MembershipCertificate::Cofactors { transformed, basis, cofactors, .. } => {
                if basis.len() != cofactors.len() {
                    return false;
                }
                let mut acc = MultivariatePolynomial::zero(transformed.vars_arc().clone());
                for (h, g) in cofactors.iter().zip(basis) {
                    if h.vars() != g.vars() || g.vars() != transformed.vars() {
                        return false;
                    }
                    acc = &acc + &(h * g);
                }
                &acc == transformed
            }
            MembershipCertificate::Unsat(c) => c.verify(),
        }
    }

    /// Also replays the transform of `f` from the stored record.
    pub fn verify_for(&self, f: &MultivariatePolynomial) -> Result<bool> {
        match self {
            MembershipCertificate::Cofactors { transformed, record, .. } => {
                Ok(self.verify() && &transform_poly(f, record, u64::MAX)? == transformed)
            }
            MembershipCertificate::Unsat(_) => Ok(self.verify()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Decision {
    Member { certificate: Box<MembershipCertificate> },
    #[serde(rename = "nonmember")]
    NonMember {
        remainder: MultivariatePolynomial,
        /// A solution (original coordinates) where the polynomial is nonzero.
        witness: Option<Vec<u64>>,
    },
}

impl Decision {
    pub fn is_member(&self) -> bool {
        matches!(self, Decision::Member { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub term_guard: u64,
    /// Refuse inputs above this total degree.
    pub max_degree: Option<u32>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { term_guard: DEFAULT_TERM_GUARD, max_degree: None }
    }
}

#[derive(Clone, Debug)]
pub enum Stage {
    Sat { basis: Box<UnityBasis>, record: Box<TransformRecord> },
    Unsat(UnsatCertificate),
}

/// Normalized instance with its unity basis, built once and queried many times.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub instance: Instance,
    pub normalized: McspInstance,
    pub config: PipelineConfig,
    pub stage: Stage,
}

impl Pipeline {
    pub fn new(instance: Instance) -> Result<Self> {
        Self::with_config(instance, PipelineConfig::default())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::new(Instance::from_json(text)?)
    }

    pub fn with_config(instance: Instance, config: PipelineConfig) -> Result<Self> {
        let normalized = McspInstance::from_instance(&instance)?;
        let reserved: Vec<String> = normalized.variables.iter().map(|v| v.name.clone()).collect();
        let mut systems = Vec::new();
        for sys in normalized.prime_systems()? {
            let names: Vec<String> = sys.vars.iter().map(|&v| normalized.variables[v].name.clone()).collect();
            match parametrize(&sys, &names, &reserved)? {
                EchelonOutcome::System(e) => systems.push(e),
                EchelonOutcome::Unsat(_) => {
                    return match normalized.solve()? {
                        SolveOutcome::Unsat(cert) => Ok(Pipeline { instance, normalized, config, stage: Stage::Unsat(cert) }),
                        SolveOutcome::Sat(_) => Err(Error::Internal("parametrization and solver disagree on satisfiability".into())),
                    };
                }
            }
        }
        let basis = build_unity_basis(&systems)?;
        let record = build_record(&normalized, &instance, &basis)?;
        Ok(Pipeline { instance, normalized, config, stage: Stage::Sat { basis: Box::new(basis), record: Box::new(record) } })
    }

    pub fn is_sat(&self) -> bool {
        matches!(self.stage, Stage::Sat { .. })
    }

    pub fn basis(&self) -> Option<&UnityBasis> {
        match &self.stage {
            Stage::Sat { basis, .. } => Some(basis),
            Stage::Unsat(_) => None,
        }
    }

    pub fn record(&self) -> Option<&TransformRecord> {
        match &self.stage {
            Stage::Sat { record, .. } => Some(record),
            Stage::Unsat(_) => None,
        }
    }

    pub(crate) fn check_degree(&self, f: &MultivariatePolynomial) -> Result<()> {
        if let (Some(bound), Some(d)) = (self.config.max_degree, f.degree()) {
            if d > bound {
                return Err(Error::GuardRefusal { what: format!("input polynomial of degree {d}"), bound: bound as u64 });
            }
        }
        Ok(())
    }

    pub fn transform(&self, f: &MultivariatePolynomial) -> Result<MultivariatePolynomial> {
        self.check_degree(f)?;
        match &self.stage {
            Stage::Sat { record, .. } => transform_poly(f, record, self.config.term_guard),
            Stage::Unsat(_) => Err(Error::InvalidState("the instance is unsatisfiable; there is no unity basis".into())),
        }
    }

    /// Remainder of `f′` on division by the unity basis.
    pub fn remainder(&self, f: &MultivariatePolynomial) -> Result<MultivariatePolynomial> {
        let basis = self.basis().ok_or_else(|| Error::InvalidState("the instance is unsatisfiable".into()))?;
        Ok(divide(&self.transform(f)?, &basis.basis, &basis.order())?.remainder)
    }

    /// Decides `f ∈ I(P)`. With `witness_cap`, a NonMember answer also
    /// searches up to that many solutions for one where `f` is nonzero.
    pub fn decide(&self, f: &MultivariatePolynomial, witness_cap: Option<u64>) -> Result<Decision> {
        self.check_degree(f)?;
        let (basis, record) = match &self.stage {
            Stage::Unsat(cert) => {
                return Ok(Decision::Member { certificate: Box::new(MembershipCertificate::Unsat(cert.clone())) })
            }
            Stage::Sat { basis, record } => (basis, record),
        };
        let transformed = transform_poly(f, record, self.config.term_guard)?;
        let div = divide(&transformed, &basis.basis, &basis.order())?;
        if div.remainder.is_zero() {
            return Ok(Decision::Member {
                certificate: Box::new(MembershipCertificate::Cofactors {
                    transformed,
                    basis: basis.basis.clone(),
                    cofactors: div.quotients,
                    record: record.clone(),
                }),
            });
        }
        let witness = match witness_cap {
            Some(cap) => self.find_witness(f, cap)?,
            None => None,
        };
        Ok(Decision::NonMember { remainder: div.remainder, witness })
    }

    pub fn certify(&self, f: &MultivariatePolynomial) -> Result<MembershipCertificate> {
        match self.decide(f, None)? {
            Decision::Member { certificate } => Ok(*certificate),
            Decision::NonMember { .. } => Err(Error::InvalidState("certify called on a non-member polynomial".into())),
        }
    }

    /// Solutions in original coordinates, read off the parametrizations.
    pub fn solutions(&self, cap: u64) -> Result<Vec<Vec<u64>>> {
        let mut out = Vec::new();
        self.for_each_solution(cap, |x| out.push(x.to_vec()))?;
        Ok(out)
    }

    /// Calls `visit` on every solution; refuses more than `cap`.
    fn for_each_solution(&self, cap: u64, mut visit: impl FnMut(&[u64])) -> Result<()> {
        let Some(basis) = self.basis() else { return Ok(()) };
        let total: u128 = basis.systems.iter().map(|e| e.solution_count()).product();
        if total > cap as u128 {
            return Err(Error::GuardRefusal { what: format!("{total} solutions to enumerate"), bound: cap });
        }
        let per_system: Vec<Vec<Vec<u64>>> = basis.systems.iter().map(|e| e.enumerate(cap as u128)).collect::<Result<_>>()?;
        let mut idx = vec![0usize; per_system.len()];
        let mut values = vec![0u64; self.normalized.variables.len()];
        for _ in 0..total {
            for ((e, sols), &k) in basis.systems.iter().zip(&per_system).zip(&idx) {
                for (&v, &a) in e.vars.iter().zip(&sols[k]) {
                    values[v] = a;
                }
            }
            let coords = self.normalized.to_original(&Assignment { values: values.clone() })?;
            visit(&coords);
            for (i, k) in idx.iter_mut().enumerate().rev() {
                *k += 1;
                if *k < per_system[i].len() {
                    break;
                }
                *k = 0;
            }
        }
        Ok(())
    }

    /// The lexicographically least solution where `f` does not vanish; the
    /// search gives up when there are more than `cap` solutions.
    pub fn find_witness(&self, f: &MultivariatePolynomial, cap: u64) -> Result<Option<Vec<u64>>> {
        let vars = Arc::new(self.instance.coordinate_names());
        let f = f.with_vars(vars)?;
        let mut sols = match self.solutions(cap) {
            Ok(s) => s,
            Err(Error::GuardRefusal { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        sols.sort();
        for x in sols {
            let point: Vec<_> = x.iter().map(|&v| rat(v as i64, 1)).collect();
            if !f.evaluate_rational(&point)?.is_zero() {
                return Ok(Some(x));
            }
        }
        Ok(None)
    }

    /// Image of a solution (original coordinates) in the unity-basis variables.
    pub fn lift_solution(&self, coords: &[u64]) -> Result<Vec<CyclotomicNumber>> {
        let basis = self.basis().ok_or_else(|| Error::InvalidState("the instance is unsatisfiable".into()))?;
        let a = self.normalized.from_original(coords)?;
        let mut point = vec![basis.field.zero(); basis.vars.len()];
        let x_count: usize = basis.systems.iter().map(|e| e.x.len()).sum();
        let (mut x_off, mut y_off) = (0usize, x_count);
        for e in &basis.systems {
            let xs: Vec<u64> = e.vars.iter().map(|&v| a.values[v]).collect();
            let Some(ys) = e.invert(&xs)? else {
                return invalid("the point is not a solution of the instance");
            };
            for (j, &x) in xs.iter().enumerate() {
                point[x_off + j] = basis.field.omega_power(e.sort, x as i128)?;
            }
            for (i, &y) in ys.iter().enumerate() {
                let order = PrimePower::from_modulus(e.y_orders[i])?;
                point[y_off + i] = basis.field.omega_power(order, y as i128)?;
            }
            x_off += e.x.len();
            y_off += e.y.len();
        }
        Ok(point)
    }
}

pub fn decide_imp(f: &MultivariatePolynomial, instance: &Instance) -> Result<Decision> {
    Pipeline::new(instance.clone())?.decide(f, None)
}

pub fn certify(f: &MultivariatePolynomial, instance: &Instance) -> Result<MembershipCertificate> {
    Pipeline::new(instance.clone())?.certify(f)
}

/// Generators of the vanishing ideal of an explicit relation over integer
/// domains `{0, …, n−1}`: the indicator generator, written in its reduced form
/// `1 − Σ_{v∈R} ∏_j δ_{v_j}(x_j)`, plus the domain polynomials `∏_a (x − a)`.
pub fn relation_generators(vars: &[String], tuples: &[Vec<u64>], domains: &[u64]) -> Result<Vec<MultivariatePolynomial>> {
    if vars.len() != domains.len() {
        return invalid("one domain size is needed per variable");
    }
    let arc = Arc::new(vars.to_vec());
    let q = CyclotomicField::rationals();
    if tuples.is_empty() {
        return Ok(vec![MultivariatePolynomial::constant(arc, q.one())]);
    }
    let mut indicators: Vec<Vec<MultivariatePolynomial>> = Vec::new();
    for (i, &n) in domains.iter().enumerate() {
        let mut per_value = Vec::new();
        for a in 0..n {
            let pts: Vec<_> = (0..n).map(|b| (q.from_int(b as i64), q.from_int((a == b) as i64))).collect();
            let delta = interpolate(&pts, &vars[i])?;
            let mut lifted = MultivariatePolynomial::zero(arc.clone());
            for (m, c) in delta.terms() {
                lifted.add_term(Monomial::var(vars.len(), i, m.0[0]), c);
            }
            per_value.push(lifted);
        }
        indicators.push(per_value);
    }
    let mut g = MultivariatePolynomial::constant(arc.clone(), q.one());
    for t in tuples {
        if t.len() != vars.len() || t.iter().zip(domains).any(|(&a, &n)| a >= n) {
            return invalid(format!("tuple {t:?} does not fit the domains"));
        }
        let mut prod = MultivariatePolynomial::constant(arc.clone(), q.one());
        for (j, &a) in t.iter().enumerate() {
            prod = &prod * &indicators[j][a as usize];
        }
        g = &g - &prod;
    }
    let mut out = Vec::new();
    if !g.is_zero() {
        out.push(g);
    }
    for (i, &n) in domains.iter().enumerate() {
        let mut d = MultivariatePolynomial::constant(arc.clone(), q.one());
        for a in 0..n {
            let lin = &MultivariatePolynomial::var(arc.clone(), i) - &MultivariatePolynomial::from_rational(arc.clone(), rat(a as i64, 1));
            d = &d * &lin;
        }
        out.push(d);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{buchberger_check, parse_polynomial};

    const PARITY: &str = r#"{"modulus":2,"variables":[{"name":"x1"},{"name":"x2"}],
        "constraints":[{"scope":["x1","x2"],"relation":{"linear":{"coeffs":[1,1],"const":1}}}]}"#;
    const AFFINE_Z4: &str = r#"{"modulus":4,"variables":[{"name":"x"}],
        "constraints":[{"scope":["x"],"relation":{"tuples":[[1],[3]]}}]}"#;

    fn poly(p: &Pipeline, s: &str) -> MultivariatePolynomial {
        parse_polynomial(s, Some(&p.instance.coordinate_names())).unwrap()
    }

    fn over(basis: &UnityBasis, s: &str) -> MultivariatePolynomial {
        parse_polynomial(s, Some(&basis.vars)).unwrap()
    }

    #[test]
    fn parity_basis() {
        let p = Pipeline::from_json(PARITY).unwrap();
        let b = p.basis().unwrap();
        assert_eq!(b.vars.as_slice(), ["x1", "x2", "y2_1"]);
        let expected: Vec<_> = ["x1 + y2_1", "x2 - y2_1", "y2_1^2 - 1"].iter().map(|s| over(b, s)).collect();
        assert_eq!(b.basis, expected);
        assert!(buchberger_check(&b.basis, &b.order()).unwrap().passed());
    }

    #[test]
    fn z4_basis_uses_parameter_order() {
        let p = Pipeline::from_json(AFFINE_Z4).unwrap();
        let b = p.basis().unwrap();
        // x = 2y + 1 with y of order 2: x − ω₄·y, y² − 1.
        let expected: Vec<_> = ["x - w4*y2_1", "y2_1^2 - 1"].iter().map(|s| over(b, s)).collect();
        assert_eq!(b.basis, expected);
        let f = poly(&p, "(x - 1)*(x - 3)");
        assert!(p.decide(&f, None).unwrap().is_member());
    }

    #[test]
    fn pinned_basis() {
        let p = Pipeline::from_json(r#"{"modulus":3,"variables":[{"name":"x"}],
            "constraints":[{"scope":["x"],"relation":{"tuples":[[2]]}}]}"#)
        .unwrap();
        let b = p.basis().unwrap();
        assert_eq!(b.basis, vec![over(b, "x - w3^2")]);
    }

    #[test]
    fn transform_examples() {
        let p = Pipeline::from_json(PARITY).unwrap();
        let b = p.basis().unwrap();
        assert_eq!(p.transform(&poly(&p, "x1*x2")).unwrap(), over(b, "(1 - x1 - x2 + x1*x2)/4"));
        assert_eq!(p.transform(&poly(&p, "1")).unwrap(), over(b, "1"));
        assert_eq!(p.transform(&poly(&p, "x1 + x2")).unwrap(), over(b, "1 - (x1 + x2)/2"));
    }

    #[test]
    fn record_inverts() {
        let p = Pipeline::from_json(r#"{"variables":[{"name":"a","sort":8},{"name":"b","sort":9},{"name":"c","sort":2}]}"#).unwrap();
        let r = p.record().unwrap();
        let q = CyclotomicField::rationals();
        for st in &r.sorts {
            for a in 0..st.sort.modulus() {
                let w = st.phi.evaluate(&[q.from_int(a as i64)]).unwrap();
                assert_eq!(st.phi_inv.evaluate(std::slice::from_ref(&w)).unwrap(), q.from_int(a as i64));
                assert_eq!(st.phi.evaluate(&[st.phi_inv.evaluate(std::slice::from_ref(&w)).unwrap()]).unwrap(), w);
            }
        }
        assert_eq!(r.sorts.len(), 3);
    }

    #[test]
    fn decide_examples() {
        let p = Pipeline::from_json(PARITY).unwrap();
        let d = p.decide(&poly(&p, "x1*x2"), Some(100)).unwrap();
        let Decision::Member { certificate } = d else { panic!("expected member") };
        assert!(certificate.verify());
        assert!(certificate.verify_for(&poly(&p, "x1*x2")).unwrap());

        let d = p.decide(&poly(&p, "x1 + x2"), Some(100)).unwrap();
        let Decision::NonMember { remainder, witness } = d else { panic!("expected non-member") };
        assert_eq!(remainder, over(p.basis().unwrap(), "1"));
        assert_eq!(witness, Some(vec![0, 1]));
        assert!(p.certify(&poly(&p, "x1 + x2")).is_err());

        let zero = p.certify(&poly(&p, "0")).unwrap();
        let MembershipCertificate::Cofactors { cofactors, .. } = &zero else { panic!() };
        assert!(cofactors.iter().all(|h| h.is_zero()));
    }

    #[test]
    fn unsat_instance() {
        let p = Pipeline::from_json(r#"{"modulus":4,"variables":[{"name":"x"}],
            "constraints":[{"scope":["x"],"relation":{"linear":{"coeffs":[2],"const":1}}}]}"#)
        .unwrap();
        assert!(!p.is_sat());
        let cert = p.certify(&poly(&p, "1")).unwrap();
        let MembershipCertificate::Unsat(u) = &cert else { panic!() };
        assert!(cert.verify());
        assert_eq!(u.witness.contradiction, 2);
    }

    #[test]
    fn composite_coordinate() {
        let p = Pipeline::from_json(r#"{"modulus":6,"variables":[{"name":"x"}],
            "constraints":[{"scope":["x"],"relation":{"tuples":[[1],[3],[5]]}}]}"#)
        .unwrap();
        let mut sols = p.solutions(100).unwrap();
        sols.sort();
        assert_eq!(sols, vec![vec![1], vec![3], vec![5]]);
        assert!(p.decide(&poly(&p, "(x - 1)*(x - 3)*(x - 5)"), None).unwrap().is_member());
        assert!(!p.decide(&poly(&p, "(x - 1)*(x - 3)"), None).unwrap().is_member());
        let r = p.record().unwrap();
        assert!(r.replacements[0].degree().unwrap() <= 3);
        for s in &sols {
            let point = p.lift_solution(s).unwrap();
            for g in &p.basis().unwrap().basis {
                assert!(g.evaluate(&point).unwrap().is_zero());
            }
            let value = r.replacements[0].evaluate(&point).unwrap();
            assert_eq!(value, CyclotomicField::rationals().from_int(s[0] as i64));
        }
    }

    #[test]
    fn relation_generator_examples() {
        let x = vec!["x".to_string()];
        let g = relation_generators(&x, &[vec![0], vec![1]], &[2]).unwrap();
        assert_eq!(g, vec![parse_polynomial("x^2 - x", Some(&x)).unwrap()]);

        let xy = vec!["x".to_string(), "y".to_string()];
        let g = relation_generators(&xy, &[vec![0, 0], vec![1, 1]], &[2, 2]).unwrap();
        assert_eq!(g[0], parse_polynomial("1 - ((1 - x)*(1 - y) + x*y)", Some(&xy)).unwrap());
        for a in 0..2 {
            for b in 0..2 {
                let pt = [rat(a, 1), rat(b, 1)];
                let vanishes = g.iter().all(|p| p.evaluate_rational(&pt).unwrap().is_zero());
                assert_eq!(vanishes, a == b);
            }
        }
        let empty = relation_generators(&xy, &[], &[2, 2]).unwrap();
        assert_eq!(empty, vec![parse_polynomial("1", Some(&xy)).unwrap()]);
    }
}
