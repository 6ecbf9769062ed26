//! Parametrized solution sets of single-prime congruence systems.
//!
//! The solution set of a system over Z_{p^m} is `φ₀ + K` for a subgroup K of
//! homogeneous solutions. The generators are built greedily: among the not yet
//! pinned variables pick one whose shifted value set contains an element of
//! least p-adic valuation v, take a solution `φ_i` with that shift, record
//! `φ'_i = φ_i − φ₀` and pin the variable to `φ₀`. Each `φ'_i` has order
//! `p^{m−v}` and K is the direct sum of the cyclic groups they generate, so
//! `y ↦ φ₀ + Σ y_i φ'_i` with `y_i ∈ Z_{p^{m−v_i}}` is a bijection onto the
//! solutions.

use serde::{Deserialize, Serialize};

use crate::arithmetic::PrimePower;
use crate::csp::PrimeSystem;
use crate::error::{invalid, Error, Result};
use crate::zpm::{CongruenceSolution, UnsatWitness};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EchelonSystem {
    pub sort: PrimePower,
    /// Dependent variables, one per system variable.
    pub x: Vec<String>,
    /// Fresh free parameters.
    pub y: Vec<String>,
    /// `alpha[i][j]` is the coefficient of `y_i` in `x_j`.
    pub alpha: Vec<Vec<u64>>,
    pub c: Vec<u64>,
    /// Domain size `p^{o_i}` of each parameter.
    pub y_orders: Vec<u64>,
    /// Variable pinned right after generator i was found.
    pub pivots: Vec<usize>,
    /// Global variable indices of `x`.
    pub vars: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EchelonOutcome {
    System(EchelonSystem),
    Unsat(UnsatWitness),
}

fn solution(s: CongruenceSolution) -> Option<Vec<u64>> {
    match s {
        CongruenceSolution::Solution(x) => Some(x),
        CongruenceSolution::Unsat(_) => None,
    }
}

/// Picks a parameter name not in `taken`.
fn fresh_name(base: String, taken: &[String]) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('_');
    }
    name
}

/// Parametrizes the solutions of `sys`. `x_names` names the system variables;
/// parameter names avoid everything in `reserved`.
pub fn parametrize(sys: &PrimeSystem, x_names: &[String], reserved: &[String]) -> Result<EchelonOutcome> {
    let n = sys.vars.len();
    if x_names.len() != n {
        return invalid(format!("{} names for {} variables", x_names.len(), n));
    }
    if sys.matrix.modulus() != sys.sort {
        return invalid("system rows are not over its own sort");
    }
    let s = sys.sort;
    let phi0 = match sys.solve_with_pins(&[])? {
        CongruenceSolution::Solution(x) => x,
        CongruenceSolution::Unsat(w) => return Ok(EchelonOutcome::Unsat(w)),
    };
    let mut pins: Vec<(usize, u64)> = Vec::new();
    let mut alpha = Vec::new();
    let mut y_orders = Vec::new();
    let mut pivots = Vec::new();
    loop {
        // (valuation, variable, solution) of the best shift found so far.
        let mut best: Option<(u32, usize, Vec<u64>)> = None;
        for j in 0..n {
            if pins.iter().any(|&(v, _)| v == j) {
                continue;
            }
            let limit = best.as_ref().map_or(s.m, |b| b.0);
            for k in 0..limit {
                let mut trial = pins.clone();
                trial.push((j, s.add(phi0[j], s.p_pow(k))));
                if let Some(x) = solution(sys.solve_with_pins(&trial)?) {
                    best = Some((k, j, x));
                    break;
                }
            }
        }
        let Some((v, j, phi)) = best else { break };
        let gen: Vec<u64> = phi.iter().zip(&phi0).map(|(&a, &b)| s.sub(a, b)).collect();
        if gen[j] != s.p_pow(v) {
            return Err(Error::Internal("pinned solution does not realize the chosen shift".into()));
        }
        alpha.push(gen);
        y_orders.push(s.p.pow(s.m - v));
        pivots.push(j);
        pins.push((j, phi0[j]));
    }
    let mut taken: Vec<String> = reserved.to_vec();
    taken.extend(x_names.iter().cloned());
    let mut y = Vec::with_capacity(alpha.len());
    for i in 0..alpha.len() {
        let name = fresh_name(format!("y{}_{}", s.p, i + 1), &taken);
        taken.push(name.clone());
        y.push(name);
    }
    Ok(EchelonOutcome::System(EchelonSystem {
        sort: s,
        x: x_names.to_vec(),
        y,
        alpha,
        c: phi0,
        y_orders,
        pivots,
        vars: sys.vars.clone(),
    }))
}

impl EchelonSystem {
    pub fn num_params(&self) -> usize {
        self.y.len()
    }

    /// `p`-adic exponent `m − o_i` by which `alpha[i]` is divisible.
    pub fn shift(&self, i: usize) -> u32 {
        self.sort.m - self.y_orders[i].ilog(self.sort.p)
    }

    /// `x = c + Σ y_i·alpha_i`.
    pub fn evaluate(&self, y: &[u64]) -> Result<Vec<u64>> {
        if y.len() != self.y.len() {
            return invalid(format!("{} parameter values for {} parameters", y.len(), self.y.len()));
        }
        let s = self.sort;
        let mut x = self.c.clone();
        for (row, &yi) in self.alpha.iter().zip(y) {
            for (xj, &a) in x.iter_mut().zip(row) {
                *xj = s.add(*xj, s.mul(a, yi));
            }
        }
        Ok(x)
    }

    /// Parameter values of a solution, or `None` if `x` is not a solution.
    pub fn invert(&self, x: &[u64]) -> Result<Option<Vec<u64>>> {
        if x.len() != self.x.len() {
            return invalid(format!("{} values for {} variables", x.len(), self.x.len()));
        }
        let s = self.sort;
        let mut y = Vec::with_capacity(self.y.len());
        for (i, &j) in self.pivots.iter().enumerate() {
            let mut r = s.sub(s.reduce(x[j] as i128), self.c[j]);
            for (k, &yk) in y.iter().enumerate() {
                r = s.sub(r, s.mul(self.alpha[k][j], yk));
            }
            let unit = s.p_pow(self.shift(i));
            if !r.is_multiple_of(unit) {
                return Ok(None);
            }
            y.push((r / unit) % self.y_orders[i]);
        }
        let back = self.evaluate(&y)?;
        let xs: Vec<u64> = x.iter().map(|&v| s.reduce(v as i128)).collect();
        Ok((back == xs).then_some(y))
    }

    /// Number of solutions, `∏ y_orders`.
    pub fn solution_count(&self) -> u128 {
        self.y_orders.iter().map(|&o| o as u128).product()
    }

    /// All parameter vectors in mixed-radix order, at most `cap` of them.
    pub fn enumerate(&self, cap: u128) -> Result<Vec<Vec<u64>>> {
        let total = self.solution_count();
        if total > cap {
            return Err(Error::GuardRefusal { what: format!("{total} parametrized solutions"), bound: cap.min(u64::MAX as u128) as u64 });
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut y = vec![0u64; self.y.len()];
        for _ in 0..total {
            out.push(self.evaluate(&y)?);
            for (i, yi) in y.iter_mut().enumerate().rev() {
                *yi += 1;
                if *yi < self.y_orders[i] {
                    break;
                }
                *yi = 0;
            }
        }
        Ok(out)
    }
}
