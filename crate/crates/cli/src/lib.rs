//! Command runner behind the `abelian-imp` binary.
//!
//! Every command reads one instance file and writes a single JSON document
//! (or a few lines of text) to stdout. Failures are reported as
//! `{"error": {"kind", "message"}}` with a nonzero exit status.

use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;
use std::sync::Arc;

use abelian_imp::arithmetic::{format_rational, Rational};
use abelian_imp::csp::{McspInstance, SolveOutcome};
use abelian_imp::instance::{brute_force_solutions, vanishing_oracle, Instance, DEFAULT_CAP};
use abelian_imp::poly::{parse_polynomial, MultivariatePolynomial};
use abelian_imp::unity::{Decision, MembershipCertificate, Pipeline, PipelineConfig};
use abelian_imp::ximp::{truncated_gb, ximp_search, XimpQuery};
use abelian_imp::Error;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_GUARD: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Decide,
    Certify,
    Gb,
    Ximp,
    Solve,
    Enumerate,
    CheckAffine,
    Transform,
    Oracle,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Where an input comes from. A path of `-` means stdin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Stdin,
    Path(PathBuf),
}

impl Input {
    pub fn from_arg(arg: &str) -> Self {
        if arg == "-" {
            Input::Stdin
        } else {
            Input::Path(PathBuf::from(arg))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub instance: Input,
    /// Polynomials given inline, in the text syntax.
    pub polys: Vec<String>,
    /// Polynomial files: a JSON polynomial, a JSON array of them, or text
    /// with one polynomial per line.
    pub poly_files: Vec<Input>,
    /// Truncation degree for `gb`; a degree guard for the other commands.
    pub degree: Option<u32>,
    /// Enumeration cap for solution searches.
    pub cap: u64,
    pub witness: bool,
    pub pin: Option<usize>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command, instance: Input) -> Self {
        RunConfig {
            command,
            instance,
            polys: Vec::new(),
            poly_files: Vec::new(),
            degree: None,
            cap: DEFAULT_CAP,
            witness: false,
            pin: None,
            format: Format::Json,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn classify(f: &Failure) -> (i32, &'static str, String) {
    match f {
        Failure::Io(m) => (EXIT_INPUT, "io", m.clone()),
        Failure::Lib(e) => {
            let kind = match e {
                Error::Parse(_) => "parse",
                Error::InvalidParameter(_) | Error::DivisionByZero => "invalid-input",
                Error::NotAffineInvariant { .. } => "not-affine",
                Error::InvalidState(_) => "invalid-state",
                Error::GuardRefusal { .. } => "guard",
                Error::Internal(_) => "internal",
            };
            let status = match e {
                Error::GuardRefusal { .. } => EXIT_GUARD,
                Error::Internal(_) => EXIT_INTERNAL,
                _ => EXIT_INPUT,
            };
            (status, kind, e.to_string())
        }
    }
}

/// Reads every input at most once; stdin may back only one of them.
struct Inputs<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
}

impl Inputs<'_> {
    fn read(&mut self, input: &Input) -> Outcome<String> {
        match input {
            Input::Stdin => {
                if self.stdin_used {
                    return Err(Failure::Io("stdin can back only one input".into()));
                }
                self.stdin_used = true;
                let mut s = String::new();
                self.stdin.read_to_string(&mut s).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
                Ok(s)
            }
            Input::Path(p) => std::fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        }
    }
}

fn parse_poly_file(text: &str, names: &Arc<Vec<String>>) -> Outcome<Vec<MultivariatePolynomial>> {
    let trimmed = text.trim_start();
    let rebind = |p: MultivariatePolynomial| p.with_vars(names.clone()).map_err(Failure::from);
    if trimmed.starts_with('[') {
        let ps: Vec<MultivariatePolynomial> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("polynomial file: {e}")))?;
        ps.into_iter().map(rebind).collect()
    } else if trimmed.starts_with('{') {
        let p: MultivariatePolynomial =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("polynomial file: {e}")))?;
        Ok(vec![rebind(p)?])
    } else {
        text.lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|l| Ok(parse_polynomial(l, Some(names))?))
            .collect()
    }
}

fn rationals(c: &[Rational]) -> Vec<String> {
    c.iter().map(format_rational).collect()
}

fn tuple_text(x: &[u64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

struct Context {
    config: RunConfig,
    instance: Instance,
    polys: Vec<MultivariatePolynomial>,
}

impl Context {
    fn pipeline(&self) -> Outcome<Pipeline> {
        let mut pc = PipelineConfig::default();
        if self.config.command != Command::Gb {
            pc.max_degree = self.config.degree;
        }
        Ok(Pipeline::with_config(self.instance.clone(), pc)?)
    }

    fn single_poly(&self) -> Outcome<&MultivariatePolynomial> {
        match self.polys.as_slice() {
            [f] => Ok(f),
            ps => Err(Error::InvalidParameter(format!("expected exactly one polynomial, got {}", ps.len())).into()),
        }
    }

    fn optional_poly(&self) -> Outcome<Option<&MultivariatePolynomial>> {
        match self.polys.len() {
            0 => Ok(None),
            _ => self.single_poly().map(Some),
        }
    }

    fn witness_cap(&self) -> Option<u64> {
        self.config.witness.then_some(self.config.cap)
    }
}

/// Runs one command. `stdin` backs any input given as `-`.
pub fn run(config: &RunConfig, stdin: &mut dyn Read) -> Report {
    match execute(config, stdin) {
        Ok((value, text)) => {
            let stdout = match config.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&value).expect("serializable")),
                Format::Text => text,
            };
            Report { status: EXIT_OK, stdout, stderr: String::new() }
        }
        Err(f) => {
            let (status, kind, message) = classify(&f);
            let stdout = match config.format {
                Format::Json => {
                    let v = json!({"error": {"kind": kind, "message": message}});
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable"))
                }
                Format::Text => String::new(),
            };
            Report { status, stdout, stderr: format!("error ({kind}): {message}\n") }
        }
    }
}

fn execute(config: &RunConfig, stdin: &mut dyn Read) -> Outcome<(Value, String)> {
    if config.cap == 0 {
        return Err(Error::InvalidParameter("--cap must be at least 1".into()).into());
    }
    let mut inputs = Inputs { stdin, stdin_used: false };
    let text = inputs.read(&config.instance)?;
    let instance = Instance::from_json(&text)?;
    let names = Arc::new(instance.coordinate_names());
    let mut polys = Vec::new();
    for p in &config.polys {
        polys.push(parse_polynomial(p, Some(&names))?);
    }
    for file in &config.poly_files {
        let text = inputs.read(file)?;
        polys.extend(parse_poly_file(&text, &names)?);
    }
    let ctx = Context { config: config.clone(), instance, polys };
    match config.command {
        Command::Decide => decide(&ctx, false),
        Command::Certify => decide(&ctx, true),
        Command::Gb => gb(&ctx),
        Command::Ximp => ximp(&ctx),
        Command::Solve => solve(&ctx),
        Command::Enumerate => enumerate(&ctx),
        Command::CheckAffine => check_affine(&ctx),
        Command::Transform => transform(&ctx),
        Command::Oracle => oracle(&ctx),
    }
}

fn decide(ctx: &Context, with_certificate: bool) -> Outcome<(Value, String)> {
    let f = ctx.single_poly()?;
    let pipeline = ctx.pipeline()?;
    let decision = pipeline.decide(f, ctx.witness_cap())?;
    let mut text = String::new();
    let value = match &decision {
        Decision::Member { certificate } => {
            if !certificate.verify_for(f)? {
                return Err(Error::Internal("membership certificate failed verification".into()).into());
            }
            writeln!(text, "member").unwrap();
            let remainder = MultivariatePolynomial::zero(f.vars_arc().clone());
            if with_certificate {
                match certificate.as_ref() {
                    MembershipCertificate::Cofactors { transformed, basis, cofactors, .. } => {
                        writeln!(text, "p' = {transformed}").unwrap();
                        for (h, g) in cofactors.iter().zip(basis) {
                            if !h.is_zero() {
                                writeln!(text, "  + ({h}) * ({g})").unwrap();
                            }
                        }
                    }
                    MembershipCertificate::Unsat(u) => {
                        writeln!(text, "unsatisfiable over {}: combination {:?} gives 0 = {}", u.sort, u.witness.combination, u.witness.contradiction)
                            .unwrap();
                    }
                }
            }
            json!({
                "verdict": "member",
                "remainder": remainder,
                "certificate": if with_certificate { serde_json::to_value(certificate).expect("serializable") } else { Value::Null },
                "witness": Value::Null,
            })
        }
        Decision::NonMember { remainder, witness } => {
            writeln!(text, "nonmember").unwrap();
            writeln!(text, "remainder: {remainder}").unwrap();
            if let Some(w) = witness {
                writeln!(text, "witness: {}", tuple_text(w)).unwrap();
            }
            json!({"verdict": "nonmember", "remainder": remainder, "certificate": Value::Null, "witness": witness})
        }
    };
    Ok((value, text))
}

fn gb(ctx: &Context) -> Outcome<(Value, String)> {
    let d = ctx.config.degree.ok_or_else(|| Error::InvalidParameter("gb needs --degree".into()))?;
    let b = truncated_gb(&ctx.pipeline()?, d)?;
    let text: String = b.basis.iter().map(|g| format!("{g}\n")).collect();
    Ok((json!({"degree": d, "vars": b.vars, "basis": b.basis}), text))
}

fn ximp(ctx: &Context) -> Outcome<(Value, String)> {
    let query = XimpQuery { polys: ctx.polys.clone(), pin: ctx.config.pin };
    let c = ximp_search(&ctx.pipeline()?, &query)?;
    let text = match &c {
        Some(c) => format!("c = ({})\n", rationals(c).join(", ")),
        None => "none\n".to_string(),
    };
    Ok((json!({"c": c.as_deref().map(rationals)}), text))
}

fn solve(ctx: &Context) -> Outcome<(Value, String)> {
    let norm = McspInstance::from_instance(&ctx.instance)?;
    match norm.solve()? {
        SolveOutcome::Sat(a) => {
            let x = norm.to_original(&a)?;
            let names = ctx.instance.coordinate_names();
            let text: String = names.iter().zip(&x).map(|(n, v)| format!("{n} = {v}\n")).collect();
            Ok((json!({"status": "sat", "vars": names, "solution": x}), text))
        }
        SolveOutcome::Unsat(cert) => {
            if !cert.verify() {
                return Err(Error::Internal("infeasibility certificate failed verification".into()).into());
            }
            let text = format!(
                "unsat over {}: combination {:?} gives 0 = {}\n",
                cert.sort, cert.witness.combination, cert.witness.contradiction
            );
            Ok((json!({"status": "unsat", "certificate": cert}), text))
        }
    }
}

fn enumerate(ctx: &Context) -> Outcome<(Value, String)> {
    let norm = McspInstance::from_instance(&ctx.instance)?;
    let mut sols = norm
        .enumerate_solutions(ctx.config.cap)?
        .iter()
        .map(|a| norm.to_original(a))
        .collect::<abelian_imp::Result<Vec<_>>>()?;
    sols.sort();
    let text: String = sols.iter().map(|x| format!("{}\n", tuple_text(x))).collect();
    Ok((json!({"vars": ctx.instance.coordinate_names(), "count": sols.len(), "solutions": sols}), text))
}

fn check_affine(ctx: &Context) -> Outcome<(Value, String)> {
    let inst = &ctx.instance;
    let mut items = Vec::new();
    let mut text = String::new();
    for c in &inst.constraints {
        let label = c.label(inst);
        let item = match &c.relation {
            abelian_imp::instance::Relation::Linear { .. } => {
                writeln!(text, "{label}: affine (linear)").unwrap();
                json!({"constraint": label, "affine": true, "coset": Value::Null})
            }
            _ => match c.coset(inst) {
                Ok(coset) => {
                    writeln!(text, "{label}: affine").unwrap();
                    json!({"constraint": label, "affine": true, "coset": coset})
                }
                Err(Error::NotAffineInvariant { witness, image, .. }) => {
                    writeln!(
                        text,
                        "{label}: not affine: {} - {} + {} = {}",
                        tuple_text(&witness[0]),
                        tuple_text(&witness[1]),
                        tuple_text(&witness[2]),
                        tuple_text(&image)
                    )
                    .unwrap();
                    json!({"constraint": label, "affine": false, "witness": witness, "image": image})
                }
                Err(e) => return Err(e.into()),
            },
        };
        items.push(item);
    }
    Ok((json!({"constraints": items}), text))
}

fn transform(ctx: &Context) -> Outcome<(Value, String)> {
    let pipeline = ctx.pipeline()?;
    let (Some(basis), Some(record)) = (pipeline.basis(), pipeline.record()) else {
        return Err(Error::InvalidState("the instance is unsatisfiable; there is no unity basis".into()).into());
    };
    let transformed = match ctx.optional_poly()? {
        Some(f) => Some(pipeline.transform(f)?),
        None => None,
    };
    let mut text = String::new();
    writeln!(text, "vars: {}", basis.vars.join(", ")).unwrap();
    for g in &basis.basis {
        writeln!(text, "G': {g}").unwrap();
    }
    for s in &record.sorts {
        writeln!(text, "phi[{}]^-1 = {}", s.sort, s.phi_inv).unwrap();
    }
    if let Some(t) = &transformed {
        writeln!(text, "p' = {t}").unwrap();
    }
    Ok((json!({"basis": basis, "record": record, "transformed": transformed}), text))
}

fn oracle(ctx: &Context) -> Outcome<(Value, String)> {
    let f = ctx.single_poly()?;
    let result = vanishing_oracle(&ctx.instance, f, ctx.config.cap)?;
    let count = brute_force_solutions(&ctx.instance, ctx.config.cap)?.len();
    Ok(match result {
        Ok(()) => (json!({"verdict": "member", "solutions": count, "witness": Value::Null}), "member\n".into()),
        Err(w) => {
            let text = format!("nonmember\nwitness: {}\n", tuple_text(&w));
            (json!({"verdict": "nonmember", "solutions": count, "witness": w}), text)
        }
    })
}
