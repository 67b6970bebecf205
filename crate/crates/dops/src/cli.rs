//! Command-line front end. Every subcommand loads an instance, calls the
//! library and writes JSON lines (CSV for `zeros`).
//!
//! Exit codes: 0 when every check passes, 1 on a failed check, 2 on bad input.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::copoly::{self, Perturbation};
use crate::darboux::{self, JacobiView, Schedule};
use crate::dsym::{self, SymData};
use crate::error::Error;
use crate::fixtures::{self, Fixture};
use crate::forms;
use crate::rational::{self, Rational};
use crate::seq::{self, generate, RecCoeffs};
use crate::verify::{self, Identity};
use crate::zeros::{self, Tolerances, TnMode, ZeroSet};

#[derive(Debug, Parser)]
#[command(name = "dops", version, about = "Exact computations with d-orthogonal polynomial sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Order d of the recurrence for random or constant-ρ instances (default 2).
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Highest degree to work with.
    #[arg(long, global = true, default_value_t = 8)]
    pub n: usize,
    /// Seed for random instances and perturbations.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Constant ρ for a d-symmetric instance, as p/q.
    #[arg(long, global = true)]
    pub rho: Option<String>,
    /// JSON file holding a recurrence, d-symmetric data or a fixture.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Draw random instances with positive coefficients.
    #[arg(long, global = true)]
    pub positive: bool,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_real: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_gap: f64,
    /// Append wall-clock time to the summary line (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "DOPS_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CopolyKind {
    Recursive,
    Dilated,
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterlaceWith {
    Prev,
    Assoc1,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// P_0..P_n.
    Gen,
    /// Associated recurrence of order r and its polynomials.
    Assoc {
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
    /// Co-recursive, co-dilated or co-modified sequence with its closed-form residuals.
    Copoly {
        #[arg(long, value_enum, default_value = "recursive")]
        kind: CopolyKind,
        /// Perturbation JSON; random from the seed when absent.
        #[arg(long)]
        perturbation: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
    /// LU and UL factorizations, kernel polynomials and the bidiagonal chain.
    Darboux {
        #[arg(long)]
        chain: bool,
        #[arg(long)]
        kernel: bool,
    },
    /// d-symmetric sequence: components, link identities, Hahn and Pearson checks.
    Dsym {
        #[arg(long)]
        components: bool,
        #[arg(long)]
        links: bool,
        #[arg(long)]
        hahn: bool,
        #[arg(long)]
        pearson: bool,
        /// Print only the recurrence of component i, as an input file for other commands.
        #[arg(long)]
        export_component: Option<usize>,
    },
    /// Check identities over their parameter grids.
    Verify {
        /// Identity name; repeat for several. All identities when absent.
        #[arg(long)]
        identity: Vec<String>,
        /// Number of seeded instances (seed, seed+1, ...).
        #[arg(long, default_value_t = 1)]
        instances: usize,
    },
    /// Zeros of P_n as CSV with certificates.
    Zeros {
        #[arg(long)]
        check_tn: bool,
        #[arg(long)]
        check_oscillation: bool,
        #[arg(long, value_enum)]
        interlace_with: Option<InterlaceWith>,
    },
    /// Moments of the first d dual forms.
    Moments,
    /// Uvarov transform u_r + λδ_c.
    Uvarov {
        #[arg(long, default_value = "0")]
        point: String,
        #[arg(long, default_value = "1")]
        lambda: String,
    },
    /// Quasi-orthogonality order of the input against its kernel sequence or another recurrence.
    Quasi {
        #[arg(long)]
        other: Option<PathBuf>,
    },
    /// Seeded instances checked in parallel, one summary line each.
    Sweep {
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        identity: Vec<String>,
    },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::BadParameter(_)
            | Error::BadSelector(_)
            | Error::MissingCoefficient { .. }
            | Error::MissingRho(_)
            | Error::RegularityViolation { .. } => CliError::Input(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Accumulated report lines and check outcomes.
#[derive(Default)]
struct Report {
    lines: Vec<String>,
    checks: usize,
    failures: usize,
    first_failure: Option<String>,
    /// No summary line.
    raw: bool,
}

impl Report {
    fn emit<T: Serialize>(&mut self, v: &T) {
        self.lines.push(serde_json::to_string(v).expect("report values serialize"));
    }

    fn check(&mut self, name: impl FnOnce() -> String, ok: bool) -> bool {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(name());
            }
        }
        ok
    }

    fn status(&self) -> &'static str {
        if self.failures == 0 {
            "pass"
        } else {
            "fail"
        }
    }
}

/// A loaded instance.
enum Instance {
    Rec(RecCoeffs),
    Sym(SymData),
}

impl Instance {
    fn coeffs(&self) -> RecCoeffs {
        match self {
            Instance::Rec(c) => c.clone(),
            Instance::Sym(s) => s.sym_coeffs(),
        }
    }

    fn d(&self) -> usize {
        match self {
            Instance::Rec(c) => c.d,
            Instance::Sym(s) => s.d,
        }
    }
}

fn read_json(path: &PathBuf) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn only_keys(v: &Value, allowed: &[&str], what: &str) -> CliResult<()> {
    let obj = v.as_object().ok_or_else(|| CliError::Input(format!("{what} must be a JSON object")))?;
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(CliError::Input(format!("unexpected field `{k}` in {what}")));
    }
    Ok(())
}

fn schema_err(e: serde_json::Error) -> CliError {
    CliError::Input(format!("schema: {e}"))
}

/// Recurrence, d-symmetric data or fixture, told apart by their fields.
fn instance_from_json(v: &Value, len: usize) -> CliResult<Instance> {
    let obj = v.as_object().ok_or_else(|| CliError::Input("input must be a JSON object".into()))?;
    if obj.contains_key("family") {
        let f: Fixture = serde_json::from_value(v.clone()).map_err(schema_err)?;
        return Ok(match fixtures::fixture(&f, len)? {
            fixtures::FixtureData::Rec(c) => Instance::Rec(c),
            fixtures::FixtureData::Sym(s) => Instance::Sym(s),
        });
    }
    if obj.contains_key("rho") {
        only_keys(v, &["d", "rho"], "SymData")?;
        let s: SymData = serde_json::from_value(v.clone()).map_err(schema_err)?;
        return Ok(Instance::Sym(SymData::new(s.d, s.rho)?));
    }
    if obj.contains_key("beta") {
        only_keys(v, &["d", "beta", "gamma"], "RecCoeffs")?;
        let c: RecCoeffs = serde_json::from_value(v.clone()).map_err(schema_err)?;
        return Ok(Instance::Rec(RecCoeffs::new(c.d, c.beta, c.gamma)?));
    }
    Err(CliError::Input("input has none of `beta`, `rho` or `family`".into()))
}

fn parse_rat(s: &str, what: &str) -> CliResult<Rational> {
    rational::parse(s).map_err(|e| CliError::Input(format!("--{what}: {e}")))
}

fn default_d(c: &Common) -> usize {
    c.d.unwrap_or(2)
}

fn load(c: &Common) -> CliResult<Instance> {
    let d = default_d(c);
    if d == 0 {
        return Err(CliError::Input("--d must be positive".into()));
    }
    let len = (d + 2) * (c.n + d + 8);
    if let Some(path) = &c.input {
        return instance_from_json(&read_json(path)?, len);
    }
    if let Some(rho) = &c.rho {
        return Ok(Instance::Sym(SymData::new(d, vec![parse_rat(rho, "rho")?; 4 * len])?));
    }
    Ok(Instance::Rec(verify::random_instance(d, c.n, c.seed, c.positive)))
}

fn polys_json(p: &[crate::poly::Poly]) -> Value {
    Value::Array(p.iter().map(|q| json!(q.to_strings())).collect())
}

fn identities(names: &[String]) -> CliResult<Vec<Identity>> {
    if names.is_empty() {
        return Ok(Identity::ALL.to_vec());
    }
    names.iter().map(|s| s.parse::<Identity>().map_err(CliError::from)).collect()
}

fn pool(c: &Common) -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = c.threads {
        b = b.num_threads(t.max(1));
    }
    b.build().map_err(|e| CliError::Failed(e.to_string()))
}

fn tolerances(c: &Common) -> Tolerances {
    Tolerances { real: c.tol_real, gap: c.tol_gap, ..Tolerances::default() }
}

fn cmd_verify(c: &Common, names: &[String], instances: usize, rep: &mut Report) -> CliResult<()> {
    let ids = identities(names)?;
    let base = if c.input.is_some() || c.rho.is_some() { Some(load(c)?.coeffs()) } else { None };
    let runs: Vec<CliResult<Vec<verify::IdentityReport>>> = pool(c)?.install(|| {
        (0..instances.max(1))
            .into_par_iter()
            .map(|j| {
                let seed = c.seed + j as u64;
                let inst = base.clone().unwrap_or_else(|| verify::random_instance(default_d(c), c.n, seed, c.positive));
                let mut out = Vec::new();
                for id in &ids {
                    out.extend(verify::check_identity(&inst, *id, c.n, seed)?);
                }
                Ok(out)
            })
            .collect()
    });
    for (j, run) in runs.into_iter().enumerate() {
        for r in run? {
            let name = || format!("{} {} (instance {j})", r.identity, r.params);
            rep.check(name, r.residual_is_zero);
            rep.emit(&json!({
                "instance": j,
                "identity": r.identity,
                "params": r.params,
                "residual_is_zero": r.residual_is_zero,
                "residual_coeffs": r.residual_coeffs,
            }));
        }
    }
    Ok(())
}

fn cmd_sweep(c: &Common, count: usize, names: &[String], rep: &mut Report) -> CliResult<()> {
    let ids = identities(names)?;
    let runs: Vec<CliResult<Value>> = pool(c)?.install(|| {
        (0..count)
            .into_par_iter()
            .map(|j| {
                let seed = c.seed + j as u64;
                let d = c.d.unwrap_or(1 + j % 3);
                let inst = verify::random_instance(d, c.n, seed, c.positive);
                let mut checks = 0;
                let mut failures = 0;
                let mut first: Option<Value> = None;
                for id in &ids {
                    for r in verify::check_identity(&inst, *id, c.n, seed)? {
                        checks += 1;
                        if !r.residual_is_zero {
                            failures += 1;
                            first.get_or_insert_with(|| json!({"identity": r.identity, "params": r.params}));
                        }
                    }
                }
                Ok(json!({
                    "instance": j,
                    "seed": seed,
                    "d": d,
                    "status": if failures == 0 { "pass" } else { "fail" },
                    "checks": checks,
                    "failures": failures,
                    "first_failure": first,
                }))
            })
            .collect()
    });
    for run in runs {
        let line = run?;
        let ok = line["failures"] == json!(0);
        rep.check(|| format!("instance {}: {}", line["instance"], line["first_failure"]), ok);
        rep.emit(&line);
    }
    Ok(())
}

fn cmd_dsym(c: &Common, flags: [bool; 4], rep: &mut Report) -> CliResult<()> {
    let [components, links, hahn, pearson] = flags;
    let s = match load(c)? {
        Instance::Sym(s) => s,
        Instance::Rec(_) => return Err(CliError::Input("dsym needs d-symmetric data (`rho`)".into())),
    };
    let d = s.d;
    let n = c.n;
    let b = dsym::dsym_generate(&s, (d + 1) * (n + 5) + d)?;
    rep.emit(&json!({"kind": "dsym", "d": d, "polys": polys_json(&b[..=n])}));
    let comps = dsym::decompose(&b, d)?;
    if components {
        for i in 0..=d {
            let len = n.min(dsym::component_len(&s, i));
            let chk = dsym::component_check(&s, i, len)?;
            rep.check(|| format!("component {i} coefficients"), chk.agree && chk.gamma0_product_agrees);
            rep.emit(&json!({"kind": "component", "i": i, "coeffs": chk.sum, "agree": chk.agree, "gamma0_product_agrees": chk.gamma0_product_agrees}));
        }
        let ch = dsym::chain_check(&s, n)?;
        rep.check(|| "bidiagonal chain reproduces the components".into(), ch.chain_exact && ch.mismatched.is_empty() && ch.factors_match_rho);
        rep.emit(&json!({"kind": "chain", "report": ch}));
    }
    if links {
        for (which, prm) in dsym::link_grid(d, n.min(6)) {
            let res = dsym::verify_links(&s, which, prm)?;
            rep.check(|| format!("{which:?} {prm:?}"), res.is_zero());
            rep.emit(&json!({"kind": "link", "link": which, "params": prm, "residual_is_zero": res.is_zero(), "residual_coeffs": res.residual.to_strings()}));
        }
    }
    if hahn {
        let orders = 3;
        let mut seqs = vec![("sequence".to_string(), b.to_vec())];
        for (i, comp) in comps.iter().enumerate() {
            seqs.push((format!("component {i}"), comp.to_vec()));
        }
        for (name, seq) in seqs {
            let h = dsym::hahn_check(&seq, d, orders)?;
            let ok = h.hahn_positive();
            rep.check(|| format!("Hahn check on {name}"), ok);
            rep.emit(&json!({"kind": "hahn", "of": name, "hahn_positive": ok, "report": h}));
        }
    }
    if pearson {
        let p = dsym::pearson_dsym_check(&s, 2 * n + 2)?;
        rep.check(|| "Pearson fit".into(), p.consistent);
        rep.emit(&json!({"kind": "pearson", "report": p}));
    }
    Ok(())
}

fn cmd_zeros(c: &Common, tn: bool, osc: bool, inter: Option<InterlaceWith>, rep: &mut Report) -> CliResult<()> {
    let inst = load(c)?;
    let rc = inst.coeffs();
    let n = c.n;
    let tol = tolerances(c);
    let z = zeros::zeros_of(&rc, n, tol)?;
    let j = JacobiView::new(rc.clone()).leading(n)?;
    let tn_cert = if tn { Some(zeros::tn_check(&j, TnMode::Constructive)?) } else { None };
    let osc_ok = if osc { Some(zeros::oscillation_check(&j)?) } else { None };
    let other: Option<(ZeroSet, RecCoeffs)> = match inter {
        None => None,
        Some(_) if n < 2 => None,
        Some(InterlaceWith::Prev) => Some((zeros::zeros_of(&rc, n - 1, tol)?, rc.clone())),
        Some(InterlaceWith::Assoc1) => {
            let a1 = seq::associated(&rc, 1)?;
            Some((zeros::zeros_of(&a1, n - 1, tol)?, a1))
        }
    };
    let inter_ok = match &other {
        None => inter.map(|_| true),
        Some((o, oc)) => Some(match zeros::interlacing_check(&z, o) {
            Ok(true) => true,
            // gaps below tolerance are settled exactly
            Ok(false) => {
                let p = generate(&rc, n)?;
                let q = generate(oc, n - 1)?;
                zeros::interlacing_exact(&p[n], &q[n - 1])
            }
            Err(Error::NonRealRoots(_)) => false,
            Err(e) => return Err(e.into()),
        }),
    };
    if let Some(t) = &tn_cert {
        rep.check(|| format!("TN: {}", t.witness.clone().unwrap_or_default()), t.tn);
    }
    if let Some(o) = osc_ok {
        rep.check(|| "oscillation".into(), o);
    }
    if let Some(i) = inter_ok {
        rep.check(|| "interlacing".into(), i);
    }
    let cell = |b: Option<bool>| b.map_or(String::new(), |v| v.to_string());
    rep.lines.push("n,index,re,im,refined,real,simple,positive,tn,oscillation,interlace".into());
    for (k, r) in z.roots.iter().enumerate() {
        rep.lines.push(format!(
            "{n},{k},{:.17e},{:.17e},{},{},{},{},{},{},{}",
            r.re,
            r.im,
            r.refined,
            z.is_real(),
            z.is_simple(),
            z.all_positive(),
            cell(tn_cert.as_ref().map(|t| t.tn)),
            cell(osc_ok),
            cell(inter_ok),
        ));
    }
    Ok(())
}

fn cmd_darboux(c: &Common, chain: bool, kernel: bool, rep: &mut Report) -> CliResult<()> {
    let inst = load(c)?;
    // A d-symmetric input is factored through its first component.
    let rc = match &inst {
        Instance::Sym(s) => dsym::component_coeffs(s, 0, dsym::component_len(s, 0))?,
        Instance::Rec(c) => c.clone(),
    };
    let n = c.n;
    let f = darboux::lu(&rc, n)?;
    let chk = darboux::check_lu(&rc, &f, n)?;
    rep.check(|| "L·U reconstruction".into(), chk.is_exact());
    rep.emit(&json!({"kind": "lu", "factors": f, "check": chk}));
    let free: Vec<Rational> = f.m.iter().take(rc.d).map(|m| m + rational::one()).collect();
    let u = darboux::ul(&rc, Some(&free), n)?;
    let uchk = darboux::check_ul(&rc, &u, n)?;
    rep.check(|| "U·L reconstruction".into(), uchk.is_exact());
    rep.emit(&json!({"kind": "ul", "free": free.iter().map(rational::fmt).collect::<Vec<_>>(), "factors": u, "check": uchk}));
    if kernel {
        let k = darboux::kernel(&rc, n)?;
        rep.check(|| "kernel identities".into(), k.is_exact());
        rep.emit(&json!({"kind": "kernel", "polys": polys_json(&k.k), "coeffs": k.coeffs, "exact": k.is_exact()}));
    }
    if chain {
        let schedule = match &inst {
            Instance::Sym(s) => {
                let ch = darboux::darboux_chain(&rc, n, &Schedule::Seeds(dsym::chain_seeds(s)?))?;
                rep.check(|| "chain".into(), ch.is_exact());
                rep.emit(&json!({"kind": "chain", "of": "component 0", "report": ch}));
                None
            }
            Instance::Rec(_) => Some(Schedule::MinimalSlack),
        };
        if let Some(sch) = schedule {
            let ch = darboux::darboux_chain(&rc, n, &sch)?;
            rep.check(|| "chain".into(), ch.is_exact() && ch.factor.positive);
            rep.emit(&json!({"kind": "chain", "report": ch}));
        }
    }
    Ok(())
}

fn execute(cli: &Cli, rep: &mut Report) -> CliResult<()> {
    let c = &cli.common;
    match &cli.command {
        Command::Gen => {
            let rc = load(c)?.coeffs();
            let p = generate(&rc, c.n)?;
            rep.emit(&json!({"kind": "gen", "d": rc.d, "polys": polys_json(&p)}));
        }
        Command::Assoc { r } => {
            let a = seq::associated(&load(c)?.coeffs(), *r)?;
            let p = generate(&a, c.n)?;
            rep.emit(&json!({"kind": "assoc", "r": r, "coeffs": a, "polys": polys_json(&p)}));
        }
        Command::Copoly { kind, perturbation, k } => {
            let rc = load(c)?.coeffs();
            let p = match perturbation {
                Some(path) => {
                    let v = read_json(path)?;
                    only_keys(&v, &["k", "mu", "eta", "lambda"], "Perturbation")?;
                    serde_json::from_value(v).map_err(schema_err)?
                }
                None => {
                    use rand::SeedableRng;
                    Perturbation::random(rc.d, *k, &mut rand_chacha::ChaCha8Rng::seed_from_u64(c.seed))
                }
            };
            let (coeffs, residuals) = match kind {
                CopolyKind::Recursive => (copoly::co_recursive(&rc, &p)?, copoly::co_recursive_closed_form(&rc, &p, c.n)?.residuals),
                CopolyKind::Dilated => {
                    (copoly::co_dilated(&rc, p.k + 1, &p.lambda)?, copoly::co_dilated_closed_form(&rc, p.k + 1, &p.lambda, c.n)?)
                }
                CopolyKind::Modified => {
                    let m = copoly::co_modified(&rc, &p, c.n)?;
                    let all = m.residuals.iter().chain(&m.sum_residuals).cloned().collect();
                    (m.coeffs, all)
                }
            };
            let ok = residuals.iter().all(|r| r.is_zero());
            rep.check(|| format!("{kind:?} closed form"), ok);
            let polys = generate(&coeffs, c.n)?;
            rep.emit(&json!({"kind": "copoly", "perturbation": p, "coeffs": coeffs, "polys": polys_json(&polys), "closed_form_exact": ok}));
        }
        Command::Darboux { chain, kernel } => cmd_darboux(c, *chain, *kernel, rep)?,
        Command::Dsym { export_component: Some(i), .. } => {
            let s = match load(c)? {
                Instance::Sym(s) => s,
                Instance::Rec(_) => return Err(CliError::Input("dsym needs d-symmetric data (`rho`)".into())),
            };
            if *i > s.d {
                return Err(CliError::Input(format!("component index {i} exceeds d = {}", s.d)));
            }
            rep.emit(&dsym::component_coeffs(&s, *i, dsym::component_len(&s, *i))?);
            rep.raw = true;
        }
        Command::Dsym { components, links, hahn, pearson, .. } => cmd_dsym(c, [*components, *links, *hahn, *pearson], rep)?,
        Command::Verify { identity, instances } => cmd_verify(c, identity, *instances, rep)?,
        Command::Zeros { check_tn, check_oscillation, interlace_with } => {
            cmd_zeros(c, *check_tn, *check_oscillation, *interlace_with, rep)?
        }
        Command::Moments => {
            let rc = load(c)?.coeffs();
            let m = forms::moments(&rc, c.n)?;
            rep.emit(&json!({"kind": "moments", "table": m, "positive_definite": forms::positive_definite(&rc)}));
        }
        Command::Uvarov { point, lambda } => {
            let rc = load(c)?.coeffs();
            let (pt, lam) = (parse_rat(point, "point")?, parse_rat(lambda, "lambda")?);
            let u = forms::uvarov(&rc, &pt, &lam, c.n)?;
            let ok = u.point_residuals.iter().all(num_traits::Zero::is_zero) && u.bracket_mismatches == 0;
            rep.check(|| "Uvarov point identity".into(), ok);
            rep.emit(&json!({"kind": "uvarov", "point": point, "lambda": lambda, "report": u}));
        }
        Command::Quasi { other } => {
            let inst = load(c)?;
            let rc = inst.coeffs();
            let p = generate(&rc, c.n)?;
            let q = match other {
                Some(path) => {
                    let len = (rc.d + 2) * (c.n + rc.d + 8);
                    generate(&instance_from_json(&read_json(path)?, len)?.coeffs(), c.n)?
                }
                None => darboux::kernel(&rc, c.n)?.k,
            };
            match forms::quasi_detect(&p, &q, inst.d()) {
                Ok(qo) => rep.emit(&json!({"kind": "quasi", "against": if other.is_some() { "other" } else { "kernel" }, "order": qo})),
                Err(Error::NotQuasi(l)) => {
                    rep.check(|| "quasi-orthogonality".into(), false);
                    rep.emit(&json!({"kind": "quasi", "not_quasi_up_to": l}));
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Sweep { count, identity } => cmd_sweep(c, *count, identity, rep)?,
    }
    Ok(())
}

/// Parse `args` (including the program name), run, write the report, return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let mut rep = Report::default();
    let result = execute(&cli, &mut rep);
    let csv = matches!(cli.command, Command::Zeros { .. });
    let code = match &result {
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
        Err(CliError::Failed(msg)) => {
            rep.check(|| msg.clone(), false);
            1
        }
        Ok(()) if rep.failures > 0 => 1,
        Ok(()) => 0,
    };
    if !csv && !rep.raw {
        let mut summary = json!({
            "summary": true,
            "status": rep.status(),
            "checks": rep.checks,
            "failures": rep.failures,
            "first_failure": rep.first_failure,
        });
        if cli.common.timing {
            summary["timing_ms"] = json!(start.elapsed().as_millis() as u64);
        }
        rep.emit(&summary);
    }
    let mut text = rep.lines.join("\n");
    text.push('\n');
    let written = match &cli.common.output {
        Some(path) => std::fs::write(path, text).map_err(|e| e.to_string()),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return 2;
    }
    if let Some(f) = &rep.first_failure {
        eprintln!("verification failed: {f}");
    }
    code
}
