//! Batch front end behind the `distopt` binary: load a spec, run one
//! pipeline stage, return the report and the files to write.

mod io;

use std::path::PathBuf;

use nalgebra::DVector;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::digraph::{DiGraph, GraphError};
use crate::liebracket::{rewrite_dynamics, Bracket, ExtendedSystem, IntMatrix, LieError};
use crate::problem::{augment, check_assumptions, solve_kkt_oracle, AugmentedProblem, ProblemError, RestEntry, RestKind};
use crate::sim::{
    centralized, check_distributed, integrate_oscillatory, oscillatory_grid, sigma_sweep, sup_error, OscillatoryRhs,
    SimError,
};
use crate::synthesis::{
    assemble_inputs, choose_frequencies, collect_classes, synthesize, synthesize_with, verify_frequencies, Synthesis,
    SynthConfig, SynthesisError,
};

pub use io::{fmt17, load_frequencies, to_json, trajectory_csv, write_atomic, ObjectiveSpec, RowSpec, SpecFile};

pub const DEFAULT_SIGMA: f64 = 1000.0;
pub const DEFAULT_T: f64 = 2.0;
pub const DEFAULT_K: f64 = 1.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl CliError {
    /// 0 ok, 1 bad input, 2 infeasible, 3 connectivity, 4 frequency search, 5 invariant failure.
    pub fn exit_code(&self) -> i32 {
        fn lie(e: &LieError) -> i32 {
            match e {
                LieError::NotConnected { .. } | LieError::Graph(GraphError::NotConnected { .. }) => 3,
                _ => 5,
            }
        }
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse(_) => 1,
            CliError::Problem(ProblemError::Infeasible) => 2,
            CliError::Problem(ProblemError::ZeroDiagonal { .. }) => 5,
            CliError::Problem(_) => 1,
            CliError::Graph(GraphError::NotConnected { .. }) => 3,
            CliError::Graph(_) => 1,
            CliError::Lie(e) => lie(e),
            CliError::Synthesis(SynthesisError::Lie(e)) => lie(e),
            CliError::Synthesis(
                SynthesisError::FrequencySearch { .. }
                | SynthesisError::SingularXi { .. }
                | SynthesisError::Capacity { .. }
                | SynthesisError::BadOverride(_),
            ) => 4,
            CliError::Synthesis(_) | CliError::Sim(_) => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Synthesize,
    Simulate,
    Compare,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Central,
    Distributed,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub spec: PathBuf,
    pub sigma: f64,
    pub t_end: f64,
    /// Spacing of stored samples.
    pub sample_dt: f64,
    /// RK4 steps per period of the fastest input.
    pub oversample: f64,
    /// CSV keeps every `stride`-th sample.
    pub stride: usize,
    pub seed: u64,
    /// Overrides `K` from the problem file.
    pub k: Option<f64>,
    pub beta_primal: f64,
    pub freq_range: (f64, f64),
    /// Frequency override file.
    pub freqs: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub dump_brackets: bool,
    pub mode: Mode,
    /// Sweep points for `compare`.
    pub sigmas: Vec<f64>,
    pub z0: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn new(command: Command, spec: impl Into<PathBuf>) -> Self {
        let d = SynthConfig::default();
        RunConfig {
            command,
            spec: spec.into(),
            sigma: DEFAULT_SIGMA,
            t_end: DEFAULT_T,
            sample_dt: 1e-3,
            oversample: 40.0,
            stride: 1,
            seed: d.seed,
            k: None,
            beta_primal: d.beta_primal,
            freq_range: d.freq_range,
            freqs: None,
            out: None,
            dump_brackets: false,
            mode: Mode::Both,
            sigmas: vec![300.0, 1000.0, 1500.0],
            z0: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let pos = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(CliError::Usage(format!("{name} must be positive, got {x}")))
            }
        };
        pos("sigma", self.sigma)?;
        pos("T", self.t_end)?;
        pos("sample-dt", self.sample_dt)?;
        pos("oversample", self.oversample)?;
        pos("beta-primal", self.beta_primal)?;
        if let Some(k) = self.k {
            pos("K", k)?;
        }
        for &s in &self.sigmas {
            pos("sigma", s)?;
        }
        let (lo, hi) = self.freq_range;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(CliError::Usage(format!("freq-range needs 0 < LO < HI, got {lo},{hi}")));
        }
        if self.stride == 0 {
            return Err(CliError::Usage("stride must be at least 1".into()));
        }
        Ok(())
    }

    pub fn synth_config(&self) -> SynthConfig {
        SynthConfig { seed: self.seed, freq_range: self.freq_range, beta_primal: self.beta_primal, ..SynthConfig::default() }
    }
}

/// Report for stdout, files for the output directory, exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub files: Vec<(String, String)>,
}

impl Outcome {
    fn json(name: &str, report: &Value) -> Self {
        let text = to_json(report);
        Outcome { code: 0, stdout: text.clone(), files: vec![(format!("{name}.json"), text)] }
    }
}

struct Loaded {
    ap: AugmentedProblem,
    graph: DiGraph,
}

fn load(cfg: &RunConfig) -> Result<Loaded, CliError> {
    let spec = SpecFile::load(&cfg.spec)?;
    let p = spec.problem()?;
    let ap = augment(&p, cfg.k.or(spec.k).unwrap_or(DEFAULT_K))?;
    let graph = spec.graph()?;
    Ok(Loaded { ap, graph })
}

fn run_synthesis(cfg: &RunConfig, ext: &ExtendedSystem) -> Result<Synthesis, CliError> {
    let sc = cfg.synth_config();
    Ok(match &cfg.freqs {
        Some(p) => synthesize_with(ext, load_frequencies(p)?, &sc)?,
        None => synthesize(ext, &sc)?,
    })
}

fn z0(cfg: &RunConfig, n: usize) -> Result<Vec<f64>, CliError> {
    match &cfg.z0 {
        None => Ok(vec![1.0; 3 * n]),
        Some(z) if z.len() == 3 * n => Ok(z.clone()),
        Some(z) => Err(CliError::Usage(format!("z0 has {} entries, state has {}", z.len(), 3 * n))),
    }
}

fn entry_label(e: &RestEntry) -> String {
    format!("{}[{},{}] = {}", e.kind.label(), e.i, e.j, e.coeff)
}

fn bracket_json(b: &Bracket, n: usize) -> Value {
    json!({ "sexp": b.to_string(), "pretty": b.pretty(n), "degree": b.degree() })
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let Loaded { ap, graph, .. } = load(cfg)?;
    let sp = solve_kkt_oracle(&ap)?;
    let x = DVector::from_column_slice(&sp.x);
    let eq = &ap.g_mat * &x - &ap.g;
    let ineq = &ap.a_mat * &x - &ap.b;
    let eq_res = ap.se.iter().map(|&i| eq[i - 1].abs()).fold(0.0, f64::max);
    let ineq_res = ineq.iter().map(|r| r.max(0.0)).fold(0.0, f64::max);
    let compl = ineq.iter().zip(&sp.mu).map(|(r, m)| (r * m).abs()).fold(0.0, f64::max);
    let rep = check_assumptions(&ap, &graph);
    let report = json!({
        "K": ap.k,
        "x": sp.x,
        "nu": sp.nu,
        "mu": sp.mu,
        "active": sp.active,
        "residuals": {
            "stationarity": ap.stationarity_residual(&sp),
            "equality": eq_res,
            "inequality": ineq_res,
            "complementarity": compl,
        },
        "assumptions": {
            "diagonal_failures": rep.diagonal_failures.iter().map(|(k, i)| format!("{k} row of agent {i}")).collect::<Vec<_>>(),
            "topology_violations": rep.topology_violations.iter().map(entry_label).collect::<Vec<_>>(),
            "rest_entries": rep.rest_entries.iter().map(entry_label).collect::<Vec<_>>(),
            "mfcq": rep.mfcq.as_ref().map(|m| m.holds()),
        },
    });
    Ok(Outcome::json("solve", &report))
}

pub fn cmd_synthesize(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let Loaded { ap, graph, .. } = load(cfg)?;
    let n = ap.n();
    let ext = rewrite_dynamics(&ap, &graph)?;
    let syn = run_synthesis(cfg, &ext)?;
    let terms: Vec<Value> = ext
        .terms
        .iter()
        .map(|t| {
            json!({
                "bracket": bracket_json(&t.bracket, n),
                "v": t.v,
                "target": [t.target.0, t.target.1],
                "sign": t.sign,
            })
        })
        .collect();
    let report = json!({
        "n": n,
        "K": ap.k,
        "admissible_fields": ext.basis.generators().len(),
        "terms": terms,
        "exactness_error": ext.exactness_error(),
        "classes": syn.classes,
        "frequencies": syn.frequencies,
        "omega_max": syn.inputs.max_omega(),
        "atoms": syn.inputs.atoms,
    });
    let mut out = Outcome::json("synthesize", &report);
    if cfg.dump_brackets {
        let dump = bracket_dump(&ext, n)?;
        out.files.push(("brackets.json".into(), to_json(&dump)));
    }
    Ok(out)
}

/// Per rest entry: path, formal bracket, projected terms with their share of
/// `v_B`, and the reduced class each projected bracket belongs to.
fn bracket_dump(ext: &ExtendedSystem, n: usize) -> Result<Value, CliError> {
    let classes = collect_classes(ext)?;
    let class_of = |s: &str| {
        classes
            .iter()
            .find(|c| c.members.iter().any(|m| m.to_string() == s))
            .map(|c| c.members.iter().map(|m| m.to_string()).collect::<Vec<_>>())
    };
    let entries: Vec<Value> = ext
        .rewrites
        .iter()
        .map(|r| {
            let projection: Vec<Value> = r
                .projection
                .iter()
                .map(|(c, b)| json!({ "coeff": c, "bracket": b, "v": r.tau * *c as f64, "class": class_of(b) }))
                .collect();
            json!({
                "entry": format!("{}[{},{}]", r.kind, r.i, r.j),
                "coeff": r.coeff,
                "target": format!("h({},{})", r.k1, r.k2),
                "tau": r.tau,
                "path": r.path,
                "bracket": r.raw,
                "projection": projection,
            })
        })
        .collect();
    Ok(json!({ "n": n, "rewrites": entries, "terms": ext.terms.iter().map(|t| json!({"bracket": bracket_json(&t.bracket, n), "v": t.v})).collect::<Vec<_>>() }))
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let Loaded { ap, graph, .. } = load(cfg)?;
    let n = ap.n();
    let z0 = z0(cfg, n)?;
    let mut files = Vec::new();
    let mut report = json!({
        "sigma": cfg.sigma,
        "T": cfg.t_end,
        "sample_dt": cfg.sample_dt,
        "z0": z0,
        "x_star": solve_kkt_oracle(&ap).ok().map(|sp| sp.x),
    });
    let central = if cfg.mode != Mode::Distributed {
        let tr = centralized(&ap, &z0, cfg.t_end, cfg.sample_dt)?;
        report["central"] = json!({
            "final": tr.final_state(),
            "mu_positivity_violation": tr.positivity_violation(2 * n..3 * n),
        });
        files.push(("central.csv".to_string(), trajectory_csv(&tr, n, cfg.stride)));
        Some(tr)
    } else {
        None
    };
    if cfg.mode != Mode::Central {
        let ext = rewrite_dynamics(&ap, &graph)?;
        let syn = run_synthesis(cfg, &ext)?;
        let rhs = OscillatoryRhs::closed_loop(&ext, &syn.inputs, cfg.sigma);
        let tr = integrate_oscillatory(&rhs, &z0, cfg.t_end, cfg.sample_dt, cfg.oversample)?;
        let (dt, per) = oscillatory_grid(cfg.sigma, rhs.omega_max(), cfg.sample_dt, cfg.oversample);
        report["distributed"] = json!({
            "final": tr.final_state(),
            "dt": dt,
            "steps_per_sample": per,
            "omega_max": rhs.omega_max(),
            "atoms": syn.inputs.atoms.len(),
        });
        if let Some(c) = &central {
            report["sup_error"] = json!(sup_error(c, &tr)?);
        }
        files.push(("distributed.csv".to_string(), trajectory_csv(&tr, n, cfg.stride)));
    }
    let text = to_json(&report);
    files.push(("simulate.json".into(), text.clone()));
    Ok(Outcome { code: 0, stdout: text, files })
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let Loaded { ap, graph, .. } = load(cfg)?;
    let n = ap.n();
    let z0 = z0(cfg, n)?;
    let ext = rewrite_dynamics(&ap, &graph)?;
    let syn = run_synthesis(cfg, &ext)?;
    let reference = centralized(&ap, &z0, cfg.t_end, cfg.sample_dt)?;
    let points = sigma_sweep(&ext, &syn.inputs, &reference, &cfg.sigmas, &z0, cfg.sample_dt, cfg.oversample)?;
    let xr = &reference.final_state()[..n];
    let mut csv = String::from("sigma,sup_error,max_dx_final\n");
    let rows: Vec<Value> = points
        .iter()
        .map(|p| {
            let dx = p.final_state[..n].iter().zip(xr).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            csv.push_str(&format!("{},{},{}\n", fmt17(p.sigma), fmt17(p.sup_error), fmt17(dx)));
            json!({
                "sigma": p.sigma,
                "sup_error": p.sup_error,
                "max_dx_final": dx,
                "steps_per_sample": p.steps_per_sample,
                "final": p.final_state,
            })
        })
        .collect();
    let report = json!({
        "T": cfg.t_end,
        "sample_dt": cfg.sample_dt,
        "central_final": reference.final_state(),
        "points": rows,
    });
    let mut out = Outcome::json("compare", &report);
    out.files.push(("compare.csv".into(), csv));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, pass: bool, detail: impl Into<String>) -> Check {
    Check { name, pass, detail: detail.into() }
}

/// Runs the invariant battery and collects a pass/fail row per check. The
/// returned code is 3 for a connectivity failure, 5 for any other failure.
pub fn verify_checks(cfg: &RunConfig) -> Result<(Vec<Check>, i32), CliError> {
    let spec = SpecFile::load(&cfg.spec)?;
    let p = spec.problem()?;
    let graph = spec.graph()?;
    let mut rows = Vec::new();
    let mut code = 0;
    let ap = match augment(&p, cfg.k.or(spec.k).unwrap_or(DEFAULT_K)) {
        Ok(ap) => {
            rows.push(check("diagonal rows", true, "every own-row entry is nonzero"));
            ap
        }
        Err(ProblemError::ZeroDiagonal { kind, agent }) => {
            rows.push(check("diagonal rows", false, format!("{kind} row {agent} has a zero diagonal entry")));
            return Ok((rows, 5));
        }
        Err(e) => return Err(e.into()),
    };
    let n = ap.n();
    rows.push(check("strong connectivity", graph.is_strongly_connected(), format!("{} edges", graph.edges().len())));
    let rep = check_assumptions(&ap, &graph);
    let (ineq, eq): (Vec<&RestEntry>, Vec<&RestEntry>) =
        rep.topology_violations.iter().partition(|e| e.kind == RestKind::IneqRow);
    let label = |v: &[&RestEntry]| v.iter().map(|e| entry_label(e)).collect::<Vec<_>>().join("; ");
    let detail = match (ineq.is_empty(), eq.is_empty()) {
        (false, _) => label(&ineq),
        (true, true) => "no coupling off the edges".to_string(),
        (true, false) => format!("equality couplings to rewrite: {}", label(&eq)),
    };
    rows.push(check("inequality rows on edges", ineq.is_empty(), detail));
    match solve_kkt_oracle(&ap) {
        Ok(sp) => {
            let r = ap.stationarity_residual(&sp);
            rows.push(check("kkt oracle", r <= 1e-9, format!("stationarity {r:e}")));
            let m = rep.mfcq.as_ref().is_some_and(|m| m.holds());
            rows.push(check("mfcq at optimum", m, format!("active {:?}", sp.active)));
        }
        Err(e) => rows.push(check("kkt oracle", false, e.to_string())),
    }
    let ext = match rewrite_dynamics(&ap, &graph) {
        Ok(ext) => ext,
        Err(e) => {
            code = CliError::Lie(e.clone()).exit_code();
            rows.push(check("rewrite", false, e.to_string()));
            return Ok((rows, code));
        }
    };
    let hall = ext.basis.validate().map_err(|v| format!("{v:?}")).and_then(|()| {
        ext.terms.iter().try_for_each(|t| ext.basis.check_element(&t.bracket).map_err(|v| format!("{}: {v:?}", t.bracket)))
    });
    rows.push(match hall {
        Ok(()) => check("hall basis", true, format!("{} generators, every term a Hall element", ext.basis.generators().len())),
        Err(e) => check("hall basis", false, e),
    });
    rows.push(bracket_identities(&ext));
    let err = ext.exactness_error();
    rows.push(check("split exactness", err == 0.0, format!("{} terms, max gap {err:e}", ext.terms.len())));

    let sc = cfg.synth_config();
    let classes = collect_classes(&ext)?;
    let freqs = match &cfg.freqs {
        Some(p) => Some(load_frequencies(p)?),
        None => match choose_frequencies(&classes, &sc) {
            Ok(f) => Some(f),
            Err(e) => {
                rows.push(check("frequencies", false, e.to_string()));
                None
            }
        },
    };
    if let Some(mut f) = freqs {
        let (certs, failure) = verify_frequencies(&classes, &f.classes, &sc);
        let ok = failure.is_none();
        rows.push(check(
            "frequencies",
            ok,
            failure.unwrap_or_else(|| format!("{} certificates hold", certs.len())),
        ));
        if ok {
            f.certificates = certs;
            let inputs = assemble_inputs(&classes, &f, n, sc.beta_primal)?;
            let rhs = OscillatoryRhs::closed_loop(&ext, &inputs, cfg.sigma);
            rows.push(match check_distributed(&rhs, &graph, n, cfg.seed) {
                Ok(()) => check("distributed closed loop", true, format!("{} atoms", inputs.atoms.len())),
                Err(w) => check(
                    "distributed closed loop",
                    false,
                    format!("agent {} reads agent {} (component {}, delta {:e})", w.agent, w.other, w.component, w.delta),
                ),
            });
        }
    }
    if code == 0 && rows.iter().any(|r| !r.pass) {
        code = 5;
    }
    Ok((rows, code))
}

/// Each term evaluates to its recorded generator; antisymmetry and Jacobi
/// hold on the admissible generators.
fn bracket_identities(ext: &ExtendedSystem) -> Check {
    for t in &ext.terms {
        let (r, c, e) = match t.bracket.eval().single_entry() {
            Some(x) => x,
            None => return check("bracket identities", false, format!("{} is not a single generator", t.bracket)),
        };
        if (c, r) != t.target || e != t.sign {
            return check("bracket identities", false, format!("{} evaluates to {e} h({c},{r})", t.bracket));
        }
    }
    let gens: Vec<Bracket> = ext.basis.generators().iter().take(10).map(|g| Bracket::leaf(*g)).collect();
    let ev = |a: &Bracket, b: &Bracket| Bracket::node(a.clone(), b.clone()).eval();
    let plus = |x: IntMatrix, y: IntMatrix| x.sub(&y.scaled(-1));
    let mut triples = 0;
    for a in &gens {
        for b in &gens {
            if !plus(ev(a, b), ev(b, a)).is_zero() {
                return check("bracket identities", false, format!("[{a},{b}] not antisymmetric"));
            }
            for c in &gens {
                let j = plus(
                    plus(ev(a, &Bracket::node(b.clone(), c.clone())), ev(b, &Bracket::node(c.clone(), a.clone()))),
                    ev(c, &Bracket::node(a.clone(), b.clone())),
                );
                if !j.is_zero() {
                    return check("bracket identities", false, format!("Jacobi fails on {a}, {b}, {c}"));
                }
                triples += 1;
            }
        }
    }
    check("bracket identities", true, format!("{} terms, {triples} Jacobi triples", ext.terms.len()))
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (rows, code) = verify_checks(cfg)?;
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut table = String::new();
    for r in &rows {
        let status = if r.pass { "PASS" } else { "FAIL" };
        table.push_str(&format!("{:<width$}  {status}  {}\n", r.name, r.detail));
    }
    let json = to_json(&json!({ "checks": rows, "exit_code": code }));
    Ok(Outcome { code, stdout: table, files: vec![("verify.json".into(), json)] })
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    match cfg.command {
        Command::Solve => cmd_solve(cfg),
        Command::Synthesize => cmd_synthesize(cfg),
        Command::Simulate => cmd_simulate(cfg),
        Command::Compare => cmd_compare(cfg),
        Command::Verify => cmd_verify(cfg),
    }
}

/// Executes, prints the report, writes files into `out`, returns the exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    let outcome = match execute(cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    print!("{}", outcome.stdout);
    if let Some(dir) = &cfg.out {
        for (name, text) in &outcome.files {
            if let Err(e) = write_atomic(&dir.join(name), text.as_bytes()) {
                eprintln!("error: {e}");
                return e.exit_code();
            }
        }
    }
    outcome.code
}
