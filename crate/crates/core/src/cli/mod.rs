//! Command-line driver: verification commands, basis and module listings,
//! graph export and expression evaluation. Every command returns its report
//! text and a pass flag; the binary turns the flag into the exit status.

mod expr;

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::heisenberg::{oracle_sweep, OracleConfig};
use crate::lattice::LatticeVector;
use crate::repmod::{
    all_sequences, build_lz_basis, build_omega, build_uqz, drinfeld_checks, enumerate_basis, enumerate_ybasis, fd_module,
    figure_sl2, figure_sl3, independence_rank, lz_rank, module_name, nonzero_fpath, shift_table, sweep_lemmas, ActionGraph,
    Caps, IndependenceConfig, RepError,
};
use crate::scalarfield::Half;
use crate::voperator::{verify_relations, EngineError};

pub use expr::{parse_expr, Coeff, Expr, ExprError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

#[derive(Parser, Debug)]
#[command(name = "qvertex", version, about = "Vertex operators, bullet products and the modules L(λ_i)_z")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Args, Clone, Debug)]
pub struct Options {
    /// Rank: the algebra is sl_(n+1).
    #[arg(long, global = true, default_value_t = 2)]
    pub n: usize,
    /// Fundamental weight index.
    #[arg(long, global = true, default_value_t = 1)]
    pub i: usize,
    /// Bound on the number of ψ factors (or e(u, z_j) factors).
    #[arg(long, global = true, default_value_t = 2)]
    pub psi_max: usize,
    /// Truncation order of the power series in z_1..z_n.
    #[arg(long, global = true, default_value_t = 3)]
    pub zorder: u32,
    /// Fock degree and z-window of the oracle and independence checks.
    #[arg(long, global = true, default_value_t = 6)]
    pub fock_cutoff: u32,
    /// Bound on the length of f-paths and index sequences.
    #[arg(long, global = true, default_value_t = 6)]
    pub path_max: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Derive the contraction relations or sweep the path lemmas.
    Verify {
        #[command(subcommand)]
        what: VerifyWhat,
    },
    /// Enumerate the basis B_i of ⟨Y_i(z)⟩ up to the ψ-degree cap.
    Basis,
    /// Build L(λ_i)_z and its capped basis C_i.
    Module,
    /// Build the isomorphism Ω and compare both actions.
    Omega,
    /// Export the labeled action graph.
    Graph {
        #[arg(long, value_enum, default_value_t = Side::Module)]
        side: Side,
        /// Use the caps of the drawn figure and compare against it.
        #[arg(long)]
        figure: bool,
    },
    /// Parse, evaluate and print an operator expression.
    Eval { expr: String },
    /// Oracle cross-checks: symbolic versus sequential application, module
    /// relations, path conditions versus matrices.
    Selftest {
        /// Random states per operator pair.
        #[arg(long, default_value_t = 10)]
        states: usize,
        /// Also compute the rank of the capped B_(i,ψ)^- evaluation matrix.
        #[arg(long)]
        independence: bool,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum VerifyWhat {
    /// The fifteen contraction relations and the Drinfeld relation.
    Relations,
    /// The path lemmas for x^-, x^+ and ψ heads and the table of shifts.
    Lemmas,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Module,
    Bullet,
}

/// The rendered report of one command.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub output: String,
    pub pass: bool,
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn check_index(opts: &Options) -> Result<(), CliError> {
    if opts.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if opts.i == 0 || opts.i > opts.n {
        return Err(RepError::IndexOutOfRange { index: opts.i, n: opts.n }.into());
    }
    Ok(())
}

fn caps(opts: &Options) -> Caps {
    Caps { path_max: opts.path_max, factors: opts.psi_max, per_variable: None }
}

fn specialization() -> BigRational {
    BigRational::new(3.into(), 2.into())
}

fn finish<T: Serialize>(opts: &Options, json: &T, text: String, pass: bool) -> Result<Outcome, CliError> {
    let output = match opts.format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(json)? + "\n",
        Format::Dot => return Err(CliError::Usage("dot output is only available for the graph command".into())),
    };
    Ok(Outcome { output, pass })
}

/// Runs one command.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let opts = &cli.opts;
    if let Some(jobs) = opts.jobs {
        // the global pool can only be set once per process; later calls keep it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    check_index(opts)?;
    match &cli.command {
        Command::Verify { what: VerifyWhat::Relations } => verify_relations_cmd(opts),
        Command::Verify { what: VerifyWhat::Lemmas } => verify_lemmas_cmd(opts),
        Command::Basis => basis_cmd(opts),
        Command::Module => module_cmd(opts),
        Command::Omega => omega_cmd(opts),
        Command::Graph { side, figure } => graph_cmd(opts, *side, *figure),
        Command::Eval { expr } => eval_cmd(opts, expr),
        Command::Selftest { states, independence } => selftest_cmd(opts, *states, *independence),
    }
}

fn verify_relations_cmd(opts: &Options) -> Result<Outcome, CliError> {
    let n = opts.n;
    let relations = verify_relations(n)?;
    let mut text = format!("relations n={n}\n");
    for c in &relations {
        writeln!(text, "{} {} (i={}, j={}) {}", verdict(c.pass), c.label, c.i, c.j, c.operators).unwrap();
        writeln!(text, "     F = {}", c.derived).unwrap();
        if !c.pass {
            writeln!(text, "     expected {}", c.expected).unwrap();
        }
    }
    let mut drinfeld = Vec::new();
    for i in 1..=n {
        let checks = drinfeld_checks(n, i, opts.psi_max)?;
        writeln!(text, "drinfeld n={n} i={i} psi-max={}", opts.psi_max).unwrap();
        for c in &checks {
            writeln!(text, "{} j1={} j2={} on {}{}", verdict(c.pass), c.j1, c.j2, c.element, if c.nonzero { "" } else { "  (both sides 0)" })
                .unwrap();
        }
        drinfeld.push(json!({ "i": i, "checks": checks }));
    }
    let pass = relations.iter().all(|c| c.pass)
        && drinfeld.iter().all(|d| d["checks"].as_array().is_some_and(|a| a.iter().all(|c| c["pass"] == true)));
    let labels: std::collections::BTreeSet<&str> = relations.iter().map(|c| c.label).collect();
    writeln!(
        text,
        "{}: {} relation instances ({} relations), {}",
        verdict(pass),
        relations.len(),
        labels.len(),
        if pass { "all equal to the closed forms" } else { "mismatches above" }
    )
    .unwrap();
    let json = json!({ "schema": "qvertex.relations.v1", "n": n, "relations": relations, "drinfeld": drinfeld, "pass": pass });
    finish(opts, &json, text, pass)
}

fn verify_lemmas_cmd(opts: &Options) -> Result<Outcome, CliError> {
    let n = opts.n;
    let mut text = String::new();
    let mut sweeps = Vec::new();
    let mut tables = Vec::new();
    let mut pass = true;
    for i in 1..=n {
        let s = sweep_lemmas(n, i, opts.path_max)?;
        writeln!(
            text,
            "{} lemmas n={n} i={i} length<={}: {} sequences, {} equivalences, {} mismatches",
            verdict(s.pass()),
            opts.path_max,
            s.sequences,
            s.checks,
            s.mismatches.len()
        )
        .unwrap();
        for m in &s.mismatches {
            writeln!(text, "     {} seq {:?} head {:?}: bullet {} module {}", m.lemma, m.seq, m.head, m.bullet_nonzero, m.module_nonzero)
                .unwrap();
        }
        pass &= s.pass();
        sweeps.push(s);
        let rows = shift_table(n, i, 6)?;
        for r in rows.iter().filter(|r| !r.nonzero.is_empty() || !r.pass) {
            let path: Vec<String> = r.fpath.iter().map(|j| j.to_string()).collect();
            let shifts: Vec<String> = r.shifts.iter().map(|t| t.to_string()).collect();
            writeln!(
                text,
                "{} shift {} on path [{}] shifts [{}]: predicted {}, nonzero at {:?}",
                verdict(r.pass),
                r.head,
                path.join(","),
                shifts.join(","),
                r.predicted,
                r.nonzero.iter().map(|t| t.to_string()).collect::<Vec<_>>()
            )
            .unwrap();
        }
        let ok = rows.iter().all(|r| r.pass);
        writeln!(text, "{} shift table n={n} i={i}: {} head/element pairs, window [-6, 6]", verdict(ok), rows.len()).unwrap();
        pass &= ok;
        tables.push(json!({ "i": i, "rows": rows }));
    }
    let json = json!({ "schema": "qvertex.lemmas.v1", "n": n, "sweeps": sweeps, "shift_tables": tables, "pass": pass });
    finish(opts, &json, text, pass)
}

fn basis_cmd(opts: &Options) -> Result<Outcome, CliError> {
    let (n, i) = (opts.n, opts.i);
    let basis = enumerate_basis(n, i, opts.psi_max)?;
    let mut text = format!("basis n={n} i={i} psi-max={}: {} elements\n", opts.psi_max, basis.len());
    for e in &basis {
        let w = e.label.weight.label_relative(&LatticeVector::lambda(n, i), &format!("λ{i}"));
        writeln!(text, "[{w}] {}", e.render(i)).unwrap();
    }
    let elements: Vec<_> = basis.iter().map(|e| e.to_json(i)).collect();
    let json = json!({ "schema": "qvertex.basis.v1", "n": n, "i": i, "psi_max": opts.psi_max, "elements": elements });
    finish(opts, &json, text, true)
}

fn module_cmd(opts: &Options) -> Result<Outcome, CliError> {
    let (n, i) = (opts.n, opts.i);
    let uqz = build_uqz(fd_module(n, i)?, opts.zorder);
    let lz = build_lz_basis(&uqz, caps(opts));
    let rank = lz_rank(&uqz, &lz.elements, &specialization());
    let mut checks = uqz.check_w_eigen();
    checks.extend(uqz.check_m_exchange());
    checks.extend(uqz.check_classical_limits()?);
    checks.extend(fd_module(n, i)?.check_relations().into_iter().map(|c| (c.name, c.pass)));
    let independent = rank == lz.elements.len();
    let pass = independent && checks.iter().all(|c| c.1);
    let base = LatticeVector::lambda(n, i);
    let name = format!("λ{i}");
    let mut text = format!("L(λ{i})_z n={n} zorder={} factors<={} path<={}\n", opts.zorder, opts.psi_max, opts.path_max);
    for e in &lz.elements {
        writeln!(text, "[{}] {}", e.weight.label_relative(&base, &name), e.label).unwrap();
    }
    for a in &lz.actions {
        let to = match &a.to {
            None => "0".to_string(),
            Some((c, s)) => format!("({}) {c}", s.render()),
        };
        writeln!(text, "{} {} = {to}", module_name(a.head), a.from).unwrap();
    }
    for (name, ok) in &checks {
        writeln!(text, "{} {name}", verdict(*ok)).unwrap();
    }
    writeln!(text, "{} rank {}/{} at q^(1/2) = 3/2", verdict(independent), rank, lz.elements.len()).unwrap();
    let elements: Vec<_> = lz
        .elements
        .iter()
        .map(|e| json!({ "label": e.label.to_string(), "fpath": e.fpath, "weight": e.weight.label_relative(&base, &name) }))
        .collect();
    let actions: Vec<_> = lz
        .actions
        .iter()
        .map(|a| {
            json!({
                "generator": module_name(a.head),
                "from": a.from.to_string(),
                "to": a.to.as_ref().map(|(c, _)| c.to_string()),
                "scalar": a.to.as_ref().map(|(_, s)| s.render()),
            })
        })
        .collect();
    let checks_json: Vec<_> = checks.iter().map(|(n, p)| json!({ "name": n, "pass": p })).collect();
    let json = json!({
        "schema": "qvertex.module.v1", "n": n, "i": i, "caps": lz.caps, "elements": elements, "actions": actions,
        "checks": checks_json, "rank": rank, "pass": pass,
    });
    finish(opts, &json, text, pass)
}

fn omega_cmd(opts: &Options) -> Result<Outcome, CliError> {
    if opts.n > 2 {
        return Err(CliError::Usage("omega is built for n ∈ {1, 2}".into()));
    }
    let report = build_omega(opts.n, opts.i, caps(opts), opts.zorder)?;
    let pass = report.structure_ok();
    finish(opts, &report.to_json(), report.render(), pass)
}

fn graph_cmd(opts: &Options, side: Side, figure: bool) -> Result<Outcome, CliError> {
    let (n, i) = (opts.n, opts.i);
    let caps = if figure {
        if i != 1 || n > 2 {
            return Err(CliError::Usage("the drawn figures are for n ∈ {1, 2}, i = 1".into()));
        }
        crate::repmod::figure_caps(n)
    } else {
        caps(opts)
    };
    let graph = match side {
        Side::Module => ActionGraph::module(&build_lz_basis(&build_uqz(fd_module(n, i)?, opts.zorder), caps)),
        Side::Bullet => ActionGraph::bullet(&enumerate_ybasis(n, i, caps.factors)?, caps),
    };
    let matches = figure.then(|| graph.isomorphic(&if n == 1 { figure_sl2() } else { figure_sl3() }));
    let pass = matches != Some(false);
    let output = match opts.format {
        Format::Dot => graph.to_dot(),
        Format::Json => {
            let mut v = serde_json::to_value(graph.to_json())?;
            v["figure_isomorphic"] = json!(matches);
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Text => {
            let mut text = format!("{}: {} nodes, {} edges\n", graph.title, graph.node_count(), graph.edge_count());
            for e in graph.graph.edge_indices() {
                let (a, b) = graph.graph.edge_endpoints(e).expect("edge endpoints");
                writeln!(text, "{} [{}] -> {} [{}]: {}", graph.graph[a].name, graph.graph[a].weight, graph.graph[b].name, graph.graph[b].weight, graph.graph[e])
                    .unwrap();
            }
            if let Some(ok) = matches {
                writeln!(text, "{} isomorphic to the drawn figure", verdict(ok)).unwrap();
            }
            text
        }
    };
    Ok(Outcome { output, pass })
}

fn eval_cmd(opts: &Options, text: &str) -> Result<Outcome, CliError> {
    let e = parse_expr(text, opts.n)?;
    let value = e.eval(opts.n)?;
    let out = format!("{}\n", value.render());
    let json = json!({ "schema": "qvertex.eval.v1", "n": opts.n, "expr": e.render(), "value": value.render(), "terms": value.to_json() });
    finish(opts, &json, out, true)
}

fn selftest_cmd(opts: &Options, states: usize, independence: bool) -> Result<Outcome, CliError> {
    let n = opts.n;
    let mut text = String::new();
    let cfg = OracleConfig { zcutoff: opts.fock_cutoff as i64, out_degree: 2 };
    let pairs = oracle_sweep(n, states, 2, &cfg, opts.seed)?;
    let mut pass = true;
    for c in &pairs {
        writeln!(text, "{} oracle {} ∘ {}: {} states, {} coefficients", verdict(c.pass), c.a, c.b, c.states, c.coefficients).unwrap();
        pass &= c.pass;
    }
    let mut modules = Vec::new();
    for i in 1..=n {
        let m = fd_module(n, i)?;
        let checks = m.check_relations();
        let ok = checks.iter().all(|c| c.pass);
        let seqs = all_sequences(n, opts.path_max);
        let nonzero = seqs.iter().map(|s| nonzero_fpath(&m, s)).collect::<Result<Vec<bool>, _>>()?.into_iter().filter(|&b| b).count();
        writeln!(
            text,
            "{} L(λ{i}): dimension {}, {} relation checks; path conditions agree with matrices on {} sequences ({} nonzero)",
            verdict(ok),
            m.dim(),
            checks.len(),
            seqs.len(),
            nonzero
        )
        .unwrap();
        pass &= ok;
        modules.push(json!({ "i": i, "dim": m.dim(), "checks": checks.len(), "sequences": seqs.len(), "pass": ok }));
    }
    let mut rank = None;
    if independence {
        let cfg = IndependenceConfig {
            t_hi: Half::from_int(1),
            zcutoff: opts.fock_cutoff,
            seed: opts.seed,
            psi_max: opts.psi_max,
            ..IndependenceConfig::default()
        };
        let r = independence_rank(n, opts.i, cfg, &specialization())?;
        writeln!(text, "{} independence n={n} i={}: rank {}/{} over {} columns", verdict(r.full_rank()), opts.i, r.rank, r.rows, r.columns)
            .unwrap();
        pass &= r.full_rank();
        rank = Some(r);
    }
    writeln!(text, "{} selftest", verdict(pass)).unwrap();
    let json = json!({ "schema": "qvertex.selftest.v1", "n": n, "oracle": pairs, "modules": modules, "independence": rank, "pass": pass });
    finish(opts, &json, text, pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        let mut v = vec!["qvertex"];
        v.extend_from_slice(args);
        run(&Cli::parse_from(v)).unwrap()
    }

    #[test]
    fn eval_reports_vanishing_bullet() {
        let o = run_args(&["eval", "psi[2] . Y[1]", "--n", "2"]);
        assert_eq!(o.output, "0\n");
    }

    #[test]
    fn relations_command_passes() {
        let o = run_args(&["verify", "relations", "--n", "2", "--psi-max", "1"]);
        assert!(o.pass, "{}", o.output);
        let json = run_args(&["verify", "relations", "--n", "1", "--format", "json", "--psi-max", "1"]);
        let v: serde_json::Value = serde_json::from_str(&json.output).unwrap();
        assert_eq!(v["schema"], "qvertex.relations.v1");
    }

    #[test]
    fn output_is_deterministic() {
        let a = run_args(&["basis", "--n", "2", "--format", "json"]).output;
        let b = run_args(&["basis", "--n", "2", "--format", "json"]).output;
        assert_eq!(a, b);
    }

    #[test]
    fn dot_is_only_for_graphs() {
        let cli = Cli::parse_from(["qvertex", "basis", "--format", "dot"]);
        assert!(matches!(run(&cli), Err(CliError::Usage(_))));
        let o = run_args(&["graph", "--n", "1", "--figure", "--format", "dot"]);
        assert!(o.pass);
        assert!(o.output.starts_with("digraph"));
    }

    #[test]
    fn out_of_range_index_is_an_error() {
        let cli = Cli::parse_from(["qvertex", "basis", "--n", "2", "--i", "3"]);
        assert!(matches!(run(&cli), Err(CliError::Rep(RepError::IndexOutOfRange { index: 3, n: 2 }))));
    }
}
