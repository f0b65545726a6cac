//! The `gmat` command line. [`execute`] runs one command and returns its
//! output and exit code: 0 when the verdict is true, 1 when it is false
//! (or a decomposition fails), 2 on usage or input errors.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use gmat_core::algebra::{Algebra, LinearMapRep};
use gmat_core::blocks::{block_components, block_pairs, check_block_identities, component_name, DerivedData};
use gmat_core::hypotheses::{hypothesis_report, Theorem, Verdict};
use gmat_core::json::{gma_to_json, parse_algebra, parse_bilinear, parse_gma, parse_linear_map};
use gmat_core::lie::{check_identity_l41, lie_decompose, verify_standard_form, LieFailure};
use gmat_core::morita::{
    build_block_partition, build_from_idempotent, build_nonloyal_demo, build_upper_triangular, gma_center, Block, Gma,
    Pairing, DEFAULT_ENUM_CAP,
};
use gmat_core::traces::{first_outside_span, proper_trace_decompose, properness_subspace, trace_space, TraceKind};
use gmat_core::BilinearMapRep;

#[derive(Parser, Debug)]
#[command(
    name = "gmat",
    version,
    about = "Generalized matrix algebras over F_p: centers, commuting traces, Lie isomorphisms"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Emit the machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Largest number of points any exhaustive search may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUM_CAP)]
    enum_cap: u64,
    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the axioms of a GMA spec (or an algebra spec with --algebra).
    Validate {
        file: PathBuf,
        /// Treat the file as an algebra spec.
        #[arg(long)]
        algebra: bool,
    },
    /// Emit a built-in GMA spec.
    Catalog {
        #[command(subcommand)]
        entry: CatalogEntry,
    },
    /// Center of a GMA with its corner projections and φ.
    Center { gma: PathBuf },
    /// Evaluate the hypotheses of a structure theorem.
    Hypotheses {
        #[arg(long, value_parser = parse_theorem)]
        theorem: Theorem,
        gma: PathBuf,
    },
    /// Basis of the commuting or centralizing traces.
    TraceSpace {
        #[arg(long, value_parser = parse_kind)]
        kind: TraceKind,
        gma: PathBuf,
    },
    /// Write the trace of a bilinear map in proper form.
    DecomposeTrace { gma: PathBuf, bilinear: PathBuf },
    /// Corner components of a trace and the identities they satisfy.
    BlockComponents { gma: PathBuf, bilinear: PathBuf },
    /// Standard form of a Lie isomorphism.
    DecomposeLie {
        source: PathBuf,
        target: PathBuf,
        map: PathBuf,
    },
    /// Decide the identity [[x^2, y], [x, y]] = 0.
    CheckIdentity { gma: PathBuf },
}

#[derive(Subcommand, Debug)]
enum CatalogEntry {
    /// M_n(F_p) split into blocks of sizes k and n − k.
    Full { n: usize, k: usize, p: u64 },
    /// Upper triangular T_n(F_p) split at the first diagonal entry.
    Triangular { n: usize, p: u64 },
    /// Peirce decomposition of an algebra at an idempotent.
    Peirce {
        algebra: PathBuf,
        /// Comma-separated coordinates of the idempotent.
        idempotent: String,
    },
    /// F_p² acting coordinatewise on F_p²: faithful but not loyal.
    NonloyalDemo { p: u64 },
}

fn parse_theorem(s: &str) -> Result<Theorem, String> {
    s.parse()
}

fn parse_kind(s: &str) -> Result<TraceKind, String> {
    s.parse()
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

struct Report {
    ok: bool,
    human: String,
    data: Map<String, Value>,
}

impl Report {
    fn new(ok: bool) -> Self {
        Report {
            ok,
            human: String::new(),
            data: Map::new(),
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.human.push_str(s.as_ref());
        self.human.push('\n');
    }

    fn set(&mut self, key: &str, v: Value) {
        self.data.insert(key.to_string(), v);
    }
}

/// Error with exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

/// Runs `gmat` with `argv` (without the program name).
pub fn execute<S: AsRef<str>>(argv: &[S]) -> Execution {
    let args: Vec<String> = argv.iter().map(|s| s.as_ref().to_string()).collect();
    let cli = match Cli::try_parse_from(std::iter::once("gmat".to_string()).chain(args.iter().cloned())) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Execution {
                    stdout: String::new(),
                    stderr: text,
                    code: 2,
                }
            } else {
                Execution {
                    stdout: text,
                    stderr: String::new(),
                    code: 0,
                }
            };
        }
    };
    let start = Instant::now();
    let result = run(&cli);
    let elapsed = start.elapsed();
    match result {
        Err(InputError(msg)) => Execution {
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            code: 2,
        },
        Ok(Output::Raw(text)) => Execution {
            stdout: text,
            stderr: String::new(),
            code: 0,
        },
        Ok(Output::Report(mut report)) => {
            let code = if report.ok { 0 } else { 1 };
            let stdout = if cli.global.json {
                let mut obj = Map::new();
                obj.insert("command".into(), json!(args));
                obj.insert("ok".into(), json!(report.ok));
                obj.append(&mut report.data);
                if cli.global.timing {
                    obj.insert("elapsed_ms".into(), json!(elapsed.as_secs_f64() * 1e3));
                }
                serde_json::to_string_pretty(&Value::Object(obj)).expect("json values serialize") + "\n"
            } else {
                if cli.global.timing {
                    report.line(format!("elapsed: {elapsed:.2?}"));
                }
                report.human
            };
            Execution {
                stdout,
                stderr: String::new(),
                code,
            }
        }
    }
}

enum Output {
    Raw(String),
    Report(Report),
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_gma_unchecked(path: &Path) -> Result<Gma, InputError> {
    parse_gma(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// Parses and rejects specs that violate the axioms.
fn load_gma(path: &Path) -> Result<Gma, InputError> {
    let g = load_gma_unchecked(path)?;
    if let Some(v) = g.validate().first() {
        return Err(InputError(format!("{}: invalid GMA: {v}", path.display())));
    }
    Ok(g)
}

fn load_bilinear(path: &Path, g: &Gma) -> Result<BilinearMapRep, InputError> {
    parse_bilinear(&read(path)?, g.field(), g.dim()).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Output, InputError> {
    let cap = cli.global.enum_cap;
    Ok(match &cli.command {
        Command::Catalog { entry } => Output::Raw(gma_to_json(&catalog(entry)?) + "\n"),
        Command::Validate { file, algebra } => Output::Report(if *algebra {
            validate_algebra(file)?
        } else {
            validate_gma(file)?
        }),
        Command::Center { gma } => Output::Report(center(&load_gma(gma)?)),
        Command::Hypotheses { theorem, gma } => Output::Report(hypotheses(&load_gma(gma)?, *theorem, cap)),
        Command::TraceSpace { kind, gma } => Output::Report(traces(&load_gma(gma)?, *kind, cap)?),
        Command::DecomposeTrace { gma, bilinear } => {
            let g = load_gma(gma)?;
            Output::Report(decompose_trace(&g, &load_bilinear(bilinear, &g)?))
        }
        Command::BlockComponents { gma, bilinear } => {
            let g = load_gma(gma)?;
            Output::Report(blocks(&g, &load_bilinear(bilinear, &g)?, cap))
        }
        Command::DecomposeLie { source, target, map } => {
            let (g, g2) = (load_gma(source)?, load_gma(target)?);
            if g.field() != g2.field() {
                return Err(InputError("source and target have different moduli".into()));
            }
            let l = parse_linear_map(&read(map)?, g.field(), g.dim(), g2.dim())
                .map_err(|e| InputError(format!("{}: {e}", map.display())))?;
            Output::Report(decompose_lie(&l, &g, &g2)?)
        }
        Command::CheckIdentity { gma } => Output::Report(identity(&load_gma(gma)?, cap)?),
    })
}

fn catalog(entry: &CatalogEntry) -> Result<Gma, InputError> {
    Ok(match entry {
        CatalogEntry::Full { n, k, p } => build_block_partition(*n, *k, *p)?,
        CatalogEntry::Triangular { n, p } => build_upper_triangular(*n, *p)?,
        CatalogEntry::NonloyalDemo { p } => build_nonloyal_demo(*p)?,
        CatalogEntry::Peirce { algebra, idempotent } => {
            let alg = parse_algebra(&read(algebra)?).map_err(|e| InputError(format!("{}: {e}", algebra.display())))?;
            if let Some(v) = alg.validate().first() {
                return Err(InputError(format!("{}: invalid algebra: {v}", algebra.display())));
            }
            let e = idempotent
                .split(',')
                .map(|s| s.trim().parse::<i64>().map(|v| alg.field().from_i64(v)))
                .collect::<Result<Vec<u32>, _>>()
                .map_err(|e| InputError(format!("idempotent: {e}")))?;
            if e.len() != alg.dim() {
                return Err(InputError(format!(
                    "idempotent: expected {} coordinates, found {}",
                    alg.dim(),
                    e.len()
                )));
            }
            build_from_idempotent(&alg, &e)?.gma
        }
    })
}

fn fmt_vec(v: &[u32]) -> String {
    format!("{v:?}")
}

fn validate_algebra(path: &Path) -> Result<Report, InputError> {
    let alg: Algebra = parse_algebra(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let violations: Vec<String> = alg.validate().iter().map(ToString::to_string).collect();
    Ok(violation_report(
        violations,
        json!({ "p": alg.field().modulus(), "dim": alg.dim() }),
    ))
}

fn validate_gma(path: &Path) -> Result<Report, InputError> {
    let g = load_gma_unchecked(path)?;
    let violations: Vec<String> = g.validate().iter().map(ToString::to_string).collect();
    Ok(violation_report(violations, dims(&g)))
}

fn violation_report(violations: Vec<String>, shape: Value) -> Report {
    let mut r = Report::new(violations.is_empty());
    if violations.is_empty() {
        r.line("ok");
    } else {
        r.line(format!("{} violation(s)", violations.len()));
        for v in &violations {
            r.line(format!("  {v}"));
        }
    }
    r.set("dimensions", shape);
    r.set("violations", json!(violations));
    r
}

fn dims(g: &Gma) -> Value {
    json!({
        "p": g.field().modulus(),
        "A": g.a().dim(), "M": g.m().dim(), "N": g.n().dim(), "B": g.b().dim(),
        "flat": g.dim(),
    })
}

fn center(g: &Gma) -> Report {
    let c = gma_center(g);
    let phi = c.phi_matrix(g.b().dim());
    let mut r = Report::new(true);
    r.line(format!("center dimension: {}", c.dim()));
    for z in &c.center_basis {
        r.line(format!("  {}", fmt_vec(z)));
    }
    r.line(format!("pi_A basis: {:?}", c.pi_a_basis));
    r.line(format!("pi_B basis: {:?}", c.pi_b_basis));
    r.line(format!("phi images: {:?}", c.phi_images));
    r.line(format!(
        "phi well defined: {}, injective: {}",
        c.phi_well_defined, c.phi_injective
    ));
    r.set("dimensions", dims(g));
    r.set("center_basis", json!(c.center_basis));
    r.set("piA_basis", json!(c.pi_a_basis));
    r.set("piB_basis", json!(c.pi_b_basis));
    r.set("phi_images", json!(c.phi_images));
    r.set("phi", json!(phi.columns()));
    r.set("phi_well_defined", json!(c.phi_well_defined));
    r.set("phi_injective", json!(c.phi_injective));
    r
}

fn hypotheses(g: &Gma, theorem: Theorem, cap: u64) -> Report {
    let report = hypothesis_report(g, theorem, cap);
    let mut r = Report::new(report.all_hold());
    r.line(format!("hypotheses of {theorem}"));
    let mut conditions = Vec::new();
    for c in &report.conditions {
        let (status, detail) = match &c.verdict {
            Verdict::Holds => ("holds", Value::Null),
            Verdict::Fails(w) => ("fails", json!({ "note": w.note, "vectors": w.vectors })),
            Verdict::Skipped(note) => ("skipped", json!({ "note": note })),
        };
        let mut line = format!("  {:<28} {status}", c.key);
        match &c.verdict {
            Verdict::Fails(w) if w.vectors.is_empty() => line += &format!(": {}", w.note),
            Verdict::Fails(w) => line += &format!(": {} {:?}", w.note, w.vectors),
            Verdict::Skipped(note) => line += &format!(": {note}"),
            Verdict::Holds => {}
        }
        r.line(line);
        conditions.push(json!({ "key": c.key, "status": status, "witness": detail }));
    }
    r.set("theorem", json!(theorem.key()));
    r.set("conditions", json!(conditions));
    r
}

fn tensor_json(q: &BilinearMapRep) -> Value {
    let d = q.dim();
    json!((0..d)
        .map(|i| (0..d).map(|j| q.basis_value(i, j).to_vec()).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn traces(g: &Gma, kind: TraceKind, cap: u64) -> Result<Report, InputError> {
    let space = trace_space(g, kind, cap)?;
    let outside = first_outside_span(&properness_subspace(g), &space);
    let mut r = Report::new(true);
    let kind_name = match kind {
        TraceKind::Commuting => "commuting",
        TraceKind::Centralizing => "centralizing",
    };
    r.line(format!("{kind_name} trace space: dimension {}", space.len()));
    match outside {
        None => r.line("every element is proper"),
        Some(i) => r.line(format!("basis element {i} is not proper")),
    }
    r.set("kind", json!(kind_name));
    r.set("dimension", json!(space.len()));
    r.set("all_proper", json!(outside.is_none()));
    r.set("basis", Value::Array(space.iter().map(tensor_json).collect()));
    Ok(r)
}

fn decompose_trace(g: &Gma, q: &BilinearMapRep) -> Report {
    match proper_trace_decompose(g, q) {
        Ok(dec) => {
            let mut r = Report::new(true);
            r.line("proper");
            r.line(format!("z = {}", fmt_vec(&dec.z)));
            r.line(format!("mu columns = {:?}", dec.mu.columns()));
            r.line(format!("nu = {:?}", tensor_rows(&dec.nu)));
            r.set("proper", json!(true));
            r.set("z", json!(dec.z));
            r.set("mu", json!(dec.mu.columns()));
            r.set("nu", tensor_json(&dec.nu));
            r
        }
        Err(e) => {
            let mut r = Report::new(false);
            r.line(format!(
                "not proper: inconsistent at basis pair ({}, {})",
                e.pair.0, e.pair.1
            ));
            r.set("proper", json!(false));
            r.set("pair", json!([e.pair.0, e.pair.1]));
            r
        }
    }
}

fn tensor_rows(q: &BilinearMapRep) -> Vec<Vec<Vec<u32>>> {
    let d = q.dim();
    (0..d)
        .map(|i| (0..d).map(|j| q.basis_value(i, j).to_vec()).collect())
        .collect()
}

fn pairing_json(p: &Pairing) -> Value {
    let (du, dv, _) = p.dims();
    json!((0..du)
        .map(|u| (0..dv).map(|v| p.basis(u, v).to_vec()).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn derived_json(d: &DerivedData) -> Value {
    json!({
        "alpha": d.alpha.columns(),
        "tau": d.tau.columns(),
        "gamma": d.gamma.columns(),
        "gamma_prime": d.gamma_prime.columns(),
        "delta": pairing_json(&d.delta),
        "epsilon": d.epsilon,
        "epsilon_prime": d.epsilon_prime,
        "zeta": d.zeta,
        "theta": d.theta,
    })
}

fn blocks(g: &Gma, q: &BilinearMapRep, cap: u64) -> Report {
    let analysis = block_components(g, q, cap);
    let comps = &analysis.components;
    let mut components = Map::new();
    let mut nonzero = Vec::new();
    for out in Block::ALL {
        for (i, j) in block_pairs() {
            let name = component_name(out, i, j);
            if !comps.is_zero(out, i, j) {
                nonzero.push(name.clone());
            }
            components.insert(name, pairing_json(comps.get(out, i, j)));
        }
    }
    let mut r = Report::new(false);
    r.line(format!("nonzero components: {}", nonzero.join(" ")));
    r.set("nonzero_components", json!(nonzero));
    r.set("components", Value::Object(components));
    match &analysis.derived {
        Err(e) => {
            r.line(format!("derived data unavailable: {e}"));
            r.set("derived", Value::Null);
            r.set("derived_error", json!(e.to_string()));
        }
        Ok(d) => {
            r.line(format!(
                "epsilon = {}, epsilon' = {}",
                fmt_vec(&d.epsilon),
                fmt_vec(&d.epsilon_prime)
            ));
            r.line(format!("alpha columns = {:?}", d.alpha.columns()));
            r.line(format!("gamma columns = {:?}", d.gamma.columns()));
            r.line(format!("gamma' columns = {:?}", d.gamma_prime.columns()));
            let checks = check_block_identities(g, &gma_center(g), comps, d);
            let mut out = Vec::new();
            for c in &checks {
                match &c.failure {
                    None => r.line(format!("  {:<28} holds", c.name)),
                    Some(msg) => r.line(format!("  {:<28} fails: {msg}", c.name)),
                }
                out.push(json!({ "name": c.name, "holds": c.holds(), "failure": c.failure }));
            }
            r.ok = checks.iter().all(|c| c.holds());
            r.set("derived", derived_json(d));
            r.set("checks", json!(out));
        }
    }
    r
}

fn decompose_lie(l: &LinearMapRep, g: &Gma, g2: &Gma) -> Result<Report, InputError> {
    let dec = match lie_decompose(l, g, g2) {
        Ok(dec) => dec,
        Err(LieFailure::Shape(e)) => return Err(InputError(e.to_string())),
        Err(e) => {
            let mut r = Report::new(false);
            r.line(format!("failure: {e}"));
            r.set("failure", json!(e.to_string()));
            return Ok(r);
        }
    };
    let violations = verify_standard_form(l, &dec, g, g2)?;
    let mut r = Report::new(violations.is_empty());
    r.line(format!("kind: {}", dec.kind));
    if dec.degenerate {
        r.line("degenerate: m0 is both multiplicative and anti-multiplicative");
    }
    r.line(format!("lambda = {}", fmt_vec(&dec.lambda)));
    r.line(format!("m columns = {:?}", dec.m.columns()));
    r.line(format!("n columns = {:?}", dec.n.columns()));
    if let Some(h) = &dec.h {
        r.line(format!("n(x) = h(x) * 1 with h = {}", fmt_vec(h)));
    }
    if violations.is_empty() {
        r.line("standard form verified");
    }
    for v in &violations {
        r.line(format!("  violated: {v}"));
    }
    r.set("kind", json!(dec.kind.to_string()));
    r.set("degenerate", json!(dec.degenerate));
    r.set("lambda", json!(dec.lambda));
    r.set("mu1", json!(dec.mu1.columns()));
    r.set("m", json!(dec.m.columns()));
    r.set("n", json!(dec.n.columns()));
    r.set("h", json!(dec.h));
    r.set(
        "violations",
        json!(violations.iter().map(ToString::to_string).collect::<Vec<_>>()),
    );
    Ok(r)
}

fn identity(g: &Gma, cap: u64) -> Result<Report, InputError> {
    let w = check_identity_l41(g, cap)?;
    let mut r = Report::new(w.is_none());
    match &w {
        None => r.line("[[x^2, y], [x, y]] = 0 holds"),
        Some((x, y)) => r.line(format!("fails at x = {}, y = {}", fmt_vec(x), fmt_vec(y))),
    }
    r.set("holds", json!(w.is_none()));
    r.set("witness", json!(w.map(|(x, y)| json!({ "x": x, "y": y }))));
    Ok(r)
}
