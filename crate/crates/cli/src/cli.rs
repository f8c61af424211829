//! Subcommand definitions and dispatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use flowjoin_core::bound::{make_budget, solve_bound, BoundCertificate};
use flowjoin_core::cq::{answer_cq, widths, CqOptions, Hypergraph, TdChoice, Width, DEFAULT_COMBINATION_CAP};
use flowjoin_core::database::Database;
use flowjoin_core::degree::{infer_cardinalities, infer_constraints, DegreeConstraints};
use flowjoin_core::exec::{answer_ddr, AnswerOptions};
use flowjoin_core::fixtures;
use flowjoin_core::num::{best_rational, Rat};
use flowjoin_core::oracle::{first_uncovered, full_natural_join};
use flowjoin_core::shannon::{build_proof_sequence, replay, verify_proof_sequence, ProofSequence};
use flowjoin_core::value::Interner;
use flowjoin_core::vars::{VarNames, VarSet};
use flowjoin_core::Error;
use serde_json::{json, Map, Value as Json};

use crate::gen;
use crate::parse::{self, Query};
use crate::tsv;

#[derive(Parser, Debug)]
#[command(name = "flowjoin", version, about = "Output-size bounds and evaluation for disjunctive datalog rules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for the size bound and print its certificate as JSON.
    Bound(BoundArgs),
    /// Print the proof sequence of the bound, or check one from a file.
    Prove(ProveArgs),
    /// Evaluate a rule and report a model.
    RunDdr(RunDdrArgs),
    /// Evaluate a conjunctive query through tree decompositions.
    RunCq(RunCqArgs),
    /// Report fractional hypertree and submodular widths.
    Width(WidthArgs),
    /// Compute the full join directly.
    Oracle(OracleArgs),
    /// Check that head relations form a model.
    VerifyModel(VerifyArgs),
    /// Write a generated instance: query, constraints and data.
    Gen(GenArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Rule file, e.g. `U(A,B) | V(B,C) :- R(A,B), S(B,C).`
    pub query: PathBuf,
    /// Constraint file (`card(R) <= N`, `deg(R; Y | X) <= N`).
    #[arg(long, conflicts_with_all = ["card", "auto"])]
    pub constraints: Option<PathBuf>,
    /// `|R| <= N` for every body atom.
    #[arg(long, conflicts_with = "auto")]
    pub card: Option<u64>,
    /// Directory with one `<relation>.tsv` per body atom.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Infer tight constraints from the data.
    #[arg(long, requires = "data")]
    pub auto: bool,
    /// With `--auto`, infer only cardinalities.
    #[arg(long, requires = "auto")]
    pub cardinalities_only: bool,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub src: Source,
}

#[derive(Args, Debug)]
pub struct ProveArgs {
    #[command(flatten)]
    pub src: Source,
    /// Check the steps in FILE against the bound's witness instead.
    #[arg(long)]
    pub verify: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RunDdrArgs {
    #[command(flatten)]
    pub src: Source,
    /// Audit the executor's invariants at every node.
    #[arg(long)]
    pub check_invariants: bool,
    /// Compare against the full join (and check coverage when auditing).
    #[arg(long)]
    pub oracle_check: bool,
    /// Print statistics as JSON.
    #[arg(long)]
    pub json_stats: bool,
    /// Write one `<head>.tsv` per head.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RunCqArgs {
    #[command(flatten)]
    pub src: Source,
    /// `all`, `greedy`, or a file with one decomposition per line.
    #[arg(long, default_value = "all")]
    pub tds: String,
    /// Limit on bag combinations.
    #[arg(long, default_value_t = DEFAULT_COMBINATION_CAP)]
    pub max_combinations: u128,
    #[arg(long)]
    pub check_invariants: bool,
    /// Also compute the join directly and fail on any difference.
    #[arg(long)]
    pub oracle_check: bool,
    #[arg(long)]
    pub json_stats: bool,
    /// Write the answer here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WidthArgs {
    #[command(flatten)]
    pub src: Source,
    #[arg(long)]
    pub fhtw: bool,
    #[arg(long)]
    pub subw: bool,
    #[arg(long, default_value_t = DEFAULT_COMBINATION_CAP)]
    pub max_combinations: u128,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    pub query: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub query: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Directory with one `<head>.tsv` per head.
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    Uniform,
    Skewed,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// A named shape (`flowjoin gen --list`), `four-cycle`, or `random`.
    #[arg(required_unless_present = "list")]
    pub shape: Option<String>,
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Layout::Skewed)]
    pub layout: Layout,
    /// Domain size for the uniform layout.
    #[arg(long, default_value_t = 8)]
    pub domain: u32,
    #[arg(long, required_unless_present = "list")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub list: bool,
}

/// A failed command: usage errors exit with 2, domain errors with 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::UnknownVariable(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<tsv::TsvError> for Failure {
    fn from(e: tsv::TsvError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Out<'a> = &'a mut dyn Write;

/// Parses `args` (program name first) and runs the command. Returns the
/// exit code; reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: Out, err: Out) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(cmd: Command, out: Out) -> Result<i32, Failure> {
    match cmd {
        Command::Bound(a) => bound(a, out),
        Command::Prove(a) => prove(a, out),
        Command::RunDdr(a) => run_ddr(a, out),
        Command::RunCq(a) => run_cq(a, out),
        Command::Width(a) => width(a, out),
        Command::Oracle(a) => oracle(a, out),
        Command::VerifyModel(a) => verify_model(a, out),
        Command::Gen(a) => generate(a, out),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

pub fn load_query(path: &Path) -> Result<Query, Failure> {
    parse::parse_query(&read(path)?).map_err(|e| Failure::Usage(format!("{}:{e}", path.display())))
}

/// The query, its database (when `--data` is given) and the constraints.
struct Loaded {
    query: Query,
    db: Option<Database>,
    values: Interner,
    dc: DegreeConstraints,
}

fn load(src: &Source) -> Result<Loaded, Failure> {
    let query = load_query(&src.query)?;
    let names = query.names().clone();
    let body = query.body().to_vec();
    let mut values = Interner::new();
    let db = match &src.data {
        Some(d) => Some(tsv::load_database(d, &body, &names, &mut values)?),
        None => None,
    };
    let dc = if let Some(p) = &src.constraints {
        parse::parse_constraints(&read(p)?, &names, &body)
            .map_err(|e| Failure::Usage(format!("{}:{e}", p.display())))?
    } else if let Some(n) = src.card {
        if n == 0 {
            return Err(Failure::Usage(String::from("--card must be positive")));
        }
        fixtures::body_cardinalities(&query.as_ddr(), n)
    } else if src.auto {
        let db = db.as_ref().expect("clap enforces --data with --auto");
        if src.cardinalities_only {
            infer_cardinalities(db)
        } else {
            infer_constraints(db, None)?
        }
    } else {
        return Err(Failure::Usage(String::from("pass --constraints FILE, --card N, or --data DIR --auto")));
    };
    Ok(Loaded { query, db, values, dc })
}

fn need_db(l: &Loaded) -> Result<&Database, Failure> {
    l.db.as_ref().ok_or_else(|| Failure::Usage(String::from("this command needs --data DIR")))
}

/// `3/2` when `x` is within 1e-9 of a fraction with a small denominator,
/// otherwise the decimal value.
pub fn show(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r = best_rational(x, 1000);
    if (flowjoin_core::num::rat_to_f64(&r) - x).abs() < 1e-9 {
        r.to_string()
    } else {
        format!("{x:.9}")
    }
}

fn rat_json(r: &Rat) -> Json {
    Json::String(r.to_string())
}

pub fn certificate_json(cert: &BoundCertificate, names: &VarNames, dc: &DegreeConstraints) -> Json {
    let budget = make_budget(cert);
    let mut obj = Map::new();
    obj.insert("exponent_bits".into(), json!(cert.exponent_bits));
    if let Some(n) = dc.uniform_bound() {
        if let Some(e) = cert.exponent_in(n) {
            obj.insert("exponent_logN".into(), rat_json(&e));
            obj.insert("N".into(), json!(n));
        }
    }
    let lambda: Map<String, Json> = cert.lambda.iter().map(|(z, v)| (names.render(*z), rat_json(v))).collect();
    let w: Map<String, Json> = cert.w.iter().map(|(t, v)| (t.render(names), rat_json(v))).collect();
    obj.insert("lambda".into(), Json::Object(lambda));
    obj.insert("w".into(), Json::Object(w));
    obj.insert("d".into(), json!(budget.d));
    obj.insert("B_d_digits".into(), json!(budget.bd_digits()));
    let (m, s) = cert.witness.sizes();
    obj.insert("witness_sizes".into(), json!({ "M": m, "S": s, "D": cert.integral.d.len(), "Z": cert.integral.z.len() }));
    let pruned: Vec<String> = cert.pruned.iter().map(|t| t.render(names)).collect();
    obj.insert("pruned".into(), json!(pruned));
    Json::Object(obj)
}

fn print_json(out: Out, v: &Json) -> Result<(), Failure> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("JSON values serialize"))?;
    Ok(())
}

fn bound(a: BoundArgs, out: Out) -> Result<i32, Failure> {
    let l = load(&a.src)?;
    let ddr = l.query.as_ddr();
    let cert = solve_bound(&ddr.head_sets(), &l.dc)?;
    print_json(out, &certificate_json(&cert, &ddr.names, &l.dc))?;
    Ok(0)
}

fn prove(a: ProveArgs, out: Out) -> Result<i32, Failure> {
    let l = load(&a.src)?;
    let ddr = l.query.as_ddr();
    let cert = solve_bound(&ddr.head_sets(), &l.dc)?;
    let (ineq, w) = (&cert.integral, &cert.witness);
    match a.verify {
        None => {
            let seq = build_proof_sequence(ineq, w)?;
            write!(out, "{}", seq.render(&ddr.names))?;
            Ok(0)
        }
        Some(p) => {
            let steps = parse::parse_steps(&read(&p)?, &ddr.names)
                .map_err(|e| Failure::Usage(format!("{}:{e}", p.display())))?;
            let ok = match replay(&steps, ineq, w) {
                Ok(snapshots) => verify_proof_sequence(&ProofSequence { steps, snapshots }, ineq, w),
                Err(e) => {
                    writeln!(out, "invalid: {e}")?;
                    return Ok(1);
                }
            };
            writeln!(out, "{}", if ok { "valid" } else { "invalid" })?;
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn run_ddr(a: RunDdrArgs, out: Out) -> Result<i32, Failure> {
    let l = load(&a.src)?;
    let db = need_db(&l)?;
    let ddr = l.query.as_ddr();
    let opts = AnswerOptions { audit: a.check_invariants, oracle: a.oracle_check, max_nodes: None };
    let ans = answer_ddr(&ddr, db, &l.dc, &opts)?;
    let rels = ans.relations(&ddr);
    let model_ok = if a.oracle_check { Some(first_uncovered(db, &ddr, &rels).is_none()) } else { None };
    let stats = &ans.model.stats;
    let leaves_within_budget = stats.leaves.iter().all(|leaf| ans.budget.admits_count(leaf.size as u64));
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir)?;
        for (h, r) in ddr.heads.iter().zip(&rels) {
            let text = tsv::render_columns(r, &h.cols, &ddr.names, &l.values);
            tsv::write_file(&dir.join(format!("{}.tsv", h.name)), &text)?;
        }
    }
    if a.json_stats {
        let heads: Map<String, Json> = ddr.heads.iter().zip(&rels).map(|(h, r)| (h.name.clone(), json!(r.len()))).collect();
        let leaves: Vec<Json> = stats
            .leaves
            .iter()
            .map(|l| json!({ "depth": l.depth, "head": ddr.names.render(l.head), "size": l.size, "targets": l.targets }))
            .collect();
        let mut obj = Map::new();
        obj.insert("heads".into(), Json::Object(heads));
        obj.insert("leaves".into(), json!(leaves));
        obj.insert("leaf_count".into(), json!(stats.leaf_count()));
        obj.insert("nodes".into(), json!(stats.nodes));
        obj.insert("max_depth".into(), json!(stats.max_depth));
        obj.insert("heavy_branches".into(), json!(stats.heavy_branches));
        obj.insert("max_leaf_size".into(), json!(stats.max_leaf_size()));
        obj.insert("leaves_within_budget".into(), json!(leaves_within_budget));
        obj.insert("bound".into(), certificate_json(&ans.certificate, &ddr.names, &l.dc));
        if let Some(ok) = model_ok {
            obj.insert("model_ok".into(), json!(ok));
        }
        if let Some(r) = &ans.model.audit {
            obj.insert(
                "invariants".into(),
                json!({
                    "nodes": r.nodes,
                    "a_identity": r.identity,
                    "b_sub_probability": r.sub_probability,
                    "c_above_budget": r.above_budget,
                    "d_targets_nonempty": r.targets_nonempty,
                    "e_coverage": r.coverage,
                }),
            );
        }
        print_json(out, &Json::Object(obj))?;
    } else {
        for (h, r) in ddr.heads.iter().zip(&rels) {
            writeln!(out, "{}\t{}", h.name, r.len())?;
        }
        writeln!(out, "leaves\t{}", stats.leaf_count())?;
        writeln!(out, "max_leaf_size\t{}", stats.max_leaf_size())?;
        if let Some(ok) = model_ok {
            writeln!(out, "model\t{}", if ok { "ok" } else { "FAILED" })?;
        }
        if ans.model.audit.is_some() {
            writeln!(out, "invariants\tok")?;
        }
    }
    Ok(if model_ok == Some(false) || !leaves_within_budget { 1 } else { 0 })
}

fn run_cq(a: RunCqArgs, out: Out) -> Result<i32, Failure> {
    let l = load(&a.src)?;
    let db = need_db(&l)?;
    let Query::Cq(q) = &l.query else {
        return Err(Failure::Usage(String::from("run-cq needs a single-head query")));
    };
    let tds = match a.tds.as_str() {
        "all" => TdChoice::All,
        "greedy" => TdChoice::Greedy,
        file => {
            let text = read(Path::new(file))?;
            TdChoice::Given(parse::parse_tds(&text, &q.names, q.free()).map_err(|e| Failure::Usage(format!("{file}:{e}")))?)
        }
    };
    let opts = CqOptions { tds, cap: a.max_combinations, audit: a.check_invariants };
    let ans = answer_cq(q, db, &l.dc, &opts)?;
    let cols = q.head.cols.clone();
    let text = tsv::render_columns(&ans.relation, &cols, &q.names, &l.values);
    let oracle_ok = if a.oracle_check {
        Some(full_natural_join(db).project(q.free()) == ans.relation)
    } else {
        None
    };
    match &a.out {
        Some(p) => tsv::write_file(p, &text)?,
        None if !a.json_stats => write!(out, "{text}")?,
        None => {}
    }
    if a.json_stats {
        let tds: Vec<String> = ans.tds.iter().map(|t| render_td(&t.bags, &q.names)).collect();
        let mut obj = Map::new();
        obj.insert("size".into(), json!(ans.relation.len()));
        obj.insert("tds".into(), json!(tds));
        obj.insert("combinations".into(), json!(ans.combinations));
        obj.insert("exponent_bits".into(), json!(ans.exponent_bits));
        if let Some(ok) = oracle_ok {
            obj.insert("oracle_ok".into(), json!(ok));
        }
        print_json(out, &Json::Object(obj))?;
    }
    Ok(if oracle_ok == Some(false) { 1 } else { 0 })
}

fn render_td(bags: &[VarSet], names: &VarNames) -> String {
    bags.iter().map(|b| names.render(*b)).collect::<Vec<_>>().join(" ")
}

fn width_json(w: &Width) -> Json {
    json!({ "bits": w.bits, "logN": w.log_n })
}

fn show_width(w: &Width) -> String {
    match w.log_n {
        Some(x) => show(x),
        None => format!("{} bits", show(w.bits)),
    }
}

fn width(a: WidthArgs, out: Out) -> Result<i32, Failure> {
    let l = load(&a.src)?;
    let Query::Cq(q) = &l.query else {
        return Err(Failure::Usage(String::from("width needs a single-head query")));
    };
    let h = Hypergraph::new(q.edges());
    let r = widths(&h, q.free(), &l.dc, None, a.max_combinations)?;
    let (show_f, show_s) = if a.fhtw || a.subw { (a.fhtw, a.subw) } else { (true, true) };
    if a.json {
        let mut obj = Map::new();
        let tds: Vec<Json> = r
            .tds
            .iter()
            .zip(&r.per_td)
            .map(|(t, w)| json!({ "bags": render_td(&t.bags, &q.names), "width": width_json(w) }))
            .collect();
        obj.insert("tds".into(), json!(tds));
        if show_f {
            obj.insert("fhtw".into(), width_json(&r.fhtw));
        }
        if show_s {
            obj.insert("subw".into(), width_json(&r.subw));
            let worst: Vec<String> =
                r.tds.iter().zip(&r.worst_combination).map(|(t, &i)| q.names.render(t.bags[i])).collect();
            obj.insert("worst_combination".into(), json!(worst));
        }
        print_json(out, &Json::Object(obj))?;
        return Ok(0);
    }
    for (i, (t, w)) in r.tds.iter().zip(&r.per_td).enumerate() {
        writeln!(out, "td{i}\t{}\t{}", render_td(&t.bags, &q.names), show_width(w))?;
    }
    if show_f {
        writeln!(out, "fhtw\t{}", show_width(&r.fhtw))?;
    }
    if show_s {
        writeln!(out, "subw\t{}", show_width(&r.subw))?;
        let worst: Vec<String> = r.tds.iter().zip(&r.worst_combination).map(|(t, &i)| q.names.render(t.bags[i])).collect();
        writeln!(out, "worst\t{}", worst.join(" "))?;
    }
    Ok(0)
}

fn oracle(a: OracleArgs, out: Out) -> Result<i32, Failure> {
    let query = load_query(&a.query)?;
    let mut values = Interner::new();
    let db = tsv::load_database(&a.data, query.body(), query.names(), &mut values)?;
    let join = full_natural_join(&db);
    let (rel, cols) = match &query {
        Query::Cq(q) => (join.project(q.free()), q.head.cols.clone()),
        Query::Ddr(d) => {
            let cols: Vec<usize> = d.universe().iter().collect();
            (join, cols)
        }
    };
    let text = tsv::render_columns(&rel, &cols, query.names(), &values);
    match &a.out {
        Some(p) => tsv::write_file(p, &text)?,
        None => write!(out, "{text}")?,
    }
    Ok(0)
}

fn verify_model(a: VerifyArgs, out: Out) -> Result<i32, Failure> {
    let query = load_query(&a.query)?;
    let ddr = query.as_ddr();
    let mut values = Interner::new();
    let db = tsv::load_database(&a.data, &ddr.body, &ddr.names, &mut values)?;
    let heads = tsv::load_heads(&a.model, &ddr.heads, &ddr.names, &mut values)?;
    match first_uncovered(&db, &ddr, &heads) {
        None => {
            writeln!(out, "ok")?;
            Ok(0)
        }
        Some(t) => {
            let u: Vec<String> = ddr
                .universe()
                .iter()
                .zip(&t)
                .map(|(v, x)| format!("{}={}", ddr.names.name(v), values.resolve(*x)))
                .collect();
            writeln!(out, "uncovered\t{}", u.join(" "))?;
            Ok(1)
        }
    }
}

fn generate(a: GenArgs, out: Out) -> Result<i32, Failure> {
    if a.list {
        for n in fixtures::names() {
            writeln!(out, "{n}")?;
        }
        writeln!(out, "four-cycle\nrandom")?;
        return Ok(0);
    }
    let shape = a.shape.as_deref().unwrap();
    let dir = a.out.as_ref().unwrap();
    let mut rng = gen::rng(a.seed);
    let inst = match shape {
        "random" => gen::random_instance(&mut rng, a.n.max(1)),
        name => {
            let ddr = match name {
                "four-cycle" => fixtures::four_cycle().as_ddr(),
                _ => fixtures::by_name(name).ok_or_else(|| Failure::Usage(format!("unknown shape {name}")))?,
            };
            match a.layout {
                Layout::Uniform => gen::uniform(&ddr, a.n, a.domain, &mut rng),
                Layout::Skewed => gen::skewed(&ddr, a.n, &mut rng),
            }
        }
    };
    fs::create_dir_all(dir)?;
    let names = &inst.ddr.names;
    tsv::write_file(&dir.join("query.dl"), &(parse::render_ddr(&inst.ddr) + "\n"))?;
    let dc = if shape == "random" { infer_cardinalities(&inst.db) } else { fixtures::body_cardinalities(&inst.ddr, a.n as u64) };
    tsv::write_file(&dir.join("constraints.txt"), &parse::render_constraints(&dc, names, &inst.ddr.body))?;
    tsv::write_database(&dir.join("data"), &inst.db, names, &inst.values)?;
    writeln!(out, "{}", dir.display())?;
    Ok(0)
}
