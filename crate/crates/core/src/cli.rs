//! Command-line front end. Results go to stdout as JSON, diagnostics to stderr.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 invalid instance or
//! certificate, 3 no stable solution (or a blocked matching), 4 budget exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bipartite::{maxw_stable, BipartiteInstance, MaxWeightMethod};
use crate::classes::{is_laminar, laminar_to_path_ordering, verify_certificate, ClassCertificate, ClassHint};
use crate::error::Error;
use crate::hardness::{
    gen_laminar_from_cnf, gen_subpath_from_multicolored_clique, gen_subtree_star_from_shbm, gen_uda_from_com_smti,
    parse_dimacs, ColoredGraph, Smti,
};
use crate::hypergraph::{BMatching, HypergraphInstance};
use crate::io::{instance_to_json, load_instance, InstanceFile};
use crate::laminar::{solve_laminar_with, LaminarOptions};
use crate::random::{gen_random, rng_from, GenSizes};
use crate::stability::{enumerate_stable_capped, find_blocking_edges, maxw_stable_bruteforce_capped};
use crate::subpath::{solve_subpath_with, SideConstraints, SubpathOptions};
use crate::subtree::{solve_subtree_with, SubtreeOptions};
use crate::uda::{
    emit_ilp, enumerate_stable_assignments, find_blocking_triples, find_doubly_blocking, load_uda, random_uda,
    reduce_to_shbm, solve_uda_half_stable, solve_uda_maxw, solve_uda_unit_capacity, uda_to_json, Assignment,
    UdaInstance, UdaSizes, UdaXpOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "shbm", version, about = "Stable b-matchings in hypergraphs")]
struct Cli {
    /// Worker threads for parallel solvers.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Check solver invariants while running.
    #[arg(long, global = true)]
    debug_invariants: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a stable b-matching (or assignment).
    Solve(SolveArgs),
    /// Check a matching for stability and list its blocking edges.
    Verify(VerifyArgs),
    /// List stable b-matchings by exhaustive search.
    Enumerate(EnumerateArgs),
    /// Check class membership against the certificate in the file.
    CheckClass(CheckClassArgs),
    /// Write a random or reduction-generated instance.
    Gen(GenArgs),
    /// Write the integer program of a dual-admission instance in LP format.
    EmitIlp(EmitIlpArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Laminar,
    Subpath,
    Subtree,
    Bipartite,
    UdaXp,
    UdaHalf,
    UdaUnit,
    Brute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Rotations,
    Brute,
}

impl From<Method> for MaxWeightMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Auto => MaxWeightMethod::Auto,
            Method::Rotations => MaxWeightMethod::Rotations,
            Method::Brute => MaxWeightMethod::BruteForce,
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    /// Instance file (dual-admission JSON for the uda algorithms).
    #[arg(short, long)]
    input: PathBuf,
    /// Subpath: edges that must be in the matching.
    #[arg(long, value_delimiter = ',')]
    force: Vec<usize>,
    /// Subpath: edges that must stay out.
    #[arg(long, value_delimiter = ',')]
    forbid: Vec<usize>,
    /// Subpath: vertices that must be saturated.
    #[arg(long, value_delimiter = ',')]
    saturate: Vec<usize>,
    /// Subpath: vertices that must stay below capacity.
    #[arg(long, value_delimiter = ',')]
    unsaturate: Vec<usize>,
    /// Subpath: abort when a table grows beyond this size.
    #[arg(long, default_value_t = 4_000_000)]
    state_cap: usize,
    /// Subtree: root vertex.
    #[arg(long)]
    root: Option<usize>,
    /// Bipartite and uda-xp: weight-optimisation route.
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
    /// uda-xp: refuse to run when more strategies would be tried.
    #[arg(long)]
    strategy_cap: Option<u64>,
    /// Brute: maximum number of edges to enumerate over.
    #[arg(long, default_value_t = crate::stability::DEFAULT_EDGE_CAP)]
    edge_cap: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// `{"edges":[..]}`, or the output of `solve`.
    #[arg(short, long)]
    matching: PathBuf,
    /// Input is a dual-admission instance; the matching lists triple ids or an `assignment`.
    #[arg(long)]
    uda: bool,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Stop after this many results.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long, default_value_t = crate::stability::DEFAULT_EDGE_CAP)]
    edge_cap: usize,
    /// Input is a dual-admission instance; list stable assignments.
    #[arg(long)]
    uda: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    Laminar,
    Subpath,
    Subtree,
    Uda,
}

#[derive(Args, Debug)]
struct CheckClassArgs {
    #[arg(long, value_enum)]
    class: ClassArg,
    #[arg(short, long)]
    input: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenClass {
    Laminar,
    Subpath,
    Subtree,
    Bipartite,
    General,
    /// Dual-admission JSON.
    Uda,
    /// Dual-admission instance reduced to a hypergraph, with its partition.
    UdaHypergraph,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum, conflicts_with_all = ["from_cnf", "from_graph", "from_smti", "star_from"])]
    class: Option<GenClass>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Laminar instance from a DIMACS CNF file.
    #[arg(long)]
    from_cnf: Option<PathBuf>,
    /// Subpath instance from a coloured graph (`n_vertices`, `edges`, `colors`).
    #[arg(long, requires = "k")]
    from_graph: Option<PathBuf>,
    /// Number of colours for `--from-graph`.
    #[arg(long)]
    k: Option<usize>,
    /// Dual-admission instance from a stable-marriage-with-ties file.
    #[arg(long)]
    from_smti: Option<PathBuf>,
    /// Subtree star instance from any hypergraph instance.
    #[arg(long)]
    star_from: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    vertices: usize,
    #[arg(long, default_value_t = 10)]
    edges: usize,
    #[arg(long, default_value_t = 3)]
    max_edge_size: usize,
    #[arg(long, default_value_t = 1)]
    min_capacity: u32,
    #[arg(long, default_value_t = 2)]
    max_capacity: u32,
    #[arg(long, default_value_t = 0)]
    max_weight: i64,
}

#[derive(Args, Debug)]
struct EmitIlpArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// LP file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failed command: exit code plus message for stderr.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. }
            | Error::Io(_)
            | Error::InvalidFormula(_)
            | Error::InvalidGraph(_)
            | Error::InvalidSmti(_)
            | Error::InvalidParameters(_)
            | Error::InvariantViolation(_)
            | Error::InternalConsistency(_) => EXIT_USAGE,
            Error::BudgetExceeded { .. }
            | Error::SearchBudgetExceeded { .. }
            | Error::StateCapExceeded { .. }
            | Error::Overflow(_) => EXIT_BUDGET,
            _ => EXIT_INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `argv` (program name first) and runs the command.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let run = match &cli.command {
        Command::Solve(a) => solve(&cli, a, out, err),
        Command::Verify(a) => verify(a, out, err),
        Command::Enumerate(a) => enumerate(a, out, err),
        Command::CheckClass(a) => check_class(a, out, err),
        Command::Gen(a) => gen(a, out, err),
        Command::EmitIlp(a) => emit(a, out, err),
    };
    match run {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn print(out: &mut dyn Write, v: &Value) -> std::io::Result<()> {
    writeln!(out, "{v}")
}

fn matching_json(inst: &HypergraphInstance, m: &BMatching) -> std::result::Result<Value, Failure> {
    let stable = find_blocking_edges(inst, m)?.blocking.is_empty();
    Ok(json!({ "matching": m.edges(), "weight": m.weight(inst), "stable": stable }))
}

fn solve(cli: &Cli, a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match a.algo {
        Algo::UdaXp | Algo::UdaHalf | Algo::UdaUnit => return solve_uda(cli, a, out, err),
        _ => {}
    }
    let file = load_instance(&a.input)?;
    let inst = &file.instance;
    let m = match a.algo {
        Algo::Laminar => solve_laminar_with(inst, LaminarOptions { debug_invariants: cli.debug_invariants })?.matching,
        Algo::Subpath => {
            let order = path_ordering(&file)?;
            let opts = SubpathOptions {
                debug_invariants: cli.debug_invariants,
                state_cap: a.state_cap,
                constraints: SideConstraints {
                    force: a.force.clone(),
                    forbid: a.forbid.clone(),
                    saturate: a.saturate.clone(),
                    leave_unsaturated: a.unsaturate.clone(),
                },
            };
            let outcome = solve_subpath_with(inst, &order, &opts)?;
            writeln!(err, "subpath: {} steps, at most {} states", outcome.stats.steps, outcome.stats.max_states)?;
            match outcome.best {
                Some((m, _)) => m,
                None => return no_solution(out, err, "no stable b-matching satisfies the constraints"),
            }
        }
        Algo::Subtree => {
            let parent = file
                .certificate
                .tree_parent
                .clone()
                .ok_or_else(|| Error::Certificate("instance carries no tree_parent certificate".into()))?;
            let opts = SubtreeOptions { root: a.root, debug_invariants: cli.debug_invariants };
            solve_subtree_with(inst, &parent, opts)?
        }
        Algo::Bipartite => {
            let bip = BipartiteInstance::from_two_coloring(inst.clone())?;
            maxw_stable(&bip, a.method.into())?.0
        }
        Algo::Brute => match maxw_stable_bruteforce_capped(inst, a.edge_cap)? {
            Some((m, _)) => m,
            None => return no_solution(out, err, "the instance has no stable b-matching"),
        },
        Algo::UdaXp | Algo::UdaHalf | Algo::UdaUnit => unreachable!("handled above"),
    };
    let v = matching_json(inst, &m)?;
    print(out, &v)?;
    if v["stable"] != json!(true) {
        writeln!(err, "solver output failed re-verification")?;
        return Ok(EXIT_UNSTABLE);
    }
    Ok(EXIT_OK)
}

fn no_solution(out: &mut dyn Write, err: &mut dyn Write, why: &str) -> CmdResult {
    print(out, &json!({ "matching": Value::Null, "stable": false }))?;
    writeln!(err, "{why}")?;
    Ok(EXIT_UNSTABLE)
}

/// Path ordering from the certificate, or derived when the instance is laminar.
fn path_ordering(file: &InstanceFile) -> std::result::Result<Vec<usize>, Failure> {
    if let Some(order) = &file.certificate.path_ordering {
        return Ok(order.clone());
    }
    if is_laminar(&file.instance).is_ok() {
        return Ok(laminar_to_path_ordering(&file.instance)?);
    }
    Err(Error::Certificate("instance carries no path_ordering certificate and is not laminar".into()).into())
}

fn uda_json(inst: &UdaInstance, mu: &Assignment) -> std::result::Result<Value, Failure> {
    let reduced = reduce_to_shbm(inst);
    let m = reduced.to_matching(mu)?;
    let stable = find_blocking_triples(inst, mu)?.is_empty();
    Ok(json!({
        "matching": m.edges(),
        "weight": mu.weight(inst),
        "stable": stable,
        "assignment": mu.0,
    }))
}

fn solve_uda(cli: &Cli, a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let inst = load_uda(&a.input)?;
    let mu = match a.algo {
        Algo::UdaXp => {
            let opts = UdaXpOptions { threads: cli.threads, strategy_cap: a.strategy_cap, method: a.method.into() };
            let (mu, _, outcome) = solve_uda_maxw(&inst, opts)?;
            writeln!(err, "uda-xp: {} strategies, {} valid", outcome.strategies, outcome.valid)?;
            mu
        }
        Algo::UdaHalf => solve_uda_half_stable(&inst),
        Algo::UdaUnit => solve_uda_unit_capacity(&inst)?,
        _ => unreachable!("only dual-admission algorithms reach here"),
    };
    let mut v = uda_json(&inst, &mu)?;
    if a.algo == Algo::UdaHalf {
        v["half_stable"] = json!(find_doubly_blocking(&inst, &mu)?.is_empty());
        print(out, &v)?;
        return Ok(if v["half_stable"] == json!(true) { EXIT_OK } else { EXIT_UNSTABLE });
    }
    print(out, &v)?;
    if v["stable"] != json!(true) {
        writeln!(err, "solver output failed re-verification")?;
        return Ok(EXIT_UNSTABLE);
    }
    Ok(EXIT_OK)
}

fn read_json(path: &Path) -> std::result::Result<Value, Failure> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text).map_err(Error::from)?)
}

fn id_list(v: &Value, key: &str) -> Option<std::result::Result<Vec<usize>, Failure>> {
    let list = v.get(key)?;
    Some(serde_json::from_value(list.clone()).map_err(|e| Error::from(e).into()))
}

fn verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let doc = read_json(&a.matching)?;
    let stable = if a.uda {
        let inst = load_uda(&a.input)?;
        let reduced = reduce_to_shbm(&inst);
        let mu = match doc.get("assignment") {
            Some(list) => Assignment(serde_json::from_value(list.clone()).map_err(Error::from)?),
            None => {
                let edges = id_list(&doc, "matching")
                    .or_else(|| id_list(&doc, "edges"))
                    .ok_or_else(|| Error::Parse { line: 1, column: 1, message: "no assignment or edge list".into() })??;
                reduced.to_assignment(&BMatching::from_edges(&reduced.instance, &edges)?)
            }
        };
        mu.check_feasible(&inst)?;
        let blocking = find_blocking_triples(&inst, &mu)?;
        let triples: Vec<[usize; 3]> = blocking.iter().map(|t| [t.student, t.university, t.program]).collect();
        print(out, &json!({ "stable": blocking.is_empty(), "blocking_triples": triples, "weight": mu.weight(&inst) }))?;
        blocking.is_empty()
    } else {
        let file = load_instance(&a.input)?;
        let edges = id_list(&doc, "edges")
            .or_else(|| id_list(&doc, "matching"))
            .ok_or_else(|| Error::Parse { line: 1, column: 1, message: "no `edges` or `matching` list".into() })??;
        let m = BMatching::from_edges(&file.instance, &edges)?;
        let report = find_blocking_edges(&file.instance, &m)?;
        print(
            out,
            &json!({
                "stable": report.blocking.is_empty(),
                "blocking": report.blocking,
                "weight": m.weight(&file.instance),
            }),
        )?;
        report.blocking.is_empty()
    };
    if !stable {
        writeln!(err, "the matching is blocked")?;
        return Ok(EXIT_UNSTABLE);
    }
    Ok(EXIT_OK)
}

fn enumerate(a: &EnumerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let lists: Vec<Value> = if a.uda {
        let inst = load_uda(&a.input)?;
        let mut all = enumerate_stable_assignments(&inst, a.edge_cap)?;
        if let Some(l) = a.limit {
            all.truncate(l);
        }
        all.into_iter().map(|mu| json!(mu.0)).collect()
    } else {
        let file = load_instance(&a.input)?;
        enumerate_stable_capped(&file.instance, a.limit, a.edge_cap)?.iter().map(|m| json!(m.edges())).collect()
    };
    let count = lists.len();
    print(out, &json!({ "count": count, "stable": lists }))?;
    if count == 0 {
        writeln!(err, "no stable solution exists")?;
        return Ok(EXIT_UNSTABLE);
    }
    Ok(EXIT_OK)
}

fn check_class(a: &CheckClassArgs, out: &mut dyn Write, _err: &mut dyn Write) -> CmdResult {
    let (hint, name) = match a.class {
        ClassArg::Laminar => (ClassHint::Laminar, "laminar"),
        ClassArg::Subpath => (ClassHint::Subpath, "subpath"),
        ClassArg::Subtree => (ClassHint::Subtree, "subtree"),
        ClassArg::Uda => (ClassHint::Uda, "uda"),
    };
    let text = std::fs::read_to_string(&a.input)?;
    let file = match crate::io::parse_instance(&text) {
        Ok(f) => f,
        // a dual-admission file is checked through its reduction
        Err(e) if hint == ClassHint::Uda => match crate::uda::parse_uda(&text) {
            Ok(uda) => {
                let reduced = reduce_to_shbm(&uda);
                verify_certificate(&reduced.instance, &ClassCertificate::UdaPartition(reduced.partition))?;
                print(out, &json!({ "class": name, "member": true }))?;
                return Ok(EXIT_OK);
            }
            Err(_) => return Err(e.into()),
        },
        Err(e) => return Err(e.into()),
    };
    let inst = &file.instance;
    match hint {
        ClassHint::Laminar => {
            is_laminar(inst)?;
            if let Some(parent) = &file.certificate.laminar_parent {
                verify_certificate(inst, &ClassCertificate::LaminarForest(parent.clone()))?;
            }
        }
        ClassHint::Subpath => {
            verify_certificate(inst, &ClassCertificate::PathOrdering(path_ordering(&file)?))?;
        }
        _ => {
            let cert = file
                .certificate
                .for_class(hint)
                .ok_or_else(|| Error::Certificate(format!("instance carries no {name} certificate")))?;
            verify_certificate(inst, &cert)?;
        }
    }
    print(out, &json!({ "class": name, "member": true }))?;
    Ok(EXIT_OK)
}

fn write_output(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")),
        None => writeln!(out, "{text}"),
    }
}

fn gen(a: &GenArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let mut target = None;
    let text = if let Some(path) = &a.from_cnf {
        let g = gen_laminar_from_cnf(&parse_dimacs(&std::fs::read_to_string(path)?)?)?;
        target = Some(g.target);
        instance_to_json(&g.file)
    } else if let Some(path) = &a.from_graph {
        let graph: ColoredGraph = serde_json::from_value(read_json(path)?).map_err(Error::from)?;
        let g = gen_subpath_from_multicolored_clique(&graph, a.k.expect("clap requires k"))?;
        target = Some(g.target);
        instance_to_json(&g.file)
    } else if let Some(path) = &a.from_smti {
        let smti: Smti = serde_json::from_value(read_json(path)?).map_err(Error::from)?;
        uda_to_json(&gen_uda_from_com_smti(&smti)?)
    } else if let Some(path) = &a.star_from {
        instance_to_json(&gen_subtree_star_from_shbm(&load_instance(path)?.instance)?)
    } else {
        let class = a.class.ok_or_else(|| {
            Error::InvalidParameters("give --class or one of --from-cnf, --from-graph, --from-smti, --star-from".into())
        })?;
        let sizes = GenSizes {
            n_vertices: a.vertices,
            n_edges: a.edges,
            max_edge_size: a.max_edge_size,
            min_capacity: a.min_capacity,
            max_capacity: a.max_capacity,
            max_weight: a.max_weight,
        };
        let hint = match class {
            GenClass::Laminar => ClassHint::Laminar,
            GenClass::Subpath => ClassHint::Subpath,
            GenClass::Subtree => ClassHint::Subtree,
            GenClass::Bipartite => ClassHint::Bipartite,
            GenClass::General => ClassHint::General,
            GenClass::UdaHypergraph => ClassHint::Uda,
            GenClass::Uda => {
                let mut s = UdaSizes::from_gen_sizes(&sizes);
                s.max_weight = a.max_weight;
                let inst = random_uda(&mut rng_from(a.seed), &s);
                write_output(&a.out, &uda_to_json(&inst), out)?;
                return Ok(EXIT_OK);
            }
        };
        instance_to_json(&gen_random(hint, a.seed, &sizes)?)
    };
    write_output(&a.out, &text, out)?;
    if let Some(t) = target {
        writeln!(err, "target edge: {t}")?;
    }
    Ok(EXIT_OK)
}

fn emit(a: &EmitIlpArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let inst = load_uda(&a.input)?;
    let lp = emit_ilp(&inst);
    write_output(&a.out, lp.to_lp_string().trim_end(), out)?;
    writeln!(err, "{} variables, {} constraints", lp.variables.len(), lp.rows.len())?;
    Ok(EXIT_OK)
}
