//! `kladder`: parameters, obstructions, minors and decompositions of small
//! graphs, with every answer emitted as JSON together with its certificate.
//!
//! Exit codes: 0 success, 1 error or rejected certificate, 2 bad arguments,
//! 3 an input over a size limit.

mod dot;

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kladder::decomp::{
    dismantle_search, helly_cover, is_k_dismantable, validate, validate_gs, verify_dismantling, Move,
    TreeDecomposition, K_INF,
};
use kladder::generators::{cartesian_product, enumerate_labelled_trees, grid, nonisomorphic_trees, path, prufer_decode};
use kladder::io::{graph_to_dot, parse_graph};
use kladder::minors::{
    extract_ladder, find_minor_model, has_minor_tree_times_path, make_k_ladder, validate_model, KLadder, MinorModel,
};
use kladder::nicepair::{is_nice_pair, GoodPair};
use kladder::params::{k_pathdepth, k_treedepth, p_regex, SigmaRegex};
use kladder::refine::{
    good_gs_decomposition, trace_to_jsonl, unbreakable_decomposition, verify_good, verify_unbreakable, GoodParams,
};
use kladder::slide::{grid_in_ladder, path_sliding_in_tree, sliding_to_model, validate_sliding, SlidingSequence};
use kladder::{Error, Graph, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

const EXIT_FAILURE: u8 = 1;
const EXIT_SIZE_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "kladder", version, about = "k-treedepth, ladders and certificates for small graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON result to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add DOT renderings of the main object to the result.
    #[arg(long, global = true)]
    dot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Graph parameters with witness decompositions.
    #[command(subcommand)]
    Param(ParamCmd),
    /// Grids, ladders, tree-times-path graphs and trees.
    #[command(subcommand)]
    Generate(GenerateCmd),
    /// Minor models and ladder extraction.
    #[command(subcommand)]
    Minor(MinorCmd),
    /// Tree decomposition checks and searches.
    #[command(subcommand)]
    Decomp(DecompCmd),
    /// Unbreakable and good decompositions.
    #[command(subcommand)]
    Refine(RefineCmd),
    /// Token sliding sequences and the grid models compiled from them.
    #[command(subcommand)]
    Slide(SlideCmd),
    /// Re-check certificates emitted by the other subcommands.
    #[command(subcommand)]
    Validate(ValidateCmd),
}

#[derive(Args)]
struct GraphArg {
    /// Graph as JSON or an edge list; `-` reads standard input.
    #[arg(long)]
    graph: String,
}

#[derive(Args)]
struct InputArg {
    /// JSON input; `-` reads standard input.
    #[arg(long)]
    input: String,
}

#[derive(Subcommand)]
enum ParamCmd {
    /// k-treedepth.
    #[command(name = "td_k")]
    TdK {
        #[command(flatten)]
        g: GraphArg,
        /// Positive integer or `inf`.
        #[arg(long, value_parser = parse_k)]
        k: usize,
    },
    /// k-pathdepth.
    #[command(name = "pd_k")]
    PdK {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long, value_parser = parse_k)]
        k: usize,
    },
    /// Treedepth.
    Td {
        #[command(flatten)]
        g: GraphArg,
    },
    /// Treewidth.
    Tw {
        #[command(flatten)]
        g: GraphArg,
    },
    /// The parameter of a regular language over `a`, `s1`, `s2`, ..., `sinf`.
    #[command(name = "pL")]
    PL {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        regex: String,
    },
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// The k x l grid.
    Grid {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
    },
    /// A k-ladder of length l - 1 with random column trees.
    Ladder {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// T x P_l for a tree T, read with --tree or random on k vertices.
    TreeTimesPath {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        tree: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// All trees on k vertices, up to isomorphism unless --labelled.
    Trees {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        labelled: bool,
    },
}

#[derive(Subcommand)]
enum MinorCmd {
    /// Whether --pattern, or some T x P_l with T a tree on k vertices, is a minor.
    Test {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long, conflicts_with_all = ["k", "l"])]
        pattern: Option<String>,
        #[arg(long, requires = "l")]
        k: Option<usize>,
        #[arg(long, requires = "k")]
        l: Option<usize>,
    },
    /// A ladder minor from `{"rows": [[..]], "connectors": [[..]]}`.
    ExtractLadder {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        input: InputArg,
    },
    /// A k x l grid model in T x P_L for a tree T on 2k - 1 vertices.
    GridInLadder {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        tree: String,
    },
}

#[derive(Subcommand)]
enum DecompCmd {
    /// Check a tree decomposition, optionally its k-dismantability.
    Validate(DecompositionCheck),
    /// A dismantling of --input, or a search for a k-dismantable
    /// decomposition of --graph with bags of size at most t.
    Dismantle {
        #[arg(long)]
        input: Option<String>,
        #[arg(long, required_unless_present = "input")]
        graph: Option<String>,
        #[arg(long, value_parser = parse_k)]
        k: usize,
        #[arg(long)]
        t: Option<usize>,
    },
    /// d members with disjoint projections, or fewer than d bags hitting all.
    Helly {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        input: InputArg,
        /// JSON list of connected vertex sets.
        #[arg(long)]
        family: String,
        #[arg(long)]
        d: usize,
    },
}

#[derive(Args)]
struct DecompositionCheck {
    #[command(flatten)]
    g: GraphArg,
    #[command(flatten)]
    input: InputArg,
    /// Also require k-dismantability.
    #[arg(long, value_parser = parse_k)]
    k: Option<usize>,
    /// Check a (G, S) decomposition for this S.
    #[arg(long)]
    s: Option<String>,
}

#[derive(Subcommand)]
enum RefineCmd {
    /// A decomposition of adhesion below k with unbreakable bags.
    Unbreakable {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        k: usize,
        /// Write the driver trace here as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// A good (G, S') decomposition for some S' containing S.
    Good {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        t: usize,
        /// Comma separated vertices.
        #[arg(long, default_value = "")]
        s: String,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SlideCmd {
    /// Slide P_k through a tree on at least 2k - 1 vertices.
    Build {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        k: usize,
    },
    /// Turn a sliding sequence into a k x l grid model.
    Compile {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        l: usize,
    },
}

#[derive(Subcommand)]
enum ValidateCmd {
    /// A minor model: disjoint connected branch sets realising every pattern edge
    Model(InputArg),
    /// A token sliding sequence
    Sliding(InputArg),
    /// A k-ladder
    Ladder(InputArg),
    /// A decomposition against its graph, with its claimed value and dismantling
    Decomposition(DecompositionCheck),
    /// An unbreakable decomposition of --graph
    Unbreakable {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        input: InputArg,
        /// Defaults to the `k` recorded in the input.
        #[arg(long)]
        k: Option<usize>,
    },
    /// A good (G, S') decomposition of --graph; parameters default to those recorded in the input
    Good {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        s: Option<String>,
    },
    /// A nice pair, re-certified from its graph, U and members
    NicePair(InputArg),
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::SizeLimit { .. }) { EXIT_SIZE_LIMIT } else { EXIT_FAILURE };
        Failure { code, message: e.to_string() }
    }
}

fn fail(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_FAILURE, message: message.into() }
}

/// A JSON result, its DOT rendering, and whether it reports success.
struct Report {
    value: Value,
    dot: Option<String>,
    ok: bool,
}

impl Report {
    fn new(value: Value) -> Self {
        Report { value, dot: None, ok: true }
    }

    fn with_dot(mut self, dot: String) -> Self {
        self.dot = Some(dot);
        self
    }

    /// A validation verdict; `Err` holds the reason for rejection.
    fn verdict(check: Result<(), String>, extra: Value) -> Self {
        let mut value = match &check {
            Ok(()) => json!({"valid": true}),
            Err(reason) => json!({"valid": false, "reason": reason}),
        };
        if let (Value::Object(m), Value::Object(x)) = (&mut value, extra) {
            m.extend(x);
        }
        Report { value, dot: None, ok: check.is_ok() }
    }
}

fn parse_k(s: &str) -> Result<usize, String> {
    if s == "inf" {
        return Ok(K_INF);
    }
    match s.parse::<usize>() {
        Ok(0) => Err("k must be positive".into()),
        Ok(k) => Ok(k),
        Err(e) => Err(e.to_string()),
    }
}

fn k_json(k: usize) -> Value {
    if k == K_INF {
        json!("inf")
    } else {
        json!(k)
    }
}

fn read_text(source: &str) -> Result<String, Failure> {
    if source == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(|e| fail(format!("reading stdin: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(source).map_err(|e| fail(format!("reading {source}: {e}")))
    }
}

fn read_json(source: &str) -> Result<Value, Failure> {
    serde_json::from_str(&read_text(source)?).map_err(|e| Failure::from(Error::parse(format!("{source}: {e}"))))
}

/// The first of `keys` present in an object, else the value itself, so that
/// the output of one subcommand can be passed whole to another.
fn pick(v: &Value, keys: &[&str]) -> Value {
    keys.iter().find_map(|k| v.get(*k)).unwrap_or(v).clone()
}

fn decode<T: DeserializeOwned>(v: Value, what: &str) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::from(Error::parse(format!("{what}: {e}"))))
}

/// A graph file, or any JSON object carrying one under `graph`.
fn read_graph(source: &str) -> Result<Graph, Failure> {
    let text = read_text(source)?;
    if !text.trim_start().starts_with('{') {
        return Ok(parse_graph(&text)?);
    }
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::from(Error::parse(e.to_string())))?;
    let v = if v.get("edges").is_some() { v } else { pick(&v, &["graph"]) };
    decode(v, "graph")
}

fn parse_set(text: &str) -> Result<BTreeSet<Vertex>, Failure> {
    text.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::from(Error::parse(format!("bad vertex `{t}`")))))
        .collect()
}

fn random_tree(k: usize, rng: &mut ChaCha8Rng) -> Graph {
    if k <= 2 {
        return path(k);
    }
    let code: Vec<usize> = (0..k - 2).map(|_| rng.gen_range(0..k)).collect();
    prufer_decode(&code, k)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialise")
}

fn write_trace(path: &Option<PathBuf>, jsonl: String) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, jsonl).map_err(|e| fail(format!("writing {}: {e}", p.display()))),
        None => Ok(()),
    }
}

fn witness_report(param: &str, k: Option<usize>, value: Value, d: &TreeDecomposition, dismantle: usize) -> Report {
    let moves: Option<Vec<Move>> = is_k_dismantable(d, dismantle);
    let mut out = json!({"param": param, "value": value, "witness": d, "dismantling": moves});
    if let Some(k) = k {
        out["k"] = k_json(k);
    }
    Report::new(out).with_dot(dot::decomposition_to_dot(d))
}

fn run_param(cmd: ParamCmd) -> Result<Report, Failure> {
    Ok(match cmd {
        ParamCmd::TdK { g, k } => {
            let (v, d) = k_treedepth(&read_graph(&g.graph)?, k)?;
            witness_report("td_k", Some(k), json!(v), &d, k)
        }
        ParamCmd::PdK { g, k } => {
            let (v, d) = k_pathdepth(&read_graph(&g.graph)?, k)?;
            witness_report("pd_k", Some(k), json!(v), &d, k)
        }
        ParamCmd::Td { g } => {
            let (v, d) = k_treedepth(&read_graph(&g.graph)?, 1)?;
            witness_report("td", None, json!(v), &d, 1)
        }
        ParamCmd::Tw { g } => {
            let (v, d) = k_treedepth(&read_graph(&g.graph)?, K_INF)?;
            witness_report("tw", None, json!(v as isize - 1), &d, K_INF)
        }
        ParamCmd::PL { g, regex } => {
            let re: SigmaRegex = regex.parse()?;
            let graph = read_graph(&g.graph)?;
            let v = p_regex(&graph, &re)?;
            Report::new(json!({"param": "pL", "regex": re.to_string(), "value": v}))
        }
    })
}

fn run_generate(cmd: GenerateCmd) -> Result<Report, Failure> {
    Ok(match cmd {
        GenerateCmd::Grid { k, l } => {
            let g = grid(k, l);
            Report::new(to_value(&g)).with_dot(graph_to_dot(&g))
        }
        GenerateCmd::Ladder { k, l, seed } => {
            if k == 0 || l == 0 {
                return Err(fail("k and l must be positive"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let columns: Vec<Graph> = (0..l).map(|_| random_tree(k, &mut rng)).collect();
            let lad = make_k_ladder(k, l, &columns)?;
            Report::new(to_value(&lad)).with_dot(graph_to_dot(&lad.graph))
        }
        GenerateCmd::TreeTimesPath { k, l, tree, seed } => {
            let t = match (tree, k) {
                (Some(src), _) => read_graph(&src)?,
                (None, Some(k)) => random_tree(k, &mut ChaCha8Rng::seed_from_u64(seed)),
                (None, None) => return Err(fail("give --tree or --k")),
            };
            if !t.is_tree() {
                return Err(fail("the --tree graph is not a tree"));
            }
            let g = cartesian_product(&t, &path(l));
            Report::new(json!({"tree": t, "l": l, "graph": g})).with_dot(graph_to_dot(&g))
        }
        GenerateCmd::Trees { k, labelled } => {
            let trees = if labelled { enumerate_labelled_trees(k)? } else { nonisomorphic_trees(k) };
            Report::new(json!({"n": k, "labelled": labelled, "count": trees.len(), "trees": trees}))
        }
    })
}

fn run_minor(cmd: MinorCmd) -> Result<Report, Failure> {
    Ok(match cmd {
        MinorCmd::Test { g, pattern, k, l } => {
            let host = read_graph(&g.graph)?;
            let (tree, model) = match (pattern, k, l) {
                (Some(p), _, _) => (None, find_minor_model(&read_graph(&p)?, &host)?),
                (None, Some(k), Some(l)) => match has_minor_tree_times_path(&host, k, l)? {
                    Some((t, m)) => (Some(t), Some(m)),
                    None => (None, None),
                },
                _ => return Err(fail("give --pattern or both --k and --l")),
            };
            let mut out = json!({"minor": model.is_some(), "model": model});
            if let Some(t) = tree {
                out["tree"] = to_value(&t);
            }
            let report = Report::new(out);
            match &model {
                Some(m) => report.with_dot(dot::model_to_dot(m)),
                None => report,
            }
        }
        MinorCmd::ExtractLadder { g, input } => {
            let host = read_graph(&g.graph)?;
            let spec = read_json(&input.input)?;
            let rows: Vec<Vec<Vertex>> = decode(pick(&spec, &["rows"]), "rows")?;
            let connectors: Vec<BTreeSet<Vertex>> = decode(pick(&spec, &["connectors"]), "connectors")?;
            let ex = extract_ladder(&host, &rows, &connectors)?;
            let mut out = to_value(&ex);
            out["length"] = json!(ex.ladder.length());
            Report::new(out).with_dot(dot::model_to_dot(&ex.model))
        }
        MinorCmd::GridInLadder { k, l, tree } => {
            let t = read_graph(&tree)?;
            let m = grid_in_ladder(k, l, &t)?;
            Report::new(json!({"k": k, "l": l, "tree": t, "model": m})).with_dot(dot::model_to_dot(&m))
        }
    })
}

fn check_decomposition(c: DecompositionCheck) -> Result<Report, Failure> {
    let g = read_graph(&c.g.graph)?;
    let input = read_json(&c.input.input)?;
    let d: TreeDecomposition = decode(pick(&input, &["witness", "decomposition"]), "decomposition")?;
    let s = c.s.as_deref().map(parse_set).transpose()?;
    let mut check = match &s {
        Some(s) => validate_gs(&g, s, &d),
        None => validate(&g, &d),
    }
    .map_err(|v| v.to_string());
    // a parameter value claimed alongside the witness is the largest bag
    if let (Ok(()), Some(v)) = (&check, input.get("value").and_then(Value::as_i64)) {
        let claimed = if input.get("param") == Some(&json!("tw")) { v + 1 } else { v };
        if claimed != d.max_bag_size() as i64 {
            check = Err(format!("claimed value {v} does not match the largest bag {}", d.max_bag_size()));
        }
    }
    let k = c.k.or_else(|| input.get("k").and_then(|k| parse_k(&k.to_string().replace('"', "")).ok()));
    let mut extra = json!({"width": d.width(), "adhesion": d.adhesion(), "nodes": d.node_count(),
        "path": d.is_path_decomposition()});
    if let (Ok(()), Some(k)) = (&check, k) {
        match input.get("dismantling").filter(|m| !m.is_null()) {
            Some(m) => {
                let moves: Vec<Move> = decode(m.clone(), "dismantling")?;
                check = verify_dismantling(&d, k, &moves);
            }
            None if is_k_dismantable(&d, k).is_none() => check = Err(format!("not {k}-dismantable")),
            None => {}
        }
        extra["k"] = k_json(k);
    }
    Ok(Report::verdict(check, extra).with_dot(dot::decomposition_to_dot(&d)))
}

fn run_decomp(cmd: DecompCmd) -> Result<Report, Failure> {
    match cmd {
        DecompCmd::Validate(c) => check_decomposition(c),
        DecompCmd::Dismantle { input: Some(src), k, .. } => {
            let d: TreeDecomposition = decode(pick(&read_json(&src)?, &["witness", "decomposition"]), "decomposition")?;
            let moves = is_k_dismantable(&d, k);
            Ok(Report::new(json!({"k": k_json(k), "dismantable": moves.is_some(), "moves": moves})))
        }
        DecompCmd::Dismantle { input: None, graph, k, t } => {
            let g = read_graph(graph.as_deref().expect("clap requires --graph"))?;
            let t = t.unwrap_or(g.n());
            let found = dismantle_search(&g, k, t)?;
            let moves = found.as_ref().and_then(|d| is_k_dismantable(d, k));
            let report =
                Report::new(json!({"k": k_json(k), "t": t, "found": found.is_some(), "decomposition": found, "dismantling": moves}));
            Ok(match &found {
                Some(d) => report.with_dot(dot::decomposition_to_dot(d)),
                None => report,
            })
        }
        DecompCmd::Helly { g, input, family, d } => {
            let graph = read_graph(&g.graph)?;
            let dec: TreeDecomposition =
                decode(pick(&read_json(&input.input)?, &["witness", "decomposition"]), "decomposition")?;
            let fam: Vec<BTreeSet<Vertex>> = decode(pick(&read_json(&family)?, &["family"]), "family")?;
            let outcome = helly_cover(&graph, &dec, &fam, d)?;
            Ok(Report::new(json!({"d": d, "outcome": outcome})))
        }
    }
}

fn run_refine(cmd: RefineCmd) -> Result<Report, Failure> {
    Ok(match cmd {
        RefineCmd::Unbreakable { g, k, trace } => {
            let run = unbreakable_decomposition(&read_graph(&g.graph)?, k)?;
            write_trace(&trace, trace_to_jsonl(&run.trace))?;
            let mut out = to_value(&run);
            out["k"] = json!(k);
            Report::new(out).with_dot(dot::decomposition_to_dot(&run.decomposition))
        }
        RefineCmd::Good { g, k, a, t, s, trace } => {
            let s = parse_set(&s)?;
            let params = GoodParams { k, a, t };
            let run = good_gs_decomposition(&read_graph(&g.graph)?, &s, params, None)?;
            write_trace(&trace, trace_to_jsonl(&run.trace))?;
            let mut out = to_value(&run);
            out["params"] = to_value(&params);
            out["input_s"] = to_value(&s);
            Report::new(out).with_dot(dot::decomposition_to_dot(&run.decomposition))
        }
    })
}

fn run_slide(cmd: SlideCmd) -> Result<Report, Failure> {
    Ok(match cmd {
        SlideCmd::Build { tree, k } => Report::new(to_value(&path_sliding_in_tree(&read_graph(&tree)?, k)?)),
        SlideCmd::Compile { input, l } => {
            let seq: SlidingSequence = decode(pick(&read_json(&input.input)?, &["sequence"]), "sliding sequence")?;
            let m = sliding_to_model(&seq, l)?;
            Report::new(json!({"l": l, "model": m})).with_dot(dot::model_to_dot(&m))
        }
    })
}

fn run_validate(cmd: ValidateCmd) -> Result<Report, Failure> {
    Ok(match cmd {
        ValidateCmd::Model(i) => {
            let m: MinorModel = decode(pick(&read_json(&i.input)?, &["model"]), "model")?;
            Report::verdict(validate_model(&m), json!({}))
        }
        ValidateCmd::Sliding(i) => {
            let seq: SlidingSequence = decode(pick(&read_json(&i.input)?, &["sequence"]), "sliding sequence")?;
            Report::verdict(validate_sliding(&seq), json!({"steps": seq.injections.len()}))
        }
        ValidateCmd::Ladder(i) => {
            let v = read_json(&i.input)?;
            let v = if v.get("k").is_some() && v.get("graph").is_some() { v } else { pick(&v, &["ladder"]) };
            let lad: KLadder = decode(v, "ladder")?;
            Report::verdict(lad.validate(), json!({"length": lad.length()}))
        }
        ValidateCmd::Decomposition(c) => check_decomposition(c)?,
        ValidateCmd::Unbreakable { g, input, k } => {
            let graph = read_graph(&g.graph)?;
            let v = read_json(&input.input)?;
            let k = match k.or_else(|| v.get("k").and_then(Value::as_u64).map(|k| k as usize)) {
                Some(k) => k,
                None => return Err(fail("give --k")),
            };
            let d: TreeDecomposition = decode(pick(&v, &["decomposition"]), "decomposition")?;
            Report::verdict(verify_unbreakable(&graph, k, &d), json!({"k": k}))
        }
        ValidateCmd::Good { g, input, k, a, t, s } => {
            let graph = read_graph(&g.graph)?;
            let v = read_json(&input.input)?;
            let recorded: Option<GoodParams> = v.get("params").map(|p| decode(p.clone(), "params")).transpose()?;
            let param = |flag: Option<usize>, get: fn(&GoodParams) -> usize, name: &str| {
                flag.or(recorded.as_ref().map(get)).ok_or_else(|| fail(format!("give --{name}")))
            };
            let params = GoodParams { k: param(k, |p| p.k, "k")?, a: param(a, |p| p.a, "a")?, t: param(t, |p| p.t, "t")? };
            let s = match s {
                Some(text) => parse_set(&text)?,
                None => v.get("input_s").map(|x| decode(x.clone(), "input_s")).transpose()?.unwrap_or_default(),
            };
            let s_prime: BTreeSet<Vertex> = decode(pick(&v, &["s"]), "s")?;
            let d: TreeDecomposition = decode(pick(&v, &["decomposition"]), "decomposition")?;
            Report::verdict(verify_good(&graph, &s, params, &s_prime, &d), json!({"params": params}))
        }
        ValidateCmd::NicePair(i) => {
            let pair: GoodPair = decode(pick(&read_json(&i.input)?, &["pair"]), "good pair")?;
            let check = match is_nice_pair(&pair)? {
                None => Ok(()),
                Some(v) => Err(format!("{v:?}")),
            };
            Report::verdict(check, json!({}))
        }
    })
}

fn run(cli: Cli) -> Result<Report, Failure> {
    match cli.command {
        Command::Param(c) => run_param(c),
        Command::Generate(c) => run_generate(c),
        Command::Minor(c) => run_minor(c),
        Command::Decomp(c) => run_decomp(c),
        Command::Refine(c) => run_refine(c),
        Command::Slide(c) => run_slide(c),
        Command::Validate(c) => run_validate(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_path = cli.out.clone();
    let want_dot = cli.dot;
    let report = match run(cli) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("kladder: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let mut value = report.value;
    if let (true, Some(d), Value::Object(m)) = (want_dot, report.dot, &mut value) {
        m.insert("dot".into(), Value::String(d));
    }
    let text = serde_json::to_string(&value).expect("results serialise") + "\n";
    let written = match &out_path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("writing {}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("kladder: {e}");
        return ExitCode::from(EXIT_FAILURE);
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}
