//! `gsr`: construct, verify and use connectivity-constrained measurement
//! plans over graphs, and reproduce the bundled experiments.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use gsr_cli::config::{override_from_json, Fig6Config, Fig7Config, Fig8Config};
use gsr_cli::{init_threads, run_fig6, run_fig7, run_fig8};
use gsr_core::construct::{
    construct_complete, construct_g4, construct_g4_minus, construct_grid, construct_line_1,
    construct_line_k, construct_tree, sample_markov_rows, FParams,
};
use gsr_core::graph::{
    gen_ba, gen_complete, gen_er, gen_g4, gen_g4_minus, gen_grid, gen_line, gen_ring,
    gen_tree_random, Graph, NodeSet,
};
use gsr_core::partition::{construct_from_partition, Partition};
use gsr_core::plan::MeasurementPlan;
use gsr_core::recover::{
    decode_1sparse_binary, dense_from_csv, dense_to_csv, recover_groupwise,
    recover_with_hub_errors, SparseVector,
};
use gsr_core::reduce::{algorithm1, spanning_tree_baseline};
use gsr_core::verify::{check_feasibility, check_identifiability, OracleBudget, Verdict};
use gsr_core::{Error, Result};

#[derive(Parser)]
#[command(name = "gsr", version, about = "Sparse recovery with graph-constrained measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or inspect graphs.
    Graph {
        #[command(subcommand)]
        action: GraphAction,
    },
    /// Build a measurement plan.
    Construct(ConstructArgs),
    /// Check a plan's feasibility and identifiability.
    Verify(VerifyArgs),
    /// Apply a plan to a sparse vector: y = A x (+ optional noise).
    Apply(ApplyArgs),
    /// Recover a vector from measurements.
    Recover(RecoverArgs),
    /// Run one of the bundled experiments and write its result table.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum GraphAction {
    /// Generate a graph and write it to a file.
    Gen(GraphGenArgs),
    /// Print basic facts about a graph file.
    Info {
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Line,
    Ring,
    G4,
    G4minus,
    Grid,
    Tree,
    Er,
    Ba,
    Complete,
}

#[derive(Args)]
struct GraphGenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    side: usize,
    /// Chord midpoints to delete (g4minus), comma-separated.
    #[arg(long, default_value = "")]
    chords: String,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 10)]
    m0: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Line1,
    Linek,
    Complete,
    G4,
    G4minus,
    Grid,
    Tree,
    Partition,
    Algorithm1,
    SpanningTree,
    Markov,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Graph input: a family name (line, ring, g4, grid, complete) combined
    /// with --n/--side, or a path to a graph file.
    #[arg(long, default_value = "")]
    graph: String,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    side: usize,
    #[arg(long, default_value = "")]
    chords: String,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Budget factor for the random baseline blocks.
    #[arg(long, default_value_t = 2.0)]
    c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Row count for the markov method.
    #[arg(long, default_value_t = 0)]
    rows: usize,
    /// Partition file for the partition method.
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Tree root for the tree method.
    #[arg(long, default_value_t = 0)]
    root: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    plan: PathBuf,
    /// Graph to check feasibility against (family name or path).
    #[arg(long, default_value = "")]
    graph: String,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    side: usize,
    #[arg(long, default_value = "")]
    chords: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Subset budget for the identifiability oracle.
    #[arg(long, default_value_t = 50_000)]
    budget: u64,
}

#[derive(Args)]
struct ApplyArgs {
    #[arg(long)]
    plan: PathBuf,
    /// Sparse vector file (`index,value` lines).
    #[arg(long)]
    x: PathBuf,
    /// Optional per-row noise file (one value per line).
    #[arg(long)]
    noise: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long)]
    plan: PathBuf,
    /// Measurement file (one value per line).
    #[arg(long)]
    y: PathBuf,
    /// Jointly estimate one error per hub-sum measurement.
    #[arg(long)]
    hub_errors: bool,
    /// Decode via the closed-form 1-sparse binary rule instead of l1.
    #[arg(long)]
    binary_1sparse: bool,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureId {
    Fig6,
    Fig7,
    Fig8,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    figure: FigureId,
    /// JSON config file; values in it override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "csv")]
    format: String,
}

fn parse_chords(text: &str) -> Result<NodeSet> {
    if text.trim().is_empty() {
        return Ok(NodeSet::new());
    }
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad chord midpoint `{tok}`")))
        })
        .collect()
}

fn build_family(
    family: Family,
    n: usize,
    side: usize,
    chords: &NodeSet,
    p: f64,
    m0: usize,
    m: usize,
    seed: u64,
) -> Result<Graph> {
    match family {
        Family::Line => gen_line(n),
        Family::Ring => gen_ring(n),
        Family::G4 => gen_g4(n),
        Family::G4minus => gen_g4_minus(n, chords),
        Family::Grid => gen_grid(side),
        Family::Tree => gen_tree_random(n, seed),
        Family::Er => gen_er(n, p, seed),
        Family::Ba => gen_ba(n, m0, m, seed),
        Family::Complete => gen_complete(n),
    }
}

/// A `--graph` value is either a family keyword (resolved with the numeric
/// flags) or a path to a graph file.
fn resolve_graph(spec: &str, n: usize, side: usize, chords: &NodeSet, seed: u64) -> Result<Graph> {
    match spec {
        "" => Err(Error::InvalidParameter("missing --graph".into())),
        "line" => gen_line(n),
        "ring" => gen_ring(n),
        "g4" => gen_g4(n),
        "g4minus" => gen_g4_minus(n, chords),
        "grid" => gen_grid(side),
        "complete" => gen_complete(n),
        "tree" => gen_tree_random(n, seed),
        path => Graph::load(Path::new(path)),
    }
}

fn cmd_graph_gen(args: GraphGenArgs) -> Result<()> {
    let chords = parse_chords(&args.chords)?;
    let g = build_family(
        args.family, args.n, args.side, &chords, args.p, args.m0, args.m, args.seed,
    )?;
    g.save(&args.out)?;
    println!("wrote {} nodes, {} edges to {}", g.node_count(), g.edge_count(), args.out.display());
    Ok(())
}

fn cmd_graph_info(path: &Path) -> Result<()> {
    let g = Graph::load(path)?;
    println!("nodes: {}", g.node_count());
    println!("edges: {}", g.edge_count());
    let comps = g.components();
    println!("components: {}", comps.len());
    if comps.len() == 1 && g.node_count() > 0 {
        let (r, c) = g.radius_and_center()?;
        println!("radius: {r} (center {c})");
    }
    Ok(())
}

fn cmd_construct(args: ConstructArgs) -> Result<()> {
    let chords = parse_chords(&args.chords)?;
    let f = FParams { c: args.c, seed: args.seed, ..Default::default() };
    let plan = match args.method {
        MethodArg::Line1 => construct_line_1(args.n)?,
        MethodArg::Linek => construct_line_k(args.n, args.k)?,
        MethodArg::Complete => construct_complete(args.n, args.k, &f)?,
        MethodArg::G4 => construct_g4(args.n, args.k, &f)?,
        MethodArg::G4minus => construct_g4_minus(args.n, &chords, args.k, &f)?,
        MethodArg::Grid => construct_grid(args.side, args.k, &f)?,
        MethodArg::Markov => {
            if args.rows == 0 {
                return Err(Error::InvalidParameter("markov needs --rows".into()));
            }
            sample_markov_rows(args.n, args.rows, args.seed)?
        }
        MethodArg::Tree => {
            let g = resolve_graph(&args.graph, args.n, args.side, &chords, args.seed)?;
            construct_tree(&g, args.root, args.k, &f)?
        }
        MethodArg::Partition => {
            let g = resolve_graph(&args.graph, args.n, args.side, &chords, args.seed)?;
            let path = args
                .partition
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("partition method needs --partition".into()))?;
            construct_from_partition(&g, &Partition::load(path)?, args.k, &f)?
        }
        MethodArg::Algorithm1 => {
            let g = resolve_graph(&args.graph, args.n, args.side, &chords, args.seed)?;
            // Disconnected inputs: treat each component separately.
            if g.is_connected() {
                algorithm1(&g, args.k, &f)?.0
            } else {
                let mut plan = MeasurementPlan::new(g.node_count(), args.k, gsr_core::plan::Method::Algorithm1);
                for (i, comp) in g.components().into_iter().enumerate() {
                    let sub = induced_subplan(&g, &comp, args.k, &FParams {
                        seed: gsr_core::seed::derive(args.seed, i as u64),
                        ..f
                    })?;
                    plan.concat(sub);
                }
                plan.method = gsr_core::plan::Method::Algorithm1;
                plan
            }
        }
        MethodArg::SpanningTree => {
            let g = resolve_graph(&args.graph, args.n, args.side, &chords, args.seed)?;
            spanning_tree_baseline(&g, args.k, &f)?
        }
    };
    plan.save(&args.out)?;
    println!("{} rows ({} groups) -> {}", plan.row_count(), plan.groups.len(), args.out.display());
    Ok(())
}

/// Run the general construction on one component and lift the node ids back.
fn induced_subplan(g: &Graph, comp: &NodeSet, k: usize, f: &FParams) -> Result<MeasurementPlan> {
    let ids: Vec<usize> = comp.to_vec();
    let index_of: std::collections::BTreeMap<usize, usize> =
        ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let edges = g
        .edges()
        .filter(|(u, v)| comp.contains(*u) && comp.contains(*v))
        .map(|(u, v)| (index_of[&u], index_of[&v]));
    let sub = Graph::from_edges(ids.len(), edges)?;
    let (plan, _) = algorithm1(&sub, k, f)?;
    let mut lifted = MeasurementPlan::new(g.node_count(), k, plan.method);
    lifted.oracle_checked = plan.oracle_checked;
    for (row, meta) in plan.rows.iter().zip(&plan.row_meta) {
        let mut m = meta.clone();
        m.hub_nodes = m.hub_nodes.iter().map(|v| ids[v]).collect();
        lifted.push_row(row.iter().map(|v| ids[v]).collect(), m);
    }
    for group in &plan.groups {
        lifted.groups.push(gsr_core::plan::Group {
            member_nodes: group.member_nodes.iter().map(|v| ids[v]).collect(),
            hub_sum_row: group.hub_sum_row,
            recovery_order: group.recovery_order,
        });
    }
    Ok(lifted)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let plan = MeasurementPlan::load(&args.plan)?;
    let mut failed = false;
    if !args.graph.is_empty() {
        let chords = parse_chords(&args.chords)?;
        let g = resolve_graph(&args.graph, args.n, args.side, &chords, args.seed)?;
        let rep = check_feasibility(&g, &plan)?;
        if rep.ok {
            println!("feasibility: ok ({} rows)", rep.rows_checked);
        } else {
            println!("feasibility: FAIL at row {}", rep.first_offending_row.unwrap());
            failed = true;
        }
    }
    let report = check_identifiability(&plan, args.k, &OracleBudget { max_subsets: args.budget });
    println!("identifiability (k={}): {report}", args.k);
    if report.verdict == Verdict::NotIdentifiable {
        failed = true;
    }
    Ok(if failed { 5 } else { 0 })
}

fn cmd_apply(args: ApplyArgs) -> Result<()> {
    let plan = MeasurementPlan::load(&args.plan)?;
    let x = SparseVector::from_csv(&std::fs::read_to_string(&args.x)?, plan.n)?;
    let y = match &args.noise {
        Some(path) => {
            let w = dense_from_csv(&std::fs::read_to_string(path)?)?;
            plan.apply_noisy(&x.to_dense(), &w)?
        }
        None => plan.apply(&x.to_dense())?,
    };
    std::fs::write(&args.out, dense_to_csv(&y))?;
    println!("wrote {} measurements to {}", y.len(), args.out.display());
    Ok(())
}

fn cmd_recover(args: RecoverArgs) -> Result<()> {
    let plan = MeasurementPlan::load(&args.plan)?;
    let y = dense_from_csv(&std::fs::read_to_string(&args.y)?)?;
    if args.binary_1sparse {
        let x = decode_1sparse_binary(&plan, &y)?;
        std::fs::write(&args.out, x.to_csv())?;
        println!("decoded 1-sparse vector -> {}", args.out.display());
        return Ok(());
    }
    let result = if args.hub_errors {
        recover_with_hub_errors(&plan, &y, args.tol)?
    } else {
        recover_groupwise(&plan, &y, args.tol)?
    };
    std::fs::write(&args.out, result.to_json()?)?;
    println!(
        "recovered {} nonzeros, residual {:.3e} -> {}",
        result.x_recovered.l0(),
        result.residual_l2,
        args.out.display()
    );
    Ok(())
}

fn load_config_text(path: &Option<PathBuf>) -> Result<Option<String>> {
    match path {
        Some(p) => Ok(Some(std::fs::read_to_string(p)?)),
        None => Ok(None),
    }
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    init_threads();
    let config_text = load_config_text(&args.config)?;
    let table = match args.figure {
        FigureId::Fig6 => {
            let mut cfg = Fig6Config::default();
            if let Some(t) = args.trials {
                cfg.trials = t;
            }
            if let Some(s) = args.seed {
                cfg.seed = s;
            }
            if let Some(n) = args.n {
                cfg.n = n;
            }
            if let Some(text) = &config_text {
                cfg = override_from_json(&cfg, text)?;
            }
            run_fig6(&cfg)?
        }
        FigureId::Fig7 => {
            let mut cfg = Fig7Config::default();
            if let Some(t) = args.trials {
                cfg.trials = t;
            }
            if let Some(s) = args.seed {
                cfg.seed = s;
            }
            if let Some(text) = &config_text {
                cfg = override_from_json(&cfg, text)?;
            }
            run_fig7(&cfg)?
        }
        FigureId::Fig8 => {
            let mut cfg = Fig8Config::default();
            if let Some(t) = args.trials {
                cfg.trials = t;
            }
            if let Some(s) = args.seed {
                cfg.seed = s;
            }
            if let Some(n) = args.n {
                cfg.n = n;
            }
            if let Some(text) = &config_text {
                cfg = override_from_json(&cfg, text)?;
            }
            let (table, setup) = run_fig8(&cfg)?;
            eprintln!("group sizes: {:?}, {} rows", setup.group_sizes, setup.plan.row_count());
            table
        }
    };
    table.save(&args.out, &args.format)?;
    println!("wrote {} rows to {}", table.rows.len(), args.out.display());
    Ok(())
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Parse(_) | Error::Json(_) => 3,
        Error::InfeasibleRow { .. } => 5,
        Error::SolverDiverged { .. } | Error::OrderingViolation(_) | Error::Inconsistent(_) => 6,
        _ => 4,
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome: Result<i32> = match cli.command {
        Command::Graph { action } => match action {
            GraphAction::Gen(args) => cmd_graph_gen(args).map(|()| 0),
            GraphAction::Info { graph } => cmd_graph_info(&graph).map(|()| 0),
        },
        Command::Construct(args) => cmd_construct(args).map(|()| 0),
        Command::Verify(args) => cmd_verify(args),
        Command::Apply(args) => cmd_apply(args).map(|()| 0),
        Command::Recover(args) => cmd_recover(args).map(|()| 0),
        Command::Experiment(args) => cmd_experiment(args).map(|()| 0),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code(&err));
        }
    }
}
