use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use orikit::bounds::{
    full_table, full_table_csv, max_degree_table, max_degree_table_csv, parse_rational,
    regime_table, regime_table_csv, ThresholdScan,
};
use orikit::exact::{min_comprehensive_order, ExactConfig};
use orikit::fixtures;
use orikit::greedy::{DisconnectedTarget, GreedyError, PipelineReport};
use orikit::registry::{Registry, StrategyContext};
use orikit::targets::{
    find_comprehensive, find_full, graph_digest, FullKPartite, SearchOptions, TargetCache,
    TargetError, TargetProvider,
};
use orikit::verify::{
    check_2dipath_coloring, check_comprehensive, check_full, check_homomorphism,
    check_oriented_coloring, check_proper, Certificate,
};
use orikit::{ColoringAssignment, OrientedGraph};

#[derive(Parser)]
#[command(name = "orikit", version, about = "Oriented colouring toolkit")]
struct Cli {
    /// Worker threads for certification.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Add wall-clock fields to JSON output.
    #[arg(long, global = true)]
    timing: bool,
    /// Do not read or write the target cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Chi,
    Chi2,
    Chio,
    MinComprehensive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Comprehensive,
    Full,
    Oriented,
    TwoDipath,
    Homomorphism,
    Proper,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchProperty {
    Comprehensive,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum Case3 {
    PlusTwo,
    Squared,
}

#[derive(clap::Args)]
struct PipelineArgs {
    /// Edge-list file.
    graph: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Random candidates tried per target search.
    #[arg(long, default_value_t = 100)]
    budget_trials: usize,
    #[arg(long, default_value = "1")]
    eps: String,
    /// Comprehensiveness of the target for disconnected regular graphs.
    #[arg(long, value_enum, default_value_t = Case3::PlusTwo)]
    case3: Case3,
    /// Vertex cap for exact 2-dipath colouring of the guide.
    #[arg(long, default_value_t = 16)]
    chi_cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Exact invariants of a small graph, or the minimum comprehensive order.
    Exact {
        #[arg(long, value_enum)]
        what: What,
        graph: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        /// Overrides the vertex cap of the selected solver.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Colour through a comprehensive tournament sized by maximum degree.
    ColorMaxdeg(PipelineArgs),
    /// Colour through a full k-partite target guided by a 2-dipath colouring.
    #[command(name = "color-2dipath")]
    Color2dipath(PipelineArgs),
    /// Colour with a registered strategy.
    Color {
        #[arg(long)]
        strategy: String,
        #[command(flatten)]
        args: PipelineArgs,
    },
    /// Search for a certified target.
    FindTarget {
        #[arg(long, value_enum)]
        property: SearchProperty,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        /// Tournament order, or part size for full targets.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Try the quadratic-residue tournament first.
        #[arg(long)]
        qr_first: bool,
        /// Write the target edge list here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a target or a colouring.
    Certify {
        #[arg(long, value_enum)]
        property: Property,
        graph: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        /// Colouring or homomorphism JSON.
        #[arg(long)]
        coloring: Option<PathBuf>,
        /// Codomain edge list for homomorphisms.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Coefficient and bound tables as CSV or JSON.
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        #[arg(long)]
        json: bool,
    },
    /// Write the reference graphs and colourings into a directory.
    Fixtures {
        #[arg(long)]
        out: PathBuf,
    },
}

/// Outcome of a command: exit code 0 for success, 2 for a certified
/// failure or an exhausted search.
struct Outcome(u8);

fn read_graph(path: &Path) -> Result<OrientedGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    OrientedGraph::parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn emit(mut value: Value, timing: bool, start: Instant) {
    if timing {
        value["runtime_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    println!(
        "{}",
        serde_json::to_string(&value).expect("JSON serializes")
    );
}

fn require<T>(x: Option<T>, flag: &str) -> Result<T> {
    x.ok_or_else(|| anyhow!("missing --{flag}"))
}

fn cache(cli: &Cli) -> Option<TargetCache> {
    (!cli.no_cache).then(TargetCache::from_env)
}

fn run_pipeline(cli: &Cli, strategy: &str, args: &PipelineArgs, start: Instant) -> Result<Outcome> {
    let registry = Registry::default();
    let s = registry.strategy(strategy).ok_or_else(|| {
        anyhow!(
            "unknown strategy {strategy:?}; available: {}",
            registry.strategy_names().join(", ")
        )
    })?;
    let g = read_graph(&args.graph)?;
    let mut options = SearchOptions::new(args.seed, args.budget_trials);
    options.jobs = cli.jobs;
    let provider = TargetProvider::new(options, cache(cli));
    let ctx = StrategyContext {
        provider: &provider,
        eps: parse_rational(&args.eps)?,
        exact: ExactConfig {
            chi_cap: args.chi_cap,
            ..ExactConfig::default()
        },
        disconnected: match args.case3 {
            Case3::PlusTwo => DisconnectedTarget::PlusTwo,
            Case3::Squared => DisconnectedTarget::Squared,
        },
    };
    match s.color(&g, &ctx) {
        Ok(report) => {
            emit(report_json(&report), cli.timing, start);
            Ok(Outcome(0))
        }
        Err(
            e @ (GreedyError::Stuck { .. }
            | GreedyError::TargetUnavailable(TargetError::NotFound { .. })),
        ) => {
            emit(
                json!({"schema": 1, "strategy": strategy, "status": "FAIL", "error": e.to_string()}),
                cli.timing,
                start,
            );
            Ok(Outcome(2))
        }
        Err(e) => Err(e.into()),
    }
}

fn report_json(r: &PipelineReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

fn certificate_outcome(cert: &Certificate, timing: bool, start: Instant) -> Outcome {
    emit(
        serde_json::to_value(cert).expect("certificate serializes"),
        timing,
        start,
    );
    Outcome(if cert.passed() { 0 } else { 2 })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let start = Instant::now();
    match &cli.command {
        Command::Exact {
            what,
            graph,
            k,
            t,
            n_max,
            cap,
        } => {
            let mut cfg = ExactConfig::default();
            let (parameter, value) = match what {
                What::MinComprehensive => {
                    let (k, t) = (require(*k, "k")?, require(*t, "t")?);
                    let v = min_comprehensive_order(k, t, *n_max, &cfg)?;
                    ("min_comprehensive_order", json!(v))
                }
                _ => {
                    let name = match what {
                        What::Chi => "chi",
                        What::Chi2 => "chi2",
                        _ => "chio",
                    };
                    match (cap, name) {
                        (Some(c), "chio") => cfg.chio_cap = *c,
                        (Some(c), _) => cfg.chi_cap = *c,
                        (None, _) => {}
                    }
                    let g = read_graph(
                        graph
                            .as_deref()
                            .ok_or_else(|| anyhow!("missing graph file"))?,
                    )?;
                    let registry = Registry::default();
                    let inv = registry.invariant(name).expect("registered invariant");
                    (name, json!(inv.compute(&g, &cfg)?))
                }
            };
            emit(
                json!({"schema": 1, "parameter": parameter, "value": value}),
                cli.timing,
                start,
            );
            Ok(Outcome(0))
        }
        Command::ColorMaxdeg(args) => run_pipeline(cli, "maxdeg", args, start),
        Command::Color2dipath(args) => run_pipeline(cli, "2dipath", args, start),
        Command::Color { strategy, args } => run_pipeline(cli, strategy, args, start),
        Command::FindTarget {
            property,
            k,
            t,
            n,
            trials,
            seed,
            qr_first,
            out,
        } => {
            let mut options = SearchOptions::new(*seed, *trials);
            options.jobs = cli.jobs;
            options.qr_first = *qr_first;
            let name = match property {
                SearchProperty::Comprehensive => "comprehensive",
                SearchProperty::Full => "full",
            };
            let found = match property {
                SearchProperty::Comprehensive => find_comprehensive(*k, *t, *n, &options)
                    .map(|r| (r.attempts, r.origin, r.certificate, r.found.into_graph())),
                SearchProperty::Full => find_full(*k, *t, *n, &options)
                    .map(|r| (r.attempts, r.origin, r.certificate, r.found.graph().clone())),
            };
            match found {
                Ok((attempts, origin, certificate, graph)) => {
                    if let Some(path) = out {
                        fs::write(path, graph.to_edge_list())
                            .with_context(|| format!("writing {}", path.display()))?;
                    }
                    emit(
                        json!({
                            "schema": 1, "property": name, "k": k, "t": t, "n": n, "seed": seed,
                            "attempts": attempts, "origin": origin,
                            "target_digest": graph_digest(&graph), "certificate": certificate,
                        }),
                        cli.timing,
                        start,
                    );
                    Ok(Outcome(0))
                }
                Err(TargetError::NotFound {
                    attempts,
                    last_witness,
                }) => {
                    emit(
                        json!({
                            "schema": 1, "property": name, "k": k, "t": t, "n": n, "seed": seed,
                            "status": "NotFound", "attempts": attempts, "last_witness": last_witness,
                        }),
                        cli.timing,
                        start,
                    );
                    Ok(Outcome(2))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Certify {
            property,
            graph,
            k,
            t,
            coloring,
            target,
        } => {
            let g = read_graph(graph)?;
            let load_coloring = || -> Result<ColoringAssignment> {
                let path = require(coloring.as_ref(), "coloring")?;
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                ColoringAssignment::from_json(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
            };
            let cert = match property {
                Property::Comprehensive => {
                    check_comprehensive(&g, require(*k, "k")?, require(*t, "t")?, cli.jobs)?
                }
                Property::Full => {
                    let kp = FullKPartite::new(require(*k, "k")?, g)?;
                    check_full(&kp, require(*t, "t")?, cli.jobs)?
                }
                Property::Oriented => check_oriented_coloring(&g, &load_coloring()?)?,
                Property::TwoDipath => check_2dipath_coloring(&g, &load_coloring()?)?,
                Property::Proper => check_proper(&g, &load_coloring()?)?,
                Property::Homomorphism => {
                    let h = read_graph(require(target.as_deref(), "target")?)?;
                    check_homomorphism(&g, &h, &load_coloring()?)?
                }
            };
            Ok(certificate_outcome(&cert, cli.timing, start))
        }
        Command::Tables { which, json } => {
            let text = match (which, json) {
                (1, false) => max_degree_table_csv(&max_degree_table(&ThresholdScan::default())?),
                (1, true) => {
                    serde_json::to_string(&max_degree_table(&ThresholdScan::default())?)? + "\n"
                }
                (2, false) => regime_table_csv(&regime_table()?),
                (2, true) => serde_json::to_string(&regime_table()?)? + "\n",
                (3, false) => full_table_csv(&full_table()?),
                (3, true) => serde_json::to_string(&full_table()?)? + "\n",
                _ => bail!("--which must be 1, 2 or 3"),
            };
            print!("{text}");
            Ok(Outcome(0))
        }
        Command::Fixtures { out } => {
            fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
            let mut manifest = Vec::new();
            for f in fixtures::all() {
                fs::write(out.join(format!("{}.arcs", f.name)), f.graph.to_edge_list())?;
                if let Some(c) = &f.coloring {
                    fs::write(
                        out.join(format!("{}.coloring.json", f.name)),
                        c.to_json() + "\n",
                    )?;
                }
                if let Some(h) = &f.target {
                    fs::write(
                        out.join(format!("{}.target.arcs", f.name)),
                        h.to_edge_list(),
                    )?;
                }
                manifest.push(json!({
                    "name": f.name,
                    "expectations": f.expectations.iter()
                        .map(|(c, pass)| json!({"check": c, "pass": pass}))
                        .collect::<Vec<_>>(),
                }));
            }
            let text = serde_json::to_string_pretty(&json!({"schema": 1, "fixtures": manifest}))?;
            fs::write(out.join("manifest.json"), text + "\n")?;
            Ok(Outcome(0))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(Outcome(code)) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
