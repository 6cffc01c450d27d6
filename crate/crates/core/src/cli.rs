//! Command-line front end. Every run writes one JSON report.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::dispersion::{exact_dispersion, furthest_insertion, gadget_from_graph, planted_clique_graph, FiniteMetric};
use crate::engine::{DiverseRunReport, Guarantee};
use crate::error::{Error, Result};
use crate::field::{FieldConfig, DEFAULT_MODULUS};
use crate::io::{parse_graph, parse_metric, write_graph, write_metric};
use crate::matching::{diverse_matchings, maximum_matching};
use crate::matroid::{diverse_min_weight_bases, GraphicMatroid, Mode};
use crate::model::Graph;
use crate::oracle::{all_spanning_trees, best_k_subset, c_approximate_bases, c_maximum_matchings, c_short_paths};
use crate::paths::diverse_short_paths;
use crate::rational::{format_rational, int, parse_rational, ratio, Rational};
use crate::trees::diverse_spanning_trees;

pub const SEED_ENV: &str = "DIVOPT_SEED";

#[derive(Debug, Parser)]
#[command(name = "divopt", version, about = "Diverse near-optimal solutions for graph problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// RNG seed (default: $DIVOPT_SEED, else 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Furthest-insertion k-dispersion on a metric file.
    Dispersion {
        input: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Also compute the exact optimum by enumeration.
        #[arg(long)]
        oracle: bool,
        /// Skip the O(n³) triangle-inequality check.
        #[arg(long)]
        no_triangle_check: bool,
    },
    /// Diverse spanning trees of an undirected graph.
    DiverseSt {
        input: PathBuf,
        #[arg(short)]
        k: usize,
    },
    /// Diverse c-approximate shortest s-t paths of a directed graph.
    DiverseSp {
        input: PathBuf,
        #[arg(short)]
        s: usize,
        #[arg(short)]
        t: usize,
        #[arg(short)]
        k: usize,
        #[arg(short, default_value = "1")]
        c: String,
    },
    /// Diverse c-maximum matchings of an undirected graph.
    DiverseMatching {
        input: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(short, default_value = "1")]
        c: String,
        /// Trials per randomized decision (default ⌈λ·ln(k·|V|)⌉).
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long, default_value_t = 3.0)]
        lambda: f64,
        #[arg(long, default_value_t = DEFAULT_MODULUS)]
        modulus: u64,
    },
    /// Diverse c-approximate minimum spanning trees.
    DiverseMst {
        input: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(short, default_value = "1")]
        c: String,
        #[arg(long, default_value = "lagrangian-2")]
        mode: String,
        #[arg(long)]
        eps: Option<String>,
    },
    /// Run a solver and the brute-force oracle, and compare diversity.
    OracleCheck {
        #[arg(value_enum)]
        problem: Problem,
        input: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(short, default_value = "1")]
        c: String,
        #[arg(short, default_value_t = 0)]
        s: usize,
        #[arg(short)]
        t: Option<usize>,
        #[arg(long, default_value = "lagrangian-2")]
        mode: String,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        repeats: Option<usize>,
    },
    /// Random graph with a planted clique, written as its 2/1 gadget metric.
    GenGadget {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        clique: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Write the graph instead of the metric.
        #[arg(long)]
        graph: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Dispersion,
    St,
    Sp,
    Matching,
    Mst,
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn graph_from(path: &Path) -> Result<Graph> {
    parse_graph(&read(path)?)
}

fn factor(c: &str) -> Result<Rational> {
    let c = parse_rational(c)?;
    if c < int(1) {
        return Err(Error::InvalidArgument("approximation factor c must be at least 1".into()));
    }
    Ok(c)
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    Ok(())
}

fn guarantee_json(g: &Guarantee) -> Value {
    json!({
        "alpha": format_rational(&g.alpha),
        "beta": format_rational(&g.beta),
        "type": g.reduction.tag(),
    })
}

fn diverse_json(problem: &str, g: &Graph, k: usize, c: &Rational, seed: u64, r: &DiverseRunReport) -> Map<String, Value> {
    let trace: Vec<Value> = r
        .trace
        .iter()
        .map(|t| {
            json!({
                "solution": t.solution.ids(),
                "farness": t.farness,
                "similarity": t.similarity,
                "branches": t.branches,
            })
        })
        .collect();
    let mut out = Map::new();
    out.insert("problem".into(), json!(problem));
    out.insert("n".into(), json!(g.vertex_count()));
    out.insert("m".into(), json!(g.edge_count()));
    out.insert("k".into(), json!(k));
    out.insert("c".into(), json!(format_rational(c)));
    out.insert("guarantee".into(), guarantee_json(&r.guarantee));
    out.insert("diversity".into(), json!(r.diversity));
    out.insert("solutions".into(), json!(r.solutions.iter().map(|s| s.ids().to_vec()).collect::<Vec<_>>()));
    out.insert("pairwise".into(), json!(r.pairwise));
    out.insert("trace".into(), json!(trace));
    out.insert("seed".into(), json!(r.seed.unwrap_or(seed)));
    if let Some(cond) = &r.type5 {
        out.insert(
            "type5_condition".into(),
            json!({
                "diameter": cond.diameter,
                "eps": format_rational(&cond.eps),
                "threshold": format_rational(&cond.threshold()),
            }),
        );
    }
    if !r.warnings.is_empty() {
        out.insert("warnings".into(), json!(r.warnings));
    }
    out
}

fn matching_config(seed: u64, repeats: Option<usize>, lambda: f64, modulus: u64, k: usize, n: usize) -> Result<FieldConfig> {
    let repeats = repeats.unwrap_or_else(|| FieldConfig::amplified_repeats(lambda, k, n));
    FieldConfig::new(modulus, seed, repeats)
}

fn mode_from(mode: &str, eps: Option<&str>) -> Result<Mode> {
    Mode::parse(mode, eps.map(parse_rational).transpose()?)
}

/// `(diversity / optimum, diversity ≥ bound · optimum)`, both exact.
fn compare(diversity: &Rational, optimum: &Rational, bound: &Rational) -> (Value, bool) {
    let pass = *diversity >= bound * optimum;
    let ratio_value = if *optimum == int(0) { int(1) } else { diversity / optimum };
    (json!({"exact": format_rational(&ratio_value), "approx": ratio_value.to_f64()}), pass)
}

fn oracle_section(diversity: usize, optimum: usize, bound: Rational, feasible: usize) -> Value {
    let (r, pass) = compare(&int(diversity as i64), &int(optimum as i64), &bound);
    json!({
        "oracle_diversity": optimum,
        "feasible_solutions": feasible,
        "ratio": r,
        "bound": format_rational(&bound),
        "pass": pass,
    })
}

fn dispersion_report(metric: &FiniteMetric, k: usize, start: usize, oracle: bool) -> Result<Map<String, Value>> {
    check_k(k)?;
    let greedy = furthest_insertion(metric, k, start)?;
    let value = metric.subset_value(&greedy);
    let mut out = Map::new();
    out.insert("problem".into(), json!("dispersion"));
    out.insert("n".into(), json!(metric.len()));
    out.insert("k".into(), json!(k));
    out.insert("guarantee".into(), json!({"alpha": "2", "beta": "1", "type": Value::Null}));
    out.insert("solutions".into(), json!(greedy));
    out.insert("diversity".into(), json!(format_rational(&value)));
    out.insert("greedy_value".into(), json!(format_rational(&value)));
    if oracle {
        let (best, opt) = exact_dispersion(metric, k)?;
        let (r, pass) = compare(&value, &opt, &ratio(1, 2));
        out.insert("oracle_value".into(), json!(format_rational(&opt)));
        out.insert("oracle_solution".into(), json!(best));
        out.insert("ratio".into(), r);
        out.insert("pass".into(), json!(pass));
    }
    Ok(out)
}

fn execute(cli: &Cli, seed: u64) -> Result<Map<String, Value>> {
    match &cli.command {
        Command::Dispersion { input, k, start, oracle, no_triangle_check } => {
            let metric = parse_metric(&read(input)?, !no_triangle_check)?;
            dispersion_report(&metric, *k, *start, *oracle)
        }
        Command::DiverseSt { input, k } => {
            let g = graph_from(input)?;
            let r = diverse_spanning_trees(&g, *k)?;
            Ok(diverse_json("diverse-st", &g, *k, &int(1), seed, &r))
        }
        Command::DiverseSp { input, s, t, k, c } => {
            let g = graph_from(input)?;
            let c = factor(c)?;
            let r = diverse_short_paths(&g, *s, *t, *k, &c)?;
            let mut out = diverse_json("diverse-sp", &g, *k, &c, seed, &r);
            out.insert("source".into(), json!(s));
            out.insert("target".into(), json!(t));
            Ok(out)
        }
        Command::DiverseMatching { input, k, c, repeats, lambda, modulus } => {
            let g = graph_from(input)?;
            let c = factor(c)?;
            let cfg = matching_config(seed, *repeats, *lambda, *modulus, *k, g.vertex_count())?;
            let r = diverse_matchings(&g, *k, &c, &cfg)?;
            let mut out = diverse_json("diverse-matching", &g, *k, &c, seed, &r);
            out.insert("repeats".into(), json!(cfg.repeats));
            out.insert("modulus".into(), json!(cfg.modulus));
            out.insert("max_matching".into(), json!(maximum_matching(&g)?.len()));
            Ok(out)
        }
        Command::DiverseMst { input, k, c, mode, eps } => {
            let g = graph_from(input)?;
            let c = factor(c)?;
            let mode = mode_from(mode, eps.as_deref())?;
            let w = g.weights().to_vec();
            let matroid = GraphicMatroid::new(g.clone())?;
            let r = diverse_min_weight_bases(&matroid, &w, *k, &c, &mode)?;
            let mut out = diverse_json("diverse-mst", &g, *k, &c, seed, &r);
            out.insert("mode".into(), json!(mode.name()));
            Ok(out)
        }
        Command::OracleCheck { problem, input, k, c, s, t, mode, eps, repeats } => {
            let c = factor(c)?;
            let mut out = match problem {
                Problem::Dispersion => {
                    let metric = parse_metric(&read(input)?, true)?;
                    let mut out = dispersion_report(&metric, *k, 0, true)?;
                    out.insert("bound".into(), json!("1/2"));
                    return Ok(out);
                }
                Problem::St => {
                    let g = graph_from(input)?;
                    let r = diverse_spanning_trees(&g, *k)?;
                    let all = all_spanning_trees(&g)?;
                    let (_, opt) = best_k_subset(&all, *k)?;
                    let mut out = diverse_json("diverse-st", &g, *k, &int(1), seed, &r);
                    out.insert("oracle".into(), oracle_section(r.diversity, opt, ratio(1, 2), all.len()));
                    out
                }
                Problem::Sp => {
                    let g = graph_from(input)?;
                    let t = t.unwrap_or(g.vertex_count() - 1);
                    let r = diverse_short_paths(&g, *s, t, *k, &c)?;
                    let all = c_short_paths(&g, *s, t, &c)?;
                    let (_, opt) = best_k_subset(&all, *k)?;
                    let mut out = diverse_json("diverse-sp", &g, *k, &c, seed, &r);
                    out.insert("oracle".into(), oracle_section(r.diversity, opt, ratio(1, 2), all.len()));
                    out
                }
                Problem::Matching => {
                    let g = graph_from(input)?;
                    let cfg = matching_config(seed, *repeats, 3.0, DEFAULT_MODULUS, *k, g.vertex_count())?;
                    let r = diverse_matchings(&g, *k, &c, &cfg)?;
                    let (_, all) = c_maximum_matchings(&g, &c)?;
                    let (_, opt) = best_k_subset(&all, *k)?;
                    let mut out = diverse_json("diverse-matching", &g, *k, &c, seed, &r);
                    out.insert("oracle".into(), oracle_section(r.diversity, opt, ratio(1, 2), all.len()));
                    out
                }
                Problem::Mst => {
                    let g = graph_from(input)?;
                    let mode = mode_from(mode, eps.as_deref())?;
                    let w = g.weights().to_vec();
                    let matroid = GraphicMatroid::new(g.clone())?;
                    let r = diverse_min_weight_bases(&matroid, &w, *k, &c, &mode)?;
                    let (_, all) = c_approximate_bases(&matroid, &w, &c)?;
                    let (_, opt) = best_k_subset(&all, *k)?;
                    let mut out = diverse_json("diverse-mst", &g, *k, &c, seed, &r);
                    out.insert("mode".into(), json!(mode.name()));
                    out.insert("oracle".into(), oracle_section(r.diversity, opt, ratio(1, 4), all.len()));
                    out
                }
            };
            out.insert("oracle_check".into(), json!(true));
            Ok(out)
        }
        Command::GenGadget { n, clique, p, graph } => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidArgument("p must lie in [0, 1]".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (g, members) = planted_clique_graph(*n, *clique, *p, &mut rng)?;
            let text = if *graph { write_graph(&g) } else { write_metric(&gadget_from_graph(&g)?) };
            let mut out = Map::new();
            out.insert("problem".into(), json!("gen-gadget"));
            out.insert("n".into(), json!(n));
            out.insert("m".into(), json!(g.edge_count()));
            out.insert("clique".into(), json!(members));
            out.insert("expected_value".into(), json!(clique * clique.saturating_sub(1)));
            out.insert("seed".into(), json!(seed));
            out.insert("instance".into(), json!(text));
            Ok(out)
        }
    }
}

fn default_seed() -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(0)
}

fn emit(output: Option<&Path>, value: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n";
    match output {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses `args`, runs, writes the report, and returns the process exit code:
/// 0 on success, 2 when fewer than k feasible solutions exist, 1 on any other error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let seed = cli.seed.unwrap_or_else(default_seed);
    let started = Instant::now();
    let result = execute(&cli, seed);
    let elapsed = started.elapsed().as_millis() as u64;
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let (mut body, code) = match result {
        Ok(body) => (body, 0),
        Err(e) => {
            eprintln!("divopt: {e}");
            let code = if matches!(e, Error::FewerThanK { .. }) { 2 } else { 1 };
            let mut body = Map::new();
            body.insert("error".into(), json!({"kind": e.kind(), "message": e.to_string()}));
            body.insert("seed".into(), json!(seed));
            (body, code)
        }
    };
    body.insert("runtime_ms".into(), json!(elapsed));
    body.insert("timestamp".into(), json!(timestamp));
    if let Err(e) = emit(cli.output.as_deref(), &Value::Object(body)) {
        eprintln!("divopt: cannot write report: {e}");
        return 1;
    }
    code
}
