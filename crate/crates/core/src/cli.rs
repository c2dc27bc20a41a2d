//! The `oddwalk` command line: argument parsing, subcommand dispatch and JSON
//! reports. [`run_cli`] does no printing so it can be driven from tests.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::closure::{c4_partition, parse_hom_map, phi_partition, verify_hom, EdgeMultiset, GraphHom};
use crate::complex::presentation::DEFAULT_TIETZE_BUDGET;
use crate::complex::{build_ncomplex, check_simply_connected, edge_path_presentation, h1_homology, tietze_simplify};
use crate::fixtures::named_graph;
use crate::graph::{parse_graph, Graph};
use crate::homotopy::{are_homotopic, default_length_cap, HomotopyVerdict, DEFAULT_STATE_CAP};
use crate::homsearch::{fold_search, hom_exists, FoldOptions, HomSearchStatus, DEFAULT_NODE_BUDGET};
use crate::invariants::{find_pivot_edge, InvariantContext};
use crate::pipeline::bounded_coloring_pipeline;
use crate::sphere::{cap_measure, min_degree_ratio, sample_approximation};
use crate::traversal::{odd_girth, shortest_odd_cycle, DEFAULT_CYCLE_BUDGET};
use crate::walk::{format_move_log, parse_vertex_list, replay_moves, Walk};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "oddwalk", version, about = "Walk homotopy, Borsuk graph samples and odd-cycle homomorphism experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search budget; its unit depends on the subcommand.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Primary artifact path (graph, coloring, dump or report).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of a summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Args, Debug, Clone)]
struct EpsilonArgs {
    /// `pi/5`, `pi/(2r+1)` or a decimal; defaults to pi/(2r+1).
    #[arg(long = "eps")]
    eps: Option<String>,
    #[arg(long)]
    r: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a Borsuk graph approximation.
    GenBorsuk {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        eps: EpsilonArgs,
        /// Base points; the graph has twice as many vertices.
        #[arg(long = "N")]
        count: usize,
    },
    /// Length of the shortest odd cycle
    OddGirth {
        #[arg(long)]
        graph: String,
    },
    /// C4-closure classes, or pullback classes when a homomorphism is given.
    Closure {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        hom: Option<PathBuf>,
    },
    /// Class invariants of a walk's edge multiset.
    Invariants {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        hom: Option<PathBuf>,
        #[arg(long)]
        walk: String,
        /// Also search for a pivot edge (closed odd walks only).
        #[arg(long)]
        pivot: bool,
    },
    /// Decide whether two walks are homotopic, within caps
    Homotopy {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        length_cap: Option<usize>,
    },
    /// Simplify the edge-path group presentation of the neighborhood complex
    SimplyConnected {
        #[arg(long)]
        graph: String,
    },
    /// Color a graph through a homomorphism into an odd-cycle-free target
    ColorPipeline {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
        #[arg(long)]
        hom: PathBuf,
        #[arg(long)]
        cycle: String,
        #[arg(long)]
        r: usize,
        /// Assert the source is simply connected.
        #[arg(long)]
        assert_sc: bool,
    },
    /// Maximal faces of the neighborhood complex
    Ncomplex {
        #[arg(long)]
        graph: String,
    },
    /// First homology of the neighborhood complex
    H1 {
        #[arg(long)]
        graph: String,
    },
    /// Search for a homomorphism between two graphs
    HomExists {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Shrink a graph by merges that keep it free of the forbidden cycles
    Fold {
        #[arg(long)]
        graph: String,
        /// Comma-separated forbidden cycle lengths.
        #[arg(long)]
        forbid: String,
        #[arg(long, default_value_t = 4)]
        beam: usize,
        /// Accept an input that already has a forbidden cycle.
        #[arg(long)]
        allow_cyclic_input: bool,
    },
    /// Min-degree ratios against the cap measure, with fold floors.
    ExperimentDhom {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// Comma-separated base point counts.
        #[arg(long = "N")]
        counts: String,
        /// Comma-separated seeds; defaults to the global seed.
        #[arg(long)]
        seeds: Option<String>,
        /// Run fold_search only on graphs with at most this many vertices.
        #[arg(long, default_value_t = 500)]
        fold_max_vertices: usize,
        #[arg(long, default_value_t = 2)]
        beam: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GenBorsuk { .. } => "gen-borsuk",
            Command::OddGirth { .. } => "odd-girth",
            Command::Closure { .. } => "closure",
            Command::Invariants { .. } => "invariants",
            Command::Homotopy { .. } => "homotopy",
            Command::SimplyConnected { .. } => "simply-connected",
            Command::ColorPipeline { .. } => "color-pipeline",
            Command::Ncomplex { .. } => "ncomplex",
            Command::H1 { .. } => "h1",
            Command::HomExists { .. } => "hom-exists",
            Command::Fold { .. } => "fold",
            Command::ExperimentDhom { .. } => "experiment-dhom",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub wall_ms: f64,
}

/// Machine-readable outcome of one invocation. Everything except `timing` is
/// deterministic given the arguments.
#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub ok: bool,
    pub result: Value,
    pub verification: Value,
    pub error: Option<Value>,
    pub timing: Timing,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The report as JSON with the timing block removed.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        v.as_object_mut().expect("object").remove("timing");
        serde_json::to_string_pretty(&v).expect("reports serialize")
    }
}

#[derive(Debug)]
pub struct CliOutcome {
    pub code: i32,
    pub report: Option<ReportDocument>,
    /// Text for stdout: the summary, the JSON report, or clap's help.
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    /// Bad arguments or unreadable input: exit 2.
    Usage(String),
    /// A hypothesis or verification failed: exit 1.
    Check { message: String, detail: Value },
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

struct Success {
    config: Value,
    result: Value,
    verification: Value,
    summary: String,
    /// Written to `--out` instead of the report when present.
    artifact: Option<String>,
}

/// Runs one command line (`argv[0]` is the program name).
pub fn run_cli<I, T>(argv: I) -> CliOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return CliOutcome {
                code,
                report: None,
                stdout: if code == 0 { text.clone() } else { String::new() },
                stderr: if code == 0 { String::new() } else { text },
            };
        }
    };
    let started = Instant::now();
    let outcome = dispatch(&cli);
    let timing = Timing {
        wall_ms: started.elapsed().as_secs_f64() * 1000.0,
    };
    let mut report = ReportDocument {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name().to_string(),
        seed: cli.seed,
        config: Value::Null,
        ok: false,
        result: Value::Null,
        verification: Value::Null,
        error: None,
        timing,
    };
    let (code, summary, artifact) = match outcome {
        Ok(s) => {
            report.ok = true;
            report.config = s.config;
            report.result = s.result;
            report.verification = s.verification;
            (0, s.summary, s.artifact)
        }
        Err(Failure::Usage(message)) => {
            report.error = Some(json!({ "kind": "usage", "message": message }));
            (2, format!("error: {message}"), None)
        }
        Err(Failure::Check { message, detail }) => {
            report.error = Some(json!({ "kind": "check_failed", "message": message, "detail": detail }));
            (1, format!("failed: {message}"), None)
        }
    };
    let mut stderr = String::new();
    if let Some(path) = &cli.out {
        let text = artifact.unwrap_or_else(|| report.to_json() + "\n");
        if let Err(e) = std::fs::write(path, text) {
            stderr = format!("cannot write {}: {e}\n", path.display());
        }
    }
    let stdout = if cli.json { report.to_json() + "\n" } else { summary + "\n" };
    let code = if code == 0 && !stderr.is_empty() { 2 } else { code };
    CliOutcome {
        code,
        report: Some(report),
        stdout,
        stderr,
    }
}

/// Accepts `pi`, `pi/5`, `pi/(2r+1)` (needs `r`) or a plain decimal.
pub fn parse_epsilon(text: &str, r: Option<usize>) -> Result<f64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    if t == "pi" {
        return Ok(PI);
    }
    if let Some(den) = t.strip_prefix("pi/") {
        let den = den.trim_start_matches('(').trim_end_matches(')');
        let value = if den == "2r+1" {
            let r = r.ok_or("`pi/(2r+1)` needs --r")?;
            (2 * r + 1) as f64
        } else {
            den.parse::<f64>().map_err(|_| format!("bad denominator in {text:?}"))?
        };
        if value <= 0.0 {
            return Err(format!("denominator must be positive in {text:?}"));
        }
        return Ok(PI / value);
    }
    t.parse::<f64>().map_err(|_| format!("cannot read epsilon {text:?}"))
}

fn resolve_epsilon(args: &EpsilonArgs) -> Result<f64, Failure> {
    let eps = match (&args.eps, args.r) {
        (Some(text), r) => parse_epsilon(text, r).map_err(Failure::Usage)?,
        (None, Some(r)) => PI / (2 * r + 1) as f64,
        (None, None) => return Err(Failure::Usage("give --eps or --r".into())),
    };
    if !(eps > 0.0 && eps < PI) {
        return Err(Failure::Usage(format!("epsilon {eps} outside (0, pi)")));
    }
    Ok(eps)
}

/// A graph file in edge-list format, or a built-in name such as `petersen`.
fn load_graph(spec: &str) -> Result<Graph, Failure> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{spec}: {e}")))?;
        return parse_graph(&text).map_err(|e| usage(format!("{spec}: {e}")));
    }
    named_graph(spec).ok_or_else(|| usage(format!("{spec}: no such file or built-in graph")))
}

fn load_hom(source: &Graph, target: &Graph, path: &Path) -> Result<GraphHom, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let map = parse_hom_map(&text, source.n()).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    GraphHom::new(source.clone(), target.clone(), map).map_err(|e| Failure::Check {
        message: format!("not a homomorphism: {e}"),
        detail: Value::Null,
    })
}

fn load_walk(g: &Graph, text: &str) -> Result<Walk, Failure> {
    let vertices = parse_vertex_list(text).map_err(usage)?;
    Walk::new(g, vertices).map_err(usage)
}

fn parse_list(text: &str) -> Result<Vec<u64>, Failure> {
    text.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| usage(format!("bad list entry {s:?} in {text:?}"))))
        .collect()
}

fn dispatch(cli: &Cli) -> Result<Success, Failure> {
    match &cli.command {
        Command::GenBorsuk { n, eps, count } => gen_borsuk(cli, *n, eps, *count),
        Command::OddGirth { graph } => {
            let g = load_graph(graph)?;
            let og = odd_girth(&g);
            let cycle = shortest_odd_cycle(&g);
            let verified = match (&og, &cycle) {
                (Some(len), Some(c)) => {
                    let mut closed = c.clone();
                    closed.push(c[0]);
                    let w = Walk::from_vec_unchecked(closed);
                    c.len() == *len && w.is_cycle() && w.is_valid_in(&g)
                }
                (None, None) => crate::traversal::is_bipartite(&g).is_bipartite(),
                _ => false,
            };
            check(verified, "odd cycle witness does not check out")?;
            Ok(Success {
                config: json!({ "graph": graph }),
                result: json!({ "odd_girth": og.map_or(json!("INFINITE"), |x| json!(x)), "cycle": cycle }),
                verification: json!({ "witness_cycle": verified }),
                summary: format!("odd_girth: {}", og.map_or("INFINITE".to_string(), |x| x.to_string())),
                artifact: None,
            })
        }
        Command::Closure { graph, target, hom } => {
            let g = load_graph(graph)?;
            let partition = match (target, hom) {
                (Some(t), Some(path)) => {
                    let h = load_graph(t)?;
                    let phi = load_hom(&g, &h, path)?;
                    phi_partition(&phi, &c4_partition(&h))
                }
                (None, None) => c4_partition(&g),
                _ => return Err(Failure::Usage("--target and --hom go together".into())),
            };
            let sizes: Vec<usize> = partition.classes().iter().map(Vec::len).collect();
            let covered = sizes.iter().sum::<usize>() == g.num_edges();
            check(covered, "classes do not partition the edges")?;
            Ok(Success {
                config: json!({ "graph": graph, "target": target, "hom": hom }),
                result: json!({ "kind": partition.kind, "num_classes": partition.num_classes(), "class_sizes": sizes }),
                verification: json!({ "partition_covers_edges": covered }),
                summary: format!("{} classes", partition.num_classes()),
                artifact: Some(partition.to_text()),
            })
        }
        Command::Invariants {
            graph,
            target,
            hom,
            walk,
            pivot,
        } => {
            let g = load_graph(graph)?;
            let phi = match (target, hom) {
                (Some(t), Some(path)) => load_hom(&g, &load_graph(t)?, path)?,
                (None, None) => GraphHom::identity(g.clone()),
                _ => return Err(Failure::Usage("--target and --hom go together".into())),
            };
            let w = load_walk(&g, walk)?;
            let ctx = InvariantContext::new(phi);
            let f = EdgeMultiset::from_walk(w.vertices());
            let values: Vec<Value> = ctx
                .class_values(&f)
                .into_iter()
                .map(|((class, anchor), value)| json!({ "class": class, "anchor": anchor, "value": value }))
                .collect();
            let mut result = json!({ "walk": w.vertices(), "parity": w.parity(), "values": values });
            let mut verification = json!({});
            if *pivot {
                let p = find_pivot_edge(&ctx, &f).map_err(|e| Failure::Check {
                    message: e.to_string(),
                    detail: Value::Null,
                })?;
                let odd = ctx.eval(&p.spec, &f).map_err(|e| Failure::Check {
                    message: e.to_string(),
                    detail: Value::Null,
                })? == 1;
                check(odd, "pivot invariant is not odd")?;
                result["pivot"] = serde_json::to_value(&p).expect("serializable");
                verification = json!({ "pivot_invariant_odd": odd });
            }
            Ok(Success {
                config: json!({ "graph": graph, "target": target, "hom": hom, "walk": walk, "pivot": pivot }),
                summary: format!("{} nonzero class invariants", values.len()),
                result,
                verification,
                artifact: None,
            })
        }
        Command::Homotopy { graph, p, q, length_cap } => {
            let g = load_graph(graph)?;
            let (p_walk, q_walk) = (load_walk(&g, p)?, load_walk(&g, q)?);
            let cap = length_cap.unwrap_or_else(|| default_length_cap(&p_walk, &q_walk));
            let state_cap = cli.budget.map_or(DEFAULT_STATE_CAP, |b| b as usize);
            let verdict = are_homotopic(&g, &p_walk, &q_walk, cap, state_cap);
            let mut verification = json!({});
            let mut artifact = None;
            if let HomotopyVerdict::Homotopic { moves } = &verdict {
                let replayed = replay_moves(&g, &p_walk, moves).map(|w| w == q_walk).unwrap_or(false);
                check(replayed, "move sequence does not replay")?;
                verification = json!({ "replayed": replayed });
                artifact = Some(format_move_log(moves));
            }
            Ok(Success {
                config: json!({ "graph": graph, "p": p, "q": q, "length_cap": cap, "state_cap": state_cap }),
                summary: verdict.status().to_string(),
                result: serde_json::to_value(&verdict).expect("serializable"),
                verification,
                artifact,
            })
        }
        Command::SimplyConnected { graph } => {
            let g = load_graph(graph)?;
            let budget = cli.budget.map_or(DEFAULT_TIETZE_BUDGET, |b| b as usize);
            let verdict = check_simply_connected(&g, budget).map_err(|e| Failure::Check {
                message: e.to_string(),
                detail: serde_json::to_value(&e).expect("serializable"),
            })?;
            Ok(Success {
                config: json!({ "graph": graph, "budget": budget }),
                summary: verdict.status().to_string(),
                result: serde_json::to_value(&verdict).expect("serializable"),
                verification: json!({ "method": "neighborhood complex homology and Tietze simplification" }),
                artifact: None,
            })
        }
        Command::ColorPipeline {
            g,
            h,
            hom,
            cycle,
            r,
            assert_sc,
        } => {
            let source = load_graph(g)?;
            let target = load_graph(h)?;
            let phi = load_hom(&source, &target, hom)?;
            let c = load_walk(&source, cycle)?;
            let budget = cli.budget.unwrap_or(DEFAULT_CYCLE_BUDGET);
            let out = bounded_coloring_pipeline(&phi, &c, *r, *assert_sc, budget).map_err(|f| Failure::Check {
                message: f.error.to_string(),
                detail: serde_json::to_value(&*f).expect("serializable"),
            })?;
            let validated = out.trace.validate(&phi, &out.coloring);
            let proper = out.coloring.is_proper(&source) && out.coloring.is_total();
            if let Err(reason) = &validated {
                return Err(Failure::Check {
                    message: format!("trace does not validate: {reason}"),
                    detail: Value::Null,
                });
            }
            check(proper, "coloring is not proper")?;
            Ok(Success {
                config: json!({ "g": g, "h": h, "hom": hom, "cycle": cycle, "r": r, "assert_sc": assert_sc, "budget": budget }),
                summary: format!(
                    "proper coloring with palette {} (bound {})",
                    out.coloring.palette_size,
                    8 * r * r
                ),
                result: json!({
                    "palette_size": out.coloring.palette_size,
                    "colors_used": out.coloring.colors_used(),
                    "bound": 8 * r * r,
                    "trace": out.trace,
                }),
                verification: json!({ "proper": proper, "trace_valid": true }),
                artifact: Some(out.coloring.to_text()),
            })
        }
        Command::Ncomplex { graph } => {
            let g = load_graph(graph)?;
            let k = build_ncomplex(&g);
            let components = k.components();
            Ok(Success {
                config: json!({ "graph": graph }),
                summary: format!(
                    "{} maximal faces, dimension {}, {} components",
                    k.maximal_faces().len(),
                    k.dimension().map_or("-".into(), |d| d.to_string()),
                    components.len()
                ),
                result: json!({
                    "maximal_faces": k.maximal_faces().len(),
                    "dimension": k.dimension(),
                    "components": components,
                }),
                verification: json!({}),
                artifact: Some(k.to_text()),
            })
        }
        Command::H1 { graph } => {
            let g = load_graph(graph)?;
            let k = build_ncomplex(&g);
            let budget = cli.budget.map_or(DEFAULT_TIETZE_BUDGET, |b| b as usize);
            let mut rows = Vec::new();
            let mut texts = Vec::new();
            for part in k.component_complexes() {
                // isolated vertices of the graph contribute uncovered points
                if part.maximal_faces().is_empty() {
                    continue;
                }
                let h1 = h1_homology(&part).map_err(usage)?;
                let (p, _) = edge_path_presentation(&part, part.vertices()[0]).map_err(usage)?;
                let t = tietze_simplify(&p, budget);
                let agrees = t.abelianization == h1;
                check(agrees, "presentation abelianization disagrees with homology")?;
                texts.push(h1.to_string());
                rows.push(json!({
                    "vertices": part.vertices(),
                    "h1": h1.to_string(),
                    "free_rank": h1.free_rank,
                    "torsion": h1.torsion,
                    "tietze_status": t.status.as_str(),
                    "abelianization_agrees": agrees,
                }));
            }
            Ok(Success {
                config: json!({ "graph": graph, "budget": budget }),
                summary: format!("H1 per component: {}", texts.join(", ")),
                result: json!({ "components": rows }),
                verification: json!({ "abelianization_cross_check": true }),
                artifact: None,
            })
        }
        Command::HomExists { g, h } => {
            let source = load_graph(g)?;
            let target = load_graph(h)?;
            let budget = cli.budget.unwrap_or(DEFAULT_NODE_BUDGET);
            let res = hom_exists(&source, &target, budget);
            let verified = match &res.hom {
                Some(hom) => verify_hom(&source, &target, hom.map()),
                None => res.status != HomSearchStatus::Found,
            };
            check(verified, "homomorphism witness does not verify")?;
            Ok(Success {
                config: json!({ "g": g, "h": h, "budget": budget }),
                summary: serde_json::to_value(res.status).expect("serializable").as_str().unwrap_or("").to_string(),
                result: serde_json::to_value(&res).expect("serializable"),
                verification: json!({ "witness_verified": res.hom.is_some() && verified }),
                artifact: res.hom.as_ref().map(|h| h.to_text()),
            })
        }
        Command::Fold {
            graph,
            forbid,
            beam,
            allow_cyclic_input,
        } => {
            let g = load_graph(graph)?;
            let forbidden: Vec<usize> = parse_list(forbid)?.into_iter().map(|x| x as usize).collect();
            let opts = FoldOptions {
                beam: *beam,
                budget: cli.budget.map_or(FoldOptions::default().budget, |b| b as usize),
                seed: cli.seed,
                require_free_input: !allow_cyclic_input,
                ..FoldOptions::default()
            };
            let trace = fold_search(&g, &forbidden, opts).map_err(|e| Failure::Check {
                message: e.to_string(),
                detail: serde_json::to_value(&e).expect("serializable"),
            })?;
            let hom_ok = verify_hom(&g, &trace.quotient, &trace.map);
            check(hom_ok, "quotient map is not a homomorphism")?;
            let trace_json = serde_json::to_value(&trace).expect("serializable");
            Ok(Success {
                config: json!({ "graph": graph, "forbid": forbidden, "beam": beam, "budget": opts.budget, "allow_cyclic_input": allow_cyclic_input }),
                summary: format!(
                    "{} -> {} vertices after {} merges{}",
                    trace.initial_vertices,
                    trace.final_vertices,
                    trace.merges.len(),
                    if trace.stats.budget_exhausted { " (budget exhausted)" } else { "" }
                ),
                artifact: Some(serde_json::to_string_pretty(&trace_json).expect("serializable") + "\n"),
                result: trace_json,
                verification: json!({ "quotient_map_is_homomorphism": hom_ok }),
            })
        }
        Command::ExperimentDhom {
            n,
            r,
            counts,
            seeds,
            fold_max_vertices,
            beam,
        } => {
            let counts: Vec<usize> = parse_list(counts)?.into_iter().map(|x| x as usize).collect();
            let seeds = match seeds {
                Some(s) => parse_list(s)?,
                None => vec![cli.seed],
            };
            let cfg = DhomConfig {
                n: *n,
                r: *r,
                counts,
                seeds,
                fold_max_vertices: *fold_max_vertices,
                beam: *beam,
                fold_budget: cli.budget.map_or(FoldOptions::default().budget, |b| b as usize),
            };
            experiment_dhom_floor(&cfg)
        }
    }
}

fn check(ok: bool, message: &str) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check {
            message: message.to_string(),
            detail: Value::Null,
        })
    }
}

fn antipodally_symmetric(g: &Graph) -> bool {
    g.edges().iter().all(|e| g.has_edge(e.u() ^ 1, e.v() ^ 1))
}

fn gen_borsuk(cli: &Cli, n: usize, eps: &EpsilonArgs, count: usize) -> Result<Success, Failure> {
    if n < 1 || count < 1 {
        return Err(Failure::Usage("need --n >= 1 and --N >= 1".into()));
    }
    let epsilon = resolve_epsilon(eps)?;
    let approx = sample_approximation(n, epsilon, count, cli.seed);
    let g = approx.graph();
    let symmetric = antipodally_symmetric(g);
    check(symmetric, "edge set is not antipodally symmetric")?;
    if let Some(path) = &cli.out {
        let side = |ext: &str| {
            let mut p = path.clone().into_os_string();
            p.push(ext);
            PathBuf::from(p)
        };
        std::fs::write(side(".dump"), approx.sample().to_dump(epsilon)).map_err(usage)?;
        std::fs::write(side(".xref"), approx.xref_text()).map_err(usage)?;
    }
    let mu = cap_measure(n, epsilon).map_err(usage)?;
    Ok(Success {
        config: json!({ "n": n, "epsilon": epsilon, "N": count, "seed": cli.seed }),
        summary: format!("{} vertices, {} edges, min degree {}", g.n(), g.num_edges(), g.min_degree()),
        result: json!({
            "vertices": g.n(),
            "edges": g.num_edges(),
            "min_degree": g.min_degree(),
            "min_degree_ratio": min_degree_ratio(g),
            "cap_measure": mu,
            "odd_girth": odd_girth(g),
        }),
        verification: json!({ "antipodal_symmetry": symmetric }),
        artifact: Some(g.to_edge_list()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DhomConfig {
    pub n: usize,
    pub r: usize,
    pub counts: Vec<usize>,
    pub seeds: Vec<u64>,
    pub fold_max_vertices: usize,
    pub beam: usize,
    pub fold_budget: usize,
}

#[derive(Clone, Debug, Serialize)]
struct DhomRow {
    count: usize,
    seed: u64,
    vertices: usize,
    min_degree: usize,
    min_degree_ratio: f64,
    cap_measure: f64,
    relative_deviation: f64,
    odd_girth: Option<usize>,
    antipodal_symmetry: bool,
    fold_vertices: Option<usize>,
    fold_quotient_verified: Option<bool>,
}

/// Sweeps sample sizes and seeds for the Borsuk graph at epsilon pi/(2r+1),
/// comparing min-degree ratios with the cap measure and recording the
/// smallest forbidden-cycle-free quotient the fold search reaches.
fn experiment_dhom_floor(cfg: &DhomConfig) -> Result<Success, Failure> {
    if cfg.n < 1 || cfg.r < 1 || cfg.counts.is_empty() || cfg.counts.contains(&0) || cfg.seeds.is_empty() {
        return Err(Failure::Usage("need n >= 1, r >= 1, nonempty positive N list and seeds".into()));
    }
    let epsilon = PI / (2 * cfg.r + 1) as f64;
    let mu = cap_measure(cfg.n, epsilon).map_err(usage)?;
    let forbidden = 2 * cfg.r + 1;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &count in &cfg.counts {
        let mut floor: Option<usize> = None;
        let mut ratios = Vec::new();
        for &seed in &cfg.seeds {
            let approx = sample_approximation(cfg.n, epsilon, count, seed);
            let g = approx.graph();
            let ratio = min_degree_ratio(g);
            let (fold_vertices, fold_ok) = if g.n() <= cfg.fold_max_vertices {
                let opts = FoldOptions {
                    beam: cfg.beam,
                    budget: cfg.fold_budget,
                    seed,
                    ..FoldOptions::default()
                };
                match fold_search(g, &[forbidden], opts) {
                    Ok(t) => {
                        let ok = verify_hom(g, &t.quotient, &t.map);
                        check(ok, "fold quotient map is not a homomorphism")?;
                        floor = Some(floor.map_or(t.final_vertices, |f| f.min(t.final_vertices)));
                        (Some(t.final_vertices), Some(ok))
                    }
                    // tiny samples may contain the forbidden cycle themselves
                    Err(_) => (None, None),
                }
            } else {
                (None, None)
            };
            ratios.push(ratio);
            rows.push(DhomRow {
                count,
                seed,
                vertices: g.n(),
                min_degree: g.min_degree(),
                min_degree_ratio: ratio,
                cap_measure: mu,
                relative_deviation: (ratio - mu).abs() / mu,
                odd_girth: odd_girth(g),
                antipodal_symmetry: antipodally_symmetric(g),
                fold_vertices,
                fold_quotient_verified: fold_ok,
            });
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        summaries.push(json!({ "N": count, "mean_min_degree_ratio": mean, "fold_floor": floor }));
    }
    let symmetric = rows.iter().all(|r| r.antipodal_symmetry);
    check(symmetric, "a sample is not antipodally symmetric")?;
    let summary = summaries
        .iter()
        .map(|s| format!("N={} mean ratio {:.4} (mu {:.4}) fold floor {}", s["N"], s["mean_min_degree_ratio"].as_f64().unwrap_or(0.0), mu, s["fold_floor"]))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Success {
        config: serde_json::to_value(cfg).expect("serializable"),
        summary,
        result: json!({ "epsilon": epsilon, "cap_measure": mu, "forbidden_length": forbidden, "rows": rows, "per_count": summaries }),
        verification: json!({ "antipodal_symmetry": symmetric, "fold_quotients_verified": true }),
        artifact: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_forms() {
        assert!((parse_epsilon("pi/5", None).unwrap() - PI / 5.0).abs() < 1e-15);
        assert!((parse_epsilon("pi/(2r+1)", Some(3)).unwrap() - PI / 7.0).abs() < 1e-15);
        assert!(parse_epsilon("pi/(2r+1)", None).is_err());
        assert!((parse_epsilon("0.5", None).unwrap() - 0.5).abs() < 1e-15);
        assert!(parse_epsilon("tau", None).is_err());
    }

    #[test]
    fn odd_girth_of_builtin_petersen() {
        let out = run_cli(["oddwalk", "odd-girth", "--graph", "petersen", "--json"]);
        assert_eq!(out.code, 0);
        assert_eq!(out.report.unwrap().result["odd_girth"], json!(5));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_cli(["oddwalk", "odd-girth"]).code, 2);
        assert_eq!(run_cli(["oddwalk", "odd-girth", "--graph", "/no/such/file"]).code, 2);
        assert_eq!(run_cli(["oddwalk", "experiment-dhom", "--n", "2", "--r", "2", "--N", "x"]).code, 2);
    }

    #[test]
    fn failed_hypothesis_exits_one() {
        let out = run_cli(["oddwalk", "simply-connected", "--graph", "c6"]);
        assert_eq!(out.code, 1);
        let out = run_cli(["oddwalk", "fold", "--graph", "c5", "--forbid", "5"]);
        assert_eq!(out.code, 1);
        let out = run_cli(["oddwalk", "fold", "--graph", "c5", "--forbid", "5", "--allow-cyclic-input"]);
        assert_eq!(out.code, 0);
        assert_eq!(out.report.unwrap().result["final_vertices"], json!(3));
    }
}
