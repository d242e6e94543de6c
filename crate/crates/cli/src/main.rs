//! Command-line frontend: wires the parsers, solvers, reductions and the
//! exhaustive oracle into reproducible batch runs. Reports are single-line
//! JSON on stdout; diagnostics go to stderr. Exit codes: 0 completed,
//! 2 input or usage error, 3 resource limit.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pmvc::circuit::{circuit_to_graph, CircuitSpec, StateKind};
use pmvc::constraint::{sym_eval, CountVector, SymmetricConstraint};
use pmvc::dd::DecisionDiagram;
use pmvc::dp::dp_solve_sym;
use pmvc::extract::extract_pm_sym;
use pmvc::graph::{parse_graph, ColorId, Graph, VertexColoring};
use pmvc::matching::solve_explicit_witness;
use pmvc::oracle::{enumerate_pms, oracle_dd, oracle_sym, OracleError};
use pmvc::pit::{pit_decide_sym, PitConfig, TriStateAnswer};
use pmvc::planar::{planar_decide_sym, PlanarEmbedding};
use pmvc::reduce::{sat3_to_dd, xpm_to_sym, CnfFormula};
use pmvc::treewidth::{heuristic_td, make_nice, validate_td, TreeDecomposition};

const EXIT_INPUT: i32 = 2;
const EXIT_LIMIT: i32 = 3;

/// Exact perfect matchings under vertex-color constraints.
#[derive(Parser)]
#[command(name = "pmvc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide existence of a matching satisfying a symmetric constraint.
    SolveSym {
        /// Graph JSON file.
        #[arg(long)]
        graph: PathBuf,
        /// Constraint JSON file.
        #[arg(long)]
        constraint: PathBuf,
        #[arg(long, value_enum)]
        method: SymMethod,
        /// Root seed for all randomness.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Failure bound for the randomized decider.
        #[arg(long, default_value_t = 2f64.powi(-20))]
        epsilon: f64,
        /// Tree-decomposition JSON file (dp method; heuristic otherwise).
        #[arg(long)]
        td: Option<PathBuf>,
        /// Planar embedding JSON file (planar method).
        #[arg(long)]
        embedding: Option<PathBuf>,
        /// Skip certificate extraction; positive answers become "unknown".
        #[arg(long)]
        no_verify: bool,
    },
    /// Construct a matching satisfying a symmetric constraint.
    ExtractSym {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        constraint: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Isolating-lemma rounds before giving up.
        #[arg(long, default_value_t = 20)]
        rounds: usize,
    },
    /// Decide existence of a matching accepted by a decision diagram.
    SolveDd {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        dd: PathBuf,
        #[arg(long, value_enum)]
        method: DdMethod,
    },
    /// Emit hardness-reduction instances.
    Reduce {
        #[command(subcommand)]
        kind: ReduceKind,
    },
    /// Translate a quantum optical circuit into a matching instance.
    FromCircuit {
        /// Circuit JSON file.
        #[arg(long)]
        circuit: PathBuf,
        /// Target state: ghz, w, dicke:K or gdicke:K1,K2,...
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Exhaustive ground-truth tooling.
    Oracle {
        #[command(subcommand)]
        kind: OracleKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SymMethod {
    Pit,
    Dp,
    Planar,
    Oracle,
    Explicit,
}

#[derive(Clone, Copy, ValueEnum)]
enum DdMethod {
    Oracle,
}

#[derive(Subcommand)]
enum ReduceKind {
    /// 3-SAT to a decision-diagram instance (graph + DD + gadget map).
    Sat3 {
        /// DIMACS CNF file.
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Exact matching (k red edges) to a symmetric-constraint instance.
    Xpm {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out_prefix: PathBuf,
    },
}

#[derive(Subcommand)]
enum OracleKind {
    /// List every perfect matching with its inherited coloring.
    Enumerate {
        #[arg(long)]
        graph: PathBuf,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(e: impl fmt::Display) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }

    fn limit(e: impl fmt::Display) -> Self {
        Failure {
            code: EXIT_LIMIT,
            message: e.to_string(),
        }
    }
}

fn from_oracle(e: OracleError) -> Failure {
    match e {
        OracleError::TooLarge { .. } | OracleError::DimensionExceeded { .. } => Failure::limit(e),
        other => Failure::input(other),
    }
}

#[derive(Serialize)]
struct Report {
    answer: &'static str,
    verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Vec<usize>>,
    method: &'static str,
    seed: u64,
    trials: usize,
}

impl Report {
    fn print(&self) {
        println!(
            "{}",
            serde_json::to_string(self).expect("report serialization cannot fail")
        );
    }

    fn from_tristate(
        answer: TriStateAnswer,
        method: &'static str,
        seed: u64,
        trials: usize,
    ) -> Report {
        match answer {
            TriStateAnswer::No => Report {
                answer: "no",
                verified: false,
                certificate: None,
                method,
                seed,
                trials,
            },
            TriStateAnswer::YesVerified(pm) => Report {
                answer: "yes",
                verified: true,
                certificate: Some(pm.edge_ids().to_vec()),
                method,
                seed,
                trials,
            },
            TriStateAnswer::YesUnverified => Report {
                answer: "unknown",
                verified: false,
                certificate: None,
                method,
                seed,
                trials,
            },
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => {}
        Err(f) => {
            eprintln!("error: {}", f.message);
            std::process::exit(f.code);
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    parse_graph(&read_file(path)?).map_err(Failure::input)
}

fn load_constraint(path: &Path) -> Result<SymmetricConstraint, Failure> {
    SymmetricConstraint::parse(&read_file(path)?).map_err(Failure::input)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn prefixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::SolveSym {
            graph,
            constraint,
            method,
            seed,
            epsilon,
            td,
            embedding,
            no_verify,
        } => {
            let g = load_graph(&graph)?;
            let c = load_constraint(&constraint)?;
            c.validate(g.d()).map_err(Failure::input)?;
            let report = match method {
                SymMethod::Pit => {
                    let mut cfg = PitConfig::for_graph(&g, epsilon, seed);
                    cfg.verify = !no_verify;
                    let answer = pit_decide_sym(&g, &c, &cfg).map_err(Failure::input)?;
                    Report::from_tristate(answer, "pit", seed, cfg.trials())
                }
                SymMethod::Planar => {
                    let path = embedding.ok_or_else(|| {
                        Failure::input("--embedding is required for the planar method")
                    })?;
                    let emb =
                        PlanarEmbedding::parse(&read_file(&path)?).map_err(Failure::input)?;
                    let answer = planar_decide_sym(&g, &emb, &c).map_err(Failure::input)?;
                    Report::from_tristate(answer, "planar", seed, 0)
                }
                SymMethod::Dp => {
                    let decomposition = match td {
                        Some(path) => {
                            let parsed = TreeDecomposition::parse(&read_file(&path)?)
                                .map_err(Failure::input)?;
                            let report = validate_td(&g, &parsed);
                            if !report.valid {
                                return Err(Failure::input(format!(
                                    "invalid tree decomposition: {}",
                                    report.violation.unwrap_or_default()
                                )));
                            }
                            parsed
                        }
                        None => heuristic_td(&g),
                    };
                    let outcome = if g.n() == 0 {
                        dp_solve_sym(&g, &c, &make_nice(&heuristic_td(&k2_stub())).unwrap())
                    } else {
                        let nice = make_nice(&decomposition).map_err(Failure::input)?;
                        dp_solve_sym(&g, &c, &nice)
                    }
                    .map_err(Failure::input)?;
                    match outcome.witness {
                        Some(pm) => Report {
                            answer: "yes",
                            verified: true,
                            certificate: Some(pm.edge_ids().to_vec()),
                            method: "dp",
                            seed,
                            trials: 0,
                        },
                        None => Report {
                            answer: "no",
                            verified: false,
                            certificate: None,
                            method: "dp",
                            seed,
                            trials: 0,
                        },
                    }
                }
                SymMethod::Oracle => {
                    let answer = oracle_sym(&g, &c).map_err(from_oracle)?;
                    match answer.witness {
                        Some((pm, _)) => Report {
                            answer: "yes",
                            verified: true,
                            certificate: Some(pm.edge_ids().to_vec()),
                            method: "oracle",
                            seed,
                            trials: 0,
                        },
                        None => Report {
                            answer: "no",
                            verified: false,
                            certificate: None,
                            method: "oracle",
                            seed,
                            trials: 0,
                        },
                    }
                }
                SymMethod::Explicit => {
                    let colorings = materialize_legal_colorings(&g, &c)?;
                    let witness =
                        solve_explicit_witness(&g, &colorings).map_err(Failure::input)?;
                    match witness {
                        Some(pm) => Report {
                            answer: "yes",
                            verified: true,
                            certificate: Some(pm.edge_ids().to_vec()),
                            method: "explicit",
                            seed,
                            trials: 0,
                        },
                        None => Report {
                            answer: "no",
                            verified: false,
                            certificate: None,
                            method: "explicit",
                            seed,
                            trials: 0,
                        },
                    }
                }
            };
            report.print();
            Ok(())
        }
        Command::ExtractSym {
            graph,
            constraint,
            seed,
            rounds,
        } => {
            let g = load_graph(&graph)?;
            let c = load_constraint(&constraint)?;
            let found = extract_pm_sym(&g, &c, seed, rounds).map_err(Failure::input)?;
            match found {
                Some(pm) => {
                    Report {
                        answer: "yes",
                        verified: true,
                        certificate: Some(pm.edge_ids().to_vec()),
                        method: "extract",
                        seed,
                        trials: rounds,
                    }
                    .print();
                    Ok(())
                }
                None => {
                    Report {
                        answer: "unknown",
                        verified: false,
                        certificate: None,
                        method: "extract",
                        seed,
                        trials: rounds,
                    }
                    .print();
                    Err(Failure::limit(format!(
                        "no certificate within {rounds} rounds"
                    )))
                }
            }
        }
        Command::SolveDd { graph, dd, method } => {
            let g = load_graph(&graph)?;
            let diagram = DecisionDiagram::parse(&read_file(&dd)?).map_err(Failure::input)?;
            let DdMethod::Oracle = method;
            let answer = oracle_dd(&g, &diagram).map_err(from_oracle)?;
            match answer.witness {
                Some((pm, _)) => Report {
                    answer: "yes",
                    verified: true,
                    certificate: Some(pm.edge_ids().to_vec()),
                    method: "oracle",
                    seed: 0,
                    trials: 0,
                },
                None => Report {
                    answer: "no",
                    verified: false,
                    certificate: None,
                    method: "oracle",
                    seed: 0,
                    trials: 0,
                },
            }
            .print();
            Ok(())
        }
        Command::Reduce { kind } => match kind {
            ReduceKind::Sat3 { cnf, out_prefix } => {
                let text = String::from_utf8(read_file(&cnf)?)
                    .map_err(|e| Failure::input(format!("{}: {e}", cnf.display())))?;
                let formula = CnfFormula::parse_dimacs(&text).map_err(Failure::input)?;
                let (g, dd, map) = sat3_to_dd(&formula).map_err(Failure::input)?;
                let graph_path = prefixed(&out_prefix, ".graph.json");
                let dd_path = prefixed(&out_prefix, ".dd.json");
                let map_path = prefixed(&out_prefix, ".gadgets.json");
                write_file(&graph_path, &g.to_json())?;
                write_file(&dd_path, &dd.to_json())?;
                write_file(&map_path, &map.to_json())?;
                #[derive(Serialize)]
                struct Out {
                    graph: PathBuf,
                    dd: PathBuf,
                    gadgets: PathBuf,
                    vertices: usize,
                    edges: usize,
                    clauses: usize,
                }
                println!(
                    "{}",
                    serde_json::to_string(&Out {
                        graph: graph_path,
                        dd: dd_path,
                        gadgets: map_path,
                        vertices: g.n(),
                        edges: g.num_edges(),
                        clauses: formula.clauses.len(),
                    })
                    .expect("summary serialization cannot fail")
                );
                Ok(())
            }
            ReduceKind::Xpm {
                graph,
                k,
                out_prefix,
            } => {
                let g = load_graph(&graph)?;
                let (g2, constraint) = xpm_to_sym(&g, k).map_err(Failure::input)?;
                let graph_path = prefixed(&out_prefix, ".graph.json");
                let constraint_path = prefixed(&out_prefix, ".constraint.json");
                write_file(&graph_path, &g2.to_json())?;
                write_file(&constraint_path, &constraint.to_json())?;
                #[derive(Serialize)]
                struct Out {
                    graph: PathBuf,
                    constraint: PathBuf,
                    vertices: usize,
                    edges: usize,
                }
                println!(
                    "{}",
                    serde_json::to_string(&Out {
                        graph: graph_path,
                        constraint: constraint_path,
                        vertices: g2.n(),
                        edges: g2.num_edges(),
                    })
                    .expect("summary serialization cannot fail")
                );
                Ok(())
            }
        },
        Command::FromCircuit {
            circuit,
            state,
            out_prefix,
        } => {
            let spec = CircuitSpec::parse(&read_file(&circuit)?).map_err(Failure::input)?;
            let g = circuit_to_graph(&spec).map_err(Failure::input)?;
            let graph_path = prefixed(&out_prefix, ".graph.json");
            let circuit_path = prefixed(&out_prefix, ".circuit.json");
            write_file(&graph_path, &g.to_json())?;
            write_file(&circuit_path, &spec.to_json())?;
            let constraint_path = match &state {
                Some(name) => {
                    let kind = parse_state(name)?;
                    let constraint = pmvc::circuit::state_constraint(
                        &kind,
                        spec.paths as u32,
                        spec.modes,
                    )
                    .map_err(Failure::input)?;
                    let path = prefixed(&out_prefix, ".constraint.json");
                    write_file(&path, &constraint.to_json())?;
                    Some(path)
                }
                None => None,
            };
            #[derive(Serialize)]
            struct Out {
                graph: PathBuf,
                circuit: PathBuf,
                #[serde(skip_serializing_if = "Option::is_none")]
                constraint: Option<PathBuf>,
                vertices: usize,
                edges: usize,
            }
            println!(
                "{}",
                serde_json::to_string(&Out {
                    graph: graph_path,
                    circuit: circuit_path,
                    constraint: constraint_path,
                    vertices: g.n(),
                    edges: g.num_edges(),
                })
                .expect("summary serialization cannot fail")
            );
            Ok(())
        }
        Command::Oracle { kind } => match kind {
            OracleKind::Enumerate { graph } => {
                let g = load_graph(&graph)?;
                let all = enumerate_pms(&g).map_err(from_oracle)?;
                #[derive(Serialize)]
                struct Entry {
                    edges: Vec<usize>,
                    coloring: Vec<u32>,
                }
                #[derive(Serialize)]
                struct Out {
                    count: usize,
                    matchings: Vec<Entry>,
                }
                let matchings = all
                    .into_iter()
                    .map(|(pm, coloring)| Entry {
                        edges: pm.edge_ids().to_vec(),
                        coloring: coloring.0.iter().map(|c| c.0).collect(),
                    })
                    .collect::<Vec<_>>();
                println!(
                    "{}",
                    serde_json::to_string(&Out {
                        count: matchings.len(),
                        matchings,
                    })
                    .expect("summary serialization cannot fail")
                );
                Ok(())
            }
        },
    }
}

/// All total colorings whose count vector satisfies the constraint. The
/// explicit-list solver is meant for polynomially small legal sets; a hard
/// cap keeps it honest.
fn materialize_legal_colorings(
    g: &Graph,
    c: &SymmetricConstraint,
) -> Result<Vec<VertexColoring>, Failure> {
    const CAP: u64 = 1 << 20;
    let n = g.n() as u32;
    let d = g.d();
    let total = (d as u64).checked_pow(n).filter(|&t| t <= CAP);
    if total.is_none() {
        return Err(Failure::limit(format!(
            "explicit method needs d^n <= {CAP}, got {d}^{n}"
        )));
    }
    let mut out = Vec::new();
    let mut colors = vec![1u32; g.n()];
    loop {
        let coloring = VertexColoring(colors.iter().map(|&c| ColorId(c)).collect());
        let counts = CountVector(coloring.counts(d));
        if sym_eval(c, &counts).map_err(Failure::input)? {
            out.push(coloring);
        }
        // Odometer increment over colors.
        let mut i = 0;
        loop {
            if i == colors.len() {
                return Ok(out);
            }
            if colors[i] < d {
                colors[i] += 1;
                break;
            }
            colors[i] = 1;
            i += 1;
        }
    }
}

fn parse_state(name: &str) -> Result<StateKind, Failure> {
    let lower = name.to_ascii_lowercase();
    let (kind, params) = match lower.split_once(':') {
        Some((k, p)) => (k, Some(p)),
        None => (lower.as_str(), None),
    };
    match (kind, params) {
        ("ghz", None) => Ok(StateKind::Ghz),
        ("w", None) => Ok(StateKind::W),
        ("dicke", Some(p)) => p
            .parse::<u32>()
            .map(StateKind::Dicke)
            .map_err(|e| Failure::input(format!("bad dicke parameter {p:?}: {e}"))),
        ("gdicke", Some(p)) => p
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<Result<Vec<u32>, _>>()
            .map(StateKind::GeneralDicke)
            .map_err(|e| Failure::input(format!("bad gdicke parameters {p:?}: {e}"))),
        _ => Err(Failure::input(format!(
            "unknown state {name:?}; expected ghz, w, dicke:K or gdicke:K1,K2,..."
        ))),
    }
}

/// Stand-in decomposition for the n = 0 case, where the solver answers from
/// the constraint alone and never reads it.
fn k2_stub() -> Graph {
    parse_graph(br#"{"n":2,"d":1,"edges":[[1,2,1,1]]}"#).expect("static fixture parses")
}
