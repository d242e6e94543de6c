//! Polynomial reductions: exact matching (k red edges) to a symmetric
//! constraint, and 3-SAT to a decision-diagram instance via per-clause
//! gadgets, with assignment decoding back out of a legal matching.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dd::{dd_all_equal, dd_conjoin_disjoint, DdError, DecisionDiagram};
use crate::graph::{
    inherited_coloring, BiColoredEdge, ColorId, Graph, GraphError, PerfectMatching,
};

pub const RED: u32 = 1;
pub const BLUE: u32 = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("DIMACS parse error at line {line}: {message}")]
    Dimacs { line: usize, message: String },
    #[error("clause {0} has more than 3 literals")]
    ClauseTooLong(usize),
    #[error("edge {0} is not monochromatic")]
    NotMonochromatic(usize),
    #[error("graph must have exactly 2 colors, found {0}")]
    NotTwoColors(u32),
    #[error("vertices of variable {0} carry mixed inherited colors")]
    MixedClassColors(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dd(#[from] DdError),
}

/// 3-CNF formula; literals are nonzero signed variable indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<[i64; 3]>,
}

impl CnfFormula {
    /// Parses DIMACS CNF. Clauses with fewer than three literals are padded
    /// by repeating one; longer clauses are rejected.
    pub fn parse_dimacs(text: &str) -> Result<Self, ReduceError> {
        let mut num_vars = None;
        let mut clauses = Vec::new();
        let mut current: Vec<i64> = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            let err = |message: String| ReduceError::Dimacs {
                line: line_no + 1,
                message,
            };
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                if fields.len() != 3 || fields[0] != "cnf" {
                    return Err(err("malformed problem line".into()));
                }
                num_vars = Some(
                    fields[1]
                        .parse::<usize>()
                        .map_err(|e| err(format!("bad variable count: {e}")))?,
                );
                continue;
            }
            for token in line.split_whitespace() {
                let lit: i64 = token
                    .parse()
                    .map_err(|e| err(format!("bad literal {token:?}: {e}")))?;
                if lit == 0 {
                    let clause = Self::pad_clause(&current, clauses.len())?;
                    clauses.push(clause);
                    current.clear();
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            let clause = Self::pad_clause(&current, clauses.len())?;
            clauses.push(clause);
        }
        let num_vars = num_vars.ok_or(ReduceError::Dimacs {
            line: 0,
            message: "missing problem line".into(),
        })?;
        let formula = CnfFormula { num_vars, clauses };
        formula.check()?;
        Ok(formula)
    }

    fn pad_clause(lits: &[i64], index: usize) -> Result<[i64; 3], ReduceError> {
        match lits {
            [] => Err(ReduceError::Dimacs {
                line: 0,
                message: format!("clause {index} is empty"),
            }),
            [a] => Ok([*a, *a, *a]),
            [a, b] => Ok([*a, *b, *b]),
            [a, b, c] => Ok([*a, *b, *c]),
            _ => Err(ReduceError::ClauseTooLong(index)),
        }
    }

    pub fn check(&self) -> Result<(), ReduceError> {
        for (i, clause) in self.clauses.iter().enumerate() {
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > self.num_vars {
                    return Err(ReduceError::Dimacs {
                        line: 0,
                        message: format!("clause {i} has out-of-range literal {lit}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Evaluates under `assignment` (indexed by variable - 1).
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let value = assignment[(lit.unsigned_abs() as usize) - 1];
                if lit > 0 {
                    value
                } else {
                    !value
                }
            })
        })
    }

    /// Truth-table satisfiability; the test oracle for the reduction.
    pub fn brute_force_satisfiable(&self) -> Option<Vec<bool>> {
        assert!(self.num_vars <= 20, "truth table limited to 20 variables");
        (0u64..1 << self.num_vars).find_map(|mask| {
            let assignment: Vec<bool> = (0..self.num_vars).map(|i| mask >> i & 1 == 1).collect();
            self.eval(&assignment).then_some(assignment)
        })
    }
}

/// Vertex bookkeeping of the clause gadgets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseGadget {
    /// Clause vertex u_i.
    pub u: usize,
    /// Literal vertices v_{i,1..3}.
    pub v: [usize; 3],
    /// Dummy vertices w_{i,1..2}.
    pub w: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetMap {
    pub clauses: Vec<ClauseGadget>,
    /// Variable index -> its literal vertices across all clauses.
    pub variable_classes: BTreeMap<usize, Vec<usize>>,
}

impl GadgetMap {
    pub fn parse(text: &[u8]) -> Result<Self, ReduceError> {
        serde_json::from_slice(text).map_err(|e| ReduceError::Dimacs {
            line: 0,
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("gadget map serialization cannot fail")
    }
}

/// Exact matching with 2k red vertices: on monochromatic red/blue graphs, a
/// matching has exactly k red edges iff its inherited coloring has 2k red
/// vertices.
pub fn xpm_to_sym(
    g: &Graph,
    k: u32,
) -> Result<(Graph, crate::constraint::SymmetricConstraint), ReduceError> {
    if g.d() != 2 {
        return Err(ReduceError::NotTwoColors(g.d()));
    }
    if let Some(bad) = g.edges().iter().position(|e| !e.is_monochromatic()) {
        return Err(ReduceError::NotMonochromatic(bad));
    }
    Ok((
        g.clone(),
        crate::constraint::SymmetricConstraint::CountEq {
            color: RED,
            k: 2 * k,
        },
    ))
}

/// Builds the PM-VC-DD instance for a 3-CNF formula: one 6-vertex gadget
/// per clause (clause vertex, three literal vertices, two dummies), clause
/// edges colored red for positive literals and blue for negative ones, each
/// dummy joined to every literal vertex by one red and one blue parallel
/// edge, and a diagram demanding one inherited color per variable class.
///
/// Each dummy is adjacent to all three literal vertices: whichever literal
/// the clause vertex picks, the two leftover literal vertices must still
/// reach the two dummies.
pub fn sat3_to_dd(f: &CnfFormula) -> Result<(Graph, DecisionDiagram, GadgetMap), ReduceError> {
    f.check()?;
    let m = f.clauses.len();
    let mut edges: Vec<BiColoredEdge> = Vec::new();
    let mut gadgets = Vec::with_capacity(m);
    let mut variable_classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();

    let mono = |u: usize, v: usize, color: u32| BiColoredEdge {
        u,
        v,
        color_at_u: ColorId(color),
        color_at_v: ColorId(color),
    };

    for (i, clause) in f.clauses.iter().enumerate() {
        let base = 6 * i;
        let gadget = ClauseGadget {
            u: base + 1,
            v: [base + 2, base + 3, base + 4],
            w: [base + 5, base + 6],
        };
        for (k, &lit) in clause.iter().enumerate() {
            let color = if lit > 0 { RED } else { BLUE };
            edges.push(mono(gadget.u, gadget.v[k], color));
            variable_classes
                .entry(lit.unsigned_abs() as usize)
                .or_default()
                .push(gadget.v[k]);
        }
        for &w in &gadget.w {
            for &v in &gadget.v {
                edges.push(mono(w, v, RED));
                edges.push(mono(w, v, BLUE));
            }
        }
        gadgets.push(gadget);
    }
    let graph = Graph::new(6 * m, 2, edges)?;

    // Literal vertices grouped by variable, variables ascending: All-Equal
    // chains stay contiguous and conjunction is a terminal substitution.
    let order: Vec<usize> = variable_classes.values().flatten().copied().collect();
    let mut dd = DecisionDiagram::constant(true, vec![]);
    for class in variable_classes.values() {
        let vertices: BTreeSet<usize> = class.iter().copied().collect();
        let chain = dd_all_equal(&vertices, 2, &order)?;
        dd = dd_conjoin_disjoint(&dd, &chain)?;
    }
    let map = GadgetMap {
        clauses: gadgets,
        variable_classes,
    };
    Ok((graph, dd, map))
}

/// Reads a variable assignment off a legal matching: a variable is true iff
/// its class's inherited color is red. Variables with no occurrence in the
/// formula default to false.
pub fn decode_assignment(
    p: &PerfectMatching,
    map: &GadgetMap,
    g: &Graph,
    num_vars: usize,
) -> Result<Vec<bool>, ReduceError> {
    let coloring = inherited_coloring(g, p)?;
    let mut assignment = vec![false; num_vars];
    for (&var, class) in &map.variable_classes {
        let mut colors = class.iter().map(|&v| coloring.get(v));
        let Some(first) = colors.next() else {
            continue;
        };
        if colors.any(|c| c != first) {
            return Err(ReduceError::MixedClassColors(var));
        }
        assignment[var - 1] = first.0 == RED;
    }
    Ok(assignment)
}

/// The constructive direction: realizes a satisfying assignment as a legal
/// matching. Per clause, the clause vertex takes the first satisfied
/// literal's edge and the two remaining literal vertices pair with the
/// dummies along the parallel edge matching their variable's color.
pub fn matching_from_assignment(
    f: &CnfFormula,
    map: &GadgetMap,
    g: &Graph,
    assignment: &[bool],
) -> Option<PerfectMatching> {
    let color_of = |lit: i64| -> u32 {
        if assignment[(lit.unsigned_abs() as usize) - 1] {
            RED
        } else {
            BLUE
        }
    };
    let find_edge = |a: usize, b: usize, color: u32| -> Option<usize> {
        g.edges().iter().position(|e| {
            (e.u.min(e.v), e.u.max(e.v)) == (a.min(b), a.max(b))
                && e.color_at_u == ColorId(color)
                && e.color_at_v == ColorId(color)
        })
    };
    let mut ids = Vec::new();
    for (i, clause) in f.clauses.iter().enumerate() {
        let gadget = &map.clauses[i];
        let satisfied = clause.iter().position(|&lit| {
            let value = assignment[(lit.unsigned_abs() as usize) - 1];
            if lit > 0 {
                value
            } else {
                !value
            }
        })?;
        ids.push(find_edge(
            gadget.u,
            gadget.v[satisfied],
            if clause[satisfied] > 0 { RED } else { BLUE },
        )?);
        let rest: Vec<usize> = (0..3).filter(|&k| k != satisfied).collect();
        for (slot, &k) in rest.iter().enumerate() {
            ids.push(find_edge(
                gadget.w[slot],
                gadget.v[k],
                color_of(clause[k]),
            )?);
        }
    }
    Some(PerfectMatching::new(ids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::dd_evaluate;
    use crate::graph::{check_perfect_matching, parse_graph};
    use crate::oracle::{oracle_dd_with_limit, oracle_sym, enumerate_pms};
    use rand::{Rng, SeedableRng};

    #[test]
    fn dimacs_parsing_and_padding() {
        let f = CnfFormula::parse_dimacs("c demo\np cnf 3 2\n1 -2 3 0\n2 0\n").unwrap();
        assert_eq!(f.num_vars, 3);
        assert_eq!(f.clauses, vec![[1, -2, 3], [2, 2, 2]]);
        assert!(CnfFormula::parse_dimacs("p cnf 2 1\n1 2 -1 2 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("1 0\n").is_err());
    }

    #[test]
    fn xpm_reduction_checks_preconditions() {
        let mixed = parse_graph(br#"{"n":2,"d":2,"edges":[[1,2,1,2]]}"#).unwrap();
        assert_eq!(xpm_to_sym(&mixed, 1).unwrap_err(), ReduceError::NotMonochromatic(0));
        let mono = parse_graph(br#"{"n":2,"d":2,"edges":[[1,2,1,1]]}"#).unwrap();
        let (_, constraint) = xpm_to_sym(&mono, 1).unwrap();
        assert_eq!(
            constraint,
            crate::constraint::SymmetricConstraint::CountEq { color: RED, k: 2 }
        );
        let (_, zero) = xpm_to_sym(&mono, 0).unwrap();
        assert!(oracle_sym(&mono, &zero).unwrap().satisfiable == false);
    }

    #[test]
    fn xpm_counts_red_edges() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        for _ in 0..60 {
            let n = 2 * rng.gen_range(1..=4);
            let mut edges = Vec::new();
            for _ in 0..rng.gen_range(1..=2 * n) {
                let u = rng.gen_range(1..=n);
                let mut v = rng.gen_range(1..=n);
                while v == u {
                    v = rng.gen_range(1..=n);
                }
                let c = rng.gen_range(1..=2);
                edges.push(format!("[{u},{v},{c},{c}]"));
            }
            let graph = parse_graph(
                format!(r#"{{"n":{},"d":2,"edges":[{}]}}"#, n, edges.join(",")).as_bytes(),
            )
            .unwrap();
            for k in 0..=(n as u32) / 2 {
                let (_, constraint) = xpm_to_sym(&graph, k).unwrap();
                let via_reduction = oracle_sym(&graph, &constraint).unwrap().satisfiable;
                let direct = enumerate_pms(&graph).unwrap().iter().any(|(pm, _)| {
                    let reds = pm
                        .edge_ids()
                        .iter()
                        .filter(|&&id| graph.edges()[id].color_at_u == ColorId(RED))
                        .count();
                    reds == k as usize
                });
                assert_eq!(via_reduction, direct);
            }
        }
    }

    #[test]
    fn single_clause_gadget_shape() {
        let f = CnfFormula {
            num_vars: 3,
            clauses: vec![[1, -2, 3]],
        };
        let (g, dd, map) = sat3_to_dd(&f).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.num_edges(), 3 + 12);
        assert!(g.edges().iter().all(|e| e.is_monochromatic()));
        assert_eq!(g.edges()[0].color_at_u, ColorId(RED));
        assert_eq!(g.edges()[1].color_at_u, ColorId(BLUE));
        assert_eq!(g.edges()[2].color_at_u, ColorId(RED));
        // Three singleton classes: the diagram accepts everything.
        assert_eq!(map.variable_classes.len(), 3);
        let answer = oracle_dd_with_limit(&g, &dd, 6).unwrap();
        assert!(answer.satisfiable);
    }

    #[test]
    fn gadget_components_are_bipartite_and_small() {
        let f = CnfFormula {
            num_vars: 4,
            clauses: vec![[1, 2, -3], [-1, 4, 4], [2, -4, 3]],
        };
        let (g, _, map) = sat3_to_dd(&f).unwrap();
        assert_eq!(g.n(), 18);
        // Bipartition: {u, w} on one side, {v} on the other.
        let mut side = vec![false; g.n() + 1];
        for gadget in &map.clauses {
            side[gadget.u] = true;
            for &w in &gadget.w {
                side[w] = true;
            }
        }
        for e in g.edges() {
            assert_ne!(side[e.u], side[e.v]);
        }
    }

    #[test]
    fn reduction_agrees_with_truth_table() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(73);
        for _ in 0..40 {
            let num_vars = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=3);
            let clauses: Vec<[i64; 3]> = (0..m)
                .map(|_| {
                    [0; 3].map(|_| {
                        let var = rng.gen_range(1..=num_vars) as i64;
                        if rng.gen_bool(0.5) {
                            var
                        } else {
                            -var
                        }
                    })
                })
                .collect();
            let f = CnfFormula { num_vars, clauses };
            let (g, dd, map) = sat3_to_dd(&f).unwrap();
            let expected = f.brute_force_satisfiable();
            let answer = oracle_dd_with_limit(&g, &dd, g.n()).unwrap();
            assert_eq!(answer.satisfiable, expected.is_some());
            if let Some((pm, coloring)) = answer.witness {
                assert!(dd_evaluate(&dd, &coloring).unwrap());
                let decoded = decode_assignment(&pm, &map, &g, f.num_vars).unwrap();
                assert!(f.eval(&decoded));
            }
            if let Some(assignment) = expected {
                let pm = matching_from_assignment(&f, &map, &g, &assignment).unwrap();
                assert!(check_perfect_matching(&g, pm.edge_ids()).unwrap());
                let coloring = inherited_coloring(&g, &pm).unwrap();
                assert!(dd_evaluate(&dd, &coloring).unwrap());
            }
        }
    }

    #[test]
    fn unsatisfiable_pair_is_rejected() {
        let f = CnfFormula {
            num_vars: 1,
            clauses: vec![[1, 1, 1], [-1, -1, -1]],
        };
        assert!(f.brute_force_satisfiable().is_none());
        let (g, dd, _) = sat3_to_dd(&f).unwrap();
        assert!(!oracle_dd_with_limit(&g, &dd, g.n()).unwrap().satisfiable);
    }
}
