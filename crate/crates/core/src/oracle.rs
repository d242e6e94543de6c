//! Exhaustive ground truth on desk-size instances: perfect-matching
//! enumeration, exact decisions for both constraint flavors, and a
//! cofactor-expansion determinant used to cross-check elimination.

use thiserror::Error;

use crate::constraint::{sym_eval, ConstraintError, CountVector, SymmetricConstraint};
use crate::dd::{dd_satisfiable_under, DdError, DecisionDiagram};
use crate::graph::{inherited_coloring, Graph, GraphError, PerfectMatching, VertexColoring};
use crate::matrix::{AlgebraError, PolyMatrix};
use crate::poly::{poly_mul, Polynomial};

/// Largest vertex count the plain enumerators accept unless overridden.
pub const DEFAULT_ENUM_LIMIT: usize = 14;

/// Largest dimension cofactor expansion accepts.
pub const NAIVE_DET_LIMIT: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {n} vertices, oracle limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("matrix dimension {n} exceeds cofactor limit {limit}")]
    DimensionExceeded { n: usize, limit: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Dd(#[from] DdError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Exact decision plus the first witness found, when one exists.
#[derive(Debug, Clone)]
pub struct OracleAnswer {
    pub satisfiable: bool,
    pub witness: Option<(PerfectMatching, VertexColoring)>,
}

/// Every perfect matching of `g`, paired with its inherited coloring, in
/// ascending lexicographic order of sorted edge-id sets. The empty graph
/// (n = 0) has exactly the empty matching.
pub fn enumerate_pms(g: &Graph) -> Result<Vec<(PerfectMatching, VertexColoring)>, OracleError> {
    enumerate_pms_with_limit(g, DEFAULT_ENUM_LIMIT)
}

pub fn enumerate_pms_with_limit(
    g: &Graph,
    limit: usize,
) -> Result<Vec<(PerfectMatching, VertexColoring)>, OracleError> {
    if g.n() > limit {
        return Err(OracleError::TooLarge { n: g.n(), limit });
    }
    let incidence = g.incidence();
    let mut covered = vec![false; g.n()];
    let mut chosen = Vec::new();
    let mut out = Vec::new();
    branch(g, &incidence, &mut covered, &mut chosen, &mut out);
    let mut out: Vec<(PerfectMatching, VertexColoring)> = out
        .into_iter()
        .map(|pm| {
            let coloring = inherited_coloring(g, &pm).expect("enumerated set is a matching");
            (pm, coloring)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Branches on the smallest uncovered vertex, trying its incident edges in
/// id order; each matching is produced exactly once.
fn branch(
    g: &Graph,
    incidence: &[Vec<usize>],
    covered: &mut [bool],
    chosen: &mut Vec<usize>,
    out: &mut Vec<PerfectMatching>,
) {
    let Some(v0) = covered.iter().position(|&c| !c) else {
        out.push(PerfectMatching::new(chosen.clone()));
        return;
    };
    let v = v0 + 1;
    for &id in &incidence[v0] {
        let e = &g.edges()[id];
        let w = e.other(v);
        if covered[w - 1] {
            continue;
        }
        covered[v - 1] = true;
        covered[w - 1] = true;
        chosen.push(id);
        branch(g, incidence, covered, chosen, out);
        chosen.pop();
        covered[v - 1] = false;
        covered[w - 1] = false;
    }
}

/// Exhaustive decision for symmetric constraints.
pub fn oracle_sym(
    g: &Graph,
    constraint: &SymmetricConstraint,
) -> Result<OracleAnswer, OracleError> {
    oracle_sym_with_limit(g, constraint, DEFAULT_ENUM_LIMIT)
}

pub fn oracle_sym_with_limit(
    g: &Graph,
    constraint: &SymmetricConstraint,
    limit: usize,
) -> Result<OracleAnswer, OracleError> {
    constraint.validate(g.d())?;
    for (pm, coloring) in enumerate_pms_with_limit(g, limit)? {
        let counts = CountVector(coloring.counts(g.d()));
        if sym_eval(constraint, &counts)? {
            return Ok(OracleAnswer {
                satisfiable: true,
                witness: Some((pm, coloring)),
            });
        }
    }
    Ok(OracleAnswer {
        satisfiable: false,
        witness: None,
    })
}

/// Exhaustive decision for decision-diagram constraints.
///
/// The search walks the same smallest-uncovered-vertex recursion as
/// [`enumerate_pms`] but prunes any branch whose partial inherited coloring
/// already rules out every extension of the diagram reaching True. The
/// prune is sound, so the result equals filtering the full enumeration;
/// without it, the gadget graphs from the 3-SAT reduction (24 matchings per
/// clause component) would be out of reach.
pub fn oracle_dd(g: &Graph, dd: &DecisionDiagram) -> Result<OracleAnswer, OracleError> {
    oracle_dd_with_limit(g, dd, DEFAULT_ENUM_LIMIT)
}

pub fn oracle_dd_with_limit(
    g: &Graph,
    dd: &DecisionDiagram,
    limit: usize,
) -> Result<OracleAnswer, OracleError> {
    if g.n() > limit {
        return Err(OracleError::TooLarge { n: g.n(), limit });
    }
    if let Some(&v) = dd.mentioned_vertices().iter().find(|&&v| v == 0 || v > g.n()) {
        return Err(OracleError::Dd(DdError::VertexNotCovered(v)));
    }
    let incidence = g.incidence();
    let mut covered = vec![false; g.n()];
    let mut partial: Vec<Option<u32>> = vec![None; g.n()];
    let mut chosen = Vec::new();
    let witness = dd_branch(g, dd, &incidence, &mut covered, &mut partial, &mut chosen);
    match witness {
        Some(pm) => {
            let coloring = inherited_coloring(g, &pm)?;
            Ok(OracleAnswer {
                satisfiable: true,
                witness: Some((pm, coloring)),
            })
        }
        None => Ok(OracleAnswer {
            satisfiable: false,
            witness: None,
        }),
    }
}

fn dd_branch(
    g: &Graph,
    dd: &DecisionDiagram,
    incidence: &[Vec<usize>],
    covered: &mut [bool],
    partial: &mut [Option<u32>],
    chosen: &mut Vec<usize>,
) -> Option<PerfectMatching> {
    if !dd_satisfiable_under(dd, partial) {
        return None;
    }
    let Some(v0) = covered.iter().position(|&c| !c) else {
        return Some(PerfectMatching::new(chosen.clone()));
    };
    let v = v0 + 1;
    for &id in &incidence[v0] {
        let e = &g.edges()[id];
        let w = e.other(v);
        if covered[w - 1] {
            continue;
        }
        covered[v - 1] = true;
        covered[w - 1] = true;
        partial[v - 1] = Some(e.color_at(v).0);
        partial[w - 1] = Some(e.color_at(w).0);
        chosen.push(id);
        if let Some(pm) = dd_branch(g, dd, incidence, covered, partial, chosen) {
            return Some(pm);
        }
        chosen.pop();
        covered[v - 1] = false;
        covered[w - 1] = false;
        partial[v - 1] = None;
        partial[w - 1] = None;
    }
    None
}

/// Cofactor-expansion determinant; the independent cross-check for
/// [`crate::matrix::bareiss_det`]. Exponential, hence the dimension cap.
pub fn naive_det(m: &PolyMatrix) -> Result<Polynomial, OracleError> {
    if m.n() > NAIVE_DET_LIMIT {
        return Err(OracleError::DimensionExceeded {
            n: m.n(),
            limit: NAIVE_DET_LIMIT,
        });
    }
    Ok(expand(m))
}

fn expand(m: &PolyMatrix) -> Polynomial {
    let n = m.n();
    if n == 0 {
        return Polynomial::one(m.d());
    }
    if n == 1 {
        return m.get(0, 0).clone();
    }
    let mut det = Polynomial::zero(m.d());
    for col in 0..n {
        let entry = m.get(0, col);
        if entry.is_zero() {
            continue;
        }
        let sub = expand(&m.minor(0, col));
        let term = poly_mul(entry, &sub);
        det = if col % 2 == 0 {
            det.add(&term)
        } else {
            det.sub(&term)
        };
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::trivially_true;
    use crate::dd::DdRef;
    use crate::graph::{check_perfect_matching, parse_graph};
    use crate::matching::blossom_has_pm;
    use crate::matrix::bareiss_det;
    use crate::poly::Monomial;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};

    fn g(text: &str) -> Graph {
        parse_graph(text.as_bytes()).unwrap()
    }

    #[test]
    fn counts_on_fixtures() {
        let k2 = g(r#"{"n":2,"d":1,"edges":[[1,2,1,1]]}"#);
        assert_eq!(enumerate_pms(&k2).unwrap().len(), 1);

        let c4 = g(
            r#"{"n":4,"d":1,"edges":[[1,2,1,1],[2,3,1,1],[3,4,1,1],[4,1,1,1]]}"#,
        );
        assert_eq!(enumerate_pms(&c4).unwrap().len(), 2);

        let k4 = g(
            r#"{"n":4,"d":1,"edges":[[1,2,1,1],[1,3,1,1],[1,4,1,1],[2,3,1,1],[2,4,1,1],[3,4,1,1]]}"#,
        );
        assert_eq!(enumerate_pms(&k4).unwrap().len(), 3);
    }

    #[test]
    fn empty_graph_conventions() {
        let isolated = g(r#"{"n":2,"d":1,"edges":[]}"#);
        assert!(enumerate_pms(&isolated).unwrap().is_empty());
        let empty = g(r#"{"n":0,"d":1,"edges":[]}"#);
        assert_eq!(enumerate_pms(&empty).unwrap().len(), 1);
    }

    #[test]
    fn limit_is_enforced() {
        let big = g(r#"{"n":16,"d":1,"edges":[]}"#);
        assert!(matches!(
            enumerate_pms(&big),
            Err(OracleError::TooLarge { n: 16, limit: 14 })
        ));
        assert!(enumerate_pms_with_limit(&big, 16).is_ok());
    }

    #[test]
    fn all_witnesses_verify() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let n = rng.gen_range(2..=8);
            let mut edges = Vec::new();
            for _ in 0..rng.gen_range(1..=10) {
                let u = rng.gen_range(1..=n);
                let mut v = rng.gen_range(1..=n);
                while v == u {
                    v = rng.gen_range(1..=n);
                }
                edges.push(format!("[{},{},{},{}]", u, v, rng.gen_range(1..=2), rng.gen_range(1..=2)));
            }
            let graph = g(&format!(
                r#"{{"n":{},"d":2,"edges":[{}]}}"#,
                n,
                edges.join(",")
            ));
            for (pm, coloring) in enumerate_pms(&graph).unwrap() {
                assert!(check_perfect_matching(&graph, pm.edge_ids()).unwrap());
                assert_eq!(coloring.len(), graph.n());
            }
            // Trivially-true constraint agrees with the blossom decision.
            let answer = oracle_sym(&graph, &trivially_true()).unwrap();
            assert_eq!(answer.satisfiable, blossom_has_pm(&graph));
        }
    }

    #[test]
    fn sym_oracle_on_fixtures() {
        let k2_red = g(r#"{"n":2,"d":2,"edges":[[1,2,1,1]]}"#);
        let red2 = SymmetricConstraint::CountEq { color: 1, k: 2 };
        let blue2 = SymmetricConstraint::CountEq { color: 2, k: 2 };
        assert!(oracle_sym(&k2_red, &red2).unwrap().satisfiable);
        assert!(!oracle_sym(&k2_red, &blue2).unwrap().satisfiable);

        // Alternating 4-cycle: profiles are (4,0) and (0,4), never (2,2).
        let c4 = g(
            r#"{"n":4,"d":2,"edges":[[1,2,1,1],[2,3,2,2],[3,4,1,1],[4,1,2,2]]}"#,
        );
        let mixed = SymmetricConstraint::CountEq { color: 1, k: 2 };
        assert!(!oracle_sym(&c4, &mixed).unwrap().satisfiable);
        let all_red = SymmetricConstraint::CountEq { color: 1, k: 4 };
        let answer = oracle_sym(&c4, &all_red).unwrap();
        assert_eq!(answer.witness.unwrap().0.edge_ids(), &[0, 2]);
    }

    #[test]
    fn dd_oracle_on_fixtures() {
        let k2_red = g(r#"{"n":2,"d":2,"edges":[[1,2,1,1]]}"#);
        let accept = DecisionDiagram::constant(true, vec![]);
        let reject = DecisionDiagram::constant(false, vec![]);
        assert!(oracle_dd(&k2_red, &accept).unwrap().satisfiable);
        assert!(!oracle_dd(&k2_red, &reject).unwrap().satisfiable);
    }

    #[test]
    fn dd_oracle_matches_filtered_enumeration() {
        use crate::dd::dd_all_equal;
        use std::collections::BTreeSet;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..60 {
            let n = rng.gen_range(2..=8);
            let mut edges = Vec::new();
            for _ in 0..rng.gen_range(1..=12) {
                let u = rng.gen_range(1..=n);
                let mut v = rng.gen_range(1..=n);
                while v == u {
                    v = rng.gen_range(1..=n);
                }
                edges.push(format!("[{},{},{},{}]", u, v, rng.gen_range(1..=2), rng.gen_range(1..=2)));
            }
            let graph = g(&format!(
                r#"{{"n":{},"d":2,"edges":[{}]}}"#,
                n,
                edges.join(",")
            ));
            let k = rng.gen_range(1..=n);
            let vertices: BTreeSet<usize> = (1..=k).collect();
            let order: Vec<usize> = (1..=n).collect();
            let dd = dd_all_equal(&vertices, 2, &order).unwrap();
            let fast = oracle_dd(&graph, &dd).unwrap().satisfiable;
            let slow = enumerate_pms(&graph).unwrap().iter().any(|(_, c)| {
                crate::dd::dd_evaluate(&dd, c).unwrap()
            });
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn dd_oracle_rejects_unknown_vertices() {
        let k2 = g(r#"{"n":2,"d":2,"edges":[[1,2,1,1]]}"#);
        let dd = DecisionDiagram::new(
            vec![5],
            vec![crate::dd::DdNode {
                vertex: 5,
                children: vec![DdRef::True, DdRef::False],
            }],
            DdRef::Node(0),
        )
        .unwrap();
        assert!(oracle_dd(&k2, &dd).is_err());
    }

    #[test]
    fn naive_det_base_cases() {
        let d = 2;
        let p = Polynomial::from_term(Monomial(vec![1, 1]), BigInt::from(3));
        let mut m1 = PolyMatrix::zero(1, d);
        m1.set(0, 0, p.clone());
        assert_eq!(naive_det(&m1).unwrap(), p);

        let q = Polynomial::from_term(Monomial(vec![2, 0]), BigInt::from(1));
        let mut m2 = PolyMatrix::zero(2, d);
        m2.set(0, 1, q.clone());
        m2.set(1, 0, q.neg());
        assert_eq!(naive_det(&m2).unwrap(), poly_mul(&q, &q));

        assert!(naive_det(&PolyMatrix::zero(9, 1)).is_err());
    }

    #[test]
    fn naive_det_matches_bareiss_on_random_matrices() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let n = rng.gen_range(1..=5);
            let d = rng.gen_range(1..=3);
            let mut m = PolyMatrix::zero(n, d);
            for i in 0..n {
                for j in 0..n {
                    let mut p = Polynomial::zero(d);
                    for _ in 0..rng.gen_range(0..3) {
                        let mono = Monomial((0..d).map(|_| rng.gen_range(0..3)).collect());
                        p.add_term(mono, BigInt::from(rng.gen_range(-4i64..=4)));
                    }
                    m.set(i, j, p);
                }
            }
            assert_eq!(naive_det(&m).unwrap(), bareiss_det(&m).unwrap());
        }
    }
}
