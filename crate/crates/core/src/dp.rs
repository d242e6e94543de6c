//! Exact dynamic program for symmetric constraints over a nice tree
//! decomposition, with witness reconstruction from predecessor records.
//!
//! States are (bag coloring, color-count vector) pairs per node: the bag
//! coloring maps each bag vertex to 0 (not yet matched) or its inherited
//! color, and the count vector tallies inherited colors over the whole
//! subtree. Tables are sparse; only reachable states are stored.
//!
//! At a join node the two children certify vertex-disjoint partial
//! matchings, so a bag vertex may be matched on at most one side: states
//! combine exactly when no bag position is colored in both children, and
//! the count vectors add. (Summing identical bag colorings on both sides
//! would double-match bag vertices and reject valid matchings, e.g. on a
//! 4-path joined at its middle edge.)

use std::collections::BTreeMap;

use thiserror::Error;

use crate::constraint::{sym_eval, ConstraintError, CountVector, SymmetricConstraint};
use crate::graph::{
    check_perfect_matching, inherited_coloring, Graph, GraphError, PerfectMatching,
};
use crate::treewidth::{NiceTreeDecomposition, NodeKind, TdError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DpError {
    #[error(transparent)]
    Td(#[from] TdError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("reconstructed witness failed re-verification")]
    BadWitness,
}

#[derive(Debug, Clone)]
pub struct DpOutcome {
    pub satisfiable: bool,
    pub witness: Option<PerfectMatching>,
}

/// Bag coloring (by sorted bag position, 0 = unmatched) plus subtree color
/// counts; the sparse table key.
type StateKey = (Vec<u8>, Vec<u32>);

/// How a true state arose; enough to rebuild a matching downward.
#[derive(Debug, Clone)]
enum Step {
    Leaf,
    Copy {
        child: StateKey,
    },
    Match {
        child: StateKey,
        edge: usize,
    },
    Forget {
        child: StateKey,
    },
    Join {
        left: StateKey,
        right: StateKey,
    },
}

type Table = BTreeMap<StateKey, Step>;

/// Decides whether `g` has a perfect matching whose inherited coloring
/// satisfies `constraint`, and reconstructs a certificate when it does.
pub fn dp_solve_sym(
    g: &Graph,
    constraint: &SymmetricConstraint,
    ntd: &NiceTreeDecomposition,
) -> Result<DpOutcome, DpError> {
    constraint.validate(g.d())?;
    let d = g.d() as usize;
    if g.n() == 0 {
        let empty = CountVector(vec![0; d]);
        let satisfiable = sym_eval(constraint, &empty)?;
        return Ok(DpOutcome {
            satisfiable,
            witness: satisfiable.then(|| PerfectMatching::new(vec![])),
        });
    }
    ntd.check_structure(g)?;

    // Edges between two vertices, keyed by unordered pair; used when an
    // introduced vertex is matched against a bag member.
    let mut pair_edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (id, e) in g.edges().iter().enumerate() {
        pair_edges
            .entry((e.u.min(e.v), e.u.max(e.v)))
            .or_default()
            .push(id);
    }

    let bags: Vec<Vec<usize>> = ntd
        .nodes
        .iter()
        .map(|n| n.bag.iter().copied().collect())
        .collect();
    let mut tables: Vec<Table> = vec![Table::new(); ntd.nodes.len()];

    for x in ntd.post_order() {
        let node = &ntd.nodes[x];
        let mut table = Table::new();
        match node.kind {
            NodeKind::Leaf => {
                table.insert((vec![0], vec![0; d]), Step::Leaf);
            }
            NodeKind::Introduce(v) => {
                let child = node.children[0];
                let pos = bags[x].binary_search(&v).expect("introduced vertex is in bag");
                for (key, _) in tables[child].iter() {
                    let (child_coloring, child_counts) = key;
                    // Unmatched: v enters with color 0.
                    let mut coloring = child_coloring.clone();
                    coloring.insert(pos, 0);
                    table
                        .entry((coloring, child_counts.clone()))
                        .or_insert_with(|| Step::Copy { child: key.clone() });
                    // Matched: v pairs with an unmatched bag member along
                    // an edge; both endpoint colors enter the counts.
                    for (upos, &u) in bags[child].iter().enumerate() {
                        if child_coloring[upos] != 0 {
                            continue;
                        }
                        let pair = (u.min(v), u.max(v));
                        let Some(ids) = pair_edges.get(&pair) else {
                            continue;
                        };
                        for &id in ids {
                            let e = &g.edges()[id];
                            let cu = e.color_at(u);
                            let cv = e.color_at(v);
                            let mut coloring = child_coloring.clone();
                            coloring[upos] = cu.0 as u8;
                            coloring.insert(pos, cv.0 as u8);
                            let mut counts = child_counts.clone();
                            counts[cu.index()] += 1;
                            counts[cv.index()] += 1;
                            table.entry((coloring, counts)).or_insert_with(|| Step::Match {
                                child: key.clone(),
                                edge: id,
                            });
                        }
                    }
                }
            }
            NodeKind::Forget(v) => {
                let child = node.children[0];
                let pos = bags[child]
                    .binary_search(&v)
                    .expect("forgotten vertex is in child bag");
                for (key, _) in tables[child].iter() {
                    let (child_coloring, child_counts) = key;
                    // A forgotten vertex must already be matched.
                    if child_coloring[pos] == 0 {
                        continue;
                    }
                    let mut coloring = child_coloring.clone();
                    coloring.remove(pos);
                    table
                        .entry((coloring, child_counts.clone()))
                        .or_insert_with(|| Step::Forget { child: key.clone() });
                }
            }
            NodeKind::Join => {
                let (left, right) = (node.children[0], node.children[1]);
                for (lkey, _) in tables[left].iter() {
                    'rights: for (rkey, _) in tables[right].iter() {
                        let mut coloring = Vec::with_capacity(lkey.0.len());
                        for (&cl, &cr) in lkey.0.iter().zip(rkey.0.iter()) {
                            match (cl, cr) {
                                (0, c) | (c, 0) => coloring.push(c),
                                _ => continue 'rights,
                            }
                        }
                        let counts: Vec<u32> = lkey
                            .1
                            .iter()
                            .zip(rkey.1.iter())
                            .map(|(a, b)| a + b)
                            .collect();
                        table.entry((coloring, counts)).or_insert_with(|| Step::Join {
                            left: lkey.clone(),
                            right: rkey.clone(),
                        });
                    }
                }
            }
        }
        tables[x] = table;
    }

    // Accept on a root state with a fully matched bag and a legal count
    // vector covering all n vertices.
    let n = g.n() as u32;
    let mut accepted: Option<StateKey> = None;
    for (key, _) in tables[ntd.root].iter() {
        if key.0.iter().any(|&c| c == 0) {
            continue;
        }
        if key.1.iter().sum::<u32>() != n {
            continue;
        }
        if sym_eval(constraint, &CountVector(key.1.clone()))? {
            accepted = Some(key.clone());
            break;
        }
    }
    let Some(root_key) = accepted else {
        return Ok(DpOutcome {
            satisfiable: false,
            witness: None,
        });
    };

    // Rebuild the matching from the predecessor records.
    let mut edges = Vec::new();
    let mut stack = vec![(ntd.root, root_key)];
    while let Some((x, key)) = stack.pop() {
        match tables[x].get(&key).expect("recorded state exists") {
            Step::Leaf => {}
            Step::Copy { child } | Step::Forget { child } => {
                stack.push((ntd.nodes[x].children[0], child.clone()));
            }
            Step::Match { child, edge } => {
                edges.push(*edge);
                stack.push((ntd.nodes[x].children[0], child.clone()));
            }
            Step::Join { left, right } => {
                stack.push((ntd.nodes[x].children[0], left.clone()));
                stack.push((ntd.nodes[x].children[1], right.clone()));
            }
        }
    }
    let pm = PerfectMatching::new(edges);
    if !check_perfect_matching(g, pm.edge_ids())? {
        return Err(DpError::BadWitness);
    }
    let counts = CountVector(inherited_coloring(g, &pm)?.counts(g.d()));
    if !sym_eval(constraint, &counts)? {
        return Err(DpError::BadWitness);
    }
    Ok(DpOutcome {
        satisfiable: true,
        witness: Some(pm),
    })
}
