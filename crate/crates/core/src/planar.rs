//! Deterministic planar decision procedure: a Kasteleyn (Pfaffian)
//! orientation makes every matching contribute with the same sign, so legal
//! monomials in the determinant can no longer cancel and a negative answer
//! needs no randomness.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{extract_pm_sym_with, DEFAULT_EXTRACT_ROUNDS};
use crate::graph::{Graph, PerfectMatching};
use crate::matrix::{bareiss_det, build_adapted_tutte, XAssignment};
use crate::pit::{legal_monomials, SolveError, TriStateAnswer};

/// Extraction inside the planar decider is itself randomized; one fixed
/// stream keeps the whole procedure deterministic.
const PLANAR_VERIFY_SEED: u64 = 0x5eed_cafe;

#[derive(Debug, Error, PartialEq)]
pub enum PlanarError {
    #[error("invalid embedding JSON: {0}")]
    Json(String),
    #[error("embedding lists {got} vertices, graph has {expected}")]
    WrongVertexCount { got: usize, expected: usize },
    #[error("rotation at vertex {vertex} does not list its simple neighbors exactly once")]
    RotationMismatch { vertex: usize },
    #[error("face traversal violates Euler's formula on the component of vertex {vertex} (V={v}, E={e}, F={f})")]
    EulerViolation {
        vertex: usize,
        v: usize,
        e: usize,
        f: usize,
    },
    #[error("embedding is not planar: cannot peel faces into a dual tree")]
    NotPlanar,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Combinatorial embedding of the collapsed simple graph: for every vertex,
/// the cyclic order of its neighbors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanarEmbedding {
    pub rotation: Vec<Vec<usize>>,
}

impl PlanarEmbedding {
    pub fn parse(text: &[u8]) -> Result<Self, PlanarError> {
        serde_json::from_slice(text).map_err(|e| PlanarError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("embedding serialization cannot fail")
    }
}

/// Directed edge (u, v) of the simple graph.
type Dart = (usize, usize);

struct Faces {
    /// Face id per dart.
    face_of: BTreeMap<Dart, usize>,
    /// Darts per face, in traversal order.
    faces: Vec<Vec<Dart>>,
}

fn trace_faces(emb: &PlanarEmbedding) -> Result<Faces, PlanarError> {
    let mut next: BTreeMap<Dart, Dart> = BTreeMap::new();
    for (v0, neighbors) in emb.rotation.iter().enumerate() {
        let v = v0 + 1;
        for (i, &u) in neighbors.iter().enumerate() {
            // Dart (u, v) continues to the successor of u around v.
            let w = neighbors[(i + 1) % neighbors.len()];
            next.insert((u, v), (v, w));
        }
    }
    let mut face_of = BTreeMap::new();
    let mut faces = Vec::new();
    for &start in next.keys() {
        if face_of.contains_key(&start) {
            continue;
        }
        let id = faces.len();
        let mut walk = Vec::new();
        let mut dart = start;
        loop {
            face_of.insert(dart, id);
            walk.push(dart);
            dart = next[&dart];
            if dart == start {
                break;
            }
        }
        faces.push(walk);
    }
    Ok(Faces { face_of, faces })
}

fn validate_embedding(g: &Graph, emb: &PlanarEmbedding) -> Result<Faces, PlanarError> {
    if emb.rotation.len() != g.n() {
        return Err(PlanarError::WrongVertexCount {
            got: emb.rotation.len(),
            expected: g.n(),
        });
    }
    let adjacency = g.simple_adjacency();
    for v0 in 0..g.n() {
        let expected: BTreeSet<usize> = adjacency[v0].iter().map(|&w| w + 1).collect();
        let listed: BTreeSet<usize> = emb.rotation[v0].iter().copied().collect();
        if listed != expected || emb.rotation[v0].len() != expected.len() {
            return Err(PlanarError::RotationMismatch { vertex: v0 + 1 });
        }
    }
    let faces = trace_faces(emb)?;

    // Euler per connected component with at least one edge.
    let components = components_of(&adjacency);
    for comp in &components {
        if comp.len() < 2 {
            continue;
        }
        let vset: BTreeSet<usize> = comp.iter().map(|&v0| v0 + 1).collect();
        let e = g
            .edge_pairs()
            .iter()
            .filter(|(a, _)| vset.contains(a))
            .count();
        let f = faces
            .faces
            .iter()
            .filter(|walk| vset.contains(&walk[0].0))
            .count();
        if comp.len() + f != e + 2 {
            return Err(PlanarError::EulerViolation {
                vertex: comp[0] + 1,
                v: comp.len(),
                e,
                f,
            });
        }
    }
    Ok(faces)
}

fn components_of(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Kasteleyn rule applied to a spanning-tree completion: tree edges get an
/// arbitrary direction, then the remaining edges are peeled face by face
/// (leaf-to-root in the dual tree) so that every face except one root face
/// per component has an odd number of darts agreeing with the orientation.
/// Components are handled independently. The returned assignment maps each
/// pair {u, v} with u < v to +1 when the edge is directed u -> v, else -1.
pub fn pfaffian_orientation(g: &Graph, emb: &PlanarEmbedding) -> Result<XAssignment, PlanarError> {
    let faces = validate_embedding(g, emb)?;
    let adjacency = g.simple_adjacency();
    // directed[(a, b)] with a < b: true means a -> b.
    let mut directed: BTreeMap<(usize, usize), bool> = BTreeMap::new();
    let mut tree_edges: BTreeSet<(usize, usize)> = BTreeSet::new();

    for comp in components_of(&adjacency) {
        if comp.len() < 2 {
            continue;
        }
        // BFS spanning tree, edges oriented parent -> child.
        let root = comp.iter().copied().min().unwrap();
        let mut seen: BTreeSet<usize> = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if seen.insert(w) {
                    let (a, b) = (v.min(w) + 1, v.max(w) + 1);
                    tree_edges.insert((a, b));
                    directed.insert((a, b), v < w);
                    queue.push_back(w);
                }
            }
        }

        let comp_vertices: BTreeSet<usize> = comp.iter().map(|&v0| v0 + 1).collect();
        let comp_faces: Vec<usize> = (0..faces.faces.len())
            .filter(|&f| comp_vertices.contains(&faces.faces[f][0].0))
            .collect();
        let root_face = *comp_faces
            .iter()
            .max_by_key(|&&f| (faces.faces[f].len(), std::cmp::Reverse(f)))
            .expect("component with an edge has a face");

        // Dual tree over the component's faces, connected by non-tree edges.
        let mut non_tree: Vec<(usize, usize)> = g
            .edge_pairs()
            .into_iter()
            .filter(|p| comp_vertices.contains(&p.0) && !tree_edges.contains(p))
            .collect();
        non_tree.sort();
        let mut dual_adj: BTreeMap<usize, Vec<(usize, (usize, usize))>> = BTreeMap::new();
        for &(a, b) in &non_tree {
            let f1 = faces.face_of[&(a, b)];
            let f2 = faces.face_of[&(b, a)];
            if f1 == f2 {
                return Err(PlanarError::NotPlanar);
            }
            dual_adj.entry(f1).or_default().push((f2, (a, b)));
            dual_adj.entry(f2).or_default().push((f1, (a, b)));
        }
        let mut order = Vec::new();
        let mut parent_edge: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        let mut visited: BTreeSet<usize> = BTreeSet::from([root_face]);
        let mut queue = VecDeque::from([root_face]);
        while let Some(f) = queue.pop_front() {
            order.push(f);
            for &(f2, pair) in dual_adj.get(&f).into_iter().flatten() {
                if visited.insert(f2) {
                    parent_edge.insert(f2, pair);
                    queue.push_back(f2);
                }
            }
        }
        if order.len() != comp_faces.len() {
            return Err(PlanarError::NotPlanar);
        }

        // Children before parents: when face f is processed, its parent
        // edge is the only undecided edge on its boundary.
        for &f in order.iter().rev() {
            if f == root_face {
                continue;
            }
            let closing = parent_edge[&f];
            let mut agreements = 0usize;
            let mut closing_dart_agrees = None;
            for &(u, v) in &faces.faces[f] {
                let pair = (u.min(v), u.max(v));
                if pair == closing {
                    closing_dart_agrees = Some(u < v);
                    continue;
                }
                let forward = directed[&pair];
                if forward == (u < v) {
                    agreements += 1;
                }
            }
            let dart_forward = closing_dart_agrees.expect("closing edge lies on its face");
            // Orient the closing edge so the face's agreement count is odd.
            let forward = if agreements % 2 == 0 {
                dart_forward
            } else {
                !dart_forward
            };
            directed.insert(closing, forward);
        }
    }

    let mut x = XAssignment::default();
    for ((a, b), forward) in directed {
        x.insert(a, b, if forward { 1 } else { -1 });
    }
    Ok(x)
}

/// Sign of a perfect matching's contribution to the Pfaffian of the adapted
/// Tutte matrix under `x`: the sign of the underlying pair permutation
/// times the entry signs. Used to check that an orientation is Pfaffian.
pub fn matching_term_sign(g: &Graph, x: &XAssignment, pm: &PerfectMatching) -> i8 {
    let mut pairs: Vec<(usize, usize)> = pm
        .edge_ids()
        .iter()
        .map(|&id| {
            let e = &g.edges()[id];
            (e.u.min(e.v), e.u.max(e.v))
        })
        .collect();
    pairs.sort();
    let seq: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    let mut sign: i64 = if inversions % 2 == 0 { 1 } else { -1 };
    for &(a, b) in &pairs {
        // Entry (a, b) with a < b carries coefficient -x_{ab}.
        let xv = x.get(a, b).expect("orientation covers every matched pair");
        sign *= -xv.signum();
    }
    sign as i8
}

/// Deterministic decision on a planar (embedded) graph. No is exact:
/// matching contributions never cancel under a Pfaffian orientation, so a
/// legal matching always leaves its monomial visible. Candidate-yes is
/// still confirmed by extraction before being reported as verified.
pub fn planar_decide_sym(
    g: &Graph,
    emb: &PlanarEmbedding,
    constraint: &crate::constraint::SymmetricConstraint,
) -> Result<TriStateAnswer, PlanarError> {
    let terms = legal_monomials(g, constraint)?;
    if terms.is_empty() {
        return Ok(TriStateAnswer::No);
    }
    let x = pfaffian_orientation(g, emb)?;
    let matrix = build_adapted_tutte(g, &x).expect("orientation covers every pair");
    let det = bareiss_det(&matrix).expect("fraction-free elimination is exact");
    if !terms.iter().any(|m| !det.coeff(m).is_zero()) {
        return Ok(TriStateAnswer::No);
    }
    let found = extract_pm_sym_with(g, constraint, PLANAR_VERIFY_SEED, DEFAULT_EXTRACT_ROUNDS, true)?;
    Ok(match found {
        Some(pm) => TriStateAnswer::YesVerified(pm),
        None => TriStateAnswer::YesUnverified,
    })
}
