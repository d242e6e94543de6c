//! Bi-colored multigraphs, vertex colorings and perfect matchings.
//!
//! Vertices and colors are 1-based; edge ids are 0-based positions in the
//! input edge list, which keeps certificates stable across runs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid graph JSON: {0}")]
    Json(String),
    #[error("graph must have at least one color")]
    NoColors,
    #[error("edge {index}: self-loop at vertex {vertex}")]
    SelfLoop { index: usize, vertex: usize },
    #[error("edge {index}: endpoint {vertex} out of range 1..={n}")]
    EndpointOutOfRange { index: usize, vertex: usize, n: usize },
    #[error("edge {index}: color {color} out of range 1..={d}")]
    ColorOutOfRange { index: usize, color: u32, d: u32 },
    #[error("edge id {0} out of range")]
    BadEdgeId(usize),
    #[error("edge set is not a perfect matching")]
    NotPerfectMatching,
    #[error("coloring covers {got} vertices, graph has {expected}")]
    ColoringLength { got: usize, expected: usize },
}

/// 1-based color index into `1..=d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorId(pub u32);

impl ColorId {
    /// 0-based position, for indexing count vectors and exponent vectors.
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }
}

impl fmt::Display for ColorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An edge carrying one color per endpoint. `color_at_u` belongs to `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BiColoredEdge {
    pub u: usize,
    pub v: usize,
    pub color_at_u: ColorId,
    pub color_at_v: ColorId,
}

impl BiColoredEdge {
    /// Color this edge assigns to vertex `w`, which must be an endpoint.
    pub fn color_at(&self, w: usize) -> ColorId {
        if w == self.u {
            self.color_at_u
        } else {
            debug_assert_eq!(w, self.v);
            self.color_at_v
        }
    }

    pub fn other(&self, w: usize) -> usize {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn is_monochromatic(&self) -> bool {
        self.color_at_u == self.color_at_v
    }
}

/// Undirected multigraph with bi-colored edges. Parallel edges are kept as
/// distinct edges; self-loops are rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    d: u32,
    edges: Vec<BiColoredEdge>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    d: u32,
    edges: Vec<(usize, usize, u32, u32)>,
}

impl Graph {
    pub fn new(n: usize, d: u32, edges: Vec<BiColoredEdge>) -> Result<Self, GraphError> {
        if d == 0 {
            return Err(GraphError::NoColors);
        }
        for (index, e) in edges.iter().enumerate() {
            if e.u == e.v {
                return Err(GraphError::SelfLoop { index, vertex: e.u });
            }
            for vertex in [e.u, e.v] {
                if vertex == 0 || vertex > n {
                    return Err(GraphError::EndpointOutOfRange { index, vertex, n });
                }
            }
            for color in [e.color_at_u, e.color_at_v] {
                if color.0 == 0 || color.0 > d {
                    return Err(GraphError::ColorOutOfRange {
                        index,
                        color: color.0,
                        d,
                    });
                }
            }
        }
        Ok(Graph { n, d, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn edges(&self) -> &[BiColoredEdge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Result<&BiColoredEdge, GraphError> {
        self.edges.get(id).ok_or(GraphError::BadEdgeId(id))
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edge ids incident to each vertex, indexed by vertex - 1.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (id, e) in self.edges.iter().enumerate() {
            inc[e.u - 1].push(id);
            inc[e.v - 1].push(id);
        }
        inc
    }

    /// Distinct unordered endpoint pairs carrying at least one edge.
    pub fn edge_pairs(&self) -> BTreeSet<(usize, usize)> {
        self.edges
            .iter()
            .map(|e| (e.u.min(e.v), e.u.max(e.v)))
            .collect()
    }

    /// Adjacency of the underlying simple graph (parallel edges collapsed,
    /// colors dropped), indexed by vertex - 1.
    pub fn simple_adjacency(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![BTreeSet::new(); self.n];
        for e in &self.edges {
            sets[e.u - 1].insert(e.v - 1);
            sets[e.v - 1].insert(e.u - 1);
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    pub fn to_json(&self) -> String {
        let raw = GraphJson {
            n: self.n,
            d: self.d,
            edges: self
                .edges
                .iter()
                .map(|e| (e.u, e.v, e.color_at_u.0, e.color_at_v.0))
                .collect(),
        };
        serde_json::to_string(&raw).expect("graph serialization cannot fail")
    }
}

/// Parses the wire format `{"n":int,"d":int,"edges":[[u,v,cu,cv],...]}`.
pub fn parse_graph(text: &[u8]) -> Result<Graph, GraphError> {
    let raw: GraphJson =
        serde_json::from_slice(text).map_err(|e| GraphError::Json(e.to_string()))?;
    let edges = raw
        .edges
        .into_iter()
        .map(|(u, v, cu, cv)| BiColoredEdge {
            u,
            v,
            color_at_u: ColorId(cu),
            color_at_v: ColorId(cv),
        })
        .collect();
    Graph::new(raw.n, raw.d, edges)
}

/// Total assignment of a color to every vertex, indexed 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexColoring(pub Vec<ColorId>);

impl VertexColoring {
    pub fn get(&self, vertex: usize) -> ColorId {
        self.0[vertex - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Per-color occurrence counts, indexed by color - 1.
    pub fn counts(&self, d: u32) -> Vec<u32> {
        let mut counts = vec![0u32; d as usize];
        for c in &self.0 {
            counts[c.index()] += 1;
        }
        counts
    }
}

/// A set of edge ids forming a perfect matching; stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PerfectMatching {
    edge_ids: Vec<usize>,
}

impl PerfectMatching {
    pub fn new(mut edge_ids: Vec<usize>) -> Self {
        edge_ids.sort_unstable();
        edge_ids.dedup();
        PerfectMatching { edge_ids }
    }

    pub fn edge_ids(&self) -> &[usize] {
        &self.edge_ids
    }
}

/// True iff the edge set is vertex-disjoint and covers every vertex.
pub fn check_perfect_matching(g: &Graph, edge_ids: &[usize]) -> Result<bool, GraphError> {
    let mut covered = vec![false; g.n()];
    for &id in edge_ids {
        let e = g.edge(id)?;
        if covered[e.u - 1] || covered[e.v - 1] {
            return Ok(false);
        }
        covered[e.u - 1] = true;
        covered[e.v - 1] = true;
    }
    Ok(covered.iter().all(|&c| c))
}

/// The coloring a perfect matching induces: each vertex takes the color its
/// unique matching edge assigns to it.
pub fn inherited_coloring(g: &Graph, p: &PerfectMatching) -> Result<VertexColoring, GraphError> {
    let mut colors = vec![None; g.n()];
    for &id in p.edge_ids() {
        let e = g.edge(id)?;
        for w in [e.u, e.v] {
            if colors[w - 1].replace(e.color_at(w)).is_some() {
                return Err(GraphError::NotPerfectMatching);
            }
        }
    }
    colors
        .into_iter()
        .collect::<Option<Vec<ColorId>>>()
        .map(VertexColoring)
        .ok_or(GraphError::NotPerfectMatching)
}
