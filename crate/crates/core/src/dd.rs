//! Ordered multivalued decision diagrams over vertex colors. Binary DDs are
//! the d = 2 case. Only ordering is guaranteed; reduction to canonical form
//! is out of scope and consumers never assume it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::VertexColoring;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DdError {
    #[error("invalid decision-diagram JSON: {0}")]
    Json(String),
    #[error("dangling node reference {0}")]
    DanglingNode(usize),
    #[error("node {node} is labeled with vertex {vertex}, which is not in the order")]
    VertexNotInOrder { node: usize, vertex: usize },
    #[error("edge from node {parent} to node {child} violates the vertex order")]
    OrderViolation { parent: usize, child: usize },
    #[error("node {node} has {got} children, expected {expected}")]
    BadArity {
        node: usize,
        got: usize,
        expected: usize,
    },
    #[error("diagrams mention overlapping vertex sets")]
    OverlappingVertices,
    #[error("coloring does not cover vertex {0}")]
    VertexNotCovered(usize),
    #[error("coloring assigns color {color} but the diagram has arity {d}")]
    ColorOutOfRange { color: u32, d: usize },
}

/// Target of a decision edge: an internal node or a terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DdRef {
    Node(usize),
    True,
    False,
}

impl Serialize for DdRef {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            DdRef::Node(id) => s.serialize_u64(*id as u64),
            DdRef::True => s.serialize_str("T"),
            DdRef::False => s.serialize_str("F"),
        }
    }
}

impl<'de> Deserialize<'de> for DdRef {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Id(usize),
            Terminal(String),
        }
        match Raw::deserialize(de)? {
            Raw::Id(id) => Ok(DdRef::Node(id)),
            Raw::Terminal(t) if t == "T" => Ok(DdRef::True),
            Raw::Terminal(t) if t == "F" => Ok(DdRef::False),
            Raw::Terminal(t) => Err(D::Error::custom(format!(
                "expected node id, \"T\" or \"F\", got {t:?}"
            ))),
        }
    }
}

/// Internal node: branches on the color of `vertex`, one child per color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdNode {
    pub vertex: usize,
    pub children: Vec<DdRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionDiagram {
    order: Vec<usize>,
    nodes: Vec<DdNode>,
    root: DdRef,
}

#[derive(Serialize, Deserialize)]
struct DdNodeJson {
    id: usize,
    vertex: usize,
    children: Vec<DdRef>,
}

#[derive(Serialize, Deserialize)]
struct DdJson {
    order: Vec<usize>,
    root: DdRef,
    nodes: Vec<DdNodeJson>,
}

impl DecisionDiagram {
    /// Builds and structurally validates a diagram.
    pub fn new(order: Vec<usize>, nodes: Vec<DdNode>, root: DdRef) -> Result<Self, DdError> {
        let dd = DecisionDiagram { order, nodes, root };
        dd.validate()?;
        Ok(dd)
    }

    pub fn constant(value: bool, order: Vec<usize>) -> Self {
        DecisionDiagram {
            order,
            nodes: Vec::new(),
            root: if value { DdRef::True } else { DdRef::False },
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn root(&self) -> DdRef {
        self.root
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[DdNode] {
        &self.nodes
    }

    /// Arity shared by every internal node; `None` for constant diagrams.
    pub fn arity(&self) -> Option<usize> {
        self.nodes.first().map(|n| n.children.len())
    }

    /// Vertices that actually label nodes (the constrained set).
    pub fn mentioned_vertices(&self) -> BTreeSet<usize> {
        self.nodes.iter().map(|n| n.vertex).collect()
    }

    /// Structural checks: no dangling references, uniform arity, every node
    /// vertex present in the order, and every edge strictly descending in
    /// order position (which also forces acyclicity).
    pub fn validate(&self) -> Result<(), DdError> {
        let positions: BTreeMap<usize, usize> = self
            .order
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let arity = self.arity().unwrap_or(0);
        let check_ref = |parent: Option<usize>, r: DdRef| -> Result<(), DdError> {
            if let DdRef::Node(id) = r {
                if id >= self.nodes.len() {
                    return Err(DdError::DanglingNode(id));
                }
                if let Some(p) = parent {
                    let pv = positions[&self.nodes[p].vertex];
                    let cv = positions[&self.nodes[id].vertex];
                    if cv <= pv {
                        return Err(DdError::OrderViolation {
                            parent: p,
                            child: id,
                        });
                    }
                }
            }
            Ok(())
        };
        for (id, node) in self.nodes.iter().enumerate() {
            if !positions.contains_key(&node.vertex) {
                return Err(DdError::VertexNotInOrder {
                    node: id,
                    vertex: node.vertex,
                });
            }
            if node.children.len() != arity {
                return Err(DdError::BadArity {
                    node: id,
                    got: node.children.len(),
                    expected: arity,
                });
            }
        }
        check_ref(None, self.root)?;
        for (id, node) in self.nodes.iter().enumerate() {
            for &child in &node.children {
                check_ref(Some(id), child)?;
            }
        }
        Ok(())
    }

    pub fn parse(text: &[u8]) -> Result<Self, DdError> {
        let raw: DdJson = serde_json::from_slice(text).map_err(|e| DdError::Json(e.to_string()))?;
        // External ids are arbitrary; remap them onto positions.
        let id_map: BTreeMap<usize, usize> = raw
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id, i))
            .collect();
        if id_map.len() != raw.nodes.len() {
            return Err(DdError::Json("duplicate node id".into()));
        }
        let remap = |r: DdRef| -> Result<DdRef, DdError> {
            match r {
                DdRef::Node(id) => id_map
                    .get(&id)
                    .map(|&i| DdRef::Node(i))
                    .ok_or(DdError::DanglingNode(id)),
                t => Ok(t),
            }
        };
        let mut nodes = Vec::with_capacity(raw.nodes.len());
        for n in &raw.nodes {
            nodes.push(DdNode {
                vertex: n.vertex,
                children: n
                    .children
                    .iter()
                    .map(|&c| remap(c))
                    .collect::<Result<_, _>>()?,
            });
        }
        DecisionDiagram::new(raw.order, nodes, remap(raw.root)?)
    }

    pub fn to_json(&self) -> String {
        let raw = DdJson {
            order: self.order.clone(),
            root: self.root,
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, n)| DdNodeJson {
                    id,
                    vertex: n.vertex,
                    children: n.children.clone(),
                })
                .collect(),
        };
        serde_json::to_string(&raw).expect("diagram serialization cannot fail")
    }
}

impl fmt::Display for DecisionDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dd({} nodes, order {:?})", self.nodes.len(), self.order)
    }
}

/// Walks from the root following `c(v)` at every node; vertices absent from
/// the traversed path are unconstrained.
pub fn dd_evaluate(dd: &DecisionDiagram, c: &VertexColoring) -> Result<bool, DdError> {
    let mut current = dd.root();
    loop {
        match current {
            DdRef::True => return Ok(true),
            DdRef::False => return Ok(false),
            DdRef::Node(id) => {
                let node = dd.nodes.get(id).ok_or(DdError::DanglingNode(id))?;
                if node.vertex == 0 || node.vertex > c.len() {
                    return Err(DdError::VertexNotCovered(node.vertex));
                }
                let color = c.get(node.vertex);
                let slot = color.index();
                if slot >= node.children.len() {
                    return Err(DdError::ColorOutOfRange {
                        color: color.0,
                        d: node.children.len(),
                    });
                }
                current = node.children[slot];
            }
        }
    }
}

/// Whether some total coloring extending the partial one (indexed by
/// vertex - 1, `None` = unassigned) can reach the True terminal. Sound and
/// complete for ordered diagrams, since no vertex repeats along a path.
pub fn dd_satisfiable_under(dd: &DecisionDiagram, partial: &[Option<u32>]) -> bool {
    fn walk(dd: &DecisionDiagram, partial: &[Option<u32>], r: DdRef, memo: &mut [Option<bool>]) -> bool {
        match r {
            DdRef::True => true,
            DdRef::False => false,
            DdRef::Node(id) => {
                if let Some(hit) = memo[id] {
                    return hit;
                }
                let node = &dd.nodes[id];
                let assigned = partial.get(node.vertex - 1).copied().flatten();
                let result = match assigned {
                    Some(color) => {
                        let slot = (color - 1) as usize;
                        slot < node.children.len()
                            && walk(dd, partial, node.children[slot], memo)
                    }
                    None => node
                        .children
                        .iter()
                        .any(|&child| walk(dd, partial, child, memo)),
                };
                memo[id] = Some(result);
                result
            }
        }
    }
    let mut memo = vec![None; dd.nodes.len()];
    walk(dd, partial, dd.root(), &mut memo)
}

/// Diagram accepting exactly the colorings where all listed vertices share a
/// single color. Node count is 1 + d*(|vertices| - 1), within d*|vertices| + 2.
pub fn dd_all_equal(
    vertices: &BTreeSet<usize>,
    d: usize,
    order: &[usize],
) -> Result<DecisionDiagram, DdError> {
    let positions: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut sorted: Vec<usize> = Vec::with_capacity(vertices.len());
    for &v in vertices {
        if !positions.contains_key(&v) {
            return Err(DdError::VertexNotInOrder { node: 0, vertex: v });
        }
        sorted.push(v);
    }
    sorted.sort_by_key(|v| positions[v]);

    if sorted.is_empty() {
        return Ok(DecisionDiagram::constant(true, order.to_vec()));
    }

    let mut nodes = Vec::new();
    if sorted.len() == 1 {
        nodes.push(DdNode {
            vertex: sorted[0],
            children: vec![DdRef::True; d],
        });
        return DecisionDiagram::new(order.to_vec(), nodes, DdRef::Node(0));
    }

    // One chain per color checking the remaining vertices, linked backwards.
    let mut root_children = Vec::with_capacity(d);
    for color in 0..d {
        let mut next = DdRef::True;
        for &v in sorted[1..].iter().rev() {
            let mut children = vec![DdRef::False; d];
            children[color] = next;
            nodes.push(DdNode {
                vertex: v,
                children,
            });
            next = DdRef::Node(nodes.len() - 1);
        }
        root_children.push(next);
    }
    nodes.push(DdNode {
        vertex: sorted[0],
        children: root_children,
    });
    let root = DdRef::Node(nodes.len() - 1);
    DecisionDiagram::new(order.to_vec(), nodes, root)
}

/// Conjunction of diagrams over disjoint vertex sets, done by substituting
/// the True terminal of `a` with the root of `b`.
pub fn dd_conjoin_disjoint(
    a: &DecisionDiagram,
    b: &DecisionDiagram,
) -> Result<DecisionDiagram, DdError> {
    if !a.mentioned_vertices().is_disjoint(&b.mentioned_vertices()) {
        return Err(DdError::OverlappingVertices);
    }
    let mut order = a.order.clone();
    let seen: BTreeSet<usize> = order.iter().copied().collect();
    order.extend(b.order.iter().filter(|v| !seen.contains(v)));

    let offset = a.nodes.len();
    let remap_b = |r: DdRef| match r {
        DdRef::Node(id) => DdRef::Node(id + offset),
        t => t,
    };
    let b_root = remap_b(b.root);
    let remap_a = |r: DdRef| match r {
        DdRef::True => b_root,
        t => t,
    };

    let mut nodes: Vec<DdNode> = a
        .nodes
        .iter()
        .map(|n| DdNode {
            vertex: n.vertex,
            children: n.children.iter().map(|&c| remap_a(c)).collect(),
        })
        .collect();
    nodes.extend(b.nodes.iter().map(|n| DdNode {
        vertex: n.vertex,
        children: n.children.iter().map(|&c| remap_b(c)).collect(),
    }));
    let root = match a.root {
        DdRef::True => b_root,
        other => other,
    };
    DecisionDiagram::new(order, nodes, root)
}
