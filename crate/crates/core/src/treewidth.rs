//! Tree decompositions: validation, a min-degree elimination heuristic, and
//! conversion to nice form (Leaf / Introduce / Forget / Join nodes).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TdError {
    #[error("invalid tree-decomposition JSON: {0}")]
    Json(String),
    #[error("decomposition is invalid: {0}")]
    Invalid(String),
    #[error("decomposition has no nonempty bag")]
    EmptyDecomposition,
}

/// Rooted tree of bags over graph vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<BTreeSet<usize>>,
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
}

#[derive(Serialize, Deserialize)]
struct TdNodeJson {
    id: usize,
    bag: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct TdJson {
    root: usize,
    nodes: Vec<TdNodeJson>,
    edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn parse(text: &[u8]) -> Result<Self, TdError> {
        let raw: TdJson = serde_json::from_slice(text).map_err(|e| TdError::Json(e.to_string()))?;
        let id_map: BTreeMap<usize, usize> = raw
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id, i))
            .collect();
        if id_map.len() != raw.nodes.len() {
            return Err(TdError::Json("duplicate node id".into()));
        }
        let lookup = |id: usize| -> Result<usize, TdError> {
            id_map
                .get(&id)
                .copied()
                .ok_or_else(|| TdError::Json(format!("unknown node id {id}")))
        };
        Ok(TreeDecomposition {
            bags: raw
                .nodes
                .iter()
                .map(|n| n.bag.iter().copied().collect())
                .collect(),
            edges: raw
                .edges
                .iter()
                .map(|&(a, b)| Ok((lookup(a)?, lookup(b)?)))
                .collect::<Result<_, TdError>>()?,
            root: lookup(raw.root)?,
        })
    }

    pub fn to_json(&self) -> String {
        let raw = TdJson {
            root: self.root,
            nodes: self
                .bags
                .iter()
                .enumerate()
                .map(|(id, bag)| TdNodeJson {
                    id,
                    bag: bag.iter().copied().collect(),
                })
                .collect(),
            edges: self.edges.clone(),
        };
        serde_json::to_string(&raw).expect("decomposition serialization cannot fail")
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// Result of validating a decomposition against a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TdReport {
    pub valid: bool,
    pub width: usize,
    pub violation: Option<String>,
}

/// Checks tree shape, vertex and edge coverage, and connectivity of each
/// vertex's occurrence set; reports the first violation found.
pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> TdReport {
    let fail = |msg: String| TdReport {
        valid: false,
        width: td.width(),
        violation: Some(msg),
    };
    let k = td.bags.len();
    if k == 0 {
        return fail("decomposition has no nodes".into());
    }
    if td.root >= k {
        return fail(format!("root {} out of range", td.root));
    }
    for &(a, b) in &td.edges {
        if a >= k || b >= k {
            return fail(format!("tree edge ({a}, {b}) out of range"));
        }
    }
    if td.edges.len() != k - 1 {
        return fail(format!(
            "tree must have {} edges, found {}",
            k - 1,
            td.edges.len()
        ));
    }
    let adj = td.adjacency();
    let mut seen = vec![false; k];
    let mut queue = VecDeque::from([td.root]);
    seen[td.root] = true;
    let mut reached = 1;
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                reached += 1;
                queue.push_back(y);
            }
        }
    }
    if reached != k {
        return fail("tree is disconnected".into());
    }
    for bag in &td.bags {
        if let Some(&v) = bag.iter().find(|&&v| v == 0 || v > g.n()) {
            return fail(format!("bag vertex {v} out of range"));
        }
    }
    for v in 1..=g.n() {
        let holders: Vec<usize> = (0..k).filter(|&i| td.bags[i].contains(&v)).collect();
        if holders.is_empty() {
            return fail(format!("vertex {v} appears in no bag"));
        }
        // Occurrence set must induce a connected subtree.
        let inside: BTreeSet<usize> = holders.iter().copied().collect();
        let mut seen = BTreeSet::from([holders[0]]);
        let mut queue = VecDeque::from([holders[0]]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if inside.contains(&y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        if seen.len() != holders.len() {
            return fail(format!("occurrences of vertex {v} are disconnected"));
        }
    }
    for e in g.edges() {
        if !td
            .bags
            .iter()
            .any(|bag| bag.contains(&e.u) && bag.contains(&e.v))
        {
            return fail(format!("edge {{{}, {}}} not covered by any bag", e.u, e.v));
        }
    }
    TdReport {
        valid: true,
        width: td.width(),
        violation: None,
    }
}

/// Valid decomposition from a min-degree elimination ordering. Width is a
/// heuristic upper bound, not the treewidth.
pub fn heuristic_td(g: &Graph) -> TreeDecomposition {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition {
            bags: vec![BTreeSet::new()],
            edges: vec![],
            root: 0,
        };
    }
    let mut adj: Vec<BTreeSet<usize>> = g
        .simple_adjacency()
        .into_iter()
        .map(|row| row.into_iter().map(|w| w + 1).collect())
        .collect();
    let mut alive: BTreeSet<usize> = (1..=n).collect();
    let mut bags: Vec<BTreeSet<usize>> = Vec::with_capacity(n);
    let mut position = vec![usize::MAX; n + 1];

    for step in 0..n {
        let &v = alive
            .iter()
            .min_by_key(|&&v| (adj[v - 1].len(), v))
            .expect("alive set is nonempty");
        position[v] = step;
        let neighbors: Vec<usize> = adj[v - 1].iter().copied().collect();
        let mut bag: BTreeSet<usize> = neighbors.iter().copied().collect();
        bag.insert(v);
        bags.push(bag);
        // Eliminate: clique the neighborhood, then drop v.
        for (i, &a) in neighbors.iter().enumerate() {
            for &b in &neighbors[i + 1..] {
                adj[a - 1].insert(b);
                adj[b - 1].insert(a);
            }
        }
        for &w in &neighbors {
            adj[w - 1].remove(&v);
        }
        adj[v - 1].clear();
        alive.remove(&v);
    }

    // Node for elimination step i attaches to the step of its earliest
    // eliminated bag neighbor; isolated bags attach to the final root.
    let order: Vec<usize> = {
        let mut order = vec![0usize; n];
        for v in 1..=n {
            order[position[v]] = v;
        }
        order
    };
    let mut edges = Vec::new();
    for i in 0..n {
        let v = order[i];
        let parent = bags[i]
            .iter()
            .filter(|&&w| w != v)
            .map(|&w| position[w])
            .min();
        match parent {
            Some(p) => edges.push((i, p)),
            None => {
                if i + 1 < n {
                    edges.push((i, n - 1));
                }
            }
        }
    }
    TreeDecomposition {
        bags,
        edges,
        root: n - 1,
    }
}

/// Node kinds of a nice decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Debug, Clone)]
pub struct NiceNode {
    pub bag: BTreeSet<usize>,
    pub kind: NodeKind,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
    pub root: usize,
}

impl NiceTreeDecomposition {
    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.bag.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// Post-order traversal from the root.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((x, expanded)) = stack.pop() {
            if expanded {
                out.push(x);
            } else {
                stack.push((x, true));
                for &c in &self.nodes[x].children {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Vertices appearing in bags of the subtree rooted at each node.
    pub fn subtree_vertices(&self) -> Vec<BTreeSet<usize>> {
        let mut out = vec![BTreeSet::new(); self.nodes.len()];
        for x in self.post_order() {
            let mut acc: BTreeSet<usize> = self.nodes[x].bag.clone();
            for &c in &self.nodes[x].children {
                acc.extend(out[c].iter().copied());
            }
            out[x] = acc;
        }
        out
    }

    pub fn to_td(&self) -> TreeDecomposition {
        let mut edges = Vec::new();
        for (x, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                edges.push((x, c));
            }
        }
        TreeDecomposition {
            bags: self.nodes.iter().map(|n| n.bag.clone()).collect(),
            edges,
            root: self.root,
        }
    }

    /// Full structural audit: node-kind invariants, the introduce premise
    /// (an introduced vertex appears nowhere below) and the join premise
    /// (the bag equals the intersection of both subtrees' vertex sets),
    /// plus the underlying decomposition conditions against `g`.
    pub fn check_structure(&self, g: &Graph) -> Result<(), TdError> {
        let fail = |msg: String| Err(TdError::Invalid(msg));
        let subtree = self.subtree_vertices();
        for (x, node) in self.nodes.iter().enumerate() {
            match node.kind {
                NodeKind::Leaf => {
                    if !node.children.is_empty() || node.bag.len() != 1 {
                        return fail(format!("leaf node {x} malformed"));
                    }
                }
                NodeKind::Introduce(v) => {
                    let [c] = node.children[..] else {
                        return fail(format!("introduce node {x} must have one child"));
                    };
                    let mut expected = node.bag.clone();
                    if !expected.remove(&v) {
                        return fail(format!("introduce node {x} lacks vertex {v}"));
                    }
                    if self.nodes[c].bag != expected {
                        return fail(format!("introduce node {x} child bag mismatch"));
                    }
                    if subtree[c].contains(&v) {
                        return fail(format!(
                            "vertex {v} introduced at node {x} appears below it"
                        ));
                    }
                }
                NodeKind::Forget(v) => {
                    let [c] = node.children[..] else {
                        return fail(format!("forget node {x} must have one child"));
                    };
                    if node.bag.contains(&v) {
                        return fail(format!("forget node {x} still holds vertex {v}"));
                    }
                    let mut expected = node.bag.clone();
                    expected.insert(v);
                    if self.nodes[c].bag != expected {
                        return fail(format!("forget node {x} child bag mismatch"));
                    }
                }
                NodeKind::Join => {
                    let [a, b] = node.children[..] else {
                        return fail(format!("join node {x} must have two children"));
                    };
                    if self.nodes[a].bag != node.bag || self.nodes[b].bag != node.bag {
                        return fail(format!("join node {x} children bags differ"));
                    }
                    let inter: BTreeSet<usize> =
                        subtree[a].intersection(&subtree[b]).copied().collect();
                    if inter != node.bag {
                        return fail(format!(
                            "join node {x} bag is not the subtree intersection"
                        ));
                    }
                }
            }
        }
        let report = validate_td(g, &self.to_td());
        if !report.valid {
            return fail(report.violation.unwrap_or_default());
        }
        Ok(())
    }
}

/// Converts a valid decomposition into nice form of the same width. The
/// node count stays within 4 * (width + 1) * n for decompositions coming
/// from elimination orderings (at most one bag per vertex).
pub fn make_nice(td: &TreeDecomposition) -> Result<NiceTreeDecomposition, TdError> {
    if td.bags.iter().all(|b| b.is_empty()) {
        return Err(TdError::EmptyDecomposition);
    }
    // Rooted children lists, pruning empty-bag leaves (they carry nothing,
    // and a Leaf node needs a vertex).
    let adj = td.adjacency();
    let mut parent = vec![usize::MAX; td.bags.len()];
    let mut order = Vec::new();
    let mut seen = vec![false; td.bags.len()];
    seen[td.root] = true;
    let mut queue = VecDeque::from([td.root]);
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); td.bags.len()];
    let mut dropped = vec![false; td.bags.len()];
    for &x in order.iter().rev() {
        children[x] = adj[x]
            .iter()
            .copied()
            .filter(|&y| parent[y] == x && !dropped[y])
            .collect();
        children[x].sort_unstable();
        if children[x].is_empty() && td.bags[x].is_empty() && x != td.root {
            dropped[x] = true;
        }
    }

    let mut out = Builder { nodes: Vec::new() };
    let root = out.build(td, &children, td.root)?;
    Ok(NiceTreeDecomposition {
        nodes: out.nodes,
        root,
    })
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, bag: BTreeSet<usize>, kind: NodeKind, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode {
            bag,
            kind,
            children,
        });
        self.nodes.len() - 1
    }

    /// Leaf chain realizing `bag` from a single vertex upward.
    fn leaf_chain(&mut self, bag: &BTreeSet<usize>) -> Result<usize, TdError> {
        let mut vs = bag.iter().copied();
        let first = vs.next().ok_or(TdError::EmptyDecomposition)?;
        let mut current = BTreeSet::from([first]);
        let mut top = self.push(current.clone(), NodeKind::Leaf, vec![]);
        for v in vs {
            current.insert(v);
            top = self.push(current.clone(), NodeKind::Introduce(v), vec![top]);
        }
        Ok(top)
    }

    /// Forget/introduce chain bringing a subtree rooted with bag `from` up
    /// to bag `to`.
    fn morph(&mut self, mut top: usize, from: &BTreeSet<usize>, to: &BTreeSet<usize>) -> usize {
        let mut current = from.clone();
        for &v in from.difference(to) {
            current.remove(&v);
            top = self.push(current.clone(), NodeKind::Forget(v), vec![top]);
        }
        let added: Vec<usize> = to.difference(&current).copied().collect();
        for v in added {
            current.insert(v);
            top = self.push(current.clone(), NodeKind::Introduce(v), vec![top]);
        }
        top
    }

    fn build(
        &mut self,
        td: &TreeDecomposition,
        children: &[Vec<usize>],
        x: usize,
    ) -> Result<usize, TdError> {
        let bag = &td.bags[x];
        if children[x].is_empty() {
            return self.leaf_chain(bag);
        }
        let mut tops = Vec::with_capacity(children[x].len());
        for &c in &children[x] {
            let sub = self.build(td, children, c)?;
            tops.push(self.morph(sub, &td.bags[c], bag));
        }
        let mut combined = tops[0];
        for &next in &tops[1..] {
            combined = self.push(bag.clone(), NodeKind::Join, vec![combined, next]);
        }
        Ok(combined)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use rand::{Rng, SeedableRng};

    fn g(text: &str) -> Graph {
        parse_graph(text.as_bytes()).unwrap()
    }

    pub(crate) fn random_graph(rng: &mut rand_chacha::ChaCha8Rng, n: usize, d: u32) -> Graph {
        let mut edges = Vec::new();
        let target = if n < 2 { 0 } else { rng.gen_range(0..=2 * n) };
        for _ in 0..target {
            let u = rng.gen_range(1..=n);
            let mut v = rng.gen_range(1..=n);
            while v == u {
                v = rng.gen_range(1..=n);
            }
            edges.push(format!(
                "[{},{},{},{}]",
                u,
                v,
                rng.gen_range(1..=d),
                rng.gen_range(1..=d)
            ));
        }
        g(&format!(
            r#"{{"n":{},"d":{},"edges":[{}]}}"#,
            n,
            d,
            edges.join(",")
        ))
    }

    #[test]
    fn validates_hand_decompositions() {
        let k2 = g(r#"{"n":2,"d":1,"edges":[[1,2,1,1]]}"#);
        let single = TreeDecomposition {
            bags: vec![BTreeSet::from([1, 2])],
            edges: vec![],
            root: 0,
        };
        let report = validate_td(&k2, &single);
        assert!(report.valid);
        assert_eq!(report.width, 1);

        let split = TreeDecomposition {
            bags: vec![BTreeSet::from([1]), BTreeSet::from([2])],
            edges: vec![(0, 1)],
            root: 0,
        };
        let report = validate_td(&k2, &split);
        assert!(!report.valid);
        assert!(report.violation.unwrap().contains("not covered"));

        let p4 = g(r#"{"n":4,"d":1,"edges":[[1,2,1,1],[2,3,1,1],[3,4,1,1]]}"#);
        let sliding = TreeDecomposition {
            bags: vec![
                BTreeSet::from([1, 2]),
                BTreeSet::from([2, 3]),
                BTreeSet::from([3, 4]),
            ],
            edges: vec![(0, 1), (1, 2)],
            root: 0,
        };
        let report = validate_td(&p4, &sliding);
        assert!(report.valid);
        assert_eq!(report.width, 1);
    }

    #[test]
    fn heuristic_width_on_fixtures() {
        let tree = g(
            r#"{"n":6,"d":1,"edges":[[1,2,1,1],[1,3,1,1],[2,4,1,1],[2,5,1,1],[3,6,1,1]]}"#,
        );
        let td = heuristic_td(&tree);
        assert!(validate_td(&tree, &td).valid);
        assert_eq!(td.width(), 1);

        let c4 = g(
            r#"{"n":4,"d":1,"edges":[[1,2,1,1],[2,3,1,1],[3,4,1,1],[4,1,1,1]]}"#,
        );
        let td = heuristic_td(&c4);
        assert!(validate_td(&c4, &td).valid);
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn heuristic_always_validates() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        for _ in 0..200 {
            let n = rng.gen_range(1..=12);
            let graph = random_graph(&mut rng, n, 2);
            let td = heuristic_td(&graph);
            let report = validate_td(&graph, &td);
            assert!(report.valid, "violation: {:?}", report.violation);
        }
    }

    #[test]
    fn nice_conversion_of_single_bag() {
        let k2 = g(r#"{"n":2,"d":1,"edges":[[1,2,1,1]]}"#);
        let td = TreeDecomposition {
            bags: vec![BTreeSet::from([1, 2])],
            edges: vec![],
            root: 0,
        };
        let nice = make_nice(&td).unwrap();
        assert_eq!(nice.nodes.len(), 2);
        assert!(matches!(nice.nodes[nice.root].kind, NodeKind::Introduce(2)));
        nice.check_structure(&k2).unwrap();
    }

    #[test]
    fn nice_conversion_of_path_decomposition() {
        let p4 = g(r#"{"n":4,"d":1,"edges":[[1,2,1,1],[2,3,1,1],[3,4,1,1]]}"#);
        let td = TreeDecomposition {
            bags: vec![
                BTreeSet::from([1, 2]),
                BTreeSet::from([2, 3]),
                BTreeSet::from([3, 4]),
            ],
            edges: vec![(0, 1), (1, 2)],
            root: 0,
        };
        let nice = make_nice(&td).unwrap();
        nice.check_structure(&p4).unwrap();
        assert_eq!(nice.width(), td.width());
    }

    #[test]
    fn nice_conversion_random_audit_and_size() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(59);
        for _ in 0..100 {
            let n = rng.gen_range(2..=12);
            let graph = random_graph(&mut rng, n, 2);
            let td = heuristic_td(&graph);
            let nice = make_nice(&td).unwrap();
            nice.check_structure(&graph).unwrap();
            assert_eq!(nice.width(), td.width());
            let bound = 4 * (td.width() + 1) * graph.n();
            assert!(
                nice.nodes.len() <= bound,
                "{} nodes exceeds bound {bound}",
                nice.nodes.len()
            );
        }
    }

    #[test]
    fn td_json_round_trip() {
        let td = TreeDecomposition {
            bags: vec![BTreeSet::from([1, 2]), BTreeSet::from([2, 3])],
            edges: vec![(0, 1)],
            root: 1,
        };
        let back = TreeDecomposition::parse(td.to_json().as_bytes()).unwrap();
        assert_eq!(td, back);
        assert!(TreeDecomposition::parse(br#"{"root":7,"nodes":[],"edges":[]}"#).is_err());
    }
}
