//! Deterministic maximum matching in general graphs (Edmonds' blossom
//! algorithm, O(V^3)) and the explicit-coloring-list solver built on it.

use crate::exec;
use crate::graph::{Graph, GraphError, PerfectMatching, VertexColoring};

const NONE: usize = usize::MAX;

/// Blossom-shrinking search state over a simple 0-based adjacency list.
struct Matcher<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    blossom: Vec<bool>,
}

impl<'a> Matcher<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        Matcher {
            adj,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            blossom: vec![false; n],
        }
    }

    fn lca(&self, a: usize, b: usize) -> usize {
        let n = self.adj.len();
        let mut seen = vec![false; n];
        let mut v = a;
        loop {
            v = self.base[v];
            seen[v] = true;
            if self.mate[v] == NONE {
                break;
            }
            v = self.parent[self.mate[v]];
        }
        let mut v = b;
        loop {
            v = self.base[v];
            if seen[v] {
                return v;
            }
            v = self.parent[self.mate[v]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.blossom[self.base[v]] = true;
            self.blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_augmenting_path(&mut self, root: usize) -> bool {
        let n = self.adj.len();
        self.used.iter_mut().for_each(|u| *u = false);
        self.parent.iter_mut().for_each(|p| *p = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &to in &self.adj[v] {
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    // Odd cycle: shrink the blossom to its stem base.
                    let curbase = self.lca(v, to);
                    self.blossom.iter_mut().for_each(|b| *b = false);
                    self.mark_path(v, curbase, to);
                    self.mark_path(to, curbase, v);
                    for i in 0..n {
                        if self.blossom[self.base[i]] {
                            self.base[i] = curbase;
                            if !self.used[i] {
                                self.used[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        self.augment(to);
                        return true;
                    }
                    self.used[self.mate[to]] = true;
                    queue.push_back(self.mate[to]);
                }
            }
        }
        false
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let next = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = next;
        }
    }
}

/// Maximum matching over a simple 0-based adjacency list. Returns the mate
/// array (`NONE`-free entries come back as `Some`).
pub(crate) fn maximum_matching(adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut m = Matcher::new(adj);
    for v in 0..adj.len() {
        if m.mate[v] == NONE {
            m.find_augmenting_path(v);
        }
    }
    m.mate
        .into_iter()
        .map(|w| (w != NONE).then_some(w))
        .collect()
}

/// Whether the underlying uncolored simple graph (parallel edges collapsed)
/// has a perfect matching.
pub fn blossom_has_pm(g: &Graph) -> bool {
    if g.n() % 2 != 0 {
        return false;
    }
    let adj = g.simple_adjacency();
    let matched = maximum_matching(&adj)
        .iter()
        .filter(|m| m.is_some())
        .count();
    matched == g.n()
}

fn filtered_adjacency(g: &Graph, c: &VertexColoring) -> Vec<Vec<usize>> {
    let mut sets = vec![std::collections::BTreeSet::new(); g.n()];
    for e in g.edges() {
        if e.color_at_u == c.get(e.u) && e.color_at_v == c.get(e.v) {
            sets[e.u - 1].insert(e.v - 1);
            sets[e.v - 1].insert(e.u - 1);
        }
    }
    sets.into_iter().map(|s| s.into_iter().collect()).collect()
}

fn has_pm_for_coloring(g: &Graph, c: &VertexColoring) -> bool {
    if g.n() % 2 != 0 {
        return false;
    }
    let adj = filtered_adjacency(g, c);
    maximum_matching(&adj).iter().filter(|m| m.is_some()).count() == g.n()
}

/// Decides, for an explicit list of vertex colorings, whether some coloring
/// in the list admits a perfect matching among the edges that agree with it.
pub fn solve_explicit(g: &Graph, colorings: &[VertexColoring]) -> Result<bool, GraphError> {
    for c in colorings {
        if c.len() != g.n() {
            return Err(GraphError::ColoringLength {
                got: c.len(),
                expected: g.n(),
            });
        }
    }
    Ok(exec::any_indexed(colorings.len(), |i| {
        has_pm_for_coloring(g, &colorings[i])
    }))
}

/// Like [`solve_explicit`], but recovers a witness matching from the first
/// coloring (in list order) that succeeds.
pub fn solve_explicit_witness(
    g: &Graph,
    colorings: &[VertexColoring],
) -> Result<Option<PerfectMatching>, GraphError> {
    for c in colorings {
        if c.len() != g.n() {
            return Err(GraphError::ColoringLength {
                got: c.len(),
                expected: g.n(),
            });
        }
    }
    if g.n() % 2 != 0 {
        return Ok(None);
    }
    let hit = exec::find_first_indexed(colorings.len(), |i| {
        has_pm_for_coloring(g, &colorings[i]).then_some(i)
    });
    let Some(i) = hit else { return Ok(None) };
    let c = &colorings[i];
    let mate = maximum_matching(&filtered_adjacency(g, c));
    let mut ids = Vec::with_capacity(g.n() / 2);
    for (u0, &m) in mate.iter().enumerate() {
        let w = m.expect("perfect matching covers every vertex");
        if u0 < w {
            let (u, v) = (u0 + 1, w + 1);
            // Lowest agreeing edge id between the matched pair.
            let id = g
                .edges()
                .iter()
                .position(|e| {
                    (e.u.min(e.v), e.u.max(e.v)) == (u.min(v), u.max(v))
                        && e.color_at_u == c.get(e.u)
                        && e.color_at_v == c.get(e.v)
                })
                .expect("matched pair has an agreeing edge");
            ids.push(id);
        }
    }
    Ok(Some(PerfectMatching::new(ids)))
}
