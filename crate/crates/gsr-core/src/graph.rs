//! Undirected simple graphs on nodes `0..n`, the generators for every graph
//! family used by the measurement constructions, and the structural queries
//! (induced-subgraph connectivity, BFS spanning trees, radius/center) the
//! rest of the crate depends on.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// An ordered set of node ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeSet(BTreeSet<usize>);

impl NodeSet {
    pub fn new() -> Self {
        NodeSet(BTreeSet::new())
    }

    pub fn singleton(v: usize) -> Self {
        NodeSet(BTreeSet::from([v]))
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        NodeSet(iter.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn insert(&mut self, v: usize) -> bool {
        self.0.insert(v)
    }

    pub fn remove(&mut self, v: usize) -> bool {
        self.0.remove(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.union(&other.0).copied().collect())
    }

    pub fn minus(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn intersect(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Smallest member, if any.
    pub fn min(&self) -> Option<usize> {
        self.0.iter().next().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.iter().next_back().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().copied().collect()
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        NodeSet(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[usize; N]> for NodeSet {
    fn from(arr: [usize; N]) -> Self {
        NodeSet(arr.into_iter().collect())
    }
}

/// Undirected simple graph. Immutable after construction; all queries are
/// read-only, so sharing across threads is safe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Build a graph from an edge list. Rejects self-loops, duplicate edges
    /// and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at node {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u},{v}) out of range for n={n}"
                )));
            }
            let e = (u.min(v), u.max(v));
            if !set.insert(e) {
                return Err(Error::InvalidParameter(format!("duplicate edge ({u},{v})")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Graph { n, edges: set, adjacency })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as canonical `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Neighbors of `v` in ascending id order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn all_nodes(&self) -> NodeSet {
        (0..self.n).collect()
    }

    /// True iff the subgraph induced by `s` is connected. Errors on an empty
    /// set or out-of-range members.
    pub fn is_connected_subset(&self, s: &NodeSet) -> Result<bool> {
        if s.is_empty() {
            return Err(Error::InvalidParameter("empty node set".into()));
        }
        if let Some(max) = s.max() {
            if max >= self.n {
                return Err(Error::InvalidParameter(format!(
                    "node {max} out of range for n={}",
                    self.n
                )));
            }
        }
        let start = s.min().unwrap();
        let mut seen = NodeSet::new();
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if s.contains(w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        Ok(seen.len() == s.len())
    }

    /// True iff the whole graph is connected (single nodes count as connected).
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.is_connected_subset(&self.all_nodes()).unwrap()
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<NodeSet> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = NodeSet::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                comp.insert(u);
                for &w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// BFS distances from `root`; unreachable nodes are `usize::MAX`.
    pub fn bfs_distances(&self, root: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// BFS spanning tree rooted at `root`, visiting neighbors in ascending id
    /// order. Errors if the graph is disconnected.
    pub fn bfs_spanning_tree(&self, root: usize) -> Result<BfsTree> {
        if root >= self.n {
            return Err(Error::InvalidParameter(format!("root {root} out of range")));
        }
        let mut parent = vec![None; self.n];
        let mut depth = vec![usize::MAX; self.n];
        let mut order = Vec::with_capacity(self.n);
        depth[root] = 0;
        order.push(root);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if depth[w] == usize::MAX {
                    depth[w] = depth[u] + 1;
                    parent[w] = Some(u);
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        if order.len() != self.n {
            return Err(Error::Disconnected(format!(
                " (reached {} of {} nodes from root {root})",
                order.len(),
                self.n
            )));
        }
        Ok(BfsTree { root, parent, depth, order })
    }

    /// Radius `R = min_u max_v d(u,v)` and a center attaining it, ties broken
    /// by smallest node id. Errors on disconnected or empty graphs.
    pub fn radius_and_center(&self) -> Result<(usize, usize)> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("empty graph".into()));
        }
        let mut best: Option<(usize, usize)> = None;
        for u in 0..self.n {
            let dist = self.bfs_distances(u);
            let mut ecc = 0usize;
            for &d in &dist {
                if d == usize::MAX {
                    return Err(Error::Disconnected(String::new()));
                }
                ecc = ecc.max(d);
            }
            if best.map_or(true, |(r, _)| ecc < r) {
                best = Some((ecc, u));
            }
        }
        Ok(best.unwrap())
    }

    /// Serialize to the plain-text graph format (canonical: sorted edges).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n {}", self.n);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parse the plain-text graph format. Lines starting with `#` are
    /// comments; the first data line must be `n <count>`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            match n {
                None => {
                    let tag = it.next().unwrap_or("");
                    let cnt = it.next().ok_or_else(|| {
                        Error::Parse(format!("line {}: expected `n <count>`", lineno + 1))
                    })?;
                    if tag != "n" {
                        return Err(Error::Parse(format!(
                            "line {}: expected `n <count>`, got `{line}`",
                            lineno + 1
                        )));
                    }
                    n = Some(cnt.parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad node count `{cnt}`", lineno + 1))
                    })?);
                }
                Some(_) => {
                    let u: usize = it
                        .next()
                        .ok_or_else(|| Error::Parse(format!("line {}: missing endpoint", lineno + 1)))?
                        .parse()
                        .map_err(|_| Error::Parse(format!("line {}: bad node id", lineno + 1)))?;
                    let v: usize = it
                        .next()
                        .ok_or_else(|| Error::Parse(format!("line {}: missing endpoint", lineno + 1)))?
                        .parse()
                        .map_err(|_| Error::Parse(format!("line {}: bad node id", lineno + 1)))?;
                    edges.push((u, v));
                }
            }
        }
        let n = n.ok_or_else(|| Error::Parse("missing `n <count>` header".into()))?;
        Graph::from_edges(n, edges)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Graph::from_text(&text)
    }
}

/// BFS spanning tree: parent array plus depths and discovery order.
#[derive(Debug, Clone)]
pub struct BfsTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<usize>,
    /// Nodes in BFS discovery order (root first).
    pub order: Vec<usize>,
}

impl BfsTree {
    /// Nodes with no children in the tree.
    pub fn leaves(&self) -> NodeSet {
        let mut has_child = vec![false; self.parent.len()];
        for p in self.parent.iter().flatten() {
            has_child[*p] = true;
        }
        self.order
            .iter()
            .copied()
            .filter(|&v| !has_child[v])
            .collect()
    }

    pub fn depth_of(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn max_depth(&self) -> usize {
        self.order.iter().map(|&v| self.depth[v]).max().unwrap_or(0)
    }

    /// Nodes at each depth, ascending ids within a layer.
    pub fn layers(&self) -> Vec<NodeSet> {
        let mut layers = vec![NodeSet::new(); self.max_depth() + 1];
        for &v in &self.order {
            layers[self.depth[v]].insert(v);
        }
        layers
    }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Path graph: edges (i, i+1).
pub fn gen_line(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("line needs n >= 2, got {n}")));
    }
    Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1)))
}

/// Cycle graph: the line plus the closing edge (n-1, 0).
pub fn gen_ring(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("ring needs n >= 3, got {n}")));
    }
    Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1)).chain([(n - 1, 0)]))
}

/// Ring where every node also connects to its neighbors two steps away:
/// ring edges plus chords (i, i+2 mod n).
pub fn gen_g4(n: usize) -> Result<Graph> {
    if n < 5 {
        return Err(Error::InvalidParameter(format!("g4 needs n >= 5, got {n}")));
    }
    let ring = (0..n).map(|i| (i, (i + 1) % n));
    let chords = (0..n).map(|i| (i, (i + 2) % n));
    Graph::from_edges(n, ring.chain(chords))
}

/// `gen_g4` with the chord (i-1, i+1) removed for every midpoint i in
/// `deleted_chords`. Midpoints are 0-indexed node ids; duplicates rejected.
pub fn gen_g4_minus(n: usize, deleted_chords: &NodeSet) -> Result<Graph> {
    if n < 5 {
        return Err(Error::InvalidParameter(format!("g4 needs n >= 5, got {n}")));
    }
    if let Some(max) = deleted_chords.max() {
        if max >= n {
            return Err(Error::InvalidParameter(format!("chord midpoint {max} out of range")));
        }
    }
    let removed: BTreeSet<(usize, usize)> = deleted_chords
        .iter()
        .map(|i| {
            let a = (i + n - 1) % n;
            let b = (i + 1) % n;
            (a.min(b), a.max(b))
        })
        .collect();
    let ring = (0..n).map(|i| (i, (i + 1) % n));
    let chords = (0..n)
        .map(|i| {
            let (a, b) = (i, (i + 2) % n);
            (a.min(b), a.max(b))
        })
        .filter(|e| !removed.contains(e));
    Graph::from_edges(n, ring.chain(chords))
}

/// Two-dimensional grid with `side` rows and `side` columns; node (r,c) has
/// id `r*side + c`.
pub fn gen_grid(side: usize) -> Result<Graph> {
    if side < 2 {
        return Err(Error::InvalidParameter(format!("grid needs side >= 2, got {side}")));
    }
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            let id = r * side + c;
            if c + 1 < side {
                edges.push((id, id + 1));
            }
            if r + 1 < side {
                edges.push((id, id + side));
            }
        }
    }
    Graph::from_edges(side * side, edges)
}

/// Complete graph on n nodes.
pub fn gen_complete(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter("complete graph needs n >= 1".into()));
    }
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_edges(n, edges)
}

/// Random tree by uniform attachment: node j >= 1 picks a uniformly random
/// parent among 0..j. Deterministic given the seed.
pub fn gen_tree_random(n: usize, seed: u64) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter("tree needs n >= 1".into()));
    }
    let mut rng = seed::rng(seed);
    let edges = (1..n)
        .map(|j| {
            let p = rng.random_range(0..j);
            (p, j)
        })
        .collect::<Vec<_>>();
    Graph::from_edges(n, edges)
}

/// Erdos-Renyi G(n, p): each pair is an edge independently with probability p.
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter("er needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} not in [0,1]")));
    }
    let mut rng = seed::rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Barabasi-Albert preferential attachment: start from a random tree of `m0`
/// nodes, then every new node connects to `m` distinct existing nodes chosen
/// proportionally to degree.
pub fn gen_ba(n: usize, m0: usize, m: usize, seed: u64) -> Result<Graph> {
    if m0 < 1 || m < 1 {
        return Err(Error::InvalidParameter("ba needs m0 >= 1 and m >= 1".into()));
    }
    if m > m0 {
        return Err(Error::InvalidParameter(format!("ba needs m <= m0 ({m} > {m0})")));
    }
    if n < m0 {
        return Err(Error::InvalidParameter(format!("ba needs n >= m0 ({n} < {m0})")));
    }
    let mut rng = seed::rng(seed);
    let mut edges: Vec<(usize, usize)> = (1..m0)
        .map(|j| {
            let p = rng.random_range(0..j);
            (p, j)
        })
        .collect();
    // Degree bag: node id repeated once per incident edge.
    let mut bag: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    for v in m0..n {
        let mut targets = NodeSet::new();
        while targets.len() < m {
            let t = if bag.is_empty() {
                rng.random_range(0..v)
            } else {
                bag[rng.random_range(0..bag.len())]
            };
            targets.insert(t);
        }
        for t in targets.iter() {
            edges.push((t, v));
            bag.push(t);
            bag.push(v);
        }
    }
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_ring_shapes() {
        let line = gen_line(3).unwrap();
        assert_eq!(line.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        let ring = gen_ring(3).unwrap();
        assert_eq!(ring.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        let ring8 = gen_ring(8).unwrap();
        assert_eq!(ring8.edge_count(), 8);
        assert!((0..8).all(|v| ring8.degree(v) == 2));
        assert!(gen_line(1).is_err());
    }

    #[test]
    fn g4_shape_and_chord_deletion() {
        let g = gen_g4(8).unwrap();
        assert_eq!(g.edge_count(), 16);
        assert!((0..8).all(|v| g.degree(v) == 4));

        // Midpoint 4 names the chord (3,5).
        let h = gen_g4_minus(12, &NodeSet::from([4])).unwrap();
        assert_eq!(h.edge_count(), 23);
        assert!(!h.has_edge(3, 5));
        assert!(h.has_edge(3, 4) && h.has_edge(4, 5));

        // Fig-style triple deletion: midpoints {3,8,9} remove (2,4),(7,9),(8,10).
        let f = gen_g4_minus(12, &NodeSet::from([3, 8, 9])).unwrap();
        assert_eq!(f.edge_count(), 24 - 3);
        assert!(!f.has_edge(2, 4) && !f.has_edge(7, 9) && !f.has_edge(8, 10));

        assert_eq!(gen_g4_minus(12, &NodeSet::new()).unwrap(), gen_g4(12).unwrap());
    }

    #[test]
    fn g4_minus_edge_count_formula() {
        for n in [5usize, 9, 16, 25] {
            for h in 0..n.min(6) {
                let d: NodeSet = (0..h).map(|i| (i * 2 + 1) % n).collect();
                if d.len() != h {
                    continue;
                }
                let g = gen_g4_minus(n, &d).unwrap();
                assert_eq!(g.edge_count(), 2 * n - h);
            }
        }
    }

    #[test]
    fn grid_tree_er_shapes() {
        let g = gen_grid(3).unwrap();
        assert_eq!(g.node_count(), 9);
        assert_eq!(g.edge_count(), 12);

        let t = gen_tree_random(100, 7).unwrap();
        assert_eq!(t.edge_count(), 99);
        assert!(t.is_connected());

        let k = gen_er(20, 1.0, 3).unwrap();
        assert_eq!(k.edge_count(), 20 * 19 / 2);
        assert_eq!(gen_er(20, 0.5, 3).unwrap(), gen_er(20, 0.5, 3).unwrap());
    }

    #[test]
    fn ba_edge_count_and_determinism() {
        let g = gen_ba(64, 10, 3, 11).unwrap();
        assert_eq!(g.edge_count(), 9 + 3 * 54);
        assert!(g.is_connected());
        assert_eq!(g, gen_ba(64, 10, 3, 11).unwrap());
        assert_ne!(g, gen_ba(64, 10, 3, 12).unwrap());
    }

    #[test]
    fn induced_connectivity() {
        let line = gen_line(4).unwrap();
        assert!(!line.is_connected_subset(&NodeSet::from([0, 2])).unwrap());
        let g4 = gen_g4(8).unwrap();
        assert!(g4.is_connected_subset(&NodeSet::from([0, 2, 4])).unwrap());
        assert!(line.is_connected_subset(&NodeSet::singleton(3)).unwrap());
        assert!(line.is_connected_subset(&NodeSet::new()).is_err());
    }

    #[test]
    fn radius_and_center_small() {
        assert_eq!(gen_ring(8).unwrap().radius_and_center().unwrap().0, 4);
        assert_eq!(gen_line(5).unwrap().radius_and_center().unwrap(), (2, 2));
    }

    /// Independent eccentricity oracle: per-node BFS re-implemented directly.
    #[cfg(test)]
    fn ecc_oracle(g: &Graph, u: usize) -> usize {
        let mut dist = vec![None::<usize>; g.node_count()];
        dist[u] = Some(0);
        let mut frontier = vec![u];
        let mut d = 0;
        while !frontier.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for &x in &frontier {
                for &y in g.neighbors(x) {
                    if dist[y].is_none() {
                        dist[y] = Some(d);
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        dist.iter().map(|d| d.unwrap()).max().unwrap()
    }

    #[test]
    fn radius_matches_all_pairs_oracle() {
        for g in [
            gen_g4(16).unwrap(),
            gen_grid(4).unwrap(),
            gen_tree_random(40, 5).unwrap(),
            gen_ba(50, 5, 2, 9).unwrap(),
        ] {
            let (r, c) = g.radius_and_center().unwrap();
            let eccs: Vec<usize> = (0..g.node_count()).map(|u| ecc_oracle(&g, u)).collect();
            assert_eq!(r, *eccs.iter().min().unwrap());
            assert_eq!(eccs[c], r);
            // Ties broken by smallest id.
            assert!(eccs[..c].iter().all(|&e| e > r));
        }
        assert_eq!(gen_g4(16).unwrap().radius_and_center().unwrap().0, 4);
    }

    #[test]
    fn components_split() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (4, 5)]).unwrap();
        let comps = g.components();
        assert_eq!(comps.len(), 3);
        assert_eq!(comps[0], NodeSet::from([0, 1, 2]));
        assert_eq!(comps[1], NodeSet::singleton(3));
        assert_eq!(comps[2], NodeSet::from([4, 5]));
        assert!(g.bfs_spanning_tree(0).is_err());
        assert!(g.radius_and_center().is_err());
    }

    #[test]
    fn bfs_tree_structure() {
        let g = gen_ring(6).unwrap();
        let t = g.bfs_spanning_tree(0).unwrap();
        assert_eq!(t.parent[1], Some(0));
        assert_eq!(t.parent[5], Some(0));
        assert_eq!(t.parent[2], Some(1));
        assert_eq!(t.parent[4], Some(5));
        assert_eq!(t.parent[3], Some(2));
        assert_eq!(t.leaves(), NodeSet::from([3, 4]));
        assert_eq!(t.max_depth(), 3);
    }

    #[test]
    fn text_roundtrip_is_bit_exact() {
        let g = gen_ba(30, 5, 2, 42).unwrap();
        let text = g.to_text();
        let h = Graph::from_text(&text).unwrap();
        assert_eq!(g, h);
        assert_eq!(h.to_text(), text);

        let with_comments = format!("# saved graph\n{text}# trailing\n");
        assert_eq!(Graph::from_text(&with_comments).unwrap(), g);
    }

    #[test]
    fn from_edges_rejects_malformed() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
    }
}
