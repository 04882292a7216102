//! Measurement construction for arbitrary connected graphs by iterated
//! leaf-stripping: take the BFS-tree leaves of the current graph as one
//! recovery group served by the remaining nodes as a hub, then delete the
//! leaves while fully connecting their neighborhoods and remembering, per
//! synthetic edge, which original nodes bridge it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::construct::{construct_complete, construct_tree, FParams};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::plan::{Group, MeasurementPlan, Method, RowMeta};
use crate::seed;

/// Per synthetic edge of a reduced graph, the original-graph nodes that make
/// the edge real: a measurement using that edge must include them to stay
/// feasible. Original edges carry no entry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HubMap {
    bridges: BTreeMap<(usize, usize), NodeSet>,
}

impl HubMap {
    pub fn new() -> Self {
        HubMap::default()
    }

    fn key(u: usize, v: usize) -> (usize, usize) {
        (u.min(v), u.max(v))
    }

    pub fn get(&self, u: usize, v: usize) -> Option<&NodeSet> {
        self.bridges.get(&Self::key(u, v))
    }

    fn merged(&self, u: usize, v: usize, w: usize, deleted: usize) -> NodeSet {
        let mut set = NodeSet::singleton(deleted);
        if let Some(h) = self.get(u, v) {
            set = set.union(h);
        }
        if let Some(h) = self.get(v, w) {
            set = set.union(h);
        }
        set
    }

    fn set(&mut self, u: usize, v: usize, nodes: NodeSet) {
        self.bridges.insert(Self::key(u, v), nodes);
    }

    pub fn len(&self) -> usize {
        self.bridges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bridges.is_empty()
    }
}

/// Working graph for the reduction: a subset of the original node ids with a
/// mutable adjacency. Node ids never change, so hub bookkeeping stays in the
/// original id space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedGraph {
    alive: BTreeSet<usize>,
    adj: Vec<BTreeSet<usize>>,
}

impl From<&Graph> for ReducedGraph {
    fn from(g: &Graph) -> Self {
        ReducedGraph {
            alive: (0..g.node_count()).collect(),
            adj: (0..g.node_count())
                .map(|v| g.neighbors(v).iter().copied().collect())
                .collect(),
        }
    }
}

impl ReducedGraph {
    pub fn alive_count(&self) -> usize {
        self.alive.len()
    }

    pub fn alive_nodes(&self) -> NodeSet {
        self.alive.iter().copied().collect()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.alive.contains(&v)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.contains(u) && self.adj[u].contains(&v)
    }

    pub fn edge_count(&self) -> usize {
        self.alive.iter().map(|&v| self.adj[v].len()).sum::<usize>() / 2
    }

    fn bfs_parents(&self, root: usize) -> (Vec<Option<usize>>, usize, usize) {
        let mut parent = vec![None; self.adj.len()];
        let mut dist = vec![usize::MAX; self.adj.len()];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        let mut reached = 1usize;
        let mut ecc = 0usize;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = Some(u);
                    ecc = ecc.max(dist[w]);
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        (parent, reached, ecc)
    }

    /// BFS filling `dist`; returns (reached, eccentricity, smallest farthest node).
    fn bfs_fill(&self, start: usize, dist: &mut Vec<usize>) -> (usize, usize, usize) {
        dist.clear();
        dist.resize(self.adj.len(), usize::MAX);
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        let mut reached = 1usize;
        let mut ecc = 0usize;
        let mut farthest = start;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    reached += 1;
                    if dist[w] > ecc {
                        ecc = dist[w];
                        farthest = w;
                    }
                    queue.push_back(w);
                }
            }
        }
        (reached, ecc, farthest)
    }

    /// BFS that gives up as soon as some node lies deeper than `cap`.
    fn bfs_ecc_capped(&self, start: usize, cap: usize, dist: &mut Vec<usize>) -> Option<usize> {
        dist.clear();
        dist.resize(self.adj.len(), usize::MAX);
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        let mut ecc = 0usize;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    let d = dist[u] + 1;
                    if d > cap {
                        return None;
                    }
                    dist[w] = d;
                    ecc = ecc.max(d);
                    queue.push_back(w);
                }
            }
        }
        Some(ecc)
    }

    pub fn is_connected(&self) -> bool {
        match self.alive.iter().next() {
            None => true,
            Some(&start) => self.bfs_parents(start).1 == self.alive.len(),
        }
    }

    /// Radius and center over the alive nodes, ties broken by smallest id.
    ///
    /// Exact, but avoids the full all-pairs scan: two sweeps give per-node
    /// eccentricity lower bounds max(d(a,v), d(b,v)) and a strong center
    /// candidate, so most nodes are skipped or abandoned mid-BFS.
    pub fn radius_and_center(&self) -> Result<(usize, usize)> {
        let Some(&first) = self.alive.iter().next() else {
            return Err(Error::InvalidParameter("empty graph".into()));
        };
        if self.alive.len() == 1 {
            return Ok((0, first));
        }
        let mut dist_a = Vec::new();
        let mut dist_b = Vec::new();
        let mut dist = Vec::new();
        let (reached, _, far_a) = self.bfs_fill(first, &mut dist);
        if reached != self.alive.len() {
            return Err(Error::Disconnected(String::new()));
        }
        let (_, _, far_b) = self.bfs_fill(far_a, &mut dist_a);
        self.bfs_fill(far_b, &mut dist_b);
        // Seed with the node minimizing max(d(a,v), d(b,v)).
        let candidate = self
            .alive
            .iter()
            .copied()
            .min_by_key(|&v| (dist_a[v].max(dist_b[v]), v))
            .unwrap();
        let (_, seed_ecc, _) = self.bfs_fill(candidate, &mut dist);
        let mut best = (seed_ecc, candidate);
        for &v in &self.alive {
            if v == candidate {
                continue;
            }
            if dist_a[v].max(dist_b[v]) > best.0 {
                continue;
            }
            if let Some(ecc) = self.bfs_ecc_capped(v, best.0, &mut dist) {
                if ecc < best.0 || (ecc == best.0 && v < best.1) {
                    best = (ecc, v);
                }
            }
        }
        Ok(best)
    }

    /// Delete `u`, fully connect its neighbors, and record the bridge sets
    /// for every edge the completion adds. Existing edges keep their entry.
    pub fn delete_with_completion(&mut self, u: usize, hubs: &mut HubMap) {
        let neighbors: Vec<usize> = self.adj[u].iter().copied().collect();
        for (i, &v) in neighbors.iter().enumerate() {
            for &w in &neighbors[i + 1..] {
                if !self.adj[v].contains(&w) {
                    let merged = hubs.merged(v, u, w, u);
                    self.adj[v].insert(w);
                    self.adj[w].insert(v);
                    hubs.set(v, w, merged);
                }
            }
        }
        for &v in &neighbors {
            self.adj[v].remove(&u);
        }
        self.adj[u].clear();
        self.alive.remove(&u);
    }
}

/// Leaf nodes of the BFS spanning tree of `g` rooted at `root`, neighbors
/// visited in ascending id order.
pub fn leaves(g: &ReducedGraph, root: usize) -> Result<NodeSet> {
    if !g.contains(root) {
        return Err(Error::InvalidParameter(format!("root {root} not in graph")));
    }
    let (parent, reached, _) = g.bfs_parents(root);
    if reached != g.alive_count() {
        return Err(Error::Disconnected(String::new()));
    }
    let mut has_child = vec![false; parent.len()];
    for p in parent.iter().flatten() {
        has_child[*p] = true;
    }
    Ok(g.alive.iter().copied().filter(|&v| !has_child[v]).collect())
}

/// Functional form of the deletion step: returns the reduced graph and the
/// updated hub map, leaving the inputs untouched.
pub fn reduce(g: &ReducedGraph, u: usize, hubs: &HubMap) -> Result<(ReducedGraph, HubMap)> {
    if !g.contains(u) {
        return Err(Error::InvalidParameter(format!("node {u} not in graph")));
    }
    let mut g2 = g.clone();
    let mut h2 = hubs.clone();
    g2.delete_with_completion(u, &mut h2);
    Ok((g2, h2))
}

/// One iteration of the reduction, for the trace log.
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub root: usize,
    pub radius: usize,
    pub leaf_count: usize,
    pub leaves: Vec<usize>,
    pub rows_emitted: usize,
    pub nodes_left: usize,
}

/// Trace of a full reduction run.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionTrace {
    pub initial_radius: usize,
    pub iterations: Vec<IterationRecord>,
}

impl ReductionTrace {
    pub fn iteration_count(&self) -> usize {
        self.iterations.len()
    }

    /// Group sizes in iteration order, final single node included.
    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.iterations.iter().map(|it| it.leaf_count).collect();
        sizes.push(1);
        sizes
    }

    /// One JSON record per line.
    pub fn to_log(&self) -> String {
        let mut out = String::new();
        for it in &self.iterations {
            out.push_str(&serde_json::to_string(it).expect("trace record serializes"));
            out.push('\n');
        }
        out
    }
}

/// Measurement construction for any connected graph. Each iteration roots a
/// BFS tree at a center of the current reduced graph, measures the leaf set
/// through everything else, then strips the leaves; the last remaining node
/// is measured directly.
///
/// Every emitted row is expanded back to the original graph: the hub part is
/// the surviving core plus all bridge nodes recorded for edges between the
/// core and any current leaf, so one hub-sum measurement per iteration
/// covers the subtraction for all of that iteration's rows.
pub fn algorithm1(g: &Graph, k: usize, f: &FParams) -> Result<(MeasurementPlan, ReductionTrace)> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    let mut rg = ReducedGraph::from(g);
    let mut hubs = HubMap::new();
    let mut plan = MeasurementPlan::new(n, k, Method::Algorithm1);
    let mut trace = ReductionTrace { initial_radius: 0, iterations: Vec::new() };
    let mut prev_radius: Option<usize> = None;

    while rg.alive_count() > 1 {
        let (radius, center) = rg.radius_and_center()?;
        if trace.iterations.is_empty() {
            trace.initial_radius = radius;
        }
        if let Some(prev) = prev_radius {
            assert!(radius < prev, "radius must strictly decrease ({prev} -> {radius})");
        }
        prev_radius = Some(radius);

        let leaf_set = leaves(&rg, center)?;
        let core = rg.alive_nodes().minus(&leaf_set);
        debug_assert!(!core.is_empty());

        // Expanded hub: the core, bridges interior to it, and bridges on
        // every leaf-core edge (kept identical across the iteration's rows
        // so a single hub-sum subtraction is exact for each of them).
        let mut hub_full = core.clone();
        for v in core.iter() {
            for &w in &rg.adj[v] {
                if w > v && core.contains(w) {
                    if let Some(h) = hubs.get(v, w) {
                        hub_full = hub_full.union(h);
                    }
                }
            }
        }
        for s in leaf_set.iter() {
            for &w in &rg.adj[s] {
                if core.contains(w) {
                    if let Some(h) = hubs.get(s, w) {
                        hub_full = hub_full.union(h);
                    }
                }
            }
        }
        debug_assert!(hub_full.is_disjoint(&leaf_set));

        let gid = plan.groups.len();
        plan.groups.push(Group {
            member_nodes: leaf_set.clone(),
            hub_sum_row: Some(plan.row_count()),
            recovery_order: gid,
        });
        plan.push_row(
            hub_full.clone(),
            RowMeta { group_id: Some(gid), is_hub_sum: true, hub_nodes: NodeSet::new() },
        );
        let members: Vec<usize> = leaf_set.to_vec();
        let block = construct_complete(members.len(), k, &FParams {
            seed: seed::derive(f.seed, gid as u64),
            ..*f
        })?;
        plan.oracle_checked &= block.oracle_checked;
        let mut rows_emitted = 1;
        for pattern in &block.rows {
            let w: NodeSet = pattern.iter().map(|idx| members[idx]).collect();
            plan.push_row(
                w.union(&hub_full),
                RowMeta { group_id: Some(gid), is_hub_sum: false, hub_nodes: hub_full.clone() },
            );
            rows_emitted += 1;
        }
        // Expansion must keep every row feasible on the original graph.
        for row in &plan.rows[plan.row_count() - rows_emitted..] {
            if !g.is_connected_subset(row)? {
                return Err(Error::InfeasibleRow { row: plan.row_count() - rows_emitted });
            }
        }

        trace.iterations.push(IterationRecord {
            iteration: gid,
            root: center,
            radius,
            leaf_count: leaf_set.len(),
            leaves: leaf_set.to_vec(),
            rows_emitted,
            nodes_left: rg.alive_count() - leaf_set.len(),
        });

        for s in leaf_set.iter() {
            rg.delete_with_completion(s, &mut hubs);
        }
        assert!(rg.is_connected(), "reduction must keep the graph connected");
    }

    let last = *rg.alive.iter().next().expect("one node remains");
    let gid = plan.groups.len();
    plan.groups.push(Group {
        member_nodes: NodeSet::singleton(last),
        hub_sum_row: None,
        recovery_order: gid,
    });
    plan.push_row(
        NodeSet::singleton(last),
        RowMeta { group_id: Some(gid), is_hub_sum: false, hub_nodes: NodeSet::new() },
    );

    assert!(
        trace.iteration_count() <= trace.initial_radius + 1,
        "iterations {} exceed radius bound {}",
        trace.iteration_count(),
        trace.initial_radius + 1
    );
    Ok((plan, trace))
}

/// Comparison baseline: BFS spanning tree from a center, then the layered
/// tree construction on it.
pub fn spanning_tree_baseline(g: &Graph, k: usize, f: &FParams) -> Result<MeasurementPlan> {
    let (_, center) = g.radius_and_center()?;
    let tree = g.bfs_spanning_tree(center)?;
    let edges = (0..g.node_count()).filter_map(|v| tree.parent[v].map(|p| (p, v)));
    let tree_graph = Graph::from_edges(g.node_count(), edges)?;
    let mut plan = construct_tree(&tree_graph, center, k, f)?;
    plan.method = Method::SpanningTree;
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::complete_rows;
    use crate::graph::{gen_ba, gen_complete, gen_er, gen_g4, gen_line, gen_ring, gen_tree_random};
    use crate::verify::check_feasibility;

    #[test]
    fn leaves_of_small_graphs() {
        let star = Graph::from_edges(6, (1..6).map(|v| (0, v))).unwrap();
        assert_eq!(leaves(&ReducedGraph::from(&star), 0).unwrap(), NodeSet::from([1, 2, 3, 4, 5]));

        let line = gen_line(5).unwrap();
        assert_eq!(leaves(&ReducedGraph::from(&line), 0).unwrap(), NodeSet::singleton(4));

        // Both ring branches from node 0: node 3 is claimed by node 2, so
        // node 4 ends up childless as well.
        let ring = gen_ring(6).unwrap();
        assert_eq!(leaves(&ReducedGraph::from(&ring), 0).unwrap(), NodeSet::from([3, 4]));
    }

    #[test]
    fn reduce_updates_bridges() {
        let line = gen_line(3).unwrap();
        let rg = ReducedGraph::from(&line);
        let (g2, h2) = reduce(&rg, 1, &HubMap::new()).unwrap();
        assert!(g2.has_edge(0, 2));
        assert_eq!(h2.get(0, 2), Some(&NodeSet::singleton(1)));

        // Triangle: neighbors already adjacent, nothing recorded.
        let tri = gen_ring(3).unwrap();
        let (g3, h3) = reduce(&ReducedGraph::from(&tri), 0, &HubMap::new()).unwrap();
        assert!(h3.is_empty());
        assert!(g3.has_edge(1, 2));

        // Degree-1 deletion adds nothing.
        let (g4, h4) = reduce(&ReducedGraph::from(&line), 0, &HubMap::new()).unwrap();
        assert!(h4.is_empty());
        assert_eq!(g4.alive_count(), 2);
    }

    #[test]
    fn chained_reduction_merges_bridges() {
        // Path 0-1-2-3; deleting 1 then 2 must record {1,2} for edge (0,3).
        let path = gen_line(4).unwrap();
        let rg = ReducedGraph::from(&path);
        let (g1, h1) = reduce(&rg, 1, &HubMap::new()).unwrap();
        let (g2, h2) = reduce(&g1, 2, &h1).unwrap();
        assert!(g2.has_edge(0, 3));
        assert_eq!(h2.get(0, 3), Some(&NodeSet::from([1, 2])));
    }

    #[test]
    fn algorithm1_single_node_and_star() {
        let single = Graph::from_edges(1, []).unwrap();
        let (plan, trace) = algorithm1(&single, 1, &FParams::default()).unwrap();
        assert_eq!(plan.row_count(), 1);
        assert_eq!(trace.iteration_count(), 0);

        let star = Graph::from_edges(8, (1..8).map(|v| (0, v))).unwrap();
        let (plan, trace) = algorithm1(&star, 1, &FParams::default()).unwrap();
        // Iteration 1: 7 leaves, f(1,7)+1 = 4 rows; then the center directly.
        assert_eq!(plan.row_count(), 5);
        assert_eq!(trace.iteration_count(), 1);
        assert_eq!(trace.group_sizes(), vec![7, 1]);
        assert!(check_feasibility(&star, &plan).unwrap().ok);
    }

    #[test]
    fn algorithm1_expands_rows_back_to_original() {
        // Ring: reduced-graph edges are synthetic, rows must pull bridges in.
        let ring = gen_ring(12).unwrap();
        let (plan, _) = algorithm1(&ring, 1, &FParams::default()).unwrap();
        assert!(check_feasibility(&ring, &plan).unwrap().ok);

        let g4 = gen_g4(16).unwrap();
        let (plan, trace) = algorithm1(&g4, 1, &FParams::default()).unwrap();
        assert!(check_feasibility(&g4, &plan).unwrap().ok);
        assert!(trace.iteration_count() <= trace.initial_radius + 1);
    }

    #[test]
    fn algorithm1_row_bound_on_random_graphs() {
        for seed_value in 0..10u64 {
            let g = match seed_value % 3 {
                0 => gen_tree_random(40, seed_value).unwrap(),
                1 => gen_ba(40, 5, 2, seed_value).unwrap(),
                _ => {
                    let n = 40;
                    let p = 2.5 * (n as f64).ln() / n as f64;
                    gen_er(n, p, seed_value).unwrap()
                }
            };
            if !g.is_connected() {
                continue;
            }
            let (radius, _) = g.radius_and_center().unwrap();
            let (plan, trace) = algorithm1(&g, 1, &FParams::with_seed(seed_value)).unwrap();
            let bound = radius * complete_rows(1, 40, 2.0) + radius + 1;
            assert!(plan.row_count() <= bound);
            assert!(trace.iteration_count() <= radius + 1);
            assert!(check_feasibility(&g, &plan).unwrap().ok);
            // Row count re-derivable from the trace.
            let from_trace: usize =
                trace.iterations.iter().map(|it| it.rows_emitted).sum::<usize>() + 1;
            assert_eq!(plan.row_count(), from_trace);
            plan.validate().unwrap();
            assert_eq!(plan.covered_nodes().len(), 40);
        }
    }

    #[test]
    fn spanning_tree_baseline_shapes() {
        // On a tree it coincides with the layered construction from a center.
        let t = gen_tree_random(30, 3).unwrap();
        let (_, center) = t.radius_and_center().unwrap();
        let f = FParams::with_seed(1);
        let baseline = spanning_tree_baseline(&t, 1, &f).unwrap();
        let direct = construct_tree(&t, center, 1, &f).unwrap();
        assert_eq!(baseline.rows, direct.rows);
        assert_eq!(baseline.groups, direct.groups);

        // Complete graph: depth-1 star, 1 + f(1, n-1) rows.
        let k8 = gen_complete(8).unwrap();
        let p = spanning_tree_baseline(&k8, 1, &f).unwrap();
        assert_eq!(p.row_count(), 1 + complete_rows(1, 7, 2.0));
        assert!(check_feasibility(&k8, &p).unwrap().ok);
    }

    #[test]
    fn pruned_radius_matches_brute_force() {
        // The pruning in radius_and_center must not change results, ties
        // (smallest id) included.
        for seed_value in 0..12u64 {
            let g = match seed_value % 4 {
                0 => gen_tree_random(60, seed_value).unwrap(),
                1 => gen_ba(60, 5, 2, seed_value).unwrap(),
                2 => gen_g4(40).unwrap(),
                _ => gen_er(50, 0.12, seed_value).unwrap(),
            };
            if !g.is_connected() {
                continue;
            }
            let mut rg = ReducedGraph::from(&g);
            let mut hubs = HubMap::new();
            for round in 0..3 {
                let brute = {
                    let mut best: Option<(usize, usize)> = None;
                    for &u in &rg.alive {
                        let (_, _, ecc) = rg.bfs_parents(u);
                        if best.map_or(true, |(r, _)| ecc < r) {
                            best = Some((ecc, u));
                        }
                    }
                    best.unwrap()
                };
                assert_eq!(rg.radius_and_center().unwrap(), brute, "seed {seed_value} round {round}");
                // Strip a few nodes to vary the graph shape.
                let victims: Vec<usize> = rg.alive.iter().copied().take(5).collect();
                for v in victims {
                    if rg.alive_count() > 8 {
                        rg.delete_with_completion(v, &mut hubs);
                    }
                }
            }
        }
    }

    #[test]
    fn trace_log_is_json_lines() {
        let g4 = gen_g4(10).unwrap();
        let (_, trace) = algorithm1(&g4, 1, &FParams::default()).unwrap();
        let log = trace.to_log();
        for line in log.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v.get("radius").is_some());
        }
    }
}
