//! Explicit measurement constructions: interval designs for lines and rings,
//! hub-based designs for chord-augmented rings, grids and trees, the
//! unconstrained (complete-graph) baseline they all build on, and the Markov
//! row sampler.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{gen_g4_minus, gen_grid, Graph, NodeSet};
use crate::plan::{Group, MeasurementPlan, Method, RowMeta};
use crate::seed;
use crate::verify::{check_matrix_identifiability, OracleBudget, Verdict};

/// Parameters for the unconstrained baseline blocks: budget factor for the
/// random row count, master seed, retry limit for the verify-and-retry loop,
/// and the identifiability-oracle budget.
#[derive(Debug, Clone, Copy)]
pub struct FParams {
    pub c: f64,
    pub seed: u64,
    pub retries: u32,
    pub oracle: OracleBudget,
}

impl Default for FParams {
    fn default() -> Self {
        FParams { c: 2.0, seed: 0, retries: 50, oracle: OracleBudget::default() }
    }
}

impl FParams {
    pub fn with_seed(seed: u64) -> Self {
        FParams { seed, ..Default::default() }
    }

    /// Sub-parameters for the `idx`-th block of a composite construction.
    fn block(&self, idx: u64) -> FParams {
        FParams { seed: seed::derive(self.seed, idx), ..*self }
    }
}

/// Row count f(k, n) of the baseline construction for the complete graph:
/// `ceil(log2(n+1))` binary-expansion rows for k = 1; for k >= 2 the random
/// budget `ceil(c * 2k * log2(n/(2k) + 2))`, capped at n (at which point n
/// direct measurements are used instead).
pub fn complete_rows(k: usize, n: usize, c: f64) -> usize {
    assert!(k >= 1);
    if n == 0 {
        return 0;
    }
    if k == 1 {
        return (usize::BITS - n.leading_zeros()) as usize;
    }
    let budget = (c * 2.0 * k as f64 * ((n as f64) / (2.0 * k as f64) + 2.0).log2()).ceil() as usize;
    budget.min(n)
}

fn meta_direct() -> RowMeta {
    RowMeta { group_id: None, is_hub_sum: false, hub_nodes: NodeSet::new() }
}

fn meta_group(gid: usize, hub: NodeSet) -> RowMeta {
    RowMeta { group_id: Some(gid), is_hub_sum: false, hub_nodes: hub }
}

fn meta_hub_sum(gid: usize) -> RowMeta {
    RowMeta { group_id: Some(gid), is_hub_sum: true, hub_nodes: NodeSet::new() }
}

/// Baseline for the complete graph (any node subset is feasible). For k = 1
/// the deterministic matrix whose column j is the binary expansion of j+1;
/// for k >= 2 a Bernoulli(1/2) matrix, regenerated until the
/// identifiability oracle passes. When the oracle budget is exceeded the
/// plan is returned with `oracle_checked = false`.
pub fn construct_complete(n: usize, k: usize, f: &FParams) -> Result<MeasurementPlan> {
    if n < 1 || k < 1 {
        return Err(Error::InvalidParameter(format!("complete needs n >= 1, k >= 1 (n={n}, k={k})")));
    }
    let mut plan = MeasurementPlan::new(n, k, Method::Complete);
    plan.groups.push(Group {
        member_nodes: (0..n).collect(),
        hub_sum_row: None,
        recovery_order: 0,
    });
    if k == 1 {
        let m = complete_rows(1, n, f.c);
        for bit in 0..m {
            let support: NodeSet = (0..n).filter(|&j| (j + 1) >> bit & 1 == 1).collect();
            plan.push_row(support, meta_group(0, NodeSet::new()));
        }
        return Ok(plan);
    }
    let m = complete_rows(k, n, f.c);
    if m >= n {
        // Direct measurements beat the random budget at this size.
        for j in 0..n {
            plan.push_row(NodeSet::singleton(j), meta_group(0, NodeSet::new()));
        }
        return Ok(plan);
    }
    for attempt in 0..f.retries {
        let mut rng = seed::rng(seed::derive(f.seed, attempt as u64));
        let mut candidate = plan.clone();
        for _ in 0..m {
            let support = loop {
                let s: NodeSet = (0..n).filter(|_| rng.random_bool(0.5)).collect();
                if !s.is_empty() {
                    break s;
                }
            };
            candidate.push_row(support, meta_group(0, NodeSet::new()));
        }
        let report = check_matrix_identifiability(&candidate.to_dense(), k, &f.oracle);
        match report.verdict {
            Verdict::Identifiable => return Ok(candidate),
            Verdict::Unverifiable => {
                candidate.oracle_checked = false;
                return Ok(candidate);
            }
            Verdict::NotIdentifiable => continue,
        }
    }
    Err(Error::RetriesExhausted(f.retries))
}

/// Interval construction for k-sparse recovery on a line or ring: with
/// t = ceil(n/(k+1)), row i (1-indexed) covers nodes i..min(i+t-1, n).
/// Nominal row count k*t+1; trailing rows whose interval falls entirely past
/// node n are degenerate and dropped, so the actual count is min(k*t+1, n).
pub fn construct_line_k(n: usize, k: usize) -> Result<MeasurementPlan> {
    if k < 2 {
        return Err(Error::InvalidParameter("line_k needs k >= 2 (use line_1 for k = 1)".into()));
    }
    if n < k + 1 {
        return Err(Error::InvalidParameter(format!("line_k needs n >= k+1 (n={n}, k={k})")));
    }
    let t = n.div_ceil(k + 1);
    let nominal = k * t + 1;
    let mut plan = MeasurementPlan::new(n, k, Method::LineK);
    plan.groups.push(Group {
        member_nodes: (0..n).collect(),
        hub_sum_row: None,
        recovery_order: 0,
    });
    for i in 1..=nominal.min(n) {
        let start = i - 1;
        let end = (i + t - 2).min(n - 1);
        plan.push_row((start..=end).collect(), meta_group(0, NodeSet::new()));
    }
    Ok(plan)
}

/// 1-sparse construction for a line: ceil((n+1)/2) chained intervals whose
/// columns are pairwise distinct and nonzero. Row t covers
/// {2t-1, 2t, 2t+1} clipped to the line.
pub fn construct_line_1(n: usize) -> Result<MeasurementPlan> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("line_1 needs n >= 2, got {n}")));
    }
    let m = (n + 2) / 2; // ceil((n+1)/2)
    let mut plan = MeasurementPlan::new(n, 1, Method::Line1);
    plan.groups.push(Group {
        member_nodes: (0..n).collect(),
        hub_sum_row: None,
        recovery_order: 0,
    });
    for t in 0..m {
        let lo = (2 * t).saturating_sub(1);
        let hi = (2 * t + 1).min(n - 1);
        plan.push_row((lo..=hi).collect(), meta_group(0, NodeSet::new()));
    }
    debug_assert_eq!(
        check_matrix_identifiability(&plan.to_dense(), 1, &OracleBudget::default()).verdict,
        Verdict::Identifiable
    );
    Ok(plan)
}

fn validate_hub(g: &Graph, target: &NodeSet, hub: &NodeSet) -> Result<()> {
    if target.is_empty() {
        return Err(Error::InvalidHub("target set is empty".into()));
    }
    if hub.is_empty() {
        return Err(Error::InvalidHub("hub set is empty".into()));
    }
    if !target.is_disjoint(hub) {
        return Err(Error::InvalidHub("target and hub overlap".into()));
    }
    if !g.is_connected_subset(hub)? {
        return Err(Error::InvalidHub("hub does not induce a connected subgraph".into()));
    }
    for u in target.iter() {
        if !g.neighbors(u).iter().any(|&s| hub.contains(s)) {
            return Err(Error::InvalidHub(format!("target node {u} has no neighbor in the hub")));
        }
    }
    Ok(())
}

/// One hub block: baseline patterns on the target, each row measuring
/// W union hub. With `measure_hub` a dedicated hub-sum row is emitted;
/// without it the hub values are expected to be known at recovery time.
fn hub_block(
    n: usize,
    target: &NodeSet,
    hub: &NodeSet,
    k: usize,
    f: &FParams,
    measure_hub: bool,
) -> Result<MeasurementPlan> {
    let mut plan = MeasurementPlan::new(n, k, Method::HubBased);
    plan.groups.push(Group {
        member_nodes: target.clone(),
        hub_sum_row: measure_hub.then_some(0),
        recovery_order: 0,
    });
    if measure_hub {
        plan.push_row(hub.clone(), meta_hub_sum(0));
    }
    let members: Vec<usize> = target.to_vec();
    let block = construct_complete(members.len(), k, f)?;
    plan.oracle_checked = block.oracle_checked;
    for pattern in &block.rows {
        let w: NodeSet = pattern.iter().map(|idx| members[idx]).collect();
        plan.push_row(w.union(hub), meta_group(0, hub.clone()));
    }
    Ok(plan)
}

/// Measure arbitrary subsets of `target` through a validated hub: one
/// hub-sum row plus f(k, |target|) combined rows.
pub fn construct_hub_based(
    g: &Graph,
    target: &NodeSet,
    hub: &NodeSet,
    k: usize,
    f: &FParams,
) -> Result<MeasurementPlan> {
    validate_hub(g, target, hub)?;
    hub_block(g.node_count(), target, hub, k, f, true)
}

/// Node ids split by parity: (ids congruent to 0 mod 2, ids congruent to 1).
fn parity_classes(n: usize) -> (NodeSet, NodeSet) {
    ((0..n).step_by(2).collect(), (1..n).step_by(2).collect())
}

/// Shared recipe for the four-neighbor ring with h deleted chords: the
/// chord midpoints in `deleted` are measured directly, then each parity
/// class (minus the midpoints) is recovered through the opposite class
/// (plus the midpoints of its own parity) as a hub.
fn g4_family(
    n: usize,
    deleted: &NodeSet,
    k: usize,
    f: &FParams,
    method: Method,
) -> Result<MeasurementPlan> {
    let g = gen_g4_minus(n, deleted)?;
    let (evens, odds) = parity_classes(n);
    let mut plan = MeasurementPlan::new(n, k, method);
    for v in deleted.iter() {
        plan.push_row(NodeSet::singleton(v), meta_direct());
    }
    // Class {1, 3, ...} first, then {0, 2, ...}; matches the plain
    // construction when nothing is deleted.
    let blocks = [
        (odds.minus(deleted), evens.union(&odds.intersect(deleted))),
        (evens.minus(deleted), odds.union(&evens.intersect(deleted))),
    ];
    for (i, (target, hub)) in blocks.into_iter().enumerate() {
        if target.is_empty() {
            continue;
        }
        validate_hub(&g, &target, &hub)?;
        plan.concat(hub_block(n, &target, &hub, k, &f.block(i as u64), true)?);
    }
    plan.method = method;
    Ok(plan)
}

/// Construction for the ring where every node connects to its four closest
/// neighbors: each parity class is a hub for the other.
pub fn construct_g4(n: usize, k: usize, f: &FParams) -> Result<MeasurementPlan> {
    g4_family(n, &NodeSet::new(), k, f, Method::G4)
}

/// Same with the chords named by the midpoints in `deleted` removed; the
/// midpoints are measured directly and patch the broken parity chains.
pub fn construct_g4_minus(
    n: usize,
    deleted: &NodeSet,
    k: usize,
    f: &FParams,
) -> Result<MeasurementPlan> {
    g4_family(n, deleted, k, f, Method::G4Minus)
}

/// Three-stage grid construction. Stage hubs: first row plus even columns,
/// first row plus odd columns; stage 3 recovers the first row through the
/// second row, whose values are already known, so no third hub-sum row.
pub fn construct_grid(side: usize, k: usize, f: &FParams) -> Result<MeasurementPlan> {
    let g = gen_grid(side)?;
    let n = side * side;
    let id = |r: usize, c: usize| r * side + c;
    let first_row: NodeSet = (0..side).map(|c| id(0, c)).collect();
    let even_cols: NodeSet = (0..side)
        .flat_map(|r| (0..side).step_by(2).map(move |c| id(r, c)))
        .collect();
    let odd_cols: NodeSet = (0..side)
        .flat_map(|r| (1..side).step_by(2).map(move |c| id(r, c)))
        .collect();
    let all: NodeSet = (0..n).collect();

    let s1 = first_row.union(&even_cols);
    let s2 = first_row.union(&odd_cols);
    let second_row: NodeSet = (0..side).map(|c| id(1, c)).collect();

    let mut plan = MeasurementPlan::new(n, k, Method::Grid);
    let stages = [
        (all.minus(&s1), s1, true),
        (all.minus(&s2), s2, true),
        (first_row, second_row, false),
    ];
    for (i, (target, hub, measure_hub)) in stages.into_iter().enumerate() {
        if target.is_empty() {
            continue;
        }
        validate_hub(&g, &target, &hub)?;
        plan.concat(hub_block(n, &target, &hub, k, &f.block(i as u64), measure_hub)?);
    }
    plan.method = Method::Grid;
    Ok(plan)
}

/// Layer-by-layer tree construction: the root is measured directly; a row
/// measuring W in layer i also measures the paths from W back to their
/// meeting vertex, and subtracts those already-recovered ancestors.
pub fn construct_tree(g: &Graph, root: usize, k: usize, f: &FParams) -> Result<MeasurementPlan> {
    let n = g.node_count();
    if g.edge_count() + 1 != n {
        return Err(Error::NotATree(format!("{} edges on {} nodes", g.edge_count(), n)));
    }
    let tree = g.bfs_spanning_tree(root).map_err(|_| Error::NotATree("disconnected".into()))?;
    let layers = tree.layers();
    let mut plan = MeasurementPlan::new(n, k, Method::Tree);
    for (depth, layer) in layers.iter().enumerate() {
        let gid = plan.groups.len();
        plan.groups.push(Group {
            member_nodes: layer.clone(),
            hub_sum_row: None,
            recovery_order: depth,
        });
        if depth == 0 {
            plan.push_row(NodeSet::singleton(root), meta_group(gid, NodeSet::new()));
            continue;
        }
        let members: Vec<usize> = layer.to_vec();
        let block = construct_complete(members.len(), k, &f.block(depth as u64))?;
        plan.oracle_checked &= block.oracle_checked;
        for pattern in &block.rows {
            let w: NodeSet = pattern.iter().map(|idx| members[idx]).collect();
            let hub = trace_to_meeting(&tree.parent, &w);
            plan.push_row(w.union(&hub), meta_group(gid, hub));
        }
    }
    Ok(plan)
}

/// Ancestors of the nodes in `w` (all at equal depth) up to and including
/// the first vertex where all the traced paths meet. Empty for a single
/// node, which is measurable on its own.
fn trace_to_meeting(parent: &[Option<usize>], w: &NodeSet) -> NodeSet {
    let mut hub = NodeSet::new();
    let mut current: BTreeSet<usize> = w.iter().collect();
    while current.len() > 1 {
        current = current
            .iter()
            .map(|&v| parent[v].expect("non-root nodes traced above the root"))
            .collect();
        for &v in &current {
            hub.insert(v);
        }
    }
    hub
}

/// Random feasible rows for the four-neighbor ring from the two-state chain
/// (a zero is always followed by a one, the first state is one): supports
/// never contain two adjacent gaps, hence stay connected through the chords.
pub fn sample_markov_rows(n: usize, num_rows: usize, seed_value: u64) -> Result<MeasurementPlan> {
    if n < 3 || num_rows < 1 {
        return Err(Error::InvalidParameter(format!(
            "markov sampler needs n >= 3 and num_rows >= 1 (n={n}, rows={num_rows})"
        )));
    }
    // Feasibility reference: ring plus two-step chords, deduplicated so the
    // tiny cases n = 3, 4 degenerate to complete graphs.
    let ring = (0..n).map(|i| (i, (i + 1) % n));
    let chords = (0..n).map(|i| (i, (i + 2) % n));
    let edges: BTreeSet<(usize, usize)> =
        ring.chain(chords).map(|(u, v)| (u.min(v), u.max(v))).collect();
    let g = Graph::from_edges(n, edges)?;

    let mut rng = seed::rng(seed_value);
    let mut plan = MeasurementPlan::new(n, 1, Method::Markov);
    plan.oracle_checked = false; // random rows, identifiability not certified
    plan.groups.push(Group {
        member_nodes: (0..n).collect(),
        hub_sum_row: None,
        recovery_order: 0,
    });
    for i in 0..num_rows {
        let mut support = NodeSet::singleton(0);
        let mut prev = true;
        for j in 1..n {
            let cur = if prev { rng.random_bool(0.5) } else { true };
            if cur {
                support.insert(j);
            }
            prev = cur;
        }
        if !g.is_connected_subset(&support)? {
            return Err(Error::InfeasibleRow { row: i });
        }
        plan.push_row(support, meta_group(0, NodeSet::new()));
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_g4, gen_line, gen_ring};
    use crate::verify::{check_feasibility, check_identifiability};

    fn oracle_ok(plan: &MeasurementPlan, k: usize) -> bool {
        check_identifiability(plan, k, &OracleBudget::default()).verdict == Verdict::Identifiable
    }

    #[test]
    fn line_k_shapes() {
        let p = construct_line_k(12, 2).unwrap();
        assert_eq!(p.row_count(), 9); // 2 * ceil(12/3) + 1
        assert_eq!(p.rows[0], NodeSet::from([0, 1, 2, 3]));
        assert!(oracle_ok(&p, 2));

        let p = construct_line_k(8, 2).unwrap();
        assert_eq!(p.row_count(), 7);
        assert!(oracle_ok(&p, 2));

        let p = construct_line_k(6, 5).unwrap();
        assert_eq!(p.row_count(), 6);
        assert!(p.rows.iter().all(|r| r.len() == 1));

        assert!(construct_line_k(5, 1).is_err());
        assert!(construct_line_k(2, 2).is_err());
    }

    #[test]
    fn line_k_degenerate_tail_is_dropped() {
        // t = 2, nominal 2*2+1 = 5 rows, but row 5 would start past the line.
        let p = construct_line_k(4, 2).unwrap();
        assert_eq!(p.row_count(), 4);
        assert!(p.rows.iter().all(|r| !r.is_empty()));
        assert!(oracle_ok(&p, 2));
    }

    #[test]
    fn line_k_rows_feasible_on_line_and_ring() {
        for (n, k) in [(12, 2), (9, 3), (16, 3)] {
            let p = construct_line_k(n, k).unwrap();
            assert!(check_feasibility(&gen_line(n).unwrap(), &p).unwrap().ok);
            assert!(check_feasibility(&gen_ring(n).unwrap(), &p).unwrap().ok);
        }
    }

    #[test]
    fn line_1_shapes() {
        let p = construct_line_1(5).unwrap();
        assert_eq!(p.row_count(), 3);
        assert_eq!(p.rows[0], NodeSet::from([0, 1]));
        assert_eq!(p.rows[1], NodeSet::from([1, 2, 3]));
        assert_eq!(p.rows[2], NodeSet::from([3, 4]));
        assert_eq!(construct_line_1(2).unwrap().row_count(), 2);
        assert_eq!(construct_line_1(4).unwrap().row_count(), 3);
        for n in 2..=40 {
            let p = construct_line_1(n).unwrap();
            assert_eq!(p.row_count(), (n + 2) / 2);
            assert!(check_feasibility(&gen_line(n).unwrap(), &p).unwrap().ok);
            assert!(oracle_ok(&p, 1));
        }
    }

    #[test]
    fn complete_binary_expansion() {
        let p = construct_complete(7, 1, &FParams::default()).unwrap();
        assert_eq!(p.row_count(), 3);
        let dense = p.to_dense();
        assert_eq!(dense.column(0), vec![1, 0, 0]); // node 0 encodes value 1
        assert_eq!(dense.column(6), vec![1, 1, 1]); // node 6 encodes value 7
        assert!(oracle_ok(&p, 1));

        let p1 = construct_complete(1, 1, &FParams::default()).unwrap();
        assert_eq!(p1.row_count(), 1);
        assert_eq!(p1.rows[0], NodeSet::singleton(0));
    }

    #[test]
    fn complete_random_block_verified() {
        // Budget 19 >= n for n = 12, so direct rows are used there.
        let p = construct_complete(12, 2, &FParams::with_seed(5)).unwrap();
        assert_eq!(p.row_count(), 12);
        assert!(oracle_ok(&p, 2));
        // n = 30 engages the random path (budget 26 < 30) and the oracle.
        let p = construct_complete(30, 2, &FParams::with_seed(5)).unwrap();
        assert_eq!(p.row_count(), complete_rows(2, 30, 2.0));
        assert!(p.row_count() < 30);
        assert!(p.oracle_checked);
        assert!(oracle_ok(&p, 2));
        assert_eq!(
            p,
            construct_complete(30, 2, &FParams::with_seed(5)).unwrap(),
            "same seed, same plan"
        );
    }

    #[test]
    fn complete_unverifiable_is_flagged() {
        let p = construct_complete(200, 2, &FParams::with_seed(1)).unwrap();
        assert!(!p.oracle_checked);
    }

    #[test]
    fn hub_based_counts() {
        let g = gen_g4(10).unwrap();
        let (evens, odds) = parity_classes(10);
        let p = construct_hub_based(&g, &odds, &evens, 1, &FParams::default()).unwrap();
        assert_eq!(p.row_count(), 1 + 3); // 1 hub row + ceil(log2(5+1))
        assert!(check_feasibility(&g, &p).unwrap().ok);
        assert!(p.row_meta[0].is_hub_sum);
        assert_eq!(p.rows[0], evens);
        for meta in &p.row_meta[1..] {
            assert_eq!(meta.hub_nodes, evens);
        }

        // Singleton target through a singleton hub: 2 rows.
        let line = gen_line(3).unwrap();
        let p = construct_hub_based(
            &line,
            &NodeSet::singleton(0),
            &NodeSet::singleton(1),
            1,
            &FParams::default(),
        )
        .unwrap();
        assert_eq!(p.row_count(), 2);

        // Invalid hub rejected.
        assert!(construct_hub_based(
            &line,
            &NodeSet::singleton(0),
            &NodeSet::singleton(2),
            1,
            &FParams::default()
        )
        .is_err());
    }

    #[test]
    fn g4_row_counts_and_feasibility() {
        let p = construct_g4(8, 1, &FParams::default()).unwrap();
        assert_eq!(p.row_count(), 8); // 2 * ceil(log2(4+1)) + 2
        assert!(check_feasibility(&gen_g4(8).unwrap(), &p).unwrap().ok);
        assert!(oracle_ok(&p, 1));
        assert_eq!(p.groups.len(), 2);
        assert_eq!(p.groups[0].member_nodes.len(), 4);
        assert_eq!(p.groups[1].member_nodes.len(), 4);

        let p9 = construct_g4(9, 1, &FParams::default()).unwrap();
        assert_eq!(p9.groups[0].member_nodes.len(), 4);
        assert_eq!(p9.groups[1].member_nodes.len(), 5);
        assert!(check_feasibility(&gen_g4(9).unwrap(), &p9).unwrap().ok);
        assert!(oracle_ok(&p9, 1));

        for n in [5usize, 6, 7, 11, 16] {
            for k in [1usize, 2] {
                let p = construct_g4(n, k, &FParams::with_seed(3)).unwrap();
                let f = |sz: usize| complete_rows(k, sz, 2.0);
                assert_eq!(p.row_count(), f(n / 2) + f(n.div_ceil(2)) + 2);
                assert!(check_feasibility(&gen_g4(n).unwrap(), &p).unwrap().ok);
            }
        }
    }

    #[test]
    fn g4_minus_structure() {
        let f = FParams::with_seed(2);
        // Empty deletion reduces to the plain construction.
        let a = construct_g4_minus(12, &NodeSet::new(), 1, &f).unwrap();
        let b = construct_g4(12, 1, &f).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.row_meta, b.row_meta);
        assert_eq!(a.groups, b.groups);

        // Three deleted chords: three direct rows plus two hub blocks.
        let d = NodeSet::from([3, 8, 9]);
        let p = construct_g4_minus(12, &d, 1, &f).unwrap();
        let g = gen_g4_minus(12, &d).unwrap();
        assert!(check_feasibility(&g, &p).unwrap().ok);
        assert!(oracle_ok(&p, 1));
        assert!(p.rows[..3].iter().all(|r| r.len() == 1));
        assert_eq!(p.groups.len(), 2);
        let bound = 2 * complete_rows(1, 6, 2.0) + 3 + 2;
        assert!(p.row_count() <= bound, "{} > {}", p.row_count(), bound);
    }

    #[test]
    fn grid_stage_sizes() {
        let p = construct_grid(4, 1, &FParams::default()).unwrap();
        let sizes: Vec<usize> = p.groups.iter().map(|g| g.member_nodes.len()).collect();
        assert_eq!(sizes, vec![6, 6, 4]);
        assert_eq!(p.groups[2].hub_sum_row, None);
        assert_eq!(p.groups[2].recovery_order, 2);
        assert!(check_feasibility(&gen_grid(4).unwrap(), &p).unwrap().ok);
        assert!(oracle_ok(&p, 1));
        // f(1,6)+1 + f(1,6)+1 + f(1,4)
        assert_eq!(p.row_count(), 3 + 1 + 3 + 1 + 3);

        let p2 = construct_grid(2, 1, &FParams::default()).unwrap();
        assert!(check_feasibility(&gen_grid(2).unwrap(), &p2).unwrap().ok);
        assert!(oracle_ok(&p2, 1));

        for side in [3usize, 5] {
            for k in [1usize, 2] {
                let p = construct_grid(side, k, &FParams::with_seed(9)).unwrap();
                assert!(check_feasibility(&gen_grid(side).unwrap(), &p).unwrap().ok);
            }
        }
    }

    #[test]
    fn tree_star_and_path() {
        // Star: root 0 with 7 leaves.
        let star = Graph::from_edges(8, (1..8).map(|v| (0, v))).unwrap();
        let p = construct_tree(&star, 0, 1, &FParams::default()).unwrap();
        assert_eq!(p.row_count(), 1 + 3);
        for (row, meta) in p.rows.iter().zip(&p.row_meta).skip(1) {
            if row.len() > 1 {
                assert_eq!(meta.hub_nodes, NodeSet::singleton(0));
            }
        }
        assert!(check_feasibility(&star, &p).unwrap().ok);
        assert!(oracle_ok(&p, 1));

        // Path rooted at the end: every layer has one node, one row each.
        let path = gen_line(5).unwrap();
        let p = construct_tree(&path, 0, 1, &FParams::default()).unwrap();
        assert_eq!(p.row_count(), 5);
        assert!(p.rows.iter().all(|r| r.len() == 1));

        assert!(construct_tree(&gen_ring(5).unwrap(), 0, 1, &FParams::default()).is_err());
    }

    #[test]
    fn tree_traceback_to_meeting_vertex() {
        // Root 0, children 1 and 2; layer 2 holds {3, 4, 5} under parents
        // 1, 2, 2. The pattern {3,5} must drag in both paths to the root.
        let g = Graph::from_edges(6, [(0, 1), (0, 2), (1, 3), (2, 4), (2, 5)]).unwrap();
        let p = construct_tree(&g, 0, 1, &FParams::default()).unwrap();
        let row = p
            .rows
            .iter()
            .position(|r| r.contains(3) && r.contains(5))
            .expect("binary patterns pair nodes 3 and 5");
        assert_eq!(p.rows[row], NodeSet::from([0, 1, 2, 3, 5]));
        assert_eq!(p.row_meta[row].hub_nodes, NodeSet::from([0, 1, 2]));
        // Sibling pattern {4,5} meets at node 2; nothing above it is dragged in.
        let sib = p
            .rows
            .iter()
            .position(|r| r.contains(4) && r.contains(5) && !r.contains(3))
            .expect("binary patterns pair nodes 4 and 5");
        assert_eq!(p.rows[sib], NodeSet::from([2, 4, 5]));
        assert_eq!(p.row_meta[sib].hub_nodes, NodeSet::singleton(2));
        assert!(check_feasibility(&g, &p).unwrap().ok);
        assert!(oracle_ok(&p, 1));
    }

    #[test]
    fn tree_row_count_is_layer_sum() {
        for seed in 0..5u64 {
            let g = crate::graph::gen_tree_random(40, seed).unwrap();
            let p = construct_tree(&g, 0, 1, &FParams::with_seed(seed)).unwrap();
            let tree = g.bfs_spanning_tree(0).unwrap();
            let expected: usize =
                tree.layers().iter().map(|l| complete_rows(1, l.len(), 2.0)).sum();
            assert_eq!(p.row_count(), expected);
            assert!(check_feasibility(&g, &p).unwrap().ok);
        }
    }

    #[test]
    fn markov_rows_have_no_adjacent_gaps() {
        let p = sample_markov_rows(20, 18, 7).unwrap();
        assert_eq!(p.row_count(), 18);
        let g = gen_g4(20).unwrap();
        assert!(check_feasibility(&g, &p).unwrap().ok);
        for row in &p.rows {
            assert!(row.contains(0), "first node always measured");
            for j in 0..19 {
                assert!(row.contains(j) || row.contains(j + 1), "two adjacent gaps at {j}");
            }
        }
        assert_eq!(sample_markov_rows(20, 18, 7).unwrap(), p);
    }
}
