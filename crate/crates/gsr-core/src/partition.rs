//! Node partitions where every group can be measured through its complement:
//! validation, partition-based measurement assembly, and the randomized
//! equal-halves construction for dense random graphs.

use std::fmt::Write as _;
use std::path::Path;

use crate::construct::{construct_hub_based, FParams};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::plan::{MeasurementPlan, Method};
use crate::seed;

/// Disjoint node groups claimed to cover the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub groups: Vec<NodeSet>,
}

impl Partition {
    pub fn new(groups: Vec<NodeSet>) -> Self {
        Partition { groups }
    }

    pub fn r(&self) -> usize {
        self.groups.len()
    }

    /// Well-formedness for a graph on n nodes: nonempty, disjoint groups
    /// whose union is all of 0..n.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = NodeSet::new();
        for (i, group) in self.groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::InvalidPartition(format!("group {i} is empty")));
            }
            for v in group.iter() {
                if v >= n {
                    return Err(Error::InvalidPartition(format!("node {v} out of range")));
                }
                if !seen.insert(v) {
                    return Err(Error::InvalidPartition(format!("node {v} in two groups")));
                }
            }
        }
        if seen.len() != n {
            return Err(Error::InvalidPartition(format!(
                "groups cover {} of {n} nodes",
                seen.len()
            )));
        }
        Ok(())
    }

    /// One line per group, node ids whitespace-separated.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for group in &self.groups {
            let ids: Vec<String> = group.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", ids.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut groups = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let group = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("line {}: bad node id `{tok}`", lineno + 1)))
                })
                .collect::<Result<NodeSet>>()?;
            groups.push(group);
        }
        Ok(Partition { groups })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Partition::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Why a partition check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionFailure {
    /// The complement of this group is not connected (or is empty).
    ComplementDisconnected { group: usize },
    /// This node has no neighbor outside its own group.
    NoOutsideNeighbor { group: usize, node: usize },
}

/// Check both conditions for every group: the complement induces a connected
/// subgraph, and every node of the group has a neighbor in the complement.
/// Returns the first violation when the partition is not valid.
pub fn check_r_partition(g: &Graph, partition: &Partition) -> Result<Option<PartitionFailure>> {
    partition.validate(g.node_count())?;
    let all = g.all_nodes();
    for (i, group) in partition.groups.iter().enumerate() {
        let complement = all.minus(group);
        if complement.is_empty() || !g.is_connected_subset(&complement)? {
            return Ok(Some(PartitionFailure::ComplementDisconnected { group: i }));
        }
        for u in group.iter() {
            if !g.neighbors(u).iter().any(|&s| complement.contains(s)) {
                return Ok(Some(PartitionFailure::NoOutsideNeighbor { group: i, node: u }));
            }
        }
    }
    Ok(None)
}

/// True iff every group's complement is a hub for it.
pub fn is_r_partition(g: &Graph, partition: &Partition) -> Result<bool> {
    Ok(check_r_partition(g, partition)?.is_none())
}

/// Assemble a plan from a valid partition: one hub block per group, the
/// complement serving as hub. Row count is sum of f(k, |group|) plus r.
pub fn construct_from_partition(
    g: &Graph,
    partition: &Partition,
    k: usize,
    f: &FParams,
) -> Result<MeasurementPlan> {
    if let Some(failure) = check_r_partition(g, partition)? {
        return Err(Error::InvalidPartition(format!("{failure:?}")));
    }
    let all = g.all_nodes();
    let mut plan = MeasurementPlan::new(g.node_count(), k, Method::Partition);
    for (i, group) in partition.groups.iter().enumerate() {
        let hub = all.minus(group);
        let sub = construct_hub_based(g, group, &hub, k, &FParams {
            seed: seed::derive(f.seed, i as u64),
            ..*f
        })?;
        plan.concat(sub);
    }
    plan.method = Method::Partition;
    Ok(plan)
}

/// Outcome of the randomized equal-halves search.
#[derive(Debug, Clone)]
pub struct TwoPartitionSearch {
    pub partition: Option<Partition>,
    /// Attempts consumed (== trials when the search failed).
    pub attempts: u32,
}

/// Sample random equal halves until one validates as a 2-partition. Each
/// trial reshuffles with a seed derived from (seed, trial). An explicit
/// failure after `trials` attempts lets callers fall back to the general
/// algorithm.
pub fn er_random_2partition(g: &Graph, seed_value: u64, trials: u32) -> Result<TwoPartitionSearch> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::InvalidParameter("2-partition needs n >= 2".into()));
    }
    for trial in 0..trials {
        let mut ids: Vec<usize> = (0..n).collect();
        let mut rng = seed::rng(seed::derive(seed_value, trial as u64));
        // Fisher-Yates
        for i in (1..n).rev() {
            let j = rand::Rng::random_range(&mut rng, 0..=i);
            ids.swap(i, j);
        }
        let half = n / 2;
        let partition = Partition::new(vec![
            ids[..half].iter().copied().collect(),
            ids[half..].iter().copied().collect(),
        ]);
        if is_r_partition(g, &partition)? {
            return Ok(TwoPartitionSearch { partition: Some(partition), attempts: trial + 1 });
        }
    }
    Ok(TwoPartitionSearch { partition: None, attempts: trials })
}
