//! The central artifact: a 0-1 measurement plan over a graph, with per-row
//! hub bookkeeping and ordered recovery groups.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};

/// Construction that produced a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Line1,
    LineK,
    Complete,
    HubBased,
    G4,
    G4Minus,
    Grid,
    Tree,
    Partition,
    Algorithm1,
    SpanningTree,
    Markov,
    Custom,
}

/// Per-row metadata.
///
/// `hub_nodes` is the set to subtract before the row contributes to its
/// group's subproblem: either via the group's hub-sum row or via values
/// already recovered in earlier groups. Empty for direct rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowMeta {
    /// Index into `groups`, or `None` for a directly-assigned singleton row.
    pub group_id: Option<usize>,
    pub is_hub_sum: bool,
    pub hub_nodes: NodeSet,
}

/// A recovery group: the columns it owns, its hub-sum row if it has one, and
/// its position in the recovery order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub member_nodes: NodeSet,
    pub hub_sum_row: Option<usize>,
    pub recovery_order: usize,
}

/// A 0-1 measurement plan: row supports plus the group structure needed to
/// decode group by group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    /// Column count (number of graph nodes).
    pub n: usize,
    /// Target sparsity the plan was designed for.
    pub k: usize,
    pub method: Method,
    /// Support of each row, sorted node ids.
    pub rows: Vec<NodeSet>,
    pub row_meta: Vec<RowMeta>,
    pub groups: Vec<Group>,
    /// False when some random block was too large for the identifiability
    /// oracle and is returned unverified.
    pub oracle_checked: bool,
}

impl MeasurementPlan {
    pub fn new(n: usize, k: usize, method: Method) -> Self {
        MeasurementPlan {
            n,
            k,
            method,
            rows: Vec::new(),
            row_meta: Vec::new(),
            groups: Vec::new(),
            oracle_checked: true,
        }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn push_row(&mut self, support: NodeSet, meta: RowMeta) {
        self.rows.push(support);
        self.row_meta.push(meta);
    }

    /// Append another plan's rows and groups, reindexing group ids, hub-sum
    /// row indices and recovery orders past this plan's.
    pub fn concat(&mut self, other: MeasurementPlan) {
        assert_eq!(self.n, other.n, "cannot concat plans over different n");
        let row_off = self.rows.len();
        let group_off = self.groups.len();
        let order_off = self.groups.iter().map(|g| g.recovery_order + 1).max().unwrap_or(0);
        for (support, mut meta) in other.rows.into_iter().zip(other.row_meta) {
            if let Some(gid) = meta.group_id.as_mut() {
                *gid += group_off;
            }
            self.push_row(support, meta);
        }
        for mut group in other.groups {
            if let Some(r) = group.hub_sum_row.as_mut() {
                *r += row_off;
            }
            group.recovery_order += order_off;
            self.groups.push(group);
        }
        self.oracle_checked &= other.oracle_checked;
    }

    /// Structural sanity: meta length, group indices, hub-sum flags, nonempty
    /// rows, disjoint groups, and (groups plus direct singletons) covering
    /// all nodes.
    pub fn validate(&self) -> Result<()> {
        if self.rows.len() != self.row_meta.len() {
            return Err(Error::InvalidParameter("rows/row_meta length mismatch".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::InvalidParameter(format!("row {i} is empty")));
            }
            if row.max().unwrap() >= self.n {
                return Err(Error::InvalidParameter(format!("row {i} out of range")));
            }
            if let Some(gid) = self.row_meta[i].group_id {
                if gid >= self.groups.len() {
                    return Err(Error::InvalidParameter(format!("row {i}: bad group id {gid}")));
                }
            }
        }
        let mut covered = NodeSet::new();
        for (gi, group) in self.groups.iter().enumerate() {
            if let Some(r) = group.hub_sum_row {
                if r >= self.rows.len() || !self.row_meta[r].is_hub_sum {
                    return Err(Error::InvalidParameter(format!(
                        "group {gi}: hub_sum_row {r} invalid or not flagged"
                    )));
                }
            }
            for v in group.member_nodes.iter() {
                if !covered.insert(v) {
                    return Err(Error::InvalidParameter(format!(
                        "node {v} belongs to more than one group"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Nodes covered by groups or by direct singleton rows.
    pub fn covered_nodes(&self) -> NodeSet {
        let mut covered = NodeSet::new();
        for group in &self.groups {
            covered = covered.union(&group.member_nodes);
        }
        for (row, meta) in self.rows.iter().zip(&self.row_meta) {
            if meta.group_id.is_none() && !meta.is_hub_sum && row.len() == 1 {
                covered.insert(row.min().unwrap());
            }
        }
        covered
    }

    /// Dense 0-1 view of the plan.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut data = vec![0u8; self.rows.len() * self.n];
        for (i, row) in self.rows.iter().enumerate() {
            for v in row.iter() {
                data[i * self.n + v] = 1;
            }
        }
        DenseMatrix { m: self.rows.len(), n: self.n, data }
    }

    /// y = A x.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().map(|v| x[v]).sum())
            .collect())
    }

    /// y = A x + noise, with caller-supplied per-row noise.
    pub fn apply_noisy(&self, x: &[f64], noise: &[f64]) -> Result<Vec<f64>> {
        if noise.len() != self.rows.len() {
            return Err(Error::DimensionMismatch { expected: self.rows.len(), got: noise.len() });
        }
        let mut y = self.apply(x)?;
        for (yi, wi) in y.iter_mut().zip(noise) {
            *yi += wi;
        }
        Ok(y)
    }

    /// True iff every row induces a connected subgraph of `g`.
    pub fn all_rows_feasible(&self, g: &Graph) -> Result<bool> {
        if g.node_count() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: g.node_count() });
        }
        for row in &self.rows {
            if !g.is_connected_subset(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let plan: MeasurementPlan = serde_json::from_str(text)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        MeasurementPlan::from_json(&text)
    }
}

/// Dense 0-1 matrix derived from a plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    pub m: usize,
    pub n: usize,
    data: Vec<u8>,
}

impl DenseMatrix {
    pub fn from_rows(m: usize, n: usize, rows: &[NodeSet]) -> Self {
        assert_eq!(rows.len(), m);
        let mut data = vec![0u8; m * n];
        for (i, row) in rows.iter().enumerate() {
            for v in row.iter() {
                data[i * n + v] = 1;
            }
        }
        DenseMatrix { m, n, data }
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.m).map(|i| self.get(i, j)).collect()
    }

    /// Row-major CSV of 0/1 integers.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.m {
            let line: Vec<&str> = self.row(i).iter().map(|&b| if b == 1 { "1" } else { "0" }).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<u8>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| match cell.trim() {
                    "0" => Ok(0u8),
                    "1" => Ok(1u8),
                    other => Err(Error::Parse(format!("line {}: bad cell `{other}`", lineno + 1))),
                })
                .collect::<Result<Vec<u8>>>()?;
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(Error::Parse(format!("line {}: ragged row", lineno + 1)));
                }
            }
            rows.push(row);
        }
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        Ok(DenseMatrix { m, n, data: rows.into_iter().flatten().collect() })
    }
}
