//! Ground-truth oracles: measurement feasibility, exact k-sparse
//! identifiability (every 2k columns linearly independent, integer/rational
//! arithmetic, no floating tolerance), and exhaustive minimum-measurement
//! search for tiny instances.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::plan::{DenseMatrix, MeasurementPlan, Method, RowMeta};

/// Result of a feasibility scan over a plan's rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub ok: bool,
    /// First row whose support does not induce a connected subgraph.
    pub first_offending_row: Option<usize>,
    pub rows_checked: usize,
}

/// Check that every row of `plan` induces a connected subgraph of `g`.
pub fn check_feasibility(g: &Graph, plan: &MeasurementPlan) -> Result<FeasibilityReport> {
    if g.node_count() != plan.n {
        return Err(Error::DimensionMismatch { expected: plan.n, got: g.node_count() });
    }
    for (i, row) in plan.rows.iter().enumerate() {
        if !g.is_connected_subset(row)? {
            return Ok(FeasibilityReport {
                ok: false,
                first_offending_row: Some(i),
                rows_checked: i + 1,
            });
        }
    }
    Ok(FeasibilityReport { ok: true, first_offending_row: None, rows_checked: plan.rows.len() })
}

/// Identifiability verdict. `Unverifiable` means the subset count exceeded
/// the budget; it is never a silent pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Identifiable,
    NotIdentifiable,
    Unverifiable,
}

/// A certificate of non-identifiability: a dependent column subset and an
/// exact rational kernel vector supported on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub columns: Vec<usize>,
    /// Coefficients aligned with `columns`; satisfies `A z = 0` exactly.
    pub kernel: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentifiabilityReport {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub subsets_checked: u64,
}

impl fmt::Display for IdentifiabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::Identifiable => {
                write!(f, "identifiable ({} subsets checked)", self.subsets_checked)
            }
            Verdict::Unverifiable => write!(f, "unverifiable at this size"),
            Verdict::NotIdentifiable => {
                let w = self.witness.as_ref().expect("failing report carries a witness");
                write!(f, "NOT identifiable: columns {:?} admit kernel [", w.columns)?;
                for (i, q) in w.kernel.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{q}")?;
                }
                write!(f, "] ({} subsets checked)", self.subsets_checked)
            }
        }
    }
}

/// Budget for the subset enumeration. The pairwise k=1 check is cheap and
/// always runs; the general check bails out to `Unverifiable` when
/// `C(n, 2k)` exceeds `max_subsets`.
#[derive(Debug, Clone, Copy)]
pub struct OracleBudget {
    pub max_subsets: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        // Covers n <= 30 at k = 2 (27,405 subsets) and n <= 20 at k = 3 (38,760).
        OracleBudget { max_subsets: 50_000 }
    }
}

/// Columns packed as bit-words for fast slicing.
struct ColumnBits {
    m: usize,
    cols: Vec<Vec<u64>>,
}

impl ColumnBits {
    fn from_dense(a: &DenseMatrix) -> Self {
        let words = a.m.div_ceil(64).max(1);
        let mut cols = vec![vec![0u64; words]; a.n];
        for i in 0..a.m {
            for (j, col) in cols.iter_mut().enumerate() {
                if a.get(i, j) == 1 {
                    col[i / 64] |= 1 << (i % 64);
                }
            }
        }
        ColumnBits { m: a.m, cols }
    }

    fn n(&self) -> usize {
        self.cols.len()
    }

    fn is_zero(&self, j: usize) -> bool {
        self.cols[j].iter().all(|&w| w == 0)
    }

    fn equal(&self, i: usize, j: usize) -> bool {
        self.cols[i] == self.cols[j]
    }

    fn bit(&self, row: usize, col: usize) -> i64 {
        ((self.cols[col][row / 64] >> (row % 64)) & 1) as i64
    }

    /// The m x |subset| integer submatrix.
    fn submatrix(&self, subset: &[usize]) -> Vec<Vec<i64>> {
        (0..self.m)
            .map(|i| subset.iter().map(|&c| self.bit(i, c)).collect())
            .collect()
    }
}

/// Check that every `min(2k, n)` columns of the plan's matrix are linearly
/// independent (exact arithmetic). The witness, when present, is the
/// lexicographically smallest failing subset.
pub fn check_identifiability(
    plan: &MeasurementPlan,
    k: usize,
    budget: &OracleBudget,
) -> IdentifiabilityReport {
    check_matrix_identifiability(&plan.to_dense(), k, budget)
}

pub fn check_matrix_identifiability(
    a: &DenseMatrix,
    k: usize,
    budget: &OracleBudget,
) -> IdentifiabilityReport {
    assert!(k >= 1, "sparsity must be at least 1");
    let bits = ColumnBits::from_dense(a);
    let n = bits.n();
    if n == 0 {
        return IdentifiabilityReport {
            verdict: Verdict::Identifiable,
            witness: None,
            subsets_checked: 0,
        };
    }
    let d = (2 * k).min(n);
    if d == 1 {
        // Single column: identifiable iff nonzero.
        return if bits.is_zero(0) {
            IdentifiabilityReport {
                verdict: Verdict::NotIdentifiable,
                witness: Some(Witness { columns: vec![0], kernel: vec![BigRational::one()] }),
                subsets_checked: 1,
            }
        } else {
            IdentifiabilityReport {
                verdict: Verdict::Identifiable,
                witness: None,
                subsets_checked: 1,
            }
        };
    }
    if d == 2 {
        return check_pairs(&bits);
    }
    let total = binomial(n as u64, d as u64);
    if total > budget.max_subsets as u128 {
        return IdentifiabilityReport {
            verdict: Verdict::Unverifiable,
            witness: None,
            subsets_checked: 0,
        };
    }
    let mut checked = 0u64;
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        checked += 1;
        let sub = bits.submatrix(&subset);
        if rank_exact(&sub) < d {
            let kernel = kernel_vector(&sub).expect("rank-deficient submatrix has a kernel");
            return IdentifiabilityReport {
                verdict: Verdict::NotIdentifiable,
                witness: Some(Witness { columns: subset, kernel }),
                subsets_checked: checked,
            };
        }
        if !next_combination(&mut subset, n) {
            break;
        }
    }
    IdentifiabilityReport { verdict: Verdict::Identifiable, witness: None, subsets_checked: checked }
}

/// k = 1 fast path: 0-1 columns are pairwise independent iff all columns are
/// distinct and nonzero.
fn check_pairs(bits: &ColumnBits) -> IdentifiabilityReport {
    let n = bits.n();
    let mut checked = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            checked += 1;
            let (zi, zj) = (bits.is_zero(i), bits.is_zero(j));
            if zi || zj || bits.equal(i, j) {
                let kernel = if zi {
                    vec![BigRational::one(), BigRational::zero()]
                } else if zj {
                    vec![BigRational::zero(), BigRational::one()]
                } else {
                    vec![BigRational::one(), -BigRational::one()]
                };
                return IdentifiabilityReport {
                    verdict: Verdict::NotIdentifiable,
                    witness: Some(Witness { columns: vec![i, j], kernel }),
                    subsets_checked: checked,
                };
            }
        }
    }
    IdentifiabilityReport { verdict: Verdict::Identifiable, witness: None, subsets_checked: checked }
}

/// Brute-force cross-check: search for a nonzero rational kernel vector with
/// support of size at most 2k by enumerating supports of size 1..=2k.
/// Independent formulation of the same identifiability criterion.
pub fn kernel_search_brute(a: &DenseMatrix, k: usize) -> Option<Witness> {
    let bits = ColumnBits::from_dense(a);
    let n = bits.n();
    for t in 1..=(2 * k).min(n) {
        let mut subset: Vec<usize> = (0..t).collect();
        loop {
            let sub = bits.submatrix(&subset);
            if rank_exact(&sub) < t {
                let kernel = kernel_vector(&sub).expect("dependent support has a kernel");
                return Some(Witness { columns: subset, kernel });
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
    }
    None
}

/// Advance `subset` to the next combination of `0..n` in lexicographic
/// order. Returns false when exhausted.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let d = subset.len();
    let mut i = d;
    while i > 0 {
        i -= 1;
        if subset[i] < n - d + i {
            subset[i] += 1;
            for j in i + 1..d {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

/// Exact rank of a small integer matrix: Bareiss fraction-free elimination
/// over i128, redone with arbitrary precision on overflow.
pub fn rank_exact(mat: &[Vec<i64>]) -> usize {
    let work: Vec<Vec<i128>> = mat.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    match bareiss_rank_i128(work) {
        Some(rank) => rank,
        None => bareiss_rank_big(mat),
    }
}

fn bareiss_rank_i128(mut mat: Vec<Vec<i128>>) -> Option<usize> {
    let m = mat.len();
    if m == 0 {
        return Some(0);
    }
    let d = mat[0].len();
    let mut rank = 0usize;
    let mut prev: i128 = 1;
    for col in 0..d {
        let Some(p) = (rank..m).find(|&r| mat[r][col] != 0) else { continue };
        mat.swap(rank, p);
        for r in rank + 1..m {
            for c in col + 1..d {
                let num = mat[rank][col]
                    .checked_mul(mat[r][c])?
                    .checked_sub(mat[r][col].checked_mul(mat[rank][c])?)?;
                mat[r][c] = num / prev; // exact by the Bareiss identity
            }
            mat[r][col] = 0;
        }
        prev = mat[rank][col];
        rank += 1;
        if rank == m {
            break;
        }
    }
    Some(rank)
}

fn bareiss_rank_big(mat: &[Vec<i64>]) -> usize {
    let m = mat.len();
    if m == 0 {
        return 0;
    }
    let d = mat[0].len();
    let mut work: Vec<Vec<BigInt>> =
        mat.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut rank = 0usize;
    let mut prev = BigInt::one();
    for col in 0..d {
        let Some(p) = (rank..m).find(|&r| !work[r][col].is_zero()) else { continue };
        work.swap(rank, p);
        for r in rank + 1..m {
            for c in col + 1..d {
                let num = &work[rank][col] * &work[r][c] - &work[r][col] * &work[rank][c];
                work[r][c] = num / &prev;
            }
            work[r][col] = BigInt::zero();
        }
        prev = work[rank][col].clone();
        rank += 1;
        if rank == m {
            break;
        }
    }
    rank
}

/// A nonzero rational vector in the kernel of the given m x d matrix, or
/// `None` if the columns are independent. Gauss-Jordan over BigRational.
pub fn kernel_vector(mat: &[Vec<i64>]) -> Option<Vec<BigRational>> {
    let m = mat.len();
    let d = if m == 0 { return None } else { mat[0].len() };
    let mut a: Vec<Vec<BigRational>> = mat
        .iter()
        .map(|row| row.iter().map(|&x| BigRational::from(BigInt::from(x))).collect())
        .collect();
    // pivot_of_col[c] = row holding the pivot of column c
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; d];
    let mut row = 0usize;
    for col in 0..d {
        let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        let inv = a[row][col].clone();
        for c in col..d {
            a[row][c] = &a[row][c] / &inv;
        }
        for r in 0..m {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..d {
                    let sub = &a[row][c] * &f;
                    a[r][c] = &a[r][c] - &sub;
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == m {
            break;
        }
    }
    let free = (0..d).find(|&c| pivot_of_col[c].is_none())?;
    let mut z = vec![BigRational::zero(); d];
    z[free] = BigRational::one();
    for c in 0..d {
        if let Some(r) = pivot_of_col[c] {
            z[c] = -a[r][free].clone();
        }
    }
    Some(z)
}

/// Verify `A z = 0` exactly for a witness kernel (used by tests).
pub fn kernel_is_exact(mat: &[Vec<i64>], z: &[BigRational]) -> bool {
    mat.iter().all(|row| {
        let mut acc = BigRational::zero();
        for (x, zj) in row.iter().zip(z) {
            acc += BigRational::from(BigInt::from(*x)) * zj;
        }
        acc.is_zero()
    })
}

/// Exhaustively find the minimum number of feasible measurements that
/// identify all 1-sparse vectors on `g` (columns pairwise distinct and
/// nonzero), along with a witness plan. Only practical for n <= 8.
pub fn min_measurements_exhaustive(
    g: &Graph,
    max_m: usize,
) -> Result<(usize, MeasurementPlan)> {
    let n = g.node_count();
    if n == 0 || n > 8 {
        return Err(Error::InvalidParameter(format!(
            "exhaustive search supports 1 <= n <= 8, got {n}"
        )));
    }
    // All feasible rows as node bitmasks, ascending.
    let mut feasible: Vec<u16> = Vec::new();
    for mask in 1u16..(1 << n) {
        let set: NodeSet = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
        if g.is_connected_subset(&set)? {
            feasible.push(mask);
        }
    }
    for m in 1..=max_m {
        if let Some(rows) = search_rows(&feasible, n, m) {
            let mut plan = MeasurementPlan::new(n, 1, Method::Custom);
            for mask in rows {
                let set: NodeSet = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
                plan.push_row(
                    set,
                    RowMeta { group_id: None, is_hub_sum: false, hub_nodes: NodeSet::new() },
                );
            }
            return Ok((m, plan));
        }
    }
    Err(Error::InvalidParameter(format!("no identifying set of <= {max_m} feasible rows")))
}

/// Columns distinct and nonzero for some m-subset of feasible rows; returns
/// the first witness in lexicographic order.
fn search_rows(feasible: &[u16], n: usize, m: usize) -> Option<Vec<u16>> {
    if feasible.len() < m {
        return None;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let rows: Vec<u16> = idx.iter().map(|&i| feasible[i]).collect();
        if columns_distinct_nonzero(&rows, n) {
            return Some(rows);
        }
        if !next_combination(&mut idx, feasible.len()) {
            return None;
        }
    }
}

fn columns_distinct_nonzero(rows: &[u16], n: usize) -> bool {
    let mut seen = [false; 256];
    for j in 0..n {
        let mut pattern = 0usize;
        for (i, &mask) in rows.iter().enumerate() {
            if mask & (1 << j) != 0 {
                pattern |= 1 << i;
            }
        }
        if pattern == 0 || seen[pattern] {
            return false;
        }
        seen[pattern] = true;
    }
    true
}

/// For a plan whose rows are intervals on a line, count per node how many
/// rows have it as the first or last node. A singleton row counts its node
/// twice.
pub fn count_endpoints(plan: &MeasurementPlan) -> Result<Vec<usize>> {
    let mut counts = vec![0usize; plan.n];
    for (i, row) in plan.rows.iter().enumerate() {
        let (lo, hi) = (row.min().unwrap(), row.max().unwrap());
        if row.len() != hi - lo + 1 {
            return Err(Error::InvalidParameter(format!("row {i} is not an interval")));
        }
        counts[lo] += 1;
        counts[hi] += 1;
    }
    Ok(counts)
}
