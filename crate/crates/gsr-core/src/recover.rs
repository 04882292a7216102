//! Sparse recovery from plan measurements: an equality-constrained l1 solver
//! (ADMM with projection onto the measurement-consistent affine set),
//! group-wise decoding with hub-sum subtraction, the augmented variant that
//! estimates per-hub measurement errors, and the closed-form 1-sparse
//! decoder for binary-expansion plans.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeSet;
use crate::plan::{DenseMatrix, MeasurementPlan};

/// Support threshold used when comparing recovered vectors.
pub const SUPPORT_TOL: f64 = 1e-8;

/// Real vector stored by its nonzero entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    pub n: usize,
    pub entries: BTreeMap<usize, f64>,
}

impl SparseVector {
    pub fn zero(n: usize) -> Self {
        SparseVector { n, entries: BTreeMap::new() }
    }

    /// Keep entries with magnitude strictly above `threshold`.
    pub fn from_dense(values: &[f64], threshold: f64) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > threshold)
            .map(|(i, v)| (i, *v))
            .collect();
        SparseVector { n: values.len(), entries }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (&i, &v) in &self.entries {
            out[i] = v;
        }
        out
    }

    pub fn support(&self) -> NodeSet {
        self.entries.keys().copied().collect()
    }

    pub fn l0(&self) -> usize {
        self.entries.len()
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.values().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `index,value` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (i, v) in &self.entries {
            let _ = writeln!(out, "{i},{v}");
        }
        out
    }

    pub fn from_csv(text: &str, n: usize) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (idx, val) = line.split_once(',').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `index,value`", lineno + 1))
            })?;
            let i: usize = idx
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad index", lineno + 1)))?;
            if i >= n {
                return Err(Error::Parse(format!("line {}: index {i} out of range", lineno + 1)));
            }
            let v: f64 = val
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad value", lineno + 1)))?;
            entries.insert(i, v);
        }
        Ok(SparseVector { n, entries })
    }
}

/// One value per line.
pub fn dense_to_csv(values: &[f64]) -> String {
    let mut out = String::new();
    for v in values {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn dense_from_csv(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<f64>().map_err(|_| Error::Parse(format!("bad value `{l}`"))))
        .collect()
}

/// l2 error and thresholded support agreement between two vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub l2_error: f64,
    pub support_match: bool,
}

pub fn compare(recovered: &SparseVector, truth: &SparseVector) -> Result<Comparison> {
    if recovered.n != truth.n {
        return Err(Error::DimensionMismatch { expected: truth.n, got: recovered.n });
    }
    let a = recovered.to_dense();
    let b = truth.to_dense();
    let l2_error = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let support_match = a
        .iter()
        .zip(&b)
        .all(|(x, y)| (x.abs() > SUPPORT_TOL) == (y.abs() > SUPPORT_TOL));
    Ok(Comparison { l2_error, support_match })
}

/// Solution of one basis-pursuit solve.
#[derive(Debug, Clone)]
pub struct BpSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

const MAX_BP_ITERATIONS: usize = 100_000;

/// Minimize ||x||_1 subject to A x = y, for a 0-1 plan matrix. Wrapper over
/// the real-valued solver. Non-convergence within the iteration cap is
/// reported through the `converged` flag, never silently.
pub fn solve_basis_pursuit(a: &DenseMatrix, y: &[f64], tol: f64) -> Result<BpSolution> {
    if y.len() != a.m {
        return Err(Error::DimensionMismatch { expected: a.m, got: y.len() });
    }
    let mat = DMatrix::from_fn(a.m, a.n, |i, j| a.get(i, j) as f64);
    bp_admm(&mat, &DVector::from_column_slice(y), tol)
}

enum Projector {
    Chol(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Pinv(DMatrix<f64>),
}

impl Projector {
    fn solve_in_place(&self, rhs: &mut DVector<f64>) {
        match self {
            Projector::Chol(c) => c.solve_mut(rhs),
            Projector::Pinv(p) => {
                let tmp = p * &*rhs;
                rhs.copy_from(&tmp);
            }
        }
    }
}

/// ADMM for min ||z||_1 s.t. x in {A x = y}, x = z  (scaled dual form),
/// with over-relaxation, residual-balancing step size, and an opportunistic
/// least-squares polish on the detected support. The returned iterate is the
/// projected (exactly feasible) one.
pub fn bp_admm(a: &DMatrix<f64>, y: &DVector<f64>, tol: f64) -> Result<BpSolution> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter("solver tolerance must be positive".into()));
    }
    let (m, n) = (a.nrows(), a.ncols());
    if y.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: y.len() });
    }
    if y.norm() == 0.0 {
        return Ok(BpSolution {
            x: vec![0.0; n],
            iterations: 0,
            converged: true,
            primal_residual: 0.0,
            dual_residual: 0.0,
        });
    }
    let aat = a * a.transpose();
    let projector = match nalgebra::Cholesky::new(aat.clone()) {
        Some(c) => Projector::Chol(c),
        None => Projector::Pinv(
            aat.pseudo_inverse(1e-12)
                .map_err(|e| Error::InvalidParameter(format!("projection failed: {e}")))?,
        ),
    };

    let alpha = 1.6; // over-relaxation
    let mut rho = 1.0f64;
    let mut x = DVector::<f64>::zeros(n);
    let mut z = DVector::<f64>::zeros(n);
    let mut u = DVector::<f64>::zeros(n);
    let mut v = DVector::<f64>::zeros(n);
    let mut t = DVector::<f64>::zeros(m);
    let mut best: Option<BpSolution> = None;

    for iter in 1..=MAX_BP_ITERATIONS {
        // x = v + A^T (AA^T)^{-1} (y - A v), the projection of v onto Ax = y.
        v.copy_from(&z);
        v -= &u;
        t.copy_from(y);
        t.gemv(-1.0, a, &v, 1.0);
        projector.solve_in_place(&mut t);
        x.copy_from(&v);
        x.gemv_tr(1.0, a, &t, 1.0);

        let mut dual_delta = 0.0f64;
        let mut primal = 0.0f64;
        let kappa = 1.0 / rho;
        for i in 0..n {
            let xh = alpha * x[i] + (1.0 - alpha) * z[i];
            let w = xh + u[i];
            let z_new = if w > kappa {
                w - kappa
            } else if w < -kappa {
                w + kappa
            } else {
                0.0
            };
            dual_delta += (z_new - z[i]) * (z_new - z[i]);
            u[i] = w - z_new;
            z[i] = z_new;
            let d = x[i] - z_new;
            primal += d * d;
        }
        let primal_residual = primal.sqrt();
        let dual_residual = rho * dual_delta.sqrt();

        let eps_pri = tol * (1.0 + x.norm().max(z.norm()));
        let eps_dual = tol * (1.0 + rho * u.norm());
        let converged = primal_residual <= eps_pri && dual_residual <= eps_dual;

        if converged || iter % 50 == 0 {
            if let Some(polished) = try_polish(a, y, &z, &x, tol) {
                return Ok(BpSolution { iterations: iter, ..polished });
            }
        }
        if converged {
            return Ok(BpSolution {
                x: x.iter().copied().collect(),
                iterations: iter,
                converged: true,
                primal_residual,
                dual_residual,
            });
        }
        best = Some(BpSolution {
            x: x.iter().copied().collect(),
            iterations: iter,
            converged: false,
            primal_residual,
            dual_residual,
        });

        // Residual balancing keeps the two residuals within a decade.
        if iter % 25 == 0 && iter <= 10_000 {
            if primal_residual > 10.0 * dual_residual && rho < 1e6 {
                rho *= 2.0;
                u /= 2.0;
            } else if dual_residual > 10.0 * primal_residual && rho > 1e-4 {
                rho /= 2.0;
                u *= 2.0;
            }
        }
    }
    Ok(best.expect("at least one iteration ran"))
}

/// Least-squares refit on the support of the sparse iterate. Accepted only
/// when the refit reproduces y to solver precision without increasing the
/// l1 norm over the current feasible iterate, so the basis-pursuit contract
/// is preserved.
fn try_polish(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
    x_feasible: &DVector<f64>,
    tol: f64,
) -> Option<BpSolution> {
    let n = a.ncols();
    let zmax = z.amax();
    if zmax == 0.0 {
        return None;
    }
    let thr = 1e-6 * zmax.max(1.0);
    let support: Vec<usize> = (0..n).filter(|&i| z[i].abs() > thr).collect();
    if support.is_empty() || support.len() > a.nrows() {
        return None;
    }
    let a_s = a.select_columns(support.iter());
    let gram = a_s.transpose() * &a_s;
    let chol = nalgebra::Cholesky::new(gram)?;
    let x_s = chol.solve(&(a_s.transpose() * y));
    let residual = (&a_s * &x_s - y).norm();
    if residual > tol.max(1e-10) * (1.0 + y.norm()) {
        return None;
    }
    let l1: f64 = x_s.iter().map(|v| v.abs()).sum();
    let l1_feasible: f64 = x_feasible.iter().map(|v| v.abs()).sum();
    if l1 > l1_feasible + tol * (1.0 + l1_feasible) {
        return None;
    }
    let mut x = vec![0.0; n];
    for (idx, &col) in support.iter().enumerate() {
        x[col] = x_s[idx];
    }
    Some(BpSolution {
        x,
        iterations: 0,
        converged: true,
        primal_residual: residual,
        dual_residual: 0.0,
    })
}

/// Recovery outcome for one group.
#[derive(Debug, Clone, Serialize)]
pub struct GroupStatus {
    pub group_id: usize,
    pub members: usize,
    pub rows: usize,
    pub converged: bool,
    pub iterations: usize,
}

/// Recovered vector with per-hub error estimates and the full-plan residual.
#[derive(Debug, Clone, Serialize)]
pub struct RecoveryResult {
    pub x_recovered: SparseVector,
    /// Estimated measurement error per hub-sum row index.
    pub hub_error_estimates: BTreeMap<usize, f64>,
    pub residual_l2: f64,
    pub per_group_status: Vec<GroupStatus>,
}

impl RecoveryResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Group-wise decoding: direct singleton rows are copied verbatim; each
/// group's rows are cleared of their hub contribution (via the hub-sum
/// measurement, or via already-recovered hub values when the group has no
/// hub-sum row) and the group subvector is recovered by l1-minimization.
pub fn recover_groupwise(plan: &MeasurementPlan, y: &[f64], tol: f64) -> Result<RecoveryResult> {
    recover_inner(plan, y, tol, false)
}

/// Same as [`recover_groupwise`], but every group with a hub-sum row gets
/// one extra unknown: the error in that hub measurement. The augmented
/// subproblem solves for the group subvector and the error jointly, so a
/// corrupted hub measurement no longer poisons the whole group.
pub fn recover_with_hub_errors(
    plan: &MeasurementPlan,
    y: &[f64],
    tol: f64,
) -> Result<RecoveryResult> {
    if plan.groups.iter().all(|g| g.hub_sum_row.is_none()) {
        return Err(Error::InvalidParameter(
            "hub-error recovery needs at least one hub-sum row".into(),
        ));
    }
    recover_inner(plan, y, tol, true)
}

fn recover_inner(
    plan: &MeasurementPlan,
    y: &[f64],
    tol: f64,
    hub_errors: bool,
) -> Result<RecoveryResult> {
    if y.len() != plan.row_count() {
        return Err(Error::DimensionMismatch { expected: plan.row_count(), got: y.len() });
    }
    plan.validate()?;
    let n = plan.n;
    let mut x_hat = vec![0.0; n];
    let mut recovered = vec![false; n];
    let mut hub_error_estimates = BTreeMap::new();
    let mut per_group_status = Vec::new();

    // Direct rows first: they are exact and never depend on anything.
    for (i, (row, meta)) in plan.rows.iter().zip(&plan.row_meta).enumerate() {
        if meta.group_id.is_none() && !meta.is_hub_sum {
            if row.len() != 1 {
                return Err(Error::InvalidParameter(format!(
                    "ungrouped row {i} is not a singleton"
                )));
            }
            let v = row.min().unwrap();
            x_hat[v] = y[i];
            recovered[v] = true;
        }
    }

    let mut order: Vec<usize> = (0..plan.groups.len()).collect();
    order.sort_by_key(|&g| (plan.groups[g].recovery_order, g));

    for gid in order {
        let group = &plan.groups[gid];
        let members: Vec<usize> = group.member_nodes.to_vec();
        if members.is_empty() {
            continue;
        }
        let row_ids: Vec<usize> = (0..plan.row_count())
            .filter(|&i| plan.row_meta[i].group_id == Some(gid) && !plan.row_meta[i].is_hub_sum)
            .collect();
        if row_ids.is_empty() {
            return Err(Error::InvalidParameter(format!("group {gid} has no measurement rows")));
        }
        let col_of: BTreeMap<usize, usize> =
            members.iter().enumerate().map(|(c, &v)| (v, c)).collect();
        let augment = hub_errors && group.hub_sum_row.is_some();
        let cols = members.len() + usize::from(augment);
        let mut a_sub = DMatrix::<f64>::zeros(row_ids.len(), cols);
        let mut y_sub = DVector::<f64>::zeros(row_ids.len());
        for (r, &i) in row_ids.iter().enumerate() {
            let meta = &plan.row_meta[i];
            let mut rhs = y[i];
            match group.hub_sum_row {
                Some(h) => {
                    debug_assert_eq!(&meta.hub_nodes, &plan.rows[h]);
                    rhs -= y[h];
                }
                None => {
                    for v in meta.hub_nodes.iter() {
                        if !recovered[v] {
                            return Err(Error::OrderingViolation(format!(
                                "group {gid} row {i} needs node {v} before it is recovered"
                            )));
                        }
                        rhs -= x_hat[v];
                    }
                }
            }
            for v in plan.rows[i].minus(&meta.hub_nodes).iter() {
                let Some(&c) = col_of.get(&v) else {
                    return Err(Error::InvalidParameter(format!(
                        "row {i} measures node {v} outside its group"
                    )));
                };
                a_sub[(r, c)] = 1.0;
            }
            if augment {
                // y_row - y_hub = sum_W x - e_hub
                a_sub[(r, members.len())] = -1.0;
            }
            y_sub[r] = rhs;
        }
        let solution = bp_admm(&a_sub, &y_sub, tol)?;
        for (c, &v) in members.iter().enumerate() {
            x_hat[v] = solution.x[c];
            recovered[v] = true;
        }
        if augment {
            hub_error_estimates
                .insert(group.hub_sum_row.unwrap(), solution.x[members.len()]);
        }
        per_group_status.push(GroupStatus {
            group_id: gid,
            members: members.len(),
            rows: row_ids.len(),
            converged: solution.converged,
            iterations: solution.iterations,
        });
    }

    // Residual over the full plan, hub-error estimates included.
    let mut predicted = plan.apply(&x_hat)?;
    for (&row, &e) in &hub_error_estimates {
        predicted[row] += e;
    }
    let residual_l2 = predicted
        .iter()
        .zip(y)
        .map(|(p, obs)| (p - obs) * (p - obs))
        .sum::<f64>()
        .sqrt();

    Ok(RecoveryResult {
        x_recovered: SparseVector::from_dense(&x_hat, 0.0),
        hub_error_estimates,
        residual_l2,
        per_group_status,
    })
}

/// Closed-form decoder for the k = 1 binary-expansion plan: the set of
/// nonzero measurements spells the measured node's code, and their common
/// value is its entry. Errors when y cannot come from a 1-sparse vector.
pub fn decode_1sparse_binary(plan: &MeasurementPlan, y: &[f64]) -> Result<SparseVector> {
    if y.len() != plan.row_count() {
        return Err(Error::DimensionMismatch { expected: plan.row_count(), got: y.len() });
    }
    let n = plan.n;
    let expected_rows = (usize::BITS - n.leading_zeros()) as usize;
    if plan.row_count() != expected_rows {
        return Err(Error::InvalidParameter(
            "plan is not a binary-expansion 1-sparse design".into(),
        ));
    }
    for (bit, row) in plan.rows.iter().enumerate() {
        let expected: NodeSet = (0..n).filter(|&j| (j + 1) >> bit & 1 == 1).collect();
        if *row != expected {
            return Err(Error::InvalidParameter(
                "plan is not a binary-expansion 1-sparse design".into(),
            ));
        }
    }
    let nonzero: Vec<usize> = (0..y.len()).filter(|&i| y[i] != 0.0).collect();
    if nonzero.is_empty() {
        return Ok(SparseVector::zero(n));
    }
    let value = y[nonzero[0]];
    for &i in &nonzero {
        if (y[i] - value).abs() > 1e-12 * value.abs().max(1.0) {
            return Err(Error::Inconsistent(format!(
                "rows {} and {} disagree ({} vs {})",
                nonzero[0], i, value, y[i]
            )));
        }
    }
    let code: usize = nonzero.iter().map(|&i| 1usize << i).sum();
    if code > n {
        return Err(Error::Inconsistent(format!("code {code} exceeds node count {n}")));
    }
    let node = code - 1;
    Ok(SparseVector { n, entries: BTreeMap::from([(node, value)]) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{
        construct_complete, construct_g4, construct_grid, construct_tree, FParams,
    };
    use crate::graph::gen_tree_random;
    use crate::plan::{Method, RowMeta};
    use crate::seed;
    use rand::Rng;

    fn sparse(n: usize, pairs: &[(usize, f64)]) -> SparseVector {
        SparseVector { n, entries: pairs.iter().copied().collect() }
    }

    #[test]
    fn bp_zero_and_identity() {
        let mut plan = MeasurementPlan::new(3, 1, Method::Custom);
        for v in 0..3 {
            plan.push_row(
                NodeSet::singleton(v),
                RowMeta { group_id: None, is_hub_sum: false, hub_nodes: NodeSet::new() },
            );
        }
        let a = plan.to_dense();
        let sol = solve_basis_pursuit(&a, &[0.0, 0.0, 0.0], 1e-9).unwrap();
        assert_eq!(sol.x, vec![0.0; 3]);
        let sol = solve_basis_pursuit(&a, &[1.5, -2.0, 0.25], 1e-9).unwrap();
        assert!(sol.converged);
        for (got, want) in sol.x.iter().zip([1.5, -2.0, 0.25]) {
            assert!((got - want).abs() < 1e-7, "{got} vs {want}");
        }
    }

    #[test]
    fn bp_recovers_sparse_from_random_rows() {
        let mut rng = seed::rng(77);
        let m = 40;
        let n = 100;
        let a = DMatrix::from_fn(m, n, |_, _| if rng.random_bool(0.5) { 1.0 } else { 0.0 });
        let mut x0 = DVector::zeros(n);
        x0[13] = 1.2;
        x0[55] = -0.7;
        x0[90] = 0.4;
        let y = &a * &x0;
        let sol = bp_admm(&a, &y, 1e-9).unwrap();
        assert!(sol.converged);
        let err: f64 = sol
            .x
            .iter()
            .zip(x0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-6, "recovery error {err}");
    }

    #[test]
    fn bp_l1_never_beaten_by_feasible_truth() {
        let mut rng = seed::rng(3);
        for trial in 0..5u64 {
            let m = 25;
            let n = 60;
            let a = DMatrix::from_fn(m, n, |_, _| if rng.random_bool(0.5) { 1.0 } else { 0.0 });
            let mut x0 = DVector::zeros(n);
            for j in 0..4 {
                x0[(trial as usize * 7 + j * 13) % n] = rng.random_range(-1.0..1.0);
            }
            let y = &a * &x0;
            let sol = bp_admm(&a, &y, 1e-8).unwrap();
            let l1_sol: f64 = sol.x.iter().map(|v| v.abs()).sum();
            let l1_x0: f64 = x0.iter().map(|v| v.abs()).sum();
            assert!(l1_sol <= l1_x0 + 1e-6, "{l1_sol} > {l1_x0}");
        }
    }

    #[test]
    fn groupwise_g4_exact() {
        let plan = construct_g4(8, 1, &FParams::with_seed(1)).unwrap();
        let mut x = vec![0.0; 8];
        x[2] = 1.0;
        let y = plan.apply(&x).unwrap();
        let result = recover_groupwise(&plan, &y, 1e-9).unwrap();
        let cmp = compare(&result.x_recovered, &sparse(8, &[(2, 1.0)])).unwrap();
        assert!(cmp.l2_error < 1e-7);
        assert!(cmp.support_match);
        assert!(result.residual_l2 < 1e-7);
    }

    #[test]
    fn groupwise_zero_everywhere() {
        let g = gen_tree_random(15, 2).unwrap();
        let plan = construct_tree(&g, 0, 1, &FParams::with_seed(2)).unwrap();
        let y = plan.apply(&vec![0.0; 15]).unwrap();
        let result = recover_groupwise(&plan, &y, 1e-9).unwrap();
        assert_eq!(result.x_recovered.l0(), 0);
    }

    #[test]
    fn grid_stage3_uses_known_hub() {
        let plan = construct_grid(4, 1, &FParams::with_seed(3)).unwrap();
        // 1-sparse in the first grid row, recovered in the last stage.
        let mut x = vec![0.0; 16];
        x[2] = -0.8;
        let y = plan.apply(&x).unwrap();
        let result = recover_groupwise(&plan, &y, 1e-9).unwrap();
        let cmp = compare(&result.x_recovered, &sparse(16, &[(2, -0.8)])).unwrap();
        assert!(cmp.l2_error < 1e-7, "error {}", cmp.l2_error);
    }

    #[test]
    fn tree_layers_recover_in_order() {
        let g = gen_tree_random(25, 9).unwrap();
        let plan = construct_tree(&g, 0, 1, &FParams::with_seed(9)).unwrap();
        let mut x = vec![0.0; 25];
        x[17] = 2.0;
        let y = plan.apply(&x).unwrap();
        let result = recover_groupwise(&plan, &y, 1e-9).unwrap();
        let cmp = compare(&result.x_recovered, &sparse(25, &[(17, 2.0)])).unwrap();
        assert!(cmp.l2_error < 1e-6, "error {}", cmp.l2_error);
    }

    /// Two groups hubbing for each other, half-size random row blocks: the
    /// shape used when hub errors are in play (log-sized blocks leave the
    /// augmented subproblem underdetermined).
    fn two_hub_plan(half: usize, seed_value: u64) -> MeasurementPlan {
        let n = 2 * half;
        let mut rng = seed::rng(seed_value);
        let mut plan = MeasurementPlan::new(n, 2, Method::Custom);
        for (gid, (lo, hi)) in [(0, half), (half, n)].into_iter().enumerate() {
            let members: NodeSet = (lo..hi).collect();
            let hub: NodeSet = (0..n).filter(|v| !members.contains(*v)).collect();
            plan.groups.push(crate::plan::Group {
                member_nodes: members.clone(),
                hub_sum_row: Some(plan.row_count()),
                recovery_order: gid,
            });
            plan.push_row(
                hub.clone(),
                RowMeta { group_id: Some(gid), is_hub_sum: true, hub_nodes: NodeSet::new() },
            );
            for _ in 0..half.div_ceil(2) {
                let w: NodeSet = members.iter().filter(|_| rng.random_bool(0.5)).collect();
                plan.push_row(
                    w.union(&hub),
                    RowMeta { group_id: Some(gid), is_hub_sum: false, hub_nodes: hub.clone() },
                );
            }
        }
        plan
    }

    #[test]
    fn hub_error_column_absorbs_injected_error() {
        let plan = two_hub_plan(25, 3);
        let mut x = vec![0.0; 50];
        x[5] = 1.0;
        x[32] = -0.6;
        let mut y = plan.apply(&x).unwrap();
        // Corrupt both hub measurements.
        let hub_rows: Vec<usize> =
            plan.groups.iter().filter_map(|g| g.hub_sum_row).collect();
        y[hub_rows[0]] += 0.9;
        y[hub_rows[1]] -= 0.3;

        let truth = sparse(50, &[(5, 1.0), (32, -0.6)]);
        let plain = recover_groupwise(&plan, &y, 1e-9).unwrap();
        let plain_err = compare(&plain.x_recovered, &truth).unwrap().l2_error;
        assert!(plain_err > 0.2, "hub error should poison plain recovery, got {plain_err}");

        let fixed = recover_with_hub_errors(&plan, &y, 1e-9).unwrap();
        let fixed_err = compare(&fixed.x_recovered, &truth).unwrap().l2_error;
        assert!(fixed_err < 1e-6, "augmented recovery error {fixed_err}");
        assert!((fixed.hub_error_estimates[&hub_rows[0]] - 0.9).abs() < 1e-6);
        assert!((fixed.hub_error_estimates[&hub_rows[1]] + 0.3).abs() < 1e-6);
        assert!(fixed.residual_l2 < 1e-6);
    }

    #[test]
    fn hub_error_recovery_matches_plain_when_clean() {
        let plan = construct_g4(10, 1, &FParams::with_seed(6)).unwrap();
        let mut x = vec![0.0; 10];
        x[3] = -1.5;
        let y = plan.apply(&x).unwrap();
        let tol = 1e-9;
        let plain = recover_groupwise(&plan, &y, tol).unwrap();
        let augmented = recover_with_hub_errors(&plan, &y, tol).unwrap();
        let delta = compare(&augmented.x_recovered, &plain.x_recovered).unwrap().l2_error;
        assert!(delta <= 10.0 * tol.max(1e-7), "methods disagree by {delta}");
        for e in augmented.hub_error_estimates.values() {
            assert!(e.abs() < 1e-6);
        }
    }

    #[test]
    fn decode_binary_expansion() {
        let plan = construct_complete(7, 1, &FParams::default()).unwrap();
        let mut x = vec![0.0; 7];
        x[2] = 5.0; // node 2 encodes value 3 = 011
        let y = plan.apply(&x).unwrap();
        let decoded = decode_1sparse_binary(&plan, &y).unwrap();
        assert_eq!(decoded.entries, BTreeMap::from([(2, 5.0)]));

        assert_eq!(decode_1sparse_binary(&plan, &[0.0; 3]).unwrap().l0(), 0);

        // Mismatched magnitudes cannot come from a 1-sparse vector.
        assert!(decode_1sparse_binary(&plan, &[5.0, 4.0, 0.0]).is_err());
    }

    #[test]
    fn compare_basics() {
        let a = sparse(4, &[(1, 2.0)]);
        assert_eq!(compare(&a, &a).unwrap(), Comparison { l2_error: 0.0, support_match: true });
        let z = SparseVector::zero(4);
        let cmp = compare(&a, &z).unwrap();
        assert_eq!(cmp.l2_error, 2.0);
        assert!(!cmp.support_match);
        assert!(compare(&a, &SparseVector::zero(5)).is_err());
    }

    #[test]
    fn sparse_vector_csv_roundtrip() {
        let v = sparse(10, &[(0, 1.25), (7, -3.5e-4)]);
        let text = v.to_csv();
        assert_eq!(SparseVector::from_csv(&text, 10).unwrap(), v);
        let dense = vec![0.5, -1.0, 0.0];
        assert_eq!(dense_from_csv(&dense_to_csv(&dense)).unwrap(), dense);
    }
}
