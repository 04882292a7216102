//! The three experiment drivers. All of them parallelize over trials with
//! per-trial seeds derived from the master seed, and aggregate in trial
//! order, so results are bit-identical for a given config regardless of
//! thread count.

use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use gsr_core::construct::{complete_rows, FParams};
use gsr_core::graph::{gen_ba, gen_tree_random, Graph, NodeSet};
use gsr_core::plan::{Group, MeasurementPlan, Method, RowMeta};
use gsr_core::recover::{compare, recover_groupwise, recover_with_hub_errors, SparseVector};
use gsr_core::reduce::algorithm1;
use gsr_core::seed;
use gsr_core::{Error, Result};

use crate::config::{Fig6Config, Fig7Config, Fig8Config};
use crate::table::ResultTable;

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Growing-graph sweep: one evolving random graph per trial, rerunning the
/// general construction after every batch of added links.
///
/// Output columns: links, mean/std/min/max measurements, mean radius,
/// mean upper bound (radius * f(1,n) + radius + 1).
pub fn run_fig6(cfg: &Fig6Config) -> Result<ResultTable> {
    if cfg.n < 50 {
        return Err(Error::InvalidParameter("fig6 needs n >= 50".into()));
    }
    if cfg.trials < 1 || cfg.link_step < 1 {
        return Err(Error::InvalidParameter("fig6 needs trials >= 1 and link_step >= 1".into()));
    }
    let per_trial: Vec<Vec<(usize, usize, usize)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| fig6_trial(cfg, trial as u64))
        .collect::<Result<_>>()?;

    let points = per_trial[0].len();
    let mut table = ResultTable::new(vec![
        "links",
        "mean_measurements",
        "std_measurements",
        "min_measurements",
        "max_measurements",
        "mean_radius",
        "mean_upper_bound",
    ]);
    let mut links = cfg.n - 1;
    for p in 0..points {
        let rows: Vec<f64> = per_trial.iter().map(|t| t[p].0 as f64).collect();
        let radii: Vec<f64> = per_trial.iter().map(|t| t[p].1 as f64).collect();
        let bounds: Vec<f64> = per_trial.iter().map(|t| t[p].2 as f64).collect();
        table.push(vec![
            links as f64,
            mean(&rows),
            std_dev(&rows),
            rows.iter().copied().fold(f64::INFINITY, f64::min),
            rows.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean(&radii),
            mean(&bounds),
        ]);
        links = (links + cfg.link_step).min(2 * cfg.n - 1);
    }
    Ok(table)
}

fn fig6_trial(cfg: &Fig6Config, trial: u64) -> Result<Vec<(usize, usize, usize)>> {
    let n = cfg.n;
    let tree = gen_tree_random(n, seed::derive2(cfg.seed, trial, 0))?;
    let mut edges: BTreeSet<(usize, usize)> = tree.edges().collect();
    let mut rng = seed::rng(seed::derive2(cfg.seed, trial, 1));
    let mut out = Vec::new();
    let mut target = n - 1;
    let mut point = 0u64;
    loop {
        while edges.len() < target {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v {
                edges.insert((u.min(v), u.max(v)));
            }
        }
        let g = Graph::from_edges(n, edges.iter().copied())?;
        let fp = FParams {
            seed: seed::derive2(cfg.seed, trial, 1000 + point),
            c: cfg.budget_factor,
            ..Default::default()
        };
        let (plan, trace) = algorithm1(&g, 1, &fp)?;
        // Independent recount from the trace: sum of ceil(log2(n_i + 1))
        // over the leaf groups plus one per group.
        let q = trace.iteration_count() + 1;
        let recount: usize = trace
            .iterations
            .iter()
            .map(|it| complete_rows(1, it.leaf_count, cfg.budget_factor))
            .sum::<usize>()
            + q;
        assert_eq!(plan.row_count(), recount, "trace recount mismatch");
        let radius = trace.initial_radius;
        let bound = radius * complete_rows(1, n, cfg.budget_factor) + radius + 1;
        out.push((plan.row_count(), radius, bound));
        if target >= 2 * n - 1 {
            break;
        }
        target = (target + cfg.link_step).min(2 * n - 1);
        point += 1;
    }
    Ok(out)
}

/// Preferential-attachment sweep. Output columns: n, m, mean/std/min/max
/// measurements over the trials.
pub fn run_fig7(cfg: &Fig7Config) -> Result<ResultTable> {
    if cfg.trials < 1 || cfg.n_list.is_empty() || cfg.m_list.is_empty() {
        return Err(Error::InvalidParameter("fig7 needs nonempty sweeps and trials >= 1".into()));
    }
    let mut cases = Vec::new();
    for &m in &cfg.m_list {
        for &n in &cfg.n_list {
            cases.push((n, m));
        }
    }
    let results: Vec<Vec<f64>> = cases
        .par_iter()
        .map(|&(n, m)| {
            (0..cfg.trials)
                .map(|trial| {
                    let gs = seed::derive2(cfg.seed, (n * 31 + m) as u64, trial as u64);
                    let g = gen_ba(n, cfg.m0, m, gs)?;
                    let fp = FParams {
                        seed: seed::derive(gs, 1),
                        c: cfg.budget_factor,
                        ..Default::default()
                    };
                    let (plan, _) = algorithm1(&g, 1, &fp)?;
                    Ok(plan.row_count() as f64)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    let mut table = ResultTable::new(vec![
        "n",
        "m",
        "mean_measurements",
        "std_measurements",
        "min_measurements",
        "max_measurements",
    ]);
    for ((n, m), rows) in cases.into_iter().zip(results) {
        table.push(vec![
            n as f64,
            m as f64,
            mean(&rows),
            std_dev(&rows),
            rows.iter().copied().fold(f64::INFINITY, f64::min),
            rows.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ]);
    }
    Ok(table)
}

/// The measurement setup of the hub-error experiment.
pub struct Fig8Setup {
    pub graph: Graph,
    pub plan: MeasurementPlan,
    /// Group sizes found by the general construction (first two measured
    /// through their hubs, the rest directly).
    pub group_sizes: Vec<usize>,
    /// Row indices of the two hub-sum measurements.
    pub hub_rows: Vec<usize>,
}

/// Build the hub-error experiment plan: run the general construction on one
/// preferential-attachment instance, then give each of the two big groups
/// ceil(|group|/2) random half-density rows through its hub (plus the
/// hub-sum row), and measure every node of the tail groups directly.
pub fn build_fig8_plan(cfg: &Fig8Config) -> Result<Fig8Setup> {
    let g = gen_ba(cfg.n, cfg.m0, cfg.ba_m, cfg.graph_seed)?;
    let (alg_plan, trace) = algorithm1(&g, 1, &FParams::with_seed(cfg.graph_seed))?;
    let sizes = trace.group_sizes();
    if sizes.len() < 3 || sizes[0] < 50 || sizes[1] < 50 {
        return Err(Error::InvalidParameter(format!(
            "graph seed {} yields groups {:?}; need two large leading groups (pick another seed)",
            cfg.graph_seed, sizes
        )));
    }
    let tail: usize = sizes[2..].iter().sum();
    if tail > 20 {
        return Err(Error::InvalidParameter(format!(
            "graph seed {} leaves {tail} nodes outside the two big groups (pick another seed)",
            cfg.graph_seed
        )));
    }

    let mut rng = seed::rng(seed::derive(cfg.graph_seed, 0xF1)); // matrix is part of the setup
    let mut plan = MeasurementPlan::new(cfg.n, 25, Method::Custom);
    plan.oracle_checked = false;
    let mut hub_rows = Vec::new();
    for gid in 0..2 {
        let members = alg_plan.groups[gid].member_nodes.clone();
        let hub_row = alg_plan.groups[gid].hub_sum_row.expect("leaf groups carry hub rows");
        let hub = alg_plan.rows[hub_row].clone();
        hub_rows.push(plan.row_count());
        plan.groups.push(Group {
            member_nodes: members.clone(),
            hub_sum_row: Some(plan.row_count()),
            recovery_order: gid,
        });
        plan.push_row(
            hub.clone(),
            RowMeta { group_id: Some(gid), is_hub_sum: true, hub_nodes: NodeSet::new() },
        );
        for _ in 0..members.len().div_ceil(2) {
            let w = loop {
                let w: NodeSet = members.iter().filter(|_| rng.random_bool(0.5)).collect();
                if !w.is_empty() {
                    break w;
                }
            };
            plan.push_row(
                w.union(&hub),
                RowMeta { group_id: Some(gid), is_hub_sum: false, hub_nodes: hub.clone() },
            );
        }
    }
    for group in &alg_plan.groups[2..] {
        for v in group.member_nodes.iter() {
            plan.push_row(
                NodeSet::singleton(v),
                RowMeta { group_id: None, is_hub_sum: false, hub_nodes: NodeSet::new() },
            );
        }
    }
    plan.validate()?;
    if !plan.all_rows_feasible(&g)? {
        return Err(Error::InvalidParameter("fig8 plan has an infeasible row".into()));
    }
    Ok(Fig8Setup { graph: g, plan, group_sizes: sizes, hub_rows })
}

/// Hub-error recovery experiment. Per support size k and trial: a random
/// unit-norm k-sparse vector, unit-variance errors on both hub measurements,
/// and (for the noisy arms) Gaussian noise of fixed norm on all other rows.
/// Output columns: k, mean recovery error for the error-aware decoder and
/// the plain decoder, without and with measurement noise.
pub fn run_fig8(cfg: &Fig8Config) -> Result<(ResultTable, Fig8Setup)> {
    if cfg.trials < 1 || cfg.k_list.is_empty() {
        return Err(Error::InvalidParameter("fig8 needs trials >= 1 and a k sweep".into()));
    }
    let setup = build_fig8_plan(cfg)?;
    let cases: Vec<(usize, u32)> = cfg
        .k_list
        .iter()
        .flat_map(|&k| (0..cfg.trials).map(move |t| (k, t)))
        .collect();
    let errors: Vec<[f64; 4]> = cases
        .par_iter()
        .map(|&(k, trial)| fig8_trial(&setup, cfg, k, trial))
        .collect::<Result<_>>()?;

    let mut table = ResultTable::new(vec![
        "k",
        "ours_no_noise",
        "l1_no_noise",
        "ours_with_noise",
        "l1_with_noise",
    ]);
    for (ki, &k) in cfg.k_list.iter().enumerate() {
        let slice = &errors[ki * cfg.trials as usize..(ki + 1) * cfg.trials as usize];
        let arm = |idx: usize| mean(&slice.iter().map(|e| e[idx]).collect::<Vec<f64>>());
        table.push(vec![k as f64, arm(0), arm(1), arm(2), arm(3)]);
    }
    Ok((table, setup))
}

fn fig8_trial(setup: &Fig8Setup, cfg: &Fig8Config, k: usize, trial: u32) -> Result<[f64; 4]> {
    let n = cfg.n;
    let mut rng = seed::rng(seed::derive2(cfg.seed, k as u64, trial as u64));
    // Unit-norm k-sparse vector on a random support.
    let mut support = NodeSet::new();
    while support.len() < k {
        support.insert(rng.random_range(0..n));
    }
    let mut x0 = vec![0.0; n];
    let mut norm = 0.0;
    for v in support.iter() {
        let g: f64 = StandardNormal.sample(&mut rng);
        x0[v] = g;
        norm += g * g;
    }
    let norm = norm.sqrt();
    for v in support.iter() {
        x0[v] /= norm;
    }
    let truth = SparseVector::from_dense(&x0, 0.0);

    let mut y = setup.plan.apply(&x0)?;
    for &h in &setup.hub_rows {
        let e: f64 = StandardNormal.sample(&mut rng);
        y[h] += e;
    }
    // Noise on every non-hub measurement, scaled to the configured norm.
    let mut w = vec![0.0; y.len()];
    let mut wnorm = 0.0;
    for (i, wi) in w.iter_mut().enumerate() {
        if !setup.hub_rows.contains(&i) {
            let g: f64 = StandardNormal.sample(&mut rng);
            *wi = g;
            wnorm += g * g;
        }
    }
    let wnorm = wnorm.sqrt();
    let y_noisy: Vec<f64> = y
        .iter()
        .zip(&w)
        .map(|(yi, wi)| yi + wi * cfg.noise_norm / wnorm)
        .collect();

    let err = |result: &gsr_core::recover::RecoveryResult| -> Result<f64> {
        Ok(compare(&result.x_recovered, &truth)?.l2_error)
    };
    let ours_clean = err(&recover_with_hub_errors(&setup.plan, &y, cfg.tol_clean)?)?;
    let plain_clean = err(&recover_groupwise(&setup.plan, &y, cfg.tol_noisy)?)?;
    let ours_noisy = err(&recover_with_hub_errors(&setup.plan, &y_noisy, cfg.tol_noisy)?)?;
    let plain_noisy = err(&recover_groupwise(&setup.plan, &y_noisy, cfg.tol_noisy)?)?;
    Ok([ours_clean, plain_clean, ours_noisy, plain_noisy])
}
