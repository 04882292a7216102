use gsr_cli::config::Fig8Config;
use gsr_cli::experiments::build_fig8_plan;
use gsr_core::recover::{recover_groupwise, recover_with_hub_errors};
use gsr_core::seed;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::time::Instant;

fn main() {
    let cfg = Fig8Config::default();
    let setup = build_fig8_plan(&cfg).unwrap();
    let n = cfg.n;
    for k in [5usize, 25] {
        for trial in 0..2u64 {
            let mut rng = seed::rng(seed::derive2(cfg.seed, k as u64, trial));
            let mut support = gsr_core::graph::NodeSet::new();
            while support.len() < k { support.insert(rng.random_range(0..n)); }
            let mut x0 = vec![0.0; n];
            let mut nrm = 0.0;
            for v in support.iter() { let g: f64 = StandardNormal.sample(&mut rng); x0[v] = g; nrm += g*g; }
            let nrm = nrm.sqrt();
            for v in support.iter() { x0[v] /= nrm; }
            let mut y = setup.plan.apply(&x0).unwrap();
            for &h in &setup.hub_rows { let e: f64 = StandardNormal.sample(&mut rng); y[h] += e; }
            let mut w = vec![0.0; y.len()];
            let mut wn = 0.0;
            for (i, wi) in w.iter_mut().enumerate() {
                if !setup.hub_rows.contains(&i) { let g: f64 = StandardNormal.sample(&mut rng); *wi = g; wn += g*g; }
            }
            let wn = wn.sqrt();
            let y_noisy: Vec<f64> = y.iter().zip(&w).map(|(a,b)| a + b*2.0/wn).collect();
            for (name, yv, tol, aug) in [
                ("ours_clean", &y, 1e-9, true), ("plain_clean", &y, 1e-9, false),
                ("ours_noisy", &y_noisy, 1e-5, true), ("plain_noisy", &y_noisy, 1e-5, false),
            ] {
                let t0 = Instant::now();
                let r = if aug { recover_with_hub_errors(&setup.plan, yv, tol).unwrap() }
                        else { recover_groupwise(&setup.plan, yv, tol).unwrap() };
                let iters: Vec<(usize, usize, bool)> = r.per_group_status.iter().map(|s| (s.members, s.iterations, s.converged)).collect();
                println!("k={k} t={trial} {name:12} {:6.2?}s groups={iters:?}", t0.elapsed().as_secs_f64());
            }
        }
    }
}
