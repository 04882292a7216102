use gsr_core::construct::FParams;
use gsr_core::graph::*;
use gsr_core::reduce::algorithm1;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(|s| s.as_str()).unwrap_or("ba");
    if mode == "ba" {
        for m in [1usize, 2, 3] {
            for seed in 0..20u64 {
                let g = gen_ba(500, 10, m, seed).unwrap();
                let (plan, trace) = algorithm1(&g, 1, &FParams::with_seed(seed)).unwrap();
                let sizes = trace.group_sizes();
                let fig8_rows: usize = if sizes.len() >= 2 {
                    sizes[0].div_ceil(2) + sizes[1].div_ceil(2) + 2 + sizes[2..].iter().sum::<usize>()
                } else { 0 };
                println!(
                    "m={m} seed={seed} radius={} groups={:?} alg1_rows={} fig8_rows={fig8_rows}",
                    trace.initial_radius, sizes, plan.row_count()
                );
            }
        }
    } else {
        use rand::Rng;
        for seed in 0..8u64 {
            let n = 1000;
            let t = gen_tree_random(n, seed).unwrap();
            let (r0, _) = t.radius_and_center().unwrap();
            let (p0, tr0) = algorithm1(&t, 1, &FParams::with_seed(seed)).unwrap();
            let mut edges: std::collections::BTreeSet<(usize, usize)> = t.edges().collect();
            let mut rng = gsr_core::seed::rng(seed ^ 0xabcd);
            while edges.len() < 2 * n - 1 {
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                if u != v {
                    edges.insert((u.min(v), u.max(v)));
                }
            }
            let g2 = Graph::from_edges(n, edges).unwrap();
            let (r1, _) = g2.radius_and_center().unwrap();
            let (p1, tr1) = algorithm1(&g2, 1, &FParams::with_seed(seed)).unwrap();
            println!(
                "seed={seed} tree: R={r0} rows={} iters={} | +1000 links: R={r1} rows={} iters={}",
                p0.row_count(), tr0.iteration_count(), p1.row_count(), tr1.iteration_count()
            );
        }
    }
}
