//! Experiment drivers and result tables behind the `gsr` command-line tool.

pub mod config;
pub mod experiments;
pub mod table;

pub use config::{Fig6Config, Fig7Config, Fig8Config};
pub use experiments::{run_fig6, run_fig7, run_fig8};
pub use table::ResultTable;

/// Initialize the global thread pool, honoring the GSR_THREADS cap. Safe to
/// call more than once; later calls are no-ops.
pub fn init_threads() {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = std::env::var("GSR_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
    {
        builder = builder.num_threads(threads);
    }
    let _ = builder.build_global();
}
