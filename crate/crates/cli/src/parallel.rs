use biphoton_core::sweep::{EntropyMap, SweepPlan};
use rayon::prelude::*;

/// Environment variable holding the number of sweep workers.
pub const WORKERS_ENV: &str = "BIPHOTON_WORKERS";

/// Worker count from [`WORKERS_ENV`], defaulting to the available cores.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Evaluate every cell of `plan` on `workers` threads. Cell results are
/// independent of scheduling and come back in grid order.
pub fn par_sweep(plan: &SweepPlan, workers: usize) -> EntropyMap {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("failed to start sweep worker pool");
    let results = pool.install(|| (0..plan.cell_count()).into_par_iter().map(|c| plan.evaluate(c)).collect());
    plan.assemble(results)
}
