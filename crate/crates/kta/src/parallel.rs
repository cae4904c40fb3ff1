//! Exhaustive simulation spread over a thread pool.

use kta_core::exhaustive::{check_queries, Accumulator, Exhaustive, ExhaustiveError, FineGrainedReport};
use rayon::prelude::*;

/// Inputs simulated per work item.
const CHUNK: u64 = 1024;

/// Same result as [`Exhaustive::analyze`], computed on `jobs` threads (the
/// global pool when `None`).
pub fn analyze(ex: &Exhaustive<'_>, jobs: Option<usize>) -> Result<FineGrainedReport, ExhaustiveError> {
    check_queries(ex.tps, ex.queries)?;
    let n = ex.space.cardinality();
    let work = || {
        (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut acc = ex.accumulator();
                for i in c * CHUNK..n.min((c + 1) * CHUNK) {
                    ex.run_index(i, &mut acc);
                    if acc.failure.is_some() {
                        break;
                    }
                }
                acc
            })
            .reduce(|| ex.accumulator(), Accumulator::merge)
    };
    let acc = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    ex.finish(acc)
}
