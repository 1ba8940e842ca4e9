//! Experiment harness: configuration ingestion, built-in boundary-data
//! expressions, campaign drivers, and report persistence.

pub mod campaigns;
pub mod config;
pub mod expressions;
pub mod manifest;

use std::sync::Once;

static THREAD_INIT: Once = Once::new();

/// Initialize the global worker pool. `MFG_THREADS` caps parallelism;
/// the default is the number of available cores. Safe to call more than
/// once; only the first call takes effect.
pub fn init_threads() {
    THREAD_INIT.call_once(|| {
        if let Ok(raw) = std::env::var("MFG_THREADS") {
            if let Ok(n) = raw.parse::<usize>() {
                if n >= 1 {
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
            }
        }
    });
}
