use std::time::Duration;

use serde::Serialize;

/// Provenance for a run. Written to stderr, and next to any output file as
/// `<file>.manifest.json`, so stdout stays byte-identical across runs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub jobs: Option<usize>,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn new(command: String, elapsed: Duration) -> Self {
        RunManifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed: None,
            restarts: None,
            max_iters: None,
            tol: None,
            jobs: None,
            wall_time_s: elapsed.as_secs_f64(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClassRow {
    pub index: usize,
    /// `[i, j, weight]` triples with `i < j`.
    pub edges: Vec<[u32; 3]>,
    pub orbit_size: u64,
}

#[derive(Debug, Serialize)]
pub struct ClassesReport {
    pub n: usize,
    pub d: u32,
    pub classes: Vec<ClassRow>,
    pub total: u64,
}

#[derive(Debug, Serialize)]
pub struct BoundsReport {
    pub inequality: String,
    pub outcomes: Vec<usize>,
    pub settings: Vec<usize>,
    pub local: Option<f64>,
    pub stabilizer: Option<f64>,
    pub quantum: Option<f64>,
    /// `quantum - stabilizer` when both were computed.
    pub gap: Option<f64>,
    /// Edge list of the graph-state class attaining the stabilizer value.
    pub stabilizer_class: Option<String>,
    pub converged: Option<bool>,
}
