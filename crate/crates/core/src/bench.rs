//! Timing harness comparing the two engines on generated grids.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::congruence::{chain_congruence, Engine, MergeOptions, QuotientComplex};
use crate::error::{Error, Result};
use crate::generate::{exploded_grid, GridOptions};
use crate::vertex::Tolerance;

/// Allocation statistics gathered around one measured run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AllocStats {
    pub allocations: u64,
    pub peak_bytes: u64,
}

/// Hook for a counting allocator; the library cannot install one itself.
pub trait AllocationProbe {
    fn reset(&self);
    fn read(&self) -> Option<AllocStats>;
}

/// Probe that records nothing.
pub struct NoProbe;

impl AllocationProbe for NoProbe {
    fn reset(&self) {}
    fn read(&self) -> Option<AllocStats> {
        None
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sizes: Vec<[usize; 3]>,
    pub repetitions: usize,
    pub seed: u64,
    pub jitter: f64,
    pub tolerance: Tolerance,
    pub threads: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![[2, 2, 2]],
            repetitions: 5,
            seed: 0,
            jitter: Tolerance::DEFAULT / 4.0,
            tolerance: Tolerance::default(),
            threads: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EngineTiming {
    pub engine: String,
    pub grid: String,
    pub cells: [usize; 3],
    pub samples: usize,
    pub min_ms: f64,
    pub median_ms: f64,
    pub mean_ms: f64,
    pub max_ms: f64,
    /// Largest allocation count and peak heap growth over the samples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alloc: Option<AllocStats>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub agreement: bool,
    pub rows: Vec<EngineTiming>,
    /// Mean sparse time over mean array-of-arrays time, per grid.
    pub sparse_over_aa: Vec<(String, f64)>,
}

/// Compare the array-of-arrays and sparse results of one merge. Returns the
/// list of differences; empty when the engines agree.
pub fn engine_differences(aa: &QuotientComplex, sparse: &QuotientComplex) -> Vec<String> {
    let mut diffs = Vec::new();
    if aa.vertices != sparse.vertices {
        diffs.push("vertex centroids differ".to_string());
    }
    if aa.ev != sparse.ev {
        diffs.push("EV differs from delta0 row patterns".to_string());
    }
    if aa.fe != sparse.fe {
        diffs.push("FE differs from delta1 row patterns".to_string());
    }
    for (name, a, b) in [
        ("vclasses", &aa.vclasses, &sparse.vclasses),
        ("eclasses", &aa.eclasses, &sparse.eclasses),
        ("fclasses", &aa.fclasses, &sparse.fclasses),
    ] {
        if a != b {
            diffs.push(format!("{name} differ"));
        }
    }
    diffs
}

fn summarize(mut samples: Vec<f64>) -> (f64, f64, f64, f64) {
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    let median = if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2.0
    };
    let mean = samples.iter().sum::<f64>() / n as f64;
    (samples[0], median, mean, samples[n - 1])
}

/// Run both engines on every grid size. Fixture generation and the engine
/// agreement check happen before timing; each engine is warmed up once.
pub fn run(config: &BenchConfig, probe: &dyn AllocationProbe) -> Result<BenchReport> {
    if config.repetitions == 0 {
        return Err(Error::InvalidParameter(
            "repetitions must be at least 1".into(),
        ));
    }
    if config.sizes.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one grid size is required".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for &cells in &config.sizes {
        let grid = format!("{}x{}x{}", cells[0], cells[1], cells[2]);
        let acc = exploded_grid(&GridOptions {
            epsilon: config.tolerance.epsilon(),
            ..GridOptions::grid(cells, config.seed).with_jitter(config.jitter)
        })?;
        let options = |engine| MergeOptions {
            tolerance: config.tolerance,
            engine,
            self_check: true,
            threads: config.threads,
        };
        let aa = chain_congruence(&acc, &options(Engine::ArrayOfArrays))?;
        let sparse = chain_congruence(&acc, &options(Engine::Sparse))?;
        let diffs = engine_differences(&aa, &sparse);
        if !diffs.is_empty() {
            return Err(Error::EngineDisagreement(format!(
                "grid {grid}: {}",
                diffs.join("; ")
            )));
        }
        let mut means = Vec::new();
        for engine in [Engine::ArrayOfArrays, Engine::Sparse] {
            let opts = options(engine);
            let mut times = Vec::with_capacity(config.repetitions);
            let mut alloc: Option<AllocStats> = None;
            for _ in 0..config.repetitions {
                probe.reset();
                let start = Instant::now();
                let q = chain_congruence(&acc, &opts)?;
                times.push(start.elapsed().as_secs_f64() * 1e3);
                drop(q);
                if let Some(s) = probe.read() {
                    let best = alloc.get_or_insert(s);
                    best.allocations = best.allocations.max(s.allocations);
                    best.peak_bytes = best.peak_bytes.max(s.peak_bytes);
                }
            }
            let (min_ms, median_ms, mean_ms, max_ms) = summarize(times);
            means.push(mean_ms);
            rows.push(EngineTiming {
                engine: engine.to_string(),
                grid: grid.clone(),
                cells,
                samples: config.repetitions,
                min_ms,
                median_ms,
                mean_ms,
                max_ms,
                alloc,
            });
        }
        ratios.push((grid, means[1] / means[0]));
    }
    Ok(BenchReport {
        agreement: true,
        rows,
        sparse_over_aa: ratios,
    })
}

impl BenchReport {
    /// Plain-text table, one row per engine and grid.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:<7} {:>7} {:>10} {:>10} {:>10} {:>10} {:>12} {:>12}",
            "grid",
            "engine",
            "samples",
            "min ms",
            "median ms",
            "mean ms",
            "max ms",
            "allocs",
            "peak bytes"
        );
        for r in &self.rows {
            let (allocs, peak) = match r.alloc {
                Some(a) => (a.allocations.to_string(), a.peak_bytes.to_string()),
                None => ("-".into(), "-".into()),
            };
            let _ = writeln!(
                out,
                "{:<10} {:<7} {:>7} {:>10.3} {:>10.3} {:>10.3} {:>10.3} {:>12} {:>12}",
                r.grid,
                r.engine,
                r.samples,
                r.min_ms,
                r.median_ms,
                r.mean_ms,
                r.max_ms,
                allocs,
                peak
            );
        }
        for (grid, ratio) in &self.sparse_over_aa {
            let _ = writeln!(out, "{grid}: sparse/aa mean time = {ratio:.2}x");
        }
        let _ = writeln!(out, "engines agree: {}", self.agreement);
        out
    }
}
