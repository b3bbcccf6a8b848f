//! Load-ratio simulation.
//!
//! One configuration runs many trials; each trial derives its own table seed,
//! builds a fresh table over nodes `0..n`, assigns `n * keys_per_node`
//! sequential keys (they pass through the probe hash streams, so sequential
//! ids are as good as random ones and need no RNG), and reports the
//! peak-to-average load ratio. Percentiles are taken across trials.
//!
//! Trials are independent and individually seeded, so they may run in
//! parallel without affecting results: identical configurations produce
//! bit-identical summaries at any thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hash::{hash64, probe_stream_seed, stream_seed};
use crate::jump::jump_lookup;
use crate::multiprobe::MultiProbeTable;
use crate::ring::RingTable;

/// Which assignment scheme a simulation or benchmark drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    MultiProbe { probes: u32 },
    Ring { vnodes: u32 },
    Jump,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::MultiProbe { .. } => "multiprobe",
            Algorithm::Ring { .. } => "ring",
            Algorithm::Jump => "jump",
        }
    }

    /// Name and value of the tuning parameter, for reporting.
    pub fn param(&self) -> (&'static str, u64) {
        match self {
            Algorithm::MultiProbe { probes } => ("K", u64::from(*probes)),
            Algorithm::Ring { vnodes } => ("J", u64::from(*vnodes)),
            Algorithm::Jump => ("none", 0),
        }
    }
}

/// One simulation configuration.
#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub algorithm: Algorithm,
    /// Node count n; nodes are labeled `0..n`.
    pub nodes: u64,
    /// Keys sampled per node; a trial assigns `nodes * keys_per_node` keys.
    pub keys_per_node: u64,
    /// Number of trials to aggregate over.
    pub trials: u32,
    /// Trial t uses `table_seed = stream_seed(base_seed, t)`.
    pub base_seed: u64,
    /// Upper bound on a trial table's structural memory estimate, if any.
    pub memory_budget: Option<u64>,
}

/// Per-node key tallies of one trial.
#[derive(Debug, Clone)]
pub struct LoadReport {
    /// counts[i] = keys assigned to node i; sums to `total_keys`.
    pub counts: Vec<u64>,
    pub total_keys: u64,
    /// `(max count / total_keys) * n`; 1 exactly when n = 1.
    pub peak_to_average: f64,
}

/// Percentiles of peak-to-average over the trials of one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub p90: f64,
    pub p99: f64,
}

fn validate(config: &TrialConfig) -> Result<u64> {
    if config.nodes == 0 {
        return Err(Error::InvalidArgument("nodes must be at least 1"));
    }
    if config.keys_per_node == 0 {
        return Err(Error::InvalidArgument("keys_per_node must be at least 1"));
    }
    if config.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1"));
    }
    config
        .nodes
        .checked_mul(config.keys_per_node)
        .ok_or(Error::InvalidArgument("nodes * keys_per_node overflows"))
}

/// How many nodes to insert between memory-budget checks during a build.
const BUDGET_CHECK_INTERVAL: u64 = 1024;

fn check_budget(estimated: u64, budget: Option<u64>) -> Result<()> {
    match budget {
        Some(b) if estimated > b => Err(Error::MemoryBudgetExceeded { estimated, budget: b }),
        _ => Ok(()),
    }
}

/// Run one trial. Deterministic given `(config, trial_index)`.
pub fn run_trial(config: &TrialConfig, trial_index: u32) -> Result<LoadReport> {
    let total_keys = validate(config)?;
    let table_seed = stream_seed(config.base_seed, trial_index);
    let n = config.nodes;
    let mut counts = vec![0u64; n as usize];

    match config.algorithm {
        Algorithm::MultiProbe { probes } => {
            let mut table = MultiProbeTable::new(table_seed, probes)?;
            for id in 0..n {
                table.insert(id)?;
                if id % BUDGET_CHECK_INTERVAL == 0 {
                    check_budget(table.memory_estimate(), config.memory_budget)?;
                }
            }
            check_budget(table.memory_estimate(), config.memory_budget)?;
            for key in 0..total_keys {
                counts[table.lookup(key)? as usize] += 1;
            }
        }
        Algorithm::Ring { vnodes } => {
            let mut table = RingTable::new(table_seed, vnodes)?;
            for id in 0..n {
                table.insert(id)?;
                if id % BUDGET_CHECK_INTERVAL == 0 {
                    check_budget(table.memory_estimate(), config.memory_budget)?;
                }
            }
            check_budget(table.memory_estimate(), config.memory_budget)?;
            for key in 0..total_keys {
                counts[table.lookup(key)? as usize] += 1;
            }
        }
        Algorithm::Jump => {
            // keys go through the first probe stream like everywhere else,
            // so trials vary with the seed even though the table is stateless
            let key_stream = probe_stream_seed(table_seed, 0);
            for key in 0..total_keys {
                counts[jump_lookup(hash64(key, key_stream), n)? as usize] += 1;
            }
        }
    }

    let peak = *counts.iter().max().expect("counts is non-empty");
    Ok(LoadReport {
        peak_to_average: peak as f64 * n as f64 / total_keys as f64,
        counts,
        total_keys,
    })
}

/// Run all trials of a configuration, in parallel when a rayon pool is
/// available. Reports come back in trial order.
pub fn run_trials(config: &TrialConfig) -> Result<Vec<LoadReport>> {
    validate(config)?;
    (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect()
}

/// Summarize reports with nearest-rank percentiles: the p-th percentile is
/// the ascending value at 1-based index `ceil(p/100 * len)`.
pub fn summarize(reports: &[LoadReport]) -> Result<TrialSummary> {
    if reports.is_empty() {
        return Err(Error::InvalidArgument("summarize requires at least one report"));
    }
    let mut ratios: Vec<f64> = reports.iter().map(|r| r.peak_to_average).collect();
    ratios.sort_unstable_by(f64::total_cmp);
    let nearest_rank = |p: usize| {
        let idx = (p * ratios.len()).div_ceil(100);
        ratios[idx.max(1) - 1]
    };
    Ok(TrialSummary {
        min: ratios[0],
        max: ratios[ratios.len() - 1],
        mean: ratios.iter().sum::<f64>() / ratios.len() as f64,
        median: nearest_rank(50),
        p90: nearest_rank(90),
        p99: nearest_rank(99),
    })
}
