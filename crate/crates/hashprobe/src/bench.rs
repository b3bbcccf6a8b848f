//! Wall-clock micro-benchmarks for table operations.
//!
//! Absolute numbers are hardware-relative and should only be compared as
//! ratios across configurations on the same machine. Each measurement runs
//! one discarded warmup pass and reports the median over repetitions. All
//! timings assume uncontended caches; a contended machine will slow the
//! table-backed algorithms disproportionately.

use std::hint::black_box;
use std::time::Instant;

use crate::hash::{hash64, probe_stream_seed, SplitMix64};
use crate::jump::jump_lookup;
use crate::multiprobe::MultiProbeTable;
use crate::ring::RingTable;
use crate::sim::Algorithm;

/// Which cost to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchOp {
    /// Build a table over nodes `0..n`; reported per node.
    Init,
    /// Assign keys on a built table; reported per key.
    Assign,
    /// Insert from empty to full, then remove from full to empty, both in
    /// random order; reported per insert-or-remove.
    Update,
}

/// Keys per assignment measurement pass.
const ASSIGN_KEYS: u64 = 100_000;

/// Measure one operation in nanoseconds per op. Jump is stateless, so its
/// init and update cost is zero table operations and reported as exactly 0.
pub fn bench_op(algorithm: Algorithm, nodes: u64, op: BenchOp, repetitions: u32, seed: u64) -> f64 {
    assert!(nodes >= 1, "bench requires at least one node");
    let reps = repetitions.max(1);
    match (algorithm, op) {
        (Algorithm::Jump, BenchOp::Init | BenchOp::Update) => 0.0,
        (Algorithm::Jump, BenchOp::Assign) => median_of(reps, |rep| {
            let stream = probe_stream_seed(seed, rep);
            time_per_op(ASSIGN_KEYS, || {
                let mut sink = 0u64;
                for key in 0..ASSIGN_KEYS {
                    sink ^= jump_lookup(hash64(key, stream), nodes).unwrap();
                }
                black_box(sink);
            })
        }),
        (Algorithm::MultiProbe { probes }, BenchOp::Init) => median_of(reps, |_| {
            time_per_op(nodes, || {
                let mut table = MultiProbeTable::new(seed, probes).unwrap();
                for id in 0..nodes {
                    table.insert(id).unwrap();
                }
                black_box(table.len());
            })
        }),
        (Algorithm::Ring { vnodes }, BenchOp::Init) => median_of(reps, |_| {
            time_per_op(nodes, || {
                let mut table = RingTable::new(seed, vnodes).unwrap();
                for id in 0..nodes {
                    table.insert(id).unwrap();
                }
                black_box(table.len());
            })
        }),
        (Algorithm::MultiProbe { probes }, BenchOp::Assign) => {
            let mut table = MultiProbeTable::new(seed, probes).unwrap();
            for id in 0..nodes {
                table.insert(id).unwrap();
            }
            median_of(reps, |rep| {
                let base = u64::from(rep) * ASSIGN_KEYS;
                time_per_op(ASSIGN_KEYS, || {
                    let mut sink = 0u64;
                    for key in base..base + ASSIGN_KEYS {
                        sink ^= table.lookup(key).unwrap();
                    }
                    black_box(sink);
                })
            })
        }
        (Algorithm::Ring { vnodes }, BenchOp::Assign) => {
            let mut table = RingTable::new(seed, vnodes).unwrap();
            for id in 0..nodes {
                table.insert(id).unwrap();
            }
            median_of(reps, |rep| {
                let base = u64::from(rep) * ASSIGN_KEYS;
                time_per_op(ASSIGN_KEYS, || {
                    let mut sink = 0u64;
                    for key in base..base + ASSIGN_KEYS {
                        sink ^= table.lookup(key).unwrap();
                    }
                    black_box(sink);
                })
            })
        }
        (Algorithm::MultiProbe { probes }, BenchOp::Update) => median_of(reps, |rep| {
            let (inserts, removes) = update_orders(nodes, seed ^ u64::from(rep));
            time_per_op(2 * nodes, || {
                let mut table = MultiProbeTable::new(seed, probes).unwrap();
                for &id in &inserts {
                    table.insert(id).unwrap();
                }
                for &id in &removes {
                    table.remove(id).unwrap();
                }
                black_box(table.len());
            })
        }),
        (Algorithm::Ring { vnodes }, BenchOp::Update) => median_of(reps, |rep| {
            let (inserts, removes) = update_orders(nodes, seed ^ u64::from(rep));
            time_per_op(2 * nodes, || {
                let mut table = RingTable::new(seed, vnodes).unwrap();
                for &id in &inserts {
                    table.insert(id).unwrap();
                }
                for &id in &removes {
                    table.remove(id).unwrap();
                }
                black_box(table.len());
            })
        }),
    }
}

fn time_per_op<F: FnMut()>(ops: u64, mut pass: F) -> f64 {
    let start = Instant::now();
    pass();
    start.elapsed().as_nanos() as f64 / ops as f64
}

/// Warmup once, then take the median over `reps` measurements.
fn median_of<F: FnMut(u32) -> f64>(reps: u32, mut measure: F) -> f64 {
    measure(0);
    let mut samples: Vec<f64> = (0..reps).map(&mut measure).collect();
    samples.sort_unstable_by(f64::total_cmp);
    samples[samples.len() / 2]
}

fn update_orders(nodes: u64, seed: u64) -> (Vec<u64>, Vec<u64>) {
    let mut rng = SplitMix64::new(seed);
    let mut inserts: Vec<u64> = (0..nodes).collect();
    shuffle(&mut inserts, &mut rng);
    let mut removes = inserts.clone();
    shuffle(&mut removes, &mut rng);
    (inserts, removes)
}

fn shuffle(items: &mut [u64], rng: &mut SplitMix64) {
    for i in (1..items.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jump_init_and_update_are_free() {
        assert_eq!(bench_op(Algorithm::Jump, 100, BenchOp::Init, 3, 0), 0.0);
        assert_eq!(bench_op(Algorithm::Jump, 100, BenchOp::Update, 3, 0), 0.0);
    }

    #[test]
    fn timing_ops_return_positive_nanoseconds() {
        for algorithm in [
            Algorithm::MultiProbe { probes: 2 },
            Algorithm::Ring { vnodes: 4 },
        ] {
            for op in [BenchOp::Init, BenchOp::Assign, BenchOp::Update] {
                let ns = bench_op(algorithm, 200, op, 2, 1);
                assert!(ns > 0.0, "{algorithm:?} {op:?}: {ns}");
            }
        }
        assert!(bench_op(Algorithm::Jump, 200, BenchOp::Assign, 2, 1) > 0.0);
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut rng = SplitMix64::new(9);
        let mut items: Vec<u64> = (0..100).collect();
        shuffle(&mut items, &mut rng);
        let mut sorted = items.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<Vec<u64>>());
        assert_ne!(items, sorted);
    }
}
