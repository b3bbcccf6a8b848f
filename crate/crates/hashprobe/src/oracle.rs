//! Brute-force reference lookups used as ground truth in tests.
//!
//! The oracle scans a flat entry list with no bucketing, recomputing the
//! probe argmin directly. It deliberately shares the hash streams and tie
//! rules of the tables under test: what it checks is the correctness of the
//! bucketed successor search, not the hash function. O(entries × probes) per
//! lookup by design.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hash::{hash64, mix64, node_stream_seed, probe_stream_seed, ring_distance};
use crate::multiprobe::NodeEntry;

/// Node entries exactly as a probing table with `table_seed` stores them.
pub fn node_entries(table_seed: u64, node_ids: &[u64]) -> Vec<NodeEntry> {
    let stream = node_stream_seed(table_seed);
    node_ids.iter().map(|&id| NodeEntry { hash: hash64(id, stream), id }).collect()
}

/// Virtual entries exactly as a ring table with `table_seed` and `vnodes`
/// replicas stores them, flattened to (hash, owning node).
pub fn virtual_entries(table_seed: u64, node_ids: &[u64], vnodes: u32) -> Vec<NodeEntry> {
    let stream = node_stream_seed(table_seed);
    node_ids
        .iter()
        .flat_map(|&id| {
            (0..vnodes)
                .map(move |r| NodeEntry { hash: hash64(id, stream ^ mix64(u64::from(r))), id })
        })
        .collect()
}

/// Reference lookup: for each probe hash, scan every entry and take the
/// global argmin of the clockwise distance. Hash ties go to the smaller node
/// id, equal distances across probes to the earlier probe.
pub fn oracle_lookup(entries: &[NodeEntry], table_seed: u64, probes: u32, key: u64) -> Result<u64> {
    if probes == 0 {
        return Err(Error::InvalidArgument("probes must be at least 1"));
    }
    if entries.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut best: Option<(u64, u64)> = None; // (distance, node id)
    for probe in 0..probes {
        let h = hash64(key, probe_stream_seed(table_seed, probe));
        let mut local: Option<(u64, u64)> = None;
        for e in entries {
            let cand = (ring_distance(h, e.hash), e.id);
            match local {
                Some(cur) if cur <= cand => {}
                _ => local = Some(cand),
            }
        }
        let cand = local.expect("entries are non-empty");
        match best {
            Some((d, _)) if d <= cand.0 => {}
            _ => best = Some(cand),
        }
    }
    Ok(best.expect("at least one probe").1)
}

/// Tally of [`oracle_lookup`] over `keys`; the counts sum to `keys.len()`.
pub fn oracle_load_counts(
    entries: &[NodeEntry],
    table_seed: u64,
    probes: u32,
    keys: &[u64],
) -> Result<HashMap<u64, u64>> {
    let mut counts = HashMap::new();
    for &key in keys {
        let node = oracle_lookup(entries, table_seed, probes, key)?;
        *counts.entry(node).or_insert(0) += 1;
    }
    Ok(counts)
}
