//! Multi-probe consistent hashing.
//!
//! Each node is stored once, hashed onto the 2^64 ring. A key is hashed
//! `probes` ways and goes to the ring successor closest to any of its probe
//! hashes. Storage is O(n), updates are amortized O(1), lookups are
//! O(probes), and the peak-to-average load ratio concentrates near
//! `probes / (probes - 1)` for large node sets.

use std::mem;

use crate::buckets::{BucketArray, RingPoint};
use crate::error::{Error, Result};
use crate::hash::{hash64, node_stream_seed, probe_stream_seed, ring_distance};

/// A node identifier paired with its ring position. 16 bytes; the hash is
/// stored so lookups never recompute it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct NodeEntry {
    /// Ring position: `hash64(id, node_stream_seed(table_seed))`.
    pub hash: u64,
    /// Caller-supplied node identifier.
    pub id: u64,
}

impl RingPoint for NodeEntry {
    #[inline]
    fn ring_hash(&self) -> u64 {
        self.hash
    }
}

/// Probe hashes are computed in chunks of this size ahead of the successor
/// searches.
const PROBE_CHUNK: usize = 32;

/// Multi-probe consistent hash table.
///
/// Lookups may run concurrently with each other; insert/remove need exclusive
/// access. Results depend only on the node set, the seed, and the probe
/// count, never on insertion history.
#[derive(Debug, Clone)]
pub struct MultiProbeTable {
    store: BucketArray<NodeEntry>,
    node_stream: u64,
    probe_streams: Vec<u64>,
    seed: u64,
}

impl MultiProbeTable {
    /// Create an empty table. The probe count is fixed for the table's
    /// lifetime; changing it would silently reassign keys, so it requires a
    /// new table.
    pub fn new(seed: u64, probes: u32) -> Result<Self> {
        if probes == 0 {
            return Err(Error::InvalidArgument("probes must be at least 1"));
        }
        Ok(MultiProbeTable {
            store: BucketArray::new(),
            node_stream: node_stream_seed(seed),
            probe_streams: (0..probes).map(|i| probe_stream_seed(seed, i)).collect(),
            seed,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn probes(&self) -> u32 {
        self.probe_streams.len() as u32
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.len() == 0
    }

    #[inline]
    fn entry_for(&self, node_id: u64) -> NodeEntry {
        NodeEntry { hash: hash64(node_id, self.node_stream), id: node_id }
    }

    /// Add a node. Duplicate ids are an error rather than a no-op so that
    /// membership bugs surface immediately.
    pub fn insert(&mut self, node_id: u64) -> Result<()> {
        if self.store.insert(self.entry_for(node_id)) {
            Ok(())
        } else {
            Err(Error::DuplicateNode(node_id))
        }
    }

    /// Remove a node.
    pub fn remove(&mut self, node_id: u64) -> Result<()> {
        if self.store.remove(&self.entry_for(node_id)) {
            Ok(())
        } else {
            Err(Error::NodeNotFound(node_id))
        }
    }

    pub fn contains(&self, node_id: u64) -> bool {
        self.store.contains(&self.entry_for(node_id))
    }

    /// Assign a key to a node: hash it once per probe stream and return the
    /// node of the successor entry at minimal clockwise distance from any
    /// probe. Hash ties go to the smaller node id, equal distances across
    /// probes to the earlier probe.
    #[inline]
    pub fn lookup(&self, key: u64) -> Result<u64> {
        if self.store.len() == 0 {
            return Err(Error::EmptyTable);
        }
        // hash a chunk of probes up front, then search; the split keeps the
        // hot loop free of long dependency chains
        let mut hashes = [0u64; PROBE_CHUNK];
        let mut best_d = u64::MAX;
        let mut best_id = u64::MAX;
        let mut first = true;
        for streams in self.probe_streams.chunks(PROBE_CHUNK) {
            for (slot, &stream) in hashes.iter_mut().zip(streams) {
                *slot = hash64(key, stream);
            }
            for &h in &hashes[..streams.len()] {
                let e = self.store.successor(h).expect("table is non-empty");
                let d = ring_distance(h, e.hash);
                // earlier probes win distance ties, so strictly-less updates
                let better = first || d < best_d;
                best_id = if better { e.id } else { best_id };
                best_d = if better { d } else { best_d };
                first = false;
            }
        }
        Ok(best_id)
    }

    /// Lookup with the successor search deliberately skipping the probe's
    /// home bucket. Wrong by construction; exists so external checkers can
    /// verify they detect faults.
    #[doc(hidden)]
    pub fn lookup_skipping_home_bucket(&self, key: u64) -> Result<u64> {
        if self.store.len() == 0 {
            return Err(Error::EmptyTable);
        }
        let mut best: Option<(u64, u64)> = None;
        for &stream in &self.probe_streams {
            let h = hash64(key, stream);
            let e = self.store.successor_skipping_home(h).expect("table is non-empty");
            let d = ring_distance(h, e.hash);
            match best {
                Some((bd, _)) if bd <= d => {}
                _ => best = Some((d, e.id)),
            }
        }
        Ok(best.expect("probes >= 1").1)
    }

    /// Entries in ring order.
    pub fn entries(&self) -> impl Iterator<Item = NodeEntry> + '_ {
        self.store.iter().copied()
    }

    /// Structural memory estimate in bytes: table header plus per-bucket
    /// accounting of 16 bytes per allocated entry slot. Deterministic given
    /// the op history; divide by [`len`](Self::len) for the per-node figure.
    pub fn memory_estimate(&self) -> u64 {
        let header = mem::size_of::<Self>() as u64
            + (self.probe_streams.capacity() * mem::size_of::<u64>()) as u64;
        header + self.store.heap_bytes()
    }

    #[cfg(test)]
    pub(crate) fn bucket_count(&self) -> usize {
        self.store.bucket_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hash::SplitMix64;
    use crate::oracle::{node_entries, oracle_lookup};

    #[test]
    fn node_entry_is_16_bytes() {
        assert_eq!(mem::size_of::<NodeEntry>(), 16);
    }

    #[test]
    fn new_table_is_empty() {
        let t = MultiProbeTable::new(7, 2).unwrap();
        assert_eq!(t.len(), 0);
        assert!(t.is_empty());
        assert_eq!(t.lookup(123), Err(Error::EmptyTable));
    }

    #[test]
    fn zero_probes_rejected() {
        assert_eq!(
            MultiProbeTable::new(7, 0).unwrap_err(),
            Error::InvalidArgument("probes must be at least 1")
        );
    }

    #[test]
    fn single_node_wins_every_key() {
        let mut t = MultiProbeTable::new(1, 4).unwrap();
        t.insert(99).unwrap();
        assert_eq!(t.len(), 1);
        for key in 0..1000 {
            assert_eq!(t.lookup(key), Ok(99));
        }
    }

    #[test]
    fn duplicate_insert_errors() {
        let mut t = MultiProbeTable::new(1, 1).unwrap();
        t.insert(5).unwrap();
        assert_eq!(t.insert(5), Err(Error::DuplicateNode(5)));
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn remove_roundtrip_and_missing() {
        let mut t = MultiProbeTable::new(1, 1).unwrap();
        assert_eq!(t.remove(9), Err(Error::NodeNotFound(9)));
        t.insert(9).unwrap();
        t.remove(9).unwrap();
        assert_eq!(t.len(), 0);
        assert_eq!(t.lookup(0), Err(Error::EmptyTable));
    }

    #[test]
    fn contains_tracks_membership() {
        let mut t = MultiProbeTable::new(3, 2).unwrap();
        assert!(!t.contains(8));
        t.insert(8).unwrap();
        assert!(t.contains(8));
        t.remove(8).unwrap();
        assert!(!t.contains(8));
    }

    #[test]
    fn lookup_matches_oracle_on_random_sets() {
        let mut rng = SplitMix64::new(99);
        for trial in 0..20 {
            let seed = rng.next_u64();
            let probes = 1 + (rng.next_u64() % 8) as u32;
            let n = 1 + (rng.next_u64() % 64) as usize;
            let mut ids: Vec<u64> = Vec::with_capacity(n);
            let mut t = MultiProbeTable::new(seed, probes).unwrap();
            while ids.len() < n {
                let id = rng.next_u64();
                if t.insert(id).is_ok() {
                    ids.push(id);
                }
            }
            let entries = node_entries(seed, &ids);
            for _ in 0..2000 {
                let key = rng.next_u64();
                assert_eq!(
                    t.lookup(key).unwrap(),
                    oracle_lookup(&entries, seed, probes, key).unwrap(),
                    "trial {trial} seed {seed} probes {probes} n {n} key {key}"
                );
            }
        }
    }

    #[test]
    fn lookup_matches_oracle_beyond_one_probe_chunk() {
        // more probes than fit one hashing chunk
        let seed = 7;
        let probes = PROBE_CHUNK as u32 + 9;
        let mut t = MultiProbeTable::new(seed, probes).unwrap();
        let ids: Vec<u64> = (0..50).map(|i| i * 1000 + 3).collect();
        for &id in &ids {
            t.insert(id).unwrap();
        }
        let entries = node_entries(seed, &ids);
        for key in 0..20_000u64 {
            assert_eq!(
                t.lookup(key).unwrap(),
                oracle_lookup(&entries, seed, probes, key).unwrap()
            );
        }
    }

    #[test]
    fn lookup_matches_oracle_across_removals() {
        let mut rng = SplitMix64::new(1234);
        let seed = 42;
        let probes = 3;
        let mut t = MultiProbeTable::new(seed, probes).unwrap();
        let mut ids: Vec<u64> = (0..200).map(|i| i * 7 + 1).collect();
        for &id in &ids {
            t.insert(id).unwrap();
        }
        while ids.len() > 1 {
            let victim = ids.swap_remove((rng.next_u64() % ids.len() as u64) as usize);
            t.remove(victim).unwrap();
            let entries = node_entries(seed, &ids);
            for _ in 0..50 {
                let key = rng.next_u64();
                assert_eq!(
                    t.lookup(key).unwrap(),
                    oracle_lookup(&entries, seed, probes, key).unwrap()
                );
            }
        }
    }

    #[test]
    fn memory_estimate_fixed_when_empty() {
        let a = MultiProbeTable::new(0, 2).unwrap();
        let b = MultiProbeTable::new(123456, 2).unwrap();
        assert_eq!(a.memory_estimate(), b.memory_estimate());
        assert!(a.memory_estimate() > 0);
    }

    #[test]
    fn memory_estimate_monotone_under_insertion() {
        let mut t = MultiProbeTable::new(5, 2).unwrap();
        let mut prev = t.memory_estimate();
        for id in 0..500 {
            t.insert(id).unwrap();
            let cur = t.memory_estimate();
            assert!(cur >= prev, "estimate shrank at n={}", id + 1);
            prev = cur;
        }
    }

    #[test]
    fn memory_estimate_per_node_bounded() {
        let mut t = MultiProbeTable::new(5, 2).unwrap();
        for id in 0..10_000u64 {
            t.insert(id).unwrap();
        }
        let per_node = t.memory_estimate() / t.len() as u64;
        assert!(per_node <= 64, "{per_node} bytes/node");
    }

    #[test]
    fn fault_injected_lookup_disagrees_somewhere() {
        let seed = 77;
        let mut t = MultiProbeTable::new(seed, 2).unwrap();
        for id in 0..64 {
            t.insert(id).unwrap();
        }
        assert!(t.bucket_count() > 1);
        let mismatches = (0..10_000u64)
            .filter(|&k| t.lookup(k).unwrap() != t.lookup_skipping_home_bucket(k).unwrap())
            .count();
        assert!(mismatches > 0);
    }
}
