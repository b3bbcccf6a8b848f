//! Ring consistent hashing baseline.
//!
//! Every physical node is hashed `vnodes` ways onto the ring as virtual
//! entries; a key is hashed once and goes to the owner of the next virtual
//! entry. Shares the bucket structure and successor rules of the probing
//! table, so a ring with one replica and a probing table with one probe and
//! the same seed agree on every key.

use std::mem;

use crate::buckets::{BucketArray, RingPoint};
use crate::error::{Error, Result};
use crate::hash::{hash64, mix64, node_stream_seed, probe_stream_seed};

/// One virtual ring point of a physical node. 24 bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct VirtualEntry {
    /// Ring position: `hash64(node, node_stream ^ mix64(replica))`.
    pub hash: u64,
    /// Owning physical node.
    pub node: u64,
    /// Replica index in `0..vnodes`.
    pub replica: u32,
}

impl RingPoint for VirtualEntry {
    #[inline]
    fn ring_hash(&self) -> u64 {
        self.hash
    }
}

/// Ring hash table with `vnodes` virtual entries per physical node.
///
/// `vnodes` is fixed at construction; changing it online would break
/// agreement between instances, so it requires a new table.
#[derive(Debug, Clone)]
pub struct RingTable {
    store: BucketArray<VirtualEntry>,
    node_stream: u64,
    key_stream: u64,
    vnodes: u32,
    nodes: usize,
    seed: u64,
}

impl RingTable {
    pub fn new(seed: u64, vnodes: u32) -> Result<Self> {
        if vnodes == 0 {
            return Err(Error::InvalidArgument("vnodes must be at least 1"));
        }
        Ok(RingTable {
            store: BucketArray::new(),
            node_stream: node_stream_seed(seed),
            key_stream: probe_stream_seed(seed, 0),
            vnodes,
            nodes: 0,
            seed,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn vnodes(&self) -> u32 {
        self.vnodes
    }

    /// Number of physical nodes.
    pub fn len(&self) -> usize {
        self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    /// Number of virtual entries (`len() * vnodes()`).
    pub fn virtual_len(&self) -> usize {
        self.store.len()
    }

    #[inline]
    fn entry_for(&self, node_id: u64, replica: u32) -> VirtualEntry {
        VirtualEntry {
            hash: hash64(node_id, self.node_stream ^ mix64(u64::from(replica))),
            node: node_id,
            replica,
        }
    }

    /// Add a physical node, inserting all of its virtual entries. O(vnodes)
    /// amortized.
    pub fn insert(&mut self, node_id: u64) -> Result<()> {
        if self.store.contains(&self.entry_for(node_id, 0)) {
            return Err(Error::DuplicateNode(node_id));
        }
        for replica in 0..self.vnodes {
            self.store.insert(self.entry_for(node_id, replica));
        }
        self.nodes += 1;
        Ok(())
    }

    /// Remove a physical node and all of its virtual entries.
    pub fn remove(&mut self, node_id: u64) -> Result<()> {
        if !self.store.contains(&self.entry_for(node_id, 0)) {
            return Err(Error::NodeNotFound(node_id));
        }
        for replica in 0..self.vnodes {
            self.store.remove(&self.entry_for(node_id, replica));
        }
        self.nodes -= 1;
        Ok(())
    }

    pub fn contains(&self, node_id: u64) -> bool {
        self.store.contains(&self.entry_for(node_id, 0))
    }

    /// Assign a key: hash it once and return the owner of the successor
    /// virtual entry.
    #[inline]
    pub fn lookup(&self, key: u64) -> Result<u64> {
        let h = hash64(key, self.key_stream);
        match self.store.successor(h) {
            Some(e) => Ok(e.node),
            None => Err(Error::EmptyTable),
        }
    }

    /// Virtual entries in ring order.
    pub fn entries(&self) -> impl Iterator<Item = VirtualEntry> + '_ {
        self.store.iter().copied()
    }

    /// Structural memory estimate in bytes, same accounting scheme as the
    /// probing table but with 24-byte virtual entries.
    pub fn memory_estimate(&self) -> u64 {
        mem::size_of::<Self>() as u64 + self.store.heap_bytes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hash::SplitMix64;
    use crate::multiprobe::MultiProbeTable;
    use crate::oracle::{oracle_lookup, virtual_entries};

    #[test]
    fn entry_is_24_bytes() {
        assert_eq!(mem::size_of::<VirtualEntry>(), 24);
    }

    #[test]
    fn zero_vnodes_rejected() {
        assert!(RingTable::new(0, 0).is_err());
    }

    #[test]
    fn insert_creates_all_replicas() {
        let mut r = RingTable::new(8, 4).unwrap();
        r.insert(1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.virtual_len(), 4);
        assert_eq!(r.insert(1), Err(Error::DuplicateNode(1)));
    }

    #[test]
    fn single_node_wins_every_key() {
        let mut r = RingTable::new(0, 1).unwrap();
        r.insert(5).unwrap();
        for key in 0..500 {
            assert_eq!(r.lookup(key), Ok(5));
        }
    }

    #[test]
    fn remove_restores_prior_assignments() {
        let mut r = RingTable::new(3, 5).unwrap();
        for id in 0..20 {
            r.insert(id).unwrap();
        }
        let before: Vec<u64> = (0..2000).map(|k| r.lookup(k).unwrap()).collect();
        r.insert(999).unwrap();
        r.remove(999).unwrap();
        let after: Vec<u64> = (0..2000).map(|k| r.lookup(k).unwrap()).collect();
        assert_eq!(before, after);
        assert_eq!(r.remove(999), Err(Error::NodeNotFound(999)));
    }

    #[test]
    fn lookup_matches_oracle_over_virtual_entries() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..10 {
            let seed = rng.next_u64();
            let vnodes = 1 + (rng.next_u64() % 8) as u32;
            let n = 1 + (rng.next_u64() % 32) as usize;
            let mut ids = Vec::with_capacity(n);
            let mut r = RingTable::new(seed, vnodes).unwrap();
            while ids.len() < n {
                let id = rng.next_u64();
                if r.insert(id).is_ok() {
                    ids.push(id);
                }
            }
            let entries = virtual_entries(seed, &ids, vnodes);
            for _ in 0..2000 {
                let key = rng.next_u64();
                assert_eq!(
                    r.lookup(key).unwrap(),
                    oracle_lookup(&entries, seed, 1, key).unwrap()
                );
            }
        }
    }

    #[test]
    fn one_replica_agrees_with_single_probe_table() {
        let seed = 0xFEED;
        let mut r = RingTable::new(seed, 1).unwrap();
        let mut t = MultiProbeTable::new(seed, 1).unwrap();
        for id in (0..100).map(|i| i * 31 + 7) {
            r.insert(id).unwrap();
            t.insert(id).unwrap();
        }
        for key in 0..20_000 {
            assert_eq!(r.lookup(key).unwrap(), t.lookup(key).unwrap());
        }
    }
}
