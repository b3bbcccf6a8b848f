//! Bucketed sorted storage over ring points, shared by the probing table and
//! the ring baseline.
//!
//! An entry with ring position `h` lives in bucket `floor(h * B / 2^64)` of
//! `B` buckets and buckets are kept sorted, so concatenating them in index
//! order yields all entries in global order. `B` tracks the entry count to
//! hold average occupancy near 6: it doubles when occupancy exceeds
//! [`GROW_AT`] and halves below [`SHRINK_AT`], which keeps updates amortized
//! O(1) and successor scans short.

use std::mem;

/// Average occupancy above which the bucket count doubles.
const GROW_AT: usize = 8;
/// Average occupancy below which the bucket count halves.
const SHRINK_AT: usize = 3;
/// Initial bucket capacity after a rebucket.
const INLINE_HINT: usize = 8;

/// An entry addressable by its position on the 2^64 ring.
///
/// `Ord` must order by the ring hash first so that bucket-local sort order
/// agrees with ring order and hash ties resolve to the `Ord`-least entry.
pub(crate) trait RingPoint: Copy + Ord {
    fn ring_hash(&self) -> u64;
}

#[inline]
fn index_for(hash: u64, bucket_count: usize) -> usize {
    ((u128::from(hash) * bucket_count as u128) >> 64) as usize
}

#[derive(Debug, Clone)]
pub(crate) struct BucketArray<E> {
    buckets: Vec<Vec<E>>,
    len: usize,
}

impl<E: RingPoint> BucketArray<E> {
    pub fn new() -> Self {
        BucketArray { buckets: vec![Vec::new()], len: 0 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    #[cfg(test)]
    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    /// Insert an entry. Returns false if an equal entry is already present.
    pub fn insert(&mut self, entry: E) -> bool {
        let b = index_for(entry.ring_hash(), self.buckets.len());
        let bucket = &mut self.buckets[b];
        match bucket.binary_search(&entry) {
            Ok(_) => false,
            Err(pos) => {
                bucket.insert(pos, entry);
                self.len += 1;
                while self.len > GROW_AT * self.buckets.len() {
                    self.rebucket(self.buckets.len() * 2);
                }
                true
            }
        }
    }

    /// Remove an entry. Returns false if it is not present.
    pub fn remove(&mut self, entry: &E) -> bool {
        let b = index_for(entry.ring_hash(), self.buckets.len());
        let bucket = &mut self.buckets[b];
        match bucket.binary_search(entry) {
            Err(_) => false,
            Ok(pos) => {
                bucket.remove(pos);
                self.len -= 1;
                while self.buckets.len() > 1 && self.len < SHRINK_AT * self.buckets.len() {
                    self.rebucket(self.buckets.len() / 2);
                }
                true
            }
        }
    }

    pub fn contains(&self, entry: &E) -> bool {
        let b = index_for(entry.ring_hash(), self.buckets.len());
        self.buckets[b].binary_search(entry).is_ok()
    }

    /// Ring successor of `h`: the entry minimizing `(ring_hash - h) mod 2^64`,
    /// hash ties resolving to the `Ord`-least entry. `None` iff empty.
    #[inline]
    pub fn successor(&self, h: u64) -> Option<&E> {
        if self.len == 0 {
            return None;
        }
        let home = index_for(h, self.buckets.len());
        let bucket = &self.buckets[home];
        let i = bucket.partition_point(|e| e.ring_hash() < h);
        if i < bucket.len() {
            return Some(&bucket[i]);
        }
        self.first_entry_after(home)
    }

    /// Fault-injected successor that ignores the home bucket's own candidates.
    /// Only for checker self-tests; gives wrong answers by construction.
    pub fn successor_skipping_home(&self, h: u64) -> Option<&E> {
        if self.len == 0 {
            return None;
        }
        self.first_entry_after(index_for(h, self.buckets.len()))
    }

    /// Minimum entry of the first non-empty bucket strictly after `home`,
    /// scanning cyclically; `home` itself is the last resort (its minimum is
    /// then the global minimum, i.e. the wrap-around successor).
    fn first_entry_after(&self, home: usize) -> Option<&E> {
        let nb = self.buckets.len();
        for step in 1..=nb {
            let mut idx = home + step;
            if idx >= nb {
                idx -= nb;
            }
            if let Some(e) = self.buckets[idx].first() {
                return Some(e);
            }
        }
        None
    }

    /// All entries in ring order.
    pub fn iter(&self) -> impl Iterator<Item = &E> {
        self.buckets.iter().flatten()
    }

    fn rebucket(&mut self, new_count: usize) {
        let old = mem::take(&mut self.buckets);
        let mut buckets: Vec<Vec<E>> =
            (0..new_count).map(|_| Vec::with_capacity(INLINE_HINT)).collect();
        // buckets drain in global order, so every new bucket stays sorted
        for entry in old.into_iter().flatten() {
            buckets[index_for(entry.ring_hash(), new_count)].push(entry);
        }
        self.buckets = buckets;
    }

    /// Structural size accounting: per-bucket header plus allocated entry
    /// slots. Not allocator truth, but deterministic given the op history.
    pub fn heap_bytes(&self) -> u64 {
        let bucket_header = mem::size_of::<Vec<E>>() as u64;
        self.buckets
            .iter()
            .map(|b| bucket_header + (b.capacity() * mem::size_of::<E>()) as u64)
            .sum()
    }
}
