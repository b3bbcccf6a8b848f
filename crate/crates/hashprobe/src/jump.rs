//! Jump consistent hashing baseline.
//!
//! Stateless assignment of 64-bit keys onto nodes labeled `0..nodes`. Takes
//! O(1) space and O(ln nodes) expected time, with a perfectly balanced
//! distribution in expectation. Growing or shrinking the node count only
//! moves keys to or from the top index; the removal of an arbitrary node is
//! not supported, which is the price of statelessness.

use crate::error::{Error, Result};

const LCG_MULTIPLIER: u64 = 2862933555777941757;

/// Map `key` to a node index in `[0, nodes)`.
///
/// The sequence of candidate indices is driven by a 64-bit LCG seeded with
/// the key; each step jumps to `floor((b + 1) * 2^31 / ((state >> 33) + 1))`,
/// and the last candidate below `nodes` is the answer. Consistency holds by
/// construction: the result for `nodes + 1` is either the result for `nodes`
/// or `nodes` itself.
pub fn jump_lookup(key: u64, nodes: u64) -> Result<u64> {
    if nodes == 0 {
        return Err(Error::InvalidArgument("nodes must be at least 1"));
    }
    let mut state = key.wrapping_mul(LCG_MULTIPLIER).wrapping_add(1);
    let mut bucket: u64 = 0;
    loop {
        let next = ((u128::from(bucket) + 1) << 31) / (u128::from(state >> 33) + 1);
        if next >= u128::from(nodes) {
            return Ok(bucket);
        }
        bucket = next as u64;
        state = state.wrapping_mul(LCG_MULTIPLIER).wrapping_add(1);
    }
}
