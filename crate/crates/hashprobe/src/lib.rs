//! Consistent hashing with multi-probe key placement, plus ring and jump
//! baselines behind matching interfaces and a load-ratio simulation harness.
//!
//! The probing table stores each node once and hashes every key `K` ways,
//! assigning it to the ring successor closest to any probe. That keeps
//! memory at O(n) and updates at amortized O(1) while the peak-to-average
//! load ratio concentrates near `K / (K - 1)`; the classic ring gets a
//! comparable balance only by storing many virtual nodes per physical node,
//! and jump hashing is perfectly balanced but cannot remove arbitrary nodes.
//!
//! All hashing is seeded and bit-exact: two tables built with the same seed
//! and parameters agree on every key, across machines. See [`hash`] for the
//! contract constants.
//!
//! ```
//! use hashprobe::multiprobe::MultiProbeTable;
//!
//! let mut table = MultiProbeTable::new(42, 2).unwrap();
//! for node in 0..10u64 {
//!     table.insert(node).unwrap();
//! }
//! let node = table.lookup(12345).unwrap();
//! assert!(table.contains(node));
//! ```

pub mod bench;
mod buckets;
pub mod error;
pub mod hash;
pub mod jump;
pub mod multiprobe;
pub mod oracle;
pub mod ring;
pub mod sim;

pub use error::{Error, Result};
