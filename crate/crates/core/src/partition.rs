//! Division of a sequence into `p` consecutive blocks whose sizes differ by
//! at most one, with the larger blocks first.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    len: usize,
    starts: Vec<usize>,
}

impl BlockPartition {
    /// Splits `len` elements into `p` blocks. The first `len % p` blocks hold
    /// `ceil(len / p)` elements and the rest `floor(len / p)`.
    pub fn new(len: usize, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::ZeroBlocks);
        }
        let starts = (0..=p).map(|i| block_start(len, p, i)).collect();
        Ok(BlockPartition { len, starts })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of blocks.
    pub fn blocks(&self) -> usize {
        self.starts.len() - 1
    }

    /// The `p + 1` block starts; the last one equals `len`.
    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    /// Start of block `i`, for `i <= p`.
    pub fn start(&self, i: usize) -> usize {
        self.starts[i]
    }

    pub fn block(&self, i: usize) -> std::ops::Range<usize> {
        self.starts[i]..self.starts[i + 1]
    }

    /// Block containing index `k`, with `k == len` mapped to the virtual block `p`.
    pub fn block_of(&self, k: usize) -> Result<usize> {
        block_of(k, self.len, self.blocks())
    }

    /// Like [`block_of`](Self::block_of) for an index already known to be in range.
    pub(crate) fn block_of_unchecked(&self, k: usize) -> usize {
        debug_assert!(k <= self.len);
        block_index(k, self.len, self.blocks())
    }
}

/// Shorthand for [`BlockPartition::new`].
pub fn block_starts(len: usize, p: usize) -> Result<BlockPartition> {
    BlockPartition::new(len, p)
}

/// Start index of block `i` (`0 <= i <= p`); constant time.
pub fn block_start(len: usize, p: usize, i: usize) -> usize {
    debug_assert!(p > 0 && i <= p);
    let ceil = len.div_ceil(p);
    let floor = len / p;
    let r = len % p;
    if i < r {
        i * ceil
    } else {
        i * floor + r
    }
}

/// Block of index `k` in a `p`-way partition of `len` elements; constant time.
pub fn block_of(k: usize, len: usize, p: usize) -> Result<usize> {
    if p == 0 {
        return Err(Error::ZeroBlocks);
    }
    if k > len {
        return Err(Error::IndexOutOfRange { index: k, len });
    }
    Ok(block_index(k, len, p))
}

fn block_index(k: usize, len: usize, p: usize) -> usize {
    if k == len {
        return p;
    }
    let ceil = len.div_ceil(p);
    let floor = len / p;
    let big = (len % p) * ceil;
    if k < big {
        k / ceil
    } else {
        // floor > 0 here: if floor were 0 every index would be below `big`.
        (k - big) / floor + len % p
    }
}
