//! Tagged items used to observe stability.
//!
//! The merge and sort routines are generic over any element type with a
//! comparator. [`Item`] carries, next to its key, the sequence it came from
//! and its position there. Those tags never take part in comparisons, so an
//! output can be checked for stability by looking at them.

use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Item<K> {
    pub key: K,
    pub origin: Origin,
    pub source_index: usize,
}

impl<K> Item<K> {
    pub fn new(key: K, origin: Origin, source_index: usize) -> Self {
        Item {
            key,
            origin,
            source_index,
        }
    }
}

impl<K: Ord> Item<K> {
    /// Orders by key only.
    pub fn cmp_key(a: &Self, b: &Self) -> Ordering {
        a.key.cmp(&b.key)
    }
}

impl<K: fmt::Display> fmt::Display for Item<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.origin {
            Origin::A => 'A',
            Origin::B => 'B',
        };
        write!(f, "{}{}{}", self.key, tag, self.source_index)
    }
}

/// Tags `keys` with `origin` and their position.
pub fn tag<K, I>(keys: I, origin: Origin) -> Vec<Item<K>>
where
    I: IntoIterator<Item = K>,
{
    keys.into_iter()
        .enumerate()
        .map(|(i, key)| Item::new(key, origin, i))
        .collect()
}

/// Returns the keys of a tagged sequence.
pub fn keys<K: Copy>(items: &[Item<K>]) -> Vec<K> {
    items.iter().map(|it| it.key).collect()
}

/// Checks that `seq` is non-decreasing under `compare`.
pub fn is_sorted_by<T, F>(seq: &[T], compare: F) -> bool
where
    F: Fn(&T, &T) -> Ordering,
{
    seq.windows(2).all(|w| compare(&w[0], &w[1]) != Ordering::Greater)
}
