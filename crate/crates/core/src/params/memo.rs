use std::collections::HashMap;
use std::hash::Hash;

/// Entry bound for solver memo tables.
pub const MEMO_CAP: usize = 1 << 22;

/// A per-call memo table that is dropped wholesale when it reaches its bound.
/// Entries are pure function values, so eviction only costs recomputation.
pub(crate) struct Memo<K, V> {
    map: HashMap<K, V>,
    cap: usize,
}

impl<K: Hash + Eq, V: Copy> Memo<K, V> {
    pub(crate) fn new() -> Self {
        Memo { map: HashMap::new(), cap: MEMO_CAP }
    }

    pub(crate) fn get(&self, k: &K) -> Option<V> {
        self.map.get(k).copied()
    }

    pub(crate) fn insert(&mut self, k: K, v: V) {
        if self.map.len() >= self.cap {
            self.map.clear();
        }
        self.map.insert(k, v);
    }
}
