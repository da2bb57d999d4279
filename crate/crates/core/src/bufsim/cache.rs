use std::num::NonZeroUsize;

use lru::LruCache;

/// A heap page: table ordinal within the catalog plus page number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PageId {
    pub table: u32,
    pub page: u64,
}

/// Replacement policy seam for the buffer cache.
pub trait PageCache {
    /// Touches `page`, returning `true` on a hit. A miss loads the page,
    /// evicting according to the policy when full.
    fn access(&mut self, page: PageId) -> bool;
    fn contains(&self, page: &PageId) -> bool;
    fn len(&self) -> usize;
    fn capacity(&self) -> usize;
    fn clear(&mut self);
    /// Resident pages, most recently used first.
    fn resident(&self) -> Vec<PageId>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Least-recently-used buffer cache.
pub struct LruBufferCache {
    inner: LruCache<PageId, ()>,
}

impl LruBufferCache {
    pub fn new(capacity: NonZeroUsize) -> Self {
        Self {
            inner: LruCache::new(capacity),
        }
    }
}

impl PageCache for LruBufferCache {
    fn access(&mut self, page: PageId) -> bool {
        if self.inner.get(&page).is_some() {
            return true;
        }
        self.inner.put(page, ());
        false
    }

    fn contains(&self, page: &PageId) -> bool {
        self.inner.contains(page)
    }

    fn len(&self) -> usize {
        self.inner.len()
    }

    fn capacity(&self) -> usize {
        self.inner.cap().get()
    }

    fn clear(&mut self) {
        self.inner.clear();
    }

    fn resident(&self) -> Vec<PageId> {
        self.inner.iter().map(|(k, _)| *k).collect()
    }
}
