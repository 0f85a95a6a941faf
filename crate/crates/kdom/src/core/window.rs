use indexmap::IndexMap;

use super::item::{SortedProfile, UncertainItem};

/// An item resident in the sliding window together with its current
/// k-dominant skyline probability.
#[derive(Debug, Clone)]
pub struct WindowEntry {
    pub item: UncertainItem,
    pub profile: SortedProfile,
    pub ksky_prob: f64,
    /// Multiply/divide updates applied since the last from-scratch recompute.
    pub updates: u64,
}

impl WindowEntry {
    pub fn new(item: UncertainItem, profile: SortedProfile, ksky_prob: f64) -> Self {
        Self {
            item,
            profile,
            ksky_prob,
            updates: 0,
        }
    }
}

/// Count-based FIFO window. Entries keep arrival order; lookups by id are
/// O(1) so index-table scans stay linear in the number of scanned entries.
#[derive(Debug, Clone)]
pub struct SlidingWindow {
    capacity: usize,
    entries: IndexMap<u64, WindowEntry>,
}

impl SlidingWindow {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "window capacity must be positive");
        Self {
            capacity,
            entries: IndexMap::with_capacity(capacity + 1),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    pub fn entries(&self) -> impl Iterator<Item = &WindowEntry> {
        self.entries.values()
    }

    pub fn entries_mut(&mut self) -> impl Iterator<Item = &mut WindowEntry> {
        self.entries.values_mut()
    }

    pub fn ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    pub fn get(&self, id: u64) -> Option<&WindowEntry> {
        self.entries.get(&id)
    }

    pub fn get_mut(&mut self, id: u64) -> Option<&mut WindowEntry> {
        self.entries.get_mut(&id)
    }

    pub fn oldest_id(&self) -> Option<u64> {
        self.entries.keys().next().copied()
    }

    pub fn push(&mut self, entry: WindowEntry) {
        assert!(!self.is_full(), "push into a full window; evict first");
        let prev = self.entries.insert(entry.item.id, entry);
        assert!(prev.is_none(), "duplicate item id in window");
    }

    /// Removes and returns the FIFO-oldest entry.
    pub fn evict(&mut self) -> WindowEntry {
        self.entries
            .shift_remove_index(0)
            .map(|(_, e)| e)
            .expect("evict from an empty window")
    }

    /// Removes an entry by id, preserving arrival order of the rest.
    pub fn remove(&mut self, id: u64) -> Option<WindowEntry> {
        self.entries.shift_remove(&id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::item::NormalizationSpec;
    use crate::core::normalize_and_sort;

    fn entry(id: u64) -> WindowEntry {
        let item = UncertainItem::new(id, vec![0.5, 0.5], 0.5).unwrap();
        let profile = normalize_and_sort(&item, &NormalizationSpec::unit(2));
        WindowEntry::new(item, profile, 0.5)
    }

    #[test]
    fn fifo_eviction_order() {
        let mut w = SlidingWindow::new(3);
        for id in 1..=3 {
            w.push(entry(id));
        }
        assert!(w.is_full());
        assert_eq!(w.evict().item.id, 1);
        w.push(entry(4));
        assert_eq!(w.evict().item.id, 2);
        assert_eq!(w.ids().collect::<Vec<_>>(), vec![3, 4]);
    }

    #[test]
    #[should_panic(expected = "full window")]
    fn push_past_capacity_panics() {
        let mut w = SlidingWindow::new(1);
        w.push(entry(1));
        w.push(entry(2));
    }
}
