use std::collections::HashMap;

use crate::dsp::WindowSpec;

use super::{FileId, ViewMode, Visualization};
use crate::viz::ViewRange;

pub const DEFAULT_CACHE_BUDGET: usize = 256 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct CacheKey {
    pub id: FileId,
    pub mode: ViewMode,
    range: [u64; 6],
    pub window: WindowSpec,
    pub buckets: usize,
}

impl CacheKey {
    pub fn new(
        id: FileId,
        mode: ViewMode,
        range: &ViewRange,
        window: WindowSpec,
        buckets: usize,
    ) -> Self {
        let r = range;
        Self {
            id,
            mode,
            range: [
                r.time.lo.to_bits(),
                r.time.hi.to_bits(),
                r.amplitude.lo.to_bits(),
                r.amplitude.hi.to_bits(),
                r.frequency.lo.to_bits(),
                r.frequency.hi.to_bits(),
            ],
            window,
            buckets,
        }
    }
}

struct Slot {
    value: Visualization,
    size: usize,
    last_used: u64,
}

/// Least-recently-used store bounded by an approximate byte budget.
pub(crate) struct VizCache {
    budget: usize,
    used: usize,
    clock: u64,
    slots: HashMap<CacheKey, Slot>,
}

impl VizCache {
    pub fn new(budget: usize) -> Self {
        Self {
            budget,
            used: 0,
            clock: 0,
            slots: HashMap::new(),
        }
    }

    pub fn get(&mut self, key: &CacheKey) -> Option<Visualization> {
        self.clock += 1;
        let now = self.clock;
        self.slots.get_mut(key).map(|s| {
            s.last_used = now;
            s.value.clone()
        })
    }

    pub fn insert(&mut self, key: CacheKey, value: Visualization) {
        let size = value.approx_bytes();
        if size > self.budget {
            return;
        }
        if let Some(old) = self.slots.remove(&key) {
            self.used -= old.size;
        }
        while self.used + size > self.budget {
            let Some(victim) = self
                .slots
                .iter()
                .min_by_key(|(_, s)| s.last_used)
                .map(|(k, _)| *k)
            else {
                break;
            };
            let s = self.slots.remove(&victim).expect("victim present");
            self.used -= s.size;
        }
        self.clock += 1;
        self.used += size;
        self.slots.insert(
            key,
            Slot {
                value,
                size,
                last_used: self.clock,
            },
        );
    }

    pub fn purge(&mut self, id: FileId) {
        let used = &mut self.used;
        self.slots.retain(|k, s| {
            let keep = k.id != id;
            if !keep {
                *used -= s.size;
            }
            keep
        });
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn used_bytes(&self) -> usize {
        self.used
    }

    pub fn set_budget(&mut self, budget: usize) {
        self.budget = budget;
        while self.used > self.budget {
            let Some(victim) = self
                .slots
                .iter()
                .min_by_key(|(_, s)| s.last_used)
                .map(|(k, _)| *k)
            else {
                break;
            };
            let s = self.slots.remove(&victim).expect("victim present");
            self.used -= s.size;
        }
    }
}
