//! Work caps shared by enumeration-heavy operations.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

/// Default cap on enumerated sets when nothing else is configured.
pub const DEFAULT_SET_CAP: u64 = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetConfig {
    pub max_sets: u64,
    pub wall_clock: Option<Duration>,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        BudgetConfig { max_sets: DEFAULT_SET_CAP, wall_clock: None }
    }
}

impl BudgetConfig {
    pub fn with_cap(max_sets: u64) -> Self {
        BudgetConfig { max_sets, wall_clock: None }
    }

    pub fn unlimited() -> Self {
        BudgetConfig { max_sets: u64::MAX, wall_clock: None }
    }

    pub fn start(&self) -> Budget {
        Budget {
            cap: self.max_sets,
            deadline: self.wall_clock.map(|d| Instant::now() + d),
            seen: AtomicU64::new(0),
            tripped: AtomicBool::new(false),
        }
    }
}

/// A running budget. Thread-safe; charging is cheap.
#[derive(Debug)]
pub struct Budget {
    cap: u64,
    deadline: Option<Instant>,
    seen: AtomicU64,
    tripped: AtomicBool,
}

impl Budget {
    /// Records `k` units of work. Returns false once the cap or deadline has been hit.
    pub fn charge(&self, k: u64) -> bool {
        if self.tripped.load(Ordering::Relaxed) {
            return false;
        }
        let before = self.seen.fetch_add(k, Ordering::Relaxed);
        let after = before.saturating_add(k);
        if after > self.cap {
            self.tripped.store(true, Ordering::Relaxed);
            return false;
        }
        // Clock reads are comparatively expensive; sample them.
        if let Some(deadline) = self.deadline {
            if before / 4096 != after / 4096 && Instant::now() >= deadline {
                self.tripped.store(true, Ordering::Relaxed);
                return false;
            }
        }
        true
    }

    pub fn exhausted(&self) -> bool {
        self.tripped.load(Ordering::Relaxed)
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn seen(&self) -> u64 {
        self.seen.load(Ordering::Relaxed).min(self.cap.saturating_add(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_trips_exactly_after_limit() {
        let b = BudgetConfig::with_cap(3).start();
        assert!(b.charge(1));
        assert!(b.charge(2));
        assert!(!b.charge(1));
        assert!(b.exhausted());
        assert!(!b.charge(1));
    }
}
