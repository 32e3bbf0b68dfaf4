//! Lossy direct-mapped operation cache.
//!
//! Each entry is guarded by a sequence stamp: writers move it from even to
//! odd with a compare-and-swap, fill the entry, then publish it as the next
//! even value. A reader that sees the same even stamp before and after
//! copying the entry has a consistent snapshot. Contended writes are dropped.

use std::sync::atomic::{fence, AtomicBool, AtomicU64, Ordering};

use bytemuck::Zeroable;

use crate::value_store::mix;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[repr(u8)]
pub(crate) enum Op {
    Plus = 1,
    MatVec,
    MatMat,
    Dagger,
    Norm,
}

#[derive(Zeroable)]
#[repr(C)]
struct Entry {
    stamp: AtomicU64,
    key: [AtomicU64; 3],
    result: AtomicU64,
}

pub(crate) struct OpCache {
    entries: Box<[Entry]>,
    mask: usize,
    enabled: AtomicBool,
}

impl OpCache {
    pub fn new(log2_size: u32, enabled: bool) -> Self {
        assert!(log2_size < 40, "op cache size out of range");
        let len = 1usize << log2_size;
        OpCache {
            entries: bytemuck::zeroed_slice_box(len),
            mask: len - 1,
            enabled: AtomicBool::new(enabled),
        }
    }

    pub fn set_enabled(&self, on: bool) {
        self.enabled.store(on, Ordering::Relaxed);
    }

    pub fn enabled(&self) -> bool {
        self.enabled.load(Ordering::Relaxed)
    }

    fn words(op: Op, level: u32, a: u64, b: u64) -> [u64; 3] {
        // key word 0 is never 0, so zeroed entries never match
        [((op as u64) << 32) | level as u64, a, b]
    }

    fn slot(&self, k: &[u64; 3]) -> &Entry {
        let h = mix(mix(k[0] ^ mix(k[1])) ^ k[2]);
        &self.entries[h as usize & self.mask]
    }

    pub fn get(&self, op: Op, level: u32, a: u64, b: u64) -> Option<u64> {
        if !self.enabled() {
            return None;
        }
        let k = Self::words(op, level, a, b);
        let e = self.slot(&k);
        let s1 = e.stamp.load(Ordering::Acquire);
        if s1 & 1 == 1 {
            return None;
        }
        let hit = e.key[0].load(Ordering::Relaxed) == k[0]
            && e.key[1].load(Ordering::Relaxed) == k[1]
            && e.key[2].load(Ordering::Relaxed) == k[2];
        let r = e.result.load(Ordering::Relaxed);
        fence(Ordering::Acquire);
        (hit && e.stamp.load(Ordering::Relaxed) == s1).then_some(r)
    }

    pub fn put(&self, op: Op, level: u32, a: u64, b: u64, result: u64) {
        if !self.enabled() {
            return;
        }
        let k = Self::words(op, level, a, b);
        let e = self.slot(&k);
        let s = e.stamp.load(Ordering::Relaxed);
        if s & 1 == 1
            || e
                .stamp
                .compare_exchange(s, s + 1, Ordering::Acquire, Ordering::Relaxed)
                .is_err()
        {
            return;
        }
        fence(Ordering::Release);
        for (slot, w) in e.key.iter().zip(k) {
            slot.store(w, Ordering::Relaxed);
        }
        e.result.store(result, Ordering::Relaxed);
        e.stamp.store(s + 2, Ordering::Release);
    }

    /// Forget everything. Needs exclusive access.
    pub fn clear(&mut self) {
        for e in self.entries.iter_mut() {
            *e.stamp.get_mut() = 0;
            *e.key[0].get_mut() = 0;
        }
    }
}
