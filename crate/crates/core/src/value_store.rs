//! Deduplicating storage of complex edge values.
//!
//! Values are matched with a component-wise tolerance δ. The bucket of a
//! value is chosen by hashing its components rounded to the nearest multiple
//! of δ; the stored representative is the first unrounded value that claimed
//! the slot. A δ-close value can round to a neighbouring multiple, so a miss
//! in the home chain also searches the chains of the eight adjacent grid
//! cells before inserting. Two threads inserting δ-close values with
//! different home cells at the same moment can still both succeed.

use std::sync::atomic::{AtomicU32, AtomicU64, AtomicUsize, Ordering};

use num_complex::Complex64;

use crate::error::{DdError, Result, Table};

pub type ComplexValue = Complex64;

/// Default component-wise tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-14;

/// Slot of a stored value. Stable for the lifetime of the store.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ValueIndex(pub u32);

impl ValueIndex {
    pub const ZERO: ValueIndex = ValueIndex(0);
    pub const ONE: ValueIndex = ValueIndex(1);

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }
}

/// `|a.re - b.re| < delta && |a.im - b.im| < delta`
pub fn values_close(a: ComplexValue, b: ComplexValue, delta: f64) -> bool {
    (a.re - b.re).abs() < delta && (a.im - b.im).abs() < delta
}

fn snap(x: f64, delta: f64) -> f64 {
    if x.abs() < delta {
        0.0
    } else {
        x
    }
}

fn grid(x: f64, delta: f64) -> f64 {
    if delta > 0.0 {
        (x / delta).round()
    } else {
        x
    }
}

fn cell_hash(re: f64, im: f64) -> usize {
    // -0.0 and 0.0 must share a bucket
    mix((re + 0.0).to_bits() ^ mix((im + 0.0).to_bits())) as usize
}

pub(crate) fn mix(mut h: u64) -> u64 {
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

pub struct ValueStore {
    delta: f64,
    slots: Box<[[AtomicU64; 2]]>,
    next: AtomicUsize,
    buckets: Box<[AtomicU32]>,
    mask: usize,
}

impl ValueStore {
    /// A store with room for `2^log2_capacity` values.
    pub fn new(log2_capacity: u32, delta: f64) -> Self {
        assert!((2..32).contains(&log2_capacity), "value table size out of range");
        assert!(delta >= 0.0 && delta.is_finite(), "tolerance must be finite and >= 0");
        let cap = 1usize << log2_capacity;
        let slots: Box<[[AtomicU64; 2]]> = bytemuck::zeroed_slice_box(cap);
        slots[1][0].store(1f64.to_bits(), Ordering::Relaxed);
        ValueStore {
            delta,
            slots,
            next: AtomicUsize::new(2),
            buckets: bytemuck::zeroed_slice_box(cap),
            mask: cap - 1,
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.delta
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    /// Slots handed out so far, including the two reserved ones.
    pub fn len(&self) -> usize {
        self.next.load(Ordering::Relaxed).min(self.capacity())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// δ-closeness, or exact equality when δ is 0.
    pub fn close(&self, a: ComplexValue, b: ComplexValue) -> bool {
        if self.delta == 0.0 {
            a == b
        } else {
            values_close(a, b, self.delta)
        }
    }

    /// Index of a stored value δ-close to `c`, inserting `c` if there is none.
    pub fn find_or_put(&self, c: ComplexValue) -> Result<ValueIndex> {
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(DdError::NonFinite(c));
        }
        let c = Complex64::new(snap(c.re, self.delta), snap(c.im, self.delta));
        if c.re == 0.0 && c.im == 0.0 {
            return Ok(ValueIndex::ZERO);
        }
        if self.close(c, Complex64::new(1.0, 0.0)) {
            return Ok(ValueIndex::ONE);
        }
        let (gr, gi) = (grid(c.re, self.delta), grid(c.im, self.delta));
        let h = cell_hash(gr, gi);
        if let Some(i) = self.scan(h, c) {
            return Ok(i);
        }
        if self.delta > 0.0 {
            for dr in [-1.0, 0.0, 1.0] {
                for di in [-1.0, 0.0, 1.0] {
                    if dr != 0.0 || di != 0.0 {
                        if let Some(i) = self.scan(cell_hash(gr + dr, gi + di), c) {
                            return Ok(i);
                        }
                    }
                }
            }
        }
        self.insert(h, c)
    }

    /// A match for `c` in the chain starting at `h`, without inserting.
    fn scan(&self, h: usize, c: ComplexValue) -> Option<ValueIndex> {
        for probe in 0..=self.mask {
            let cur = self.buckets[(h + probe) & self.mask].load(Ordering::Acquire);
            if cur == 0 {
                return None;
            }
            if self.close(self.value(ValueIndex(cur - 1)), c) {
                return Some(ValueIndex(cur - 1));
            }
        }
        None
    }

    fn insert(&self, h: usize, c: ComplexValue) -> Result<ValueIndex> {
        let mut own: Option<u32> = None;
        for probe in 0..=self.mask {
            let bucket = &self.buckets[(h + probe) & self.mask];
            let mut cur = bucket.load(Ordering::Acquire);
            if cur == 0 {
                let idx = match own {
                    Some(i) => i,
                    None => {
                        let i = self.alloc()?;
                        self.slots[i as usize][0].store(c.re.to_bits(), Ordering::Relaxed);
                        self.slots[i as usize][1].store(c.im.to_bits(), Ordering::Relaxed);
                        own = Some(i);
                        i
                    }
                };
                match bucket.compare_exchange(0, idx + 1, Ordering::AcqRel, Ordering::Acquire) {
                    Ok(_) => return Ok(ValueIndex(idx)),
                    Err(found) => cur = found,
                }
            }
            if self.close(self.value(ValueIndex(cur - 1)), c) {
                return Ok(ValueIndex(cur - 1));
            }
        }
        Err(self.full())
    }

    fn alloc(&self) -> Result<u32> {
        let i = self.next.fetch_add(1, Ordering::Relaxed);
        if i >= self.capacity() {
            return Err(self.full());
        }
        Ok(i as u32)
    }

    fn full(&self) -> DdError {
        DdError::TableFull {
            table: Table::Value,
            capacity: self.capacity(),
        }
    }

    /// The stored representative at `i`.
    pub fn get(&self, i: ValueIndex) -> Result<ComplexValue> {
        if i.0 as usize >= self.len() {
            return Err(DdError::InvalidIndex(i.0));
        }
        Ok(self.value(i))
    }

    #[inline]
    pub(crate) fn value(&self, i: ValueIndex) -> ComplexValue {
        let s = &self.slots[i.0 as usize];
        Complex64::new(
            f64::from_bits(s[0].load(Ordering::Acquire)),
            f64::from_bits(s[1].load(Ordering::Acquire)),
        )
    }
}
