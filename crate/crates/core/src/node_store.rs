//! Unique node table and edge-value normalization.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, AtomicU64, AtomicUsize, Ordering};

use bytemuck::Zeroable;
use num_complex::Complex64;

use crate::error::{DdError, Result, Table};
use crate::value_store::{mix, ValueIndex};

/// Reference to a stored node, or the terminal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NodeRef(pub u32);

impl NodeRef {
    pub const TERMINAL: NodeRef = NodeRef(u32::MAX);

    pub fn is_terminal(self) -> bool {
        self == Self::TERMINAL
    }
}

/// A weighted reference to a node. A DD is identified with its root edge.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Edge {
    pub weight: ValueIndex,
    pub target: NodeRef,
}

impl Edge {
    /// The canonical all-zero DD.
    pub const ZERO: Edge = Edge {
        weight: ValueIndex::ZERO,
        target: NodeRef::TERMINAL,
    };
    /// The constant 1.
    pub const ONE: Edge = Edge {
        weight: ValueIndex::ONE,
        target: NodeRef::TERMINAL,
    };

    pub fn new(weight: ValueIndex, target: NodeRef) -> Self {
        if weight.is_zero() {
            Edge::ZERO
        } else {
            Edge { weight, target }
        }
    }

    pub fn terminal(weight: ValueIndex) -> Self {
        Edge::new(weight, NodeRef::TERMINAL)
    }

    pub fn is_zero(self) -> bool {
        self.weight.is_zero()
    }

    pub fn is_terminal(self) -> bool {
        self.target.is_terminal()
    }

    /// Same target with weight 1.
    pub fn unit(self) -> Self {
        Edge {
            weight: ValueIndex::ONE,
            target: self.target,
        }
    }

    pub(crate) fn pack(self) -> u64 {
        ((self.weight.0 as u64) << 32) | self.target.0 as u64
    }

    pub(crate) fn unpack(w: u64) -> Self {
        Edge {
            weight: ValueIndex((w >> 32) as u32),
            target: NodeRef(w as u32),
        }
    }
}

/// A decision node: the variable it tests and its 0- and 1-successors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Node {
    pub var: u32,
    pub low: Edge,
    pub high: Edge,
}

/// How a node's pair of edge values is brought into canonical form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub enum NormStrategy {
    /// Divide by the low weight (the high one when low is zero).
    Low,
    /// Divide by the nonzero weight of smaller modulus.
    Min,
    /// Divide by the weight of larger modulus.
    #[default]
    Max,
    /// Make the pair a unit vector whose first nonzero entry is real and positive.
    L2,
}

impl NormStrategy {
    pub const ALL: [NormStrategy; 4] = [
        NormStrategy::Low,
        NormStrategy::Min,
        NormStrategy::Max,
        NormStrategy::L2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NormStrategy::Low => "low",
            NormStrategy::Min => "min",
            NormStrategy::Max => "max",
            NormStrategy::L2 => "l2",
        }
    }
}

impl fmt::Display for NormStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        NormStrategy::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown normalization strategy `{s}` (low, min, max, l2)"))
    }
}

/// Relative modulus difference below which MIN/MAX treat two weights as tied.
/// Ties go to the low edge, a rule that survives multiplying both by a scalar.
pub const TIE_TOLERANCE: f64 = 1e-10;

/// Which side a normalizer divided out, if it set that side to exactly 1.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Pivot {
    Low,
    High,
    Neither,
}

/// Split `(alpha, beta)` into `nu * (alpha', beta')`.
///
/// Exact zeros are treated as absent edges. Both zero is an error: callers
/// short-circuit the zero vector before normalizing.
///
/// ```
/// use evdd::{normalize, NormStrategy};
/// use num_complex::Complex64 as C;
///
/// let (nu, a, b) = normalize(C::new(2.0, 0.0), C::new(6.0, 0.0), NormStrategy::Low).unwrap();
/// assert_eq!((nu, a, b), (C::new(2.0, 0.0), C::new(1.0, 0.0), C::new(3.0, 0.0)));
/// ```
pub fn normalize(
    alpha: Complex64,
    beta: Complex64,
    strategy: NormStrategy,
) -> Result<(Complex64, Complex64, Complex64)> {
    normalize_pivot(alpha, beta, strategy).map(|(nu, a, b, _)| (nu, a, b))
}

pub(crate) fn normalize_pivot(
    alpha: Complex64,
    beta: Complex64,
    strategy: NormStrategy,
) -> Result<(Complex64, Complex64, Complex64, Pivot)> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let (az, bz) = (alpha == zero, beta == zero);
    if az && bz {
        return Err(DdError::DegenerateNode);
    }
    let pick_low = match strategy {
        _ if az => false,
        _ if bz => true,
        NormStrategy::Low => true,
        NormStrategy::Max | NormStrategy::Min => {
            let (ma, mb) = (alpha.norm(), beta.norm());
            if (ma - mb).abs() <= TIE_TOLERANCE * ma.max(mb) {
                true
            } else {
                (ma > mb) == (strategy == NormStrategy::Max)
            }
        }
        NormStrategy::L2 => {
            let r2 = alpha.norm_sqr() + beta.norm_sqr();
            let r = if cfg!(feature = "l2-literal") { r2 } else { r2.sqrt() };
            let lead = if az { beta } else { alpha };
            let nu = Complex64::from_polar(r, lead.arg());
            let (a, b) = if az {
                (zero, Complex64::new(beta.norm() / r, 0.0))
            } else {
                (Complex64::new(alpha.norm() / r, 0.0), beta / nu)
            };
            return Ok((nu, a, b, Pivot::Neither));
        }
    };
    Ok(if pick_low {
        (alpha, one, beta / alpha, Pivot::Low)
    } else {
        (beta, alpha / beta, one, Pivot::High)
    })
}

#[derive(Zeroable)]
#[repr(C)]
struct NodeSlot {
    low: AtomicU64,
    high: AtomicU64,
    var: AtomicU32,
}

/// Open-addressing unique table. Nodes live in an append-only arena; a
/// bucket is claimed by a single compare-and-swap from empty to
/// `arena index + 1`, after the node has been written.
pub struct NodeStore {
    slots: Box<[NodeSlot]>,
    next: AtomicUsize,
    buckets: Box<[AtomicU32]>,
    mask: usize,
    count: AtomicUsize,
    peak: AtomicUsize,
}

fn node_hash(var: u32, low: u64, high: u64) -> usize {
    mix(mix(mix(var as u64) ^ low) ^ high) as usize
}

impl NodeStore {
    pub fn new(log2_capacity: u32) -> Self {
        assert!((2..32).contains(&log2_capacity), "node table size out of range");
        let cap = 1usize << log2_capacity;
        NodeStore {
            slots: bytemuck::zeroed_slice_box(cap),
            next: AtomicUsize::new(0),
            buckets: bytemuck::zeroed_slice_box(cap),
            mask: cap - 1,
            count: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
        }
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    /// `(live unique nodes, high-water mark)`.
    pub fn lookup_stats(&self) -> (usize, usize) {
        (
            self.count.load(Ordering::Relaxed),
            self.peak.load(Ordering::Relaxed),
        )
    }

    fn full(&self) -> DdError {
        DdError::TableFull {
            table: Table::Node,
            capacity: self.capacity(),
        }
    }

    /// The unique node with these fields, inserting it if needed.
    pub(crate) fn find_or_insert(&self, node: Node) -> Result<NodeRef> {
        let (low, high) = (node.low.pack(), node.high.pack());
        let h = node_hash(node.var, low, high);
        let mut own: Option<u32> = None;
        for probe in 0..=self.mask {
            let bucket = &self.buckets[(h + probe) & self.mask];
            let mut cur = bucket.load(Ordering::Acquire);
            if cur == 0 {
                let idx = match own {
                    Some(i) => i,
                    None => {
                        let i = self.next.fetch_add(1, Ordering::Relaxed);
                        if i >= self.capacity() {
                            return Err(self.full());
                        }
                        let s = &self.slots[i];
                        s.var.store(node.var, Ordering::Relaxed);
                        s.low.store(low, Ordering::Relaxed);
                        s.high.store(high, Ordering::Relaxed);
                        own = Some(i as u32);
                        i as u32
                    }
                };
                match bucket.compare_exchange(0, idx + 1, Ordering::AcqRel, Ordering::Acquire) {
                    Ok(_) => {
                        let n = self.count.fetch_add(1, Ordering::Relaxed) + 1;
                        self.peak.fetch_max(n, Ordering::Relaxed);
                        return Ok(NodeRef(idx));
                    }
                    Err(found) => cur = found,
                }
            }
            let s = &self.slots[cur as usize - 1];
            if s.var.load(Ordering::Relaxed) == node.var
                && s.low.load(Ordering::Relaxed) == low
                && s.high.load(Ordering::Relaxed) == high
            {
                return Ok(NodeRef(cur - 1));
            }
        }
        Err(self.full())
    }

    #[inline]
    pub fn node(&self, r: NodeRef) -> Node {
        let s = &self.slots[r.0 as usize];
        Node {
            var: s.var.load(Ordering::Relaxed),
            low: Edge::unpack(s.low.load(Ordering::Relaxed)),
            high: Edge::unpack(s.high.load(Ordering::Relaxed)),
        }
    }

    /// Variable of an edge's target; `terminal_var` for the terminal.
    #[inline]
    pub fn var_of(&self, e: Edge, terminal_var: u32) -> u32 {
        if e.is_terminal() {
            terminal_var
        } else {
            self.slots[e.target.0 as usize].var.load(Ordering::Relaxed)
        }
    }

    /// Every node currently reachable through the buckets.
    pub fn live_nodes(&self) -> impl Iterator<Item = (NodeRef, Node)> + '_ {
        self.buckets
            .iter()
            .map(|b| b.load(Ordering::Acquire))
            .filter(|&b| b != 0)
            .map(move |b| (NodeRef(b - 1), self.node(NodeRef(b - 1))))
    }

    /// Arena slots handed out so far.
    pub(crate) fn used(&self) -> usize {
        self.next.load(Ordering::Relaxed).min(self.capacity())
    }

    /// Keep only `marked` nodes, renumbering them densely.
    ///
    /// Returns the old-to-new map (`u32::MAX` for dropped nodes). Children
    /// always precede their parents in the arena, so one ascending pass can
    /// rewrite child references as it goes.
    pub(crate) fn compact(&mut self, marked: &[bool]) -> Vec<u32> {
        let used = self.next.load(Ordering::Relaxed).min(self.capacity());
        let mut remap = vec![u32::MAX; used];
        let remap_edge = |e: Edge, remap: &[u32]| -> Edge {
            if e.is_terminal() {
                e
            } else {
                Edge {
                    weight: e.weight,
                    target: NodeRef(remap[e.target.0 as usize]),
                }
            }
        };
        let mut fresh = 0usize;
        for old in 0..used {
            if !marked.get(old).copied().unwrap_or(false) {
                continue;
            }
            let n = self.node(NodeRef(old as u32));
            let low = remap_edge(n.low, &remap);
            let high = remap_edge(n.high, &remap);
            let s = &self.slots[fresh];
            s.var.store(n.var, Ordering::Relaxed);
            s.low.store(low.pack(), Ordering::Relaxed);
            s.high.store(high.pack(), Ordering::Relaxed);
            remap[old] = fresh as u32;
            fresh += 1;
        }
        for b in self.buckets.iter() {
            b.store(0, Ordering::Relaxed);
        }
        for i in 0..fresh {
            let s = &self.slots[i];
            let h = node_hash(
                s.var.load(Ordering::Relaxed),
                s.low.load(Ordering::Relaxed),
                s.high.load(Ordering::Relaxed),
            );
            let mut p = h & self.mask;
            while self.buckets[p].load(Ordering::Relaxed) != 0 {
                p = (p + 1) & self.mask;
            }
            self.buckets[p].store(i as u32 + 1, Ordering::Relaxed);
        }
        self.next.store(fresh, Ordering::Relaxed);
        self.count.store(fresh, Ordering::Relaxed);
        remap
    }
}
