use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use evdd_qasm::GateKind;
use num_complex::Complex64;

use crate::cache::OpCache;
use crate::error::{DdError, Result};
use crate::node_store::{normalize_pivot, Edge, Node, NodeRef, NodeStore, NormStrategy, Pivot};
use crate::value_store::{ValueIndex, ValueStore, DEFAULT_TOLERANCE};

/// Construction-time settings of a [`Manager`].
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Component-wise value tolerance δ.
    pub tolerance: f64,
    pub norm_strategy: NormStrategy,
    pub node_table_log2: u32,
    pub value_table_log2: u32,
    pub op_cache_log2: u32,
    /// Worker threads. 1 runs everything on the calling thread.
    pub workers: usize,
    /// Recursive calls fork only while more than this many qubit levels
    /// remain below the current one.
    pub par_cutoff: usize,
    pub op_cache: bool,
    /// Mark-and-compact the node table between gates once it is half full.
    pub gc: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tolerance: DEFAULT_TOLERANCE,
            norm_strategy: NormStrategy::Max,
            node_table_log2: 24,
            value_table_log2: 23,
            op_cache_log2: 22,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            par_cutoff: 6,
            op_cache: true,
            gc: false,
        }
    }
}

impl Config {
    /// Small tables, one worker. Handy for tests and examples.
    pub fn small() -> Self {
        Config {
            node_table_log2: 18,
            value_table_log2: 18,
            op_cache_log2: 16,
            workers: 1,
            ..Config::default()
        }
    }
}

pub(crate) type GateKey = (GateKind, Vec<u64>, Vec<usize>, Vec<usize>);

/// Owner of the shared tables for DDs over a fixed number of qubits.
///
/// Vector DDs use variable `q` for qubit `q`. Matrix DDs interleave: row bit
/// of qubit `q` is variable `2q`, column bit is `2q + 1`. Qubit 0 is the most
/// significant bit of a basis index.
pub struct Manager {
    n: usize,
    config: Config,
    pub(crate) values: ValueStore,
    pub(crate) nodes: NodeStore,
    pub(crate) cache: OpCache,
    pool: Option<rayon::ThreadPool>,
    cancel: Arc<AtomicBool>,
    pub(crate) gate_memo: Mutex<HashMap<GateKey, Edge>>,
    pub(crate) identity: OnceLock<Edge>,
}

impl Manager {
    pub fn new(num_qubits: usize, config: Config) -> Self {
        assert!(num_qubits >= 1, "a manager needs at least one qubit");
        assert!(config.workers >= 1, "at least one worker is required");
        let pool = (config.workers > 1).then(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.workers)
                .thread_name(|i| format!("evdd-worker-{i}"))
                .build()
                .expect("failed to start the worker pool")
        });
        Manager {
            n: num_qubits,
            values: ValueStore::new(config.value_table_log2, config.tolerance),
            nodes: NodeStore::new(config.node_table_log2),
            cache: OpCache::new(config.op_cache_log2, config.op_cache),
            pool,
            cancel: Arc::new(AtomicBool::new(false)),
            gate_memo: Mutex::new(HashMap::new()),
            identity: OnceLock::new(),
            config,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn values(&self) -> &ValueStore {
        &self.values
    }

    pub fn nodes(&self) -> &NodeStore {
        &self.nodes
    }

    pub fn set_op_cache(&self, on: bool) {
        self.cache.set_enabled(on);
    }

    /// Setting the returned flag makes running and future operations fail
    /// with [`DdError::Cancelled`] until [`Manager::reset_cancel`].
    pub fn cancel_flag(&self) -> Arc<AtomicBool> {
        self.cancel.clone()
    }

    pub fn reset_cancel(&self) {
        self.cancel.store(false, Ordering::Relaxed);
    }

    #[inline]
    pub(crate) fn check_cancel(&self) -> Result<()> {
        if self.cancel.load(Ordering::Relaxed) {
            Err(DdError::Cancelled)
        } else {
            Ok(())
        }
    }

    pub(crate) fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(p) => p.install(f),
            None => f(),
        }
    }

    #[inline]
    pub(crate) fn fork<A: Send, B: Send>(
        &self,
        par: bool,
        a: impl FnOnce() -> A + Send,
        b: impl FnOnce() -> B + Send,
    ) -> (A, B) {
        if par && self.pool.is_some() {
            rayon::join(a, b)
        } else {
            (a(), b())
        }
    }

    /// Whether a call at qubit level `q` may fork.
    #[inline]
    pub(crate) fn par_level(&self, q: usize) -> bool {
        q + self.config.par_cutoff < self.n
    }

    // --- edge values ---

    #[inline]
    pub fn value(&self, i: ValueIndex) -> Complex64 {
        self.values.value(i)
    }

    pub fn weight(&self, e: Edge) -> Complex64 {
        self.value(e.weight)
    }

    pub fn put_value(&self, c: Complex64) -> Result<ValueIndex> {
        self.values.find_or_put(c)
    }

    pub(crate) fn mul_w(&self, a: ValueIndex, b: ValueIndex) -> Result<ValueIndex> {
        if a.is_zero() || b.is_zero() {
            Ok(ValueIndex::ZERO)
        } else if a == ValueIndex::ONE {
            Ok(b)
        } else if b == ValueIndex::ONE {
            Ok(a)
        } else {
            self.put_value(self.value(a) * self.value(b))
        }
    }

    pub(crate) fn add_w(&self, a: ValueIndex, b: ValueIndex) -> Result<ValueIndex> {
        if a.is_zero() {
            Ok(b)
        } else if b.is_zero() {
            Ok(a)
        } else {
            self.put_value(self.value(a) + self.value(b))
        }
    }

    /// `w * e`
    pub(crate) fn scale(&self, e: Edge, w: ValueIndex) -> Result<Edge> {
        Ok(Edge::new(self.mul_w(e.weight, w)?, e.target))
    }

    /// `c * e`, re-canonicalized through the value table.
    pub fn scale_by(&self, e: Edge, c: Complex64) -> Result<Edge> {
        let w = self.put_value(c)?;
        self.scale(e, w)
    }

    /// The unique edge for a node testing `var` with successors `low`/`high`.
    ///
    /// Equal successors collapse to the successor itself; otherwise the pair
    /// of weights is normalized and the common factor moves to the returned
    /// edge.
    pub fn make_node(&self, var: u32, low: Edge, high: Edge) -> Result<Edge> {
        if low == high {
            return Ok(low);
        }
        for child in [low, high] {
            if !child.is_terminal() {
                let cv = self.nodes.var_of(child, u32::MAX);
                if cv <= var {
                    return Err(DdError::OrderViolation { var, child: cv });
                }
            }
        }
        let (a, b) = (self.value(low.weight), self.value(high.weight));
        let (nu, a2, b2, pivot) = normalize_pivot(a, b, self.config.norm_strategy)?;
        let wl = match pivot {
            Pivot::Low => ValueIndex::ONE,
            _ => self.put_value(a2)?,
        };
        let wh = match pivot {
            Pivot::High => ValueIndex::ONE,
            _ => self.put_value(b2)?,
        };
        let (low, high) = (Edge::new(wl, low.target), Edge::new(wh, high.target));
        let nu = self.put_value(nu)?;
        if low == high {
            return self.scale(low, nu);
        }
        let r = self.nodes.find_or_insert(Node { var, low, high })?;
        Ok(Edge::new(nu, r))
    }

    #[inline]
    pub fn node(&self, r: NodeRef) -> Node {
        self.nodes.node(r)
    }

    /// Variable of the edge's target, `terminal_var` for the terminal.
    #[inline]
    pub(crate) fn var(&self, e: Edge, terminal_var: u32) -> u32 {
        self.nodes.var_of(e, terminal_var)
    }

    /// Number of distinct nodes reachable from the given roots.
    pub fn node_count(&self, roots: &[Edge]) -> usize {
        let mut seen = HashSet::new();
        let mut stack: Vec<NodeRef> = roots.iter().map(|e| e.target).collect();
        while let Some(r) = stack.pop() {
            if r.is_terminal() || !seen.insert(r) {
                continue;
            }
            let n = self.node(r);
            stack.push(n.low.target);
            stack.push(n.high.target);
        }
        seen.len()
    }

    /// Stored nodes whose edge values are not in the active strategy's
    /// canonical form. Zero on a healthy table.
    pub fn normalization_violations(&self) -> usize {
        let s = self.config.norm_strategy;
        self.nodes
            .live_nodes()
            .filter(|(_, n)| !self.is_normalized(n, s))
            .count()
    }

    fn is_normalized(&self, n: &Node, s: NormStrategy) -> bool {
        let (a, b) = (self.weight(n.low), self.weight(n.high));
        let one = ValueIndex::ONE;
        let tie = crate::node_store::TIE_TOLERANCE + self.config.tolerance;
        match s {
            NormStrategy::Low => {
                n.low.weight == one || (n.low.is_zero() && n.high.weight == one)
            }
            NormStrategy::Max => {
                (n.low.weight == one && b.norm() <= 1.0 + tie)
                    || (n.high.weight == one && a.norm() < 1.0)
            }
            NormStrategy::Min => {
                (n.low.weight == one && (n.high.is_zero() || b.norm() >= 1.0 - tie))
                    || (n.high.weight == one && (n.low.is_zero() || a.norm() > 1.0))
            }
            NormStrategy::L2 => {
                let unit = (a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-12;
                let lead = if n.low.is_zero() { b } else { a };
                unit && lead.im == 0.0 && lead.re >= 0.0
            }
        }
    }

    /// Drop every node not reachable from `roots` or the cached identity, and
    /// renumber the rest. `roots` are rewritten in place. Clears the gate memo
    /// and the operation cache. Values are never collected.
    pub fn collect_garbage(&mut self, roots: &mut [Edge]) {
        let memo = self.gate_memo.get_mut().unwrap_or_else(|e| e.into_inner());
        let mut marked = vec![false; self.nodes.used()];
        let mut stack: Vec<NodeRef> = roots
            .iter()
            .chain(self.identity.get())
            .map(|e| e.target)
            .collect();
        while let Some(r) = stack.pop() {
            if r.is_terminal() || marked[r.0 as usize] {
                continue;
            }
            marked[r.0 as usize] = true;
            let n = self.nodes.node(r);
            stack.push(n.low.target);
            stack.push(n.high.target);
        }
        let remap = self.nodes.compact(&marked);
        let fix = |e: &mut Edge| {
            if !e.is_terminal() {
                e.target = NodeRef(remap[e.target.0 as usize]);
            }
        };
        roots.iter_mut().for_each(fix);
        memo.clear();
        if let Some(id) = self.identity.get_mut() {
            fix(id);
        }
        self.cache.clear();
    }

    /// Whether the node table is at least half full.
    pub fn wants_gc(&self) -> bool {
        self.config.gc && self.nodes.lookup_stats().0 * 2 >= self.nodes.capacity()
    }
}
