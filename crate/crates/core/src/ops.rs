//! Recursive DD kernels.
//!
//! When the operands of a recursive call test different variables, the one
//! with the later variable is independent of the earlier one and is passed
//! unchanged to both branches.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::cache::Op;
use crate::error::{DdError, Result};
use crate::manager::Manager;
use crate::node_store::{Edge, NodeRef};
use crate::value_store::ValueIndex;

impl Manager {
    /// `(e|x_var=0, e|x_var=1)`, with `e`'s weight pushed into the children.
    #[inline]
    pub(crate) fn cofactor(&self, e: Edge, var: u32) -> Result<(Edge, Edge)> {
        if e.is_terminal() {
            return Ok((e, e));
        }
        let n = self.node(e.target);
        if n.var != var {
            return Ok((e, e));
        }
        Ok((self.scale(n.low, e.weight)?, self.scale(n.high, e.weight)?))
    }

    fn vec_limit(&self) -> u32 {
        self.num_qubits().saturating_sub(self.config().par_cutoff) as u32
    }

    fn mat_limit(&self) -> u32 {
        2 * self.vec_limit()
    }

    fn pow2(&self, q: usize) -> f64 {
        2f64.powi((self.num_qubits() - q) as i32)
    }

    // --- addition ---

    /// Entry-wise sum of two vector DDs.
    pub fn plus(&self, a: Edge, b: Edge) -> Result<Edge> {
        let limit = self.vec_limit();
        self.run(|| self.plus_rec(a, b, limit))
    }

    /// Entry-wise sum of two matrix DDs.
    pub fn plus_mat(&self, a: Edge, b: Edge) -> Result<Edge> {
        let limit = self.mat_limit();
        self.run(|| self.plus_rec(a, b, limit))
    }

    pub(crate) fn plus_rec(&self, a: Edge, b: Edge, limit: u32) -> Result<Edge> {
        if a.is_zero() {
            return Ok(b);
        }
        if b.is_zero() {
            return Ok(a);
        }
        if a.target == b.target {
            return Ok(Edge::new(self.add_w(a.weight, b.weight)?, a.target));
        }
        self.check_cancel()?;
        // a + b = wa (A + (wb/wa) B), keyed with the smaller target first
        let (a, b) = if a.target <= b.target { (a, b) } else { (b, a) };
        let ratio = self.put_value(self.weight(b) / self.weight(a))?;
        let b1 = Edge::new(ratio, b.target);
        let r = match self.cache.get(Op::Plus, 0, a.target.0 as u64, b1.pack()) {
            Some(hit) => Edge::unpack(hit),
            None => {
                let a1 = a.unit();
                let var = self.var(a1, u32::MAX).min(self.var(b1, u32::MAX));
                let (a0, a1_) = self.cofactor(a1, var)?;
                let (b0, b1_) = self.cofactor(b1, var)?;
                let (r0, r1) = self.fork(
                    var < limit,
                    || self.plus_rec(a0, b0, limit),
                    || self.plus_rec(a1_, b1_, limit),
                );
                let r = self.make_node(var, r0?, r1?)?;
                self.cache.put(Op::Plus, 0, a.target.0 as u64, b1.pack(), r.pack());
                r
            }
        };
        self.scale(r, a.weight)
    }

    // --- products ---

    /// `m · v` for a matrix DD `m` and vector DD `v`.
    pub fn mat_vec(&self, m: Edge, v: Edge) -> Result<Edge> {
        self.run(|| self.mv_rec(m, v, 0))
    }

    fn mv_rec(&self, m: Edge, v: Edge, q: usize) -> Result<Edge> {
        if m.is_zero() || v.is_zero() {
            return Ok(Edge::ZERO);
        }
        let w = self.mul_w(m.weight, v.weight)?;
        if m.is_terminal() && v.is_terminal() {
            // constant block times constant vector
            return self.scale_by(Edge::terminal(w), Complex64::new(self.pow2(q), 0.0));
        }
        self.check_cancel()?;
        let r = self.mv_unit(m.target, v.target, q)?;
        self.scale(r, w)
    }

    fn mv_unit(&self, mt: NodeRef, vt: NodeRef, q: usize) -> Result<Edge> {
        let key = (mt.0 as u64, vt.0 as u64);
        if let Some(hit) = self.cache.get(Op::MatVec, q as u32, key.0, key.1) {
            return Ok(Edge::unpack(hit));
        }
        let n = self.num_qubits() as u32;
        let (m, v) = (Edge::new(ValueIndex::ONE, mt), Edge::new(ValueIndex::ONE, vt));
        let (row, col) = (2 * q as u32, 2 * q as u32 + 1);
        let r = if self.var(m, 2 * n) > col && self.var(v, n) > q as u32 {
            // both rows sum two equal products
            let r = self.mv_rec(m, v, q + 1)?;
            self.scale_by(r, Complex64::new(2.0, 0.0))?
        } else {
            let (m0, m1) = self.cofactor(m, row)?;
            let (m00, m01) = self.cofactor(m0, col)?;
            let (m10, m11) = self.cofactor(m1, col)?;
            let (v0, v1) = self.cofactor(v, q as u32)?;
            let par = self.par_level(q);
            let ((r00, r10), (r01, r11)) = self.fork(
                par,
                || {
                    self.fork(
                        par,
                        || self.mv_rec(m00, v0, q + 1),
                        || self.mv_rec(m10, v0, q + 1),
                    )
                },
                || {
                    self.fork(
                        par,
                        || self.mv_rec(m01, v1, q + 1),
                        || self.mv_rec(m11, v1, q + 1),
                    )
                },
            );
            let c0 = self.make_node(q as u32, r00?, r10?)?;
            let c1 = self.make_node(q as u32, r01?, r11?)?;
            self.plus_rec(c0, c1, self.vec_limit())?
        };
        self.cache.put(Op::MatVec, q as u32, key.0, key.1, r.pack());
        Ok(r)
    }

    /// `a · b` for matrix DDs.
    pub fn mat_mat(&self, a: Edge, b: Edge) -> Result<Edge> {
        self.run(|| self.mm_rec(a, b, 0))
    }

    fn mm_rec(&self, a: Edge, b: Edge, q: usize) -> Result<Edge> {
        if a.is_zero() || b.is_zero() {
            return Ok(Edge::ZERO);
        }
        let w = self.mul_w(a.weight, b.weight)?;
        if a.is_terminal() && b.is_terminal() {
            return self.scale_by(Edge::terminal(w), Complex64::new(self.pow2(q), 0.0));
        }
        self.check_cancel()?;
        let r = self.mm_unit(a.target, b.target, q)?;
        self.scale(r, w)
    }

    fn mm_unit(&self, at: NodeRef, bt: NodeRef, q: usize) -> Result<Edge> {
        let key = (at.0 as u64, bt.0 as u64);
        if let Some(hit) = self.cache.get(Op::MatMat, q as u32, key.0, key.1) {
            return Ok(Edge::unpack(hit));
        }
        let n2 = 2 * self.num_qubits() as u32;
        let (a, b) = (Edge::new(ValueIndex::ONE, at), Edge::new(ValueIndex::ONE, bt));
        let (row, col) = (2 * q as u32, 2 * q as u32 + 1);
        let r = if self.var(a, n2) > col && self.var(b, n2) > col {
            let r = self.mm_rec(a, b, q + 1)?;
            self.scale_by(r, Complex64::new(2.0, 0.0))?
        } else {
            let quad = |e: Edge| -> Result<[[Edge; 2]; 2]> {
                let (e0, e1) = self.cofactor(e, row)?;
                let (e00, e01) = self.cofactor(e0, col)?;
                let (e10, e11) = self.cofactor(e1, col)?;
                Ok([[e00, e01], [e10, e11]])
            };
            let (qa, qb) = (quad(a)?, quad(b)?);
            let par = self.par_level(q);
            let limit = self.mat_limit();
            let entry = |r: usize, c: usize| -> Result<Edge> {
                let (p0, p1) = self.fork(
                    par,
                    || self.mm_rec(qa[r][0], qb[0][c], q + 1),
                    || self.mm_rec(qa[r][1], qb[1][c], q + 1),
                );
                self.plus_rec(p0?, p1?, limit)
            };
            let row_of = |r: usize| -> Result<Edge> {
                let (c0, c1) = self.fork(par, || entry(r, 0), || entry(r, 1));
                self.make_node(col, c0?, c1?)
            };
            let (r0, r1) = self.fork(par, || row_of(0), || row_of(1));
            self.make_node(row, r0?, r1?)?
        };
        self.cache.put(Op::MatMat, q as u32, key.0, key.1, r.pack());
        Ok(r)
    }

    /// Conjugate transpose of a matrix DD.
    pub fn dagger(&self, m: Edge) -> Result<Edge> {
        self.dg_rec(m)
    }

    fn dg_rec(&self, m: Edge) -> Result<Edge> {
        if m.is_zero() {
            return Ok(Edge::ZERO);
        }
        let w = self.put_value(self.weight(m).conj())?;
        if m.is_terminal() {
            return Ok(Edge::terminal(w));
        }
        self.check_cancel()?;
        let r = match self.cache.get(Op::Dagger, 0, m.target.0 as u64, 0) {
            Some(hit) => Edge::unpack(hit),
            None => {
                let q = self.node(m.target).var / 2;
                let (row, col) = (2 * q, 2 * q + 1);
                let unit = m.unit();
                let (m0, m1) = self.cofactor(unit, row)?;
                let (m00, m01) = self.cofactor(m0, col)?;
                let (m10, m11) = self.cofactor(m1, col)?;
                let d0 = self.make_node(col, self.dg_rec(m00)?, self.dg_rec(m10)?)?;
                let d1 = self.make_node(col, self.dg_rec(m01)?, self.dg_rec(m11)?)?;
                let r = self.make_node(row, d0, d1)?;
                self.cache.put(Op::Dagger, 0, m.target.0 as u64, 0, r.pack());
                r
            }
        };
        self.scale(r, w)
    }

    // --- reading DDs ---

    fn walk(&self, e: Edge, bit: impl Fn(u32) -> bool) -> Complex64 {
        let mut w = self.weight(e);
        let mut t = e.target;
        while !t.is_terminal() && w != Complex64::new(0.0, 0.0) {
            let n = self.node(t);
            let child = if bit(n.var) { n.high } else { n.low };
            w *= self.weight(child);
            t = child.target;
        }
        w
    }

    /// Amplitude of a vector DD at a bit string `x0 x1 ... x(n-1)`.
    pub fn evaluate(&self, v: Edge, basis: &str) -> Result<Complex64> {
        let bits = basis.as_bytes();
        if bits.len() != self.num_qubits() {
            return Err(DdError::LengthMismatch {
                expected: self.num_qubits(),
                found: bits.len(),
            });
        }
        if bits.iter().any(|b| !matches!(b, b'0' | b'1')) {
            return Err(DdError::InvalidBasis(basis.to_string()));
        }
        Ok(self.walk(v, |var| bits[var as usize] == b'1'))
    }

    /// Amplitude at a basis index whose most significant bit is qubit 0.
    pub fn amplitude(&self, v: Edge, index: usize) -> Complex64 {
        let n = self.num_qubits() as u32;
        self.walk(v, |var| (index >> (n - 1 - var)) & 1 == 1)
    }

    /// Entry `(row, col)` of a matrix DD.
    pub fn matrix_entry(&self, m: Edge, row: usize, col: usize) -> Complex64 {
        let n = self.num_qubits() as u32;
        self.walk(m, |var| {
            let idx = if var % 2 == 0 { row } else { col };
            (idx >> (n - 1 - var / 2)) & 1 == 1
        })
    }

    /// All `2^n` amplitudes. Exponential, meant for small registers.
    pub fn amplitudes(&self, v: Edge) -> Vec<Complex64> {
        (0..1usize << self.num_qubits())
            .map(|i| self.amplitude(v, i))
            .collect()
    }

    /// Row-major dense form of a matrix DD.
    pub fn to_matrix(&self, m: Edge) -> Vec<Complex64> {
        let d = 1usize << self.num_qubits();
        (0..d * d)
            .map(|i| self.matrix_entry(m, i / d, i % d))
            .collect()
    }

    /// Vector DD of a dense amplitude list of length `2^n`.
    pub fn from_amplitudes(&self, amps: &[Complex64]) -> Result<Edge> {
        let expected = 1usize << self.num_qubits();
        if amps.len() != expected {
            return Err(DdError::LengthMismatch {
                expected,
                found: amps.len(),
            });
        }
        self.build_vec(0, amps)
    }

    fn build_vec(&self, q: u32, amps: &[Complex64]) -> Result<Edge> {
        if amps.len() == 1 {
            return Ok(Edge::terminal(self.put_value(amps[0])?));
        }
        let (lo, hi) = amps.split_at(amps.len() / 2);
        let (lo, hi) = (self.build_vec(q + 1, lo)?, self.build_vec(q + 1, hi)?);
        self.make_node(q, lo, hi)
    }

    /// Matrix DD of a row-major `2^n x 2^n` matrix.
    pub fn from_matrix(&self, data: &[Complex64]) -> Result<Edge> {
        let d = 1usize << self.num_qubits();
        if data.len() != d * d {
            return Err(DdError::LengthMismatch {
                expected: d * d,
                found: data.len(),
            });
        }
        self.build_mat(0, 0, 0, d, data)
    }

    fn build_mat(&self, q: u32, r0: usize, c0: usize, size: usize, data: &[Complex64]) -> Result<Edge> {
        let d = 1usize << self.num_qubits();
        if size == 1 {
            return Ok(Edge::terminal(self.put_value(data[r0 * d + c0])?));
        }
        let h = size / 2;
        let mut rows = [Edge::ZERO; 2];
        for (r, slot) in rows.iter_mut().enumerate() {
            let lo = self.build_mat(q + 1, r0 + r * h, c0, h, data)?;
            let hi = self.build_mat(q + 1, r0 + r * h, c0 + h, h, data)?;
            *slot = self.make_node(2 * q + 1, lo, hi)?;
        }
        self.make_node(2 * q, rows[0], rows[1])
    }

    /// `|i>` for a basis index with qubit 0 as the most significant bit.
    pub fn basis_state(&self, index: usize) -> Result<Edge> {
        let n = self.num_qubits();
        let mut e = Edge::ONE;
        for q in (0..n).rev() {
            e = if (index >> (n - 1 - q)) & 1 == 1 {
                self.make_node(q as u32, Edge::ZERO, e)?
            } else {
                self.make_node(q as u32, e, Edge::ZERO)?
            };
        }
        Ok(e)
    }

    pub fn zero_state(&self) -> Result<Edge> {
        self.basis_state(0)
    }

    // --- norms and comparison ---

    /// Squared norm of the subvector below `t`, over the variables from
    /// `var(t)` to the last qubit.
    pub(crate) fn subtree_norm(&self, t: NodeRef, memo: &mut HashMap<NodeRef, f64>) -> f64 {
        self.subtree_norm_to(t, self.num_qubits() as u32, memo)
    }

    /// As [`Self::subtree_norm`] for a DD over the variables `0..end`, so
    /// `2n` for matrices.
    fn subtree_norm_to(&self, t: NodeRef, end: u32, memo: &mut HashMap<NodeRef, f64>) -> f64 {
        if t.is_terminal() {
            return 1.0;
        }
        if let Some(&v) = memo.get(&t) {
            return v;
        }
        if let Some(bits) = self.cache.get(Op::Norm, end, t.0 as u64, 0) {
            let v = f64::from_bits(bits);
            memo.insert(t, v);
            return v;
        }
        let node = self.node(t);
        let total = self.mass(node.low, node.var + 1, end, memo) + self.mass(node.high, node.var + 1, end, memo);
        memo.insert(t, total);
        self.cache.put(Op::Norm, end, t.0 as u64, 0, total.to_bits());
        total
    }

    /// Squared norm of `e` seen from variable `from`.
    fn mass(&self, e: Edge, from: u32, end: u32, memo: &mut HashMap<NodeRef, f64>) -> f64 {
        if e.is_zero() {
            return 0.0;
        }
        let skipped = self.var(e, end) - from;
        self.weight(e).norm_sqr() * 2f64.powi(skipped as i32) * self.subtree_norm_to(e.target, end, memo)
    }

    /// `Σ |m_ij|²` of a matrix DD.
    pub fn frobenius_norm_squared(&self, m: Edge) -> f64 {
        self.mass(m, 0, 2 * self.num_qubits() as u32, &mut HashMap::new())
    }

    /// Variable assignment following the heavier branch of every node, with
    /// skipped variables set to 0. Reaches a nonzero entry of a nonzero DD.
    fn heavy_path(&self, e: Edge, end: u32) -> Vec<bool> {
        let mut bits = vec![false; end as usize];
        let mut memo = HashMap::new();
        let mut t = e.target;
        while !t.is_terminal() {
            let node = self.node(t);
            let lo = self.mass(node.low, node.var + 1, end, &mut memo);
            let hi = self.mass(node.high, node.var + 1, end, &mut memo);
            bits[node.var as usize] = hi > lo;
            t = if hi > lo { node.high.target } else { node.low.target };
        }
        bits
    }

    /// `Some(c)` when `a = c·b`. Identical root nodes decide at once;
    /// otherwise `c` is fitted on the heaviest entry of `b` and accepted when
    /// `‖a - c·b‖ <= tol·‖a‖`. Rounding can leave equal functions on distinct
    /// nodes, since normalized weights carry relative rather than absolute
    /// error.
    pub fn approx_factor(&self, a: Edge, b: Edge, matrix: bool, tol: f64) -> Result<Option<Complex64>> {
        if let Some(c) = self.equiv_up_to_factor(a, b) {
            return Ok(Some(c));
        }
        if a.is_zero() || b.is_zero() {
            return Ok(None);
        }
        let end = self.num_qubits() as u32 * if matrix { 2 } else { 1 };
        let bits = self.heavy_path(b, end);
        let vb = self.walk(b, |var| bits[var as usize]);
        let c = self.walk(a, |var| bits[var as usize]) / vb;
        let nb = self.scale_by(b, -c)?;
        let diff = if matrix { self.plus_mat(a, nb)? } else { self.plus(a, nb)? };
        let mut memo = HashMap::new();
        let d = self.mass(diff, 0, end, &mut memo);
        let na = self.mass(a, 0, end, &mut memo);
        Ok((d <= tol * tol * na).then_some(c))
    }

    /// `2^(number of variables skipped between `from` and e's target)`.
    pub(crate) fn skip_factor(&self, e: Edge, from: u32) -> f64 {
        let n = self.num_qubits() as u32;
        2f64.powi((self.var(e, n) - from) as i32)
    }

    /// `Σ |ψ(s)|²` over all basis states, by one memoized pass over the DD.
    pub fn l2_norm_squared(&self, v: Edge) -> f64 {
        if v.is_zero() {
            return 0.0;
        }
        let mut memo = HashMap::new();
        self.weight(v).norm_sqr() * self.skip_factor(v, 0) * self.subtree_norm(v.target, &mut memo)
    }

    /// `Some(c)` when `a = c·b`, decided by comparing root edges.
    pub fn equiv_up_to_factor(&self, a: Edge, b: Edge) -> Option<Complex64> {
        if a.target != b.target {
            return None;
        }
        match (a.is_zero(), b.is_zero()) {
            (true, true) => Some(Complex64::new(1.0, 0.0)),
            (false, false) => Some(self.weight(a) / self.weight(b)),
            _ => None,
        }
    }
}
