//! The ideal logical layer: bit-manipulation maps on `2^l`-dimensional
//! registers and the circuits built from them.
//!
//! Integers are stored little-endian in bits, `x = sum_j 2^j x_j`. The basic
//! maps are
//!
//! - `qCX_l |x>|b> = |x + b mod 2^l>|b>`,
//! - `LSB_l |x>|b> = |x>|b xor x_0>`,
//! - `Embed_l |x> = |2x>` (an isometry from `2^l` into `2^{l+1}` dimensions),
//!
//! and their adjoints. The bit-transfer unitary
//!
//! ```text
//! C^j_l X |x>|b> = |x - 2^j (b xor x_j) mod 2^l>|b xor x_j>
//! ```
//!
//! is assembled from these maps using two catalysts that start and end in
//! `|0>`: a two-dimensional register `B` (which grows by embeddings while it
//! stores bits) and a qubit `Q`. `B` is the register that an auxiliary
//! oscillator holding `GKP(0)_2` realizes after compilation.
//!
//! # Bit-transfer construction
//!
//! Bits `x_0, ..., x_{j-1}` are peeled off the code register one at a time:
//! `LSB` copies the lowest bit into `Q`, `qCX^dagger` clears it, and
//! `Embed^dagger` shifts the register right. All but the last peeled bit are
//! pushed into `B` (`Embed`, `qCX`, `LSB`, which also returns `Q` to `|0>`);
//! the last one stays in `Q`. With `x_j` now the lowest bit, `LSB` followed by
//! `qCX^dagger` performs the transfer, and the peeling is undone in reverse.
//! `B` starts out as a one-bit register holding 0, so the first push needs no
//! embedding. The map count is 2 for `j = 0`, 8 for `j = 1` and `12j - 6` for
//! `j >= 2`, within the budget `12j - 4`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::linalg::{adjoint_2x2, adjoint_4x4, embed_two_qubit, is_unitary_4x4, CMatrix};
use crate::math::*;

/// Largest register size for which [`ideal_matrix`] builds a dense matrix.
pub const MAX_DENSE_ELL: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MapKind {
    QCX,
    QCXAdj,
    LSB,
    LSBAdj,
    Embed,
    EmbedAdj,
}

/// A basic map acting on an `ell`-bit register (`Embed`: `ell -> ell + 1`,
/// `EmbedAdj`: `ell + 1 -> ell`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogicalMap {
    pub kind: MapKind,
    pub ell: usize,
}

impl LogicalMap {
    pub fn new(kind: MapKind, ell: usize) -> Self {
        LogicalMap { kind, ell }
    }

    /// `(input dimension, output dimension)`, counting the qubit for the
    /// qubit-coupled maps.
    pub fn dims(&self) -> (usize, usize) {
        let d = 1usize << self.ell;
        match self.kind {
            MapKind::Embed => (d, 2 * d),
            MapKind::EmbedAdj => (2 * d, d),
            _ => (2 * d, 2 * d),
        }
    }

    pub fn adjoint(&self) -> Self {
        let kind = match self.kind {
            MapKind::QCX => MapKind::QCXAdj,
            MapKind::QCXAdj => MapKind::QCX,
            MapKind::LSB => MapKind::LSBAdj,
            MapKind::LSBAdj => MapKind::LSB,
            MapKind::Embed => MapKind::EmbedAdj,
            MapKind::EmbedAdj => MapKind::Embed,
        };
        LogicalMap { kind, ell: self.ell }
    }

    pub fn uses_qubit(&self) -> bool {
        !matches!(self.kind, MapKind::Embed | MapKind::EmbedAdj)
    }

    /// Register bits before the map.
    pub fn bits_in(&self) -> usize {
        if self.kind == MapKind::EmbedAdj {
            self.ell + 1
        } else {
            self.ell
        }
    }

    /// Register bits after the map.
    pub fn bits_out(&self) -> usize {
        if self.kind == MapKind::Embed {
            self.ell + 1
        } else {
            self.ell
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MapKind::QCX => "qcx",
            MapKind::QCXAdj => "qcx_adj",
            MapKind::LSB => "lsb",
            MapKind::LSBAdj => "lsb_adj",
            MapKind::Embed => "embed",
            MapKind::EmbedAdj => "embed_adj",
        }
    }
}

/// Dense matrix of a basic map.
///
/// Qubit-coupled maps use the basis index `2x + b`.
pub fn ideal_matrix(m: LogicalMap) -> Result<CMatrix> {
    if m.ell == 0 || m.ell > MAX_DENSE_ELL {
        bail!(TooLarge, "dense matrices need 1 <= l <= {MAX_DENSE_ELL}, got l = {}", m.ell);
    }
    let d = 1u64 << m.ell;
    let (din, dout) = m.dims();
    let mut out = CMatrix::zeros(dout, din);
    let one = c(1.0, 0.0);
    for col in 0..din as u64 {
        let row = match m.kind {
            MapKind::QCX => Some(2 * ((col / 2 + (col & 1)) % d) + (col & 1)),
            MapKind::QCXAdj => Some(2 * ((col / 2 + d - (col & 1)) % d) + (col & 1)),
            MapKind::LSB | MapKind::LSBAdj => Some(2 * (col / 2) + ((col & 1) ^ ((col / 2) & 1))),
            MapKind::Embed => Some(2 * col),
            MapKind::EmbedAdj => (col % 2 == 0).then_some(col / 2),
        };
        if let Some(r) = row {
            out[(r as usize, col as usize)] = one;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WireKind {
    /// A register realized by an oscillator; its size can change.
    Qudit,
    Qubit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wire {
    pub name: String,
    pub kind: WireKind,
    /// Initial register size in bits (1 for qubits).
    pub bits: usize,
}

impl Wire {
    pub fn qudit(name: &str, bits: usize) -> Self {
        Wire { name: name.into(), kind: WireKind::Qudit, bits }
    }

    pub fn qubit(name: &str) -> Self {
        Wire { name: name.into(), kind: WireKind::Qubit, bits: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LogicalOp {
    /// A basic map on register `reg`, coupled to `qubit` unless it is an embedding.
    Map {
        map: LogicalMap,
        reg: usize,
        qubit: Option<usize>,
    },
    OneQubit {
        wire: usize,
        m: [[C64; 2]; 2],
    },
    /// Matrix indexed by `2 x_a + x_b`.
    TwoQubit {
        a: usize,
        b: usize,
        m: [[C64; 4]; 4],
    },
}

impl LogicalOp {
    pub fn adjoint(&self) -> Self {
        match self {
            LogicalOp::Map { map, reg, qubit } => LogicalOp::Map { map: map.adjoint(), reg: *reg, qubit: *qubit },
            LogicalOp::OneQubit { wire, m } => LogicalOp::OneQubit { wire: *wire, m: adjoint_2x2(m) },
            LogicalOp::TwoQubit { a, b, m } => LogicalOp::TwoQubit { a: *a, b: *b, m: adjoint_4x4(m) },
        }
    }
}

/// Sparse vector over register configurations (one value per wire).
pub type SparseVec = BTreeMap<Vec<u64>, C64>;

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalCircuit {
    pub wires: Vec<Wire>,
    pub ops: Vec<LogicalOp>,
}

impl LogicalCircuit {
    pub fn new(wires: Vec<Wire>) -> Self {
        LogicalCircuit { wires, ops: Vec::new() }
    }

    /// Number of basic maps.
    pub fn op_count(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, LogicalOp::Map { .. })).count()
    }

    /// Number of one- and two-qubit gates.
    pub fn qubit_gate_count(&self) -> usize {
        self.ops.len() - self.op_count()
    }

    pub fn adjoint(&self) -> Self {
        LogicalCircuit { wires: self.wires.clone(), ops: self.ops.iter().rev().map(|o| o.adjoint()).collect() }
    }

    /// Appends `other`, which must act on the same wires.
    pub fn append(&mut self, other: &LogicalCircuit) -> Result<()> {
        if self.wires != other.wires {
            bail!(Shape, "cannot concatenate circuits on different wires");
        }
        self.ops.extend(other.ops.iter().cloned());
        Ok(())
    }

    /// Checks that every map sees a register of the size it expects and
    /// returns the final register sizes in bits.
    pub fn validate(&self) -> Result<Vec<usize>> {
        let mut bits: Vec<usize> = self.wires.iter().map(|w| w.bits).collect();
        let nw = self.wires.len();
        let is_qubit = |w: usize, bits: &[usize]| self.wires[w].kind == WireKind::Qubit || bits[w] == 1;
        for (i, op) in self.ops.iter().enumerate() {
            match *op {
                LogicalOp::Map { map, reg, qubit } => {
                    if reg >= nw {
                        bail!(Index, "op {i}: register wire {reg} does not exist");
                    }
                    if bits[reg] != map.bits_in() {
                        bail!(
                            Shape,
                            "op {i}: {} expects {} bits on wire {}, found {}",
                            map.name(),
                            map.bits_in(),
                            self.wires[reg].name,
                            bits[reg]
                        );
                    }
                    match (map.uses_qubit(), qubit) {
                        (true, Some(q)) => {
                            if q >= nw || q == reg || !is_qubit(q, &bits) {
                                bail!(Index, "op {i}: {} needs a distinct qubit wire, got {q}", map.name());
                            }
                        }
                        (true, None) => bail!(Precondition, "op {i}: {} needs a qubit", map.name()),
                        (false, _) => {}
                    }
                    bits[reg] = map.bits_out();
                }
                LogicalOp::OneQubit { wire, .. } => {
                    if wire >= nw || !is_qubit(wire, &bits) {
                        bail!(Index, "op {i}: single-qubit gate on non-qubit wire {wire}");
                    }
                }
                LogicalOp::TwoQubit { a, b, ref m } => {
                    if a >= nw || b >= nw || a == b || !is_qubit(a, &bits) || !is_qubit(b, &bits) {
                        bail!(Index, "op {i}: two-qubit gate needs two distinct qubit wires, got ({a}, {b})");
                    }
                    if !is_unitary_4x4(m, 1e-12) {
                        bail!(Parameter, "op {i}: two-qubit matrix is not unitary");
                    }
                }
            }
        }
        Ok(bits)
    }

    /// Runs the circuit on a basis configuration.
    ///
    /// Amplitude sent to odd register values by an `Embed^dagger` is
    /// annihilated (the adjoint of an isometry); its weight is returned as the
    /// second component.
    pub fn apply_basis(&self, input: &[u64]) -> Result<(SparseVec, f64)> {
        if input.len() != self.wires.len() {
            bail!(Shape, "configuration has {} entries for {} wires", input.len(), self.wires.len());
        }
        for (w, &v) in self.wires.iter().zip(input) {
            if w.bits < 64 && v >> w.bits != 0 {
                bail!(Index, "value {v} does not fit wire {} of {} bits", w.name, w.bits);
            }
        }
        self.validate()?;
        let mut state: SparseVec = BTreeMap::new();
        state.insert(input.to_vec(), c(1.0, 0.0));
        let mut lost = 0.0;
        for op in &self.ops {
            let mut next: SparseVec = BTreeMap::new();
            for (cfg, amp) in state {
                match *op {
                    LogicalOp::Map { map, reg, qubit } => {
                        let mut cfg = cfg;
                        let modulus = 1u64 << map.ell;
                        let q = qubit.unwrap_or(usize::MAX);
                        match map.kind {
                            MapKind::QCX => cfg[reg] = (cfg[reg] + cfg[q]) % modulus,
                            MapKind::QCXAdj => cfg[reg] = (cfg[reg] + modulus - cfg[q]) % modulus,
                            MapKind::LSB | MapKind::LSBAdj => cfg[q] ^= cfg[reg] & 1,
                            MapKind::Embed => cfg[reg] *= 2,
                            MapKind::EmbedAdj => {
                                if cfg[reg] & 1 == 1 {
                                    lost += amp.norm_sqr();
                                    continue;
                                }
                                cfg[reg] /= 2;
                            }
                        }
                        *next.entry(cfg).or_insert(c(0.0, 0.0)) += amp;
                    }
                    LogicalOp::OneQubit { wire, ref m } => {
                        let x = cfg[wire] as usize;
                        for (r, row) in m.iter().enumerate() {
                            if row[x] != c(0.0, 0.0) {
                                let mut o = cfg.clone();
                                o[wire] = r as u64;
                                *next.entry(o).or_insert(c(0.0, 0.0)) += amp * row[x];
                            }
                        }
                    }
                    LogicalOp::TwoQubit { a, b, ref m } => {
                        let x = (2 * cfg[a] + cfg[b]) as usize;
                        for (r, row) in m.iter().enumerate() {
                            if row[x] != c(0.0, 0.0) {
                                let mut o = cfg.clone();
                                o[a] = (r >> 1) as u64;
                                o[b] = (r & 1) as u64;
                                *next.entry(o).or_insert(c(0.0, 0.0)) += amp * row[x];
                            }
                        }
                    }
                }
            }
            next.retain(|_, a| *a != c(0.0, 0.0));
            state = next;
        }
        Ok((state, lost))
    }

    /// Matrix of the circuit on the data wires with every other wire starting
    /// in `|0>`.
    ///
    /// The data index lists the data wires most significant first. The second
    /// component is the largest norm, over input columns, that ends up outside
    /// the all-zero state of the other wires (or is annihilated); it is zero
    /// exactly when the auxiliaries act as catalysts.
    pub fn restricted_matrix(&self, data: &[usize]) -> Result<(CMatrix, f64)> {
        let final_bits = self.validate()?;
        for &w in data {
            if w >= self.wires.len() {
                bail!(Index, "data wire {w} does not exist");
            }
        }
        let in_bits: usize = data.iter().map(|&w| self.wires[w].bits).sum();
        let out_bits: usize = data.iter().map(|&w| final_bits[w]).sum();
        if in_bits > 16 || out_bits > 16 {
            bail!(TooLarge, "restricted matrix with 2^{} columns", in_bits.max(out_bits));
        }
        let mut m = CMatrix::zeros(1 << out_bits, 1 << in_bits);
        let mut worst = 0.0f64;
        for col in 0..(1u64 << in_bits) {
            let mut cfg = vec![0u64; self.wires.len()];
            let mut rest = col;
            for &w in data.iter().rev() {
                let b = self.wires[w].bits;
                cfg[w] = rest & ((1 << b) - 1);
                rest >>= b;
            }
            let (out, lost) = self.apply_basis(&cfg)?;
            let mut leak = lost;
            for (ocfg, amp) in out {
                let aux_zero = ocfg.iter().enumerate().all(|(w, &v)| data.contains(&w) || v == 0);
                if !aux_zero {
                    leak += amp.norm_sqr();
                    continue;
                }
                let mut row = 0u64;
                for &w in data {
                    row = (row << final_bits[w]) | ocfg[w];
                }
                m[(row as usize, col as usize)] += amp;
            }
            worst = worst.max(leak.sqrt());
        }
        Ok((m, worst))
    }
}

fn map_op(kind: MapKind, ell: usize, reg: usize, qubit: usize) -> LogicalOp {
    let map = LogicalMap::new(kind, ell);
    LogicalOp::Map { map, reg, qubit: map.uses_qubit().then_some(qubit) }
}

/// Ops that move bits `x_0 .. x_{j-1}` of register `s` into `b` and `q`.
fn peel_ops(ell: usize, j: usize, s: usize, b: usize, q: usize) -> Vec<LogicalOp> {
    let mut ops = Vec::new();
    for i in 0..j {
        let k = ell - i;
        ops.push(map_op(MapKind::LSB, k, s, q));
        ops.push(map_op(MapKind::QCXAdj, k, s, q));
        ops.push(map_op(MapKind::EmbedAdj, k - 1, s, q));
        if i + 1 < j {
            if i > 0 {
                ops.push(map_op(MapKind::Embed, i, b, q));
            }
            ops.push(map_op(MapKind::QCX, i + 1, b, q));
            ops.push(map_op(MapKind::LSB, i + 1, b, q));
        }
    }
    ops
}

/// Appends `C^j_l X` from register `s` to qubit `t`, using catalysts `b`, `q`.
pub fn push_bit_transfer(c: &mut LogicalCircuit, ell: usize, j: usize, s: usize, t: usize, b: usize, q: usize) {
    let peel = peel_ops(ell, j, s, b, q);
    c.ops.extend(peel.iter().cloned());
    c.ops.push(map_op(MapKind::LSB, ell - j, s, t));
    c.ops.push(map_op(MapKind::QCXAdj, ell - j, s, t));
    c.ops.extend(peel.iter().rev().map(|o| o.adjoint()));
}

/// Wire indices of [`build_bit_transfer`].
pub mod transfer_wires {
    pub const S: usize = 0;
    pub const T: usize = 1;
    pub const B: usize = 2;
    pub const Q: usize = 3;
}

/// Wire indices of [`build_two_qubit`] and [`build_single_qubit`].
pub mod two_qubit_wires {
    pub const S: usize = 0;
    pub const Q1: usize = 1;
    pub const Q2: usize = 2;
    pub const B: usize = 3;
    pub const Q: usize = 4;
}

/// Wire indices of [`build_bipartite_two_qubit`].
pub mod bipartite_wires {
    pub const S1: usize = 0;
    pub const S2: usize = 1;
    pub const Q1: usize = 2;
    pub const Q2: usize = 3;
    pub const B: usize = 4;
    pub const Q: usize = 5;
}

/// Map-count budget for a bit transfer: `max(2, 12j - 4)`.
pub fn transfer_budget(j: usize) -> usize {
    (12 * j).saturating_sub(4).max(2)
}

/// The circuit for `C^j_l X` on wires `S` (l bits), `T`, `B` (1 bit), `Q`.
pub fn build_bit_transfer(ell: usize, j: usize) -> Result<LogicalCircuit> {
    if ell == 0 || j >= ell {
        bail!(Index, "bit transfer needs 0 <= j < l, got j = {j}, l = {ell}");
    }
    use transfer_wires::*;
    let mut c =
        LogicalCircuit::new(vec![Wire::qudit("S", ell), Wire::qubit("T"), Wire::qudit("B", 1), Wire::qubit("Q")]);
    push_bit_transfer(&mut c, ell, j, S, T, B, Q);
    Ok(c)
}

fn two_qubit_layout(ell: usize) -> LogicalCircuit {
    LogicalCircuit::new(vec![
        Wire::qudit("S", ell),
        Wire::qubit("Q1"),
        Wire::qubit("Q2"),
        Wire::qudit("B", 1),
        Wire::qubit("Q"),
    ])
}

fn check_unitary(u: &[[C64; 4]; 4]) -> Result<()> {
    if !is_unitary_4x4(u, 1e-12) {
        bail!(Parameter, "two-qubit matrix is not unitary to 1e-12");
    }
    Ok(())
}

/// `U` on qubits `A_j, A_k` of an `l`-bit register via two bit transfers.
///
/// The matrix is indexed by `2 x_j + x_k`.
pub fn build_two_qubit(ell: usize, j: usize, k: usize, u: &[[C64; 4]; 4]) -> Result<LogicalCircuit> {
    if !(j < k && k < ell) {
        bail!(Index, "two-qubit gate needs 0 <= j < k < l, got j = {j}, k = {k}, l = {ell}");
    }
    check_unitary(u)?;
    use two_qubit_wires::*;
    let mut c = two_qubit_layout(ell);
    push_bit_transfer(&mut c, ell, j, S, Q1, B, Q);
    push_bit_transfer(&mut c, ell, k, S, Q2, B, Q);
    let fwd = c.ops.clone();
    c.ops.push(LogicalOp::TwoQubit { a: Q1, b: Q2, m: *u });
    c.ops.extend(fwd.iter().rev().map(|o| o.adjoint()));
    Ok(c)
}

/// A single-qubit gate on `A_j` through one bit transfer, on the wire
/// layout of [`build_two_qubit`].
pub fn build_single_qubit(ell: usize, j: usize, u: &[[C64; 2]; 2]) -> Result<LogicalCircuit> {
    if j >= ell {
        bail!(Index, "single-qubit gate needs j < l, got j = {j}, l = {ell}");
    }
    use two_qubit_wires::*;
    let mut c = two_qubit_layout(ell);
    push_bit_transfer(&mut c, ell, j, S, Q1, B, Q);
    let fwd = c.ops.clone();
    c.ops.push(LogicalOp::OneQubit { wire: Q1, m: *u });
    c.ops.extend(fwd.iter().rev().map(|o| o.adjoint()));
    Ok(c)
}

/// `U` on `A_j` of the first register and `B_k` of the second.
pub fn build_bipartite_two_qubit(ell: usize, j: usize, k: usize, u: &[[C64; 4]; 4]) -> Result<LogicalCircuit> {
    if !(j < ell && k < ell) {
        bail!(Index, "bipartite gate needs j, k < l, got j = {j}, k = {k}, l = {ell}");
    }
    check_unitary(u)?;
    use bipartite_wires::*;
    let mut c = LogicalCircuit::new(vec![
        Wire::qudit("S1", ell),
        Wire::qudit("S2", ell),
        Wire::qubit("Q1"),
        Wire::qubit("Q2"),
        Wire::qudit("B", 1),
        Wire::qubit("Q"),
    ]);
    push_bit_transfer(&mut c, ell, j, S1, Q1, B, Q);
    push_bit_transfer(&mut c, ell, k, S2, Q2, B, Q);
    let fwd = c.ops.clone();
    c.ops.push(LogicalOp::TwoQubit { a: Q1, b: Q2, m: *u });
    c.ops.extend(fwd.iter().rev().map(|o| o.adjoint()));
    Ok(c)
}

/// `J_l U_{A_j A_k} J_l^{-1}` as a dense `2^l x 2^l` matrix.
pub fn two_qubit_target(ell: usize, j: usize, k: usize, u: &[[C64; 4]; 4]) -> CMatrix {
    embed_two_qubit(u, ell, j, k)
}

/// `(J_l (x) J_l) U_{A_j B_k} (J_l (x) J_l)^{-1}` with index `x_A 2^l + x_B`.
pub fn bipartite_target(ell: usize, j: usize, k: usize, u: &[[C64; 4]; 4]) -> CMatrix {
    embed_two_qubit(u, 2 * ell, ell + j, k)
}

/// The arithmetic definition of `C^j_l X` on one basis state.
pub fn bit_transfer_action(ell: usize, j: usize, x: u64, b: u64) -> (u64, u64) {
    let modulus = 1u64 << ell;
    let nb = b ^ ((x >> j) & 1);
    ((x + modulus - (nb << j)) % modulus, nb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cnot, controlled_phase, hadamard, swap};
    use proptest::prelude::*;

    fn col_of(m: &CMatrix, col: usize) -> Vec<usize> {
        (0..m.rows()).filter(|&r| m[(r, col)] != c(0.0, 0.0)).collect()
    }

    #[test]
    fn ideal_matrix_examples() {
        let q = ideal_matrix(LogicalMap::new(MapKind::QCX, 2)).unwrap();
        assert_eq!(col_of(&q, 2 * 3 + 1), vec![1]);
        let l = ideal_matrix(LogicalMap::new(MapKind::LSB, 2)).unwrap();
        assert_eq!(col_of(&l, 2 * 2 + 1), vec![2 * 2 + 1]);
        let e = ideal_matrix(LogicalMap::new(MapKind::Embed, 2)).unwrap();
        assert_eq!((e.rows(), e.cols()), (8, 4));
        assert_eq!(col_of(&e, 3), vec![6]);
        assert!(ideal_matrix(LogicalMap::new(MapKind::QCX, 13)).is_err());
    }

    #[test]
    fn adjoint_matrices_are_adjoints() {
        for ell in 1..5 {
            for kind in [MapKind::QCX, MapKind::LSB, MapKind::Embed] {
                let m = LogicalMap::new(kind, ell);
                let a = ideal_matrix(m).unwrap().adjoint();
                assert_eq!(a, ideal_matrix(m.adjoint()).unwrap());
            }
        }
    }

    #[test]
    fn transfer_example_l2_j1() {
        let c = build_bit_transfer(2, 1).unwrap();
        let (out, lost) = c.apply_basis(&[3, 0, 0, 0]).unwrap();
        assert_eq!(lost, 0.0);
        assert_eq!(out.len(), 1);
        assert_eq!(out.keys().next().unwrap(), &vec![1, 1, 0, 0]);
    }

    #[test]
    fn transfer_counts() {
        assert_eq!(build_bit_transfer(3, 0).unwrap().op_count(), 2);
        assert_eq!(build_bit_transfer(3, 1).unwrap().op_count(), 8);
        assert_eq!(build_bit_transfer(3, 2).unwrap().op_count(), 18);
        for ell in 1..=10 {
            for j in 0..ell {
                assert!(build_bit_transfer(ell, j).unwrap().op_count() <= transfer_budget(j));
            }
        }
    }

    #[test]
    fn transfer_exhaustive_small() {
        for ell in 1..=5 {
            for j in 0..ell {
                let c = build_bit_transfer(ell, j).unwrap();
                let (m, leak) = c.restricted_matrix(&[transfer_wires::S, transfer_wires::T]).unwrap();
                assert_eq!(leak, 0.0);
                for x in 0..(1u64 << ell) {
                    for b in 0..2 {
                        let (y, nb) = bit_transfer_action(ell, j, x, b);
                        assert_eq!(col_of(&m, (2 * x + b) as usize), vec![(2 * y + nb) as usize]);
                    }
                }
            }
        }
    }

    #[test]
    fn adjoint_transfer_restores() {
        for ell in 1..=5 {
            for j in 0..ell {
                let c = build_bit_transfer(ell, j).unwrap();
                for x in 0..(1u64 << ell) {
                    let cleared = x & !(1 << j);
                    let (out, _) = c.adjoint().apply_basis(&[cleared, (x >> j) & 1, 0, 0]).unwrap();
                    assert_eq!(out.keys().next().unwrap(), &vec![x, 0, 0, 0]);
                }
            }
        }
    }

    #[test]
    fn two_qubit_examples() {
        let id = two_qubit_target(2, 0, 1, &crate::linalg::controlled_phase(0.0));
        let c = build_two_qubit(2, 0, 1, &controlled_phase(0.0)).unwrap();
        let (m, leak) = c.restricted_matrix(&[two_qubit_wires::S]).unwrap();
        assert_eq!(leak, 0.0);
        assert!(m.max_abs_diff(&id) < 1e-15);
        let c = build_two_qubit(2, 0, 1, &cnot()).unwrap();
        let (m, _) = c.restricted_matrix(&[two_qubit_wires::S]).unwrap();
        assert!(m.max_abs_diff(&two_qubit_target(2, 0, 1, &cnot())) < 1e-15);
        assert!(c.op_count() <= 48 * 2 - 16);
        assert!(build_two_qubit(2, 1, 1, &cnot()).is_err());
    }

    #[test]
    fn bipartite_examples() {
        let c = build_bipartite_two_qubit(1, 0, 0, &swap()).unwrap();
        let (m, leak) = c.restricted_matrix(&[bipartite_wires::S1, bipartite_wires::S2]).unwrap();
        assert_eq!(leak, 0.0);
        assert!(m.max_abs_diff(&CMatrix::from_4x4(&swap())) < 1e-15);
        let u = controlled_phase(PI / 3.0);
        let c = build_bipartite_two_qubit(2, 1, 0, &u).unwrap();
        let (m, _) = c.restricted_matrix(&[bipartite_wires::S1, bipartite_wires::S2]).unwrap();
        assert!(m.max_abs_diff(&bipartite_target(2, 1, 0, &u)) < 1e-12);
    }

    #[test]
    fn single_qubit_through_one_transfer() {
        let c = build_single_qubit(3, 2, &hadamard()).unwrap();
        let (m, leak) = c.restricted_matrix(&[two_qubit_wires::S]).unwrap();
        assert!(leak < 1e-15);
        let target = crate::linalg::embed_one_qubit(&hadamard(), 3, 2);
        assert!(m.max_abs_diff(&target) < 1e-15);
    }

    #[test]
    fn validate_rejects_wrong_register_size() {
        let mut c = LogicalCircuit::new(vec![Wire::qudit("S", 3), Wire::qubit("T")]);
        c.ops.push(map_op(MapKind::QCX, 2, 0, 1));
        assert!(c.validate().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn round_trip_identity(ell in 2usize..9, j_frac in 0.0..1.0f64, x in any::<u64>(), b in 0u64..2) {
            let j = ((ell as f64 * j_frac) as usize).min(ell - 1);
            let x = x % (1 << ell);
            let c = build_bit_transfer(ell, j).unwrap();
            let mut rt = c.clone();
            rt.append(&c.adjoint()).unwrap();
            let (out, lost) = rt.apply_basis(&[x, b, 0, 0]).unwrap();
            prop_assert_eq!(lost, 0.0);
            prop_assert_eq!(out.len(), 1);
            let (cfg, amp) = out.into_iter().next().unwrap();
            prop_assert_eq!(cfg, vec![x, b, 0, 0]);
            prop_assert_eq!(amp, c64one());
        }
    }

    fn c64one() -> C64 {
        c(1.0, 0.0)
    }
}
