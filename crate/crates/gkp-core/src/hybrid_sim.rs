//! States of `n` oscillators and `m` qubits, and elementary gates on them.
//!
//! A [`HybridState`] is a finite sum of product terms
//! `coeff * psi_0 (x) ... (x) psi_{n-1} (x) |bits>`, where every `psi_i` is a
//! [`ModeState`], itself a sum of wavepackets. Keeping a packet list per mode
//! (instead of one packet per mode per term) means a term whose modes carry
//! `N` and `M` peaks costs `N + M` packets rather than `N * M`.
//!
//! Bit `a` of the basis string is qubit `a`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::gkp_states::{ModeState, PRUNE_REL, SHAPE_TOL};
use crate::linalg::{adjoint_2x2, adjoint_4x4, is_unitary_2x2, is_unitary_4x4};
use crate::math::*;

/// One product term of a [`HybridState`].
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub modes: Vec<ModeState>,
    pub bits: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridState {
    n_modes: usize,
    n_qubits: usize,
    terms: Vec<Term>,
}

/// Gates of the bounded-strength elementary set.
///
/// Conventions: `DispQ(t) = e^{itQ}`, `DispP(t) = e^{-itP}` (a shift by `+t`),
/// `Squeeze(beta) = M_beta`. Controlled variants act when the control bit is 1.
/// Two-qubit matrices are indexed by `2 x_a + x_b`.
#[derive(Clone, Debug, PartialEq)]
pub enum ElementaryGate {
    DispQ { mode: usize, t: f64 },
    DispP { mode: usize, t: f64 },
    Squeeze { mode: usize, beta: f64 },
    CtrlDispQ { qubit: usize, mode: usize, t: f64 },
    CtrlDispP { qubit: usize, mode: usize, t: f64 },
    OneQubit { qubit: usize, m: [[C64; 2]; 2] },
    TwoQubit { a: usize, b: usize, m: [[C64; 4]; 4] },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GateKindTag {
    DispQ,
    DispP,
    Squeeze,
    CtrlDispQ,
    CtrlDispP,
    OneQubit,
    TwoQubit,
}

impl GateKindTag {
    pub fn name(self) -> &'static str {
        match self {
            GateKindTag::DispQ => "disp_q",
            GateKindTag::DispP => "disp_p",
            GateKindTag::Squeeze => "squeeze",
            GateKindTag::CtrlDispQ => "ctrl_disp_q",
            GateKindTag::CtrlDispP => "ctrl_disp_p",
            GateKindTag::OneQubit => "one_qubit",
            GateKindTag::TwoQubit => "two_qubit",
        }
    }
}

impl ElementaryGate {
    pub fn tag(&self) -> GateKindTag {
        match self {
            ElementaryGate::DispQ { .. } => GateKindTag::DispQ,
            ElementaryGate::DispP { .. } => GateKindTag::DispP,
            ElementaryGate::Squeeze { .. } => GateKindTag::Squeeze,
            ElementaryGate::CtrlDispQ { .. } => GateKindTag::CtrlDispQ,
            ElementaryGate::CtrlDispP { .. } => GateKindTag::CtrlDispP,
            ElementaryGate::OneQubit { .. } => GateKindTag::OneQubit,
            ElementaryGate::TwoQubit { .. } => GateKindTag::TwoQubit,
        }
    }

    /// `|t|` for displacements, `max(beta, 1/beta)` for squeezings, 0 for qubit gates.
    pub fn strength(&self) -> f64 {
        match *self {
            ElementaryGate::DispQ { t, .. }
            | ElementaryGate::DispP { t, .. }
            | ElementaryGate::CtrlDispQ { t, .. }
            | ElementaryGate::CtrlDispP { t, .. } => t.abs(),
            ElementaryGate::Squeeze { beta, .. } => beta.max(1.0 / beta),
            _ => 0.0,
        }
    }

    pub fn is_squeeze(&self) -> bool {
        matches!(self, ElementaryGate::Squeeze { .. })
    }

    pub fn is_displacement(&self) -> bool {
        matches!(
            self,
            ElementaryGate::DispQ { .. }
                | ElementaryGate::DispP { .. }
                | ElementaryGate::CtrlDispQ { .. }
                | ElementaryGate::CtrlDispP { .. }
        )
    }

    /// The exact inverse gate.
    pub fn inverse(&self) -> Self {
        match *self {
            ElementaryGate::DispQ { mode, t } => ElementaryGate::DispQ { mode, t: -t },
            ElementaryGate::DispP { mode, t } => ElementaryGate::DispP { mode, t: -t },
            ElementaryGate::Squeeze { mode, beta } => ElementaryGate::Squeeze { mode, beta: 1.0 / beta },
            ElementaryGate::CtrlDispQ { qubit, mode, t } => ElementaryGate::CtrlDispQ { qubit, mode, t: -t },
            ElementaryGate::CtrlDispP { qubit, mode, t } => ElementaryGate::CtrlDispP { qubit, mode, t: -t },
            ElementaryGate::OneQubit { qubit, ref m } => ElementaryGate::OneQubit { qubit, m: adjoint_2x2(m) },
            ElementaryGate::TwoQubit { a, b, ref m } => ElementaryGate::TwoQubit { a, b, m: adjoint_4x4(m) },
        }
    }

    /// Modes and qubits touched by the gate.
    pub fn wires(&self) -> (Vec<usize>, Vec<usize>) {
        match *self {
            ElementaryGate::DispQ { mode, .. }
            | ElementaryGate::DispP { mode, .. }
            | ElementaryGate::Squeeze { mode, .. } => (vec![mode], vec![]),
            ElementaryGate::CtrlDispQ { qubit, mode, .. } | ElementaryGate::CtrlDispP { qubit, mode, .. } => {
                (vec![mode], vec![qubit])
            }
            ElementaryGate::OneQubit { qubit, .. } => (vec![], vec![qubit]),
            ElementaryGate::TwoQubit { a, b, .. } => (vec![], vec![a, b]),
        }
    }

    /// Checks wire indices against a register shape and qubit matrices for unitarity.
    pub fn validate(&self, n_modes: usize, n_qubits: usize) -> Result<()> {
        let (modes, qubits) = self.wires();
        for m in modes {
            if m >= n_modes {
                bail!(Index, "{} uses mode {m} but only {n_modes} modes exist", self.tag().name());
            }
        }
        for q in &qubits {
            if *q >= n_qubits {
                bail!(Index, "{} uses qubit {q} but only {n_qubits} qubits exist", self.tag().name());
            }
        }
        match self {
            ElementaryGate::Squeeze { beta, .. } if !(*beta > 0.0) => {
                bail!(Parameter, "squeezing parameter must be positive, got {beta}")
            }
            ElementaryGate::OneQubit { m, .. } if !is_unitary_2x2(m, 1e-12) => {
                bail!(Parameter, "single-qubit matrix is not unitary")
            }
            ElementaryGate::TwoQubit { a, b, m } => {
                if a == b {
                    bail!(Index, "two-qubit gate on identical qubits {a}");
                }
                if !is_unitary_4x4(m, 1e-12) {
                    bail!(Parameter, "two-qubit matrix is not unitary");
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Counters reported by [`run_circuit`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub peak_terms: usize,
    pub peak_packets: usize,
}

impl HybridState {
    pub fn empty(n_modes: usize, n_qubits: usize) -> Self {
        HybridState { n_modes, n_qubits, terms: Vec::new() }
    }

    /// `psi_0 (x) ... (x) |bits>`.
    pub fn product(modes: Vec<ModeState>, n_qubits: usize, bits: u64) -> Result<Self> {
        if n_qubits > 64 {
            bail!(TooLarge, "at most 64 qubits are supported, got {n_qubits}");
        }
        if n_qubits < 64 && bits >> n_qubits != 0 {
            bail!(Index, "basis string {bits:#b} does not fit {n_qubits} qubits");
        }
        Ok(HybridState { n_modes: modes.len(), n_qubits, terms: vec![Term { coeff: c(1.0, 0.0), modes, bits }] })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn packet_count(&self) -> usize {
        self.terms.iter().map(|t| t.modes.iter().map(|m| m.len()).sum::<usize>()).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff *= s;
        }
        out
    }

    /// Term-wise sum; no merging or normalization.
    pub fn add(&self, other: &HybridState) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    fn check_shape(&self, other: &HybridState) -> Result<()> {
        if self.n_modes != other.n_modes || self.n_qubits != other.n_qubits {
            bail!(
                Shape,
                "states on ({}, {}) and ({}, {}) modes/qubits",
                self.n_modes,
                self.n_qubits,
                other.n_modes,
                other.n_qubits
            );
        }
        Ok(())
    }

    pub fn inner_product(&self, other: &HybridState) -> Result<C64> {
        self.check_shape(other)?;
        let mut acc = c(0.0, 0.0);
        for a in &self.terms {
            for b in other.terms.iter().filter(|b| b.bits == a.bits) {
                let mut v = a.coeff.conj() * b.coeff;
                for (ma, mb) in a.modes.iter().zip(&b.modes) {
                    if v == c(0.0, 0.0) {
                        break;
                    }
                    v *= ma.inner_product(mb);
                }
                acc += v;
            }
        }
        Ok(acc)
    }

    /// Pointwise amplitude at mode positions `xs` and basis string `bits`.
    pub fn eval(&self, xs: &[f64], bits: u64) -> C64 {
        self.terms
            .iter()
            .filter(|t| t.bits == bits)
            .map(|t| t.modes.iter().zip(xs).fold(t.coeff, |acc, (m, &x)| acc * m.eval(x)))
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner_product(self).expect("same shape").re
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().max(0.0).sqrt()
    }

    /// Combines terms that agree on the qubit string and on all but at most
    /// one mode, then drops terms with vanishing coefficient or empty modes.
    pub fn merge_terms(&self) -> Self {
        let mut groups: BTreeMap<u64, Vec<Term>> = BTreeMap::new();
        for t in &self.terms {
            groups.entry(t.bits).or_default().push(t.clone());
        }
        let max_coeff = self.terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max);
        let mut out = Vec::new();
        for (_, mut ts) in groups {
            let mut changed = true;
            while changed {
                changed = false;
                'outer: for i in 0..ts.len() {
                    for j in (i + 1)..ts.len() {
                        if let Some(merged) = merge_pair(&ts[i], &ts[j]) {
                            ts[i] = merged;
                            ts.swap_remove(j);
                            changed = true;
                            break 'outer;
                        }
                    }
                }
            }
            out.extend(ts.into_iter().filter(|t| {
                t.coeff.norm() > PRUNE_REL * max_coeff && t.coeff.norm() > 0.0 && t.modes.iter().all(|m| !m.is_empty())
            }));
        }
        HybridState { n_modes: self.n_modes, n_qubits: self.n_qubits, terms: out }
    }

    pub fn apply_gate(&self, g: &ElementaryGate) -> Result<Self> {
        g.validate(self.n_modes, self.n_qubits)?;
        let map_mode =
            |f: &dyn Fn(&ModeState) -> Result<ModeState>, mode: usize, ctrl: Option<usize>| -> Result<Self> {
                let mut out = self.clone();
                for t in &mut out.terms {
                    if ctrl.map_or(true, |q| (t.bits >> q) & 1 == 1) {
                        t.modes[mode] = f(&t.modes[mode])?;
                    }
                }
                Ok(out)
            };
        match *g {
            ElementaryGate::DispQ { mode, t } => map_mode(&|m| Ok(m.phase_mul(t)), mode, None),
            ElementaryGate::DispP { mode, t } => map_mode(&|m| Ok(m.translate(t)), mode, None),
            ElementaryGate::Squeeze { mode, beta } => map_mode(&|m| m.dilate(beta), mode, None),
            ElementaryGate::CtrlDispQ { qubit, mode, t } => map_mode(&|m| Ok(m.phase_mul(t)), mode, Some(qubit)),
            ElementaryGate::CtrlDispP { qubit, mode, t } => map_mode(&|m| Ok(m.translate(t)), mode, Some(qubit)),
            ElementaryGate::OneQubit { qubit, ref m } => {
                let mut terms = Vec::with_capacity(2 * self.terms.len());
                for t in &self.terms {
                    let x = ((t.bits >> qubit) & 1) as usize;
                    for (r, row) in m.iter().enumerate() {
                        let v = row[x];
                        if v != c(0.0, 0.0) {
                            let bits = (t.bits & !(1u64 << qubit)) | ((r as u64) << qubit);
                            terms.push(Term { coeff: t.coeff * v, modes: t.modes.clone(), bits });
                        }
                    }
                }
                Ok(HybridState { terms, ..self.clone_shape() }.merge_terms())
            }
            ElementaryGate::TwoQubit { a, b, ref m } => {
                let mut terms = Vec::with_capacity(4 * self.terms.len());
                for t in &self.terms {
                    let x = 2 * ((t.bits >> a) & 1) as usize + ((t.bits >> b) & 1) as usize;
                    for (r, row) in m.iter().enumerate() {
                        let v = row[x];
                        if v != c(0.0, 0.0) {
                            let bits = (t.bits & !(1u64 << a) & !(1u64 << b))
                                | (((r >> 1) as u64) << a)
                                | (((r & 1) as u64) << b);
                            terms.push(Term { coeff: t.coeff * v, modes: t.modes.clone(), bits });
                        }
                    }
                }
                Ok(HybridState { terms, ..self.clone_shape() }.merge_terms())
            }
        }
    }

    fn clone_shape(&self) -> Self {
        HybridState { n_modes: self.n_modes, n_qubits: self.n_qubits, terms: Vec::new() }
    }
}

fn merge_pair(a: &Term, b: &Term) -> Option<Term> {
    let mut differing = None;
    for (i, (ma, mb)) in a.modes.iter().zip(&b.modes).enumerate() {
        if !ma.approx_eq(mb, SHAPE_TOL) {
            if differing.is_some() {
                return None;
            }
            differing = Some(i);
        }
    }
    let mut out = a.clone();
    match differing {
        None => out.coeff += b.coeff,
        Some(i) => {
            out.modes[i] = a.modes[i].scale(a.coeff).add(&b.modes[i].scale(b.coeff));
            out.coeff = c(1.0, 0.0);
        }
    }
    Some(out)
}

/// Applies `gates` in order and reports the largest term and packet counts seen.
pub fn run_circuit(s: &HybridState, gates: &[ElementaryGate]) -> Result<(HybridState, RunStats)> {
    let mut cur = s.clone();
    let mut stats = RunStats { peak_terms: cur.terms.len(), peak_packets: cur.packet_count() };
    for g in gates {
        cur = cur.apply_gate(g)?;
        stats.peak_terms = stats.peak_terms.max(cur.terms.len());
        stats.peak_packets = stats.peak_packets.max(cur.packet_count());
    }
    Ok((cur, stats))
}
