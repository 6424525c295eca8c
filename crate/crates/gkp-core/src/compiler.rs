//! Lowering of logical circuits to elementary hybrid circuits.
//!
//! Every basic map has an exact elementary implementation on ideal GKP
//! codewords:
//!
//! | map | elementary circuit |
//! |-----|--------------------|
//! | `qCX_l` | controlled `e^{-i sqrt(2 pi / 2^l) P}` |
//! | `LSB_l` | `H`, `M_a'^n`, controlled `e^{iQ}`, `M_{1/a'}^n`, `H` with `a'^n = sqrt(pi) 2^{(l-1)/2}` |
//! | `Embed_l` | `M_{sqrt 2}` |
//!
//! Adjoints are obtained by reversing and inverting. Registers of the
//! logical circuit map to modes and its qubits to physical qubits in order
//! of appearance, which gives the fixed allocation `S = 0, B = 1` (bipartite:
//! `S1 = 0, S2 = 1, B = 2`) and `Q1 = 0, Q2 = 1, Q = 2`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::hybrid_sim::ElementaryGate;
use crate::linalg::hadamard;
use crate::logical_layer::{self, LogicalCircuit, LogicalMap, LogicalOp, MapKind, WireKind};
use crate::math::*;

/// Largest squeezing factor allowed in a lowered circuit.
pub const MAX_SQUEEZE: f64 = 2.0;

/// Displacement needed by `LSB_l`: `sqrt(pi) 2^{(l-1)/2}`.
pub fn lsb_alpha(ell: usize) -> f64 {
    PI.sqrt() * 2f64.powf((ell as f64 - 1.0) / 2.0)
}

/// Bound on displacement strengths in circuits acting on `l`-bit registers.
pub fn zeta(ell: usize) -> f64 {
    lsb_alpha(ell)
}

/// Elementary-gate budget of one lowered `LSB_l`.
pub fn lsb_budget(ell: usize) -> usize {
    ell + 6
}

/// Elementary-gate budget of a lowered bit transfer.
pub fn transfer_budget(ell: usize) -> usize {
    85 * ell * ell
}

/// Logical-map budget of a bit transfer.
pub fn transfer_map_budget(ell: usize) -> usize {
    36 * ell
}

/// Elementary-gate budget of a lowered two-qubit gate.
pub fn two_qubit_budget(ell: usize) -> usize {
    340 * ell * ell
}

/// `alpha = alpha'^n` with `n` factors of bounded strength.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezeDecomposition {
    pub alpha: f64,
    pub alpha_prime: f64,
    pub n: usize,
}

fn decompose_with_base(alpha: f64, log_base: f64) -> Result<SqueezeDecomposition> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        bail!(Parameter, "squeezing factor must be positive and finite, got {alpha}");
    }
    let la = alpha.ln();
    if la == 0.0 {
        return Ok(SqueezeDecomposition { alpha, alpha_prime: 1.0, n: 0 });
    }
    let n = (la.abs() / log_base - 1e-12).ceil().max(1.0) as usize;
    Ok(SqueezeDecomposition { alpha, alpha_prime: (la / n as f64).exp(), n })
}

/// `n = ceil(|ln alpha|)` factors, each of strength at most `e`.
pub fn squeeze_decompose(alpha: f64) -> Result<SqueezeDecomposition> {
    decompose_with_base(alpha, 1.0)
}

/// Fewest factors of strength at most `max_strength > 1`.
pub fn squeeze_decompose_bounded(alpha: f64, max_strength: f64) -> Result<SqueezeDecomposition> {
    if !(max_strength > 1.0) {
        bail!(Parameter, "strength bound must exceed 1, got {max_strength}");
    }
    decompose_with_base(alpha, max_strength.ln())
}

/// A physical wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PhysWire {
    Mode(usize),
    Qubit(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub total: usize,
    pub by_kind: BTreeMap<&'static str, usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElementaryCircuit {
    pub n_modes: usize,
    pub n_qubits: usize,
    pub gates: Vec<ElementaryGate>,
    /// Logical role of each physical wire, e.g. `("S", Mode(0))`.
    pub resources: Vec<(String, PhysWire)>,
    /// Logical maps that were lowered (0 for hand-built circuits).
    pub logical_maps: usize,
}

impl ElementaryCircuit {
    pub fn new(n_modes: usize, n_qubits: usize) -> Self {
        ElementaryCircuit { n_modes, n_qubits, gates: Vec::new(), resources: Vec::new(), logical_maps: 0 }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn counts(&self) -> GateCounts {
        let mut by_kind = BTreeMap::new();
        for g in &self.gates {
            *by_kind.entry(g.tag().name()).or_insert(0) += 1;
        }
        GateCounts { total: self.gates.len(), by_kind }
    }

    /// Largest `max(beta, 1/beta)` over squeezings (1 if there are none).
    pub fn max_squeeze(&self) -> f64 {
        self.gates.iter().filter(|g| g.is_squeeze()).map(|g| g.strength()).fold(1.0, f64::max)
    }

    /// Largest `|t|` over (controlled) displacements.
    pub fn max_displacement(&self) -> f64 {
        self.gates.iter().filter(|g| g.is_displacement()).map(|g| g.strength()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> Self {
        ElementaryCircuit { gates: self.gates.iter().rev().map(|g| g.inverse()).collect(), ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, g) in self.gates.iter().enumerate() {
            g.validate(self.n_modes, self.n_qubits).map_err(|e| crate::Error::Index(format!("gate {i}: {e}")))?;
        }
        Ok(())
    }

    pub fn wire_of(&self, role: &str) -> Option<PhysWire> {
        self.resources.iter().find(|(r, _)| r == role).map(|(_, w)| *w)
    }
}

/// Elementary gates for one basic map on `mode`, coupled to `qubit`.
pub fn lower_map(m: LogicalMap, mode: usize, qubit: usize) -> Result<Vec<ElementaryGate>> {
    if m.ell == 0 {
        bail!(Parameter, "basic maps need l >= 1");
    }
    let h = hadamard();
    let gates = match m.kind {
        MapKind::QCX | MapKind::QCXAdj => {
            let t = (2.0 * PI / 2f64.powi(m.ell as i32)).sqrt();
            let t = if m.kind == MapKind::QCX { t } else { -t };
            alloc::vec![ElementaryGate::CtrlDispP { qubit, mode, t }]
        }
        MapKind::LSB | MapKind::LSBAdj => {
            let sd = squeeze_decompose_bounded(lsb_alpha(m.ell), MAX_SQUEEZE)?;
            let mut g = Vec::with_capacity(2 * sd.n + 3);
            g.push(ElementaryGate::OneQubit { qubit, m: h });
            g.extend((0..sd.n).map(|_| ElementaryGate::Squeeze { mode, beta: sd.alpha_prime }));
            g.push(ElementaryGate::CtrlDispQ { qubit, mode, t: 1.0 });
            g.extend((0..sd.n).map(|_| ElementaryGate::Squeeze { mode, beta: 1.0 / sd.alpha_prime }));
            g.push(ElementaryGate::OneQubit { qubit, m: h });
            if m.kind == MapKind::LSBAdj {
                g = g.iter().rev().map(|x| x.inverse()).collect();
            }
            g
        }
        MapKind::Embed => alloc::vec![ElementaryGate::Squeeze { mode, beta: 2f64.sqrt() }],
        MapKind::EmbedAdj => alloc::vec![ElementaryGate::Squeeze { mode, beta: 1.0 / 2f64.sqrt() }],
    };
    Ok(gates)
}

/// A basic map on its own: one mode and (for qubit-coupled maps) one qubit.
pub fn lower_basic(m: LogicalMap) -> Result<ElementaryCircuit> {
    let mut c = ElementaryCircuit::new(1, usize::from(m.uses_qubit()));
    c.gates = lower_map(m, 0, 0)?;
    c.resources.push((String::from("S"), PhysWire::Mode(0)));
    if m.uses_qubit() {
        c.resources.push((String::from("Q"), PhysWire::Qubit(0)));
    }
    c.logical_maps = 1;
    Ok(c)
}

/// Lowers a validated logical circuit.
pub fn lower_logical(lc: &LogicalCircuit) -> Result<ElementaryCircuit> {
    lc.validate()?;
    let mut phys = Vec::with_capacity(lc.wires.len());
    let (mut nm, mut nq) = (0, 0);
    let mut resources = Vec::new();
    for w in &lc.wires {
        let p = match w.kind {
            WireKind::Qudit => {
                nm += 1;
                PhysWire::Mode(nm - 1)
            }
            WireKind::Qubit => {
                nq += 1;
                PhysWire::Qubit(nq - 1)
            }
        };
        resources.push((w.name.clone(), p));
        phys.push(p);
    }
    let mode = |w: usize| match phys[w] {
        PhysWire::Mode(m) => Ok(m),
        PhysWire::Qubit(_) => Err(crate::Error::Index(format!("wire {} is not a mode", lc.wires[w].name))),
    };
    let qubit = |w: usize| match phys[w] {
        PhysWire::Qubit(q) => Ok(q),
        PhysWire::Mode(_) => Err(crate::Error::Index(format!("wire {} is not a qubit", lc.wires[w].name))),
    };
    let mut c = ElementaryCircuit::new(nm, nq);
    c.resources = resources;
    for op in &lc.ops {
        match *op {
            LogicalOp::Map { map, reg, qubit: q } => {
                let qb = match q {
                    Some(q) => qubit(q)?,
                    None => 0,
                };
                c.gates.extend(lower_map(map, mode(reg)?, qb)?);
                c.logical_maps += 1;
            }
            LogicalOp::OneQubit { wire, m } => c.gates.push(ElementaryGate::OneQubit { qubit: qubit(wire)?, m }),
            LogicalOp::TwoQubit { a, b, m } => c.gates.push(ElementaryGate::TwoQubit { a: qubit(a)?, b: qubit(b)?, m }),
        }
    }
    c.validate()?;
    Ok(c)
}

/// Bit transfer `C^j_l X`: modes `S = 0`, `B = 1`; qubits `T = 0`, `Q = 1`.
pub fn lower_transfer(ell: usize, j: usize) -> Result<ElementaryCircuit> {
    lower_logical(&logical_layer::build_bit_transfer(ell, j)?)
}

/// Two-qubit gate on one register: modes `S, B`; qubits `Q1, Q2, Q`.
pub fn lower_two_qubit(ell: usize, j: usize, k: usize, u: &[[C64; 4]; 4]) -> Result<ElementaryCircuit> {
    lower_logical(&logical_layer::build_two_qubit(ell, j, k, u)?)
}

/// Two-qubit gate across two registers: modes `S1, S2, B`; qubits `Q1, Q2, Q`.
pub fn lower_two_qubit_bipartite(ell: usize, j: usize, k: usize, u: &[[C64; 4]; 4]) -> Result<ElementaryCircuit> {
    lower_logical(&logical_layer::build_bipartite_two_qubit(ell, j, k, u)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditBounds {
    pub max_squeeze: f64,
    pub max_displacement: f64,
    pub max_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    /// Offending gate, or `None` for the count bound.
    pub gate: Option<usize>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub squeeze_ok: bool,
    pub displacement_ok: bool,
    pub count_ok: bool,
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn pass(&self) -> bool {
        self.squeeze_ok && self.displacement_ok && self.count_ok
    }
}

/// Checks a circuit against strength and count bounds.
pub fn audit(c: &ElementaryCircuit, b: AuditBounds) -> AuditReport {
    let mut violations = Vec::new();
    let tol = 1e-12;
    let (mut squeeze_ok, mut displacement_ok) = (true, true);
    for (i, g) in c.gates.iter().enumerate() {
        let s = g.strength();
        if g.is_squeeze() && s > b.max_squeeze * (1.0 + tol) {
            squeeze_ok = false;
            violations.push(Violation {
                gate: Some(i),
                reason: format!("{:?} exceeds squeezing bound {}", g, b.max_squeeze),
            });
        }
        if g.is_displacement() && s > b.max_displacement * (1.0 + tol) {
            displacement_ok = false;
            violations.push(Violation {
                gate: Some(i),
                reason: format!("{:?} exceeds displacement bound {}", g, b.max_displacement),
            });
        }
    }
    let count_ok = c.len() <= b.max_count;
    if !count_ok {
        violations
            .push(Violation { gate: None, reason: format!("{} gates exceed the budget {}", c.len(), b.max_count) });
    }
    AuditReport { squeeze_ok, displacement_ok, count_ok, violations }
}
