//! Qudit Clifford gates for `d = 2^l` and their factorization into one- and
//! two-qubit gates on the binary digits of the register.
//!
//! With `omega = e^{2 pi i/d}`:
//!
//! - `X|x> = |x + 1>`, `Z|x> = omega^x |x>`,
//! - `P|x> = e^{i pi x^2/d} |x>`,
//! - `F|x> = d^{-1/2} sum_y omega^{xy} |y>`,
//! - `CZ|x>|y> = omega^{xy} |x>|y>` (index `x d + y`),
//! - `Zphase(theta)|x> = e^{i theta x} |x>`.
//!
//! Writing `x = sum_j 2^j x_j`, `P` and `CZ` are products of controlled phases
//! over all ordered digit pairs (the pairs `j = k` of `P` are single-qubit
//! phases), `Zphase` is a product of single-qubit phases and `F` is the usual
//! quantum Fourier transform circuit. Since a basis index already is the
//! binary encoding, the digit isomorphism is the identity on indices.

use alloc::vec::Vec;

use crate::compiler::{self, ElementaryCircuit};
use crate::error::{bail, Result};
use crate::error_analysis::{analytic_bound, AnalyticBound, BoundTarget};
use crate::linalg::{
    controlled_phase, embed_one_qubit, embed_two_qubit, hadamard, phase_gate, swap, swap_qubits, CMatrix,
};
use crate::logical_layer::{self, LogicalCircuit};
use crate::math::*;

/// Largest register for dense single-register matrices.
pub const MAX_ELL: usize = 10;
/// Largest register for dense `CZ` matrices.
pub const MAX_ELL_CZ: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateName {
    X,
    Z,
    P,
    F,
    CZ,
    Zphase(f64),
}

impl GateName {
    pub fn label(&self) -> &'static str {
        match self {
            GateName::X => "X",
            GateName::Z => "Z",
            GateName::P => "P",
            GateName::F => "F",
            GateName::CZ => "CZ",
            GateName::Zphase(_) => "Zphase",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuditGate {
    pub name: GateName,
    pub ell: usize,
}

impl QuditGate {
    pub fn new(name: GateName, ell: usize) -> Self {
        QuditGate { name, ell }
    }

    pub fn d(&self) -> usize {
        1 << self.ell
    }
}

/// Dense matrix of a qudit gate.
pub fn gate_matrix(g: QuditGate) -> Result<CMatrix> {
    let limit = if g.name == GateName::CZ { MAX_ELL_CZ } else { MAX_ELL };
    if g.ell == 0 || g.ell > limit {
        bail!(TooLarge, "{} needs 1 <= l <= {limit}, got {}", g.name.label(), g.ell);
    }
    let d = g.d();
    let df = d as f64;
    let omega = |k: usize| cis(2.0 * PI * (k % d) as f64 / df);
    let m = match g.name {
        GateName::X => CMatrix::from_fn(d, d, |r, col| if r == (col + 1) % d { c(1.0, 0.0) } else { c(0.0, 0.0) }),
        GateName::Z => CMatrix::diagonal(&(0..d).map(omega).collect::<Vec<_>>()),
        GateName::P => {
            CMatrix::diagonal(&(0..d).map(|x| cis(PI * ((x * x) % (2 * d)) as f64 / df)).collect::<Vec<_>>())
        }
        GateName::F => CMatrix::from_fn(d, d, |y, x| omega(x * y) / df.sqrt()),
        GateName::CZ => CMatrix::diagonal(&(0..d * d).map(|i| omega((i / d) * (i % d))).collect::<Vec<_>>()),
        GateName::Zphase(theta) => CMatrix::diagonal(&(0..d).map(|x| cis(theta * x as f64)).collect::<Vec<_>>()),
    };
    Ok(m)
}

/// Which register a digit belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum System {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Digit {
    pub system: System,
    pub index: usize,
}

impl Digit {
    pub fn a(index: usize) -> Self {
        Digit { system: System::A, index }
    }

    pub fn b(index: usize) -> Self {
        Digit { system: System::B, index }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Factor {
    One {
        digit: Digit,
        m: [[C64; 2]; 2],
    },
    /// Matrix indexed by `2 x_a + x_b`.
    Two {
        a: Digit,
        b: Digit,
        m: [[C64; 4]; 4],
    },
}

/// An ordered product of factors (the first factor acts first).
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitFactorization {
    pub gate: QuditGate,
    pub bipartite: bool,
    pub factors: Vec<Factor>,
}

impl TwoQubitFactorization {
    /// Number of factors `T`.
    pub fn t(&self) -> usize {
        self.factors.len()
    }

    fn qubit(&self, d: Digit) -> usize {
        match d.system {
            System::A if self.bipartite => self.gate.ell + d.index,
            _ => d.index,
        }
    }

    /// Dense product on `l` (or `2l`) qubits; digit `A_j` of a bipartite
    /// system is bit `l + j` of the index `x_A 2^l + x_B`.
    pub fn dense(&self) -> CMatrix {
        let n = if self.bipartite { 2 * self.gate.ell } else { self.gate.ell };
        let mut acc = CMatrix::identity(1 << n);
        for f in &self.factors {
            let m = match f {
                Factor::One { digit, m } => embed_one_qubit(m, n, self.qubit(*digit)),
                Factor::Two { a, b, m } => embed_two_qubit(m, n, self.qubit(*a), self.qubit(*b)),
            };
            acc = &m * &acc;
        }
        acc
    }

    /// The logical-layer circuit: each factor between bit transfers.
    pub fn logical_circuit(&self) -> Result<LogicalCircuit> {
        let ell = self.gate.ell;
        let mut out: Option<LogicalCircuit> = None;
        for f in &self.factors {
            let piece = match f {
                Factor::One { digit, m } => logical_layer::build_single_qubit(ell, digit.index, m)?,
                Factor::Two { a, b, m } if self.bipartite => {
                    let (a, b, m) = if a.system == System::A { (a, b, *m) } else { (b, a, swap_qubits(m)) };
                    logical_layer::build_bipartite_two_qubit(ell, a.index, b.index, &m)?
                }
                Factor::Two { a, b, m } => {
                    let (j, k, m) =
                        if a.index < b.index { (a.index, b.index, *m) } else { (b.index, a.index, swap_qubits(m)) };
                    logical_layer::build_two_qubit(ell, j, k, &m)?
                }
            };
            match out.as_mut() {
                Some(c) => c.append(&piece)?,
                None => out = Some(piece),
            }
        }
        match out {
            Some(c) => Ok(c),
            None => bail!(Precondition, "empty factorization"),
        }
    }
}

/// Factorization of `F`, `P`, `CZ` or `Zphase`.
pub fn decompose(g: QuditGate) -> Result<TwoQubitFactorization> {
    let ell = g.ell;
    if ell == 0 || ell > MAX_ELL {
        bail!(TooLarge, "factorizations need 1 <= l <= {MAX_ELL}, got {ell}");
    }
    let lf = 2f64.powi(ell as i32);
    let mut factors = Vec::new();
    let bipartite = g.name == GateName::CZ;
    match g.name {
        GateName::P => {
            for j in 0..ell {
                for k in 0..ell {
                    let theta = PI * 2f64.powi((j + k) as i32) / lf;
                    if j == k {
                        factors.push(Factor::One { digit: Digit::a(j), m: phase_gate(theta) });
                    } else {
                        factors.push(Factor::Two { a: Digit::a(j), b: Digit::a(k), m: controlled_phase(theta) });
                    }
                }
            }
        }
        GateName::CZ => {
            for j in 0..ell {
                for k in 0..ell {
                    let theta = 2.0 * PI * 2f64.powi((j + k) as i32) / lf;
                    factors.push(Factor::Two { a: Digit::a(j), b: Digit::b(k), m: controlled_phase(theta) });
                }
            }
        }
        GateName::Zphase(theta) => {
            for j in 0..ell {
                factors.push(Factor::One { digit: Digit::a(j), m: phase_gate(theta * 2f64.powi(j as i32)) });
            }
        }
        GateName::F => {
            for i in (0..ell).rev() {
                factors.push(Factor::One { digit: Digit::a(i), m: hadamard() });
                for m in (0..i).rev() {
                    let theta = 2.0 * PI / 2f64.powi((i - m + 1) as i32);
                    factors.push(Factor::Two { a: Digit::a(m), b: Digit::a(i), m: controlled_phase(theta) });
                }
            }
            for i in 0..ell / 2 {
                factors.push(Factor::Two { a: Digit::a(i), b: Digit::a(ell - 1 - i), m: swap() });
            }
        }
        GateName::X | GateName::Z => bail!(Parameter, "no two-qubit factorization for {}", g.name.label()),
    }
    Ok(TwoQubitFactorization { gate: g, bipartite, factors })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliffordCompilation {
    pub factorization: TwoQubitFactorization,
    pub circuit: ElementaryCircuit,
    /// `340 l^2 T`.
    pub count_budget: usize,
    /// `T 400 l kappa`.
    pub bound: AnalyticBound,
}

/// Lowers every factor (single register for `F`, `P`, `Zphase`; two
/// registers for `CZ`) and composes the per-gate bounds.
pub fn compile_and_bound(g: QuditGate, kappa: f64) -> Result<CliffordCompilation> {
    let factorization = decompose(g)?;
    let lc = factorization.logical_circuit()?;
    let circuit = compiler::lower_logical(&lc)?;
    let t = factorization.t();
    let count_budget = compiler::two_qubit_budget(g.ell) * t;
    if circuit.len() > count_budget {
        bail!(Precondition, "{} gates exceed the budget {count_budget}", circuit.len());
    }
    let bound = analytic_bound(BoundTarget::Circuit { ell: g.ell, kappa, gates: t });
    Ok(CliffordCompilation { factorization, circuit, count_budget, bound })
}

/// Largest entry-wise deviation, up to global phase, between the factor
/// product and the dense gate.
pub fn decomposition_error(g: QuditGate) -> Result<f64> {
    let f = decompose(g)?;
    let target = gate_matrix(g)?;
    let dense = f.dense();
    if dense.rows() != target.rows() {
        bail!(Shape, "factor product is {}x{}, target {}x{}", dense.rows(), dense.cols(), target.rows(), target.cols());
    }
    Ok(dense.max_abs_diff_up_to_phase(&target))
}

/// `Z X = omega X Z` deviation.
pub fn commutation_defect(ell: usize) -> Result<f64> {
    let x = gate_matrix(QuditGate::new(GateName::X, ell))?;
    let z = gate_matrix(QuditGate::new(GateName::Z, ell))?;
    let omega = cis(2.0 * PI / (1usize << ell) as f64);
    Ok((&z * &x).max_abs_diff(&(&x * &z).scale(omega)))
}

/// Exponent `b` of the least-squares fit `y = a x^b`.
pub fn power_law_exponent(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    crate::error_analysis::fit_slope(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hadamard;

    #[test]
    fn small_matrices() {
        let p = gate_matrix(QuditGate::new(GateName::P, 1)).unwrap();
        assert!(p.max_abs_diff(&CMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)])) < 1e-15);
        let f = gate_matrix(QuditGate::new(GateName::F, 1)).unwrap();
        assert!(f.max_abs_diff(&CMatrix::from_2x2(&hadamard())) < 1e-15);
        let cz = gate_matrix(QuditGate::new(GateName::CZ, 1)).unwrap();
        let expect = CMatrix::diagonal(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(cz.max_abs_diff(&expect) < 1e-15);
        assert!(gate_matrix(QuditGate::new(GateName::CZ, 6)).is_err());
        assert!(gate_matrix(QuditGate::new(GateName::P, 11)).is_err());
    }

    #[test]
    fn p_l2_diagonal() {
        let p = gate_matrix(QuditGate::new(GateName::P, 2)).unwrap();
        for x in 0..4 {
            assert!((p[(x, x)] - cis(PI * (x * x) as f64 / 4.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn unitary_and_relations() {
        for ell in 1..=6 {
            for name in [GateName::X, GateName::Z, GateName::P, GateName::F, GateName::Zphase(0.3)] {
                assert!(gate_matrix(QuditGate::new(name, ell)).unwrap().unitarity_defect() < 1e-12);
            }
            assert!(commutation_defect(ell).unwrap() < 1e-12);
            let d = (1usize << ell) as f64;
            let zp = gate_matrix(QuditGate::new(GateName::Zphase(2.0 * PI / d), ell)).unwrap();
            assert!(zp.max_abs_diff(&gate_matrix(QuditGate::new(GateName::Z, ell)).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn factorizations_are_exact() {
        for ell in 1..=4 {
            for name in [GateName::F, GateName::P, GateName::Zphase(PI / 7.0)] {
                let e = decomposition_error(QuditGate::new(name, ell)).unwrap();
                assert!(e < 1e-10, "{name:?} l={ell}: {e}");
            }
        }
        for ell in 1..=3 {
            assert!(decomposition_error(QuditGate::new(GateName::CZ, ell)).unwrap() < 1e-10);
        }
    }

    #[test]
    fn factor_counts() {
        assert_eq!(decompose(QuditGate::new(GateName::P, 3)).unwrap().t(), 9);
        assert_eq!(decompose(QuditGate::new(GateName::Zphase(0.1), 3)).unwrap().t(), 3);
        assert_eq!(decompose(QuditGate::new(GateName::F, 1)).unwrap().t(), 1);
        assert!(decompose(QuditGate::new(GateName::X, 2)).is_err());
    }

    #[test]
    fn compiled_examples() {
        let z = compile_and_bound(QuditGate::new(GateName::Zphase(0.4), 2), 0.01).unwrap();
        assert_eq!(z.factorization.t(), 2);
        assert!((z.bound.value - 2.0 * 400.0 * 2.0 * 0.01).abs() < 1e-12);
        let f = compile_and_bound(QuditGate::new(GateName::F, 1), 0.001).unwrap();
        assert!((f.bound.value - 0.4).abs() < 1e-12);
        let cz = compile_and_bound(QuditGate::new(GateName::CZ, 2), 0.01).unwrap();
        assert_eq!((cz.circuit.n_modes, cz.circuit.n_qubits), (3, 3));
    }

    #[test]
    fn logical_circuits_match_targets() {
        use crate::logical_layer::{bipartite_wires, two_qubit_wires};
        for ell in 1..=3 {
            for name in [GateName::F, GateName::P, GateName::Zphase(PI / 7.0)] {
                let g = QuditGate::new(name, ell);
                let lc = decompose(g).unwrap().logical_circuit().unwrap();
                let (m, leak) = lc.restricted_matrix(&[two_qubit_wires::S]).unwrap();
                assert!(leak < 1e-12);
                assert!(m.max_abs_diff_up_to_phase(&gate_matrix(g).unwrap()) < 1e-10);
            }
        }
        let g = QuditGate::new(GateName::CZ, 2);
        let lc = decompose(g).unwrap().logical_circuit().unwrap();
        let (m, _) = lc.restricted_matrix(&[bipartite_wires::S1, bipartite_wires::S2]).unwrap();
        assert!(m.max_abs_diff_up_to_phase(&gate_matrix(g).unwrap()) < 1e-10);
    }

    #[test]
    fn p_bound_grows_cubically() {
        let ls = [2.0, 3.0, 4.0, 5.0];
        let ys: Vec<f64> = ls
            .iter()
            .map(|&l| decompose(QuditGate::new(GateName::P, l as usize)).unwrap().t() as f64 * 400.0 * l)
            .collect();
        let b = power_law_exponent(&ls, &ys);
        assert!((2.5..=3.5).contains(&b));
    }
}
