//! Matrix elements of implementations and the bounds built on them.
//!
//! For an implementation `W` of a logical unitary (or isometry) `U` between
//! codes with orthonormal bases `{|in_k>}`, `{|out_m>}`, the B matrix is
//!
//! ```text
//! B_{jk} = sum_m conj(U_{mj}) <out_m| W |in_k>,
//! ```
//!
//! and when `B` is `s`-sparse with a real non-zero diagonal the logical gate
//! error is at most `8 ((1 - min_j |B_jj|) + (s - 1) max_{j != k} |B_jk|)^{1/2}`.
//! The exact diamond norm is never computed.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::compiler::{self, ElementaryCircuit};
use crate::error::{bail, Result};
use crate::gkp_states::{comb_base_state, make_codeword, make_codeword_relaxed, symmetric_params, GkpCodeParams};
use crate::hybrid_sim::{run_circuit, HybridState};
use crate::linalg::CMatrix;
use crate::logical_layer::{ideal_matrix, LogicalCircuit, LogicalMap, MapKind, WireKind};
use crate::math::*;

/// Entries at or below this magnitude are structural zeros.
pub const SPARSITY_THRESHOLD: f64 = 1e-12;
/// Largest `|Im B_jj|` accepted by [`sparse_bound`].
pub const DIAG_IMAG_TOL: f64 = 1e-8;
/// Tolerance for the orthonormality of code bases.
pub const BASIS_TOL: f64 = 1e-10;
/// Bounds at or above this value carry no information (diamond-norm ceiling).
pub const VACUOUS: f64 = 2.0;

/// Role of a mode in a code space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeRole {
    /// Carries a `bits`-bit register that is part of the logical index.
    Data { bits: usize },
    /// Holds the fixed codeword `value` of a `bits`-bit register.
    Fixed { bits: usize, value: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitRole {
    Data,
    Fixed(bool),
}

/// A code space on a hybrid system: every mode a GKP register, every qubit
/// either logical or fixed.
///
/// The logical index lists data modes (most significant first), then data
/// qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeSpace {
    /// Envelope, `kappa`, `Delta`, `eps`; the dimension is set per mode.
    pub params: GkpCodeParams,
    pub modes: Vec<ModeRole>,
    pub qubits: Vec<QubitRole>,
}

impl CodeSpace {
    pub fn dim(&self) -> usize {
        let m: usize = self.modes.iter().map(|r| if let ModeRole::Data { bits } = r { 1 << bits } else { 1 }).product();
        m << self.qubits.iter().filter(|q| **q == QubitRole::Data).count()
    }

    /// Code basis state with logical index `index`.
    pub fn basis_state(&self, index: usize) -> Result<HybridState> {
        if index >= self.dim() {
            bail!(Index, "basis index {index} out of range for dimension {}", self.dim());
        }
        let mut rest = index;
        let mut bits = 0u64;
        for (q, role) in self.qubits.iter().enumerate().rev() {
            match role {
                QubitRole::Data => {
                    bits |= ((rest & 1) as u64) << q;
                    rest >>= 1;
                }
                QubitRole::Fixed(true) => bits |= 1 << q,
                QubitRole::Fixed(false) => {}
            }
        }
        let mut values = vec![0usize; self.modes.len()];
        for (i, role) in self.modes.iter().enumerate().rev() {
            values[i] = match *role {
                ModeRole::Data { bits } => {
                    let v = rest & ((1 << bits) - 1);
                    rest >>= bits;
                    v
                }
                ModeRole::Fixed { value, .. } => value,
            };
        }
        let modes = self
            .modes
            .iter()
            .zip(&values)
            .map(|(role, &v)| {
                let b = match *role {
                    ModeRole::Data { bits } | ModeRole::Fixed { bits, .. } => bits,
                };
                codeword(&self.params.with_dimension(1 << b), v)
            })
            .collect::<Result<Vec<_>>>()?;
        HybridState::product(modes, self.qubits.len(), bits)
    }

    pub fn basis(&self) -> Result<Vec<HybridState>> {
        (0..self.dim()).map(|i| self.basis_state(i)).collect()
    }
}

/// Codeword `v`; the orthogonality check on `eps` is dropped when `eps`
/// exceeds `1/(2d)` (embedding targets).
pub fn codeword(p: &GkpCodeParams, v: usize) -> Result<crate::gkp_states::ModeState> {
    if p.orthogonal_truncation() {
        make_codeword(p, v)
    } else {
        make_codeword_relaxed(p, v)
    }
}

/// Input and output code spaces of a logical circuit with the given data
/// wires; all other registers hold codeword 0, all other qubits `|0>`.
pub fn spaces_for_circuit(
    lc: &LogicalCircuit,
    data: &[usize],
    params: &GkpCodeParams,
) -> Result<(CodeSpace, CodeSpace)> {
    let final_bits = lc.validate()?;
    let mut sin = CodeSpace { params: *params, modes: Vec::new(), qubits: Vec::new() };
    let mut sout = sin.clone();
    for (i, w) in lc.wires.iter().enumerate() {
        let is_data = data.contains(&i);
        match w.kind {
            WireKind::Qudit => {
                let (a, b) = if is_data {
                    (ModeRole::Data { bits: w.bits }, ModeRole::Data { bits: final_bits[i] })
                } else {
                    (ModeRole::Fixed { bits: w.bits, value: 0 }, ModeRole::Fixed { bits: final_bits[i], value: 0 })
                };
                sin.modes.push(a);
                sout.modes.push(b);
            }
            WireKind::Qubit => {
                let r = if is_data { QubitRole::Data } else { QubitRole::Fixed(false) };
                sin.qubits.push(r);
                sout.qubits.push(r);
            }
        }
    }
    // The logical index of a code space lists modes before qubits; data wires
    // must already be in that order for the ideal matrices to line up.
    let mut seen_qubit = false;
    for &w in data {
        match lc.wires[w].kind {
            WireKind::Qubit => seen_qubit = true,
            WireKind::Qudit if seen_qubit => bail!(Precondition, "data registers must precede data qubits"),
            WireKind::Qudit => {}
        }
    }
    Ok((sin, sout))
}

/// Spaces of a basic map: one register (`bits` in, possibly `bits + 1` out)
/// and, for qubit-coupled maps, one data qubit.
pub fn spaces_for_map(m: LogicalMap, params: &GkpCodeParams) -> (CodeSpace, CodeSpace) {
    let qubits = if m.uses_qubit() { vec![QubitRole::Data] } else { Vec::new() };
    let sin = CodeSpace { params: *params, modes: vec![ModeRole::Data { bits: m.bits_in() }], qubits: qubits.clone() };
    let sout = CodeSpace { params: *params, modes: vec![ModeRole::Data { bits: m.bits_out() }], qubits };
    (sin, sout)
}

/// Checks `|<a_i|a_j> - delta_ij| <= BASIS_TOL` for every pair.
pub fn check_orthonormal(basis: &[HybridState]) -> Result<()> {
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let v = basis[i].inner_product(&basis[j])?;
            let target = if i == j { 1.0 } else { 0.0 };
            if (v - c(target, 0.0)).norm() > BASIS_TOL {
                bail!(Precondition, "code basis not orthonormal: <{i}|{j}> = {v}");
            }
        }
    }
    Ok(())
}

/// `<out_m| W |in>` for every output basis state.
pub fn element_column(w: &ElementaryCircuit, input: &HybridState, outs: &[HybridState]) -> Result<Vec<C64>> {
    let (image, _) = run_circuit(input, &w.gates)?;
    outs.iter().map(|o| o.inner_product(&image)).collect()
}

/// Matrix `E_{mk} = <out_m| W |in_k>`.
pub fn element_matrix(w: &ElementaryCircuit, ins: &[HybridState], outs: &[HybridState]) -> Result<CMatrix> {
    let mut e = CMatrix::zeros(outs.len(), ins.len());
    for (k, input) in ins.iter().enumerate() {
        for (m, v) in element_column(w, input, outs)?.into_iter().enumerate() {
            e[(m, k)] = v;
        }
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BMatrix {
    pub entries: CMatrix,
    /// Largest number of entries above [`SPARSITY_THRESHOLD`] in a row or column.
    pub sparsity: usize,
    pub min_diag: f64,
    pub max_offdiag: f64,
    pub diag_imag_max: f64,
    /// Largest magnitude that was treated as a structural zero.
    pub largest_discarded: f64,
}

impl BMatrix {
    pub fn from_entries(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.rows() == 0 {
            bail!(Shape, "B must be square and non-empty, got {}x{}", entries.rows(), entries.cols());
        }
        let n = entries.rows();
        let mut row_nnz = vec![0usize; n];
        let mut col_nnz = vec![0usize; n];
        let (mut min_diag, mut max_offdiag, mut diag_imag_max, mut largest_discarded) =
            (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
        for r in 0..n {
            for col in 0..n {
                let v = entries[(r, col)];
                let a = v.norm();
                if a > SPARSITY_THRESHOLD {
                    row_nnz[r] += 1;
                    col_nnz[col] += 1;
                } else {
                    largest_discarded = largest_discarded.max(a);
                }
                if r == col {
                    min_diag = min_diag.min(a);
                    diag_imag_max = diag_imag_max.max(v.im.abs());
                } else {
                    max_offdiag = max_offdiag.max(a);
                }
            }
        }
        let sparsity = row_nnz.iter().chain(&col_nnz).copied().max().unwrap_or(0);
        Ok(BMatrix { entries, sparsity, min_diag, max_offdiag, diag_imag_max, largest_discarded })
    }

    /// `||B - I||_F`, a diagnostic with no claimed relation to the gate error.
    pub fn subspace_deviation(&self) -> f64 {
        let n = self.entries.rows();
        self.entries.sub(&CMatrix::identity(n)).map(|d| d.frobenius()).unwrap_or(f64::NAN)
    }
}

/// `B = U^dagger E`.
pub fn b_from_elements(u: &CMatrix, e: &CMatrix) -> Result<BMatrix> {
    if u.rows() != e.rows() || u.cols() != e.cols() {
        bail!(Shape, "logical matrix is {}x{} but elements are {}x{}", u.rows(), u.cols(), e.rows(), e.cols());
    }
    BMatrix::from_entries(u.adjoint().matmul(e)?)
}

/// B matrix of `w` against `u`, with both code bases checked first.
pub fn compute_b(
    w: &ElementaryCircuit,
    u: &CMatrix,
    code_in: &[HybridState],
    code_out: &[HybridState],
) -> Result<BMatrix> {
    if u.cols() != code_in.len() || u.rows() != code_out.len() {
        bail!(
            Shape,
            "logical matrix is {}x{} for bases of size {} -> {}",
            u.rows(),
            u.cols(),
            code_in.len(),
            code_out.len()
        );
    }
    check_orthonormal(code_in)?;
    check_orthonormal(code_out)?;
    b_from_elements(u, &element_matrix(w, code_in, code_out)?)
}

/// The sparse-B bound `8 ((1 - min|B_jj|) + (s - 1) max|B_jk|)^{1/2}`.
pub fn sparse_bound(b: &BMatrix) -> Result<f64> {
    if b.diag_imag_max > DIAG_IMAG_TOL {
        bail!(Precondition, "diagonal of B is not real: max |Im B_jj| = {:e}", b.diag_imag_max);
    }
    if b.min_diag <= SPARSITY_THRESHOLD {
        bail!(Precondition, "diagonal of B has a zero entry (min |B_jj| = {:e})", b.min_diag);
    }
    let inner = (1.0 - b.min_diag) + (b.sparsity.max(1) - 1) as f64 * b.max_offdiag;
    Ok(8.0 * inner.max(0.0).sqrt())
}

fn check_nonnegative(xs: &[f64]) -> Result<()> {
    if let Some(x) = xs.iter().find(|x| !(**x >= 0.0)) {
        bail!(Parameter, "error bounds must be non-negative, got {x}");
    }
    Ok(())
}

/// Subadditivity: the error of a composition is at most the sum.
pub fn compose_bounds(steps: &[f64]) -> Result<f64> {
    check_nonnegative(steps)?;
    Ok(steps.iter().sum())
}

/// Ideal-implementation bound plus the errors of the noisy replacements.
pub fn noisy_bound(ideal: f64, noise_errors: &[f64]) -> Result<f64> {
    check_nonnegative(&[ideal])?;
    check_nonnegative(noise_errors)?;
    Ok(ideal + noise_errors.iter().sum::<f64>())
}

/// Closed-form error bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundTarget {
    /// `8 kappa`.
    QCX { kappa: f64 },
    /// `16 2^l Delta + 32 (Delta/eps)^2`.
    LSB { ell: usize, delta: f64, eps: f64 },
    /// Exact: 0.
    Embed,
    /// `96 l kappa`.
    Transfer { ell: usize, kappa: f64 },
    /// `400 l kappa` (single register).
    TwoQubit { ell: usize, kappa: f64 },
    /// `400 l kappa` (two registers).
    Bipartite { ell: usize, kappa: f64 },
    /// `T 400 l kappa` for a circuit of `T` two-qubit gates.
    Circuit { ell: usize, kappa: f64, gates: usize },
    /// `12 / sqrt(L)`.
    CombQCX { comb_len: usize },
    /// `600 2^{2l} T Delta`.
    CombCircuit { ell: usize, delta: f64, gates: usize },
    /// `600 2^{2l} Delta`.
    CombBipartite { ell: usize, delta: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis {
    pub name: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticBound {
    pub value: f64,
    pub vacuous: bool,
    pub hypotheses: Vec<Hypothesis>,
}

impl AnalyticBound {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.ok)
    }
}

fn hyp(name: String, ok: bool) -> Hypothesis {
    Hypothesis { name, ok }
}

fn kappa_hyp(kappa: f64) -> Hypothesis {
    hyp(format!("kappa = {kappa} in (0, 1/4)"), kappa > 0.0 && kappa < 0.25)
}

fn delta_hyp(delta: f64) -> Hypothesis {
    hyp(format!("Delta = {delta} in (0, 1/4)"), delta > 0.0 && delta < 0.25)
}

pub fn analytic_bound(target: BoundTarget) -> AnalyticBound {
    let two = |ell: usize| 2f64.powi(ell as i32);
    let (value, hypotheses) = match target {
        BoundTarget::QCX { kappa } => (8.0 * kappa, vec![kappa_hyp(kappa)]),
        BoundTarget::LSB { ell, delta, eps } => (
            16.0 * two(ell) * delta + 32.0 * (delta / eps).powi(2),
            vec![delta_hyp(delta), hyp(format!("eps = {eps} <= 2^-(l+1)"), eps <= 1.0 / two(ell + 1) * (1.0 + 1e-12))],
        ),
        BoundTarget::Embed => (0.0, Vec::new()),
        BoundTarget::Transfer { ell, kappa } => (96.0 * ell as f64 * kappa, vec![kappa_hyp(kappa)]),
        BoundTarget::TwoQubit { ell, kappa } | BoundTarget::Bipartite { ell, kappa } => {
            (400.0 * ell as f64 * kappa, vec![kappa_hyp(kappa)])
        }
        BoundTarget::Circuit { ell, kappa, gates } => {
            (gates as f64 * 400.0 * ell as f64 * kappa, vec![kappa_hyp(kappa)])
        }
        BoundTarget::CombQCX { comb_len } => (
            12.0 / (comb_len as f64).sqrt(),
            vec![hyp(format!("L = {comb_len} even and >= 2"), comb_len >= 2 && comb_len % 2 == 0)],
        ),
        BoundTarget::CombCircuit { ell, delta, gates } => {
            (600.0 * two(2 * ell) * gates as f64 * delta, vec![delta_hyp(delta)])
        }
        BoundTarget::CombBipartite { ell, delta } => (600.0 * two(2 * ell) * delta, vec![delta_hyp(delta)]),
    };
    AnalyticBound { value, vacuous: value >= VACUOUS, hypotheses }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub target: String,
    pub corollary_bound: f64,
    pub analytic_bound: AnalyticBound,
    pub subspace_deviation: f64,
    pub b: BMatrix,
}

/// A measured quantity against a bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    fn at_least(name: String, measured: f64, bound: f64) -> Self {
        Check { name, measured, bound, pass: measured >= bound }
    }

    fn at_most(name: String, measured: f64, bound: f64) -> Self {
        Check { name, measured, bound, pass: measured <= bound }
    }
}

/// Element matrix, B matrix and bound of one basic map on the symmetric code
/// of an `ell`-bit register (`Embed_l` maps into `ell + 1` bits with the same
/// `Delta` and `eps`).
pub fn basic_map_report(kind: MapKind, ell: usize, kappa: f64) -> Result<(CMatrix, ErrorReport)> {
    map_report(LogicalMap::new(kind, ell), &symmetric_params(kappa, 1 << ell)?)
}

/// Element matrix, B matrix and bound of one basic map on registers with the
/// peak shape of `params` (its dimension is ignored).
///
/// `Embed^dagger` is reported through `Embed`: the adjoint of an isometry has
/// no invertible B, and on the range of `Embed` it acts as its exact inverse.
pub fn map_report(m: LogicalMap, params: &GkpCodeParams) -> Result<(CMatrix, ErrorReport)> {
    let m = if m.kind == MapKind::EmbedAdj { LogicalMap::new(MapKind::Embed, m.ell) } else { m };
    let (sin, sout) = spaces_for_map(m, params);
    let ins = sin.basis()?;
    let outs = sout.basis()?;
    check_orthonormal(&ins)?;
    if params.with_dimension(1 << m.bits_out()).orthogonal_truncation() {
        check_orthonormal(&outs)?;
    }
    let w = compiler::lower_basic(m)?;
    let e = element_matrix(&w, &ins, &outs)?;
    let u = ideal_matrix(m)?;
    let b = b_from_elements(&u, &e)?;
    let target = match m.kind {
        MapKind::QCX | MapKind::QCXAdj => BoundTarget::QCX { kappa: params.kappa },
        MapKind::LSB | MapKind::LSBAdj => BoundTarget::LSB { ell: m.ell, delta: params.delta, eps: params.eps },
        MapKind::Embed | MapKind::EmbedAdj => BoundTarget::Embed,
    };
    let corollary_bound = sparse_bound(&b)?;
    let report = ErrorReport {
        target: String::from(m.name()),
        corollary_bound,
        analytic_bound: analytic_bound(target),
        subspace_deviation: b.subspace_deviation(),
        b,
    };
    Ok((e, report))
}

/// Subadditive bound of a logical circuit: the sum over its basic maps of
/// the computed corollary bound (`computed`) and of the closed-form bound
/// (`analytic`). Qubit gates are exact and contribute nothing.
#[derive(Clone, Debug, PartialEq)]
pub struct ComposedBound {
    pub computed: f64,
    pub analytic: f64,
    /// `(map, uses, computed, analytic)` per distinct map.
    pub per_map: Vec<(String, usize, f64, f64)>,
}

/// Composes per-map bounds for `lc` with every register sharing the peak
/// shape of `params`. Each distinct map is simulated once.
pub fn composed_bound(lc: &LogicalCircuit, params: &GkpCodeParams) -> Result<ComposedBound> {
    use crate::logical_layer::LogicalOp;
    use alloc::collections::BTreeMap;
    lc.validate()?;
    let mut uses: BTreeMap<(MapKind, usize), (LogicalMap, usize)> = BTreeMap::new();
    for op in &lc.ops {
        if let LogicalOp::Map { map, .. } = *op {
            uses.entry((map.kind, map.ell)).or_insert((map, 0)).1 += 1;
        }
    }
    let mut per_map = Vec::new();
    let (mut computed, mut analytic) = (Vec::new(), Vec::new());
    for (map, n) in uses.into_values() {
        let (_, rep) = map_report(map, params)?;
        for _ in 0..n {
            computed.push(rep.corollary_bound);
            analytic.push(rep.analytic_bound.value);
        }
        per_map.push((format!("{}_{}", map.name(), map.ell), n, rep.corollary_bound, rep.analytic_bound.value));
    }
    Ok(ComposedBound { computed: compose_bounds(&computed)?, analytic: compose_bounds(&analytic)?, per_map })
}

/// Pattern entries `U_{mk} != 0`: (min, max) of their real parts and the
/// largest imaginary part; all other entries: the largest magnitude.
fn pattern_stats(u: &CMatrix, e: &CMatrix) -> (f64, f64, f64, f64) {
    let (mut lo, mut hi, mut im, mut off) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for r in 0..u.rows() {
        for col in 0..u.cols() {
            let v = e[(r, col)];
            if u[(r, col)].norm() > 0.5 {
                lo = lo.min(v.re);
                hi = hi.max(v.re);
                im = im.max(v.im.abs());
            } else {
                off = off.max(v.norm());
            }
        }
    }
    (lo, hi, im, off)
}

/// Matrix elements of `W_qCX` on the symmetric code: pattern entries in
/// `[1 - kappa^2, 1]`, all others below `1e-10`.
pub fn check_qcx(ell: usize, kappa: f64) -> Result<(Vec<Check>, ErrorReport)> {
    let (e, rep) = basic_map_report(MapKind::QCX, ell, kappa)?;
    let u = ideal_matrix(LogicalMap::new(MapKind::QCX, ell))?;
    let (lo, hi, im, off) = pattern_stats(&u, &e);
    let tag = format!("qcx l={ell} kappa={kappa}");
    let checks = vec![
        Check::at_least(format!("{tag}: min pattern element"), lo, 1.0 - kappa * kappa),
        Check::at_most(format!("{tag}: max pattern element"), hi, 1.0 + 1e-12),
        Check::at_most(format!("{tag}: max |Im| pattern element"), im, 1e-12),
        Check::at_most(format!("{tag}: max off-pattern element"), off, 1e-10),
    ];
    Ok((checks, rep))
}

/// `2 2^{2l} Delta^2 + 8 (Delta/eps)^4`.
pub fn lsb_element_slack(ell: usize, delta: f64, eps: f64) -> f64 {
    2.0 * 4f64.powi(ell as i32) * delta * delta + 8.0 * (delta / eps).powi(4)
}

/// Matrix elements of `W_LSB` on the symmetric code.
///
/// Entries with equal register values split into the pattern entry (qubit
/// flipped by the parity) and its partner (the other qubit value); entries
/// between different register values vanish by disjoint support.
pub fn check_lsb(ell: usize, kappa: f64) -> Result<(Vec<Check>, ErrorReport)> {
    let (e, rep) = basic_map_report(MapKind::LSB, ell, kappa)?;
    let params = symmetric_params(kappa, 1 << ell)?;
    let slack = lsb_element_slack(ell, params.delta, params.eps);
    let u = ideal_matrix(LogicalMap::new(MapKind::LSB, ell))?;
    let (mut lo, mut partner, mut other) = (f64::INFINITY, 0.0f64, 0.0f64);
    for r in 0..u.rows() {
        for col in 0..u.cols() {
            let v = e[(r, col)];
            if u[(r, col)].norm() > 0.5 {
                lo = lo.min(v.norm());
            } else if r / 2 == col / 2 {
                partner = partner.max(v.norm());
            } else {
                other = other.max(v.norm());
            }
        }
    }
    let tag = format!("lsb l={ell} kappa={kappa}");
    let checks = vec![
        Check::at_least(format!("{tag}: min pattern element"), lo, 1.0 - slack),
        Check::at_most(format!("{tag}: max partner element"), partner, slack),
        Check::at_most(format!("{tag}: max element across registers"), other, 1e-10),
    ];
    Ok((checks, rep))
}

/// `<GKP(2j)_{2d}, M_sqrt2 GKP(j)_d> = 1`.
pub fn check_embed(ell: usize, kappa: f64) -> Result<(Vec<Check>, ErrorReport)> {
    let (e, rep) = basic_map_report(MapKind::Embed, ell, kappa)?;
    let mut dev = 0.0f64;
    for j in 0..(1usize << ell) {
        dev = dev.max((e[(2 * j, j)] - c(1.0, 0.0)).norm());
    }
    let checks = vec![Check::at_most(format!("embed l={ell} kappa={kappa}: max |overlap - 1|"), dev, 1e-10)];
    Ok((checks, rep))
}

/// Matrix of the logical shift `e^{-i sqrt(2 pi/d) P}` between comb codewords.
pub fn comb_shift_matrix(d: usize, comb_len: usize, delta: f64, eps: f64) -> Result<CMatrix> {
    let p = GkpCodeParams::comb(d, delta, eps, Some(comb_len))?;
    let words = (0..d).map(|j| make_codeword(&p, j)).collect::<Result<Vec<_>>>()?;
    let t = (2.0 * PI / d as f64).sqrt();
    Ok(CMatrix::from_fn(d, d, |j, k| words[j].inner_product(&words[k].translate(t))))
}

/// Checks on the comb shift element.
///
/// The first check is the literal statement: the element is `1 - 2/L` for
/// `j = k + 1 mod d` and 0 otherwise, to `1e-10`. The second is the
/// two-sided form `(1 - 2/L) delta <= M <= delta`.
pub fn check_comb_shift(d: usize, comb_len: usize, delta: f64, eps: f64) -> Result<Vec<Check>> {
    let m = comb_shift_matrix(d, comb_len, delta, eps)?;
    let lf = comb_len as f64;
    let (mut literal_dev, mut lo, mut hi, mut off) = (0.0f64, f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for j in 0..d {
        for k in 0..d {
            let v = m[(j, k)];
            let hit = j == (k + 1) % d;
            let expect = if hit { 1.0 - 2.0 / lf } else { 0.0 };
            literal_dev = literal_dev.max((v - c(expect, 0.0)).norm());
            if hit {
                lo = lo.min(v.re);
                hi = hi.max(v.re);
            } else {
                off = off.max(v.norm());
            }
        }
    }
    let tag = format!("comb shift d={d} L={comb_len}");
    Ok(vec![
        Check::at_most(format!("{tag}: max |M - (1 - 2/L) delta|"), literal_dev, 1e-10),
        Check::at_least(format!("{tag}: min shifted element"), lo, 1.0 - 2.0 / lf),
        Check::at_most(format!("{tag}: max shifted element"), hi, 1.0 + 1e-12),
        Check::at_most(format!("{tag}: max other element"), off, 1e-10),
    ])
}

/// `<Sha, e^{2 pi i z Q} Sha> >= 1 - 10 z^2 Delta^2 - 16 (Delta/eps)^4`.
pub fn check_comb_momentum(z: i32, delta: f64, eps: f64, comb_len: usize) -> Result<Check> {
    let s = comb_base_state(comb_len, delta, eps)?;
    let v = s.inner_product(&s.phase_mul(2.0 * PI * z as f64));
    let zf = z as f64;
    let bound = 1.0 - 10.0 * zf * zf * delta * delta - 16.0 * (delta / eps).powi(4);
    Ok(Check::at_least(format!("comb momentum z={z} Delta={delta} eps={eps} L={comb_len}"), v.re, bound))
}

/// Which family of inequalities to evaluate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CheckGate {
    QCX { ell: usize, kappa: f64 },
    LSB { ell: usize, kappa: f64 },
    Embed { ell: usize, kappa: f64 },
    CombShift { d: usize, comb_len: usize, delta: f64, eps: f64 },
    CombMomentum { z: i32, delta: f64, eps: f64, comb_len: usize },
}

pub fn check_inequalities(gate: CheckGate) -> Result<Vec<Check>> {
    Ok(match gate {
        CheckGate::QCX { ell, kappa } => check_qcx(ell, kappa)?.0,
        CheckGate::LSB { ell, kappa } => check_lsb(ell, kappa)?.0,
        CheckGate::Embed { ell, kappa } => check_embed(ell, kappa)?.0,
        CheckGate::CombShift { d, comb_len, delta, eps } => check_comb_shift(d, comb_len, delta, eps)?,
        CheckGate::CombMomentum { z, delta, eps, comb_len } => vec![check_comb_momentum(z, delta, eps, comb_len)?],
    })
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
