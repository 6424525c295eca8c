//! Compiled circuits simulated on their code spaces.

use gkp_core::clifford::{decompose, QuditGate};
use gkp_core::compiler::{self, AuditBounds, ElementaryCircuit};
use gkp_core::error_analysis::{
    analytic_bound, b_from_elements, check_orthonormal, composed_bound, element_column, spaces_for_circuit,
    spaces_for_map, sparse_bound, AnalyticBound, BoundTarget, CodeSpace, ComposedBound, ErrorReport,
};
use gkp_core::gkp_states::symmetric_params;
use gkp_core::hybrid_sim::{run_circuit, HybridState};
use gkp_core::linalg::CMatrix;
use gkp_core::logical_layer::{
    self, bipartite_wires, ideal_matrix, transfer_wires, two_qubit_wires, LogicalCircuit, LogicalMap, MapKind,
};
use gkp_core::oracle::bit_transfer_formula;
use gkp_core::{Error, Result, C64};
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub enum CircuitSpec {
    Map(LogicalMap),
    Transfer {
        ell: usize,
        j: usize,
    },
    TwoQubit {
        ell: usize,
        j: usize,
        k: usize,
        u: [[C64; 4]; 4],
    },
    Bipartite {
        ell: usize,
        j: usize,
        k: usize,
        u: [[C64; 4]; 4],
    },
    /// A qudit Clifford through its two-qubit factorization.
    Clifford(QuditGate),
}

impl CircuitSpec {
    pub fn ell(&self) -> usize {
        match *self {
            CircuitSpec::Map(m) => m.ell,
            CircuitSpec::Transfer { ell, .. }
            | CircuitSpec::TwoQubit { ell, .. }
            | CircuitSpec::Bipartite { ell, .. } => ell,
            CircuitSpec::Clifford(g) => g.ell,
        }
    }

    pub fn name(&self) -> String {
        match self {
            CircuitSpec::Map(m) => m.name().to_string(),
            CircuitSpec::Transfer { j, .. } => format!("transfer(j={j})"),
            CircuitSpec::TwoQubit { j, k, .. } => format!("twoqubit(j={j},k={k})"),
            CircuitSpec::Bipartite { j, k, .. } => format!("bipartite(j={j},k={k})"),
            CircuitSpec::Clifford(g) => format!("clifford({})", g.name.label()),
        }
    }

    /// The logical circuit and its data wires (basic maps have none).
    pub fn logical(&self) -> Result<Option<(LogicalCircuit, Vec<usize>)>> {
        Ok(match self {
            CircuitSpec::Map(_) => None,
            CircuitSpec::Transfer { ell, j } => {
                Some((logical_layer::build_bit_transfer(*ell, *j)?, vec![transfer_wires::S, transfer_wires::T]))
            }
            CircuitSpec::TwoQubit { ell, j, k, u } => {
                Some((logical_layer::build_two_qubit(*ell, *j, *k, u)?, vec![two_qubit_wires::S]))
            }
            CircuitSpec::Bipartite { ell, j, k, u } => Some((
                logical_layer::build_bipartite_two_qubit(*ell, *j, *k, u)?,
                vec![bipartite_wires::S1, bipartite_wires::S2],
            )),
            CircuitSpec::Clifford(g) => {
                let f = decompose(*g)?;
                let data =
                    if f.bipartite { vec![bipartite_wires::S1, bipartite_wires::S2] } else { vec![two_qubit_wires::S] };
                Some((f.logical_circuit()?, data))
            }
        })
    }

    pub fn elementary(&self) -> Result<ElementaryCircuit> {
        match self {
            CircuitSpec::Map(m) => compiler::lower_basic(*m),
            _ => compiler::lower_logical(&self.logical()?.expect("composite circuit").0),
        }
    }

    /// The intended action on the data index.
    pub fn target(&self) -> Result<CMatrix> {
        match self {
            CircuitSpec::Map(m) => ideal_matrix(*m),
            CircuitSpec::Transfer { ell, j } => bit_transfer_formula(*ell, *j),
            CircuitSpec::TwoQubit { ell, j, k, u } => Ok(logical_layer::two_qubit_target(*ell, *j, *k, u)),
            CircuitSpec::Bipartite { ell, j, k, u } => Ok(logical_layer::bipartite_target(*ell, *j, *k, u)),
            // The factor product, which equals the gate up to a global phase.
            CircuitSpec::Clifford(g) => Ok(decompose(*g)?.dense()),
        }
    }

    pub fn spaces(&self, kappa: f64) -> Result<(CodeSpace, CodeSpace)> {
        let params = symmetric_params(kappa, 1 << self.ell())?;
        match self {
            CircuitSpec::Map(m) => Ok(spaces_for_map(*m, &params)),
            _ => {
                let (lc, data) = self.logical()?.expect("composite circuit");
                spaces_for_circuit(&lc, &data, &params)
            }
        }
    }

    pub fn analytic(&self, kappa: f64) -> Result<AnalyticBound> {
        let ell = self.ell();
        let target = match self {
            CircuitSpec::Map(m) => match m.kind {
                MapKind::QCX | MapKind::QCXAdj => BoundTarget::QCX { kappa },
                MapKind::LSB | MapKind::LSBAdj => {
                    let p = symmetric_params(kappa, 1 << ell)?;
                    BoundTarget::LSB { ell, delta: p.delta, eps: p.eps }
                }
                MapKind::Embed | MapKind::EmbedAdj => BoundTarget::Embed,
            },
            CircuitSpec::Transfer { .. } => BoundTarget::Transfer { ell, kappa },
            CircuitSpec::TwoQubit { .. } => BoundTarget::TwoQubit { ell, kappa },
            CircuitSpec::Bipartite { .. } => BoundTarget::Bipartite { ell, kappa },
            CircuitSpec::Clifford(g) => BoundTarget::Circuit { ell, kappa, gates: decompose(*g)?.t() },
        };
        Ok(analytic_bound(target))
    }

    /// Strength and count bounds the lowered circuit must meet.
    pub fn budget(&self) -> Result<AuditBounds> {
        let ell = self.ell();
        let max_count = match self {
            CircuitSpec::Map(m) => match m.kind {
                MapKind::LSB | MapKind::LSBAdj => compiler::lsb_budget(ell),
                _ => 1,
            },
            CircuitSpec::Transfer { .. } => compiler::transfer_budget(ell),
            CircuitSpec::TwoQubit { .. } | CircuitSpec::Bipartite { .. } => compiler::two_qubit_budget(ell),
            CircuitSpec::Clifford(g) => compiler::two_qubit_budget(ell) * decompose(*g)?.t(),
        };
        Ok(AuditBounds { max_squeeze: compiler::MAX_SQUEEZE, max_displacement: compiler::zeta(ell), max_count })
    }
}

/// Element matrix `<out_m|W|in_k>`, one input column per rayon task.
pub fn element_matrix_par(w: &ElementaryCircuit, ins: &[HybridState], outs: &[HybridState]) -> Result<CMatrix> {
    let cols: Vec<Vec<C64>> = ins.par_iter().map(|s| element_column(w, s, outs)).collect::<Result<_>>()?;
    Ok(CMatrix::from_fn(outs.len(), ins.len(), |m, k| cols[k][m]))
}

/// Computed error data of a compiled circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitReport {
    /// `corollary_bound` is the sparse bound for a basic map and the
    /// composed per-map bound for a compound circuit.
    pub report: ErrorReport,
    /// Per-map composition (compound circuits only).
    pub composed: Option<ComposedBound>,
    /// Sparse bound of the whole circuit's B, when its diagonal is real.
    pub direct_sparse: Option<f64>,
}

/// Simulates the compiled circuit on its code space and bounds its error.
///
/// The corollary needs a real diagonal, which basic maps have. A compound
/// circuit's B can pick up imaginary diagonal parts of second order in the
/// peak width (leakage of one approximate map is partly undone by a later
/// one), so compound circuits are bounded by subadditivity over their maps
/// and the direct B is kept as a diagnostic.
pub fn circuit_report(spec: &CircuitSpec, kappa: f64) -> Result<(CMatrix, CircuitReport)> {
    let (sin, sout) = spec.spaces(kappa)?;
    let ins = sin.basis()?;
    let outs = sout.basis()?;
    check_orthonormal(&ins)?;
    let embeds = matches!(spec, CircuitSpec::Map(m) if m.kind == MapKind::Embed);
    if !embeds {
        check_orthonormal(&outs)?;
    }
    let w = spec.elementary()?;
    let e = element_matrix_par(&w, &ins, &outs)?;
    let b = b_from_elements(&spec.target()?, &e)?;
    let direct_sparse = sparse_bound(&b).ok();
    let composed = match spec.logical()? {
        Some((lc, _)) => Some(composed_bound(&lc, &sin.params)?),
        None => None,
    };
    let corollary_bound = match (&composed, direct_sparse) {
        (Some(c), _) => c.computed,
        (None, Some(s)) => s,
        (None, None) => sparse_bound(&b)?,
    };
    let report = ErrorReport {
        target: spec.name(),
        corollary_bound,
        analytic_bound: spec.analytic(kappa)?,
        subspace_deviation: b.subspace_deviation(),
        b,
    };
    Ok((e, CircuitReport { report, composed, direct_sparse }))
}

/// Largest `| ||W psi|| - 1 |` over the input code basis.
pub fn norm_defect(spec: &CircuitSpec, kappa: f64) -> Result<f64> {
    let (sin, _) = spec.spaces(kappa)?;
    let w = spec.elementary()?;
    let defects: Vec<f64> = sin
        .basis()?
        .par_iter()
        .map(|s| run_circuit(s, &w.gates).map(|(img, _)| (img.norm() - s.norm()).abs() + (s.norm() - 1.0).abs()))
        .collect::<Result<_>>()?;
    Ok(defects.into_iter().fold(0.0, f64::max))
}

/// Checks a composite spec refers to a valid circuit before heavy work.
pub fn validate(spec: &CircuitSpec) -> Result<()> {
    if spec.ell() == 0 {
        return Err(Error::Parameter("l must be at least 1".into()));
    }
    spec.elementary()?.validate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use gkp_core::linalg::cnot;

    #[test]
    fn transfer_report_is_small() {
        let (_, r) = circuit_report(&CircuitSpec::Transfer { ell: 2, j: 1 }, 0.05).unwrap();
        let c = r.composed.unwrap();
        assert_eq!(r.report.corollary_bound, c.computed);
        assert!(c.computed <= c.analytic && c.analytic <= r.report.analytic_bound.value);
        assert!(r.report.b.min_diag > 0.99 && r.report.b.max_offdiag < 0.01);
    }

    #[test]
    fn two_qubit_norms() {
        let spec = CircuitSpec::TwoQubit { ell: 2, j: 0, k: 1, u: cnot() };
        assert!(norm_defect(&spec, 0.1).unwrap() < 1e-10);
    }
}
