//! Exhaustive checks of the ideal logical layer.

use gkp_core::logical_layer::{
    bipartite_target, bipartite_wires, bit_transfer_action, build_bipartite_two_qubit, build_bit_transfer,
    build_two_qubit, two_qubit_target, two_qubit_wires,
};
use gkp_core::{Error, Result, C64};
use rayon::prelude::*;

use crate::random::{random_two_qubit, rng};

/// Agreement required between a circuit and its dense target.
pub const TOL: f64 = 1e-12;
/// Largest register size accepted.
pub const MAX_ELL: usize = 10;
/// Largest register size for single-register dense comparisons.
pub const MAX_DENSE_ELL: usize = 8;
/// Largest register size for two-register dense comparisons.
pub const MAX_DENSE_BIPARTITE_ELL: usize = 4;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub transfer_states: usize,
    pub transfer_mismatches: usize,
    pub two_qubit_cases: usize,
    pub two_qubit_error: f64,
    pub bipartite_cases: usize,
    pub bipartite_error: f64,
}

/// Number of basis states of `C^j_l X` that do not map exactly to the
/// arithmetic result with `B` and `Q` restored to zero.
pub fn transfer_mismatches(ell: usize, j: usize) -> Result<usize> {
    let c = build_bit_transfer(ell, j)?;
    let mut bad = 0;
    for x in 0..1u64 << ell {
        for b in 0..2u64 {
            let (out, lost) = c.apply_basis(&[x, b, 0, 0])?;
            let (y, nb) = bit_transfer_action(ell, j, x, b);
            let ok = lost == 0.0 && out.len() == 1 && out.get(&vec![y, nb, 0, 0]) == Some(&C64::new(1.0, 0.0));
            bad += usize::from(!ok);
        }
    }
    Ok(bad)
}

pub fn verify_ideal(ell: usize, seed: u64, cases: usize) -> Result<VerifyReport> {
    if ell == 0 || ell > MAX_ELL {
        return Err(Error::TooLarge(format!("verify-ideal needs 1 <= l <= {MAX_ELL}, got {ell}")));
    }
    let mut r = VerifyReport::default();
    let per_j: Vec<usize> = (0..ell).into_par_iter().map(|j| transfer_mismatches(ell, j)).collect::<Result<_>>()?;
    r.transfer_states = ell << (ell + 1);
    r.transfer_mismatches = per_j.iter().sum();

    let mut g = rng(seed);
    let us: Vec<[[C64; 4]; 4]> = (0..cases).map(|_| random_two_qubit(&mut g)).collect();
    let pairs: Vec<(usize, usize)> = (0..ell).flat_map(|j| (j + 1..ell).map(move |k| (j, k))).collect();
    if ell <= MAX_DENSE_ELL && !pairs.is_empty() {
        let errs: Vec<f64> = us
            .par_iter()
            .enumerate()
            .map(|(i, u)| {
                let (j, k) = pairs[i % pairs.len()];
                let (m, leak) = build_two_qubit(ell, j, k, u)?.restricted_matrix(&[two_qubit_wires::S])?;
                Ok(m.max_abs_diff(&two_qubit_target(ell, j, k, u)).max(leak))
            })
            .collect::<Result<_>>()?;
        r.two_qubit_cases = errs.len();
        r.two_qubit_error = errs.into_iter().fold(0.0, f64::max);
    }
    if ell <= MAX_DENSE_BIPARTITE_ELL {
        let errs: Vec<f64> = us
            .par_iter()
            .enumerate()
            .map(|(i, u)| {
                let (j, k) = ((i / ell) % ell, i % ell);
                let c = build_bipartite_two_qubit(ell, j, k, u)?;
                let (m, leak) = c.restricted_matrix(&[bipartite_wires::S1, bipartite_wires::S2])?;
                Ok(m.max_abs_diff(&bipartite_target(ell, j, k, u)).max(leak))
            })
            .collect::<Result<_>>()?;
        r.bipartite_cases = errs.len();
        r.bipartite_error = errs.into_iter().fold(0.0, f64::max);
    }
    Ok(r)
}
